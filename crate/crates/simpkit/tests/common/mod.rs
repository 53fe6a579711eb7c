//! Brute-force reference implementations and fixtures shared by the
//! integration and acceptance tests. Each oracle is written from the metric's
//! definition with plain lists and no shared code with the engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use simpkit::core::corpus::SentencePair;

pub type Tokens = Vec<String>;

/// Random sentence of `len` words drawn from a small vocabulary, so n-grams
/// overlap often.
pub fn random_sentence(rng: &mut impl Rng, len: usize) -> String {
    const VOCAB: [&str; 8] = ["the", "patient", "was", "given", "a", "drug", "dose", "daily"];
    (0..len)
        .map(|_| *VOCAB.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// `(source, hypothesis, references)` with at most 8 tokens each and 1..=3 references.
pub fn random_triple(rng: &mut impl Rng) -> (String, String, Vec<String>) {
    let src_len = rng.random_range(1..=8);
    let src = random_sentence(rng, src_len);
    let hyp_len = rng.random_range(1..=8);
    let hyp = random_sentence(rng, hyp_len);
    let n_refs = rng.random_range(1..=3);
    let refs = (0..n_refs)
        .map(|_| {
            let len = rng.random_range(1..=8);
            random_sentence(rng, len)
        })
        .collect();
    (src, hyp, refs)
}

pub fn words(s: &str) -> Tokens {
    s.split_whitespace().map(str::to_string).collect()
}

fn grams(tokens: &[String], n: usize) -> Vec<String> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].join(" ")).collect()
}

fn occurrences(list: &[String], g: &str) -> usize {
    list.iter().filter(|x| *x == g).count()
}

fn distinct(mut list: Vec<String>) -> Vec<String> {
    list.sort();
    list.dedup();
    list
}

/// Corpus BLEU: clipped counts summed over sentences, closest reference
/// length (shorter on ties), add-one smoothing for orders 2..4 with no match.
pub fn bleu_oracle(corpus: &[(Tokens, Vec<Tokens>)]) -> f64 {
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (hyp, refs) in corpus {
        c += hyp.len();
        let mut best = refs[0].len();
        for x in refs {
            let d_new = x.len().abs_diff(hyp.len());
            let d_old = best.abs_diff(hyp.len());
            if d_new < d_old || (d_new == d_old && x.len() < best) {
                best = x.len();
            }
        }
        r += best;
        for n in 1..=4 {
            let h = grams(hyp, n);
            totals[n - 1] += h.len();
            for g in distinct(h.clone()) {
                let max_ref = refs.iter().map(|x| occurrences(&grams(x, n), &g)).max().unwrap_or(0);
                matches[n - 1] += occurrences(&h, &g).min(max_ref);
            }
        }
    }
    if c == 0 || matches[0] == 0 {
        return 0.0;
    }
    let mut product = 1.0f64;
    for n in 0..4 {
        let p = if n > 0 && matches[n] == 0 {
            1.0 / (totals[n] as f64 + 1.0)
        } else {
            matches[n] as f64 / totals[n] as f64
        };
        product *= p;
    }
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * product.powf(0.25)
}

fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn rouge_n_single(hyp: &[String], reference: &[String], n: usize) -> f64 {
    let h = grams(hyp, n);
    let mut pool = grams(reference, n);
    if h.is_empty() || pool.is_empty() {
        return 0.0;
    }
    let ref_total = pool.len();
    let mut overlap = 0;
    for g in &h {
        if let Some(i) = pool.iter().position(|x| x == g) {
            pool.remove(i);
            overlap += 1;
        }
    }
    100.0 * f_measure(overlap as f64 / h.len() as f64, overlap as f64 / ref_total as f64)
}

fn is_subsequence(needle: &[&String], hay: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|x| it.any(|y| y == *x))
}

/// Longest common subsequence by trying every subsequence of `a`.
pub fn lcs_brute(a: &[String], b: &[String]) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let pick: Vec<&String> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| &a[i]).collect();
        if pick.len() > best && is_subsequence(&pick, b) {
            best = pick.len();
        }
    }
    best
}

fn rouge_l_single(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let l = lcs_brute(hyp, reference) as f64;
    100.0 * f_measure(l / hyp.len() as f64, l / reference.len() as f64)
}

/// ROUGE-1, ROUGE-2 and ROUGE-L F1, best reference.
pub fn rouge_oracle(hyp: &[String], refs: &[Tokens]) -> [f64; 3] {
    let best = |f: &dyn Fn(&Tokens) -> f64| refs.iter().map(f).fold(0.0, f64::max);
    [
        best(&|r| rouge_n_single(hyp, r, 1)),
        best(&|r| rouge_n_single(hyp, r, 2)),
        best(&|r| rouge_l_single(hyp, r)),
    ]
}

/// Sentence SARI with fractional reference weights.
pub fn sari_oracle(src: &[String], hyp: &[String], refs: &[Tokens]) -> f64 {
    let mut sum = 0.0;
    for n in 1..=4 {
        let s = distinct(grams(src, n));
        let o = distinct(grams(hyp, n));
        let ref_sets: Vec<Vec<String>> = refs.iter().map(|r| distinct(grams(r, n))).collect();
        let w = |g: &String| {
            ref_sets.iter().filter(|set| set.contains(g)).count() as f64 / refs.len() as f64
        };
        let all_ref = distinct(ref_sets.concat());

        let added: Vec<&String> = o.iter().filter(|g| !s.contains(g)).collect();
        let add_target: Vec<&String> = all_ref.iter().filter(|g| !s.contains(g)).collect();
        let add = if added.is_empty() {
            if add_target.is_empty() { 1.0 } else { 0.0 }
        } else {
            let p = added.iter().filter(|g| all_ref.contains(g)).count() as f64 / added.len() as f64;
            let denom: f64 = add_target.iter().map(|g| w(g)).sum();
            let r = if denom > 0.0 { added.iter().map(|g| w(g)).sum::<f64>() / denom } else { 0.0 };
            f_measure(p, r)
        };

        let kept: Vec<&String> = o.iter().filter(|g| s.contains(g)).collect();
        let keep_target: f64 = s.iter().map(&w).sum();
        let keep = if kept.is_empty() {
            if keep_target == 0.0 { 1.0 } else { 0.0 }
        } else {
            let earned: f64 = kept.iter().map(|g| w(g)).sum();
            let r = if keep_target > 0.0 { earned / keep_target } else { 0.0 };
            f_measure(earned / kept.len() as f64, r)
        };

        let deleted: Vec<&String> = s.iter().filter(|g| !o.contains(g)).collect();
        let del = if deleted.is_empty() {
            if s.iter().all(|g| w(g) == 1.0) { 1.0 } else { 0.0 }
        } else {
            deleted.iter().map(|g| 1.0 - w(g)).sum::<f64>() / deleted.len() as f64
        };
        sum += (add + keep + del) / 3.0;
    }
    100.0 * sum / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    Match,
    Sub,
    Del,
    Ins,
}

/// Every edit path from `a` to `b`, as forward op lists.
pub fn all_scripts(a: &[char], b: &[char]) -> Vec<Vec<Op>> {
    fn walk(a: &[char], b: &[char], i: usize, j: usize, path: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
        if i == a.len() && j == b.len() {
            out.push(path.clone());
            return;
        }
        if i < a.len() && j < b.len() {
            path.push(if a[i] == b[j] { Op::Match } else { Op::Sub });
            walk(a, b, i + 1, j + 1, path, out);
            path.pop();
        }
        if i < a.len() {
            path.push(Op::Del);
            walk(a, b, i + 1, j, path, out);
            path.pop();
        }
        if j < b.len() {
            path.push(Op::Ins);
            walk(a, b, i, j + 1, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(a, b, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Replace-only similarity from exhaustive enumeration: among minimal-cost
/// scripts, the canonical one has the smallest op sequence read from the end
/// under match < substitute < delete < insert.
pub fn replace_only_oracle(src: &str, tgt: &str) -> (usize, f64) {
    let a: Vec<char> = src.chars().collect();
    let b: Vec<char> = tgt.chars().collect();
    let cost = |s: &Vec<Op>| s.iter().filter(|&&o| o != Op::Match).count();
    let scripts = all_scripts(&a, &b);
    let min = scripts.iter().map(cost).min().expect("at least one script");
    let canonical = scripts
        .into_iter()
        .filter(|s| cost(s) == min)
        .min_by(|x, y| x.iter().rev().cmp(y.iter().rev()))
        .expect("a minimal script");
    let subs = canonical.iter().filter(|&&o| o == Op::Sub).count();
    let longest = a.len().max(b.len());
    let sim = if longest == 0 { 1.0 } else { 1.0 - subs as f64 / longest as f64 };
    (min, sim)
}

/// Krippendorff's alpha by enumerating every ordered pair of ratings inside
/// each unit, ordinal difference.
pub fn alpha_oracle(units: &[Vec<Option<u8>>]) -> f64 {
    let mut pairs: Vec<(u8, u8, f64)> = Vec::new();
    for unit in units {
        let vals: Vec<u8> = unit.iter().flatten().copied().collect();
        let m = vals.len();
        if m < 2 {
            continue;
        }
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    pairs.push((vals[i], vals[j], 1.0 / (m as f64 - 1.0)));
                }
            }
        }
    }
    let mut n_v: BTreeMap<u8, f64> = BTreeMap::new();
    for &(c, _, w) in &pairs {
        *n_v.entry(c).or_default() += w;
    }
    let n: f64 = n_v.values().sum();
    let delta = |c: u8, k: u8| -> f64 {
        let (lo, hi) = (c.min(k), c.max(k));
        let mut s = 0.0;
        for (&g, &ng) in &n_v {
            if g >= lo && g <= hi {
                s += ng;
            }
        }
        let s = s - (n_v[&lo] + n_v[&hi]) / 2.0;
        s * s
    };
    let observed: f64 = pairs.iter().map(|&(c, k, w)| w * delta(c, k)).sum::<f64>() / n;
    let mut expected = 0.0;
    for (&c, &nc) in &n_v {
        for (&k, &nk) in &n_v {
            expected += nc * nk * delta(c, k);
        }
    }
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        1.0
    } else {
        1.0 - observed / expected
    }
}

/// Random units × raters matrix on the 1..=5 scale with missing cells and at
/// least one pairable unit.
pub fn random_ratings(rng: &mut impl Rng) -> Vec<Vec<Option<u8>>> {
    loop {
        let units = rng.random_range(1..=8);
        let raters = rng.random_range(2..=4);
        let m: Vec<Vec<Option<u8>>> = (0..units)
            .map(|_| {
                (0..raters)
                    .map(|_| rng.random_bool(0.8).then(|| rng.random_range(1..=5)))
                    .collect()
            })
            .collect();
        if m.iter().any(|u| u.iter().flatten().count() >= 2) {
            return m;
        }
    }
}

pub fn pair(id: &str, doc: &str, src: &str, refs: &[&str]) -> SentencePair {
    SentencePair {
        id: id.into(),
        doc_id: doc.into(),
        src: src.into(),
        refs: refs.iter().map(|r| r.to_string()).collect(),
    }
}

/// Multi-reference validation pairs; both references are identical so a
/// generator returning the first one reaches SARI 100.
pub fn validation_pairs() -> Vec<SentencePair> {
    [
        ("v1", "patients with acute pharyngitis received antibiotics", "people with a sore throat got antibiotics"),
        ("v2", "the intervention reduced systolic blood pressure", "the treatment lowered blood pressure"),
        ("v3", "adverse events were infrequent and mild", "side effects were rare and mild"),
        ("v4", "participants were randomized to two cohorts", "people were split at random into two groups"),
    ]
    .iter()
    .map(|(id, src, r)| pair(id, "d", src, &[r, r]))
    .collect()
}

use simpkit::core::human_eval::{EvalItem, SlotPair};

/// Items over two systems, alternating which one sits in slot A.
pub fn eval_items(n: usize) -> Vec<EvalItem> {
    (0..n)
        .map(|i| {
            let (a, b) = if i % 2 == 0 { ("bart-ct", "t5-base") } else { ("t5-base", "bart-ct") };
            EvalItem {
                item_id: format!("item{i}"),
                source: format!("Source sentence {i}."),
                outputs: SlotPair { a: format!("Output {i} from A."), b: format!("Output {i} from B.") },
                blinding: SlotPair { a: a.into(), b: b.into() },
            }
        })
        .collect()
}

pub fn http_agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into()
}

/// Status and body of a GET.
pub fn get(agent: &ureq::Agent, url: &str) -> (u16, String) {
    let mut resp = agent.get(url).call().expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_to_string().unwrap_or_default())
}

pub fn post(agent: &ureq::Agent, url: &str, body: &serde_json::Value) -> (u16, String) {
    let mut resp = agent.post(url).send_json(body).expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_to_string().unwrap_or_default())
}

pub fn rating_body(item: &str, annotator: &str, a: (u8, u8), b: (u8, u8)) -> serde_json::Value {
    serde_json::json!({
        "item_id": item,
        "annotator": annotator,
        "ratings": {
            "A": {"meaning": a.0, "simplicity": a.1},
            "B": {"meaning": b.0, "simplicity": b.1}
        }
    })
}

use std::path::Path;

use simpkit::core::corpus::{reference_key, source_key};
use simpkit::core::parse::DepParse;
use simpkit::core::text::tokenize;

/// A small corpus: 40 pairs over 10 documents, every other pair with two
/// references and every tenth with none.
pub fn synthetic_corpus() -> Vec<SentencePair> {
    (0..40)
        .map(|i| {
            let src = format!("patients with acute pharyngitis number {i} received high dose antibiotics daily");
            let r1 = format!("people with sore throat {i} got antibiotics");
            let r2 = format!("patients {i} with a sore throat were given antibiotics every day");
            let refs: Vec<&str> = match i % 10 {
                0 => vec![],
                k if k % 2 == 1 => vec![&r1, &r2],
                _ => vec![&r1],
            };
            pair(&format!("p{i:02}"), &format!("doc{}", i / 4), &src, &refs)
        })
        .collect()
}

/// Right-branching chain parse: every token heads on the next one.
pub fn chain_parse(id: &str, text: &str) -> DepParse {
    let tokens = tokenize(text);
    let n = tokens.len();
    let heads = (0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect();
    DepParse::new(id, tokens, heads).unwrap()
}

pub fn corpus_parses(pairs: &[SentencePair]) -> Vec<DepParse> {
    let mut out = Vec::new();
    for p in pairs {
        out.push(chain_parse(&source_key(&p.id), &p.src));
        for (j, r) in p.refs.iter().enumerate() {
            out.push(chain_parse(&reference_key(&p.id, j), r));
        }
    }
    out
}

pub const FREQUENCY_LIST: &str = "the\nwith\na\nwere\npatients\npeople\ngot\ngiven\nevery\nday\nsore\nthroat\nnumber\nantibiotics\ndaily\nreceived\nhigh\ndose\nacute\npharyngitis\n";

/// Writes pairs.jsonl, parses.conllu and freq.txt into `dir`.
pub fn write_corpus(dir: &Path, pairs: &[SentencePair]) {
    simpkit::formats::save_pairs(&dir.join("pairs.jsonl"), pairs).unwrap();
    simpkit::formats::save_conllu(&dir.join("parses.conllu"), &corpus_parses(pairs)).unwrap();
    std::fs::write(dir.join("freq.txt"), FREQUENCY_LIST).unwrap();
}
