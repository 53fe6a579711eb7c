use std::collections::BTreeMap;

use simpkit_core::control_tokens::prepare_training_set;
use simpkit_core::corpus::{make_splits, reference_key, source_key, SentencePair, SplitRatios};
use simpkit_core::lexicon::RankTable;
use simpkit_core::metrics::{evaluate_system, EvalConfig, Metric};
use simpkit_core::parse::DepParse;
use simpkit_core::text::tokenize;

fn pair(id: usize, doc: usize, n_refs: usize) -> SentencePair {
    SentencePair {
        id: format!("p{id}"),
        doc_id: format!("d{doc}"),
        src: format!("the patient received drug number {id}"),
        refs: (0..n_refs).map(|r| format!("the patient got drug {id} {r}")).collect(),
    }
}

fn chain(id: &str, text: &str) -> DepParse {
    let tokens = tokenize(text);
    let heads = (0..tokens.len()).map(|i| i.checked_sub(1)).collect();
    DepParse::new(id, tokens, heads).unwrap()
}

#[test]
fn ten_pairs_split_eight_one_one() {
    let pairs: Vec<_> = (0..10).map(|i| pair(i, i / 2, 2)).collect();
    let split = make_splits(pairs.clone(), SplitRatios::default(), 0).unwrap();
    assert_eq!(split.sizes(), (8, 1, 1));
    let mut ids: Vec<_> = split
        .train
        .iter()
        .chain(&split.validation)
        .chain(&split.test)
        .map(|p| p.id.clone())
        .collect();
    ids.sort();
    let mut want: Vec<_> = pairs.iter().map(|p| p.id.clone()).collect();
    want.sort();
    assert_eq!(ids, want);
    assert_eq!(make_splits(pairs, SplitRatios::default(), 0).unwrap(), split);
}

#[test]
fn pairs_without_references_never_reach_a_split() {
    let pairs: Vec<_> = (0..20).map(|i| pair(i, i / 4, if i % 5 == 0 { 0 } else { 2 })).collect();
    let split = make_splits(pairs, SplitRatios::default(), 3).unwrap();
    assert_eq!(split.total(), 16);
    assert!(split.train.iter().all(|p| !p.refs.is_empty()));
}

#[test]
fn training_set_has_one_row_per_reference() {
    let pairs: Vec<_> = (0..4).map(|i| pair(i, 0, 1 + i % 2)).collect();
    let mut parses = BTreeMap::new();
    for p in &pairs {
        parses.insert(source_key(&p.id), chain(&p.id, &p.src));
        for (j, r) in p.refs.iter().enumerate() {
            let key = reference_key(&p.id, j);
            parses.insert(key.clone(), chain(&key, r));
        }
    }
    let table = RankTable::from_ranked(["the", "patient", "drug", "got", "received"]).unwrap();
    let rows = prepare_training_set(&pairs, &parses, &table).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert!(row.ct.quantized.is_quantized());
        assert!(row.annotated_src.starts_with("<DEPENDENCYTREEDEPTH_"));
    }

    parses.remove(&reference_key("p1", 1));
    assert!(prepare_training_set(&pairs, &parses, &table).is_err());
}

#[test]
fn copying_a_single_reference_scores_perfectly() {
    let split: Vec<_> = (0..5).map(|i| pair(i, 0, 1)).collect();
    let hyps: BTreeMap<_, _> = split.iter().map(|p| (p.id.clone(), p.refs[0].clone())).collect();
    let eval = evaluate_system("copy", &split, &hyps, None, &EvalConfig::default()).unwrap();
    let report = eval.report;
    assert_eq!(report.n_sentences, 5);
    for m in [Metric::Bleu, Metric::Sari] {
        assert!((report.score(m).unwrap() - 100.0).abs() < 1e-9, "{m:?}");
    }
    assert_eq!(report.score(Metric::EmbeddingF), None);

    let mut partial = hyps.clone();
    partial.remove("p3");
    assert!(evaluate_system("copy", &split, &partial, None, &EvalConfig::default()).is_err());
}
