use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SentencePair;
use crate::math::mean;
use crate::{Error, Result};

/// Position of an output on the questionnaire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    A,
    B,
}

impl Slot {
    pub const BOTH: [Slot; 2] = [Slot::A, Slot::B];

    pub fn as_char(self) -> char {
        match self {
            Slot::A => 'A',
            Slot::B => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotPair<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
}

impl<T> SlotPair<T> {
    pub fn get(&self, slot: Slot) -> &T {
        match slot {
            Slot::A => &self.a,
            Slot::B => &self.b,
        }
    }
}

/// One source sentence with two anonymized system outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalItem {
    pub item_id: String,
    pub source: String,
    pub outputs: SlotPair<String>,
    /// Which system produced each slot. Never shown to annotators.
    pub blinding: SlotPair<String>,
}

impl EvalItem {
    pub fn system(&self, slot: Slot) -> &str {
        self.blinding.get(slot)
    }

    pub fn slot_of(&self, system: &str) -> Option<Slot> {
        Slot::BOTH.into_iter().find(|&s| self.system(s) == system)
    }

    /// The two system names in canonical (lexicographic) order.
    pub fn canonical_systems(&self) -> [&str; 2] {
        let (a, b) = (self.blinding.a.as_str(), self.blinding.b.as_str());
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }
}

/// Samples `n` test pairs without replacement and randomizes slot order per item.
///
/// `system_outputs` maps system name to id to output text and must hold
/// exactly two systems.
pub fn sample_items(
    test_pairs: &[SentencePair],
    system_outputs: &BTreeMap<String, BTreeMap<String, String>>,
    n: usize,
    seed: u64,
) -> Result<Vec<EvalItem>> {
    let systems: Vec<&String> = system_outputs.keys().collect();
    let [first, second] = systems[..] else {
        return Err(Error::InvalidInput(format!(
            "human evaluation compares exactly two systems, got {}",
            systems.len()
        )));
    };
    if n > test_pairs.len() {
        return Err(Error::InvalidInput(format!(
            "cannot sample {n} items from {} test pairs",
            test_pairs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = index::sample(&mut rng, test_pairs.len(), n);
    let mut items = Vec::with_capacity(n);
    for i in picked.iter() {
        let pair = &test_pairs[i];
        let output = |system: &String| {
            system_outputs[system]
                .get(&pair.id)
                .cloned()
                .ok_or_else(|| Error::MissingOutput {
                    id: pair.id.clone(),
                    system: system.clone(),
                })
        };
        let (one, two) = (output(first)?, output(second)?);
        let (outputs, blinding) = if rng.random_bool(0.5) {
            ((one, two), (first.clone(), second.clone()))
        } else {
            ((two, one), (second.clone(), first.clone()))
        };
        items.push(EvalItem {
            item_id: pair.id.clone(),
            source: pair.src.clone(),
            outputs: SlotPair {
                a: outputs.0,
                b: outputs.1,
            },
            blinding: SlotPair {
                a: blinding.0,
                b: blinding.1,
            },
        });
    }
    Ok(items)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedItem {
    pub item_id: String,
    pub annotators: (String, String),
}

/// Which annotator pair rates which item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    pub seed: u64,
    pub annotators: Vec<String>,
    pub pair_schedule: Vec<(String, String)>,
    /// In dealing order; an annotator's queue follows this order.
    pub assignments: Vec<PlannedItem>,
}

impl AssignmentPlan {
    pub fn knows(&self, annotator: &str) -> bool {
        self.annotators.iter().any(|a| a == annotator)
    }

    /// Item ids assigned to `annotator`, in queue order.
    pub fn queue(&self, annotator: &str) -> Vec<&str> {
        self.assignments
            .iter()
            .filter(|p| p.annotators.0 == annotator || p.annotators.1 == annotator)
            .map(|p| p.item_id.as_str())
            .collect()
    }

    pub fn is_assigned(&self, item_id: &str, annotator: &str) -> bool {
        self.assignments.iter().any(|p| {
            p.item_id == item_id && (p.annotators.0 == annotator || p.annotators.1 == annotator)
        })
    }

    /// Items per annotator.
    pub fn loads(&self) -> BTreeMap<&str, usize> {
        let mut loads: BTreeMap<&str, usize> =
            self.annotators.iter().map(|a| (a.as_str(), 0)).collect();
        for p in &self.assignments {
            *loads.entry(&p.annotators.0).or_default() += 1;
            *loads.entry(&p.annotators.1).or_default() += 1;
        }
        loads
    }

    /// Items per scheduled pair, in schedule order.
    pub fn pair_loads(&self) -> Vec<usize> {
        self.pair_schedule
            .iter()
            .map(|pair| self.assignments.iter().filter(|p| &p.annotators == pair).count())
            .collect()
    }

    /// Item ids rated by both members of `pair`.
    pub fn shared_items(&self, a: &str, b: &str) -> Vec<&str> {
        self.assignments
            .iter()
            .filter(|p| {
                let (x, y) = (&p.annotators.0, &p.annotators.1);
                (x == a && y == b) || (x == b && y == a)
            })
            .map(|p| p.item_id.as_str())
            .collect()
    }
}

/// Deals items round-robin to the annotator pairs in `pair_schedule` after a
/// seeded shuffle, so every item is rated by exactly two annotators and pair
/// loads differ by at most one. Pairs missing from the schedule never share
/// an item.
pub fn assign(
    items: &[EvalItem],
    annotators: &[String],
    pair_schedule: &[(String, String)],
    seed: u64,
) -> Result<AssignmentPlan> {
    if pair_schedule.is_empty() {
        return Err(Error::InvalidInput("empty annotator pair schedule".into()));
    }
    crate::corpus::check_unique_ids(annotators.iter().map(String::as_str))?;
    crate::corpus::check_unique_ids(items.iter().map(|i| i.item_id.as_str()))?;
    let mut seen = BTreeSet::new();
    for (a, b) in pair_schedule {
        for member in [a, b] {
            if !annotators.contains(member) {
                return Err(Error::UnknownAnnotator(member.clone()));
            }
        }
        if a == b {
            return Err(Error::InvalidInput(format!(
                "annotator pair ({a}, {b}) must name two distinct annotators"
            )));
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if !seen.insert(key) {
            return Err(Error::InvalidInput(format!("annotator pair ({a}, {b}) listed twice")));
        }
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let assignments = order
        .into_iter()
        .enumerate()
        .map(|(k, i)| PlannedItem {
            item_id: items[i].item_id.clone(),
            annotators: pair_schedule[k % pair_schedule.len()].clone(),
        })
        .collect();
    Ok(AssignmentPlan {
        seed,
        annotators: annotators.to_vec(),
        pair_schedule: pair_schedule.to_vec(),
        assignments,
    })
}

/// One annotator's two Likert scores (1 = strongly disagree ... 5 = strongly
/// agree) for the output in one slot of one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub item_id: String,
    pub annotator_id: String,
    pub slot: Slot,
    pub meaning: u8,
    pub simplicity: u8,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

impl AnnotationRecord {
    pub fn validate(&self) -> Result<()> {
        for score in [self.meaning, self.simplicity] {
            if !(1..=5).contains(&score) {
                return Err(Error::LikertOutOfRange(score));
            }
        }
        Ok(())
    }

    pub fn score(&self, criterion: Criterion) -> u8 {
        match criterion {
            Criterion::Meaning => self.meaning,
            Criterion::Simplicity => self.simplicity,
        }
    }

    pub fn key(&self) -> (&str, &str, Slot) {
        (&self.item_id, &self.annotator_id, self.slot)
    }
}

/// Checks score ranges and `(item, annotator, slot)` uniqueness.
pub fn validate_records(records: &[AnnotationRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in records {
        r.validate()?;
        if !seen.insert(r.key()) {
            return Err(Error::DuplicateRating {
                item_id: r.item_id.clone(),
                annotator_id: r.annotator_id.clone(),
                slot: r.slot.as_char(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Meaning,
    Simplicity,
}

impl Criterion {
    pub const BOTH: [Criterion; 2] = [Criterion::Meaning, Criterion::Simplicity];
}

/// Outcome for the first system of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wlt {
    Win,
    Lose,
    Tie,
}

impl Wlt {
    pub fn flipped(self) -> Wlt {
        match self {
            Wlt::Win => Wlt::Lose,
            Wlt::Lose => Wlt::Win,
            Wlt::Tie => Wlt::Tie,
        }
    }

    fn compare(first: u8, second: u8) -> Wlt {
        match first.cmp(&second) {
            core::cmp::Ordering::Greater => Wlt::Win,
            core::cmp::Ordering::Less => Wlt::Lose,
            core::cmp::Ordering::Equal => Wlt::Tie,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WltPair {
    pub meaning: Wlt,
    pub simplicity: Wlt,
}

impl WltPair {
    pub fn get(&self, criterion: Criterion) -> Wlt {
        match criterion {
            Criterion::Meaning => self.meaning,
            Criterion::Simplicity => self.simplicity,
        }
    }
}

/// Win/lose/tie of the canonically first system (lexicographic name) for one
/// annotator on one item.
pub fn derive_wlt(records: &[AnnotationRecord], item: &EvalItem, annotator: &str) -> Result<WltPair> {
    let first = item.canonical_systems()[0];
    derive_wlt_for(records, item, annotator, first)
}

/// Win/lose/tie from the point of view of `first_system`.
pub fn derive_wlt_for(
    records: &[AnnotationRecord],
    item: &EvalItem,
    annotator: &str,
    first_system: &str,
) -> Result<WltPair> {
    let first_slot = item.slot_of(first_system).ok_or_else(|| {
        Error::InvalidInput(format!("system `{first_system}` not in item `{}`", item.item_id))
    })?;
    let second_slot = match first_slot {
        Slot::A => Slot::B,
        Slot::B => Slot::A,
    };
    let find = |slot: Slot| {
        records
            .iter()
            .find(|r| r.item_id == item.item_id && r.annotator_id == annotator && r.slot == slot)
            .ok_or_else(|| Error::MissingRating {
                item_id: item.item_id.clone(),
                annotator_id: annotator.into(),
                slot: slot.as_char(),
            })
    };
    let (one, two) = (find(first_slot)?, find(second_slot)?);
    Ok(WltPair {
        meaning: Wlt::compare(one.meaning, two.meaning),
        simplicity: Wlt::compare(one.simplicity, two.simplicity),
    })
}

/// Mean Likert scores of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScores {
    pub system: String,
    pub meaning: f64,
    pub simplicity: f64,
    pub n_ratings: usize,
}

/// Unblinded mean scores per system, sorted by system name.
///
/// Records for items not in `items` are ignored.
pub fn summarize(records: &[AnnotationRecord], items: &[EvalItem]) -> Vec<SystemScores> {
    let by_id: BTreeMap<&str, &EvalItem> = items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let mut grouped: BTreeMap<&str, Vec<&AnnotationRecord>> = BTreeMap::new();
    for r in records {
        if let Some(item) = by_id.get(r.item_id.as_str()) {
            grouped.entry(item.system(r.slot)).or_default().push(r);
        }
    }
    grouped
        .into_iter()
        .map(|(system, rs)| SystemScores {
            system: system.into(),
            meaning: mean(rs.iter().map(|r| f64::from(r.meaning))).unwrap_or(0.0),
            simplicity: mean(rs.iter().map(|r| f64::from(r.simplicity))).unwrap_or(0.0),
            n_ratings: rs.len(),
        })
        .collect()
}

/// Two-column table: Model, Meaning Preservation, Simplicity.
pub fn render_summary(rows: &[SystemScores]) -> String {
    let width = rows
        .iter()
        .map(|r| r.system.chars().count())
        .chain([5])
        .max()
        .unwrap_or(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$} | Meaning Preservation | Simplicity", "Model");
    for r in rows {
        let _ = writeln!(out, "{:<width$} | {:>20.3} | {:>10.3}", r.system, r.meaning, r.simplicity);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn item(id: &str, a_sys: &str, b_sys: &str) -> EvalItem {
        EvalItem {
            item_id: id.into(),
            source: format!("source {id}"),
            outputs: SlotPair {
                a: format!("{a_sys} says {id}"),
                b: format!("{b_sys} says {id}"),
            },
            blinding: SlotPair {
                a: a_sys.into(),
                b: b_sys.into(),
            },
        }
    }

    fn rec(item: &str, ann: &str, slot: Slot, meaning: u8, simplicity: u8) -> AnnotationRecord {
        AnnotationRecord {
            item_id: item.into(),
            annotator_id: ann.into(),
            slot,
            meaning,
            simplicity,
            timestamp: 0,
        }
    }

    fn test_set(n: usize) -> (Vec<SentencePair>, BTreeMap<String, BTreeMap<String, String>>) {
        let pairs: Vec<SentencePair> = (0..n)
            .map(|i| SentencePair {
                id: format!("t{i}"),
                doc_id: format!("d{}", i / 7),
                src: format!("source {i}"),
                refs: vec!["r1".into(), "r2".into()],
            })
            .collect();
        let mut outputs = BTreeMap::new();
        for sys in ["bart-ct", "t5-base"] {
            outputs.insert(
                sys.to_string(),
                pairs.iter().map(|p| (p.id.clone(), format!("{sys}:{}", p.id))).collect(),
            );
        }
        (pairs, outputs)
    }

    fn annotators() -> Vec<String> {
        ["0", "1", "2", "3"].map(String::from).to_vec()
    }

    fn schedule(spec: &[(&str, &str)]) -> Vec<(String, String)> {
        spec.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn sampling_eighty_of_814() {
        let (pairs, outputs) = test_set(814);
        let items = sample_items(&pairs, &outputs, 80, 3).unwrap();
        assert_eq!(items.len(), 80);
        let ids: BTreeSet<_> = items.iter().map(|i| &i.item_id).collect();
        assert_eq!(ids.len(), 80);
        for it in &items {
            assert_ne!(it.blinding.a, it.blinding.b);
            assert!(it.outputs.a.starts_with(&it.blinding.a));
            assert!(it.outputs.b.starts_with(&it.blinding.b));
        }
        // both slot orders occur
        assert!(items.iter().any(|i| i.blinding.a == "bart-ct"));
        assert!(items.iter().any(|i| i.blinding.a == "t5-base"));
        assert_eq!(items, sample_items(&pairs, &outputs, 80, 3).unwrap());
        assert_ne!(items, sample_items(&pairs, &outputs, 80, 4).unwrap());
    }

    #[test]
    fn sampling_edge_cases() {
        let (pairs, mut outputs) = test_set(10);
        assert!(sample_items(&pairs, &outputs, 0, 1).unwrap().is_empty());
        assert!(sample_items(&pairs, &outputs, 11, 1).is_err());
        outputs.get_mut("t5-base").unwrap().remove("t3");
        let err = sample_items(&pairs, &outputs, 10, 1).unwrap_err();
        assert_eq!(err, Error::MissingOutput { id: "t3".into(), system: "t5-base".into() });
        outputs.insert("third".into(), BTreeMap::new());
        assert!(sample_items(&pairs, &outputs, 1, 1).is_err());
    }

    #[test]
    fn eighty_items_four_annotators() {
        let items: Vec<_> = (0..80).map(|i| item(&format!("i{i}"), "x", "y")).collect();
        let plan = assign(&items, &annotators(), &schedule(&[("0", "1"), ("0", "2"), ("1", "3"), ("2", "3")]), 9).unwrap();
        assert_eq!(plan.pair_loads(), [20, 20, 20, 20]);
        assert!(plan.loads().values().all(|&l| l == 40));
        assert!(plan.shared_items("0", "3").is_empty());
        assert!(plan.shared_items("1", "2").is_empty());
        assert_eq!(plan.shared_items("1", "0").len(), 20);
    }

    #[test]
    fn uneven_items_balance_within_one() {
        let items: Vec<_> = (0..5).map(|i| item(&format!("i{i}"), "x", "y")).collect();
        let plan = assign(&items, &annotators(), &schedule(&[("0", "1"), ("2", "3")]), 1).unwrap();
        assert_eq!(plan.pair_loads(), [3, 2]);
    }

    #[test]
    fn schedule_errors() {
        let items = vec![item("i", "x", "y")];
        assert!(assign(&items, &annotators(), &schedule(&[("0", "0")]), 1).is_err());
        assert_eq!(
            assign(&items, &annotators(), &schedule(&[("0", "9")]), 1),
            Err(Error::UnknownAnnotator("9".into()))
        );
        assert!(assign(&items, &annotators(), &[], 1).is_err());
        assert!(assign(&items, &annotators(), &schedule(&[("0", "1"), ("1", "0")]), 1).is_err());
    }

    #[test]
    fn wlt_examples() {
        let it = item("i", "sys1", "sys2");
        let win = [rec("i", "0", Slot::A, 4, 3), rec("i", "0", Slot::B, 2, 3)];
        let w = derive_wlt(&win, &it, "0").unwrap();
        assert_eq!((w.meaning, w.simplicity), (Wlt::Win, Wlt::Tie));
        let lose = [rec("i", "0", Slot::A, 2, 1), rec("i", "0", Slot::B, 5, 1)];
        assert_eq!(derive_wlt(&lose, &it, "0").unwrap().meaning, Wlt::Lose);
        // canonical order ignores slot order
        let swapped = item("i", "sys2", "sys1");
        assert_eq!(derive_wlt(&win, &swapped, "0").unwrap().meaning, Wlt::Lose);
        assert!(matches!(
            derive_wlt(&win[..1], &it, "0"),
            Err(Error::MissingRating { slot: 'B', .. })
        ));
    }

    #[test]
    fn summary_means_and_layout() {
        let items = vec![item("i1", "a", "b"), item("i2", "b", "a")];
        let records = vec![
            rec("i1", "0", Slot::A, 4, 2),
            rec("i2", "0", Slot::B, 5, 3),
            rec("i2", "1", Slot::B, 3, 4),
            rec("i1", "0", Slot::B, 1, 1),
        ];
        let rows = summarize(&records, &items);
        assert_eq!(rows[0].system, "a");
        assert_eq!(rows[0].meaning, 4.0);
        assert_eq!(rows[0].simplicity, 3.0);
        assert_eq!(rows[1].n_ratings, 1);
        let table = render_summary(&rows);
        assert!(table.starts_with("Model | Meaning Preservation | Simplicity"));
        assert!(table.contains("4.000"));
        assert!(summarize(&[], &items).is_empty());
    }

    #[test]
    fn record_validation() {
        assert_eq!(rec("i", "0", Slot::A, 6, 1).validate(), Err(Error::LikertOutOfRange(6)));
        assert_eq!(rec("i", "0", Slot::A, 1, 0).validate(), Err(Error::LikertOutOfRange(0)));
        let dup = [rec("i", "0", Slot::A, 1, 1), rec("i", "0", Slot::A, 2, 2)];
        assert!(matches!(validate_records(&dup), Err(Error::DuplicateRating { .. })));
    }

    proptest! {
        #[test]
        fn wlt_antisymmetric(scores in proptest::array::uniform4(1u8..=5), a_first in any::<bool>()) {
            let it = if a_first { item("i", "p", "q") } else { item("i", "q", "p") };
            let rs = [
                rec("i", "0", Slot::A, scores[0], scores[1]),
                rec("i", "0", Slot::B, scores[2], scores[3]),
            ];
            let p = derive_wlt_for(&rs, &it, "0", "p").unwrap();
            let q = derive_wlt_for(&rs, &it, "0", "q").unwrap();
            prop_assert_eq!(p.meaning.flipped(), q.meaning);
            prop_assert_eq!(p.simplicity.flipped(), q.simplicity);
        }

        #[test]
        fn plan_load_invariants(n_items in 0usize..60, seed in any::<u64>(), n_pairs in 1usize..=4) {
            let items: Vec<_> = (0..n_items).map(|i| item(&format!("i{i}"), "x", "y")).collect();
            let all = [("0", "1"), ("0", "2"), ("1", "3"), ("2", "3")];
            let plan = assign(&items, &annotators(), &schedule(&all[..n_pairs]), seed).unwrap();
            prop_assert_eq!(plan.loads().values().sum::<usize>(), 2 * n_items);
            let pl = plan.pair_loads();
            prop_assert!(pl.iter().max().unwrap() - pl.iter().min().unwrap() <= 1);
            prop_assert!(plan.shared_items("0", "3").is_empty());
            prop_assert!(plan.shared_items("1", "2").is_empty());
        }

        #[test]
        fn summary_ignores_record_order(
            scores in proptest::collection::vec((1u8..=5, 1u8..=5), 1..12),
            seed in any::<u64>(),
        ) {
            let items: Vec<_> = (0..scores.len()).map(|i| item(&format!("i{i}"), "a", "b")).collect();
            let mut records: Vec<_> = scores
                .iter()
                .enumerate()
                .map(|(i, &(m, s))| rec(&format!("i{i}"), "0", if i % 2 == 0 { Slot::A } else { Slot::B }, m, s))
                .collect();
            let before = summarize(&records, &items);
            records.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let after = summarize(&records, &items);
            prop_assert_eq!(before.len(), after.len());
            for (x, y) in before.iter().zip(&after) {
                prop_assert!((x.meaning - y.meaning).abs() < 1e-12);
                prop_assert!((x.simplicity - y.simplicity).abs() < 1e-12);
            }
        }
    }
}
