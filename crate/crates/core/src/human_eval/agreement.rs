use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::protocol::{derive_wlt, AnnotationRecord, AssignmentPlan, Criterion, EvalItem, Slot};
use crate::{Error, Result};

/// Unweighted Cohen's kappa between two raters' label sequences.
///
/// Returns 1.0 whenever observed agreement is perfect, including the
/// single-category case where expected agreement is also 1.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "label sequences differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::NoData);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let p_o = agree / n;
    if agree == n {
        return Ok(1.0);
    }
    let mut marginals: BTreeMap<&T, (f64, f64)> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        marginals.entry(x).or_default().0 += 1.0;
        marginals.entry(y).or_default().1 += 1.0;
    }
    let p_e: f64 = marginals.values().map(|(ca, cb)| (ca / n) * (cb / n)).sum();
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Difference function for Krippendorff's alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difference {
    Nominal,
    #[default]
    Ordinal,
    Interval,
}

/// Krippendorff's alpha over a units × raters matrix with missing cells.
///
/// Units with fewer than two ratings are not pairable and are skipped.
/// When every pairable value is identical the expected disagreement is zero
/// and 1.0 is returned.
pub fn krippendorff_alpha(units: &[Vec<Option<u8>>], difference: Difference) -> Result<f64> {
    // o[c][k] over the sorted distinct values
    let mut values: Vec<u8> = units.iter().flatten().flatten().copied().collect();
    values.sort_unstable();
    values.dedup();
    let index = |v: u8| values.binary_search(&v).unwrap_or_default();
    let q = values.len();
    let mut o = alloc::vec![alloc::vec![0.0f64; q]; q];
    let mut pairable = false;
    for unit in units {
        let rated: Vec<usize> = unit.iter().flatten().map(|&v| index(v)).collect();
        let m = rated.len();
        if m < 2 {
            continue;
        }
        pairable = true;
        let mut counts = alloc::vec![0.0f64; q];
        for &c in &rated {
            counts[c] += 1.0;
        }
        let w = 1.0 / (m as f64 - 1.0);
        for c in 0..q {
            if counts[c] == 0.0 {
                continue;
            }
            for k in 0..q {
                let pairs = counts[c] * (counts[k] - if c == k { 1.0 } else { 0.0 });
                o[c][k] += pairs * w;
            }
        }
    }
    if !pairable {
        return Err(Error::NoPairableRatings);
    }
    let n_c: Vec<f64> = o.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = n_c.iter().sum();
    let delta = |c: usize, k: usize| -> f64 {
        match difference {
            Difference::Nominal => f64::from(u8::from(c != k)),
            Difference::Interval => {
                let d = f64::from(values[c]) - f64::from(values[k]);
                d * d
            }
            Difference::Ordinal => {
                let (lo, hi) = if c <= k { (c, k) } else { (k, c) };
                let s: f64 = n_c[lo..=hi].iter().sum::<f64>() - (n_c[lo] + n_c[hi]) / 2.0;
                s * s
            }
        }
    };
    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..q {
        for k in 0..q {
            let d = delta(c, k);
            d_o += o[c][k] * d;
            d_e += n_c[c] * n_c[k] * d;
        }
    }
    if d_e == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * d_o / d_e)
}

/// Agreement of one annotator pair on one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub pair: [String; 2],
    pub criterion: Criterion,
    /// Over win/lose/tie labels; `None` when no item was completed by both.
    pub kappa: Option<f64>,
    /// Ordinal alpha over raw Likert scores, both systems pooled.
    pub alpha: Option<f64>,
    pub alpha_by_system: BTreeMap<String, Option<f64>>,
    /// Items completed by both annotators.
    pub n_items: usize,
    /// Items assigned to the pair but not completed by both.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// Win/lose/tie labels are from the point of view of the first system.
    pub canonical_order: Vec<String>,
    pub rows: Vec<AgreementRow>,
}

/// Kappa and alpha for every scheduled annotator pair and criterion,
/// restricted to items both annotators fully rated.
pub fn agreement_report(
    items: &[EvalItem],
    plan: &AssignmentPlan,
    records: &[AnnotationRecord],
) -> AgreementReport {
    let by_id: BTreeMap<&str, &EvalItem> = items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let mut canonical_order: Vec<String> = items
        .first()
        .map(|i| i.canonical_systems().map(String::from).to_vec())
        .unwrap_or_default();
    canonical_order.dedup();
    let score = |item: &str, annotator: &str, slot: Slot| {
        records
            .iter()
            .find(|r| r.item_id == item && r.annotator_id == annotator && r.slot == slot)
    };
    let mut rows = Vec::new();
    for (a, b) in &plan.pair_schedule {
        let shared = plan.shared_items(a, b);
        let complete: Vec<&EvalItem> = shared
            .iter()
            .filter_map(|id| by_id.get(id).copied())
            .filter(|item| {
                [a, b].iter().all(|ann| Slot::BOTH.iter().all(|&s| score(&item.item_id, ann, s).is_some()))
            })
            .collect();
        for criterion in Criterion::BOTH {
            let mut la = Vec::new();
            let mut lb = Vec::new();
            let mut units: BTreeMap<&str, Vec<Vec<Option<u8>>>> = BTreeMap::new();
            for item in &complete {
                // complete implies both derivations succeed
                if let (Ok(x), Ok(y)) = (derive_wlt(records, item, a), derive_wlt(records, item, b)) {
                    la.push(x.get(criterion));
                    lb.push(y.get(criterion));
                }
                for slot in Slot::BOTH {
                    let pick = |ann: &str| score(&item.item_id, ann, slot).map(|r| r.score(criterion));
                    units.entry(item.system(slot)).or_default().push(alloc::vec![pick(a), pick(b)]);
                }
            }
            let pooled: Vec<Vec<Option<u8>>> = units.values().flatten().cloned().collect();
            rows.push(AgreementRow {
                pair: [a.clone(), b.clone()],
                criterion,
                kappa: cohen_kappa(&la, &lb).ok(),
                alpha: krippendorff_alpha(&pooled, Difference::Ordinal).ok(),
                alpha_by_system: units
                    .iter()
                    .map(|(s, u)| (String::from(*s), krippendorff_alpha(u, Difference::Ordinal).ok()))
                    .collect(),
                n_items: complete.len(),
                n_excluded: shared.len() - complete.len(),
            });
        }
    }
    AgreementReport { canonical_order, rows }
}
