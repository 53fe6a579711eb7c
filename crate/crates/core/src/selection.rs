//! Picking the systems that go on to human evaluation, and per-epoch
//! learning curves.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::metrics::{Metric, MetricReport};
use crate::{Error, Result};

/// Best system on `metric`; ties go to the lexicographically smallest name.
/// Reports without a score for `metric` are skipped.
pub fn argmax(reports: &[MetricReport], metric: Metric) -> Option<&str> {
    reports
        .iter()
        .filter_map(|r| r.score(metric).map(|s| (r.system_name.as_str(), s)))
        .fold(None, |best: Option<(&str, f64)>, (name, s)| match best {
            Some((bn, bs)) if bs > s || (bs == s && bn <= name) => Some((bn, bs)),
            _ => Some((name, s)),
        })
        .map(|(name, _)| name)
}

/// The best system on SARI together with the best on embedding F.
///
/// One system when both coincide, none when `reports` is empty.
pub fn select_models(reports: &[MetricReport]) -> BTreeSet<String> {
    [Metric::Sari, Metric::EmbeddingF]
        .into_iter()
        .filter_map(|m| argmax(reports, m))
        .map(String::from)
        .collect()
}

/// One evaluated checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub system_name: String,
    #[serde(default)]
    pub epoch: Option<u32>,
    pub predictions: String,
    pub report: MetricReport,
}

/// `(epoch, score)` points, epoch-ascending.
pub type Series = Vec<(u32, f64)>;

/// Per system, per metric series.
pub type LearningCurves = BTreeMap<String, BTreeMap<Metric, Series>>;

/// Groups run records into epoch-sorted series. Records without an epoch
/// are not curve points and are skipped.
pub fn learning_curve(records: &[RunRecord]) -> Result<LearningCurves> {
    let mut seen = BTreeSet::new();
    let mut points: Vec<&RunRecord> = Vec::new();
    for r in records {
        let Some(epoch) = r.epoch else { continue };
        if !seen.insert((r.system_name.as_str(), epoch)) {
            return Err(Error::DuplicateCurvePoint {
                system: r.system_name.clone(),
                epoch,
            });
        }
        points.push(r);
    }
    points.sort_by_key(|r| r.epoch);
    let mut curves = LearningCurves::new();
    for r in points {
        let by_metric = curves.entry(r.system_name.clone()).or_default();
        for (&metric, &score) in &r.report.corpus_scores {
            by_metric.entry(metric).or_default().push((r.epoch.unwrap_or_default(), score));
        }
    }
    Ok(curves)
}
