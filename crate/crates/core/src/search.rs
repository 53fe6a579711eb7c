//! Inference-time control-token values.
//!
//! DTD, WR and LV get one static value each, chosen by maximizing corpus SARI
//! of a [`Generator`] on validation data over a grid of quantized values.
//! LR is predicted per sentence by a ridge-regression [`LrPredictor`].

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::control_tokens::{
    annotate, length_ratio, quantize, quantized_bin, strip_control_tokens, ControlTokens,
};
use crate::corpus::{source_key, SentencePair};
use crate::lexicon::RankTable;
use crate::math::{ln, mean};
use crate::metrics::sari;
use crate::parse::DepParse;
use crate::text::{is_punctuation, tokenize};
use crate::{Error, Result};

/// A text generator conditioned on control tokens.
///
/// Returns one output per input, in input order. Implementations must be
/// deterministic for a fixed configuration so searches are reproducible.
pub trait Generator {
    fn generate(&self, inputs: &[String]) -> Result<Vec<String>>;

    /// Whether several batches may be in flight at once.
    fn supports_concurrent_batches(&self) -> bool {
        false
    }
}

impl<G: Generator + ?Sized> Generator for &G {
    fn generate(&self, inputs: &[String]) -> Result<Vec<String>> {
        (**self).generate(inputs)
    }

    fn supports_concurrent_batches(&self) -> bool {
        (**self).supports_concurrent_batches()
    }
}

impl<G: Generator + ?Sized> Generator for Box<G> {
    fn generate(&self, inputs: &[String]) -> Result<Vec<String>> {
        (**self).generate(inputs)
    }

    fn supports_concurrent_batches(&self) -> bool {
        (**self).supports_concurrent_batches()
    }
}

/// In-process generator that maps each annotated input independently.
pub struct FnGenerator<F>(pub F);

impl<F> Generator for FnGenerator<F>
where
    F: Fn(&str) -> String,
{
    fn generate(&self, inputs: &[String]) -> Result<Vec<String>> {
        Ok(inputs.iter().map(|s| (self.0)(s)).collect())
    }

    fn supports_concurrent_batches(&self) -> bool {
        true
    }
}

/// Mock generator that strips the control tokens and echoes the source.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoGenerator;

impl Generator for EchoGenerator {
    fn generate(&self, inputs: &[String]) -> Result<Vec<String>> {
        Ok(inputs
            .iter()
            .map(|s| strip_control_tokens(s).map_or(s.as_str(), |(_, src)| src).into())
            .collect())
    }

    fn supports_concurrent_batches(&self) -> bool {
        true
    }
}

/// The statically chosen DTD, WR and LV values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticCt {
    pub dtd: f64,
    pub wr: f64,
    pub lv: f64,
}

impl StaticCt {
    pub fn with_lr(self, lr: f64) -> ControlTokens {
        ControlTokens {
            dtd: self.dtd,
            wr: self.wr,
            lv: self.lv,
            lr,
        }
    }
}

/// Candidate values per attribute; sorted, deduplicated and all quantized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtGrid {
    dtd: Vec<f64>,
    wr: Vec<f64>,
    lv: Vec<f64>,
}

impl CtGrid {
    pub fn new(dtd: Vec<f64>, wr: Vec<f64>, lv: Vec<f64>) -> Result<Self> {
        let clean = |name: &str, mut values: Vec<f64>| -> Result<Vec<f64>> {
            if values.is_empty() {
                return Err(Error::InvalidInput(format!("empty {name} grid")));
            }
            if let Some(&bad) = values.iter().find(|v| quantized_bin(**v).is_none()) {
                return Err(Error::Unquantized(bad));
            }
            values.sort_by(f64::total_cmp);
            values.dedup();
            Ok(values)
        };
        Ok(Self {
            dtd: clean("DTD", dtd)?,
            wr: clean("WR", wr)?,
            lv: clean("LV", lv)?,
        })
    }

    /// Same candidate list for all three attributes.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        Self::new(values.clone(), values.clone(), values)
    }

    pub fn len(&self) -> usize {
        self.dtd.len() * self.wr.len() * self.lv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every point in lexicographic `(dtd, wr, lv)` order.
    pub fn points(&self) -> impl Iterator<Item = StaticCt> + '_ {
        self.dtd.iter().flat_map(move |&dtd| {
            self.wr
                .iter()
                .flat_map(move |&wr| self.lv.iter().map(move |&lv| StaticCt { dtd, wr, lv }))
        })
    }

    fn axis(&self, axis: usize) -> &[f64] {
        match axis {
            0 => &self.dtd,
            1 => &self.wr,
            _ => &self.lv,
        }
    }
}

/// Where the LR token value comes from during search.
#[derive(Debug, Clone, Copy)]
pub enum LrPolicy<'a> {
    Fixed(f64),
    Predicted {
        predictor: &'a LrPredictor,
        parses: &'a BTreeMap<String, DepParse>,
        table: &'a RankTable,
    },
}

impl LrPolicy<'_> {
    /// Quantized LR value for each pair.
    pub fn values(&self, pairs: &[SentencePair]) -> Result<Vec<f64>> {
        match *self {
            LrPolicy::Fixed(v) => {
                quantized_bin(v).ok_or(Error::Unquantized(v))?;
                Ok(vec![v; pairs.len()])
            }
            LrPolicy::Predicted {
                predictor,
                parses,
                table,
            } => pairs
                .iter()
                .map(|p| {
                    let key = source_key(&p.id);
                    let parse = parses.get(&key).ok_or(Error::MissingParse(key))?;
                    Ok(predict_lr(predictor, &p.src, parse, table))
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub dtd: f64,
    pub wr: f64,
    pub lv: f64,
    pub sari: f64,
}

impl GridPoint {
    pub fn tokens(&self) -> StaticCt {
        StaticCt {
            dtd: self.dtd,
            wr: self.wr,
            lv: self.lv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SearchStrategy {
    /// Every grid point.
    #[default]
    Exhaustive,
    /// Repeated one-axis sweeps from the point nearest 1.0, until no axis moves.
    CoordinateDescent { max_rounds: usize },
}

/// Every evaluated point and the selected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub points: Vec<GridPoint>,
    pub best: StaticCt,
    pub best_sari: f64,
}

/// Corpus SARI (mean sentence SARI) of `generator` on `pairs` with the given tokens.
pub fn evaluate_point<G: Generator + ?Sized>(
    generator: &G,
    pairs: &[SentencePair],
    point: StaticCt,
    lr_values: &[f64],
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no validation pairs".into()));
    }
    let inputs = pairs
        .iter()
        .zip(lr_values)
        .map(|(p, &lr)| annotate(&p.src, &point.with_lr(lr)))
        .collect::<Result<Vec<_>>>()?;
    let outputs = generator.generate(&inputs)?;
    if outputs.len() != inputs.len() {
        return Err(Error::GeneratorOutputCount {
            expected: inputs.len(),
            got: outputs.len(),
        });
    }
    let scores = pairs
        .iter()
        .zip(&outputs)
        .map(|(p, out)| sari(&p.src, out, &p.refs))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(scores).unwrap_or(0.0))
}

/// Highest SARI wins; ties go to the lexicographically smallest `(dtd, wr, lv)`.
pub fn select_best(points: &[GridPoint]) -> Option<GridPoint> {
    points.iter().copied().reduce(|best, p| {
        let key = |g: &GridPoint| (g.dtd, g.wr, g.lv);
        let smaller = key(&p)
            .partial_cmp(&key(&best))
            .is_some_and(|o| o.is_lt());
        if p.sari > best.sari || (p.sari == best.sari && smaller) {
            p
        } else {
            best
        }
    })
}

/// Searches the grid for the static DTD/WR/LV values maximizing corpus SARI.
///
/// `val_pairs` are expected to be multi-reference validation pairs.
pub fn grid_search<G: Generator + ?Sized>(
    generator: &G,
    val_pairs: &[SentencePair],
    grid: &CtGrid,
    lr_policy: LrPolicy<'_>,
    strategy: SearchStrategy,
) -> Result<SearchReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty search grid".into()));
    }
    let lrs = lr_policy.values(val_pairs)?;
    let mut eval = |p: StaticCt| -> Result<GridPoint> {
        let sari = evaluate_point(generator, val_pairs, p, &lrs)?;
        Ok(GridPoint {
            dtd: p.dtd,
            wr: p.wr,
            lv: p.lv,
            sari,
        })
    };
    let points = match strategy {
        SearchStrategy::Exhaustive => grid.points().map(&mut eval).collect::<Result<Vec<_>>>()?,
        SearchStrategy::CoordinateDescent { max_rounds } => {
            coordinate_descent(grid, max_rounds, &mut eval)?
        }
    };
    let best = select_best(&points).expect("grid is non-empty");
    Ok(SearchReport {
        best: best.tokens(),
        best_sari: best.sari,
        points,
    })
}

fn coordinate_descent(
    grid: &CtGrid,
    max_rounds: usize,
    eval: &mut dyn FnMut(StaticCt) -> Result<GridPoint>,
) -> Result<Vec<GridPoint>> {
    let nearest_one = |values: &[f64]| {
        values
            .iter()
            .copied()
            .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
            .expect("non-empty axis")
    };
    let mut current = [nearest_one(&grid.dtd), nearest_one(&grid.wr), nearest_one(&grid.lv)];
    let mut cache: BTreeMap<[i64; 3], GridPoint> = BTreeMap::new();
    let key = |c: &[f64; 3]| c.map(|v| quantized_bin(v).unwrap_or_default());
    for _ in 0..max_rounds.max(1) {
        let before = current;
        for axis in 0..3 {
            let mut line = Vec::new();
            for &v in grid.axis(axis) {
                let mut candidate = current;
                candidate[axis] = v;
                let point = match cache.get(&key(&candidate)) {
                    Some(p) => *p,
                    None => {
                        let p = eval(StaticCt {
                            dtd: candidate[0],
                            wr: candidate[1],
                            lv: candidate[2],
                        })?;
                        cache.insert(key(&candidate), p);
                        p
                    }
                };
                line.push(point);
            }
            let best = select_best(&line).expect("non-empty axis");
            current = [best.dtd, best.wr, best.lv];
        }
        if current == before {
            break;
        }
    }
    Ok(cache.into_values().collect())
}

/// Number of source-side predictor features (excluding the intercept).
pub const N_FEATURES: usize = 4;

/// Source char length, token count, mean log word rank, parse depth.
pub fn source_features(src: &str, parse: &DepParse, table: &RankTable) -> [f64; N_FEATURES] {
    let tokens = tokenize(src);
    let words: Vec<&String> = tokens.iter().filter(|t| !is_punctuation(t)).collect();
    let pool: Vec<&String> = if words.is_empty() {
        tokens.iter().collect()
    } else {
        words
    };
    let mean_log_rank = mean(pool.iter().map(|t| ln(table.rank(t) as f64))).unwrap_or(0.0);
    [
        src.chars().count() as f64,
        tokens.len() as f64,
        mean_log_rank,
        parse.depth() as f64,
    ]
}

/// Linear model of the length ratio from source-side features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrPredictor {
    /// Intercept first, then one weight per feature of [`source_features`].
    pub weights: Vec<f64>,
    pub ridge: f64,
}

impl LrPredictor {
    pub fn intercept_only(value: f64) -> Self {
        let mut weights = vec![0.0; N_FEATURES + 1];
        weights[0] = value;
        Self {
            weights,
            ridge: 0.0,
        }
    }

    pub fn predict_raw(&self, features: &[f64; N_FEATURES]) -> f64 {
        self.weights[0]
            + self.weights[1..]
                .iter()
                .zip(features)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }

    /// Checks the weight count and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != N_FEATURES + 1 || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "predictor needs {} finite weights",
                N_FEATURES + 1
            )));
        }
        Ok(())
    }

    /// Mean squared error on a data set.
    pub fn mse(&self, features: &[[f64; N_FEATURES]], targets: &[f64]) -> f64 {
        mean(
            features
                .iter()
                .zip(targets)
                .map(|(x, y)| (self.predict_raw(x) - y) * (self.predict_raw(x) - y)),
        )
        .unwrap_or(0.0)
    }
}

/// Ridge regression with an unpenalized intercept.
///
/// Features are centered, so the intercept is `mean(y) - mean(x) . w` and the
/// penalty applies to the feature weights only.
pub fn fit_ridge(features: &[[f64; N_FEATURES]], targets: &[f64], ridge: f64) -> Result<LrPredictor> {
    if features.len() != targets.len() {
        return Err(Error::InvalidInput("feature and target counts differ".into()));
    }
    if features.len() < N_FEATURES + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least {} training samples, got {}",
            N_FEATURES + 1,
            features.len()
        )));
    }
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::InvalidInput("ridge must be finite and non-negative".into()));
    }
    let n = features.len() as f64;
    let mut x_mean = [0.0; N_FEATURES];
    for x in features {
        for (m, v) in x_mean.iter_mut().zip(x) {
            *m += v / n;
        }
    }
    let y_mean = targets.iter().sum::<f64>() / n;

    let mut a = [[0.0; N_FEATURES]; N_FEATURES];
    let mut b = [0.0; N_FEATURES];
    for (x, y) in features.iter().zip(targets) {
        let xc: [f64; N_FEATURES] = core::array::from_fn(|i| x[i] - x_mean[i]);
        for i in 0..N_FEATURES {
            b[i] += xc[i] * (y - y_mean);
            for j in 0..N_FEATURES {
                a[i][j] += xc[i] * xc[j];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += ridge;
    }
    let w = solve(a, b).ok_or(Error::SingularSystem)?;
    let intercept = y_mean - w.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    let mut weights = vec![intercept];
    weights.extend_from_slice(&w);
    Ok(LrPredictor { weights, ridge })
}

/// Gaussian elimination with partial pivoting; `None` when (near) singular.
fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    let scale = (0..N).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let tol = scale * 1e-12;
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= tol {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Fits the LR predictor on the oracle length ratio of every (source, reference).
pub fn fit_lr_predictor(
    training_pairs: &[SentencePair],
    parses: &BTreeMap<String, DepParse>,
    table: &RankTable,
    ridge: f64,
) -> Result<LrPredictor> {
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for pair in training_pairs {
        let key = source_key(&pair.id);
        let parse = parses.get(&key).ok_or(Error::MissingParse(key))?;
        let x = source_features(&pair.src, parse, table);
        for reference in &pair.refs {
            features.push(x);
            targets.push(length_ratio(&pair.src, reference)?);
        }
    }
    fit_ridge(&features, &targets, ridge)
}

/// Predicted LR for one source, quantized to a valid token value.
pub fn predict_lr(predictor: &LrPredictor, src: &str, parse: &DepParse, table: &RankTable) -> f64 {
    quantize(predictor.predict_raw(&source_features(src, parse, table)))
}

/// Annotates each test source with the static tokens and its own predicted LR.
pub fn apply_best(
    best: StaticCt,
    predictor: &LrPredictor,
    test_pairs: &[SentencePair],
    parses: &BTreeMap<String, DepParse>,
    table: &RankTable,
) -> Result<Vec<String>> {
    predictor.validate()?;
    test_pairs
        .iter()
        .map(|p| {
            let key = source_key(&p.id);
            let parse = parses.get(&key).ok_or(Error::MissingParse(key))?;
            annotate(&p.src, &best.with_lr(predict_lr(predictor, &p.src, parse, table)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn pair(id: &str, src: &str, reference: &str) -> SentencePair {
        SentencePair {
            id: id.into(),
            doc_id: "d".into(),
            src: src.into(),
            refs: vec![reference.into(), reference.into()],
        }
    }

    fn val() -> Vec<SentencePair> {
        vec![
            pair("1", "Acute pharyngitis was diagnosed in most patients.", "Most patients had a sore throat."),
            pair("2", "Antihistamines attenuated wheal formation.", "Allergy pills made the bumps smaller."),
        ]
    }

    /// Returns the reference for `dtd == 0.8` and the source otherwise.
    fn keyed_mock(pairs: Vec<SentencePair>) -> impl Generator {
        FnGenerator(move |input: &str| {
            let (ct, src) = strip_control_tokens(input).expect("annotated input");
            let p = pairs.iter().find(|p| p.src == src).expect("known source");
            if ct.dtd == 0.8 {
                p.refs[0].clone()
            } else {
                src.to_string()
            }
        })
    }

    #[test]
    fn keyed_mock_is_found() {
        let grid = CtGrid::uniform(vec![0.6, 0.7, 0.8, 0.9, 1.0]).unwrap();
        let r = grid_search(&keyed_mock(val()), &val(), &grid, LrPolicy::Fixed(0.8), SearchStrategy::Exhaustive).unwrap();
        assert_eq!(r.points.len(), 125);
        assert_eq!(r.best, StaticCt { dtd: 0.8, wr: 0.6, lv: 0.6 });
        assert!((r.best_sari - 100.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_grid_matches_direct_evaluation() {
        let grid = CtGrid::uniform(vec![0.75]).unwrap();
        let g = keyed_mock(val());
        let r = grid_search(&g, &val(), &grid, LrPolicy::Fixed(1.0), SearchStrategy::Exhaustive).unwrap();
        let p = StaticCt { dtd: 0.75, wr: 0.75, lv: 0.75 };
        assert_eq!(r.best, p);
        assert_eq!(r.best_sari, evaluate_point(&g, &val(), p, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn ties_pick_smallest_vector() {
        let grid = CtGrid::new(vec![0.9, 0.5], vec![1.0], vec![0.3, 0.2]).unwrap();
        let r = grid_search(&EchoGenerator, &val(), &grid, LrPolicy::Fixed(1.0), SearchStrategy::Exhaustive).unwrap();
        assert_eq!(r.best, StaticCt { dtd: 0.5, wr: 1.0, lv: 0.2 });
    }

    #[test]
    fn coordinate_descent_finds_separable_optimum() {
        let grid = CtGrid::uniform(vec![0.6, 0.7, 0.8, 0.9, 1.0]).unwrap();
        let r = grid_search(
            &keyed_mock(val()),
            &val(),
            &grid,
            LrPolicy::Fixed(0.8),
            SearchStrategy::CoordinateDescent { max_rounds: 5 },
        )
        .unwrap();
        assert_eq!(r.best.dtd, 0.8);
        assert!((r.best_sari - 100.0).abs() < 1e-9);
        assert!(r.points.len() < 125);
    }

    #[test]
    fn bad_generators_and_grids() {
        struct Short;
        impl Generator for Short {
            fn generate(&self, _: &[String]) -> Result<Vec<String>> {
                Ok(vec![])
            }
        }
        let grid = CtGrid::uniform(vec![1.0]).unwrap();
        let err = grid_search(&Short, &val(), &grid, LrPolicy::Fixed(1.0), SearchStrategy::Exhaustive).unwrap_err();
        assert_eq!(err, Error::GeneratorOutputCount { expected: 2, got: 0 });
        assert!(CtGrid::uniform(vec![]).is_err());
        assert_eq!(CtGrid::uniform(vec![0.63]), Err(Error::Unquantized(0.63)));
        assert!(grid_search(&EchoGenerator, &val(), &grid, LrPolicy::Fixed(0.81), SearchStrategy::Exhaustive).is_err());
    }

    #[test]
    fn planted_line_is_recovered() {
        // y = 0.9 - 0.002 * chars; other weights zero
        let features: Vec<[f64; 4]> = (0..30)
            .map(|i| {
                let i = i as f64;
                [40.0 + 7.0 * i, 5.0 + (i * 1.3) % 11.0, 3.0 + (i * 0.7) % 2.5, 2.0 + (i * 3.0) % 5.0]
            })
            .collect();
        let targets: Vec<f64> = features.iter().map(|x| 0.9 - 0.002 * x[0]).collect();
        let p = fit_ridge(&features, &targets, 0.0).unwrap();
        for (w, expected) in p.weights.iter().zip([0.9, -0.002, 0.0, 0.0, 0.0]) {
            assert!((w - expected).abs() < 1e-6, "{:?}", p.weights);
        }
    }

    #[test]
    fn constant_targets_give_intercept_only() {
        let features: Vec<[f64; 4]> = (0..8).map(|i| [i as f64, (i * i) as f64, 1.0 / (1.0 + i as f64), 3.0]).collect();
        let p = fit_ridge(&features, &[0.7; 8], 0.5).unwrap();
        assert!((p.weights[0] - 0.7).abs() < 1e-12);
        assert!(p.weights[1..].iter().all(|w| w.abs() < 1e-12));
    }

    #[test]
    fn singular_and_undersized_systems() {
        let few = [[1.0, 2.0, 3.0, 4.0]; 3];
        assert!(matches!(fit_ridge(&few, &[1.0; 3], 0.0), Err(Error::InvalidInput(_))));
        let constant_feature: Vec<[f64; 4]> = (0..10).map(|i| [i as f64, 2.0 * i as f64, 1.0, (i % 3) as f64]).collect();
        assert_eq!(fit_ridge(&constant_feature, &[1.0; 10], 0.0), Err(Error::SingularSystem));
        assert!(fit_ridge(&constant_feature, &[1.0; 10], 0.1).is_ok());
    }

    #[test]
    fn predictions_are_quantized() {
        let parse = DepParse::new("s", vec!["a".into()], vec![None]).unwrap();
        let table = RankTable::from_ranked(["a"]).unwrap();
        let at = |v: f64| predict_lr(&LrPredictor::intercept_only(v), "a", &parse, &table);
        assert_eq!(at(0.7), 0.7);
        assert_eq!(at(0.63), 0.65);
        assert_eq!(at(-0.4), 0.05);
    }

    #[test]
    fn apply_best_annotates_every_source() {
        let pairs = val();
        let table = RankTable::from_ranked(["the", "patients"]).unwrap();
        let mut parses = BTreeMap::new();
        for p in &pairs {
            parses.insert(source_key(&p.id), DepParse::new(p.id.clone(), vec!["x".into()], vec![None]).unwrap());
        }
        let best = StaticCt { dtd: 0.8, wr: 0.75, lv: 0.7 };
        let out = apply_best(best, &LrPredictor::intercept_only(1.0), &pairs, &parses, &table).unwrap();
        assert_eq!(out.len(), 2);
        for (o, p) in out.iter().zip(&pairs) {
            assert!(o.contains("<LENGTHRATIO_1> "));
            assert_eq!(strip_control_tokens(o).unwrap().1, p.src);
        }
        parses.clear();
        assert_eq!(
            apply_best(best, &LrPredictor::intercept_only(1.0), &pairs, &parses, &table),
            Err(Error::MissingParse("1".into()))
        );
    }
}
