//! Objective weights from preference-survey counts.
//!
//! Each respondent names the one objective they care about most, so a
//! survey batch is a vector of category counts. Two estimators are offered:
//!
//! * frequentist: the pooled vote share of each category;
//! * Bayesian: counts are multinomial with a Dirichlet(a) prior on the
//!   category probabilities. The concentration `a` is chosen by maximizing
//!   the Dirichlet-multinomial marginal likelihood of the batches over a
//!   fixed grid, and the weights are the posterior means
//!   `(a_i + n_i) / sum_j (a_j + n_j)`.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("survey needs at least two categories, got {0}")]
    TooFewCategories(usize),
    #[error("survey has no batches")]
    NoBatches,
    #[error("batch {batch} has {found} categories, expected {expected}")]
    RaggedBatch {
        batch: usize,
        expected: usize,
        found: usize,
    },
    #[error("{names} category names given for {counts} categories")]
    CategoryMismatch { names: usize, counts: usize },
    #[error("survey has no responses")]
    EmptySurvey,
    #[error("concentration parameters must be finite and positive: {0:?}")]
    InvalidConcentration(Vec<f64>),
    #[error("concentration has {found} components, survey has {expected} categories")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("search grid must be non-empty, positive and strictly increasing")]
    InvalidGrid,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed survey file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// One or more batches of category counts, all over the same `k >= 2`
/// categories.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyCounts {
    categories: Vec<String>,
    batches: Vec<Vec<u64>>,
}

impl SurveyCounts {
    pub fn new(batches: Vec<Vec<u64>>) -> Result<Self, WeightError> {
        let k = batches.first().ok_or(WeightError::NoBatches)?.len();
        let categories = (1..=k).map(|i| format!("category {i}")).collect();
        Self::with_categories(categories, batches)
    }

    pub fn with_categories(categories: Vec<String>, batches: Vec<Vec<u64>>) -> Result<Self, WeightError> {
        let k = batches.first().ok_or(WeightError::NoBatches)?.len();
        if k < 2 {
            return Err(WeightError::TooFewCategories(k));
        }
        for (i, b) in batches.iter().enumerate() {
            if b.len() != k {
                return Err(WeightError::RaggedBatch {
                    batch: i,
                    expected: k,
                    found: b.len(),
                });
            }
        }
        if categories.len() != k {
            return Err(WeightError::CategoryMismatch {
                names: categories.len(),
                counts: k,
            });
        }
        Ok(SurveyCounts { categories, batches })
    }

    /// A single batch.
    pub fn single(counts: &[u64]) -> Result<Self, WeightError> {
        Self::new(vec![counts.to_vec()])
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn batches(&self) -> &[Vec<u64>] {
        &self.batches
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }

    pub fn pooled(&self) -> Vec<u64> {
        let mut out = vec![0; self.k()];
        for b in &self.batches {
            for (acc, &n) in out.iter_mut().zip(b) {
                *acc += n;
            }
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.pooled().iter().sum()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurveyFile {
    categories: Vec<String>,
    batches: Vec<Vec<u64>>,
}

pub fn survey_from_json(text: &str) -> Result<SurveyCounts, WeightError> {
    let file: SurveyFile = serde_json::from_str(text)?;
    SurveyCounts::with_categories(file.categories, file.batches)
}

pub fn load_survey(path: impl AsRef<Path>) -> Result<SurveyCounts, WeightError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| WeightError::Io {
        path: path.display().to_string(),
        source,
    })?;
    survey_from_json(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationVector(Vec<f64>);

impl ConcentrationVector {
    pub fn new(values: Vec<f64>) -> Result<Self, WeightError> {
        if values.is_empty() || values.iter().any(|&a| !(a.is_finite() && a > 0.0)) {
            return Err(WeightError::InvalidConcentration(values));
        }
        Ok(ConcentrationVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    Frequentist,
    Bayesian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightEstimate {
    pub method: EstimationMethod,
    pub weights: Vec<f64>,
    pub variances: Vec<f64>,
    /// Set for Bayesian estimates only.
    pub concentration: Option<ConcentrationVector>,
}

pub fn frequentist_weights(counts: &SurveyCounts) -> Result<WeightEstimate, WeightError> {
    let pooled = counts.pooled();
    let total: u64 = pooled.iter().sum();
    if total == 0 {
        return Err(WeightError::EmptySurvey);
    }
    let n = total as f64;
    let weights: Vec<f64> = pooled.iter().map(|&c| c as f64 / n).collect();
    let variances = weights.iter().map(|w| w * (1.0 - w) / n).collect();
    Ok(WeightEstimate {
        method: EstimationMethod::Frequentist,
        weights,
        variances,
        concentration: None,
    })
}

fn check_dims(counts: &SurveyCounts, a: &ConcentrationVector) -> Result<(), WeightError> {
    if a.values().len() != counts.k() {
        return Err(WeightError::DimensionMismatch {
            expected: counts.k(),
            found: a.values().len(),
        });
    }
    Ok(())
}

/// Log marginal likelihood of the batches under a Dirichlet(a)-multinomial
/// model, multinomial coefficient included, summed over batches.
pub fn dm_log_marginal_likelihood(counts: &SurveyCounts, a: &ConcentrationVector) -> Result<f64, WeightError> {
    check_dims(counts, a)?;
    Ok(log_marginal_unchecked(counts.batches(), a.values()))
}

fn log_marginal_unchecked(batches: &[Vec<u64>], a: &[f64]) -> f64 {
    let alpha0: f64 = a.iter().sum();
    batches
        .iter()
        .map(|batch| {
            let n_total: u64 = batch.iter().sum();
            let nb = n_total as f64;
            let mut ll = ln_gamma(alpha0) - ln_gamma(alpha0 + nb) + ln_gamma(nb + 1.0);
            for (&ai, &ni) in a.iter().zip(batch) {
                let ni = ni as f64;
                ll += ln_gamma(ai + ni) - ln_gamma(ai) - ln_gamma(ni + 1.0);
            }
            ll
        })
        .sum()
}

/// Candidate values for each concentration component. Every component
/// ranges over the same grid, giving `grid.len()^k` candidate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    grid: Vec<f64>,
}

impl SearchConfig {
    pub fn new(grid: Vec<f64>) -> Result<Self, WeightError> {
        let ok = !grid.is_empty()
            && grid.iter().all(|&g| g.is_finite() && g > 0.0)
            && grid.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(WeightError::InvalidGrid);
        }
        Ok(SearchConfig { grid })
    }

    /// `points` log-spaced values from `a_min` to `a_max` inclusive.
    pub fn log_spaced(a_min: f64, a_max: f64, points: usize) -> Result<Self, WeightError> {
        if !(a_min > 0.0 && a_min < a_max) || points < 2 {
            return Err(WeightError::InvalidGrid);
        }
        let step = (a_max / a_min).ln() / (points - 1) as f64;
        let mut grid: Vec<f64> = (0..points).map(|i| a_min * (step * i as f64).exp()).collect();
        grid[points - 1] = a_max;
        Self::new(grid)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

/// Exhaustive grid search for the concentration maximizing the marginal
/// likelihood. Candidates are visited in lexicographic order and only a
/// strictly better value replaces the incumbent, so ties resolve to the
/// lexicographically smallest vector.
pub fn estimate_concentration(counts: &SurveyCounts, search: &SearchConfig) -> Result<ConcentrationVector, WeightError> {
    if counts.total() == 0 {
        return Err(WeightError::EmptySurvey);
    }
    let k = counts.k();
    let grid = search.grid();
    let mut idx = vec![0usize; k];
    let mut point = vec![grid[0]; k];
    let mut best = point.clone();
    let mut best_ll = f64::NEG_INFINITY;
    loop {
        let ll = log_marginal_unchecked(counts.batches(), &point);
        if ll > best_ll {
            best_ll = ll;
            best.copy_from_slice(&point);
        }
        // odometer, last component fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return ConcentrationVector::new(best);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                point[pos] = grid[idx[pos]];
                break;
            }
            idx[pos] = 0;
            point[pos] = grid[0];
        }
    }
}

/// Posterior-mean weights on pooled counts, with the posterior Dirichlet
/// marginal variance `w(1 - w) / (c0 + 1)`, `c0 = sum(a + n)`.
pub fn bayesian_weights(counts: &SurveyCounts, a: &ConcentrationVector) -> Result<WeightEstimate, WeightError> {
    check_dims(counts, a)?;
    let pooled = counts.pooled();
    let posterior: Vec<f64> = a
        .values()
        .iter()
        .zip(&pooled)
        .map(|(&ai, &ni)| ai + ni as f64)
        .collect();
    let c0: f64 = posterior.iter().sum();
    let weights: Vec<f64> = posterior.iter().map(|p| p / c0).collect();
    let variances = weights.iter().map(|w| w * (1.0 - w) / (c0 + 1.0)).collect();
    Ok(WeightEstimate {
        method: EstimationMethod::Bayesian,
        weights,
        variances,
        concentration: Some(a.clone()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub categories: Vec<String>,
    pub counts: Vec<u64>,
    pub frequentist: WeightEstimate,
    pub bayesian: WeightEstimate,
    /// Bayesian over frequentist variance; `None` where the frequentist
    /// variance is zero.
    pub variance_ratio: Vec<Option<f64>>,
}

pub fn compare_estimates(counts: &SurveyCounts, search: &SearchConfig) -> Result<ComparisonReport, WeightError> {
    let frequentist = frequentist_weights(counts)?;
    let a = estimate_concentration(counts, search)?;
    let bayesian = bayesian_weights(counts, &a)?;
    let variance_ratio = bayesian
        .variances
        .iter()
        .zip(&frequentist.variances)
        .map(|(&b, &f)| (f > 0.0).then(|| b / f))
        .collect();
    Ok(ComparisonReport {
        categories: counts.categories().to_vec(),
        counts: counts.pooled(),
        frequentist,
        bayesian,
        variance_ratio,
    })
}

/// Which columns [`ComparisonReport::render`] prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportColumns {
    Frequentist,
    Bayesian,
    Both,
}

impl ComparisonReport {
    pub fn render(&self, columns: ReportColumns) -> String {
        let show_f = columns != ReportColumns::Bayesian;
        let show_b = columns != ReportColumns::Frequentist;
        let mut header = vec!["Category".to_string(), "Count".to_string()];
        if show_f {
            header.push("Frequentist Weight".into());
        }
        if show_b {
            header.push("Bayesian Weight".into());
        }
        if show_f {
            header.push("Err Var Frequentist".into());
        }
        if show_b {
            header.push("Err Var Bayesian".into());
        }
        if show_f && show_b {
            header.push("Var Ratio".into());
        }

        let mut rows = vec![header];
        for i in 0..self.categories.len() {
            let mut row = vec![self.categories[i].clone(), self.counts[i].to_string()];
            if show_f {
                row.push(format!("{:.4}", self.frequentist.weights[i]));
            }
            if show_b {
                row.push(format!("{:.4}", self.bayesian.weights[i]));
            }
            if show_f {
                row.push(format!("{:.6}", self.frequentist.variances[i]));
            }
            if show_b {
                row.push(format!("{:.6}", self.bayesian.variances[i]));
            }
            if show_f && show_b {
                row.push(match self.variance_ratio[i] {
                    Some(r) => format!("{r:.4}"),
                    None => "-".into(),
                });
            }
            rows.push(row);
        }
        let total: u64 = self.counts.iter().sum();
        let mut total_row = vec!["Total".to_string(), total.to_string()];
        if show_f {
            total_row.push(format!("{:.4}", self.frequentist.weights.iter().sum::<f64>()));
        }
        if show_b {
            total_row.push(format!("{:.4}", self.bayesian.weights.iter().sum::<f64>()));
        }
        rows.push(total_row);

        let ncols = rows[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        if let (true, Some(a)) = (show_b, &self.bayesian.concentration) {
            let vals: Vec<String> = a.values().iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!("Estimated concentration: ({})\n", vals.join(", ")));
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(ReportColumns::Both))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn conc(v: &[f64]) -> ConcentrationVector {
        ConcentrationVector::new(v.to_vec()).unwrap()
    }

    /// All count vectors of length `k` summing to `n`.
    fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
        if k == 1 {
            return vec![vec![n]];
        }
        (0..=n)
            .flat_map(|first| {
                compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn frequentist_table_counts() {
        let est = frequentist_weights(&SurveyCounts::single(&[16, 14, 20]).unwrap()).unwrap();
        assert_eq!(est.weights, vec![0.32, 0.28, 0.40]);
        assert!((est.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frequentist_degenerate_and_symmetric() {
        let est = frequentist_weights(&SurveyCounts::single(&[10, 0, 0]).unwrap()).unwrap();
        assert_eq!(est.weights, vec![1.0, 0.0, 0.0]);
        assert_eq!(est.variances, vec![0.0, 0.0, 0.0]);
        let est = frequentist_weights(&SurveyCounts::single(&[1, 1]).unwrap()).unwrap();
        assert_eq!(est.weights, vec![0.5, 0.5]);
        assert_eq!(est.variances, vec![0.125, 0.125]);
        assert!(matches!(
            frequentist_weights(&SurveyCounts::single(&[0, 0]).unwrap()),
            Err(WeightError::EmptySurvey)
        ));
    }

    #[test]
    fn survey_shape_checks() {
        assert!(matches!(SurveyCounts::single(&[5]), Err(WeightError::TooFewCategories(1))));
        assert!(matches!(SurveyCounts::new(vec![]), Err(WeightError::NoBatches)));
        assert!(matches!(
            SurveyCounts::new(vec![vec![1, 2], vec![1, 2, 3]]),
            Err(WeightError::RaggedBatch { batch: 1, .. })
        ));
        let s = SurveyCounts::new(vec![vec![8, 7, 10], vec![8, 7, 10]]).unwrap();
        assert_eq!(s.pooled(), vec![16, 14, 20]);
    }

    #[test]
    fn survey_file_parsing() {
        let s = survey_from_json(r#"{"categories": ["distance", "speed", "availability"], "batches": [[16, 14, 20]]}"#)
            .unwrap();
        assert_eq!(s.categories()[2], "availability");
        assert!(survey_from_json(r#"{"categories": ["a"], "batches": [[1, 2]]}"#).is_err());
        assert!(survey_from_json(r#"{"categories": ["a", "b"], "batches": [[1, 2]], "x": 1}"#).is_err());
    }

    #[test]
    fn uniform_prior_two_categories_is_uniform_over_outcomes() {
        // Polya urn with one ball of each colour: every split of N=2 draws
        // has probability 1/3.
        let a = conc(&[1.0, 1.0]);
        for n1 in 0..=2u64 {
            let s = SurveyCounts::single(&[n1, 2 - n1]).unwrap();
            let ll = dm_log_marginal_likelihood(&s, &a).unwrap();
            assert!((ll - (1.0f64 / 3.0).ln()).abs() < 1e-12, "n1={n1}: {ll}");
        }
    }

    #[test]
    fn empty_batch_has_zero_log_likelihood() {
        let s = SurveyCounts::single(&[0, 0, 0]).unwrap();
        let ll = dm_log_marginal_likelihood(&s, &conc(&[0.3, 2.0, 7.5])).unwrap();
        assert!(ll.abs() < 1e-12);
    }

    #[test]
    fn marginal_likelihood_normalizes() {
        for k in 2..=3 {
            for n in 0..=6 {
                for a in [[0.25, 1.0, 3.0], [1.0, 1.0, 1.0], [7.0, 0.5, 2.0]] {
                    let a = conc(&a[..k]);
                    let total: f64 = compositions(n, k)
                        .into_iter()
                        .map(|c| dm_log_marginal_likelihood(&SurveyCounts::single(&c).unwrap(), &a).unwrap().exp())
                        .sum();
                    assert!((total - 1.0).abs() < 1e-9, "k={k} n={n}: {total}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_concentration() {
        assert!(ConcentrationVector::new(vec![1.0, 0.0]).is_err());
        assert!(ConcentrationVector::new(vec![1.0, -2.0]).is_err());
        assert!(ConcentrationVector::new(vec![f64::NAN, 1.0]).is_err());
        let s = SurveyCounts::single(&[1, 2, 3]).unwrap();
        assert!(matches!(
            dm_log_marginal_likelihood(&s, &conc(&[1.0, 1.0])),
            Err(WeightError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn symmetric_counts_give_symmetric_concentration() {
        let s = SurveyCounts::single(&[5, 5, 5]).unwrap();
        let a = estimate_concentration(&s, &SearchConfig::default()).unwrap();
        let v = a.values();
        assert_eq!(v[0], v[1]);
        assert_eq!(v[1], v[2]);
    }

    fn assert_grid_argmax(s: &SurveyCounts, search: &SearchConfig) {
        let a = estimate_concentration(s, search).unwrap();
        let best = dm_log_marginal_likelihood(s, &a).unwrap();
        let (lo, hi) = search.bounds();
        assert!(a.values().iter().all(|&v| lo <= v && v <= hi));
        let g = search.grid();
        for &x in g {
            for &y in g {
                for &z in g {
                    let ll = dm_log_marginal_likelihood(s, &conc(&[x, y, z])).unwrap();
                    assert!(ll <= best, "({x},{y},{z}) beats {:?}", a.values());
                }
            }
        }
    }

    #[test]
    fn estimate_is_exhaustive_grid_argmax() {
        assert_grid_argmax(&SurveyCounts::single(&[16, 14, 20]).unwrap(), &SearchConfig::default());
        assert_grid_argmax(
            &SurveyCounts::new(vec![vec![8, 7, 10], vec![8, 7, 10]]).unwrap(),
            &SearchConfig::default(),
        );
        assert_grid_argmax(
            &SurveyCounts::new(vec![vec![9, 1, 3], vec![2, 6, 4], vec![0, 3, 12]]).unwrap(),
            &SearchConfig::log_spaced(0.1, 50.0, 9).unwrap(),
        );
    }

    #[test]
    fn estimate_rejects_empty_survey() {
        let s = SurveyCounts::single(&[0, 0, 0]).unwrap();
        assert!(matches!(
            estimate_concentration(&s, &SearchConfig::default()),
            Err(WeightError::EmptySurvey)
        ));
    }

    #[test]
    fn search_config_validation() {
        assert!(SearchConfig::new(vec![]).is_err());
        assert!(SearchConfig::new(vec![1.0, 1.0]).is_err());
        assert!(SearchConfig::new(vec![0.0, 1.0]).is_err());
        assert!(SearchConfig::log_spaced(2.0, 1.0, 4).is_err());
        let g = SearchConfig::log_spaced(0.25, 16.0, 7).unwrap();
        for (x, y) in g.grid().iter().zip(SearchConfig::default().grid()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bayesian_prior_mean_and_substitution() {
        let zero = SurveyCounts::single(&[0, 0, 0]).unwrap();
        let est = bayesian_weights(&zero, &conc(&[2.0, 3.0, 5.0])).unwrap();
        for (w, e) in est.weights.iter().zip([0.2, 0.3, 0.5]) {
            assert!((w - e).abs() < 1e-15);
        }
        let s = SurveyCounts::single(&[16, 14, 20]).unwrap();
        let est = bayesian_weights(&s, &conc(&[1.0, 1.0, 1.0])).unwrap();
        for (w, e) in est.weights.iter().zip([17.0 / 53.0, 15.0 / 53.0, 21.0 / 53.0]) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn bayesian_variance_below_frequentist_on_small_survey() {
        let s = SurveyCounts::single(&[16, 14, 20]).unwrap();
        let report = compare_estimates(&s, &SearchConfig::default()).unwrap();
        for i in 0..3 {
            assert!(report.bayesian.variances[i] < report.frequentist.variances[i]);
            assert!(report.variance_ratio[i].unwrap() < 1.0);
        }
    }

    #[test]
    fn large_survey_variances_agree() {
        let s = SurveyCounts::single(&[500, 500, 500]).unwrap();
        let report = compare_estimates(&s, &SearchConfig::default()).unwrap();
        for i in 0..3 {
            let r = report.variance_ratio[i].unwrap();
            assert!((0.5..=2.0).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn report_renders_all_columns() {
        let s = SurveyCounts::with_categories(
            vec!["distance".into(), "speed".into(), "availability".into()],
            vec![vec![16, 14, 20]],
        )
        .unwrap();
        let text = compare_estimates(&s, &SearchConfig::default()).unwrap().to_string();
        assert!(text.contains("Frequentist Weight"));
        assert!(text.contains("Err Var Bayesian"));
        assert!(text.contains("0.3200"));
        assert!(text.contains("0.2800"));
        assert!(text.contains("0.4000"));
    }

    proptest! {
        #[test]
        fn posterior_mean_is_convex_combination(
            counts in proptest::collection::vec(0u64..40, 3),
            a in proptest::collection::vec(0.05f64..20.0, 3),
        ) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let s = SurveyCounts::single(&counts).unwrap();
            let a = conc(&a);
            let bayes = bayesian_weights(&s, &a).unwrap();
            let freq = frequentist_weights(&s).unwrap();
            let alpha0 = a.total();
            let n = s.total() as f64;
            let lambda = alpha0 / (alpha0 + n);
            for i in 0..3 {
                let mix = lambda * a.values()[i] / alpha0 + (1.0 - lambda) * freq.weights[i];
                prop_assert!((bayes.weights[i] - mix).abs() < 1e-12);
            }
            prop_assert!((bayes.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!((freq.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(bayes.variances.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn raising_one_concentration_never_lowers_its_weight(
            counts in proptest::collection::vec(0u64..40, 3),
            a in proptest::collection::vec(0.05f64..20.0, 3),
            j in 0usize..3,
            bump in 0.0f64..10.0,
        ) {
            let s = SurveyCounts::single(&counts).unwrap();
            let before = bayesian_weights(&s, &conc(&a)).unwrap().weights[j];
            let mut raised = a.clone();
            raised[j] += bump;
            let after = bayesian_weights(&s, &conc(&raised)).unwrap().weights[j];
            prop_assert!(after >= before - 1e-15);
        }
    }
}
