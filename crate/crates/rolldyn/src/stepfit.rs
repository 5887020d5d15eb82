//! Ordinary least squares and stepwise forward selection over
//! characteristic-value candidates.
//!
//! Model sizes stay tiny (at most a handful of terms over a handful of
//! variants), so the normal equations are solved directly with partial
//! pivoting; no linear-algebra dependency is warranted.

use crate::charvals::{CharacteristicValueSet, CvKey};
use crate::error::{Error, Result};
use crate::ingest::{Aspect, Criterion, RatingTable};

/// R^2 penalized for model size: 1 - (1 - r2)(n - 1)/(n - p - 1).
pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> Result<f64> {
    if n <= p + 1 {
        return Err(Error::Regression(format!(
            "adjusted R^2 undefined for {n} observations and {p} terms"
        )));
    }
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / ((n - p - 1) as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub intercept: f64,
    /// One slope per design column, in column order.
    pub coefficients: Vec<f64>,
    pub r2: f64,
    pub r2_adj: f64,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub n: usize,
}

/// Solves A x = b in place by Gaussian elimination with partial
/// pivoting. A pivot below 1e-10 of the matrix scale counts as rank
/// deficiency.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-10 * scale {
            return Err(Error::Regression(
                "singular normal equations (collinear columns)".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

/// Least squares of y on the given columns plus an intercept.
/// Requires n > p + 1 so the adjusted R^2 is defined. A constant y
/// yields R^2 = 0 by convention rather than an error.
pub fn fit_ols(columns: &[&[f64]], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    let p = columns.len();
    if n <= p + 1 {
        return Err(Error::Regression(format!(
            "{n} observations cannot support {p} terms plus intercept"
        )));
    }
    for c in columns {
        if c.len() != n {
            return Err(Error::Regression(format!(
                "column length {} does not match {n} observations",
                c.len()
            )));
        }
    }
    if columns.iter().flat_map(|c| c.iter()).chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Regression("non-finite value in regression input".into()));
    }

    // normal equations over [1 | columns]
    let dim = p + 1;
    let col = |j: usize, i: usize| if j == 0 { 1.0 } else { columns[j - 1][i] };
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    for j in 0..dim {
        for k in j..dim {
            let s: f64 = (0..n).map(|i| col(j, i) * col(k, i)).sum();
            a[j][k] = s;
            a[k][j] = s;
        }
        b[j] = (0..n).map(|i| col(j, i) * y[i]).sum();
    }
    let beta = solve(a, b)?;

    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..dim).map(|j| beta[j] * col(j, i)).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|yi| (yi - ybar) * (yi - ybar)).sum();
    let r2 = if ss_tot == 0.0 {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(OlsFit {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        r2,
        r2_adj: adjusted_r2(r2, n, p)?,
        fitted,
        residuals,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAction {
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub action: StepAction,
    pub key: CvKey,
    /// Adjusted R^2 of the model after this step.
    pub r2_adj: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseConfig {
    /// Minimum adjusted-R^2 gain an added term must bring.
    pub min_gain: f64,
    /// Selection stops once the model reaches this adjusted R^2.
    pub target_r2_adj: f64,
    pub max_terms: usize,
    /// Restrict the candidate pool; `None` admits every column.
    pub candidate_keys: Option<Vec<CvKey>>,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        StepwiseConfig {
            min_gain: 0.05,
            target_r2_adj: 0.90,
            max_terms: 3,
            candidate_keys: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub intercept: f64,
    /// Selected terms with their coefficients, in selection order.
    pub terms: Vec<(CvKey, f64)>,
    pub r2: f64,
    pub r2_adj: f64,
    pub n: usize,
    pub residuals: Vec<f64>,
    pub steps: Vec<StepLog>,
    /// Zero-variance candidates dropped before selection.
    pub excluded: Vec<CvKey>,
    pub warnings: Vec<String>,
}

/// Candidate design columns shared by every variant set, in catalog
/// order, values in the order the sets are given.
pub fn candidate_columns(cvsets: &[CharacteristicValueSet]) -> Result<Vec<(CvKey, Vec<f64>)>> {
    let first = cvsets
        .first()
        .ok_or_else(|| Error::Regression("no characteristic value sets".into()))?;
    let mut columns = Vec::new();
    for key in first.keys() {
        let mut values = Vec::with_capacity(cvsets.len());
        for set in cvsets {
            match set.get(key) {
                Some(v) => values.push(v),
                None => break,
            }
        }
        if values.len() == cvsets.len() {
            columns.push((*key, values));
        }
    }
    if columns.is_empty() {
        return Err(Error::Regression("no key is present in every variant set".into()));
    }
    Ok(columns)
}

/// Design matrix and response for one criterion: variants shared between
/// the value sets and the rating table (in value-set order), columns
/// from `candidate_columns`, y the variant mean rating.
pub fn design_from(
    cvsets: &[CharacteristicValueSet],
    ratings: &RatingTable,
    criterion: Criterion,
    aspect: Aspect,
) -> Result<(Vec<(CvKey, Vec<f64>)>, Vec<f64>, Vec<String>)> {
    let mut keep = Vec::new();
    let mut y = Vec::new();
    let mut variants = Vec::new();
    for (i, set) in cvsets.iter().enumerate() {
        if let Some(mean) = ratings.variant_mean(&set.variant_id, criterion, aspect) {
            keep.push(i);
            y.push(mean);
            variants.push(set.variant_id.clone());
        }
    }
    if keep.is_empty() {
        return Err(Error::Regression(format!(
            "no variant shared between value sets and {} {} ratings",
            criterion.as_str(),
            aspect.as_str()
        )));
    }
    let kept_sets: Vec<CharacteristicValueSet> =
        keep.iter().map(|&i| cvsets[i].clone()).collect();
    let columns = candidate_columns(&kept_sets)?;
    Ok((columns, y, variants))
}

/// Forward selection maximizing adjusted R^2, with a removal pass after
/// every addition. Ties go to the earlier candidate in the given
/// (catalog) order. Stops when no candidate gains `min_gain`, when the
/// target is reached, at `max_terms`, or at the n - 2 degrees-of-freedom
/// cap.
pub fn stepwise(
    columns: &[(CvKey, Vec<f64>)],
    y: &[f64],
    cfg: &StepwiseConfig,
) -> Result<RegressionResult> {
    let n = y.len();
    if n < 4 {
        return Err(Error::Regression(format!(
            "need at least 4 observations for selection, got {n}"
        )));
    }
    for (key, values) in columns {
        if values.len() != n {
            return Err(Error::Regression(format!(
                "column {key} has {} values for {n} observations",
                values.len()
            )));
        }
    }

    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    let mut pool: Vec<&(CvKey, Vec<f64>)> = Vec::new();
    for entry in columns {
        let (key, values) = entry;
        if let Some(keys) = &cfg.candidate_keys {
            if !keys.contains(key) {
                continue;
            }
        }
        if values.iter().all(|v| *v == values[0]) {
            excluded.push(*key);
            warnings.push(format!("candidate {key} has zero variance, excluded"));
            continue;
        }
        pool.push(entry);
    }
    if pool.is_empty() {
        return Err(Error::Regression("no usable candidate columns".into()));
    }

    let term_cap = cfg.max_terms.min(n - 2);
    let mut selected: Vec<&(CvKey, Vec<f64>)> = Vec::new();
    let mut current_adj = adjusted_r2(0.0, n, 0)?;
    let mut steps = Vec::new();

    let fit = |sel: &[&(CvKey, Vec<f64>)]| -> Result<OlsFit> {
        let cols: Vec<&[f64]> = sel.iter().map(|(_, v)| v.as_slice()).collect();
        fit_ols(&cols, y)
    };

    while selected.len() < term_cap && current_adj < cfg.target_r2_adj {
        // addition: best strict improvement over the remaining pool
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in pool.iter().enumerate() {
            if selected.iter().any(|s| s.0 == cand.0) {
                continue;
            }
            let mut trial = selected.clone();
            trial.push(cand);
            let adj = match fit(&trial) {
                Ok(f) => f.r2_adj,
                Err(Error::Regression(_)) => continue, // collinear with model
                Err(e) => return Err(e),
            };
            if best.map_or(true, |(_, b)| adj > b) {
                best = Some((i, adj));
            }
        }
        let Some((i, adj)) = best else { break };
        if adj - current_adj < cfg.min_gain {
            break;
        }
        selected.push(pool[i]);
        current_adj = adj;
        steps.push(StepLog { action: StepAction::Added, key: pool[i].0, r2_adj: adj });

        // removal: drop any term whose absence strictly improves the fit
        loop {
            if selected.len() < 2 {
                break;
            }
            let mut best_drop: Option<(usize, f64)> = None;
            for (j, _) in selected.iter().enumerate() {
                let trial: Vec<_> = selected
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, s)| *s)
                    .collect();
                let adj = match fit(&trial) {
                    Ok(f) => f.r2_adj,
                    Err(Error::Regression(_)) => continue,
                    Err(e) => return Err(e),
                };
                if best_drop.map_or(true, |(_, b)| adj > b) {
                    best_drop = Some((j, adj));
                }
            }
            match best_drop {
                Some((j, adj)) if adj > current_adj => {
                    let dropped = selected.remove(j);
                    current_adj = adj;
                    steps.push(StepLog {
                        action: StepAction::Removed,
                        key: dropped.0,
                        r2_adj: adj,
                    });
                }
                _ => break,
            }
        }
    }

    if selected.is_empty() {
        return Err(Error::Regression(format!(
            "no candidate reaches the minimum adjusted R^2 gain of {}",
            cfg.min_gain
        )));
    }
    let final_fit = fit(&selected)?;
    Ok(RegressionResult {
        intercept: final_fit.intercept,
        terms: selected
            .iter()
            .zip(&final_fit.coefficients)
            .map(|(s, c)| (s.0, *c))
            .collect(),
        r2: final_fit.r2,
        r2_adj: final_fit.r2_adj,
        n,
        residuals: final_fit.residuals,
        steps,
        excluded,
        warnings,
    })
}
