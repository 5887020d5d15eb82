//! Statistics for subjective rating data: per-subject standardization,
//! outlier winsorization, Pearson correlation with significance, Welch's
//! t-test, and prediction error summaries.

use crate::error::{Error, Result};
use crate::ingest::{Aspect, RatingEntry, RatingTable};

/// Two-tailed Student-t tail probability, via the regularized incomplete
/// beta function. Self-contained so release builds carry no statistics
/// dependency.
mod tdist {
    /// Lanczos approximation, g = 7, 9 terms.
    pub fn ln_gamma(x: f64) -> f64 {
        const COEF: [f64; 8] = [
            676.5203681218851,
            -1259.1392167224028,
            771.32342877765313,
            -176.61502916214059,
            12.507343278686905,
            -0.13857109526572012,
            9.9843695780195716e-6,
            1.5056327351493116e-7,
        ];
        if x < 0.5 {
            // reflection formula
            let pi = std::f64::consts::PI;
            return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
        }
        let x = x - 1.0;
        let mut acc = 0.99999999999980993;
        for (i, c) in COEF.iter().enumerate() {
            acc += c / (x + i as f64 + 1.0);
        }
        let t = x + 7.5;
        0.5 * (std::f64::consts::TAU).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }

    /// Continued fraction for the incomplete beta (modified Lentz).
    fn betacf(a: f64, b: f64, x: f64) -> f64 {
        const MAX_ITER: usize = 300;
        const EPS: f64 = 1e-15;
        const FPMIN: f64 = 1e-300;
        let qab = a + b;
        let qap = a + 1.0;
        let qam = a - 1.0;
        let mut c = 1.0;
        let mut d = 1.0 - qab * x / qap;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        d = 1.0 / d;
        let mut h = d;
        for m in 1..=MAX_ITER {
            let m = m as f64;
            let m2 = 2.0 * m;
            let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
            d = 1.0 + aa * d;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = 1.0 + aa / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            h *= d * c;
            let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = 1.0 + aa / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h
    }

    /// Regularized incomplete beta I_x(a, b).
    pub fn betai(a: f64, b: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let bt = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
            + a * x.ln()
            + b * (1.0 - x).ln())
        .exp();
        if x < (a + 1.0) / (a + b + 2.0) {
            bt * betacf(a, b, x) / a
        } else {
            1.0 - bt * betacf(b, a, 1.0 - x) / b
        }
    }

    /// P(|T| >= |t|) for T ~ t(df).
    pub fn t_two_tailed(t: f64, df: f64) -> f64 {
        if !t.is_finite() {
            return 0.0;
        }
        if t == 0.0 {
            return 1.0;
        }
        betai(0.5 * df, 0.5, df / (df + t * t))
    }
}

pub(crate) use tdist::t_two_tailed;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Removes between-subject scale differences: each subject's ratings of
/// the given aspect are z-scored within subject and mapped back onto the
/// pooled mean and standard deviation of all ratings of that aspect.
/// The returned table holds only the chosen aspect; transformed values
/// may leave the 1..10 scale.
pub fn standardize(table: &RatingTable, aspect: Aspect) -> Result<RatingTable> {
    let entries: Vec<&RatingEntry> =
        table.entries().iter().filter(|e| e.aspect == aspect).collect();
    if entries.is_empty() {
        return Err(Error::Stats(format!("no {} ratings to standardize", aspect.as_str())));
    }
    let pooled: Vec<f64> = entries.iter().map(|e| e.value).collect();
    if pooled.len() < 2 {
        return Err(Error::Stats("need at least two ratings to standardize".into()));
    }
    let mu_tot = mean(&pooled);
    let sigma_tot = sample_std(&pooled);

    let mut stats = Vec::new();
    for subject in table.subjects() {
        let values = table.subject_values(subject, aspect);
        if values.is_empty() {
            continue;
        }
        if values.len() < 2 {
            return Err(Error::Stats(format!(
                "subject {subject:?} has fewer than two {} ratings",
                aspect.as_str()
            )));
        }
        let s = sample_std(&values);
        if s == 0.0 {
            return Err(Error::Stats(format!(
                "subject {subject:?} has zero variance in {} ratings",
                aspect.as_str()
            )));
        }
        stats.push((subject.to_string(), mean(&values), s));
    }

    let mut out = RatingTable::new();
    for e in entries {
        let (_, mu_s, sigma_s) = stats
            .iter()
            .find(|(s, _, _)| s == &e.subject)
            .expect("subject stats computed above");
        let z = (e.value - mu_s) / sigma_s;
        out.insert_unchecked(RatingEntry { value: mu_tot + sigma_tot * z, ..e.clone() });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuartileMethod {
    /// Linear interpolation of order statistics at h = (n - 1) p.
    Linear,
    /// Medians of the lower and upper half, the median itself included
    /// in both halves when n is odd.
    TukeyHinges,
}

pub fn quartiles(values: &[f64], method: QuartileMethod) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Stats("need at least two values for quartiles".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Stats("non-finite value in quartile input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    match method {
        QuartileMethod::Linear => {
            let at = |p: f64| {
                let h = (sorted.len() - 1) as f64 * p;
                let lo = h.floor() as usize;
                if lo + 1 < sorted.len() {
                    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
                } else {
                    sorted[lo]
                }
            };
            Ok((at(0.25), at(0.75)))
        }
        QuartileMethod::TukeyHinges => {
            let n = sorted.len();
            let half = n / 2;
            let lower = &sorted[..half + n % 2];
            let upper = &sorted[half..];
            let median = |v: &[f64]| {
                let m = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[m]
                } else {
                    0.5 * (v[m - 1] + v[m])
                }
            };
            Ok((median(lower), median(upper)))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinsorizeResult {
    /// Input values in original order, outliers clipped to the fences.
    pub values: Vec<f64>,
    pub q1: f64,
    pub q3: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub n_clipped: usize,
}

/// Clips values beyond the Tukey fences Q1 - k IQR and Q3 + k IQR onto
/// the fences. Needs at least four values.
pub fn winsorize(values: &[f64], k: f64, method: QuartileMethod) -> Result<WinsorizeResult> {
    if values.len() < 4 {
        return Err(Error::Stats(format!(
            "need at least 4 values to winsorize, got {}",
            values.len()
        )));
    }
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Stats(format!("bad fence factor {k}")));
    }
    let (q1, q3) = quartiles(values, method)?;
    let iqr = q3 - q1;
    let lower_fence = q1 - k * iqr;
    let upper_fence = q3 + k * iqr;
    let mut n_clipped = 0;
    let clipped = values
        .iter()
        .map(|&v| {
            if v < lower_fence {
                n_clipped += 1;
                lower_fence
            } else if v > upper_fence {
                n_clipped += 1;
                upper_fence
            } else {
                v
            }
        })
        .collect();
    Ok(WinsorizeResult { values: clipped, q1, q3, lower_fence, upper_fence, n_clipped })
}

/// Named columns over a shared set of observation ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub ids: Vec<String>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Observations {
    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Stats("no observation columns".into()));
        }
        for (name, values) in &self.columns {
            if values.len() != self.ids.len() {
                return Err(Error::Stats(format!(
                    "column {name:?} has {} values for {} ids",
                    values.len(),
                    self.ids.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Stats(format!("non-finite value in column {name:?}")));
            }
        }
        Ok(())
    }

    /// Per-criterion variant mean ratings: one column per criterion with
    /// ratings of the aspect, one observation per variant.
    pub fn from_ratings(table: &RatingTable, aspect: Aspect) -> Result<Observations> {
        let criteria = table.criteria(aspect);
        if criteria.is_empty() {
            return Err(Error::Stats(format!("no {} ratings in table", aspect.as_str())));
        }
        let ids: Vec<String> = table.variants().iter().map(|v| v.to_string()).collect();
        let mut columns = Vec::new();
        for criterion in criteria {
            let mut values = Vec::with_capacity(ids.len());
            for variant in &ids {
                let v = table.variant_mean(variant, criterion, aspect).ok_or_else(|| {
                    Error::Stats(format!(
                        "no {} rating of {} for variant {variant}",
                        aspect.as_str(),
                        criterion.as_str()
                    ))
                })?;
                values.push(v);
            }
            columns.push((criterion.as_str().to_string(), values));
        }
        Ok(Observations { ids, columns })
    }
}

/// Pearson r; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of Pearson r under the null of no correlation,
/// from the exact t transform with n - 2 degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Stats(format!("need at least 3 observations, got {n}")));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::Stats(format!("correlation {r} outside [-1, 1]")));
    }
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok(t_two_tailed(t, df))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Number of paired observations behind every cell.
    pub n: usize,
    pub alpha: f64,
    /// r[i][j]; `None` where a column is constant.
    pub r: Vec<Vec<Option<f64>>>,
    pub p: Vec<Vec<Option<f64>>>,
    pub significant: Vec<Vec<Option<bool>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, row: &str, col: &str) -> Option<(f64, f64, bool)> {
        let i = self.row_labels.iter().position(|l| l == row)?;
        let j = self.col_labels.iter().position(|l| l == col)?;
        match (self.r[i][j], self.p[i][j], self.significant[i][j]) {
            (Some(r), Some(p), Some(s)) => Some((r, p, s)),
            _ => None,
        }
    }
}

/// Pearson correlation of every row column against every column column.
/// With `other` absent the matrix is x against itself. With `other`
/// present, observations are paired by id (intersection, in x id order);
/// at least three shared ids are required.
pub fn correlate(
    x: &Observations,
    other: Option<&Observations>,
    alpha: f64,
) -> Result<CorrelationMatrix> {
    x.validate()?;
    if let Some(y) = other {
        y.validate()?;
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Stats(format!("alpha {alpha} outside (0, 1)")));
    }
    let y = other.unwrap_or(x);

    // paired observation indices
    let mut xi = Vec::new();
    let mut yi = Vec::new();
    for (i, id) in x.ids.iter().enumerate() {
        if let Some(j) = y.ids.iter().position(|o| o == id) {
            xi.push(i);
            yi.push(j);
        }
    }
    let n = xi.len();
    if n < 3 {
        return Err(Error::Stats(format!(
            "need at least 3 paired observations, got {n}"
        )));
    }

    let nr = x.columns.len();
    let nc = y.columns.len();
    let mut r = vec![vec![None; nc]; nr];
    let mut p = vec![vec![None; nc]; nr];
    let mut significant = vec![vec![None; nc]; nr];
    for i in 0..nr {
        let xs: Vec<f64> = xi.iter().map(|&k| x.columns[i].1[k]).collect();
        for j in 0..nc {
            let ys: Vec<f64> = yi.iter().map(|&k| y.columns[j].1[k]).collect();
            if let Some(rij) = pearson(&xs, &ys) {
                let pij = pearson_p_value(rij, n)?;
                r[i][j] = Some(rij);
                p[i][j] = Some(pij);
                significant[i][j] = Some(pij < alpha);
            }
        }
    }
    Ok(CorrelationMatrix {
        row_labels: x.columns.iter().map(|(c, _)| c.clone()).collect(),
        col_labels: y.columns.iter().map(|(c, _)| c.clone()).collect(),
        n,
        alpha,
        r,
        p,
        significant,
    })
}

/// `row,col,n,r,p,significant`; empty r/p/significant cells where a
/// column was constant.
pub fn correlation_to_csv(m: &CorrelationMatrix) -> String {
    let mut out = String::from("row,col,n,r,p,significant\n");
    for (i, row) in m.row_labels.iter().enumerate() {
        for (j, col) in m.col_labels.iter().enumerate() {
            let (r, p, s) = match (m.r[i][j], m.p[i][j], m.significant[i][j]) {
                (Some(r), Some(p), Some(s)) => (
                    crate::ingest::fmt_f64(r),
                    crate::ingest::fmt_f64(p),
                    s.to_string(),
                ),
                _ => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!("{row},{col},{},{r},{p},{s}\n", m.n));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    pub p: f64,
    pub significant: bool,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Welch's unequal-variance t-test, two-tailed. Identical samples give
/// t = 0, p = 1; two zero-variance samples with different means have no
/// defined statistic and error out.
pub fn welch_ttest(a: &[f64], b: &[f64], alpha: f64) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Stats(format!(
            "need at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Stats("non-finite value in t-test sample".into()));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Stats(format!("alpha {alpha} outside (0, 1)")));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let va = sample_std(a).powi(2);
    let vb = sample_std(b).powi(2);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        if ma == mb {
            return Ok(TTestResult {
                t: 0.0,
                df: na + nb - 2.0,
                p: 1.0,
                significant: false,
                mean_a: ma,
                mean_b: mb,
                n_a: a.len(),
                n_b: b.len(),
            });
        }
        return Err(Error::Stats(
            "both samples have zero variance but different means".into(),
        ));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    let p = t_two_tailed(t, df);
    Ok(TTestResult {
        t,
        df,
        p,
        significant: p < alpha,
        mean_a: ma,
        mean_b: mb,
        n_a: a.len(),
        n_b: b.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmseMode {
    /// sqrt of the summed squared error; grows with the number of points.
    Sum,
    /// sqrt of the mean squared error.
    Mean,
}

pub fn rmse(actual: &[f64], predicted: &[f64], mode: RmseMode) -> Result<f64> {
    if actual.is_empty() || actual.len() != predicted.len() {
        return Err(Error::Stats(format!(
            "rmse needs equal nonempty series, got {} and {}",
            actual.len(),
            predicted.len()
        )));
    }
    let ss: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok(match mode {
        RmseMode::Sum => ss.sqrt(),
        RmseMode::Mean => (ss / actual.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Aspect, Criterion, RatingEntry, RatingTable};
    use approx::assert_relative_eq;

    fn entry(subject: &str, variant: &str, criterion: Criterion, value: f64) -> RatingEntry {
        RatingEntry {
            subject: subject.into(),
            variant: variant.into(),
            criterion,
            aspect: Aspect::Liking,
            value,
        }
    }

    #[test]
    fn standardize_restores_pooled_scale() {
        let mut table = RatingTable::new();
        table.insert(entry("A", "v1", Criterion::Ral, 5.0)).unwrap();
        table.insert(entry("A", "v2", Criterion::Ral, 7.0)).unwrap();
        table.insert(entry("B", "v1", Criterion::Ral, 6.0)).unwrap();
        table.insert(entry("B", "v2", Criterion::Ral, 10.0)).unwrap();
        let out = standardize(&table, Aspect::Liking).unwrap();
        let v: Vec<f64> = out.entries().iter().map(|e| e.value).collect();
        assert_relative_eq!(v[0], 5.47247477, epsilon = 1e-8);
        assert_relative_eq!(v[1], 8.52752523, epsilon = 1e-8);
        assert_relative_eq!(v[2], 5.47247477, epsilon = 1e-8);
        assert_relative_eq!(v[3], 8.52752523, epsilon = 1e-8);
    }

    #[test]
    fn standardize_names_degenerate_subject() {
        let mut table = RatingTable::new();
        table.insert(entry("A", "v1", Criterion::Ral, 5.0)).unwrap();
        table.insert(entry("A", "v2", Criterion::Ral, 7.0)).unwrap();
        table.insert(entry("flat", "v1", Criterion::Ral, 6.0)).unwrap();
        table.insert(entry("flat", "v2", Criterion::Ral, 6.0)).unwrap();
        let err = standardize(&table, Aspect::Liking).unwrap_err();
        assert!(err.to_string().contains("flat"), "{err}");
        assert!(err.to_string().contains("zero variance"), "{err}");
    }

    #[test]
    fn winsorize_tukey_fences() {
        let r = winsorize(&[1.0, 2.0, 3.0, 4.0, 100.0], 1.5, QuartileMethod::Linear).unwrap();
        assert_eq!(r.values, vec![1.0, 2.0, 3.0, 4.0, 7.0]);
        assert_eq!((r.q1, r.q3), (2.0, 4.0));
        assert_eq!(r.n_clipped, 1);
        // clipping never moves the quartiles, so a second pass is a no-op
        let again = winsorize(&r.values, 1.5, QuartileMethod::Linear).unwrap();
        assert_eq!(again.values, r.values);
        assert_eq!(again.n_clipped, 0);
    }

    #[test]
    fn quartile_methods_differ_on_even_n() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 100.0];
        let (q1, q3) = quartiles(&v, QuartileMethod::Linear).unwrap();
        assert_relative_eq!(q1, 2.25);
        assert_relative_eq!(q3, 4.75);
        let (h1, h3) = quartiles(&v, QuartileMethod::TukeyHinges).unwrap();
        assert_eq!((h1, h3), (2.0, 5.0));
    }

    #[test]
    fn welch_ttest_frozen_example() {
        let a = [7.1, 7.3, 7.5, 7.7];
        let b = [6.2, 6.5, 6.4, 6.6];
        let r = welch_ttest(&a, &b, 0.05).unwrap();
        assert_relative_eq!(r.t, 6.2990682541, epsilon = 1e-9);
        assert_relative_eq!(r.df, 5.2032786885, epsilon = 1e-9);
        assert_relative_eq!(r.p, 0.001281068084, max_relative = 1e-8);
        assert!(r.significant);
        let back = welch_ttest(&b, &a, 0.05).unwrap();
        assert_relative_eq!(back.t, -r.t, epsilon = 1e-12);
        assert_relative_eq!(back.p, r.p, max_relative = 1e-12);
    }

    #[test]
    fn welch_ttest_degenerate_samples() {
        let r = welch_ttest(&[5.0, 5.0], &[5.0, 5.0], 0.05).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        assert!(!r.significant);
        assert!(welch_ttest(&[5.0, 5.0], &[6.0, 6.0], 0.05).is_err());
    }

    #[test]
    fn pearson_critical_r_at_n7() {
        // alpha = 0.05 boundary for seven observations
        assert!(pearson_p_value(0.7545, 7).unwrap() < 0.05);
        assert!(pearson_p_value(0.7544, 7).unwrap() > 0.05);
        assert_relative_eq!(pearson_p_value(0.86, 7).unwrap(), 0.01304, max_relative = 1e-3);
        assert_relative_eq!(pearson_p_value(0.73, 7).unwrap(), 0.06251, max_relative = 1e-3);
    }

    #[test]
    fn correlation_matrix_pairs_by_id() {
        let x = Observations {
            ids: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            columns: vec![("up".into(), vec![1.0, 2.0, 3.0, 4.0])],
        };
        let y = Observations {
            // different order plus one unshared id
            ids: vec!["d".into(), "c".into(), "b".into(), "a".into(), "x".into()],
            columns: vec![
                ("down".into(), vec![1.0, 2.0, 3.0, 4.0, 99.0]),
                ("flat".into(), vec![5.0, 5.0, 5.0, 5.0, 5.0]),
            ],
        };
        let m = correlate(&x, Some(&y), 0.05).unwrap();
        assert_eq!(m.n, 4);
        let (r, _, _) = m.get("up", "down").unwrap();
        assert_relative_eq!(r, -1.0, epsilon = 1e-12);
        assert_eq!(m.r[0][1], None);
        assert!(m.get("up", "flat").is_none());
        let csv = correlation_to_csv(&m);
        assert!(csv.contains("up,down,4,-1,"), "{csv}");
        assert!(csv.contains("up,flat,4,,,\n"), "{csv}");
    }

    #[test]
    fn self_correlation_diagonal_is_one() {
        let x = Observations {
            ids: vec!["a".into(), "b".into(), "c".into()],
            columns: vec![
                ("p".into(), vec![1.0, 2.0, 4.0]),
                ("q".into(), vec![3.0, 1.0, 2.0]),
            ],
        };
        let m = correlate(&x, None, 0.05).unwrap();
        let (r, p, s) = m.get("p", "p").unwrap();
        assert_eq!((r, p, s), (1.0, 0.0, true));
        assert_relative_eq!(
            m.get("p", "q").unwrap().0,
            m.get("q", "p").unwrap().0,
            epsilon = 1e-12
        );
        assert!(correlate(
            &Observations { ids: vec!["a".into(), "b".into()], columns: vec![("p".into(), vec![1.0, 2.0])] },
            None,
            0.05
        )
        .is_err());
    }

    #[test]
    fn rmse_modes() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 3.0];
        assert_eq!(rmse(&a, &b, RmseMode::Sum).unwrap(), 0.0);
        let c = [4.0, 6.0, 3.0];
        let sum = rmse(&a, &c, RmseMode::Sum).unwrap();
        let mean = rmse(&a, &c, RmseMode::Mean).unwrap();
        assert_relative_eq!(sum, 5.0);
        assert_relative_eq!(sum, mean * 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn t_tail_matches_reference_library() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        for &df in &[1.0, 2.5, 5.0, 5.2032786885, 12.0, 30.0] {
            for &t in &[0.0, 0.3, 1.0, 2.1, 3.5, 6.2990682541, 10.0] {
                let reference = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t));
                assert_relative_eq!(
                    t_two_tailed(t, df),
                    reference,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }
}
