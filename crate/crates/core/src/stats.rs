//! Welch's t-test and ordinary least squares, self-contained: p-values come
//! from a Lanczos log-gamma and a continued-fraction regularized incomplete
//! beta rather than a statistics dependency.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("sample too small: need at least {needed}, found {found}")]
    SampleTooSmall { needed: usize, found: usize },
    #[error("design matrix is singular (collinear columns)")]
    SingularDesign,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input contains NaN or infinity")]
    NonFiniteInput,
    #[error("empty input")]
    EmptyInput,
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Lanczos approximation (g = 7, 9 coefficients) of ln Gamma(x).
pub fn ln_gamma(x: f64) -> f64 {
    // Canonical published coefficients, kept verbatim.
    #[allow(clippy::excessive_precision)]
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = std::f64::consts::PI;
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * pi).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 400;
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
        let numerator = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + numerator * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + numerator / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + numerator * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + numerator / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b), accurate to about 1e-14.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Two-sided p-value of a Student t statistic with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

/// Two-sample location test under unequal variances and sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    #[serde(rename = "meanA")]
    pub mean_a: f64,
    #[serde(rename = "meanB")]
    pub mean_b: f64,
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
}

fn mean_and_variance(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let variance = sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, variance)
}

/// Welch's t statistic, Welch-Satterthwaite degrees of freedom, and the
/// two-sided p-value. When both samples are constant the test degenerates:
/// p = 1 for equal means, otherwise p = 0 with an infinite t sentinel.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult, StatsError> {
    for sample in [a, b] {
        if sample.len() < 2 {
            return Err(StatsError::SampleTooSmall { needed: 2, found: sample.len() });
        }
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }
    let (n_a, n_b) = (a.len(), b.len());
    let (mean_a, var_a) = mean_and_variance(a);
    let (mean_b, var_b) = mean_and_variance(b);
    let sem_a = var_a / n_a as f64;
    let sem_b = var_b / n_b as f64;
    let pooled = sem_a + sem_b;
    if pooled == 0.0 {
        let equal = mean_a == mean_b;
        let t = if equal {
            0.0
        } else if mean_a > mean_b {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok(WelchResult {
            t,
            df: (n_a + n_b - 2) as f64,
            p: if equal { 1.0 } else { 0.0 },
            mean_a,
            mean_b,
            n_a,
            n_b,
        });
    }
    let t = (mean_a - mean_b) / pooled.sqrt();
    let df = pooled * pooled
        / (sem_a * sem_a / (n_a as f64 - 1.0) + sem_b * sem_b / (n_b as f64 - 1.0));
    let p = student_t_two_sided(t, df);
    Ok(WelchResult { t, df, p, mean_a, mean_b, n_a, n_b })
}

// ---------------------------------------------------------------------------
// Ordinary least squares
// ---------------------------------------------------------------------------

/// One fitted coefficient with its inference columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub value: f64,
    #[serde(rename = "stdError")]
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

/// Normal-equations OLS fit with per-coefficient standard errors and the
/// overall F-test of all slopes being zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsResult {
    /// Slope coefficients, in input column order.
    pub coefficients: Vec<Coefficient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<Coefficient>,
    #[serde(rename = "rSquared")]
    pub r_squared: f64,
    #[serde(rename = "fStatistic")]
    pub f_statistic: f64,
    #[serde(rename = "fPValue")]
    pub f_p_value: f64,
    pub observations: usize,
    #[serde(rename = "residualDf")]
    pub residual_df: usize,
}

/// Gauss-Jordan inversion with partial pivoting. Pivots below a relative
/// threshold signal exact or near-exact collinearity.
fn invert(mut m: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, StatsError> {
    let k = m.len();
    let scale = m
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let tolerance = 1e-10 * scale;
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("non-empty column range");
        if m[pivot_row][col].abs() <= tolerance {
            return Err(StatsError::SingularDesign);
        }
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = m[col][col];
        for j in 0..k {
            m[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = m[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..k {
                m[row][j] -= factor * m[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Ok(inv)
}

fn coefficient_inference(value: f64, variance: f64, residual_df: f64) -> Coefficient {
    let std_error = variance.max(0.0).sqrt();
    let (t, p) = if std_error == 0.0 {
        if value == 0.0 {
            (0.0, 1.0)
        } else if value > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 0.0)
        }
    } else {
        let t = value / std_error;
        (t, student_t_two_sided(t, residual_df))
    };
    Coefficient { value, std_error, t, p }
}

/// Fits `y ~ X` (optionally with an intercept) by solving the normal
/// equations. Collinear columns raise `SingularDesign`; the caller is
/// expected to fall back to [`drop_one_regressions`] for weight families
/// that sum to a constant.
pub fn ols_fit(rows: &[Vec<f64>], y: &[f64], with_intercept: bool) -> Result<OlsResult, StatsError> {
    let n = rows.len();
    if n == 0 || y.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if n != y.len() {
        return Err(StatsError::DimensionMismatch(format!("{n} rows but {} responses", y.len())));
    }
    let p_in = rows[0].len();
    if rows.iter().any(|r| r.len() != p_in) {
        return Err(StatsError::DimensionMismatch("ragged design matrix".into()));
    }
    if rows.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }
    let k = p_in + usize::from(with_intercept);
    if k == 0 {
        return Err(StatsError::EmptyInput);
    }
    if n <= k {
        return Err(StatsError::SampleTooSmall { needed: k + 1, found: n });
    }

    // Design row accessor with the intercept (when present) in column 0.
    let design = |row: &[f64], j: usize| -> f64 {
        if with_intercept {
            if j == 0 {
                1.0
            } else {
                row[j - 1]
            }
        } else {
            row[j]
        }
    };

    let mut xtx = vec![vec![0.0f64; k]; k];
    let mut xty = vec![0.0f64; k];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            let xi = design(row, i);
            xty[i] += xi * yi;
            for (j, slot) in xtx[i].iter_mut().enumerate() {
                *slot += xi * design(row, j);
            }
        }
    }
    let inverse = invert(xtx)?;
    let beta: Vec<f64> =
        (0..k).map(|i| (0..k).map(|j| inverse[i][j] * xty[j]).sum()).collect();

    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fitted: f64 = (0..k).map(|j| beta[j] * design(row, j)).sum();
            (yi - fitted) * (yi - fitted)
        })
        .sum();
    let residual_df = n - k;
    let sigma2 = rss / residual_df as f64;

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = if with_intercept {
        y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let tss_floor = 1e-12 * y.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let slope_count = p_in.max(usize::from(!with_intercept));

    let (r_squared, f_statistic, f_p_value) = if tss <= tss_floor {
        (0.0, 0.0, 1.0)
    } else {
        let r2 = 1.0 - rss / tss;
        if p_in == 0 {
            (r2, 0.0, 1.0)
        } else if rss == 0.0 {
            (r2, f64::INFINITY, 0.0)
        } else {
            let f = ((tss - rss) / slope_count as f64) / sigma2;
            let f = f.max(0.0);
            let df1 = slope_count as f64;
            let df2 = residual_df as f64;
            let p = regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
            (r2, f, p)
        }
    };

    let all: Vec<Coefficient> = (0..k)
        .map(|i| coefficient_inference(beta[i], sigma2 * inverse[i][i], residual_df as f64))
        .collect();
    let (intercept, coefficients) = if with_intercept {
        let mut iter = all.into_iter();
        (iter.next(), iter.collect())
    } else {
        (None, all)
    };

    Ok(OlsResult {
        coefficients,
        intercept,
        r_squared,
        f_statistic,
        f_p_value,
        observations: n,
        residual_df,
    })
}

/// One regression per omitted column, for weight families whose columns sum
/// to a constant and are therefore collinear with the intercept.
#[derive(Debug)]
pub struct DropOneRegression {
    pub omitted_column: usize,
    pub result: Result<OlsResult, StatsError>,
}

pub fn drop_one_regressions(
    rows: &[Vec<f64>],
    y: &[f64],
    with_intercept: bool,
) -> Vec<DropOneRegression> {
    let columns = rows.first().map_or(0, |r| r.len());
    (0..columns)
        .map(|omitted| {
            let reduced: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter_map(|(j, v)| (j != omitted).then_some(*v))
                        .collect()
                })
                .collect();
            DropOneRegression { omitted_column: omitted, result: ols_fit(&reduced, y, with_intercept) }
        })
        .collect()
}
