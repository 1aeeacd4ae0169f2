//! Least-squares power-law fits in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residual_max: f64,
    pub loglog_coefficient: Option<f64>,
}

/// Fits `log y = α log ν + β (+ γ log log ν)` to `(ν, y)` samples.
pub fn fit_exponent(samples: &[(f64, f64)], with_loglog: bool) -> Result<FitResult> {
    let needed = if with_loglog { 4 } else { 3 };
    if samples.len() < needed {
        return Err(Error::TooFewSamples { needed, found: samples.len() });
    }
    for (index, &(x, y)) in samples.iter().enumerate() {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::NonPositiveSample { index, x, y });
        }
        if with_loglog && !(x > 1.0) {
            return Err(Error::NonPositiveSample { index, x: x.ln(), y });
        }
    }
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mut columns: Vec<Vec<f64>> = vec![samples.iter().map(|s| s.0.ln()).collect()];
    if with_loglog {
        columns.push(samples.iter().map(|s| s.0.ln().ln()).collect());
    }
    let coef = least_squares(&columns, &ys)?;
    let intercept = coef[0];
    let exponent = coef[1];
    let loglog_coefficient = with_loglog.then(|| coef[2]);

    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut residual_max: f64 = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let predicted = intercept + columns.iter().zip(&coef[1..]).map(|(c, k)| c[i] * k).sum::<f64>();
        let r = y - predicted;
        residual_max = residual_max.max(r.abs());
        ss_res += r * r;
        ss_tot += (y - mean).powi(2);
    }
    let r_squared = if ss_tot <= f64::EPSILON * f64::EPSILON * n {
        if ss_res <= f64::EPSILON * n { 1.0 } else { 0.0 }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult { exponent, intercept, r_squared, residual_max, loglog_coefficient })
}

/// Ordinary least squares with an intercept, on centred columns. Returns
/// `[intercept, coefficients…]`.
fn least_squares(columns: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    let k = columns.len();
    let n = ys.len() as f64;
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    let y_mean = ys.iter().sum::<f64>() / n;
    let centred: Vec<Vec<f64>> = columns.iter().zip(&means).map(|(c, m)| c.iter().map(|v| v - m).collect()).collect();
    let mut normal = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            normal[i][j] = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
        }
        normal[i][k] = centred[i].iter().zip(ys).map(|(a, y)| a * (y - y_mean)).sum();
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| normal[a][col].abs().total_cmp(&normal[b][col].abs()))
            .expect("nonempty range");
        if normal[pivot][col].abs() < 1e-300 {
            return Err(Error::Domain("regressors are collinear".into()));
        }
        normal.swap(col, pivot);
        for row in col + 1..k {
            let factor = normal[row][col] / normal[col][col];
            for c in col..=k {
                normal[row][c] -= factor * normal[col][c];
            }
        }
    }
    let mut coef = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| normal[row][c] * coef[c]).sum();
        coef[row] = (normal[row][k] - tail) / normal[row][row];
    }
    let intercept = y_mean - coef.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    let mut out = vec![intercept];
    out.extend(coef);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let samples: Vec<_> = [10.0f64, 100.0, 1000.0].iter().map(|&x| (x, 2.0 * x.powf(0.25))).collect();
        let fit = fit_exponent(&samples, false).unwrap();
        assert_relative_eq!(fit.exponent, 0.25, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 2f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
        assert!(fit.residual_max < 1e-12);
        assert_eq!(fit.loglog_coefficient, None);
    }

    #[test]
    fn constant_data() {
        let samples: Vec<_> = [3.0, 30.0, 300.0, 3000.0].iter().map(|&x| (x, 7.0)).collect();
        let fit = fit_exponent(&samples, false).unwrap();
        assert!(fit.exponent.abs() < 1e-14);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn loglog_term_recovered() {
        let samples: Vec<_> = (1..=8)
            .map(|k| {
                let x = 4f64.powi(k);
                (x, 1.5 * x.powf(0.5) * x.ln().powf(0.5))
            })
            .collect();
        let fit = fit_exponent(&samples, true).unwrap();
        assert_relative_eq!(fit.exponent, 0.5, max_relative = 1e-9);
        assert_relative_eq!(fit.loglog_coefficient.unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)], false), Err(Error::TooFewSamples { .. })));
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)], false),
            Err(Error::NonPositiveSample { index: 1, .. })
        ));
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0), (3.0, 1.0)], true).is_err());
    }

    #[test]
    fn r_squared_in_unit_interval_for_noise() {
        let samples: Vec<_> = (1..20).map(|k| (f64::from(k), 1.0 + 0.5 * f64::from(k % 3))).collect();
        let fit = fit_exponent(&samples, false).unwrap();
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}
