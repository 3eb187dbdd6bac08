use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::sweep::{ConvergenceTable, COLUMNS};
use crate::error::{Error, Result};

pub const MIN_ROWS: usize = 4;
const MAX_CONDITION: f64 = 1e10;

/// Correction terms fitted alongside the limit `c0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `c0 + c1 ln(p)/p + c2/p`
    #[default]
    LogCorrected,
    /// `c0 + c1/p`
    Inverse,
}

impl Model {
    fn basis(self, p: f64) -> Vec<f64> {
        match self {
            Model::LogCorrected => vec![1.0, p.ln() / p, 1.0 / p],
            Model::Inverse => vec![1.0, 1.0 / p],
        }
    }

    pub fn terms(self) -> usize {
        self.basis(2.0).len()
    }

    pub fn eval(self, coefficients: &[f64], p: f64) -> f64 {
        self.basis(p).iter().zip(coefficients).map(|(b, c)| b * c).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub column: String,
    pub coefficients: Vec<f64>,
    /// `c0`, the estimated value at `p = ∞`.
    pub limit: f64,
    /// Standard error of `c0` from the residual variance; `NaN` without
    /// spare degrees of freedom.
    pub std_error: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub condition: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub model: Model,
    pub min_p: f64,
    pub fits: Vec<ColumnFit>,
}

impl Extrapolation {
    pub fn fit(&self, column: &str) -> Option<&ColumnFit> {
        self.fits.iter().find(|f| f.column == column)
    }
}

fn fit_series(series: &[(f64, f64)], model: Model) -> Result<(Vec<f64>, f64, f64, f64, f64)> {
    let k = model.terms();
    let n = series.len();
    let a = DMatrix::from_fn(n, k, |i, j| model.basis(series[i].0)[j]);
    let y = DVector::from_iterator(n, series.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let condition = smax / smin;
    if !(condition < MAX_CONDITION) {
        return Err(Error::Extrapolation(format!(
            "design matrix ill-conditioned (condition number {condition:.3e})"
        )));
    }
    let coef = svd
        .solve(&y, f64::EPSILON * smax)
        .map_err(|e| Error::Extrapolation(e.to_string()))?;
    let resid = &a * &coef - &y;
    let rss = resid.norm_squared();
    let max_residual = resid.amax();
    let std_error = if n > k {
        let sigma2 = rss / (n - k) as f64;
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let var: f64 = (0..k)
            .map(|j| (v_t[(j, 0)] / svd.singular_values[j]).powi(2))
            .sum();
        (sigma2 * var).sqrt()
    } else {
        f64::NAN
    };
    Ok((
        coef.iter().copied().collect(),
        std_error,
        (rss / n as f64).sqrt(),
        max_residual,
        condition,
    ))
}

/// Least-squares fit of the rows with `p >= min_p` to `model`, column by
/// column. Fewer than four usable rows is refused.
pub fn extrapolate(table: &ConvergenceTable, model: Model, min_p: f64) -> Result<Extrapolation> {
    let mut fits = Vec::with_capacity(COLUMNS.len());
    for col in COLUMNS {
        let series: Vec<_> = table
            .series(col)
            .into_iter()
            .filter(|(p, v)| *p >= min_p && v.is_finite())
            .collect();
        if series.len() < MIN_ROWS.max(model.terms()) {
            return Err(Error::Extrapolation(format!(
                "{} usable rows for {}; at least {MIN_ROWS} required",
                series.len(),
                col.name
            )));
        }
        let (coefficients, std_error, rms_residual, max_residual, condition) =
            fit_series(&series, model)?;
        fits.push(ColumnFit {
            column: col.name.to_string(),
            limit: coefficients[0],
            coefficients,
            std_error,
            rms_residual,
            max_residual,
            condition,
            rows: series.len(),
        });
    }
    Ok(Extrapolation { model, min_p, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_model() {
        let series: Vec<_> = [10.0, 20.0, 40.0, 80.0, 160.0]
            .iter()
            .map(|&p: &f64| (p, 2.0 - 3.0 * p.ln() / p + 0.5 / p))
            .collect();
        let (c, se, rms, _, cond) = fit_series(&series, Model::LogCorrected).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-10);
        assert!((c[1] + 3.0).abs() < 1e-8);
        assert!(rms < 1e-12 && se < 1e-10 && cond > 1.0);
    }

    #[test]
    fn inverse_model_two_terms() {
        let series: Vec<_> = [4.0, 8.0, 16.0, 32.0].iter().map(|&p: &f64| (p, 1.0 + 1.0 / p)).collect();
        let (c, ..) = fit_series(&series, Model::Inverse).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_rows_refused() {
        let table = ConvergenceTable::default();
        assert!(matches!(
            extrapolate(&table, Model::LogCorrected, 0.0),
            Err(Error::Extrapolation(_))
        ));
    }
}
