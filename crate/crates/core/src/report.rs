//! Serializable records, sweep verdicts and plain-text rendering.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{column, ConvergenceTable, Extrapolation, COLUMNS};
use crate::error::Result;
use crate::limit_profiles::{AsymptoticConstants, IdentityResidual};
use crate::nodal_solver::{GroundSolution, NodalSolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub schema: String,
    pub constants: AsymptoticConstants,
    pub boundary_flux: f64,
    pub residuals: Vec<IdentityResidual>,
}

impl ConstantsRecord {
    pub fn new(constants: AsymptoticConstants) -> Self {
        Self {
            schema: "constants-v1".into(),
            boundary_flux: constants.boundary_flux(),
            residuals: constants.identity_residuals(),
            constants,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalRecord {
    pub schema: String,
    pub p: f64,
    pub nodal_radius: f64,
    pub ln_nodal_radius: f64,
    pub peak_radius: f64,
    pub ln_peak_radius: f64,
    pub center_value: f64,
    pub norm_minus: f64,
    pub norm_plus: f64,
    pub eps_minus: f64,
    pub ln_eps_minus: f64,
    pub eps_plus: f64,
    pub ln_eps_plus: f64,
    pub energy: f64,
    pub lp1_mass: f64,
    pub boundary_slope: f64,
    pub scaled_nodal_radius: f64,
    pub peak_ratio: f64,
    pub nehari_residual: f64,
    pub pohozaev_residual: f64,
    pub steps: usize,
}

impl From<&NodalSolution> for NodalRecord {
    fn from(s: &NodalSolution) -> Self {
        Self {
            schema: "nodal-v1".into(),
            p: s.p,
            nodal_radius: s.nodal_radius,
            ln_nodal_radius: s.ln_nodal_radius,
            peak_radius: s.peak_radius,
            ln_peak_radius: s.ln_peak_radius,
            center_value: s.center_value,
            norm_minus: s.norm_minus,
            norm_plus: s.norm_plus,
            eps_minus: s.eps_minus,
            ln_eps_minus: s.ln_eps_minus,
            eps_plus: s.eps_plus,
            ln_eps_plus: s.ln_eps_plus,
            energy: s.energy,
            lp1_mass: s.lp1_mass,
            boundary_slope: s.boundary_slope,
            scaled_nodal_radius: s.scaled_nodal_radius(),
            peak_ratio: s.peak_ratio(),
            nehari_residual: s.nehari_residual(),
            pohozaev_residual: s.pohozaev_residual(),
            steps: s.profile.trajectory().steps().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundRecord {
    pub schema: String,
    pub p: f64,
    pub sup_norm: f64,
    pub energy: f64,
    pub lp1_mass: f64,
    pub boundary_slope: f64,
    pub nehari_residual: f64,
}

impl From<&GroundSolution> for GroundRecord {
    fn from(g: &GroundSolution) -> Self {
        Self {
            schema: "ground-v1".into(),
            p: g.p,
            sup_norm: g.sup_norm,
            energy: g.energy,
            lp1_mass: g.lp1_mass,
            boundary_slope: g.boundary_slope,
            nehari_residual: g.nehari_residual(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub table: ConvergenceTable,
    pub extrapolation: Option<Extrapolation>,
    pub extrapolation_error: Option<String>,
    pub verdicts: Vec<Verdict>,
}

impl SweepReport {
    pub fn new(
        table: ConvergenceTable,
        extrapolation: Result<Extrapolation>,
        consts: &AsymptoticConstants,
    ) -> Self {
        let (extrapolation, extrapolation_error) = match extrapolation {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let verdicts = evaluate(&table, extrapolation.as_ref(), consts);
        Self {
            schema: "sweep-v1".into(),
            table,
            extrapolation,
            extrapolation_error,
            verdicts,
        }
    }

    /// Worst status over all verdicts.
    pub fn overall(&self) -> Status {
        overall(&self.verdicts)
    }
}

pub fn overall(verdicts: &[Verdict]) -> Status {
    if verdicts.iter().any(|v| v.status == Status::Fail) {
        Status::Fail
    } else if verdicts.iter().any(|v| v.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

pub fn relative_gap(value: f64, target: f64) -> f64 {
    ((value - target) / target).abs()
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn last_values(table: &ConvergenceTable, name: &str, n: usize) -> Option<Vec<f64>> {
    let s = table.series_named(name);
    (s.len() >= n).then(|| s[s.len() - n..].iter().map(|x| x.1).collect())
}

struct Checks<'a> {
    fit: Option<&'a Extrapolation>,
    out: Vec<Verdict>,
}

impl Checks<'_> {
    fn push(&mut self, name: &str, parts: Vec<(Option<bool>, String)>) {
        let status = if parts.iter().any(|(ok, _)| *ok == Some(false)) {
            Status::Fail
        } else if parts.iter().any(|(ok, _)| ok.is_none()) {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        let detail = parts.into_iter().map(|(_, d)| d).collect::<Vec<_>>().join("; ");
        self.out.push(Verdict {
            name: name.into(),
            status,
            detail,
        });
    }

    fn limit(&self, col: &str, target: f64, rel: f64) -> (Option<bool>, String) {
        match self.fit.and_then(|f| f.fit(col)) {
            Some(f) => {
                let gap = relative_gap(f.limit, target);
                (
                    Some(gap < rel),
                    format!("{col} -> {:.6} vs {target:.6} (gap {:.2}%, limit {:.0}%)", f.limit, 100.0 * gap, 100.0 * rel),
                )
            }
            None => (None, format!("{col}: no extrapolation")),
        }
    }
}

/// Verdicts of a sweep against the limit constants.
pub fn evaluate(
    table: &ConvergenceTable,
    fit: Option<&Extrapolation>,
    consts: &AsymptoticConstants,
) -> Vec<Verdict> {
    let mut c = Checks { fit, out: Vec::new() };
    let last = table.rows.iter().rev().find(|r| r.data.is_some());

    let failures: Vec<String> = table.failures().map(|r| format!("p={}", r.p)).collect();
    let residual_ok = table
        .rows
        .iter()
        .filter_map(|r| r.data.as_ref())
        .all(|d| d.nehari_residual < 1e-8 && d.pohozaev_residual < 1e-8 && d.sup_norm_margin > 0.0);
    c.push(
        "solver rows",
        vec![
            (
                Some(failures.is_empty()),
                if failures.is_empty() {
                    format!("{} rows solved", table.rows.len())
                } else {
                    format!("failed rows: {}", failures.join(", "))
                },
            ),
            (Some(residual_ok), "Nehari/Pohozaev < 1e-8 and sup-norm lower bound".into()),
        ],
    );

    let raw_radius = last.map(|r| {
        let v = r.data.as_ref().unwrap().scaled_nodal_radius;
        let gap = relative_gap(v, consts.r_inf);
        (Some(gap < 0.05), format!("raw at p={}: {v:.6} (gap {:.2}%, limit 5%)", r.p, 100.0 * gap))
    });
    c.push(
        "nodal radius",
        vec![
            c.limit("scaled_nodal_radius", consts.r_inf, 0.02),
            raw_radius.unwrap_or((None, "no rows".into())),
        ],
    );

    c.push(
        "sup norms",
        vec![
            c.limit("norm_minus", consts.m_minus, 0.03),
            c.limit("norm_plus", consts.u_inf, 0.03),
        ],
    );

    let bound: Vec<(f64, f64)> = table
        .series_named("energy")
        .into_iter()
        .filter(|(p, _)| *p >= 100.0)
        .collect();
    let bound_ok = bound.iter().all(|(_, e)| *e <= 339.0);
    c.push(
        "energy",
        vec![
            c.limit("energy", consts.e_inf, 0.05),
            (
                if bound.is_empty() { None } else { Some(bound_ok) },
                format!(
                    "max over p>=100: {:.4} (bound 339)",
                    bound.iter().map(|x| x.1).fold(f64::NAN, f64::max)
                ),
            ),
        ],
    );

    let mut parts = Vec::new();
    for name in ["negative_gap", "positive_gap"] {
        parts.push(match last_values(table, name, 4) {
            Some(v) => {
                let ok = strictly_decreasing(&v) && v[3] < 0.15;
                (Some(ok), format!("{name} last four {:.5?} (final < 0.15, decreasing)", v))
            }
            None => (None, format!("{name}: fewer than four rows")),
        });
    }
    parts.push(match last {
        Some(r) => {
            let lp = r.data.as_ref().unwrap().peak_ratio;
            let gap = relative_gap(lp, consts.l);
            (Some(gap < 0.1), format!("l_p at p={}: {lp:.5} vs {:.5} (gap {:.2}%, limit 10%)", r.p, consts.l, 100.0 * gap))
        }
        None => (None, "no rows".into()),
    });
    c.push("profile distances", parts);

    let slope_gap = match fit.and_then(|f| f.fit("slope_balance_gap")) {
        Some(f) => (Some(f.limit.abs() < 0.05), format!("slope_balance_gap -> {:.6} (limit |.| < 0.05)", f.limit)),
        None => (None, "slope_balance_gap: no extrapolation".into()),
    };
    c.push(
        "peak integral identities",
        vec![
            c.limit("peak_integral", consts.alpha + 2.0, 0.05),
            c.limit("rate_composite", 1.0, 0.05),
            slope_gap,
        ],
    );

    c.push(
        "Green limit",
        vec![match last_values(table, "green_deviation", 3) {
            Some(v) => {
                let flux = last_values(table, "flux_green_deviation", 3).unwrap_or_default();
                (
                    Some(strictly_decreasing(&v)),
                    format!(
                        "green_deviation (gamma = {:.5}) last three {:.5?}, decreasing required \
                         [diagnostic: coefficient -{:.5} gives {:.5?}]",
                        consts.gamma,
                        v,
                        consts.boundary_flux(),
                        flux
                    ),
                )
            }
            None => (None, "fewer than three rows".into()),
        }],
    );

    c.push(
        "ground state",
        vec![
            c.limit("ground_energy", 8.0 * PI * E, 0.03),
            c.limit("ground_sup", E.sqrt(), 0.03),
        ],
    );
    c.out
}

pub fn render_constants(rec: &ConstantsRecord) -> String {
    let k = &rec.constants;
    let mut s = String::new();
    for (name, v) in [
        ("tbar", k.tbar),
        ("alpha", k.alpha),
        ("l", k.l),
        ("beta", k.beta),
        ("u_inf", k.u_inf),
        ("r_inf", k.r_inf),
        ("m_minus", k.m_minus),
        ("e_inf", k.e_inf),
        ("gamma", k.gamma),
        ("boundary_flux", rec.boundary_flux),
    ] {
        let _ = writeln!(s, "{name:<14} {v:.12}");
    }
    let _ = writeln!(s, "\nidentity residuals:");
    for r in &rec.residuals {
        let _ = writeln!(s, "  {:<54} {:.3e}", r.name, r.residual);
    }
    s
}

pub fn render_table(table: &ConvergenceTable, names: &[&str]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:>8}", "p");
    for n in names {
        let _ = write!(s, " {n:>20}");
    }
    s.push('\n');
    for row in &table.rows {
        let _ = write!(s, "{:>8}", row.p);
        match &row.data {
            Some(d) => {
                for n in names {
                    let v = column(n).map(|c| (c.get)(d)).unwrap_or(f64::NAN);
                    let _ = write!(s, " {v:>20.10}");
                }
            }
            None => {
                let _ = write!(s, "  error: {}", row.error.as_deref().unwrap_or("?"));
            }
        }
        s.push('\n');
    }
    s
}

pub fn render_report(report: &SweepReport) -> String {
    let mut s = render_table(
        &report.table,
        &["scaled_nodal_radius", "norm_minus", "norm_plus", "energy", "peak_ratio"],
    );
    s.push('\n');
    match (&report.extrapolation, &report.extrapolation_error) {
        (Some(ex), _) => {
            let _ = writeln!(s, "extrapolation ({:?}, p >= {}):", ex.model, ex.min_p);
            for f in &ex.fits {
                if COLUMNS.iter().any(|c| c.name == f.column) {
                    let _ = writeln!(
                        s,
                        "  {:<22} {:>16.8} ± {:.2e}  rms {:.2e}  cond {:.1e}",
                        f.column, f.limit, f.std_error, f.rms_residual, f.condition
                    );
                }
            }
        }
        (None, Some(e)) => {
            let _ = writeln!(s, "{e}");
        }
        (None, None) => {}
    }
    s.push('\n');
    for v in &report.verdicts {
        let _ = writeln!(s, "{:<12} {:<26} {}", v.status.to_string(), v.name, v.detail);
    }
    let _ = writeln!(s, "overall: {}", report.overall());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{extrapolate, sweep, Model, SweepConfig};

    #[test]
    fn truncated_table_is_inconclusive() {
        let consts = AsymptoticConstants::compute().unwrap();
        let table = sweep(&[640.0, 1280.0], &SweepConfig::default()).unwrap();
        let ex = extrapolate(&table, Model::LogCorrected, 0.0);
        assert!(ex.is_err());
        let rep = SweepReport::new(table, ex, &consts);
        assert!(rep.extrapolation_error.is_some());
        assert_eq!(rep.overall(), Status::Inconclusive);
    }

    #[test]
    fn decreasing_helper() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0, 1.0]));
    }
}
