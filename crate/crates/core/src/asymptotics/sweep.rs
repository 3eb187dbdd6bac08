use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;
use crate::nodal_solver::{interior_ball_checks, solve_ground, solve_nodal, sup_norm_margin, SolverConfig};

pub const DEFAULT_GRID: [f64; 8] = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub solver: SolverConfig,
    /// Radius of the window `[0, R]` for `z_p^-`.
    pub negative_window: f64,
    /// Window for `z_p^+`; `None` means `[-l/2, 10]`.
    pub positive_window: Option<(f64, f64)>,
    /// Spacing of the rescaled samples.
    pub sample_step: f64,
    /// Radii band for the Green-limit deviation.
    pub green_band: (f64, f64),
    pub green_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            negative_window: 5.0,
            positive_window: None,
            sample_step: 0.01,
            green_band: (0.5, 0.95),
            green_samples: 46,
        }
    }
}

impl SweepConfig {
    pub fn positive_window(&self, consts: &AsymptoticConstants) -> (f64, f64) {
        self.positive_window.unwrap_or((-0.5 * consts.l, 10.0))
    }
}

/// Every measured quantity of one solved exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowData {
    pub scaled_nodal_radius: f64,
    pub norm_minus: f64,
    pub norm_plus: f64,
    pub energy: f64,
    pub peak_ratio: f64,
    pub negative_gap: f64,
    pub negative_slope_gap: f64,
    pub positive_gap: f64,
    pub positive_slope_gap: f64,
    pub green_deviation: f64,
    /// Same sup with coefficient `-(α + 2) u_inf` in place of `γ`.
    pub flux_green_deviation: f64,
    pub peak_integral: f64,
    pub peak_integral_flux: f64,
    pub rate_composite: f64,
    pub slope_balance_gap: f64,
    pub interior_sup: f64,
    pub interior_slope: f64,
    pub interior_mass: f64,
    pub ground_energy: f64,
    pub ground_sup: f64,
    pub nehari_residual: f64,
    pub pohozaev_residual: f64,
    pub shifted_ode_residual: f64,
    pub sup_norm_margin: f64,
}

pub struct Column {
    pub name: &'static str,
    pub get: fn(&RowData) -> f64,
}

macro_rules! columns {
    ($($field:ident),* $(,)?) => {
        pub const COLUMNS: &[Column] = &[
            $(Column { name: stringify!($field), get: |r| r.$field },)*
        ];
    };
}

columns!(
    scaled_nodal_radius,
    norm_minus,
    norm_plus,
    energy,
    peak_ratio,
    negative_gap,
    negative_slope_gap,
    positive_gap,
    positive_slope_gap,
    green_deviation,
    flux_green_deviation,
    peak_integral,
    peak_integral_flux,
    rate_composite,
    slope_balance_gap,
    interior_sup,
    interior_slope,
    interior_mass,
    ground_energy,
    ground_sup,
    nehari_residual,
    pohozaev_residual,
    shifted_ode_residual,
    sup_norm_margin,
);

pub fn column(name: &str) -> Option<&'static Column> {
    COLUMNS.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub data: Option<RowData>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<SweepRow>,
}

fn samples(a: f64, b: f64, step: f64) -> usize {
    ((b - a) / step).round() as usize + 1
}

pub fn measure_row(p: f64, cfg: &SweepConfig, consts: &AsymptoticConstants) -> Result<RowData> {
    let sol = solve_nodal(p, &cfg.solver)?;
    let quad = cfg.solver.quad();

    let neg_w = cfg.negative_window;
    let neg = rescale_negative(&sol, neg_w, samples(0.0, neg_w, cfg.sample_step))?;
    let (negative_gap, negative_slope_gap) = profile_distance(&neg, negative_limit, (0.0, neg_w))?;

    let win = cfg.positive_window(consts);
    let pos = rescale_positive(&sol, win, samples(win.0, win.1, cfg.sample_step))?;
    let (positive_gap, positive_slope_gap) = profile_distance(&pos, positive_limit(consts), win)?;

    let (g0, g1) = cfg.green_band;
    let n = cfg.green_samples.max(2);
    let radii: Vec<f64> = (0..n).map(|k| g0 + (g1 - g0) * k as f64 / (n - 1) as f64).collect();
    let green_deviation = green_limit_check(&sol, &radii, consts.gamma)?;
    let flux_green_deviation = green_limit_check(&sol, &radii, -consts.boundary_flux())?;

    let (peak_integral, peak_integral_flux) = super::peak_integral(&sol, quad)?;
    let ib = interior_ball_checks(&sol, quad)?;
    let ground = solve_ground(p, &cfg.solver)?;

    Ok(RowData {
        scaled_nodal_radius: sol.scaled_nodal_radius(),
        norm_minus: sol.norm_minus,
        norm_plus: sol.norm_plus,
        energy: sol.energy,
        peak_ratio: sol.peak_ratio(),
        negative_gap,
        negative_slope_gap,
        positive_gap,
        positive_slope_gap,
        green_deviation,
        flux_green_deviation,
        peak_integral,
        peak_integral_flux,
        rate_composite: rate_composite(&sol, consts.alpha),
        slope_balance_gap: slope_balance_gap(&sol, consts.alpha),
        interior_sup: ib.scaled_sup,
        interior_slope: ib.scaled_slope,
        interior_mass: ib.scaled_mass,
        ground_energy: ground.energy,
        ground_sup: ground.sup_norm,
        nehari_residual: sol.nehari_residual(),
        pohozaev_residual: sol.pohozaev_residual(),
        shifted_ode_residual: shifted_ode_residual(&pos)?,
        sup_norm_margin: sup_norm_margin(&sol),
    })
}

/// Solve and measure every exponent of `grid` in parallel. A failing
/// exponent yields a row with `error` set.
pub fn sweep(grid: &[f64], cfg: &SweepConfig) -> Result<ConvergenceTable> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.iter().any(|&p| !(p > 1.0) || !p.is_finite()) {
        return Err(Error::InvalidInput("every exponent must exceed 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let consts = AsymptoticConstants::compute()?;
    let rows = grid
        .par_iter()
        .map(|&p| match measure_row(p, cfg, &consts) {
            Ok(data) => SweepRow {
                p,
                data: Some(data),
                error: None,
            },
            Err(e) => SweepRow {
                p,
                data: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(ConvergenceTable { rows })
}

impl ConvergenceTable {
    /// `(p, value)` over the successful rows.
    pub fn series(&self, col: &Column) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.data.as_ref().map(|d| (r.p, (col.get)(d))))
            .collect()
    }

    pub fn series_named(&self, name: &str) -> Vec<(f64, f64)> {
        column(name).map(|c| self.series(c)).unwrap_or_default()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.data.is_none())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "p")?;
        for c in COLUMNS {
            write!(out, ",{}", c.name)?;
        }
        writeln!(out, ",error")?;
        for row in &self.rows {
            write!(out, "{}", row.p)?;
            for c in COLUMNS {
                match &row.data {
                    Some(d) => write!(out, ",{:.15e}", (c.get)(d))?,
                    None => write!(out, ",")?,
                }
            }
            let err = row.error.as_deref().unwrap_or("").replace(['"', ','], ";");
            writeln!(out, ",{err}")?;
        }
        Ok(())
    }

    /// One `p value` file per column plus `plot.gp` rendering them against
    /// `1/p`.
    pub fn write_gnuplot(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut script = String::from(
            "set terminal pngcairo size 800,600\nset xlabel '1/p'\nset key off\n",
        );
        for c in COLUMNS {
            let mut f = std::fs::File::create(dir.join(format!("{}.dat", c.name)))?;
            writeln!(f, "# p {}", c.name)?;
            for (p, v) in self.series(c) {
                writeln!(f, "{p} {v:.15e}")?;
            }
            script.push_str(&format!(
                "set output '{0}.png'\nset ylabel '{0}'\nplot '{0}.dat' using (1/$1):2 with linespoints\n",
                c.name
            ));
        }
        std::fs::write(dir.join("plot.gp"), script)?;
        Ok(())
    }
}
