//! Shooting integration of the radial Lane-Emden equation
//!
//! ```text
//! u'' + u'/r + |u|^{p-1} u = 0,   u(0) = u0,  u'(0) = 0
//! ```
//!
//! The equation is integrated in the logarithmic radius `t = ln r` with state
//! `(u, w)` where `w = r u'`:
//!
//! ```text
//! du/dt = w,   dw/dt = -sign(u) exp(2t + p ln|u|)
//! ```
//!
//! For large `p` the shot spans hundreds of e-folds in `r`, so the linear
//! radius is never formed inside the integrator. The nonlinearity is
//! evaluated from the logarithm of its magnitude, which neither overflows nor
//! underflows while the product `r^2 |u|^p` stays representable.

mod dop853;
mod tableau;

use std::io::Write;

pub use dop853::{DenseStep, Stepper, Tolerances};

use crate::error::{Error, Result};
use crate::roots::refine_sign_change;

/// Series start radius, relative to the natural length `|u0|^{-(p-1)/2}`.
pub const DEFAULT_SERIES_RADIUS: f64 = 1e-8;
/// Event refinement target for `|u|` (zeros) and `|r u'|` (critical points).
pub const DEFAULT_EVENT_TOL: f64 = 1e-13;

/// `sign(u) |u|^p r^2`, computed as `sign(u) exp(ln_r2 + p ln|u|)`.
#[inline]
pub fn weighted_power(p: f64, u: f64, ln_r2: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let mag = (ln_r2 + p * u.abs().ln()).exp();
    if u > 0.0 {
        mag
    } else {
        -mag
    }
}

/// Two-term Taylor state `(u(r0), u'(r0))` of the regular solution with
/// `u(0) = u0`.
pub fn series_start(p: f64, u0: f64, r0: f64) -> Result<(f64, f64)> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "series start radius must be positive, got {r0}"
        )));
    }
    if u0 == 0.0 || !u0.is_finite() {
        return Err(Error::InvalidInput("shooting value must be nonzero".into()));
    }
    let f0 = weighted_power(p, u0, 0.0);
    Ok((u0 - f0 * r0 * r0 / 4.0, -f0 * r0 / 2.0))
}

/// The same expansion in log-radius form: `(u, r u')` at `r = exp(ln_r0)`.
fn series_state_log(p: f64, u0: f64, ln_r0: f64) -> [f64; 2] {
    let fr2 = weighted_power(p, u0, 2.0 * ln_r0);
    [u0 - fr2 / 4.0, -fr2 / 2.0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop at the `k`-th zero of `u`.
    AfterZeros(usize),
    /// Integrate up to this radius.
    AtRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ZeroCrossing,
    CriticalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub ln_radius: f64,
    pub u: f64,
    /// `r u'(r)` at the event.
    pub w: f64,
}

impl Event {
    pub fn radius(&self) -> f64 {
        self.ln_radius.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShotConfig {
    pub tolerances: Tolerances,
    pub event_tol: f64,
    /// Series start radius relative to the natural length of the shot.
    pub series_radius: f64,
    pub max_steps: usize,
}

impl Default for ShotConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            event_tol: DEFAULT_EVENT_TOL,
            series_radius: DEFAULT_SERIES_RADIUS,
            max_steps: 2_000_000,
        }
    }
}

impl ShotConfig {
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if !(self.event_tol > 0.0) {
            return Err(Error::InvalidInput("event tolerance must be positive".into()));
        }
        if !(self.series_radius > 0.0 && self.series_radius < 1e-2) {
            return Err(Error::InvalidInput(format!(
                "series radius {} outside (0, 1e-2)",
                self.series_radius
            )));
        }
        Ok(())
    }
}

/// Dense record of one shot.
#[derive(Debug, Clone)]
pub struct RadialTrajectory {
    p: f64,
    u0: f64,
    ln_r0: f64,
    start: [f64; 2],
    steps: Vec<DenseStep<2>>,
    events: Vec<Event>,
    ln_r_end: f64,
    evaluations: usize,
}

impl RadialTrajectory {
    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn center_value(&self) -> f64 {
        self.u0
    }

    /// Log of the series start radius (first abscissa).
    pub fn ln_start(&self) -> f64 {
        self.ln_r0
    }

    /// Log of the last radius at which the trajectory may be evaluated.
    pub fn ln_end(&self) -> f64 {
        self.ln_r_end
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn zeros(&self) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::ZeroCrossing)
    }

    pub fn critical_points(&self) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::CriticalPoint)
    }

    pub fn steps(&self) -> &[DenseStep<2>] {
        &self.steps
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Step boundaries in `ln r`, clipped to `[ln_start, ln_end]`.
    pub fn ln_abscissas(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.ln_r0);
        for s in &self.steps {
            let t = s.t1().min(self.ln_r_end);
            if t > *out.last().unwrap() {
                out.push(t);
            }
        }
        out
    }

    pub fn abscissas(&self) -> Vec<f64> {
        self.ln_abscissas().into_iter().map(f64::exp).collect()
    }

    /// `(u, u')` at every abscissa.
    pub fn states(&self) -> Vec<(f64, f64)> {
        self.ln_abscissas()
            .into_iter()
            .map(|t| {
                let [u, w] = self.eval_log(t).expect("abscissa inside range");
                (u, w * (-t).exp())
            })
            .collect()
    }

    /// `(u, r u')` at `ln r = t`. Below the series start the Taylor expansion
    /// is used; beyond the end of the trajectory `None` is returned.
    pub fn eval_log(&self, t: f64) -> Option<[f64; 2]> {
        if t.is_nan() || t > self.ln_r_end {
            return None;
        }
        if t <= self.ln_r0 {
            if t == self.ln_r0 {
                return Some(self.start);
            }
            return Some(series_state_log(self.p, self.u0, t));
        }
        let idx = self.steps.partition_point(|s| s.t1() < t);
        self.steps.get(idx).map(|s| s.eval(t))
    }

    /// `(u(r), u'(r))` for `0 <= r <= exp(ln_end)`.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        if r == 0.0 {
            return Some((self.u0, 0.0));
        }
        let t = r.ln();
        self.eval_log(t).map(|[u, w]| (u, w / r))
    }

    /// Accumulated magnitude of the per-step local error estimates of `u` and
    /// `r u'` up to `ln r = t`.
    pub fn accumulated_error(&self, t: f64) -> [f64; 2] {
        let mut acc = [0.0; 2];
        for s in self.steps.iter().take_while(|s| s.t0 < t) {
            acc[0] += s.local_error[0].abs();
            acc[1] += s.local_error[1].abs();
        }
        acc
    }

    /// Uncertainty of an event location in `ln r`: accumulated local error in
    /// the event function plus the refinement tolerance, divided by the slope
    /// of the event function.
    pub fn event_uncertainty(&self, event: &Event, event_tol: f64) -> f64 {
        let acc = self.accumulated_error(event.ln_radius);
        match event.kind {
            EventKind::ZeroCrossing => (acc[0] + event_tol) / event.w.abs(),
            EventKind::CriticalPoint => {
                let slope = weighted_power(self.p, event.u, 2.0 * event.ln_radius).abs();
                (acc[1] + event_tol) / slope
            }
        }
    }

    /// Events alternate zero / critical point, starting with a zero.
    pub fn events_alternate(&self) -> bool {
        self.events.iter().enumerate().all(|(i, e)| {
            let expected = if i % 2 == 0 {
                EventKind::ZeroCrossing
            } else {
                EventKind::CriticalPoint
            };
            e.kind == expected
        })
    }

    /// CSV dump with columns `r,u,du`; events follow in a comment block.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,u,du")?;
        for (t, (u, du)) in self.ln_abscissas().into_iter().zip(self.states()) {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", t.exp(), u, du)?;
        }
        writeln!(out, "# events: kind,r,u,du")?;
        for e in &self.events {
            let kind = match e.kind {
                EventKind::ZeroCrossing => "zero_crossing",
                EventKind::CriticalPoint => "critical_point",
            };
            let r = e.radius();
            writeln!(out, "# {kind},{:.17e},{:.17e},{:.17e}", r, e.u, e.w / r)?;
        }
        Ok(())
    }
}

/// Shoot from `u(0) = u0` with `u'(0) = 0` until the stop rule is met.
///
/// Any `p > 0` is accepted here; `p = 1` reduces to Bessel's equation.
pub fn integrate_shooting(
    p: f64,
    u0: f64,
    stop: StopRule,
    cfg: &ShotConfig,
) -> Result<RadialTrajectory> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent must be positive, got {p}")));
    }
    if u0 == 0.0 || !u0.is_finite() {
        return Err(Error::InvalidInput("shooting value must be nonzero".into()));
    }
    cfg.validate()?;

    let ln_r0 = cfg.series_radius.ln() - 0.5 * (p - 1.0) * u0.abs().ln();
    let (target_zeros, t_stop) = match stop {
        StopRule::AfterZeros(k) if k > 0 => (k, f64::INFINITY),
        StopRule::AfterZeros(_) => {
            return Err(Error::InvalidInput("need at least one zero".into()))
        }
        StopRule::AtRadius(r) => {
            if !(r > 0.0) || r.ln() <= ln_r0 {
                return Err(Error::InvalidInput(format!(
                    "stop radius {r} not beyond the series start"
                )));
            }
            (usize::MAX, r.ln())
        }
    };

    let start = series_state_log(p, u0, ln_r0);
    let rhs = move |t: f64, y: &[f64; 2]| [y[1], -weighted_power(p, y[0], 2.0 * t)];
    let mut stepper = Stepper::new(rhs, ln_r0, start, cfg.tolerances);

    let mut steps: Vec<DenseStep<2>> = Vec::new();
    let mut events = Vec::new();
    let mut zeros = 0usize;
    let mut ln_r_end = t_stop;

    'outer: loop {
        if steps.len() >= cfg.max_steps {
            return Err(Error::StepBudget {
                max_steps: cfg.max_steps,
                ln_radius: stepper.time(),
            });
        }
        let step = stepper.step(t_stop)?;

        let mut found: Vec<Event> = Vec::new();
        for (idx, kind) in [(0usize, EventKind::ZeroCrossing), (1, EventKind::CriticalPoint)] {
            let (a, b) = (step.y0[idx], step.y1[idx]);
            let crosses = (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0);
            if !crosses {
                continue;
            }
            let t = refine_sign_change(|t| step.eval(t)[idx], step.t0, step.t1(), cfg.event_tol);
            let [u, w] = step.eval(t);
            found.push(Event {
                kind,
                ln_radius: t,
                u,
                w,
            });
        }
        found.sort_by(|a, b| a.ln_radius.total_cmp(&b.ln_radius));
        steps.push(step);

        for e in found {
            events.push(e);
            if e.kind == EventKind::ZeroCrossing {
                zeros += 1;
                if zeros == target_zeros {
                    ln_r_end = e.ln_radius;
                    break 'outer;
                }
            }
        }
        if stepper.time() >= t_stop {
            break;
        }
    }

    Ok(RadialTrajectory {
        p,
        u0,
        ln_r0,
        start,
        steps,
        events,
        ln_r_end,
        evaluations: stepper.evaluations(),
    })
}
