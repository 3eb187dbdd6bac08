//! Explicit Dormand-Prince 8(5,3) stepper with seventh-order dense output.

use super::tableau::{A, C, D, E3, E5, STAGES, STAGES_EXT};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;
/// The independent variable is a log-radius; one e-fold is a natural ceiling.
const MAX_INITIAL_STEP: f64 = 0.1;

/// Mixed relative/absolute local error tolerances.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
        }
    }
}

impl Tolerances {
    pub fn halved(self) -> Self {
        Self {
            rtol: 0.5 * self.rtol,
            atol: 0.5 * self.atol,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive (rtol = {}, atol = {})",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    /// Unnormalised local error estimate of the step.
    pub local_error: [f64; N],
    coeffs: [[f64; N]; 7],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Evaluate the interpolant at `t`; exact at both step ends.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if t == self.t0 {
            return self.y0;
        }
        if t == self.t1() {
            return self.y1;
        }
        let x = (t - self.t0) / self.h;
        let mut y = [0.0; N];
        for (i, row) in self.coeffs.iter().rev().enumerate() {
            let factor = if i % 2 == 0 { x } else { 1.0 - x };
            for k in 0..N {
                y[k] = (y[k] + row[k]) * factor;
            }
        }
        for k in 0..N {
            y[k] += self.y0[k];
        }
        y
    }
}

/// Adaptive stepper over `dy/dt = f(t, y)` in the increasing-`t` direction.
pub struct Stepper<const N: usize, F> {
    rhs: F,
    t: f64,
    y: [f64; N],
    fy: [f64; N],
    h: f64,
    tol: Tolerances,
    evaluations: usize,
}

fn rms<const N: usize>(v: &[f64; N], scale: &[f64; N]) -> f64 {
    (v.iter().zip(scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / N as f64).sqrt()
}

fn combine<const N: usize>(y: &[f64; N], k: &[[f64; N]], coeffs: &[f64], h: f64) -> [f64; N] {
    let mut out = *y;
    for (row, &a) in k.iter().zip(coeffs) {
        if a != 0.0 {
            for i in 0..N {
                out[i] += h * a * row[i];
            }
        }
    }
    out
}

impl<const N: usize, F> Stepper<N, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, t0: f64, y0: [f64; N], tol: Tolerances) -> Self {
        let fy = rhs(t0, &y0);
        let mut stepper = Self {
            rhs,
            t: t0,
            y: y0,
            fy,
            h: 0.0,
            tol,
            evaluations: 1,
        };
        stepper.h = stepper.initial_step();
        stepper
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; N] {
        self.y
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn scale_of(&self, a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        let mut s = [0.0; N];
        for i in 0..N {
            s[i] = self.tol.atol + a[i].abs().max(b[i].abs()) * self.tol.rtol;
        }
        s
    }

    fn initial_step(&mut self) -> f64 {
        let scale = self.scale_of(&self.y, &self.y);
        let d0 = rms(&self.y, &scale);
        let d1 = rms(&self.fy, &scale);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            (0.01 * d0 / d1).min(MAX_INITIAL_STEP)
        };
        let y1 = combine(&self.y, &[self.fy], &[1.0], h0);
        let f1 = (self.rhs)(self.t + h0, &y1);
        self.evaluations += 1;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.fy[i];
        }
        let d2 = rms(&diff, &scale) / h0;
        let h1 = if !d2.is_finite() {
            1e-3 * h0
        } else if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1)
    }

    /// Take one accepted step, never overshooting `t_max`.
    pub fn step(&mut self, t_max: f64) -> Result<DenseStep<N>> {
        let mut h = self.h;
        let mut rejected = false;
        loop {
            let min_step = 10.0 * (self.t.next_up() - self.t);
            if h < min_step {
                return Err(Error::StepUnderflow {
                    radius: self.t.exp(),
                    ln_radius: self.t,
                });
            }
            let mut t_new = self.t + h;
            if t_new > t_max {
                t_new = t_max;
            }
            let h_eff = t_new - self.t;

            let mut k = [[0.0; N]; STAGES_EXT];
            k[0] = self.fy;
            for s in 1..STAGES {
                let ys = combine(&self.y, &k[..s], &A[s][..s], h_eff);
                k[s] = (self.rhs)(self.t + C[s] * h_eff, &ys);
            }
            let y_new = combine(&self.y, &k[..STAGES], &A[STAGES][..STAGES], h_eff);
            let f_new = (self.rhs)(t_new, &y_new);
            k[STAGES] = f_new;
            self.evaluations += STAGES;

            if y_new.iter().chain(f_new.iter()).any(|v| !v.is_finite()) {
                if rejected && h_eff <= min_step {
                    return Err(Error::NonFinite { ln_radius: self.t });
                }
                h = h_eff * MIN_FACTOR;
                rejected = true;
                continue;
            }

            let scale = self.scale_of(&self.y, &y_new);
            let mut err5 = [0.0; N];
            let mut err3 = [0.0; N];
            for i in 0..N {
                for s in 0..=STAGES {
                    err5[i] += E5[s] * k[s][i];
                    err3[i] += E3[s] * k[s][i];
                }
            }
            let e5 = rms(&err5, &scale).powi(2);
            let e3 = rms(&err3, &scale).powi(2);
            let err_norm = if e5 == 0.0 && e3 == 0.0 {
                0.0
            } else {
                h_eff * e5 / (e5 + 0.01 * e3).sqrt()
            };

            if err_norm < 1.0 {
                let mut factor = if err_norm == 0.0 {
                    MAX_FACTOR
                } else {
                    MAX_FACTOR.min(SAFETY * err_norm.powf(ERROR_EXPONENT))
                };
                if rejected {
                    factor = factor.min(1.0);
                }
                // A step clipped at t_max keeps the untruncated proposal.
                self.h = if t_new == t_max && h_eff < h { h } else { h_eff * factor };

                let mut local_error = [0.0; N];
                for i in 0..N {
                    let denom = err5[i].hypot(0.1 * err3[i]);
                    let corr = if denom > 0.0 { err5[i].abs() / denom } else { 1.0 };
                    local_error[i] = h_eff * err5[i] * corr;
                }

                for s in STAGES + 1..STAGES_EXT {
                    let ys = combine(&self.y, &k[..s], &A[s][..s], h_eff);
                    k[s] = (self.rhs)(self.t + C[s] * h_eff, &ys);
                }
                self.evaluations += STAGES_EXT - STAGES - 1;

                let mut coeffs = [[0.0; N]; 7];
                for i in 0..N {
                    let dy = y_new[i] - self.y[i];
                    coeffs[0][i] = dy;
                    coeffs[1][i] = h_eff * self.fy[i] - dy;
                    coeffs[2][i] = 2.0 * dy - h_eff * (f_new[i] + self.fy[i]);
                    for (row, d) in D.iter().enumerate() {
                        let mut acc = 0.0;
                        for s in 0..STAGES_EXT {
                            acc += d[s] * k[s][i];
                        }
                        coeffs[3 + row][i] = h_eff * acc;
                    }
                }

                let step = DenseStep {
                    t0: self.t,
                    h: h_eff,
                    y0: self.y,
                    y1: y_new,
                    local_error,
                    coeffs,
                };
                self.t = t_new;
                self.y = y_new;
                self.fy = f_new;
                return Ok(step);
            }
            h = h_eff * MIN_FACTOR.max(SAFETY * err_norm.powf(ERROR_EXPONENT));
            rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
        };
        let mut st = Stepper::new(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], tol);
        let end = 2.0 * std::f64::consts::PI;
        while st.time() < end {
            st.step(end).unwrap();
        }
        let y = st.state();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn dense_output_tracks_exponential() {
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
        };
        let mut st = Stepper::new(|_t, y: &[f64; 1]| [y[0]], 0.0, [1.0], tol);
        let mut worst: f64 = 0.0;
        while st.time() < 3.0 {
            let step = st.step(3.0).unwrap();
            for j in 0..=10 {
                let t = step.t0 + step.h * j as f64 / 10.0;
                worst = worst.max((step.eval(t)[0] - t.exp()).abs() / t.exp());
            }
        }
        assert!(worst < 1e-10, "dense output error {worst}");
    }
}
