//! Closed-form limit objects: the regular Liouville bubble `U`, the singular
//! profile `Z_l`, the master constant `t̄` and the limit constants derived
//! from it.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_upper, QuadConfig, UpperLimit};
use crate::roots::newton_bisect;

fn sqrt_e() -> f64 {
    E.sqrt()
}

/// `2 sqrt(e) ln t + t`, whose unique positive root is `t̄`.
pub fn tbar_equation(t: f64) -> f64 {
    2.0 * sqrt_e() * t.ln() + t
}

/// Root of `2 sqrt(e) ln t + t = 0`, bracketed on `[0.5, 1]`.
pub fn solve_tbar(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    newton_bisect(tbar_equation, |t| 2.0 * sqrt_e() / t + 1.0, 0.5, 1.0, tolerance)
}

/// Every limit value of the large-exponent analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub tbar: f64,
    pub alpha: f64,
    pub l: f64,
    pub beta: f64,
    /// Limit of `||u_p^+||_inf`.
    pub u_inf: f64,
    /// Limit of `r_p^{2/(p-1)}`.
    pub r_inf: f64,
    /// Limit of `||u_p^-||_inf`.
    pub m_minus: f64,
    /// Limit of `p ∫ |∇u_p|^2`.
    pub e_inf: f64,
    /// Coefficient of the Green-function limit `p u_p -> gamma log|x|`.
    pub gamma: f64,
}

/// Named residual of one defining identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub residual: f64,
}

/// Populate every constant from `t̄`.
pub fn derive_constants(tbar: f64) -> Result<AsymptoticConstants> {
    if !(tbar > 0.0 && tbar < 1.0) {
        return Err(Error::InvalidInput(format!("tbar = {tbar} outside (0, 1)")));
    }
    let se = sqrt_e();
    let alpha = 2.0 + 4.0 * se / tbar;
    let l = ((alpha * alpha - 4.0) / 2.0).sqrt();
    let beta = ((alpha + 2.0) / (alpha - 2.0)).powf(1.0 / alpha) * l;
    let u_inf = (2.0 / (alpha + 2.0)).exp();
    let r_inf = tbar / u_inf;
    let m_minus = se / tbar * u_inf;
    let e_inf = 8.0 * PI * (tbar / (tbar + se)).exp() * (E / (tbar * tbar) + 1.0 + 2.0 * se / tbar);
    let gamma = (4.0 + 12.0 * se / tbar) * u_inf;
    Ok(AsymptoticConstants {
        tbar,
        alpha,
        l,
        beta,
        u_inf,
        r_inf,
        m_minus,
        e_inf,
        gamma,
    })
}

impl AsymptoticConstants {
    /// Solve for `t̄` to `1e-14` and derive the rest.
    pub fn compute() -> Result<Self> {
        derive_constants(solve_tbar(1e-14)?)
    }

    /// `(α + 2) u_inf = 2 α u_inf - 4 sqrt(e) / r_inf`: the limit of
    /// `-p u_p'(1)`, hence the coefficient in `p u_p -> -(α + 2) u_inf ln r`.
    pub fn boundary_flux(&self) -> f64 {
        (self.alpha + 2.0) * self.u_inf
    }

    pub fn singular_params(&self) -> SingularProfileParams {
        SingularProfileParams {
            l: self.l,
            alpha: self.alpha,
            beta: self.beta,
            h_magnitude: self.alpha - 2.0,
            h_sign: MassSign::Negative,
        }
    }

    /// Residuals of the defining identities, each evaluated along a route
    /// different from the one used to populate the field.
    pub fn identity_residuals(&self) -> Vec<IdentityResidual> {
        let se = sqrt_e();
        let t = self.tbar;
        let a = self.alpha;
        let mk = |name: &str, residual: f64| IdentityResidual {
            name: name.to_string(),
            residual: residual.abs(),
        };
        vec![
            mk("tbar equation 2 sqrt(e) ln t + t", tbar_equation(t)),
            mk("alpha - (2 + 4 sqrt(e)/tbar)", a - (2.0 + 4.0 * se / t)),
            mk("alpha - sqrt(2 l^2 + 4)", a - (2.0 * self.l * self.l + 4.0).sqrt()),
            mk(
                "beta - ((alpha+2)/(alpha-2))^(1/alpha) l",
                self.beta - ((a + 2.0) / (a - 2.0)).powf(1.0 / a) * self.l,
            ),
            mk(
                "e^(2/(alpha+2)) - e^(tbar/(2(tbar+sqrt e)))",
                (2.0 / (a + 2.0)).exp() - (t / (2.0 * (t + se))).exp(),
            ),
            mk("r_inf u_inf - tbar", self.r_inf * self.u_inf - t),
            mk(
                "m_minus - (sqrt e/tbar) e^(tbar/(2(tbar+sqrt e)))",
                self.m_minus - se / t * (t / (2.0 * (t + se))).exp(),
            ),
            mk(
                "e_inf - (8 pi e/r_inf^2 + 4 pi alpha u_inf^2)",
                (self.e_inf - (8.0 * PI * E / self.r_inf.powi(2) + 4.0 * PI * a * self.u_inf.powi(2)))
                    / self.e_inf,
            ),
            mk(
                "gamma - (4 sqrt(e)/r_inf + 2 alpha u_inf)",
                (self.gamma - (4.0 * se / self.r_inf + 2.0 * a * self.u_inf)) / self.gamma,
            ),
            mk(
                "1 + (1/2) ln(r_inf u_inf) (alpha - 2)",
                1.0 + 0.5 * (self.r_inf * self.u_inf).ln() * (a - 2.0),
            ),
            mk(
                "4 sqrt(e)/r_inf - u_inf (alpha - 2)",
                4.0 * se / self.r_inf - self.u_inf * (a - 2.0),
            ),
            mk(
                "(alpha+2) u_inf - (2 alpha u_inf - 4 sqrt(e)/r_inf)",
                self.boundary_flux() - (2.0 * a * self.u_inf - 4.0 * se / self.r_inf),
            ),
        ]
    }
}

/// Sign attached to the point-mass strength of the singular problem.
///
/// The magnitude `∫_0^l e^{Z_l} s ds = alpha - 2` is unambiguous; the sign
/// convention differs between statements, so both are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MassSign {
    #[default]
    Negative,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularProfileParams {
    pub l: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `∫_0^l e^{Z_l(s)} s ds`, always positive.
    pub h_magnitude: f64,
    pub h_sign: MassSign,
}

impl SingularProfileParams {
    /// Parameters for a peak at radius `l > 0`.
    pub fn from_peak_radius(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidInput(format!("peak radius must be positive, got {l}")));
        }
        let alpha = (2.0 * l * l + 4.0).sqrt();
        let beta = ((alpha + 2.0) / (alpha - 2.0)).powf(1.0 / alpha) * l;
        Ok(Self {
            l,
            alpha,
            beta,
            h_magnitude: alpha - 2.0,
            h_sign: MassSign::Negative,
        })
    }

    /// Signed point-mass strength.
    pub fn h_mass(&self) -> f64 {
        match self.h_sign {
            MassSign::Negative => -self.h_magnitude,
            MassSign::Positive => self.h_magnitude,
        }
    }

    /// `ln(1 + (r/beta)^alpha)` without overflow.
    fn ln1p_ratio(&self, r: f64) -> f64 {
        let lq = self.alpha * (r / self.beta).ln();
        if lq > 0.0 {
            lq + (-lq).exp().ln_1p()
        } else {
            lq.exp().ln_1p()
        }
    }

    /// `(r/beta)^alpha / (1 + (r/beta)^alpha)`.
    fn saturation(&self, r: f64) -> f64 {
        let lq = self.alpha * (r / self.beta).ln();
        1.0 / (1.0 + (-lq).exp())
    }

    /// Closed-form `Z_l'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        ((self.alpha - 2.0) - 2.0 * self.alpha * self.saturation(r)) / r
    }

    /// Closed-form antiderivative of `s e^{Z_l(s)}`, vanishing at infinity.
    pub fn mass_antiderivative(&self, s: f64) -> f64 {
        -2.0 * self.alpha * (1.0 - self.saturation(s))
    }
}

/// `U(r) = -2 ln(1 + r^2/8)`.
pub fn eval_regular_profile(r: f64) -> f64 {
    -2.0 * (r * r / 8.0).ln_1p()
}

/// `U'(r)`.
pub fn regular_profile_derivative(r: f64) -> f64 {
    -(r / 2.0) / (1.0 + r * r / 8.0)
}

/// `Z_l(r) = ln(2 alpha^2 beta^alpha r^{alpha-2} / (beta^alpha + r^alpha)^2)`.
pub fn eval_singular_profile(params: &SingularProfileParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "singular profile is undefined at r = {r}"
        )));
    }
    let a = params.alpha;
    Ok((2.0 * a * a).ln() + (a - 2.0) * r.ln() - a * params.beta.ln() - 2.0 * params.ln1p_ratio(r))
}

/// `∫_a^b e^{Z_l(s)} s ds` by adaptive quadrature.
pub fn profile_mass(params: &SingularProfileParams, a: f64, b: UpperLimit) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::InvalidInput(format!("lower limit {a} is negative")));
    }
    if let UpperLimit::Finite(b) = b {
        if !(b > a) {
            return Err(Error::InvalidInput(format!("empty range [{a}, {b}]")));
        }
    }
    let integrand = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            eval_singular_profile(params, s).map(|z| z.exp() * s).unwrap_or(0.0)
        }
    };
    let cfg = QuadConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-13,
        max_panels: 20_000,
    };
    // Panels split at the peak radius where the integrand changes character.
    let v = match b {
        UpperLimit::Finite(b) if a < params.l && params.l < b => {
            integrate_upper(integrand, a, UpperLimit::Finite(params.l), params.l, cfg)?.value
                + integrate_upper(integrand, params.l, UpperLimit::Finite(b), params.l, cfg)?.value
        }
        UpperLimit::Unbounded if a < params.l => {
            integrate_upper(integrand, a, UpperLimit::Finite(params.l), params.l, cfg)?.value
                + integrate_upper(integrand, params.l, b, params.beta.max(params.l), cfg)?.value
        }
        _ => integrate_upper(integrand, a, b, params.beta.max(params.l), cfg)?.value,
    };
    Ok(v)
}
