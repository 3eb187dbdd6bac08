//! Numerical study of least-energy nodal radial solutions of the Lane-Emden
//! problem `-Δu = |u|^{p-1}u` on the unit disk as `p -> ∞`.

pub mod asymptotics;
pub mod config;
pub mod disk_green;
pub mod error;
pub mod limit_profiles;
pub mod nodal_solver;
pub mod quadrature;
pub mod radial_ode;
pub mod report;
pub mod roots;

pub use error::{Error, Result};
