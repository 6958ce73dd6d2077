//! Numerical ground truth in a truncated Fock space.
//!
//! Everything here is built independently of the closed forms in
//! [`crate::measurements`]: POVM elements and kernels are explicit matrices, and
//! s-PQDs come from quadrature of characteristic functions. The battery in
//! [`battery`] compares the two.

pub mod battery;
mod checks;
mod fock;
mod grid;
mod quadrature;

pub use battery::{run_battery, BatteryConfig, BatteryItem, CheckOutcome, ItemKind};
pub use checks::{
    born_pairing, closed_form_match, completeness, convolution_check, heterodyne_resolution,
    mother_heterodyne_check, positivity_transfer, reconstruct,
};
pub use fock::{
    alpha_of, coherent_ket, coherent_projector, delta_s, displaced, displacement, loss_dual,
    squeezed_vacuum, thermal_state, FockOperator, EDGE_LEVELS, TAIL_MASS_TOL,
};
pub use grid::{radial_window, CompensatedSum, PhaseGrid, TAIL_THRESHOLD};
pub use quadrature::{
    characteristic, gaussian_seed, povm_element, spqd_numeric, PovmElement, SpqdQuadrature,
    IMAG_RESIDUE_TOL,
};

use thiserror::Error;

use crate::measurements::MeasurementError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("out of range: {0}")]
    Range(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("truncation too coarse: {0}")]
    Truncation(String),
    #[error("not supported by the Fock oracle: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
}

/// One numeric comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub numeric: f64,
    pub reference: f64,
    pub abs_error: f64,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, numeric: f64, reference: f64) -> Self {
        Self { quantity: quantity.into(), numeric, reference, abs_error: (numeric - reference).abs() }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.abs_error <= tol
    }
}
