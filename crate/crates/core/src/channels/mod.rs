//! Bosonic Gaussian channels described by their `(T, N, d)` data.
//!
//! The dual action on displacement operators is
//! `E*(D(y)) = D(yT) · exp(−yNyᵀ/4 − i dΩyᵀ)` with row vectors `y`, and a
//! channel is completely positive iff `N + iΩ − iTΩTᵀ ≥ 0`. Validation happens
//! once at construction, so every [`GaussianChannel`] value is a CP map.

mod catalogue;
mod entanglement;
mod json;

pub use catalogue::{from_class, ChannelClass, ChannelTag};
pub use entanglement::{
    default_nu_grid, eb_sufficient, eb_sufficient_report, eb_tms_scan, partial_transpose_test,
    tms_after_channel, tms_after_channel_generic, tms_covariance, EbReport, DEFAULT_NU_MAX,
    DEFAULT_NU_POINTS,
};
pub use json::parse_channel;

use thiserror::Error;

use crate::linalg::{
    hermitian_combine, psd_report, symplectic_form, LinalgError, PsdReport, RealMatrix,
    SYMMETRY_TOL,
};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("channel is not completely positive: N + iΩ − iTΩTᵀ has eigenvalue {}", .0.min_eigenvalue)]
    NotCompletelyPositive(Box<PsdReport>),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("mode mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),
}

/// A validated Gaussian channel on `modes` bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    modes: usize,
    transfer: RealMatrix,
    noise: RealMatrix,
    displacement: Vec<f64>,
}

impl GaussianChannel {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// The matrix `T`.
    pub fn transfer(&self) -> &RealMatrix {
        &self.transfer
    }

    /// The matrix `N`.
    pub fn noise(&self) -> &RealMatrix {
        &self.noise
    }

    /// The displacement `d`. It never enters a positivity criterion.
    pub fn displacement(&self) -> &[f64] {
        &self.displacement
    }

    pub fn symplectic_form(&self) -> RealMatrix {
        symplectic_form(self.modes).expect("modes >= 1 by construction")
    }

    /// `TΩTᵀ`, the antisymmetric part shared by all criteria.
    pub fn twisted_form(&self) -> RealMatrix {
        self.transfer.congruence(&self.symplectic_form())
    }

    /// PSD report of the complete-positivity matrix `N + iΩ − iTΩTᵀ`.
    pub fn cp_report(&self) -> PsdReport {
        cp_report(&self.noise, &self.symplectic_form(), &self.twisted_form())
            .expect("shapes validated at construction")
    }

    pub fn identity(modes: usize) -> Result<Self, ChannelError> {
        let dim = 2 * modes;
        make_channel(
            modes,
            RealMatrix::identity(dim),
            RealMatrix::zeros(dim, dim),
            vec![0.0; dim],
        )
    }
}

fn cp_report(
    noise: &RealMatrix,
    omega: &RealMatrix,
    twisted: &RealMatrix,
) -> Result<PsdReport, LinalgError> {
    Ok(psd_report(&hermitian_combine(noise, &(omega - twisted))?))
}

/// Validates `(T, N, d)` and returns the channel, or the CP witness on failure.
pub fn make_channel(
    modes: usize,
    transfer: RealMatrix,
    noise: RealMatrix,
    displacement: Vec<f64>,
) -> Result<GaussianChannel, ChannelError> {
    let omega = symplectic_form(modes)?;
    let dim = 2 * modes;
    transfer.require_square(dim, "T")?;
    noise.require_square(dim, "N")?;
    if displacement.len() != dim {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("d of length {dim}"),
            found: format!("length {}", displacement.len()),
        }
        .into());
    }
    if displacement.iter().any(|v| !v.is_finite()) {
        return Err(ChannelError::ParameterRange("d has non-finite entries".into()));
    }
    let asym = noise.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(LinalgError::Symmetry { kind: "symmetric", deviation: asym }.into());
    }
    let report = cp_report(&noise, &omega, &transfer.congruence(&omega))?;
    if !report.is_psd {
        return Err(ChannelError::NotCompletelyPositive(Box::new(report)));
    }
    Ok(GaussianChannel { modes, transfer, noise, displacement })
}

/// Thermal-loss channel with excess noise:
/// `T = √τ I`, `N = (1 − τ + 2ε) I`.
pub fn loss_with_excess(tau: f64, epsilon: f64) -> Result<GaussianChannel, ChannelError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(ChannelError::ParameterRange(format!(
            "transmissivity must lie in (0, 1], got {tau}"
        )));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(ChannelError::ParameterRange(format!(
            "excess noise must be finite and non-negative, got {epsilon}"
        )));
    }
    make_channel(
        1,
        RealMatrix::identity(2).scale(tau.sqrt()),
        RealMatrix::identity(2).scale(1.0 - tau + 2.0 * epsilon),
        vec![0.0; 2],
    )
}

/// Schrödinger-order composition `second ∘ first` (apply `first`, then `second`).
///
/// Chaining the dual action gives `T = T₂T₁`, `N = N₂ + T₂N₁T₂ᵀ` and
/// `d = d₂ + d₁ΩT₂ᵀΩᵀ`.
pub fn compose(
    first: &GaussianChannel,
    second: &GaussianChannel,
) -> Result<GaussianChannel, ChannelError> {
    if first.modes != second.modes {
        return Err(ChannelError::ModeMismatch(first.modes, second.modes));
    }
    let t2 = &second.transfer;
    let transfer = t2 * &first.transfer;
    let noise = &second.noise + &t2.congruence(&first.noise);
    let omega = first.symplectic_form();
    let map = &(&omega * &t2.transpose()) * &omega.transpose();
    let dim = 2 * first.modes;
    let displacement = (0..dim)
        .map(|j| {
            second.displacement[j]
                + (0..dim)
                    .map(|i| first.displacement[i] * map.get(i, j))
                    .sum::<f64>()
        })
        .collect();
    // Round-off can leave N₂ + T₂N₁T₂ᵀ asymmetric at the 1e-16 level.
    let noise = (&noise + &noise.transpose()).scale(0.5);
    make_channel(first.modes, transfer, noise, displacement)
}
