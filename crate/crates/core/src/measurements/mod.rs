//! Single-mode measurement catalogue with closed-form s-ordered quasiprobability
//! distributions (s-PQDs), the maximal non-negative ordering `s̄`, and the
//! loss-based incompatibility bounds derived from it.
//!
//! Conventions: phase-space points `z = (z₁, z₂)` with ħ = 1. The s-PQD of a POVM
//! element `M` is `W⁽ˢ⁾(z) = Tr[M Δ⁽ˢ⁾(z)]`; for every model the outcome values
//! integrate (or sum) to `1/(2π)` at each `z`.

mod json;

pub use json::{parse_measurement, parse_measurement_list};

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::linalg::{check_psd, symplectic_form, RealMatrix, SYMMETRY_TOL};

/// Completeness constant `Tr Δ⁽ˢ⁾(z)` for one mode.
pub const TRACE_DELTA: f64 = 1.0 / (2.0 * PI);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("invalid measurement parameter: {0}")]
    Parameter(String),
    #[error("s-PQD of {model} diverges at s = {s}: requires s < {limit}")]
    Divergent { model: String, s: f64, limit: f64 },
    #[error("outcome {outcome:?} does not belong to {model}")]
    Outcome { model: String, outcome: Outcome },
}

/// Measurement outcome. Photo-detection models use `NoClick`/`Click`; for thermal
/// photo-detection `NoClick` denotes the thermal element `M_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    NoClick,
    Click,
    /// Phase-space outcome `β` of a Gaussian (incl. heterodyne) measurement.
    Point([f64; 2]),
    /// Quadrature value of a homodyne measurement.
    Quadrature(f64),
}

impl Outcome {
    pub fn label(&self) -> String {
        match self {
            Outcome::NoClick => "no_click".into(),
            Outcome::Click => "click".into(),
            Outcome::Point([a, b]) => format!("point:{a}:{b}"),
            Outcome::Quadrature(x) => format!("quadrature:{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementKind {
    /// Covariant Gaussian POVM `D(β) M_G D(β)† / 2π` with `Tr[M_G D(y)] = exp(−yΣyᵀ/4)`.
    Gaussian { sigma: RealMatrix },
    Heterodyne,
    /// Projective measurement of `x cos θ + p sin θ`.
    Homodyne { angle: f64 },
    IdealPd,
    RealisticPd { p_dark: f64 },
    ThermalPd { nu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    kind: MeasurementKind,
    label: String,
}

/// Largest ordering with non-negative s-PQDs for every outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingBound {
    pub s_bar: f64,
    /// Whether `s̄` itself is admissible (as a non-negative density or measure).
    pub attained: bool,
}

/// Loss-based degree of incompatibility `(1 − s̄)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompatibilityDegree {
    pub value: f64,
    /// `s̄ ∈ [0, 1]`, where the value is a measure; outside it is only an upper bound.
    pub gaussian_regime: bool,
}

impl MeasurementModel {
    pub fn gaussian(sigma: RealMatrix) -> Result<Self, MeasurementError> {
        if sigma.rows() != 2 || sigma.cols() != 2 || !sigma.is_symmetric(SYMMETRY_TOL) {
            return Err(MeasurementError::Parameter(
                "Gaussian seed Σ must be a symmetric 2x2 matrix".into(),
            ));
        }
        let omega = symplectic_form(1).expect("one mode");
        let report = check_psd(&sigma, &omega)
            .map_err(|e| MeasurementError::Parameter(e.to_string()))?;
        if !report.is_psd {
            return Err(MeasurementError::Parameter(format!(
                "Σ violates the uncertainty relation Σ + iΩ ≥ 0 (λ_min = {})",
                report.min_eigenvalue
            )));
        }
        Ok(Self::with_kind(MeasurementKind::Gaussian { sigma }))
    }

    pub fn heterodyne() -> Self {
        Self::with_kind(MeasurementKind::Heterodyne)
    }

    pub fn homodyne(angle: f64) -> Result<Self, MeasurementError> {
        if !angle.is_finite() {
            return Err(MeasurementError::Parameter("homodyne angle must be finite".into()));
        }
        Ok(Self::with_kind(MeasurementKind::Homodyne { angle }))
    }

    pub fn ideal_pd() -> Self {
        Self::with_kind(MeasurementKind::IdealPd)
    }

    pub fn realistic_pd(p_dark: f64) -> Result<Self, MeasurementError> {
        if !(0.0..=1.0).contains(&p_dark) {
            return Err(MeasurementError::Parameter(format!(
                "dark-count probability must lie in [0, 1], got {p_dark}"
            )));
        }
        Ok(Self::with_kind(MeasurementKind::RealisticPd { p_dark }))
    }

    pub fn thermal_pd(nu: f64) -> Result<Self, MeasurementError> {
        if !(nu >= 1.0) || !nu.is_finite() {
            return Err(MeasurementError::Parameter(format!(
                "thermal parameter ν must be finite and ≥ 1, got {nu}"
            )));
        }
        Ok(Self::with_kind(MeasurementKind::ThermalPd { nu }))
    }

    fn with_kind(kind: MeasurementKind) -> Self {
        let label = kind_name(&kind).to_string();
        Self { kind, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &MeasurementKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_binary(&self) -> bool {
        matches!(
            self.kind,
            MeasurementKind::IdealPd | MeasurementKind::RealisticPd { .. } | MeasurementKind::ThermalPd { .. }
        )
    }

    /// Representative outcomes for grid evaluations. Continuous-outcome models are
    /// translation covariant, so the origin outcome suffices.
    pub fn grid_outcomes(&self) -> Vec<Outcome> {
        match self.kind {
            MeasurementKind::Gaussian { .. } | MeasurementKind::Heterodyne => {
                vec![Outcome::Point([0.0, 0.0])]
            }
            MeasurementKind::Homodyne { .. } => vec![Outcome::Quadrature(0.0)],
            _ => vec![Outcome::NoClick, Outcome::Click],
        }
    }

    /// Seed covariance for Gaussian-type models.
    fn seed(&self) -> Option<RealMatrix> {
        match &self.kind {
            MeasurementKind::Gaussian { sigma } => Some(sigma.clone()),
            MeasurementKind::Heterodyne => Some(RealMatrix::identity(2)),
            _ => None,
        }
    }

    /// Strict upper limit on `s` for a finite s-PQD density.
    pub fn convergence_limit(&self) -> f64 {
        match &self.kind {
            MeasurementKind::Gaussian { sigma } => sigma.min_symmetric_eigenvalue(),
            MeasurementKind::Heterodyne => 1.0,
            MeasurementKind::Homodyne { .. } => 0.0,
            MeasurementKind::IdealPd | MeasurementKind::RealisticPd { .. } => 1.0,
            MeasurementKind::ThermalPd { nu } => *nu,
        }
    }

    fn no_click_weight(&self) -> Option<(f64, f64)> {
        // (prefactor, width parameter) of the Gaussian no-click element
        match self.kind {
            MeasurementKind::IdealPd => Some((1.0, 1.0)),
            MeasurementKind::RealisticPd { p_dark } => Some((1.0 - p_dark, 1.0)),
            MeasurementKind::ThermalPd { nu } => Some((1.0, nu)),
            _ => None,
        }
    }
}

impl fmt::Display for MeasurementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasurementKind::Gaussian { sigma } => write!(f, "{}[gaussian Σ={:?}]", self.label, sigma.to_rows()),
            MeasurementKind::Homodyne { angle } => write!(f, "{}[homodyne θ={angle}]", self.label),
            MeasurementKind::RealisticPd { p_dark } => write!(f, "{}[realistic_pd P_D={p_dark}]", self.label),
            MeasurementKind::ThermalPd { nu } => write!(f, "{}[thermal_pd ν={nu}]", self.label),
            other => write!(f, "{}[{}]", self.label, kind_name(other)),
        }
    }
}

pub(crate) fn kind_name(kind: &MeasurementKind) -> &'static str {
    match kind {
        MeasurementKind::Gaussian { .. } => "gaussian",
        MeasurementKind::Heterodyne => "heterodyne",
        MeasurementKind::Homodyne { .. } => "homodyne",
        MeasurementKind::IdealPd => "ideal_pd",
        MeasurementKind::RealisticPd { .. } => "realistic_pd",
        MeasurementKind::ThermalPd { .. } => "thermal_pd",
    }
}

/// The maximal ordering `s̄` for which every outcome s-PQD is non-negative.
pub fn max_nonneg_ordering(m: &MeasurementModel) -> OrderingBound {
    let s_bar = match &m.kind {
        MeasurementKind::Gaussian { sigma } => sigma.min_symmetric_eigenvalue(),
        MeasurementKind::Heterodyne => 1.0,
        MeasurementKind::Homodyne { .. } => 0.0,
        MeasurementKind::IdealPd => -1.0,
        MeasurementKind::RealisticPd { p_dark } => 1.0 - 2.0 * (1.0 - p_dark),
        MeasurementKind::ThermalPd { nu } => nu - 2.0,
    };
    OrderingBound { s_bar, attained: true }
}

/// Closed-form s-PQD `W⁽ˢ⁾(outcome | m, z)`.
pub fn spqd(m: &MeasurementModel, outcome: Outcome, s: f64, z: [f64; 2]) -> Result<f64, MeasurementError> {
    let limit = m.convergence_limit();
    if !(s < limit) {
        return Err(MeasurementError::Divergent { model: m.label.clone(), s, limit });
    }
    let r2 = z[0] * z[0] + z[1] * z[1];
    let wrong_outcome = || MeasurementError::Outcome { model: m.label.clone(), outcome };

    if let Some((weight, width)) = m.no_click_weight() {
        let no_click = weight * (-r2 / (width - s)).exp() / (PI * (width - s));
        return match outcome {
            Outcome::NoClick => Ok(no_click),
            Outcome::Click => Ok(TRACE_DELTA - no_click),
            _ => Err(wrong_outcome()),
        };
    }
    if let MeasurementKind::Homodyne { angle } = m.kind {
        let Outcome::Quadrature(x0) = outcome else {
            return Err(wrong_outcome());
        };
        let u = z[0] * angle.cos() + z[1] * angle.sin() - x0;
        // (1/2π)·N(u; variance −s/2)
        return Ok(TRACE_DELTA * (u * u / s).exp() / (-PI * s).sqrt());
    }
    let Outcome::Point(beta) = outcome else {
        return Err(wrong_outcome());
    };
    let sigma = m.seed().expect("Gaussian-type model");
    // Density of z − β has covariance (ΩΣΩᵀ − sI)/2.
    let omega = symplectic_form(1).expect("one mode");
    let cov = omega.congruence(&sigma).shifted(-s).scale(0.5);
    Ok(TRACE_DELTA * gaussian_density(&cov, [z[0] - beta[0], z[1] - beta[1]]))
}

fn gaussian_density(cov: &RealMatrix, w: [f64; 2]) -> f64 {
    let (a, b, c) = (cov.get(0, 0), cov.get(0, 1), cov.get(1, 1));
    let det = a * c - b * b;
    let quad = (c * w[0] * w[0] - 2.0 * b * w[0] * w[1] + a * w[1] * w[1]) / det;
    (-0.5 * quad).exp() / (2.0 * PI * det.sqrt())
}

/// Minimum over outcomes and a square `points × points` grid of half-width `half_width`.
pub fn grid_minimum(
    m: &MeasurementModel,
    s: f64,
    half_width: f64,
    points: usize,
) -> Result<f64, MeasurementError> {
    let step = if points > 1 { 2.0 * half_width / (points - 1) as f64 } else { 0.0 };
    let mut min = f64::INFINITY;
    for outcome in m.grid_outcomes() {
        for i in 0..points {
            for j in 0..points {
                let z = [-half_width + i as f64 * step, -half_width + j as f64 * step];
                min = min.min(spqd(m, outcome, s, z)?);
            }
        }
    }
    Ok(min)
}

/// `d = (1 − s̄)/2`, the loss-based incompatibility degree.
pub fn degree_of_incompatibility(s_bar: f64) -> IncompatibilityDegree {
    IncompatibilityDegree {
        value: (1.0 - s_bar) / 2.0,
        gaussian_regime: (0.0..=1.0).contains(&s_bar),
    }
}

/// Largest loss transmissivity (with excess noise `ε ≥ 0`) that certifiably breaks
/// incompatibility of measurements with non-negative `W⁽ˢ̄⁾`: `(s̄ + 2ε + 1)/2` clamped to `[0, 1]`.
pub fn loss_breaking_threshold(s_bar: f64, epsilon: f64) -> f64 {
    ((s_bar + 2.0 * epsilon + 1.0) / 2.0).clamp(0.0, 1.0)
}

/// Measurements with a non-negative P function (`s̄ ≥ 1`).
pub fn classicality(m: &MeasurementModel) -> bool {
    max_nonneg_ordering(m).s_bar >= 1.0
}
