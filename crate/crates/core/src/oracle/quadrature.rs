//! s-PQDs of Fock operators by quadrature of the characteristic function:
//! `W⁽ˢ⁾(z) = (1/(2π)²) ∫d²y Tr[M D(y)] e^{s|y|²/4} e^{−i zΩyᵀ}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::fock::{alpha_of, displacement_block, displacement_diagonal, displaced, squeezed_vacuum, thermal_state};
use super::grid::{radial_window, shell_maxima, CompensatedSum, PhaseGrid, TAIL_THRESHOLD};
use super::{FockOperator, OracleError};
use crate::linalg::{symplectic_form, RealMatrix};
use crate::measurements::{MeasurementKind, MeasurementModel, Outcome};

/// Largest accepted imaginary part of a Hermitian operator's s-PQD.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// A POVM element `w·I + F` with `F` a finite-rank Fock operator.
///
/// The identity is kept apart because its characteristic function `2π δ²(y)` has
/// no finite-grid representation; its s-PQD is exactly `w/(2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub identity_weight: f64,
    pub finite: FockOperator,
}

impl PovmElement {
    pub fn finite(op: FockOperator) -> Self {
        Self { identity_weight: 0.0, finite: op }
    }

    /// `I − F`.
    pub fn complement(op: FockOperator) -> Self {
        Self { identity_weight: 1.0, finite: op.scale(-1.0) }
    }

    /// The element as a truncated matrix.
    pub fn matrix(&self) -> FockOperator {
        &self.finite + &FockOperator::identity(self.finite.cutoff()).scale(self.identity_weight)
    }
}

/// `Tr[M D(y)]`.
pub fn characteristic(op: &FockOperator, y: [f64; 2]) -> Complex64 {
    let mut diag = Vec::new();
    characteristic_with(op, op.is_diagonal(), y, &mut diag)
}

fn characteristic_with(op: &FockOperator, diagonal: bool, y: [f64; 2], scratch: &mut Vec<f64>) -> Complex64 {
    let n = op.cutoff();
    let alpha = alpha_of(y);
    if diagonal {
        displacement_diagonal(alpha, n, scratch);
        let m = op.entries();
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for (k, &v) in scratch.iter().enumerate() {
            re.add(m[(k, k)].re * v);
            im.add(m[(k, k)].im * v);
        }
        return Complex64::new(re.value(), im.value());
    }
    let d = displacement_block(alpha, n, n);
    // Tr[M D] = Σ_{mn} M_{nm} D_{mn}
    let m = op.entries();
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for col in 0..n {
        for row in 0..n {
            let v = m[(col, row)] * d[(row, col)];
            re.add(v.re);
            im.add(v.im);
        }
    }
    Complex64::new(re.value(), im.value())
}

/// Windowed, weighted characteristic-function samples for one operator and ordering.
#[derive(Debug, Clone)]
pub struct SpqdQuadrature {
    nodes: Vec<f64>,
    /// `w_i w_j χ(y) e^{s|y|²/4} / (2π)²` inside the window, zero outside.
    samples: DMatrix<Complex64>,
    identity_term: f64,
    window_radius: f64,
}

impl SpqdQuadrature {
    pub fn new(element: &PovmElement, s: f64, grid: &PhaseGrid) -> Result<Self, OracleError> {
        if !(s < 1.0) {
            return Err(OracleError::Range(format!("characteristic quadrature needs s < 1, got {s}")));
        }
        let op = &element.finite;
        let diagonal = op.is_diagonal();
        let nodes = grid.nodes();
        let weights = grid.axis_weights();
        let n = nodes.len();
        let integrand: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map_init(Vec::new, |scratch, i| {
                (0..n)
                    .map(|j| {
                        let y = [nodes[i], nodes[j]];
                        let r2 = y[0] * y[0] + y[1] * y[1];
                        characteristic_with(op, diagonal, y, scratch) * (0.25 * s * r2).exp()
                    })
                    .collect()
            })
            .collect();

        let h = grid.step();
        let integrand = DMatrix::from_fn(n, n, |i, j| integrand[i][j]);
        let cut = radial_window(&nodes, h, &integrand).ok_or_else(|| {
            let smallest = shell_maxima(&nodes, h, &integrand).iter().skip(1).cloned().fold(f64::INFINITY, f64::min);
            OracleError::Convergence(format!(
                "characteristic integrand never falls below {TAIL_THRESHOLD:e} on the grid (half-width {}, s = {s}); smallest shell maximum {smallest:.3e}",
                grid.half_width()
            ))
        })?;
        let norm = 1.0 / (4.0 * PI * PI);
        let samples = DMatrix::from_fn(n, n, |i, j| {
            if nodes[i].hypot(nodes[j]) < cut {
                integrand[(i, j)] * (weights[i] * weights[j] * norm)
            } else {
                Complex64::ZERO
            }
        });
        Ok(Self {
            nodes,
            samples,
            identity_term: element.identity_weight / (2.0 * PI),
            window_radius: cut,
        })
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    /// `W⁽ˢ⁾(z)` with compensated summation.
    pub fn at(&self, z: [f64; 2]) -> Result<f64, OracleError> {
        let n = self.nodes.len();
        let inner: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, -z[0] * self.nodes[j]))
            .collect();
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for i in 0..n {
            let outer = Complex64::from_polar(1.0, z[1] * self.nodes[i]);
            for j in 0..n {
                let v = self.samples[(i, j)];
                if v != Complex64::ZERO {
                    let t = v * inner[j] * outer;
                    re.add(t.re);
                    im.add(t.im);
                }
            }
        }
        finish(Complex64::new(re.value(), im.value()), self.identity_term, z)
    }

    /// `W⁽ˢ⁾` on the product grid `z₁ ∈ xs`, `z₂ ∈ ps`, indexed `[(a, b)] = W(xs[a], ps[b])`.
    pub fn on_grid(&self, xs: &[f64], ps: &[f64]) -> Result<DMatrix<f64>, OracleError> {
        let n = self.nodes.len();
        let b = DMatrix::from_fn(xs.len(), n, |a, j| Complex64::from_polar(1.0, -xs[a] * self.nodes[j]));
        let at = DMatrix::from_fn(n, ps.len(), |i, c| Complex64::from_polar(1.0, ps[c] * self.nodes[i]));
        let values = b * self.samples.transpose() * at;
        let mut out = DMatrix::zeros(xs.len(), ps.len());
        for a in 0..xs.len() {
            for c in 0..ps.len() {
                out[(a, c)] = finish(values[(a, c)], self.identity_term, [xs[a], ps[c]])?;
            }
        }
        Ok(out)
    }
}

fn finish(v: Complex64, identity_term: f64, z: [f64; 2]) -> Result<f64, OracleError> {
    if v.im.abs() > IMAG_RESIDUE_TOL {
        return Err(OracleError::Convergence(format!(
            "imaginary residue {:.3e} at z = {z:?} exceeds {IMAG_RESIDUE_TOL:e}",
            v.im
        )));
    }
    Ok(v.re + identity_term)
}

/// `W⁽ˢ⁾(z) = Tr[M Δ⁽ˢ⁾(z)]` of a Fock operator by characteristic-function quadrature.
pub fn spqd_numeric(m: &FockOperator, s: f64, z: [f64; 2], grid: &PhaseGrid) -> Result<f64, OracleError> {
    SpqdQuadrature::new(&PovmElement::finite(m.clone()), s, grid)?.at(z)
}

/// Gaussian state with characteristic function `e^{−yΣyᵀ/4}`, for pure or isotropic `Σ`.
pub fn gaussian_seed(sigma: &RealMatrix, cutoff: usize) -> Result<FockOperator, OracleError> {
    let omega = symplectic_form(1).expect("one mode");
    // z-space covariance (times two)
    let p = omega.congruence(sigma);
    let (a, b, c) = (p.get(0, 0), p.get(0, 1), p.get(1, 1));
    if b.abs() < 1e-12 && (a - c).abs() < 1e-12 {
        return thermal_state((a - 1.0) / 2.0, cutoff);
    }
    let det = a * c - b * b;
    if (det - 1.0).abs() > 1e-9 {
        return Err(OracleError::Unsupported(format!(
            "Gaussian seed must be pure (det Σ = 1) or isotropic for the Fock oracle, got det Σ = {det}"
        )));
    }
    let half_trace = 0.5 * (a + c);
    let lambda_min = half_trace - (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let r = -0.5 * lambda_min.ln();
    let major = 0.5 * (2.0 * b).atan2(a - c);
    squeezed_vacuum(r, major + 0.5 * PI, cutoff)
}

/// Fock-space POVM element of a catalogue model.
pub fn povm_element(m: &MeasurementModel, outcome: Outcome, cutoff: usize) -> Result<PovmElement, OracleError> {
    let wrong = || OracleError::Unsupported(format!("outcome {outcome:?} does not belong to {}", m.label()));
    let binary = |no_click: FockOperator| match outcome {
        Outcome::NoClick => Ok(PovmElement::finite(no_click)),
        Outcome::Click => Ok(PovmElement::complement(no_click)),
        _ => Err(wrong()),
    };
    match m.kind() {
        MeasurementKind::IdealPd => binary(FockOperator::number_projector(0, cutoff)),
        MeasurementKind::RealisticPd { p_dark } => {
            binary(FockOperator::number_projector(0, cutoff).scale(1.0 - p_dark))
        }
        MeasurementKind::ThermalPd { nu } => binary(thermal_state((nu - 1.0) / 2.0, cutoff)?),
        MeasurementKind::Heterodyne | MeasurementKind::Gaussian { .. } => {
            let Outcome::Point(beta) = outcome else {
                return Err(wrong());
            };
            let sigma = match m.kind() {
                MeasurementKind::Gaussian { sigma } => sigma.clone(),
                _ => RealMatrix::identity(2),
            };
            let seed = gaussian_seed(&sigma, cutoff)?;
            Ok(PovmElement::finite(displaced(&seed, beta).scale(1.0 / (2.0 * PI))))
        }
        MeasurementKind::Homodyne { .. } => Err(OracleError::Unsupported(
            "quadrature projectors are not trace class; homodyne has no Fock-space element".into(),
        )),
    }
}
