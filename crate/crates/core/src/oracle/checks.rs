//! Cross-checks of the representation identities against direct Fock constructions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fock::{alpha_of, coherent_projector, delta_s, displacement_block, loss_dual};
use super::grid::{radial_window, CompensatedSum, PhaseGrid};
use super::quadrature::{povm_element, PovmElement, SpqdQuadrature};
use super::{FockOperator, OracleError, OracleReport};
use crate::measurements::{spqd, MeasurementModel, Outcome, TRACE_DELTA};

/// Relative size below which z-grid contributions are skipped in operator sums.
const NEGLIGIBLE_WEIGHT: f64 = 1e-17;

/// Gaussian envelope below which characteristic-picture terms are dropped.
const ENVELOPE_CUT: f64 = 1e-18;

/// `Tr[ρM]` directly against `(2π) ∫d²z W^(−s)(z|ρ) W^(s)(a|m, z)`.
pub fn born_pairing(
    rho: &FockOperator,
    m: &MeasurementModel,
    outcome: Outcome,
    s: f64,
    z_grid: &PhaseGrid,
    y_grid: &PhaseGrid,
) -> Result<OracleReport, OracleError> {
    let element = povm_element(m, outcome, rho.cutoff())?;
    let direct = element.matrix().expectation(rho).re;
    let state = SpqdQuadrature::new(&PovmElement::finite(rho.clone()), -s, y_grid)?;
    let nodes = z_grid.nodes();
    let weights = z_grid.axis_weights();
    let w_rho = state.on_grid(&nodes, &nodes)?;
    let mut acc = CompensatedSum::default();
    for (a, &x) in nodes.iter().enumerate() {
        for (b, &p) in nodes.iter().enumerate() {
            let w_m = spqd(m, outcome, s, [x, p])?;
            acc.add(weights[a] * weights[b] * w_rho[(a, b)] * w_m);
        }
    }
    Ok(OracleReport::new(
        format!("born pairing {} {} s={s}", m.label(), outcome.label()),
        2.0 * PI * acc.value(),
        direct,
    ))
}

/// Reconstructs a POVM element from its closed-form s-PQD,
/// `M = (2π) ∫d²z W⁽ˢ⁾(z) Δ^(−s)(−z)`, and reports the central-block Frobenius error.
///
/// For `s ≥ 0` the kernel `Δ^(−s)` is built directly in Fock space. For `s < 0` the
/// z-integral is carried out in the characteristic picture: the constant part of
/// `W⁽ˢ⁾` reconstructs a multiple of the identity exactly and the remainder is
/// Fourier transformed on the z grid and resummed against `D(y)` on the y grid.
pub fn reconstruct(
    m: &MeasurementModel,
    outcome: Outcome,
    s: f64,
    z_grid: &PhaseGrid,
    y_grid: &PhaseGrid,
    cutoff: usize,
) -> Result<OracleReport, OracleError> {
    let target = povm_element(m, outcome, cutoff)?.matrix();
    let rebuilt = if s >= 0.0 {
        reconstruct_direct(m, outcome, s, z_grid, cutoff)?
    } else {
        reconstruct_characteristic(m, outcome, s, z_grid, y_grid, cutoff)?
    };
    Ok(OracleReport::new(
        format!("reconstruction {} {} s={s}", m.label(), outcome.label()),
        rebuilt.central_distance(&target),
        0.0,
    ))
}

fn reconstruct_direct(
    m: &MeasurementModel,
    outcome: Outcome,
    s: f64,
    z_grid: &PhaseGrid,
    cutoff: usize,
) -> Result<FockOperator, OracleError> {
    let cells = z_grid.cells();
    let values: Vec<f64> = cells.iter().map(|(z, _)| spqd(m, outcome, s, *z)).collect::<Result<_, _>>()?;
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut sum = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    for ((z, w), v) in cells.iter().zip(values) {
        if v.abs() <= NEGLIGIBLE_WEIGHT * scale {
            continue;
        }
        let kernel = delta_s([-z[0], -z[1]], -s, cutoff)?;
        sum += kernel.entries() * Complex64::new(2.0 * PI * w * v, 0.0);
    }
    FockOperator::new(sum)
}

fn reconstruct_characteristic(
    m: &MeasurementModel,
    outcome: Outcome,
    s: f64,
    z_grid: &PhaseGrid,
    y_grid: &PhaseGrid,
    cutoff: usize,
) -> Result<FockOperator, OracleError> {
    // Split off the constant value of the s-PQD far from the origin.
    let far = 1e3 * z_grid.half_width();
    let constant = spqd(m, outcome, s, [far, far])?;
    let z_nodes = z_grid.nodes();
    let z_weights = z_grid.axis_weights();
    let y_nodes = y_grid.nodes();
    let y_weights = y_grid.axis_weights();
    let nz = z_nodes.len();
    let mut residual = DMatrix::<Complex64>::zeros(nz, nz);
    for a in 0..nz {
        for b in 0..nz {
            let v = spqd(m, outcome, s, [z_nodes[a], z_nodes[b]])? - constant;
            residual[(a, b)] = Complex64::new(v * z_weights[a] * z_weights[b], 0.0);
        }
    }
    // F(y) = ∫d²z R(z) e^{i zΩyᵀ} = Σ R(z) e^{i(z₁y₂ − z₂y₁)}, indexed [(i, j)] for y = (y_i, y_j)
    let ny = y_nodes.len();
    let left = DMatrix::from_fn(ny, nz, |i, b| Complex64::from_polar(1.0, -z_nodes[b] * y_nodes[i]));
    let right = DMatrix::from_fn(nz, ny, |a, j| Complex64::from_polar(1.0, z_nodes[a] * y_nodes[j]));
    let transform = left * residual.transpose() * right;
    // M = (2π)·c·I·(2π)/(2π) + (2π)/(2π)² Σ_y w(y) F(y) e^{−s|y|²/4} D(y)
    // The z-quadrature noise floor is amplified by e^{−s|y|²/4}; close the y window
    // where the integrand first drops below the tail threshold.
    let integrand = DMatrix::from_fn(ny, ny, |i, j| {
        let r2 = y_nodes[i] * y_nodes[i] + y_nodes[j] * y_nodes[j];
        transform[(i, j)] * (-0.25 * s * r2).exp()
    });
    let radius = radial_window(&y_nodes, y_grid.step(), &integrand).ok_or_else(|| {
        OracleError::Convergence(format!("reconstruction integrand does not decay on the y grid at s = {s}"))
    })?;
    let mut sum = DMatrix::<Complex64>::identity(cutoff, cutoff) * Complex64::new(2.0 * PI * constant, 0.0);
    let pref = 2.0 * PI / (4.0 * PI * PI);
    for i in 0..ny {
        for j in 0..ny {
            let y = [y_nodes[i], y_nodes[j]];
            if y[0].hypot(y[1]) >= radius {
                continue;
            }
            let coeff = integrand[(i, j)] * (pref * y_weights[i] * y_weights[j]);
            sum += displacement_block(alpha_of(y), cutoff, cutoff) * coeff;
        }
    }
    FockOperator::new(sum)
}

/// `∫d²z |z⟩⟨z|/(2π)` on the grid against the identity (central block).
pub fn heterodyne_resolution(z_grid: &PhaseGrid, cutoff: usize) -> Result<OracleReport, OracleError> {
    let mut sum = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    for (z, w) in z_grid.cells() {
        sum += delta_s(z, -1.0, cutoff)?.entries() * Complex64::new(w, 0.0);
    }
    let resolved = FockOperator::new(sum)?;
    Ok(OracleReport::new(
        "heterodyne resolution of the identity",
        resolved.central_distance_to_identity(),
        0.0,
    ))
}

/// Frobenius distance between `E*_loss(Δ^(1−2τ)(z))` and the rescaled heterodyne
/// element `(1/τ)|z/√τ⟩⟨z/√τ|/(2π)`.
///
/// For `τ ≥ 1/2` the kernel is built in Fock space and pushed through the Kraus
/// dual. For `τ < 1/2` the ordering is positive and the kernel is integrated in
/// the characteristic picture using `E*(D(y)) = D(√τ y) e^{−(1−τ)|y|²/4}`.
pub fn mother_heterodyne_check(
    tau: f64,
    z: [f64; 2],
    cutoff: usize,
    y_grid: &PhaseGrid,
) -> Result<OracleReport, OracleError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(OracleError::Range(format!("transmissivity must lie in (0, 1], got {tau}")));
    }
    let s = 1.0 - 2.0 * tau;
    let image = if s <= 0.0 {
        loss_dual(&delta_s(z, s, cutoff)?, tau)?
    } else {
        dual_kernel_by_quadrature(tau, s, z, cutoff, y_grid)?
    };
    let rt = tau.sqrt();
    let expected = coherent_projector([z[0] / rt, z[1] / rt], cutoff).scale(1.0 / (2.0 * PI * tau));
    Ok(OracleReport::new(
        format!("mother measurement τ={tau} z=({}, {})", z[0], z[1]),
        image.central_distance(&expected),
        0.0,
    ))
}

fn dual_kernel_by_quadrature(
    tau: f64,
    s: f64,
    z: [f64; 2],
    cutoff: usize,
    y_grid: &PhaseGrid,
) -> Result<FockOperator, OracleError> {
    // The envelope decays like e^{−τ|y|²/4}; widen the grid at fixed step until it
    // has fallen below the cut.
    let reach = (4.0 * ENVELOPE_CUT.ln().abs() / tau).sqrt();
    let grid = if reach > y_grid.half_width() {
        let half_steps = (reach / y_grid.step()).ceil() as usize;
        PhaseGrid::new(half_steps as f64 * y_grid.step(), 2 * half_steps + 1)?
    } else {
        *y_grid
    };
    let mut sum = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    let rt = tau.sqrt();
    let norm = 1.0 / (4.0 * PI * PI);
    for (y, w) in grid.cells() {
        let r2 = y[0] * y[0] + y[1] * y[1];
        let envelope = (0.25 * (s - (1.0 - tau)) * r2).exp();
        if envelope < ENVELOPE_CUT {
            continue;
        }
        let phase = Complex64::from_polar(norm * w * envelope, -(z[0] * y[1] - z[1] * y[0]));
        sum += displacement_block(alpha_of([rt * y[0], rt * y[1]]), cutoff, cutoff) * phase;
    }
    FockOperator::new(sum)
}

/// Smallest central-block eigenvalue of `E*_loss(Δ^(2τ−1)(z))`, which is a
/// positive operator for `τ ≤ 1/2`.
pub fn positivity_transfer(tau: f64, z: [f64; 2], cutoff: usize) -> Result<f64, OracleError> {
    if !(tau > 0.0 && tau <= 0.5) {
        return Err(OracleError::Range(format!("positivity transfer needs 0 < τ ≤ 1/2, got {tau}")));
    }
    Ok(loss_dual(&delta_s(z, 2.0 * tau - 1.0, cutoff)?, tau)?.central_min_eigenvalue())
}

/// Compares `W⁽ˢ⁾` with the Gaussian smoothing of `W^(s_big)`,
/// `W⁽ˢ⁾(z) = ∫d²u W^(s_big)(z − u) e^{−|u|²/δ}/(πδ)` with `δ = s_big − s`.
/// Reports the largest deviation over `eval_points`.
pub fn convolution_check(
    s: f64,
    s_big: f64,
    z_grid: &PhaseGrid,
    eval_points: &[[f64; 2]],
    m: &MeasurementModel,
    outcome: Outcome,
) -> Result<OracleReport, OracleError> {
    if !(s <= s_big) {
        return Err(OracleError::Range(format!("convolution needs s ≤ s_big, got {s} > {s_big}")));
    }
    let delta = s_big - s;
    let cells = z_grid.cells();
    let mut worst = 0.0f64;
    for &z in eval_points {
        let direct = spqd(m, outcome, s, z)?;
        let smoothed = if delta == 0.0 {
            spqd(m, outcome, s_big, z)?
        } else {
            let kernel_reach = (delta * 16.0 * 10f64.ln()).sqrt();
            if z[0].abs().max(z[1].abs()) + kernel_reach > z_grid.half_width() {
                return Err(OracleError::Convergence(format!(
                    "smoothing kernel of width {delta} around {z:?} leaves the grid"
                )));
            }
            let mut acc = CompensatedSum::default();
            for (u, w) in &cells {
                let r2 = u[0] * u[0] + u[1] * u[1];
                let k = (-r2 / delta).exp() / (PI * delta);
                if k == 0.0 {
                    continue;
                }
                acc.add(w * k * spqd(m, outcome, s_big, [z[0] - u[0], z[1] - u[1]])?);
            }
            acc.value()
        };
        worst = worst.max((direct - smoothed).abs());
    }
    Ok(OracleReport::new(
        format!("convolution {} {} s={s} from s={s_big}", m.label(), outcome.label()),
        worst,
        0.0,
    ))
}

/// Largest deviation between the closed-form s-PQD and the quadrature value.
pub fn closed_form_match(
    m: &MeasurementModel,
    outcome: Outcome,
    s: f64,
    points: &[[f64; 2]],
    cutoff: usize,
    y_grid: &PhaseGrid,
) -> Result<OracleReport, OracleError> {
    let q = SpqdQuadrature::new(&povm_element(m, outcome, cutoff)?, s, y_grid)?;
    let mut worst = 0.0f64;
    for &z in points {
        worst = worst.max((q.at(z)? - spqd(m, outcome, s, z)?).abs());
    }
    Ok(OracleReport::new(
        format!("closed form {} {} s={s}", m.label(), outcome.label()),
        worst,
        0.0,
    ))
}

/// Sum of the outcome s-PQDs of a binary model at `z`, against `1/(2π)`.
pub fn completeness(m: &MeasurementModel, s: f64, z: [f64; 2]) -> Result<OracleReport, OracleError> {
    let total = spqd(m, Outcome::NoClick, s, z)? + spqd(m, Outcome::Click, s, z)?;
    Ok(OracleReport::new(format!("completeness {} s={s}", m.label()), total, TRACE_DELTA))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::thermal_state;

    #[test]
    fn born_pairing_thermal_no_click() {
        let rho = thermal_state(1.0, 40).unwrap();
        let m = MeasurementModel::realistic_pd(0.25).unwrap();
        let z = PhaseGrid::new(10.0, 201).unwrap();
        let r = born_pairing(&rho, &m, Outcome::NoClick, 0.0, &z, &PhaseGrid::y_default()).unwrap();
        assert!((r.reference - 0.375).abs() < 1e-12);
        assert!(r.abs_error < 1e-6, "{r:?}");
    }

    #[test]
    fn mother_measurement_at_half_loss() {
        let r = mother_heterodyne_check(0.5, [1.0, 0.0], 30, &PhaseGrid::y_default()).unwrap();
        assert!(r.abs_error < 1e-6, "{r:?}");
        let r = mother_heterodyne_check(1.0, [0.0, 0.0], 30, &PhaseGrid::y_default()).unwrap();
        assert!(r.abs_error < 1e-12, "{r:?}");
    }

    #[test]
    fn mother_measurement_by_quadrature() {
        let r = mother_heterodyne_check(0.3, [0.5, -0.2], 20, &PhaseGrid::y_default()).unwrap();
        assert!(r.abs_error < 1e-6, "{r:?}");
    }

    #[test]
    fn positivity_transfer_examples() {
        for tau in [0.2, 0.5] {
            assert!(positivity_transfer(tau, [1.0, 1.0], 30).unwrap() >= -1e-8);
        }
        assert!(positivity_transfer(0.7, [0.0, 0.0], 30).is_err());
    }

    #[test]
    fn zero_width_convolution_is_exact() {
        let m = MeasurementModel::ideal_pd();
        let g = PhaseGrid::new(8.0, 161).unwrap();
        let r = convolution_check(-0.5, -0.5, &g, &[[0.3, 0.2]], &m, Outcome::NoClick).unwrap();
        assert!(r.abs_error <= 1e-12);
    }
}
