//! Truncated Fock-space operators.
//!
//! Phase-space points map to coherent amplitudes through `α = (z₁ + i z₂)/√2`,
//! so `D(z) = exp(αa† − α*a)` and `|z|² = 2|α|²`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::OracleError;
use crate::linalg::{min_eigenvalue, HermitianMatrix};

/// Number of top Fock levels excluded from central-block comparisons.
pub const EDGE_LEVELS: usize = 5;

/// Largest tolerated thermal/squeezed population beyond the cutoff.
pub const TAIL_MASS_TOL: f64 = 1e-12;

const LN_FACTORIAL_TABLE: usize = 8192;

pub(crate) fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    });
    table[n]
}

pub fn alpha_of(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1]) / 2f64.sqrt()
}

/// A `D × D` complex matrix on the truncated Fock space `span{|0⟩, …, |D−1⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, OracleError> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(OracleError::Range(format!(
                "Fock operator must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(OracleError::Range("Fock operator has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self { entries: DMatrix::zeros(cutoff, cutoff) }
    }

    pub fn identity(cutoff: usize) -> Self {
        Self { entries: DMatrix::identity(cutoff, cutoff) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self { entries: DMatrix::from_fn(n, n, |i, j| if i == j { diag[i].into() } else { Complex64::ZERO }) }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(ket: &DVector<Complex64>) -> Self {
        Self { entries: ket * ket.adjoint() }
    }

    /// `|n⟩⟨n|`.
    pub fn number_projector(n: usize, cutoff: usize) -> Self {
        let mut diag = vec![0.0; cutoff];
        diag[n] = 1.0;
        Self::from_diagonal(&diag)
    }

    pub fn cutoff(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { entries: self.entries.map(|v| v * factor) }
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.cutoff();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == Complex64::ZERO))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.entries.diagonal().iter().copied().collect()
    }

    /// Largest entry of `A − A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Top-left `(D − EDGE_LEVELS)²` block.
    pub fn central_block(&self) -> DMatrix<Complex64> {
        let k = self.cutoff().saturating_sub(EDGE_LEVELS).max(1);
        self.entries.view((0, 0), (k, k)).into_owned()
    }

    /// Frobenius distance on the central block.
    pub fn central_distance(&self, other: &FockOperator) -> f64 {
        (self.central_block() - other.central_block()).norm()
    }

    /// Frobenius distance of the central block to `I`.
    pub fn central_distance_to_identity(&self) -> f64 {
        let c = self.central_block();
        let n = c.nrows();
        (c - DMatrix::<Complex64>::identity(n, n)).norm()
    }

    /// Smallest eigenvalue of the Hermitian part of the central block.
    pub fn central_min_eigenvalue(&self) -> f64 {
        let c = self.central_block();
        let h = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        let h = HermitianMatrix::new(h).expect("symmetrised block is Hermitian");
        min_eigenvalue(&h, 0.0).min_eigenvalue
    }

    /// `Tr[ρ A]`.
    pub fn expectation(&self, rho: &FockOperator) -> Complex64 {
        (&rho.entries * &self.entries).trace()
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries - &rhs.entries }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries * &rhs.entries }
    }
}

/// `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`.
///
/// Uses the associated-Laguerre closed form, with the normalisation
/// `sqrt(n!/(n+k)!) |α|^k e^{−|α|²/2}` folded into the three-term recurrence so
/// every intermediate stays bounded by one.
pub(crate) fn displacement_block(alpha: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(rows, cols);
    let x = alpha.norm_sqr();
    if x == 0.0 {
        for i in 0..rows.min(cols) {
            d[(i, i)] = Complex64::ONE;
        }
        return d;
    }
    let (r, phi) = (alpha.norm(), alpha.arg());
    let mut ell = Vec::with_capacity(rows.max(cols));
    for k in 0..rows.max(cols) {
        // diagonal k: entries (j + k, j) below and (j, j + k) above
        let len = (rows.saturating_sub(k)).min(cols).max(cols.saturating_sub(k).min(rows));
        if len == 0 {
            continue;
        }
        laguerre_scaled(k, x, r, len, &mut ell);
        let kf = k as f64;
        let below = Complex64::from_polar(1.0, kf * phi);
        let above = Complex64::from_polar(if k % 2 == 0 { 1.0 } else { -1.0 }, -kf * phi);
        for (j, &v) in ell.iter().enumerate() {
            if j + k < rows && j < cols {
                d[(j + k, j)] = below * v;
            }
            if k > 0 && j < rows && j + k < cols {
                d[(j, j + k)] = above * v;
            }
        }
    }
    d
}

/// `ℓ_j = sqrt(j!/(j+k)!) r^k e^{−x/2} L_j^{(k)}(x)` for `j < len`, `x = r²`.
fn laguerre_scaled(k: usize, x: f64, r: f64, len: usize, out: &mut Vec<f64>) {
    out.clear();
    let kf = k as f64;
    let l0 = (kf * r.ln() - 0.5 * x - 0.5 * ln_factorial(k)).exp();
    out.push(l0);
    if len == 1 {
        return;
    }
    out.push(l0 * (1.0 + kf - x) / (1.0 + kf).sqrt());
    for j in 1..len - 1 {
        let jf = j as f64;
        let a = (2.0 * jf + 1.0 + kf - x) / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
        let b = (jf * (jf + kf) / ((jf + 1.0) * (jf + 1.0 + kf))).sqrt();
        let next = a * out[j] - b * out[j - 1];
        out.push(next);
    }
}

/// `⟨n|D(α)|n⟩ = e^{−|α|²/2} L_n(|α|²)` for `n < len`.
pub(crate) fn displacement_diagonal(alpha: Complex64, len: usize, out: &mut Vec<f64>) {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        out.clear();
        out.resize(len, 1.0);
        return;
    }
    laguerre_scaled(0, x, alpha.norm(), len, out);
}

/// `D(α)` truncated to `cutoff` levels.
pub fn displacement(alpha: Complex64, cutoff: usize) -> Result<FockOperator, OracleError> {
    require_cutoff(cutoff)?;
    FockOperator::new(displacement_block(alpha, cutoff, cutoff))
}

fn require_cutoff(cutoff: usize) -> Result<(), OracleError> {
    if cutoff < 2 || cutoff >= LN_FACTORIAL_TABLE / 2 {
        return Err(OracleError::Range(format!("cutoff must lie in [2, {}), got {cutoff}", LN_FACTORIAL_TABLE / 2)));
    }
    Ok(())
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!`.
pub fn coherent_ket(alpha: Complex64, cutoff: usize) -> DVector<Complex64> {
    let x = alpha.norm_sqr();
    DVector::from_fn(cutoff, |n, _| {
        if n == 0 {
            return Complex64::new((-0.5 * x).exp(), 0.0);
        }
        if x == 0.0 {
            return Complex64::ZERO;
        }
        let mag = (n as f64 * alpha.norm().ln() - 0.5 * x - 0.5 * ln_factorial(n)).exp();
        Complex64::from_polar(mag, n as f64 * alpha.arg())
    })
}

/// `|z⟩⟨z|` for the phase-space point `z`.
pub fn coherent_projector(z: [f64; 2], cutoff: usize) -> FockOperator {
    FockOperator::projector(&coherent_ket(alpha_of(z), cutoff))
}

/// Thermal state with mean photon number `n̄`, `p_n = n̄ⁿ/(n̄+1)ⁿ⁺¹` (not renormalised).
pub fn thermal_state(nbar: f64, cutoff: usize) -> Result<FockOperator, OracleError> {
    require_cutoff(cutoff)?;
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(OracleError::Range(format!("n̄ must be finite and ≥ 0, got {nbar}")));
    }
    let ratio = nbar / (nbar + 1.0);
    let tail = ratio.powi(cutoff as i32);
    if tail > TAIL_MASS_TOL {
        return Err(OracleError::Truncation(format!(
            "thermal state n̄ = {nbar} leaves population {tail:.3e} above cutoff {cutoff} (limit {TAIL_MASS_TOL:e})"
        )));
    }
    let diag: Vec<f64> = (0..cutoff).map(|n| ratio.powi(n as i32) / (nbar + 1.0)).collect();
    Ok(FockOperator::from_diagonal(&diag))
}

/// Squeezed vacuum with quadrature variance `e^{−2r}/2` along the direction at
/// angle `phi` in the `z` plane (and `e^{2r}/2` orthogonal to it).
pub fn squeezed_vacuum(r: f64, phi: f64, cutoff: usize) -> Result<FockOperator, OracleError> {
    require_cutoff(cutoff)?;
    let t = r.tanh();
    let mut ket = DVector::zeros(cutoff);
    let mut norm = 0.0;
    let mut n = 0;
    while 2 * n < cutoff {
        let ln_tanh = if n == 0 { 0.0 } else { n as f64 * t.abs().ln() };
        let ln_mag = -0.5 * r.cosh().ln() + ln_tanh + 0.5 * ln_factorial(2 * n)
            - n as f64 * 2f64.ln()
            - ln_factorial(n);
        let sign = if t > 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        let amp = Complex64::from_polar(sign * ln_mag.exp(), 2.0 * n as f64 * phi);
        norm += amp.norm_sqr();
        ket[2 * n] = amp;
        n += 1;
    }
    let tail = 1.0 - norm;
    if tail > TAIL_MASS_TOL {
        return Err(OracleError::Truncation(format!(
            "squeezed vacuum r = {r} leaves population {tail:.3e} above cutoff {cutoff}"
        )));
    }
    Ok(FockOperator::projector(&ket))
}

/// `D(β) A D(β)†` with `β` a phase-space point; exact up to the truncation of `A`.
pub fn displaced(op: &FockOperator, beta: [f64; 2]) -> FockOperator {
    let n = op.cutoff();
    let d = displacement_block(alpha_of(beta), n, n);
    FockOperator { entries: &d * op.entries() * d.adjoint() }
}

/// Columns needed so that `⟨m|D(α)|k⟩` for `m < cutoff` is negligible beyond them.
fn padded_width(alpha: Complex64, cutoff: usize) -> usize {
    let edge = (cutoff as f64).sqrt() + alpha.norm() + 8.0;
    (edge * edge).ceil() as usize
}

/// The s-ordered kernel `Δ⁽ˢ⁾(z) = (1/2π)·(2/(1−s))·D(α) qⁿ̂ D(α)†`, `q = (s+1)/(s−1)`.
///
/// Valid for `s ≤ 0` (at `s = 0` this is the displaced parity). The sum over Fock
/// levels runs on a padded space and is truncated to `cutoff` afterwards, so the
/// returned entries are those of the untruncated operator.
pub fn delta_s(z: [f64; 2], s: f64, cutoff: usize) -> Result<FockOperator, OracleError> {
    require_cutoff(cutoff)?;
    if !(s <= 0.0) {
        return Err(OracleError::Range(format!(
            "direct kernel needs s ≤ 0, got {s}; use the characteristic-function quadrature"
        )));
    }
    let alpha = alpha_of(z);
    let q = (s + 1.0) / (s - 1.0);
    let mut width = padded_width(alpha, cutoff);
    if q.abs() < 1.0 {
        // qᵏ < 1e-18 beyond this many levels
        let decay = if q == 0.0 { 1 } else { (18.0 * 10f64.ln() / -q.abs().ln()).ceil() as usize + 1 };
        width = width.min(decay.max(1));
    }
    if width >= LN_FACTORIAL_TABLE {
        return Err(OracleError::Range(format!("|z| = {} too large for the Fock kernel", alpha.norm() * 2f64.sqrt())));
    }
    let d = displacement_block(alpha, cutoff, width);
    let mut weighted = d.clone();
    let mut qk = 1.0;
    for k in 0..width {
        weighted.column_mut(k).scale_mut(qk);
        qk *= q;
    }
    let pref = 1.0 / (PI * (1.0 - s));
    FockOperator::new(weighted * d.adjoint() * Complex64::new(pref, 0.0))
}

/// Kraus amplitude `c_k(n) = sqrt(C(n,k)) τ^{(n−k)/2} (1−τ)^{k/2}` for `n ≥ k`.
fn loss_amplitude(n: usize, k: usize, tau: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return tau.powf(0.5 * n as f64);
    }
    if tau == 1.0 {
        return 0.0;
    }
    let ln_binom = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    let ln_tau = if n == k { 0.0 } else { 0.5 * (n - k) as f64 * tau.ln() };
    (0.5 * ln_binom + ln_tau + 0.5 * k as f64 * (1.0 - tau).ln()).exp()
}

/// Heisenberg-picture pure-loss channel `E*(M) = Σ_k A_k† M A_k`.
///
/// `(A_k† M A_k)_{mn} = c_k(m) c_k(n) M_{m−k, n−k}` only reads lower levels, so the
/// truncated result is exact whenever the entries of `M` are.
pub fn loss_dual(m: &FockOperator, tau: f64) -> Result<FockOperator, OracleError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(OracleError::Range(format!("transmissivity must lie in (0, 1], got {tau}")));
    }
    let n = m.cutoff();
    let amp = DMatrix::from_fn(n, n, |row, k| loss_amplitude(row, k, tau));
    let src = m.entries();
    let out = DMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::ZERO;
        for k in 0..=i.min(j) {
            acc += src[(i - k, j - k)] * (amp[(i, k)] * amp[(j, k)]);
        }
        acc
    });
    FockOperator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_alpha(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
        Complex64::from_polar(rng.random_range(0.0..max), rng.random_range(0.0..2.0 * PI))
    }

    #[test]
    fn displacement_at_origin_is_identity() {
        assert_eq!(displacement(Complex64::ZERO, 10).unwrap(), FockOperator::identity(10));
    }

    #[test]
    fn vacuum_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_alpha(&mut rng, 3.0);
            let d = displacement(a, 8).unwrap();
            assert!((d.entries()[(0, 0)].re - (-0.5 * a.norm_sqr()).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn displacement_columns_are_displaced_number_states() {
        // D|0⟩ is the coherent state, D|1⟩ = (a† − α*)|α⟩
        let a = Complex64::new(0.7, -1.1);
        let d = displacement_block(a, 40, 2);
        let coh = coherent_ket(a, 40);
        for m in 0..40 {
            assert!((d[(m, 0)] - coh[m]).norm() < 1e-14);
            let up = if m > 0 { coh[m - 1] * (m as f64).sqrt() } else { Complex64::ZERO };
            assert!((d[(m, 1)] - (up - a.conj() * coh[m])).norm() < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn truncated_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_alpha(&mut rng, 2.0);
            // exact entries on a padded space, products truncated afterwards
            let d = displacement_block(a, 30, padded_width(a, 30));
            let prod = FockOperator { entries: &d * d.adjoint() };
            assert!(prod.central_distance_to_identity() <= 1e-8);
        }
        // squaring the truncated matrix drops the k ≥ D terms of the inner sum
        let plain = displacement(Complex64::new(2.0, 0.0), 30).unwrap();
        assert!((&plain * &plain.adjoint()).central_distance_to_identity() > 1e-3);
    }

    #[test]
    fn group_law_phase() {
        // D(z)D(y)D(z)† = D(y) e^{−i zΩyᵀ}
        let (z, y) = ([0.4, -0.3], [0.2, 0.5]);
        let n = 60;
        let dz = displacement_block(alpha_of(z), n, n);
        let dy = displacement_block(alpha_of(y), n, n);
        let lhs = FockOperator { entries: &dz * &dy * dz.adjoint() };
        let phase = Complex64::from_polar(1.0, -(z[0] * y[1] - z[1] * y[0]));
        let rhs = FockOperator { entries: dy.map(|v| v * phase) };
        let c = 25;
        let diff = (lhs.entries().view((0, 0), (c, c)) - rhs.entries().view((0, 0), (c, c))).norm();
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn heterodyne_kernel_is_coherent_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_alpha(&mut rng, 2.0);
            let z = [a.re * 2f64.sqrt(), a.im * 2f64.sqrt()];
            let delta = delta_s(z, -1.0, 30).unwrap();
            let proj = coherent_projector(z, 30).scale(1.0 / (2.0 * PI));
            assert!(delta.central_distance(&proj) <= 1e-8);
        }
    }

    #[test]
    fn kernel_trace_and_vacuum_element() {
        let d = delta_s([0.0, 0.0], -0.5, 40).unwrap();
        assert!((d.trace().re - 1.0 / (2.0 * PI)).abs() < 1e-10);
        for z in [[0.0, 0.0], [1.0, -0.5], [0.3, 2.0]] {
            let d = delta_s(z, -0.5, 40).unwrap();
            let r2 = z[0] * z[0] + z[1] * z[1];
            let expected = (-r2 / 1.5).exp() / (1.5 * PI);
            assert!((d.entries()[(0, 0)].re - expected).abs() < 1e-13);
        }
        assert!(matches!(delta_s([0.0, 0.0], 0.2, 20), Err(OracleError::Range(_))));
    }

    #[test]
    fn wigner_kernel_is_displaced_parity() {
        let d = delta_s([0.0, 0.0], 0.0, 20).unwrap();
        for n in 0..20 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((d.entries()[(n, n)].re - sign / PI).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_state_moments() {
        assert_eq!(thermal_state(0.0, 5).unwrap(), FockOperator::number_projector(0, 5));
        let t = thermal_state(1.0, 60).unwrap();
        assert!((t.trace().re - 1.0).abs() < 1e-12);
        let mean: f64 = t.diagonal().iter().enumerate().map(|(n, p)| n as f64 * p.re).sum();
        assert!((mean - 1.0).abs() < 1e-10);
        assert!(matches!(thermal_state(1.0, 12), Err(OracleError::Truncation(_))));
    }

    #[test]
    fn thermal_characteristic_function() {
        // Tr[ρ D(y)] = e^{−ν|y|²/4}, ν = 2n̄ + 1
        let t = thermal_state(1.0, 60).unwrap();
        for y in [[0.5, 0.0], [0.3, -0.9], [1.2, 1.0]] {
            let d = displacement(alpha_of(y), 60).unwrap();
            let chi = d.expectation(&t);
            let r2 = y[0] * y[0] + y[1] * y[1];
            assert!((chi.re - (-3.0 * r2 / 4.0).exp()).abs() < 1e-8);
            assert!(chi.im.abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_characteristic_function() {
        // physical covariance diag(e^{−2r}, e^{2r})/2 rotated by φ
        let (r, phi) = (0.4f64, 0.6f64);
        let rho = squeezed_vacuum(r, phi, 60).unwrap();
        let (c, s) = (phi.cos(), phi.sin());
        let (small, big) = ((-2.0 * r).exp(), (2.0 * r).exp());
        let v = [
            [small * c * c + big * s * s, (small - big) * c * s],
            [(small - big) * c * s, small * s * s + big * c * c],
        ];
        for y in [[0.5, 0.0], [0.0, 0.7], [0.8, -0.4]] {
            // χ(y) = exp(−(yΩ)V(yΩ)ᵀ/4) with 2V = v
            let w = [-y[1], y[0]];
            let quad = w[0] * w[0] * v[0][0] + 2.0 * w[0] * w[1] * v[0][1] + w[1] * w[1] * v[1][1];
            let chi = displacement(alpha_of(y), 60).unwrap().expectation(&rho);
            assert!((chi.re - (-quad / 4.0).exp()).abs() < 1e-10, "{y:?}: {chi}");
            assert!(chi.im.abs() < 1e-10);
        }
    }

    #[test]
    fn loss_dual_properties() {
        let m = coherent_projector([0.3, 0.8], 20);
        assert!(loss_dual(&m, 1.0).unwrap().central_distance(&m) < 1e-15);
        let unit = loss_dual(&FockOperator::identity(40), 0.37).unwrap();
        assert!(unit.central_distance_to_identity() <= 1e-10);
        let vac = loss_dual(&FockOperator::number_projector(0, 30), 0.6).unwrap();
        for n in 0..30 {
            assert!((vac.entries()[(n, n)].re - 0.4f64.powi(n as i32)).abs() < 1e-14);
        }
        assert!(loss_dual(&m, 0.0).is_err());
    }

    #[test]
    fn loss_dual_matches_gaussian_dual_on_displacements() {
        // E*(D(y)) = D(√τ y) e^{−(1−τ)|y|²/4}
        let tau = 0.45;
        let y = [0.6, -0.4];
        let n = 40;
        let lhs = loss_dual(&displacement(alpha_of(y), n).unwrap(), tau).unwrap();
        let r2 = y[0] * y[0] + y[1] * y[1];
        let scaled = [tau.sqrt() * y[0], tau.sqrt() * y[1]];
        let rhs = displacement(alpha_of(scaled), n).unwrap().scale((-(1.0 - tau) * r2 / 4.0).exp());
        assert!(lhs.central_distance(&rhs) < 1e-12);
    }
}
