//! Real-symplectic and complex-Hermitian matrix primitives.
//!
//! Every criterion handled by this crate (complete positivity, incompatibility
//! breaking, entanglement breaking, the uncertainty relation) has the form
//! `A + iB ≥ 0` with `A` real symmetric and `B` real antisymmetric. This module
//! builds those Hermitian test matrices and certifies them with a full
//! eigendecomposition and a scale-aware tolerance.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Entry-wise tolerance for symmetry and Hermiticity checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative slack of the PSD decision: `λ_min ≥ −PSD_RELATIVE_TOL · max(1, ‖H‖_∞)`.
pub const PSD_RELATIVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not {kind} (max deviation {deviation:e})")]
    Symmetry { kind: &'static str, deviation: f64 },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense real matrix in phase-space units (ħ = 1, `[x, p] = i`).
#[derive(Clone, PartialEq)]
pub struct RealMatrix(DMatrix<f64>);

impl RealMatrix {
    /// Wraps a nalgebra matrix, rejecting non-finite entries.
    pub fn new(inner: DMatrix<f64>) -> Result<Self, LinalgError> {
        if let Some((idx, _)) = inner.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // nalgebra storage is column-major
            let (row, col) = (idx % inner.nrows(), idx / inner.nrows());
            return Err(LinalgError::NonFinite { row, col });
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(LinalgError::InvalidDimension("matrix has no rows".into()));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(LinalgError::InvalidDimension("matrix has no columns".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{ncols} columns"),
                found: format!("{} columns", bad.len()),
            });
        }
        Self::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Pauli `Z = diag(1, −1)`.
    pub fn pauli_z() -> Self {
        Self::from_diagonal(&[1.0, -1.0])
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * factor)
    }

    /// `self + shift · I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.0.clone();
        for i in 0..out.nrows().min(out.ncols()) {
            out[(i, i)] += shift;
        }
        Self(out)
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &RealMatrix) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let mut out = DMatrix::zeros(r1 + other.rows(), c1 + other.cols());
        out.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        out.view_mut((r1, c1), (other.rows(), other.cols()))
            .copy_from(&other.0);
        Self(out)
    }

    /// `self · M · selfᵀ`.
    pub fn congruence(&self, middle: &RealMatrix) -> Self {
        Self(&self.0 * &middle.0 * self.0.transpose())
    }

    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch in max_abs_diff");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Aᵢⱼ − Aⱼᵢ|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)]).abs());
            }
        }
        worst
    }

    /// Largest `|Aᵢⱼ + Aⱼᵢ|`, including the diagonal.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] + self.0[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.asymmetry() <= tol
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Smallest eigenvalue of a real symmetric matrix.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn require_square(&self, dim: usize, what: &str) -> Result<(), LinalgError> {
        if self.rows() != dim || self.cols() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{what} of shape {dim}x{dim}"),
                found: format!("{}x{}", self.rows(), self.cols()),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealMatrix{:?}", self.to_rows())
    }
}

impl<'a> Add<&'a RealMatrix> for &'a RealMatrix {
    type Output = RealMatrix;
    fn add(self, rhs: &RealMatrix) -> RealMatrix {
        RealMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a RealMatrix> for &'a RealMatrix {
    type Output = RealMatrix;
    fn sub(self, rhs: &RealMatrix) -> RealMatrix {
        RealMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a RealMatrix> for &'a RealMatrix {
    type Output = RealMatrix;
    fn mul(self, rhs: &RealMatrix) -> RealMatrix {
        RealMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &RealMatrix {
    type Output = RealMatrix;
    fn neg(self) -> RealMatrix {
        RealMatrix(-&self.0)
    }
}

/// Complex Hermitian matrix `A + iB`.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Wraps a complex matrix after checking Hermiticity within [`SYMMETRY_TOL`].
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self, LinalgError> {
        if inner.nrows() != inner.ncols() || inner.nrows() == 0 {
            return Err(LinalgError::InvalidDimension(format!(
                "Hermitian matrix must be square and non-empty, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        let n = inner.nrows();
        let mut deviation = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let v = inner[(i, j)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
                deviation = deviation.max((v - inner[(j, i)].conj()).norm());
            }
        }
        if deviation > SYMMETRY_TOL {
            return Err(LinalgError::Symmetry { kind: "Hermitian", deviation });
        }
        Ok(Self(inner))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn real_part(&self) -> RealMatrix {
        RealMatrix(self.0.map(|c| c.re))
    }

    pub fn imag_part(&self) -> RealMatrix {
        RealMatrix(self.0.map(|c| c.im))
    }

    /// `H + c·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.0.clone();
        for i in 0..out.nrows() {
            out[(i, i)] += Complex64::new(shift, 0.0);
        }
        Self(out)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.0
            .row_iter()
            .map(|row| row.iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Scale-aware PSD slack `PSD_RELATIVE_TOL · max(1, ‖H‖_∞)`.
    pub fn psd_tolerance(&self) -> f64 {
        PSD_RELATIVE_TOL * self.inf_norm().max(1.0)
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix({:?})", self.0)
    }
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub is_psd: bool,
    /// The slack used for the decision.
    pub tolerance: f64,
    /// Unit eigenvector for `min_eigenvalue`.
    pub witness: DVector<Complex64>,
}

/// The `2M × 2M` symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(modes: usize) -> Result<RealMatrix, LinalgError> {
    if modes == 0 {
        return Err(LinalgError::InvalidDimension(
            "symplectic form needs at least one mode".into(),
        ));
    }
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    Ok(RealMatrix(omega))
}

/// Builds `A + iB` from a symmetric `A` and an antisymmetric `B`.
pub fn hermitian_combine(
    symmetric: &RealMatrix,
    antisymmetric: &RealMatrix,
) -> Result<HermitianMatrix, LinalgError> {
    if !symmetric.is_square() {
        return Err(LinalgError::InvalidDimension(format!(
            "real part must be square, got {}x{}",
            symmetric.rows(),
            symmetric.cols()
        )));
    }
    antisymmetric.require_square(symmetric.rows(), "imaginary part")?;
    let asym = symmetric.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(LinalgError::Symmetry { kind: "symmetric", deviation: asym });
    }
    let defect = antisymmetric.antisymmetry_defect();
    if defect > SYMMETRY_TOL {
        return Err(LinalgError::Symmetry { kind: "antisymmetric", deviation: defect });
    }
    let n = symmetric.rows();
    // Symmetrise exactly so the result is Hermitian to the last bit.
    let m = DMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (symmetric.get(i, j) + symmetric.get(j, i));
        let im = 0.5 * (antisymmetric.get(i, j) - antisymmetric.get(j, i));
        Complex64::new(re, im)
    });
    HermitianMatrix::new(m)
}

/// Smallest eigenvalue of `h` with its eigenvector, judged PSD against `tol`.
pub fn min_eigenvalue(h: &HermitianMatrix, tol: f64) -> PsdReport {
    let eig = h.0.clone().symmetric_eigen();
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("Hermitian matrix is non-empty");
    let mut witness: DVector<Complex64> = eig.eigenvectors.column(idx).into_owned();
    let norm = witness.norm();
    witness /= Complex64::new(norm, 0.0);
    PsdReport {
        min_eigenvalue: lambda,
        is_psd: lambda >= -tol,
        tolerance: tol,
        witness,
    }
}

/// [`min_eigenvalue`] with the default scale-aware tolerance.
pub fn psd_report(h: &HermitianMatrix) -> PsdReport {
    min_eigenvalue(h, h.psd_tolerance())
}

/// Convenience: PSD report of `A + iB`.
pub fn check_psd(
    symmetric: &RealMatrix,
    antisymmetric: &RealMatrix,
) -> Result<PsdReport, LinalgError> {
    Ok(psd_report(&hermitian_combine(symmetric, antisymmetric)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn omega1() -> RealMatrix {
        symplectic_form(1).unwrap()
    }

    #[test]
    fn symplectic_form_single_mode() {
        assert_eq!(omega1().to_rows(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
    }

    #[test]
    fn symplectic_form_two_modes_is_direct_sum() {
        let o2 = symplectic_form(2).unwrap();
        assert_eq!(o2, omega1().direct_sum(&omega1()));
    }

    #[test]
    fn symplectic_form_squares_to_minus_identity() {
        let o = omega1();
        assert_eq!(&o * &o, -&RealMatrix::identity(2));
    }

    #[test]
    fn symplectic_form_rejects_zero_modes() {
        assert!(matches!(symplectic_form(0), Err(LinalgError::InvalidDimension(_))));
    }

    #[test]
    fn symplectic_form_orthogonal_and_traceless() {
        for m in 1..=8 {
            let o = symplectic_form(m).unwrap();
            assert_eq!(&o * &o.transpose(), RealMatrix::identity(2 * m));
            assert_eq!(o.trace(), 0.0);
            assert_eq!(o.transpose(), -&o);
        }
    }

    #[test]
    fn i_omega_has_eigenvalues_plus_minus_one() {
        let h = hermitian_combine(&RealMatrix::zeros(2, 2), &omega1()).unwrap();
        let eig = h.inner().clone().symmetric_eigenvalues();
        let mut v: Vec<f64> = eig.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_plus_i_omega_is_boundary_psd() {
        let h = hermitian_combine(&RealMatrix::identity(2), &omega1()).unwrap();
        let r = psd_report(&h);
        assert!(r.min_eigenvalue.abs() < 1e-14);
        assert!(r.is_psd);
    }

    #[test]
    fn b1_test_matrix_at_golden_threshold() {
        let s = (5f64.sqrt() - 1.0) / 2.0;
        let a = RealMatrix::from_diagonal(&[s, s + 1.0]);
        let h = hermitian_combine(&a, &(-&omega1())).unwrap();
        let r = psd_report(&h);
        assert!(r.min_eigenvalue.abs() < 1e-9, "{}", r.min_eigenvalue);
        assert!(r.is_psd);
    }

    #[test]
    fn shifted_identity_minus_i_omega() {
        // eigenvalues s ∓ 1
        let a = RealMatrix::identity(2).scale(0.9);
        let h = hermitian_combine(&a, &(-&omega1())).unwrap();
        let r = psd_report(&h);
        assert!((r.min_eigenvalue + 0.1).abs() < 1e-12);
        assert!(!r.is_psd);
    }

    #[test]
    fn combine_rejects_bad_inputs() {
        let not_sym = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            hermitian_combine(&not_sym, &omega1()),
            Err(LinalgError::Symmetry { kind: "symmetric", .. })
        ));
        assert!(matches!(
            hermitian_combine(&RealMatrix::identity(2), &RealMatrix::identity(2)),
            Err(LinalgError::Symmetry { kind: "antisymmetric", .. })
        ));
        assert!(matches!(
            hermitian_combine(&RealMatrix::identity(2), &symplectic_form(2).unwrap()),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(matches!(
            RealMatrix::from_rows(&[vec![1.0, f64::NAN]]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
        let m = DMatrix::from_element(2, 2, Complex64::new(f64::INFINITY, 0.0));
        assert!(matches!(HermitianMatrix::new(m), Err(LinalgError::NonFinite { .. })));
    }

    #[test]
    fn repeated_calls_are_deterministic() {
        let s = (5f64.sqrt() - 1.0) / 2.0;
        let a = RealMatrix::from_diagonal(&[s, s + 1.0]);
        let h = hermitian_combine(&a, &(-&omega1())).unwrap();
        let first = psd_report(&h);
        for _ in 0..5 {
            let again = psd_report(&h);
            assert_eq!(first.min_eigenvalue.to_bits(), again.min_eigenvalue.to_bits());
            assert_eq!(first.witness, again.witness);
        }
    }

    fn hermitian_strategy() -> impl Strategy<Value = HermitianMatrix> {
        (1usize..=8).prop_flat_map(|n| {
            prop::collection::vec(-5.0f64..5.0, 2 * n * n).prop_map(move |v| {
                let raw = DMatrix::from_fn(n, n, |i, j| {
                    Complex64::new(v[i * n + j], v[n * n + i * n + j])
                });
                let herm = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
                HermitianMatrix::new(herm).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn shift_moves_min_eigenvalue(h in hermitian_strategy(), c in -10.0f64..10.0) {
            let base = psd_report(&h).min_eigenvalue;
            let moved = psd_report(&h.shifted(c)).min_eigenvalue;
            prop_assert!((moved - (base + c)).abs() <= 1e-10 * h.inf_norm().max(1.0));
        }

        #[test]
        fn psd_is_monotone_under_positive_shift(h in hermitian_strategy(), c in 0.0f64..10.0) {
            let h = h.shifted(-psd_report(&h).min_eigenvalue);
            prop_assert!(psd_report(&h).is_psd);
            prop_assert!(psd_report(&h.shifted(c)).is_psd);
        }

        #[test]
        fn witness_residual_is_small(h in hermitian_strategy()) {
            let r = psd_report(&h);
            prop_assert!((r.witness.norm() - 1.0).abs() < 1e-12);
            let residual = (h.inner() * &r.witness
                - &r.witness * Complex64::new(r.min_eigenvalue, 0.0)).norm();
            prop_assert!(residual <= 1e-9 * h.inf_norm().max(1.0));
        }
    }
}
