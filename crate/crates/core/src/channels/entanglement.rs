//! Entanglement-breaking checks: the closed-form sufficient condition
//! `N − I − iTΩTᵀ ≥ 0` and a two-mode-squeezed-vacuum separability scan.

use super::{loss_with_excess, ChannelError, GaussianChannel};
use crate::linalg::{hermitian_combine, psd_report, symplectic_form, PsdReport, RealMatrix};

pub const DEFAULT_NU_MAX: f64 = 10.0;
pub const DEFAULT_NU_POINTS: usize = 50;

#[derive(Debug, Clone)]
pub struct EbReport {
    /// Whether `N − I − iTΩTᵀ ≥ 0` holds for the loss-with-excess channel.
    pub sufficient_condition_psd: bool,
    /// Minimum over the ν grid of `λ_min(Lσ(τ,ε)L + iΩ)`.
    pub tms_min_eigenvalue: f64,
    /// ν at which the minimum was attained.
    pub argmin_nu: f64,
    pub scan_nu_range: (f64, f64),
    /// Every scanned output passed the partial-transpose test.
    pub separable_on_grid: bool,
}

/// PSD report of `N − I − iTΩTᵀ`.
pub fn eb_sufficient_report(ch: &GaussianChannel) -> PsdReport {
    let a = ch.noise().shifted(-1.0);
    let b = -&ch.twisted_form();
    psd_report(&hermitian_combine(&a, &b).expect("validated channel shapes"))
}

/// Whether the channel satisfies the sufficient entanglement-breaking condition.
pub fn eb_sufficient(ch: &GaussianChannel) -> bool {
    eb_sufficient_report(ch).is_psd
}

/// Two-mode squeezed vacuum covariance `[[νI, √(ν²−1)Z], [√(ν²−1)Z, νI]]`.
pub fn tms_covariance(nu: f64) -> Result<RealMatrix, ChannelError> {
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(ChannelError::ParameterRange(format!("squeezing ν must be ≥ 1, got {nu}")));
    }
    Ok(tms_block(nu, nu, (nu * nu - 1.0).sqrt()))
}

fn tms_block(first: f64, second: f64, corr: f64) -> RealMatrix {
    RealMatrix::from_rows(&[
        vec![first, 0.0, corr, 0.0],
        vec![0.0, first, 0.0, -corr],
        vec![corr, 0.0, second, 0.0],
        vec![0.0, -corr, 0.0, second],
    ])
    .expect("finite entries")
}

/// Closed form of the squeezed-vacuum covariance after loss with excess noise on mode A:
/// `[[K·I, √(τ(ν²−1))Z], [√(τ(ν²−1))Z, ν·I]]` with `K = 1 + 2ε + τ(ν − 1)`.
pub fn tms_after_channel(nu: f64, tau: f64, epsilon: f64) -> Result<RealMatrix, ChannelError> {
    tms_covariance(nu)?;
    loss_with_excess(tau, epsilon)?;
    let k = 1.0 + 2.0 * epsilon + tau * (nu - 1.0);
    Ok(tms_block(k, nu, (tau * (nu * nu - 1.0)).sqrt()))
}

/// `(T ⊕ I)σ(Tᵀ ⊕ I) + N ⊕ 0` for an arbitrary single-mode channel on mode A.
pub fn tms_after_channel_generic(
    sigma: &RealMatrix,
    ch: &GaussianChannel,
) -> Result<RealMatrix, ChannelError> {
    if ch.modes() != 1 {
        return Err(ChannelError::ModeMismatch(ch.modes(), 1));
    }
    sigma.require_square(4, "two-mode covariance")?;
    let lift = ch.transfer().direct_sum(&RealMatrix::identity(2));
    let noise = ch.noise().direct_sum(&RealMatrix::zeros(2, 2));
    Ok(&lift.congruence(sigma) + &noise)
}

/// PSD report of the partial-transpose test `LσL + iΩ` with `L = diag(1, 1, 1, −1)`.
pub fn partial_transpose_test(sigma: &RealMatrix) -> Result<PsdReport, ChannelError> {
    sigma.require_square(4, "two-mode covariance")?;
    let l = RealMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0]);
    let flipped = l.congruence(sigma);
    Ok(psd_report(&hermitian_combine(&flipped, &symplectic_form(2)?)?))
}

/// `DEFAULT_NU_POINTS` logarithmically spaced values in `[1, nu_max]`.
pub fn default_nu_grid(nu_max: f64) -> Vec<f64> {
    let n = DEFAULT_NU_POINTS;
    let top = nu_max.max(1.0).ln();
    (0..n)
        .map(|i| (top * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Scans the separability of squeezed-vacuum probes sent through loss with excess noise.
pub fn eb_tms_scan(tau: f64, epsilon: f64, nu_grid: &[f64]) -> Result<EbReport, ChannelError> {
    if nu_grid.is_empty() {
        return Err(ChannelError::ParameterRange("empty ν grid".into()));
    }
    let channel = loss_with_excess(tau, epsilon)?;
    let mut min = f64::INFINITY;
    let mut argmin = nu_grid[0];
    let mut separable = true;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &nu in nu_grid {
        let report = partial_transpose_test(&tms_after_channel(nu, tau, epsilon)?)?;
        separable &= report.is_psd;
        if report.min_eigenvalue < min {
            min = report.min_eigenvalue;
            argmin = nu;
        }
        lo = lo.min(nu);
        hi = hi.max(nu);
    }
    Ok(EbReport {
        sufficient_condition_psd: eb_sufficient(&channel),
        tms_min_eigenvalue: min,
        argmin_nu: argmin,
        scan_nu_range: (lo, hi),
        separable_on_grid: separable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ChannelClass, ChannelTag};

    #[test]
    fn excess_equal_to_transmissivity_is_entanglement_breaking() {
        assert!(eb_sufficient(&loss_with_excess(0.3, 0.3).unwrap()));
    }

    #[test]
    fn identity_is_not_entanglement_breaking() {
        let r = eb_sufficient_report(&GaussianChannel::identity(1).unwrap());
        assert!((r.min_eigenvalue + 2.0).abs() < 1e-12);
        assert!(!r.is_psd);
    }

    #[test]
    fn mild_pure_loss_is_not_entanglement_breaking() {
        let ch = ChannelClass::new(ChannelTag::CLoss, 0.9, 0.0).unwrap().channel().unwrap();
        let r = eb_sufficient_report(&ch);
        // λ_min(−0.9 I − 0.9 iΩ) = −1.8
        assert!((r.min_eigenvalue + 1.8).abs() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_covariance() {
        assert_eq!(tms_covariance(1.0).unwrap(), RealMatrix::identity(4));
        let s = tms_covariance(2.0).unwrap();
        assert!((s.get(0, 2) - 3f64.sqrt()).abs() < 1e-15);
        assert!((s.get(1, 3) + 3f64.sqrt()).abs() < 1e-15);
        assert!(tms_covariance(0.5).is_err());
        let omega = symplectic_form(2).unwrap();
        for nu in [1.0, 2.0, 5.0, 10.0] {
            let r = psd_report(&hermitian_combine(&tms_covariance(nu).unwrap(), &omega).unwrap());
            assert!(r.is_psd, "ν = {nu}: {}", r.min_eigenvalue);
        }
    }

    #[test]
    fn channel_output_closed_form_matches_generic_path() {
        for &(nu, tau, eps) in &[(2.0, 0.5, 0.0), (3.7, 0.2, 0.4), (1.0, 0.9, 1.3), (8.0, 1.0, 0.0)] {
            let closed = tms_after_channel(nu, tau, eps).unwrap();
            let generic = tms_after_channel_generic(
                &tms_covariance(nu).unwrap(),
                &loss_with_excess(tau, eps).unwrap(),
            )
            .unwrap();
            assert!(closed.max_abs_diff(&generic) < 1e-12);
        }
        let k = tms_after_channel(2.0, 0.5, 0.0).unwrap();
        assert!((k.get(0, 0) - 1.5).abs() < 1e-15);
        assert!((k.get(0, 2) - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lossless_noiseless_output_is_unchanged() {
        for nu in [1.0, 2.5, 7.0] {
            let out = tms_after_channel(nu, 1.0, 0.0).unwrap();
            assert!(out.max_abs_diff(&tms_covariance(nu).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn scan_detects_surviving_entanglement() {
        let report = eb_tms_scan(0.9, 0.0, &[5.0]).unwrap();
        assert!(report.tms_min_eigenvalue < 0.0);
        assert!(!report.separable_on_grid);
    }

    #[test]
    fn scan_on_breaking_channel() {
        let report = eb_tms_scan(0.3, 0.3, &default_nu_grid(DEFAULT_NU_MAX)).unwrap();
        assert!(report.tms_min_eigenvalue >= -1e-10, "{}", report.tms_min_eigenvalue);
        assert!(report.sufficient_condition_psd);
        assert_eq!(report.scan_nu_range.0, 1.0);
        assert!((report.scan_nu_range.1 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_probe_is_separable() {
        for &(tau, eps) in &[(0.1, 0.0), (0.99, 0.0), (1.0, 0.0), (0.5, 2.0)] {
            assert!(eb_tms_scan(tau, eps, &[1.0]).unwrap().tms_min_eigenvalue >= 0.0 - 1e-12);
        }
        assert!(eb_tms_scan(0.5, 0.0, &[]).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_nu_grid(10.0);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 1.0);
        assert!((g[49] - 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
