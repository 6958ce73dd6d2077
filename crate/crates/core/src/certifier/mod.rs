//! Incompatibility-breaking certificates for Gaussian channels.
//!
//! A channel `(T, N, d)` maps the s-ordered kernel `Δ⁽ˢ⁾(z)` onto a Gaussian
//! measurement whenever `N + S − iTΩTᵀ ≥ 0`. If every member of a measurement set
//! has a non-negative s-PQD at that ordering, the dual images are all
//! post-processings of that single Gaussian (mother) measurement.

mod table;

pub use table::{reproduce_table1, table1_closed_form, Table1Grid, Table1Row, TableEntry};

use serde::Serialize;
use thiserror::Error;

use crate::channels::GaussianChannel;
use crate::linalg::{hermitian_combine, psd_report, LinalgError, PsdReport, RealMatrix};
use crate::measurements::{grid_minimum, max_nonneg_ordering, MeasurementModel};

pub const NOT_BROKEN_NOTE: &str =
    "sufficient condition only; incompatibility not necessarily preserved";
const SINGLETON_NOTE: &str = "a single measurement is always jointly measurable with itself";

/// Relative slack when matching a mother measurement against the rescaled heterodyne form.
const HETERODYNE_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CertifierError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("measurement set is empty")]
    EmptySet,
    #[error("member {index} acts on {found} modes, expected {expected}")]
    MemberModes { index: usize, expected: usize, found: usize },
    #[error("channel acts on {channel} modes but the measurements act on {set}")]
    ModeMismatch { channel: usize, set: usize },
}

/// A set of measurements. Each member is a tensor product of single-mode
/// catalogue models, one factor per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    members: Vec<Vec<MeasurementModel>>,
    modes: usize,
}

impl MeasurementSet {
    pub fn new(members: Vec<Vec<MeasurementModel>>) -> Result<Self, CertifierError> {
        let modes = members.first().ok_or(CertifierError::EmptySet)?.len();
        if modes == 0 {
            return Err(CertifierError::MemberModes { index: 0, expected: 1, found: 0 });
        }
        if let Some((index, m)) = members.iter().enumerate().find(|(_, m)| m.len() != modes) {
            return Err(CertifierError::MemberModes { index, expected: modes, found: m.len() });
        }
        Ok(Self { members, modes })
    }

    /// Single-mode set, one model per member.
    pub fn single_mode(models: Vec<MeasurementModel>) -> Result<Self, CertifierError> {
        Self::new(models.into_iter().map(|m| vec![m]).collect())
    }

    pub fn members(&self) -> &[Vec<MeasurementModel>] {
        &self.members
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `min` over members and factors of the maximal non-negative ordering.
    pub fn s_bar(&self) -> f64 {
        self.members
            .iter()
            .flatten()
            .map(|m| max_nonneg_ordering(m).s_bar)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialCase {
    /// `T = tI` and `N + sI = t²I`: the mother is heterodyne with outcomes rescaled by `1/t`.
    HeterodyneRescaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotherMeasurement {
    pub transfer: RealMatrix,
    /// `N + S`.
    pub noise: RealMatrix,
    pub shift: Vec<f64>,
    pub special_case: Option<SpecialCase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCertificate {
    pub broken: bool,
    /// The isotropic ordering that was tested.
    pub s_used: f64,
    pub s_min_channel: f64,
    pub s_bar_set: f64,
    pub mother: MotherMeasurement,
    pub note: String,
}

#[derive(Serialize)]
struct MotherJson<'a> {
    #[serde(rename = "T")]
    transfer: Vec<Vec<f64>>,
    noise: Vec<Vec<f64>>,
    d: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    special_case: Option<SpecialCase>,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    broken: bool,
    s_min_channel: f64,
    s_bar_set: f64,
    mother: MotherJson<'a>,
    note: &'a str,
}

impl OrderingCertificate {
    /// The certificate as a JSON value with a fixed field order.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = CertificateJson {
            broken: self.broken,
            s_min_channel: self.s_min_channel,
            s_bar_set: self.s_bar_set,
            mother: MotherJson {
                transfer: self.mother.transfer.to_rows(),
                noise: self.mother.noise.to_rows(),
                d: &self.mother.shift,
                special_case: self.mother.special_case,
            },
            note: &self.note,
        };
        serde_json::to_value(doc).expect("finite certificate data")
    }
}

/// PSD report of `N + S − iTΩTᵀ`.
pub fn breaking_test(ch: &GaussianChannel, s: &RealMatrix) -> Result<PsdReport, CertifierError> {
    let dim = 2 * ch.modes();
    s.require_square(dim, "ordering matrix S")?;
    let real = ch.noise() + s;
    let real = (&real + &real.transpose()).scale(0.5);
    Ok(psd_report(&hermitian_combine(&real, &(-&ch.twisted_form()))?))
}

/// Least isotropic ordering `s` with `N + sI − iTΩTᵀ ≥ 0`, i.e. `λ_max(iTΩTᵀ − N)`.
pub fn s_min_isotropic(ch: &GaussianChannel) -> f64 {
    let zero = RealMatrix::zeros(2 * ch.modes(), 2 * ch.modes());
    -breaking_test(ch, &zero).expect("shapes validated").min_eigenvalue
}

fn heterodyne_form(transfer: &RealMatrix, noise: &RealMatrix) -> Option<SpecialCase> {
    let dim = transfer.rows();
    let t = transfer.get(0, 0);
    let scale = 1.0f64.max(t.abs()).max(noise.get(0, 0).abs());
    let tol = HETERODYNE_MATCH_TOL * scale;
    let isotropic = t != 0.0 && transfer.max_abs_diff(&RealMatrix::identity(dim).scale(t)) <= tol;
    (isotropic && noise.max_abs_diff(&RealMatrix::identity(dim).scale(t * t)) <= tol)
        .then_some(SpecialCase::HeterodyneRescaled)
}

/// Certifies incompatibility breaking with the isotropic ordering `s̄_set · I`.
pub fn certify(set: &MeasurementSet, ch: &GaussianChannel) -> Result<OrderingCertificate, CertifierError> {
    if set.modes() != ch.modes() {
        return Err(CertifierError::ModeMismatch { channel: ch.modes(), set: set.modes() });
    }
    let s_bar_set = set.s_bar();
    let dim = 2 * ch.modes();
    let ordering = RealMatrix::identity(dim).scale(s_bar_set);
    let report = breaking_test(ch, &ordering)?;
    let broken = report.is_psd;
    let noise = ch.noise() + &ordering;
    let special_case = if broken { heterodyne_form(ch.transfer(), &noise) } else { None };
    let mut note = if broken {
        format!(
            "broken: every member is a post-processing of the mother measurement with density (2π)^{} W^({s_bar_set})(a|x,z)",
            ch.modes()
        )
    } else {
        NOT_BROKEN_NOTE.to_string()
    };
    if set.len() == 1 {
        note.push_str("; ");
        note.push_str(SINGLETON_NOTE);
    }
    Ok(OrderingCertificate {
        broken,
        s_used: s_bar_set,
        s_min_channel: s_min_isotropic(ch),
        s_bar_set,
        mother: MotherMeasurement {
            transfer: ch.transfer().clone(),
            noise,
            shift: ch.displacement().to_vec(),
            special_case,
        },
        note,
    })
}

/// Same engine as [`certify`]; the named entry point for heterogeneous sets whose
/// breaking threshold is the minimum of the individual thresholds.
pub fn mixed_compatibility(
    set: &MeasurementSet,
    ch: &GaussianChannel,
) -> Result<OrderingCertificate, CertifierError> {
    certify(set, ch)
}

/// Result of re-checking a certificate from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub breaking_matrix_psd: bool,
    /// Smallest s-PQD value over members, outcomes and the test grid.
    pub min_spqd: f64,
}

impl SoundnessReport {
    pub fn holds(&self) -> bool {
        self.breaking_matrix_psd && self.min_spqd >= -1e-12
    }
}

/// Re-verifies a certificate: the breaking matrix at `s_used` and non-negativity of
/// every factor's s-PQD on a `|z| ≤ 5`, 101 × 101 grid.
///
/// For models whose s̄ is only attained as a measure (homodyne, heterodyne, Gaussian
/// seeds at `λ_min(Σ)`), the density is checked just inside the convergence limit.
pub fn verify_certificate(
    set: &MeasurementSet,
    ch: &GaussianChannel,
    cert: &OrderingCertificate,
) -> Result<SoundnessReport, CertifierError> {
    let ordering = RealMatrix::identity(2 * ch.modes()).scale(cert.s_used);
    let breaking_matrix_psd = breaking_test(ch, &ordering)?.is_psd;
    let mut min_spqd = f64::INFINITY;
    for m in set.members().iter().flatten() {
        let s = cert.s_used.min(m.convergence_limit() - 1e-3);
        let v = grid_minimum(m, s, 5.0, 101).expect("s below the convergence limit");
        min_spqd = min_spqd.min(v);
    }
    Ok(SoundnessReport { breaking_matrix_psd, min_spqd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{compose, from_class, loss_with_excess, make_channel, ChannelClass, ChannelTag};
    use proptest::prelude::*;

    fn class(tag: ChannelTag, tau: f64, nbar: f64) -> GaussianChannel {
        from_class(&ChannelClass::new(tag, tau, nbar).unwrap()).unwrap()
    }

    fn fixed(tag: ChannelTag) -> GaussianChannel {
        from_class(&ChannelClass::fixed(tag, 0.0).unwrap()).unwrap()
    }

    fn set(models: Vec<MeasurementModel>) -> MeasurementSet {
        MeasurementSet::single_mode(models).unwrap()
    }

    #[test]
    fn minimal_orderings() {
        assert!((s_min_isotropic(&class(ChannelTag::CLoss, 0.6, 0.0)) - 0.2).abs() < 1e-12);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((s_min_isotropic(&fixed(ChannelTag::B1)) - golden).abs() < 1e-9);
        assert!((s_min_isotropic(&fixed(ChannelTag::B2Id)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breaking_test_examples() {
        let r = breaking_test(&class(ChannelTag::CLoss, 0.5, 0.0), &RealMatrix::zeros(2, 2)).unwrap();
        assert!(r.is_psd);
        assert!(r.min_eigenvalue.abs() < 1e-12);
        assert!(!breaking_test(&fixed(ChannelTag::B1), &RealMatrix::identity(2).scale(0.5)).unwrap().is_psd);
        assert!(breaking_test(&fixed(ChannelTag::A1), &RealMatrix::identity(2)).unwrap().is_psd);
        assert!(breaking_test(&fixed(ChannelTag::A1), &RealMatrix::identity(4)).is_err());
    }

    #[test]
    fn anisotropic_orderings() {
        // For B1 the matrix is [[s1, i], [−i, s2 + 1]]: PSD iff s1(s2 + 1) ≥ 1.
        let b1 = fixed(ChannelTag::B1);
        assert!(breaking_test(&b1, &RealMatrix::from_diagonal(&[1.0, 0.0])).unwrap().is_psd);
        assert!(!breaking_test(&b1, &RealMatrix::from_diagonal(&[0.9, 0.0])).unwrap().is_psd);
        assert!(breaking_test(&b1, &RealMatrix::from_diagonal(&[0.5, 1.0])).unwrap().is_psd);
    }

    #[test]
    fn certify_examples() {
        let wigner_set = set(vec![
            MeasurementModel::homodyne(0.0).unwrap(),
            MeasurementModel::homodyne(std::f64::consts::FRAC_PI_2).unwrap(),
        ]);
        let cert = certify(&wigner_set, &class(ChannelTag::CLoss, 0.4, 0.0)).unwrap();
        assert!(cert.broken);
        assert!((cert.s_min_channel + 0.2).abs() < 1e-12);
        assert_eq!(cert.s_bar_set, 0.0);

        let pd = set(vec![MeasurementModel::realistic_pd(0.5).unwrap()]);
        assert!(certify(&pd, &class(ChannelTag::CLoss, 0.5, 0.0)).unwrap().broken);

        let ideal = set(vec![MeasurementModel::ideal_pd()]);
        for tau in [0.01, 0.3, 0.5, 0.99] {
            let cert = certify(&ideal, &class(ChannelTag::CLoss, tau, 0.0)).unwrap();
            assert!(!cert.broken);
            assert!(cert.note.starts_with(NOT_BROKEN_NOTE));
        }
    }

    #[test]
    fn pure_loss_mother_is_rescaled_heterodyne() {
        for tau in [0.2, 0.5, 0.8] {
            let s = 2.0 * tau - 1.0;
            let probe = set(vec![MeasurementModel::realistic_pd(1.0 - (1.0 - s) / 2.0).unwrap()]);
            assert!((probe.s_bar() - s).abs() < 1e-15);
            let cert = certify(&probe, &class(ChannelTag::CLoss, tau, 0.0)).unwrap();
            assert!(cert.broken);
            assert_eq!(cert.mother.special_case, Some(SpecialCase::HeterodyneRescaled));
        }
        let cert = certify(&set(vec![MeasurementModel::homodyne(0.0).unwrap()]), &class(ChannelTag::CLoss, 0.3, 0.0)).unwrap();
        assert!(cert.broken);
        assert_eq!(cert.mother.special_case, None);
    }

    #[test]
    fn singleton_note() {
        let cert = certify(&set(vec![MeasurementModel::heterodyne()]), &GaussianChannel::identity(1).unwrap()).unwrap();
        assert!(cert.broken);
        assert!(cert.note.contains(SINGLETON_NOTE));
    }

    #[test]
    fn mixed_thresholds() {
        let pd_and_vacuum = set(vec![
            MeasurementModel::realistic_pd(0.25).unwrap(),
            MeasurementModel::gaussian(RealMatrix::identity(2)).unwrap(),
        ]);
        for (tau, expect) in [(0.2, true), (0.25, true), (0.26, false), (0.5, false)] {
            let cert = mixed_compatibility(&pd_and_vacuum, &class(ChannelTag::CLoss, tau, 0.0)).unwrap();
            assert_eq!(cert.broken, expect, "τ = {tau}");
        }
    }

    #[test]
    fn json_shape() {
        let cert = certify(&set(vec![MeasurementModel::homodyne(0.0).unwrap()]), &class(ChannelTag::CLoss, 0.5, 0.0)).unwrap();
        let text = serde_json::to_string(&cert.to_json()).unwrap();
        assert!(text.starts_with(r#"{"broken":true,"s_min_channel":"#), "{text}");
        assert!(text.contains(r#""special_case":"heterodyne_rescaled""#));
        let not = certify(&set(vec![MeasurementModel::ideal_pd()]), &fixed(ChannelTag::B2Id)).unwrap();
        assert!(!serde_json::to_string(&not.to_json()).unwrap().contains("special_case"));
    }

    #[test]
    fn mode_checks() {
        let two_mode = MeasurementSet::new(vec![vec![MeasurementModel::heterodyne(), MeasurementModel::ideal_pd()]]).unwrap();
        assert_eq!(two_mode.s_bar(), -1.0);
        assert!(certify(&two_mode, &GaussianChannel::identity(1).unwrap()).is_err());
        assert!(certify(&two_mode, &GaussianChannel::identity(2).unwrap()).is_ok());
        assert!(MeasurementSet::new(vec![vec![MeasurementModel::heterodyne()], vec![]]).is_err());
        assert!(MeasurementSet::new(vec![]).is_err());
    }

    #[test]
    fn soundness_of_broken_certificates() {
        let models = vec![
            MeasurementModel::realistic_pd(0.7).unwrap(),
            MeasurementModel::thermal_pd(2.5).unwrap(),
            MeasurementModel::homodyne(0.4).unwrap(),
        ];
        let s = set(models);
        for tau in [0.1, 0.2, 0.3, 0.4] {
            let ch = loss_with_excess(tau, 0.05).unwrap();
            let cert = certify(&s, &ch).unwrap();
            assert!(cert.broken);
            assert!(verify_certificate(&s, &ch, &cert).unwrap().holds());
        }
    }

    #[test]
    fn composition_preserves_breaking() {
        let s = set(vec![MeasurementModel::homodyne(0.0).unwrap()]);
        for (t1, t2) in [(0.5, 0.9), (0.4, 0.4), (0.3, 1.0 - 1e-9)] {
            let first = class(ChannelTag::CLoss, t1, 0.0);
            let both = compose(&first, &class(ChannelTag::CLoss, t2, 0.0)).unwrap();
            assert!(s_min_isotropic(&both) <= s_min_isotropic(&first) + 1e-12);
            assert!(certify(&s, &first).unwrap().broken);
            assert!(certify(&s, &both).unwrap().broken);
        }
    }

    proptest! {
        #[test]
        fn extra_noise_never_raises_s_min(tau in 0.01f64..0.99, nbar in 0.0f64..3.0, delta in 0.0f64..2.0) {
            let ch = class(ChannelTag::CLoss, tau, nbar);
            let noisier = make_channel(1, ch.transfer().clone(), ch.noise().shifted(delta), vec![0.0; 2]).unwrap();
            prop_assert!(s_min_isotropic(&noisier) <= s_min_isotropic(&ch) + 1e-12);
        }

        #[test]
        fn s_min_is_the_psd_threshold(t in prop::array::uniform4(-2.0f64..2.0), extra in 0.0f64..1.0) {
            let tm = RealMatrix::from_rows(&[vec![t[0], t[1]], vec![t[2], t[3]]]).unwrap();
            // N = |1 − det T| I + extra·I is always CP.
            let det = t[0] * t[3] - t[1] * t[2];
            let ch = make_channel(1, tm, RealMatrix::identity(2).scale((1.0 - det).abs() + extra), vec![0.0; 2]).unwrap();
            let s = s_min_isotropic(&ch);
            prop_assert!(breaking_test(&ch, &RealMatrix::identity(2).scale(s + 1e-9)).unwrap().is_psd);
            prop_assert!(!breaking_test(&ch, &RealMatrix::identity(2).scale(s - 1e-6)).unwrap().is_psd);
        }
    }
}
