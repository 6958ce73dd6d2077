use std::fmt;
use std::str::FromStr;

use super::{make_channel, ChannelError, GaussianChannel};
use crate::linalg::RealMatrix;

/// The eight single-mode Gaussian channel classes, up to Gaussian unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelTag {
    A1,
    A2,
    B1,
    B2,
    B2Id,
    CLoss,
    CAmp,
    D,
}

impl ChannelTag {
    pub const ALL: [ChannelTag; 8] = [
        ChannelTag::A1,
        ChannelTag::A2,
        ChannelTag::B1,
        ChannelTag::B2,
        ChannelTag::B2Id,
        ChannelTag::CLoss,
        ChannelTag::CAmp,
        ChannelTag::D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelTag::A1 => "A1",
            ChannelTag::A2 => "A2",
            ChannelTag::B1 => "B1",
            ChannelTag::B2 => "B2",
            ChannelTag::B2Id => "B2_Id",
            ChannelTag::CLoss => "C_loss",
            ChannelTag::CAmp => "C_amp",
            ChannelTag::D => "D",
        }
    }

    /// The transmissivity fixed by the class, if any.
    pub fn fixed_tau(self) -> Option<f64> {
        match self {
            ChannelTag::A1 | ChannelTag::A2 => Some(0.0),
            ChannelTag::B1 | ChannelTag::B2 | ChannelTag::B2Id => Some(1.0),
            ChannelTag::CLoss | ChannelTag::CAmp | ChannelTag::D => None,
        }
    }

    pub fn admits_tau(self, tau: f64) -> bool {
        if !tau.is_finite() {
            return false;
        }
        match self {
            ChannelTag::A1 | ChannelTag::A2 => tau == 0.0,
            ChannelTag::B1 | ChannelTag::B2 | ChannelTag::B2Id => tau == 1.0,
            ChannelTag::CLoss => tau > 0.0 && tau < 1.0,
            ChannelTag::CAmp => tau >= 1.0,
            ChannelTag::D => tau <= 0.0,
        }
    }

    fn range_text(self) -> &'static str {
        match self {
            ChannelTag::A1 | ChannelTag::A2 => "τ = 0",
            ChannelTag::B1 | ChannelTag::B2 | ChannelTag::B2Id => "τ = 1",
            ChannelTag::CLoss => "0 < τ < 1",
            ChannelTag::CAmp => "τ ≥ 1",
            ChannelTag::D => "τ ≤ 0",
        }
    }
}

impl fmt::Display for ChannelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = ChannelTag::ALL.iter().map(|t| t.name()).collect();
                format!("unknown channel class `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// A catalogue entry: class tag, generalized transmissivity and thermal occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelClass {
    tag: ChannelTag,
    tau: f64,
    nbar: f64,
}

impl ChannelClass {
    pub fn new(tag: ChannelTag, tau: f64, nbar: f64) -> Result<Self, ChannelError> {
        if !tag.admits_tau(tau) {
            return Err(ChannelError::ParameterRange(format!(
                "class {tag} requires {}, got τ = {tau}",
                tag.range_text()
            )));
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(ChannelError::ParameterRange(format!(
                "thermal occupation must be finite and non-negative, got {nbar}"
            )));
        }
        Ok(Self { tag, tau, nbar })
    }

    /// For classes with a fixed transmissivity (A*, B*).
    pub fn fixed(tag: ChannelTag, nbar: f64) -> Result<Self, ChannelError> {
        let tau = tag.fixed_tau().ok_or_else(|| {
            ChannelError::ParameterRange(format!("class {tag} needs an explicit τ"))
        })?;
        Self::new(tag, tau, nbar)
    }

    pub fn tag(&self) -> ChannelTag {
        self.tag
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// `(T, N)` of the class; `d = 0` throughout.
    pub fn matrices(&self) -> (RealMatrix, RealMatrix) {
        let id = RealMatrix::identity(2);
        let z = RealMatrix::pauli_z();
        let thermal = 2.0 * self.nbar + 1.0;
        let tau = self.tau;
        match self.tag {
            ChannelTag::A1 => (RealMatrix::zeros(2, 2), id.scale(thermal)),
            ChannelTag::A2 => ((&z + &id).scale(0.5), id.scale(thermal)),
            ChannelTag::B1 => (id.clone(), (&id - &z).scale(0.5)),
            ChannelTag::B2 => (id.clone(), id.scale(self.nbar)),
            ChannelTag::B2Id => (id.clone(), RealMatrix::zeros(2, 2)),
            ChannelTag::CLoss => (id.scale(tau.sqrt()), id.scale((1.0 - tau) * thermal)),
            ChannelTag::CAmp => (id.scale(tau.sqrt()), id.scale((tau - 1.0) * thermal)),
            ChannelTag::D => (z.scale((-tau).sqrt()), id.scale((1.0 - tau) * thermal)),
        }
    }

    pub fn channel(&self) -> Result<GaussianChannel, ChannelError> {
        if self.tag == ChannelTag::B1 && self.nbar != 0.0 {
            log::warn!("class B1 has an n̄-independent noise matrix; ignoring n̄ = {}", self.nbar);
        }
        let (t, n) = self.matrices();
        make_channel(1, t, n, vec![0.0; 2])
    }
}

impl fmt::Display for ChannelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(τ={}, n̄={})", self.tag, self.tau, self.nbar)
    }
}

/// `from_class` in free-function form.
pub fn from_class(class: &ChannelClass) -> Result<GaussianChannel, ChannelError> {
    class.channel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &RealMatrix, b: &RealMatrix) -> bool {
        a.max_abs_diff(b) < 1e-15
    }

    #[test]
    fn loss_class_matrices() {
        let ch = from_class(&ChannelClass::new(ChannelTag::CLoss, 0.6, 0.0).unwrap()).unwrap();
        assert!(close(ch.transfer(), &RealMatrix::identity(2).scale(0.6f64.sqrt())));
        assert!((ch.noise().get(0, 0) - 0.4).abs() < 1e-15);
        assert!((ch.noise().get(1, 1) - 0.4).abs() < 1e-15);
        assert_eq!(ch.noise().get(0, 1), 0.0);
    }

    #[test]
    fn b1_matrices() {
        let ch = ChannelClass::fixed(ChannelTag::B1, 0.0).unwrap().channel().unwrap();
        assert!(close(ch.transfer(), &RealMatrix::identity(2)));
        assert!(close(ch.noise(), &RealMatrix::from_diagonal(&[0.0, 1.0])));
    }

    #[test]
    fn phase_conjugating_class_matrices() {
        let ch = ChannelClass::new(ChannelTag::D, -1.0, 0.0).unwrap().channel().unwrap();
        assert!(close(ch.transfer(), &RealMatrix::pauli_z()));
        assert!(close(ch.noise(), &RealMatrix::identity(2).scale(2.0)));
    }

    #[test]
    fn tau_ranges_enforced() {
        assert!(ChannelClass::new(ChannelTag::CLoss, 1.0, 0.0).is_err());
        assert!(ChannelClass::new(ChannelTag::CLoss, 0.0, 0.0).is_err());
        assert!(ChannelClass::new(ChannelTag::CAmp, 0.9, 0.0).is_err());
        assert!(ChannelClass::new(ChannelTag::D, 0.1, 0.0).is_err());
        assert!(ChannelClass::new(ChannelTag::A1, 0.5, 0.0).is_err());
        assert!(ChannelClass::new(ChannelTag::B2, 1.0, -0.1).is_err());
        assert!(ChannelClass::fixed(ChannelTag::CLoss, 0.0).is_err());
    }

    #[test]
    fn tag_names_round_trip() {
        for tag in ChannelTag::ALL {
            assert_eq!(tag.name().parse::<ChannelTag>().unwrap(), tag);
        }
        assert!("C_lossy".parse::<ChannelTag>().is_err());
    }

    #[test]
    fn random_catalogue_draws_are_cp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in ChannelTag::ALL {
            for _ in 0..200 {
                let nbar = rng.random_range(0.0..5.0);
                let tau = match tag {
                    ChannelTag::CLoss => rng.random_range(1e-6..1.0 - 1e-6),
                    ChannelTag::CAmp => rng.random_range(1.0..10.0),
                    ChannelTag::D => rng.random_range(-10.0..=0.0),
                    other => other.fixed_tau().unwrap(),
                };
                let class = ChannelClass::new(tag, tau, nbar).unwrap();
                let ch = class.channel().unwrap();
                assert!(ch.cp_report().is_psd, "{class}");
            }
        }
    }
}
