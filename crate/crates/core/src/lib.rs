//! Certification of incompatibility breaking for Gaussian bosonic channels via
//! s-ordered quasiprobability distributions.

pub mod certifier;
pub mod channels;
pub mod input;
pub mod linalg;
pub mod measurements;
pub mod oracle;
