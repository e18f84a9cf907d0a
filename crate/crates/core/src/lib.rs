//! Exact arithmetic for Weierstrass curves built from Pythagorean triples:
//! group law, torsion classification, canonical heights, and regulator
//! determinants used as rank lower-bound certificates.

pub mod curve;
pub mod error;
pub mod factor;
pub mod families;
pub mod heights;
pub mod rational;
pub mod real;
pub mod regulator;
pub mod reproduce;
pub mod torsion;
pub mod triples;

pub use curve::{Curve, IntegralModel, Point};
pub use error::{Error, Result};
pub use families::{construct, FamilyId, FamilyInstance, Param};
pub use heights::{canonical_height, naive_height, HeightMachine, HeightValue};
pub use rational::{Int, Rational};
pub use real::Real;
pub use regulator::{height_pairing, regulator, IndependenceVerdict, RegulatorReport};
pub use reproduce::{reproduce, MatchFlag, ReproRow, ReproTable};
pub use torsion::{
    certify_positive_rank, nagell_lutz_torsion, point_order, CertificateKind, OrderVerdict,
    PositiveRankCertificate,
};
pub use triples::{enumerate_ppts, ppt_from_mn, triple_from_t, PythTriple, RationalTriple};
