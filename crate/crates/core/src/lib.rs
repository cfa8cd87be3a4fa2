//! Exact computation and verification of integrality for the canonical
//! coordinate `q(z) = z exp(G/F)` and the maps `q_L(z) = exp(G_L/F)` attached
//! to a balanced factorial ratio `prod (e_i n)! / prod (f_j n)!`.

pub mod arith;
pub mod corpus;
pub mod error;
pub mod json;
pub mod landau;
pub mod mirror;
pub mod padic;
pub mod series;
pub mod zhou;

pub use error::{Error, Result};
pub use landau::{Classification, FactorialRatioSpec, LandauProfile, PochhammerForm};
pub use mirror::{MirrorMapBundle, MirrorMaps, NonIntegralityWitness, Target};
pub use padic::{PadicMembershipReport, ScanBounds, Valuation};
pub use series::{IntegralityReport, RootExponentCertificate, TruncatedSeries};
pub use zhou::ZhouInstance;
