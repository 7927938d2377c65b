//! Certified primal-dual brackets for two families of extremal problems:
//! sign-support constrained nonnegative trigonometric polynomials (the α/ω
//! duality) and nonnegative positive definite sequences on Z (the
//! C(L,N) = K(L,N) duality).
//!
//! Every reported bound is certified: grid relaxations are converted to
//! rigorous one-sided bounds via gradient-bound margins or l1 estimates,
//! and each run asserts weak duality between the two sides.

pub mod cones;
pub mod config;
pub mod error;
pub mod lp;
pub mod oracle;
pub mod revesz;
pub mod runner;
pub mod seqcore;
pub mod trig;
pub mod wiener;

pub use error::ConeDualError;
pub use seqcore::{IndexSet, MultiIndex, SignSupportPattern, SymmetricSequence};
pub use trig::{CertStatus, CertifiedValue, TorusGrid, DEFAULT_EPS_PD};
