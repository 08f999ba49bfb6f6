//! Index functions, the conditional-stability and variational source
//! condition checkers, and the a-priori parameter choice.

mod check;
mod index;

pub use check::{calibrate_vsc_constant, check_stability, check_vsc, Sample, StabilityReport, VscReport, VscSetting};
pub use index::{alpha_choice, HolderIndex, IndexFunction, IndexKind, SourceNorms};
