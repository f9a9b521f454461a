//! Gauge-fixed electromagnetic modes of step-index optical fibers, with the
//! full physical/gauge/ghost mode sector, Klein-Gordon normalization,
//! weak-gravitational-field transformations, Krein-space Fock states, and
//! fiber interferometer output probabilities.
//!
//! All internal math uses geometric units with lengths in micrometres and
//! c = 1, so angular frequencies and propagation constants are in rad/um.
//! SI conversion happens only at the CLI boundary.

// domain guards are written as !(x > 0.0) so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference values are frozen with a full 17 significant digits
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod fiber_modes;
pub mod gravity;
pub mod interferometry;
pub mod klein_gordon;
pub mod quadrature;
pub mod quantum_states;
pub mod specfun;

pub use error::{Error, Result};
pub use fiber_modes::{
    DispersionPoint, FiberSpec, ModeCoefficients, ModeFamily, ModeKey, ModeSolution, RadialField,
};
pub use gravity::{PotentialContext, PpnMetric};
pub use interferometry::{MziSpec, TimeBinSpec};
pub use klein_gordon::ReducedProduct;
pub use quantum_states::{BinSet, ExcitationKind, GramStructure, KreinState, ModeBin};
