//! Provenance graphs read as structural causal models.
//!
//! * [`model`]: finite-domain causal models, evaluation and interventions.
//! * [`cause`]: Halpern-Pearl weak and actual causes by exhaustive search.
//! * [`provenance`]: OPM-style graphs, their interpretation and compilation
//!   to causal situations.
//! * [`opm`]: the Datalog edge-inference rules and their audit against
//!   actual causation.
//! * [`approx`]: pointwise, local and global approximation, and the
//!   predictive-power relation.
//! * [`frontend`]: text formats, the workspace and the command line.
//! * [`corpus`]: the bundled examples.

pub mod approx;
pub mod cause;
pub mod corpus;
pub mod frontend;
pub mod model;
pub mod opm;
pub mod provenance;
