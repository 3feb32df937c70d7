//! Sampling and spectral verification for proper list-colorings.
//!
//! The crate has three layers:
//!
//! * an exact layer — instances ([`instance`]), brute-force enumeration
//!   ([`oracle`]), influence matrices and their recursions ([`influence`]),
//!   the pairwise random walk, the exact Glauber transition matrix, and the
//!   eigenvalue identities tying them together ([`spectral`]);
//! * a simulation layer — a fast single-site Glauber sampler with
//!   total-variation and coupling diagnostics ([`dynamics`]);
//! * plumbing — graph generators ([`generators`]), instance file formats
//!   ([`io`]), and structured check reports ([`report`]).
//!
//! Every probabilistic quantity in the exact layer is derived from integer
//! coloring counts, so identity checks hold to near machine precision and
//! inequality checks are not polluted by Monte Carlo noise.

pub mod dynamics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod influence;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod region;
pub mod report;
pub mod spectral;

pub use error::{Color, Error, Result};
pub use graph::{Graph, VertexMap};
pub use instance::{
    is_delta_q_instance, InstanceCollection, ListColoringInstance, PairIndex, PartialColoring,
};
pub use oracle::{count_colorings, ColoringCount};
pub use region::{alpha_star, in_region, RegionParams};
pub use report::CheckReport;
