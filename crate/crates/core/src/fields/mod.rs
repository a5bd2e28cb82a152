//! State containers, hydrostatic reconstructions, the scaling map and norms.

pub mod norms;
pub mod scaling;
pub mod snapshot;
pub mod state;
pub mod vertical;

pub use norms::{
    difference_norms, h1_norm, h1_seminorm, lebesgue_norm, DifferenceNorms, DifferenceSample,
};
pub use scaling::{scale_map, unscale_map, PhysicalConstants, PhysicalState};
pub use snapshot::Snapshot;
pub use state::{BoussinesqState, PEState};
pub use vertical::{diagnose_pressure, diagnose_w, vertical_integral_from_zero};
