//! Array geometry, steering vectors, visibility regions and channel synthesis.

mod geometry;
mod path;
mod scenario;
mod steering;

pub use geometry::{build_geometry, ArrayGeometry, SPEED_OF_LIGHT};
pub use path::{synth_channel, Path, Regime, UserChannel, UserKind};
pub use scenario::{
    dbm_to_watts, generate_scenario, vr_layout, ReceiverType, Scenario, SCATTERER_MIN_SEPARATION,
};
pub use steering::{ff_steering, nf_element_distances, nf_steering, visibility_vector};
