//! Classical dynamics on `T*S¹` and `T*S¹ × S²`: canonical maps, trapped sets,
//! box counting and captive trajectories.

mod boxcount;
mod canonical;
mod captive;
mod trapped;

use nalgebra::Vector3;

pub use boxcount::{box_volume, box_volume_points, minkowski_dimension, write_box_csv, BoxCountResult, BoxGrid};
pub use canonical::{
    backward_graph, canonical_map, canonical_map_su2, canonical_map_u1, escape_radius, forward_orbit, h_field,
    h_field_integral, inverse_orbit, s_max, sup_norm_on_circle,
};
pub use captive::{captive_count, captive_counts, gap_bound, CaptiveGrid, GapBound, SphereLayout};
pub use trapped::{
    fibonacci_sphere, sample_trapped_set, sample_trapped_set_with, trapped_depth, write_cloud_csv, CloudPoint,
    TrappedCloud, TrappedOptions,
};

/// A point `(x, ξ)` or `(x, ξ, n)` of phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
    pub n: Option<Vector3<f64>>,
}

impl PhasePoint {
    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi, n: None }
    }

    pub fn with_sphere(x: f64, xi: f64, n: Vector3<f64>) -> Self {
        Self { x, xi, n: Some(n) }
    }
}
