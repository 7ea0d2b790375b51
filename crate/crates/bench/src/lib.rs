//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use spme_core::analysis::InitialProfile;
use spme_core::{FieldState, SpatialGrid};

/// Unit box on a symmetric Cartesian grid with `cells` cells.
pub fn box_state(cells: usize) -> FieldState {
    let grid = Arc::new(SpatialGrid::cartesian(-10.0, 10.0, cells).expect("valid grid"));
    InitialProfile::Box {
        half_width: 1.0,
        height: 1.0,
    }
    .state(grid, 2.0)
    .expect("valid profile")
}
