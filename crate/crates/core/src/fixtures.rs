//! Small hand-specified weight grids used by tests and the self-test.

use crate::lattice::{BoxRegion, Site};
use crate::weights::WeightField;

/// The 3x3 grid on `[0,2]^2`, rows listed from `c2 = 0` upward.
pub fn w3() -> WeightField {
    let region = BoxRegion::square_from_origin(3, 3).unwrap();
    WeightField::from_values(region, vec![1.0, 3.0, 1.0, 2.0, 0.0, 2.0, 4.0, 1.0, 5.0]).unwrap()
}

/// 2x2 grid with `w(0,0)=1, w(1,0)=2, w(0,1)=2, w(1,1)=0`: both paths to `(1,1)` score 3.
pub fn tie_grid() -> WeightField {
    tie_grid_extended(2)
}

/// The tie grid padded with zero weights to `[0, side-1]^2`.
pub fn tie_grid_extended(side: i64) -> WeightField {
    let region = BoxRegion::square_from_origin(side, side).unwrap();
    WeightField::from_fn(region, |x| match (x.c1, x.c2) {
        (0, 0) => 1.0,
        (1, 0) | (0, 1) => 2.0,
        _ => 0.0,
    })
}

/// Convenience constructor for sites in tests.
pub fn s(c1: i64, c2: i64) -> Site {
    Site::new(c1, c2)
}
