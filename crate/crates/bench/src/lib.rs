//! Inputs shared by the benchmarks.

use polymorse::poly::{make_random_hull, Origin};
use polymorse::ReferencedPolyhedron;

pub const SIZES: [usize; 3] = [100, 1_000, 10_000];

/// A random hull of `n` sphere points, referenced at its centroid.
pub fn random_input(n: usize, seed: u64) -> ReferencedPolyhedron {
    make_random_hull(n, seed)
        .expect("random hull builds")
        .with_reference(Origin::Centroid)
        .expect("centroid is interior")
}
