//! Fixtures shared by the criterion benches.

use region_rrt_core::corpus::{generate, Bundle, Layout};
use region_rrt_core::sampling::RandomSource;

/// A 128x128 benchmark bundle with its ground-truth region.
pub fn fixture(layout: Layout) -> Bundle {
    generate(layout, 128, 6.0, 5.0, &mut RandomSource::new(0)).expect("benchmark layout")
}
