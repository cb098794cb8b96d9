//! Shared inputs for the benchmarks.

use shuttlecf::fixtures::synthetic_segments;
use shuttlecf::models::defaults;
use shuttlecf::{FollowingSegment, ModelKind};

/// Segments followed by the default IDM at a 60 ft initial gap.
pub fn segments(pieces: usize) -> Vec<FollowingSegment> {
    synthetic_segments(&defaults::for_kind(ModelKind::Idm), 60.0, pieces).expect("fixture segments")
}
