//! Evasive predicate classes: wildcard patterns and compute-and-compare programs, plus
//! a learnable threshold class that shows why learnable assets cannot be protected.

mod cc;
mod pattern;
mod threshold;

use crate::error::Result;
use crate::formalism::Instance;
use crate::ir::{accepts, execute, BitStr};

pub use cc::{cc_parts, cc_program, CcClass, CcObf, PayloadAsset, CC_CLASS_ID};
pub use pattern::{
    gen_pattern, pattern_program, Pattern, PatternClass, PatternHashObf, PATTERN_CLASS_ID,
};
pub use threshold::{
    learn_threshold, learn_threshold_via, threshold_program, Learned, THRESHOLD_CLASS_ID,
};

/// Input-hiding check: does the instance program accept `cand`? Never reads aux.
pub fn verify_input_hiding(inst: &Instance, cand: &BitStr) -> Result<bool> {
    Ok(accepts(&execute(&inst.program, cand)?))
}
