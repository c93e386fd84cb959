use crate::error::{Error, Result};
use crate::formalism::Oracle;
use crate::ir::{BitStr, Program, ProgramBuilder};

pub const THRESHOLD_CLASS_ID: &str = "threshold";

/// `P_C(x) = [x < C]` on `n`-bit unsigned inputs.
pub fn threshold_program(n: usize, c: u64) -> Result<Program> {
    if !(1..=63).contains(&n) || c >> n != 0 {
        return Err(Error::Precondition(format!(
            "threshold {c} out of range for n = {n}"
        )));
    }
    let mut b = ProgramBuilder::new(n, THRESHOLD_CLASS_ID);
    let k = b.konst(BitStr::from_u64(c, n)?);
    let lt = b.lt(b.input(), k);
    Ok(b.output(lt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Learned {
    pub c: u64,
    pub queries: u32,
}

/// Recovers `C` in `[0, 2^n)` from a membership oracle for `x < C` by binary search over
/// `[0, 2^n]`, using at most `n + 1` queries.
///
/// Responses are checked for consistency with a single threshold. An oracle that accepts
/// every query up to `2^n - 1` has no threshold in range and is reported as non-monotone.
pub fn learn_threshold<F>(n: usize, mut oracle: F) -> Result<Learned>
where
    F: FnMut(u64) -> Result<bool>,
{
    if !(1..=63).contains(&n) {
        return Err(Error::Precondition(format!(
            "threshold width {n} not in 1..=63"
        )));
    }
    let (mut lo, mut hi) = (0u64, 1u64 << n);
    let mut max_true: Option<u64> = None;
    let mut min_false: Option<u64> = None;
    let mut queries = 0u32;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        queries += 1;
        if oracle(mid)? {
            max_true = max_true.max(Some(mid));
            lo = mid + 1;
        } else {
            min_false = Some(min_false.map_or(mid, |f| f.min(mid)));
            hi = mid;
        }
        if let (Some(t), Some(f)) = (max_true, min_false) {
            if t >= f {
                return Err(Error::NotMonotone(format!("accepts {t} but rejects {f}")));
            }
        }
    }
    if lo == 1u64 << n {
        return Err(Error::NotMonotone(format!(
            "accepts {}, so no threshold below 2^{n} fits",
            (1u64 << n) - 1
        )));
    }
    Ok(Learned { c: lo, queries })
}

/// [`learn_threshold`] against a budgeted oracle for an `n`-bit threshold program.
pub fn learn_threshold_via(oracle: &mut Oracle<'_>) -> Result<Learned> {
    let n = oracle.input_width();
    learn_threshold(n, |x| oracle.accepts(&BitStr::from_u64(x, n)?))
}
