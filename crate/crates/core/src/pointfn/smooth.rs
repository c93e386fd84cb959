use crate::error::{Error, Result};
use crate::formalism::Seed;
use crate::ir::hash::{hash_bits, tags};
use crate::ir::BitStr;

/// Largest `n` for which the inner loop over all `2^n` inputs is run.
pub const MAX_SMOOTHNESS_N: usize = 14;

/// Fraction of uniform `(r, y)` pairs for which some `x` has `H(r || x) = y`, with `H`
/// truncated to `n` bits.
pub fn estimate_smoothness(n: usize, samples: usize, seed: &Seed) -> Result<f64> {
    if !(1..=MAX_SMOOTHNESS_N).contains(&n) {
        return Err(Error::UnsupportedParameter {
            class: "smoothness".into(),
            n,
        });
    }
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let mut hits = 0usize;
    for _ in 0..samples {
        let r = BitStr::random(n, &mut rng)?;
        let y = BitStr::random(n, &mut rng)?;
        let found = (0..1u64 << n).any(|v| {
            let x = BitStr::from_u64(v, n).expect("fits");
            hash_bits(tags::CHECK, &r.concat(&x), n) == y
        });
        hits += usize::from(found);
    }
    Ok(hits as f64 / samples as f64)
}
