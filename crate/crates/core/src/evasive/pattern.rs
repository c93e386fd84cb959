use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::formalism::{
    AssetSpec, InputHiding, Instance, Obfuscator, Overhead, ProgramClass, Seed,
};
use crate::ir::hash::{hash_bits, tags};
use crate::ir::{BitStr, Program, ProgramBuilder};

pub const PATTERN_CLASS_ID: &str = "pattern";

/// A string over `{0, 1, *}`. Stored as a mask of fixed positions plus their values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    fixed: BitStr,
    value: BitStr,
}

impl Pattern {
    /// `fixed` has a 1 at every non-wildcard position; `value` must be 0 at wildcards.
    pub fn new(fixed: BitStr, value: BitStr) -> Result<Self> {
        if fixed.width() != value.width() || !value.and(&fixed.not()).is_zero() {
            return Err(Error::Precondition(
                "pattern value set at a wildcard".into(),
            ));
        }
        if fixed.is_zero() {
            return Err(Error::EvasivenessViolated {
                n: fixed.width(),
                w: fixed.width(),
            });
        }
        Ok(Self { fixed, value })
    }

    /// Parses `0`, `1` and `*` (or `⋆`) characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut fixed = Vec::new();
        let mut value = Vec::new();
        for ch in s.chars() {
            let (f, v) = match ch {
                '0' => (true, false),
                '1' => (true, true),
                '*' | '⋆' => (false, false),
                _ => return Err(Error::Precondition(format!("bad pattern character {ch:?}"))),
            };
            fixed.push(f);
            value.push(v);
        }
        Self::new(BitStr::from_bits(fixed)?, BitStr::from_bits(value)?)
    }

    pub fn width(&self) -> usize {
        self.fixed.width()
    }

    pub fn wildcards(&self) -> usize {
        self.width() - self.fixed.count_ones()
    }

    pub fn fixed_mask(&self) -> &BitStr {
        &self.fixed
    }

    /// The pattern with every wildcard set to 0. Itself a matching input.
    pub fn value(&self) -> &BitStr {
        &self.value
    }

    /// The fixed bits alone, in order.
    pub fn fixed_bits(&self) -> BitStr {
        self.value
            .project(&self.fixed)
            .expect("at least one fixed bit")
    }

    pub fn matches(&self, x: &BitStr) -> bool {
        x.width() == self.width() && x.and(&self.fixed) == self.value
    }

    pub fn to_aux(&self) -> Vec<u8> {
        let mut out = self.fixed.as_bytes().to_vec();
        out.extend_from_slice(self.value.as_bytes());
        out
    }

    pub fn from_aux(n: usize, aux: &[u8]) -> Result<Self> {
        let half = n.div_ceil(8);
        if aux.len() != 2 * half {
            return Err(Error::Precondition("pattern aux length".into()));
        }
        Self::new(
            BitStr::from_bytes(n, &aux[..half])?,
            BitStr::from_bytes(n, &aux[half..])?,
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (fixed, v) in self.fixed.bits().zip(self.value.bits()) {
            f.write_str(match (fixed, v) {
                (false, _) => "*",
                (true, false) => "0",
                (true, true) => "1",
            })?;
        }
        Ok(())
    }
}

/// `PROJECT x fixed; CONST bits; EQ; OUTPUT`.
pub fn pattern_program(p: &Pattern) -> Program {
    let mut b = ProgramBuilder::new(p.width(), PATTERN_CLASS_ID);
    let proj = b.project(b.input(), p.fixed.clone());
    let k = b.konst(p.fixed_bits());
    let e = b.eq(proj, k);
    b.output(e)
}

/// Uniform wildcard positions (exactly `w` of them) and uniform fixed bits.
pub fn gen_pattern(n: usize, w: usize, seed: &Seed) -> Result<Instance> {
    if w == 0 {
        return Err(Error::Precondition(
            "pattern needs at least one wildcard".into(),
        ));
    }
    if 2 * w > n {
        return Err(Error::EvasivenessViolated { n, w });
    }
    let mut rng = seed.rng();
    let mut fixed = BitStr::zeros(n)?.not();
    for i in index::sample(&mut rng, n, w) {
        fixed.set_bit(i, false);
    }
    let value = BitStr::random(n, &mut rng)?.and(&fixed);
    let p = Pattern::new(fixed, value)?;
    Ok(Instance {
        n,
        program: pattern_program(&p),
        aux: p.to_aux(),
    })
}

fn pattern_of(inst: &Instance) -> Pattern {
    Pattern::from_aux(inst.n, &inst.aux).expect("pattern aux")
}

fn pattern_witness(inst: &Instance) -> BitStr {
    pattern_of(inst).value.clone()
}

/// Wildcard patterns with `w` wildcards, or `max(1, n/4)` when `w` is unset.
#[derive(Debug, Clone, Copy, Default)]
pub struct PatternClass {
    pub w: Option<usize>,
}

impl PatternClass {
    pub fn wildcards(&self, n: usize) -> usize {
        self.w.unwrap_or((n / 4).max(1))
    }
}

impl ProgramClass for PatternClass {
    fn id(&self) -> &str {
        PATTERN_CLASS_ID
    }

    fn n_range(&self) -> RangeInclusive<usize> {
        2..=256
    }

    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance> {
        if !self.n_range().contains(&n) {
            return Err(Error::UnsupportedParameter {
                class: PATTERN_CLASS_ID.into(),
                n,
            });
        }
        gen_pattern(n, self.wildcards(n), seed)
    }

    fn class_size_log2(&self, n: usize) -> f64 {
        let w = self.wildcards(n);
        let binom: f64 = (0..w)
            .map(|i| ((n - i) as f64 / (w - i) as f64).log2())
            .sum();
        binom + (n - w) as f64
    }

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>> {
        vec![Arc::new(InputHiding::new(pattern_witness))]
    }

    fn default_asset(&self) -> &str {
        "input"
    }

    fn public_asset(&self) -> Option<&str> {
        Some("input")
    }

    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr> {
        let p = pattern_of(inst);
        let all_set = p.value.or(&p.fixed.not());
        vec![p.value, all_set]
    }
}

/// Keeps the wildcard mask in the clear and hides the fixed bits behind a salted hash:
/// `PROJECT x W; CONST r; CONCAT; HASH; CONST y; EQ; OUTPUT`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PatternHashObf;

impl Obfuscator for PatternHashObf {
    fn id(&self) -> &str {
        "obf_pattern_hash"
    }

    fn class_id(&self) -> &str {
        PATTERN_CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        if inst.program.class_tag != PATTERN_CLASS_ID {
            return Err(Error::ClassMismatch(
                PATTERN_CLASS_ID.into(),
                inst.program.class_tag.clone(),
            ));
        }
        let n = inst.n;
        let p = pattern_of(inst);
        let r = BitStr::random(n, &mut seed.rng())?;
        let target = hash_bits(tags::CHECK, &r.concat(&p.fixed_bits()), n);

        let mut b = ProgramBuilder::new(n, PATTERN_CLASS_ID);
        let proj = b.project(b.input(), p.fixed.clone());
        let salt = b.konst(r);
        let salted = b.concat(salt, proj);
        let h = b.hash(tags::CHECK, salted, n);
        let t = b.konst(target);
        let e = b.eq(h, t);
        Ok(b.output(e))
    }

    fn overhead(&self) -> Overhead {
        Overhead {
            size_factor: 2.0,
            step_factor: 2.0,
        }
    }

    fn hash_based(&self) -> bool {
        true
    }
}
