use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formalism::{Instance, Obfuscator, Overhead, ProgramClass, Seed};
use crate::ir::hash::{hash_bits, tags};
use crate::ir::{BitStr, Program};

use super::{halves_of, HalfCheck, SplitShape, CLASS_ID};

/// Replaces one half's check with a freshly salted hash check and leaves the other alone.
#[derive(Debug, Clone)]
pub struct HalfObf {
    which: usize,
    id: &'static str,
}

impl HalfObf {
    /// `which` is 1 for the left half and 2 for the right.
    pub fn new(which: usize) -> Self {
        assert!(which == 1 || which == 2);
        Self {
            which,
            id: if which == 1 { "obf_half1" } else { "obf_half2" },
        }
    }
}

impl Obfuscator for HalfObf {
    fn id(&self) -> &str {
        self.id
    }

    fn class_id(&self) -> &str {
        CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        let mut shape = SplitShape::parse(&inst.program)?;
        let c = halves_of(inst)[self.which - 1].clone();
        let salt = BitStr::random(c.width(), &mut seed.rng())?;
        let target = hash_bits(tags::CHECK, &salt.concat(&c), inst.n);
        shape.halves[self.which - 1] = HalfCheck::Hashed { salt, target };
        Ok(shape.build())
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

/// `b` applied to the output of `a`, with independent seeds and the same aux.
#[derive(Clone)]
pub struct Composed {
    a: Arc<dyn Obfuscator>,
    b: Arc<dyn Obfuscator>,
    id: String,
}

pub fn compose(a: Arc<dyn Obfuscator>, b: Arc<dyn Obfuscator>) -> Result<Composed> {
    if a.class_id() != b.class_id() {
        return Err(Error::ClassMismatch(
            a.class_id().to_string(),
            b.class_id().to_string(),
        ));
    }
    let id = format!("{}+{}", a.id(), b.id());
    Ok(Composed { a, b, id })
}

fn apply_in_order(
    a: &dyn Obfuscator,
    b: &dyn Obfuscator,
    inst: &Instance,
    seed: &Seed,
) -> Result<Program> {
    let first = a.apply(inst, &seed.derive("first"))?;
    let mid = Instance {
        n: inst.n,
        program: first,
        aux: inst.aux.clone(),
    };
    b.apply(&mid, &seed.derive("second"))
}

impl Obfuscator for Composed {
    fn id(&self) -> &str {
        &self.id
    }

    fn class_id(&self) -> &str {
        self.a.class_id()
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        apply_in_order(self.a.as_ref(), self.b.as_ref(), inst, seed)
    }

    fn overhead(&self) -> Overhead {
        let (x, y) = (self.a.overhead(), self.b.overhead());
        Overhead {
            size_factor: x.size_factor * y.size_factor,
            step_factor: x.step_factor * y.step_factor,
        }
    }

    fn hash_based(&self) -> bool {
        self.a.hash_based() || self.b.hash_based()
    }
}

/// Serialized program with every constant zeroed. Keeps instruction structure, widths,
/// immediates and class tag, and drops the values that fresh salts randomize.
pub fn projection(p: &Program) -> Result<Vec<u8>> {
    let mut q = p.clone();
    for c in &mut q.consts {
        *c = BitStr::zeros(c.width())?;
    }
    Ok(q.to_bytes()?)
}

/// Total-variation distance between the projected output distributions of
/// "`a` then `b`" and "`b` then `a`", estimated from `samples` instances.
pub fn order_swap_distance(
    class: &dyn ProgramClass,
    a: &dyn Obfuscator,
    b: &dyn Obfuscator,
    n: usize,
    samples: usize,
    seed: &Seed,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let mut counts: HashMap<Vec<u8>, [i64; 2]> = HashMap::new();
    for i in 0..samples {
        let s = seed.trial(i as u64);
        let inst = crate::formalism::sample_instance(class, n, &s.derive("instance"))?;
        let ab = apply_in_order(a, b, &inst, &s.derive("ab"))?;
        let ba = apply_in_order(b, a, &inst, &s.derive("ba"))?;
        counts.entry(projection(&ab)?).or_default()[0] += 1;
        counts.entry(projection(&ba)?).or_default()[1] += 1;
    }
    let diff: i64 = counts.values().map(|[x, y]| (x - y).abs()).sum();
    Ok(diff as f64 / (2.0 * samples as f64))
}
