//! Point functions `P_c(x) = [x == c]` with a salted-hash obfuscator, an XOR obfuscator
//! that a code reader undoes, and the generic guessing attackers.

mod attacks;
mod smooth;

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::formalism::{
    parse_bits, AssetSpec, CandidateSchema, InputHiding, Instance, Obfuscator, Overhead,
    ProgramClass, Seed,
};
use crate::ir::hash::{hash_bits, tags};
use crate::ir::{BitStr, Program, ProgramBuilder};

pub use attacks::{BruteForce, ConstReader, XorCodeReader};
pub use smooth::{estimate_smoothness, MAX_SMOOTHNESS_N};

pub const CLASS_ID: &str = "pointfn";
pub const MAX_N: usize = 256;

/// `CONST c; EQ x c; OUTPUT`.
pub fn point_program(c: &BitStr) -> Program {
    let mut b = ProgramBuilder::new(c.width(), CLASS_ID);
    let k = b.konst(c.clone());
    let e = b.eq(b.input(), k);
    b.output(e)
}

/// The hidden point of an instance.
pub fn point_of(inst: &Instance) -> BitStr {
    BitStr::from_bytes(inst.n, &inst.aux).expect("point aux holds n bits")
}

fn check_class(inst: &Instance) -> Result<()> {
    if inst.program.class_tag != CLASS_ID {
        return Err(Error::ClassMismatch(
            CLASS_ID.into(),
            inst.program.class_tag.clone(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PointClass;

impl ProgramClass for PointClass {
    fn id(&self) -> &str {
        CLASS_ID
    }

    fn n_range(&self) -> RangeInclusive<usize> {
        1..=MAX_N
    }

    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance> {
        if !self.n_range().contains(&n) {
            return Err(Error::UnsupportedParameter {
                class: CLASS_ID.into(),
                n,
            });
        }
        let c = BitStr::random(n, &mut seed.rng())?;
        Ok(Instance {
            n,
            program: point_program(&c),
            aux: c.into_bytes(),
        })
    }

    fn class_size_log2(&self, n: usize) -> f64 {
        n as f64
    }

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>> {
        vec![Arc::new(PointAsset), Arc::new(InputHiding::new(point_of))]
    }

    fn default_asset(&self) -> &str {
        "point"
    }

    fn public_asset(&self) -> Option<&str> {
        Some("input")
    }

    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr> {
        vec![point_of(inst)]
    }
}

/// The point `c` itself, checked against aux.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointAsset;

impl AssetSpec for PointAsset {
    fn id(&self) -> &str {
        "point"
    }

    fn schema(&self, n: usize) -> CandidateSchema {
        CandidateSchema::Bits { width: n }
    }

    fn needs_aux(&self) -> bool {
        true
    }

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool> {
        Ok(parse_bits(cand, inst.n)? == point_of(inst))
    }

    fn true_asset(&self, inst: &Instance) -> Vec<u8> {
        inst.aux.clone()
    }

    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let mut x = parse_bits(cand, inst.n)?;
        if x == point_of(inst) {
            x.flip_bit(rng.gen_range(0..inst.n));
        }
        Ok(x.into_bytes())
    }

    fn from_accepting_input(&self, _program: &Program, x: &BitStr) -> Option<Vec<u8>> {
        Some(x.as_bytes().to_vec())
    }

    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
        BitStr::random(n, rng).expect("n >= 1").into_bytes()
    }
}

/// `CONST r; CONCAT r x; HASH; CONST c'; EQ; OUTPUT` with `c' = H(r || c)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashPointObf;

impl Obfuscator for HashPointObf {
    fn id(&self) -> &str {
        "obf_hash"
    }

    fn class_id(&self) -> &str {
        CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        check_class(inst)?;
        let n = inst.n;
        let r = BitStr::random(n, &mut seed.rng())?;
        let target = hash_bits(tags::CHECK, &r.concat(&point_of(inst)), n);

        let mut b = ProgramBuilder::new(n, CLASS_ID);
        let salt = b.konst(r);
        let salted = b.concat(salt, b.input());
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

/// `CONST r; XOR r x; CONST c'; EQ; OUTPUT` with `c' = r ^ c`.
#[derive(Debug, Clone, Copy, Default)]
pub struct XorPointObf;

impl Obfuscator for XorPointObf {
    fn id(&self) -> &str {
        "obf_xor"
    }

    fn class_id(&self) -> &str {
        CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        check_class(inst)?;
        let r = BitStr::random(inst.n, &mut seed.rng())?;
        let masked = r.xor(&point_of(inst));

        let mut b = ProgramBuilder::new(inst.n, CLASS_ID);
        let k = b.konst(r);
        let y = b.xor(k, b.input());
        let t = b.konst(masked);
        let e = b.eq(y, t);
        Ok(b.output(e))
    }

    fn overhead(&self) -> Overhead {
        Overhead {
            size_factor: 2.0,
            step_factor: 2.0,
        }
    }
}
