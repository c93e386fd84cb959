use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::formalism::{
    parse_bits, AssetSpec, CandidateSchema, InputHiding, Instance, Obfuscator, Overhead,
    ProgramClass, Seed,
};
use crate::ir::hash::{hash_bits, tags};
use crate::ir::{accepts, execute, BitStr, Program, ProgramBuilder};

pub const CC_CLASS_ID: &str = "cc";

/// Trigger `c` and payload `m` of a compute-and-compare instance.
pub fn cc_parts(inst: &Instance) -> (BitStr, BitStr) {
    let half = inst.n.div_ceil(8);
    let c = BitStr::from_bytes(inst.n, &inst.aux[..half]).expect("cc aux");
    let m = BitStr::from_bytes(inst.n, &inst.aux[half..]).expect("cc aux");
    (c, m)
}

fn trigger_of(inst: &Instance) -> BitStr {
    cc_parts(inst).0
}

fn flag(set: bool) -> BitStr {
    BitStr::from_u64(u64::from(set), 1).expect("width 1")
}

/// Maps `c` to `1 || m` and every other input to the all-zero reject value.
pub fn cc_program(c: &BitStr, m: &BitStr) -> Program {
    let n = c.width();
    let mut b = ProgramBuilder::new(n, CC_CLASS_ID);
    let k = b.konst(c.clone());
    let e = b.eq(b.input(), k);
    let hit = b.konst(flag(true).concat(m));
    let miss = b.konst(BitStr::zeros(n + 1).expect("n >= 1"));
    let out = b.ite(e, hit, miss);
    b.output(out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CcClass;

impl ProgramClass for CcClass {
    fn id(&self) -> &str {
        CC_CLASS_ID
    }

    fn n_range(&self) -> RangeInclusive<usize> {
        1..=256
    }

    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance> {
        if !self.n_range().contains(&n) {
            return Err(Error::UnsupportedParameter {
                class: CC_CLASS_ID.into(),
                n,
            });
        }
        let mut rng = seed.rng();
        let c = BitStr::random(n, &mut rng)?;
        let m = BitStr::random(n, &mut rng)?;
        let program = cc_program(&c, &m);
        let mut aux = c.into_bytes();
        aux.extend_from_slice(m.as_bytes());
        Ok(Instance { n, program, aux })
    }

    fn class_size_log2(&self, n: usize) -> f64 {
        2.0 * n as f64
    }

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>> {
        vec![
            Arc::new(InputHiding::named("trigger", trigger_of)),
            Arc::new(PayloadAsset),
        ]
    }

    fn default_asset(&self) -> &str {
        "trigger"
    }

    fn public_asset(&self) -> Option<&str> {
        Some("trigger")
    }

    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr> {
        vec![trigger_of(inst)]
    }
}

/// The payload `m`, checked against aux.
#[derive(Debug, Clone, Copy, Default)]
pub struct PayloadAsset;

impl AssetSpec for PayloadAsset {
    fn id(&self) -> &str {
        "payload"
    }

    fn schema(&self, n: usize) -> CandidateSchema {
        CandidateSchema::Bits { width: n }
    }

    fn needs_aux(&self) -> bool {
        true
    }

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool> {
        Ok(parse_bits(cand, inst.n)? == cc_parts(inst).1)
    }

    fn true_asset(&self, inst: &Instance) -> Vec<u8> {
        cc_parts(inst).1.into_bytes()
    }

    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let mut m = parse_bits(cand, inst.n)?;
        if m == cc_parts(inst).1 {
            m.flip_bit(rng.gen_range(0..inst.n));
        }
        Ok(m.into_bytes())
    }

    /// Running the program on its trigger releases the payload.
    fn from_accepting_input(&self, program: &Program, x: &BitStr) -> Option<Vec<u8>> {
        let out = execute(program, x).ok()?;
        if !accepts(&out) || out.width() < 2 {
            return None;
        }
        Some(BitStr::from_bits(out.bits().skip(1)).ok()?.into_bytes())
    }

    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
        BitStr::random(n, rng).expect("n >= 1").into_bytes()
    }
}

/// Lockable compute-and-compare: `y = H_check(r || c)`, `z = m ^ H_mask(r || c)`, and the
/// program outputs `1 || (z ^ H_mask(r || x))` when `H_check(r || x) = y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CcObf;

impl Obfuscator for CcObf {
    fn id(&self) -> &str {
        "obf_cc"
    }

    fn class_id(&self) -> &str {
        CC_CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        if inst.program.class_tag != CC_CLASS_ID {
            return Err(Error::ClassMismatch(
                CC_CLASS_ID.into(),
                inst.program.class_tag.clone(),
            ));
        }
        let n = inst.n;
        let (c, m) = cc_parts(inst);
        let r = BitStr::random(n, &mut seed.rng())?;
        let rc = r.concat(&c);
        let y = hash_bits(tags::CHECK, &rc, n);
        let z = m.xor(&hash_bits(tags::MASK, &rc, n));

        let mut b = ProgramBuilder::new(n, CC_CLASS_ID);
        let salt = b.konst(r);
        let salted = b.concat(salt, b.input());
        let h = b.hash(tags::CHECK, salted, n);
        let target = b.konst(y);
        let hit = b.eq(h, target);
        let pad = b.hash(tags::MASK, salted, n);
        let masked = b.konst(z);
        let payload = b.xor(masked, pad);
        let one = b.konst(flag(true));
        let released = b.concat(one, payload);
        let miss = b.konst(BitStr::zeros(n + 1)?);
        let out = b.ite(hit, released, miss);
        Ok(b.output(out))
    }

    fn overhead(&self) -> Overhead {
        Overhead {
            size_factor: 2.0,
            step_factor: 2.5,
        }
    }

    fn hash_based(&self) -> bool {
        true
    }
}
