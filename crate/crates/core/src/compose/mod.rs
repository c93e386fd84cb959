//! Composition of obfuscators on a class with two independent assets: programs that
//! accept `x` iff its left half is `c1` and its right half is `c2`. Each half check is
//! either plain or salted-hash, so hashing one half maps the class into itself.

mod obf;
mod shape;

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::formalism::{
    parse_bits, AssetSpec, Attacker, Budget, CandidateSchema, InputHiding, Instance, Oracle,
    ProgramClass, PublicView, Seed,
};
use crate::ir::{BitStr, Program};

pub use obf::{compose, order_swap_distance, projection, Composed, HalfObf};
pub use shape::{HalfCheck, SplitShape};

pub const CLASS_ID: &str = "splitconj";

/// The two halves `(c1, c2)` of an instance.
pub fn halves_of(inst: &Instance) -> [BitStr; 2] {
    let h = inst.n / 2;
    let len = h.div_ceil(8);
    [
        BitStr::from_bytes(h, &inst.aux[..len]).expect("splitconj aux"),
        BitStr::from_bytes(h, &inst.aux[len..]).expect("splitconj aux"),
    ]
}

fn full_input(inst: &Instance) -> BitStr {
    let [c1, c2] = halves_of(inst);
    c1.concat(&c2)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SplitConjClass;

impl ProgramClass for SplitConjClass {
    fn id(&self) -> &str {
        CLASS_ID
    }

    fn n_range(&self) -> RangeInclusive<usize> {
        4..=256
    }

    fn supports(&self, n: usize) -> bool {
        self.n_range().contains(&n) && n.is_multiple_of(2)
    }

    /// Both halves uniform and independent, both checks plain.
    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance> {
        if !self.supports(n) {
            return Err(Error::UnsupportedParameter {
                class: CLASS_ID.into(),
                n,
            });
        }
        let mut rng = seed.rng();
        let c1 = BitStr::random(n / 2, &mut rng)?;
        let c2 = BitStr::random(n / 2, &mut rng)?;
        let program = SplitShape {
            n,
            halves: [
                HalfCheck::Plain { c: c1.clone() },
                HalfCheck::Plain { c: c2.clone() },
            ],
        }
        .build();
        let mut aux = c1.into_bytes();
        aux.extend_from_slice(c2.as_bytes());
        Ok(Instance { n, program, aux })
    }

    fn class_size_log2(&self, n: usize) -> f64 {
        n as f64
    }

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>> {
        vec![
            Arc::new(HalfAsset::new(1)),
            Arc::new(HalfAsset::new(2)),
            Arc::new(InputHiding::new(full_input)),
        ]
    }

    fn default_asset(&self) -> &str {
        "c1"
    }

    fn public_asset(&self) -> Option<&str> {
        Some("input")
    }

    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr> {
        vec![full_input(inst)]
    }
}

/// One half constant, `c1` or `c2`, checked against aux.
#[derive(Debug, Clone)]
pub struct HalfAsset {
    which: usize,
    id: &'static str,
}

impl HalfAsset {
    /// `which` is 1 for the left half and 2 for the right.
    pub fn new(which: usize) -> Self {
        assert!(which == 1 || which == 2);
        Self {
            which,
            id: if which == 1 { "c1" } else { "c2" },
        }
    }

    fn pick(&self, inst: &Instance) -> BitStr {
        halves_of(inst)[self.which - 1].clone()
    }
}

impl AssetSpec for HalfAsset {
    fn id(&self) -> &str {
        self.id
    }

    fn schema(&self, n: usize) -> CandidateSchema {
        CandidateSchema::Bits { width: n / 2 }
    }

    fn needs_aux(&self) -> bool {
        true
    }

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool> {
        Ok(parse_bits(cand, inst.n / 2)? == self.pick(inst))
    }

    fn true_asset(&self, inst: &Instance) -> Vec<u8> {
        self.pick(inst).into_bytes()
    }

    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let mut c = parse_bits(cand, inst.n / 2)?;
        if c == self.pick(inst) {
            c.flip_bit(rng.gen_range(0..c.width()));
        }
        Ok(c.into_bytes())
    }

    fn from_accepting_input(&self, _program: &Program, x: &BitStr) -> Option<Vec<u8>> {
        let h = x.width() / 2;
        let bits: Vec<bool> = x.bits().collect();
        let half = if self.which == 1 {
            &bits[..h]
        } else {
            &bits[h..]
        };
        Some(BitStr::from_bits(half.iter().copied()).ok()?.into_bytes())
    }

    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
        BitStr::random(n / 2, rng).expect("n >= 4").into_bytes()
    }
}

/// Reads one half's constant when that half is still a plain check; guesses otherwise.
#[derive(Debug, Clone)]
pub struct HalfCodeReader {
    which: usize,
    id: &'static str,
}

impl HalfCodeReader {
    pub fn new(which: usize) -> Self {
        assert!(which == 1 || which == 2);
        Self {
            which,
            id: if which == 1 {
                "half_codereader1"
            } else {
                "half_codereader2"
            },
        }
    }
}

impl Attacker for HalfCodeReader {
    fn id(&self) -> &str {
        self.id
    }

    fn budget(&self) -> Budget {
        Budget::CODE_ONLY
    }

    fn run(&self, view: &PublicView<'_>, _oracle: &mut Oracle<'_>, seed: &Seed) -> Result<Vec<u8>> {
        if let Ok(shape) = SplitShape::parse(&view.decode()?) {
            if let HalfCheck::Plain { c } = &shape.halves[self.which - 1] {
                return Ok(c.as_bytes().to_vec());
            }
        }
        Ok(view.asset.random_candidate(view.n, &mut seed.rng()))
    }
}
