use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::formalism::{Attacker, Budget, CandidateSchema, Oracle, PublicView, Seed};
use crate::ir::{BitStr, Instr, Program, Reg};

/// Reads `r` and `c'` out of the XOR template and returns `r ^ c'`.
#[derive(Debug, Clone, Copy, Default)]
pub struct XorCodeReader;

impl XorCodeReader {
    /// The two masking constants, if `p` has the XOR template shape.
    pub fn match_template(p: &Program) -> Result<(BitStr, BitStr)> {
        let mismatch = |why: &str| Error::TemplateMismatch(format!("xor template: {why}"));
        let n = p.input_width;
        let width_n_const = |r: Reg| p.const_of(r).filter(|c| c.width() == n);

        let out = p.output_reg().ok_or_else(|| mismatch("no output"))?;
        let Some(Instr::Eq { a, b, .. }) = p.definition(out) else {
            return Err(mismatch("output is not an equality"));
        };
        let (xored, target) = match (width_n_const(*a), width_n_const(*b)) {
            (None, Some(t)) => (*a, t),
            (Some(t), None) => (*b, t),
            _ => return Err(mismatch("equality does not compare against one constant")),
        };
        let Some(Instr::Xor { a, b, .. }) = p.definition(xored) else {
            return Err(mismatch("compared value is not an xor"));
        };
        let mask = match (*a, *b) {
            (Reg::INPUT, m) | (m, Reg::INPUT) => width_n_const(m),
            _ => None,
        }
        .ok_or_else(|| mismatch("xor does not mask the input with a constant"))?;
        Ok((mask.clone(), target.clone()))
    }
}

impl Attacker for XorCodeReader {
    fn id(&self) -> &str {
        "xor_codereader"
    }

    fn budget(&self) -> Budget {
        Budget::CODE_ONLY
    }

    fn run(
        &self,
        view: &PublicView<'_>,
        _oracle: &mut Oracle<'_>,
        _seed: &Seed,
    ) -> Result<Vec<u8>> {
        let (r, masked) = Self::match_template(&view.decode()?)?;
        Ok(r.xor(&masked).into_bytes())
    }
}

/// Queries `q` distinct uniform inputs and answers with the first accepted one.
///
/// Inputs come from one seeded stream of distinct values, so a run with budget `q`
/// queries a prefix of what a run with a larger budget queries. Without a hit the guess
/// is the next stream element, uniform over the inputs not yet queried.
#[derive(Debug, Clone)]
pub struct BruteForce {
    q: u64,
    id: String,
}

/// Step allowance per query, far above any generator program's cost.
const STEPS_PER_QUERY: u64 = 1 << 20;

impl BruteForce {
    pub const DEFAULT_Q: u64 = 16;

    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("brute force needs q >= 1".into()));
        }
        let id = if q == Self::DEFAULT_Q {
            "bruteforce".to_string()
        } else {
            format!("bruteforce:{q}")
        };
        Ok(Self { q, id })
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl Attacker for BruteForce {
    fn id(&self) -> &str {
        &self.id
    }

    fn budget(&self) -> Budget {
        Budget {
            max_queries: self.q,
            max_steps: self.q.saturating_mul(STEPS_PER_QUERY),
        }
    }

    fn run(&self, view: &PublicView<'_>, oracle: &mut Oracle<'_>, seed: &Seed) -> Result<Vec<u8>> {
        let program = view.decode()?;
        let width = oracle.input_width();
        let domain = if width >= 64 { u64::MAX } else { 1u64 << width };
        let mut rng = seed.rng();
        let mut seen = HashSet::new();

        while (seen.len() as u64) < domain {
            let x = BitStr::random(width, &mut rng)?;
            if !seen.insert(x.clone()) {
                continue;
            }
            if oracle.queries() < self.q {
                if oracle.accepts(&x)? {
                    return Ok(view
                        .asset
                        .from_accepting_input(&program, &x)
                        .unwrap_or_else(|| view.asset.random_candidate(view.n, &mut rng)));
                }
                continue;
            }
            if view.asset.schema(view.n) == (CandidateSchema::Bits { width }) {
                return Ok(x.into_bytes());
            }
            break;
        }
        Ok(view.asset.random_candidate(view.n, &mut rng))
    }
}

/// Answers with the first constant whose width matches the asset. Breaks programs that
/// store their secret in the clear.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstReader;

impl Attacker for ConstReader {
    fn id(&self) -> &str {
        "constreader"
    }

    fn budget(&self) -> Budget {
        Budget::CODE_ONLY
    }

    fn run(&self, view: &PublicView<'_>, _oracle: &mut Oracle<'_>, seed: &Seed) -> Result<Vec<u8>> {
        let program = view.decode()?;
        if let CandidateSchema::Bits { width } = view.asset.schema(view.n) {
            if let Some(c) = program.consts.iter().find(|c| c.width() == width) {
                return Ok(c.as_bytes().to_vec());
            }
        }
        Ok(view.asset.random_candidate(view.n, &mut seed.rng()))
    }
}
