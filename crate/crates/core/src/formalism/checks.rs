use super::{Obfuscator, ProgramClass, Seed};
use crate::error::{Error, Result};
use crate::ir::{accepts, BitStr, Checked, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Every input of every checked width. Limited to widths of at most 16 bits.
    Exhaustive,
    /// This many uniform inputs plus the accepting inputs known from aux.
    Sampled(usize),
}

pub const MAX_EXHAUSTIVE_WIDTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Correctness {
    /// Outputs agreed everywhere except on `collisions`: inputs a hash-based
    /// obfuscator accepts spuriously because of output truncation.
    Pass {
        inputs_checked: u64,
        collisions: Vec<BitStr>,
    },
    Counterexample {
        input: BitStr,
        expected: BitStr,
        got: BitStr,
    },
}

impl Correctness {
    pub fn is_pass(&self) -> bool {
        matches!(self, Correctness::Pass { .. })
    }

    pub fn collisions(&self) -> usize {
        match self {
            Correctness::Pass { collisions, .. } => collisions.len(),
            Correctness::Counterexample { .. } => 0,
        }
    }
}

fn all_inputs(width: usize) -> impl Iterator<Item = BitStr> {
    (0..1u64 << width).map(move |v| BitStr::from_u64(v, width).expect("fits"))
}

/// Compares an instance program with its obfuscation on `inputs`.
///
/// For hash-based obfuscators a spurious accept (plain rejects, obfuscated accepts) is
/// recorded as a collision; any other disagreement is a counterexample.
pub fn compare_programs<I>(
    plain: &Program,
    obfuscated: &Program,
    inputs: I,
    hash_based: bool,
) -> Result<Correctness>
where
    I: IntoIterator<Item = BitStr>,
{
    let p = Checked::new(plain)?;
    let q = Checked::new(obfuscated)?;
    let mut collisions = Vec::new();
    let mut checked = 0u64;
    for x in inputs {
        let expected = p.run(&x)?.output;
        let got = q.run(&x)?.output;
        checked += 1;
        if expected == got {
            continue;
        }
        if hash_based && !accepts(&expected) && accepts(&got) {
            collisions.push(x);
            continue;
        }
        return Ok(Correctness::Counterexample {
            input: x,
            expected,
            got,
        });
    }
    Ok(Correctness::Pass {
        inputs_checked: checked,
        collisions,
    })
}

pub fn check_correctness(
    class: &dyn ProgramClass,
    obf: &dyn Obfuscator,
    n: usize,
    seed: &Seed,
    mode: CheckMode,
) -> Result<Correctness> {
    let inst = super::sample_instance(class, n, &seed.derive("instance"))?;
    let obfuscated = obf.apply(&inst, &seed.derive("obfuscation"))?;
    let width = inst.program.input_width;

    match mode {
        CheckMode::Exhaustive => {
            if width > MAX_EXHAUSTIVE_WIDTH {
                return Err(Error::Precondition(format!(
                    "exhaustive check needs input width <= {MAX_EXHAUSTIVE_WIDTH}, got {width}"
                )));
            }
            if !class.length_polymorphic() {
                return compare_programs(
                    &inst.program,
                    &obfuscated,
                    all_inputs(width),
                    obf.hash_based(),
                );
            }
            let mut total = 0;
            let mut all_collisions = Vec::new();
            for w in 1..=width {
                let verdict = compare_programs(
                    &inst.program.with_input_width(w),
                    &obfuscated.with_input_width(w),
                    all_inputs(w),
                    obf.hash_based(),
                )?;
                match verdict {
                    Correctness::Pass {
                        inputs_checked,
                        collisions,
                    } => {
                        total += inputs_checked;
                        all_collisions.extend(collisions);
                    }
                    cex => return Ok(cex),
                }
            }
            Ok(Correctness::Pass {
                inputs_checked: total,
                collisions: all_collisions,
            })
        }
        CheckMode::Sampled(k) => {
            let mut rng = seed.derive("inputs").rng();
            let mut inputs = class.accepting_inputs(&inst);
            for _ in 0..k {
                inputs.push(BitStr::random(width, &mut rng)?);
            }
            compare_programs(&inst.program, &obfuscated, inputs, obf.hash_based())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub max_size_ratio: f64,
    pub max_step_ratio: f64,
}

pub fn check_efficiency(
    class: &dyn ProgramClass,
    obf: &dyn Obfuscator,
    n: usize,
    samples: usize,
    seed: &Seed,
) -> Result<EfficiencyReport> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let declared = obf.overhead();
    let mut report = EfficiencyReport {
        max_size_ratio: 0.0,
        max_step_ratio: 0.0,
    };
    for i in 0..samples {
        let s = seed.trial(i as u64);
        let inst = super::sample_instance(class, n, &s.derive("instance"))?;
        let obfuscated = obf.apply(&inst, &s.derive("obfuscation"))?;
        let size_ratio = obfuscated.size() as f64 / inst.program.size() as f64;

        let x = BitStr::random(inst.program.input_width, &mut s.derive("input").rng())?;
        let plain_steps = Checked::new(&inst.program)?.run(&x)?.steps;
        let obf_steps = Checked::new(&obfuscated)?.run(&x)?.steps;
        let step_ratio = obf_steps as f64 / plain_steps as f64;

        if size_ratio > declared.size_factor {
            return Err(Error::OverheadExceeded {
                what: "size",
                sample: i,
                ratio: size_ratio,
                declared: declared.size_factor,
            });
        }
        if step_ratio > declared.step_factor {
            return Err(Error::OverheadExceeded {
                what: "step",
                sample: i,
                ratio: step_ratio,
                declared: declared.step_factor,
            });
        }
        report.max_size_ratio = report.max_size_ratio.max(size_ratio);
        report.max_step_ratio = report.max_step_ratio.max(step_ratio);
    }
    Ok(report)
}
