use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::*;

fn b(s: &str) -> BitStr {
    BitStr::parse_binary(s).unwrap()
}

fn plain_point(c: &BitStr) -> Program {
    let mut pb = ProgramBuilder::new(c.width(), "pointfn");
    let k = pb.konst(c.clone());
    let e = pb.eq(Reg::INPUT, k);
    pb.output(e)
}

#[test]
fn point_program_accepts_only_its_constant() {
    let p = plain_point(&b("101"));
    assert_eq!(execute(&p, &b("101")).unwrap(), b("1"));
    assert_eq!(execute(&p, &b("100")).unwrap(), b("0"));
}

#[test]
fn eq_over_mismatched_widths_is_malformed() {
    let p = Program {
        input_width: 3,
        output_width: 1,
        consts: vec![b("1010")],
        instrs: vec![
            Instr::Const {
                dst: Reg(1),
                idx: 0,
            },
            Instr::Eq {
                dst: Reg(2),
                a: Reg(0),
                b: Reg(1),
            },
            Instr::Output { src: Reg(2) },
        ],
        class_tag: String::new(),
    };
    assert!(matches!(
        validate(&p),
        Err(MalformedProgram::WidthMismatch { at: 1, .. })
    ));
    assert!(matches!(
        execute(&p, &b("101")),
        Err(ExecError::Malformed(_))
    ));
}

#[test]
fn wrong_input_width_is_rejected() {
    let p = plain_point(&b("101"));
    assert_eq!(
        execute(&p, &b("1010")),
        Err(ExecError::WidthMismatch {
            expected: 3,
            got: 4
        })
    );
}

#[test]
fn use_before_def() {
    let mut p = plain_point(&b("101"));
    p.instrs.swap(0, 1);
    assert_eq!(
        validate(&p),
        Err(MalformedProgram::UseBeforeDef { at: 0, reg: 1 })
    );
}

#[test]
fn multiple_outputs_and_trailing_code() {
    let mut p = plain_point(&b("101"));
    p.instrs.push(Instr::Output { src: Reg(2) });
    assert_eq!(
        validate(&p),
        Err(MalformedProgram::MultipleOutput { at: 3 })
    );

    let mut p = plain_point(&b("101"));
    p.instrs.push(Instr::Not {
        dst: Reg(3),
        a: Reg(2),
    });
    assert_eq!(validate(&p), Err(MalformedProgram::AfterOutput { at: 3 }));

    let mut p = plain_point(&b("101"));
    p.instrs.pop();
    assert_eq!(validate(&p), Err(MalformedProgram::MissingOutput));
}

#[test]
fn registers_are_write_once() {
    let mut p = plain_point(&b("101"));
    p.instrs[1] = Instr::Eq {
        dst: Reg(1),
        a: Reg(0),
        b: Reg(1),
    };
    assert_eq!(
        validate(&p),
        Err(MalformedProgram::Redefined { at: 1, reg: 1 })
    );
    p.instrs[1] = Instr::Eq {
        dst: Reg(0),
        a: Reg(0),
        b: Reg(1),
    };
    assert_eq!(
        validate(&p),
        Err(MalformedProgram::Redefined { at: 1, reg: 0 })
    );
}

#[test]
fn empty_program_is_malformed() {
    let p = Program {
        input_width: 1,
        output_width: 1,
        consts: vec![],
        instrs: vec![],
        class_tag: String::new(),
    };
    assert_eq!(validate(&p), Err(MalformedProgram::Empty));
}

#[test]
fn size_of_plain_point_program() {
    // 3 instructions plus one 8-bit constant.
    let p = plain_point(&BitStr::zeros(8).unwrap());
    assert_eq!(p.size(), 11);
}

#[test]
fn lt_is_unsigned_big_endian() {
    let mut pb = ProgramBuilder::new(12, "threshold");
    let c = pb.konst(BitStr::from_u64(0x800, 12).unwrap());
    let l = pb.lt(Reg::INPUT, c);
    let p = pb.output(l);
    for x in [0u64, 1, 0x7ff, 0x800, 0x801, 0xfff] {
        let out = execute(&p, &BitStr::from_u64(x, 12).unwrap()).unwrap();
        assert_eq!(out.bit(0), x < 0x800, "x = {x:#x}");
    }
}

#[test]
fn ite_trunc_hash_and_dfarun() {
    // Accept inputs containing a 1 (2-state machine), then select between two constants.
    let table = DfaTable {
        start: 0,
        accept: 1,
        m0: vec![0, 1],
        m1: vec![1, 1],
    };
    let mut pb = ProgramBuilder::new(4, "");
    let hit = pb.dfa_run(Reg::INPUT, table);
    let yes = pb.konst(b("11"));
    let no = pb.konst(b("01"));
    let sel = pb.ite(hit, yes, no);
    let p = pb.output(sel);
    assert_eq!(execute(&p, &b("0000")).unwrap(), b("01"));
    assert_eq!(execute(&p, &b("0010")).unwrap(), b("11"));
    let run = Checked::new(&p).unwrap().run(&b("0010")).unwrap();
    // 5 instructions plus 4 symbols consumed.
    assert_eq!(run.steps, 9);

    let mut pb = ProgramBuilder::new(16, "");
    let h = pb.hash(hash::tags::CHECK, Reg::INPUT, 20);
    let t = pb.trunc(h, 8);
    let p = pb.output(t);
    let x = BitStr::from_u64(0xbeef, 16).unwrap();
    let expect = hash::hash_bits(hash::tags::CHECK, &x, 8);
    assert_eq!(execute(&p, &x).unwrap(), expect);
}

#[test]
fn budget_is_enforced() {
    let p = plain_point(&b("101"));
    let c = Checked::new(&p).unwrap();
    assert_eq!(c.step_cost(), 3);
    assert!(c.run_budgeted(&b("101"), 3).is_ok());
    assert_eq!(
        c.run_budgeted(&b("101"), 2),
        Err(ExecError::BudgetExceeded {
            budget: 2,
            needed: 3
        })
    );
}

#[test]
fn truncated_stream_is_a_parse_error() {
    let bytes = plain_point(&b("101")).to_bytes().unwrap();
    for cut in 0..bytes.len() {
        let e = Program::from_bytes(&bytes[..cut]).unwrap_err();
        assert!(e.offset <= cut, "offset {} past cut {cut}", e.offset);
    }
    let mut extra = bytes.clone();
    extra.push(0);
    assert_eq!(Program::from_bytes(&extra).unwrap_err().offset, bytes.len());
    let mut bad = bytes;
    bad[0] = b'X';
    assert_eq!(Program::from_bytes(&bad).unwrap_err().offset, 0);
}

#[test]
fn wire_layout_of_plain_point() {
    let bytes = plain_point(&b("101")).to_bytes().unwrap();
    let expect: Vec<u8> = [
        &b"OBF1"[..],
        &[0, 3, 0, 1],             // widths
        &[0, 1, 0, 3, 0b101],      // one 3-bit constant
        &[0, 3],                   // three instructions
        &[0x01, 0, 1, 0, 0],       // CONST r1 <- k0
        &[0x02, 0, 2, 0, 0, 0, 1], // EQ r2 <- r0, r1
        &[0x0e, 0, 2],             // OUTPUT r2
        &[0, 7],
        b"pointfn",
    ]
    .concat();
    assert_eq!(bytes, expect);
}

/// Random well-formed programs exercising every opcode.
pub(crate) fn random_program<R: Rng>(rng: &mut R) -> Program {
    let input_width = rng.gen_range(1..=24);
    let mut pb = ProgramBuilder::new(input_width, format!("random-{}", rng.gen::<u8>()));
    let mut regs = vec![Reg::INPUT];
    let steps = rng.gen_range(1..=12);
    for _ in 0..steps {
        let a = regs[rng.gen_range(0..regs.len())];
        let wa = pb.width(a);
        let same: Vec<Reg> = regs
            .iter()
            .copied()
            .filter(|r| pb.width(*r) == wa)
            .collect();
        let b = same[rng.gen_range(0..same.len())];
        let r = match rng.gen_range(0..13) {
            0 => pb.konst(BitStr::random(rng.gen_range(1..=24), rng).unwrap()),
            1 => pb.eq(a, b),
            2 => pb.xor(a, b),
            3 => pb.and(a, b),
            4 => pb.or(a, b),
            5 => pb.not(a),
            6 => pb.lt(a, b),
            7 => {
                let mut mask = BitStr::random(wa, rng).unwrap();
                mask.set_bit(rng.gen_range(0..wa), true);
                pb.project(a, mask)
            }
            8 if wa + pb.width(b) <= 64 => pb.concat(a, b),
            9 => pb.trunc(a, rng.gen_range(1..=wa)),
            10 => pb.hash(rng.gen(), a, rng.gen_range(1..=64)),
            11 => {
                let bits: Vec<Reg> = regs.iter().copied().filter(|r| pb.width(*r) == 1).collect();
                if bits.is_empty() {
                    pb.not(a)
                } else {
                    let c = bits[rng.gen_range(0..bits.len())];
                    pb.ite(c, a, b)
                }
            }
            _ => {
                let n = rng.gen_range(1..=6u16);
                let row = |rng: &mut R| (0..n).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
                let table = DfaTable {
                    start: rng.gen_range(0..n),
                    accept: rng.gen_range(0..n),
                    m0: row(rng),
                    m1: row(rng),
                };
                pb.dfa_run(a, table)
            }
        };
        regs.push(r);
    }
    let out = *regs.last().unwrap();
    pb.output(out)
}

#[test]
fn random_programs_validate_and_are_total() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let p = random_program(&mut rng);
        let c = Checked::new(&p).expect("generator emits valid programs");
        let x = BitStr::random(p.input_width, &mut rng).unwrap();
        let r1 = c.run(&x).unwrap();
        let r2 = c.run(&x).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.output.width(), p.output_width);
        let dfa_widths: u64 = p
            .instrs
            .iter()
            .filter(|i| matches!(i, Instr::DfaRun { .. }))
            .count() as u64
            * 64;
        assert!(r1.steps <= p.instrs.len() as u64 + dfa_widths);
    }
}

#[test]
fn structurally_equal_programs_serialize_identically() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for _ in 0..100 {
        let p = random_program(&mut rng);
        let q = Program::from_bytes(&p.to_bytes().unwrap()).unwrap();
        let rebuilt = p.clone();
        assert_eq!(p.to_bytes().unwrap(), rebuilt.to_bytes().unwrap());
        assert_eq!(q.to_bytes().unwrap(), p.to_bytes().unwrap());
    }
}

proptest! {
    #[test]
    fn binary_round_trip_is_identity(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha20Rng::seed_from_u64(seed));
        let bytes = p.to_bytes().unwrap();
        let q = Program::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(q.to_bytes().unwrap(), bytes);
    }

    #[test]
    fn json_mirror_round_trips(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha20Rng::seed_from_u64(seed));
        let q = wire::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn corrupted_bytes_never_panic(seed in any::<u64>(), pos in any::<usize>(), byte in any::<u8>()) {
        let p = random_program(&mut ChaCha20Rng::seed_from_u64(seed));
        let mut bytes = p.to_bytes().unwrap();
        let i = pos % bytes.len();
        bytes[i] = byte;
        if let Ok(q) = Program::from_bytes(&bytes) {
            // Whatever parses must re-encode to the same bytes.
            prop_assert_eq!(q.to_bytes().unwrap(), bytes);
            if let Ok(c) = Checked::new(&q) {
                let x = BitStr::zeros(q.input_width).unwrap();
                prop_assert!(c.run(&x).is_ok());
            }
        }
    }
}
