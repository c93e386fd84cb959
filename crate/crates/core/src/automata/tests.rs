use super::*;
use crate::formalism::{check_correctness, check_efficiency, CheckMode};
use crate::ir::{accepts, execute};

fn contains_one() -> Dfa {
    // M0 keeps the state, M1 moves to (and stays in) the accepting state.
    Dfa::new(vec![0, 1], vec![1, 1]).unwrap()
}

fn word(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

#[test]
fn hand_traced_machine() {
    let d = contains_one();
    assert!(!d.accepts(word("")));
    for (w, expect) in [
        ("0", false),
        ("1", true),
        ("000", false),
        ("0010", true),
        ("11", true),
    ] {
        assert_eq!(d.accepts(word(w)), expect, "{w}");
    }
    let x = BitStr::parse_binary("0001").unwrap();
    assert!(dfa_run(&d, &x));
}

#[test]
fn dfa_run_agrees_with_interpreter() {
    let mut rng = Seed::from_u64(3).rng();
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let d = Dfa::random(n, &mut rng);
        let len = rng.gen_range(1..=20);
        let x = BitStr::random(len, &mut rng).unwrap();
        let p = dfa_program(d.to_table(), len);
        assert_eq!(accepts(&execute(&p, &x).unwrap()), dfa_run(&d, &x));
    }
}

#[test]
fn json_form_is_one_based() {
    let d = contains_one();
    assert_eq!(d.to_json(), r#"{"n":2,"m0":[1,2],"m1":[2,2]}"#);
    assert_eq!(Dfa::from_json(&d.to_json()).unwrap(), d);
    for bad in [
        r#"{"n":2,"m0":[0,2],"m1":[2,2]}"#,
        r#"{"n":2,"m0":[1,3],"m1":[2,2]}"#,
        r#"{"n":2,"m0":[1],"m1":[2,2]}"#,
        r#"{"n":0,"m0":[],"m1":[]}"#,
        r#"{"m0":[1]}"#,
        "not json",
    ] {
        assert!(
            matches!(Dfa::from_json(bad), Err(Error::MalformedCandidate(_))),
            "{bad}"
        );
    }
    assert_eq!(Dfa::from_aux(&d.to_aux()).unwrap(), d);
}

#[test]
fn tables_with_moved_roles_read_back() {
    let mut rng = Seed::from_u64(4).rng();
    for _ in 0..200 {
        let d = Dfa::random(5, &mut rng);
        let t = d.to_table();
        // Swap the roles of state 0 and state 4 by renaming.
        let swap = |s: u16| match s {
            0 => 4,
            4 => 0,
            s => s,
        };
        let mut m0 = vec![0; 5];
        let mut m1 = vec![0; 5];
        for s in 0..5u16 {
            m0[usize::from(swap(s))] = swap(t.m0[usize::from(s)]);
            m1[usize::from(swap(s))] = swap(t.m1[usize::from(s)]);
        }
        let moved = DfaTable {
            start: 4,
            accept: 0,
            m0,
            m1,
        };
        let back = Dfa::from_table(&moved).unwrap();
        assert!(dfa_equiv(&d, &back).is_equivalent());
    }
}

#[test]
fn relabelled_and_trivially_empty_machines_are_equivalent() {
    let mut rng = Seed::from_u64(5).rng();
    for _ in 0..500 {
        let d = Dfa::random(rng.gen_range(1..=9), &mut rng);
        assert_eq!(dfa_equiv(&d, &d.shuffle(&mut rng)), Equivalence::Equivalent);
    }
    // Accepting state unreachable from the start.
    let unreachable = Dfa::new(vec![1, 1, 2], vec![0, 0, 2]).unwrap();
    let always_reject = Dfa::new(vec![0, 1], vec![0, 1]).unwrap();
    assert!(dfa_equiv(&unreachable, &always_reject).is_equivalent());
    assert_eq!(
        dfa_equiv(&contains_one(), &always_reject),
        Equivalence::Witness(word("1"))
    );
    let one_state = Dfa::new(vec![0], vec![0]).unwrap();
    assert_eq!(
        dfa_equiv(&one_state, &always_reject),
        Equivalence::Witness(vec![])
    );
}

#[test]
fn minimization_preserves_language() {
    let mut rng = Seed::from_u64(6).rng();
    for _ in 0..1000 {
        let d = Dfa::random(rng.gen_range(1..=8), &mut rng);
        let m = minimize(&d);
        assert!(m.n_states() <= d.n_states().max(2));
        assert!(dfa_equiv(&d, &m).is_equivalent());
        assert_eq!(minimize(&m).n_states(), m.n_states());
    }
    let padded = Dfa::new(vec![0, 0, 2, 3], vec![3, 3, 3, 3]).unwrap();
    assert_eq!(minimize(&padded), contains_one());
}

#[test]
fn generator_contract() {
    let s = Seed::from_u64(7);
    assert!(matches!(
        gen_dfa(1, &s, 0.05, 10, 100),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        gen_dfa(4, &s, 0.05, 0, 100),
        Err(Error::ResampleLimitExceeded(0))
    ));
    let mut rng = Seed::from_u64(8).rng();
    assert!(estimate_density(&contains_one(), 4, 2000, &mut rng) > 0.5);

    for i in 0..20 {
        let inst = gen_dfa(2, &Seed::from_u64(i), 0.01, 10_000, 2000).unwrap();
        let d = dfa_of(&inst);
        // Exact density over all words of length 4.
        let exact = (0..16u64)
            .filter(|v| dfa_run(&d, &BitStr::from_u64(*v, 4).unwrap()))
            .count();
        assert!(exact as f64 / 16.0 <= 0.01 + 0.05, "density {exact}/16");
        assert_ne!(d, contains_one());
    }

    let class = AutomataClass::default();
    for i in 0..20 {
        let inst = class.generate(6, &Seed::from_u64(i)).unwrap();
        assert_eq!(inst, class.generate(6, &Seed::from_u64(i)).unwrap());
        let d = dfa_of(&inst);
        let fresh = estimate_density(&d, 12, 20_000, &mut Seed::from_u64(1000 + i).rng());
        // 0.05 plus about four standard errors of the 2000-sample filter.
        assert!(
            fresh <= 0.05 + 4.0 * (0.05f64 * 0.95 / 2000.0).sqrt(),
            "{fresh}"
        );
    }
}

#[test]
fn language_asset_verdicts() {
    let class = AutomataClass::default();
    let asset = LanguageAsset;
    let mut rng = Seed::from_u64(9).rng();
    for i in 0..50 {
        let inst = class.generate(5, &Seed::from_u64(i)).unwrap();
        let d = dfa_of(&inst);
        assert!(asset.verify(&inst, &asset.true_asset(&inst)).unwrap());
        assert!(asset
            .verify(&inst, d.shuffle(&mut rng).to_json().as_bytes())
            .unwrap());
        assert!(asset
            .verify(&inst, minimize(&d).to_json().as_bytes())
            .unwrap());

        let bad = asset
            .perturb(&inst, &asset.true_asset(&inst), &mut rng)
            .unwrap();
        let bad_dfa = Dfa::from_json(std::str::from_utf8(&bad).unwrap()).unwrap();
        match verify_automata_asset(&inst, &bad_dfa) {
            Equivalence::Witness(w) => assert_ne!(d.accepts(w.clone()), bad_dfa.accepts(w)),
            Equivalence::Equivalent => panic!("perturbed candidate accepted"),
        }
    }
    let inst = class.generate(3, &Seed::from_u64(0)).unwrap();
    assert!(matches!(
        asset.verify(&inst, b"{}"),
        Err(Error::MalformedCandidate(_))
    ));
    assert!(matches!(
        asset.verify(&inst, &[0xff]),
        Err(Error::MalformedCandidate(_))
    ));
}

#[test]
fn permute_pad_keeps_language_and_leaks_it() {
    let class = AutomataClass::default();
    for extra in [0, 1, 4, 10] {
        let obf = PermutePad {
            extra_states: extra,
        };
        for i in 0..20 {
            let inst = class.generate(6, &Seed::from_u64(i)).unwrap();
            let p = obf.apply(&inst, &Seed::from_u64(100 + i)).unwrap();
            let d = TableReader::extract(&p).unwrap();
            assert_eq!(d.n_states(), 6 + extra);
            assert!(dfa_equiv(&dfa_of(&inst), &d).is_equivalent());
            let growth = p.size() - inst.program.size();
            assert_eq!(growth, 32 * extra);
        }
        check_efficiency(&class, &obf, 6, 10, &Seed::from_u64(extra as u64)).unwrap();
    }
}

#[test]
fn permute_pad_exhaustive_correctness_at_n4() {
    let class = AutomataClass::default();
    for i in 0..5 {
        let seed = Seed::from_u64(i);
        let verdict = check_correctness(
            &class,
            &PermutePad::default(),
            4,
            &seed,
            CheckMode::Exhaustive,
        )
        .unwrap();
        // Lengths 1 through 8.
        assert_eq!(
            verdict,
            crate::formalism::Correctness::Pass {
                inputs_checked: (1..=8).map(|w| 1u64 << w).sum(),
                collisions: vec![]
            }
        );
    }
}
