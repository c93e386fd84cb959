use std::sync::Arc;

use oblab::formalism::{sample_instance, CandidateSchema, Oracle, ProgramClass, PublicView, Seed};
use oblab::harness::{
    make_challenge, registry, reports_json, write_reports, ChallengeSpec, Experiment,
    ExperimentPlan, Flavour,
};
use oblab::ir::{BitStr, Checked, Program};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [(&str, &str, usize); 8] = [
    ("pointfn", "obf_hash", 16),
    ("pointfn", "obf_xor", 16),
    ("pattern", "obf_pattern_hash", 16),
    ("cc", "obf_cc", 16),
    ("automata", "obf_dfa_permute_pad", 5),
    ("splitconj", "obf_half1", 16),
    ("splitconj", "obf_half2", 16),
    ("splitconj", "obf_half1+obf_half2", 16),
];

fn obfuscated(pair: usize, seed: u64) -> (Arc<dyn ProgramClass>, Program, usize) {
    let (class_id, obf_id, n) = PAIRS[pair];
    let class = registry::class(class_id).unwrap();
    let obf = registry::obfuscator(obf_id).unwrap();
    let s = Seed::from_u64(seed);
    let inst = sample_instance(class.as_ref(), n, &s.derive("instance")).unwrap();
    let p = obf.apply(&inst, &s.derive("obf")).unwrap();
    (class, p, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Corrupted obfuscations either fail to decode or run and get attacked without panics.
    #[test]
    fn damaged_programs_are_handled(pair in 0..PAIRS.len(), seed in any::<u64>(), edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..4)) {
        let (class, p, n) = obfuscated(pair, seed);
        let mut bytes = p.to_bytes().unwrap();
        prop_assert_eq!(Program::from_bytes(&bytes).unwrap(), p);
        for (at, b) in edits {
            let i = at.index(bytes.len());
            bytes[i] ^= b;
        }
        let Ok(decoded) = Program::from_bytes(&bytes) else { return Ok(()) };
        if let Ok(c) = Checked::new(&decoded) {
            let x = BitStr::random(decoded.input_width, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let _ = c.run_budgeted(&x, 1 << 16);
        }
        for id in registry::ATTACKER_IDS {
            let attacker = registry::attacker(id).unwrap();
            let Ok(mut oracle) = Oracle::new(&decoded, attacker.budget()) else { continue };
            for asset in class.assets() {
                let view = PublicView {
                    program_bytes: &bytes,
                    class_id: class.id(),
                    obf_id: PAIRS[pair].1,
                    asset: asset.as_ref(),
                    n,
                };
                let _ = attacker.run(&view, &mut oracle, &Seed::from_u64(seed));
            }
        }
    }
}

#[test]
fn verifiers_accept_truth_and_reject_perturbations() {
    let cases = [
        ("pointfn", 24),
        ("pattern", 24),
        ("cc", 24),
        ("automata", 5),
        ("splitconj", 24),
    ];
    for (class_id, n) in cases {
        let class = registry::class(class_id).unwrap();
        for asset in class.assets() {
            for i in 0..10 {
                let inst = sample_instance(class.as_ref(), n, &Seed::from_u64(i)).unwrap();
                let truth = asset.true_asset(&inst);
                assert!(
                    asset.verify(&inst, &truth).unwrap(),
                    "{class_id}/{}",
                    asset.id()
                );
                let mut rng = ChaCha8Rng::seed_from_u64(i);
                for _ in 0..100 {
                    let bad = asset.perturb(&inst, &truth, &mut rng).unwrap();
                    assert!(
                        !asset.verify(&inst, &bad).unwrap(),
                        "{class_id}/{}",
                        asset.id()
                    );
                }
                // Malformed candidates are an error or a rejection, never an acceptance.
                let junk: Vec<u8> = (0..rng.gen_range(0..40)).map(|_| rng.gen()).collect();
                assert!(!asset.verify(&inst, &junk).unwrap_or(false));
                if let CandidateSchema::Bits { .. } = asset.schema(n) {
                    assert!(asset.verify(&inst, &truth[1..]).is_err());
                }
            }
        }
    }
}

fn plan() -> ExperimentPlan {
    let exp = |class: &str, obf: &str, attacker: &str, grid: Vec<usize>| Experiment {
        class: class.into(),
        asset: None,
        obf: obf.into(),
        attacker: attacker.into(),
        grid,
        trials: 300,
        seed: "abc123".into(),
    };
    ExperimentPlan {
        experiments: vec![
            exp("pointfn", "obf_hash", "bruteforce", vec![6, 8]),
            exp("pattern", "obf_pattern_hash", "bruteforce:32", vec![8]),
            exp("automata", "obf_dfa_permute_pad", "table_reader", vec![4]),
            exp(
                "splitconj",
                "obf_half1+obf_half2",
                "half_codereader2",
                vec![8],
            ),
        ],
    }
}

#[test]
fn reports_and_bundles_are_reproducible() {
    let a = plan().run().unwrap();
    let b = plan().run().unwrap();
    assert_eq!(reports_json(&a), reports_json(&b));

    let dir = tempfile::tempdir().unwrap();
    let (ca, cb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let ja = write_reports(&a, &ca).unwrap();
    let jb = write_reports(&b, &cb).unwrap();
    assert_eq!(std::fs::read(&ca).unwrap(), std::fs::read(&cb).unwrap());
    assert_eq!(std::fs::read(ja).unwrap(), std::fs::read(jb).unwrap());

    for (class, obf, n) in PAIRS {
        let spec = ChallengeSpec {
            class: class.into(),
            obf: obf.into(),
            n,
            flavour: Flavour::Setter,
            seed: Seed::from_u64(99),
            asset: None,
        };
        let (x, y) = (dir.path().join("x"), dir.path().join("y"));
        let ma = make_challenge(&spec, &x).unwrap();
        let mb = make_challenge(&spec, &y).unwrap();
        assert_eq!(ma, mb);
        for f in [
            "public/program.bin",
            "public/program.json",
            "public/meta.json",
            "secret/aux.bin",
            "secret/seed.txt",
        ] {
            assert_eq!(
                std::fs::read(x.join(f)).unwrap(),
                std::fs::read(y.join(f)).unwrap(),
                "{class} {f}"
            );
        }
        std::fs::remove_dir_all(&x).unwrap();
        std::fs::remove_dir_all(&y).unwrap();
    }
}
