mod common;

use oblab::automata::{dfa_equiv, minimize, AutomataClass, Dfa, Equivalence};
use oblab::formalism::{ProgramClass, Seed};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{minimal_states, product_bfs};

fn machine() -> impl Strategy<Value = Dfa> {
    (1usize..=6, any::<u64>()).prop_map(|(n, s)| Dfa::random(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

/// Pairs that are often equivalent: a machine and a padded, shuffled copy of its
/// minimal form, or two independent machines.
fn pair() -> impl Strategy<Value = (Dfa, Dfa)> {
    prop_oneof![
        (machine(), machine()),
        (machine(), any::<u64>()).prop_map(|(d, s)| {
            let m = minimize(&d);
            let copy = m.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
            (d, copy)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn equivalence_matches_product_search((a, b) in pair()) {
        let reference = product_bfs(&a, &b);
        match dfa_equiv(&a, &b) {
            Equivalence::Equivalent => prop_assert!(reference.is_none()),
            Equivalence::Witness(w) => {
                prop_assert_ne!(a.accepts(w.iter().copied()), b.accepts(w.iter().copied()));
                prop_assert_eq!(Some(w.len()), reference.map(|r| r.len()));
            }
        }
    }

    #[test]
    fn equivalence_is_symmetric((a, b) in pair()) {
        prop_assert_eq!(dfa_equiv(&a, &b).is_equivalent(), dfa_equiv(&b, &a).is_equivalent());
        prop_assert!(dfa_equiv(&a, &a).is_equivalent());
    }

    #[test]
    fn minimization_is_exact(d in machine()) {
        let m = minimize(&d);
        prop_assert!(product_bfs(&d, &m).is_none());
        prop_assert_eq!(m.n_states(), minimal_states(&d));
        prop_assert_eq!(minimize(&m), m.clone());
    }

    #[test]
    fn encodings_round_trip(d in machine(), s in any::<u64>()) {
        prop_assert_eq!(Dfa::from_json(&d.to_json()).unwrap(), d.clone());
        prop_assert_eq!(Dfa::from_aux(&d.to_aux()).unwrap(), d.clone());
        let shuffled = d.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        prop_assert!(product_bfs(&d, &shuffled).is_none());
    }
}

#[test]
fn equivalence_is_transitive_on_a_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=8 {
        let a = Dfa::random(n, &mut rng);
        let b = minimize(&a).shuffle(&mut rng);
        let c = b.shuffle(&mut rng);
        assert!(dfa_equiv(&a, &b).is_equivalent());
        assert!(dfa_equiv(&b, &c).is_equivalent());
        assert!(dfa_equiv(&a, &c).is_equivalent());
    }
}

#[test]
fn generated_machines_are_sparse() {
    let class = AutomataClass::default();
    for i in 0..20 {
        let inst = class.generate(4, &Seed::from_u64(i)).unwrap();
        let d = oblab::automata::dfa_of(&inst);
        let len = oblab::automata::word_length(4);
        let words = common::all_inputs(len)
            .filter(|x| d.accepts(x.bits()))
            .count();
        // The sampled density bound is 0.05; allow for its sampling error.
        assert!((words as f64) < 0.1 * (1u64 << len) as f64, "{words}");
    }
}
