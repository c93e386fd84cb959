//! Reference implementations the library is checked against. Kept deliberately naive.
#![allow(dead_code)]

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use oblab::automata::Dfa;
use oblab::ir::{accepts, BitStr, Checked, Program};

/// Shortest word on which `a` and `b` disagree, by breadth-first search over the
/// product machine.
pub fn product_bfs(a: &Dfa, b: &Dfa) -> Option<Vec<bool>> {
    let start = (a.start(), b.start());
    type Pair = (usize, usize);
    let mut parent: HashMap<Pair, Option<(Pair, bool)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        if (pair.0 == a.accept()) != (pair.1 == b.accept()) {
            let mut word = Vec::new();
            let mut at = pair;
            while let Some((prev, bit)) = parent[&at] {
                word.push(bit);
                at = prev;
            }
            word.reverse();
            return Some(word);
        }
        for bit in [false, true] {
            let next = (a.next(pair.0, bit), b.next(pair.1, bit));
            if let Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((pair, bit)));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Every word of length at most `len`, shortest first.
pub fn words_up_to(len: usize) -> Vec<Vec<bool>> {
    let mut out = vec![Vec::new()];
    for l in 1..=len {
        for v in 0..1u64 << l {
            out.push((0..l).rev().map(|i| v >> i & 1 == 1).collect());
        }
    }
    out
}

/// Number of states of the minimal machine in the single-accept-state convention:
/// distinct residual languages among reachable states, or 2 for the empty language.
pub fn minimal_states(d: &Dfa) -> usize {
    let n = d.n_states();
    let probes = words_up_to(n);
    let mut seen = vec![false; n];
    let mut stack = vec![d.start()];
    seen[d.start()] = true;
    while let Some(s) = stack.pop() {
        for bit in [false, true] {
            let t = d.next(s, bit);
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    if !seen[d.accept()] {
        return 2;
    }
    let mut residuals: Vec<Vec<bool>> = (0..n)
        .filter(|&s| seen[s])
        .map(|s| {
            probes
                .iter()
                .map(|w| w.iter().fold(s, |q, &bit| d.next(q, bit)) == d.accept())
                .collect()
        })
        .collect();
    residuals.sort();
    residuals.dedup();
    residuals.len()
}

pub fn all_inputs(width: usize) -> impl Iterator<Item = BitStr> {
    (0..1u64 << width).map(move |v| BitStr::from_u64(v, width).unwrap())
}

pub fn count_accepting<I: IntoIterator<Item = BitStr>>(p: &Program, inputs: I) -> u64 {
    let c = Checked::new(p).unwrap();
    inputs
        .into_iter()
        .filter(|x| accepts(&c.run(x).unwrap().output))
        .count() as u64
}

/// Success probability of an attacker that walks a uniformly random order of a domain
/// of size `domain`, stops at the first accepted element among the first `q`, and
/// otherwise answers element `q + 1`. Of the `good + bad` accepted elements only
/// `good` count as a win.
///
/// The first accepted element in the order is uniform over the accepted set, and it
/// lies within the first `q + 1` positions unless all of those miss the set.
pub fn first_hit_win(domain: u64, good: u64, bad: u64, q: u64) -> f64 {
    let k = good + bad;
    let draws = (q + 1).min(domain);
    let mut all_miss = 1.0;
    for i in 0..draws {
        if domain - i <= k {
            all_miss = 0.0;
            break;
        }
        all_miss *= (domain - k - i) as f64 / (domain - i) as f64;
    }
    good as f64 / k as f64 * (1.0 - all_miss)
}

/// Probability that a uniformly random function on `2^n` points hits a fixed target:
/// `1 - (1 - 2^-n)^(2^n)`.
pub fn random_function_hit(n: u32) -> f64 {
    let size = 2f64.powi(n as i32);
    1.0 - (1.0 - 1.0 / size).powf(size)
}

/// Wilson interval, written out independently of the library's.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    (center - half, center + half)
}
