use std::collections::VecDeque;

use super::Dfa;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// A shortest word on which the two machines disagree.
    Witness(Vec<bool>),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
        true
    }
}

/// Hopcroft and Karp's union-find equivalence test.
///
/// States of both machines share one union-find structure (`b`'s states are offset by
/// `a.n_states()`). Pairs are explored breadth first and each explored pair remembers the
/// pair and symbol it came from, so the first acceptance mismatch yields a shortest
/// distinguishing word.
pub fn dfa_equiv(a: &Dfa, b: &Dfa) -> Equivalence {
    let off = a.n_states();
    let mut uf = UnionFind::new(off + b.n_states());
    // (state in a, state in b, parent pair index, symbol)
    let mut pairs: Vec<(usize, usize, usize, bool)> = Vec::new();
    let mut queue = VecDeque::new();

    let mismatch = |p: usize, q: usize| (p == a.accept()) != (q == b.accept());
    let witness = |pairs: &[(usize, usize, usize, bool)], mut i: usize| {
        let mut word = Vec::new();
        while i != 0 {
            let (_, _, parent, bit) = pairs[i];
            word.push(bit);
            i = parent;
        }
        word.reverse();
        word
    };

    pairs.push((a.start(), b.start(), 0, false));
    if mismatch(a.start(), b.start()) {
        return Equivalence::Witness(Vec::new());
    }
    uf.union(a.start(), off + b.start());
    queue.push_back(0);

    while let Some(i) = queue.pop_front() {
        let (p, q, _, _) = pairs[i];
        for bit in [false, true] {
            let (p2, q2) = (a.next(p, bit), b.next(q, bit));
            if !uf.union(p2, off + q2) {
                continue;
            }
            pairs.push((p2, q2, i, bit));
            let j = pairs.len() - 1;
            if mismatch(p2, q2) {
                return Equivalence::Witness(witness(&pairs, j));
            }
            queue.push_back(j);
        }
    }
    Equivalence::Equivalent
}

/// The minimal machine for the same language, by partition refinement over reachable
/// states. Keeps an accepting state even when the language is empty, so the result
/// always fits the start-first, accept-last convention.
pub fn minimize(d: &Dfa) -> Dfa {
    let n = d.n_states();
    let mut reachable = vec![false; n];
    let mut stack = vec![d.start()];
    reachable[d.start()] = true;
    while let Some(s) = stack.pop() {
        for b in [false, true] {
            let t = d.next(s, b);
            if !reachable[t] {
                reachable[t] = true;
                stack.push(t);
            }
        }
    }

    if !reachable[d.accept()] {
        // Empty language: one rejecting sink plus an unreachable accepting state.
        return Dfa::new(vec![0, 1], vec![0, 1]).expect("two-state table");
    }

    // Block ids; refine by (block, block after 0, block after 1) until stable.
    let states: Vec<usize> = (0..n).filter(|&s| reachable[s]).collect();
    let mut block = vec![usize::MAX; n];
    for &s in &states {
        block[s] = usize::from(s == d.accept());
    }
    let mut count = if states.len() > 1 { 2 } else { 1 };
    loop {
        let mut signatures = std::collections::HashMap::new();
        let mut refined = vec![usize::MAX; n];
        for &s in &states {
            let key = (block[s], block[d.next(s, false)], block[d.next(s, true)]);
            let next_id = signatures.len();
            refined[s] = *signatures.entry(key).or_insert(next_id);
        }
        let new_count = signatures.len();
        block = refined;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // Start block first, accept block last, the rest in first-seen order.
    let start_block = block[d.start()];
    let accept_block = block[d.accept()];
    let mut order = vec![usize::MAX; count];
    order[start_block] = 0;
    order[accept_block] = count - 1;
    let mut next = 1;
    for &s in &states {
        let b = block[s];
        if order[b] == usize::MAX {
            order[b] = next;
            next += 1;
        }
    }
    let mut m0 = vec![0; count];
    let mut m1 = vec![0; count];
    for &s in &states {
        let b = order[block[s]];
        m0[b] = order[block[d.next(s, false)]];
        m1[b] = order[block[d.next(s, true)]];
    }
    Dfa::new(m0, m1).expect("blocks form a complete table")
}
