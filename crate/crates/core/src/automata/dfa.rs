use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{BitStr, DfaTable};

/// A DFA over `{0, 1}` whose start state is the first state and whose only accepting
/// state is the last. States are 0-based here and 1-based in the JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    m0: Vec<usize>,
    m1: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DfaJson {
    n: usize,
    m0: Vec<usize>,
    m1: Vec<usize>,
}

impl Dfa {
    pub const MAX_STATES: usize = u16::MAX as usize;

    pub fn new(m0: Vec<usize>, m1: Vec<usize>) -> Result<Self> {
        let n = m0.len();
        if n == 0 || n > Self::MAX_STATES || m1.len() != n {
            return Err(Error::MalformedCandidate(format!(
                "tables of lengths {} and {}",
                m0.len(),
                m1.len()
            )));
        }
        if let Some(&s) = m0.iter().chain(&m1).find(|&&s| s >= n) {
            return Err(Error::MalformedCandidate(format!("state {s} out of range")));
        }
        Ok(Self { m0, m1 })
    }

    /// Uniform transition tables.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut row = || (0..n).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
        let m0 = row();
        let m1 = row();
        Self { m0, m1 }
    }

    pub fn n_states(&self) -> usize {
        self.m0.len()
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn accept(&self) -> usize {
        self.m0.len() - 1
    }

    pub fn m0(&self) -> &[usize] {
        &self.m0
    }

    pub fn m1(&self) -> &[usize] {
        &self.m1
    }

    pub fn next(&self, state: usize, bit: bool) -> usize {
        if bit {
            self.m1[state]
        } else {
            self.m0[state]
        }
    }

    pub fn state_after<I: IntoIterator<Item = bool>>(&self, word: I) -> usize {
        word.into_iter().fold(self.start(), |s, b| self.next(s, b))
    }

    pub fn accepts<I: IntoIterator<Item = bool>>(&self, word: I) -> bool {
        self.state_after(word) == self.accept()
    }

    /// Renames state `s` to `perm[s]`. The caller keeps start at 0 and accept last.
    pub(crate) fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n_states();
        let mut m0 = vec![0; n];
        let mut m1 = vec![0; n];
        for s in 0..n {
            m0[perm[s]] = perm[self.m0[s]];
            m1[perm[s]] = perm[self.m1[s]];
        }
        Self { m0, m1 }
    }

    /// Uniform relabelling of the inner states; start and accept keep their roles.
    pub fn shuffle(&self, rng: &mut dyn RngCore) -> Self {
        use rand::seq::SliceRandom;
        let n = self.n_states();
        if n <= 2 {
            return self.clone();
        }
        let mut inner: Vec<usize> = (1..n - 1).collect();
        inner.shuffle(rng);
        let mut perm = vec![0; n];
        perm[n - 1] = n - 1;
        for (old, new) in (1..n - 1).zip(inner) {
            perm[old] = new;
        }
        self.relabel(&perm)
    }

    pub fn to_table(&self) -> DfaTable {
        let narrow = |v: &[usize]| v.iter().map(|&s| s as u16).collect();
        DfaTable {
            start: 0,
            accept: self.accept() as u16,
            m0: narrow(&self.m0),
            m1: narrow(&self.m1),
        }
    }

    /// Reads a table with arbitrary start and accept positions, moving start to the
    /// front and accept to the back.
    pub fn from_table(t: &DfaTable) -> Result<Self> {
        if !t.is_well_formed() {
            return Err(Error::MalformedCandidate("ill-formed DFA table".into()));
        }
        let n = t.n_states();
        let (start, accept) = (usize::from(t.start), usize::from(t.accept));
        if start == accept && n > 1 {
            return Err(Error::MalformedCandidate(
                "start state is the accepting state".into(),
            ));
        }
        let mut perm = vec![usize::MAX; n];
        perm[start] = 0;
        perm[accept] = n - 1;
        for (p, label) in perm.iter_mut().filter(|p| **p == usize::MAX).zip(1..) {
            *p = label;
        }
        let widen = |v: &[u16]| v.iter().map(|&s| usize::from(s)).collect();
        Ok(Self {
            m0: widen(&t.m0),
            m1: widen(&t.m1),
        }
        .relabel(&perm))
    }

    pub fn to_json(&self) -> String {
        let one = |v: &[usize]| v.iter().map(|s| s + 1).collect();
        serde_json::to_string(&DfaJson {
            n: self.n_states(),
            m0: one(&self.m0),
            m1: one(&self.m1),
        })
        .expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: DfaJson =
            serde_json::from_str(s).map_err(|e| Error::MalformedCandidate(e.to_string()))?;
        if j.m0.len() != j.n || j.m1.len() != j.n {
            return Err(Error::MalformedCandidate(format!(
                "n = {} but tables have {} and {} entries",
                j.n,
                j.m0.len(),
                j.m1.len()
            )));
        }
        let zero = |v: Vec<usize>| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|s| {
                    s.checked_sub(1)
                        .ok_or_else(|| Error::MalformedCandidate("state 0 in 1-based table".into()))
                })
                .collect()
        };
        Self::new(zero(j.m0)?, zero(j.m1)?)
    }

    /// `u16` state count followed by both rows, big-endian.
    pub fn to_aux(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 4 * self.n_states());
        out.extend_from_slice(&(self.n_states() as u16).to_be_bytes());
        for &s in self.m0.iter().chain(&self.m1) {
            out.extend_from_slice(&(s as u16).to_be_bytes());
        }
        out
    }

    pub fn from_aux(aux: &[u8]) -> Result<Self> {
        let words: Vec<usize> = aux
            .chunks(2)
            .map(|c| match c {
                [a, b] => Ok(usize::from(u16::from_be_bytes([*a, *b]))),
                _ => Err(Error::Precondition("odd-length DFA aux".into())),
            })
            .collect::<Result<_>>()?;
        let (&n, rest) = words
            .split_first()
            .ok_or_else(|| Error::Precondition("empty DFA aux".into()))?;
        if rest.len() != 2 * n {
            return Err(Error::Precondition("DFA aux length".into()));
        }
        Self::new(rest[..n].to_vec(), rest[n..].to_vec())
    }

    /// Some word of exactly `len` symbols that the machine accepts.
    pub fn accepting_word(&self, len: usize) -> Option<Vec<bool>> {
        let n = self.n_states();
        // layers[i][s]: how state s was first reached after i symbols.
        let mut layers: Vec<Vec<Option<(usize, bool)>>> = Vec::with_capacity(len + 1);
        let mut first = vec![None; n];
        first[self.start()] = Some((usize::MAX, false));
        layers.push(first);
        for i in 0..len {
            let mut layer = vec![None; n];
            for s in (0..n).filter(|&s| layers[i][s].is_some()) {
                for b in [false, true] {
                    let t = self.next(s, b);
                    layer[t].get_or_insert((s, b));
                }
            }
            layers.push(layer);
        }
        layers[len][self.accept()]?;
        let mut word = vec![false; len];
        let mut s = self.accept();
        for i in (0..len).rev() {
            let (prev, b) = layers[i + 1][s].expect("reached state has a parent");
            word[i] = b;
            s = prev;
        }
        Some(word)
    }
}

/// Does `d` accept the bits of `x`, most significant first?
pub fn dfa_run(d: &Dfa, x: &BitStr) -> bool {
    d.accepts(x.bits())
}
