//! Hereditary languages given by finitely many forbidden factors: an
//! Aho–Corasick automaton, exact word counts, and decisions for
//! prolongability and irreducibility.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ExactInt;
use crate::seqfn::GrowthFn;

/// Alphabet size and forbidden words over letters `0..alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangSpec {
    pub alphabet: usize,
    pub forbidden: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct LangSpecJson {
    alphabet: usize,
    forbidden: Vec<String>,
}

impl LangSpec {
    /// Validates letters and reduces the forbidden set to an antichain under
    /// the factor order, sorted.
    pub fn new(alphabet: usize, forbidden: Vec<Vec<u8>>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        if alphabet > 10 {
            return Err(Error::invalid("alphabet is limited to the digits 0..9"));
        }
        for w in &forbidden {
            if w.is_empty() {
                return Err(Error::invalid("the empty word cannot be forbidden"));
            }
            if w.iter().any(|&c| c as usize >= alphabet) {
                return Err(Error::invalid(format!("forbidden word {w:?} leaves the alphabet")));
            }
        }
        let set: BTreeSet<Vec<u8>> = forbidden.into_iter().collect();
        let reduced = set
            .iter()
            .filter(|w| !set.iter().any(|u| u != *w && is_factor(u, w)))
            .cloned()
            .collect();
        Ok(LangSpec {
            alphabet,
            forbidden: reduced,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: LangSpecJson = serde_json::from_str(s)?;
        let words = raw
            .forbidden
            .iter()
            .map(|w| parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        LangSpec::new(raw.alphabet, words)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&LangSpecJson {
            alphabet: self.alphabet,
            forbidden: self.forbidden.iter().map(|w| format_word(w)).collect(),
        })?)
    }

    /// Same language read right to left.
    pub fn reversed(&self) -> LangSpec {
        LangSpec {
            alphabet: self.alphabet,
            forbidden: self
                .forbidden
                .iter()
                .map(|w| w.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Whether `w` avoids every forbidden factor.
    pub fn contains(&self, w: &[u8]) -> bool {
        !self.forbidden.iter().any(|f| is_factor(f, w))
    }
}

pub fn is_factor(u: &[u8], w: &[u8]) -> bool {
    u.len() <= w.len() && w.windows(u.len()).any(|x| x == u)
}

/// Digits to letters: `"101"` is `[1, 0, 1]`.
pub fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::Parse(format!("letter {c:?} is not a digit")))
        })
        .collect()
}

pub fn format_word(w: &[u8]) -> String {
    w.iter().map(|&c| char::from(b'0' + c)).collect()
}

/// Deterministic complete automaton; one absorbing dead state collects every
/// run that has seen a forbidden factor.
#[derive(Clone, Debug)]
pub struct LangAutomaton {
    alphabet: usize,
    trans: Vec<Vec<usize>>,
    dead: Vec<bool>,
    live: Vec<bool>,
}

pub const ROOT: usize = 0;

impl LangAutomaton {
    pub fn build(spec: &LangSpec) -> Result<Self> {
        let d = spec.alphabet;
        if d == 0 {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        // trie
        let mut goto: Vec<Vec<Option<usize>>> = vec![vec![None; d]];
        let mut term = vec![false];
        for w in &spec.forbidden {
            let mut s = 0;
            for &c in w {
                s = match goto[s][c as usize] {
                    Some(t) => t,
                    None => {
                        goto.push(vec![None; d]);
                        term.push(false);
                        let t = goto.len() - 1;
                        goto[s][c as usize] = Some(t);
                        t
                    }
                };
            }
            term[s] = true;
        }
        // failure links, breadth first
        let n = goto.len();
        let mut delta = vec![vec![0usize; d]; n];
        let mut bad = term.clone();
        let mut fail = vec![0usize; n];
        let mut queue = VecDeque::new();
        for c in 0..d {
            match goto[0][c] {
                Some(t) => {
                    delta[0][c] = t;
                    queue.push_back(t);
                }
                None => delta[0][c] = 0,
            }
        }
        while let Some(s) = queue.pop_front() {
            bad[s] |= bad[fail[s]];
            for c in 0..d {
                match goto[s][c] {
                    Some(t) => {
                        fail[t] = delta[fail[s]][c];
                        delta[s][c] = t;
                        queue.push_back(t);
                    }
                    None => delta[s][c] = delta[fail[s]][c],
                }
            }
        }
        // collapse dead nodes into one sink
        let mut index = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if !bad[s] {
                index[s] = next;
                next += 1;
            }
        }
        let sink = next;
        for s in 0..n {
            if bad[s] {
                index[s] = sink;
            }
        }
        let mut trans = vec![vec![sink; d]; sink + 1];
        for s in 0..n {
            if !bad[s] {
                for c in 0..d {
                    trans[index[s]][c] = index[delta[s][c]];
                }
            }
        }
        let mut dead = vec![false; sink + 1];
        dead[sink] = true;
        if bad[0] {
            return Err(Error::invalid("forbidden set excludes the empty word"));
        }
        let mut a = LangAutomaton {
            alphabet: d,
            trans,
            dead,
            live: Vec::new(),
        };
        a.live = a.greatest_live_set();
        Ok(a)
    }

    fn greatest_live_set(&self) -> Vec<bool> {
        let mut live: Vec<bool> = self.dead.iter().map(|d| !d).collect();
        loop {
            let mut changed = false;
            for s in 0..self.states() {
                if live[s] && !self.trans[s].iter().any(|&t| live[t]) {
                    live[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Number of states including the dead sink.
    pub fn states(&self) -> usize {
        self.trans.len()
    }

    pub fn live_states(&self) -> usize {
        self.live.iter().filter(|&&l| l).count()
    }

    pub fn is_dead(&self, s: usize) -> bool {
        self.dead[s]
    }

    /// States from which arbitrarily long non-dead runs exist.
    pub fn is_live(&self, s: usize) -> bool {
        self.live[s]
    }

    pub fn step(&self, s: usize, c: u8) -> usize {
        self.trans[s][c as usize]
    }

    pub fn run(&self, w: &[u8]) -> usize {
        w.iter().fold(ROOT, |s, &c| self.step(s, c))
    }

    pub fn accepts(&self, w: &[u8]) -> bool {
        !self.dead[self.run(w)]
    }

    /// `gamma'(0..=n)`: words of each exact length, `gamma'(0) = 1`.
    pub fn count_words(&self, n: usize) -> Vec<ExactInt> {
        let mut counts = CountVector::start(self);
        let mut out = vec![counts.total()];
        for _ in 0..n {
            counts = counts.advance(self);
            out.push(counts.total());
        }
        out
    }

    /// Shortest nonempty-word BFS from the letters of the root; `parent`
    /// holds the back pointers.
    fn bfs_nonempty(&self) -> BTreeMap<usize, Vec<u8>> {
        let mut words: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for c in 0..self.alphabet as u8 {
            let t = self.step(ROOT, c);
            if !self.dead[t] && !words.contains_key(&t) {
                words.insert(t, vec![c]);
                queue.push_back(t);
            }
        }
        while let Some(s) = queue.pop_front() {
            for c in 0..self.alphabet as u8 {
                let t = self.step(s, c);
                if !self.dead[t] && !words.contains_key(&t) {
                    let mut w = words[&s].clone();
                    w.push(c);
                    words.insert(t, w);
                    queue.push_back(t);
                }
            }
        }
        words
    }

    /// Shortest words (BFS, lexicographic tie-break) reaching each non-dead
    /// state, the empty word for the root.
    fn bfs_all(&self) -> BTreeMap<usize, Vec<u8>> {
        let mut words = self.bfs_nonempty();
        words.insert(ROOT, Vec::new());
        words
    }

    /// Shortest nonempty word with no one-letter right extension.
    pub fn right_dead_end(&self) -> Option<Vec<u8>> {
        let words = self.bfs_nonempty();
        words
            .iter()
            .filter(|(&s, _)| self.trans[s].iter().all(|&t| self.dead[t]))
            .map(|(_, w)| w.clone())
            .min_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)))
    }
}

/// Per-state word counts at one length.
#[derive(Clone, Debug)]
pub struct CountVector {
    pub counts: Vec<ExactInt>,
}

impl CountVector {
    pub fn start(a: &LangAutomaton) -> Self {
        let mut counts = vec![BigUint::zero(); a.states()];
        counts[ROOT] = BigUint::one();
        CountVector { counts }
    }

    pub fn advance(&self, a: &LangAutomaton) -> Self {
        let mut next = vec![BigUint::zero(); a.states()];
        for (s, c) in self.counts.iter().enumerate() {
            if c.is_zero() || a.dead[s] {
                continue;
            }
            for &t in &a.trans[s] {
                if !a.dead[t] {
                    next[t] += c;
                }
            }
        }
        CountVector { counts: next }
    }

    /// Sum over non-dead states.
    pub fn total(&self) -> ExactInt {
        self.counts.iter().sum()
    }
}

/// Whether `gamma(n)` counts the empty word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyWord {
    /// `gamma(0) = 1`, `gamma(n) = 1 + sum_{i <= n} gamma'(i)`.
    Counted,
    /// `gamma(0) = 0`, so the discrete derivative is `gamma'` everywhere.
    Excluded,
}

/// `[gamma(0), .., gamma(n)]` under the chosen convention.
pub fn cumulative(per_length: &[ExactInt], conv: EmptyWord) -> Vec<ExactInt> {
    let mut acc = match conv {
        EmptyWord::Counted => BigUint::one(),
        EmptyWord::Excluded => BigUint::zero(),
    };
    let mut out = vec![acc.clone()];
    for c in &per_length[1..] {
        acc += c;
        out.push(acc.clone());
    }
    out
}

/// The growth function of the language, tabulated to `n`.
pub fn growth_fn(a: &LangAutomaton, n: usize, conv: EmptyWord) -> GrowthFn {
    let table = cumulative(&a.count_words(n), conv);
    GrowthFn::from_table("language", table).expect("nonempty table")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Prolongable {
    Yes,
    No { side: Side, word: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Every nonempty word extends by a letter on the right, and on the left.
/// The automaton must come from `spec`; the left side is decided on the
/// automaton of the reversed forbidden set.
pub fn check_prolongable(spec: &LangSpec, a: &LangAutomaton) -> Result<Prolongable> {
    if let Some(w) = a.right_dead_end() {
        return Ok(Prolongable::No {
            side: Side::Right,
            word: format_word(&w),
        });
    }
    Ok(match check_one_sided(&spec.reversed())? {
        Some(mut w) => {
            w.reverse();
            Prolongable::No {
                side: Side::Left,
                word: format_word(&w),
            }
        }
        None => Prolongable::Yes,
    })
}

/// A nonempty word with no one-letter right extension, if any.
pub fn check_one_sided(spec: &LangSpec) -> Result<Option<Vec<u8>>> {
    Ok(LangAutomaton::build(spec)?.right_dead_end())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Irreducible {
    Yes { family: usize },
    No { u: String, v: String },
}

/// Default bound on the number of reading sets explored.
pub const SUBSET_BUDGET: usize = 1 << 16;

/// For all words `u, v` of the language some `w` has `u w v` in it.
///
/// `A(v)` is the set of non-dead states from which `v` reads without dying;
/// `A(x v) = pre_x(A(v))`. Only sets containing the root belong to words of
/// the language, and the family closes under `pre_x` from the full set. The
/// language is irreducible iff every reachable state `p` can reach each
/// such set.
pub fn check_irreducible(a: &LangAutomaton, budget: usize) -> Result<Irreducible> {
    let n = a.states();
    let full: Vec<bool> = (0..n).map(|s| !a.dead[s]).collect();
    let mut family: HashMap<Vec<bool>, Vec<u8>> = HashMap::new();
    let mut order: Vec<Vec<bool>> = Vec::new();
    let mut queue = VecDeque::new();
    family.insert(full.clone(), Vec::new());
    order.push(full.clone());
    queue.push_back(full);
    while let Some(set) = queue.pop_front() {
        let v = family[&set].clone();
        for x in 0..a.alphabet as u8 {
            let pre: Vec<bool> = (0..n)
                .map(|q| !a.dead[q] && set[a.step(q, x)])
                .collect();
            if !pre[ROOT] || family.contains_key(&pre) {
                continue;
            }
            if family.len() >= budget {
                return Err(Error::Budget(format!(
                    "irreducibility needs more than {budget} reading sets"
                )));
            }
            let mut w = vec![x];
            w.extend_from_slice(&v);
            family.insert(pre.clone(), w);
            order.push(pre.clone());
            queue.push_back(pre);
        }
    }
    let words = a.bfs_all();
    for (&p, u) in &words {
        let reach = reachable_from(a, p);
        for set in &order {
            if !reach.iter().zip(set).any(|(&r, &s)| r && s) {
                return Ok(Irreducible::No {
                    u: format_word(u),
                    v: format_word(&family[set]),
                });
            }
        }
    }
    Ok(Irreducible::Yes {
        family: family.len(),
    })
}

fn reachable_from(a: &LangAutomaton, p: usize) -> Vec<bool> {
    let mut seen = vec![false; a.states()];
    seen[p] = true;
    let mut stack = vec![p];
    while let Some(s) = stack.pop() {
        for &t in &a.trans[s] {
            if !a.dead[t] && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Nonempty words of total weight at most `n`, `[gamma_w(0) = 0, ..,
/// gamma_w(n)]`.
pub fn weighted_count(a: &LangAutomaton, weights: &[u64], n: usize) -> Result<Vec<ExactInt>> {
    if weights.len() != a.alphabet {
        return Err(Error::invalid("one weight per letter is required"));
    }
    if weights.contains(&0) {
        return Err(Error::invalid("weights must be at least 1"));
    }
    let s = a.states();
    // exact[t][q]: words of weight exactly t ending in q
    let mut exact: Vec<Vec<ExactInt>> = vec![vec![BigUint::zero(); s]; n + 1];
    exact[0][ROOT] = BigUint::one();
    for t in 1..=n {
        for (c, &w) in weights.iter().enumerate() {
            let w = w as usize;
            if w > t {
                continue;
            }
            for q in 0..s {
                if a.dead[q] || exact[t - w][q].is_zero() {
                    continue;
                }
                let r = a.trans[q][c];
                if !a.dead[r] {
                    let add = exact[t - w][q].clone();
                    exact[t][r] += add;
                }
            }
        }
    }
    let mut out = vec![BigUint::zero()];
    let mut acc = BigUint::zero();
    for row in exact.iter().skip(1) {
        acc += row.iter().sum::<BigUint>();
        out.push(acc.clone());
    }
    Ok(out)
}

/// Observation on the tail of `gamma'`: constant, or bounded below by a
/// line, or neither on the tested range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum GapObservation {
    EventuallyConstant { from: u64, value: String },
    AtLeastLinear { slope_den: u64 },
    Inconclusive,
}

/// On `[N/2, N]`: constant tail, or `gamma'(n) >= n / c` throughout with
/// `c` fixed by the tail's first point. Never a refutation.
pub fn bergman_probe(per_length: &[ExactInt]) -> GapObservation {
    let n = per_length.len() - 1;
    if n < 4 {
        return GapObservation::Inconclusive;
    }
    let lo = n / 2;
    let tail = &per_length[lo..=n];
    if tail.iter().all(|v| *v == tail[0]) {
        let from = (1..=lo)
            .rev()
            .take_while(|&i| per_length[i] == tail[0])
            .last()
            .unwrap_or(lo);
        return GapObservation::EventuallyConstant {
            from: from as u64,
            value: tail[0].to_string(),
        };
    }
    if per_length[lo].is_zero() {
        return GapObservation::Inconclusive;
    }
    let c = BigUint::from(lo as u64).div_ceil_big(&per_length[lo]);
    let linear = (lo..=n).all(|i| &per_length[i] * &c >= BigUint::from(i as u64));
    match (linear, u64::try_from(&c)) {
        (true, Ok(c)) => GapObservation::AtLeastLinear { slope_den: c },
        _ => GapObservation::Inconclusive,
    }
}

trait DivCeil {
    fn div_ceil_big(&self, d: &BigUint) -> BigUint;
}

impl DivCeil for BigUint {
    fn div_ceil_big(&self, d: &BigUint) -> BigUint {
        let (q, r) = (self / d, self % d);
        if r.is_zero() {
            q.max(BigUint::one())
        } else {
            q + 1u32
        }
    }
}
