//! The dyadic word construction behind a prime monomial algebra with growth
//! between `f(n)` and `n^2 f(n)`: the `c` sequence, the evolution of
//! `W(2^n)`, `C(2^n)` and the queue `U(2^n)`, and finite-scale checks on the
//! factor language.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ExactInt;
use crate::seqfn::{bz_condition_on, Counterexample, CheckReport, GrowthFn};

/// Default bound on `|W(2^n)| * 2^n` for materialized stages.
pub const BYTE_BUDGET: usize = 1 << 26;

/// Target function sampled at `1, 2, 4, ..`.
pub struct SBTarget {
    f: GrowthFn,
}

impl SBTarget {
    pub fn new(f: GrowthFn) -> Self {
        SBTarget { f }
    }

    pub fn eval(&mut self, n: usize) -> Result<ExactInt> {
        self.f.eval(n)
    }

    /// `[f(1), f(2), .., f(2^(n_max + 1))]` after checking monotonicity and
    /// `f(2^(n+1)) <= f(2^n)^2` for `n <= n_max`.
    pub fn dyadic(&mut self, n_max: usize) -> Result<Vec<ExactInt>> {
        let mut pts = Vec::with_capacity(n_max + 2);
        for n in 0..=n_max + 1 {
            let x = 1usize
                .checked_shl(n as u32)
                .filter(|&x| x <= self.f.cap())
                .ok_or(Error::CapOverflow {
                    index: u64::MAX,
                    cap: self.f.cap() as u64,
                })?;
            pts.push(self.f.eval(x)?);
        }
        if pts[0].is_zero() {
            return Err(Error::invalid("target needs f(1) >= 1"));
        }
        for n in 0..=n_max {
            if pts[n + 1] < pts[n] {
                return Err(Error::invalid(format!(
                    "stage {n}: f(2^{}) < f(2^{n})",
                    n + 1
                )));
            }
            if pts[n + 1] > &pts[n] * &pts[n] {
                return Err(Error::invalid(format!(
                    "stage {n}: f(2^{}) > f(2^{n})^2",
                    n + 1
                )));
            }
        }
        Ok(pts)
    }
}

/// `c_1, c_2, c_4, .., c_(2^n_max)` and the report on
/// `f(2^(n+1)) <= f(1) c_1 .. c_(2^n) <= 4 f(2^(n+1))`.
pub fn c_sequence(target: &mut SBTarget, n_max: usize) -> Result<(Vec<ExactInt>, CheckReport)> {
    let pts = target.dyadic(n_max)?;
    Ok(c_from_points(&pts, n_max))
}

fn c_from_points(pts: &[ExactInt], n_max: usize) -> (Vec<ExactInt>, CheckReport) {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut prod = pts[0].clone();
    let mut cx = None;
    for n in 0..=n_max {
        let (q, r) = pts[n + 1].div_rem(&pts[n]);
        let ceil = if r.is_zero() { q.clone() } else { &q + 1u32 };
        let cn = if n == 0 || prod < BigUint::from(2u32) * &pts[n] {
            ceil
        } else {
            q
        };
        prod *= &cn;
        c.push(cn);
        if cx.is_none() {
            let hi = BigUint::from(4u32) * &pts[n + 1];
            if prod < pts[n + 1] {
                cx = Some(Counterexample {
                    indices: vec![n as u64],
                    lhs: pts[n + 1].clone(),
                    rhs: prod.clone(),
                });
            } else if prod > hi {
                cx = Some(Counterexample {
                    indices: vec![n as u64],
                    lhs: prod.clone(),
                    rhs: hi,
                });
            }
        }
    }
    (c, CheckReport::from_outcome("lemma_c", 0, n_max as u64, cx))
}

/// How `C(2^n)` is completed beyond the mandated word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChoiceRule {
    LexLeast,
    Seeded(u64),
}

#[derive(Clone, Debug)]
struct Level {
    /// `W(2^n)`, sorted, flat; `None` once past the byte budget.
    w: Option<Vec<u8>>,
    /// `C(2^n)`, sorted, flat.
    c: Option<Vec<u8>>,
    w_count: ExactInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct WordRef {
    level: usize,
    index: usize,
}

/// One erasure from the queue: the front word `u_1` at `stage`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Erasure {
    pub stage: usize,
    pub inserted: usize,
    word: WordRef,
}

/// Stage-indexed state of the construction.
#[derive(Clone, Debug)]
pub struct SBState {
    stage: usize,
    alphabet: usize,
    levels: Vec<Level>,
    c: Vec<ExactInt>,
    queue: VecDeque<(WordRef, usize)>,
    erasures: Vec<Erasure>,
    rng: Option<ChaCha8Rng>,
    budget: usize,
}

impl SBState {
    /// Stage 0: `W(1) = U(1) = X` with `|X| = f(1)`, and `C(1)` chosen. The
    /// `c` values are fixed through stage `n_max`.
    pub fn new(target: &mut SBTarget, n_max: usize, rule: ChoiceRule, budget: usize) -> Result<Self> {
        let (c, report) = c_sequence(target, n_max)?;
        if !report.passed() {
            return Err(Error::invalid("c sequence violates its bounds"));
        }
        let f1 = target.eval(1)?;
        let alphabet = f1
            .to_usize()
            .filter(|&a| a <= 256)
            .ok_or_else(|| Error::invalid("f(1) must be at most 256"))?;
        let w: Vec<u8> = (0..alphabet).map(|a| a as u8).collect();
        let mut state = SBState {
            stage: 0,
            alphabet,
            levels: vec![Level {
                w: (alphabet <= budget).then_some(w),
                c: None,
                w_count: f1,
            }],
            c,
            queue: (0..alphabet)
                .map(|i| (WordRef { level: 0, index: i }, 0))
                .collect(),
            erasures: Vec::new(),
            rng: match rule {
                ChoiceRule::LexLeast => None,
                ChoiceRule::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
            },
            budget,
        };
        state.choose()?;
        Ok(state)
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn c_values(&self) -> &[ExactInt] {
        &self.c
    }

    /// `|W(2^n)|`, also past the byte budget.
    pub fn w_count(&self, n: usize) -> Option<&ExactInt> {
        self.levels.get(n).map(|l| &l.w_count)
    }

    pub fn materialized(&self, n: usize) -> bool {
        self.levels.get(n).is_some_and(|l| l.w.is_some() && l.c.is_some())
    }

    /// Deepest stage with `W` and `C` held as sets.
    pub fn materialized_stage(&self) -> Option<usize> {
        (0..self.levels.len()).rev().find(|&n| self.materialized(n))
    }

    pub fn w_words(&self, n: usize) -> Option<impl Iterator<Item = &[u8]>> {
        let w = self.levels.get(n)?.w.as_ref()?;
        Some(w.chunks(1 << n))
    }

    pub fn c_words(&self, n: usize) -> Option<impl Iterator<Item = &[u8]>> {
        let c = self.levels.get(n)?.c.as_ref()?;
        Some(c.chunks(1 << n))
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Front of `U(2^n)` for the current stage, once consumed by the choice.
    pub fn erasures(&self) -> &[Erasure] {
        &self.erasures
    }

    pub fn erased_word(&self, e: &Erasure) -> &[u8] {
        self.word(e.word)
    }

    fn word(&self, r: WordRef) -> &[u8] {
        let len = 1 << r.level;
        let w = self.levels[r.level].w.as_ref().expect("queued words are materialized");
        &w[r.index * len..(r.index + 1) * len]
    }

    /// Picks `C(2^n)` for the current stage (front word `u_1` prefixes one
    /// member) and pops `u_1`.
    fn choose(&mut self) -> Result<()> {
        let n = self.stage;
        let Some(w) = self.levels[n].w.as_ref() else {
            return Ok(());
        };
        let len = 1usize << n;
        let count = w.len() / len;
        let c = self.c[n]
            .to_usize()
            .filter(|&c| c <= count)
            .ok_or_else(|| Error::invalid(format!("stage {n}: c exceeds |W|")))?;
        let (front, inserted) = *self.queue.front().expect("queue is never empty");
        let u1 = self.word(front).to_vec();
        let k = u1.len();
        let w = self.levels[n].w.as_ref().unwrap();
        let lo = partition(w, len, |x| &x[..k] < u1.as_slice());
        let hi = partition(w, len, |x| &x[..k] <= u1.as_slice());
        debug_assert!(lo < hi);
        let mut picked = match self.rng.as_mut() {
            None => {
                let mut p = vec![lo];
                p.extend((0..count).filter(|&i| i != lo).take(c - 1));
                p
            }
            Some(rng) => {
                let first = rng.gen_range(lo..hi);
                let mut p = vec![first];
                p.extend(
                    sample(rng, count - 1, c - 1)
                        .into_iter()
                        .map(|i| if i >= first { i + 1 } else { i }),
                );
                p
            }
        };
        picked.sort_unstable();
        let mut cw = Vec::with_capacity(c * len);
        for i in picked {
            cw.extend_from_slice(&w[i * len..(i + 1) * len]);
        }
        self.levels[n].c = Some(cw);
        self.queue.pop_front();
        self.erasures.push(Erasure {
            stage: n,
            inserted,
            word: front,
        });
        Ok(())
    }

    /// `W(2^(n+1)) = W(2^n) C(2^n)`; the queue gains every new word and the
    /// next `C` is chosen.
    pub fn advance_stage(&mut self) -> Result<()> {
        let n = self.stage;
        if n + 1 >= self.c.len() {
            return Err(Error::Budget(format!("c values are fixed only through stage {}", self.c.len() - 1)));
        }
        let w_count = &self.levels[n].w_count * &self.c[n];
        let len = 1usize << n;
        let bytes = w_count.to_usize().and_then(|c| c.checked_mul(2 * len));
        let next = match (&self.levels[n].w, &self.levels[n].c, bytes) {
            (Some(w), Some(c), Some(b)) if b <= self.budget => {
                let mut out = Vec::with_capacity(b);
                for x in w.chunks(len) {
                    for y in c.chunks(len) {
                        out.extend_from_slice(x);
                        out.extend_from_slice(y);
                    }
                }
                Some(out)
            }
            _ => None,
        };
        let materialized = next.is_some();
        let added = w_count.to_usize().unwrap_or(0);
        self.levels.push(Level {
            w: next,
            c: None,
            w_count,
        });
        self.stage = n + 1;
        if materialized {
            self.queue.extend((0..added).map(|i| {
                (
                    WordRef {
                        level: n + 1,
                        index: i,
                    },
                    n + 1,
                )
            }));
            self.choose()?;
        }
        Ok(())
    }

    /// Replaces `C(2^n)` without touching later stages; for negative
    /// controls of [`check_recurrence`].
    pub fn override_choice(&mut self, n: usize, words: &[&[u8]]) -> Result<()> {
        let len = 1usize << n;
        let level = self
            .levels
            .get_mut(n)
            .ok_or_else(|| Error::invalid("no such stage"))?;
        if words.iter().any(|w| w.len() != len) {
            return Err(Error::invalid("C words have the stage length"));
        }
        let mut sorted: Vec<&[u8]> = words.to_vec();
        sorted.sort_unstable();
        level.c = Some(sorted.concat());
        Ok(())
    }
}

fn partition(flat: &[u8], len: usize, pred: impl Fn(&[u8]) -> bool) -> usize {
    let (mut lo, mut hi) = (0, flat.len() / len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(&flat[mid * len..(mid + 1) * len]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs `stages` advances from stage 0.
pub fn run(target: &mut SBTarget, stages: usize, rule: ChoiceRule, budget: usize) -> Result<SBState> {
    let mut s = SBState::new(target, stages, rule, budget)?;
    for _ in 0..stages {
        s.advance_stage()?;
    }
    Ok(s)
}

/// Structural checks: sizes, `C(2^n) <= W(2^n)` with the `u_1` word, and
/// `W(2^(n+1)) = W(2^n) C(2^n)`.
pub fn check_state(s: &SBState) -> CheckReport {
    let top = s.materialized_stage().unwrap_or(0);
    let mut prod = BigUint::from(s.alphabet);
    for n in 0..=s.stage {
        let level = &s.levels[n];
        let fail = |lhs: ExactInt, rhs: ExactInt, why: &str| {
            CheckReport::fail("state_invariants", 0, top as u64, Counterexample {
                indices: vec![n as u64],
                lhs,
                rhs,
            })
            .note("rule", why)
        };
        if level.w_count != prod {
            return fail(level.w_count.clone(), prod, "w_count");
        }
        if let Some(w) = &level.w {
            let len = 1 << n;
            if BigUint::from(w.len() / len) != level.w_count {
                return fail(BigUint::from(w.len() / len), level.w_count.clone(), "w_size");
            }
            if let Some(c) = &level.c {
                if BigUint::from(c.len() / len) != s.c[n] {
                    return fail(BigUint::from(c.len() / len), s.c[n].clone(), "c_size");
                }
                let inside = c.chunks(len).all(|x| {
                    let i = partition(w, len, |y| y < x);
                    i < w.len() / len && &w[i * len..(i + 1) * len] == x
                });
                if !inside {
                    return fail(BigUint::zero(), BigUint::one(), "c_subset");
                }
                let e = s.erasures.iter().find(|e| e.stage == n);
                if let Some(e) = e {
                    let u = s.erased_word(e);
                    if !c.chunks(len).any(|x| x.starts_with(u)) {
                        return fail(BigUint::zero(), BigUint::one(), "u1_prefix");
                    }
                }
                if let Some(next) = s.levels.get(n + 1).and_then(|l| l.w.as_ref()) {
                    let mut i = 0;
                    for x in w.chunks(len) {
                        for y in c.chunks(len) {
                            let z = &next[i..i + 2 * len];
                            if &z[..len] != x || &z[len..] != y {
                                return fail(BigUint::zero(), BigUint::one(), "w_product");
                            }
                            i += 2 * len;
                        }
                    }
                }
            }
        }
        if n < s.c.len() {
            prod *= &s.c[n];
        }
    }
    CheckReport::pass("state_invariants", 0, top as u64)
}

/// Every word erased by stage `horizon` prefixes a member of some `C(2^N)`
/// with `stage <= N <= horizon`.
pub fn check_recurrence(s: &SBState, horizon: usize) -> CheckReport {
    let horizon = horizon.min(s.materialized_stage().unwrap_or(0));
    let mut latency: BTreeMap<usize, u64> = BTreeMap::new();
    let mut wait: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cx = None;
    for e in s.erasures.iter().filter(|e| e.stage <= horizon) {
        let u = s.erased_word(e);
        let served = (e.stage..=horizon).find(|&n| {
            s.c_words(n)
                .is_some_and(|mut it| it.any(|x| x.starts_with(u)))
        });
        match served {
            Some(n) => *latency.entry(n - e.stage).or_default() += 1,
            None if cx.is_none() => {
                cx = Some(Counterexample {
                    indices: vec![e.stage as u64, e.inserted as u64],
                    lhs: BigUint::zero(),
                    rhs: BigUint::one(),
                })
            }
            None => {}
        }
        *wait.entry(e.stage - e.inserted).or_default() += 1;
    }
    let hist = |m: &BTreeMap<usize, u64>| {
        serde_json::Value::Object(
            m.iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::from(*v)))
                .collect(),
        )
    };
    CheckReport::from_outcome("recurrence", 0, horizon as u64, cx)
        .note("service_latency", hist(&latency))
        .note("queue_wait", hist(&wait))
        .note("pending", s.queue.len() as u64)
}

/// Factors of the construction by length, read off the windows of
/// `W(2^m) C(2^m) u C(2^m) W(2^m)` for the least `m` with `2^m >= L`. Every
/// factor of length at most `2^m` sits inside two adjacent blocks of length
/// `2^m`, so the table contains the factor language up to `L`.
#[derive(Clone, Debug)]
pub struct FactorTable {
    alphabet: usize,
    /// `sets[l]`: sorted distinct factors of length `l`, flat.
    sets: Vec<Vec<u8>>,
}

impl FactorTable {
    pub fn max_len(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn count(&self, l: usize) -> usize {
        if l == 0 {
            1
        } else {
            self.sets[l].len() / l
        }
    }

    pub fn words(&self, l: usize) -> impl Iterator<Item = &[u8]> {
        let step = l.max(1);
        self.sets[l].chunks(step).take(if l == 0 { 0 } else { usize::MAX })
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        let l = w.len();
        if l == 0 {
            return true;
        }
        if l > self.max_len() {
            return false;
        }
        let set = &self.sets[l];
        let i = partition(set, l, |x| x < w);
        i < set.len() / l && &set[i * l..(i + 1) * l] == w
    }

    /// `[gamma'(0) = 1, gamma'(1), ..]`.
    pub fn per_length(&self) -> Vec<ExactInt> {
        (0..=self.max_len()).map(|l| BigUint::from(self.count(l))).collect()
    }

    /// Both length `l - 1` subwords of every stored factor are stored.
    pub fn check_hereditary(&self) -> CheckReport {
        let bad = (2..=self.max_len()).find_map(|l| {
            self.words(l)
                .find(|w| !self.contains(&w[1..]) || !self.contains(&w[..l - 1]))
                .map(|_| l)
        });
        CheckReport::from_outcome(
            "hereditary",
            1,
            self.max_len() as u64,
            bad.map(|l| Counterexample {
                indices: vec![l as u64],
                lhs: BigUint::zero(),
                rhs: BigUint::one(),
            }),
        )
    }
}

/// Window enumeration up to length `max_len`; needs stage `m` with
/// `2^m >= max_len` materialized.
pub fn factors(s: &SBState, max_len: usize) -> Result<FactorTable> {
    if max_len == 0 {
        return Err(Error::invalid("factor length must be positive"));
    }
    let top = max_len.next_power_of_two().trailing_zeros() as usize;
    if !s.materialized(top) {
        return Err(Error::invalid(format!(
            "factors to length {max_len} need stage {top} materialized"
        )));
    }
    let len = 1usize << top;
    let w = s.levels[top].w.as_ref().unwrap();
    let c = s.levels[top].c.as_ref().unwrap();
    let mut pairs: Vec<u8> = Vec::with_capacity(2 * w.len() * c.len() / len);
    for (a, b) in [(w, c), (c, w)] {
        for x in a.chunks(len) {
            for y in b.chunks(len) {
                pairs.extend_from_slice(x);
                pairs.extend_from_slice(y);
            }
        }
    }
    let mut sets: Vec<Vec<u8>> = (0..=max_len)
        .into_par_iter()
        .map(|l| {
            if l == 0 {
                return Vec::new();
            }
            let mut seen: HashSet<&[u8]> = HashSet::new();
            for z in pairs.chunks(2 * len) {
                for p in 0..=2 * len - l {
                    seen.insert(&z[p..p + l]);
                }
            }
            let mut v: Vec<&[u8]> = seen.into_iter().collect();
            v.sort_unstable();
            v.concat()
        })
        .collect();
    sets.shrink_to_fit();
    Ok(FactorTable {
        alphabet: s.alphabet,
        sets,
    })
}

/// Growth of the factor language and the bounds it is meant to satisfy.
pub struct GammaS {
    /// `gamma'(0..=L)`.
    pub per_length: Vec<ExactInt>,
    /// `gamma(n)`, words of length at most `n`, the empty word included.
    pub gamma: GrowthFn,
    pub reports: Vec<CheckReport>,
}

impl GammaS {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }
}

/// Counts from the table and the checks `f(n) <= gamma'(2n)`,
/// `gamma'(n) <= 64 n f(4n)`, `gamma(n) <= 64 n^2 f(4n)`, monotone
/// `gamma'`, and the d = 2 derivative condition on `gamma`.
pub fn gamma_s(table: &FactorTable, target: &mut SBTarget) -> Result<GammaS> {
    let l = table.max_len();
    let per_length = table.per_length();
    let mut cum = Vec::with_capacity(l + 1);
    let mut acc = BigUint::zero();
    for c in &per_length {
        acc += c;
        cum.push(acc.clone());
    }
    let mut reports = Vec::new();

    let first = if per_length[1] == target.eval(1)? {
        None
    } else {
        Some(cx1(1, per_length[1].clone(), target.eval(1)?))
    };
    reports.push(CheckReport::from_outcome("gamma_prime_1_eq_f1", 1, 1, first));

    let mut low = None;
    for n in 1..=l / 2 {
        let fv = target.eval(n)?;
        if fv > per_length[2 * n] {
            low = Some(cx1(n, fv, per_length[2 * n].clone()));
            break;
        }
    }
    reports.push(CheckReport::from_outcome("f_le_gamma_prime_2n", 1, (l / 2) as u64, low));

    let (mut up1, mut up2) = (None, None);
    for n in 1..=l {
        let f4 = target.eval(4 * n)?;
        let b1 = BigUint::from(64 * n as u64) * &f4;
        if up1.is_none() && per_length[n] > b1 {
            up1 = Some(cx1(n, per_length[n].clone(), b1.clone()));
        }
        let b2 = b1 * BigUint::from(n as u64);
        if up2.is_none() && cum[n] > b2 {
            up2 = Some(cx1(n, cum[n].clone(), b2));
        }
    }
    reports.push(CheckReport::from_outcome("gamma_prime_le_64n_f4n", 1, l as u64, up1));
    reports.push(CheckReport::from_outcome("gamma_le_64n2_f4n", 1, l as u64, up2));

    let mono = (1..=l)
        .find(|&n| per_length[n] < per_length[n - 1])
        .map(|n| cx1(n, per_length[n - 1].clone(), per_length[n].clone()));
    reports.push(CheckReport::from_outcome("gamma_prime_nondecreasing", 0, l as u64, mono));
    reports.push(bz_condition_on(&cum, 2)?);

    Ok(GammaS {
        per_length,
        gamma: GrowthFn::from_table("gamma_s", cum)?,
        reports,
    })
}

fn cx1(n: usize, lhs: ExactInt, rhs: ExactInt) -> Counterexample {
    Counterexample {
        indices: vec![n as u64],
        lhs,
        rhs,
    }
}

/// For stored `u, v` of length at most `short`, some stored factor of length
/// at most `long` reads `u w v`.
pub fn check_finite_irreducible(table: &FactorTable, short: usize, long: usize) -> Result<CheckReport> {
    if short == 0 || long < 2 * short || long > table.max_len() {
        return Err(Error::invalid(format!(
            "irreducibility at {short} needs factors to length {long}"
        )));
    }
    let mut joined: HashSet<(&[u8], &[u8])> = HashSet::new();
    for l in 2..=long {
        for z in table.words(l) {
            for a in 1..=short.min(l - 1) {
                for b in 1..=short.min(l - a) {
                    joined.insert((&z[..a], &z[l - b..]));
                }
            }
        }
    }
    let shorts: Vec<&[u8]> = (1..=short).flat_map(|l| table.words(l)).collect();
    let miss = shorts.iter().enumerate().find_map(|(i, u)| {
        shorts
            .iter()
            .position(|v| !joined.contains(&(*u, *v)))
            .map(|j| (i, j))
    });
    let report = CheckReport::from_outcome(
        "finite_irreducible",
        1,
        short as u64,
        miss.map(|(i, j)| Counterexample {
            indices: vec![i as u64, j as u64],
            lhs: BigUint::zero(),
            rhs: BigUint::one(),
        }),
    )
    .note("pairs", (shorts.len() * shorts.len()) as u64)
    .note("long", long as u64);
    Ok(match miss {
        Some((i, j)) => report
            .note("u", format_letters(shorts[i]))
            .note("v", format_letters(shorts[j])),
        None => report,
    })
}

/// Letters as dot-separated numbers, since the alphabet may exceed ten.
pub fn format_letters(w: &[u8]) -> String {
    w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".")
}

/// Summary of one run, as written by `sb run`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SBReport {
    pub stages: usize,
    pub max_len: usize,
    pub c: Vec<String>,
    pub w_sizes: Vec<String>,
    pub gamma_prime: Vec<String>,
    pub reports: Vec<CheckReport>,
}
