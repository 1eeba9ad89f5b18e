//! The derivative-squaring function: `2^k` up to `2^{n_1}`, then on each
//! stage a linear stretch `f(k-1) + k + 1` followed by a stretch where the
//! increment is the smallest squared increment over the back half window.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{iroot, ExactInt};
use crate::seqfn::{
    condition2_indices, condition2_sides, CheckReport, Condition2Witness, Counterexample,
};

/// Stage exponents `n_1 < n_2 < ..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BzSchedule {
    pub n: Vec<u32>,
}

impl BzSchedule {
    pub fn new(n: Vec<u32>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::invalid("schedule needs at least one stage"));
        }
        if n.iter().any(|&x| x >= 63) {
            return Err(Error::invalid("stage exponents must be below 63"));
        }
        Ok(BzSchedule { n })
    }

    /// Smallest schedule that validates and reaches stage 2: `(3, 13, 33)`.
    pub fn default_schedule() -> Self {
        BzSchedule { n: vec![3, 13, 33] }
    }

    fn stage_start(&self, i: usize) -> u64 {
        1u64 << self.n[i]
    }

    fn linear_end(&self, i: usize) -> u64 {
        1u64 << (self.n[i] as u64 + i as u64 + 1).min(63)
    }

    fn segment(&self, k: u64) -> Segment {
        if k <= self.stage_start(0) {
            return Segment::Power;
        }
        let i = self
            .n
            .iter()
            .rposition(|&e| k > 1u64 << e)
            .expect("k exceeds the first stage");
        if k <= self.linear_end(i) {
            Segment::Linear
        } else {
            Segment::Squaring
        }
    }
}

impl fmt::Display for BzSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.n.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for BzSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad schedule entry {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        BzSchedule::new(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Segment {
    Power,
    Linear,
    Squaring,
}

/// `n_1 > 2`, and for consecutive stages (1-based `i`) `n_{i+1} > n_i + i`
/// and `n_{i+1} > 2(n_i + i + 1)`. Counterexample indices name the stage.
pub fn validate_bz(s: &BzSchedule) -> CheckReport {
    let len = s.n.len() as u64;
    let fail = |i: u64, lhs: u64, rhs: u64, rule: &str| {
        CheckReport::fail(
            "bz_schedule",
            1,
            len,
            Counterexample {
                indices: vec![i],
                lhs: BigUint::from(lhs),
                rhs: BigUint::from(rhs),
            },
        )
        .note("rule", rule)
    };
    if s.n[0] <= 2 {
        return fail(1, s.n[0] as u64, 2, "n_1 > 2");
    }
    for (idx, w) in s.n.windows(2).enumerate() {
        let i = idx as u64 + 1;
        let (a, b) = (w[0] as u64, w[1] as u64);
        if b <= a + i {
            return fail(i, b, a + i, "n_{i+1} > n_i + i");
        }
        if b <= 2 * (a + i + 1) {
            return fail(i, b, 2 * (a + i + 1), "n_{i+1} > 2(n_i + i + 1)");
        }
    }
    CheckReport::pass("bz_schedule", 1, len)
}

/// Sequential evaluator yielding `(k, f(k), f'(k))` for `k = 1, 2, ..`.
///
/// Only the monotone-deque candidates for the window minimum of `f'` are
/// retained.
pub struct BzStream {
    schedule: BzSchedule,
    k: u64,
    f: ExactInt,
    fprime: ExactInt,
    // (d, f'(d)) with strictly increasing f'
    window: VecDeque<(u64, ExactInt)>,
}

impl BzStream {
    pub fn new(schedule: &BzSchedule) -> Self {
        BzStream {
            schedule: schedule.clone(),
            k: 0,
            f: BigUint::one(),
            fprime: BigUint::default(),
            window: VecDeque::new(),
        }
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    pub fn value(&self) -> &ExactInt {
        &self.f
    }

    pub fn derivative(&self) -> &ExactInt {
        &self.fprime
    }

    /// Number of retained window candidates.
    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn advance(&mut self) {
        let k = self.k + 1;
        let (f, fp) = match self.schedule.segment(k) {
            Segment::Power => {
                let f = BigUint::one() << k;
                let fp = if k == 1 { f.clone() } else { BigUint::one() << (k - 1) };
                (f, fp)
            }
            Segment::Linear => {
                let fp = BigUint::from(k + 1);
                (&self.f + &fp, fp)
            }
            Segment::Squaring => {
                let lo = k.div_ceil(2);
                while self.window.front().is_some_and(|(d, _)| *d < lo) {
                    self.window.pop_front();
                }
                let (_, min) = self.window.front().expect("window nonempty");
                let fp = min * min;
                (&self.f + &fp, fp)
            }
        };
        while self.window.back().is_some_and(|(_, v)| *v >= fp) {
            self.window.pop_back();
        }
        self.window.push_back((k, fp.clone()));
        self.k = k;
        self.f = f;
        self.fprime = fp;
    }

    /// Advance to index `k`; `k` must not be behind the stream.
    pub fn advance_to(&mut self, k: u64) -> Result<()> {
        if k < self.k {
            return Err(Error::invalid("stream cannot move backwards"));
        }
        while self.k < k {
            self.advance();
        }
        Ok(())
    }
}

fn check_cap(index: u64, cap: u64) -> Result<()> {
    if index > cap {
        Err(Error::CapOverflow { index, cap })
    } else {
        Ok(())
    }
}

pub fn eval_bz(s: &BzSchedule, k: u64, cap: u64) -> Result<ExactInt> {
    check_cap(k, cap)?;
    let mut st = BzStream::new(s);
    st.advance_to(k)?;
    Ok(st.f)
}

/// `[f(0) = 1, f(1), .., f(upto)]`.
pub fn bz_table(s: &BzSchedule, upto: u64, cap: u64) -> Result<Vec<ExactInt>> {
    check_cap(upto, cap)?;
    let mut st = BzStream::new(s);
    let mut out = Vec::with_capacity(upto as usize + 1);
    out.push(BigUint::one());
    for _ in 0..upto {
        st.advance();
        out.push(st.f.clone());
    }
    Ok(out)
}

/// Values `f(k)` at the requested indices only (index 0 gives 1).
pub fn bz_probe(
    s: &BzSchedule,
    indices: &BTreeSet<u64>,
    cap: u64,
) -> Result<BTreeMap<u64, ExactInt>> {
    let mut out = BTreeMap::new();
    let Some(&top) = indices.iter().next_back() else {
        return Ok(out);
    };
    check_cap(top, cap)?;
    let mut st = BzStream::new(s);
    for &k in indices {
        st.advance_to(k)?;
        out.insert(k, st.f.clone());
    }
    Ok(out)
}

/// `ceil(2^(n/2))`.
fn aux_threshold_exp(n: u32) -> u64 {
    let x = BigUint::one() << n;
    let r = iroot(&x, 2).expect("degree 2");
    let r = if &r * &r == x { r } else { r + 1u32 };
    u64::try_from(r).expect("threshold exponent fits u64")
}

/// `f'(k) >= 2^(ceil(2^(n/2)))` on the dyadic block `(2^(n-1), 2^n]` with
/// `n` the exponent of stage `i` (0-based into the schedule list, so
/// `i = 1` is the second listed exponent).
pub fn check_aux(s: &BzSchedule, i: usize, cap: u64) -> Result<CheckReport> {
    let n = *s
        .n
        .get(i)
        .ok_or_else(|| Error::invalid(format!("stage {i} beyond schedule of length {}", s.n.len())))?;
    let hi = 1u64 << n;
    let lo = hi >> 1;
    check_cap(hi, cap)?;
    let t = aux_threshold_exp(n);
    let mut st = BzStream::new(s);
    st.advance_to(lo)?;
    let mut min_bits = u64::MAX;
    let mut argmin = 0;
    let mut min_val = BigUint::default();
    while st.k < hi {
        st.advance();
        let b = st.fprime.bits();
        if b < min_bits {
            min_bits = b;
            argmin = st.k;
            min_val = st.fprime.clone();
        }
    }
    let property = format!("aux(i={i})");
    // floor(log2 f') = bits - 1 and exact form 4 e^2 >= 2^(n + 2)
    let e = BigUint::from(min_bits - 1);
    let exact_form = &e * &e * 4u32 >= BigUint::one() << (n + 2);
    let report = if min_bits > t {
        CheckReport::pass(property, lo + 1, hi)
    } else {
        CheckReport::fail(
            property,
            lo + 1,
            hi,
            Counterexample {
                indices: vec![argmin],
                lhs: min_val,
                rhs: BigUint::one() << t,
            },
        )
    };
    Ok(report
        .note("threshold_exp", t)
        .note("min_bits", min_bits)
        .note("argmin", argmin)
        .note("exact_form_holds", exact_form))
}

/// Result of [`refute_condition2`]: the first strict witness if any, and
/// the stage whose indices exceeded the cap, if the search stopped there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuteOutcome {
    pub witness: Option<Condition2Witness>,
    pub overflow: Option<StageOverflow>,
    pub checked: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOverflow {
    pub i: u64,
    pub index: u64,
    pub cap: u64,
}

/// The compact witness record written by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSummary {
    #[serde(rename = "C")]
    pub c: u64,
    pub i: u64,
    pub m: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub lhs_bits: u64,
    pub rhs_bits: u64,
    pub strict: bool,
}

impl From<&Condition2Witness> for WitnessSummary {
    fn from(w: &Condition2Witness) -> Self {
        WitnessSummary {
            c: w.c,
            i: w.i,
            m: w.m,
            big_n: w.big_n,
            lhs_bits: w.lhs.bits(),
            rhs_bits: w.rhs.bits(),
            strict: w.lhs > w.rhs,
        }
    }
}

/// Prescribed probe `m = floor(N / (C^2 + 1))`, `N = 2^(n_{i+1})`.
pub fn refute_point(s: &BzSchedule, c: u64, i: usize) -> Result<(u64, u64)> {
    let n = *s
        .n
        .get(i)
        .ok_or_else(|| Error::invalid(format!("stage {i} beyond schedule")))?;
    let big_n = 1u64 << n;
    Ok((big_n / (c * c + 1), big_n))
}

/// Evaluate Condition (II) at a single `(m, N)`.
pub fn condition2_at(
    s: &BzSchedule,
    c: u64,
    m: u64,
    big_n: u64,
    cap: u64,
) -> Result<(ExactInt, ExactInt)> {
    let idx = condition2_indices(c, m, big_n)?;
    let vals = bz_probe(s, &idx.iter().copied().collect(), cap)?;
    Ok(condition2_sides(&idx, idx.map(|k| &vals[&k])))
}

/// Stages `i = 1..=i_max` in order; stops at the first strict violation or
/// at the first stage whose indices exceed the cap (later stages are larger).
pub fn refute_condition2(s: &BzSchedule, c: u64, i_max: usize, cap: u64) -> Result<RefuteOutcome> {
    if c == 0 {
        return Err(Error::invalid("C must be positive"));
    }
    let mut out = RefuteOutcome {
        witness: None,
        overflow: None,
        checked: Vec::new(),
    };
    for i in 1..=i_max.min(s.n.len() - 1) {
        let (m, big_n) = refute_point(s, c, i)?;
        if m == 0 {
            continue;
        }
        let idx = condition2_indices(c, m, big_n)?;
        let top = *idx.iter().max().unwrap();
        if top > cap {
            out.overflow = Some(StageOverflow { i: i as u64, index: top, cap });
            break;
        }
        let (lhs, rhs) = condition2_at(s, c, m, big_n, cap)?;
        out.checked.push(i as u64);
        if lhs > rhs {
            out.witness = Some(Condition2Witness {
                c,
                i: i as u64,
                m,
                big_n,
                lhs,
                rhs,
            });
            break;
        }
    }
    Ok(out)
}
