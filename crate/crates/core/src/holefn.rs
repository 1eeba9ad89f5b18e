//! The piecewise "hole" function: `2^x` up to `n_1`, then per stage `k` a
//! linear stretch `f(x-1) + x + 1` on `(n_k, d_k n_k]` and a geometric
//! stretch `floor(2^(1/(2 d_1..d_k)) f(x-1))` up to `n_{k+1}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{cmp_pow2, floor_mul_pow2, log2_approx, ExactInt, Pow2Scaler, RatExp};
use crate::seqfn::{
    realizability_indices, realizability_sides, CheckReport, Counterexample, GrowthFn,
    RealizabilityWitness,
};

/// Evaluation limits shared by building, validation and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest index that may be evaluated.
    pub cap: u64,
    /// Length of the verified window on the unbounded final stretch.
    pub sweep: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cap: 1 << 20,
            sweep: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub verified_to: u64,
    pub pass: bool,
}

/// Stage parameters with their constraint ledger. Parameter constraints
/// record the last stage checked in `verified_to`; sweeps record the last
/// index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleSchedule {
    pub d: Vec<u64>,
    pub n: Vec<u64>,
    pub ledger: BTreeMap<String, LedgerEntry>,
}

impl HoleSchedule {
    pub fn k_max(&self) -> usize {
        self.d.len()
    }

    /// `m_k = n_k / k` (stage `k` is 1-based).
    pub fn m(&self, k: usize) -> u64 {
        self.n[k - 1] / k as u64
    }

    pub fn all_pass(&self) -> bool {
        self.ledger.values().all(|e| e.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: HoleSchedule = serde_json::from_str(s)?;
        if h.d.is_empty() || h.d.len() != h.n.len() {
            return Err(Error::Parse("schedule needs equally many d and n entries".into()));
        }
        Ok(h)
    }
}

/// Exact evaluator for a (possibly partial) parameter list.
pub struct HoleFn {
    d: Vec<u64>,
    n: Vec<u64>,
    // 2 d_1 .. d_k
    den: Vec<u64>,
    // f(n_k)
    at_n: Vec<ExactInt>,
    // geo[k][j] = f(d_k n_k + j)
    geo: Vec<Vec<ExactInt>>,
    scalers: Vec<Pow2Scaler>,
    // scaler released by the last pop, reused when the same stage returns
    spare: Option<Pow2Scaler>,
    cap: u64,
}

impl HoleFn {
    pub fn new(schedule: &HoleSchedule, cap: u64) -> Result<Self> {
        let mut h = HoleFn::empty(cap);
        for (&d, &n) in schedule.d.iter().zip(&schedule.n) {
            h.push_stage(d, n)?;
        }
        Ok(h)
    }

    fn empty(cap: u64) -> Self {
        HoleFn {
            d: Vec::new(),
            n: Vec::new(),
            den: Vec::new(),
            at_n: Vec::new(),
            geo: Vec::new(),
            scalers: Vec::new(),
            spare: None,
            cap,
        }
    }

    pub fn stages(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[u64] {
        &self.d
    }

    pub fn n(&self) -> &[u64] {
        &self.n
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// `2 d_1 .. d_k` for 1-based `k`.
    pub fn denominator(&self, k: usize) -> u64 {
        self.den[k - 1]
    }

    /// Append stage `(d_k, n_k)`; `n_k` must lie past the previous linear
    /// stretch.
    pub fn push_stage(&mut self, d: u64, n: u64) -> Result<()> {
        if d < 2 || n == 0 {
            return Err(Error::invalid("stage needs d >= 2 and n >= 1"));
        }
        if let (Some(&dp), Some(&np)) = (self.d.last(), self.n.last()) {
            if n <= dp * np {
                return Err(Error::invalid(format!(
                    "n_k = {n} must exceed d_(k-1) n_(k-1) = {}",
                    dp * np
                )));
            }
        }
        let prev = self.den.last().copied().unwrap_or(2);
        let den = prev
            .checked_mul(d)
            .filter(|&x| x <= u32::MAX as u64)
            .ok_or_else(|| Error::Budget("exponent denominator exceeds u32".into()))?;
        if n > self.cap {
            return Err(Error::CapOverflow {
                index: n,
                cap: self.cap,
            });
        }
        let fn_k = if self.n.is_empty() {
            BigUint::one() << n
        } else {
            let k = self.stages() - 1;
            self.extend_geo(k, n)?;
            self.geo[k][(n - self.d[k] * self.n[k]) as usize].clone()
        };
        let start = d * n;
        let f_start = &fn_k + linear_sum(n, start);
        self.d.push(d);
        self.n.push(n);
        self.den.push(den);
        self.at_n.push(fn_k);
        self.geo.push(vec![f_start]);
        let e = RatExp::recip(den);
        let scaler = match self.spare.take() {
            Some(sc) if sc.exponent() == e => sc,
            _ => Pow2Scaler::new(e)?,
        };
        self.scalers.push(scaler);
        Ok(())
    }

    pub fn pop_stage(&mut self) {
        self.d.pop();
        self.n.pop();
        self.den.pop();
        self.at_n.pop();
        self.geo.pop();
        self.spare = self.scalers.pop();
    }

    fn extend_geo(&mut self, k: usize, x: u64) -> Result<()> {
        if x > self.cap {
            return Err(Error::CapOverflow {
                index: x,
                cap: self.cap,
            });
        }
        let start = self.d[k] * self.n[k];
        let need = (x - start) as usize;
        let seg = &mut self.geo[k];
        while seg.len() <= need {
            let next = self.scalers[k].apply(seg.last().unwrap());
            seg.push(next);
        }
        Ok(())
    }

    // 0-based stage owning x (x > n_1), with whether x is in the linear part
    fn locate(&self, x: u64) -> (usize, bool) {
        let k = self.n.iter().rposition(|&nk| x > nk).expect("x > n_1");
        (k, x <= self.d[k] * self.n[k])
    }

    /// Make every index up to `x` evaluable by [`HoleFn::value`].
    pub fn ensure(&mut self, x: u64) -> Result<()> {
        if x > self.cap {
            return Err(Error::CapOverflow {
                index: x,
                cap: self.cap,
            });
        }
        if self.n.is_empty() {
            return Err(Error::invalid("schedule has no stages"));
        }
        if x <= self.n[0] {
            return Ok(());
        }
        let (k, linear) = self.locate(x);
        if !linear {
            self.extend_geo(k, x)?;
        }
        Ok(())
    }

    /// `f(x)`; index 0 gives 1. Panics unless [`HoleFn::ensure`] covered `x`.
    pub fn value(&self, x: u64) -> ExactInt {
        if x <= self.n[0] {
            return BigUint::one() << x;
        }
        let (k, linear) = self.locate(x);
        if linear {
            &self.at_n[k] + linear_sum(self.n[k], x)
        } else {
            self.geo[k][(x - self.d[k] * self.n[k]) as usize].clone()
        }
    }

    pub fn eval(&mut self, x: u64) -> Result<ExactInt> {
        self.ensure(x)?;
        Ok(self.value(x))
    }

    /// `[f(0), .., f(upto)]`.
    pub fn table(&mut self, upto: u64) -> Result<Vec<ExactInt>> {
        self.ensure(upto)?;
        Ok((0..=upto).map(|x| self.value(x)).collect())
    }

    /// A memoized [`GrowthFn`] over this evaluator.
    pub fn into_growth_fn(mut self) -> GrowthFn {
        let cap = self.cap as usize;
        GrowthFn::new("hole", cap, move |x, _| self.eval(x as u64))
    }

    /// Which stretch holds `x`: `"power"`, `"linear"` or `"geometric"`, with
    /// the 1-based stage.
    pub fn segment_of(&self, x: u64) -> (&'static str, usize) {
        if x <= self.n[0] {
            return ("power", 0);
        }
        let (k, linear) = self.locate(x);
        (if linear { "linear" } else { "geometric" }, k + 1)
    }
}

/// `sum_{j=a+1}^{x} (j + 1) = (x - a)(x + a + 3) / 2`.
fn linear_sum(a: u64, x: u64) -> BigUint {
    let (a, x) = (a as u128, x as u128);
    BigUint::from((x - a) * (x + a + 3) / 2)
}

/// Iterate `a_{j+1} = floor(a_j 2^e)` and check `c^(j-eps) a_0 <= a_j <=
/// c^j a_0` with `c = 2^e` for every `j <= steps`.
pub fn floor_geometric(
    a0: &ExactInt,
    e: RatExp,
    steps: u64,
    eps: RatExp,
) -> Result<(Vec<ExactInt>, CheckReport)> {
    if e.is_negative() || a0.is_zero() {
        return Err(Error::invalid("floor_geometric needs e >= 0 and a0 >= 1"));
    }
    let mut scaler = Pow2Scaler::new(e)?;
    let mut seq = vec![a0.clone()];
    for _ in 0..steps {
        let next = scaler.apply(seq.last().unwrap());
        seq.push(next);
    }
    let property = format!("floor_geometric(e={e}, eps={eps})");
    for (j, a) in seq.iter().enumerate() {
        let j = j as i64;
        let upper = e.mul_int(j);
        if cmp_pow2(a, a0, upper) == Ordering::Greater {
            let report = CheckReport::fail(
                property,
                0,
                steps,
                Counterexample {
                    indices: vec![j as u64],
                    lhs: a.clone(),
                    rhs: a0.clone(),
                },
            )
            .note("side", "upper");
            return Ok((seq, report));
        }
        let lower = e.mul(RatExp::int(j).sub(eps));
        if cmp_pow2(a, a0, lower) == Ordering::Less {
            let report = CheckReport::fail(
                property,
                0,
                steps,
                Counterexample {
                    indices: vec![j as u64],
                    lhs: a.clone(),
                    rhs: a0.clone(),
                },
            )
            .note("side", "lower");
            return Ok((seq, report));
        }
    }
    Ok((seq, CheckReport::pass(property, 0, steps)))
}

/// Growth bound `omega(m)`: a constant, or a table `omega(1), omega(2), ..`
/// that is zero past its end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Omega {
    Constant(RatExp),
    Table(Vec<RatExp>),
}

impl Omega {
    pub fn at(&self, m: u64) -> RatExp {
        match self {
            Omega::Constant(e) => *e,
            Omega::Table(t) => m
                .checked_sub(1)
                .and_then(|i| t.get(i as usize))
                .copied()
                .unwrap_or(RatExp::ZERO),
        }
    }

    /// `max { m : omega(m) >= 1/den }`, or `None` when no such `m` exists.
    /// Errors for a constant at or above `1/den`, which never drops below.
    fn last_at_least(&self, den: u64) -> Result<Option<u64>> {
        let geq = |e: &RatExp| e.p as i128 * den as i128 >= e.q as i128;
        match self {
            Omega::Constant(e) if geq(e) => Err(Error::invalid(
                "constant omega does not fall below 1/(2 d_1 .. d_k)",
            )),
            Omega::Constant(_) => Ok(None),
            Omega::Table(t) => Ok(t.iter().rposition(geq).map(|i| i as u64 + 1)),
        }
    }
}

/// `f(x) >= 2^(x omega(x))` for `n_1 <= x <= N`.
pub fn check_dominates(h: &mut HoleFn, omega: &Omega, upto: u64) -> Result<CheckReport> {
    let lo = h.n()[0];
    h.ensure(upto)?;
    let property = "dominates";
    for x in lo..=upto {
        let e = omega.at(x).mul_int(x as i64);
        let v = h.value(x);
        if cmp_pow2(&v, &BigUint::one(), e) == Ordering::Less {
            return Ok(CheckReport::fail(
                property,
                lo,
                upto,
                Counterexample {
                    indices: vec![x],
                    lhs: v,
                    rhs: BigUint::one(),
                },
            )
            .note("exponent", e.to_string()));
        }
    }
    Ok(CheckReport::pass(property, lo, upto))
}

// --- per-stage exact checks ---

struct Finding {
    name: &'static str,
    verified_to: u64,
    pass: bool,
}

fn finding(name: &'static str, verified_to: u64, pass: bool) -> Finding {
    Finding {
        name,
        verified_to,
        pass,
    }
}

/// Parameter constraints on `d_k` given earlier stages (1-based `k`).
fn d_constraints(d: &[u64], n: &[u64], k: usize) -> Vec<Finding> {
    let dk = d[k - 1];
    let kk = k as u64;
    let mut out = vec![finding("d_ge_2k2", kk, dk >= 2 * kk * kk)];
    if k == 1 {
        out.push(finding("d1_gt_2", 1, dk > 2));
        return out;
    }
    let (dp, np) = (d[k - 2], n[k - 2]);
    // 2 d_1 .. d_(k-2)
    let den2: u64 = 2 * d[..k - 2].iter().product::<u64>();
    out.push(finding("d_increasing", kk, dk > dp));
    out.push(finding("d_ge_n_prev_over_prod", kk, dk * den2 >= np));
    out.push(finding("d_gt_prev_dn_plus_1", kk, dk > dp * np + 1));
    out
}

/// Smallest `d_k` meeting [`d_constraints`].
fn minimal_d(d: &[u64], n: &[u64], k: usize) -> u64 {
    let kk = k as u64;
    let (dp, np) = (d[k - 2], n[k - 2]);
    let den2: u64 = 2 * d[..k - 2].iter().product::<u64>();
    (2 * kk * kk)
        .max(dp + 1)
        .max(np.div_ceil(den2))
        .max(dp * np + 2)
}

fn n_constraints(d: &[u64], n: &[u64], k: usize) -> Vec<Finding> {
    let nk = n[k - 1];
    let kk = k as u64;
    let mut out = vec![
        finding("n_eq_k_m", kk, nk % kk == 0),
        finding("n_gt_2k", kk, nk > 2 * kk),
    ];
    if k == 1 {
        out.push(finding("n1_ge_3", 1, nk >= 3));
    } else {
        let dn = d[k - 2] * n[k - 2];
        out.push(finding("n_gt_2_prev_dn", kk, nk > 2 * dn));
        out.push(finding("n_gt_4_prev_dn", kk, nk > 4 * dn));
    }
    out
}

fn minimal_m(d: &[u64], n: &[u64], k: usize) -> u64 {
    let kk = k as u64;
    // n_k > 2k, n_1 >= 3, n_k > 4 d_(k-1) n_(k-1)
    let mut lo = (2 * kk + 1).max(3);
    if k > 1 {
        lo = lo.max(4 * d[k - 2] * n[k - 2] + 1);
    }
    lo.div_ceil(kk)
}

/// Whether `2^(n/den) (2^(1/den) - 1) > a`, decided exactly by bracketing
/// both powers at increasing fixed-point precision.
fn geometric_gap_exceeds(n: u64, den: u64, a: u64) -> Result<bool> {
    let inv = RatExp::recip(den);
    let en = RatExp::new(n as i64, den as u32)?;
    let mut s = 64u64;
    loop {
        let scale = BigUint::one() << s;
        let y = floor_mul_pow2(&scale, inv)?;
        let z = floor_mul_pow2(&scale, en)?;
        let target = (&scale * &scale) * a;
        if &z * (&y - &scale) > target {
            return Ok(true);
        }
        if (&z + 1u32) * (&y + 1u32 - &scale) <= target {
            return Ok(false);
        }
        if s > 1 << 16 {
            return Err(Error::Budget("ratio bound undecided at 65536 bits".into()));
        }
        s *= 2;
    }
}

/// Float estimate of `log2(2^(n/den)(2^(1/den) - 1)) - log2(a)`.
fn geometric_gap_margin(n: u64, den: u64, a: u64) -> f64 {
    let d = den as f64;
    n as f64 / d + (std::f64::consts::LN_2 / d).exp_m1().log2() - (a as f64).log2()
}

/// Values `d_k^2 n_k^2 <= f(n_k)`, `(n_k^2 + f(n_k))^2 <= 2 f(n_k)^2`,
/// `f(d_k n_k) <= f(n_k) 2^(1/3)` and the ratio bound chain
/// `(t+2)/f(t) <= (d_k n_k + 1)/2^(n_k/den) < 2^(1/den) - 1` on
/// `[n_k, d_k n_k - 1]`.
fn stage_value_checks(h: &HoleFn, k: usize, quick_reject: bool) -> Result<Vec<Finding>> {
    let (dk, nk) = (h.d[k - 1], h.n[k - 1]);
    let den = h.den[k - 1];
    let f_n = &h.at_n[k - 1];
    let f_dn = &h.geo[k - 1][0];
    let kk = k as u64;
    let dn = dk * nk;
    let a = dn + 1;
    if quick_reject && geometric_gap_margin(nk, den, a) < -1e-6 {
        return Ok(vec![finding("ratio_bound", dn, false)]);
    }
    let dn_sq = BigUint::from(dn as u128 * dn as u128);
    let n_sq = BigUint::from(nk as u128 * nk as u128);
    let mut out = vec![
        finding("dn_sq_le_f", kk, dn_sq <= *f_n),
        finding("n_sq_le_sqrt2m1_f", kk, {
            let s = &n_sq + f_n;
            &s * &s <= (f_n * f_n) << 1u32
        }),
        finding(
            "f_dn_le_f_n_cuberoot2",
            kk,
            cmp_pow2(f_dn, f_n, RatExp::new(1, 3)?) != Ordering::Greater,
        ),
    ];
    let ratio_ok = cmp_pow2(f_n, &BigUint::one(), RatExp::new(nk as i64, den as u32)?)
        != Ordering::Less
        && geometric_gap_exceeds(nk, den, a)?;
    out.push(finding("ratio_bound", dn, ratio_ok));
    Ok(out)
}

/// `f(x) >= 2^(x/den_k + 1 + 2^(-k-1))` for `2 <= x <= min(d_k n_k, cap)`.
fn lower_bound_sweep(h: &HoleFn, k: usize) -> Result<Finding> {
    let den = h.den[k - 1];
    let hi = (h.d[k - 1] * h.n[k - 1]).min(h.cap);
    let two = 1i64 << (k + 1);
    let q = u32::try_from(den * two as u64)
        .map_err(|_| Error::Budget("lower bound exponent denominator exceeds u32".into()))?;
    let df = den as f64;
    let tail = 1.0 + 1.0 / two as f64;
    let one = BigUint::one();
    for x in 2..=hi {
        let v = h.value(x);
        let l = log2_approx(&v);
        let t = x as f64 / df + tail;
        if l - t > 1e-6 * (1.0 + l) {
            continue;
        }
        let e = RatExp::new(x as i64 * two + den as i64 * two + den as i64, q)?;
        if cmp_pow2(&v, &one, e) == Ordering::Less {
            return Ok(finding("lower_bound", x, false));
        }
    }
    Ok(finding("lower_bound", hi, true))
}

/// Condition (I) on the geometric stretch of stage `k` over
/// `[d_k n_k, hi]`: `f(y) >= f(x) 2^((y-x)/den - 2^(-k-2))` for all
/// `x <= y`. With `g(x) = log2 f(x) - x/den` this asks that `g` never drops
/// by more than `eps` going right; the float scan finds the only pairs that
/// could fail and those are decided exactly.
fn condition_one(h: &HoleFn, k: usize, hi: u64) -> Result<(bool, Option<(u64, u64)>)> {
    let start = h.d[k - 1] * h.n[k - 1];
    if hi < start {
        return Ok((true, None));
    }
    let den = h.den[k - 1];
    let seg = &h.geo[k - 1];
    let len = (hi - start) as usize + 1;
    let g: Vec<f64> = (0..len)
        .map(|j| log2_approx(&seg[j]) - j as f64 / den as f64)
        .collect();
    let eps_f = (-(k as f64) - 2.0).exp2();
    let guard = 1e-6;
    let eps = RatExp {
        p: 1,
        q: 1u32 << (k + 2),
    };
    // suffix minima
    let mut suffix_min = vec![0usize; len];
    suffix_min[len - 1] = len - 1;
    for j in (0..len - 1).rev() {
        let b = suffix_min[j + 1];
        suffix_min[j] = if g[j] <= g[b] { j } else { b };
    }
    for x in 0..len {
        if g[x] - g[suffix_min[x]] <= eps_f - guard {
            continue;
        }
        for y in x..len {
            if g[x] - g[y] <= eps_f - guard {
                continue;
            }
            let e = RatExp::new((y - x) as i64, den as u32)?.sub(eps);
            if cmp_pow2(&seg[y], &seg[x], e) == Ordering::Less {
                return Ok((false, Some((start + x as u64, start + y as u64))));
            }
        }
    }
    Ok((true, None))
}

/// `f'(x) >= x + 1` on a geometric stretch; linear stretches meet it with
/// equality and the power stretch from `x = 3` on.
fn derivative_lb_geo(h: &HoleFn, k: usize, hi: u64) -> Option<u64> {
    let start = h.d[k - 1] * h.n[k - 1];
    let seg = &h.geo[k - 1];
    (start + 1..=hi).find(|&x| {
        let j = (x - start) as usize;
        &seg[j] - &seg[j - 1] < BigUint::from(x + 1)
    })
}

/// Upper end of the verified window on stage `k`'s geometric stretch.
fn geo_bound(h: &HoleFn, k: usize, limits: &Limits) -> u64 {
    let start = h.d[k - 1] * h.n[k - 1];
    match h.n.get(k) {
        Some(&next) => next.min(limits.cap),
        None => (start + limits.sweep).min(limits.cap),
    }
}

fn merge(ledger: &mut BTreeMap<String, LedgerEntry>, f: Finding) {
    let e = ledger.entry(f.name.to_string()).or_insert(LedgerEntry {
        verified_to: 0,
        pass: true,
    });
    e.verified_to = e.verified_to.max(f.verified_to);
    e.pass &= f.pass;
}

/// All checks that become decidable once stage `k` is fixed: its
/// parameters and values, the lower bound up to `d_k n_k`, and the
/// geometric stretch of stage `k-1` (now bounded by `n_k`). On the last
/// stage the open geometric stretch is checked on the sweep window.
fn stage_findings(
    h: &mut HoleFn,
    k: usize,
    last: bool,
    limits: &Limits,
    quick_reject: bool,
) -> Result<Vec<Finding>> {
    let mut out = d_constraints(&h.d, &h.n, k);
    out.extend(n_constraints(&h.d, &h.n, k));
    if out.iter().any(|f| !f.pass) && quick_reject {
        return Ok(out);
    }
    let values = stage_value_checks(h, k, quick_reject)?;
    let failed = values.iter().any(|f| !f.pass);
    out.extend(values);
    if failed && quick_reject {
        return Ok(out);
    }
    let mut windows = Vec::new();
    if k > 1 {
        windows.push(k - 1);
    }
    if last {
        windows.push(k);
    }
    for &j in &windows {
        let hi = geo_bound(h, j, limits);
        let start = h.d[j - 1] * h.n[j - 1];
        if hi > start {
            h.ensure(hi)?;
        }
        let (ok, _) = condition_one(h, j, hi)?;
        out.push(finding("condition_I", hi, ok));
        let bad = if hi > start { derivative_lb_geo(h, j, hi) } else { None };
        out.push(finding("derivative_lb", hi, bad.is_none()));
    }
    if k == 1 {
        // power stretch from 3 and the linear stretch meet it exactly
        out.push(finding("derivative_lb", h.n[0], true));
    }
    out.push(lower_bound_sweep(h, k)?);
    Ok(out)
}

/// Recompute the full ledger for a parameter list.
pub fn validate_schedule(d: &[u64], n: &[u64], limits: &Limits) -> Result<HoleSchedule> {
    if d.is_empty() || d.len() != n.len() {
        return Err(Error::invalid("schedule needs equally many d and n entries"));
    }
    let mut h = HoleFn::empty(limits.cap);
    let mut ledger = BTreeMap::new();
    for k in 1..=d.len() {
        h.push_stage(d[k - 1], n[k - 1])?;
        for f in stage_findings(&mut h, k, k == d.len(), limits, false)? {
            merge(&mut ledger, f);
        }
    }
    Ok(HoleSchedule {
        d: d.to_vec(),
        n: n.to_vec(),
        ledger,
    })
}

/// Re-derive the ledger of a loaded schedule and compare.
pub fn revalidate(s: &HoleSchedule, limits: &Limits) -> Result<HoleSchedule> {
    validate_schedule(&s.d, &s.n, limits)
}

/// Smallest `d_k`, then smallest `m_k`, such that every ledger check on the
/// evaluable prefix passes.
pub fn build_schedule(
    k_max: usize,
    d1: u64,
    omega: Option<&Omega>,
    limits: &Limits,
) -> Result<HoleSchedule> {
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    if d1 <= 2 {
        return Err(Error::invalid("d_1 must exceed 2"));
    }
    let mut h = HoleFn::empty(limits.cap);
    for k in 1..=k_max {
        let dk = if k == 1 { d1 } else { minimal_d(&h.d, &h.n, k) };
        let den = h.den.last().copied().unwrap_or(2) * dk;
        let kk = k as u64;
        let mut m = minimal_m(&h.d, &h.n, k);
        if let Some(om) = omega {
            if let Some(last) = om.last_at_least(den)? {
                m = m.max(last / kk + 1);
            }
        }
        loop {
            let nk = kk * m;
            if nk > limits.cap {
                return Err(Error::Budget(format!(
                    "no n_{k} up to the cap {} passes the stage checks",
                    limits.cap
                )));
            }
            h.push_stage(dk, nk)?;
            let found = stage_findings(&mut h, k, k == k_max, limits, true)?;
            if found.iter().all(|f| f.pass) {
                break;
            }
            h.pop_stage();
            m += 1;
        }
    }
    let mut out = validate_schedule(&h.d, &h.n, limits)?;
    if let Some(om) = omega {
        let ok = (1..=k_max).all(|k| match om.last_at_least(h.den[k - 1]) {
            Ok(Some(last)) => h.n[k - 1] > last,
            Ok(None) => true,
            Err(_) => false,
        });
        out.ledger.insert(
            "omega_hint".into(),
            LedgerEntry {
                verified_to: k_max as u64,
                pass: ok,
            },
        );
    }
    Ok(out)
}

/// Outcome at the prescribed point; the sides are always reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PrescribedPoint {
    Witness(RealizabilityWitness),
    NoViolation(RealizabilityWitness),
}

impl PrescribedPoint {
    pub fn sides(&self) -> &RealizabilityWitness {
        match self {
            PrescribedPoint::Witness(w) | PrescribedPoint::NoViolation(w) => w,
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, PrescribedPoint::Witness(_))
    }
}

/// `k = C`, `n = m_k + 1`, `D = floor(d_k m_k / (m_k + 1))`.
pub fn prescribed_point(s: &HoleSchedule, c: u64) -> Result<(u64, u64)> {
    let k = c as usize;
    if c == 0 || k > s.k_max() {
        return Err(Error::invalid(format!(
            "C = {c} needs a stage k = C within k_max = {}",
            s.k_max()
        )));
    }
    let m = s.m(k);
    let dk = s.d[k - 1];
    let big_d = dk * m / (m + 1);
    if 2 * big_d < dk || big_d > dk || big_d < c * c {
        return Err(Error::invalid(format!(
            "prescribed D = {big_d} violates d_k/2 <= D <= d_k or D >= C^2"
        )));
    }
    Ok((m + 1, big_d))
}

fn realizability_at(h: &mut HoleFn, c: u64, big_d: u64, n: u64) -> Result<RealizabilityWitness> {
    let idx = realizability_indices(c, big_d, n)?;
    h.ensure(idx[0])?;
    let v = idx.map(|i| h.value(i));
    Ok(realizability_sides(c, big_d, n, [&v[0], &v[1], &v[2], &v[3]]))
}

pub fn find_nonrealizability_witness(
    s: &HoleSchedule,
    c: u64,
    cap: u64,
) -> Result<PrescribedPoint> {
    let (n, big_d) = prescribed_point(s, c)?;
    let mut h = HoleFn::new(s, cap)?;
    let w = realizability_at(&mut h, c, big_d, n)?;
    Ok(if w.holds() {
        PrescribedPoint::NoViolation(w)
    } else {
        PrescribedPoint::Witness(w)
    })
}

/// First violation over `n` in `n_range` and `C^2 <= D <= d_max`, scanning
/// `n` then `D` upward. Points whose indices pass the cap are skipped.
pub fn grid_witness(
    h: &mut HoleFn,
    c: u64,
    n_range: std::ops::RangeInclusive<u64>,
    d_max: u64,
) -> Result<Option<RealizabilityWitness>> {
    for n in n_range {
        for big_d in (c * c).max(1)..=d_max {
            let idx = realizability_indices(c, big_d, n)?;
            if idx[0] > h.cap() {
                break;
            }
            let w = realizability_at(h, c, big_d, n)?;
            if !w.holds() {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}
