//! Growth functions as memoized integer sequences, and the finite checks
//! that apply to any of them.
//!
//! Index 0 carries a conventional origin value (1 unless stated otherwise),
//! so expressions like `f(Cn - C)` are always evaluable.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{float_slack, log2_approx, ExactInt};

pub type Rule = Box<dyn FnMut(usize, &[ExactInt]) -> Result<ExactInt> + Send>;

/// A map `n -> f(n)` defined by a rule that may look at all earlier values.
pub struct GrowthFn {
    name: String,
    memo: Vec<ExactInt>,
    rule: Rule,
    cap: usize,
}

impl fmt::Debug for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFn")
            .field("name", &self.name)
            .field("verified_to", &self.verified_to())
            .field("cap", &self.cap)
            .finish()
    }
}

impl GrowthFn {
    /// `rule(n, prefix)` receives `prefix = [f(0), .., f(n-1)]`.
    pub fn new(
        name: impl Into<String>,
        cap: usize,
        rule: impl FnMut(usize, &[ExactInt]) -> Result<ExactInt> + Send + 'static,
    ) -> Self {
        Self::with_origin(name, cap, BigUint::one(), rule)
    }

    pub fn with_origin(
        name: impl Into<String>,
        cap: usize,
        origin: ExactInt,
        rule: impl FnMut(usize, &[ExactInt]) -> Result<ExactInt> + Send + 'static,
    ) -> Self {
        GrowthFn {
            name: name.into(),
            memo: vec![origin],
            rule: Box::new(rule),
            cap,
        }
    }

    /// A function given by a closed form for `n >= 1`.
    pub fn closed(
        name: impl Into<String>,
        cap: usize,
        form: impl Fn(u64) -> ExactInt + Send + 'static,
    ) -> Self {
        Self::new(name, cap, move |n, _| Ok(form(n as u64)))
    }

    /// A finite table; `values[0]` is the origin value.
    pub fn from_table(name: impl Into<String>, values: Vec<ExactInt>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parse("empty function table".into()));
        }
        let cap = values.len() - 1;
        Ok(GrowthFn {
            name: name.into(),
            memo: values,
            rule: Box::new(move |n, _| {
                Err(Error::CapOverflow {
                    index: n as u64,
                    cap: cap as u64,
                })
            }),
            cap,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Largest index whose value is computed; those values never change.
    pub fn verified_to(&self) -> usize {
        self.memo.len() - 1
    }

    pub fn ensure(&mut self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapOverflow {
                index: n as u64,
                cap: self.cap as u64,
            });
        }
        while self.memo.len() <= n {
            let k = self.memo.len();
            let v = (self.rule)(k, &self.memo)?;
            self.memo.push(v);
        }
        Ok(())
    }

    pub fn eval(&mut self, n: usize) -> Result<ExactInt> {
        self.ensure(n)?;
        Ok(self.memo[n].clone())
    }

    /// `[f(0), .., f(n)]`.
    pub fn prefix(&mut self, n: usize) -> Result<&[ExactInt]> {
        self.ensure(n)?;
        Ok(&self.memo[..=n])
    }

    /// `f'(n) = f(n) - f(n-1)`, with `f'(1) = f(1)`. Saturates at zero.
    pub fn derivative(&mut self, n: usize) -> Result<ExactInt> {
        if n == 0 {
            return Err(Error::invalid("derivative is defined for n >= 1"));
        }
        self.ensure(n)?;
        Ok(derivative_at(&self.memo, n))
    }

    /// `F(n) = f(1) + .. + f(n)`.
    pub fn integral(mut self) -> GrowthFn {
        let name = format!("integral({})", self.name);
        let cap = self.cap;
        GrowthFn::new(name, cap, move |n, prev| {
            let v = self.eval(n)?;
            Ok(if n == 1 { v } else { &prev[n - 1] + v })
        })
    }

    /// Write `n,value` rows for `1..=n`.
    pub fn write_csv<W: Write>(&mut self, n: usize, out: W) -> Result<()> {
        self.ensure(n)?;
        write_table_csv(&self.memo[..=n], out)
    }

    /// Read an `n,value` table. Rows must be consecutive; a leading row for
    /// index 0 sets the origin, otherwise the origin is 1.
    pub fn read_csv<R: Read>(name: impl Into<String>, input: R) -> Result<Self> {
        Self::from_table(name, read_table_csv(input)?)
    }
}

pub(crate) fn derivative_at(values: &[ExactInt], n: usize) -> ExactInt {
    if n == 1 {
        return values[1].clone();
    }
    if values[n] >= values[n - 1] {
        &values[n] - &values[n - 1]
    } else {
        BigUint::zero()
    }
}

/// `[f'(0) := 0, f'(1), .., f'(N)]` from `[f(0), .., f(N)]`.
pub fn derivatives(values: &[ExactInt]) -> Vec<ExactInt> {
    let mut out = Vec::with_capacity(values.len());
    out.push(BigUint::zero());
    for n in 1..values.len() {
        out.push(derivative_at(values, n));
    }
    out
}

pub fn write_table_csv<W: Write>(values: &[ExactInt], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "value"]).map_err(csv_err)?;
    for (n, v) in values.iter().enumerate().skip(1) {
        w.write_record([n.to_string(), v.to_str_radix(10)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table_csv<R: Read>(input: R) -> Result<Vec<ExactInt>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "n" || &headers[1] != "value" {
        return Err(Error::Parse("table header must be `n,value`".into()));
    }
    let mut values = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let n: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad index {:?}", row + 1, &rec[0])))?;
        let v = BigUint::parse_bytes(rec[1].trim().as_bytes(), 10)
            .ok_or_else(|| Error::Parse(format!("row {}: bad value {:?}", row + 1, &rec[1])))?;
        if values.is_empty() && n == 1 {
            values.push(BigUint::one());
        }
        if n != values.len() {
            return Err(Error::Parse(format!(
                "row {}: expected index {}, found {n}",
                row + 1,
                values.len()
            )));
        }
        values.push(v);
    }
    if values.len() < 2 {
        return Err(Error::Parse("table has no rows".into()));
    }
    Ok(values)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionViolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub indices: Vec<u64>,
    #[serde(with = "crate::exactnum::dec")]
    pub lhs: ExactInt,
    #[serde(with = "crate::exactnum::dec")]
    pub rhs: ExactInt,
}

/// Outcome of a finite check over a stated index range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: String,
    pub range: [u64; 2],
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub notes: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn pass(property: impl Into<String>, lo: u64, hi: u64) -> Self {
        CheckReport {
            property: property.into(),
            range: [lo, hi],
            verdict: Verdict::Pass,
            counterexample: None,
            notes: BTreeMap::new(),
        }
    }

    pub fn fail(property: impl Into<String>, lo: u64, hi: u64, cx: Counterexample) -> Self {
        CheckReport {
            verdict: Verdict::Fail,
            counterexample: Some(cx),
            ..Self::pass(property, lo, hi)
        }
    }

    pub fn from_outcome(
        property: impl Into<String>,
        lo: u64,
        hi: u64,
        cx: Option<Counterexample>,
    ) -> Self {
        match cx {
            Some(cx) => Self::fail(property, lo, hi, cx),
            None => Self::pass(property, lo, hi),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn note(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.notes.insert(key.to_string(), value.into());
        self
    }
}

fn cx(indices: &[u64], lhs: ExactInt, rhs: ExactInt) -> Counterexample {
    Counterexample {
        indices: indices.to_vec(),
        lhs,
        rhs,
    }
}

fn logs(values: &[ExactInt]) -> Vec<f64> {
    values.par_iter().map(log2_approx).collect()
}

// --- checks over a table prefix `[f(0), .., f(N)]` ---

pub fn increasing_on(values: &[ExactInt]) -> CheckReport {
    let n_max = values.len() as u64 - 1;
    let found = (1..values.len().saturating_sub(1))
        .into_par_iter()
        .find_first(|&n| values[n] >= values[n + 1])
        .map(|n| {
            cx(
                &[n as u64, n as u64 + 1],
                values[n].clone(),
                values[n + 1].clone(),
            )
        });
    CheckReport::from_outcome("increasing", 1, n_max, found)
}

/// `f(p+q) <= f(p) f(q)` for all `p, q >= 1`, `p + q <= N`. The
/// counterexample reports `(p, q)` with `lhs = f(p+q)`, `rhs = f(p)f(q)`.
pub fn submultiplicative_on(values: &[ExactInt]) -> CheckReport {
    let n_max = values.len() - 1;
    let l = logs(values);
    // Smallest failing sum first, then smallest p.
    let found = (2..=n_max).into_par_iter().find_map_first(|s| {
        let ls = l[s];
        (1..=s / 2).find_map(|p| {
            let q = s - p;
            let margin = l[p] + l[q] - ls;
            if margin > float_slack(ls) {
                return None;
            }
            let rhs = &values[p] * &values[q];
            (values[s] > rhs).then(|| cx(&[p as u64, q as u64], values[s].clone(), rhs))
        })
    });
    CheckReport::from_outcome("submultiplicative", 1, n_max as u64, found)
}

/// `f'(n) >= n + 1` for `2 <= n <= N`.
pub fn derivative_lb_on(values: &[ExactInt]) -> CheckReport {
    let n_max = values.len() - 1;
    let found = (2..=n_max).into_par_iter().find_map_first(|n| {
        let d = derivative_at(values, n);
        let bound = BigUint::from(n as u64 + 1);
        (d < bound).then(|| cx(&[n as u64], d, bound))
    });
    CheckReport::from_outcome("derivative_lb", 2, n_max as u64, found)
}

/// `f'(m) <= f'(n)^d` whenever `n <= m <= dn <= ..`, `m <= N`. For each `m`
/// only the smallest `f'(n)` over `ceil(m/d) <= n <= m` matters; it comes
/// from a monotone deque. Counterexample `(n, m)`, `lhs = f'(m)`,
/// `rhs = f'(n)^d`.
pub fn bz_condition_on(values: &[ExactInt], d: u32) -> Result<CheckReport> {
    if d < 2 {
        return Err(Error::invalid("bz condition needs d >= 2"));
    }
    let n_max = values.len() - 1;
    let der = derivatives(values);
    let l = logs(&der);
    let property = format!("bz_condition(d={d})");
    let mut window = std::collections::VecDeque::<usize>::new();
    for m in 1..=n_max {
        while let Some(&back) = window.back() {
            if der[back] >= der[m] {
                window.pop_back();
            } else {
                break;
            }
        }
        window.push_back(m);
        let lo = m.div_ceil(d as usize);
        while let Some(&front) = window.front() {
            if front < lo {
                window.pop_front();
            } else {
                break;
            }
        }
        let n = *window.front().unwrap();
        let margin = d as f64 * l[n] - l[m];
        if margin > float_slack(l[m]) || (l[n].is_infinite() && der[m].is_zero()) {
            continue;
        }
        let rhs = der[n].pow(d);
        if der[m] > rhs {
            return Ok(CheckReport::fail(
                property,
                1,
                n_max as u64,
                cx(&[n as u64, m as u64], der[m].clone(), rhs),
            ));
        }
    }
    Ok(CheckReport::pass(property, 1, n_max as u64))
}

/// Precondition `f'' >= 0` on `[2, N]`, then `f(n) <= n f'(n) <= f(2n)` for
/// `2n <= N`.
pub fn convexity_bounds_on(values: &[ExactInt]) -> CheckReport {
    let n_max = values.len() - 1;
    let der = derivatives(values);
    let property = "convexity_bounds";
    if let Some(n) = (2..=n_max).find(|&n| der[n] < der[n - 1]) {
        let mut r = CheckReport::fail(
            property,
            1,
            n_max as u64,
            cx(&[n as u64 - 1, n as u64], der[n - 1].clone(), der[n].clone()),
        );
        r.verdict = Verdict::PreconditionViolated;
        return r.note("precondition", "second derivative nonnegative");
    }
    let found = (1..=n_max / 2).into_par_iter().find_map_first(|n| {
        let nd = &der[n] * n as u64;
        if values[n] > nd {
            Some(cx(&[n as u64], values[n].clone(), nd))
        } else if nd > values[2 * n] {
            Some(cx(&[n as u64, 2 * n as u64], nd, values[2 * n].clone()))
        } else {
            None
        }
    });
    CheckReport::from_outcome(property, 1, n_max as u64, found)
}

// --- checks on growth functions ---

pub fn check_increasing(f: &mut GrowthFn, n: usize) -> Result<CheckReport> {
    Ok(increasing_on(f.prefix(n)?))
}

pub fn check_submultiplicative(f: &mut GrowthFn, n: usize) -> Result<CheckReport> {
    Ok(submultiplicative_on(f.prefix(n)?))
}

pub fn check_derivative_lb(f: &mut GrowthFn, n: usize) -> Result<CheckReport> {
    Ok(derivative_lb_on(f.prefix(n)?))
}

pub fn check_bz_condition(f: &mut GrowthFn, n: usize, d: u32) -> Result<CheckReport> {
    bz_condition_on(f.prefix(n)?, d)
}

pub fn check_convexity_bounds(f: &mut GrowthFn, n: usize) -> Result<CheckReport> {
    Ok(convexity_bounds_on(f.prefix(n)?))
}

/// `f(n) <= g(Cn)` and `g(n) <= f(Cn)` for `1 <= n <= N`. Counterexample
/// indices are `(n, Cn)`; a failure of the second inequality lists the
/// indices negated into the note `side = "g<=f"`.
pub fn check_equiv_witness(
    f: &mut GrowthFn,
    g: &mut GrowthFn,
    c: u64,
    n: usize,
) -> Result<CheckReport> {
    if c == 0 {
        return Err(Error::invalid("equivalence constant must be at least 1"));
    }
    let cn = n
        .checked_mul(c as usize)
        .ok_or_else(|| Error::invalid("C*N overflows"))?;
    let fv = f.prefix(cn)?;
    let gv = g.prefix(cn)?;
    let property = format!("equiv_witness(C={c})");
    for k in 1..=n {
        let ck = k * c as usize;
        if fv[k] > gv[ck] {
            return Ok(CheckReport::fail(
                property,
                1,
                n as u64,
                cx(&[k as u64, ck as u64], fv[k].clone(), gv[ck].clone()),
            )
            .note("side", "f<=g"));
        }
        if gv[k] > fv[ck] {
            return Ok(CheckReport::fail(
                property,
                1,
                n as u64,
                cx(&[k as u64, ck as u64], gv[k].clone(), fv[ck].clone()),
            )
            .note("side", "g<=f"));
        }
    }
    Ok(CheckReport::pass(property, 1, n as u64))
}

/// Parameters and both sides of
/// `f(2CDn) - f(2CDn - C) <= 2 D^2 n (f(CDn) - f(Cn - C))^(2D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityWitness {
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub n: u64,
    #[serde(with = "crate::exactnum::dec")]
    pub lhs: ExactInt,
    #[serde(with = "crate::exactnum::dec")]
    pub rhs: ExactInt,
}

impl RealizabilityWitness {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Indices `[2CDn, 2CDn - C, CDn, Cn - C]`.
pub fn realizability_indices(c: u64, d: u64, n: u64) -> Result<[u64; 4]> {
    if c == 0 || d == 0 || n == 0 {
        return Err(Error::invalid("C, D, n must be positive"));
    }
    if d < c * c {
        return Err(Error::invalid(format!("need D >= C^2, got C={c}, D={d}")));
    }
    let cdn = c
        .checked_mul(d)
        .and_then(|x| x.checked_mul(n))
        .ok_or_else(|| Error::invalid("index overflow"))?;
    let top = cdn
        .checked_mul(2)
        .ok_or_else(|| Error::invalid("index overflow"))?;
    Ok([top, top - c, cdn, c * n - c])
}

/// Evaluate both sides given the four values at [`realizability_indices`].
pub fn realizability_sides(c: u64, d: u64, n: u64, vals: [&ExactInt; 4]) -> RealizabilityWitness {
    let sub = |a: &ExactInt, b: &ExactInt| if a >= b { a - b } else { BigUint::zero() };
    let lhs = sub(vals[0], vals[1]);
    let base = sub(vals[2], vals[3]);
    let rhs = base.pow(u32::try_from(2 * d).expect("D too large")) * (2 * d * d * n);
    RealizabilityWitness { c, d, n, lhs, rhs }
}

/// Whether the realizability inequality holds at `(C, D, n)`, with both
/// sides. Requires `D >= C^2` and `2CDn` within the cap.
pub fn check_realizability_constraint(
    f: &mut GrowthFn,
    c: u64,
    d: u64,
    n: u64,
) -> Result<RealizabilityWitness> {
    let idx = realizability_indices(c, d, n)?;
    let v = f.prefix(usize::try_from(idx[0]).map_err(|_| Error::CapOverflow {
        index: idx[0],
        cap: f.cap() as u64,
    })?)?;
    Ok(realizability_sides(
        c,
        d,
        n,
        [
            &v[idx[0] as usize],
            &v[idx[1] as usize],
            &v[idx[2] as usize],
            &v[idx[3] as usize],
        ],
    ))
}

/// A strict violation of
/// `f'((C^2+1)m) <= (f(2C^2 N) - f(N)) (f(2C^2 N + (C^4+C^2)m) - f(N+m))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition2Witness {
    #[serde(rename = "C")]
    pub c: u64,
    pub i: u64,
    pub m: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(with = "crate::exactnum::dec")]
    pub lhs: ExactInt,
    #[serde(with = "crate::exactnum::dec")]
    pub rhs: ExactInt,
}

/// Indices `[(C^2+1)m - 1, (C^2+1)m, 2C^2 N, N, 2C^2 N + (C^4+C^2)m, N+m]`.
pub fn condition2_indices(c: u64, m: u64, big_n: u64) -> Result<[u64; 6]> {
    if c == 0 || m == 0 || big_n == 0 {
        return Err(Error::invalid("C, m, N must be positive"));
    }
    let of = || Error::invalid("index overflow");
    let c2 = c.checked_mul(c).ok_or_else(of)?;
    let a = (c2 + 1).checked_mul(m).ok_or_else(of)?;
    let b = (2 * c2).checked_mul(big_n).ok_or_else(of)?;
    let e = b
        .checked_add(c2.checked_mul(c2 + 1).and_then(|x| x.checked_mul(m)).ok_or_else(of)?)
        .ok_or_else(of)?;
    Ok([a - 1, a, b, big_n, e, big_n + m])
}

/// `(lhs, rhs)` from the values at [`condition2_indices`]; `f(0)` is the
/// stored origin, but the left side at index 1 follows `f'(1) = f(1)`.
pub fn condition2_sides(idx: &[u64; 6], vals: [&ExactInt; 6]) -> (ExactInt, ExactInt) {
    let sub = |a: &ExactInt, b: &ExactInt| if a >= b { a - b } else { BigUint::zero() };
    let lhs = if idx[1] == 1 {
        vals[1].clone()
    } else {
        sub(vals[1], vals[0])
    };
    let rhs = sub(vals[2], vals[3]) * sub(vals[4], vals[5]);
    (lhs, rhs)
}

/// First candidate `(m, N)` violating Condition (II) for this `C`, or none.
/// Never claims the condition holds; `None` only means no violation among
/// the candidates.
pub fn probe_condition2(
    f: &mut GrowthFn,
    c: u64,
    candidates: &[(u64, u64)],
) -> Result<Option<Condition2Witness>> {
    for &(m, big_n) in candidates {
        let idx = condition2_indices(c, m, big_n)?;
        let top = *idx.iter().max().unwrap();
        let top = usize::try_from(top).map_err(|_| Error::CapOverflow {
            index: top,
            cap: f.cap() as u64,
        })?;
        let v = f.prefix(top)?;
        let vals = idx.map(|i| &v[i as usize]);
        let (lhs, rhs) = condition2_sides(&idx, vals);
        if lhs > rhs {
            return Ok(Some(Condition2Witness {
                c,
                i: 0,
                m,
                big_n,
                lhs,
                rhs,
            }));
        }
    }
    Ok(None)
}

/// Bit length of a value, used in reports where the value is too large.
pub fn bits(v: &ExactInt) -> u64 {
    v.bits()
}

/// Parse a small function name used by the CLI and tests: `pow2`
/// (`2^n`), `pow2m1` (`2^(n+1) - 1`), `linear` (`n + 1`), `square`
/// (`(n+1)^2`), `npow:k` (`n^k`), `tri` (`n(n+3)/2`).
pub fn builtin(name: &str, cap: usize) -> Result<GrowthFn> {
    let two = |e: u64| BigUint::one() << e;
    let f = match name {
        "pow2" => GrowthFn::closed(name, cap, move |n| two(n)),
        "pow2m1" => GrowthFn::closed(name, cap, move |n| two(n + 1) - 1u32),
        "linear" => GrowthFn::closed(name, cap, |n| BigUint::from(n + 1)),
        "square" => GrowthFn::closed(name, cap, |n| BigUint::from(n + 1).pow(2)),
        "tri" => GrowthFn::closed(name, cap, |n| BigUint::from(n * (n + 3) / 2)),
        _ => {
            let k = name
                .strip_prefix("npow:")
                .and_then(|k| k.parse::<u32>().ok())
                .ok_or_else(|| Error::invalid(format!("unknown builtin function {name:?}")))?;
            GrowthFn::closed(name, cap, move |n| BigUint::from(n).pow(k))
        }
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> ExactInt {
        BigUint::from(n)
    }

    #[test]
    fn derivative_examples() {
        let mut f = builtin("pow2", 100).unwrap();
        assert_eq!(f.derivative(5).unwrap(), big(16));
        assert_eq!(f.derivative(1).unwrap(), big(2));
        let mut g = GrowthFn::closed("id", 100, big);
        assert_eq!(g.derivative(7).unwrap(), big(1));
        let mut t = builtin("tri", 100).unwrap();
        assert_eq!(t.derivative(4).unwrap(), big(5));
    }

    #[test]
    fn integral_examples() {
        let mut one = GrowthFn::closed("one", 100, |_| big(1)).integral();
        assert_eq!(one.eval(9).unwrap(), big(9));
        let mut p = builtin("pow2", 100).unwrap().integral();
        assert_eq!(p.eval(3).unwrap(), big(14));
        let mut sq = builtin("npow:2", 100).unwrap().integral();
        assert_eq!(sq.eval(4).unwrap(), big(30));
    }

    #[test]
    fn increasing_examples() {
        assert!(check_increasing(&mut builtin("pow2", 200).unwrap(), 100).unwrap().passed());
        let mut half = GrowthFn::closed("half", 20, |n| big(n.div_ceil(2)));
        let r = check_increasing(&mut half, 10).unwrap();
        assert_eq!(r.counterexample.unwrap().indices, vec![1, 2]);
        assert!(check_increasing(&mut builtin("linear", 20).unwrap(), 10).unwrap().passed());
    }

    #[test]
    fn submultiplicative_examples() {
        assert!(check_submultiplicative(&mut builtin("pow2", 200).unwrap(), 200).unwrap().passed());
        assert!(check_submultiplicative(&mut builtin("linear", 200).unwrap(), 200).unwrap().passed());
        let mut f = GrowthFn::from_table("t", vec![big(1), big(1), big(3)]).unwrap();
        let r = check_submultiplicative(&mut f, 2).unwrap();
        let c = r.counterexample.unwrap();
        assert_eq!(c.indices, vec![1, 1]);
        assert_eq!((c.lhs, c.rhs), (big(3), big(1)));
    }

    #[test]
    fn derivative_lb_examples() {
        let r = check_derivative_lb(&mut builtin("pow2", 100).unwrap(), 50).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.counterexample.unwrap().indices, vec![2]);
        assert!(check_derivative_lb(&mut builtin("tri", 100).unwrap(), 50).unwrap().passed());
        let mut id = GrowthFn::closed("id", 100, big);
        assert_eq!(
            check_derivative_lb(&mut id, 10).unwrap().counterexample.unwrap().indices,
            vec![2]
        );
    }

    #[test]
    fn bz_condition_examples() {
        assert!(check_bz_condition(&mut builtin("pow2m1", 100).unwrap(), 64, 2)
            .unwrap()
            .passed());
        let r = check_bz_condition(&mut builtin("pow2", 100).unwrap(), 64, 2).unwrap();
        let c = r.counterexample.unwrap();
        assert_eq!(c.indices[1], 2 * c.indices[0]);
        assert!(check_bz_condition(&mut builtin("tri", 100).unwrap(), 64, 2)
            .unwrap()
            .passed());
        assert!(check_bz_condition(&mut builtin("tri", 100).unwrap(), 64, 1).is_err());
    }

    #[test]
    fn convexity_examples() {
        assert!(check_convexity_bounds(&mut builtin("pow2", 100).unwrap(), 64).unwrap().passed());
        assert!(check_convexity_bounds(&mut builtin("npow:2", 100).unwrap(), 64)
            .unwrap()
            .passed());
        let mut f = GrowthFn::from_table("t", [1u64, 1, 4, 5, 9].map(big).to_vec()).unwrap();
        let r = check_convexity_bounds(&mut f, 4).unwrap();
        assert_eq!(r.verdict, Verdict::PreconditionViolated);
    }

    #[test]
    fn equiv_examples() {
        let mut f = builtin("square", 200).unwrap();
        let mut g = builtin("square", 200).unwrap();
        assert!(check_equiv_witness(&mut f, &mut g, 1, 100).unwrap().passed());
        let mut f = builtin("pow2", 200).unwrap();
        let mut g = GrowthFn::closed("4^n", 200, |n| big(4).pow(n as u32));
        assert!(check_equiv_witness(&mut f, &mut g, 2, 50).unwrap().passed());
        for c in 1..=10 {
            let mut f = builtin("pow2", 1000).unwrap();
            let mut g = builtin("npow:2", 1000).unwrap();
            assert!(!check_equiv_witness(&mut f, &mut g, c, 100).unwrap().passed());
        }
    }

    #[test]
    fn realizability_examples() {
        let mut f = builtin("pow2m1", 1000).unwrap();
        assert!(check_realizability_constraint(&mut f, 1, 2, 5).unwrap().holds());
        let mut g = builtin("linear", 1000).unwrap();
        assert!(check_realizability_constraint(&mut g, 1, 1, 3).unwrap().holds());
        assert!(check_realizability_constraint(&mut g, 2, 3, 3).is_err());
        let mut small = builtin("linear", 10).unwrap();
        assert!(matches!(
            check_realizability_constraint(&mut small, 1, 2, 5),
            Err(Error::CapOverflow { .. })
        ));
    }

    #[test]
    fn condition2_examples() {
        let mut f = builtin("pow2m1", 1000).unwrap();
        let cands: Vec<_> = (1..=20).flat_map(|m| (1..=20).map(move |n| (m, n))).collect();
        assert!(probe_condition2(&mut f, 1, &cands).unwrap().is_none());
        assert!(probe_condition2(&mut f, 1, &[]).unwrap().is_none());
    }

    #[test]
    fn integral_without_origin_can_break_submultiplicativity() {
        let v = [1u64, 3, 7].map(big).to_vec();
        assert!(submultiplicative_on(&v).passed());
        let mut f = GrowthFn::from_table("f", v).unwrap().integral();
        // F(2) = 10 > 9 = F(1)^2
        let r = check_submultiplicative(&mut f, 2).unwrap();
        assert_eq!(r.counterexample.unwrap().indices, vec![1, 1]);
    }

    #[test]
    fn csv_roundtrip() {
        let mut f = builtin("square", 100).unwrap();
        let mut buf = Vec::new();
        f.write_csv(10, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,value\n1,4\n"));
        let mut g = GrowthFn::read_csv("g", buf.as_slice()).unwrap();
        assert_eq!(g.cap(), 10);
        assert_eq!(g.eval(10).unwrap(), big(121));
        assert!(GrowthFn::read_csv("bad", "n,value\n1,4\n3,9\n".as_bytes()).is_err());
    }

    #[test]
    fn report_json_is_decimal() {
        let r = CheckReport::fail("x", 1, 2, cx(&[1], big(10).pow(30), big(1)));
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"1000000000000000000000000000000\""));
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    fn brute_submul(v: &[ExactInt]) -> Option<(usize, usize)> {
        let n = v.len() - 1;
        for s in 2..=n {
            for p in 1..=s / 2 {
                if v[s] > &v[p] * &v[s - p] {
                    return Some((p, s - p));
                }
            }
        }
        None
    }

    proptest! {
        #[test]
        fn submul_matches_brute(raw in proptest::collection::vec(1u64..200, 2..40)) {
            let mut v = vec![big(1)];
            v.extend(raw.into_iter().map(big));
            let r = submultiplicative_on(&v);
            let b = brute_submul(&v);
            prop_assert_eq!(r.passed(), b.is_none());
            if let (Some(c), Some((p, q))) = (r.counterexample, b) {
                prop_assert_eq!(c.indices, vec![p as u64, q as u64]);
            }
        }

        #[test]
        fn integral_preserves_submul(
            first in 2u64..6,
            steps in proptest::collection::vec(1u64..40, 1..30),
        ) {
            let mut v = vec![big(1), big(first)];
            for s in steps {
                // clamp each step to the submultiplicative bound
                let k = v.len();
                let bound = (1..k).map(|p| &v[p] * &v[k - p]).min().unwrap();
                let next = (v.last().unwrap() + s).min(bound);
                if next <= *v.last().unwrap() {
                    break;
                }
                v.push(next);
            }
            prop_assert!(submultiplicative_on(&v).passed() && increasing_on(&v).passed());
            let f = GrowthFn::from_table("f", v.clone()).unwrap();
            let n = f.cap();
            let mut fi = f.integral();
            let table = fi.prefix(n).unwrap().to_vec();
            for k in 1..=n {
                prop_assert!(v[k] <= table[k] && table[k] <= &v[k] * k as u64);
            }
            // the sum taken from the origin term f(0) = 1
            let with_origin: Vec<ExactInt> = table.iter().map(|x| x + 1u32).collect();
            prop_assert!(submultiplicative_on(&with_origin).passed());
        }

        #[test]
        fn convex_functions_pass(d in proptest::collection::vec(0u64..50, 1..40)) {
            // nondecreasing derivative
            let mut der: Vec<u64> = d;
            der.sort();
            let mut v = vec![big(0)];
            let mut acc = 0u64;
            for x in der { acc += x + 1; v.push(big(acc)); }
            let r = convexity_bounds_on(&v);
            prop_assert!(r.passed(), "{:?}", r);
        }

        #[test]
        fn bz_matches_brute(raw in proptest::collection::vec(1u64..30, 1..30)) {
            let mut v = vec![big(1)];
            let mut acc = 0u64;
            for x in raw { acc += x; v.push(big(acc)); }
            let der = derivatives(&v);
            let n_max = v.len() - 1;
            let brute = (1..=n_max).any(|n| (n..=(2*n).min(n_max)).any(|m| der[m] > der[n].pow(2)));
            prop_assert_eq!(bz_condition_on(&v, 2).unwrap().passed(), !brute);
        }
    }
}
