//! One test per acceptance criterion; each prints a single PASS/FAIL line.
//! Expected values come from oracles written here, independent of the
//! library's evaluators.

mod common;

use std::collections::{BTreeSet, HashSet};

use growth_forge::bzfn::{self, BzSchedule};
use growth_forge::exactnum::{cmp_pow2, iroot, RatExp};
use growth_forge::holefn::{
    check_dominates, find_nonrealizability_witness, HoleFn, HoleSchedule, Omega,
};
use growth_forge::langgrowth::{
    check_irreducible, check_prolongable, cumulative, EmptyWord, Irreducible, LangAutomaton,
    LangSpec, Prolongable, SUBSET_BUDGET,
};
use growth_forge::sbprime::{self, ChoiceRule, SBTarget, BYTE_BUDGET};
use growth_forge::seqfn::{self, builtin, check_realizability_constraint, GrowthFn};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CAP: u64 = 1 << 20;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {id} [{name}]: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} [{name}] failed: {detail}");
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn sub(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        BigUint::zero()
    }
}

/// Derivative-squaring function by its defining recurrence, with an ordered
/// set for the window minimum. Returns `(f, f')` on `0..=upto`, `f(0) = 1`,
/// `f'(1) = f(1)`.
fn bz_oracle(n: &[u32], upto: usize) -> (Vec<BigUint>, Vec<BigUint>) {
    let mut f = vec![BigUint::one()];
    let mut fp = vec![BigUint::zero()];
    let mut window: BTreeSet<(BigUint, usize)> = BTreeSet::new();
    let mut lo = 1usize;
    for k in 1..=upto {
        let d = if k <= 1 << n[0] {
            let v = BigUint::one() << k;
            if k == 1 {
                v
            } else {
                BigUint::one() << (k - 1)
            }
        } else {
            let i = (0..n.len()).rev().find(|&i| k > 1 << n[i]).unwrap();
            if k <= 1 << (n[i] as usize + i + 1) {
                big(k as u64 + 1)
            } else {
                let new_lo = k.div_ceil(2);
                while lo < new_lo {
                    window.remove(&(fp[lo].clone(), lo));
                    lo += 1;
                }
                let (m, _) = window.first().unwrap();
                m * m
            }
        };
        let v = if k == 1 { d.clone() } else { &f[k - 1] + &d };
        window.insert((d.clone(), k));
        fp.push(d);
        f.push(v);
    }
    (f, fp)
}

/// Hole function of the shipped schedule on `0..=upto <= n_2`: powers of two,
/// then `f(x-1) + x + 1`, then `floor(f(x-1) 2^(1/(2 d_1)))` by integer roots.
fn hole_oracle(d1: u64, n1: u64, n2: u64, upto: u64) -> Vec<BigUint> {
    assert!(upto <= n2);
    let q = 2 * d1 as u32;
    let mut f = vec![BigUint::one()];
    for x in 1..=upto {
        let prev = &f[x as usize - 1];
        let v = if x <= n1 {
            BigUint::one() << x
        } else if x <= d1 * n1 {
            prev + big(x + 1)
        } else {
            (prev.pow(q) << 1u32).nth_root(q)
        };
        f.push(v);
    }
    f
}

fn fixture() -> HoleSchedule {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/hole_default.json"
    ))
    .unwrap();
    HoleSchedule::from_json(&text).unwrap()
}

#[test]
fn criterion_1_bz_realizability_conditions() {
    let s = BzSchedule::new(vec![3, 13]).unwrap();
    let (f, fp) = bz_oracle(&s.n, 16384);
    let lib = bzfn::bz_table(&s, 16384, CAP).unwrap();
    let agrees = lib == f;
    let lb = (2..=8192usize).find(|&k| fp[k] < big(k as u64 + 1));
    let bz = (1..=8192usize).into_par_iter().find_map_first(|n| {
        let sq = &fp[n] * &fp[n];
        (n..=2 * n).find(|&m| fp[m] > sq).map(|m| (n, m))
    });
    report(
        1,
        "bz derivative bounds",
        agrees && lb.is_none() && bz.is_none(),
        format!(
            "table agrees: {agrees}; first k with f'(k) < k+1: {lb:?}; first (n, m) with f'(m) > f'(n)^2: {bz:?}"
        ),
    );
}

#[test]
fn criterion_2_aux_certificate() {
    let s = BzSchedule::new(vec![3, 13]).unwrap();
    let (_, fp) = bz_oracle(&s.n, 8192);
    let min = fp[4097..=8192].iter().min().unwrap();
    let threshold = BigUint::one() << 91u32;
    let r = bzfn::check_aux(&s, 1, CAP).unwrap();
    let lib_bits = r.notes.get("min_bits").and_then(|v| v.as_u64());
    let ok = r.passed() && *min >= threshold && min.bits() > 1536 && lib_bits == Some(min.bits());
    report(
        2,
        "aux certificate",
        ok,
        format!(
            "oracle min bits {}, library min bits {lib_bits:?}, report {:?}",
            min.bits(),
            r.verdict
        ),
    );
}

fn condition2_oracle(f: &[BigUint], c: u64, m: u64, n: u64) -> (BigUint, BigUint) {
    let c2 = c * c;
    let a = ((c2 + 1) * m) as usize;
    let lhs = &f[a] - &f[a - 1];
    let b = (2 * c2 * n) as usize;
    let e = b + (c2 * c2 + c2) as usize * m as usize;
    let rhs = sub(&f[b], &f[n as usize]) * sub(&f[e], &f[(n + m) as usize]);
    (lhs, rhs)
}

#[test]
fn criterion_3_condition_two_refutation() {
    let s = BzSchedule::new(vec![3, 13]).unwrap();
    let (f, _) = bz_oracle(&s.n, 98296);
    let mut ok = true;
    let mut detail = Vec::new();
    for (c, m, n) in [(1u64, 4096u64, 8192u64), (2, 1638, 8192)] {
        let (lhs, rhs) = condition2_oracle(&f, c, m, n);
        let out = bzfn::refute_condition2(&s, c, 1, CAP).unwrap();
        let w = out.witness.as_ref();
        let same = w.is_some_and(|w| w.m == m && w.big_n == n && w.lhs == lhs && w.rhs == rhs);
        ok &= lhs > rhs && same;
        detail.push(format!(
            "C={c} (m,N)=({m},{n}) lhs bits {} rhs bits {} library agrees {same}",
            lhs.bits(),
            rhs.bits()
        ));
    }
    report(3, "condition two refutation", ok, detail.join("; "));
}

#[test]
fn criterion_4_hole_function() {
    let s = fixture();
    let top = s.n[1].min(3000);
    let f = hole_oracle(s.d[0], s.n[0], s.n[1], top);
    let mut h = HoleFn::new(&s, CAP).unwrap();
    let agrees = h.table(top).unwrap() == f;
    let submul = (2..=top as usize).into_par_iter().find_map_first(|t| {
        (1..=t / 2)
            .find(|&p| f[t] > &f[p] * &f[t - p])
            .map(|p| (p, t - p))
    });
    let der = |x: usize| {
        if x == 1 {
            f[1].clone()
        } else {
            &f[x] - &f[x - 1]
        }
    };
    let lb = (2..=top as usize).find(|&x| der(x) < big(x as u64 + 1));
    // prescribed point: n = m_1 + 1, D = floor(d_1 m_1 / (m_1 + 1))
    let m1 = s.n[0];
    let (n, d) = (m1 + 1, s.d[0] * m1 / (m1 + 1));
    let idx = [2 * d * n, 2 * d * n - 1, d * n, n - 1].map(|i| &f[i as usize]);
    let lhs = sub(idx[0], idx[1]);
    let rhs = sub(idx[2], idx[3]).pow(2 * d as u32) * big(2 * d * d * n);
    let p = find_nonrealizability_witness(&s, 1, CAP).unwrap();
    let w = p.sides();
    let witness =
        p.is_witness() && lhs > rhs && w.n == n && w.d == d && w.lhs == lhs && w.rhs == rhs;
    report(
        4,
        "hole function",
        agrees && submul.is_none() && lb.is_none() && witness,
        format!(
            "table agrees: {agrees}; submultiplicativity counterexample: {submul:?}; first x with f'(x) < x+1: {lb:?}; witness at (n={n}, D={d}) strict: {witness} (lhs bits {}, rhs bits {})",
            lhs.bits(),
            rhs.bits()
        ),
    );
}

#[test]
fn criterion_5_superpoly_domination() {
    let s = fixture();
    let (d1, n1) = (s.d[0], s.n[0]);
    let f = hole_oracle(d1, n1, s.n[1], d1 * n1);
    let q = 4 * d1 as u32;
    let oracle = (n1..=d1 * n1).find(|&x| f[x as usize].pow(q) < BigUint::one() << x);
    let mut h = HoleFn::new(&s, CAP).unwrap();
    let om = Omega::Constant(RatExp::new(1, q).unwrap());
    let r = check_dominates(&mut h, &om, d1 * n1).unwrap();
    report(
        5,
        "superpoly domination",
        r.passed() && oracle.is_none() && r.range == [n1, d1 * n1],
        format!(
            "omega = 1/{q} on [{n1}, {}]: library {:?}, oracle violation {oracle:?}",
            d1 * n1,
            r.verdict
        ),
    );
}

#[test]
fn criterion_6_sb_construction() {
    let stages = 5usize;
    let f = |n: u64| (n as u128 + 1).pow(2);
    // c sequence by its definition, in machine integers
    let mut c = vec![(f(2)).div_ceil(f(1))];
    let mut prod = f(1) * c[0];
    let mut lemma = f(2) <= prod && prod <= 4 * f(2);
    for n in 1..=stages as u32 {
        let (a, b) = (f(1 << (n + 1)), f(1 << n));
        let cn = if prod < 2 * b { a.div_ceil(b) } else { a / b };
        prod *= cn;
        lemma &= a <= prod && prod <= 4 * a;
        c.push(cn);
    }
    let mut target = SBTarget::new(builtin("square", CAP as usize).unwrap());
    let (lib_c, lemma_report) = sbprime::c_sequence(&mut target, stages).unwrap();
    let c_agrees = lib_c.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        == c.iter().map(|x| x.to_string()).collect::<Vec<_>>();

    let state = sbprime::run(&mut target, stages, ChoiceRule::LexLeast, BYTE_BUDGET).unwrap();
    let l = 1usize << stages;
    let table = sbprime::factors(&state, l).unwrap();
    // windows of W(2^m) C(2^m) and C(2^m) W(2^m) recounted with owned words
    let w: Vec<Vec<u8>> = state.w_words(stages).unwrap().map(<[u8]>::to_vec).collect();
    let cw: Vec<Vec<u8>> = state.c_words(stages).unwrap().map(<[u8]>::to_vec).collect();
    let mut sets: Vec<HashSet<Vec<u8>>> = vec![HashSet::new(); l + 1];
    for x in &w {
        for y in &cw {
            for z in [[x.as_slice(), y].concat(), [y.as_slice(), x].concat()] {
                for (len, set) in sets.iter_mut().enumerate().skip(1) {
                    for win in z.windows(len) {
                        set.insert(win.to_vec());
                    }
                }
            }
        }
    }
    let gp: Vec<u128> = (0..=l)
        .map(|n| if n == 0 { 1 } else { sets[n].len() as u128 })
        .collect();
    let counts_agree = (0..=l).all(|n| table.count(n) as u128 == gp[n]);
    let lower = (1..=16).find(|&n| f(n as u64) > gp[2 * n]);
    let upper = (1..=32).find(|&n| gp[n] > 64 * n as u128 * f(4 * n as u64));
    let rec = sbprime::check_recurrence(&state, stages);
    let irr = sbprime::check_finite_irreducible(&table, 4, l).unwrap();
    // oracle for the irreducibility part on the recounted sets
    let shorts: Vec<&Vec<u8>> = (1..=4).flat_map(|n| sets[n].iter()).collect();
    let mut joined: HashSet<(&[u8], &[u8])> = HashSet::new();
    for set in &sets[2..] {
        for z in set {
            for a in 1..=4.min(z.len() - 1) {
                for b in 1..=4.min(z.len() - a) {
                    joined.insert((&z[..a], &z[z.len() - b..]));
                }
            }
        }
    }
    let unjoined = shorts
        .iter()
        .flat_map(|u| shorts.iter().map(move |v| (u, v)))
        .filter(|(u, v)| !joined.contains(&(u.as_slice(), v.as_slice())))
        .count();
    let ok = lemma
        && lemma_report.passed()
        && c_agrees
        && counts_agree
        && lower.is_none()
        && upper.is_none()
        && rec.passed()
        && irr.passed()
        && unjoined == 0;
    report(
        6,
        "sb construction",
        ok,
        format!(
            "lemma_c {lemma}/{:?}; c agrees {c_agrees}; counts agree {counts_agree}; f(n) > gamma'(2n) at {lower:?}; gamma'(n) > 64n f(4n) at {upper:?}; recurrence {:?}; finite irreducibility {:?} with {unjoined} of {} pairs unjoined within length {l} (first u={}, v={})",
            lemma_report.verdict,
            rec.verdict,
            irr.verdict,
            shorts.len() * shorts.len(),
            irr.notes.get("u").map(|v| v.to_string()).unwrap_or_default(),
            irr.notes.get("v").map(|v| v.to_string()).unwrap_or_default(),
        ),
    );
}

#[test]
fn criterion_7_language_oracle_suite() {
    let specs = common::small_specs();
    let mut bad = Vec::new();
    for spec in &specs {
        let a = LangAutomaton::build(spec).unwrap();
        let counts: Vec<BigUint> = common::count(spec, 10).into_iter().map(big).collect();
        if a.count_words(10) != counts {
            bad.push(format!("count {:?}", spec.forbidden));
        }
        let p = check_prolongable(spec, &a).unwrap() == Prolongable::Yes;
        if p != common::prolongable(spec, 6) {
            bad.push(format!("prolongable {:?}", spec.forbidden));
        }
        let i = matches!(
            check_irreducible(&a, SUBSET_BUDGET).unwrap(),
            Irreducible::Yes { .. }
        );
        if i != common::irreducible(spec, 4, 6) {
            bad.push(format!("irreducible {:?}", spec.forbidden));
        }
    }
    let fib = LangAutomaton::build(&LangSpec::new(2, vec![vec![1, 1]]).unwrap()).unwrap();
    let g10 = fib.count_words(10)[10].clone();
    report(
        7,
        "language oracle suite",
        bad.is_empty() && g10 == big(144),
        format!(
            "{} forbidden sets, disagreements {bad:?}; fibonacci gamma'(10) = {g10}",
            specs.len()
        ),
    );
}

#[test]
fn criterion_8_generic_properties() {
    let specs = common::small_specs();
    let mut bad = Vec::new();
    let mut prolongable = 0;
    for spec in &specs {
        let a = LangAutomaton::build(spec).unwrap();
        let per = a.count_words(300);
        let counted = cumulative(&per, EmptyWord::Counted);
        if !seqfn::bz_condition_on(&counted, 2).unwrap().passed() {
            bad.push(format!("bz {:?}", spec.forbidden));
        }
        let mut g = GrowthFn::from_table("language", counted).unwrap();
        for d in 1..=3 {
            for n in 1..=50 {
                if !check_realizability_constraint(&mut g, 1, d, n)
                    .unwrap()
                    .holds()
                {
                    bad.push(format!("realizability D={d} n={n} {:?}", spec.forbidden));
                }
            }
        }
        if check_prolongable(spec, &a).unwrap() == Prolongable::Yes {
            prolongable += 1;
            let excluded = cumulative(&per, EmptyWord::Excluded);
            let second = (2..=300).find(|&n| per[n] < per[n - 1]);
            if second.is_some() || !seqfn::convexity_bounds_on(&excluded).passed() {
                bad.push(format!("convexity {:?}", spec.forbidden));
            }
        }
    }
    report(
        8,
        "generic language properties",
        bad.is_empty(),
        format!(
            "{} languages, {prolongable} prolongable, failures {bad:?}",
            specs.len()
        ),
    );
}

fn rand_big(rng: &mut ChaCha8Rng, bits: u64) -> BigUint {
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill(bytes.as_mut_slice());
    BigUint::from_bytes_le(&bytes) >> (bytes.len() as u64 * 8 - bits)
}

/// `floor(log2(a) 2^prec)`, by repeated squaring of the mantissa.
fn log2_fixed(a: &BigUint, prec: u32) -> BigUint {
    let e = a.bits() - 1;
    let guard = prec + 64;
    // mantissa in [1, 2) scaled by 2^guard
    let mut m = if e as u32 > guard {
        a >> (e as u32 - guard)
    } else {
        a << (guard - e as u32)
    };
    let two = BigUint::one() << (guard + 1);
    let mut frac = BigUint::zero();
    for _ in 0..prec {
        m = (&m * &m) >> guard;
        frac <<= 1u32;
        if m >= two {
            m >>= 1u32;
            frac += 1u32;
        }
    }
    (big(e) << prec) + frac
}

#[test]
fn criterion_9_exactnum_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261014);
    let mut sandwich_bad = 0;
    for _ in 0..10_000 {
        let bits = rng.gen_range(1..=600u64);
        let a = rand_big(&mut rng, bits);
        let q = rng.gen_range(1..=70u64);
        let r = iroot(&a, q).unwrap();
        if r.pow(q as u32) > a || (&r + 1u32).pow(q as u32) <= a {
            sandwich_bad += 1;
        }
    }
    const PREC: u32 = 256;
    let mut cmp_bad = 0;
    let mut decided = 0;
    for t in 0..10_000 {
        let b = {
            let bits = rng.gen_range(1..=300u64);
            rand_big(&mut rng, bits)
        } + 1u32;
        let q = rng.gen_range(1..=40u32);
        let p = rng.gen_range(-200i64..=200);
        let e = RatExp::new(p, q).unwrap();
        // half the cases sit next to the tie a = b 2^e
        let a = if t % 2 == 0 {
            let tie = if p >= 0 {
                (b.pow(q) << p as u64).nth_root(q)
            } else {
                (b.pow(q) >> (-p) as u64).nth_root(q)
            };
            let delta = rng.gen_range(0..3u32);
            if rng.gen_bool(0.5) {
                tie + delta
            } else {
                sub(&tie, &big(delta as u64))
            }
        } else {
            {
                let bits = rng.gen_range(1..=300u64);
                rand_big(&mut rng, bits)
            }
        };
        if a.is_zero() {
            continue;
        }
        // margin = log2 a - log2 b - p/q at 256 fractional bits
        let la = log2_fixed(&a, PREC);
        let lb = log2_fixed(&b, PREC);
        let scale = BigUint::one() << PREC;
        let pq_num = big(p.unsigned_abs()) * &scale;
        let (pq, pq_neg) = (&pq_num / big(q as u64), p < 0);
        let (lhs, rhs) = if pq_neg {
            (&la + &pq, lb.clone())
        } else {
            (la.clone(), &lb + &pq)
        };
        let ulp = big(8);
        let float = if lhs > &rhs + &ulp {
            Some(std::cmp::Ordering::Greater)
        } else if rhs > &lhs + &ulp {
            Some(std::cmp::Ordering::Less)
        } else {
            None
        };
        if let Some(o) = float {
            decided += 1;
            if cmp_pow2(&a, &b, e) != o {
                cmp_bad += 1;
            }
        }
    }
    report(
        9,
        "exactnum randomized",
        sandwich_bad == 0 && cmp_bad == 0 && decided > 5_000,
        format!("iroot sandwich failures {sandwich_bad}/10000; cmp_pow2 disagreements {cmp_bad} over {decided} float-decided cases"),
    );
}
