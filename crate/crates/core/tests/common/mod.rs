//! Brute-force word oracles shared by the integration suites.
#![allow(dead_code)]

use growth_forge::langgrowth::LangSpec;

/// All words of length `n` over `0..d`, lexicographic.
pub fn words(d: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..d as u8).map(move |c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .collect();
    }
    out
}

fn avoids(forbidden: &[Vec<u8>], w: &[u8]) -> bool {
    !forbidden
        .iter()
        .any(|f| f.len() <= w.len() && w.windows(f.len()).any(|x| x == f.as_slice()))
}

pub fn in_lang(spec: &LangSpec, w: &[u8]) -> bool {
    avoids(&spec.forbidden, w)
}

/// Words of the language of each length `0..=n`.
pub fn count(spec: &LangSpec, n: usize) -> Vec<u64> {
    (0..=n)
        .map(|l| {
            words(spec.alphabet, l)
                .iter()
                .filter(|w| in_lang(spec, w))
                .count() as u64
        })
        .collect()
}

/// Every nonempty word of length at most `bound` extends by a letter on
/// each side.
pub fn prolongable(spec: &LangSpec, bound: usize) -> bool {
    (1..=bound).all(|l| {
        words(spec.alphabet, l)
            .iter()
            .filter(|w| in_lang(spec, w))
            .all(|w| {
                let right = (0..spec.alphabet as u8).any(|c| {
                    let mut x = w.clone();
                    x.push(c);
                    in_lang(spec, &x)
                });
                let left = (0..spec.alphabet as u8).any(|c| {
                    let mut x = vec![c];
                    x.extend_from_slice(w);
                    in_lang(spec, &x)
                });
                right && left
            })
    })
}

/// Whether `u w v` is in the language for some `w` of length at most `bound`.
pub fn joins(spec: &LangSpec, u: &[u8], v: &[u8], bound: usize) -> bool {
    (0..=bound).any(|l| {
        words(spec.alphabet, l).iter().any(|w| {
            let z = [u, w.as_slice(), v].concat();
            in_lang(spec, &z)
        })
    })
}

/// All nonempty `u, v` of length at most `short` join within `bound`.
pub fn irreducible(spec: &LangSpec, short: usize, bound: usize) -> bool {
    let lang: Vec<Vec<u8>> = (1..=short)
        .flat_map(|l| words(spec.alphabet, l))
        .filter(|w| in_lang(spec, w))
        .collect();
    lang.iter()
        .all(|u| lang.iter().all(|v| joins(spec, u, v, bound)))
}

/// Reduced forbidden sets over two letters with at most two words of length
/// at most three.
pub fn small_specs() -> Vec<LangSpec> {
    let pool: Vec<Vec<u8>> = (1..=3).flat_map(|l| words(2, l)).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |f: Vec<Vec<u8>>| {
        let s = LangSpec::new(2, f).unwrap();
        if seen.insert(s.forbidden.clone()) {
            out.push(s);
        }
    };
    push(vec![]);
    for (i, a) in pool.iter().enumerate() {
        push(vec![a.clone()]);
        for b in &pool[i + 1..] {
            push(vec![a.clone(), b.clone()]);
        }
    }
    out
}
