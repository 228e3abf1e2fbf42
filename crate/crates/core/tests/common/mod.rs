//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library's reachability or LP code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cerny_lab::{Automaton, Rational};
use num_traits::{One, Zero};

/// Every word of length exactly `len` over `m` letters, in lexicographic order.
pub fn words_of_length(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..m).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

fn run(aut: &Automaton, q: usize, word: &[usize]) -> usize {
    word.iter().fold(q, |s, &l| aut.letter(l)[s])
}

/// Columns of all words of length at most `t`, as sorted state lists: for
/// each word `W` and target `j`, the nonempty set `{i : iW = j}`.
pub fn naive_columns(aut: &Automaton, t: usize) -> BTreeSet<Vec<usize>> {
    let n = aut.n();
    let mut out = BTreeSet::new();
    for len in 0..=t {
        for w in words_of_length(aut.m(), len) {
            let mut cols = vec![Vec::new(); n];
            for i in 0..n {
                cols[run(aut, i, &w)].push(i);
            }
            out.extend(cols.into_iter().filter(|c| !c.is_empty()));
        }
    }
    out
}

/// Length of a shortest word merging three states, searching lengths up to
/// `max_len` by enumerating every word.
pub fn naive_t3(aut: &Automaton, max_len: usize) -> Option<usize> {
    let n = aut.n();
    (1..=max_len).find(|&len| {
        words_of_length(aut.m(), len).iter().any(|w| {
            let mut hits = vec![0usize; n];
            for i in 0..n {
                hits[run(aut, i, w)] += 1;
            }
            hits.iter().any(|&h| h >= 3)
        })
    })
}

/// Reset threshold by word enumeration.
pub fn naive_reset_threshold(aut: &Automaton, max_len: usize) -> Option<usize> {
    let n = aut.n();
    (0..=max_len).find(|&len| {
        words_of_length(aut.m(), len)
            .iter()
            .any(|w| (0..n).all(|i| run(aut, i, w) == run(aut, 0, w)))
    })
}

/// Solves a square system exactly; `None` if singular.
#[allow(clippy::needless_range_loop)]
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let size = b.len();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / a[col][col].clone();
        for r in 0..size {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] * &inv;
                for c in col..size {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &f * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..size).map(|i| &b[i] / &a[i][i]).collect())
}

fn choose(items: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items < k {
        return Vec::new();
    }
    let mut out = choose(items - 1, k);
    for mut c in choose(items - 1, k - 1) {
        c.push(items - 1);
        out.push(c);
    }
    out
}

/// Game value by vertex enumeration of Player Two's program
/// `min z  s.t.  p·a_j <= z,  sum p = 1,  p >= 0`.
/// Every vertex makes `n` of the `m + n` inequalities tight; the value is
/// the smallest `z` over the feasible ones.
pub fn vertex_enumeration_value(n: usize, columns: &[Vec<usize>]) -> Rational {
    let m = columns.len();
    // variables p_0..p_{n-1}, z
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for c in columns {
        let mut row = vec![Rational::zero(); n + 1];
        for &i in c {
            row[i] = Rational::one();
        }
        row[n] = -Rational::one();
        rows.push(row);
    }
    for i in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[i] = Rational::one();
        rows.push(row);
    }
    let mut best: Option<Rational> = None;
    for tight in choose(m + n, n) {
        let mut a: Vec<Vec<Rational>> = tight.iter().map(|&r| rows[r].clone()).collect();
        let mut b = vec![Rational::zero(); n];
        let mut total = vec![Rational::one(); n];
        total.push(Rational::zero());
        a.push(total);
        b.push(Rational::one());
        let Some(x) = solve_square(a, b) else {
            continue;
        };
        let z = x[n].clone();
        let feasible = x[..n].iter().all(|v| v >= &Rational::zero())
            && columns
                .iter()
                .all(|c| c.iter().fold(Rational::zero(), |s, &i| s + &x[i]) <= z);
        if feasible && best.as_ref().is_none_or(|b| &z < b) {
            best = Some(z);
        }
    }
    best.expect("the program is feasible and bounded")
}

/// `k(t)` from enumerated words and vertex enumeration.
pub fn oracle_k(aut: &Automaton, t: usize) -> Rational {
    let cols: Vec<Vec<usize>> = naive_columns(aut, t).into_iter().collect();
    vertex_enumeration_value(aut.n(), &cols)
}

/// Every automaton with `n` states and `m` letters, in a fixed order.
pub fn all_automata(n: usize, m: usize) -> Vec<Automaton> {
    let maps: Vec<Vec<usize>> = (0..n.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        out.push(Automaton::new(n, idx.iter().map(|&i| maps[i].clone()).collect()).unwrap());
        let mut pos = 0;
        loop {
            if pos == m {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < maps.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
