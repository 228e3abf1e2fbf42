//! Closed-form upper bounds on `T_3`, the two conjectures refuted by `TR_n`,
//! and desk-scale checks of the lemmas behind the square-root bound.
//!
//! All bound arithmetic is integral. The square-root bound is bracketed by
//! the integer square root, never by floating point.

use std::collections::HashSet;

use num_integer::Roots;
use thiserror::Error;

use crate::automaton::{Automaton, StateSet, Word};
use crate::reachability::{default_t3_cap, triple_rendezvous_time, TrtResult};
use crate::spf::CurvePoint;
use crate::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("s must satisfy 1 <= s <= n/2, got n = {n}, s = {s}")]
    SOutOfRange { n: usize, s: usize },
    #[error("the square-root bound needs n >= 4, got {0}")]
    TooSmall(usize),
}

/// Pin–Frankl bound on the reset threshold, `(n^3 - n)/6`.
pub fn pin_frankl(n: usize) -> u64 {
    let n = n as u64;
    (n * n * n - n) / 6
}

/// Counting bound: `n(n-1)/2 + 1`, one more than the number of weight-two
/// columns.
pub fn t3_bound_naive(n: usize) -> u64 {
    let n = n as u64;
    n * (n.saturating_sub(1)) / 2 + 1
}

/// `n(n+4)/4 - (n mod 2)/4`, which is always an integer.
pub fn t3_bound_quarter(n: usize) -> u64 {
    let n = n as u64;
    (n * (n + 4) - n % 2) / 4
}

/// `max{ceil(n(s+2)/2), ceil((n(n+4) - (2s-1)(2s+3) + 1)/4)}` for
/// `1 <= s <= n/2`.
pub fn t3_bound_combined(n: usize, s: usize) -> Result<u64, BoundError> {
    if s == 0 || 2 * s > n {
        return Err(BoundError::SOutOfRange { n, s });
    }
    let (n, s) = (n as i64, s as i64);
    let left = ceil_div(n * (s + 2), 2);
    let right = ceil_div(n * (n + 4) - (2 * s - 1) * (2 * s + 3) + 1, 4);
    Ok(left.max(right) as u64)
}

/// `min_s t3_bound_combined(n, s)` over the admissible `s`.
pub fn t3_bound_combined_min(n: usize) -> Option<(usize, u64)> {
    (1..=n / 2)
        .map(|s| (s, t3_bound_combined(n, s).expect("s in range")))
        .min_by_key(|&(s, b)| (b, s))
}

/// Floor and ceiling of `n(sqrt(5n^2 + 4n - 12) - n + 6)/8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SqrtBound {
    pub floor: u64,
    pub ceil: u64,
}

/// Brackets the square-root bound between consecutive integers (equal when
/// the bound is itself an integer).
pub fn t3_bound_sqrt_bracket(n: usize) -> Result<SqrtBound, BoundError> {
    if n < 4 {
        return Err(BoundError::TooSmall(n));
    }
    let n = n as i128;
    // n * sqrt(D) = sqrt(n^2 D)
    let scaled = n * n * (5 * n * n + 4 * n - 12);
    let r = scaled.sqrt();
    let r_up = if r * r == scaled { r } else { r + 1 };
    let shift = n * (n - 6);
    Ok(SqrtBound {
        floor: floor_div(r - shift, 8) as u64,
        ceil: ceil_div(r_up - shift, 8) as u64,
    })
}

/// `ceil(n(sqrt(5n^2 + 4n - 12) - n + 6)/8)`, for `n >= 4`.
pub fn t3_bound_sqrt(n: usize) -> Result<u64, BoundError> {
    t3_bound_sqrt_bracket(n).map(|b| b.ceil)
}

/// The integer an integral `T_3` is compared against: `T_3 <= x` for real
/// `x` holds iff `T_3 <= floor(x)`.
pub fn t3_bound_sqrt_floor(n: usize) -> Result<u64, BoundError> {
    t3_bound_sqrt_bracket(n).map(|b| b.floor)
}

/// Smallest `n0 >= 4` such that `t3_bound_sqrt(n) <= t3_bound_quarter(n)` for
/// every `n` in `n0..=limit`.
pub fn sqrt_beats_quarter_from(limit: usize) -> Option<usize> {
    let mut n0 = None;
    for n in (4..=limit).rev() {
        if t3_bound_sqrt(n).expect("n >= 4") <= t3_bound_quarter(n) {
            n0 = Some(n);
        } else {
            break;
        }
    }
    n0
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div<T>(a: T, b: T) -> T
where
    T: num_integer::Integer + Copy,
{
    num_integer::Integer::div_ceil(&a, &b)
}

/// Values measured on a concrete automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measured {
    pub synchronizing: bool,
    pub strongly_connected: bool,
    pub reset_threshold: Option<usize>,
    pub t3: Option<usize>,
}

/// Every closed-form bound for one `n`, optionally with measured values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub pin_frankl: u64,
    pub t3_naive: u64,
    pub t3_quarter: u64,
    /// `(s, t3_bound_combined(n, s))` for every admissible `s`.
    pub t3_combined: Vec<(usize, u64)>,
    pub t3_sqrt: Option<SqrtBound>,
    pub measured: Option<Measured>,
}

impl BoundReport {
    pub fn new(n: usize) -> Self {
        BoundReport {
            n,
            pin_frankl: pin_frankl(n),
            t3_naive: t3_bound_naive(n),
            t3_quarter: t3_bound_quarter(n),
            t3_combined: (1..=n / 2)
                .map(|s| (s, t3_bound_combined(n, s).expect("s in range")))
                .collect(),
            t3_sqrt: t3_bound_sqrt_bracket(n).ok(),
            measured: None,
        }
    }

    /// Bounds for `aut.n()` plus its reset threshold and `T_3`.
    pub fn measure(aut: &Automaton) -> Self {
        let mut report = BoundReport::new(aut.n());
        let synchronizing = aut.is_synchronizing();
        let reset_threshold = synchronizing
            .then(|| aut.shortest_reset_word(aut.default_reset_cap()).ok().map(|w| w.len()))
            .flatten();
        let t3 = if synchronizing && aut.n() >= 3 {
            triple_rendezvous_time(aut, default_t3_cap(aut.n())).ok().map(|r| r.t)
        } else {
            None
        };
        report.measured = Some(Measured {
            synchronizing,
            strongly_connected: aut.is_strongly_connected(),
            reset_threshold,
            t3,
        });
        report
    }

    /// Measured values exceeding a bound they are subject to.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(m) = &self.measured else {
            return out;
        };
        if let Some(r) = m.reset_threshold {
            if r as u64 > self.pin_frankl {
                out.push(format!("reset threshold {r} > pin_frankl {}", self.pin_frankl));
            }
        }
        if let Some(t3) = m.t3 {
            let t3 = t3 as u64;
            if t3 > self.t3_naive {
                out.push(format!("t3 {t3} > t3_naive {}", self.t3_naive));
            }
            if t3 > self.t3_quarter {
                out.push(format!("t3 {t3} > t3_quarter {}", self.t3_quarter));
            }
            if m.strongly_connected {
                if let Some(b) = self.t3_sqrt {
                    if t3 > b.floor {
                        out.push(format!("t3 {t3} > floor of t3_sqrt {}", b.floor));
                    }
                }
                for &(s, b) in &self.t3_combined {
                    if t3 > b {
                        out.push(format!("t3 {t3} > t3_combined(s = {s}) {b}"));
                    }
                }
            }
        }
        out
    }
}

/// A point where `k(1 + (j-1)(n+1)) < j/(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpfViolation {
    pub j: usize,
    pub t: usize,
    pub k: Rational,
    pub threshold: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpfConjectureCheck {
    /// The `j` that fit inside the curve.
    pub checked: Vec<usize>,
    pub violation: Option<SpfViolation>,
}

impl SpfConjectureCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `k(1 + (j-1)(n+1)) >= j/(n-1)` for every `j` in `1..n` whose time
/// lies on `curve` (indexed by `t`, starting at 0). Reports the first failure.
pub fn check_conjecture_spf(n: usize, curve: &[CurvePoint]) -> SpfConjectureCheck {
    let mut checked = Vec::new();
    for j in 1..n {
        let t = 1 + (j - 1) * (n + 1);
        let Some(point) = curve.get(t) else {
            break;
        };
        debug_assert_eq!(point.t, t);
        checked.push(j);
        let threshold = rat(j as i64, (n - 1) as i64);
        if point.k < threshold {
            return SpfConjectureCheck {
                checked,
                violation: Some(SpfViolation {
                    j,
                    t,
                    k: point.k.clone(),
                    threshold,
                }),
            };
        }
    }
    SpfConjectureCheck {
        checked,
        violation: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T3ConjectureCheck {
    pub t3: usize,
    pub limit: usize,
    pub holds: bool,
}

/// `T_3 <= n + 2`.
pub fn check_conjecture_t3(n: usize, t3: &TrtResult) -> T3ConjectureCheck {
    T3ConjectureCheck {
        t3: t3.t,
        limit: n + 2,
        holds: t3.t <= n + 2,
    }
}

/// Outcome of the zero-entry check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroEntryReport {
    /// `k(n) >= 1/(n-s)`: nothing to check.
    Vacuous { k_n: Rational, threshold: Rational },
    /// Every image of the full state set under a word of length at most `n`
    /// misses fewer than `s` states.
    Verified { max_zeros: usize, explored: usize },
    Violated { word: Word, zeros: usize },
    Inconclusive { explored: usize },
}

/// If `k(n) < 1/(n-s)`, every word `W` of length at most `n` leaves fewer
/// than `s` zero entries in `eW` (the states outside the image of the full
/// set). Checked by breadth-first search over distinct images, at most `cap`
/// of them.
pub fn verify_zero_entry_lemma(
    aut: &Automaton,
    s: usize,
    k_n: &Rational,
    cap: usize,
) -> Result<ZeroEntryReport, BoundError> {
    let n = aut.n();
    if s == 0 || 2 * s > n {
        return Err(BoundError::SOutOfRange { n, s });
    }
    let threshold = rat(1, (n - s) as i64);
    if *k_n >= threshold {
        return Ok(ZeroEntryReport::Vacuous {
            k_n: k_n.clone(),
            threshold,
        });
    }
    let full = StateSet::full(n);
    let mut seen: HashSet<StateSet> = HashSet::from([full.clone()]);
    let mut layer = vec![(full, Word::empty())];
    let mut max_zeros = 0;
    for _ in 0..n {
        let mut next = Vec::new();
        for (set, word) in &layer {
            for l in 0..aut.m() {
                let img = aut.image(set, l);
                if !seen.insert(img.clone()) {
                    continue;
                }
                if seen.len() > cap {
                    return Ok(ZeroEntryReport::Inconclusive { explored: seen.len() });
                }
                let mut w = word.clone();
                w.0.push(l);
                let zeros = n - img.weight();
                if zeros >= s {
                    return Ok(ZeroEntryReport::Violated { word: w, zeros });
                }
                max_zeros = max_zeros.max(zeros);
                next.push((img, w));
            }
        }
        layer = next;
    }
    Ok(ZeroEntryReport::Verified {
        max_zeros,
        explored: seen.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DichotomyReport {
    Skipped(String),
    Holds { value_branch: bool, time_branch: bool },
    Violated,
}

/// For strongly connected synchronizing automata: `k(n) >= 1/(n-s)` or
/// `T_3 <= n(s+2)/2`.
pub fn verify_dichotomy_lemma(
    aut: &Automaton,
    s: usize,
    k_n: &Rational,
    t3: usize,
) -> Result<DichotomyReport, BoundError> {
    let n = aut.n();
    if s == 0 || 2 * s > n {
        return Err(BoundError::SOutOfRange { n, s });
    }
    if !aut.is_strongly_connected() {
        return Ok(DichotomyReport::Skipped("not strongly connected".into()));
    }
    if !aut.is_synchronizing() {
        return Ok(DichotomyReport::Skipped("not synchronizing".into()));
    }
    let value_branch = *k_n >= rat(1, (n - s) as i64);
    let time_branch = 2 * t3 <= n * (s + 2);
    Ok(if value_branch || time_branch {
        DichotomyReport::Holds {
            value_branch,
            time_branch,
        }
    } else {
        DichotomyReport::Violated
    })
}
