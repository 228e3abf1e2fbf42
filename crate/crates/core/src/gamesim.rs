//! Monte Carlo play of the word-guessing game, and its exact expected payoff.
//!
//! Player Two hides a state drawn from `p`. Player One draws a column from
//! `q`, applies its witness word to the hidden state and guesses the column's
//! target. Sampling inverts the exact rational CDF against a uniform 64-bit
//! integer, so a run is reproducible from its seed.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::{Automaton, StateSet, Word};
use crate::reachability::ColumnTable;
use crate::spf::dot;
use crate::{sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{0} is not a probability distribution")]
    NotDistribution(&'static str),
    #[error("column {column} needs a word of length {len} > t = {t}")]
    WordTooLong { column: usize, len: usize, t: usize },
}

/// Exact payoff `sum_j q_j (p · a_j)`.
pub fn expected_win(columns: &[StateSet], p: &[Rational], q: &[Rational]) -> Result<Rational, GameError> {
    if q.len() != columns.len() {
        return Err(GameError::DimensionMismatch {
            what: "q",
            expected: columns.len(),
            found: q.len(),
        });
    }
    if let Some(c) = columns.first() {
        if p.len() != c.universe() {
            return Err(GameError::DimensionMismatch {
                what: "p",
                expected: c.universe(),
                found: p.len(),
            });
        }
    }
    Ok(columns
        .iter()
        .zip(q)
        .filter(|(_, w)| !w.is_zero())
        .fold(Rational::zero(), |acc, (c, w)| acc + w * dot(p, c)))
}

/// One play configuration. `q` is indexed by the columns of `A(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    pub t: usize,
    pub p: Vec<Rational>,
    pub q: Vec<Rational>,
    pub rounds: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub wins: u64,
    pub rounds: u64,
    pub frequency: f64,
    /// Binomial standard error of `frequency`.
    pub stderr: f64,
}

/// Inverse-CDF sampler over an exact distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    /// `ceil(F_i * 2^64)` for the cumulative sums `F_i`.
    thresholds: Vec<u128>,
}

impl Sampler {
    pub fn new(weights: &[Rational]) -> Self {
        let scale = Rational::from_integer((BigUint::one() << 64u32).into());
        let mut acc = Rational::zero();
        let mut thresholds = Vec::with_capacity(weights.len());
        for w in weights {
            acc += w;
            let t = (&acc * &scale).ceil().to_integer();
            thresholds.push(t.to_u128().unwrap_or(u128::MAX));
        }
        Sampler { thresholds }
    }

    /// Lowest index `i` with `u < ceil(F_i * 2^64)`.
    pub fn pick(&self, u: u64) -> usize {
        let u = u as u128;
        self.thresholds.partition_point(|&t| t <= u)
    }
}

fn check_distribution(w: &[Rational], what: &'static str) -> Result<(), GameError> {
    if w.iter().any(|x| x.is_negative()) || !sum(w).is_one() {
        return Err(GameError::NotDistribution(what));
    }
    Ok(())
}

/// Plays `cfg.rounds` independent rounds against `table`'s columns at
/// `cfg.t`. Deterministic given `cfg.seed`.
pub fn simulate(aut: &Automaton, table: &ColumnTable, cfg: &GameConfig) -> Result<SimulationResult, GameError> {
    let n = aut.n();
    let m = table.len_at(cfg.t);
    if cfg.p.len() != n {
        return Err(GameError::DimensionMismatch {
            what: "p",
            expected: n,
            found: cfg.p.len(),
        });
    }
    if cfg.q.len() != m {
        return Err(GameError::DimensionMismatch {
            what: "q",
            expected: m,
            found: cfg.q.len(),
        });
    }
    check_distribution(&cfg.p, "p")?;
    check_distribution(&cfg.q, "q")?;
    let atoms: Vec<Option<(Word, usize)>> = (0..m)
        .map(|j| {
            if cfg.q[j].is_zero() {
                return Ok(None);
            }
            let word = table.witness(j);
            if word.len() > cfg.t {
                return Err(GameError::WordTooLong {
                    column: j,
                    len: word.len(),
                    t: cfg.t,
                });
            }
            Ok(Some((word, table.meta(j).target)))
        })
        .collect::<Result<_, _>>()?;
    let hidden = Sampler::new(&cfg.p);
    let guess = Sampler::new(&cfg.q);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut wins = 0u64;
    for _ in 0..cfg.rounds {
        let state = hidden.pick(rng.next_u64());
        let j = guess.pick(rng.next_u64());
        let (word, target) = atoms[j].as_ref().expect("sampled columns carry mass");
        if aut.run(state, word) == *target {
            wins += 1;
        }
    }
    let frequency = if cfg.rounds == 0 {
        0.0
    } else {
        wins as f64 / cfg.rounds as f64
    };
    let stderr = if cfg.rounds == 0 {
        0.0
    } else {
        (frequency * (1.0 - frequency) / cfg.rounds as f64).sqrt()
    };
    Ok(SimulationResult {
        wins,
        rounds: cfg.rounds,
        frequency,
        stderr,
    })
}
