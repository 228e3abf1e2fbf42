//! Exact analysis of synchronizing automata.
//!
//! The crate computes the synchronizing probability function of an automaton
//! (the value of the word-guessing game, obtained by an exact rational linear
//! program), the triple rendezvous time and its generalizations `T_l`,
//! canonical optimal strategies, closed-form upper bounds on `T_3`, and the
//! `TR_n` family of automata whose triple rendezvous time is `n + 3`.
//!
//! States and letters are 0-based in the Rust API. Everything that leaves the
//! process (text format, displayed sets, CLI output) is 1-based.

pub mod automaton;
pub mod bounds;
pub mod canonical;
pub mod families;
pub mod gamesim;
pub mod lp;
pub mod reachability;
pub mod spf;

pub use automaton::{Automaton, ParseError, SearchError, StateSet, Word};
pub use canonical::{canonicalize_support, k_from_decomposition, CanonicalSupport};
pub use families::{cerny, random_automaton, tr, FamilyError};
pub use reachability::{ColumnTable, SupportGraph, TrtResult};
pub use spf::{spf_at, spf_curve, CurvePoint, GameSolution};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Exact rational number used for every game value and strategy.
pub type Rational = num_rational::BigRational;

/// Builds the rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Lossy conversion for display purposes only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Renders a rational as `num/den` (always with a denominator).
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn sum(values: &[Rational]) -> Rational {
    values.iter().fold(Rational::zero(), |acc, v| acc + v)
}
