//! Named automata families: Černý `C_n`, the `TR_n` family, and seeded random
//! automata.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::Automaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("the Černý family needs n >= 2, got {0}")]
    CernyTooSmall(usize),
    #[error("TR_n needs an odd n >= 9, got {0}")]
    TrInvalid(usize),
    #[error("random automata need n >= 1 and m >= 1")]
    RandomEmpty,
}

/// Which family to build. Also the parsed form of the CLI builtin specs
/// `cerny:n`, `tr:n` and `random:n:m:seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    Cerny { n: usize },
    Tr { n: usize },
    Random { n: usize, m: usize, seed: u64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Automaton, FamilyError> {
        match *self {
            FamilySpec::Cerny { n } => cerny(n),
            FamilySpec::Tr { n } => tr(n),
            FamilySpec::Random { n, m, seed } => random_automaton(n, m, seed),
        }
    }

    /// Parses `cerny:6`, `tr:11` or `random:16:2:42`.
    pub fn parse(spec: &str) -> Option<FamilySpec> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| s.parse::<usize>().ok();
        match parts.as_slice() {
            ["cerny", n] => Some(FamilySpec::Cerny { n: num(n)? }),
            ["tr", n] => Some(FamilySpec::Tr { n: num(n)? }),
            ["random", n, m, seed] => Some(FamilySpec::Random {
                n: num(n)?,
                m: num(m)?,
                seed: seed.parse().ok()?,
            }),
            _ => None,
        }
    }
}

/// The Černý automaton `C_n`: letter `a` sends `q_n` to `q_1` and fixes every
/// other state, letter `b` is the cyclic shift `q_i -> q_{i+1}`.
pub fn cerny(n: usize) -> Result<Automaton, FamilyError> {
    if n < 2 {
        return Err(FamilyError::CernyTooSmall(n));
    }
    let a = (0..n).map(|q| if q == n - 1 { 0 } else { q }).collect();
    let b = (0..n).map(|q| (q + 1) % n).collect();
    Ok(Automaton::new(n, vec![a, b]).expect("well-formed"))
}

const TR9_A: [usize; 9] = [7, 4, 3, 2, 3, 8, 1, 6, 9];
const TR9_B: [usize; 9] = [2, 3, 1, 5, 6, 4, 9, 8, 7];

/// The automaton `TR_n` (odd `n >= 9`), whose triple rendezvous time is `n + 3`.
///
/// `TR_9` is hard-coded. `TR_{n+2}` is obtained from `TR_n` by taking `l1`,
/// the letter fixing `q_n`, and `l2`, the other one, and setting
/// `q_n l1 = q_{n+2}`, `q_{n+2} l1 = q_n`, `q_{n+1} l1 = q_{n+1}`,
/// `q_{n-1} l2 = q_{n+1}`, `q_{n+1} l2 = q_{n-1}`, `q_{n+2} l2 = q_{n+2}`.
pub fn tr(n: usize) -> Result<Automaton, FamilyError> {
    if n < 9 || n.is_multiple_of(2) {
        return Err(FamilyError::TrInvalid(n));
    }
    let mut letters: Vec<Vec<usize>> = vec![
        TR9_A.iter().map(|t| t - 1).collect(),
        TR9_B.iter().map(|t| t - 1).collect(),
    ];
    let mut size = 9;
    while size < n {
        let last = size - 1;
        let l1 = letters
            .iter()
            .position(|map| map[last] == last)
            .expect("exactly one letter fixes the last state");
        let l2 = 1 - l1;
        let (nxt, nxt2) = (size, size + 1);
        for map in letters.iter_mut() {
            map.extend([0, 0]);
        }
        letters[l1][last] = nxt2;
        letters[l1][nxt2] = last;
        letters[l1][nxt] = nxt;
        letters[l2][last - 1] = nxt;
        letters[l2][nxt] = last - 1;
        letters[l2][nxt2] = nxt2;
        size += 2;
    }
    Ok(Automaton::new(n, letters).expect("well-formed"))
}

/// Uniform random automaton: every transition drawn independently and
/// uniformly, from a ChaCha8 stream seeded with `seed` (via
/// `SeedableRng::seed_from_u64`). Transitions are drawn letter by letter,
/// state by state. The output for a given seed is stable.
pub fn random_automaton(n: usize, m: usize, seed: u64) -> Result<Automaton, FamilyError> {
    if n == 0 || m == 0 {
        return Err(FamilyError::RandomEmpty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    Ok(Automaton::new(n, letters).expect("well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::StateSet;

    fn one_based(a: &Automaton, l: usize) -> Vec<usize> {
        a.letter(l).iter().map(|t| t + 1).collect()
    }

    #[test]
    fn cerny_matches_known_matrices() {
        let c4 = cerny(4).unwrap();
        assert_eq!(one_based(&c4, 0), vec![1, 2, 3, 1]);
        assert_eq!(one_based(&c4, 1), vec![2, 3, 4, 1]);
        let c2 = cerny(2).unwrap();
        assert_eq!(one_based(&c2, 0), vec![1, 1]);
        assert_eq!(one_based(&c2, 1), vec![2, 1]);
        assert_eq!(c2.shortest_reset_word(5).unwrap().len(), 1);
        assert_eq!(cerny(1), Err(FamilyError::CernyTooSmall(1)));
    }

    #[test]
    fn cerny_reset_thresholds() {
        for n in 3..=6 {
            let c = cerny(n).unwrap();
            let w = c.shortest_reset_word(c.default_reset_cap()).unwrap();
            assert_eq!(w.len(), (n - 1) * (n - 1), "n = {n}");
        }
    }

    #[test]
    fn tr9_is_the_hard_coded_automaton() {
        let t = tr(9).unwrap();
        assert_eq!(one_based(&t, 0), TR9_A.to_vec());
        assert_eq!(one_based(&t, 1), TR9_B.to_vec());
        let w = crate::automaton::Word::parse(&t, "abbabbababba").unwrap();
        assert_eq!(
            t.apply_word(&StateSet::from_labels(9, [3, 5, 9]), &w),
            StateSet::from_labels(9, [3])
        );
    }

    #[test]
    fn tr11_extension_rule() {
        let t = tr(11).unwrap();
        let a = one_based(&t, 0);
        let b = one_based(&t, 1);
        assert_eq!((a[8], a[10], a[9]), (11, 9, 10));
        assert_eq!((b[7], b[9], b[10]), (10, 8, 11));
        let mut expect_a = TR9_A.to_vec();
        expect_a[8] = 11;
        expect_a.extend([10, 9]);
        let mut expect_b = TR9_B.to_vec();
        expect_b[7] = 10;
        expect_b.extend([8, 11]);
        assert_eq!(a, expect_a);
        assert_eq!(b, expect_b);
    }

    #[test]
    fn tr_letters_alternate_fixing_the_last_states() {
        for n in [9, 11, 13, 15] {
            let t = tr(n).unwrap();
            let fixes = |q: usize| (0..2).filter(|&l| t.step(q, l) == q).collect::<Vec<_>>();
            let last = fixes(n - 1);
            let before = fixes(n - 2);
            assert_eq!(last.len(), 1, "n = {n}");
            assert_eq!(before.len(), 1, "n = {n}");
            assert_ne!(last, before);
            assert!(t.is_strongly_connected());
            assert!(t.is_synchronizing());
        }
        assert_eq!(tr(10), Err(FamilyError::TrInvalid(10)));
        assert_eq!(tr(7), Err(FamilyError::TrInvalid(7)));
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_automaton(8, 2, 42).unwrap();
        assert_eq!(a, random_automaton(8, 2, 42).unwrap());
        assert_ne!(a, random_automaton(8, 2, 43).unwrap());
        let one = random_automaton(1, 3, 7).unwrap();
        assert!((0..3).all(|l| one.letter(l) == [0]));
        assert_eq!(random_automaton(0, 1, 0), Err(FamilyError::RandomEmpty));
    }

    #[test]
    fn random_automata_are_mostly_synchronizing() {
        let synced = (0..1000)
            .filter(|&seed| random_automaton(16, 2, seed).unwrap().is_synchronizing())
            .count();
        // logged, not asserted: the fraction is a statistical property
        println!("synchronizing fraction (n = 16, m = 2): {}", synced as f64 / 1000.0);
    }

    #[test]
    fn builtin_specs_parse() {
        assert_eq!(FamilySpec::parse("cerny:6"), Some(FamilySpec::Cerny { n: 6 }));
        assert_eq!(FamilySpec::parse("tr:11"), Some(FamilySpec::Tr { n: 11 }));
        assert_eq!(
            FamilySpec::parse("random:16:2:42"),
            Some(FamilySpec::Random { n: 16, m: 2, seed: 42 })
        );
        assert_eq!(FamilySpec::parse("tr"), None);
        assert_eq!(FamilySpec::parse("kari:6"), None);
    }
}
