//! Deterministic complete automata, state sets and words.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A subset of the states of an `n`-state automaton.
///
/// Doubles as the binary column vector of a word matrix: state `i` belongs to
/// the set iff entry `i` of the column is 1. The total order is the
/// lexicographic order on the 0/1 vector read from the first state to the
/// last, with 0 < 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    n: usize,
    blocks: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet {
            n,
            blocks: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for q in 0..n {
            s.insert(q);
        }
        s
    }

    pub fn singleton(n: usize, q: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(q);
        s
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(n: usize, states: I) -> Self {
        let mut s = Self::empty(n);
        for q in states {
            s.insert(q);
        }
        s
    }

    /// Builds a set from 1-based state labels.
    pub fn from_labels<I: IntoIterator<Item = usize>>(n: usize, labels: I) -> Self {
        Self::from_states(n, labels.into_iter().map(|l| l - 1))
    }

    /// Number of states of the ambient automaton.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, q: usize) {
        assert!(q < self.n, "state {q} out of range for n = {}", self.n);
        self.blocks[q / 64] |= 1 << (q % 64);
    }

    pub fn contains(&self, q: usize) -> bool {
        q < self.n && self.blocks[q / 64] & (1 << (q % 64)) != 0
    }

    /// Number of states in the set (the weight of the column).
    pub fn weight(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    /// States in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&q| self.contains(q))
    }

    /// The 0/1 entries of the column, first state first.
    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.contains(q) as u8).collect()
    }

    /// Bit string such as `1001`.
    pub fn bit_string(&self) -> String {
        (0..self.n)
            .map(|q| if self.contains(q) { '1' } else { '0' })
            .collect()
    }

    /// 1-based labels of the member states.
    pub fn labels(&self) -> Vec<usize> {
        self.iter().map(|q| q + 1).collect()
    }
}

impl Ord for StateSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.blocks.iter().zip(&other.blocks) {
                let diff = a ^ b;
                if diff != 0 {
                    // lowest differing state decides; the set holding it is larger
                    let low = diff & diff.wrapping_neg();
                    return if a & low != 0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for StateSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", q + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSet{self}")
    }
}

/// A finite sequence of letter indices, applied left to right.
///
/// The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    /// Parses a word written with the automaton's letter names, e.g. `abba`.
    pub fn parse(aut: &Automaton, text: &str) -> Option<Word> {
        text.chars()
            .map(|c| aut.names.iter().position(|name| name.len() == 1 && name.starts_with(c)))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    /// Renders the word with the automaton's letter names; `ε` for the empty word.
    pub fn render(&self, aut: &Automaton) -> String {
        if self.0.is_empty() {
            return "ε".to_string();
        }
        let names: Vec<&str> = self.0.iter().map(|&l| aut.letter_name(l)).collect();
        if names.iter().all(|s| s.chars().count() == 1) {
            names.concat()
        } else {
            names.join(".")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input: expected a header line \"n m\"")]
    MissingHeader,
    #[error("line {line}: malformed header, expected \"n m\" with n, m >= 1")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongEntryCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid entry {token:?}")]
    InvalidEntry { line: usize, token: String },
    #[error("line {line}: target state {value} outside 1..={n}")]
    StateOutOfRange { line: usize, value: usize, n: usize },
    #[error("expected {expected} letter rows, found {found}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("line {line}: unexpected data after the last letter row")]
    TrailingData { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("an automaton needs at least one state and one letter")]
    Empty,
    #[error("letter {letter} has {found} transitions, expected {expected}")]
    WrongLength {
        letter: usize,
        expected: usize,
        found: usize,
    },
    #[error("letter {letter} maps state {state} to {target}, outside the state range")]
    TargetOutOfRange {
        letter: usize,
        state: usize,
        target: usize,
    },
}

/// Outcome of a bounded search that did not find what it was looking for.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("not found: search space saturated at t = {at}")]
    Saturated { at: usize },
    #[error("not found within cap {cap}")]
    CapReached { cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A deterministic complete automaton on states `0..n` with `m` letters.
///
/// Each letter is a total transition function, equivalently a binary
/// row-stochastic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    n: usize,
    letters: Vec<Vec<usize>>,
    names: Vec<String>,
}

fn default_letter_name(l: usize) -> String {
    if l < 26 {
        ((b'a' + l as u8) as char).to_string()
    } else {
        format!("l{}", l + 1)
    }
}

impl Automaton {
    /// Builds an automaton from 0-based transition lists, one per letter.
    pub fn new(n: usize, letters: Vec<Vec<usize>>) -> Result<Self, AutomatonError> {
        if n == 0 || letters.is_empty() {
            return Err(AutomatonError::Empty);
        }
        for (l, map) in letters.iter().enumerate() {
            if map.len() != n {
                return Err(AutomatonError::WrongLength {
                    letter: l,
                    expected: n,
                    found: map.len(),
                });
            }
            if let Some((state, &target)) = map.iter().enumerate().find(|(_, &t)| t >= n) {
                return Err(AutomatonError::TargetOutOfRange {
                    letter: l,
                    state,
                    target,
                });
            }
        }
        let names = (0..letters.len()).map(default_letter_name).collect();
        Ok(Automaton { n, letters, names })
    }

    /// Builds an automaton from 1-based transition lists.
    pub fn from_one_based(n: usize, letters: &[&[usize]]) -> Result<Self, AutomatonError> {
        let zero_based = letters
            .iter()
            .map(|map| map.iter().map(|&t| t.wrapping_sub(1)).collect())
            .collect();
        Self::new(n, zero_based)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, l: usize) -> &[usize] {
        &self.letters[l]
    }

    pub fn letter_name(&self, l: usize) -> &str {
        &self.names[l]
    }

    /// Transition `δ(q, l)`.
    pub fn step(&self, q: usize, l: usize) -> usize {
        self.letters[l][q]
    }

    /// Image of a single state under a word.
    pub fn run(&self, q: usize, word: &Word) -> usize {
        word.0.iter().fold(q, |s, &l| self.step(s, l))
    }

    /// `{ δ(q, l) : q ∈ set }`.
    pub fn image(&self, set: &StateSet, l: usize) -> StateSet {
        let map = &self.letters[l];
        StateSet::from_states(self.n, set.iter().map(|q| map[q]))
    }

    /// `{ q : δ(q, l) ∈ set }`, i.e. the matrix product `L · c` for the
    /// characteristic column `c` of `set`.
    pub fn preimage(&self, set: &StateSet, l: usize) -> StateSet {
        let map = &self.letters[l];
        StateSet::from_states(self.n, (0..self.n).filter(|&q| set.contains(map[q])))
    }

    /// Image of a set under a word, letters applied left to right.
    pub fn apply_word(&self, set: &StateSet, word: &Word) -> StateSet {
        word.0
            .iter()
            .fold(set.clone(), |s, &l| self.image(&s, l))
    }

    /// Column of `word` for target state `target`: all states that the word
    /// sends to `target`.
    pub fn word_column(&self, word: &Word, target: usize) -> StateSet {
        word.0
            .iter()
            .rev()
            .fold(StateSet::singleton(self.n, target), |c, &l| self.preimage(&c, l))
    }

    /// Pair-merging criterion: the automaton is synchronizing iff every pair of
    /// states can be merged by some word. Backward BFS on the pair graph,
    /// `O(m n^2)`.
    pub fn is_synchronizing(&self) -> bool {
        let n = self.n;
        if n == 1 {
            return true;
        }
        let pair_index = |p: usize, q: usize| {
            let (a, b) = if p < q { (p, q) } else { (q, p) };
            a * n + b
        };
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n * n];
        let mut merged = vec![false; n * n];
        let mut queue = VecDeque::new();
        for p in 0..n {
            for q in p + 1..n {
                let idx = p * n + q;
                for map in &self.letters {
                    let (a, b) = (map[p], map[q]);
                    if a == b {
                        if !merged[idx] {
                            merged[idx] = true;
                            queue.push_back(idx);
                        }
                    } else {
                        preds[pair_index(a, b)].push(idx);
                    }
                }
            }
        }
        while let Some(idx) = queue.pop_front() {
            for &pred in &preds[idx] {
                if !merged[pred] {
                    merged[pred] = true;
                    queue.push_back(pred);
                }
            }
        }
        (0..n).all(|p| (p + 1..n).all(|q| merged[p * n + q]))
    }

    /// Default search cap for [`Automaton::shortest_reset_word`]: `(n-1)^2 + n`.
    pub fn default_reset_cap(&self) -> usize {
        (self.n - 1) * (self.n - 1) + self.n
    }

    /// Shortest reset word by BFS over subsets of states, starting from the
    /// full set and expanding letters in declared order. Among the shortest
    /// reset words the lexicographically first one (letter order) is returned.
    ///
    /// Exponential in `n`; intended for small automata.
    pub fn shortest_reset_word(&self, cap: usize) -> Result<Word, SearchError> {
        let start = StateSet::full(self.n);
        if start.weight() == 1 {
            return Ok(Word::empty());
        }
        let mut parent: HashMap<StateSet, (usize, usize)> = HashMap::new();
        let mut nodes: Vec<StateSet> = vec![start.clone()];
        parent.insert(start, (usize::MAX, usize::MAX));
        let mut layer_start = 0;
        let mut depth = 0;
        loop {
            let layer_end = nodes.len();
            if layer_start == layer_end {
                return Err(SearchError::Saturated { at: depth });
            }
            if depth == cap {
                return Err(SearchError::CapReached { cap });
            }
            for idx in layer_start..layer_end {
                for l in 0..self.m() {
                    let next = self.image(&nodes[idx], l);
                    if parent.contains_key(&next) {
                        continue;
                    }
                    parent.insert(next.clone(), (idx, l));
                    let done = next.weight() == 1;
                    nodes.push(next);
                    if done {
                        let mut letters = Vec::new();
                        let mut cur = nodes.len() - 1;
                        while cur != 0 {
                            let (p, l) = parent[&nodes[cur]];
                            letters.push(l);
                            cur = p;
                        }
                        letters.reverse();
                        return Ok(Word(letters));
                    }
                }
            }
            layer_start = layer_end;
            depth += 1;
        }
    }

    /// Every state reaches every other state in the union digraph of the letters.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.n;
        let mut forward = vec![Vec::new(); n];
        let mut backward = vec![Vec::new(); n];
        for map in &self.letters {
            for (q, &t) in map.iter().enumerate() {
                forward[q].push(t);
                backward[t].push(q);
            }
        }
        let reaches_all = |adj: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(q) = stack.pop() {
                for &r in &adj[q] {
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reaches_all(&forward) && reaches_all(&backward)
    }

    /// Serializes to the text format read by [`Automaton::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for map in &self.letters {
            let row: Vec<String> = map.iter().map(|t| (t + 1).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format: a header line `n m`, then `m` lines of `n`
    /// 1-based target states. Lines starting with `#` and blank lines are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let dims: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
        let (n, m) = match dims.as_deref() {
            Some(&[n, m]) if n >= 1 && m >= 1 => (n, m),
            _ => return Err(ParseError::MalformedHeader { line: header_line }),
        };

        let mut letters = Vec::with_capacity(m);
        for (line, row) in lines {
            if letters.len() == m {
                return Err(ParseError::TrailingData { line });
            }
            let tokens: Vec<&str> = row.split_whitespace().collect();
            if tokens.len() != n {
                return Err(ParseError::WrongEntryCount {
                    line,
                    expected: n,
                    found: tokens.len(),
                });
            }
            let mut map = Vec::with_capacity(n);
            for tok in tokens {
                let value: usize = tok.parse().map_err(|_| ParseError::InvalidEntry {
                    line,
                    token: tok.to_string(),
                })?;
                if value == 0 || value > n {
                    return Err(ParseError::StateOutOfRange { line, value, n });
                }
                map.push(value - 1);
            }
            letters.push(map);
        }
        if letters.len() != m {
            return Err(ParseError::WrongRowCount {
                expected: m,
                found: letters.len(),
            });
        }
        Ok(Automaton::new(n, letters).expect("validated during parsing"))
    }
}

impl FromStr for Automaton {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Automaton::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c4() -> Automaton {
        Automaton::parse("4 2\n1 2 3 1\n2 3 4 1").unwrap()
    }

    fn set(n: usize, labels: &[usize]) -> StateSet {
        StateSet::from_labels(n, labels.iter().copied())
    }

    #[test]
    fn parses_cerny_four() {
        let a = c4();
        assert_eq!((a.n(), a.m()), (4, 2));
        assert_eq!(a.letter(0), &[0, 1, 2, 0]);
        assert_eq!(a.letter(1), &[1, 2, 3, 0]);
        assert_eq!(a.letter_name(1), "b");
        assert_eq!(Automaton::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn parses_trivial_automata() {
        let one = Automaton::parse("1 1\n1").unwrap();
        assert_eq!(one.letter(0), &[0]);
        let merge = Automaton::parse("# constant map\n2 1\n\n1 1\n").unwrap();
        assert_eq!(merge.letter(0), &[0, 0]);
        assert!(merge.is_synchronizing());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            Automaton::parse("# c\n4 x\n"),
            Err(ParseError::MalformedHeader { line: 2 })
        );
        assert_eq!(
            Automaton::parse("2 1\n1 3"),
            Err(ParseError::StateOutOfRange {
                line: 2,
                value: 3,
                n: 2
            })
        );
        assert_eq!(
            Automaton::parse("2 2\n1 2"),
            Err(ParseError::WrongRowCount {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            Automaton::parse("2 1\n1 2 1"),
            Err(ParseError::WrongEntryCount {
                line: 2,
                expected: 2,
                found: 3
            })
        );
        assert_eq!(
            Automaton::parse("2 1\n1 2\n2 1"),
            Err(ParseError::TrailingData { line: 3 })
        );
        assert_eq!(Automaton::parse("# only\n"), Err(ParseError::MissingHeader));
        assert!(matches!(
            Automaton::parse("0 1\n"),
            Err(ParseError::MalformedHeader { line: 1 })
        ));
    }

    #[test]
    fn image_and_preimage_on_cerny_four() {
        let a = c4();
        assert_eq!(a.image(&StateSet::full(4), 0), set(4, &[1, 2, 3]));
        assert_eq!(a.image(&set(4, &[3, 4]), 1), set(4, &[1, 4]));
        assert_eq!(a.image(&set(4, &[2]), 1), set(4, &[3]));
        // column of a -> column of ba -> column of bba
        assert_eq!(a.preimage(&set(4, &[1, 4]), 1), set(4, &[3, 4]));
        assert_eq!(a.preimage(&set(4, &[3, 4]), 1), set(4, &[2, 3]));
        assert_eq!(a.preimage(&StateSet::full(4), 0), StateSet::full(4));
    }

    #[test]
    fn words_apply_left_to_right() {
        let a = c4();
        let w = Word::parse(&a, "abbbabbba").unwrap();
        assert_eq!(a.apply_word(&StateSet::full(4), &w), set(4, &[1]));
        assert_eq!(a.apply_word(&set(4, &[2, 3]), &Word::empty()), set(4, &[2, 3]));
        assert_eq!(w.render(&a), "abbbabbba");
        let ba = Word::parse(&a, "ba").unwrap();
        assert_eq!(a.word_column(&ba, 0), set(4, &[3, 4]));
    }

    #[test]
    fn lexicographic_order_puts_zero_first() {
        let lo = set(4, &[2, 3]);
        let hi = set(4, &[1, 4]);
        assert!(lo < hi);
        assert!(set(4, &[4]) < set(4, &[3]));
        assert!(set(4, &[3]) < set(4, &[3, 4]));
        let big_a = StateSet::from_states(70, [65]);
        let big_b = StateSet::from_states(70, [3]);
        assert!(big_a < big_b);
    }

    #[test]
    fn synchronizing_checks() {
        assert!(c4().is_synchronizing());
        let id = Automaton::parse("2 1\n1 2").unwrap();
        assert!(!id.is_synchronizing());
        assert!(Automaton::parse("1 1\n1").unwrap().is_synchronizing());
    }

    #[test]
    fn reset_words() {
        let a = c4();
        let w = a.shortest_reset_word(20).unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(a.apply_word(&StateSet::full(4), &w).weight(), 1);
        assert_eq!(w.render(&a), "abbbabbba");
        assert_eq!(a.shortest_reset_word(8), Err(SearchError::CapReached { cap: 8 }));
        let one = Automaton::parse("1 1\n1").unwrap();
        assert_eq!(one.shortest_reset_word(0), Ok(Word::empty()));
        let id = Automaton::parse("2 1\n1 2").unwrap();
        assert!(matches!(
            id.shortest_reset_word(100),
            Err(SearchError::Saturated { .. })
        ));
    }

    #[test]
    fn strong_connectivity() {
        assert!(c4().is_strongly_connected());
        let sink = Automaton::parse("3 1\n2 3 3").unwrap();
        assert!(!sink.is_strongly_connected());
    }

    fn arb_automaton() -> impl Strategy<Value = Automaton> {
        (1usize..=8, 1usize..=3).prop_flat_map(|(n, m)| {
            proptest::collection::vec(proptest::collection::vec(0..n, n), m)
                .prop_map(move |letters| Automaton::new(n, letters).unwrap())
        })
    }

    fn arb_set(n: usize) -> impl Strategy<Value = StateSet> {
        proptest::collection::vec(any::<bool>(), n).prop_map(move |bits| {
            StateSet::from_states(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
        })
    }

    proptest! {
        #[test]
        fn image_preimage_galois_connection(
            (aut, s, t, l) in arb_automaton().prop_flat_map(|a| {
                let n = a.n();
                let m = a.m();
                (Just(a), arb_set(n), arb_set(n), 0..m)
            })
        ) {
            let img_in_t = aut.image(&s, l).is_subset(&t);
            let s_in_pre = s.is_subset(&aut.preimage(&t, l));
            prop_assert_eq!(img_in_t, s_in_pre);
            prop_assert!(aut.image(&s, l).weight() <= s.weight());
        }

        #[test]
        fn preimages_of_singletons_partition_states(
            (aut, l) in arb_automaton().prop_flat_map(|a| { let m = a.m(); (Just(a), 0..m) })
        ) {
            let n = aut.n();
            let total: usize = (0..n).map(|q| aut.preimage(&StateSet::singleton(n, q), l).weight()).sum();
            prop_assert_eq!(total, n);
        }

        #[test]
        fn lex_order_matches_bit_strings(a in arb_set(9), b in arb_set(9)) {
            prop_assert_eq!(a.cmp(&b), a.bit_string().cmp(&b.bit_string()));
        }
    }
}
