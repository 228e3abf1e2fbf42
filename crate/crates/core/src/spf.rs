//! The synchronizing probability function `k(t)`.
//!
//! `k(t)` is the value of the zero-sum game in which Player Two hides a state
//! drawn from `p` and Player One picks a column of `A(t)` (a word together with
//! a guessed final state). Player One's program is
//!
//! ```text
//! max k  s.t.  A q >= k e,  Σ q = 1,  q >= 0
//! ```
//!
//! and Player Two's is its LP dual `min k s.t. p A <= k e, Σ p = 1, p >= 0`.
//! Both are solved exactly; `p` is read off the multipliers of Player One's
//! program, and every returned solution can be re-checked with
//! [`GameSolution::verify`].

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automaton::{Automaton, StateSet};
use crate::lp::{nullspace, LinearProgram, LpSolution, Relation, Sense};
use crate::reachability::ColumnTable;
use crate::{sum, Rational};

/// Optimal value and strategies of the game at horizon `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSolution {
    pub t: usize,
    pub k: Rational,
    /// Player Two: distribution over the `n` states.
    pub p: Vec<Rational>,
    /// Player One: distribution over the `m(t)` columns. Basic, so at most `n`
    /// entries are nonzero.
    pub q: Vec<Rational>,
    /// Columns carrying mass in some optimal `q`, ascending.
    pub critical_columns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("strategy length mismatch")]
    Shape,
    #[error("{0} is not a probability distribution")]
    NotDistribution(&'static str),
    #[error("p·a_{0} exceeds k")]
    PrimalInfeasible(usize),
    #[error("(Aq)_{0} is below k")]
    DualInfeasible(usize),
    #[error("objective of {0} differs from k")]
    ObjectiveMismatch(&'static str),
    #[error("complementary slackness fails at column {0}")]
    SlackColumn(usize),
    #[error("complementary slackness fails at state {0}")]
    SlackState(usize),
}

/// `p · a` for a 0/1 column `a`.
pub fn dot(p: &[Rational], col: &StateSet) -> Rational {
    col.iter().fold(Rational::zero(), |acc, i| acc + &p[i])
}

/// `(A q)_i` for every state `i`.
pub fn coverage(n: usize, columns: &[StateSet], q: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (col, w) in columns.iter().zip(q) {
        if w.is_zero() {
            continue;
        }
        for i in col.iter() {
            out[i] += w;
        }
    }
    out
}

fn is_distribution(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_negative()) && sum(v).is_one()
}

impl GameSolution {
    /// Exact optimality certificate: feasibility of both strategies, equal
    /// objectives, and complementary slackness.
    pub fn verify(&self, columns: &[StateSet]) -> Result<(), CertificateError> {
        let n = self.p.len();
        if self.q.len() != columns.len() {
            return Err(CertificateError::Shape);
        }
        if !is_distribution(&self.p) {
            return Err(CertificateError::NotDistribution("p"));
        }
        if !is_distribution(&self.q) {
            return Err(CertificateError::NotDistribution("q"));
        }
        let pa: Vec<Rational> = columns.iter().map(|c| dot(&self.p, c)).collect();
        if let Some(j) = pa.iter().position(|v| v > &self.k) {
            return Err(CertificateError::PrimalInfeasible(j));
        }
        let aq = coverage(n, columns, &self.q);
        if let Some(i) = aq.iter().position(|v| v < &self.k) {
            return Err(CertificateError::DualInfeasible(i));
        }
        if pa.iter().max() != Some(&self.k) {
            return Err(CertificateError::ObjectiveMismatch("p"));
        }
        if aq.iter().min() != Some(&self.k) {
            return Err(CertificateError::ObjectiveMismatch("q"));
        }
        for (j, (qj, paj)) in self.q.iter().zip(&pa).enumerate() {
            if !(qj * (&self.k - paj)).is_zero() {
                return Err(CertificateError::SlackColumn(j));
            }
        }
        for (i, (pi, aqi)) in self.p.iter().zip(&aq).enumerate() {
            if !(pi * (aqi - &self.k)).is_zero() {
                return Err(CertificateError::SlackState(i));
            }
        }
        Ok(())
    }
}

/// Player One's program over the given columns. Variables `q_0..q_{m-1}, k`.
fn player_one_program(n: usize, columns: &[StateSet]) -> LinearProgram {
    let m = columns.len();
    let mut objective = vec![Rational::zero(); m + 1];
    objective[m] = Rational::one();
    let mut lp = LinearProgram::new(m + 1, Sense::Maximize, objective);
    for i in 0..n {
        let mut row: Vec<Rational> = columns
            .iter()
            .map(|c| if c.contains(i) { -Rational::one() } else { Rational::zero() })
            .collect();
        row.push(Rational::one());
        lp.add(row, Relation::Le, Rational::zero());
    }
    // Σq <= 1 is tight at any optimum with k > 0, and keeps the start basis feasible
    let mut total = vec![Rational::one(); m];
    total.push(Rational::zero());
    lp.add(total, Relation::Le, Rational::one());
    lp
}

/// Indices of the inclusion-maximal columns (first copy of duplicates).
/// Moving Player One's mass from a column to a superset never lowers the
/// payoff, so the value and an optimal pair can be computed on these alone.
pub fn maximal_columns(columns: &[StateSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..columns.len()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(columns[j].weight()), j));
    let mut kept: Vec<usize> = Vec::new();
    for j in order {
        if !kept.iter().any(|&i| columns[j].is_subset(&columns[i])) {
            kept.push(j);
        }
    }
    kept.sort_unstable();
    kept
}

/// Solves the game over an arbitrary column set covering all `n` states.
/// Returns `(k, p, q)` with `q` basic and zero off the maximal columns.
pub fn solve_game(n: usize, columns: &[StateSet]) -> (Rational, Vec<Rational>, Vec<Rational>) {
    let keep = maximal_columns(columns);
    let reduced: Vec<StateSet> = keep.iter().map(|&j| columns[j].clone()).collect();
    let sol = player_one_program(n, &reduced)
        .solve()
        .expect("the game program is feasible and bounded");
    let m = reduced.len();
    let k = sol.x[m].clone();
    let mut q = vec![Rational::zero(); columns.len()];
    for (&j, v) in keep.iter().zip(&sol.x[..m]) {
        q[j] = v.clone();
    }
    let p = sol.duals[..n].to_vec();
    (k, p, q)
}

/// Optimal value of the game restricted to `columns`; zero when some state is
/// left uncovered.
pub fn game_value(n: usize, columns: &[StateSet]) -> Rational {
    let reduced: Vec<StateSet> = maximal_columns(columns).into_iter().map(|j| columns[j].clone()).collect();
    player_one_program(n, &reduced)
        .solve()
        .expect("the game program is feasible and bounded")
        .value
}

/// The face of optimal Player One strategies, restricted to `support`
/// (all other entries of `q` fixed to zero).
fn dual_face(n: usize, columns: &[StateSet], support: &[usize], k: &Rational) -> LinearProgram {
    let mut lp = LinearProgram::new(support.len(), Sense::Maximize, vec![Rational::zero(); support.len()]);
    for i in 0..n {
        let row = support
            .iter()
            .map(|&j| if columns[j].contains(i) { Rational::one() } else { Rational::zero() })
            .collect();
        lp.add(row, Relation::Ge, k.clone());
    }
    lp.add(vec![Rational::one(); support.len()], Relation::Eq, Rational::one());
    lp
}

/// The face of optimal Player Two strategies.
fn primal_face(n: usize, columns: &[StateSet], k: &Rational) -> LinearProgram {
    let mut lp = LinearProgram::new(n, Sense::Maximize, vec![Rational::zero(); n]);
    // constraints of dominated columns are implied
    for col in maximal_columns(columns).into_iter().map(|j| &columns[j]) {
        let row = (0..n)
            .map(|i| if col.contains(i) { Rational::one() } else { Rational::zero() })
            .collect();
        lp.add(row, Relation::Le, k.clone());
    }
    lp.add(vec![Rational::one(); n], Relation::Eq, Rational::one());
    lp
}

fn optimize_over(face: &LinearProgram, objective: Vec<Rational>, sense: Sense) -> LpSolution {
    let mut lp = face.clone();
    lp.objective = objective;
    lp.sense = sense;
    lp.solve().expect("optimal faces are nonempty polytopes")
}

/// Columns that receive positive mass in some optimal Player One strategy.
///
/// Repeatedly maximizes the total mass on the columns not yet known to be
/// critical over the optimal face; stops when that maximum is zero.
pub fn critical_columns(n: usize, columns: &[StateSet], k: &Rational) -> Vec<usize> {
    critical_columns_seeded(n, columns, k, &[])
}

fn critical_columns_seeded(
    n: usize,
    columns: &[StateSet],
    k: &Rational,
    known: &[Rational],
) -> Vec<usize> {
    let all: Vec<usize> = (0..columns.len()).collect();
    let face = dual_face(n, columns, &all, k);
    let mut critical: Vec<bool> = (0..columns.len())
        .map(|j| known.get(j).is_some_and(|v| v.is_positive()))
        .collect();
    loop {
        let objective: Vec<Rational> = critical
            .iter()
            .map(|&c| if c { Rational::zero() } else { Rational::one() })
            .collect();
        if objective.iter().all(|v| v.is_zero()) {
            break;
        }
        let sol = optimize_over(&face, objective, Sense::Maximize);
        if sol.value.is_zero() {
            break;
        }
        for (j, v) in sol.x.iter().enumerate() {
            if v.is_positive() {
                critical[j] = true;
            }
        }
    }
    critical
        .iter()
        .enumerate()
        .filter_map(|(j, &c)| c.then_some(j))
        .collect()
}

/// Which optimal set [`polytope_dimension`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `P_t`, Player Two's optimal strategies.
    Primal,
    /// `Q_t`, Player One's optimal strategies.
    Dual,
}

/// Affine dimension of the polytope described by `face`.
///
/// Keeps a set of affinely independent points of the polytope. For each
/// direction `w` orthogonal to their span it maximizes and minimizes `w·x`;
/// a direction along which the polytope is not flat yields a new point. When
/// every orthogonal direction is flat the hull is complete.
fn affine_dimension(face: &LinearProgram) -> usize {
    let dim = face.num_vars;
    let x0 = optimize_over(face, vec![Rational::zero(); dim], Sense::Maximize).x;
    let mut directions: Vec<Vec<Rational>> = Vec::new();
    'grow: loop {
        for w in nullspace(&directions, dim) {
            let base: Rational = w.iter().zip(&x0).map(|(a, b)| a * b).sum();
            for sense in [Sense::Maximize, Sense::Minimize] {
                let sol = optimize_over(face, w.clone(), sense);
                if sol.value != base {
                    directions.push(sol.x.iter().zip(&x0).map(|(a, b)| a - b).collect());
                    continue 'grow;
                }
            }
        }
        return directions.len();
    }
}

/// Dimension of `P_t` or `Q_t` for the game over `columns` with optimal value `k`.
pub fn polytope_dimension(n: usize, columns: &[StateSet], k: &Rational, side: Side) -> usize {
    match side {
        Side::Primal => affine_dimension(&primal_face(n, columns, k)),
        Side::Dual => {
            let support = critical_columns(n, columns, k);
            affine_dimension(&dual_face(n, columns, &support, k))
        }
    }
}

/// Solves the game over a column set, including the critical columns.
pub fn spf_at_columns(n: usize, columns: &[StateSet], t: usize) -> GameSolution {
    let (k, p, q) = solve_game(n, columns);
    let critical_columns = critical_columns_seeded(n, columns, &k, &q);
    GameSolution {
        t,
        k,
        p,
        q,
        critical_columns,
    }
}

/// `k(t)` with optimal strategies, for the table's current `t`.
pub fn spf_at(aut: &Automaton, table: &ColumnTable) -> GameSolution {
    assert_eq!(aut.n(), table.n());
    spf_at_columns(table.n(), table.columns(), table.time())
}

/// One row of an SPF curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub t: usize,
    pub k: Rational,
    /// `m(t)`, the number of reachable columns.
    pub m: usize,
    pub dim_p: Option<usize>,
    pub dim_q: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CurveOptions {
    pub dim_p: bool,
    pub dim_q: bool,
}

impl CurveOptions {
    pub fn with_dimensions() -> Self {
        CurveOptions {
            dim_p: true,
            dim_q: true,
        }
    }
}

/// Evaluates a single point of the curve on a table that reaches `t`.
pub fn curve_point(table: &ColumnTable, t: usize, opts: CurveOptions) -> CurvePoint {
    let n = table.n();
    let cols = table.columns_at(t);
    let k = game_value(n, cols);
    CurvePoint {
        t,
        m: cols.len(),
        dim_p: opts.dim_p.then(|| polytope_dimension(n, cols, &k, Side::Primal)),
        dim_q: opts.dim_q.then(|| polytope_dimension(n, cols, &k, Side::Dual)),
        k,
    }
}

/// `k(0), ..., k(t_max)` computed exactly on the incrementally grown table.
pub fn spf_curve(aut: &Automaton, t_max: usize, opts: CurveOptions) -> Vec<CurvePoint> {
    let table = ColumnTable::build(aut, t_max);
    spf_curve_on(&table, t_max, opts)
}

/// Same as [`spf_curve`] on a prebuilt table with `time() >= t_max`.
pub fn spf_curve_on(table: &ColumnTable, t_max: usize, opts: CurveOptions) -> Vec<CurvePoint> {
    let mut out: Vec<CurvePoint> = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        match out.last() {
            // A(t) = A(t-1): same program, same answer
            Some(prev) if prev.m == table.len_at(t) => {
                let mut same = prev.clone();
                same.t = t;
                out.push(same);
            }
            _ => out.push(curve_point(table, t, opts)),
        }
    }
    out
}

/// A breach of the value-quantization or stagnation-length statements for
/// `t < T_3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditViolation {
    /// `k(t)` is not of the form `2/(n+s)` with `0 <= s <= n-1`.
    NotQuantized { t: usize, k: Rational },
    /// `k = 2/(n+s)` held on more than `⌊(n-s)/2⌋ + 1` consecutive steps.
    RunTooLong {
        start: usize,
        len: usize,
        s: usize,
        limit: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub n: usize,
    pub t3: usize,
    /// `(t, s)` for every audited `t` whose value was quantized.
    pub values: Vec<(usize, usize)>,
    pub violations: Vec<AuditViolation>,
    /// Audited range `1..=last_t`.
    pub last_t: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `s` with `k = 2/(n+s)`, if it is an integer in `0..n`.
pub fn quantization_index(n: usize, k: &Rational) -> Option<usize> {
    if !k.is_positive() {
        return None;
    }
    let s = Rational::from_integer(2.into()) / k - Rational::from_integer(n.into());
    if !s.is_integer() || s.is_negative() {
        return None;
    }
    let s: usize = s.to_integer().try_into().ok()?;
    (s < n).then_some(s)
}

/// Checks the curve at `1 <= t < t3`: every value is `2/(n+s)` with
/// `0 <= s <= n-1`, and no value lasts more than `⌊(n-s)/2⌋ + 1` consecutive
/// steps. `t = 0` (where `k = 1/n`) lies outside the statement and is skipped.
pub fn stagnation_audit(n: usize, curve: &[CurvePoint], t3: usize) -> AuditReport {
    let last_t = t3.saturating_sub(1).min(curve.len().saturating_sub(1));
    let mut report = AuditReport {
        n,
        t3,
        values: Vec::new(),
        violations: Vec::new(),
        last_t,
    };
    let mut run: Option<(usize, usize, usize)> = None; // (start, len, s)
    let close = |run: Option<(usize, usize, usize)>, report: &mut AuditReport| {
        if let Some((start, len, s)) = run {
            let limit = (n - s) / 2 + 1;
            if len > limit {
                report.violations.push(AuditViolation::RunTooLong { start, len, s, limit });
            }
        }
    };
    for point in curve.iter().filter(|p| p.t >= 1 && p.t <= last_t) {
        match quantization_index(n, &point.k) {
            None => {
                report.violations.push(AuditViolation::NotQuantized {
                    t: point.t,
                    k: point.k.clone(),
                });
                close(run.take(), &mut report);
            }
            Some(s) => {
                report.values.push((point.t, s));
                run = match run {
                    Some((start, len, rs)) if rs == s => Some((start, len + 1, s)),
                    other => {
                        close(other, &mut report);
                        Some((point.t, 1, s))
                    }
                };
            }
        }
    }
    close(run, &mut report);
    report
}
