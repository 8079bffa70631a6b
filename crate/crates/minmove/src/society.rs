//! Societies, moves, changes and move-costs vectors, plus the constraint
//! builders that emit them as formulas.
//!
//! A society counts people per type; a move is a τ×τ matrix of non-negative
//! directed flows between types; its change is the net per-type effect. A
//! move-costs vector prices each directed edge (possibly +∞, diagonal 0) and
//! satisfies the triangle inequality.

use crate::error::{Error, Result};
use crate::pa::{Assignment, Int, LinearAtom, PaFormula};
use std::collections::BTreeMap;
use std::fmt;

/// Non-negative people counts per type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Society(Vec<Int>);

impl Society {
    pub fn new(counts: Vec<Int>) -> Result<Self> {
        if counts.iter().any(|&c| c < 0) {
            return Err(Error::invalid("society counts must be non-negative"));
        }
        Ok(Society(counts))
    }

    pub fn tau(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[Int] {
        &self.0
    }

    pub fn count(&self, i: usize) -> Int {
        self.0[i]
    }

    pub fn population(&self) -> Int {
        self.0.iter().sum()
    }

    /// Society extended with one empty type at the end (a latent type).
    pub fn with_latent(&self) -> Society {
        let mut counts = self.0.clone();
        counts.push(0);
        Society(counts)
    }
}

/// Net per-type effect of a move; entries sum to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Change(Vec<Int>);

impl Change {
    pub fn new(delta: Vec<Int>) -> Result<Self> {
        if delta.iter().sum::<Int>() != 0 {
            return Err(Error::invalid("change entries must sum to zero"));
        }
        Ok(Change(delta))
    }

    pub fn delta(&self) -> &[Int] {
        &self.0
    }
}

/// τ×τ matrix of non-negative flows; entry (i,j) is the number of people of
/// type i turning type j. Diagonal entries are permitted but inert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    tau: usize,
    flow: Vec<Int>,
}

impl Move {
    pub fn zero(tau: usize) -> Self {
        Move { tau, flow: vec![0; tau * tau] }
    }

    pub fn from_flows(tau: usize, flows: &[(usize, usize, Int)]) -> Result<Self> {
        let mut m = Move::zero(tau);
        for &(i, j, count) in flows {
            if i >= tau || j >= tau {
                return Err(Error::DimensionMismatch { expected: tau, got: i.max(j) + 1 });
            }
            if count < 0 {
                return Err(Error::invalid("move flows must be non-negative"));
            }
            m.flow[i * tau + j] += count;
        }
        Ok(m)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn get(&self, i: usize, j: usize) -> Int {
        self.flow[i * self.tau + j]
    }

    /// Non-zero off-diagonal flows as (from, to, count).
    pub fn flows(&self) -> Vec<(usize, usize, Int)> {
        let mut out = Vec::new();
        for i in 0..self.tau {
            for j in 0..self.tau {
                if i != j && self.get(i, j) != 0 {
                    out.push((i, j, self.get(i, j)));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.flows().is_empty()
    }
}

/// A price: a non-negative integer or +∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Price {
    Finite(Int),
    Infinite,
}

impl Price {
    pub fn finite(self) -> Option<Int> {
        match self {
            Price::Finite(v) => Some(v),
            Price::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Price::Infinite)
    }

    pub fn saturating_add(self, other: Price) -> Price {
        match (self, other) {
            (Price::Finite(a), Price::Finite(b)) => Price::Finite(a + b),
            _ => Price::Infinite,
        }
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::Finite(v) => write!(f, "{v}"),
            Price::Infinite => write!(f, "inf"),
        }
    }
}

/// Metric per-edge prices with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveCosts {
    tau: usize,
    cost: Vec<Price>,
}

impl MoveCosts {
    /// Builds a cost matrix, checking shape, non-negativity and zero diagonal.
    /// The triangle inequality is checked separately by [`validate_costs`].
    pub fn new(tau: usize, cost: Vec<Price>) -> Result<Self> {
        if cost.len() != tau * tau {
            return Err(Error::DimensionMismatch { expected: tau * tau, got: cost.len() });
        }
        for i in 0..tau {
            match cost[i * tau + i] {
                Price::Finite(0) => {}
                _ => return Err(Error::invalid("cost diagonal must be zero")),
            }
        }
        if cost.iter().any(|c| matches!(c, Price::Finite(v) if *v < 0)) {
            return Err(Error::invalid("costs must be non-negative"));
        }
        Ok(MoveCosts { tau, cost })
    }

    /// Uniform finite cost on every off-diagonal edge.
    pub fn uniform(tau: usize, price: Int) -> Self {
        let mut cost = vec![Price::Finite(price); tau * tau];
        for i in 0..tau {
            cost[i * tau + i] = Price::Finite(0);
        }
        MoveCosts { tau, cost }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn get(&self, i: usize, j: usize) -> Price {
        self.cost[i * self.tau + j]
    }

    pub fn set(&mut self, i: usize, j: usize, price: Price) {
        self.cost[i * self.tau + j] = price;
    }

    pub fn max_finite(&self) -> Int {
        self.cost.iter().filter_map(|c| c.finite()).max().unwrap_or(0)
    }
}

/// The change associated with a move: Δ_i = Σ_j (m_{j,i} − m_{i,j}).
pub fn change_of(m: &Move) -> Change {
    let tau = m.tau();
    let mut delta = vec![0; tau];
    for i in 0..tau {
        for j in 0..tau {
            let f = m.get(i, j);
            delta[i] -= f;
            delta[j] += f;
        }
    }
    Change(delta)
}

/// True iff applying the change keeps every count non-negative.
pub fn is_feasible(s: &Society, d: &Change) -> Result<bool> {
    if s.tau() != d.0.len() {
        return Err(Error::DimensionMismatch { expected: s.tau(), got: d.0.len() });
    }
    Ok(s.0.iter().zip(d.0.iter()).all(|(&c, &x)| c + x >= 0))
}

/// Society after a feasible move, or `None` when some count would go negative.
pub fn apply(s: &Society, m: &Move) -> Option<Society> {
    let d = change_of(m);
    match is_feasible(s, &d) {
        Ok(true) => Some(Society(
            s.0.iter().zip(d.0.iter()).map(|(&c, &x)| c + x).collect(),
        )),
        _ => None,
    }
}

/// Total price of a move: Σ c_{i,j}·m_{i,j}, +∞ if any flow uses a +∞ edge.
pub fn move_cost(c: &MoveCosts, m: &Move) -> Result<Price> {
    if c.tau() != m.tau() {
        return Err(Error::DimensionMismatch { expected: c.tau(), got: m.tau() });
    }
    let mut total: Int = 0;
    for i in 0..m.tau() {
        for j in 0..m.tau() {
            let f = m.get(i, j);
            if f == 0 {
                continue;
            }
            match c.get(i, j) {
                Price::Finite(p) => total += p * f,
                Price::Infinite => return Ok(Price::Infinite),
            }
        }
    }
    Ok(Price::Finite(total))
}

/// Checks the triangle inequality; `Err(Ok(..))`-free API: returns the first
/// violating triple, or `None` when the matrix is metric.
pub fn triangle_violation(c: &MoveCosts) -> Option<(usize, usize, usize)> {
    let tau = c.tau();
    for i in 0..tau {
        for j in 0..tau {
            for k in 0..tau {
                if i == j || j == k || i == k {
                    continue;
                }
                let direct = c.get(i, k);
                let via = c.get(i, j).saturating_add(c.get(j, k));
                if direct > via {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// True iff the triangle inequality holds for all triples.
pub fn validate_costs(c: &MoveCosts) -> bool {
    triangle_violation(c).is_none()
}

/// How the society is referenced inside emitted constraints: fixed counts, or
/// symbolic variables (one per type).
pub enum SocietyRef<'a> {
    Consts(&'a Society),
    Vars(&'a [String]),
}

/// Canonical name of the i-th society variable.
pub fn society_var(i: usize) -> String {
    format!("s_{i}")
}

/// The canonical society variable block `s_0 .. s_{tau-1}`.
pub fn society_vars(tau: usize) -> Vec<String> {
    (0..tau).map(society_var).collect()
}

/// Affine substitution map rewriting each society variable to its value
/// after the move named from `prefix`: s_i ↦ s_i + Σ_j (m_{j,i} − m_{i,j}).
pub fn shift_by_move(svars: &[String], prefix: &str) -> BTreeMap<String, crate::pa::AffineExpr> {
    let tau = svars.len();
    let mut map = BTreeMap::new();
    for (i, sv) in svars.iter().enumerate() {
        let mut terms = vec![(sv.clone(), 1)];
        for j in 0..tau {
            if i == j {
                continue;
            }
            terms.push((move_var(prefix, j, i), 1));
            terms.push((move_var(prefix, i, j), -1));
        }
        map.insert(sv.clone(), crate::pa::AffineExpr { terms, constant: 0 });
    }
    map
}

/// Name of the flow variable for edge (i,j) under a prefix.
pub fn move_var(prefix: &str, i: usize, j: usize) -> String {
    format!("{prefix}_{i}_{j}")
}

/// The full τ² flow-variable block for a prefix, row-major.
pub fn move_var_block(prefix: &str, tau: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(tau * tau);
    for i in 0..tau {
        for j in 0..tau {
            out.push(move_var(prefix, i, j));
        }
    }
    out
}

/// Emits the conjunction making the τ² variables named from `prefix` a
/// feasible (c, k)-move:
///
/// - every flow ≥ 0, diagonal flows pinned to 0;
/// - +∞ edges pinned to 0 (so the cost row has only finite coefficients);
/// - Σ c_{i,j}·m_{i,j} ≤ k over finite off-diagonal edges;
/// - per type: s_i + Σ_j (m_{j,i} − m_{i,j}) ≥ 0, with s either constants or
///   symbolic society variables.
pub fn build_move_constraints_over(
    c: &MoveCosts,
    k: Int,
    s: SocietyRef<'_>,
    prefix: &str,
) -> Result<PaFormula> {
    if k < 0 {
        return Err(Error::invalid("move budget must be non-negative"));
    }
    let tau = c.tau();
    match &s {
        SocietyRef::Consts(soc) if soc.tau() != tau => {
            return Err(Error::DimensionMismatch { expected: tau, got: soc.tau() });
        }
        SocietyRef::Vars(vars) if vars.len() != tau => {
            return Err(Error::DimensionMismatch { expected: tau, got: vars.len() });
        }
        _ => {}
    }

    let mut parts: Vec<PaFormula> = Vec::new();
    for i in 0..tau {
        for j in 0..tau {
            let v = move_var(prefix, i, j);
            parts.push(PaFormula::Atom(LinearAtom::single(v.clone(), -1, 0)));
            if i == j || c.get(i, j).is_infinite() {
                parts.push(PaFormula::Atom(LinearAtom::single(v, 1, 0)));
            }
        }
    }

    let mut cost_terms: Vec<(String, Int)> = Vec::new();
    for i in 0..tau {
        for j in 0..tau {
            if i == j {
                continue;
            }
            if let Price::Finite(p) = c.get(i, j) {
                if p != 0 {
                    cost_terms.push((move_var(prefix, i, j), p));
                }
            }
        }
    }
    parts.push(PaFormula::Atom(LinearAtom::new(cost_terms, k)));

    for i in 0..tau {
        // s_i + Σ_j (m_{j,i} − m_{i,j}) ≥ 0  ⇔  Σ_j (m_{i,j} − m_{j,i}) − s_i ≤ 0
        let mut terms: Vec<(String, Int)> = Vec::new();
        for j in 0..tau {
            if i == j {
                continue;
            }
            terms.push((move_var(prefix, i, j), 1));
            terms.push((move_var(prefix, j, i), -1));
        }
        let atom = match &s {
            SocietyRef::Consts(soc) => LinearAtom::new(terms, soc.count(i)),
            SocietyRef::Vars(vars) => {
                terms.push((vars[i].clone(), -1));
                LinearAtom::new(terms, 0)
            }
        };
        parts.push(PaFormula::Atom(atom));
    }
    Ok(PaFormula::And(parts))
}

/// [`build_move_constraints_over`] with the society as fixed counts.
pub fn build_move_constraints(
    c: &MoveCosts,
    k: Int,
    s: &Society,
    prefix: &str,
) -> Result<PaFormula> {
    build_move_constraints_over(c, k, SocietyRef::Consts(s), prefix)
}

/// Reads a move out of an assignment over `move_var(prefix, i, j)` names.
/// Missing variables count as zero flow.
pub fn move_from_assignment(a: &Assignment, prefix: &str, tau: usize) -> Result<Move> {
    let mut flows = Vec::new();
    for i in 0..tau {
        for j in 0..tau {
            let v = move_var(prefix, i, j);
            let f = a.get(&v).unwrap_or(0);
            if f < 0 {
                return Err(Error::invalid(format!("negative flow in witness at {v}")));
            }
            if f != 0 && i != j {
                flows.push((i, j, f));
            }
        }
    }
    Move::from_flows(tau, &flows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa::eval_qf;

    #[test]
    fn change_of_single_flow() {
        let m = Move::from_flows(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(change_of(&m).delta(), &[-1, 1]);
        assert_eq!(change_of(&Move::zero(2)).delta(), &[0, 0]);
        let m = Move::from_flows(2, &[(0, 1, 2), (1, 0, 3)]).unwrap();
        assert_eq!(change_of(&m).delta(), &[1, -1]);
    }

    #[test]
    fn change_is_linear() {
        let m1 = Move::from_flows(3, &[(0, 1, 2), (2, 0, 1)]).unwrap();
        let m2 = Move::from_flows(3, &[(1, 2, 4), (0, 1, 1)]).unwrap();
        let mut sum = Move::zero(3);
        for (i, j, f) in m1.flows().into_iter().chain(m2.flows()) {
            sum.flow[i * 3 + j] += f;
        }
        let d1 = change_of(&m1);
        let d2 = change_of(&m2);
        let ds = change_of(&sum);
        for i in 0..3 {
            assert_eq!(ds.delta()[i], d1.delta()[i] + d2.delta()[i]);
        }
    }

    #[test]
    fn feasibility() {
        let s = Society::new(vec![1, 0]).unwrap();
        assert!(is_feasible(&s, &Change::new(vec![-1, 1]).unwrap()).unwrap());
        let s = Society::new(vec![0, 1]).unwrap();
        assert!(!is_feasible(&s, &Change::new(vec![-1, 1]).unwrap()).unwrap());
        let s = Society::new(vec![3, 3]).unwrap();
        assert!(is_feasible(&s, &Change::new(vec![0, 0]).unwrap()).unwrap());
    }

    #[test]
    fn applying_a_feasible_move_yields_a_society() {
        let s = Society::new(vec![2, 1]).unwrap();
        let m = Move::from_flows(2, &[(0, 1, 2)]).unwrap();
        assert_eq!(apply(&s, &m).unwrap().counts(), &[0, 3]);
        let m = Move::from_flows(2, &[(1, 0, 2)]).unwrap();
        assert!(apply(&s, &m).is_none());
    }

    #[test]
    fn move_cost_basics() {
        let c = MoveCosts::uniform(2, 1);
        let m = Move::from_flows(2, &[(0, 1, 3)]).unwrap();
        assert_eq!(move_cost(&c, &m).unwrap(), Price::Finite(3));
        assert_eq!(move_cost(&c, &Move::zero(2)).unwrap(), Price::Finite(0));
        let mut c = MoveCosts::uniform(2, 1);
        c.set(0, 1, Price::Infinite);
        let m = Move::from_flows(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(move_cost(&c, &m).unwrap(), Price::Infinite);
    }

    #[test]
    fn triangle_checks() {
        assert!(validate_costs(&MoveCosts::uniform(3, 1)));
        let mut c = MoveCosts::uniform(3, 1);
        c.set(0, 2, Price::Finite(5));
        assert_eq!(triangle_violation(&c), Some((0, 1, 2)));
    }

    /// Satisfying assignments of the emitted constraints are exactly the
    /// feasible (c,k)-moves: s = (2,1), uniform costs, k = 1 admits just the
    /// zero move and the two single-person flows.
    #[test]
    fn move_constraint_assignments_biject_with_moves() {
        let s = Society::new(vec![2, 1]).unwrap();
        let c = MoveCosts::uniform(2, 1);
        let f = build_move_constraints(&c, 1, &s, "m").unwrap();
        let mut satisfying = Vec::new();
        for m00 in 0..=3 {
            for m01 in 0..=3 {
                for m10 in 0..=3 {
                    for m11 in 0..=3 {
                        let a = Assignment::from_pairs([
                            ("m_0_0".to_string(), m00),
                            ("m_0_1".to_string(), m01),
                            ("m_1_0".to_string(), m10),
                            ("m_1_1".to_string(), m11),
                        ]);
                        if eval_qf(&f, &a).unwrap() {
                            satisfying.push((m00, m01, m10, m11));
                        }
                    }
                }
            }
        }
        assert_eq!(satisfying, vec![(0, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0)]);
    }

    #[test]
    fn zero_budget_forces_zero_move() {
        let s = Society::new(vec![1, 1]).unwrap();
        let c = MoveCosts::uniform(2, 1);
        let f = build_move_constraints(&c, 0, &s, "m").unwrap();
        let a = Assignment::from_pairs([
            ("m_0_0".to_string(), 0),
            ("m_0_1".to_string(), 1),
            ("m_1_0".to_string(), 0),
            ("m_1_1".to_string(), 0),
        ]);
        assert!(!eval_qf(&f, &a).unwrap());
    }

    #[test]
    fn infinite_edges_are_pinned_to_zero() {
        let s = Society::new(vec![1, 1]).unwrap();
        let mut c = MoveCosts::uniform(2, 1);
        c.set(0, 1, Price::Infinite);
        let f = build_move_constraints(&c, 5, &s, "m").unwrap();
        let mk = |m01: Int| {
            Assignment::from_pairs([
                ("m_0_0".to_string(), 0),
                ("m_0_1".to_string(), m01),
                ("m_1_0".to_string(), 0),
                ("m_1_1".to_string(), 0),
            ])
        };
        assert!(eval_qf(&f, &mk(0)).unwrap());
        assert!(!eval_qf(&f, &mk(1)).unwrap());
    }

    #[test]
    fn rejects_negative_budget() {
        let s = Society::new(vec![1]).unwrap();
        let c = MoveCosts::uniform(1, 1);
        assert!(build_move_constraints(&c, -1, &s, "m").is_err());
    }
}
