//! Conjunctive linear systems over bounded integer boxes: disjunction
//! flattening with indicator variables, and a branch-and-bound
//! feasibility/optimization solver with interval propagation.

use crate::error::{Error, Result};
use crate::pa::{Assignment, Int, LinearAtom};
use std::collections::BTreeMap;
use std::fmt;

/// Row relation. Rows are normalized to `≤` internally when solving, but the
/// constructed shape (one equality row, one `≥` row per indicator) is kept so
/// row counts match the flattening construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// One linear constraint with dense coefficients over the system's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Int>,
    pub rel: Rel,
    pub rhs: Int,
}

/// A conjunction `rows` over `vars`, each variable confined to
/// `[lower[j], upper[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    vars: Vec<String>,
    rows: Vec<Row>,
    lower: Vec<Int>,
    upper: Vec<Int>,
}

impl LinearSystem {
    pub fn new(vars: Vec<String>, lower: Vec<Int>, upper: Vec<Int>) -> Result<Self> {
        if vars.len() != lower.len() || vars.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: vars.len(), got: lower.len().min(upper.len()) });
        }
        for j in 0..vars.len() {
            if lower[j] > upper[j] {
                return Err(Error::invalid(format!(
                    "empty box for `{}`: [{}, {}]",
                    vars[j], lower[j], upper[j]
                )));
            }
        }
        Ok(LinearSystem { vars, rows: Vec::new(), lower, upper })
    }

    /// Uniform box `[-bound, bound]` on every variable.
    pub fn with_uniform_box(vars: Vec<String>, bound: Int) -> Result<Self> {
        let n = vars.len();
        LinearSystem::new(vars, vec![-bound; n], vec![bound; n])
    }

    /// Builds a `≤`-row system from atoms; every atom variable must be listed.
    pub fn from_atoms(
        vars: Vec<String>,
        atoms: &[LinearAtom],
        lower: Vec<Int>,
        upper: Vec<Int>,
    ) -> Result<Self> {
        let mut sys = LinearSystem::new(vars, lower, upper)?;
        for a in atoms {
            sys.push_atom(a)?;
        }
        Ok(sys)
    }

    pub fn push_atom(&mut self, atom: &LinearAtom) -> Result<()> {
        let mut coeffs = vec![0; self.vars.len()];
        for (v, c) in atom.coeffs() {
            let j = self
                .vars
                .iter()
                .position(|w| w == v)
                .ok_or_else(|| Error::UnboundVariable(v.to_string()))?;
            coeffs[j] = c;
        }
        self.rows.push(Row { coeffs, rel: Rel::Le, rhs: atom.bound() });
        Ok(())
    }

    pub fn push_row(&mut self, row: Row) -> Result<()> {
        if row.coeffs.len() != self.vars.len() {
            return Err(Error::DimensionMismatch { expected: self.vars.len(), got: row.coeffs.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn lower(&self) -> &[Int] {
        &self.lower
    }

    pub fn upper(&self) -> &[Int] {
        &self.upper
    }

    pub fn var_index(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Tightens one variable's box in place.
    pub fn clamp_var(&mut self, j: usize, lo: Int, hi: Int) -> Result<()> {
        let (new_lo, new_hi) = (self.lower[j].max(lo), self.upper[j].min(hi));
        if new_lo > new_hi {
            return Err(Error::invalid(format!("empty box for `{}`", self.vars[j])));
        }
        self.lower[j] = new_lo;
        self.upper[j] = new_hi;
        Ok(())
    }

    /// Largest coefficient magnitude over all rows.
    pub fn alpha(&self) -> Int {
        self.rows
            .iter()
            .flat_map(|r| r.coeffs.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Largest right-hand-side magnitude over all rows.
    pub fn beta(&self) -> Int {
        self.rows.iter().map(|r| r.rhs.abs()).max().unwrap_or(0)
    }

    /// Fixes a prefix-subset of variables to values, producing a system over
    /// the remaining variables with adjusted right-hand sides.
    pub fn fix_vars(&self, fixed: &[(usize, Int)]) -> LinearSystem {
        let fixed_map: BTreeMap<usize, Int> = fixed.iter().copied().collect();
        let keep: Vec<usize> =
            (0..self.vars.len()).filter(|j| !fixed_map.contains_key(j)).collect();
        let vars = keep.iter().map(|&j| self.vars[j].clone()).collect();
        let lower = keep.iter().map(|&j| self.lower[j]).collect();
        let upper = keep.iter().map(|&j| self.upper[j]).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut rhs = r.rhs;
                for (&j, &v) in &fixed_map {
                    rhs -= r.coeffs[j] * v;
                }
                Row { coeffs: keep.iter().map(|&j| r.coeffs[j]).collect(), rel: r.rel, rhs }
            })
            .collect();
        LinearSystem { vars, rows, lower, upper }
    }

    /// All rows as `≤` constraints (Ge negated, Eq split into two).
    fn le_rows(&self) -> Vec<(Vec<Int>, Int)> {
        let mut out = Vec::with_capacity(self.rows.len() + 2);
        for r in &self.rows {
            match r.rel {
                Rel::Le => out.push((r.coeffs.clone(), r.rhs)),
                Rel::Ge => out.push((r.coeffs.iter().map(|c| -c).collect(), -r.rhs)),
                Rel::Eq => {
                    out.push((r.coeffs.clone(), r.rhs));
                    out.push((r.coeffs.iter().map(|c| -c).collect(), -r.rhs));
                }
            }
        }
        out
    }
}

impl fmt::Display for LinearSystem {
    /// Debug dump in the formula grammar syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in self.vars.iter().enumerate() {
            writeln!(f, "# {v} in [{}, {}]", self.lower[j], self.upper[j])?;
        }
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f, "and")?;
            }
            let mut first = true;
            for (j, &c) in r.coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                if first {
                    if c == 1 {
                        write!(f, "{}", self.vars[j])?;
                    } else if c == -1 {
                        write!(f, "-{}", self.vars[j])?;
                    } else {
                        write!(f, "{c}*{}", self.vars[j])?;
                    }
                    first = false;
                } else if c > 0 {
                    if c == 1 {
                        write!(f, " + {}", self.vars[j])?;
                    } else {
                        write!(f, " + {c}*{}", self.vars[j])?;
                    }
                } else if c == -1 {
                    write!(f, " - {}", self.vars[j])?;
                } else {
                    write!(f, " - {}*{}", -c, self.vars[j])?;
                }
            }
            if first {
                write!(f, "0")?;
            }
            let rel = match r.rel {
                Rel::Le => "<=",
                Rel::Ge => ">=",
                Rel::Eq => "=",
            };
            writeln!(f, " {rel} {}", r.rhs)?;
        }
        Ok(())
    }
}

/// A satisfying integer point, with the objective value when optimizing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSolution {
    pub point: Assignment,
    pub objective: Option<Int>,
}

/// Result of flattening a disjunction of systems into one system over the
/// original variables plus one indicator per disjunct.
#[derive(Debug, Clone)]
pub struct Flattened {
    pub system: LinearSystem,
    /// The uniform slack constant (largest per-row slack for the sound
    /// variant).
    pub big_m: Int,
    pub indicators: Vec<String>,
}

fn check_flatten_inputs(systems: &[LinearSystem]) -> Result<()> {
    if systems.is_empty() {
        return Err(Error::invalid("cannot flatten an empty disjunction"));
    }
    let first = &systems[0];
    for s in systems.iter().skip(1) {
        if s.vars != first.vars {
            return Err(Error::invalid("disjunction systems must share one variable list"));
        }
        if s.lower != first.lower || s.upper != first.upper {
            return Err(Error::invalid("disjunction systems must share one box"));
        }
    }
    for s in systems {
        if s.rows.iter().any(|r| r.rel != Rel::Le) {
            return Err(Error::invalid("flatten inputs must be conjunctions of <= rows"));
        }
    }
    Ok(())
}

fn build_flattened(
    systems: &[LinearSystem],
    prefix: &str,
    row_m: impl Fn(&Row) -> Int,
) -> Result<Flattened> {
    let base = &systems[0];
    let n = base.vars.len();
    let d = systems.len();
    let indicators: Vec<String> = (0..d).map(|i| format!("{prefix}{i}")).collect();
    for y in &indicators {
        if base.vars.contains(y) {
            return Err(Error::invalid(format!("variable `{y}` collides with an indicator name")));
        }
    }
    let mut vars = base.vars.clone();
    vars.extend(indicators.iter().cloned());
    let mut lower = base.lower.clone();
    let mut upper = base.upper.clone();
    lower.extend(std::iter::repeat(0).take(d));
    upper.extend(std::iter::repeat(1).take(d));
    let mut sys = LinearSystem::new(vars, lower, upper)?;

    // Σ y_i = 1
    let mut eq = vec![0; n + d];
    for j in 0..d {
        eq[n + j] = 1;
    }
    sys.push_row(Row { coeffs: eq, rel: Rel::Eq, rhs: 1 })?;
    // y_i ≥ 0
    for i in 0..d {
        let mut c = vec![0; n + d];
        c[n + i] = 1;
        sys.push_row(Row { coeffs: c, rel: Rel::Ge, rhs: 0 })?;
    }
    // A_i x + M·y_i ≤ b_i + M  (inactive when y_i = 0)
    let mut max_m = 0;
    for (i, s) in systems.iter().enumerate() {
        for r in &s.rows {
            let m = row_m(r);
            max_m = max_m.max(m);
            let mut coeffs = vec![0; n + d];
            coeffs[..n].copy_from_slice(&r.coeffs);
            coeffs[n + i] = m;
            sys.push_row(Row { coeffs, rel: Rel::Le, rhs: r.rhs + m })?;
        }
    }
    Ok(Flattened { system: sys, big_m: max_m, indicators })
}

/// Flattens a disjunction of B-small systems (coefficients and constants at
/// most `bound` in magnitude, solutions sought in the shared box) into one
/// system over `n + d` variables with `m·d + d + 1` rows, using the uniform
/// slack constant `M = bound²·n`.
///
/// With negative right-hand sides the uniform constant can undercut the slack
/// a deactivated row actually needs (by up to `bound`), losing feasible
/// points; [`flatten_disjunction_sound`] computes exact per-row slacks.
pub fn flatten_disjunction(systems: &[LinearSystem], bound: Int) -> Result<Flattened> {
    check_flatten_inputs(systems)?;
    let n = systems[0].vars.len() as Int;
    for s in systems {
        if s.alpha() > bound || s.beta() > bound {
            return Err(Error::invalid(format!(
                "system is not {bound}-small: alpha={}, beta={}",
                s.alpha(),
                s.beta()
            )));
        }
    }
    let m = bound * bound * n;
    let flat = build_flattened(systems, "_sel", |_| m)?;
    Ok(Flattened { big_m: m, ..flat })
}

/// Flattens a disjunction with exact per-row slacks: each deactivated row
/// `a·x ≤ b` is relaxed by `M_r = max(0, max_{x ∈ box}(a·x) − b)`, so the
/// flattened system's feasible points project exactly onto the union of the
/// inputs' feasible points for arbitrary coefficients and right-hand sides.
pub fn flatten_disjunction_sound(systems: &[LinearSystem]) -> Result<Flattened> {
    flatten_sound_prefixed(systems, "_sel")
}

/// As [`flatten_disjunction_sound`] with caller-chosen indicator names, so
/// several flattened systems can be stacked into one conjunction.
pub fn flatten_sound_prefixed(systems: &[LinearSystem], prefix: &str) -> Result<Flattened> {
    check_flatten_inputs(systems)?;
    let base = &systems[0];
    let lower = base.lower.clone();
    let upper = base.upper.clone();
    build_flattened(systems, prefix, |r| {
        let maxact: Int = r
            .coeffs
            .iter()
            .zip(lower.iter().zip(upper.iter()))
            .map(|(&c, (&lo, &hi))| (c * lo).max(c * hi))
            .sum();
        (maxact - r.rhs).max(0)
    })
}

fn floor_div(a: Int, b: Int) -> Int {
    debug_assert!(b != 0);
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: Int, b: Int) -> Int {
    -floor_div(-a, b)
}

/// Interval propagation to a fixpoint. Returns false on proven infeasibility.
fn propagate(rows: &[(Vec<Int>, Int)], lo: &mut [Int], hi: &mut [Int]) -> bool {
    loop {
        let mut changed = false;
        for (coeffs, rhs) in rows {
            let mut minact: Int = 0;
            for (j, &c) in coeffs.iter().enumerate() {
                if c > 0 {
                    minact += c * lo[j];
                } else if c < 0 {
                    minact += c * hi[j];
                }
            }
            if minact > *rhs {
                return false;
            }
            for (j, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let own_min = if c > 0 { c * lo[j] } else { c * hi[j] };
                let rest = minact - own_min;
                let budget = *rhs - rest;
                if c > 0 {
                    let limit = floor_div(budget, c);
                    if limit < hi[j] {
                        hi[j] = limit;
                        changed = true;
                        if lo[j] > hi[j] {
                            return false;
                        }
                    }
                } else {
                    let limit = ceil_div(budget, c);
                    if limit > lo[j] {
                        lo[j] = limit;
                        changed = true;
                        if lo[j] > hi[j] {
                            return false;
                        }
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn first_unfixed(lo: &[Int], hi: &[Int]) -> Option<usize> {
    (0..lo.len()).find(|&j| lo[j] < hi[j])
}

/// Depth-first search, lowest-index variable first, lower half first.
/// The first complete assignment found is the lexicographically least
/// feasible point.
fn search_feasible(rows: &[(Vec<Int>, Int)], lo: &mut Vec<Int>, hi: &mut Vec<Int>) -> Option<Vec<Int>> {
    if !propagate(rows, lo, hi) {
        return None;
    }
    let Some(j) = first_unfixed(lo, hi) else {
        return Some(lo.clone());
    };
    let mid = lo[j] + (hi[j] - lo[j]) / 2;
    {
        let mut l = lo.clone();
        let mut h = hi.clone();
        h[j] = mid;
        if let Some(sol) = search_feasible(rows, &mut l, &mut h) {
            return Some(sol);
        }
    }
    let mut l = lo.clone();
    let mut h = hi.clone();
    l[j] = mid + 1;
    search_feasible(rows, &mut l, &mut h)
}

/// Finds a satisfying integer point inside the box, or `None`.
///
/// Deterministic: returns the lexicographically least feasible point in
/// variable order.
pub fn solve_feasible(sys: &LinearSystem) -> Result<Option<IlpSolution>> {
    let rows = sys.le_rows();
    let mut lo = sys.lower.clone();
    let mut hi = sys.upper.clone();
    Ok(search_feasible(&rows, &mut lo, &mut hi).map(|point| IlpSolution {
        point: sys
            .vars
            .iter()
            .cloned()
            .zip(point.iter().copied())
            .collect(),
        objective: None,
    }))
}

fn objective_vec(objective: &BTreeMap<String, Int>, sys: &LinearSystem) -> Result<Vec<Int>> {
    let mut c = vec![0; sys.vars.len()];
    for (v, k) in objective {
        let j = sys
            .var_index(v)
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        c[j] = *k;
    }
    Ok(c)
}

fn best_value(
    rows: &[(Vec<Int>, Int)],
    obj: &[Int],
    lo: &mut Vec<Int>,
    hi: &mut Vec<Int>,
    best: &mut Option<Int>,
) {
    if !propagate(rows, lo, hi) {
        return;
    }
    let obj_lb: Int = obj
        .iter()
        .enumerate()
        .map(|(j, &c)| if c > 0 { c * lo[j] } else { c * hi[j] })
        .sum();
    if let Some(b) = *best {
        if obj_lb >= b {
            return;
        }
    }
    let Some(j) = first_unfixed(lo, hi) else {
        let val: Int = obj.iter().enumerate().map(|(j, &c)| c * lo[j]).sum();
        *best = Some(match *best {
            Some(b) => b.min(val),
            None => val,
        });
        return;
    };
    let mid = lo[j] + (hi[j] - lo[j]) / 2;
    {
        let mut l = lo.clone();
        let mut h = hi.clone();
        h[j] = mid;
        best_value(rows, obj, &mut l, &mut h, best);
    }
    let mut l = lo.clone();
    let mut h = hi.clone();
    l[j] = mid + 1;
    best_value(rows, obj, &mut l, &mut h, best);
}

/// Minimizes a linear objective over the system's feasible points.
///
/// Ties are broken by the lexicographically smallest point in variable order.
pub fn solve_min(
    objective: &BTreeMap<String, Int>,
    sys: &LinearSystem,
) -> Result<Option<IlpSolution>> {
    let obj = objective_vec(objective, sys)?;
    let rows = sys.le_rows();
    let mut best = None;
    best_value(&rows, &obj, &mut sys.lower.clone(), &mut sys.upper.clone(), &mut best);
    let Some(v) = best else {
        return Ok(None);
    };
    // Re-solve for the lexicographically least point at the optimal value.
    let mut rows_opt = rows;
    rows_opt.push((obj.clone(), v));
    let point = search_feasible(&rows_opt, &mut sys.lower.clone(), &mut sys.upper.clone())
        .expect("optimal value must stay feasible");
    Ok(Some(IlpSolution {
        point: sys.vars.iter().cloned().zip(point.iter().copied()).collect(),
        objective: Some(v),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys1(rows: &[(&[Int], Int)], lo: Int, hi: Int, nvars: usize) -> LinearSystem {
        let vars: Vec<String> = (0..nvars).map(|j| format!("x{j}")).collect();
        let mut s = LinearSystem::new(vars, vec![lo; nvars], vec![hi; nvars]).unwrap();
        for (c, b) in rows {
            s.push_row(Row { coeffs: c.to_vec(), rel: Rel::Le, rhs: *b }).unwrap();
        }
        s
    }

    #[test]
    fn feasible_point_found() {
        // x ≤ 0 ∧ −x ≤ 0 in [−5,5] → x = 0
        let s = sys1(&[(&[1], 0), (&[-1], 0)], -5, 5, 1);
        let sol = solve_feasible(&s).unwrap().unwrap();
        assert_eq!(sol.point.get("x0"), Some(0));
    }

    #[test]
    fn infeasible_detected() {
        // x ≤ −1 ∧ −x ≤ −1 is empty
        let s = sys1(&[(&[1], -1), (&[-1], -1)], -5, 5, 1);
        assert!(solve_feasible(&s).unwrap().is_none());
    }

    #[test]
    fn minimization_with_box_only() {
        let s = sys1(&[], -5, 5, 1);
        let sol = solve_min(&BTreeMap::from([("x0".to_string(), 1)]), &s).unwrap().unwrap();
        assert_eq!(sol.objective, Some(-5));
        // min x s.t. −x ≤ 0 → 0
        let s = sys1(&[(&[-1], 0)], -5, 5, 1);
        let sol = solve_min(&BTreeMap::from([("x0".to_string(), 1)]), &s).unwrap().unwrap();
        assert_eq!(sol.objective, Some(0));
        assert_eq!(sol.point.get("x0"), Some(0));
    }

    #[test]
    fn lexicographic_tie_break() {
        // Minimize x0 + x1 with x0 + x1 ≥ 1 in [0,3]²: optimum 1, lex-least (0,1).
        let s = sys1(&[(&[-1, -1], -1)], 0, 3, 2);
        let obj = BTreeMap::from([("x0".to_string(), 1), ("x1".to_string(), 1)]);
        let sol = solve_min(&obj, &s).unwrap().unwrap();
        assert_eq!(sol.objective, Some(1));
        assert_eq!(sol.point.get("x0"), Some(0));
        assert_eq!(sol.point.get("x1"), Some(1));
    }

    #[test]
    fn flatten_shape_matches_construction() {
        // d=2, n=1, B=5, S1: {x ≤ 0}, S2: {−x ≤ −5}: M = 25,
        // rows {y1+y2=1, y1≥0, y2≥0, x+25y1≤25, −x+25y2≤20}, 5×3.
        let mut s1 = LinearSystem::with_uniform_box(vec!["x".into()], 5).unwrap();
        s1.push_row(Row { coeffs: vec![1], rel: Rel::Le, rhs: 0 }).unwrap();
        let mut s2 = LinearSystem::with_uniform_box(vec!["x".into()], 5).unwrap();
        s2.push_row(Row { coeffs: vec![-1], rel: Rel::Le, rhs: -5 }).unwrap();
        let flat = flatten_disjunction(&[s1, s2], 5).unwrap();
        assert_eq!(flat.big_m, 25);
        assert_eq!(flat.system.vars().len(), 3);
        assert_eq!(flat.system.rows().len(), 5);
        assert_eq!(flat.system.rows()[0], Row { coeffs: vec![0, 1, 1], rel: Rel::Eq, rhs: 1 });
        assert_eq!(flat.system.rows()[1], Row { coeffs: vec![0, 1, 0], rel: Rel::Ge, rhs: 0 });
        assert_eq!(flat.system.rows()[3], Row { coeffs: vec![1, 25, 0], rel: Rel::Le, rhs: 25 });
        assert_eq!(flat.system.rows()[4], Row { coeffs: vec![-1, 0, 25], rel: Rel::Le, rhs: 20 });
    }

    #[test]
    fn flatten_single_system_forces_indicator() {
        let mut s1 = LinearSystem::with_uniform_box(vec!["x".into()], 3).unwrap();
        s1.push_row(Row { coeffs: vec![1], rel: Rel::Le, rhs: -1 }).unwrap();
        let flat = flatten_disjunction(&[s1.clone()], 3).unwrap();
        let sol = solve_feasible(&flat.system).unwrap().unwrap();
        assert_eq!(sol.point.get("_sel0"), Some(1));
        assert!(sol.point.get("x").unwrap() <= -1);
        // Output feasible iff input feasible.
        assert_eq!(
            solve_feasible(&flat.system).unwrap().is_some(),
            solve_feasible(&s1).unwrap().is_some()
        );
    }

    #[test]
    fn flatten_rejects_mismatched_vars_and_large_systems() {
        let s1 = LinearSystem::with_uniform_box(vec!["x".into()], 3).unwrap();
        let s2 = LinearSystem::with_uniform_box(vec!["y".into()], 3).unwrap();
        assert!(flatten_disjunction(&[s1.clone(), s2], 3).is_err());
        let mut s3 = LinearSystem::with_uniform_box(vec!["x".into()], 3).unwrap();
        s3.push_row(Row { coeffs: vec![9], rel: Rel::Le, rhs: 0 }).unwrap();
        assert!(flatten_disjunction(&[s1, s3], 3).is_err());
    }

    /// Exhaustive projection check: the sound flattening preserves the union
    /// exactly, including the negative right-hand sides where the uniform
    /// `B²·n` constant falls short.
    #[test]
    fn sound_flatten_projection_equals_union() {
        // B=2, n=1: S1 = {x ≤ 2}, S2 = {−2x ≤ −1}. The uniform constant
        // (M = 4) drops x = −2 from the projection; the sound variant keeps it.
        let mut s1 = LinearSystem::with_uniform_box(vec!["x".into()], 2).unwrap();
        s1.push_row(Row { coeffs: vec![1], rel: Rel::Le, rhs: 2 }).unwrap();
        let mut s2 = LinearSystem::with_uniform_box(vec!["x".into()], 2).unwrap();
        s2.push_row(Row { coeffs: vec![-2], rel: Rel::Le, rhs: -1 }).unwrap();
        let systems = [s1, s2];

        let union: Vec<Int> = (-2..=2)
            .filter(|&x| x <= 2 || -2 * x <= -1)
            .collect();
        assert_eq!(union, vec![-2, -1, 0, 1, 2]);

        let project = |flat: &Flattened| -> Vec<Int> {
            (-2..=2)
                .filter(|&x| {
                    let sub = flat.system.fix_vars(&[(0, x)]);
                    solve_feasible(&sub).unwrap().is_some()
                })
                .collect()
        };

        let sound = flatten_disjunction_sound(&systems).unwrap();
        assert_eq!(project(&sound), union);

        let uniform = flatten_disjunction(&systems, 2).unwrap();
        assert_eq!(uniform.big_m, 4);
        assert_eq!(project(&uniform), vec![-1, 0, 1, 2]);
    }

    #[test]
    fn uniform_flatten_projection_exact_for_nonnegative_rhs() {
        // With all right-hand sides ≥ 0 the uniform constant is sufficient.
        let build = |rows: &[(Vec<Int>, Int)]| {
            let mut s =
                LinearSystem::with_uniform_box(vec!["x".into(), "y".into()], 2).unwrap();
            for (c, b) in rows {
                s.push_row(Row { coeffs: c.clone(), rel: Rel::Le, rhs: *b }).unwrap();
            }
            s
        };
        let s1 = build(&[(vec![1, 1], 0), (vec![-1, 0], 2)]);
        let s2 = build(&[(vec![2, -1], 1)]);
        let flat = flatten_disjunction(&[s1.clone(), s2.clone()], 2).unwrap();
        for x in -2..=2 {
            for y in -2..=2 {
                let in_union = (x + y <= 0 && -x <= 2) || (2 * x - y <= 1);
                let sub = flat.system.fix_vars(&[(0, x), (1, y)]);
                let in_proj = solve_feasible(&sub).unwrap().is_some();
                assert_eq!(in_union, in_proj, "mismatch at ({x},{y})");
            }
        }
    }

    #[test]
    fn enlarging_box_keeps_feasibility() {
        let mut s = sys1(&[(&[1, -2], 1)], -2, 2, 2);
        s.push_row(Row { coeffs: vec![1, 1], rel: Rel::Ge, rhs: 1 }).unwrap();
        assert!(solve_feasible(&s).unwrap().is_some());
        let bigger = LinearSystem {
            vars: s.vars.clone(),
            rows: s.rows.clone(),
            lower: vec![-10, -10],
            upper: vec![10, 10],
        };
        assert!(solve_feasible(&bigger).unwrap().is_some());
    }

    #[test]
    fn repeated_solves_identical() {
        let s = sys1(&[(&[1, 1, 1], 2), (&[-1, 2, -1], 1)], -3, 3, 3);
        let a = solve_feasible(&s).unwrap();
        let b = solve_feasible(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_uses_formula_syntax() {
        let mut s = sys1(&[(&[2, -1], 3)], -1, 1, 2);
        s.push_row(Row { coeffs: vec![1, 1], rel: Rel::Eq, rhs: 1 }).unwrap();
        let text = s.to_string();
        assert!(text.contains("2*x0 - x1 <= 3"));
        assert!(text.contains("x0 + x1 = 1"));
    }
}
