//! Presburger-arithmetic formulas over integers.
//!
//! Atoms are linear inequalities `a·x ≤ b` with integer coefficients; every
//! surface relation (`<`, `>`, `≥`, `=`) is normalized to one or two `≤`
//! atoms at construction time. Connectives are and/or/not plus block
//! quantifiers `exists x y : …` and `forall x y : …`.

mod normal;
mod parse;
mod print;

pub use normal::{
    eval_qf, free_vars, measure, negate_nnf, nnf, prenex_blocks, substitute, substitute_affine,
    to_dnf, AffineExpr, Conjunction,
};
pub use parse::parse_formula;
pub use print::print_formula;

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Integer scalar used throughout the crate.
pub type Int = i64;

/// A total or partial map from variable names to integer values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, Int>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Int)>,
        S: Into<String>,
    {
        Assignment(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn set(&mut self, var: impl Into<String>, value: Int) {
        self.0.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<Int> {
        self.0.get(var).copied()
    }

    /// Value of `var`, or an `UnboundVariable` error.
    pub fn require(&self, var: &str) -> Result<Int> {
        self.get(var).ok_or_else(|| Error::UnboundVariable(var.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Int)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.set(k, v);
        }
        out
    }
}

impl<S: Into<String>> FromIterator<(S, Int)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, Int)>>(iter: I) -> Self {
        Assignment::from_pairs(iter)
    }
}

/// A linear inequality `Σ coeffs[v]·v ≤ bound` over integer variables.
///
/// Zero coefficients are never stored; an atom with no variables is the
/// ground claim `0 ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearAtom {
    coeffs: BTreeMap<String, Int>,
    bound: Int,
}

impl LinearAtom {
    pub fn new<I, S>(terms: I, bound: Int) -> Self
    where
        I: IntoIterator<Item = (S, Int)>,
        S: Into<String>,
    {
        let mut coeffs: BTreeMap<String, Int> = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v.into()).or_insert(0) += c;
        }
        coeffs.retain(|_, c| *c != 0);
        LinearAtom { coeffs, bound }
    }

    /// Single-variable convenience constructor: `coeff·var ≤ bound`.
    pub fn single(var: impl Into<String>, coeff: Int, bound: Int) -> Self {
        LinearAtom::new([(var.into(), coeff)], bound)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&str, Int)> {
        self.coeffs.iter().map(|(v, c)| (v.as_str(), *c))
    }

    pub fn coeff(&self, var: &str) -> Int {
        self.coeffs.get(var).copied().unwrap_or(0)
    }

    pub fn bound(&self) -> Int {
        self.bound
    }

    pub fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        let mut lhs: Int = 0;
        for (v, c) in &self.coeffs {
            lhs += c * a.require(v)?;
        }
        Ok(lhs <= self.bound)
    }

    /// Integer complement: `¬(a·x ≤ b)  ≡  (−a)·x ≤ −b−1`.
    pub fn complement(&self) -> LinearAtom {
        LinearAtom {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
            bound: -self.bound - 1,
        }
    }

    pub fn max_coeff_abs(&self) -> Int {
        self.coeffs.values().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Fix `var := value`, folding the contribution into the bound.
    pub(crate) fn fix_var(&self, var: &str, value: Int) -> LinearAtom {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(c) => {
                let mut coeffs = self.coeffs.clone();
                coeffs.remove(var);
                LinearAtom { coeffs, bound: self.bound - c * value }
            }
        }
    }

    /// Replace `var` by the affine expression `Σ terms + constant`.
    pub(crate) fn replace_var_affine(
        &self,
        var: &str,
        terms: &[(String, Int)],
        constant: Int,
    ) -> LinearAtom {
        match self.coeffs.get(var).copied() {
            None => self.clone(),
            Some(c) => {
                let mut coeffs = self.coeffs.clone();
                coeffs.remove(var);
                for (v, k) in terms {
                    let e = coeffs.entry(v.clone()).or_insert(0);
                    *e += c * k;
                }
                coeffs.retain(|_, c| *c != 0);
                LinearAtom { coeffs, bound: self.bound - c * constant }
            }
        }
    }
}

/// Quantifier kind for a prenex block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// Abstract syntax of a Presburger-arithmetic formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaFormula {
    Atom(LinearAtom),
    And(Vec<PaFormula>),
    Or(Vec<PaFormula>),
    Not(Box<PaFormula>),
    Exists(Vec<String>, Box<PaFormula>),
    Forall(Vec<String>, Box<PaFormula>),
}

impl PaFormula {
    pub fn atom(a: LinearAtom) -> Self {
        PaFormula::Atom(a)
    }

    /// The identically-true formula (empty conjunction).
    pub fn truth() -> Self {
        PaFormula::And(Vec::new())
    }

    /// The identically-false formula (empty disjunction).
    pub fn falsity() -> Self {
        PaFormula::Or(Vec::new())
    }

    pub fn and(parts: Vec<PaFormula>) -> Self {
        PaFormula::And(parts)
    }

    pub fn or(parts: Vec<PaFormula>) -> Self {
        PaFormula::Or(parts)
    }

    pub fn not(f: PaFormula) -> Self {
        PaFormula::Not(Box::new(f))
    }

    pub fn exists(vars: Vec<String>, body: PaFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PaFormula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<String>, body: PaFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PaFormula::Forall(vars, Box::new(body))
        }
    }

    /// Build a prenex formula from quantifier blocks and a matrix.
    pub fn from_blocks(blocks: &[(Quantifier, Vec<String>)], matrix: PaFormula) -> PaFormula {
        let mut f = matrix;
        for (q, vars) in blocks.iter().rev() {
            f = match q {
                Quantifier::Exists => PaFormula::exists(vars.clone(), f),
                Quantifier::Forall => PaFormula::forall(vars.clone(), f),
            };
        }
        f
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            PaFormula::Atom(_) => true,
            PaFormula::And(parts) | PaFormula::Or(parts) => {
                parts.iter().all(|p| p.is_quantifier_free())
            }
            PaFormula::Not(f) => f.is_quantifier_free(),
            PaFormula::Exists(..) | PaFormula::Forall(..) => false,
        }
    }

    /// Every variable occurring in the formula, bound or free.
    pub fn all_vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            PaFormula::Atom(a) => out.extend(a.coeffs.keys().cloned()),
            PaFormula::And(parts) | PaFormula::Or(parts) => {
                for p in parts {
                    p.collect_vars(out);
                }
            }
            PaFormula::Not(f) => f.collect_vars(out),
            PaFormula::Exists(vars, f) | PaFormula::Forall(vars, f) => {
                out.extend(vars.iter().cloned());
                f.collect_vars(out);
            }
        }
    }

    /// Checks that no variable is bound twice on any root-to-leaf path and
    /// that quantifier blocks have distinct names.
    pub fn validate_bindings(&self) -> Result<()> {
        fn walk(f: &PaFormula, scope: &mut Vec<String>) -> Result<()> {
            match f {
                PaFormula::Atom(_) => Ok(()),
                PaFormula::And(parts) | PaFormula::Or(parts) => {
                    for p in parts {
                        walk(p, scope)?;
                    }
                    Ok(())
                }
                PaFormula::Not(g) => walk(g, scope),
                PaFormula::Exists(vars, g) | PaFormula::Forall(vars, g) => {
                    for (i, v) in vars.iter().enumerate() {
                        if vars[..i].contains(v) || scope.contains(v) {
                            return Err(Error::DuplicateBinding(v.clone()));
                        }
                    }
                    let base = scope.len();
                    scope.extend(vars.iter().cloned());
                    let r = walk(g, scope);
                    scope.truncate(base);
                    r
                }
            }
        }
        walk(self, &mut Vec::new())
    }
}

/// Measured parameters of a prenex formula: quantifier depth, block dimension
/// vector, disjunction/conjunction counts of the matrix DNF, and the largest
/// coefficient/constant magnitudes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaParams {
    pub depth: usize,
    pub dims: Vec<usize>,
    pub disjunctions: usize,
    pub conjunctions: usize,
    pub max_coeff: Int,
    pub max_const: Int,
}
