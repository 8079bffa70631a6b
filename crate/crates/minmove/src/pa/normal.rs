//! Evaluation, negation-normal form, DNF conversion, parameter measurement
//! and substitution.

use super::{Assignment, FormulaParams, Int, LinearAtom, PaFormula, Quantifier};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// Truth value of a quantifier-free formula under integer semantics.
pub fn eval_qf(f: &PaFormula, a: &Assignment) -> Result<bool> {
    match f {
        PaFormula::Atom(atom) => atom.eval(a),
        PaFormula::And(parts) => {
            for p in parts {
                if !eval_qf(p, a)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        PaFormula::Or(parts) => {
            for p in parts {
                if eval_qf(p, a)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        PaFormula::Not(g) => Ok(!eval_qf(g, a)?),
        PaFormula::Exists(..) | PaFormula::Forall(..) => Err(Error::NotQuantifierFree),
    }
}

/// Negation-free formula equivalent to `¬f`. Atom negation is the integer
/// complement `¬(a·x ≤ b) ≡ (−a)·x ≤ −b−1`; quantifiers dualize.
pub fn negate_nnf(f: &PaFormula) -> PaFormula {
    match f {
        PaFormula::Atom(a) => PaFormula::Atom(a.complement()),
        PaFormula::And(parts) => PaFormula::Or(parts.iter().map(negate_nnf).collect()),
        PaFormula::Or(parts) => PaFormula::And(parts.iter().map(negate_nnf).collect()),
        PaFormula::Not(g) => nnf(g),
        PaFormula::Exists(vars, body) => PaFormula::forall(vars.clone(), negate_nnf(body)),
        PaFormula::Forall(vars, body) => PaFormula::exists(vars.clone(), negate_nnf(body)),
    }
}

/// Pushes negations down to atoms without changing the truth value.
pub fn nnf(f: &PaFormula) -> PaFormula {
    match f {
        PaFormula::Atom(_) => f.clone(),
        PaFormula::And(parts) => PaFormula::And(parts.iter().map(nnf).collect()),
        PaFormula::Or(parts) => PaFormula::Or(parts.iter().map(nnf).collect()),
        PaFormula::Not(g) => negate_nnf(g),
        PaFormula::Exists(vars, body) => PaFormula::exists(vars.clone(), nnf(body)),
        PaFormula::Forall(vars, body) => PaFormula::forall(vars.clone(), nnf(body)),
    }
}

/// A conjunction of atoms: one disjunct of a DNF.
pub type Conjunction = Vec<LinearAtom>;

/// Exact DNF of a quantifier-free formula by distribution after NNF
/// push-down, with syntactic deduplication of identical disjuncts.
///
/// The empty disjunction (`vec![]`) is identically false; a disjunct with no
/// atoms is identically true.
pub fn to_dnf(f: &PaFormula) -> Result<Vec<Conjunction>> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    let g = nnf(f);
    let raw = dnf_rec(&g);
    // Dedupe disjuncts; also drop duplicate atoms inside each disjunct.
    let mut seen: BTreeSet<Vec<LinearAtom>> = BTreeSet::new();
    let mut out = Vec::new();
    for disjunct in raw {
        let set: BTreeSet<LinearAtom> = disjunct.into_iter().collect();
        let key: Vec<LinearAtom> = set.into_iter().collect();
        if seen.insert(key.clone()) {
            out.push(key);
        }
    }
    Ok(out)
}

fn dnf_rec(f: &PaFormula) -> Vec<Conjunction> {
    match f {
        PaFormula::Atom(a) => vec![vec![a.clone()]],
        PaFormula::Or(parts) => parts.iter().flat_map(dnf_rec).collect(),
        PaFormula::And(parts) => {
            let mut acc: Vec<Conjunction> = vec![Vec::new()];
            for p in parts {
                let rhs = dnf_rec(p);
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for left in &acc {
                    for right in &rhs {
                        let mut merged = left.clone();
                        merged.extend(right.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        PaFormula::Not(_) | PaFormula::Exists(..) | PaFormula::Forall(..) => {
            unreachable!("dnf_rec runs after nnf on quantifier-free input")
        }
    }
}

/// Splits a prenex formula into its quantifier blocks (as written, without
/// merging adjacent same-quantifier blocks) and its quantifier-free matrix.
pub fn prenex_blocks(f: &PaFormula) -> Result<(Vec<(Quantifier, Vec<String>)>, PaFormula)> {
    let mut blocks: Vec<(Quantifier, Vec<String>)> = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            PaFormula::Exists(vars, body) => {
                blocks.push((Quantifier::Exists, vars.clone()));
                cur = body;
            }
            PaFormula::Forall(vars, body) => {
                blocks.push((Quantifier::Forall, vars.clone()));
                cur = body;
            }
            _ => break,
        }
    }
    if !cur.is_quantifier_free() {
        return Err(Error::NonPrenex);
    }
    Ok((blocks, cur.clone()))
}

/// Free variables: those occurring in an atom without being bound above it.
pub fn free_vars(f: &PaFormula) -> BTreeSet<String> {
    fn walk(f: &PaFormula, scope: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            PaFormula::Atom(a) => {
                for (v, _) in a.coeffs() {
                    if !scope.iter().any(|s| s == v) {
                        out.insert(v.to_string());
                    }
                }
            }
            PaFormula::And(parts) | PaFormula::Or(parts) => {
                for p in parts {
                    walk(p, scope, out);
                }
            }
            PaFormula::Not(g) => walk(g, scope, out),
            PaFormula::Exists(vars, g) | PaFormula::Forall(vars, g) => {
                let base = scope.len();
                scope.extend(vars.iter().cloned());
                walk(g, scope, out);
                scope.truncate(base);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

/// Measures a prenex formula: depth k, block dimensions (n_0 = free-variable
/// count), disjunction/conjunction counts of the matrix DNF, and the largest
/// coefficient/constant magnitudes over the DNF atoms.
pub fn measure(f: &PaFormula) -> Result<FormulaParams> {
    let (blocks, matrix) = prenex_blocks(f)?;
    let dnf = to_dnf(&matrix)?;
    let free = free_vars(f);
    let mut dims = Vec::with_capacity(blocks.len() + 1);
    dims.push(free.len());
    dims.extend(blocks.iter().map(|(_, vs)| vs.len()));

    let disjunctions = dnf.len();
    let conjunctions = dnf.iter().map(|d| d.len()).max().unwrap_or(0);
    let mut max_coeff: Int = 0;
    let mut max_const: Int = 0;
    for d in &dnf {
        for atom in d {
            max_coeff = max_coeff.max(atom.max_coeff_abs());
            max_const = max_const.max(atom.bound().abs());
        }
    }
    Ok(FormulaParams {
        depth: blocks.len(),
        dims,
        disjunctions,
        conjunctions,
        max_coeff,
        max_const,
    })
}

/// Fixes free variables to constants, folding them into atom bounds.
/// Binding a quantified variable is an error; unknown names are ignored
/// so a society-sized assignment can be applied to any disjunct.
pub fn substitute(f: &PaFormula, bindings: &Assignment) -> Result<PaFormula> {
    fn walk(f: &PaFormula, bindings: &Assignment) -> Result<PaFormula> {
        Ok(match f {
            PaFormula::Atom(a) => {
                let mut atom = a.clone();
                for (v, val) in bindings.iter() {
                    atom = atom.fix_var(v, val);
                }
                PaFormula::Atom(atom)
            }
            PaFormula::And(parts) => {
                PaFormula::And(parts.iter().map(|p| walk(p, bindings)).collect::<Result<_>>()?)
            }
            PaFormula::Or(parts) => {
                PaFormula::Or(parts.iter().map(|p| walk(p, bindings)).collect::<Result<_>>()?)
            }
            PaFormula::Not(g) => PaFormula::not(walk(g, bindings)?),
            PaFormula::Exists(vars, g) | PaFormula::Forall(vars, g) => {
                if let Some(v) = vars.iter().find(|v| bindings.contains(v)) {
                    return Err(Error::SubstituteBound(v.clone()));
                }
                let body = walk(g, bindings)?;
                if matches!(f, PaFormula::Exists(..)) {
                    PaFormula::exists(vars.clone(), body)
                } else {
                    PaFormula::forall(vars.clone(), body)
                }
            }
        })
    }
    walk(f, bindings)
}

/// An affine expression `Σ terms + constant` used as a substitution target.
#[derive(Debug, Clone, Default)]
pub struct AffineExpr {
    pub terms: Vec<(String, Int)>,
    pub constant: Int,
}

/// Replaces each mapped free variable by an affine expression over other
/// variables. Used to rewrite a condition over society variables into one
/// over `s + Δ(move)`. Quantified variables must not be mapped.
pub fn substitute_affine(f: &PaFormula, map: &BTreeMap<String, AffineExpr>) -> Result<PaFormula> {
    fn walk(f: &PaFormula, map: &BTreeMap<String, AffineExpr>) -> Result<PaFormula> {
        Ok(match f {
            PaFormula::Atom(a) => {
                let mut atom = a.clone();
                for (v, expr) in map {
                    atom = atom.replace_var_affine(v, &expr.terms, expr.constant);
                }
                PaFormula::Atom(atom)
            }
            PaFormula::And(parts) => {
                PaFormula::And(parts.iter().map(|p| walk(p, map)).collect::<Result<_>>()?)
            }
            PaFormula::Or(parts) => {
                PaFormula::Or(parts.iter().map(|p| walk(p, map)).collect::<Result<_>>()?)
            }
            PaFormula::Not(g) => PaFormula::not(walk(g, map)?),
            PaFormula::Exists(vars, g) | PaFormula::Forall(vars, g) => {
                if let Some(v) = vars.iter().find(|v| map.contains_key(*v)) {
                    return Err(Error::SubstituteBound(v.clone()));
                }
                let body = walk(g, map)?;
                if matches!(f, PaFormula::Exists(..)) {
                    PaFormula::exists(vars.clone(), body)
                } else {
                    PaFormula::forall(vars.clone(), body)
                }
            }
        })
    }
    walk(f, map)
}
