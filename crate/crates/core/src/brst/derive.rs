//! Solving for a nilpotent current from a graded ansatz.
//!
//! The ansatz runs over the weight-1, ghost-1, odd monomials that survive
//! reduction modulo total derivatives and contain at least one antighost;
//! the antighost-free part is exactly the given leading terms. This removes
//! both the total-derivative freedom and the ghost redefinitions (such as
//! `c_T -> c_T + k c_W'`) that would otherwise leave whole families of
//! nilpotent currents. The nilpotency equations are quadratic in the unknowns and
//! are solved in rounds: every equation that is currently linear is
//! eliminated, the solution is substituted back, and the loop repeats. Within
//! a round the unknowns are ordered by antighost count, so terms with fewer
//! `b` factors are pivoted first.

use std::collections::{BTreeSet, HashSet};

use super::{nilpotency_of, BrstCurrent};
use crate::linalg::rref;
use crate::ope::{reduce_mod_derivatives, weight_basis, FieldExpr, FieldMonomial, OpeAlgebra, OpeEngine, OpeError, Parity};
use crate::scalar::{Rational, RationalFunction, Var};

#[derive(Clone, Debug, PartialEq)]
pub enum DeriveOutcome {
    /// The only nilpotent current with the requested leading terms.
    Unique(FieldExpr),
    /// Nilpotent for every value of the listed free coefficients.
    Underdetermined { current: FieldExpr, free: Vec<Var> },
    /// No linear equation is left but some equations are not yet satisfied.
    Stalled { current: FieldExpr, equations: Vec<RationalFunction> },
    /// A linear combination of the equations reduces to `0 = k` with `k != 0`.
    Inconsistent { current: FieldExpr, equation: RationalFunction },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeriveReport {
    /// Monomials carrying an unknown coefficient, with the variable used for it.
    pub unknowns: Vec<(FieldMonomial, Var)>,
    pub rounds: usize,
    pub outcome: DeriveOutcome,
}

impl DeriveReport {
    pub fn current(&self) -> &FieldExpr {
        match &self.outcome {
            DeriveOutcome::Unique(q) => q,
            DeriveOutcome::Underdetermined { current, .. }
            | DeriveOutcome::Stalled { current, .. }
            | DeriveOutcome::Inconsistent { current, .. } => current,
        }
    }

    pub fn unique(&self) -> Option<&FieldExpr> {
        match &self.outcome {
            DeriveOutcome::Unique(q) => Some(q),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self.outcome {
            DeriveOutcome::Unique(_) => "unique",
            DeriveOutcome::Underdetermined { .. } => "underdetermined",
            DeriveOutcome::Stalled { .. } => "stalled",
            DeriveOutcome::Inconsistent { .. } => "inconsistent",
        }
    }
}

fn antighosts(alg: &OpeAlgebra, m: &FieldMonomial) -> usize {
    m.factors().iter().filter(|f| alg.generator(f.gen as usize).ghost < 0).count()
}

fn unknown_var(i: usize) -> Var {
    Var::new(&format!("x{i}"))
}

/// Monomials of the slice that are their own normal form modulo `∂`.
fn complement(engine: &OpeEngine<'_>) -> Result<Vec<FieldMonomial>, OpeError> {
    let alg = engine.algebra();
    let one = Rational::from_integer(1.into());
    let mut out = Vec::new();
    for m in weight_basis(alg, &one, 1, Parity::Odd)? {
        let e = FieldExpr::monomial(m.clone());
        if reduce_mod_derivatives(engine, &e)?.residual == e {
            out.push(m);
        }
    }
    Ok(out)
}

/// Derives the nilpotent current whose antighost-free part is the sum of
/// `leading`, each with coefficient 1. `max_degree` restricts the ansatz to
/// monomials with at most that many generator factors.
pub fn derive_brst(
    alg: &OpeAlgebra,
    leading: &[FieldExpr],
    max_degree: Option<usize>,
) -> Result<DeriveReport, OpeError> {
    let engine = OpeEngine::new(alg);
    let mut pinned = FieldExpr::zero();
    for l in leading {
        pinned = pinned.add(l);
    }
    let pinned = reduce_mod_derivatives(&engine, &pinned)?.residual;
    let params: BTreeSet<Var> = alg.params().iter().map(|p| Var::new(p)).collect();

    let mut free: Vec<FieldMonomial> = complement(&engine)?
        .into_iter()
        .filter(|m| antighosts(alg, m) > 0 && max_degree.is_none_or(|d| m.len() <= d))
        .collect();
    free.sort_by_key(|m| antighosts(alg, m));
    let mut next = 0;
    let unknowns: Vec<(FieldMonomial, Var)> = free
        .into_iter()
        .map(|m| {
            let mut v = unknown_var(next);
            while params.contains(&v) {
                next += 1;
                v = unknown_var(next);
            }
            next += 1;
            (m, v)
        })
        .collect();

    let mut ansatz = pinned.clone();
    for (m, v) in &unknowns {
        ansatz.add_term(m.clone(), &RationalFunction::var(*v));
    }
    let rep = nilpotency_of(alg, &ansatz)?;
    let mut eqs: Vec<RationalFunction> = rep.obstruction.terms().map(|(_, c)| c.clone()).collect();

    let mut open: Vec<Var> = unknowns.iter().map(|(_, v)| *v).collect();
    let mut rounds = 0;
    let outcome = loop {
        eqs.retain(|e| !e.is_zero());
        if eqs.is_empty() {
            break if open.is_empty() {
                DeriveOutcome::Unique(ansatz)
            } else {
                DeriveOutcome::Underdetermined { current: ansatz, free: open }
            };
        }
        rounds += 1;
        let set: HashSet<Var> = open.iter().copied().collect();
        let mut rows: Vec<Vec<RationalFunction>> = eqs.iter().filter_map(|e| linear_row(e, &open, &set)).collect();
        if rows.is_empty() {
            break DeriveOutcome::Stalled { current: ansatz, equations: eqs };
        }
        let n = open.len();
        let pivots = rref(&mut rows, n + 1);
        if let Some(r) = pivots.iter().position(|&p| p == n) {
            let equation = rows[r][n].clone();
            break DeriveOutcome::Inconsistent { current: ansatz, equation };
        }
        // x_p + Σ_free a_j x_j + k = 0
        let mut subs = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            let mut val = -&rows[r][n];
            for (j, a) in rows[r][..n].iter().enumerate() {
                if j != p && !a.is_zero() {
                    val = &val - &(a * &RationalFunction::var(open[j]));
                }
            }
            subs.push((open[p], val));
        }
        for (v, val) in &subs {
            ansatz = ansatz.try_map_coeffs(|c| c.substitute(*v, val))?;
            for e in eqs.iter_mut() {
                *e = e.substitute(*v, val)?;
            }
        }
        let solved: HashSet<Var> = subs.iter().map(|(v, _)| *v).collect();
        open.retain(|v| !solved.contains(v));
    };
    Ok(DeriveReport {
        unknowns,
        rounds,
        outcome,
    })
}

/// Coefficients of `eq = 0` as a linear equation in `open`, constant last, or
/// `None` when some monomial is of higher degree in the unknowns.
fn linear_row(eq: &RationalFunction, open: &[Var], set: &HashSet<Var>) -> Option<Vec<RationalFunction>> {
    let num = eq.numer();
    for (m, _) in num.terms() {
        let deg: u32 = m.factors().iter().filter(|(v, _)| set.contains(v)).map(|(_, e)| e).sum();
        if deg > 1 {
            return None;
        }
    }
    let mut row: Vec<RationalFunction> = open.iter().map(|&v| RationalFunction::from_poly(num.derivative(v))).collect();
    let zero: Vec<(Var, Rational)> = open.iter().map(|&v| (v, Rational::default())).collect();
    row.push(RationalFunction::from_poly(num.eval(&zero)));
    Some(row)
}

/// Derives the current of an existing family and compares it with the
/// printed form modulo total derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub report: DeriveReport,
    /// Normal form of the printed current minus the derived one; zero on a match.
    pub difference: FieldExpr,
}

impl Comparison {
    pub fn matches(&self) -> bool {
        self.report.unique().is_some() && self.difference.is_zero()
    }
}

/// Runs [`derive_brst`] with the leading terms of `q` and compares.
pub fn rederive(q: &BrstCurrent, leading: &[FieldExpr], max_degree: Option<usize>) -> Result<Comparison, OpeError> {
    let alg = q.algebra();
    let report = derive_brst(alg, leading, max_degree)?;
    let engine = OpeEngine::new(alg);
    let printed = reduce_mod_derivatives(&engine, &q.expr)?.residual;
    let difference = printed.sub(report.current());
    Ok(Comparison { report, difference })
}

/// The `(c_X X)` terms for every matter generator `X` with ghost `c_X`.
pub fn leading_terms(q: &BrstCurrent, pairs: &[(&str, &str)]) -> Result<Vec<FieldExpr>, OpeError> {
    let e = OpeEngine::new(q.algebra());
    pairs.iter().map(|(c, x)| super::product(&e, &[c, x])).collect()
}
