use num_traits::{Signed, Zero};

use super::algebra::{OpeAlgebra, Parity};
use super::engine::OpeEngine;
use super::field::{Factor, FieldExpr, FieldMonomial};
use super::OpeError;
use crate::linalg::rref;
use crate::scalar::{Rational, RationalFunction};

/// Smallest weight any monomial of the algebra can have, or an error when an
/// even generator of non-positive weight makes the slices infinite.
pub fn min_weight(alg: &OpeAlgebra) -> Result<Rational, OpeError> {
    let mut total = Rational::zero();
    for g in alg.generators() {
        if !g.parity.is_odd() {
            if !g.weight.is_positive() {
                return Err(OpeError::InfiniteSlice(format!(
                    "even generator {} has weight {}",
                    g.name, g.weight
                )));
            }
            continue;
        }
        let mut w = g.weight.clone();
        while w.is_negative() {
            total += &w;
            w += Rational::from_integer(1.into());
        }
    }
    Ok(total)
}

/// All canonical monomials of the given grading.
pub fn weight_basis(
    alg: &OpeAlgebra,
    weight: &Rational,
    ghost: i32,
    parity: Parity,
) -> Result<Vec<FieldMonomial>, OpeError> {
    let floor = min_weight(alg)?;
    let cap = weight - &floor;
    let mut cands: Vec<(Factor, Rational, bool, i32)> = Vec::new();
    for (i, g) in alg.generators().iter().enumerate() {
        let mut k = 0u32;
        loop {
            let w = &g.weight + Rational::from_integer(k.into());
            // negative factors are already counted in `floor`
            if !w.is_negative() && w > cap {
                break;
            }
            cands.push((Factor::new(i, k), w, g.parity.is_odd(), g.ghost));
            k += 1;
        }
    }
    // suffix sums of negative weights: the least the remaining factors can add
    let mut low = vec![Rational::zero(); cands.len() + 1];
    for i in (0..cands.len()).rev() {
        low[i] = &low[i + 1] + if cands[i].1.is_negative() { cands[i].1.clone() } else { Rational::zero() };
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    dfs(&cands, &low, 0, weight.clone(), ghost, parity.is_odd(), &mut cur, &mut out);
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    cands: &[(Factor, Rational, bool, i32)],
    low: &[Rational],
    i: usize,
    left: Rational,
    ghost: i32,
    odd: bool,
    cur: &mut Vec<Factor>,
    out: &mut Vec<FieldMonomial>,
) {
    if left < low[i] {
        return;
    }
    if i == cands.len() {
        if left.is_zero() && ghost == 0 && !odd {
            out.push(FieldMonomial::from_sorted(cur.clone()));
        }
        return;
    }
    let (f, w, is_odd, gh) = &cands[i];
    dfs(cands, low, i + 1, left.clone(), ghost, odd, cur, out);
    let max = if *is_odd { 1 } else { u32::MAX };
    let mut left = left;
    let mut ghost = ghost;
    let mut odd = odd;
    let mut used = 0;
    while used < max {
        left -= w;
        ghost -= gh;
        odd ^= is_odd;
        cur.push(*f);
        used += 1;
        if left < low[i + 1] {
            break;
        }
        dfs(cands, low, i + 1, left.clone(), ghost, odd, cur, out);
    }
    cur.truncate(cur.len() - used as usize);
}

/// Result of reducing an expression modulo total derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeReduction {
    /// Part of the input that is not a total derivative, in a fixed normal form.
    pub residual: FieldExpr,
    /// `y` with `input = ∂y + residual`.
    pub preimage: FieldExpr,
}

/// Splits a homogeneous `x` as `∂y + r`, with `r` in normal form modulo the
/// image of `∂`.
pub fn reduce_mod_derivatives(engine: &OpeEngine<'_>, x: &FieldExpr) -> Result<DerivativeReduction, OpeError> {
    if x.is_zero() {
        return Ok(DerivativeReduction {
            residual: FieldExpr::zero(),
            preimage: FieldExpr::zero(),
        });
    }
    let alg = engine.algebra();
    let g = alg
        .grading(x)
        .ok_or_else(|| OpeError::Invalid("expression is not homogeneous".into()))?;
    let w1 = &g.weight - Rational::from_integer(1.into());
    let basis = weight_basis(alg, &w1, g.ghost, g.parity)?;
    let images: Vec<FieldExpr> = basis
        .iter()
        .map(|m| engine.derivative(&FieldExpr::monomial(m.clone())))
        .collect::<Result<_, _>>()?;

    let mut cols: Vec<FieldMonomial> = images.iter().flat_map(|e| e.monomials().cloned()).collect();
    cols.extend(x.monomials().cloned());
    cols.sort();
    cols.dedup();
    // highest monomials first, so residuals prefer the lowest ones
    cols.reverse();
    let nc = cols.len();
    let col_of = |m: &FieldMonomial| cols.binary_search_by(|c| m.cmp(c)).unwrap();
    let nb = basis.len();
    let mut mat: Vec<Vec<RationalFunction>> = images
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let mut row = vec![RationalFunction::zero(); nc + nb];
            for (m, c) in e.terms() {
                row[col_of(m)] = c.clone();
            }
            row[nc + j] = RationalFunction::one();
            row
        })
        .collect();
    let pivots = rref(&mut mat, nc);

    let mut v = vec![RationalFunction::zero(); nc];
    for (m, c) in x.terms() {
        v[col_of(m)] = c.clone();
    }
    let mut pre = vec![RationalFunction::zero(); nb];
    for (r, &pc) in pivots.iter().enumerate() {
        let k = v[pc].clone();
        if k.is_zero() {
            continue;
        }
        for (j, val) in mat[r].iter().enumerate() {
            if val.is_zero() {
                continue;
            }
            let d = &k * val;
            if j < nc {
                v[j] = &v[j] - &d;
            } else {
                pre[j - nc] = &pre[j - nc] + &d;
            }
        }
    }
    let residual = cols.iter().cloned().zip(v).collect();
    let preimage = basis.into_iter().zip(pre).collect();
    Ok(DerivativeReduction { residual, preimage })
}

/// `Some(y)` with `∂y = x`, or `None` when `x` is not a total derivative.
pub fn is_total_derivative(engine: &OpeEngine<'_>, x: &FieldExpr) -> Result<Option<FieldExpr>, OpeError> {
    let red = reduce_mod_derivatives(engine, x)?;
    Ok(red.residual.is_zero().then_some(red.preimage))
}
