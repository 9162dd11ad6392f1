//! Consistency checks on OPE tables and derived fields.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::algebra::{Grading, OpeAlgebra, Parity};
use super::basis::min_weight;
use super::engine::OpeEngine;
use super::field::{FieldExpr, PoleSeries};
use super::OpeError;
use crate::scalar::{Rational, RationalFunction};

#[derive(Clone, Debug, PartialEq)]
pub enum IssueKind {
    /// A pole whose terms do not carry the grading forced by the pair.
    Grading { expected: Grading },
    /// A self-pair that is not invariant under exchanging the two fields.
    Exchange,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableIssue {
    pub a: String,
    pub b: String,
    pub pole: u32,
    pub kind: IssueKind,
    pub residual: FieldExpr,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableReport {
    pub pairs_checked: usize,
    pub issues: Vec<TableIssue>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

fn expected_grading(alg: &OpeAlgebra, a: usize, b: usize, n: u32) -> Grading {
    let (ga, gb) = (alg.generator(a), alg.generator(b));
    Grading {
        weight: &ga.weight + &gb.weight - Rational::from_integer(n.into()),
        parity: Parity::from_odd(ga.parity.is_odd() ^ gb.parity.is_odd()),
        ghost: ga.ghost + gb.ghost,
    }
}

/// Terms of `e` whose grading differs from `want`.
pub fn off_grade(alg: &OpeAlgebra, e: &FieldExpr, want: &Grading) -> FieldExpr {
    e.terms()
        .filter(|(m, _)| alg.monomial_grading(m) != *want)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

/// Grading of every stored pole, and exchange symmetry of every self-pair.
pub fn validate_table(alg: &OpeAlgebra) -> Result<TableReport, OpeError> {
    let engine = OpeEngine::new(alg);
    let mut report = TableReport::default();
    for (&(a, b), series) in alg.table() {
        report.pairs_checked += 1;
        let (na, nb) = (&alg.generator(a).name, &alg.generator(b).name);
        for (n, e) in series.iter() {
            let want = expected_grading(alg, a, b, n);
            let bad = off_grade(alg, e, &want);
            if !bad.is_zero() {
                report.issues.push(TableIssue {
                    a: na.clone(),
                    b: nb.clone(),
                    pole: n,
                    kind: IssueKind::Grading { expected: want },
                    residual: bad,
                });
            }
        }
        if a == b {
            let odd = alg.generator(a).parity.is_odd();
            let flipped = engine.flip(series, odd)?;
            let diff = flipped.sub(series);
            for (n, e) in diff.iter() {
                report.issues.push(TableIssue {
                    a: na.clone(),
                    b: nb.clone(),
                    pole: n,
                    kind: IssueKind::Exchange,
                    residual: e.clone(),
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    /// `(p, q, residual)` for every index pair examined.
    pub residuals: Vec<(u32, u32, FieldExpr)>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, _, r)| r.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &(u32, u32, FieldExpr)> {
        self.residuals.iter().filter(|(_, _, r)| !r.is_zero())
    }
}

fn binomial(n: u32, k: u32) -> RationalFunction {
    if k > n {
        return RationalFunction::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    RationalFunction::constant(Rational::from_integer(r))
}

/// Largest `p + q` at which the associativity identity can be nonzero for
/// homogeneous `a, b, c`.
pub fn jacobi_bound(alg: &OpeAlgebra, a: &FieldExpr, b: &FieldExpr, c: &FieldExpr) -> Result<u32, OpeError> {
    let w = |e: &FieldExpr| {
        alg.grading(e)
            .map(|g| g.weight)
            .ok_or_else(|| OpeError::Invalid("Jacobi arguments must be homogeneous".into()))
    };
    let total = w(a)? + w(b)? + w(c)? - min_weight(alg)?;
    Ok(total.floor().to_integer().to_u32().unwrap_or(0))
}

/// Residuals of `[A[BC]_q]_p - ±[B[AC]_p]_q - Σ_l C(p-1, l-1) [[AB]_l C]_{p+q-l}`
/// for `1 <= p, q` with `p + q` up to the weight bound (or the given caps).
pub fn jacobi_check(
    engine: &OpeEngine<'_>,
    a: &FieldExpr,
    b: &FieldExpr,
    c: &FieldExpr,
    caps: Option<(u32, u32)>,
) -> Result<JacobiReport, OpeError> {
    let alg = engine.algebra();
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Ok(JacobiReport { residuals: Vec::new() });
    }
    let bound = jacobi_bound(alg, a, b, c)?;
    let (pmax, qmax) = caps.unwrap_or((bound, bound));
    let odd = |e: &FieldExpr| alg.grading(e).map(|g| g.parity.is_odd()).unwrap_or(false);
    let sign = if odd(a) && odd(b) { -1 } else { 1 };

    let bc = engine.ope_expr(b, c)?;
    let ac = engine.ope_expr(a, c)?;
    let ab = engine.ope_expr(a, b)?;
    let mut ab_c: Vec<(u32, PoleSeries, FieldExpr)> = Vec::new();
    for (l, e) in ab.iter() {
        ab_c.push((l, engine.ope_expr(e, c)?, engine.nprod_expr(e, c)?));
    }

    let mut residuals = Vec::new();
    for q in 1..=qmax {
        let a_bcq = engine.ope_expr(a, &bc.pole(q))?;
        for p in 1..=pmax {
            if p + q > bound {
                break;
            }
            let mut r = a_bcq.pole(p);
            let b_acp = engine.ope_expr(b, &ac.pole(p))?;
            r.add_scaled(&b_acp.pole(q), &RationalFunction::from_int(-sign));
            for (l, s, n0) in &ab_c {
                if *l > p {
                    continue;
                }
                let k = p + q - l;
                let term = if k == 0 { n0.clone() } else { s.pole(k) };
                r.add_scaled(&term, &binomial(p - 1, l - 1).scale_int(-1));
            }
            residuals.push((p, q, r));
        }
    }
    Ok(JacobiReport { residuals })
}

/// Twice the unit coefficient of the fourth-order pole of `t(z) t(w)`.
pub fn central_charge(engine: &OpeEngine<'_>, t: &FieldExpr) -> Result<RationalFunction, OpeError> {
    let p4 = engine.ope_expr(t, t)?.pole(4);
    let half = p4
        .as_scalar()
        .ok_or_else(|| OpeError::Invalid(format!("fourth-order pole is not central: {}", engine.algebra().show(&p4))))?;
    Ok(half.scale_int(2))
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimaryFailure {
    /// A pole of order three or more survives.
    HigherPole { pole: u32, value: FieldExpr },
    /// The second-order pole is not a multiple of the field.
    NotEigen { value: FieldExpr },
    /// The first-order pole is not the derivative of the field.
    Translation { residual: FieldExpr },
}

/// Conformal weight of `x` with respect to `t`, if `x` is primary.
pub fn primary_check(
    engine: &OpeEngine<'_>,
    t: &FieldExpr,
    x: &FieldExpr,
) -> Result<Result<RationalFunction, PrimaryFailure>, OpeError> {
    let s = engine.ope_expr(t, x)?;
    if let Some((n, e)) = s.iter().rev().find(|(n, _)| *n >= 3) {
        return Ok(Err(PrimaryFailure::HigherPole { pole: n, value: e.clone() }));
    }
    let p2 = s.pole(2);
    let h = match x.terms().next() {
        None => RationalFunction::zero(),
        Some((m, c)) => p2.coeff(m).div(c)?,
    };
    if p2 != x.scale(&h) {
        return Ok(Err(PrimaryFailure::NotEigen { value: p2 }));
    }
    let r = s.pole(1).sub(&engine.derivative(x)?);
    if !r.is_zero() {
        return Ok(Err(PrimaryFailure::Translation { residual: r }));
    }
    Ok(Ok(h))
}

/// Generator rescaling by signs, as a map on field expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMap {
    signs: Vec<i8>,
}

impl SignMap {
    /// `flips` lists the generators sent to their negatives.
    pub fn new(alg: &OpeAlgebra, flips: &[&str]) -> Result<SignMap, OpeError> {
        let mut signs = vec![1i8; alg.generators().len()];
        for f in flips {
            signs[alg.gen(f)?] = -1;
        }
        Ok(SignMap { signs })
    }

    pub fn apply(&self, x: &FieldExpr) -> FieldExpr {
        x.terms()
            .map(|(m, c)| {
                let neg = m.factors().iter().filter(|f| self.signs[f.gen as usize] < 0).count() % 2 == 1;
                (m.clone(), if neg { -c.clone() } else { c.clone() })
            })
            .collect()
    }

    fn sign(&self, g: usize) -> RationalFunction {
        RationalFunction::from_int(self.signs[g].into())
    }

    /// Pairs `(a, b)` whose table entry is not mapped to itself.
    pub fn violations(&self, alg: &OpeAlgebra) -> Vec<(String, String)> {
        alg.table()
            .iter()
            .filter(|(&(a, b), s)| {
                let k = &self.sign(a) * &self.sign(b);
                s.iter().any(|(_, e)| self.apply(e) != e.scale(&k))
            })
            .map(|(&(a, b), _)| (alg.generator(a).name.clone(), alg.generator(b).name.clone()))
            .collect()
    }
}

/// Image of `x` under a sign automorphism; rejects sign maps that do not
/// preserve the table.
pub fn apply_automorphism(alg: &OpeAlgebra, map: &SignMap, x: &FieldExpr) -> Result<FieldExpr, OpeError> {
    let bad = map.violations(alg);
    if let Some((a, b)) = bad.first() {
        return Err(OpeError::Invalid(format!("sign map does not preserve the OPE of ({a}, {b})")));
    }
    Ok(map.apply(x))
}

/// Whether every pole of `s` is homogeneous of the grading forced by `a` and `b`.
pub fn series_is_graded(alg: &OpeAlgebra, a: &Grading, b: &Grading, s: &PoleSeries) -> bool {
    s.iter().all(|(n, e)| {
        let want = Grading {
            weight: &a.weight + &b.weight - Rational::from_integer(n.into()),
            parity: Parity::from_odd(a.parity.is_odd() ^ b.parity.is_odd()),
            ghost: a.ghost + b.ghost,
        };
        off_grade(alg, e, &want).is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ope::{parse_algebra, parse_field_expr};

    const VIR: &str = "algebra v\nparam c\nfield T weight=2\nope T T : 4 -> c/2*one ; 2 -> 2*T ; 1 -> D(T)\n";

    #[test]
    fn virasoro_is_consistent() {
        let a = parse_algebra(VIR).unwrap();
        assert!(validate_table(&a).unwrap().passed());
        let e = OpeEngine::new(&a);
        let t = a.field("T").unwrap();
        let r = jacobi_check(&e, &t, &t, &t, None).unwrap();
        assert!(r.passed());
        assert!(!r.residuals.is_empty());
        assert_eq!(central_charge(&e, &t).unwrap(), RationalFunction::param("c"));
    }

    #[test]
    fn broken_tables_are_caught() {
        let bad = VIR.replace("1 -> D(T)", "1 -> 2*D(T)");
        let a = parse_algebra(&bad).unwrap();
        let rep = validate_table(&a).unwrap();
        assert!(rep.issues.iter().any(|i| i.kind == IssueKind::Exchange && i.pole == 1));
        let bad = VIR.replace("2 -> 2*T", "2 -> 3*T");
        let a = parse_algebra(&bad).unwrap();
        let e = OpeEngine::new(&a);
        let t = a.field("T").unwrap();
        assert!(!jacobi_check(&e, &t, &t, &t, None).unwrap().passed());
        let bad = VIR.replace("1 -> D(T)", "1 -> D(T) ; 3 -> T");
        let rep = validate_table(&parse_algebra(&bad).unwrap()).unwrap();
        assert!(rep.issues.iter().any(|i| matches!(i.kind, IssueKind::Grading { .. })));
    }

    #[test]
    fn primaries() {
        let a = parse_algebra(VIR).unwrap();
        let e = OpeEngine::new(&a);
        let t = a.field("T").unwrap();
        assert!(matches!(
            primary_check(&e, &t, &t).unwrap(),
            Err(PrimaryFailure::HigherPole { pole: 4, .. })
        ));
        let tt = parse_field_expr(&e, "N(T, T)").unwrap();
        assert!(primary_check(&e, &t, &tt).unwrap().is_err());
    }

    #[test]
    fn sign_automorphisms() {
        let src = "algebra z\nfield J weight=1\nfield K weight=1\nope J J : 2 -> one\nope K K : 2 -> one\nope J K : 1 -> K\n";
        let a = parse_algebra(src).unwrap();
        let ok = SignMap::new(&a, &["K"]).unwrap();
        let bad = SignMap::new(&a, &["J"]).unwrap();
        let jk = FieldExpr::generator(0).add(&FieldExpr::generator(1));
        let img = apply_automorphism(&a, &ok, &jk).unwrap();
        assert_eq!(img, FieldExpr::generator(0).sub(&FieldExpr::generator(1)));
        assert!(apply_automorphism(&a, &bad, &jk).is_err());
    }
}
