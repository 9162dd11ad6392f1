//! BRST currents, nilpotency modulo total derivatives, and the parameter
//! problems built on them.

mod derive;

pub use derive::{derive_brst, leading_terms, rederive, Comparison, DeriveOutcome, DeriveReport};

use std::collections::BTreeSet;

use crate::cft::{self, A2Mode, AlgebraBundle};
use crate::linalg;
use crate::ope::{reduce_mod_derivatives, FieldExpr, FieldMonomial, OpeAlgebra, OpeEngine, OpeError, Parity, PoleSeries};
use crate::scalar::{rational_roots, MultiPoly, Rational, RationalFunction, Var};

#[derive(Clone, Debug)]
pub struct BrstCurrent {
    pub expr: FieldExpr,
    pub bundle: AlgebraBundle,
}

impl BrstCurrent {
    pub fn algebra(&self) -> &OpeAlgebra {
        &self.bundle.combined
    }

    /// Weight 1, ghost number 1, odd.
    pub fn is_graded(&self) -> bool {
        self.algebra().grading(&self.expr).is_some_and(|g| {
            g.weight == Rational::from_integer(1.into()) && g.ghost == 1 && g.parity == Parity::Odd
        })
    }

    pub fn show(&self) -> String {
        self.algebra().show(&self.expr)
    }
}

/// Right-nested product of named factors; a trailing `'` is one derivative.
pub fn product(engine: &OpeEngine<'_>, names: &[&str]) -> Result<FieldExpr, OpeError> {
    let alg = engine.algebra();
    let mut acc = FieldExpr::unit();
    for n in names.iter().rev() {
        let base = n.trim_end_matches('\'');
        let k = (n.len() - base.len()) as u32;
        let f = engine.derivative_n(&alg.field(base)?, k)?;
        acc = engine.nprod_expr(&f, &acc)?;
    }
    Ok(acc)
}

fn sum_terms(engine: &OpeEngine<'_>, terms: &[(RationalFunction, &[&str])]) -> Result<FieldExpr, OpeError> {
    let mut q = FieldExpr::zero();
    for (k, names) in terms {
        q.add_scaled(&product(engine, names)?, k);
    }
    Ok(q)
}

fn k(n: i64, d: i64) -> RationalFunction {
    RationalFunction::from_ratio(n, d)
}

/// Terms of the W3 current as printed, for the deformed ghosts.
pub fn w3_terms(g1: &RationalFunction, g2: &RationalFunction) -> Vec<(RationalFunction, Vec<&'static str>)> {
    let s = g1 + g2;
    vec![
        (k(1, 1), vec!["c_T", "T"]),
        (k(1, 1), vec!["c_W", "W"]),
        (k(-1, 1), vec!["b_T", "c_T'", "c_T"]),
        (-(&k(125, 1566) + &s.scale(&crate::scalar::rat(17, 12))), vec!["b_T", "c_W'''", "c_W"]),
        (k(-1, 1), vec!["c_T", "b_W", "c_W'"]),
        (-(&k(25, 522) + &s.scale(&crate::scalar::rat(5, 4))), vec!["b_T'", "c_W''", "c_W"]),
        (k(2, 1), vec!["c_T'", "b_W", "c_W"]),
        (-(&k(8, 261) + &s.scale(&crate::scalar::rat(1, 2))), vec!["T", "b_T", "c_W'", "c_W"]),
        (-g1.clone(), vec!["b_T'", "b_T", "c_T", "c_W'", "c_W"]),
    ]
}

fn param_or(v: Option<&Rational>, name: &str) -> RationalFunction {
    v.map(|q| RationalFunction::constant(q.clone()))
        .unwrap_or_else(|| RationalFunction::param(name))
}

/// The W3 current with deformed ghosts; `None` leaves a parameter symbolic.
pub fn brst_w3(
    c: Option<&Rational>,
    g1: Option<&Rational>,
    g2: Option<&Rational>,
    mode: A2Mode,
) -> Result<BrstCurrent, OpeError> {
    let bundle = cft::w3_bundle(c, g1, g2, mode)?;
    let expr = {
        let e = OpeEngine::new(&bundle.combined);
        let terms = w3_terms(&param_or(g1, "g1"), &param_or(g2, "g2"));
        let refs: Vec<(RationalFunction, &[&str])> = terms.iter().map(|(k, v)| (k.clone(), v.as_slice())).collect();
        sum_terms(&e, &refs)?
    };
    Ok(BrstCurrent { expr, bundle })
}

pub fn w32_terms() -> Vec<(RationalFunction, Vec<&'static str>)> {
    vec![
        (k(1, 1), vec!["c_T", "T"]),
        (k(1, 1), vec!["c_U", "U"]),
        (k(1, 1), vec!["cp", "Gp"]),
        (k(1, 1), vec!["cm", "Gm"]),
        (k(1, 1), vec!["c_U", "bp", "cp"]),
        (k(-1, 1), vec!["c_U", "bm", "cm"]),
        (k(1, 2), vec!["c_T'", "b_U", "c_U"]),
        (k(1, 2), vec!["c_T", "b_U'", "c_U"]),
        (k(-1, 2), vec!["c_T", "b_U", "c_U'"]),
        (k(3, 4), vec!["c_T'", "bp", "cp"]),
        (k(1, 4), vec!["c_T", "bp'", "cp"]),
        (k(-3, 4), vec!["c_T", "bp", "cp'"]),
        (k(3, 4), vec!["c_T'", "bm", "cm"]),
        (k(1, 4), vec!["c_T", "bm'", "cm"]),
        (k(-3, 4), vec!["c_T", "bm", "cm'"]),
        (k(4, 1), vec!["b_U", "cp", "cm'"]),
        (k(3, 1), vec!["b_U'", "cp", "cm"]),
        (k(2, 1), vec!["b_U", "cp'", "cm"]),
        (k(-1, 1), vec!["b_T", "c_T'", "c_T"]),
        (k(-2, 1), vec!["b_T", "cp", "cm"]),
    ]
}

/// The conventional W3^(2) current with the deformed ghosts.
pub fn brst_w32(c: Option<&Rational>) -> Result<BrstCurrent, OpeError> {
    let bundle = cft::w32_bundle(c)?;
    let expr = {
        let e = OpeEngine::new(&bundle.combined);
        let terms = w32_terms();
        let refs: Vec<(RationalFunction, &[&str])> = terms.iter().map(|(k, v)| (k.clone(), v.as_slice())).collect();
        sum_terms(&e, &refs)?
    };
    Ok(BrstCurrent { expr, bundle })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NilpotencyReport {
    /// Full singular part of `Q(z) Q(w)`.
    pub qq: PoleSeries,
    /// First-order pole modulo total derivatives.
    pub obstruction: FieldExpr,
    pub nilpotent: bool,
}

impl NilpotencyReport {
    pub fn verdict(&self) -> &'static str {
        if self.nilpotent {
            "nilpotent"
        } else {
            "not nilpotent"
        }
    }
}

/// The charge squares to zero iff the first-order pole of `Q Q` is a total derivative.
pub fn nilpotency(q: &BrstCurrent) -> Result<NilpotencyReport, OpeError> {
    nilpotency_of(q.algebra(), &q.expr)
}

pub fn nilpotency_of(alg: &OpeAlgebra, q: &FieldExpr) -> Result<NilpotencyReport, OpeError> {
    let e = OpeEngine::new(alg);
    let qq = e.ope_expr(q, q)?;
    let red = reduce_mod_derivatives(&e, &qq.pole(1))?;
    Ok(NilpotencyReport {
        nilpotent: red.residual.is_zero(),
        obstruction: red.residual,
        qq,
    })
}

/// Values of `var` at which every obstruction coefficient vanishes, excluding
/// poles of the coefficients.
pub fn critical_values(obstruction: &FieldExpr, var: Var) -> Result<Vec<Rational>, OpeError> {
    if obstruction.is_zero() {
        return Err(OpeError::Invalid("obstruction vanishes identically".into()));
    }
    let mut g: Option<MultiPoly> = None;
    let mut poles = BTreeSet::new();
    for (_, c) in obstruction.terms() {
        if c.vars().iter().any(|v| *v != var) {
            return Err(OpeError::Invalid(format!(
                "obstruction depends on parameters other than {}",
                var.name()
            )));
        }
        g = Some(match g {
            None => c.numer().clone(),
            Some(p) => p.gcd(c.numer()),
        });
        if !c.denom().is_constant() {
            poles.extend(rational_roots(c.denom())?);
        }
    }
    let g = g.expect("nonempty obstruction");
    if g.is_constant() {
        return Ok(Vec::new());
    }
    Ok(rational_roots(&g)?.into_iter().filter(|r| !poles.contains(r)).collect())
}

/// Critical central charges of a current family built with symbolic `c`.
pub fn critical_charge(q: &BrstCurrent) -> Result<Vec<Rational>, OpeError> {
    let rep = nilpotency(q)?;
    critical_values(&rep.obstruction, cft::c_var())
}

/// Terms with four or more generator factors.
pub fn unconventional_terms(q: &BrstCurrent) -> Vec<(FieldMonomial, RationalFunction)> {
    q.expr
        .terms()
        .filter(|(m, _)| m.len() >= 4)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

/// The unique `(g1, g2)` removing every unconventional term of the W3 current.
pub fn solve_conventional() -> Result<(Rational, Rational), OpeError> {
    let q = brst_w3(None, None, None, A2Mode::Consistent)?;
    let (g1, g2) = (cft::g1_var(), cft::g2_var());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (_, c) in unconventional_terms(&q) {
        let p = c
            .is_polynomial()
            .then(|| c.numer().clone())
            .filter(|p| p.total_degree() <= 1 && p.vars().iter().all(|v| *v == g1 || *v == g2))
            .ok_or_else(|| OpeError::Invalid(format!("coefficient {c} is not affine in g1, g2")))?;
        let coef = |v: Var| p.derivative(v).as_constant().unwrap_or_default();
        let zero = [(g1, Rational::default()), (g2, Rational::default())];
        rows.push(vec![coef(g1), coef(g2)]);
        rhs.push(-p.eval(&zero).as_constant().unwrap_or_default());
    }
    if linalg::rank(&rows, 2) < 2 {
        return Err(OpeError::Invalid("conventional form does not fix g1, g2 uniquely".into()));
    }
    let x = linalg::solve(&rows, &rhs, 2)
        .ok_or_else(|| OpeError::Invalid("no g1, g2 remove the unconventional terms".into()))?;
    Ok((x[0].clone(), x[1].clone()))
}
