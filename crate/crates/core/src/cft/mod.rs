//! The W3 and W3^(2) algebras, their ghost systems and the maps between
//! canonical and deformed ghosts.

mod transform;

pub use transform::{
    canonical_w32_ghosts, verify_ghost_transform_w3, verify_ghost_transform_w3_with, verify_ghost_transform_w32,
    w3_ghost_transform, GhostTransform, TransformReport,
};

use crate::ope::{parse_algebra_with, FieldExpr, OpeAlgebra, OpeEngine, OpeError, Parity, PoleSeries};
use crate::scalar::{rat, Rational, RationalFunction, Var};

pub const VIRASORO_ALG: &str = include_str!("../../data/virasoro.alg");
pub const W3_ALG: &str = include_str!("../../data/w3.alg");
pub const W3_GHOSTS_ALG: &str = include_str!("../../data/w3_ghosts.alg");
pub const W32_ALG: &str = include_str!("../../data/w32.alg");
pub const W32_GHOSTS_ALG: &str = include_str!("../../data/w32_ghosts.alg");

/// Which value of the `T'''` coefficient in the first-order `W W` pole to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum A2Mode {
    /// `(2/9) a1`, the value printed alongside the algebra in the literature.
    Printed,
    /// `a1/2 - 1/12 = (c - 10)/(3(22 + 5c))`, forced by exchange symmetry.
    #[default]
    Consistent,
}

impl A2Mode {
    pub fn value(self) -> RationalFunction {
        let c = RationalFunction::param("c");
        let den = (&c.scale_int(5) + &RationalFunction::from_int(22)).scale_int(3);
        let num = match self {
            A2Mode::Printed => &c - &RationalFunction::from_int(2),
            A2Mode::Consistent => &c - &RationalFunction::from_int(10),
        };
        num.div(&den).expect("nonzero denominator")
    }

    pub fn name(self) -> &'static str {
        match self {
            A2Mode::Printed => "printed",
            A2Mode::Consistent => "consistent",
        }
    }

    pub fn parse(s: &str) -> Option<A2Mode> {
        match s {
            "printed" | "as-printed" => Some(A2Mode::Printed),
            "consistent" | "exchange-consistent" => Some(A2Mode::Consistent),
            _ => None,
        }
    }
}

pub fn c_var() -> Var {
    Var::new("c")
}

pub fn g1_var() -> Var {
    Var::new("g1")
}

pub fn g2_var() -> Var {
    Var::new("g2")
}

fn rf(n: i64, d: i64) -> RationalFunction {
    RationalFunction::from_ratio(n, d)
}

fn series(poles: Vec<(u32, FieldExpr)>) -> PoleSeries {
    poles.into_iter().collect()
}

/// Stores the entry for `(a, b)` built by `f`, which may use normal products
/// resolved against the entries already present.
fn entry(
    alg: &mut OpeAlgebra,
    a: &str,
    b: &str,
    f: impl FnOnce(&OpeEngine<'_>, &dyn Fn(&str) -> FieldExpr) -> Result<Vec<(u32, FieldExpr)>, OpeError>,
) -> Result<(), OpeError> {
    let snapshot = alg.clone();
    let engine = OpeEngine::new(&snapshot);
    let g = |n: &str| snapshot.field(n).expect("declared generator");
    let poles = f(&engine, &g)?;
    let (ia, ib) = (alg.gen(a)?, alg.gen(b)?);
    alg.set_ope(ia, ib, series(poles));
    Ok(())
}

fn weight(n: i64, d: i64) -> Rational {
    rat(n, d)
}

/// W3 with symbolic `c`.
pub fn w3(mode: A2Mode) -> OpeAlgebra {
    let c = RationalFunction::param("c");
    let five_c_22 = &c.scale_int(5) + &RationalFunction::from_int(22);
    let a = RationalFunction::from_int(32).div(&five_c_22).unwrap();
    let a1 = (&c.scale_int(3) - &RationalFunction::from_int(6))
        .div(&five_c_22.scale_int(2))
        .unwrap();
    let a2 = mode.value();

    let mut alg = OpeAlgebra::new("w3");
    alg.add_param("c");
    alg.add_def("a", a.clone());
    alg.add_def("a1", a1.clone());
    alg.add_def("a2", a2.clone());
    alg.add_generator("T", weight(2, 1), Parity::Even, 0).unwrap();
    alg.add_generator("W", weight(3, 1), Parity::Even, 0).unwrap();
    let one = FieldExpr::unit;
    let build = || -> Result<OpeAlgebra, OpeError> {
        let mut alg = alg.clone();
        entry(&mut alg, "T", "T", |e, g| {
            Ok(vec![
                (4, one().scale(&c.scale(&rat(1, 2)))),
                (2, g("T").scale_int(2)),
                (1, e.derivative(&g("T"))?),
            ])
        })?;
        entry(&mut alg, "T", "W", |e, g| {
            Ok(vec![(2, g("W").scale_int(3)), (1, e.derivative(&g("W"))?)])
        })?;
        entry(&mut alg, "W", "W", |e, g| {
            let t = g("T");
            let tt = e.nprod_expr(&t, &t)?;
            Ok(vec![
                (6, one().scale(&c.scale(&rat(1, 3)))),
                (4, t.scale_int(2)),
                (3, e.derivative(&t)?),
                (2, e.derivative_n(&t, 2)?.scale(&a1).add(&tt.scale(&a))),
                (
                    1,
                    e.derivative_n(&t, 3)?
                        .scale(&a2)
                        .add(&e.derivative(&tt)?.scale(&a.scale(&rat(1, 2)))),
                ),
            ])
        })?;
        Ok(alg)
    };
    build().expect("W3 table is well formed")
}

/// W3 at a given central charge (or symbolic when `None`).
pub fn w3_at(c: Option<&Rational>, mode: A2Mode) -> Result<OpeAlgebra, OpeError> {
    let alg = w3(mode);
    match c {
        None => Ok(alg),
        Some(v) => alg.specialize(&[(c_var(), v.clone())]),
    }
}

/// W3 read from the bundled definition file.
pub fn w3_from_file(mode: A2Mode) -> OpeAlgebra {
    parse_algebra_with(W3_ALG, &[("a2".into(), mode.value())]).expect("bundled W3 file parses")
}

/// The two-parameter ghost system of W3 with symbolic `g1`, `g2`.
pub fn w3_ghosts_symbolic() -> OpeAlgebra {
    let g1 = RationalFunction::param("g1");
    let g2 = RationalFunction::param("g2");
    let mut alg = OpeAlgebra::new("w3_ghosts");
    alg.add_param("g1");
    alg.add_param("g2");
    alg.add_generator("c_T", weight(-1, 1), Parity::Odd, 1).unwrap();
    alg.add_generator("b_T", weight(2, 1), Parity::Odd, -1).unwrap();
    alg.add_generator("c_W", weight(-2, 1), Parity::Odd, 1).unwrap();
    alg.add_generator("b_W", weight(3, 1), Parity::Odd, -1).unwrap();
    alg.set_default_regular(true);
    let build = |mut alg: OpeAlgebra| -> Result<OpeAlgebra, OpeError> {
        entry(&mut alg, "b_T", "c_T", |_, _| Ok(vec![(1, FieldExpr::unit())]))?;
        entry(&mut alg, "b_W", "c_W", |_, _| Ok(vec![(1, FieldExpr::unit())]))?;
        entry(&mut alg, "c_T", "b_W", |e, g| {
            let bc = e.nprod_expr(&g("b_T"), &g("c_W"))?;
            let bdc = e.nprod_expr(&g("b_T"), &e.derivative(&g("c_W"))?)?;
            Ok(vec![
                (2, bc.scale(&g1)),
                (1, e.derivative(&bc)?.scale(&g2).add(&bdc.scale(&g1))),
            ])
        })?;
        entry(&mut alg, "c_T", "c_T", |e, g| {
            let x = e.nprod_expr(&e.derivative(&g("c_W"))?, &g("c_W"))?;
            Ok(vec![(1, x.scale(&(&g1 + &g2)))])
        })?;
        entry(&mut alg, "b_W", "b_W", |e, g| {
            let x = e.nprod_expr(&e.derivative(&g("b_T"))?, &g("b_T"))?;
            Ok(vec![(1, x.scale(&(&g1 - &g2)))])
        })?;
        Ok(alg)
    };
    build(alg).expect("ghost table is well formed")
}

/// The W3 ghost system at the given `g1`, `g2` (each symbolic when `None`).
pub fn w3_ghosts(g1: Option<&Rational>, g2: Option<&Rational>) -> Result<OpeAlgebra, OpeError> {
    let mut bind = Vec::new();
    if let Some(v) = g1 {
        bind.push((g1_var(), v.clone()));
    }
    if let Some(v) = g2 {
        bind.push((g2_var(), v.clone()));
    }
    w3_ghosts_symbolic().specialize(&bind)
}

/// W3^(2) with symbolic `c`.
pub fn w32() -> OpeAlgebra {
    let c = RationalFunction::param("c");
    let one_c = &RationalFunction::one() + &c;
    let frac = |num: RationalFunction, den: &RationalFunction| num.div(den).unwrap();
    let mut alg = OpeAlgebra::new("w32");
    alg.add_param("c");
    alg.add_generator("T", weight(2, 1), Parity::Even, 0).unwrap();
    alg.add_generator("U", weight(1, 1), Parity::Even, 0).unwrap();
    alg.add_generator("Gp", weight(3, 2), Parity::Even, 0).unwrap();
    alg.add_generator("Gm", weight(3, 2), Parity::Even, 0).unwrap();
    let u = FieldExpr::unit;
    let build = |mut alg: OpeAlgebra| -> Result<OpeAlgebra, OpeError> {
        let central = frac(&c * &(&RationalFunction::from_int(7) - &c.scale_int(9)), &one_c.scale_int(2));
        entry(&mut alg, "T", "T", |e, g| {
            Ok(vec![(4, u().scale(&central)), (2, g("T").scale_int(2)), (1, e.derivative(&g("T"))?)])
        })?;
        entry(&mut alg, "T", "U", |e, g| Ok(vec![(2, g("U")), (1, e.derivative(&g("U"))?)]))?;
        for x in ["Gp", "Gm"] {
            entry(&mut alg, "T", x, |e, g| {
                Ok(vec![(2, g(x).scale(&rf(3, 2))), (1, e.derivative(&g(x))?)])
            })?;
        }
        entry(&mut alg, "U", "U", |_, _| Ok(vec![(2, u().scale(&c))]))?;
        entry(&mut alg, "U", "Gp", |_, g| Ok(vec![(1, g("Gp"))]))?;
        entry(&mut alg, "U", "Gm", |_, g| Ok(vec![(1, g("Gm").neg())]))?;
        entry(&mut alg, "Gp", "Gp", |_, _| Ok(vec![]))?;
        entry(&mut alg, "Gm", "Gm", |_, _| Ok(vec![]))?;
        entry(&mut alg, "Gp", "Gm", |e, g| {
            let p3 = frac(&c.scale_int(2) - &(&c * &c).scale_int(6), &one_c);
            let p2 = frac(&RationalFunction::from_int(2) - &c.scale_int(6), &one_c);
            let uu = e.nprod_expr(&g("U"), &g("U"))?;
            let p1 = g("T")
                .scale_int(2)
                .sub(&uu.scale(&frac(RationalFunction::from_int(4), &one_c)))
                .add(&e.derivative(&g("U"))?.scale(&frac(&RationalFunction::one() - &c.scale_int(3), &one_c)));
            Ok(vec![(3, u().scale(&p3)), (2, g("U").scale(&p2)), (1, p1)])
        })?;
        Ok(alg)
    };
    build(alg).expect("W3^(2) table is well formed")
}

pub fn w32_at(c: Option<&Rational>) -> Result<OpeAlgebra, OpeError> {
    let alg = w32();
    match c {
        None => Ok(alg),
        Some(v) => alg.specialize(&[(c_var(), v.clone())]),
    }
}

/// The deformed W3^(2) ghosts; `b_T` and `c_U` are the modified fields.
pub fn w32_ghosts() -> OpeAlgebra {
    let mut alg = OpeAlgebra::new("w32_ghosts");
    for (n, w, gh) in [
        ("c_T", weight(-1, 1), 1),
        ("b_T", weight(2, 1), -1),
        ("c_U", weight(0, 1), 1),
        ("b_U", weight(1, 1), -1),
        ("cp", weight(-1, 2), 1),
        ("bp", weight(3, 2), -1),
        ("cm", weight(-1, 2), 1),
        ("bm", weight(3, 2), -1),
    ] {
        alg.add_generator(n, w, Parity::Odd, gh).unwrap();
    }
    alg.set_default_regular(true);
    let build = |mut alg: OpeAlgebra| -> Result<OpeAlgebra, OpeError> {
        for (b, c) in [("b_T", "c_T"), ("b_U", "c_U"), ("bp", "cp"), ("bm", "cm")] {
            entry(&mut alg, b, c, |_, _| Ok(vec![(1, FieldExpr::unit())]))?;
        }
        entry(&mut alg, "b_T", "c_U", |e, g| {
            let (ct, bu) = (g("c_T"), g("b_U"));
            let p1 = e
                .nprod_expr(&ct, &e.derivative(&bu)?)?
                .scale_int(-4)
                .sub(&e.nprod_expr(&e.derivative(&ct)?, &bu)?.scale_int(2));
            Ok(vec![(2, e.nprod_expr(&ct, &bu)?.scale_int(-2)), (1, p1)])
        })?;
        entry(&mut alg, "b_T", "b_T", |e, g| {
            let bu = g("b_U");
            Ok(vec![(1, e.nprod_expr(&e.derivative(&bu)?, &bu)?.scale_int(-4))])
        })?;
        entry(&mut alg, "c_U", "c_U", |e, g| Ok(vec![(1, e.nprod_expr(&g("cp"), &g("cm"))?.scale_int(-8))]))?;
        entry(&mut alg, "c_U", "bp", |e, g| Ok(vec![(1, e.nprod_expr(&g("b_U"), &g("cm"))?.scale_int(4))]))?;
        entry(&mut alg, "c_U", "bm", |e, g| Ok(vec![(1, e.nprod_expr(&g("b_U"), &g("cp"))?.scale_int(-4))]))?;
        Ok(alg)
    };
    build(alg).expect("ghost table is well formed")
}

/// Matter and ghost sectors with regular cross OPEs.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraBundle {
    pub matter: OpeAlgebra,
    pub ghosts: OpeAlgebra,
    pub combined: OpeAlgebra,
}

/// Disjoint union of two algebras; every cross pair is stored as regular.
pub fn bundle(matter: &OpeAlgebra, ghosts: &OpeAlgebra) -> Result<AlgebraBundle, OpeError> {
    let mut all = OpeAlgebra::new(&format!("{}+{}", matter.name, ghosts.name));
    for p in matter.params().iter().chain(ghosts.params()) {
        all.add_param(p);
    }
    for (n, v) in matter.defs().iter().chain(ghosts.defs()) {
        if all.def(n).is_some_and(|old| old != v) {
            return Err(OpeError::Invalid(format!("definition {n} differs between the sectors")));
        }
        all.add_def(n, v.clone());
    }
    for g in matter.generators().iter().chain(ghosts.generators()) {
        all.add_generator(&g.name, g.weight.clone(), g.parity, g.ghost)?;
    }
    let shift = matter.generators().len();
    for (&(a, b), s) in matter.table() {
        all.set_ope(a, b, s.clone());
    }
    for (&(a, b), s) in ghosts.table() {
        let s = remap(s, shift);
        all.set_ope(a + shift, b + shift, s);
    }
    for a in 0..shift {
        for b in 0..ghosts.generators().len() {
            all.set_ope(a, b + shift, PoleSeries::new());
        }
    }
    all.set_default_regular(matter.default_regular() || ghosts.default_regular());
    Ok(AlgebraBundle {
        matter: matter.clone(),
        ghosts: ghosts.clone(),
        combined: all,
    })
}

fn remap(s: &PoleSeries, shift: usize) -> PoleSeries {
    s.iter().map(|(n, e)| (n, shift_expr(e, shift))).collect()
}

/// Renumbers generators by `shift`, for embedding a sector into a bundle.
pub fn shift_expr(e: &FieldExpr, shift: usize) -> FieldExpr {
    use crate::ope::{Factor, FieldMonomial};
    e.terms()
        .map(|(m, c)| {
            let fs = m
                .factors()
                .iter()
                .map(|f| Factor::new(f.gen as usize + shift, f.deriv as u32))
                .collect();
            (FieldMonomial::from_sorted(fs), c.clone())
        })
        .collect()
}

/// `-(b'c) - 2(bc') - 2(b_W' c_W) - 3(b_W c_W')` in an algebra with the four W3 ghosts.
pub fn ghost_stress_w3(engine: &OpeEngine<'_>) -> Result<FieldExpr, OpeError> {
    ghost_stress(engine, &[("b_T", "c_T", 2), ("b_W", "c_W", 3)])
}

/// `Σ -(λ-1)(b'c) - λ(bc')` over the listed `(b, c, λ)` pairs, with λ = weight of b.
pub fn ghost_stress(engine: &OpeEngine<'_>, pairs: &[(&str, &str, i64)]) -> Result<FieldExpr, OpeError> {
    let alg = engine.algebra();
    let mut out = FieldExpr::zero();
    for &(b, c, lam) in pairs {
        let (bf, cf) = (alg.field(b)?, alg.field(c)?);
        let db_c = engine.nprod_expr(&engine.derivative(&bf)?, &cf)?;
        let b_dc = engine.nprod_expr(&bf, &engine.derivative(&cf)?)?;
        out = out.sub(&db_c.scale_int(lam - 1)).sub(&b_dc.scale_int(lam));
    }
    Ok(out)
}

/// Ghost stress tensor for W3^(2) (half-integral weights for the `G` ghosts).
pub fn ghost_stress_w32(engine: &OpeEngine<'_>) -> Result<FieldExpr, OpeError> {
    let alg = engine.algebra();
    let mut out = ghost_stress(engine, &[("b_T", "c_T", 2), ("b_U", "c_U", 1)])?;
    for (b, c) in [("bp", "cp"), ("bm", "cm")] {
        let (bf, cf) = (alg.field(b)?, alg.field(c)?);
        let db_c = engine.nprod_expr(&engine.derivative(&bf)?, &cf)?;
        let b_dc = engine.nprod_expr(&bf, &engine.derivative(&cf)?)?;
        out = out.sub(&db_c.scale(&rf(1, 2))).sub(&b_dc.scale(&rf(3, 2)));
    }
    Ok(out)
}

/// W3 matter plus ghosts at the given parameters.
pub fn w3_bundle(
    c: Option<&Rational>,
    g1: Option<&Rational>,
    g2: Option<&Rational>,
    mode: A2Mode,
) -> Result<AlgebraBundle, OpeError> {
    bundle(&w3_at(c, mode)?, &w3_ghosts(g1, g2)?)
}

pub fn w32_bundle(c: Option<&Rational>) -> Result<AlgebraBundle, OpeError> {
    bundle(&w32_at(c)?, &w32_ghosts())
}
