use super::{ghost_stress_w3, w3_ghosts};
use crate::ope::{FieldExpr, OpeAlgebra, OpeEngine, OpeError, Parity, PoleSeries};
use crate::scalar::{Rational, RationalFunction};

/// Images of the generators of `source` as fields of `host`.
#[derive(Clone, Debug)]
pub struct GhostTransform {
    pub images: Vec<FieldExpr>,
}

impl GhostTransform {
    /// The image of an arbitrary expression, obtained by replacing every
    /// factor and re-normal-ordering right-nested.
    pub fn apply(&self, host: &OpeEngine<'_>, e: &FieldExpr) -> Result<FieldExpr, OpeError> {
        let mut out = FieldExpr::zero();
        for (m, c) in e.terms() {
            let mut acc = FieldExpr::unit();
            for f in m.factors().iter().rev() {
                let img = host.derivative_n(&self.images[f.gen as usize], f.deriv as u32)?;
                acc = host.nprod_expr(&img, &acc)?;
            }
            out.add_scaled(&acc, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairMismatch {
    pub a: String,
    pub b: String,
    pub expected: PoleSeries,
    pub found: PoleSeries,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TransformReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<PairMismatch>,
    /// `None` when the stress-tensor comparison does not apply.
    pub stress_invariant: Option<bool>,
}

impl TransformReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.stress_invariant != Some(false)
    }
}

/// Checks that the images of the `source` generators in `host` satisfy the
/// OPE table of `source`, pair by pair.
pub fn verify_transform(
    source: &OpeAlgebra,
    host: &OpeAlgebra,
    map: &GhostTransform,
) -> Result<TransformReport, OpeError> {
    let se = OpeEngine::new(source);
    let he = OpeEngine::new(host);
    let n = source.generators().len();
    let mut report = TransformReport::default();
    for a in 0..n {
        for b in a..n {
            let (fa, fb) = (FieldExpr::generator(a), FieldExpr::generator(b));
            let want_src = se.ope_expr(&fa, &fb)?;
            let mut expected = PoleSeries::new();
            for (k, e) in want_src.iter() {
                expected.set(k, map.apply(&he, e)?);
            }
            let found = he.ope_expr(&map.images[a], &map.images[b])?;
            report.pairs_checked += 1;
            if found != expected {
                report.mismatches.push(PairMismatch {
                    a: source.generator(a).name.clone(),
                    b: source.generator(b).name.clone(),
                    expected,
                    found,
                });
            }
        }
    }
    Ok(report)
}

/// Canonical fields expressed through the deformed W3 ghosts:
/// `c_T = c~_T - (g1+g2)/2 N(b~_T, N(c~_W', c~_W))`,
/// `b_W = b~_W - (g1-g2)/2 N(b~_T', N(b~_T, c~_W))`, the others unchanged.
pub fn w3_ghost_transform(
    host: &OpeEngine<'_>,
    g1: &RationalFunction,
    g2: &RationalFunction,
    drop_bw_correction: bool,
) -> Result<GhostTransform, OpeError> {
    let alg = host.algebra();
    let f = |n: &str| alg.field(n);
    let (ct, bt, cw, bw) = (f("c_T")?, f("b_T")?, f("c_W")?, f("b_W")?);
    let half = RationalFunction::from_ratio(1, 2);
    let kc = &(g1 + g2) * &half;
    let kb = &(g1 - g2) * &half;
    let dcw = host.derivative(&cw)?;
    let corr_c = host.nprod_expr(&bt, &host.nprod_expr(&dcw, &cw)?)?;
    let corr_b = host.nprod_expr(&host.derivative(&bt)?, &host.nprod_expr(&bt, &cw)?)?;
    let c_t = ct.sub(&corr_c.scale(&kc));
    let b_w = if drop_bw_correction { bw } else { bw.sub(&corr_b.scale(&kb)) };
    Ok(GhostTransform {
        images: vec![c_t, bt, cw, b_w],
    })
}

fn param_or(v: Option<&Rational>, name: &str) -> RationalFunction {
    v.map(|q| RationalFunction::constant(q.clone()))
        .unwrap_or_else(|| RationalFunction::param(name))
}

pub fn verify_ghost_transform_w3(g1: Option<&Rational>, g2: Option<&Rational>) -> Result<TransformReport, OpeError> {
    verify_ghost_transform_w3_with(g1, g2, false)
}

/// The deformed-to-canonical map for the W3 ghosts, plus the invariance of
/// the ghost stress tensor when `g1 = 0` (imposed when `g1` is symbolic).
pub fn verify_ghost_transform_w3_with(
    g1: Option<&Rational>,
    g2: Option<&Rational>,
    drop_bw_correction: bool,
) -> Result<TransformReport, OpeError> {
    let zero = Rational::from_integer(0.into());
    let canonical = w3_ghosts(Some(&zero), Some(&zero))?;
    let host = w3_ghosts(g1, g2)?;
    let (k1, k2) = (param_or(g1, "g1"), param_or(g2, "g2"));
    let map = w3_ghost_transform(&OpeEngine::new(&host), &k1, &k2, drop_bw_correction)?;
    let mut report = verify_transform(&canonical, &host, &map)?;

    if g1.is_none_or(|v| *v == zero) {
        let host0 = w3_ghosts(Some(&zero), g2)?;
        let he = OpeEngine::new(&host0);
        let map0 = w3_ghost_transform(&he, &RationalFunction::zero(), &k2, drop_bw_correction)?;
        let direct = ghost_stress_w3(&he)?;
        let via = map0.apply(&he, &ghost_stress_w3(&OpeEngine::new(&canonical))?)?;
        report.stress_invariant = Some(direct == via);
    }
    Ok(report)
}

/// Free ghosts for W3^(2): four bc pairs with all other OPEs regular.
pub fn canonical_w32_ghosts() -> OpeAlgebra {
    let mut alg = OpeAlgebra::new("w32_ghosts_free");
    let w = |n: i64, d: i64| Rational::new(n.into(), d.into());
    for (n, wt, gh) in [
        ("c_T", w(-1, 1), 1),
        ("b_T", w(2, 1), -1),
        ("c_U", w(0, 1), 1),
        ("b_U", w(1, 1), -1),
        ("cp", w(-1, 2), 1),
        ("bp", w(3, 2), -1),
        ("cm", w(-1, 2), 1),
        ("bm", w(3, 2), -1),
    ] {
        alg.add_generator(n, wt, Parity::Odd, gh).unwrap();
    }
    alg.set_default_regular(true);
    for (b, c) in [("b_T", "c_T"), ("b_U", "c_U"), ("bp", "cp"), ("bm", "cm")] {
        let (ib, ic) = (alg.gen(b).unwrap(), alg.gen(c).unwrap());
        alg.set_ope(ib, ic, [(1, FieldExpr::unit())].into_iter().collect());
    }
    alg
}

/// `b~_T = b_T - 2 N(c_T, N(b_U', b_U))` and `c~_U = c_U - 4 N(b_U, N(c+, c-))`
/// inside the free ghosts reproduce the deformed table.
pub fn verify_ghost_transform_w32() -> Result<TransformReport, OpeError> {
    let deformed = super::w32_ghosts();
    let host = canonical_w32_ghosts();
    let he = OpeEngine::new(&host);
    let f = |n: &str| host.field(n);
    let mut images: Vec<FieldExpr> = deformed
        .generators()
        .iter()
        .map(|g| host.field(&g.name))
        .collect::<Result<_, _>>()?;
    let dbu = he.derivative(&f("b_U")?)?;
    let corr_b = he.nprod_expr(&f("c_T")?, &he.nprod_expr(&dbu, &f("b_U")?)?)?;
    let corr_c = he.nprod_expr(&f("b_U")?, &he.nprod_expr(&f("cp")?, &f("cm")?)?)?;
    images[deformed.gen("b_T")?] = f("b_T")?.sub(&corr_b.scale_int(2));
    images[deformed.gen("c_U")?] = f("c_U")?.sub(&corr_c.scale_int(4));
    verify_transform(&deformed, &host, &GhostTransform { images })
}
