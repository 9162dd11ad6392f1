use proptest::prelude::{prop, prop_assert, prop_assert_eq, prop_assume, proptest, ProptestConfig};
use proptest::strategy::Strategy as Gen;

use super::*;
use crate::qla::{bundled, QlaFile, BUNDLED};
use crate::scalar::Rational;

fn k(n: i64) -> RationalFunction {
    RationalFunction::from_int(n)
}

fn half() -> RationalFunction {
    RationalFunction::from_ratio(1, 2)
}

fn omega(name: &str) -> Omega {
    let f = bundled(name).unwrap();
    Omega::new(&f.data, &f.twist).unwrap()
}

fn abelian() -> Omega {
    let f = bundled("so3").unwrap();
    let mut d = f.data.clone();
    d.c = Tensor::zeros(3, 1, 2);
    Omega::new(&d, &f.twist).unwrap()
}

fn mul(om: &Omega, xs: &[&OmegaElement]) -> OmegaElement {
    let mut acc = om.unit();
    for x in xs {
        acc = om.multiply(&acc, x).unwrap();
    }
    acc
}

fn canonical(om: &Omega, s: Sector, f: impl FnMut(&[usize], &[usize]) -> RationalFunction) -> OmegaElement {
    om.canonicalize(&OmegaElement::from_sector(s, Tensor::from_fn(om.dim(), s.len(), 0, f))).unwrap()
}

#[test]
fn symmetric_ghost_pair_vanishes() {
    let om = omega("so3");
    let x = canonical(&om, Sector::new(2, 0, 0), |u, _| if u == [0, 1] || u == [1, 0] { k(1) } else { k(0) });
    assert!(x.is_zero());
    let x = canonical(&om, Sector::new(2, 0, 0), |u, _| if u == [0, 0] { k(1) } else { k(0) });
    assert!(x.is_zero());
}

#[test]
fn chi_pair_reduction() {
    let om = omega("so3");
    let x = mul(&om, &[&om.chi(0), &om.chi(1)]);
    let want_sym = Tensor::from_fn(3, 2, 0, |u, _| if u == [0, 1] || u == [1, 0] { half() } else { k(0) });
    assert_eq!(x.sector(Sector::new(0, 2, 0)), Some(&want_sym));
    assert_eq!(x.sector(Sector::new(0, 1, 0)), om.chi(2).scale(&half()).sector(Sector::new(0, 1, 0)));
    assert_eq!(x.sectors().count(), 2);
    // the commutator is the bracket
    let y = mul(&om, &[&om.chi(1), &om.chi(0)]);
    assert_eq!(x.sub(&y), om.chi(2));
}

#[test]
fn canonicalize_is_idempotent_on_products() {
    let om = omega("super_ef");
    let q = om.build_q().unwrap();
    for x in [q.clone(), mul(&om, &[&om.b(0), &om.c(1), &om.chi(1)]), mul(&om, &[&om.chi(1), &om.chi(0)])] {
        assert_eq!(om.canonicalize(&x).unwrap(), x);
    }
}

#[test]
fn contraction_and_exchange() {
    let om = omega("so3");
    let one = om.unit();
    assert_eq!(mul(&om, &[&om.b(0), &om.c(0)]), one.sub(&mul(&om, &[&om.c(0), &om.b(0)])));
    assert_eq!(mul(&om, &[&om.b(0), &om.c(1)]), mul(&om, &[&om.c(1), &om.b(0)]).scale(&k(-1)));
    assert_eq!(mul(&om, &[&om.b(2), &om.chi(1)]), mul(&om, &[&om.chi(1), &om.b(2)]));
    assert_eq!(mul(&om, &[&om.chi(2), &om.c(0)]), mul(&om, &[&om.c(0), &om.chi(2)]));

    // bosonic ghost of the odd generator, with the twist sign against F
    let om = omega("super_ef");
    let (e, f) = (0, 1);
    assert_eq!(mul(&om, &[&om.b(f), &om.c(f)]), one_of(&om).add(&mul(&om, &[&om.c(f), &om.b(f)])));
    assert_eq!(mul(&om, &[&om.b(e), &om.chi(f)]), mul(&om, &[&om.chi(f), &om.b(e)]).scale(&k(-1)));
    assert_eq!(mul(&om, &[&om.b(f), &om.chi(f)]), mul(&om, &[&om.chi(f), &om.b(f)]));
}

fn one_of(om: &Omega) -> OmegaElement {
    om.unit()
}

#[test]
fn abelian_generators_commute() {
    let om = abelian();
    for i in 0..3 {
        for j in 0..3 {
            let d = mul(&om, &[&om.chi(i), &om.chi(j)]).sub(&mul(&om, &[&om.chi(j), &om.chi(i)]));
            assert!(d.is_zero());
        }
    }
    let q = om.build_q().unwrap();
    assert_eq!(q.sectors().map(|(s, _)| *s).collect::<Vec<_>>(), vec![Sector::new(1, 1, 0)]);
    assert_eq!(om.verify_nilpotent(&q).unwrap(), Nilpotency::Zero);
}

#[test]
fn so3_charge() {
    let om = omega("so3");
    let q = om.build_q().unwrap();
    let c = bundled("so3").unwrap().data.c;
    let want = Tensor::from_fn(3, 3, 0, |u, _| -(c.get(&[u[2]], &[u[0], u[1]]) * &half()));
    assert_eq!(q.sector(Sector::new(2, 0, 1)), Some(&want));
    assert_eq!(q.ghost_number(), GhostNumber::Definite(1));
    assert_eq!(om.verify_nilpotent(&q).unwrap(), Nilpotency::Zero);
}

/// The two-term charge written out index by index, then canonicalized.
fn two_term_charge(f: &QlaFile, om: &Omega) -> OmegaElement {
    let n = f.data.n;
    let lead = canonical(om, Sector::new(1, 1, 0), |u, _| if u[0] == u[1] { k(1) } else { k(0) });
    let ghost = canonical(om, Sector::new(2, 0, 1), |u, _| {
        let (nn, m, kk) = (u[0], u[1], u[2]);
        let mut s = RationalFunction::zero();
        for r in 0..n {
            for t in 0..n {
                s += &(f.twist.phi.get(&[r, t], &[m, nn]) * f.data.c.get(&[kk], &[r, t]));
            }
        }
        -(&s * &half())
    });
    lead.add(&ghost)
}

#[test]
fn lie_super_charge_is_two_term() {
    for name in ["so3", "super_ef"] {
        let f = bundled(name).unwrap();
        let om = Omega::new(&f.data, &f.twist).unwrap();
        let q = om.build_q().unwrap();
        assert_eq!(q, two_term_charge(&f, &om), "{name}");
    }
    let om = omega("super_ef");
    let ghost = om.build_q().unwrap();
    let ghost = ghost.sector(Sector::new(2, 0, 1)).unwrap();
    // c^E c^F b_F and c^F c^E b_F both survive: the F ghost is bosonic
    assert!(!ghost.get(&[0, 1, 1], &[]).is_zero());
    assert_eq!(ghost.get(&[0, 1, 1], &[]), ghost.get(&[1, 0, 1], &[]));
}

#[test]
fn bundled_charges_are_nilpotent() {
    for (name, _) in BUNDLED {
        let om = omega(name);
        let q = om.build_q().unwrap();
        assert_eq!(q.ghost_number(), GhostNumber::Definite(1), "{name}");
        assert_eq!(om.verify_nilpotent(&q).unwrap(), Nilpotency::Zero, "{name}");
    }
}

#[test]
fn mutated_so3_is_not_nilpotent() {
    let f = bundled("so3").unwrap();
    let mut d = f.data.clone();
    d.c.set(&[0], &[0, 1], k(1));
    d.c.set(&[0], &[1, 0], k(-1));
    let om = Omega::new(&d, &f.twist).unwrap();
    let Nilpotency::Residual(r) = om.verify_nilpotent(&om.build_q().unwrap()).unwrap() else {
        panic!("mutated data gave a nilpotent charge");
    };
    let got: Vec<Sector> = r.sectors().map(|(s, _)| *s).collect();
    assert_eq!(got, vec![Sector::new(3, 0, 1)]);
}

#[test]
fn ghost_numbers() {
    let om = omega("so3");
    assert_eq!(om.b(1).ghost_number(), GhostNumber::Definite(-1));
    let cxb = mul(&om, &[&om.c(0), &om.chi(1), &om.b(2)]);
    assert_eq!(cxb.ghost_number(), GhostNumber::Definite(0));
    assert_eq!(om.c(0).add(&om.b(0)).ghost_number(), GhostNumber::Mixed);
    assert_eq!(OmegaElement::zero(3).ghost_number(), GhostNumber::Zero);
}

#[test]
fn overflow_is_reported() {
    let om = omega("so3");
    let x = mul(&om, &[&om.chi(0), &om.chi(1)]);
    let e = om.multiply(&x, &om.chi(2)).unwrap_err();
    assert_eq!(e, QlaError::SectorOverflow { p: 0, q: 3, r: 0 });
    let bb = mul(&om, &[&om.b(0), &om.b(1)]);
    assert_eq!(om.multiply(&bb, &om.b(2)).unwrap_err(), QlaError::SectorOverflow { p: 0, q: 0, r: 3 });
}

// Independent model of so(3): fermionic ghosts on Λ(C^3) tensored with the
// adjoint representation, as exact 24 x 24 matrices.

type Mat = Vec<Vec<Rational>>;

fn zero_mat(d: usize) -> Mat {
    vec![vec![Rational::default(); d]; d]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zero_mat(d);
    for i in 0..d {
        for (kk, x) in a[i].iter().enumerate() {
            if *x == Rational::default() {
                continue;
            }
            for j in 0..d {
                out[i][j] += x * &b[kk][j];
            }
        }
    }
    out
}

struct Model {
    c: Vec<Mat>,
    b: Vec<Mat>,
    chi: Vec<Mat>,
}

fn so3_model() -> Model {
    let d = 24;
    let idx = |m: usize, v: usize| m * 3 + v;
    let sign = |m: usize, i: usize| if (m & ((1 << i) - 1)).count_ones() % 2 == 1 { -1 } else { 1 };
    let eps = |i: usize, j: usize, kk: usize| -> i64 {
        match (i, j, kk) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1,
            _ => 0,
        }
    };
    let mut m = Model {
        c: Vec::new(),
        b: Vec::new(),
        chi: Vec::new(),
    };
    for i in 0..3 {
        let (mut c, mut b, mut x) = (zero_mat(d), zero_mat(d), zero_mat(d));
        for occ in 0..8usize {
            for v in 0..3 {
                if occ & (1 << i) == 0 {
                    c[idx(occ | (1 << i), v)][idx(occ, v)] = Rational::from_integer(sign(occ, i).into());
                } else {
                    b[idx(occ ^ (1 << i), v)][idx(occ, v)] = Rational::from_integer(sign(occ, i).into());
                }
                for kk in 0..3 {
                    // χ_i e_v = C^k_{iv} e_k
                    x[idx(occ, kk)][idx(occ, v)] = Rational::from_integer(eps(i, v, kk).into());
                }
            }
        }
        m.c.push(c);
        m.b.push(b);
        m.chi.push(x);
    }
    m
}

fn represent(m: &Model, x: &OmegaElement) -> Mat {
    let d = 24;
    let mut out = zero_mat(d);
    for (s, t) in x.sectors() {
        for (u, _, coeff) in t.nonzero_entries() {
            let mut acc = zero_mat(d);
            for (i, row) in acc.iter_mut().enumerate() {
                row[i] = coeff.as_constant().unwrap();
            }
            for (pos, &i) in u.iter().enumerate() {
                let g = if pos < s.p {
                    &m.c[i]
                } else if pos < s.p + s.q {
                    &m.chi[i]
                } else {
                    &m.b[i]
                };
                acc = mat_mul(&acc, g);
            }
            for (o, a) in out.iter_mut().zip(acc) {
                for (y, z) in o.iter_mut().zip(a) {
                    *y += z;
                }
            }
        }
    }
    out
}

#[test]
fn so3_model_agrees() {
    let om = omega("so3");
    let m = so3_model();
    let q = represent(&m, &om.build_q().unwrap());
    assert!(q.iter().flatten().any(|x| *x != Rational::default()));
    assert_eq!(mat_mul(&q, &q), zero_mat(24));
}

fn sector_strategy() -> impl Gen<Value = Sector> {
    prop::sample::select(vec![
        Sector::new(0, 0, 0),
        Sector::new(1, 0, 0),
        Sector::new(0, 1, 0),
        Sector::new(0, 0, 1),
        Sector::new(1, 0, 1),
        Sector::new(1, 1, 0),
        Sector::new(0, 1, 1),
    ])
}

fn element(n: usize) -> impl Gen<Value = OmegaElement> {
    sector_strategy().prop_flat_map(move |s| {
        prop::collection::vec(-2i64..=2, n.pow(s.len() as u32)).prop_map(move |v| {
            let t = Tensor::from_fn(n, s.len(), 0, |u, _| k(v[crate::qla::tensor::flatten(u, n)]));
            OmegaElement::from_sector(s, t)
        })
    })
}

fn fits(xs: &[&OmegaElement]) -> bool {
    let tot = |f: fn(&Sector) -> usize| -> usize { xs.iter().map(|x| x.sectors().map(|(s, _)| f(s)).max().unwrap_or(0)).sum() };
    tot(|s| s.p) <= 4 && tot(|s| s.q) <= 2 && tot(|s| s.r) <= 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn multiplication_is_associative(name in prop::sample::select(vec!["so3", "super_ef", "lyubashenko"]),
                                     seed in (element(3), element(3), element(3))) {
        let om = omega(name);
        let n = om.dim();
        let shrink = |x: &OmegaElement| -> OmegaElement {
            let mut out = OmegaElement::zero(n);
            for (s, t) in x.sectors() {
                let small = Tensor::from_fn(n, s.len(), 0, |u, _| {
                    t.get(&u.iter().map(|&i| i % 3).collect::<Vec<_>>(), &[]).clone()
                });
                out = out.add(&OmegaElement::from_sector(*s, small));
            }
            om.canonicalize(&out).unwrap()
        };
        let (x, y, z) = (shrink(&seed.0), shrink(&seed.1), shrink(&seed.2));
        prop_assume!(fits(&[&x, &y, &z]));
        let l = om.multiply(&om.multiply(&x, &y).unwrap(), &z).unwrap();
        let r = om.multiply(&x, &om.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn reordering_paths_agree(x in element(3), y in element(3)) {
        for name in ["so3", "super_ef"] {
            let om = omega(name);
            let n = om.dim();
            let cut = |e: &OmegaElement| -> OmegaElement {
                let mut out = OmegaElement::zero(n);
                for (s, t) in e.sectors() {
                    out = out.add(&OmegaElement::from_sector(*s, Tensor::from_fn(n, s.len(), 0, |u, _| {
                        t.get(&u.iter().map(|&i| i % 3).collect::<Vec<_>>(), &[]).clone()
                    })));
                }
                out
            };
            let (x, y) = (cut(&x), cut(&y));
            let a = om.multiply_with(&x, &y, Strategy::LeftmostFirst).unwrap();
            let b = om.multiply_with(&x, &y, Strategy::RightmostFirst).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(om.canonicalize(&a).unwrap(), a);
        }
    }

    #[test]
    fn ghost_number_is_additive(x in element(3), y in element(3)) {
        let om = omega("so3");
        let (x, y) = (om.canonicalize(&x).unwrap(), om.canonicalize(&y).unwrap());
        let xy = om.multiply(&x, &y).unwrap();
        if let (GhostNumber::Definite(a), GhostNumber::Definite(b)) = (x.ghost_number(), y.ghost_number()) {
            prop_assert!(matches!(xy.ghost_number(), GhostNumber::Zero) || xy.ghost_number() == GhostNumber::Definite(a + b));
        }
    }

    #[test]
    fn so3_model_is_a_homomorphism(x in element(3), y in element(3)) {
        let om = omega("so3");
        let m = so3_model();
        let (x, y) = (om.canonicalize(&x).unwrap(), om.canonicalize(&y).unwrap());
        let xy = om.multiply(&x, &y).unwrap();
        prop_assert_eq!(represent(&m, &xy), mat_mul(&represent(&m, &x), &represent(&m, &y)));
    }
}

#[test]
fn display() {
    let om = omega("so3");
    assert_eq!(mul(&om, &[&om.b(0), &om.c(0)]).to_string(), "1 - c1 b1");
    assert_eq!(om.chi(1).scale(&RationalFunction::from_ratio(-3, 2)).to_string(), "-3/2*x2");
    assert_eq!(OmegaElement::zero(3).to_string(), "0");
    let q = omega("super_ef").build_q().unwrap();
    assert_eq!(q.to_string(), "c1 x1 + c2 x2 - 1/2*c1 c2 b2 - 1/2*c2 c1 b2");
}
