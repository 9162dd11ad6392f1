use super::*;
use crate::cft::{canonical_w32_ghosts, ghost_stress, w3_ghosts};
use crate::scalar::rat;

fn lam2() -> OpeAlgebra {
    bc_algebra(&rat(2, 1))
}

fn state(space: &FockSpace<'_>, ops: &[(&str, i32)]) -> Vector {
    let alg = space.alg;
    let mut v = unit_vector(&State::default());
    for (name, m) in ops.iter().rev() {
        let f = alg.field(name).unwrap();
        v = space.apply(&f, &rat(*m as i64, 1), &v).unwrap();
    }
    v
}

#[test]
fn vacuum_and_ghost_number() {
    let alg = lam2();
    let space = FockSpace::of_algebra(&alg).unwrap();
    let b = alg.field("b").unwrap();
    let vac = unit_vector(&State::default());
    assert!(space.apply(&b, &rat(1, 1), &vac).unwrap().is_empty());
    assert!(space.apply(&b, &rat(-1, 1), &vac).unwrap().is_empty());
    assert!(!space.apply(&b, &rat(-2, 1), &vac).unwrap().is_empty());
    let e = OpeEngine::new(&alg);
    let bc = e.nprod_expr(&b, &alg.field("c").unwrap()).unwrap();
    let c1 = state(&space, &[("c", 1)]);
    let got = space.apply(&bc, &rat(0, 1), &c1).unwrap();
    let want: Vector = c1.iter().map(|(s, k)| (s.clone(), -k)).collect();
    assert_eq!(got, want);
    assert!(space.apply(&bc, &rat(0, 1), &vac).unwrap().is_empty());
}

#[test]
fn anticommutators() {
    let alg = lam2();
    let space = FockSpace::of_algebra(&alg).unwrap();
    let slice = space.slice(3);
    let (b, c) = (alg.field("b").unwrap(), alg.field("c").unwrap());
    for m in -4..=4 {
        for n in -4..=4 {
            for s in &slice.states {
                let v = unit_vector(s);
                let (mm, nn) = (rat(m, 1), rat(n, 1));
                let mut x = space.apply(&b, &mm, &space.apply(&c, &nn, &v).unwrap()).unwrap();
                for (t, k) in space.apply(&c, &nn, &space.apply(&b, &mm, &v).unwrap()).unwrap() {
                    add_into(&mut x, t, &k);
                }
                let want = if m + n == 0 { v.clone() } else { Vector::new() };
                assert_eq!(x, want);
            }
        }
    }
}

#[test]
fn stress_zero_mode_counts_level() {
    let alg = lam2();
    let sys = bc_systems(&alg).unwrap();
    let t = bc_stress(&sys[0]);
    let space = FockSpace::of_algebra(&alg).unwrap();
    let slice = space.slice(2);
    assert_eq!(space.min_level(), rat(-1, 1));
    let l0 = space.field_modes(&t, &rat(0, 1), &slice).unwrap();
    for (s, col) in slice.states.iter().zip(&l0.columns) {
        let lvl = space.state_level(s);
        let want: Vector = if lvl == rat(0, 1) { Vector::new() } else { [(s.clone(), lvl)].into_iter().collect() };
        assert_eq!(*col, want);
    }
}

#[test]
fn bc_contraction_is_identity() {
    let alg = lam2();
    let space = FockSpace::of_algebra(&alg).unwrap();
    let slice = space.slice(3);
    let (b, c) = (alg.field("b").unwrap(), alg.field("c").unwrap());
    let m = space.ope_from_modes(&b, &c, &rat(0, 1), 3, &slice).unwrap();
    let id = space.field_modes(&FieldExpr::unit(), &rat(0, 1), &slice).unwrap();
    assert_eq!(m[0], id);
    assert!(m[1].is_zero() && m[2].is_zero());
}

#[test]
fn central_charges() {
    assert_eq!(ghost_central_charge(&rat(2, 1), 2).unwrap(), rat(-26, 1));
    assert_eq!(ghost_central_charge(&rat(3, 1), 2).unwrap(), rat(-74, 1));
    assert_eq!(ghost_central_charge(&rat(1, 1), 2).unwrap(), rat(-2, 1));
    assert_eq!(ghost_central_charge(&rat(3, 2), 2).unwrap(), rat(-11, 1));
}

fn small_pairs(alg: &OpeAlgebra, e: &OpeEngine<'_>) -> Vec<(FieldExpr, FieldExpr)> {
    let (b, c) = (alg.field("b").unwrap(), alg.field("c").unwrap());
    let bc = e.nprod_expr(&b, &c).unwrap();
    vec![(b.clone(), c.clone()), (e.derivative(&b).unwrap(), c), (bc.clone(), bc)]
}

#[test]
fn engine_agrees_on_small_pairs() {
    let alg = lam2();
    let e = OpeEngine::new(&alg);
    let rep = crosscheck(&e, &small_pairs(&alg, &e), 4).unwrap();
    assert!(rep.passed(), "{:?}", rep.mismatch);
    assert_eq!(rep.pairs_checked, 3);
    assert!(rep.entries_compared > 0);
}

#[test]
fn stress_tensor_weights() {
    let alg = w3_ghosts(Some(&rat(0, 1)), Some(&rat(0, 1))).unwrap();
    let e = OpeEngine::new(&alg);
    let t = ghost_stress(&e, &[("b_T", "c_T", 2)]).unwrap();
    let ct = alg.field("c_T").unwrap();
    let rep = crosscheck(&e, &[(t.clone(), ct.clone())], 4).unwrap();
    assert!(rep.passed(), "{:?}", rep.mismatch);
    assert_eq!(e.ope_expr(&t, &ct).unwrap().pole(2), ct.scale_int(-1));
}

#[test]
fn mutant_engine_is_caught() {
    let alg = lam2();
    let sys = bc_systems(&alg).unwrap();
    let e = OpeEngine::mutant_without_wick_binomial(&alg);
    let mut pairs = small_pairs(&alg, &e);
    let bc = pairs[2].0.clone();
    pairs.push((bc_stress(&sys[0]), bc));
    let rep = crosscheck(&e, &pairs, 4).unwrap();
    let m = rep.mismatch.expect("mutation must be detected");
    assert_eq!(m.pole, 3);
    let good = crosscheck(&OpeEngine::new(&alg), &pairs, 4).unwrap();
    assert!(good.passed());
}

#[test]
fn results_are_stable_in_level() {
    let alg = lam2();
    let space = FockSpace::of_algebra(&alg).unwrap();
    let (s4, s6) = (space.slice(4), space.slice(6));
    let e = OpeEngine::new(&alg);
    let (a, b) = small_pairs(&alg, &e).pop().unwrap();
    for r in -2..=2 {
        let m4 = space.ope_from_modes(&a, &b, &rat(r, 1), 3, &s4).unwrap();
        let m6 = space.ope_from_modes(&a, &b, &rat(r, 1), 3, &s6).unwrap();
        for (x, y) in m4.iter().zip(&m6) {
            assert_eq!(x.columns[..], y.columns[..s4.states.len()]);
        }
    }
}

#[test]
fn symbolic_and_bosonic_inputs_are_rejected() {
    let vir = crate::ope::parse_algebra(crate::cft::VIRASORO_ALG).unwrap();
    assert!(matches!(bc_systems(&vir), Err(OracleError::NotFree(_))));
    let alg = w3_ghosts(None, None).unwrap();
    assert!(matches!(bc_systems(&alg), Err(OracleError::NotFree(_))));
}

#[test]
fn bundled_free_sectors_small_level() {
    let t = std::time::Instant::now();
    for alg in [w3_ghosts(Some(&rat(0, 1)), Some(&rat(0, 1))).unwrap(), canonical_w32_ghosts()] {
        let e = OpeEngine::new(&alg);
        let n = alg.generators().len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                pairs.push((FieldExpr::generator(i), FieldExpr::generator(j)));
            }
        }
        let rep = crosscheck(&e, &pairs, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.mismatch);
        eprintln!("{} {:?}", rep.entries_compared, t.elapsed());
    }
}
