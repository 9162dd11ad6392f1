//! OPEs and normal products of canonical monomials.
//!
//! Rules used, for `n >= 1` and `[XY]_0 = N(X, Y)`:
//!
//! * `[∂A B]_n = -(n-1) [AB]_{n-1}`, `[A ∂B]_n = ∂[AB]_n + (n-1) [AB]_{n-1}`
//! * `[BA]_n = ± Σ_{l>=n} (-1)^l / (l-n)! ∂^{l-n} [AB]_l`
//! * `[A N(B,Y)]_n = ± N(B, [AY]_n) + Σ_{m=1}^{n} C(n-1, m-1) [[AB]_m Y]_{n-m}`
//! * `N(A, N(B,Y)) = ± N(B, N(A,Y)) + Σ_{l>=1} (-1)^{l-1} / l! N(∂^l [AB]_l, Y)`
//! * `N(N(A,R), K) = N(A, N(R,K)) + Σ_{l>=1} 1/l! (N(∂^l A, [RK]_l) ± N(∂^l R, [AK]_l))`
//!
//! A composite right argument is always opened with the Wick rule; a composite
//! left argument against a single factor goes through the flip rule, so the
//! recursion never revisits a pair.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::One;

use super::algebra::OpeAlgebra;
use super::field::{Factor, FieldExpr, FieldMonomial, PoleSeries};
use super::OpeError;
use crate::scalar::{Rational, RationalFunction};

type R<T> = Result<T, OpeError>;

pub const DEFAULT_FUEL: u64 = 20_000_000;

/// Evaluation session over one algebra. Results are memoised for the life of
/// the session; a session is not shared between threads.
pub struct OpeEngine<'a> {
    alg: &'a OpeAlgebra,
    factor_cache: RefCell<HashMap<(Factor, Factor), Rc<PoleSeries>>>,
    ope_cache: RefCell<HashMap<(FieldMonomial, FieldMonomial), Rc<PoleSeries>>>,
    nprod_cache: RefCell<HashMap<(FieldMonomial, FieldMonomial), Rc<FieldExpr>>>,
    deriv_cache: RefCell<HashMap<FieldMonomial, Rc<FieldExpr>>>,
    fuel: Cell<u64>,
    wick_binomial: bool,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn inv_factorial(n: u32) -> RationalFunction {
    RationalFunction::constant(Rational::new(BigInt::one(), factorial(n)))
}

fn sign_rf(negative: bool) -> RationalFunction {
    RationalFunction::from_int(if negative { -1 } else { 1 })
}

impl<'a> OpeEngine<'a> {
    pub fn new(alg: &'a OpeAlgebra) -> Self {
        OpeEngine::with_fuel(alg, DEFAULT_FUEL)
    }

    pub fn with_fuel(alg: &'a OpeAlgebra, fuel: u64) -> Self {
        OpeEngine {
            alg,
            factor_cache: RefCell::default(),
            ope_cache: RefCell::default(),
            nprod_cache: RefCell::default(),
            deriv_cache: RefCell::default(),
            fuel: Cell::new(fuel),
            wick_binomial: true,
        }
    }

    /// Deliberately broken variant that drops the binomial factor of the Wick
    /// rule. Used to check that the cross-checks can tell.
    #[doc(hidden)]
    pub fn mutant_without_wick_binomial(alg: &'a OpeAlgebra) -> Self {
        let mut e = OpeEngine::new(alg);
        e.wick_binomial = false;
        e
    }

    pub fn algebra(&self) -> &'a OpeAlgebra {
        self.alg
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel.get()
    }

    fn burn(&self) -> R<()> {
        let f = self.fuel.get();
        if f == 0 {
            return Err(OpeError::FuelExhausted);
        }
        self.fuel.set(f - 1);
        Ok(())
    }

    fn odd_f(&self, f: Factor) -> bool {
        self.alg.factor_odd(f)
    }

    fn odd_m(&self, m: &FieldMonomial) -> bool {
        self.alg.monomial_odd(m)
    }

    // ---- derivatives ----

    pub fn derivative(&self, e: &FieldExpr) -> R<FieldExpr> {
        let mut out = FieldExpr::zero();
        for (m, c) in e.terms() {
            out.add_scaled(&*self.derivative_monomial(m)?, c);
        }
        Ok(out)
    }

    pub fn derivative_n(&self, e: &FieldExpr, k: u32) -> R<FieldExpr> {
        let mut x = e.clone();
        for _ in 0..k {
            x = self.derivative(&x)?;
        }
        Ok(x)
    }

    pub fn derivative_monomial(&self, m: &FieldMonomial) -> R<Rc<FieldExpr>> {
        if let Some(hit) = self.deriv_cache.borrow().get(m) {
            return Ok(hit.clone());
        }
        self.burn()?;
        let fs = m.factors();
        let mut out = FieldExpr::zero();
        for i in 0..fs.len() {
            let tail = FieldMonomial::from_sorted(fs[i + 1..].to_vec());
            let mut x = (*self.nprod_factor(fs[i].d(1), &tail)?).clone();
            for j in (0..i).rev() {
                x = self.nprod_factor_expr(fs[j], &x)?;
            }
            out.add_scaled(&x, &RationalFunction::one());
        }
        let out = Rc::new(out);
        self.deriv_cache.borrow_mut().insert(m.clone(), out.clone());
        Ok(out)
    }

    // ---- normal products ----

    pub fn nprod_expr(&self, x: &FieldExpr, y: &FieldExpr) -> R<FieldExpr> {
        let mut out = FieldExpr::zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                out.add_scaled(&*self.nprod(mx, my)?, &(cx * cy));
            }
        }
        Ok(out)
    }

    fn nprod_expr_mono(&self, x: &FieldExpr, y: &FieldMonomial) -> R<FieldExpr> {
        let mut out = FieldExpr::zero();
        for (mx, cx) in x.terms() {
            out.add_scaled(&*self.nprod(mx, y)?, cx);
        }
        Ok(out)
    }

    fn nprod_factor_expr(&self, f: Factor, y: &FieldExpr) -> R<FieldExpr> {
        let mut out = FieldExpr::zero();
        for (my, cy) in y.terms() {
            out.add_scaled(&*self.nprod_factor(f, my)?, cy);
        }
        Ok(out)
    }

    fn nprod_factor(&self, f: Factor, y: &FieldMonomial) -> R<Rc<FieldExpr>> {
        self.nprod(&FieldMonomial::factor(f), y)
    }

    /// Canonical form of `N(x, y)`.
    pub fn nprod(&self, x: &FieldMonomial, y: &FieldMonomial) -> R<Rc<FieldExpr>> {
        if x.is_unit() {
            return Ok(Rc::new(FieldExpr::monomial(y.clone())));
        }
        if y.is_unit() {
            return Ok(Rc::new(FieldExpr::monomial(x.clone())));
        }
        let key = (x.clone(), y.clone());
        if let Some(hit) = self.nprod_cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        self.burn()?;
        let out = if x.len() == 1 {
            self.nprod_single(x.factors()[0], y)?
        } else {
            self.nprod_composite(x, y)?
        };
        let out = Rc::new(out);
        self.nprod_cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn nprod_single(&self, f: Factor, y: &FieldMonomial) -> R<FieldExpr> {
        let g = y.factors()[0];
        let rest = y.rest();
        if f < g || (f == g && !self.odd_f(f)) {
            return Ok(FieldExpr::monomial(y.prepend(f)));
        }
        let corrections = |scale: &RationalFunction| -> R<FieldExpr> {
            let series = self.factor_ope(f, g)?;
            let mut out = FieldExpr::zero();
            for (l, e) in series.iter() {
                let d = self.derivative_n(e, l)?;
                let sign = if l % 2 == 1 { 1 } else { -1 };
                let c = &(&inv_factorial(l) * &RationalFunction::from_int(sign)) * scale;
                out.add_scaled(&self.nprod_expr_mono(&d, &rest)?, &c);
            }
            Ok(out)
        };
        if f == g {
            // odd factor against itself
            return corrections(&RationalFunction::from_ratio(1, 2));
        }
        let inner = self.nprod_factor(f, &rest)?;
        let mut out = self.nprod_factor_expr(g, &inner)?;
        if self.odd_f(f) && self.odd_f(g) {
            out = out.neg();
        }
        out.add_scaled(&corrections(&RationalFunction::one())?, &RationalFunction::one());
        Ok(out)
    }

    fn nprod_composite(&self, x: &FieldMonomial, y: &FieldMonomial) -> R<FieldExpr> {
        let a = x.factors()[0];
        let r = x.rest();
        let ra = FieldMonomial::factor(a);
        let inner = self.nprod(&r, y)?;
        let mut out = self.nprod_factor_expr(a, &inner)?;
        let ry = self.ope(&r, y)?;
        for (l, e) in ry.iter() {
            out.add_scaled(&self.nprod_factor_expr(a.d(l), e)?, &inv_factorial(l));
        }
        let ay = self.ope(&ra, y)?;
        let sign = sign_rf(self.odd_f(a) && self.odd_m(&r));
        for (l, e) in ay.iter() {
            let dr = self.derivative_n(&FieldExpr::monomial(r.clone()), l)?;
            let c = &inv_factorial(l) * &sign;
            out.add_scaled(&self.nprod_expr(&dr, e)?, &c);
        }
        Ok(out)
    }

    // ---- OPEs ----

    pub fn ope_expr(&self, x: &FieldExpr, y: &FieldExpr) -> R<PoleSeries> {
        let mut out = PoleSeries::new();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let s = self.ope(mx, my)?;
                let c = cx * cy;
                for (n, e) in s.iter() {
                    out.add_at(n, e, &c);
                }
            }
        }
        Ok(out)
    }

    fn ope_expr_mono(&self, x: &FieldExpr, y: &FieldMonomial) -> R<PoleSeries> {
        let mut out = PoleSeries::new();
        for (mx, cx) in x.terms() {
            let s = self.ope(mx, y)?;
            for (n, e) in s.iter() {
                out.add_at(n, e, cx);
            }
        }
        Ok(out)
    }

    /// Singular part of `x(z) y(w)`.
    pub fn ope(&self, x: &FieldMonomial, y: &FieldMonomial) -> R<Rc<PoleSeries>> {
        if x.is_unit() || y.is_unit() {
            return Ok(Rc::new(PoleSeries::new()));
        }
        if x.len() == 1 && y.len() == 1 {
            return self.factor_ope(x.factors()[0], y.factors()[0]);
        }
        let key = (x.clone(), y.clone());
        if let Some(hit) = self.ope_cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        self.burn()?;
        let out = if y.len() >= 2 {
            self.wick(x, y)?
        } else {
            let rev = self.ope(y, x)?;
            self.flip(&rev, self.odd_m(x) && self.odd_m(y))?
        };
        let out = Rc::new(out);
        self.ope_cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn wick(&self, x: &FieldMonomial, y: &FieldMonomial) -> R<PoleSeries> {
        let b = y.factors()[0];
        let rest = y.rest();
        let mut out = PoleSeries::new();
        let sign = sign_rf(self.odd_m(x) && self.odd_f(b));
        let xy = self.ope(x, &rest)?;
        for (n, e) in xy.iter() {
            out.add_at(n, &self.nprod_factor_expr(b, e)?, &sign);
        }
        let xb = self.ope(x, &FieldMonomial::factor(b))?;
        for (m, e) in xb.iter() {
            out.add_at(m, &self.nprod_expr_mono(e, &rest)?, &RationalFunction::one());
            let inner = self.ope_expr_mono(e, &rest)?;
            for (k, f) in inner.iter() {
                let n = m + k;
                let c = if self.wick_binomial {
                    RationalFunction::constant(Rational::from_integer(binomial(n - 1, m - 1)))
                } else {
                    RationalFunction::one()
                };
                out.add_at(n, f, &c);
            }
        }
        Ok(out)
    }

    /// Given `[AB]`, returns `[BA]`; `both_odd` is `|A||B| = 1`.
    pub fn flip(&self, ab: &PoleSeries, both_odd: bool) -> R<PoleSeries> {
        let mut out = PoleSeries::new();
        let top = ab.max_pole();
        for n in 1..=top {
            let mut acc = FieldExpr::zero();
            for l in n..=top {
                let Some(e) = ab.get(l) else { continue };
                let d = self.derivative_n(e, l - n)?;
                let sign = if l % 2 == 0 { 1 } else { -1 };
                acc.add_scaled(&d, &(&inv_factorial(l - n) * &RationalFunction::from_int(sign)));
            }
            if both_odd {
                acc = acc.neg();
            }
            out.set(n, acc);
        }
        Ok(out)
    }

    /// OPE of two single (possibly differentiated) generators.
    pub fn factor_ope(&self, f: Factor, g: Factor) -> R<Rc<PoleSeries>> {
        if let Some(hit) = self.factor_cache.borrow().get(&(f, g)) {
            return Ok(hit.clone());
        }
        let out = if g.deriv > 0 {
            let p = self.factor_ope(f, Factor { deriv: g.deriv - 1, ..g })?;
            let mut out = PoleSeries::new();
            for (n, e) in p.iter() {
                out.add_at(n, &self.derivative(e)?, &RationalFunction::one());
                out.add_at(n + 1, e, &RationalFunction::from_int(n as i64));
            }
            out
        } else if f.deriv > 0 {
            let p = self.factor_ope(Factor { deriv: f.deriv - 1, ..f }, g)?;
            let mut out = PoleSeries::new();
            for (n, e) in p.iter() {
                out.add_at(n + 1, e, &RationalFunction::from_int(-(n as i64)));
            }
            out
        } else {
            self.burn()?;
            match self.alg.lookup(f.gen as usize, g.gen as usize)? {
                None => PoleSeries::new(),
                Some((false, s)) => s.clone(),
                Some((true, s)) => self.flip(s, self.odd_f(f) && self.odd_f(g))?,
            }
        };
        let out = Rc::new(out);
        self.factor_cache.borrow_mut().insert((f, g), out.clone());
        Ok(out)
    }

    /// Canonical form of the right-nested product of the given factors.
    pub fn nested(&self, factors: &[Factor]) -> R<FieldExpr> {
        let mut x = FieldExpr::unit();
        for &f in factors.iter().rev() {
            x = self.nprod_factor_expr(f, &x)?;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ope::Parity;
    use crate::scalar::rat;

    fn virasoro() -> OpeAlgebra {
        let mut a = OpeAlgebra::new("vir");
        a.add_param("c");
        let t = a.add_generator("T", rat(2, 1), Parity::Even, 0).unwrap();
        let c = RationalFunction::param("c");
        let tf = FieldExpr::generator(t);
        a.set_ope(
            t,
            t,
            [
                (4, FieldExpr::scalar(c.scale(&rat(1, 2)))),
                (2, tf.scale(&RationalFunction::from_int(2))),
                (1, FieldExpr::factor(Factor::new(t, 1))),
            ]
            .into_iter()
            .collect(),
        );
        a
    }

    fn bc(lambda: i64) -> OpeAlgebra {
        let mut a = OpeAlgebra::new("bc");
        let b = a.add_generator("b", rat(lambda, 1), Parity::Odd, -1).unwrap();
        let c = a.add_generator("c", rat(1 - lambda, 1), Parity::Odd, 1).unwrap();
        a.set_default_regular(true);
        a.set_ope(b, c, [(1, FieldExpr::unit())].into_iter().collect());
        a
    }

    fn mono(fs: &[(usize, u32)]) -> FieldMonomial {
        FieldMonomial::from_sorted(fs.iter().map(|&(g, d)| Factor::new(g, d)).collect())
    }

    #[test]
    fn t_against_tt() {
        let alg = virasoro();
        let e = OpeEngine::new(&alg);
        let s = e.ope(&mono(&[(0, 0)]), &mono(&[(0, 0), (0, 0)])).unwrap();
        let c = RationalFunction::param("c");
        assert_eq!(s.pole(6), FieldExpr::scalar(c.scale_int(3)));
        assert_eq!(s.pole(5), FieldExpr::zero());
        assert_eq!(
            s.pole(4),
            FieldExpr::generator(0).scale(&(&c + &RationalFunction::from_int(8)))
        );
        assert_eq!(s.pole(3), FieldExpr::factor(Factor::new(0, 1)).scale_int(3));
        assert_eq!(s.pole(2), FieldExpr::monomial(mono(&[(0, 0), (0, 0)])).scale_int(4));
        let dtt = e.derivative(&FieldExpr::monomial(mono(&[(0, 0), (0, 0)]))).unwrap();
        assert_eq!(s.pole(1), dtt);
    }

    #[test]
    fn swap_of_derivative() {
        let alg = virasoro();
        let e = OpeEngine::new(&alg);
        // N(T', T) = N(T, T') - 1/6 T'''
        let got = e.nprod(&mono(&[(0, 1)]), &mono(&[(0, 0)])).unwrap();
        let mut want = FieldExpr::monomial(mono(&[(0, 0), (0, 1)]));
        want.add_term(mono(&[(0, 3)]), &RationalFunction::from_ratio(-1, 6));
        assert_eq!(*got, want);
    }

    #[test]
    fn flip_twice_is_identity() {
        let alg = virasoro();
        let e = OpeEngine::new(&alg);
        let s = e.ope(&mono(&[(0, 0)]), &mono(&[(0, 0), (0, 1)])).unwrap();
        let back = e.flip(&e.flip(&s, false).unwrap(), false).unwrap();
        assert_eq!(back, *s);
    }

    #[test]
    fn ghost_central_charges() {
        for (lambda, cc) in [(2, -26), (3, -74), (1, -2)] {
            let alg = bc(lambda);
            let e = OpeEngine::new(&alg);
            // T = (1-λ) N(∂b, c) - λ N(b, ∂c)
            let mut t = FieldExpr::zero();
            t.add_term(mono(&[(0, 1), (1, 0)]), &RationalFunction::from_int(1 - lambda));
            t.add_term(mono(&[(0, 0), (1, 1)]), &RationalFunction::from_int(-lambda));
            let s = e.ope_expr(&t, &t).unwrap();
            assert_eq!(s.pole(4), FieldExpr::scalar(RationalFunction::from_ratio(cc, 2)));
            assert_eq!(s.pole(2), t.scale_int(2));
            assert_eq!(s.pole(1), e.derivative(&t).unwrap());
            let sc = e.ope_expr(&t, &FieldExpr::generator(1)).unwrap();
            assert_eq!(sc.pole(2), FieldExpr::generator(1).scale_int(1 - lambda));
        }
    }

    #[test]
    fn odd_square_vanishes() {
        let alg = bc(2);
        let e = OpeEngine::new(&alg);
        let got = e.nprod(&mono(&[(1, 0)]), &mono(&[(1, 0)])).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn missing_pair_is_named() {
        let mut alg = virasoro();
        alg.add_generator("W", rat(3, 1), Parity::Even, 0).unwrap();
        let e = OpeEngine::new(&alg);
        let err = e.ope(&mono(&[(0, 0)]), &mono(&[(1, 0)])).unwrap_err();
        assert_eq!(
            err,
            OpeError::MissingPair {
                a: "T".into(),
                b: "W".into()
            }
        );
    }
}
