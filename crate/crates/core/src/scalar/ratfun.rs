use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{MultiPoly, Rational};
use super::vars::Var;
use super::ScalarError;

/// Quotient of two polynomials in lowest terms.
///
/// The denominator is integral, primitive and has a positive leading
/// coefficient, so two equal functions are always structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl Default for RationalFunction {
    fn default() -> Self {
        RationalFunction::zero()
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        RationalFunction::from_poly(MultiPoly::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        RationalFunction::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn constant(q: Rational) -> Self {
        RationalFunction::from_poly(MultiPoly::constant(q))
    }

    pub fn var(v: Var) -> Self {
        RationalFunction::from_poly(MultiPoly::var(v))
    }

    /// Shorthand for a named parameter, registering it if needed.
    pub fn param(name: &str) -> Self {
        RationalFunction::var(Var::new(name))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RationalFunction::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RationalFunction::zero();
        }
        if let Some(d) = den.as_constant() {
            return RationalFunction {
                num: num.scale(&(Rational::one() / d)),
                den: MultiPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let (k, den) = den.primitive_rational();
        RationalFunction {
            num: num.scale(&(Rational::one() / k)),
            den,
        }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn from_rational(q: &Rational) -> Self {
        RationalFunction::constant(q.clone())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RationalFunction) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = other.as_constant() {
            return Ok(self.scale(&(Rational::one() / q)));
        }
        Ok(RationalFunction::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Substitutes values for some parameters; the rest stay symbolic.
    pub fn eval(&self, bindings: &[(Var, Rational)]) -> Result<Self, ScalarError> {
        let den = self.den.eval(bindings);
        if den.is_zero() {
            return Err(ScalarError::Pole {
                expr: self.to_string(),
            });
        }
        Ok(RationalFunction::normalized(self.num.eval(bindings), den))
    }

    pub fn eval_named(&self, bindings: &[(&str, Rational)]) -> Result<Self, ScalarError> {
        let b: Vec<(Var, Rational)> = bindings
            .iter()
            .map(|(n, q)| (Var::new(n), q.clone()))
            .collect();
        self.eval(&b)
    }

    /// Substitutes a rational function for one parameter.
    pub fn substitute(&self, v: Var, value: &RationalFunction) -> Result<Self, ScalarError> {
        let deg = self.num.degree_in(v).max(self.den.degree_in(v));
        if deg == 0 {
            return Ok(self.clone());
        }
        // homogenise both numerator and denominator with value = p/q
        let hom = |poly: &MultiPoly| -> MultiPoly {
            let coeffs = poly.coefficients_in(v);
            let mut out = MultiPoly::zero();
            for (e, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = c
                    .mul(&value.num.pow(e as u32))
                    .mul(&value.den.pow(deg - e as u32));
                out = out.add(&term);
            }
            out
        };
        RationalFunction::new(hom(&self.num), hom(&self.den)).map_err(|_| ScalarError::Pole {
            expr: self.to_string(),
        })
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    fn add_impl(&self, other: &RationalFunction, negate: bool) -> RationalFunction {
        let on = if negate { other.num.neg() } else { other.num.clone() };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RationalFunction {
                num: on,
                den: other.den.clone(),
            };
        }
        if self.den == other.den {
            let num = self.num.add(&on);
            if self.den.is_one() {
                return RationalFunction::from_poly(num);
            }
            return RationalFunction::normalized(num, self.den.clone());
        }
        if other.den.is_one() {
            return RationalFunction {
                num: self.num.add(&on.mul(&self.den)),
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            return RationalFunction {
                num: self.num.mul(&other.den).add(&on),
                den: other.den.clone(),
            };
        }
        RationalFunction::normalized(
            self.num.mul(&other.den).add(&on.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    fn mul_impl(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero();
        }
        if let Some(q) = other.as_constant() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_constant() {
            return other.scale(&q);
        }
        if self.den.is_one() && other.den.is_one() {
            return RationalFunction::from_poly(self.num.mul(&other.num));
        }
        RationalFunction::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Text in the coefficient grammar; re-parses to the same value.
    pub fn to_source(&self) -> String {
        self.to_string()
    }

    /// Wraps in parentheses when the text is not a single factor.
    pub fn to_factor_string(&self) -> String {
        let s = self.to_string();
        if self.den.is_one() && self.num.num_terms() <= 1 && !s.contains('/') {
            s
        } else {
            format!("({s})")
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num.fmt_with_parens(), self.den.fmt_with_parens())
        }
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        RationalFunction::from_int(n)
    }
}

impl From<Rational> for RationalFunction {
    fn from(q: Rational) -> Self {
        RationalFunction::constant(q)
    }
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl Add<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(rhs, false)
    }
}

impl Sub<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(rhs, true)
    }
}

impl Mul<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        self.mul_impl(rhs)
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        self.add_impl(&rhs, false)
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        self.add_impl(&rhs, true)
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        self.mul_impl(&rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl AddAssign<&RationalFunction> for RationalFunction {
    fn add_assign(&mut self, rhs: &RationalFunction) {
        *self = self.add_impl(rhs, false);
    }
}

impl SubAssign<&RationalFunction> for RationalFunction {
    fn sub_assign(&mut self, rhs: &RationalFunction) {
        *self = self.add_impl(rhs, true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> RationalFunction {
        RationalFunction::param("c")
    }
    fn k(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }
    fn q(n: i64, d: i64) -> RationalFunction {
        RationalFunction::from_ratio(n, d)
    }
    fn a() -> RationalFunction {
        k(32).div(&(&k(22) + &(&k(5) * &c()))).unwrap()
    }
    fn a1() -> RationalFunction {
        (&(&k(3) * &c()) - &k(6)).div(&(&k(44) + &(&k(10) * &c()))).unwrap()
    }

    #[test]
    fn halving() {
        let half = &a() * &q(1, 2);
        assert_eq!(half, k(16).div(&(&k(22) + &(&k(5) * &c()))).unwrap());
        assert_eq!(half.to_string(), "16/(5*c + 22)");
    }

    #[test]
    fn content_removal() {
        let x = (&(&k(2) * &c()) - &k(4)).div(&k(2)).unwrap();
        assert_eq!(x, &c() - &k(2));
        assert!(x.denom().is_one());
    }

    #[test]
    fn a2_consistent_closed_form() {
        let lhs = &(&a1() * &q(1, 2)) - &q(1, 12);
        let rhs = (&c() - &k(10)).div(&(&k(3) * &(&k(22) + &(&k(5) * &c())))).unwrap();
        assert_eq!(lhs, rhs);
        // independent check by evaluation at several rational points
        for (n, d) in [(1, 3), (-7, 2), (5, 11), (13, 1), (-2, 9)] {
            let x = Rational::new(n.into(), d.into());
            let a1v = (Rational::from_integer(3.into()) * &x - Rational::from_integer(6.into()))
                / (Rational::from_integer(44.into()) + Rational::from_integer(10.into()) * &x);
            let expect = a1v / Rational::from_integer(2.into())
                - Rational::new(1.into(), 12.into());
            assert_eq!(lhs.eval_named(&[("c", x)]).unwrap().as_constant(), Some(expect));
        }
    }

    #[test]
    fn evaluation() {
        let at = |r: &RationalFunction| r.eval_named(&[("c", Rational::from_integer(100.into()))]);
        assert_eq!(at(&a()).unwrap(), q(16, 261));
        assert_eq!(at(&a1()).unwrap(), q(49, 174));
        assert_eq!(at(&(&c() - &k(100))).unwrap(), k(0));
        let pole = k(1).div(&(&c() - &k(100))).unwrap();
        assert!(matches!(at(&pole), Err(ScalarError::Pole { .. })));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(c().div(&k(0)), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn cancellation_to_polynomial() {
        let x = &c() * &c();
        let y = (&x - &k(1)).div(&(&c() + &k(1))).unwrap();
        assert_eq!(y, &c() - &k(1));
    }

    #[test]
    fn substitution() {
        let g = RationalFunction::param("g1");
        let expr = (&g * &g).div(&(&g + &k(1))).unwrap();
        let val = k(1).div(&c()).unwrap();
        let got = expr.substitute(Var::new("g1"), &val).unwrap();
        let expect = k(1).div(&(&(&c() * &c()) + &c())).unwrap();
        assert_eq!(got, expect);
    }
}
