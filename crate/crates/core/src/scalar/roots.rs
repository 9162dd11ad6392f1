use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{MultiPoly, Rational};
use super::vars::Var;
use super::ScalarError;

const TRIAL_LIMIT: u64 = 2_000_000;

/// All rational roots of a univariate polynomial, ascending.
pub fn rational_roots(p: &MultiPoly) -> Result<Vec<Rational>, ScalarError> {
    if p.is_zero() {
        return Err(ScalarError::ZeroPolynomial);
    }
    let vars = p.vars();
    if vars.len() > 1 {
        return Err(ScalarError::NotUnivariate {
            vars: vars.iter().map(|v| v.name()).collect(),
        });
    }
    let Some(&v) = vars.iter().next() else {
        return Ok(Vec::new());
    };
    let coeffs = integer_coefficients(p, v);
    let mut roots = BTreeSet::new();
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        roots.insert(Rational::zero());
    }
    let coeffs = &coeffs[low..];
    if coeffs.len() == 1 {
        return Ok(roots.into_iter().collect());
    }
    let a0 = coeffs[0].abs();
    let an = coeffs[coeffs.len() - 1].abs();
    let ps = divisors(&a0).ok_or(ScalarError::CoefficientTooLarge)?;
    let qs = divisors(&an).ok_or(ScalarError::CoefficientTooLarge)?;
    for q in &qs {
        for pnum in &ps {
            if pnum.gcd(q) != BigInt::one() {
                continue;
            }
            for sign in [1, -1] {
                let num = pnum * BigInt::from(sign);
                if is_root(coeffs, &num, q) {
                    roots.insert(Rational::new(num, q.clone()));
                }
            }
        }
    }
    Ok(roots.into_iter().collect())
}

/// Coefficients of `p` in `v` scaled to coprime integers, lowest degree first.
fn integer_coefficients(p: &MultiPoly, v: Var) -> Vec<BigInt> {
    let (_, prim) = p.primitive_rational();
    prim.coefficients_in(v)
        .into_iter()
        .map(|c| {
            let q = c.as_constant().unwrap();
            debug_assert!(q.is_integer());
            q.to_integer()
        })
        .collect()
}

/// Evaluates the homogenised form `sum a_i p^i q^(n-i)`.
fn is_root(coeffs: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    let n = coeffs.len() - 1;
    let mut total = BigInt::zero();
    let mut ppow = BigInt::one();
    let mut qpows = vec![BigInt::one(); n + 1];
    for i in 1..=n {
        qpows[i] = &qpows[i - 1] * q;
    }
    for (i, c) in coeffs.iter().enumerate() {
        total += c * &ppow * &qpows[n - i];
        ppow *= p;
    }
    total.is_zero()
}

/// Positive divisors, or `None` when trial division cannot finish.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut rest = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(TRIAL_LIMIT);
    while &d * &d <= rest {
        if d > limit {
            // leftover cofactor might be composite of two large primes
            return None;
        }
        let mut e = 0;
        while (&rest % &d).is_zero() {
            rest /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for dv in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    if divs.len() > 1 << 20 {
        return None;
    }
    Some(divs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> MultiPoly {
        MultiPoly::var(Var::new("c"))
    }
    fn k(n: i64) -> MultiPoly {
        MultiPoly::from_int(n)
    }
    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn factored_input() {
        let p = c().sub(&k(100)).mul(&c().scale(&r(5, 1)).add(&k(22)));
        assert_eq!(rational_roots(&p).unwrap(), vec![r(-22, 5), r(100, 1)]);
    }

    #[test]
    fn no_rational_roots() {
        let p = c().mul(&c()).add(&k(1));
        assert!(rational_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn zero_root_and_constants() {
        let p = c().pow(3).sub(&c().scale(&r(1, 4)));
        assert_eq!(rational_roots(&p).unwrap(), vec![r(-1, 2), r(0, 1), r(1, 2)]);
        assert!(rational_roots(&k(7)).unwrap().is_empty());
    }

    #[test]
    fn rejects_multivariate() {
        let p = c().add(&MultiPoly::var(Var::new("g1")));
        assert!(matches!(
            rational_roots(&p),
            Err(ScalarError::NotUnivariate { .. })
        ));
    }
}
