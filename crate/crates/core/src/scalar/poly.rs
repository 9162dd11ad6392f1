//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::vars::Var;

pub type Rational = BigRational;

/// Power product `x_1^e_1 ... x_k^e_k`, stored sparsely and sorted by variable.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the lowest-numbered variable, and so on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        out.push((va, ea));
                        i += 1;
                    } else if vb < va {
                        out.push((vb, eb));
                        j += 1;
                    } else {
                        out.push((va, ea + eb));
                        i += 1;
                        j += 1;
                    }
                }
                (Some(&t), None) => {
                    out.push(t);
                    i += 1;
                }
                (None, Some(&t)) => {
                    out.push(t);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    /// `self / other` if every exponent of `other` is dominated.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let d = other.0[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - d)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `v` from the monomial, returning its exponent and the rest.
    fn split(&self, v: Var) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for &(w, e) in &self.0 {
            if w == v {
                exp = e;
            } else {
                rest.push((w, e));
            }
        }
        (exp, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if vb < va {
                        return Ordering::Less;
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in the registered parameters with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::one(), q);
        }
        MultiPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        MultiPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        MultiPoly::term(Rational::one(), Monomial::var(v, 1))
    }

    pub fn term(q: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, q) in it {
            p.add_term(m, q);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, q)| m.is_one() && q.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }

    /// Constant term if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, q)| q.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(q);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + q;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.add_term(m.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.add_term(m.clone(), -q.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> MultiPoly {
        if q.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, q: &Rational) -> MultiPoly {
        if q.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * q)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        if let Some(q) = other.as_constant() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_constant() {
            return other.scale(&q);
        }
        let mut out = MultiPoly::zero();
        for (m, q) in &self.terms {
            for (n, r) in &other.terms {
                out.add_term(m.mul(n), q * r);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (dm, dq) = d.leading()?;
        if let Some(q) = d.as_constant() {
            return Some(self.scale(&(Rational::one() / q)));
        }
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rq)) = rem.leading() {
            let m = rm.div(dm)?;
            let q = rq / dq;
            rem = rem.sub(&d.mul_term(&m, &q));
            quot.add_term(m, q);
        }
        Some(quot)
    }

    /// Substitutes rational values for some of the variables.
    pub fn eval(&self, bindings: &[(Var, Rational)]) -> MultiPoly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = MultiPoly::zero();
        for (m, q) in &self.terms {
            let mut coeff = q.clone();
            let mut rest = Vec::with_capacity(m.0.len());
            for &(v, e) in &m.0 {
                match bindings.iter().find(|(w, _)| *w == v) {
                    Some((_, val)) => coeff *= num_traits::pow(val.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Substitutes a polynomial for one variable.
    pub fn substitute(&self, v: Var, value: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        let mut powers: Vec<MultiPoly> = vec![MultiPoly::one()];
        for (m, q) in &self.terms {
            let (e, rest) = m.split(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap().mul(value);
                powers.push(next);
            }
            out = out.add(&powers[e as usize].mul_term(&rest, q));
        }
        out
    }

    pub fn derivative(&self, v: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, q) in &self.terms {
            let (e, rest) = m.split(v);
            if e > 0 {
                let mon = rest.mul(&Monomial::var(v, e - 1));
                out.add_term(mon, q * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Coefficients with respect to `v`, indexed by the power of `v`.
    pub fn coefficients_in(&self, v: Var) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.degree_in(v) as usize + 1];
        for (m, q) in &self.terms {
            let (e, rest) = m.split(v);
            out[e as usize].add_term(rest, q.clone());
        }
        out
    }

    fn from_coefficients(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            out = out.add(&c.mul_term(&Monomial::var(v, e as u32), &Rational::one()));
        }
        out
    }

    /// Splits `self = q * p` with `p` integral, primitive and with positive
    /// leading coefficient.
    pub fn primitive_rational(&self) -> (Rational, MultiPoly) {
        if self.is_zero() {
            return (Rational::one(), MultiPoly::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for q in self.terms.values() {
            num_gcd = num_gcd.gcd(q.numer());
            den_lcm = den_lcm.lcm(q.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        let p = self.scale(&(Rational::one() / &content));
        (content, p)
    }

    /// Greatest common divisor, normalised to be integral, primitive and with
    /// positive leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() {
            return other.primitive_rational().1;
        }
        if other.is_zero() {
            return self.primitive_rational().1;
        }
        if self.is_constant() || other.is_constant() {
            return MultiPoly::one();
        }
        if self == other {
            return self.primitive_rational().1;
        }
        let v = match self.vars().union(&other.vars()).next() {
            Some(&v) => v,
            None => return MultiPoly::one(),
        };
        let ca = self.coefficients_in(v);
        let cb = other.coefficients_in(v);
        let conta = gcd_all(&ca);
        let contb = gcd_all(&cb);
        let content = conta.gcd(&contb);
        let mut a: Vec<MultiPoly> = ca.iter().map(|c| c.div_exact(&conta).unwrap()).collect();
        let mut b: Vec<MultiPoly> = cb.iter().map(|c| c.div_exact(&contb).unwrap()).collect();
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.len() == 1 {
                // primitive and constant in v: a unit
                a = vec![MultiPoly::one()];
                break;
            }
            let r = pseudo_remainder(&a, &b);
            if r.iter().all(MultiPoly::is_zero) {
                a = b;
                break;
            }
            let cr = gcd_all(&r);
            let r: Vec<MultiPoly> = r.iter().map(|c| c.div_exact(&cr).unwrap()).collect();
            a = b;
            b = trim(r);
        }
        let g = MultiPoly::from_coefficients(v, &a).mul(&content);
        g.primitive_rational().1
    }

    pub fn fmt_with_parens(&self) -> String {
        if self.terms.len() > 1 {
            format!("({self})")
        } else {
            self.to_string()
        }
    }
}

fn trim(mut v: Vec<MultiPoly>) -> Vec<MultiPoly> {
    while v.len() > 1 && v.last().map(MultiPoly::is_zero).unwrap_or(false) {
        v.pop();
    }
    v
}

fn gcd_all(cs: &[MultiPoly]) -> MultiPoly {
    let mut g = MultiPoly::zero();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Sparse pseudo-remainder of `a` by `b` (both dense in the main variable,
/// `deg a >= deg b`).
fn pseudo_remainder(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c.mul(lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        next.pop();
        r = trim(next);
        if r.is_empty() {
            r.push(MultiPoly::zero());
        }
    }
    r
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, q) in self.terms.iter().rev() {
            let neg = q.is_negative();
            let abs = q.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                parts.push(fmt_rational(&abs));
            }
            for &(v, e) in &m.0 {
                if e == 1 {
                    parts.push(v.name());
                } else {
                    parts.push(format!("{}^{}", v.name(), e));
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> MultiPoly {
        MultiPoly::var(Var::new("c"))
    }
    fn g1() -> MultiPoly {
        MultiPoly::var(Var::new("g1"))
    }
    fn k(n: i64) -> MultiPoly {
        MultiPoly::from_int(n)
    }

    #[test]
    fn grlex_order() {
        let cv = Var::new("c");
        let g = Var::new("g1");
        assert!(Monomial::var(cv, 2) > Monomial::var(g, 1));
        assert!(Monomial::var(cv, 1) > Monomial::var(g, 1));
        assert!(Monomial::var(g, 2) > Monomial::var(cv, 1));
        assert!(Monomial::one() < Monomial::var(g, 1));
    }

    #[test]
    fn exact_division() {
        let a = c().add(&k(3));
        let b = c().sub(&g1());
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&b), Some(a));
        assert_eq!(p.div_exact(&c().add(&k(1))), None);
    }

    #[test]
    fn univariate_gcd() {
        let a = c().sub(&k(100)).mul(&c().scale(&Rational::from_integer(5.into())).add(&k(22)));
        let b = c().sub(&k(100)).mul(&c().add(&k(1)));
        assert_eq!(a.gcd(&b), c().sub(&k(100)));
        assert_eq!(a.gcd(&c().add(&k(7))), MultiPoly::one());
    }

    #[test]
    fn multivariate_gcd() {
        let f = c().mul(&g1()).add(&k(2));
        let a = f.mul(&c().sub(&g1())).mul(&g1());
        let b = f.mul(&c().add(&g1())).mul(&c());
        assert_eq!(a.gcd(&b), f);
        let h = g1().pow(2).sub(&c());
        assert_eq!(h.mul(&h).gcd(&h.mul(&c())), h.primitive_rational().1);
    }

    #[test]
    fn display() {
        let p = c().scale(&Rational::new(3.into(), 2.into())).sub(&k(6));
        assert_eq!(p.to_string(), "3/2*c - 6");
        assert_eq!(c().pow(2).mul(&g1()).neg().to_string(), "-c^2*g1");
    }
}
