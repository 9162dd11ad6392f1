use std::collections::BTreeMap;

use crate::scalar::{RationalFunction, ScalarError, Var, Rational};

/// `∂^deriv` of generator number `gen`. Sorting is by `(gen, deriv)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub gen: u16,
    pub deriv: u16,
}

impl Factor {
    pub fn new(gen: usize, deriv: u32) -> Self {
        Factor {
            gen: gen as u16,
            deriv: deriv as u16,
        }
    }

    pub fn d(self, k: u32) -> Self {
        Factor {
            gen: self.gen,
            deriv: self.deriv + k as u16,
        }
    }
}

/// Right-nested normal product `N(f1, N(f2, ... fk))` with factors in
/// non-decreasing order. The empty monomial is the unit field.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldMonomial(pub(crate) Vec<Factor>);

impl FieldMonomial {
    pub fn unit() -> Self {
        FieldMonomial(Vec::new())
    }

    pub fn factor(f: Factor) -> Self {
        FieldMonomial(vec![f])
    }

    /// Wraps an already sorted factor list. Callers promise canonical order.
    pub fn from_sorted(factors: Vec<Factor>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0] <= w[1]));
        FieldMonomial(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Factor> {
        self.0.first().copied()
    }

    pub fn rest(&self) -> FieldMonomial {
        FieldMonomial(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn prepend(&self, f: Factor) -> FieldMonomial {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(f);
        v.extend_from_slice(&self.0);
        FieldMonomial(v)
    }
}

/// Finite linear combination of canonical monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FieldExpr {
    terms: BTreeMap<FieldMonomial, RationalFunction>,
}

impl FieldExpr {
    pub fn zero() -> Self {
        FieldExpr::default()
    }

    pub fn unit() -> Self {
        FieldExpr::monomial(FieldMonomial::unit())
    }

    pub fn scalar(c: RationalFunction) -> Self {
        FieldExpr::term(FieldMonomial::unit(), c)
    }

    pub fn monomial(m: FieldMonomial) -> Self {
        FieldExpr::term(m, RationalFunction::one())
    }

    pub fn factor(f: Factor) -> Self {
        FieldExpr::monomial(FieldMonomial::factor(f))
    }

    pub fn generator(gen: usize) -> Self {
        FieldExpr::factor(Factor::new(gen, 0))
    }

    pub fn term(m: FieldMonomial, c: RationalFunction) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        FieldExpr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FieldMonomial, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &FieldMonomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &FieldMonomial) -> RationalFunction {
        self.terms.get(m).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn add_term(&mut self, m: FieldMonomial, c: &RationalFunction) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &FieldExpr, c: &RationalFunction) {
        if c.is_zero() {
            return;
        }
        let one = c.is_one();
        for (m, k) in &other.terms {
            if one {
                self.add_term(m.clone(), k);
            } else {
                self.add_term(m.clone(), &(k * c));
            }
        }
    }

    pub fn add(&self, other: &FieldExpr) -> FieldExpr {
        let mut out = self.clone();
        out.add_scaled(other, &RationalFunction::one());
        out
    }

    pub fn sub(&self, other: &FieldExpr) -> FieldExpr {
        let mut out = self.clone();
        out.add_scaled(other, &RationalFunction::from_int(-1));
        out
    }

    pub fn scale(&self, c: &RationalFunction) -> FieldExpr {
        let mut out = FieldExpr::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn scale_int(&self, n: i64) -> FieldExpr {
        self.scale(&RationalFunction::from_int(n))
    }

    pub fn neg(&self) -> FieldExpr {
        self.scale(&RationalFunction::from_int(-1))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn try_map_coeffs(
        &self,
        mut f: impl FnMut(&RationalFunction) -> Result<RationalFunction, ScalarError>,
    ) -> Result<FieldExpr, ScalarError> {
        let mut out = FieldExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c)?);
        }
        Ok(out)
    }

    pub fn eval(&self, bindings: &[(Var, Rational)]) -> Result<FieldExpr, ScalarError> {
        self.try_map_coeffs(|c| c.eval(bindings))
    }

    /// Coefficient of the unit monomial if that is the only term.
    pub fn as_scalar(&self) -> Option<RationalFunction> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero()),
            1 => self
                .terms
                .get(&FieldMonomial::unit())
                .cloned(),
            _ => None,
        }
    }
}

impl FromIterator<(FieldMonomial, RationalFunction)> for FieldExpr {
    fn from_iter<I: IntoIterator<Item = (FieldMonomial, RationalFunction)>>(iter: I) -> Self {
        let mut out = FieldExpr::zero();
        for (m, c) in iter {
            out.add_term(m, &c);
        }
        out
    }
}

/// Singular part of an OPE: pole order `n >= 1` to the field `[AB]_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PoleSeries {
    poles: BTreeMap<u32, FieldExpr>,
}

impl PoleSeries {
    pub fn new() -> Self {
        PoleSeries::default()
    }

    pub fn is_regular(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn max_pole(&self) -> u32 {
        self.poles.keys().next_back().copied().unwrap_or(0)
    }

    pub fn get(&self, n: u32) -> Option<&FieldExpr> {
        self.poles.get(&n)
    }

    pub fn pole(&self, n: u32) -> FieldExpr {
        self.poles.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, &FieldExpr)> {
        self.poles.iter().map(|(&n, e)| (n, e))
    }

    pub fn set(&mut self, n: u32, e: FieldExpr) {
        assert!(n >= 1, "pole orders start at 1");
        if e.is_zero() {
            self.poles.remove(&n);
        } else {
            self.poles.insert(n, e);
        }
    }

    pub fn add_at(&mut self, n: u32, e: &FieldExpr, c: &RationalFunction) {
        if e.is_zero() || c.is_zero() {
            return;
        }
        let slot = self.poles.entry(n).or_default();
        slot.add_scaled(e, c);
        if slot.is_zero() {
            self.poles.remove(&n);
        }
    }

    pub fn add(&self, other: &PoleSeries) -> PoleSeries {
        let mut out = self.clone();
        for (n, e) in other.iter() {
            out.add_at(n, e, &RationalFunction::one());
        }
        out
    }

    pub fn sub(&self, other: &PoleSeries) -> PoleSeries {
        let mut out = self.clone();
        for (n, e) in other.iter() {
            out.add_at(n, e, &RationalFunction::from_int(-1));
        }
        out
    }

    pub fn scale(&self, c: &RationalFunction) -> PoleSeries {
        let mut out = PoleSeries::new();
        for (n, e) in self.iter() {
            out.add_at(n, e, c);
        }
        out
    }

    pub fn try_map(
        &self,
        mut f: impl FnMut(&FieldExpr) -> Result<FieldExpr, ScalarError>,
    ) -> Result<PoleSeries, ScalarError> {
        let mut out = PoleSeries::new();
        for (n, e) in self.iter() {
            out.set(n, f(e)?);
        }
        Ok(out)
    }
}

impl FromIterator<(u32, FieldExpr)> for PoleSeries {
    fn from_iter<I: IntoIterator<Item = (u32, FieldExpr)>>(iter: I) -> Self {
        let mut out = PoleSeries::new();
        for (n, e) in iter {
            out.add_at(n, &e, &RationalFunction::one());
        }
        out
    }
}
