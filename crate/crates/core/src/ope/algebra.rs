use std::collections::BTreeMap;

use num_traits::Zero;

use super::field::{Factor, FieldExpr, FieldMonomial, PoleSeries};
use super::OpeError;
use crate::scalar::{Rational, RationalFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: Rational,
    pub parity: Parity,
    pub ghost: i32,
}

/// Generators, parameters and the table of basic OPEs.
///
/// Each unordered pair is stored once, in the orientation it was declared;
/// the opposite orientation is recovered by the flip rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeAlgebra {
    pub name: String,
    params: Vec<String>,
    defs: Vec<(String, RationalFunction)>,
    generators: Vec<Generator>,
    table: BTreeMap<(usize, usize), PoleSeries>,
    default_regular: bool,
}

/// Grading of a homogeneous expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub weight: Rational,
    pub parity: Parity,
    pub ghost: i32,
}

impl OpeAlgebra {
    pub fn new(name: &str) -> Self {
        OpeAlgebra {
            name: name.to_owned(),
            params: Vec::new(),
            defs: Vec::new(),
            generators: Vec::new(),
            table: BTreeMap::new(),
            default_regular: false,
        }
    }

    pub fn add_param(&mut self, name: &str) {
        if !self.params.iter().any(|p| p == name) {
            self.params.push(name.to_owned());
        }
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn add_def(&mut self, name: &str, value: RationalFunction) {
        if let Some(slot) = self.defs.iter_mut().find(|(n, _)| n == name) {
            slot.1 = value;
        } else {
            self.defs.push((name.to_owned(), value));
        }
    }

    pub fn defs(&self) -> &[(String, RationalFunction)] {
        &self.defs
    }

    pub fn def(&self, name: &str) -> Option<&RationalFunction> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn add_generator(
        &mut self,
        name: &str,
        weight: Rational,
        parity: Parity,
        ghost: i32,
    ) -> Result<usize, OpeError> {
        if self.generator_index(name).is_some() || name == "one" {
            return Err(OpeError::DuplicateGenerator(name.to_owned()));
        }
        self.generators.push(Generator {
            name: name.to_owned(),
            weight,
            parity,
            ghost,
        });
        Ok(self.generators.len() - 1)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn gen(&self, name: &str) -> Result<usize, OpeError> {
        self.generator_index(name)
            .ok_or_else(|| OpeError::UnknownGenerator(name.to_owned()))
    }

    /// Field expression for a generator by name.
    pub fn field(&self, name: &str) -> Result<FieldExpr, OpeError> {
        Ok(FieldExpr::generator(self.gen(name)?))
    }

    pub fn default_regular(&self) -> bool {
        self.default_regular
    }

    /// When set, pairs absent from the table are regular instead of errors.
    pub fn set_default_regular(&mut self, on: bool) {
        self.default_regular = on;
    }

    /// Stores the OPE `a(z) b(w)`, replacing any entry for either orientation.
    pub fn set_ope(&mut self, a: usize, b: usize, series: PoleSeries) {
        self.table.remove(&(b, a));
        self.table.insert((a, b), series);
    }

    pub fn set_ope_named(
        &mut self,
        a: &str,
        b: &str,
        poles: Vec<(u32, FieldExpr)>,
    ) -> Result<(), OpeError> {
        let (ia, ib) = (self.gen(a)?, self.gen(b)?);
        self.set_ope(ia, ib, poles.into_iter().collect());
        Ok(())
    }

    pub fn table(&self) -> &BTreeMap<(usize, usize), PoleSeries> {
        &self.table
    }

    /// Entry for the pair in either orientation; `true` when it was stored as
    /// `(b, a)` and still needs flipping.
    pub fn lookup(&self, a: usize, b: usize) -> Result<Option<(bool, &PoleSeries)>, OpeError> {
        if let Some(s) = self.table.get(&(a, b)) {
            return Ok(Some((false, s)));
        }
        if let Some(s) = self.table.get(&(b, a)) {
            return Ok(Some((true, s)));
        }
        if self.default_regular {
            return Ok(None);
        }
        Err(OpeError::MissingPair {
            a: self.generators[a].name.clone(),
            b: self.generators[b].name.clone(),
        })
    }

    pub fn factor_weight(&self, f: Factor) -> Rational {
        &self.generators[f.gen as usize].weight + Rational::from_integer(f.deriv.into())
    }

    pub fn factor_odd(&self, f: Factor) -> bool {
        self.generators[f.gen as usize].parity.is_odd()
    }

    pub fn monomial_odd(&self, m: &FieldMonomial) -> bool {
        m.factors().iter().filter(|&&f| self.factor_odd(f)).count() % 2 == 1
    }

    pub fn monomial_grading(&self, m: &FieldMonomial) -> Grading {
        let mut weight = Rational::zero();
        let mut ghost = 0;
        for &f in m.factors() {
            weight += self.factor_weight(f);
            ghost += self.generators[f.gen as usize].ghost;
        }
        Grading {
            weight,
            parity: Parity::from_odd(self.monomial_odd(m)),
            ghost,
        }
    }

    /// Common grading of all terms, or `None` for zero / inhomogeneous input.
    pub fn grading(&self, e: &FieldExpr) -> Option<Grading> {
        let mut it = e.monomials().map(|m| self.monomial_grading(m));
        let first = it.next()?;
        if it.all(|g| g == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Number of generator factors (derivatives included) of a monomial.
    pub fn degree(&self, m: &FieldMonomial) -> usize {
        m.len()
    }
}
