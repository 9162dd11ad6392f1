//! Free fermionic bc systems on truncated Fock spaces.
//!
//! This is an independent model of the OPE engine. Modes act on states of
//! the full Fock space; only the set of source states is truncated by level,
//! so every matrix element produced here is exact. Normal products use the
//! mode form of the contour definition
//!
//! ```text
//! N(A,R)_m = Σ_{n ≤ -h_A} A_n R_{m-n} + (-1)^{|A||R|} Σ_{n > -h_A} R_{m-n} A_n
//! ```
//!
//! and OPE coefficients are recovered from (anti)commutators through
//!
//! ```text
//! [A_p, B_q} = Σ_{j ≥ 0} binom(p + h_A - 1, j) ([AB]_{j+1})_{p+q}.
//! ```
//!
//! Mode numbers are stored doubled so that half-integral weights need no
//! special case. The vacuum is SL(2)-invariant: `X_m |0> = 0` for `m > -h_X`.

use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ope::{min_weight, Factor, FieldExpr, FieldMonomial, OpeAlgebra, OpeEngine, OpeError, Parity, PoleSeries};
use crate::scalar::{Rational, RationalFunction};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Ope(#[from] OpeError),
    #[error("not a free fermionic sector: {0}")]
    NotFree(String),
    #[error("generator {0} is not part of a bc system in this Fock space")]
    Foreign(String),
    #[error("coefficient {0} is symbolic; specialise the parameters first")]
    Symbolic(String),
    #[error("expression is zero or not homogeneous")]
    Inhomogeneous,
    #[error("weight {0} is not a multiple of 1/2")]
    Weight(Rational),
    #[error("level {level} does not determine pole {pole} of ({a}, {b}); use a larger level")]
    LevelTooSmall { a: String, b: String, pole: u32, level: u32 },
    #[error("pole 4 of the stress tensor is not a multiple of the identity")]
    NotCentral,
}

type R<T> = Result<T, OracleError>;

/// Generators `b` (weight `lambda`) and `c` (weight `1 - lambda`) with
/// `{b_m, c_n} = δ_{m+n,0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BcSystem {
    pub b: usize,
    pub c: usize,
    pub lambda: Rational,
}

/// Finds the bc systems of a free fermionic algebra from its OPEs.
pub fn bc_systems(alg: &OpeAlgebra) -> R<Vec<BcSystem>> {
    let e = OpeEngine::new(alg);
    let n = alg.generators().len();
    let mut partner = vec![None; n];
    for i in 0..n {
        if !alg.generator(i).parity.is_odd() {
            return Err(OracleError::NotFree(format!("{} is bosonic", alg.generator(i).name)));
        }
        for j in i..n {
            let s = e.ope_expr(&FieldExpr::generator(i), &FieldExpr::generator(j))?;
            if s.is_regular() {
                continue;
            }
            let unit_pole = s.max_pole() == 1 && s.pole(1) == FieldExpr::unit();
            if !unit_pole || i == j || partner[i].is_some() || partner[j].is_some() {
                return Err(OracleError::NotFree(format!(
                    "OPE of {} and {} is not a bc contraction",
                    alg.generator(i).name,
                    alg.generator(j).name
                )));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
    }
    let mut out = Vec::new();
    for (i, p) in partner.iter().enumerate() {
        let j = p.ok_or_else(|| OracleError::NotFree(format!("{} has no partner", alg.generator(i).name)))?;
        let (gi, gj) = (alg.generator(i), alg.generator(j));
        if gi.ghost >= 0 {
            continue;
        }
        if gj.ghost <= 0 {
            return Err(OracleError::NotFree(format!("{} and {} are both antighosts", gi.name, gj.name)));
        }
        if &gi.weight + &gj.weight != Rational::one() {
            return Err(OracleError::NotFree(format!("weights of {} and {} do not add to 1", gi.name, gj.name)));
        }
        out.push(BcSystem {
            b: i,
            c: j,
            lambda: gi.weight.clone(),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Mode {
    gen: u16,
    twice: i32,
}

/// Creation operators in increasing order, applied to the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Vec<Mode>);

pub type Vector = BTreeMap<State, Rational>;

fn add_into(v: &mut Vector, s: State, k: &Rational) {
    if k.is_zero() {
        return;
    }
    match v.entry(s) {
        Entry::Vacant(e) => {
            e.insert(k.clone());
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += k;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn half(twice: i32) -> Rational {
    Rational::new(twice.into(), 2.into())
}

/// States of level at most `level`, in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct FockSlice {
    pub level: u32,
    pub states: Vec<State>,
}

/// Matrix of one mode between states of a slice: column `i` is the image of
/// `states[i]`, left empty when that image lies above the slice.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMatrix {
    pub mode: Rational,
    pub columns: Vec<Vector>,
}

impl ModeMatrix {
    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nonzero_entries(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }
}

type Key = (Vec<Factor>, i32, State);

pub struct FockSpace<'a> {
    alg: &'a OpeAlgebra,
    systems: Vec<BcSystem>,
    partner: HashMap<u16, u16>,
    twice_weight: HashMap<u16, i32>,
    min_level: i32,
    cache: RefCell<HashMap<Key, Rc<Vector>>>,
}

impl<'a> FockSpace<'a> {
    pub fn new(alg: &'a OpeAlgebra, systems: Vec<BcSystem>) -> R<Self> {
        let mut partner = HashMap::new();
        let mut twice_weight = HashMap::new();
        let mut min_level = 0;
        for s in &systems {
            partner.insert(s.b as u16, s.c as u16);
            partner.insert(s.c as u16, s.b as u16);
            for g in [s.b, s.c] {
                let w = &alg.generator(g).weight * Rational::from_integer(2.into());
                if !w.is_integer() {
                    return Err(OracleError::Weight(alg.generator(g).weight.clone()));
                }
                let tw: i32 = w.to_integer().try_into().map_err(|_| OracleError::Weight(w.clone()))?;
                twice_weight.insert(g as u16, tw);
                // creation modes of negative level: 0 < m <= -h
                let mut t = -tw;
                while t > 0 {
                    min_level -= t;
                    t -= 2;
                }
            }
        }
        Ok(FockSpace {
            alg,
            systems,
            partner,
            twice_weight,
            min_level,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// The Fock space of every bc system of a free algebra.
    pub fn of_algebra(alg: &'a OpeAlgebra) -> R<Self> {
        FockSpace::new(alg, bc_systems(alg)?)
    }

    /// The Fock space of the bc systems touched by the given expressions.
    pub fn for_fields(alg: &'a OpeAlgebra, exprs: &[&FieldExpr]) -> R<Self> {
        let used: BTreeSet<usize> = exprs
            .iter()
            .flat_map(|e| e.monomials().flat_map(|m| m.factors().iter().map(|f| f.gen as usize)))
            .collect();
        let systems = bc_systems(alg)?
            .into_iter()
            .filter(|s| used.contains(&s.b) || used.contains(&s.c))
            .collect();
        FockSpace::new(alg, systems)
    }

    pub fn systems(&self) -> &[BcSystem] {
        &self.systems
    }

    /// Lowest level of any state, which is negative when some `c` has negative weight.
    pub fn min_level(&self) -> Rational {
        half(self.min_level)
    }

    fn tw(&self, gen: u16) -> R<i32> {
        self.twice_weight
            .get(&gen)
            .copied()
            .ok_or_else(|| OracleError::Foreign(self.alg.generator(gen as usize).name.clone()))
    }

    fn level(s: &State) -> i32 {
        s.0.iter().map(|m| -m.twice).sum()
    }

    pub fn state_level(&self, s: &State) -> Rational {
        half(Self::level(s))
    }

    pub fn slice(&self, level: u32) -> FockSlice {
        let top = 2 * level as i32;
        let mut cands = Vec::new();
        let mut gens: Vec<u16> = self.twice_weight.keys().copied().collect();
        gens.sort();
        for g in gens {
            let tw = self.twice_weight[&g];
            let mut t = -tw;
            while -t <= top - self.min_level {
                cands.push(Mode { gen: g, twice: t });
                t -= 2;
            }
        }
        cands.sort();
        // least level the remaining candidates can still add
        let mut low = vec![0; cands.len() + 1];
        for i in (0..cands.len()).rev() {
            low[i] = low[i + 1] + (-cands[i].twice).min(0);
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(c: &[Mode], low: &[i32], i: usize, lvl: i32, top: i32, cur: &mut Vec<Mode>, out: &mut Vec<State>) {
            if lvl + low[i] > top {
                return;
            }
            if i == c.len() {
                out.push(State(cur.clone()));
                return;
            }
            go(c, low, i + 1, lvl, top, cur, out);
            cur.push(c[i]);
            go(c, low, i + 1, lvl - c[i].twice, top, cur, out);
            cur.pop();
        }
        go(&cands, &low, 0, 0, top, &mut cur, &mut out);
        out.sort_by_key(|s| (Self::level(s), s.clone()));
        FockSlice { level, states: out }
    }

    /// `X_m |s>` for a generator `X`, with the anticommutation sign.
    fn basic(&self, gen: u16, twice: i32, s: &State) -> R<Option<(bool, State)>> {
        let tw = self.tw(gen)?;
        let op = Mode { gen, twice };
        if twice <= -tw {
            return Ok(match s.0.binary_search(&op) {
                Ok(_) => None,
                Err(pos) => {
                    let mut v = s.0.clone();
                    v.insert(pos, op);
                    Some((pos % 2 == 1, State(v)))
                }
            });
        }
        let partner = Mode {
            gen: self.partner[&gen],
            twice: -twice,
        };
        Ok(s.0.binary_search(&partner).ok().map(|pos| {
            let mut v = s.0.clone();
            v.remove(pos);
            (pos % 2 == 1, State(v))
        }))
    }

    fn factor_tw(&self, f: Factor) -> R<i32> {
        Ok(self.tw(f.gen)? + 2 * f.deriv as i32)
    }

    /// Mode `m` (doubled) of a right-nested monomial applied to a state.
    fn apply_mono(&self, fs: &[Factor], twice: i32, s: &State) -> R<Rc<Vector>> {
        if fs.len() <= 1 {
            return Ok(Rc::new(self.apply_mono_uncached(fs, twice, s)?));
        }
        let key = (fs.to_vec(), twice, s.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = Rc::new(self.apply_mono_uncached(fs, twice, s)?);
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn apply_mono_uncached(&self, fs: &[Factor], twice: i32, s: &State) -> R<Vector> {
        let mut out = Vector::new();
        let mut th = 0;
        for &f in fs {
            th += self.factor_tw(f)?;
        }
        let lvl = Self::level(s);
        if (twice + th).rem_euclid(2) != 0 || lvl - twice < self.min_level {
            return Ok(out);
        }
        match fs {
            [] => {
                if twice == 0 {
                    out.insert(s.clone(), Rational::one());
                }
            }
            [f] => {
                // (∂^k X)_m = (-1)^k Π_{j<k} (m + h + j) X_m
                let h = half(self.tw(f.gen)?);
                let m = half(twice);
                let mut k = Rational::one();
                for j in 0..f.deriv {
                    k *= -(&m + &h + Rational::from_integer(j.into()));
                }
                if let Some((neg, t)) = self.basic(f.gen, twice, s)? {
                    add_into(&mut out, t, &if neg { -k } else { k });
                }
            }
            [a, rest @ ..] => {
                let ta = self.factor_tw(*a)?;
                let a1 = [*a];
                let sign = if self.alg.factor_odd(*a) && odd(self.alg, rest) { -Rational::one() } else { Rational::one() };
                // A_n R_{m-n}, n <= -h_A, intermediate level lvl - m + n >= min
                let mut n = -ta;
                while lvl - twice + n >= self.min_level {
                    for (t, k) in self.apply_mono(rest, twice - n, s)?.iter() {
                        for (u, k2) in self.apply_mono(&a1, n, t)?.iter() {
                            add_into(&mut out, u.clone(), &(k * k2));
                        }
                    }
                    n -= 2;
                }
                // ± R_{m-n} A_n, n > -h_A, intermediate level lvl - n >= min
                let mut n = -ta + 2;
                while lvl - n >= self.min_level {
                    for (t, k) in self.apply_mono(&a1, n, s)?.iter() {
                        for (u, k2) in self.apply_mono(rest, twice - n, t)?.iter() {
                            add_into(&mut out, u.clone(), &(&sign * k * k2));
                        }
                    }
                    n += 2;
                }
            }
        }
        Ok(out)
    }

    fn apply_doubled(&self, x: &FieldExpr, twice: i32, v: &Vector) -> R<Vector> {
        let mut out = Vector::new();
        for (m, c) in x.terms() {
            let c = numeric(c)?;
            for (s, k) in v {
                for (t, k2) in self.apply_mono(m.factors(), twice, s)?.iter() {
                    add_into(&mut out, t.clone(), &(&c * k * k2));
                }
            }
        }
        Ok(out)
    }

    /// `x_m v` for a field with numeric coefficients.
    pub fn apply(&self, x: &FieldExpr, m: &Rational, v: &Vector) -> R<Vector> {
        self.apply_doubled(x, doubled(m)?, v)
    }

    /// Whether a mode shifting by `twice` maps `s` into the slice.
    fn lands_in(&self, s: &State, twice: i32, slice: &FockSlice) -> bool {
        let t = Self::level(s) - twice;
        t >= self.min_level && t <= 2 * slice.level as i32
    }

    fn matrix_doubled(&self, x: &FieldExpr, twice: i32, slice: &FockSlice) -> R<ModeMatrix> {
        let columns = slice
            .states
            .iter()
            .map(|s| {
                if self.lands_in(s, twice, slice) {
                    self.apply_doubled(x, twice, &unit_vector(s))
                } else {
                    Ok(Vector::new())
                }
            })
            .collect::<R<_>>()?;
        Ok(ModeMatrix {
            mode: half(twice),
            columns,
        })
    }

    /// Matrix of the mode `x_m` on the slice.
    pub fn field_modes(&self, x: &FieldExpr, m: &Rational, slice: &FockSlice) -> R<ModeMatrix> {
        self.matrix_doubled(x, doubled(m)?, slice)
    }

    /// `([AB]_{j+1})_r` for `j < poles`, solved from the (anti)commutators
    /// `[A_p, B_{r-p}}` at `p + h_A - 1 = 0, 1, ..., poles - 1`.
    pub fn ope_from_modes(
        &self,
        a: &FieldExpr,
        b: &FieldExpr,
        r: &Rational,
        poles: u32,
        slice: &FockSlice,
    ) -> R<Vec<ModeMatrix>> {
        let ga = self.alg.grading(a).ok_or(OracleError::Inhomogeneous)?;
        let gb = self.alg.grading(b).ok_or(OracleError::Inhomogeneous)?;
        let ta = doubled(&ga.weight)?;
        let tr = doubled(r)?;
        let sign = if ga.parity.is_odd() && gb.parity.is_odd() { Rational::one() } else { -Rational::one() };
        // C_i = [A_p, B_q} with p = i + 1 - h_A
        let mut comm: Vec<Vec<Vector>> = Vec::new();
        for i in 0..poles as i32 {
            let p = 2 * (i + 1) - ta;
            let q = tr - p;
            let col = slice
                .states
                .iter()
                .map(|s| {
                    if !self.lands_in(s, tr, slice) {
                        return Ok(Vector::new());
                    }
                    let e = unit_vector(s);
                    let mut ab = self.apply_doubled(a, p, &self.apply_doubled(b, q, &e)?)?;
                    for (t, k) in self.apply_doubled(b, q, &self.apply_doubled(a, p, &e)?)? {
                        add_into(&mut ab, t, &(&sign * k));
                    }
                    Ok(ab)
                })
                .collect::<R<Vec<_>>>()?;
            comm.push(col);
        }
        // binomial inversion: X_j = Σ_i (-1)^{j-i} binom(j, i) C_i
        let mut out = Vec::new();
        for j in 0..poles as usize {
            let mut columns = vec![Vector::new(); slice.states.len()];
            for (i, ci) in comm.iter().enumerate().take(j + 1) {
                let mut k = Rational::from_integer(binom(j, i).into());
                if (j - i) % 2 == 1 {
                    k = -k;
                }
                for (col, v) in columns.iter_mut().zip(ci) {
                    for (t, x) in v {
                        add_into(col, t.clone(), &(&k * x));
                    }
                }
            }
            out.push(ModeMatrix {
                mode: r.clone(),
                columns,
            });
        }
        Ok(out)
    }

    pub fn show_state(&self, s: &State) -> String {
        if s.0.is_empty() {
            return "|0>".into();
        }
        let ops: Vec<String> = s
            .0
            .iter()
            .map(|m| format!("{}[{}]", self.alg.generator(m.gen as usize).name, half(m.twice)))
            .collect();
        format!("{}|0>", ops.join(" "))
    }
}

fn odd(alg: &OpeAlgebra, fs: &[Factor]) -> bool {
    fs.iter().filter(|&&f| alg.factor_odd(f)).count() % 2 == 1
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn doubled(q: &Rational) -> R<i32> {
    let t = q * Rational::from_integer(2.into());
    if !t.is_integer() {
        return Err(OracleError::Weight(q.clone()));
    }
    t.to_integer().try_into().map_err(|_| OracleError::Weight(q.clone()))
}

fn numeric(c: &RationalFunction) -> R<Rational> {
    c.as_constant().ok_or_else(|| OracleError::Symbolic(c.to_string()))
}

pub fn unit_vector(s: &State) -> Vector {
    [(s.clone(), Rational::one())].into_iter().collect()
}

/// First matrix element where engine and oracle disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub a: String,
    pub b: String,
    pub pole: u32,
    pub mode: Rational,
    pub source: String,
    pub target: String,
    pub engine: Rational,
    pub oracle: Rational,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CrosscheckReport {
    pub level: u32,
    pub pairs_checked: usize,
    /// Nonzero matrix elements that agreed.
    pub entries_compared: usize,
    pub mismatch: Option<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the engine's OPEs of each pair with the oracle, pole by pole and
/// mode by mode, on the slice of the given level.
pub fn crosscheck(engine: &OpeEngine<'_>, pairs: &[(FieldExpr, FieldExpr)], level: u32) -> R<CrosscheckReport> {
    let alg = engine.algebra();
    let floor = min_weight(alg)?;
    let mut report = CrosscheckReport {
        level,
        ..Default::default()
    };
    for (a, b) in pairs {
        let space = FockSpace::for_fields(alg, &[a, b])?;
        let slice = space.slice(level);
        let ga = alg.grading(a).ok_or(OracleError::Inhomogeneous)?;
        let gb = alg.grading(b).ok_or(OracleError::Inhomogeneous)?;
        let series = engine.ope_expr(a, b)?;
        let top = (&ga.weight + &gb.weight - &floor).floor().to_integer();
        let poles = u32::try_from(top).unwrap_or(0).max(series.max_pole());
        let span = 2 * level as i32 - space.min_level;
        let parity = doubled(&(&ga.weight + &gb.weight))?.rem_euclid(2);
        let mut seen = vec![false; poles as usize];
        let mut tr = -span - (span + parity).rem_euclid(2);
        while tr <= span {
            let r = half(tr);
            let oracle = space.ope_from_modes(a, b, &r, poles, &slice)?;
            for (j, om) in oracle.iter().enumerate() {
                let pole = j as u32 + 1;
                let em = space.field_modes(&series.pole(pole), &r, &slice)?;
                if let Some(mm) = first_difference(&space, &slice, &em, om) {
                    report.mismatch = Some(Mismatch {
                        a: alg.show(a),
                        b: alg.show(b),
                        pole,
                        mode: r.clone(),
                        ..mm
                    });
                    return Ok(report);
                }
                seen[j] |= !em.is_zero();
                report.entries_compared += em.nonzero_entries();
            }
            tr += 2;
        }
        for (j, s) in seen.iter().enumerate() {
            let pole = j as u32 + 1;
            if !s && !series.pole(pole).is_zero() {
                return Err(OracleError::LevelTooSmall {
                    a: alg.show(a),
                    b: alg.show(b),
                    pole,
                    level,
                });
            }
        }
        report.pairs_checked += 1;
    }
    Ok(report)
}

fn first_difference(space: &FockSpace<'_>, slice: &FockSlice, e: &ModeMatrix, o: &ModeMatrix) -> Option<Mismatch> {
    for (i, (ce, co)) in e.columns.iter().zip(&o.columns).enumerate() {
        if ce == co {
            continue;
        }
        let keys: BTreeSet<&State> = ce.keys().chain(co.keys()).collect();
        for t in keys {
            let (x, y) = (ce.get(t).cloned().unwrap_or_default(), co.get(t).cloned().unwrap_or_default());
            if x != y {
                return Some(Mismatch {
                    a: String::new(),
                    b: String::new(),
                    pole: 0,
                    mode: Rational::zero(),
                    source: space.show_state(&slice.states[i]),
                    target: space.show_state(t),
                    engine: x,
                    oracle: y,
                });
            }
        }
    }
    None
}

/// Every unordered pair of generators, diagonal included.
pub fn generator_pairs(alg: &OpeAlgebra) -> Vec<(FieldExpr, FieldExpr)> {
    let n = alg.generators().len();
    (0..n)
        .flat_map(|i| (i..n).map(move |j| (FieldExpr::generator(i), FieldExpr::generator(j))))
        .collect()
}

/// `(1-λ) N(∂b, c) - λ N(b, ∂c)` for one bc system.
pub fn bc_stress(sys: &BcSystem) -> FieldExpr {
    let one = Rational::one();
    let term = |fs: Vec<Factor>| {
        let mut fs = fs;
        fs.sort();
        FieldMonomial::from_sorted(fs)
    };
    let (b, c) = (sys.b, sys.c);
    [
        (term(vec![Factor::new(b, 1), Factor::new(c, 0)]), &one - &sys.lambda),
        (term(vec![Factor::new(b, 0), Factor::new(c, 1)]), -sys.lambda.clone()),
    ]
    .into_iter()
    .map(|(m, k)| {
        // N(∂b, c) is stored as N(c, ∂b) when c sorts first; both factors are odd
        let flip = c < b;
        let k = if flip { -k } else { k };
        (m, RationalFunction::constant(k))
    })
    .collect()
}

/// A single bc system with `b` of weight `lambda`.
pub fn bc_algebra(lambda: &Rational) -> OpeAlgebra {
    let mut alg = OpeAlgebra::new("bc");
    alg.add_generator("b", lambda.clone(), Parity::Odd, -1).expect("fresh algebra");
    alg.add_generator("c", Rational::one() - lambda, Parity::Odd, 1).expect("fresh algebra");
    alg.set_ope(0, 1, [(1, FieldExpr::unit())].into_iter().collect());
    alg.set_ope(0, 0, PoleSeries::new());
    alg.set_ope(1, 1, PoleSeries::new());
    alg
}

/// Central charge of a single bc system of weight `lambda`, from the modes
/// of its stress tensor.
pub fn ghost_central_charge(lambda: &Rational, level: u32) -> R<Rational> {
    let alg = bc_algebra(lambda);
    let sys = BcSystem {
        b: 0,
        c: 1,
        lambda: lambda.clone(),
    };
    let t = bc_stress(&sys);
    let space = FockSpace::new(&alg, vec![sys])?;
    let slice = space.slice(level);
    let m = space.ope_from_modes(&t, &t, &Rational::zero(), 4, &slice)?.pop().expect("four poles");
    let k = m.columns.first().and_then(|c| c.get(&slice.states[0])).cloned().unwrap_or_default();
    for (s, col) in slice.states.iter().zip(&m.columns) {
        let want: Vector = if k.is_zero() { Vector::new() } else { [(s.clone(), k.clone())].into_iter().collect() };
        if *col != want {
            return Err(OracleError::NotCentral);
        }
    }
    Ok(k * Rational::from_integer(2.into()))
}

#[cfg(test)]
mod tests;
