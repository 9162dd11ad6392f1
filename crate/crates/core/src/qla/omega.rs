//! The algebra of constraints `χ_i`, ghosts `c^i` and antighosts `b_i`.
//!
//! An element is stored per sector `(p, q, r)` as the coefficient tensor of
//! the words `c^{a1}…c^{ap} χ_{j1}…χ_{jq} b_{k1}…b_{kr}`, indices in word
//! order. Products are concatenated and sorted into this order with
//!
//! ```text
//! b_i c^k = -c^j (σ~^{-1})^{nk}_{ji} b_n + δ^k_i
//! b_m χ_n = φ^{kl}_{mn} χ_k b_l
//! χ_m c^n = c^l φ^{kn}_{lm} χ_k
//! ```
//!
//! and then brought to canonical form: the c-block coefficient is projected
//! with the antisymmetrizer of `σ~` (read with the rightmost `c` as the first
//! factor), the b-block with the same projector from the right, and the
//! `σ`-antisymmetric part of a `χχ` block is traded for `½ C χ`. Only
//! sectors up to `(4, 2, 2)` are supported, which covers `Q²`.

use std::collections::BTreeMap;
use std::fmt;

use super::tensor::{flatten, pow, unflatten, SparseMap};
use super::{antisym_unchecked, twisted, QlaData, QlaError, Tensor, TwistData};
use crate::scalar::RationalFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sector {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Sector {
    pub fn new(p: usize, q: usize, r: usize) -> Sector {
        Sector { p, q, r }
    }

    pub fn len(self) -> usize {
        self.p + self.q + self.r
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn within_bounds(self) -> bool {
        self.p <= 4 && self.q <= 2 && self.r <= 2
    }

    fn kinds(self) -> Vec<Kind> {
        let mut k = vec![Kind::C; self.p];
        k.extend(std::iter::repeat_n(Kind::X, self.q));
        k.extend(std::iter::repeat_n(Kind::B, self.r));
        k
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

/// Words as `c1 c2 x3 b1` with 1-based indices, sectors in order.
impl fmt::Display for OmegaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, t) in &self.terms {
            let kinds = s.kinds();
            for (u, _, k) in t.nonzero_entries() {
                let word: Vec<String> = u
                    .iter()
                    .zip(&kinds)
                    .map(|(i, kind)| match kind {
                        Kind::C => format!("c{}", i + 1),
                        Kind::X => format!("x{}", i + 1),
                        Kind::B => format!("b{}", i + 1),
                    })
                    .collect();
                let word = if word.is_empty() { "1".to_string() } else { word.join(" ") };
                let coeff = k.to_string();
                let (neg, mag) = match coeff.strip_prefix('-') {
                    Some(m) if !m.contains([' ', '+', '-']) => (true, m.to_string()),
                    _ => (false, coeff),
                };
                let mag = if mag.contains([' ', '+', '-']) { format!("({mag})") } else { mag };
                match (first, neg) {
                    (true, true) => write!(f, "-")?,
                    (true, false) => {}
                    (false, true) => write!(f, " - ")?,
                    (false, false) => write!(f, " + ")?,
                }
                if word == "1" {
                    write!(f, "{mag}")?;
                } else if mag == "1" {
                    write!(f, "{word}")?;
                } else {
                    write!(f, "{mag}*{word}")?;
                }
                first = false;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Kind {
    C,
    X,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaElement {
    n: usize,
    terms: BTreeMap<Sector, Tensor>,
}

impl OmegaElement {
    pub fn zero(n: usize) -> OmegaElement {
        OmegaElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// A single-sector element; `coeff` has `p + q + r` upper indices.
    pub fn from_sector(sector: Sector, coeff: Tensor) -> OmegaElement {
        assert_eq!((coeff.upper(), coeff.lower()), (sector.len(), 0), "coefficient rank must match the sector");
        let mut x = OmegaElement::zero(coeff.dim());
        x.add_sector(sector, &coeff);
        x
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sectors(&self) -> impl Iterator<Item = (&Sector, &Tensor)> {
        self.terms.iter()
    }

    pub fn sector(&self, s: Sector) -> Option<&Tensor> {
        self.terms.get(&s)
    }

    fn add_sector(&mut self, s: Sector, t: &Tensor) {
        if t.is_zero() {
            return;
        }
        let sum = match self.terms.get(&s) {
            Some(old) => old.add(t),
            None => t.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&s);
        } else {
            self.terms.insert(s, sum);
        }
    }

    pub fn add(&self, o: &OmegaElement) -> OmegaElement {
        let mut out = self.clone();
        for (s, t) in &o.terms {
            out.add_sector(*s, t);
        }
        out
    }

    pub fn sub(&self, o: &OmegaElement) -> OmegaElement {
        self.add(&o.scale(&-RationalFunction::one()))
    }

    pub fn scale(&self, k: &RationalFunction) -> OmegaElement {
        let mut out = OmegaElement::zero(self.n);
        for (s, t) in &self.terms {
            out.add_sector(*s, &t.scale(k));
        }
        out
    }

    pub fn ghost_number(&self) -> GhostNumber {
        ghost_number(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhostNumber {
    Zero,
    Definite(i64),
    Mixed,
}

/// `p - r` when it is the same in every sector.
pub fn ghost_number(x: &OmegaElement) -> GhostNumber {
    let mut g = None;
    for s in x.terms.keys() {
        let v = s.p as i64 - s.r as i64;
        match g {
            None => g = Some(v),
            Some(old) if old != v => return GhostNumber::Mixed,
            _ => {}
        }
    }
    g.map_or(GhostNumber::Zero, GhostNumber::Definite)
}

/// Order in which out-of-order neighbours are rewritten.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostFirst,
    RightmostFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Nilpotency {
    Zero,
    Residual(OmegaElement),
}

/// The algebra for fixed data, with the rewriting maps precomputed.
pub struct Omega {
    n: usize,
    /// `b c -> c b`, indexed by the `(b, c)` pair.
    bc: SparseMap,
    bx: SparseMap,
    xc: SparseMap,
    /// Symmetric part `(1 + σ)/2` of a `χχ` pair.
    sym: SparseMap,
    /// `½ C`, pair to single index.
    half_c: SparseMap,
    /// Ghost-block projectors by length: `c_proj[p]` acts on c-blocks in word order.
    c_proj: Vec<SparseMap>,
    b_proj: Vec<SparseMap>,
    phi: Tensor,
    c: Tensor,
}

fn pair_map(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> RationalFunction) -> SparseMap {
    let mut out = vec![Vec::new(); n * n];
    for a in 0..n {
        for b in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let v = f(a, b, x, y);
                    if !v.is_zero() {
                        out[a * n + b].push((x * n + y, v));
                    }
                }
            }
        }
    }
    out
}

fn reverse_flat(f: usize, n: usize, k: usize) -> usize {
    let mut idx = unflatten(f, n, k);
    idx.reverse();
    flatten(&idx, n)
}

impl Omega {
    pub fn new(data: &QlaData, twist: &TwistData) -> Result<Omega, QlaError> {
        let n = data.n;
        if twist.phi.dim() != n {
            return Err(QlaError::Shape("phi and the data have different dimensions".into()));
        }
        let st = twisted(&data.sigma, &twist.phi, &twist.phi_inverse);
        let st_inv = st.inverse().ok_or(QlaError::Singular("sigma~"))?;
        let (phi, sigma) = (&twist.phi, &data.sigma);
        let half = RationalFunction::from_ratio(1, 2);

        let bc = pair_map(n, |i, k, j, nn| -st_inv.get(&[nn, k], &[j, i]));
        let bx = pair_map(n, |m, nn, k, l| phi.get(&[k, l], &[m, nn]).clone());
        let xc = pair_map(n, |m, nn, l, k| phi.get(&[k, nn], &[l, m]).clone());
        let sym = pair_map(n, |a, b, x, y| {
            let id = if (a, b) == (x, y) { RationalFunction::one() } else { RationalFunction::zero() };
            &(&id + sigma.get(&[x, y], &[a, b])) * &half
        });
        let half_c: SparseMap = data.c.scale(&half).by_lower();

        let mut c_proj = Vec::new();
        let mut b_proj = Vec::new();
        for k in 0..=4 {
            if k == 0 {
                c_proj.push(vec![vec![(0, RationalFunction::one())]]);
                b_proj.push(vec![vec![(0, RationalFunction::one())]]);
                continue;
            }
            let a = antisym_unchecked(&st, k);
            let m = pow(n, k);
            // b-block: Z'_u = Σ_l Z_l A[l -> u]
            b_proj.push(a.by_lower());
            // c-block, word order reversed: Y'_l = Σ_u A[l -> u] Y_u
            let mut cp = vec![Vec::new(); m];
            for (l, row) in a.by_lower().into_iter().enumerate() {
                for (u, v) in row {
                    cp[reverse_flat(u, n, k)].push((reverse_flat(l, n, k), v));
                }
            }
            c_proj.push(cp);
        }
        Ok(Omega {
            n,
            bc,
            bx,
            xc,
            sym,
            half_c,
            c_proj,
            b_proj,
            phi: phi.clone(),
            c: data.c.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn letter(&self, s: Sector, i: usize) -> OmegaElement {
        let mut t = Tensor::zeros(self.n, 1, 0);
        t.set(&[i], &[], RationalFunction::one());
        OmegaElement::from_sector(s, t)
    }

    pub fn c(&self, i: usize) -> OmegaElement {
        self.letter(Sector::new(1, 0, 0), i)
    }

    pub fn chi(&self, i: usize) -> OmegaElement {
        self.letter(Sector::new(0, 1, 0), i)
    }

    pub fn b(&self, i: usize) -> OmegaElement {
        self.letter(Sector::new(0, 0, 1), i)
    }

    pub fn unit(&self) -> OmegaElement {
        let mut t = Tensor::zeros(self.n, 0, 0);
        t.set(&[], &[], RationalFunction::one());
        OmegaElement::from_sector(Sector::new(0, 0, 0), t)
    }

    /// Replaces the `len_in` indices at `start` by `len_out` indices through `map`.
    fn apply_block(&self, t: &Tensor, start: usize, len_in: usize, len_out: usize, map: &SparseMap) -> Tensor {
        let n = self.n;
        let rank = t.upper();
        let tail = rank - start - len_in;
        let (pin, ptail) = (pow(n, len_in), pow(n, tail));
        let pout = pow(n, len_out);
        let mut out = Tensor::zeros(n, rank - len_in + len_out, 0);
        for (f, x) in t.data().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (head, rest) = (f / (pin * ptail), f % (pin * ptail));
            let (mid, tl) = (rest / ptail, rest % ptail);
            for (o, v) in &map[mid] {
                out.add_flat((head * pout + o) * ptail + tl, 0, &(x * v));
            }
        }
        out
    }

    fn contract(&self, t: &Tensor, start: usize) -> Tensor {
        let map: SparseMap = (0..self.n * self.n)
            .map(|f| {
                if f / self.n == f % self.n {
                    vec![(0, RationalFunction::one())]
                } else {
                    Vec::new()
                }
            })
            .collect();
        self.apply_block(t, start, 2, 0, &map)
    }

    fn sorted(&self, words: BTreeMap<Vec<Kind>, Tensor>, strategy: Strategy) -> Result<OmegaElement, QlaError> {
        let mut work = words;
        let mut done: Vec<(Vec<Kind>, Tensor)> = Vec::new();
        while let Some((kinds, t)) = work.pop_first() {
            let inversions = (0..kinds.len().saturating_sub(1)).filter(|&i| kinds[i] > kinds[i + 1]);
            let pos = match strategy {
                Strategy::LeftmostFirst => inversions.min(),
                Strategy::RightmostFirst => inversions.max(),
            };
            let Some(s) = pos else {
                done.push((kinds, t));
                continue;
            };
            let mut swapped = kinds.clone();
            swapped.swap(s, s + 1);
            let map = match (kinds[s], kinds[s + 1]) {
                (Kind::B, Kind::C) => &self.bc,
                (Kind::B, Kind::X) => &self.bx,
                (Kind::X, Kind::C) => &self.xc,
                other => unreachable!("{other:?} is in order"),
            };
            push_word(&mut work, swapped, self.apply_block(&t, s, 2, 2, map));
            if (kinds[s], kinds[s + 1]) == (Kind::B, Kind::C) {
                let mut shorter = kinds.clone();
                shorter.drain(s..s + 2);
                push_word(&mut work, shorter, self.contract(&t, s));
            }
        }
        let mut out = OmegaElement::zero(self.n);
        for (kinds, t) in done {
            let count = |k| kinds.iter().filter(|&&x| x == k).count();
            let s = Sector::new(count(Kind::C), count(Kind::X), count(Kind::B));
            out.add_sector(s, &t);
        }
        Ok(out)
    }

    /// Unique representative modulo the defining relations.
    pub fn canonicalize(&self, x: &OmegaElement) -> Result<OmegaElement, QlaError> {
        let mut reduced = OmegaElement::zero(self.n);
        for (s, t) in &x.terms {
            match s.q {
                0 | 1 => reduced.add_sector(*s, t),
                2 => {
                    reduced.add_sector(*s, &self.apply_block(t, s.p, 2, 2, &self.sym));
                    let lin = self.apply_block(t, s.p, 2, 1, &self.half_c);
                    reduced.add_sector(Sector::new(s.p, 1, s.r), &lin);
                }
                _ => return Err(QlaError::SectorOverflow { p: s.p, q: s.q, r: s.r }),
            }
        }
        let mut out = OmegaElement::zero(self.n);
        for (s, t) in &reduced.terms {
            if !s.within_bounds() {
                return Err(QlaError::SectorOverflow { p: s.p, q: s.q, r: s.r });
            }
            let t = self.apply_block(t, 0, s.p, s.p, &self.c_proj[s.p]);
            let t = self.apply_block(&t, s.p + s.q, s.r, s.r, &self.b_proj[s.r]);
            out.add_sector(*s, &t);
        }
        Ok(out)
    }

    pub fn multiply(&self, x: &OmegaElement, y: &OmegaElement) -> Result<OmegaElement, QlaError> {
        self.multiply_with(x, y, Strategy::LeftmostFirst)
    }

    pub fn multiply_with(&self, x: &OmegaElement, y: &OmegaElement, strategy: Strategy) -> Result<OmegaElement, QlaError> {
        let mut words = BTreeMap::new();
        for (sx, tx) in &x.terms {
            for (sy, ty) in &y.terms {
                let mut kinds = sx.kinds();
                kinds.extend(sy.kinds());
                push_word(&mut words, kinds, tx.kron(ty));
            }
        }
        let sorted = self.sorted(words, strategy)?;
        self.canonicalize(&sorted)
    }

    /// `Q = c^i χ_i - ½ c^{j2} c^{j1} φ^{p1p2}_{j1j2} C^k_{p1p2} b_k`.
    pub fn build_q(&self) -> Result<OmegaElement, QlaError> {
        let n = self.n;
        let lead = Tensor::from_fn(n, 2, 0, |u, _| {
            if u[0] == u[1] {
                RationalFunction::one()
            } else {
                RationalFunction::zero()
            }
        });
        let half = RationalFunction::from_ratio(1, 2);
        let ghost = Tensor::from_fn(n, 3, 0, |u, _| {
            let (a1, a2, k) = (u[0], u[1], u[2]);
            let mut s = RationalFunction::zero();
            for p1 in 0..n {
                for p2 in 0..n {
                    let f = self.phi.get(&[p1, p2], &[a2, a1]);
                    if !f.is_zero() {
                        s += &(f * self.c.get(&[k], &[p1, p2]));
                    }
                }
            }
            -(&s * &half)
        });
        let q = OmegaElement::from_sector(Sector::new(1, 1, 0), lead).add(&OmegaElement::from_sector(Sector::new(2, 0, 1), ghost));
        self.canonicalize(&q)
    }

    pub fn verify_nilpotent(&self, q: &OmegaElement) -> Result<Nilpotency, QlaError> {
        let qq = self.multiply(q, q)?;
        Ok(if qq.is_zero() {
            Nilpotency::Zero
        } else {
            Nilpotency::Residual(qq)
        })
    }
}

fn push_word(work: &mut BTreeMap<Vec<Kind>, Tensor>, kinds: Vec<Kind>, t: Tensor) {
    if t.is_zero() {
        return;
    }
    match work.get_mut(&kinds) {
        Some(old) => *old = old.add(&t),
        None => {
            work.insert(kinds, t);
        }
    }
}

#[cfg(test)]
mod tests;
