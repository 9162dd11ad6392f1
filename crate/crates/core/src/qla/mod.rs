//! Quantum Lie algebras given by explicit finite-dimensional data: a braid
//! matrix `σ`, structure constants `C` and a twist `φ`.
//!
//! Every identity is checked as an equality of linear maps between tensor
//! powers of the generator space (see [`tensor`] for the conventions). For
//! `σ^{kl}_{ij}` the lower pair is the input, so the defining relations read
//! `χ_i χ_j - σ^{kl}_{ij} χ_k χ_l = C^k_{ij} χ_k`.
//!
//! No bundled dataset has both a non-permutation `σ` and `C != 0`: no such
//! unitary example with explicit entries is available, and none is invented
//! here. The involutive Lyubashenko example therefore only exercises the
//! braid and twist identities.

mod file;
pub mod omega;
pub mod tensor;

pub use file::{bundled, parse_qla, QlaFile, BUNDLED};
pub use tensor::Tensor;

use thiserror::Error;

use crate::linalg;
use crate::ope::Parity;
use crate::scalar::{Rational, RationalFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QlaError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{0} is singular")]
    Singular(&'static str),
    #[error("braid matrix fails {0}")]
    Axiom(&'static str),
    #[error("sector ({p},{q},{r}) exceeds the bound (4,2,2)")]
    SectorOverflow { p: usize, q: usize, r: usize },
    #[error("{0}")]
    Parse(#[from] crate::syntax::ParseError),
}

fn one() -> RationalFunction {
    RationalFunction::one()
}

fn sign(odd: bool) -> RationalFunction {
    if odd {
        -one()
    } else {
        one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QlaData {
    pub n: usize,
    pub parities: Vec<Parity>,
    pub sigma: Tensor,
    pub c: Tensor,
}

impl QlaData {
    pub fn new(parities: Vec<Parity>, sigma: Tensor, c: Tensor) -> Result<QlaData, QlaError> {
        let n = parities.len();
        if sigma.shape() != (n, 2, 2) {
            return Err(QlaError::Shape(format!("sigma must be rank (2,2) over {n} generators")));
        }
        if c.shape() != (n, 1, 2) {
            return Err(QlaError::Shape(format!("C must be rank (1,2) over {n} generators")));
        }
        Ok(QlaData { n, parities, sigma, c })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistData {
    pub phi: Tensor,
    pub phi_inverse: Tensor,
}

impl TwistData {
    pub fn new(phi: Tensor) -> Result<TwistData, QlaError> {
        if phi.upper() != 2 || phi.lower() != 2 {
            return Err(QlaError::Shape("phi must be rank (2,2)".into()));
        }
        let phi_inverse = phi.inverse().ok_or(QlaError::Singular("phi"))?;
        Ok(TwistData { phi, phi_inverse })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Left side minus right side; zero exactly when the identity holds.
    pub residual: Tensor,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
    /// A solution of `C = (1 - σ) t`, when one exists.
    pub witness: Option<Tensor>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, lhs: Tensor, rhs: Tensor) {
        self.checks.push(Check {
            name,
            residual: lhs.sub(&rhs),
        });
    }

    fn extend(&mut self, other: AxiomReport) {
        self.checks.extend(other.checks);
        if other.witness.is_some() {
            self.witness = other.witness;
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            if c.passed() {
                s.push_str(&format!("pass  {}\n", c.name));
            } else {
                let first: Vec<String> = c
                    .residual
                    .nonzero_entries()
                    .into_iter()
                    .take(3)
                    .map(|(u, l, x)| format!("{u:?}{l:?}={x}"))
                    .collect();
                s.push_str(&format!("FAIL  {}  {}\n", c.name, first.join(" ")));
            }
        }
        s
    }
}

/// `σ^{k1k2}_{i1i2} = (-1)^{(i1)(i2)} δ^{k1}_{i2} δ^{k2}_{i1}`.
pub fn super_permutation(parities: &[Parity]) -> Tensor {
    let n = parities.len();
    Tensor::from_fn(n, 2, 2, |k, i| {
        if k[0] == i[1] && k[1] == i[0] {
            sign(parities[i[0]].is_odd() && parities[i[1]].is_odd())
        } else {
            RationalFunction::zero()
        }
    })
}

/// The twist `φ` and conjugated braid `σ~` of the canonical ghosts of a Lie
/// superalgebra.
pub fn lie_super_twist(parities: &[Parity]) -> (Tensor, Tensor) {
    let n = parities.len();
    let odd = |i: usize| parities[i].is_odd() as u8;
    let phi = Tensor::from_fn(n, 2, 2, |k, i| {
        let (m, nn) = (i[0], i[1]);
        if k[0] == nn && k[1] == m {
            sign(odd(nn) * (odd(m) + 1) % 2 == 1)
        } else {
            RationalFunction::zero()
        }
    });
    let st = Tensor::from_fn(n, 2, 2, |k, i| {
        let (m, nn) = (i[0], i[1]);
        if k[0] == nn && k[1] == m {
            sign((odd(m) * odd(nn) + odd(m) + odd(nn)) % 2 == 1)
        } else {
            RationalFunction::zero()
        }
    });
    (phi, st)
}

/// `σ~ = φ σ φ^{-1}`.
pub fn sigma_tilde(sigma: &Tensor, phi: &Tensor) -> Result<Tensor, QlaError> {
    let inv = phi.inverse().ok_or(QlaError::Singular("phi"))?;
    Ok(twisted(sigma, phi, &inv))
}

fn twisted(sigma: &Tensor, phi: &Tensor, phi_inv: &Tensor) -> Tensor {
    phi.then(sigma).then(phi_inv)
}

/// `x` on factors `(j, j+1)`, 1-based, of `total` factors.
fn at(x: &Tensor, j: usize, total: usize) -> Tensor {
    x.local(j - 1, total)
}

fn chain(ops: &[Tensor]) -> Tensor {
    let mut it = ops.iter();
    let first = it.next().expect("empty chain").clone();
    it.fold(first, |acc, x| acc.then(x))
}

fn braid_sides(x: &Tensor) -> (Tensor, Tensor) {
    let (x1, x2) = (at(x, 1, 3), at(x, 2, 3));
    (chain(&[x1.clone(), x2.clone(), x1.clone()]), chain(&[x2.clone(), x1, x2]))
}

fn square_sides(x: &Tensor) -> (Tensor, Tensor) {
    (x.then(x), Tensor::identity(x.dim(), 2))
}

/// `(C ⊗ 1)`, `(1 ⊗ C)` on three factors.
fn c_left(c: &Tensor) -> Tensor {
    c.local(0, 3)
}

fn c_right(c: &Tensor) -> Tensor {
    c.local(1, 3)
}

/// Solves `C = (1 - σ) t` one output component at a time. On failure the
/// residual keeps the components of `C` that lie outside the image.
fn solve_t(sigma: &Tensor, c: &Tensor) -> (Option<Tensor>, Tensor) {
    let n = sigma.dim();
    let m = n * n;
    let one_minus = Tensor::identity(n, 2).sub(sigma);
    // rows: input pair (lower of C), unknowns: t^k at every input pair
    let a: Vec<Vec<RationalFunction>> = (0..m)
        .map(|row| (0..m).map(|col| one_minus.get_flat(col, row).clone()).collect())
        .collect();
    let mut t = Tensor::zeros(n, 1, 2);
    let mut residual = Tensor::zeros(n, 1, 2);
    let mut ok = true;
    for k in 0..n {
        let rhs: Vec<RationalFunction> = (0..m).map(|row| c.get_flat(k, row).clone()).collect();
        match linalg::solve(&a, &rhs, m) {
            Some(x) => {
                for (col, v) in x.iter().enumerate() {
                    t.add_flat(k, col, v);
                }
            }
            None => {
                ok = false;
                for (row, v) in rhs.iter().enumerate() {
                    residual.add_flat(k, row, v);
                }
            }
        }
    }
    (ok.then_some(t), residual)
}

/// The quantum Lie algebra axioms for `(σ, C)`.
pub fn check_qla_axioms(d: &QlaData) -> AxiomReport {
    let (s, c) = (&d.sigma, &d.c);
    let mut r = AxiomReport::default();
    let (l, rr) = square_sides(s);
    r.push("unitarity", l, rr);
    let (l, rr) = braid_sides(s);
    r.push("braid", l, rr);

    let (s1, s2) = (at(s, 1, 3), at(s, 2, 3));
    let cl_c = c_left(c).then(c);
    r.push(
        "jacobi",
        cl_c.clone(),
        s2.then(&c_left(c)).then(c).add(&c_right(c).then(c)),
    );
    r.push("sigma-C exchange", c_left(c).then(s), chain(&[s2.clone(), s1.clone(), c_right(c)]));
    let mixed = s2.then(&c_left(c)).add(&c_right(c));
    r.push("sigma-C mixed exchange", mixed.then(s), s1.then(&mixed));
    r.push("antisymmetry", s.then(c).add(c), Tensor::zeros(d.n, 1, 2));

    let (witness, residual) = solve_t(s, c);
    r.checks.push(Check {
        name: "C = (1 - sigma) t",
        residual,
    });
    r.witness = witness;
    r
}

/// The twist relations between `σ`, `φ` and, when given, `C`.
pub fn check_twist_axioms(sigma: &Tensor, twist: &TwistData, c: Option<&Tensor>) -> AxiomReport {
    let n = sigma.dim();
    let phi = &twist.phi;
    let st = twisted(sigma, phi, &twist.phi_inverse);
    let p = |j| at(phi, j, 3);
    let s = |j| at(sigma, j, 3);
    let t = |j| at(&st, j, 3);
    let mut r = AxiomReport::default();
    r.push(
        "sigma through phi (left)",
        chain(&[s(1), p(2), p(1)]),
        chain(&[p(2), p(1), s(2)]),
    );
    r.push(
        "sigma through phi (right)",
        chain(&[p(1), p(2), s(1)]),
        chain(&[s(2), p(1), p(2)]),
    );
    let (l, rr) = braid_sides(phi);
    r.push("phi braid", l, rr);
    r.push(
        "sigma~ through phi",
        chain(&[t(1), p(2), p(1)]),
        chain(&[p(2), p(1), t(2)]),
    );
    if let Some(c) = c {
        r.push("phi-C exchange", chain(&[p(1), p(2), c_left(c)]), c_right(c).then(phi));
    }
    let (l, rr) = braid_sides(&st);
    r.push("sigma~ braid", l, rr);
    if sigma.then(sigma) == Tensor::identity(n, 2) {
        let (l, rr) = square_sides(&st);
        r.push("sigma~ unitarity", l, rr);
    }
    r
}

/// Antisymmetrizer on `k` factors without checking `σ`.
fn antisym_unchecked(sigma: &Tensor, k: usize) -> Tensor {
    let n = sigma.dim();
    let mut a = Tensor::identity(n, 1);
    for m in 1..k {
        // A_{m+1} = (1/(m+1)) (1 - σ_m + σ_{m-1}σ_m - ... ± σ_1…σ_m) A_m
        let total = m + 1;
        let mut sum = Tensor::identity(n, total);
        let mut word = Tensor::identity(n, total);
        for (i, j) in (1..=m).rev().enumerate() {
            word = at(sigma, j, total).then(&word);
            sum = if i % 2 == 0 { sum.sub(&word) } else { sum.add(&word) };
        }
        let norm = RationalFunction::constant(Rational::new(1.into(), (total as i64).into()));
        a = sum.then(&a.embed(0, 1)).scale(&norm);
    }
    a
}

/// The antisymmetrizing projector `A_k` for a unitary braid matrix.
pub fn antisymmetrizer(sigma: &Tensor, k: usize) -> Result<Tensor, QlaError> {
    assert!(k >= 1, "antisymmetrizer needs k >= 1");
    let (l, r) = square_sides(sigma);
    if l != r {
        return Err(QlaError::Axiom("unitarity"));
    }
    let (l, r) = braid_sides(sigma);
    if l != r {
        return Err(QlaError::Axiom("the braid relation"));
    }
    Ok(antisym_unchecked(sigma, k))
}

/// `φ_{i..j}`, 1-based, acting on `j` factors.
pub fn higher_phi(phi: &Tensor, i: usize, j: usize) -> Tensor {
    assert!(i >= 1 && j > i, "higher_phi needs 1 <= i < j");
    let mut out = Tensor::identity(phi.dim(), j);
    for top in (i + 1..=j).rev() {
        for a in i..top {
            out = out.then(&at(phi, a, j));
        }
    }
    out
}

/// Identities used in the nilpotency proof, on up to four factors.
pub fn check_proof_identities(sigma: &Tensor, c: &Tensor, twist: &TwistData) -> AxiomReport {
    let n = sigma.dim();
    let phi = &twist.phi;
    let st = twisted(sigma, phi, &twist.phi_inverse);
    let mut r = AxiomReport::default();

    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for i in 1..=3 {
        for j in i + 1..=4 {
            let h = higher_phi(phi, i, j);
            for k in 0..j - i {
                lhs.push(h.then(&at(sigma, i + k, j)));
                rhs.push(at(&st, j - k - 1, j).then(&h));
            }
        }
    }
    push_many(&mut r, "higher twist intertwines sigma", &lhs, &rhs);

    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for k in 2..=4 {
        let a = antisym_unchecked(&st, k);
        for j in 1..k {
            lhs.push(a.then(&at(&st, j, k)));
            rhs.push(a.neg());
        }
    }
    push_many(&mut r, "antisymmetrizer absorbs sigma~", &lhs, &rhs);

    let a4 = antisym_unchecked(sigma, 4);
    let one_minus = Tensor::identity(n, 2).sub(sigma);
    let quartic = chain(&[a4, c.local(2, 4), c.local(0, 3), one_minus]);
    r.push("A4 C C (1 - sigma) = 0", quartic, Tensor::zeros(n, 2, 4));

    let a3 = antisym_unchecked(sigma, 3);
    r.push("A3 C C = 0", chain(&[a3, c_left(c), c.clone()]), Tensor::zeros(n, 1, 3));

    let a3t = antisym_unchecked(&st, 3);
    let s21 = at(sigma, 2, 3).then(&at(sigma, 1, 3));
    let q4 = chain(&[a3t, higher_phi(phi, 1, 3), Tensor::identity(n, 3).sub(&s21)]);
    r.push("A3~ phi123 (1 - sigma23 sigma12) = 0", q4, Tensor::zeros(n, 3, 3));
    r
}

/// Folds several identities into one check by stacking their residuals.
fn push_many(r: &mut AxiomReport, name: &'static str, lhs: &[Tensor], rhs: &[Tensor]) {
    let failing = lhs.iter().zip(rhs).map(|(a, b)| a.sub(b)).find(|d| !d.is_zero());
    let residual = failing.unwrap_or_else(|| Tensor::zeros(lhs[0].dim(), 0, 0));
    r.checks.push(Check { name, residual });
}

/// Every check on a dataset: axioms, twist relations and proof identities.
pub fn check_all(d: &QlaData, twist: &TwistData) -> AxiomReport {
    let mut r = check_qla_axioms(d);
    r.extend(check_twist_axioms(&d.sigma, twist, Some(&d.c)));
    r.extend(check_proof_identities(&d.sigma, &d.c, twist));
    r
}
