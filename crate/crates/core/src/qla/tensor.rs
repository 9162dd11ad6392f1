//! Dense tensors over [`RationalFunction`] with a fixed index convention.
//!
//! A tensor with `upper` contravariant and `lower` covariant indices, all
//! ranging over `0..n`, stores its entries row-major over the upper indices
//! followed by the lower ones: `flat = U * n^lower + L`, where `U` and `L`
//! are the row-major flattenings of the two multi-indices.
//!
//! Read as a linear map, the lower indices are the input and the upper ones
//! the output. Composition [`Tensor::then`] contracts the upper indices of
//! the first factor with the lower indices of the second, so `a.then(b)` is
//! the concise product `a b` of the braid-matrix calculus: `a` acts first.

use std::fmt;

use crate::linalg;
use crate::scalar::RationalFunction;

#[derive(Clone, PartialEq)]
pub struct Tensor {
    n: usize,
    upper: usize,
    lower: usize,
    data: Vec<RationalFunction>,
}

/// Sparse view of a tensor as a map from lower flat index to upper flat index.
pub(crate) type SparseMap = Vec<Vec<(usize, RationalFunction)>>;

pub(crate) fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

pub(crate) fn unflatten(mut flat: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    out
}

pub(crate) fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

impl Tensor {
    pub fn zeros(n: usize, upper: usize, lower: usize) -> Tensor {
        Tensor {
            n,
            upper,
            lower,
            data: vec![RationalFunction::zero(); pow(n, upper + lower)],
        }
    }

    pub fn from_fn(
        n: usize,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize], &[usize]) -> RationalFunction,
    ) -> Tensor {
        let mut t = Tensor::zeros(n, upper, lower);
        let nl = pow(n, lower);
        for (flat, slot) in t.data.iter_mut().enumerate() {
            let u = unflatten(flat / nl, n, upper);
            let l = unflatten(flat % nl, n, lower);
            *slot = f(&u, &l);
        }
        t
    }

    /// The identity map on `k` factors.
    pub fn identity(n: usize, k: usize) -> Tensor {
        let m = pow(n, k);
        let mut t = Tensor::zeros(n, k, k);
        for i in 0..m {
            t.data[i * m + i] = RationalFunction::one();
        }
        t
    }

    pub fn scalar(x: RationalFunction) -> Tensor {
        Tensor {
            n: 1,
            upper: 0,
            lower: 0,
            data: vec![x],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.upper, self.lower)
    }

    pub fn data(&self) -> &[RationalFunction] {
        &self.data
    }

    fn flat(&self, up: &[usize], low: &[usize]) -> usize {
        assert_eq!(up.len(), self.upper, "upper index count");
        assert_eq!(low.len(), self.lower, "lower index count");
        flatten(up, self.n) * pow(self.n, self.lower) + flatten(low, self.n)
    }

    pub fn get(&self, up: &[usize], low: &[usize]) -> &RationalFunction {
        &self.data[self.flat(up, low)]
    }

    pub fn set(&mut self, up: &[usize], low: &[usize], v: RationalFunction) {
        let i = self.flat(up, low);
        self.data[i] = v;
    }

    pub(crate) fn get_flat(&self, up: usize, low: usize) -> &RationalFunction {
        &self.data[up * pow(self.n, self.lower) + low]
    }

    pub(crate) fn add_flat(&mut self, up: usize, low: usize, v: &RationalFunction) {
        let i = up * pow(self.n, self.lower) + low;
        self.data[i] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Nonzero entries as `(upper, lower, value)`, in storage order.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, Vec<usize>, RationalFunction)> {
        let nl = pow(self.n, self.lower);
        self.data
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(f, x)| (unflatten(f / nl, self.n, self.upper), unflatten(f % nl, self.n, self.lower), x.clone()))
            .collect()
    }

    fn same_shape(&self, o: &Tensor) {
        assert_eq!(self.shape(), o.shape(), "tensor shapes differ");
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        self.same_shape(o);
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        self.with_data(data)
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.same_shape(o);
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        self.with_data(data)
    }

    pub fn scale(&self, k: &RationalFunction) -> Tensor {
        let data = self.data.iter().map(|a| a * k).collect();
        self.with_data(data)
    }

    pub fn neg(&self) -> Tensor {
        let data = self.data.iter().map(|a| -a).collect();
        self.with_data(data)
    }

    fn with_data(&self, data: Vec<RationalFunction>) -> Tensor {
        Tensor {
            n: self.n,
            upper: self.upper,
            lower: self.lower,
            data,
        }
    }

    /// Nonzero entries grouped by lower flat index.
    pub(crate) fn by_lower(&self) -> SparseMap {
        let nl = pow(self.n, self.lower);
        let mut out = vec![Vec::new(); nl];
        for (f, x) in self.data.iter().enumerate() {
            if !x.is_zero() {
                out[f % nl].push((f / nl, x.clone()));
            }
        }
        out
    }

    /// Composition: `self` acts first, then `o`.
    pub fn then(&self, o: &Tensor) -> Tensor {
        assert_eq!(self.n, o.n, "tensor dimensions differ");
        assert_eq!(self.upper, o.lower, "cannot compose: output and input ranks differ");
        let mut out = Tensor::zeros(self.n, o.upper, self.lower);
        let next = o.by_lower();
        let nl = pow(self.n, self.lower);
        for (f, x) in self.data.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (mid, low) = (f / nl, f % nl);
            for (up, y) in &next[mid] {
                out.add_flat(*up, low, &(x * y));
            }
        }
        out
    }

    /// Tensor product; `self` occupies the first factors on both sides.
    pub fn kron(&self, o: &Tensor) -> Tensor {
        assert!(self.n == o.n || self.rank() == 0 || o.rank() == 0, "tensor dimensions differ");
        let n = if self.rank() == 0 { o.n } else { self.n };
        let mut out = Tensor::zeros(n, self.upper + o.upper, self.lower + o.lower);
        let (al, bl, bu) = (pow(n, self.lower), pow(n, o.lower), pow(n, o.upper));
        for (fa, x) in self.data.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (ua, la) = (fa / al, fa % al);
            for (fb, y) in o.data.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (ub, lb) = (fb / bl, fb % bl);
                out.add_flat(ua * bu + ub, la * bl + lb, &(x * y));
            }
        }
        out
    }

    /// `1^{before} ⊗ self ⊗ 1^{after}`.
    pub fn embed(&self, before: usize, after: usize) -> Tensor {
        let mut t = if before == 0 {
            self.clone()
        } else {
            Tensor::identity(self.n, before).kron(self)
        };
        if after > 0 {
            t = t.kron(&Tensor::identity(self.n, after));
        }
        t
    }

    /// `self` acting on the factors starting at `pos` (0-based) of `total` input factors.
    pub fn local(&self, pos: usize, total: usize) -> Tensor {
        assert!(pos + self.lower <= total, "local operator out of range");
        self.embed(pos, total - pos - self.lower)
    }

    fn matrix(&self) -> Vec<Vec<RationalFunction>> {
        let (nu, nl) = (pow(self.n, self.upper), pow(self.n, self.lower));
        (0..nl).map(|l| (0..nu).map(|u| self.get_flat(u, l).clone()).collect()).collect()
    }

    /// Inverse of a square map, or `None` when singular.
    pub fn inverse(&self) -> Option<Tensor> {
        assert_eq!(self.upper, self.lower, "only square maps have inverses");
        let inv = linalg::inverse(&self.matrix())?;
        let mut out = Tensor::zeros(self.n, self.upper, self.lower);
        for (l, row) in inv.iter().enumerate() {
            for (u, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.add_flat(u, l, x);
                }
            }
        }
        Some(out)
    }

    /// Trace of a square map.
    pub fn trace(&self) -> RationalFunction {
        assert_eq!(self.upper, self.lower, "trace needs a square map");
        let m = pow(self.n, self.upper);
        let mut t = RationalFunction::zero();
        for i in 0..m {
            t += self.get_flat(i, i);
        }
        t
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor(n={}, {}^{}_{}) {{", self.n, self.rank(), self.upper, self.lower)?;
        for (u, l, x) in self.nonzero_entries() {
            write!(f, " {u:?}{l:?}={x}")?;
        }
        write!(f, " }}")
    }
}
