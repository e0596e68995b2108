//! Exact dense linear algebra over `Z` and `Q`.
//!
//! Matrices are small (rank at most a few dozen) so everything is a plain
//! row-major `Vec` of bignums. Lattices are stored as row bases, so the Hermite
//! form here is row-style: `U * A = H` with `U` unimodular.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix { nrows, ncols, data: vec![BigInt::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `ncols`.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, ncols: usize) -> Result<Self> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch { expected: ncols, got: r.len() });
            }
            data.extend(r);
        }
        Ok(IntMatrix { nrows, ncols, data })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(rows, ncols).expect("ragged i64 matrix")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.nrows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(<[BigInt]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![BigInt::zero(); self.ncols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = &self[(k, j)];
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.nrows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Gcd of all entries (zero for the zero matrix).
    pub fn content(&self) -> BigInt {
        self.data.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.ncols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        IntMatrix { nrows: rows.len(), ncols: self.ncols, data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.nrows, cols.len());
        for i in 0..self.nrows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.ncols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix { nrows: self.nrows + other.nrows, ncols: self.ncols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.nrows + other.nrows, self.ncols + other.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.nrows {
            for j in 0..other.ncols {
                out[(self.nrows + i, self.ncols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.ncols {
                self.data.swap(a * self.ncols + j, b * self.ncols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.nrows {
                self.data.swap(i * self.ncols + a, i * self.ncols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.nrows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for x in self.row_mut(i) {
            *x = -&*x;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.nrows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Replaces rows `a`, `b` by `(x*ra + y*rb, z*ra + w*rb)`.
    fn combine_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for j in 0..self.ncols {
            let ra = self[(a, j)].clone();
            let rb = self[(b, j)].clone();
            self[(a, j)] = x * &ra + y * &rb;
            self[(b, j)] = z * &ra + w * &rb;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.row_iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).ok()).collect::<Option<Vec<_>>>())
            .collect()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.ncols + j]
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RatMatrix { nrows, ncols, data: vec![BigRational::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn left_mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![BigRational::zero(); self.ncols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * &self[(k, j)];
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a[(i, c)].is_zero())?;
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    inv.data.swap(p * n + j, c * n + j);
                }
            }
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = &a[(c, j)] / &piv;
                inv[(c, j)] = &inv[(c, j)] / &piv;
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(c, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    /// Common denominator and integer numerator matrix.
    pub fn to_int_with_den(&self) -> (IntMatrix, BigInt) {
        let den = self.data.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let data = self.data.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        (IntMatrix { nrows: self.nrows, ncols: self.ncols, data }, den)
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(IntMatrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|x| x.to_integer()).collect() })
        } else {
            None
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.ncols + j]
    }
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Row-style Hermite normal form `U * A = H`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: Option<IntMatrix>,
    pub rank: usize,
    /// Column of the pivot in each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

/// Computes the Hermite normal form: nonzero rows first, strictly increasing
/// pivot columns, positive pivots, entries above each pivot reduced to
/// `[0, pivot)`.
pub fn hermite(a: &IntMatrix, with_transform: bool) -> Hermite {
    let m = a.nrows();
    let n = a.ncols();
    let mut h = a.clone();
    let mut u = with_transform.then(|| IntMatrix::identity(m));
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !h[(i, c)].is_zero()) else { continue };
        h.swap_rows(r, p);
        if let Some(u) = u.as_mut() {
            u.swap_rows(r, p);
        }
        for i in r + 1..m {
            if h[(i, c)].is_zero() {
                continue;
            }
            let a_rc = h[(r, c)].clone();
            let b_ic = h[(i, c)].clone();
            let (g, x, y) = ext_gcd(&a_rc, &b_ic);
            let z = -(&b_ic / &g);
            let w = &a_rc / &g;
            h.combine_rows(r, i, &x, &y, &z, &w);
            if let Some(u) = u.as_mut() {
                u.combine_rows(r, i, &x, &y, &z, &w);
            }
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_mut() {
                u.negate_row(r);
            }
        }
        let piv = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&piv);
            if !q.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                if let Some(u) = u.as_mut() {
                    u.add_row_multiple(i, r, &k);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Hermite { h, u, rank: r, pivots }
}

/// Basis (as rows) of the row lattice generated by the rows of `a`, in
/// Hermite normal form.
pub fn row_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let hf = hermite(a, false);
    hf.h.select_rows(&(0..hf.rank).collect::<Vec<_>>())
}

/// Finds an integer row vector `x` with `x * gens = target`, if any.
pub fn solve_integer_combination(gens: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(gens.ncols(), target.len());
    let hf = hermite(gens, true);
    let u = hf.u.as_ref().expect("transform requested");
    let mut residual = target.to_vec();
    let mut z = vec![BigInt::zero(); hf.rank];
    for (k, &c) in hf.pivots.iter().enumerate() {
        let piv = &hf.h[(k, c)];
        let (q, rem) = residual[c].div_rem(piv);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for j in c..gens.ncols() {
                residual[j] -= &q * &hf.h[(k, j)];
            }
        }
        z[k] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigInt::zero(); gens.nrows()];
    for (k, zk) in z.iter().enumerate() {
        if zk.is_zero() {
            continue;
        }
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += zk * &u[(k, j)];
        }
    }
    Some(x)
}

/// Basis of `{x in Z^n : x * a = 0 mod modulus}` where `a` is `n x k`.
///
/// Uses the integer kernel of the stacked matrix `[a; modulus * I_k]`; its
/// projection to the first `n` coordinates is injective.
pub fn kernel_mod(a: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    let n = a.nrows();
    let k = a.ncols();
    let stacked = a.stack(&IntMatrix::identity(k).scale(modulus));
    let hf = hermite(&stacked, true);
    let u = hf.u.expect("transform requested");
    let rows: Vec<usize> = (hf.rank..n + k).collect();
    let kern = u.select_rows(&rows).select_cols(&(0..n).collect::<Vec<_>>());
    row_lattice_basis(&kern)
}

/// Integer kernel `{x : x * a = 0}` as a row basis.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let hf = hermite(a, true);
    let u = hf.u.expect("transform requested");
    let rows: Vec<usize> = (hf.rank..a.nrows()).collect();
    let k = u.select_rows(&rows);
    if k.nrows() == 0 {
        return k;
    }
    row_lattice_basis(&k)
}

/// Smith normal form `U * A * V = D` with transforms and `V^{-1}`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

pub fn smith(a: &IntMatrix) -> Smith {
    let m = a.nrows();
    let n = a.ncols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);
    let steps = m.min(n);
    for t in 0..steps {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            d.swap_cols(t, bj);
            v.swap_cols(t, bj);
            v_inv.swap_rows(t, bj);
            let piv = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                let q = d[(i, t)].div_floor(&piv);
                if !q.is_zero() {
                    let k = -q;
                    d.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                }
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_floor(&piv);
                if !q.is_zero() {
                    let k = -&q;
                    d.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                    // V <- V E with E = I + k e_t e_j^T, so V^{-1} <- E^{-1} V^{-1}
                    v_inv.add_row_multiple(t, j, &q);
                }
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..m).find_map(|i| (t + 1..n).find(|&j| !d[(i, j)].is_multiple_of(&piv)).map(|_| i));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    let diag = (0..steps).map(|i| d[(i, i)].clone()).collect();
    Smith { diag, u, v, v_inv }
}

/// Sylvester inertia `(positive, negative, zero)` of a symmetric rational
/// matrix, computed by exact symmetric elimination.
pub fn inertia(a: &RatMatrix) -> (usize, usize, usize) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| !m[(i, i)].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; mix in an off-diagonal partner
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !m[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j (congruence transform)
                for k in 0..n {
                    let t = m[(j, k)].clone();
                    m[(i, k)] += t;
                }
                for k in 0..n {
                    let t = m[(k, j)].clone();
                    m[(k, i)] += t;
                }
                i
            }
        };
        let p = m[(piv, piv)].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != piv);
        for &i in &active {
            if m[(i, piv)].is_zero() {
                continue;
            }
            let f = &m[(i, piv)] / &p;
            for &j in &active {
                let t = &f * &m[(piv, j)];
                m[(i, j)] -= t;
            }
        }
    }
    (pos, neg, n - pos - neg)
}
