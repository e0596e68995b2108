//! Integral lattices and full-rank lattices inside a fixed rational
//! quadratic space.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, RatMatrix};

/// A nondegenerate integral symmetric bilinear form on `Z^n`, given by its
/// Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    gram: IntMatrix,
}

impl Lattice {
    /// Validates symmetry and nondegeneracy.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(Error::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Lattice { gram })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::NotSquare);
        }
        Self::new(IntMatrix::from_i64(rows))
    }

    /// The rank-one lattice `<a>`.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let e: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
        Self::new(IntMatrix::diagonal(&e))
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    /// Every diagonal entry even.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    /// Determinant of the Gram matrix.
    pub fn discriminant(&self) -> BigInt {
        self.gram.det()
    }

    /// `(positive, negative)` inertia, computed exactly.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, z) = linalg::inertia(&self.gram.to_rat());
        debug_assert_eq!(z, 0);
        (p, n)
    }

    pub fn is_definite(&self) -> bool {
        let (p, n) = self.signature();
        p == 0 || n == 0
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let gy = self.gram.left_mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn pair_rat(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let g = self.gram.to_rat();
        let gy = g.left_mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    /// `(x, x)`.
    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.pair(x, x)
    }

    /// The integral quadratic form `q~` with `2 q~(x) = (x, x)`; requires an
    /// even lattice.
    pub fn half_norm(&self, x: &[BigInt]) -> BigInt {
        let n = self.norm(x);
        debug_assert!(n.is_even());
        n / 2
    }

    /// Row vector `x * Gram`, the values `(x, e_j)`.
    pub fn pairing_row(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.gram.left_mul_vec(x)
    }

    pub fn orthogonal_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.direct_sum(&other.gram) }
    }

    /// The form scaled by a nonzero integer `k`, written `L(k)`.
    pub fn scaled(&self, k: i64) -> Lattice {
        assert!(k != 0, "scaling by zero");
        Lattice { gram: self.gram.scale(&BigInt::from(k)) }
    }

    /// The lattice in the given basis (rows of `basis`, integer coordinates).
    pub fn restricted(&self, basis: &IntMatrix) -> Result<Lattice> {
        Lattice::new(basis.mul(&self.gram).mul(&basis.transpose()))
    }

    pub fn require_even(&self) -> Result<()> {
        if self.is_even() {
            Ok(())
        } else {
            Err(Error::NotEven)
        }
    }
}

/// A full-rank lattice inside the rational span of an ambient lattice,
/// stored canonically as `basis_num / basis_den` with `basis_num` in Hermite
/// normal form and `gcd(content(basis_num), basis_den) = 1`.
///
/// Two embedded lattices in the same ambient space are equal exactly when
/// their canonical bases are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EmbeddedLattice {
    ambient: Lattice,
    num: IntMatrix,
    den: BigInt,
}

impl EmbeddedLattice {
    /// Lattice generated by the rows of `generators / den` (any number of
    /// generators, spanning the whole space).
    pub fn new(ambient: Lattice, generators: &IntMatrix, den: BigInt) -> Result<Self> {
        if generators.ncols() != ambient.rank() {
            return Err(Error::DimensionMismatch { expected: ambient.rank(), got: generators.ncols() });
        }
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        let mut num = linalg::row_lattice_basis(generators);
        if num.nrows() != ambient.rank() {
            return Err(Error::RankDeficient);
        }
        let mut den = den;
        if den.is_negative() {
            den = -den;
        }
        let g = num.content().gcd(&den);
        if !g.is_one() {
            num = IntMatrix::from_rows(num.to_rows().into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect(), ambient.rank())?;
            den /= &g;
        }
        Ok(EmbeddedLattice { ambient, num, den })
    }

    pub fn from_rational(ambient: Lattice, generators: &RatMatrix) -> Result<Self> {
        let (num, den) = generators.to_int_with_den();
        Self::new(ambient, &num, den)
    }

    /// The ambient lattice itself.
    pub fn whole(ambient: &Lattice) -> Self {
        let n = ambient.rank();
        EmbeddedLattice { ambient: ambient.clone(), num: IntMatrix::identity(n), den: BigInt::one() }
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    pub fn basis_num(&self) -> &IntMatrix {
        &self.num
    }

    pub fn basis_den(&self) -> &BigInt {
        &self.den
    }

    pub fn basis(&self) -> RatMatrix {
        let mut b = self.num.to_rat();
        let den = BigRational::from_integer(self.den.clone());
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                b[(i, j)] = &b[(i, j)] / &den;
            }
        }
        b
    }

    pub fn basis_vector(&self, i: usize) -> Vec<BigRational> {
        self.num.row(i).iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()
    }

    /// Induced Gram matrix `B G B^T`.
    pub fn gram(&self) -> RatMatrix {
        let b = self.basis();
        b.mul(&self.ambient.gram().to_rat()).mul(&b.transpose())
    }

    pub fn is_integral(&self) -> bool {
        self.gram().to_int().is_some()
    }

    pub fn is_even(&self) -> bool {
        self.gram().to_int().is_some_and(|g| (0..g.nrows()).all(|i| g[(i, i)].is_even()))
    }

    /// The induced form as a standalone [`Lattice`]; fails unless integral.
    pub fn to_lattice(&self) -> Result<Lattice> {
        let g = self.gram().to_int().ok_or(Error::NotIntegral)?;
        Lattice::new(g)
    }

    /// Determinant of the induced Gram matrix.
    pub fn discriminant(&self) -> BigRational {
        let b = self.num.det();
        let n = self.rank() as u32;
        BigRational::new(&b * &b * self.ambient.discriminant(), self.den.pow(2 * n))
    }

    /// Signed covolume `det(basis)` relative to the ambient basis.
    pub fn covolume(&self) -> BigRational {
        BigRational::new(self.num.det(), self.den.pow(self.rank() as u32))
    }

    pub fn same_ambient(&self, other: &EmbeddedLattice) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// Integer coordinates of an ambient vector in this lattice's basis.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        // v = c * num / den  <=>  c * num = v * den
        let target: Vec<BigRational> = v.iter().map(|x| x * BigRational::from_integer(self.den.clone())).collect();
        if target.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let target: Vec<BigInt> = target.iter().map(|x| x.to_integer()).collect();
        linalg::solve_integer_combination(&self.num, &target)
    }

    pub fn contains_vector(&self, v: &[BigRational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &EmbeddedLattice) -> bool {
        self.ambient == other.ambient && (0..other.rank()).all(|i| self.contains_vector(&other.basis_vector(i)))
    }

    /// Numerators scaled to the common denominator `den`.
    fn scaled_num(&self, den: &BigInt) -> IntMatrix {
        self.num.scale(&(den / &self.den))
    }

    /// `(x, y)` for ambient vectors.
    pub fn pair(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        self.ambient.pair_rat(x, y)
    }

    /// Row `(x, b_j)` of pairings of an ambient vector with this basis.
    pub fn pairing_with_basis(&self, x: &[BigRational]) -> Vec<BigRational> {
        (0..self.rank()).map(|j| self.pair(x, &self.basis_vector(j))).collect()
    }

    /// The sublattice `{ sum c_i b_i : c in coeffs }` for an integer row basis
    /// of coefficient vectors.
    pub fn sublattice_from_coefficients(&self, coeffs: &IntMatrix) -> Result<EmbeddedLattice> {
        EmbeddedLattice::new(self.ambient.clone(), &coeffs.mul(&self.num), self.den.clone())
    }

    /// Adjoins extra ambient vectors.
    pub fn extended_by(&self, vectors: &[Vec<BigRational>]) -> Result<EmbeddedLattice> {
        let mut rows: Vec<Vec<BigRational>> = (0..self.rank()).map(|i| self.basis_vector(i)).collect();
        rows.extend(vectors.iter().cloned());
        let n = self.rank();
        let mut m = RatMatrix::zeros(rows.len(), n);
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        EmbeddedLattice::from_rational(self.ambient.clone(), &m)
    }
}

/// `det(gram)`.
pub fn discriminant(l: &Lattice) -> BigInt {
    l.discriminant()
}

pub fn signature(l: &Lattice) -> (usize, usize) {
    l.signature()
}

/// Dual lattice `M^∨ = { x : (x, M) ⊆ Z }`, with basis `Gram(M)^{-1} B`.
pub fn dual_lattice(m: &EmbeddedLattice) -> Result<EmbeddedLattice> {
    let inv = m.gram().inverse().ok_or(Error::Degenerate)?;
    EmbeddedLattice::from_rational(m.ambient.clone(), &inv.mul(&m.basis()))
}

/// Largest lattice contained in both.
pub fn intersect(a: &EmbeddedLattice, b: &EmbeddedLattice) -> Result<EmbeddedLattice> {
    a.same_ambient(b)?;
    let den = a.den.lcm(&b.den);
    let na = a.scaled_num(&den);
    let nb = b.scaled_num(&den);
    // x na = y nb  <=>  (x | y) [na; -nb] = 0
    let kern = linalg::left_kernel(&na.stack(&nb.neg()));
    let n = a.rank();
    let x = kern.select_cols(&(0..n).collect::<Vec<_>>());
    EmbeddedLattice::new(a.ambient.clone(), &x.mul(&na), den)
}

/// Smallest lattice containing both.
pub fn lattice_sum(a: &EmbeddedLattice, b: &EmbeddedLattice) -> Result<EmbeddedLattice> {
    a.same_ambient(b)?;
    let den = a.den.lcm(&b.den);
    EmbeddedLattice::new(a.ambient.clone(), &a.scaled_num(&den).stack(&b.scaled_num(&den)), den)
}

/// `[sup : sub]`; fails if `sub` is not contained in `sup`.
pub fn index(sub: &EmbeddedLattice, sup: &EmbeddedLattice) -> Result<BigInt> {
    sub.same_ambient(sup)?;
    if !sup.contains(sub) {
        return Err(Error::NotContained);
    }
    let r = sub.covolume() / sup.covolume();
    debug_assert!(r.is_integer());
    Ok(r.to_integer().abs())
}

/// A homomorphism `L -> Z/dZ`, described by its values on the basis of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularFunctional {
    pub values: Vec<BigInt>,
    pub modulus: BigInt,
}

impl ModularFunctional {
    pub fn new(values: Vec<BigInt>, modulus: BigInt) -> Result<Self> {
        if !modulus.is_positive() {
            return Err(Error::Parse("modulus must be positive".into()));
        }
        let values = values.into_iter().map(|v| v.mod_floor(&modulus)).collect();
        Ok(ModularFunctional { values, modulus })
    }

    /// `x -> (v, x) mod d` for an ambient vector `v` pairing integrally with `L`.
    pub fn pairing_with(l: &EmbeddedLattice, v: &[BigRational], modulus: BigInt) -> Result<Self> {
        let row = l.pairing_with_basis(v);
        if row.iter().any(|x| !x.is_integer()) {
            return Err(Error::NotIntegral);
        }
        Self::new(row.iter().map(|x| x.to_integer()).collect(), modulus)
    }

    /// Order of the image subgroup of `Z/dZ`.
    pub fn image_order(&self) -> BigInt {
        let g = self.values.iter().fold(self.modulus.clone(), |g, v| g.gcd(v));
        &self.modulus / g
    }
}

/// Kernel of a homomorphism `L -> Z/dZ`.
pub fn kernel_of_hom(l: &EmbeddedLattice, h: &ModularFunctional) -> Result<EmbeddedLattice> {
    if h.values.len() != l.rank() {
        return Err(Error::DimensionMismatch { expected: l.rank(), got: h.values.len() });
    }
    let col = IntMatrix::from_rows(h.values.iter().map(|v| vec![v.clone()]).collect(), 1)?;
    let coeffs = linalg::kernel_mod(&col, &h.modulus);
    l.sublattice_from_coefficients(&coeffs)
}

pub(crate) fn rat_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn discriminants_of_basic_lattices() {
        assert_eq!(corpus::hyperbolic().discriminant(), int(-1));
        assert_eq!(Lattice::diagonal(&[2]).unwrap().discriminant(), int(2));
        assert_eq!(corpus::e8().discriminant(), int(1));
    }

    #[test]
    fn signatures() {
        assert_eq!(corpus::hyperbolic().signature(), (1, 1));
        assert_eq!(corpus::e8().scaled(-1).signature(), (0, 8));
    }

    #[test]
    fn degenerate_gram_rejected() {
        assert_eq!(Lattice::from_i64(&[vec![2, 2], vec![2, 2]]), Err(Error::Degenerate));
        assert_eq!(Lattice::from_i64(&[vec![2, 1], vec![0, 2]]), Err(Error::NotSymmetric));
    }

    #[test]
    fn dual_of_rank_one() {
        let l = Lattice::diagonal(&[2]).unwrap();
        let d = dual_lattice(&EmbeddedLattice::whole(&l)).unwrap();
        assert_eq!(d.basis_num(), &IntMatrix::from_i64(&[vec![1]]));
        assert_eq!(d.basis_den(), &int(2));
    }

    #[test]
    fn dual_of_index_two_sublattice_of_u() {
        let u = corpus::hyperbolic();
        let m = EmbeddedLattice::new(u.clone(), &IntMatrix::from_i64(&[vec![1, 0], vec![0, 2]]), int(1)).unwrap();
        let d = dual_lattice(&m).unwrap();
        // dual is Z e/2 + Z f
        let expect = EmbeddedLattice::new(u, &IntMatrix::from_i64(&[vec![1, 0], vec![0, 2]]), int(2)).unwrap();
        assert_eq!(d, expect);
        assert_eq!(index(&m, &d).unwrap(), int(4));
    }

    #[test]
    fn kernel_of_pairing_on_u() {
        let u = corpus::hyperbolic();
        let whole = EmbeddedLattice::whole(&u);
        let h = ModularFunctional::pairing_with(&whole, &rat_vec(&[int(1), int(0)]), int(2)).unwrap();
        let k = kernel_of_hom(&whole, &h).unwrap();
        let expect = EmbeddedLattice::new(u, &IntMatrix::from_i64(&[vec![1, 0], vec![0, 2]]), int(1)).unwrap();
        assert_eq!(k, expect);
        assert_eq!(index(&k, &whole).unwrap(), int(2));
        let zero = ModularFunctional::new(vec![int(0), int(0)], int(5)).unwrap();
        assert_eq!(kernel_of_hom(&whole, &zero).unwrap(), whole);
    }

    #[test]
    fn index_requires_containment() {
        let u = corpus::hyperbolic();
        let whole = EmbeddedLattice::whole(&u);
        let half = EmbeddedLattice::new(u, &IntMatrix::identity(2), int(2)).unwrap();
        assert_eq!(index(&half, &whole), Err(Error::NotContained));
        assert_eq!(index(&whole, &half).unwrap(), int(4));
    }
}
