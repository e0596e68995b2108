//! Short vectors and isometry search for positive definite lattices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::IntMatrix;

/// Cap on the number of vectors returned by [`short_vectors`].
pub const MAX_SHORT_VECTORS: usize = 1_000_000;

fn require_positive_definite(l: &Lattice) -> Result<()> {
    if l.signature().1 != 0 {
        return Err(Error::WrongSignature("lattice is not positive definite".into()));
    }
    Ok(())
}

// Q(x) = Σ_i q[i][i] (x_i + Σ_{j>i} q[i][j] x_j)^2
fn quadratic_coefficients(l: &Lattice) -> Vec<Vec<BigRational>> {
    let n = l.rank();
    let mut q: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(l.gram()[(i, j)].clone())).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for m in k..n {
                let t = &q[k][i] * &q[i][m];
                q[k][m] -= t;
            }
        }
    }
    q
}

/// All nonzero `x` with `(x, x) <= bound`, in the order found by the
/// enumeration (both `x` and `-x` are returned).
pub fn short_vectors(l: &Lattice, bound: i64) -> Result<Vec<Vec<i64>>> {
    require_positive_definite(l)?;
    let n = l.rank();
    let q = quadratic_coefficients(l);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let remaining = BigRational::from_integer(BigInt::from(bound));
    descend(&q, n, &mut x, remaining, &mut out)?;
    out.retain(|v| v.iter().any(|&c| c != 0));
    Ok(out)
}

fn descend(q: &[Vec<BigRational>], i: usize, x: &mut [i64], remaining: BigRational, out: &mut Vec<Vec<i64>>) -> Result<()> {
    if i == 0 {
        if out.len() >= MAX_SHORT_VECTORS {
            return Err(Error::BoundExceeded { what: "short vector count".into(), bound: MAX_SHORT_VECTORS as u64 });
        }
        out.push(x.to_vec());
        return Ok(());
    }
    let k = i - 1;
    let n = x.len();
    let c: BigRational = (k + 1..n).map(|j| &q[k][j] * BigRational::from_integer(BigInt::from(x[j]))).sum();
    // q_kk (x_k + c)^2 <= remaining
    let ratio = &remaining / &q[k][k];
    let r: BigInt = ratio.floor().to_integer().max(BigInt::zero()).sqrt() + 1;
    let center: BigInt = (-&c).round().to_integer();
    let lo = (&center - &r - 1u32).to_i64().ok_or_else(|| Error::TooLarge("short vector coordinate".into()))?;
    let hi = (&center + &r + 1u32).to_i64().ok_or_else(|| Error::TooLarge("short vector coordinate".into()))?;
    for v in lo..=hi {
        let t = BigRational::from_integer(BigInt::from(v)) + &c;
        let used = &q[k][k] * &t * &t;
        if used > remaining {
            continue;
        }
        x[k] = v;
        descend(q, k, x, &remaining - used, out)?;
    }
    x[k] = 0;
    Ok(())
}

/// Finds `T` with `T · gram(b) · Tᵀ = gram(a)`, i.e. the images in `b` of the
/// basis vectors of `a`, by backtracking over short vectors.
pub fn find_isometry(a: &Lattice, b: &Lattice) -> Result<Option<IntMatrix>> {
    require_positive_definite(a)?;
    require_positive_definite(b)?;
    if a.rank() != b.rank() || a.discriminant() != b.discriminant() {
        return Ok(None);
    }
    let n = a.rank();
    let ga = a.gram().to_i64().ok_or_else(|| Error::TooLarge("gram entries".into()))?;
    let max_norm = (0..n).map(|i| ga[i][i]).max().unwrap_or(0);
    let pool = short_vectors(b, max_norm)?;
    let big: Vec<Vec<BigInt>> = pool.iter().map(|v| v.iter().map(|&c| BigInt::from(c)).collect()).collect();
    let norms: Vec<i64> = big.iter().map(|v| b.norm(v).to_i64().expect("bounded norm")).collect();
    let candidates: Vec<Vec<usize>> = (0..n).map(|i| (0..pool.len()).filter(|&k| norms[k] == ga[i][i]).collect()).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let gb = b.gram();
    let pair = |u: usize, v: usize| -> BigInt {
        let gv = gb.left_mul_vec(&big[v]);
        big[u].iter().zip(&gv).map(|(x, y)| x * y).sum()
    };
    fn rec(
        i: usize,
        n: usize,
        ga: &[Vec<i64>],
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        pair: &dyn Fn(usize, usize) -> BigInt,
    ) -> bool {
        if i == n {
            return true;
        }
        for &c in &candidates[i] {
            if (0..i).all(|j| pair(c, chosen[j]) == BigInt::from(ga[i][j])) {
                chosen.push(c);
                if rec(i + 1, n, ga, candidates, chosen, pair) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if !rec(0, n, &ga, &candidates, &mut chosen, &pair) {
        return Ok(None);
    }
    let t = IntMatrix::from_rows(chosen.iter().map(|&k| big[k].clone()).collect(), n)?;
    // equal discriminants force det(T) = ±1
    debug_assert!(t.det().abs() == BigInt::from(1));
    debug_assert!(t.mul(gb).mul(&t.transpose()) == *a.gram());
    Ok(Some(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn e8_has_240_roots() {
        assert_eq!(short_vectors(&corpus::e8(), 2).unwrap().len(), 240);
        assert_eq!(short_vectors(&corpus::a(2), 2).unwrap().len(), 6);
        assert_eq!(short_vectors(&corpus::d(4), 2).unwrap().len(), 24);
    }

    #[test]
    fn isometry_between_bases() {
        let e8 = corpus::e8();
        // a unimodular change of basis
        let mut t = IntMatrix::identity(8);
        t.add_row_multiple(0, 3, &BigInt::from(2));
        t.add_row_multiple(5, 1, &BigInt::from(-1));
        let other = e8.restricted(&t).unwrap();
        let iso = find_isometry(&e8, &other).unwrap().unwrap();
        assert_eq!(&iso.mul(other.gram()).mul(&iso.transpose()), e8.gram());
        assert!(find_isometry(&corpus::d(4), &corpus::sum(&[corpus::a(2), corpus::a(2)])).unwrap().is_none());
    }

    #[test]
    fn indefinite_rejected() {
        assert!(short_vectors(&corpus::hyperbolic(), 2).is_err());
    }
}
