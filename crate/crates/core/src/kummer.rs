//! The transcendental lattice of `E_1 × E_2` and its isotropic lines.
//!
//! `T(A)` has basis `v_1 = e⊗e'`, `v_2 = e⊗f'`, `v_3 = f⊗e'`, `v_4 = f⊗f'`
//! with the product of the two symplectic forms.  A homomorphism
//! `f = [[a, b], [c, d]]` corresponds to `b v_1 + d v_2 - a v_3 - c v_4`, whose
//! half-norm is `det f`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{invariant, Error, Result};
use crate::lattice::{self, EmbeddedLattice, Lattice};
use crate::linalg::{self, IntMatrix};
use crate::neighbors::{self, canonical_generator, IsotropicLine};

pub fn kummer_transcendental() -> Lattice {
    Lattice::from_i64(&[vec![0, 0, 0, 1], vec![0, 0, -1, 0], vec![0, -1, 0, 0], vec![1, 0, 0, 0]]).expect("nondegenerate")
}

/// A 2×2 matrix `[[a, b], [c, d]]` over `Z/mZ` (entries kept as integers).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct HomMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl HomMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        HomMatrix { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// `f(z) = ω(x, z) · y`, the rank-one map with kernel `<x>` and image `<y>`.
    pub fn rank_one(x: [i64; 2], y: [i64; 2]) -> Self {
        // ω(x, z) = x_e z_f - x_f z_e
        HomMatrix { a: -y[0] * x[1], b: y[0] * x[0], c: -y[1] * x[1], d: y[1] * x[0] }
    }

    fn apply(&self, z: [i64; 2]) -> [i64; 2] {
        [self.a * z[0] + self.b * z[1], self.c * z[0] + self.d * z[1]]
    }
}

pub fn hom_to_vector(m: &HomMatrix) -> Vec<BigInt> {
    [m.b, m.d, -m.a, -m.c].iter().map(|&x| BigInt::from(x)).collect()
}

pub fn vector_to_hom(v: &[i64]) -> HomMatrix {
    HomMatrix { a: -v[2], b: v[0], c: -v[3], d: v[1] }
}

/// Canonical generator of a cyclic order-`d` subgroup of `(Z/d)^2`.
pub fn canonical_subgroup(x: [i64; 2], d: u64) -> [u64; 2] {
    let v: Vec<u64> = x.iter().map(|&c| c.rem_euclid(d as i64) as u64).collect();
    let c = canonical_generator(&v, d);
    [c[0], c[1]]
}

/// All cyclic subgroups of order `d` in `(Z/d)^2`, by canonical generator.
pub fn cyclic_subgroups(d: u64) -> Vec<[u64; 2]> {
    let mut out = BTreeSet::new();
    for x in 0..d {
        for y in 0..d {
            if arith::gcd(arith::gcd(x, y), d) == 1 {
                out.insert(canonical_subgroup([x as i64, y as i64], d));
            }
        }
    }
    out.into_iter().collect()
}

fn order_mod(v: [i64; 2], d: u64) -> u64 {
    let g = v.iter().fold(d, |g, &x| arith::gcd(g, x.rem_euclid(d as i64) as u64));
    d / g
}

/// A pair `(C_1, C_2)` of cyclic subgroups of order `d`, by generators.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SubgroupPair {
    pub c1: [u64; 2],
    pub c2: [u64; 2],
}

/// `(ker f, im f)` for a homomorphism whose kernel and image are cyclic of
/// order `d`.
pub fn kernel_and_image(f: &HomMatrix, d: u64) -> Result<SubgroupPair> {
    let cols = [f.apply([1, 0]), f.apply([0, 1])];
    let rows = [[f.a, f.b], [f.c, f.d]];
    let y = cols.iter().find(|c| order_mod(**c, d) == d).ok_or_else(|| Error::InvalidLine("image is not cyclic of order d".into()))?;
    let r = rows.iter().find(|r| order_mod(**r, d) == d).ok_or_else(|| Error::InvalidLine("kernel is not cyclic of order d".into()))?;
    // every row is a multiple of (-x_f, x_e)
    let x = [r[1], -r[0]];
    let f2 = HomMatrix::rank_one(x, *y);
    let (c1, c2) = (canonical_subgroup(x, d), canonical_subgroup(*y, d));
    // f agrees with ω(x,·)y up to a unit: check ker/im directly
    let dm = d as i64;
    let kills = |m: &HomMatrix, z: [i64; 2]| m.apply(z).iter().all(|c| c.rem_euclid(dm) == 0);
    if !kills(f, x) || !kills(&f2, x) {
        return Err(Error::InvalidLine("homomorphism is not of rank one".into()));
    }
    Ok(SubgroupPair { c1, c2 })
}

/// One row of the line dictionary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DictionaryEntry {
    pub pair: SubgroupPair,
    pub hom: HomMatrix,
    pub line: IsotropicLine,
}

/// The bijection between `d`-isotropic lines of `T(A)` and pairs of cyclic
/// subgroups, verified exhaustively in both directions.
pub fn line_subgroup_dictionary(d: u64) -> Result<Vec<DictionaryEntry>> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidModulus(d));
    }
    let t = kummer_transcendental();
    let subgroups = cyclic_subgroups(d);
    let mut by_line: BTreeMap<Vec<u64>, DictionaryEntry> = BTreeMap::new();
    for &c1 in &subgroups {
        for &c2 in &subgroups {
            let hom = HomMatrix::rank_one([c1[0] as i64, c1[1] as i64], [c2[0] as i64, c2[1] as i64]);
            let line = IsotropicLine::new(&t, d, &hom_to_vector(&hom))?;
            let pair = SubgroupPair { c1, c2 };
            if by_line.insert(line.gen().to_vec(), DictionaryEntry { pair, hom, line }).is_some() {
                return Err(Error::Invariant("two subgroup pairs give the same line".into()));
            }
        }
    }
    let lines = neighbors::enumerate_isotropic_lines(&t, d, neighbors::DEFAULT_MAX_CLASSES)?;
    invariant(lines.len() == by_line.len(), || format!("{} lines but {} subgroup pairs", lines.len(), by_line.len()))?;
    for line in &lines {
        let entry = by_line.get(line.gen()).ok_or_else(|| Error::Invariant("line without a subgroup pair".into()))?;
        let v: Vec<i64> = line.gen().iter().map(|&x| x as i64).collect();
        let back = kernel_and_image(&vector_to_hom(&v), d)?;
        invariant(back == entry.pair, || "line does not map back to its subgroup pair".into())?;
    }
    let mut out: Vec<DictionaryEntry> = by_line.into_values().collect();
    out.sort_by(|a, b| a.pair.cmp(&b.pair));
    Ok(out)
}

/// `g ∈ SL_2(Z)` whose second column reduces to `x` mod `d`.
fn sl2_with_column(x: [u64; 2], d: u64) -> [[BigInt; 2]; 2] {
    let (mut p, q) = (BigInt::from(x[0]), BigInt::from(x[1]));
    // make the lift primitive
    while !p.gcd(&q).is_one() {
        p += BigInt::from(d);
    }
    let (g, s, t) = linalg::ext_gcd(&p, &q);
    debug_assert!(g.is_one());
    // g = [[a, p], [c, q]] with a q - c p = 1; s p + t q = 1 gives a = t, c = -s
    [[t, p], [-s, q]]
}

/// Result of the explicit neighbor construction.
#[derive(Clone, Debug)]
pub struct KummerNeighbor {
    pub pair: SubgroupPair,
    pub d: u64,
    /// `T' = (1/d)(H_1 ⊗ H_2)`.
    pub neighbor: EmbeddedLattice,
    /// Basis `g(d v_1), g(v_2), g(v_3), g(v_4/d)` as numerators over `d`.
    pub natural_basis: IntMatrix,
    pub intersection: EmbeddedLattice,
    pub line: IsotropicLine,
}

impl KummerNeighbor {
    /// Gram matrix of `T'` in its natural basis.
    pub fn natural_gram(&self) -> Result<IntMatrix> {
        let t = kummer_transcendental();
        let b = self.natural_basis.to_rat();
        let g = b.mul(&t.gram().to_rat()).mul(&b.transpose());
        let dd = BigInt::from(self.d * self.d);
        let mut out = g.to_int().ok_or(Error::NotIntegral)?;
        for i in 0..4 {
            for j in 0..4 {
                let (q, r) = out[(i, j)].div_rem(&dd);
                invariant(r.is_zero(), || "natural basis Gram is not integral".into())?;
                out[(i, j)] = q;
            }
        }
        Ok(out)
    }
}

fn tensor(g1: &[[BigInt; 2]; 2], g2: &[[BigInt; 2]; 2]) -> IntMatrix {
    // image of v_{(i,j)} = g1(col i) ⊗ g2(col j), rows in v-coordinates
    let mut rows = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let a = [&g1[0][i], &g1[1][i]];
            let b = [&g2[0][j], &g2[1][j]];
            rows.push(vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]);
        }
    }
    IntMatrix::from_rows(rows, 4).expect("4x4")
}

/// `T' = (1/d)(H_1 ⊗ H_2)` with `H_i` the preimage of `C_i`.
pub fn kummer_neighbor(pair: SubgroupPair, d: u64) -> Result<KummerNeighbor> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidModulus(d));
    }
    for c in [pair.c1, pair.c2] {
        if order_mod([c[0] as i64, c[1] as i64], d) != d {
            return Err(Error::InvalidLine("subgroup generator does not have order d".into()));
        }
    }
    let t = kummer_transcendental();
    let g = tensor(&sl2_with_column(pair.c1, d), &sl2_with_column(pair.c2, d));
    let db = BigInt::from(d);
    // rows of g are g(v_1..v_4); natural basis d·g(v_1), g(v_2), g(v_3), g(v_4)/d over den d
    let scales = [&db * &db, db.clone(), db.clone(), BigInt::one()];
    let natural = IntMatrix::from_rows((0..4).map(|i| g.row(i).iter().map(|x| x * &scales[i]).collect()).collect(), 4)?;
    let neighbor = EmbeddedLattice::new(t.clone(), &natural, db.clone())?;
    let inter_rows = IntMatrix::from_rows(
        (0..4).map(|i| g.row(i).iter().map(|x| if i == 0 { x * &db } else { x.clone() }).collect()).collect(),
        4,
    )?;
    let intersection = EmbeddedLattice::new(t.clone(), &inter_rows, BigInt::one())?;
    let whole = EmbeddedLattice::whole(&t);
    invariant(lattice::intersect(&whole, &neighbor)? == intersection, || "T ∩ T' is not <dv1, v2, v3, v4>".into())?;
    let line = neighbors::line_from_neighbor(&t, &neighbor)?;
    let hom = HomMatrix::rank_one([pair.c1[0] as i64, pair.c1[1] as i64], [pair.c2[0] as i64, pair.c2[1] as i64]);
    invariant(line == IsotropicLine::new(&t, d, &hom_to_vector(&hom))?, || "neighbor line differs from the dictionary line".into())?;
    let kn = KummerNeighbor { pair, d, neighbor, natural_basis: natural, intersection, line };
    invariant(kn.natural_gram()? == *t.gram(), || "Gram of T' differs from Gram of T(A)".into())?;
    Ok(kn)
}
