//! Standard lattices and the built-in test corpus.

use crate::lattice::Lattice;

/// The hyperbolic plane `U`.
pub fn hyperbolic() -> Lattice {
    Lattice::from_i64(&[vec![0, 1], vec![1, 0]]).expect("U is nondegenerate")
}

fn dynkin(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    Lattice::from_i64(&g).expect("Cartan matrices are nondegenerate")
}

/// Root lattice `A_n`.
pub fn a(n: usize) -> Lattice {
    assert!(n >= 1);
    dynkin(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

/// Root lattice `D_n`, `n >= 4`.
pub fn d(n: usize) -> Lattice {
    assert!(n >= 4);
    let mut edges: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
    edges.push((n - 3, n - 1));
    dynkin(n, &edges)
}

// Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
fn e_edges(n: usize) -> Vec<(usize, usize)> {
    let all = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    all.iter().copied().filter(|&(a, b)| a < n && b < n).collect()
}

pub fn e6() -> Lattice {
    dynkin(6, &e_edges(6))
}

pub fn e7() -> Lattice {
    dynkin(7, &e_edges(7))
}

/// The even unimodular positive definite lattice of rank 8 (Cartan matrix).
pub fn e8() -> Lattice {
    let l = dynkin(8, &e_edges(8));
    debug_assert!(l.is_even() && l.discriminant() == 1.into() && l.signature() == (8, 0));
    l
}

/// `<a_1> ⊕ ... ⊕ <a_k>`.
pub fn diag(entries: &[i64]) -> Lattice {
    Lattice::diagonal(entries).expect("nonzero diagonal")
}

pub fn sum(parts: &[Lattice]) -> Lattice {
    let mut it = parts.iter();
    let first = it.next().expect("at least one summand").clone();
    it.fold(first, |acc, l| acc.orthogonal_sum(l))
}

/// A named corpus entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub lattice: Lattice,
}

fn entry(name: &'static str, lattice: Lattice) -> Entry {
    Entry { name, lattice }
}

/// Even lattices of rank 2..8, definite and indefinite, used by the
/// neighbor invariant suite.
///
/// Discriminants are chosen so that every admissible modulus in
/// `{2,3,4,5,6,7,9}` is cheap enough to enumerate exhaustively.
pub fn neighbor_corpus() -> Vec<Entry> {
    let u = hyperbolic;
    let b7 = || Lattice::from_i64(&[vec![2, 1], vec![1, 4]]).unwrap();
    vec![
        entry("U", u()),
        entry("U(2)", u().scaled(2)),
        entry("A2", a(2)),
        entry("A2(-1)", a(2).scaled(-1)),
        entry("[2,1;1,4]", b7()),
        entry("[2,3;3,2]", Lattice::from_i64(&[vec![2, 3], vec![3, 2]]).unwrap()),
        entry("<2>+<-2>", diag(&[2, -2])),
        entry("A3", a(3)),
        entry("U+<2>", sum(&[u(), diag(&[2])])),
        entry("A1+A2(-1)", sum(&[a(1), a(2).scaled(-1)])),
        entry("D4", d(4)),
        entry("U+U", sum(&[u(), u()])),
        entry("A4", a(4)),
        entry("U+A2", sum(&[u(), a(2)])),
        entry("A2+A2(-1)", sum(&[a(2), a(2).scaled(-1)])),
        entry("D5", d(5)),
        entry("U+A3(-1)", sum(&[u(), a(3).scaled(-1)])),
        entry("E6", e6()),
        entry("U+A2+A2(-1)", sum(&[u(), a(2), a(2).scaled(-1)])),
        entry("A1+A2+A2+[2,1;1,4]", sum(&[a(1), a(2), a(2), b7()])),
        entry("U+A1+A2+[2,1;1,4]", sum(&[u(), a(1), a(2), b7()])),
        entry("A2+[2,1;1,4]+A4(-1)", sum(&[a(2), b7(), a(4).scaled(-1)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn root_lattice_discriminants() {
        assert_eq!(a(4).discriminant(), BigInt::from(5));
        assert_eq!(d(5).discriminant(), BigInt::from(4));
        assert_eq!(e6().discriminant(), BigInt::from(3));
        assert_eq!(e7().discriminant(), BigInt::from(2));
        assert_eq!(e8().discriminant(), BigInt::from(1));
        assert_eq!(e8().signature(), (8, 0));
        assert!(e8().is_even());
    }

    #[test]
    fn corpus_is_even_and_spans_ranks() {
        let c = neighbor_corpus();
        assert!(c.len() >= 20);
        assert!(c.iter().all(|e| e.lattice.is_even()));
        for r in 2..=8 {
            assert!(c.iter().any(|e| e.lattice.rank() == r), "no rank {r}");
        }
        assert!(c.iter().any(|e| !e.lattice.is_definite()));
    }
}
