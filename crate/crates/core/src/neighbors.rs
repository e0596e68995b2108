//! Isotropic lines, Kneser `d`-neighbors and `d`-split sublattices for `d`
//! coprime to the discriminant.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::disc_form::{self, DiscriminantGroup, Element, IsotropicSubgroup, Subgroup};
use crate::error::{invariant, Error, Result};
use crate::lattice::{self, kernel_of_hom, EmbeddedLattice, Lattice, ModularFunctional};
use crate::linalg::{self, IntMatrix};

/// Default cap on the number of candidate classes visited by enumerations.
pub const DEFAULT_MAX_CLASSES: u64 = 1_000_000;

/// A cyclic isotropic subgroup of order `d` in `L/dL`, stored by its
/// canonical generator (reduced mod `d`, lexicographically least among unit
/// multiples).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IsotropicLine {
    parent: Arc<Lattice>,
    d: u64,
    gen: Vec<u64>,
}

impl PartialOrd for IsotropicLine {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IsotropicLine {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.d, &self.gen).cmp(&(other.d, &other.gen))
    }
}

pub(crate) fn check_modulus(l: &Lattice, d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidModulus(d));
    }
    let disc = l.discriminant();
    if !disc.gcd(&BigInt::from(d)).is_one() {
        return Err(Error::NotCoprime { d, disc });
    }
    Ok(())
}

/// Lexicographically least unit multiple of `v` modulo `d`.
pub fn canonical_generator(v: &[u64], d: u64) -> Vec<u64> {
    let mut best: Option<Vec<u64>> = None;
    for u in arith::units(d) {
        let w: Vec<u64> = v.iter().map(|&x| arith::mul_mod(x, u, d)).collect();
        if best.as_ref().map_or(true, |b| w < *b) {
            best = Some(w);
        }
    }
    best.unwrap_or_else(|| v.to_vec())
}

fn vector_order(v: &[u64], d: u64) -> u64 {
    let g = v.iter().fold(d, |g, &x| arith::gcd(g, x));
    d / g
}

impl IsotropicLine {
    /// Validates the line spanned by `gen` in `L/dL` and canonicalizes it.
    pub fn new(parent: &Lattice, d: u64, gen: &[BigInt]) -> Result<Self> {
        check_modulus(parent, d)?;
        parent.require_even()?;
        if gen.len() != parent.rank() {
            return Err(Error::DimensionMismatch { expected: parent.rank(), got: gen.len() });
        }
        let red: Vec<u64> = gen.iter().map(|x| arith::reduce(x, d)).collect();
        if vector_order(&red, d) != d {
            return Err(Error::InvalidLine(format!("generator does not have order {d} in L/dL")));
        }
        let big: Vec<BigInt> = red.iter().map(|&x| BigInt::from(x)).collect();
        if !parent.half_norm(&big).is_multiple_of(&BigInt::from(d)) {
            return Err(Error::InvalidLine("generator is not isotropic".into()));
        }
        Ok(IsotropicLine { parent: Arc::new(parent.clone()), d, gen: canonical_generator(&red, d) })
    }

    pub(crate) fn from_canonical(parent: &Arc<Lattice>, d: u64, gen: Vec<u64>) -> Self {
        IsotropicLine { parent: Arc::clone(parent), d, gen }
    }

    pub fn parent(&self) -> &Lattice {
        &self.parent
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn gen(&self) -> &[u64] {
        &self.gen
    }

    pub fn generator(&self) -> Vec<BigInt> {
        self.gen.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// The functional `(v, ·) mod d` on `L`.
    pub fn functional(&self) -> ModularFunctional {
        let row = self.parent.pairing_row(&self.generator());
        ModularFunctional::new(row, BigInt::from(self.d)).expect("positive modulus")
    }
}

/// Reduced Gram data for fast isotropy tests modulo `m`.
pub(crate) struct ModForm {
    m: u64,
    half_diag: Vec<u64>,
    off: Vec<Vec<u64>>,
}

impl ModForm {
    pub(crate) fn new(l: &Lattice, m: u64) -> Self {
        let n = l.rank();
        let g = l.gram();
        let half_diag = (0..n).map(|i| arith::reduce(&(&g[(i, i)] / 2), m)).collect();
        let off = (0..n).map(|i| (0..n).map(|j| arith::reduce(&g[(i, j)], m)).collect()).collect();
        ModForm { m, half_diag, off }
    }

    pub(crate) fn half_norm(&self, v: &[u64]) -> u64 {
        let m = self.m as u128;
        let mut s: u128 = 0;
        for i in 0..v.len() {
            if v[i] == 0 {
                continue;
            }
            let vi = v[i] as u128;
            s = (s + vi * vi % m * self.half_diag[i] as u128) % m;
            for j in i + 1..v.len() {
                if v[j] != 0 {
                    s = (s + vi * v[j] as u128 % m * self.off[i][j] as u128) % m;
                }
            }
        }
        s as u64
    }
}

/// Number of candidate classes visited when enumerating lines mod `p^n`.
pub(crate) fn class_count(rank: usize, p: u64, n: u32) -> Option<u64> {
    let q = p.checked_pow(n)?;
    let mut total: u64 = 0;
    for lead in 0..rank {
        let before = (q / p).checked_pow(lead as u32)?;
        let after = q.checked_pow((rank - 1 - lead) as u32)?;
        total = total.checked_add(before.checked_mul(after)?)?;
    }
    Some(total)
}

fn decoder(r: usize, p: u64, q: u64, lead: usize) -> impl Fn(u64) -> Vec<u64> + Sync {
    move |mut t: u64| {
        let mut v = vec![0u64; r];
        for slot in v.iter_mut().take(lead) {
            *slot = (t % (q / p)) * p;
            t /= q / p;
        }
        v[lead] = 1;
        for slot in v.iter_mut().skip(lead + 1) {
            *slot = t % q;
            t /= q;
        }
        v
    }
}

fn candidates_with_lead(r: usize, p: u64, q: u64, lead: usize) -> u64 {
    (q / p).pow(lead as u32) * q.pow((r - 1 - lead) as u32)
}

/// Isotropic lines modulo a prime power, each with the generator whose first
/// unit coordinate equals 1.
pub(crate) fn lines_mod_prime_power(l: &Lattice, p: u64, n: u32) -> Vec<Vec<u64>> {
    let q = p.pow(n);
    let r = l.rank();
    let form = ModForm::new(l, q);
    let mut out = Vec::new();
    for lead in 0..r {
        let total = candidates_with_lead(r, p, q, lead);
        let decode = decoder(r, p, q, lead);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let found: Vec<Vec<u64>> =
                (0..total).into_par_iter().map(decode).filter(|v| form.half_norm(v) == 0).collect();
            out.extend(found);
        }
        #[cfg(not(feature = "parallel"))]
        out.extend((0..total).map(decode).filter(|v| form.half_norm(v) == 0));
    }
    out
}

/// Number of isotropic lines modulo a prime power, without storing them.
pub(crate) fn count_lines_mod_prime_power(l: &Lattice, p: u64, n: u32) -> u64 {
    let q = p.pow(n);
    let r = l.rank();
    let form = ModForm::new(l, q);
    let mut count = 0;
    for lead in 0..r {
        let total = candidates_with_lead(r, p, q, lead);
        let decode = decoder(r, p, q, lead);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            count += (0..total).into_par_iter().filter(|&t| form.half_norm(&decode(t)) == 0).count() as u64;
        }
        #[cfg(not(feature = "parallel"))]
        {
            count += (0..total).filter(|&t| form.half_norm(&decode(t)) == 0).count() as u64;
        }
    }
    count
}

/// Number of `d`-isotropic lines, the product of the prime-power counts.
pub fn count_isotropic_lines(l: &Lattice, d: u64, max_classes: u64) -> Result<u64> {
    check_modulus(l, d)?;
    l.require_even()?;
    let mut total = 1u64;
    for (p, n) in arith::factor(d) {
        let c = class_count(l.rank(), p, n).unwrap_or(u64::MAX);
        if c > max_classes {
            return Err(Error::BoundExceeded { what: format!("{c} candidate classes"), bound: max_classes });
        }
        total = total.saturating_mul(count_lines_mod_prime_power(l, p, n));
    }
    Ok(total)
}

/// All `d`-isotropic lines of `L`, sorted by canonical generator.
pub fn enumerate_isotropic_lines(l: &Lattice, d: u64, max_classes: u64) -> Result<Vec<IsotropicLine>> {
    check_modulus(l, d)?;
    l.require_even()?;
    let factors = arith::factor(d);
    let mut budget: u64 = 0;
    for &(p, n) in &factors {
        let c = class_count(l.rank(), p, n).unwrap_or(u64::MAX);
        budget = budget.saturating_add(c);
    }
    if budget > max_classes {
        return Err(Error::BoundExceeded { what: format!("{budget} candidate classes"), bound: max_classes });
    }
    let per_prime: Vec<(u64, Vec<Vec<u64>>)> = factors.iter().map(|&(p, n)| (p.pow(n), lines_mod_prime_power(l, p, n))).collect();
    let total: u64 = per_prime.iter().map(|(_, v)| v.len() as u64).product();
    if total > max_classes {
        return Err(Error::BoundExceeded { what: format!("{total} lines"), bound: max_classes });
    }
    let gens = combine_crt(&per_prime, l.rank());
    let parent = Arc::new(l.clone());
    let mut lines: Vec<IsotropicLine> =
        gens.into_iter().map(|g| IsotropicLine::from_canonical(&parent, d, canonical_generator(&g, d))).collect();
    lines.sort();
    lines.dedup();
    invariant(lines.len() as u64 == total, || "duplicate lines after CRT combination".into())?;
    Ok(lines)
}

pub(crate) fn combine_crt(per_prime: &[(u64, Vec<Vec<u64>>)], rank: usize) -> Vec<Vec<u64>> {
    let mut acc: Vec<(u64, Vec<u64>)> = vec![(1, vec![0; rank])];
    for (q, gens) in per_prime {
        let mut next = Vec::with_capacity(acc.len() * gens.len());
        for (m, a) in &acc {
            for g in gens {
                let v = a.iter().zip(g).map(|(&x, &y)| arith::crt(x, *m, y, *q)).collect();
                next.push((m * q, v));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(_, v)| v).collect()
}

/// A lift `v` of the line generator with `(v, v) ∈ 2d²Z`.
pub fn normalize_generator(line: &IsotropicLine) -> Result<Vec<BigInt>> {
    let l = line.parent();
    let d = BigInt::from(line.d());
    let v = line.generator();
    let k = l.half_norm(&v);
    invariant(k.is_multiple_of(&d), || "line generator is not isotropic".into())?;
    let k = &k / &d;
    if k.is_multiple_of(&d) {
        return Ok(v);
    }
    // solve k + (v, w) ≡ 0 mod d
    let gv = l.pairing_row(&v);
    let mut g = d.clone();
    let mut coef = vec![BigInt::zero(); gv.len()];
    for (j, x) in gv.iter().enumerate() {
        let (ng, a, b) = linalg::ext_gcd(&g, x);
        if ng == g {
            continue;
        }
        for c in coef.iter_mut() {
            *c *= &a;
        }
        coef[j] = b;
        g = ng;
    }
    // Σ coef_j (Gv)_j ≡ g mod d
    if !g.is_one() {
        return Err(Error::Invariant("pairing on L/dL is not perfect".into()));
    }
    let w: Vec<BigInt> = coef.iter().map(|c| (-&k * c).mod_floor(&d)).collect();
    let out: Vec<BigInt> = v.iter().zip(&w).map(|(a, b)| a + &d * b).collect();
    let norm = l.norm(&out);
    invariant(norm.is_multiple_of(&(BigInt::from(2) * &d * &d)), || "normalized generator has wrong norm".into())?;
    Ok(out)
}

/// `ker(ℓ) = { x ∈ L : (v, x) ≡ 0 mod d }`.
pub fn split_sublattice(line: &IsotropicLine) -> Result<EmbeddedLattice> {
    kernel_of_hom(&EmbeddedLattice::whole(line.parent()), &line.functional())
}

/// The `d`-neighbor `ker(ℓ) + Z v/d`.
pub fn neighbor_from_line(line: &IsotropicLine) -> Result<EmbeddedLattice> {
    let v = normalize_generator(line)?;
    let m = split_sublattice(line)?;
    let d = BigInt::from(line.d());
    let gens = m.basis_num().scale(&d).stack(&IntMatrix::from_rows(vec![v], line.parent().rank())?);
    let n = EmbeddedLattice::new(line.parent().clone(), &gens, d)?;
    invariant(n.is_even(), || "neighbor is not even".into())?;
    Ok(n)
}

/// Recovers the line `im(dL' → L/dL)` of a `d`-neighbor.
pub fn line_from_neighbor(l: &Lattice, neighbor: &EmbeddedLattice) -> Result<IsotropicLine> {
    let whole = EmbeddedLattice::whole(l);
    whole.same_ambient(neighbor)?;
    let m = lattice::intersect(&whole, neighbor)?;
    let i1 = lattice::index(&m, &whole)?;
    let i2 = lattice::index(&m, neighbor)?;
    if i1 != i2 || i1.is_one() {
        return Err(Error::NotNeighbor(format!("indices [L:M] = {i1}, [L':M] = {i2}")));
    }
    let d = i1.to_u64().ok_or_else(|| Error::TooLarge("neighbor index".into()))?;
    check_modulus(l, d)?;
    if !neighbor.is_even() {
        return Err(Error::NotNeighbor("neighbor is not even".into()));
    }
    // rows of d L' must lie in L and span a cyclic group of order d mod dL
    let db = BigRational::from_integer(BigInt::from(d));
    let mut rows = Vec::with_capacity(l.rank());
    for i in 0..l.rank() {
        let r: Vec<BigRational> = neighbor.basis_vector(i).iter().map(|x| x * &db).collect();
        if r.iter().any(|x| !x.is_integer()) {
            return Err(Error::NotNeighbor("L'/M is not killed by d".into()));
        }
        rows.push(r.iter().map(|x| arith::reduce(&x.to_integer(), d)).collect::<Vec<u64>>());
    }
    let span = IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), l.rank())?
        .stack(&IntMatrix::identity(l.rank()).scale(&BigInt::from(d)));
    let covol = linalg::row_lattice_basis(&span).det().abs();
    if covol * BigInt::from(d) != BigInt::from(d).pow(l.rank() as u32) {
        return Err(Error::NotNeighbor("image of dL' in L/dL does not have order d".into()));
    }
    // a generator: sum over p^e || d of (d/p^e) r_p, r_p a row whose order has full p-part
    let mut g = vec![0u64; l.rank()];
    for (p, e) in arith::factor(d) {
        let q = p.pow(e);
        let Some(r) = rows.iter().find(|r| vector_order(r, d) % q == 0) else {
            return Err(Error::NotNeighbor("L'/M is not cyclic of order d".into()));
        };
        for (gi, &ri) in g.iter_mut().zip(r.iter()) {
            *gi = (*gi + arith::mul_mod(ri, d / q, d)) % d;
        }
    }
    invariant(vector_order(&g, d) == d, || "cyclic generator has the wrong order".into())?;
    let big: Vec<BigInt> = g.iter().map(|&x| BigInt::from(x)).collect();
    IsotropicLine::new(l, d, &big)
}

/// The class group `L/M ⊂ A_M` for a sublattice `M ⊆ L`.
pub fn quotient_subgroup(dg: &DiscriminantGroup, l: &EmbeddedLattice) -> Result<Subgroup> {
    disc_form::subgroup_of_overlattice(dg, l)
}

/// The unique isotropic `H' ≅ H` in `A_M` with `H ∩ H' = 0`.
///
/// `H` is given as a subgroup of the discriminant form of `M` as computed by
/// [`DiscriminantGroup::of`].  Fails with [`Error::NonSplit`] when the number
/// of candidates is not exactly one.
pub fn transverse_subgroup(m: &EmbeddedLattice, h: &IsotropicSubgroup, bound: u64) -> Result<IsotropicSubgroup> {
    let dg = DiscriminantGroup::of(m)?;
    if dg.form() != h.parent() {
        return Err(Error::InvalidElement("subgroup does not belong to the discriminant form of M".into()));
    }
    let cands = transversal_candidates(dg.form(), h.subgroup(), bound)?;
    if cands.len() != 1 {
        return Err(Error::NonSplit { candidates: cands.len() });
    }
    IsotropicSubgroup::new(dg.form(), cands[0].generators().to_vec())
}

/// Invariant factors of a subgroup given by its element set.
fn invariant_factors(form: &disc_form::FiniteQuadForm, s: &Subgroup) -> Vec<u64> {
    // Count elements of order dividing k for each k; recover the type greedily.
    let elems: Vec<&Element> = s.elements().iter().collect();
    let mut factors = Vec::new();
    let mut remaining = s.order() as u64;
    let mut used: Vec<Element> = Vec::new();
    while remaining > 1 {
        let cur = Subgroup::generated_by(form, used.clone()).expect("valid elements");
        let best = elems
            .iter()
            .filter(|x| !cur.contains(x))
            .max_by_key(|x| {
                let mut with = used.clone();
                with.push((**x).clone());
                (Subgroup::generated_by(form, with).expect("valid").order(), std::cmp::Reverse(**x))
            })
            .expect("nontrivial quotient");
        let mut with = used.clone();
        with.push((*best).clone());
        let grown = Subgroup::generated_by(form, with.clone()).expect("valid").order() as u64;
        factors.push(grown / cur.order() as u64);
        remaining /= grown / cur.order() as u64;
        used = with;
    }
    factors.sort_unstable();
    factors
}

pub(crate) fn transversal_candidates(form: &disc_form::FiniteQuadForm, h: &Subgroup, bound: u64) -> Result<Vec<Subgroup>> {
    let iso = form.isotropic_elements(bound)?;
    let target_order = h.order();
    let factors = invariant_factors(form, h);
    let mut found: Vec<Subgroup> = Vec::new();
    let pool: Vec<&Element> = iso.iter().filter(|x| !h.contains(x) || x.iter().all(|&c| c == 0)).collect();
    // build generator tuples with prescribed orders
    fn rec(
        form: &disc_form::FiniteQuadForm,
        h: &Subgroup,
        pool: &[&Element],
        factors: &[u64],
        target: usize,
        chosen: &mut Vec<Element>,
        found: &mut Vec<Subgroup>,
    ) {
        let i = chosen.len();
        if i == factors.len() {
            let s = Subgroup::generated_by(form, chosen.clone()).expect("valid");
            if s.order() == target && s.is_isotropic(form) && s.meets_trivially(h) && !found.iter().any(|f| f.elements() == s.elements()) {
                found.push(s);
            }
            return;
        }
        for x in pool {
            if form.order_of(x) != factors[i] {
                continue;
            }
            // a cyclic candidate is determined by any of its generators
            if factors.len() == 1 && found.iter().any(|f| f.contains(x)) {
                continue;
            }
            if chosen.iter().any(|c| form.b(c, x) != 0) {
                continue;
            }
            chosen.push((*x).clone());
            rec(form, h, pool, factors, target, chosen, found);
            chosen.pop();
        }
    }
    if factors.is_empty() {
        return Ok(vec![Subgroup::generated_by(form, vec![])?]);
    }
    let mut chosen = Vec::new();
    rec(form, h, &pool, &factors, target_order, &mut chosen, &mut found);
    Ok(found)
}

/// Rank, signature and discriminant forms agree.
pub fn same_genus_invariants(l1: &Lattice, l2: &Lattice, bound: u64) -> Result<bool> {
    l1.require_even()?;
    l2.require_even()?;
    if l1.rank() != l2.rank() || l1.signature() != l2.signature() {
        return Ok(false);
    }
    if l1.discriminant().abs() != l2.discriminant().abs() {
        return Ok(false);
    }
    let a1 = disc_form::discriminant_form(l1)?;
    let a2 = disc_form::discriminant_form(l2)?;
    Ok(disc_form::finite_form_isomorphic(&a1, &a2, bound)?.is_some())
}

/// Convenience: `L/M` as an isotropic subgroup of `A_M` for `M = ker(ℓ)`.
pub fn line_subgroup(line: &IsotropicLine) -> Result<(EmbeddedLattice, IsotropicSubgroup)> {
    let m = split_sublattice(line)?;
    let dg = DiscriminantGroup::of(&m)?;
    let h = quotient_subgroup(&dg, &EmbeddedLattice::whole(line.parent()))?;
    let h = IsotropicSubgroup::new(dg.form(), h.generators().to_vec())?;
    Ok((m, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn lines_of_u() {
        let u = corpus::hyperbolic();
        let lines = enumerate_isotropic_lines(&u, 3, 1000).unwrap();
        let gens: Vec<_> = lines.iter().map(|l| l.gen().to_vec()).collect();
        assert_eq!(gens, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn e8_has_135_lines_mod_2() {
        assert_eq!(enumerate_isotropic_lines(&corpus::e8(), 2, 1000).unwrap().len(), 135);
    }

    #[test]
    fn coprimality_enforced() {
        let l = corpus::diag(&[2]);
        assert!(matches!(enumerate_isotropic_lines(&l, 2, 100), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn neighbor_of_u() {
        let u = corpus::hyperbolic();
        let line = IsotropicLine::new(&u, 2, &[int(1), int(0)]).unwrap();
        assert_eq!(normalize_generator(&line).unwrap(), vec![int(1), int(0)]);
        let n = neighbor_from_line(&line).unwrap();
        let expect = EmbeddedLattice::new(u.clone(), &IntMatrix::from_i64(&[vec![1, 0], vec![0, 4]]), int(2)).unwrap();
        assert_eq!(n, expect);
        assert_eq!(n.to_lattice().unwrap().gram(), u.gram());
        let m = split_sublattice(&line).unwrap();
        assert_eq!(m.discriminant(), BigRational::from_integer(int(-4)));
        assert_eq!(lattice::intersect(&EmbeddedLattice::whole(&u), &n).unwrap(), m);
        assert_eq!(line_from_neighbor(&u, &n).unwrap(), line);
        assert!(matches!(line_from_neighbor(&u, &EmbeddedLattice::whole(&u)), Err(Error::NotNeighbor(_))));
    }

    #[test]
    fn normalization_on_e8_root() {
        let e8 = corpus::e8();
        let mut r = vec![int(0); 8];
        r[0] = int(1);
        // a root is not isotropic mod 2 (q~ = 1); take r1 + r3 + ... instead
        assert!(IsotropicLine::new(&e8, 2, &r).is_err());
        for line in enumerate_isotropic_lines(&e8, 2, 1000).unwrap().iter().take(20) {
            let v = normalize_generator(line).unwrap();
            assert!(e8.norm(&v).is_multiple_of(&int(8)));
        }
    }

    #[test]
    fn transverse_on_u() {
        let u = corpus::hyperbolic();
        let line = IsotropicLine::new(&u, 2, &[int(1), int(0)]).unwrap();
        let (m, h) = line_subgroup(&line).unwrap();
        let t = transverse_subgroup(&m, &h, 1000).unwrap();
        assert_eq!(t.order(), 2);
        let over = disc_form::overlattice_from_isotropic(&m, &t).unwrap();
        assert_eq!(over, neighbor_from_line(&line).unwrap());
    }

    #[test]
    fn doubled_lattice_is_not_split() {
        let u = corpus::hyperbolic();
        let whole = EmbeddedLattice::whole(&u);
        let m = EmbeddedLattice::new(u.clone(), &IntMatrix::identity(2).scale(&int(2)), int(1)).unwrap();
        let dg = DiscriminantGroup::of(&m).unwrap();
        let h = quotient_subgroup(&dg, &whole).unwrap();
        let h = IsotropicSubgroup::new(dg.form(), h.generators().to_vec()).unwrap();
        assert!(matches!(transverse_subgroup(&m, &h, 1000), Err(Error::NonSplit { .. })));
    }

    #[test]
    fn genus_checks() {
        let a = corpus::diag(&[2]);
        assert!(same_genus_invariants(&a, &a, 100).unwrap());
        assert!(!same_genus_invariants(&a, &corpus::diag(&[-2]), 100).unwrap());
    }

    #[test]
    fn composite_modulus_round_trip() {
        let l = corpus::sum(&[corpus::hyperbolic(), corpus::a(2)]);
        let lines = enumerate_isotropic_lines(&l, 4, 100_000).unwrap();
        assert!(!lines.is_empty());
        for line in &lines {
            let n = neighbor_from_line(line).unwrap();
            assert_eq!(&line_from_neighbor(&l, &n).unwrap(), line);
        }
    }
}
