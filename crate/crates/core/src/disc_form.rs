//! Discriminant groups `A_L = L^∨/L` with their finite quadratic forms.
//!
//! A [`FiniteQuadForm`] is stored on generators `g_1, ..., g_k` of orders
//! `d_1 | ... | d_k`.  All values share one denominator `den`: `q(g_i)` is
//! `q_num[i][i] / den` modulo 2 and `b(g_i, g_j)` is `q_num[i][j] / den`
//! modulo 1.  Group elements are coordinate vectors reduced modulo the `d_i`.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{invariant, Error, Result};
use crate::lattice::{self, dual_lattice, EmbeddedLattice, Lattice};
use crate::linalg::{self, IntMatrix};

pub type Element = Vec<u64>;

/// Default cap on `|A|` for exhaustive searches.
pub const DEFAULT_ISO_BOUND: u64 = 10_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FiniteQuadForm {
    divisors: Vec<u64>,
    den: u64,
    // diagonal mod 2*den, off-diagonal mod den
    q_num: Vec<Vec<u64>>,
}

fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::TooLarge(format!("{what} = {x}")))
}

impl FiniteQuadForm {
    /// Validates well-definedness of `q` and `b` on the given cyclic factors.
    /// Values are reduced; `den` may be any positive integer.
    pub fn new(divisors: Vec<u64>, q_num: Vec<Vec<i64>>, den: u64) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = q_num.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_big(divisors, &big, den)
    }

    pub fn from_big(divisors: Vec<u64>, q_num: &[Vec<BigInt>], den: u64) -> Result<Self> {
        let k = divisors.len();
        if den == 0 {
            return Err(Error::Parse("q_den must be positive".into()));
        }
        if q_num.len() != k || q_num.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: q_num.len() });
        }
        if divisors.iter().any(|&d| d < 2) {
            return Err(Error::Parse("elementary divisors must exceed 1".into()));
        }
        if divisors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Parse("elementary divisors must form a divisor chain".into()));
        }
        let mut q = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                if q_num[i][j] != q_num[j][i] {
                    return Err(Error::NotSymmetric);
                }
                q[i][j] = if i == j { arith::reduce(&q_num[i][j], 2 * den) } else { arith::reduce(&q_num[i][j], den) };
            }
        }
        let f = FiniteQuadForm { divisors, den, q_num: q };
        for i in 0..k {
            let d = f.divisors[i] as u128;
            // d_i b(g_i, g_j) ∈ Z and d_i^2 q(g_i) ∈ 2Z
            for j in 0..k {
                if (d * f.q_num[i][j] as u128) % den as u128 != 0 {
                    return Err(Error::InvalidElement(format!("b(g{i}, g{j}) is not killed by the order of g{i}")));
                }
            }
            if (d * d * f.q_num[i][i] as u128) % (2 * den as u128) != 0 {
                return Err(Error::InvalidElement(format!("q(g{i}) is not compatible with its order")));
            }
        }
        Ok(f)
    }

    pub fn trivial() -> Self {
        FiniteQuadForm { divisors: vec![], den: 1, q_num: vec![] }
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Stored numerators (diagonal in `[0, 2 den)`, off-diagonal in `[0, den)`).
    pub fn q_num(&self) -> &[Vec<u64>] {
        &self.q_num
    }

    /// Minimal number of generators.
    pub fn length(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> Result<u64> {
        self.divisors
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::TooLarge("group order".into()))
    }

    pub fn exponent(&self) -> u64 {
        self.divisors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.divisors.len()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1 % self.divisors[i];
        e
    }

    pub fn check_element(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.divisors.len() {
            return Err(Error::InvalidElement(format!("expected {} coordinates, got {}", self.divisors.len(), x.len())));
        }
        if x.iter().zip(&self.divisors).any(|(a, d)| a >= d) {
            return Err(Error::InvalidElement("coordinate not reduced".into()));
        }
        Ok(())
    }

    pub fn reduce(&self, x: &[i64]) -> Element {
        x.iter().zip(&self.divisors).map(|(&a, &d)| a.rem_euclid(d as i64) as u64).collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter().zip(y).zip(&self.divisors).map(|((a, b), d)| (a + b) % d).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        x.iter().zip(&self.divisors).map(|(a, d)| (d - a) % d).collect()
    }

    pub fn scalar(&self, k: u64, x: &[u64]) -> Element {
        x.iter().zip(&self.divisors).map(|(&a, &d)| arith::mul_mod(k % d, a, d)).collect()
    }

    pub fn order_of(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.divisors).fold(1, |acc, (&a, &d)| acc.lcm(&(d / arith::gcd(a, d))))
    }

    /// Numerator of `q(x)` over `den`, in `[0, 2 den)`.
    pub fn q(&self, x: &[u64]) -> u64 {
        let m = 2 * self.den as u128;
        let k = x.len();
        let mut s: u128 = 0;
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as u128 % m;
            s = (s + xi * xi % m * self.q_num[i][i] as u128) % m;
            for j in i + 1..k {
                // 2 b(g_i,g_j) is well defined mod 2
                s = (s + 2 * (xi * (x[j] as u128 % m) % m * self.q_num[i][j] as u128 % m)) % m;
            }
        }
        s as u64
    }

    /// Numerator of `b(x, y)` over `den`, in `[0, den)`.
    pub fn b(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.den as u128;
        let mut s: u128 = 0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                s = (s + xi as u128 % m * (yj as u128 % m) % m * (self.q_num[i][j] as u128 % m)) % m;
            }
        }
        s as u64
    }

    /// `q(x)` as a rational in `[0, 2)`.
    pub fn q_value(&self, x: &[u64]) -> BigRational {
        BigRational::new(BigInt::from(self.q(x)), BigInt::from(self.den))
    }

    pub fn b_value(&self, x: &[u64], y: &[u64]) -> BigRational {
        BigRational::new(BigInt::from(self.b(x, y)), BigInt::from(self.den))
    }

    pub fn is_isotropic(&self, x: &[u64]) -> bool {
        self.q(x) == 0
    }

    /// The same form written over the denominator `den * k`.
    pub fn with_den(&self, new_den: u64) -> FiniteQuadForm {
        assert!(new_den % self.den == 0);
        let k = new_den / self.den;
        let q_num = (0..self.length())
            .map(|i| (0..self.length()).map(|j| self.q_num[i][j] * k).collect())
            .collect();
        FiniteQuadForm { divisors: self.divisors.clone(), den: new_den, q_num }
    }

    /// `(A, -q)`.
    pub fn negated(&self) -> FiniteQuadForm {
        let k = self.length();
        let den = self.den;
        let q_num = (0..k)
            .map(|i| (0..k).map(|j| if i == j { (2 * den - self.q_num[i][j]) % (2 * den) } else { (den - self.q_num[i][j]) % den }).collect())
            .collect();
        FiniteQuadForm { divisors: self.divisors.clone(), den, q_num }
    }

    /// Iterates over all elements in lexicographic order.
    pub fn elements(&self, bound: u64) -> Result<Vec<Element>> {
        let n = self.order()?;
        if n > bound {
            return Err(Error::BoundExceeded { what: format!("group order {n}"), bound });
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut cur = self.zero();
        loop {
            out.push(cur.clone());
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.divisors[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// The orthogonal sum on concatenated generators.  The generator list is
    /// not re-normalized to a divisor chain, so the result is only used
    /// through the `Element` API.
    pub fn direct_sum(&self, other: &FiniteQuadForm) -> FiniteQuadForm {
        let den = self.den.lcm(&other.den);
        let a = self.with_den(den);
        let b = other.with_den(den);
        let k = a.length() + b.length();
        let mut q_num = vec![vec![0u64; k]; k];
        for i in 0..a.length() {
            for j in 0..a.length() {
                q_num[i][j] = a.q_num[i][j];
            }
        }
        for i in 0..b.length() {
            for j in 0..b.length() {
                q_num[a.length() + i][a.length() + j] = b.q_num[i][j];
            }
        }
        let mut divisors = a.divisors.clone();
        divisors.extend(&b.divisors);
        FiniteQuadForm { divisors, den, q_num }
    }

    /// No nonzero `x` with `b(x, A) = 0`.
    pub fn is_nondegenerate(&self) -> bool {
        // x ↦ (b(x, g_j))_j as a map Z^k -> (Z/den)^k; A is nondegenerate iff
        // its kernel is exactly ⊕ d_i Z, i.e. has index ∏ d_i in Z^k.
        if self.is_trivial() {
            return true;
        }
        let k = self.length();
        let b = IntMatrix::from_rows(
            (0..k).map(|i| (0..k).map(|j| BigInt::from(self.q_num[i][j] % self.den)).collect()).collect(),
            k,
        )
        .expect("square");
        let ker = linalg::kernel_mod(&b, &BigInt::from(self.den));
        let idx = ker.det().abs();
        let order: BigInt = self.divisors.iter().map(|&d| BigInt::from(d)).product();
        idx == order
    }

    /// All isotropic elements (including 0), lexicographically ordered.
    pub fn isotropic_elements(&self, bound: u64) -> Result<Vec<Element>> {
        Ok(self.elements(bound)?.into_iter().filter(|x| self.is_isotropic(x)).collect())
    }
}

/// `discriminant_form(L)` for an even lattice.
pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadForm> {
    Ok(DiscriminantGroup::of(&EmbeddedLattice::whole(l))?.form)
}

/// The discriminant group of an even embedded lattice together with the
/// data needed to move between ambient vectors of `M^∨` and group elements.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    lattice: EmbeddedLattice,
    form: FiniteQuadForm,
    // columns of the Smith transform V belonging to nontrivial factors
    v_cols: IntMatrix,
    lifts: Vec<Vec<BigRational>>,
}

impl DiscriminantGroup {
    pub fn of(m: &EmbeddedLattice) -> Result<Self> {
        let gram = m.gram().to_int().ok_or(Error::NotIntegral)?;
        let lat = Lattice::new(gram.clone())?;
        lat.require_even()?;
        let n = gram.nrows();
        let s = linalg::smith(&gram);
        let active: Vec<usize> = (0..n).filter(|&i| !s.diag[i].is_one()).collect();
        let divisors: Vec<u64> = active.iter().map(|&i| to_u64(&s.diag[i], "elementary divisor")).collect::<Result<_>>()?;
        let den = divisors.last().copied().unwrap_or(1);
        // generator i: pairing vector m_i = e_i V^{-1}; dual coordinates
        // c_i = m_i G^{-1} = e_i D^{-1} U since G^{-1} = V D^{-1} U
        let ms: Vec<Vec<BigRational>> = active.iter().map(|&i| lattice::rat_vec(s.v_inv.row(i))).collect();
        let cs: Vec<Vec<BigRational>> = active
            .iter()
            .map(|&i| s.u.row(i).iter().map(|x| BigRational::new(x.clone(), s.diag[i].clone())).collect())
            .collect();
        let k = active.len();
        let den_r = BigRational::from_integer(BigInt::from(den));
        let mut q_num = vec![vec![BigInt::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let bij: BigRational = cs[i].iter().zip(&ms[j]).map(|(a, b)| a * b).sum();
                let scaled = bij * &den_r;
                invariant(scaled.is_integer(), || "discriminant form value has unexpected denominator".into())?;
                q_num[i][j] = scaled.to_integer();
            }
        }
        let form = FiniteQuadForm::from_big(divisors, &q_num, den)?;
        let basis = m.basis();
        let lifts = cs.iter().map(|c| basis.left_mul_vec(c)).collect();
        let v_cols = s.v.select_cols(&active);
        Ok(DiscriminantGroup { lattice: m.clone(), form, v_cols, lifts })
    }

    pub fn form(&self) -> &FiniteQuadForm {
        &self.form
    }

    pub fn lattice(&self) -> &EmbeddedLattice {
        &self.lattice
    }

    /// Class of an ambient vector `x ∈ M^∨`.
    pub fn element_of(&self, x: &[BigRational]) -> Result<Element> {
        let row = self.lattice.pairing_with_basis(x);
        if row.iter().any(|r| !r.is_integer()) {
            return Err(Error::InvalidElement("vector is not in the dual lattice".into()));
        }
        let m: Vec<BigInt> = row.iter().map(|r| r.to_integer()).collect();
        let coords = self.v_cols.left_mul_vec(&m);
        Ok(coords.iter().zip(self.form.divisors()).map(|(c, &d)| arith::reduce(c, d)).collect())
    }

    /// An ambient representative of a group element.
    pub fn lift(&self, x: &[u64]) -> Vec<BigRational> {
        let n = self.lattice.rank();
        let mut v = vec![BigRational::zero(); n];
        for (xi, g) in x.iter().zip(&self.lifts) {
            if *xi == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(*xi));
            for (vj, gj) in v.iter_mut().zip(g) {
                *vj += &c * gj;
            }
        }
        v
    }

    pub fn generator_lifts(&self) -> &[Vec<BigRational>] {
        &self.lifts
    }
}

/// A subgroup of a finite form, given by generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    generators: Vec<Element>,
    elements: BTreeSet<Element>,
}

impl Subgroup {
    pub fn generated_by(form: &FiniteQuadForm, generators: Vec<Element>) -> Result<Self> {
        for g in &generators {
            form.check_element(g)?;
        }
        let mut elements = BTreeSet::new();
        elements.insert(form.zero());
        let mut frontier = vec![form.zero()];
        while let Some(x) = frontier.pop() {
            for g in &generators {
                let y = form.add(&x, g);
                if elements.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup { generators, elements })
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn elements(&self) -> &BTreeSet<Element> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.elements.contains(x)
    }

    pub fn is_isotropic(&self, form: &FiniteQuadForm) -> bool {
        self.elements.iter().all(|x| form.is_isotropic(x))
    }

    /// `H^⊥` inside the ambient group.
    pub fn orthogonal(&self, form: &FiniteQuadForm, bound: u64) -> Result<Subgroup> {
        let elements: BTreeSet<Element> =
            form.elements(bound)?.into_iter().filter(|x| self.generators.iter().all(|g| form.b(x, g) == 0)).collect();
        // greedy generating set
        let mut span = Subgroup::generated_by(form, vec![])?;
        for x in &elements {
            if !span.contains(x) {
                let mut gens = span.generators.clone();
                gens.push(x.clone());
                span = Subgroup::generated_by(form, gens)?;
            }
        }
        invariant(span.elements == elements, || "orthogonal complement is not a subgroup".into())?;
        Ok(span)
    }

    pub fn meets_trivially(&self, other: &Subgroup) -> bool {
        self.elements.intersection(&other.elements).count() == 1
    }
}

/// A subgroup on which `q` vanishes identically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsotropicSubgroup {
    parent: FiniteQuadForm,
    group: Subgroup,
}

impl IsotropicSubgroup {
    pub fn new(parent: &FiniteQuadForm, generators: Vec<Element>) -> Result<Self> {
        let group = Subgroup::generated_by(parent, generators)?;
        if !group.is_isotropic(parent) {
            return Err(Error::NotIsotropic);
        }
        Ok(IsotropicSubgroup { parent: parent.clone(), group })
    }

    pub fn parent(&self) -> &FiniteQuadForm {
        &self.parent
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.group
    }

    pub fn generators(&self) -> &[Element] {
        self.group.generators()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
}

/// The even overlattice `M + lifts(H)` attached to an isotropic subgroup of
/// `A_M` (coordinates relative to [`DiscriminantGroup::of`]).
pub fn overlattice_from_isotropic(m: &EmbeddedLattice, h: &IsotropicSubgroup) -> Result<EmbeddedLattice> {
    let dg = DiscriminantGroup::of(m)?;
    if dg.form() != h.parent() {
        return Err(Error::InvalidElement("subgroup does not belong to the discriminant form of M".into()));
    }
    overlattice_in(&dg, h.subgroup())
}

pub(crate) fn overlattice_in(dg: &DiscriminantGroup, h: &Subgroup) -> Result<EmbeddedLattice> {
    if !h.is_isotropic(dg.form()) {
        return Err(Error::NotIsotropic);
    }
    let lifts: Vec<Vec<BigRational>> = h.generators().iter().map(|g| dg.lift(g)).collect();
    let l = dg.lattice().extended_by(&lifts)?;
    invariant(l.is_even(), || "overlattice from an isotropic subgroup is not even".into())?;
    let idx = lattice::index(dg.lattice(), &l)?;
    invariant(idx == BigInt::from(h.order()), || "overlattice index differs from the subgroup order".into())?;
    Ok(l)
}

/// The subgroup `L/M ⊂ A_M` for an even overlattice `L ⊇ M`.
pub fn subgroup_of_overlattice(dg: &DiscriminantGroup, l: &EmbeddedLattice) -> Result<Subgroup> {
    if !l.contains(dg.lattice()) {
        return Err(Error::NotContained);
    }
    let gens = (0..l.rank()).map(|i| dg.element_of(&l.basis_vector(i))).collect::<Result<Vec<_>>>()?;
    Subgroup::generated_by(dg.form(), gens)
}

/// Searches for an isomorphism `A → B` preserving `q` (and hence `b`);
/// returns the images of the generators of `A`.
pub fn finite_form_isomorphic(a: &FiniteQuadForm, b: &FiniteQuadForm, bound: u64) -> Result<Option<Vec<Element>>> {
    let na = a.order()?;
    let nb = b.order()?;
    if na > bound || nb > bound {
        return Err(Error::BoundExceeded { what: format!("group order {}", na.max(nb)), bound });
    }
    if a.divisors() != b.divisors() {
        return Ok(None);
    }
    let den = a.den().lcm(&b.den());
    let a = a.with_den(den);
    let b = b.with_den(den);
    let elems = b.elements(bound)?;
    let k = a.length();
    let candidates: Vec<Vec<&Element>> = (0..k)
        .map(|i| {
            let g = a.generator(i);
            let (ord, qv) = (a.divisors()[i], a.q(&g));
            elems.iter().filter(|y| b.order_of(y) == ord && b.q(y) == qv).collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let needs_bijectivity = !a.is_nondegenerate();
    let mut chosen: Vec<Element> = Vec::with_capacity(k);
    let found = search_iso(&a, &b, &candidates, &mut chosen, needs_bijectivity, bound)?;
    Ok(found.then_some(chosen))
}

fn search_iso(
    a: &FiniteQuadForm,
    b: &FiniteQuadForm,
    candidates: &[Vec<&Element>],
    chosen: &mut Vec<Element>,
    needs_bijectivity: bool,
    bound: u64,
) -> Result<bool> {
    let i = chosen.len();
    if i == candidates.len() {
        if !needs_bijectivity {
            return Ok(true);
        }
        // Same invariant factors, so injective <=> bijective.
        let img = Subgroup::generated_by(b, chosen.clone())?;
        return Ok(img.order() as u64 == b.order()?);
    }
    let gi = a.generator(i);
    for y in &candidates[i] {
        let ok = (0..i).all(|j| b.b(y, &chosen[j]) == a.b(&gi, &a.generator(j)));
        if !ok {
            continue;
        }
        chosen.push((*y).clone());
        if search_iso(a, b, candidates, chosen, needs_bijectivity, bound)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Applies a homomorphism given by generator images.
pub fn apply_hom(source: &FiniteQuadForm, target: &FiniteQuadForm, images: &[Element], x: &[u64]) -> Element {
    debug_assert_eq!(images.len(), source.length());
    let mut y = target.zero();
    for (xi, img) in x.iter().zip(images) {
        y = target.add(&y, &target.scalar(*xi, img));
    }
    y
}

/// Checks that generator images define an isometry `A → B`.
pub fn is_isometry(a: &FiniteQuadForm, b: &FiniteQuadForm, images: &[Element], bound: u64) -> Result<bool> {
    if images.len() != a.length() || a.order()? != b.order()? {
        return Ok(false);
    }
    for y in images {
        b.check_element(y)?;
    }
    let den = a.den().lcm(&b.den());
    let (a2, b2) = (a.with_den(den), b.with_den(den));
    for i in 0..a.length() {
        let gi = a.generator(i);
        // well-defined on Z/d_i
        if !b.scalar(a.divisors()[i], &images[i]).iter().all(|&c| c == 0) {
            return Ok(false);
        }
        if a2.q(&gi) != b2.q(&images[i]) {
            return Ok(false);
        }
        for j in 0..i {
            if a2.b(&gi, &a.generator(j)) != b2.b(&images[i], &images[j]) {
                return Ok(false);
            }
        }
    }
    let img = Subgroup::generated_by(b, images.to_vec())?;
    let _ = bound;
    Ok(img.order() as u64 == b.order()?)
}

/// Brown/Milgram invariant: `σ mod 8` with
/// `Σ_x exp(πi q(x)) = √|A| · exp(2πi σ / 8)`, computed in `Z[ζ_N]`.
pub fn milgram_signature(a: &FiniteQuadForm, bound: u64) -> Result<u8> {
    let order = a.order()?;
    let n_ord = (2 * a.den()).lcm(&8);
    let n = n_ord as usize;
    let step = (n_ord / (2 * a.den())) as usize;
    let mut sum = vec![BigInt::zero(); n];
    for x in a.elements(bound)? {
        sum[(a.q(&x) as usize * step) % n] += 1;
    }
    let root = sqrt_in_cyclotomic(order, n);
    let phi = cyclotomic_poly(n);
    for sigma in 0..8usize {
        let rotated = mul_by_root(&root, sigma * n / 8);
        let diff: Vec<BigInt> = sum.iter().zip(&rotated).map(|(x, y)| x - y).collect();
        if reduce_mod_poly(&diff, &phi).iter().all(Zero::is_zero) {
            return Ok(sigma as u8);
        }
    }
    Err(Error::Hypothesis("Gauss sum does not have the expected absolute value".into()))
}

// Elements of Z[x]/(x^n - 1) as coefficient vectors of length n.
fn mul_cyc(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % n] += x * y;
            }
        }
    }
    out
}

fn mul_by_root(a: &[BigInt], k: usize) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[(i + k) % n] = x.clone();
    }
    out
}

fn monomial(n: usize, k: usize, c: i64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[k % n] = BigInt::from(c);
    v
}

/// `√m` as an element of `Z[ζ_n]` (requires every odd prime factor of the
/// squarefree part of `m` to divide `n`, and `8 | n`).
fn sqrt_in_cyclotomic(m: u64, n: usize) -> Vec<BigInt> {
    let mut out = monomial(n, 0, 1);
    let mut square = 1i64;
    for (p, e) in arith::factor(m) {
        square *= (p as i64).pow(e / 2);
        if e % 2 == 0 {
            continue;
        }
        let r = if p == 2 {
            // ζ_8 + ζ_8^{-1}
            let mut v = monomial(n, n / 8, 1);
            v[n - n / 8] += 1;
            v
        } else {
            // quadratic Gauss sum g_p; g_p^2 = (-1/p) p
            let step = n / p as usize;
            let mut g = vec![BigInt::zero(); n];
            for x in 1..p {
                g[(x as usize * step) % n] += arith::legendre(x as i64, p) as i64;
            }
            if p % 4 == 1 {
                g
            } else {
                // √p = -i g_p
                mul_cyc(&g, &monomial(n, 3 * n / 4, 1))
            }
        };
        out = mul_cyc(&out, &r);
    }
    out.iter().map(|c| c * square).collect()
}

fn cyclotomic_poly(n: usize) -> Vec<BigInt> {
    // Φ_n = (x^n - 1) / ∏_{d | n, d < n} Φ_d
    let mut cache: HashMap<usize, Vec<BigInt>> = HashMap::new();
    fn go(n: usize, cache: &mut HashMap<usize, Vec<BigInt>>) -> Vec<BigInt> {
        if let Some(p) = cache.get(&n) {
            return p.clone();
        }
        let mut num = vec![BigInt::zero(); n + 1];
        num[0] = BigInt::from(-1);
        num[n] = BigInt::one();
        for d in 1..n {
            if n % d == 0 {
                let phi_d = go(d, cache);
                num = poly_div_exact(&num, &phi_d);
            }
        }
        cache.insert(n, num.clone());
        num
    }
    go(n, &mut cache)
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut q = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = r[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        // monic divisor
        for j in 0..=dd {
            r[i + j] -= &c * &den[j];
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

fn reduce_mod_poly(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    for i in (dm..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dm {
            r[i - dm + j] -= &c * &m[j];
        }
    }
    r.truncate(dm);
    r
}

/// The natural isomorphism `A_{L1} ≅ A_{L2}` through `M = L1 ∩ L2`, given as
/// images in `A_{L2}` of the generators of `A_{L1}`.
#[derive(Clone, Debug)]
pub struct DiscIso {
    pub source: DiscriminantGroup,
    pub target: DiscriminantGroup,
    pub images: Vec<Element>,
}

impl DiscIso {
    pub fn apply(&self, x: &[u64]) -> Element {
        apply_hom(self.source.form(), self.target.form(), &self.images, x)
    }
}

pub fn natural_disc_iso(l1: &EmbeddedLattice, l2: &EmbeddedLattice) -> Result<DiscIso> {
    l1.same_ambient(l2)?;
    let source = DiscriminantGroup::of(l1)?;
    let target = DiscriminantGroup::of(l2)?;
    if l1.discriminant().abs() != l2.discriminant().abs() {
        return Err(Error::Hypothesis("discriminants differ".into()));
    }
    let m = lattice::intersect(l1, l2)?;
    let d1 = dual_lattice(l1)?;
    let d2 = dual_lattice(l2)?;
    // H1^⊥ ∩ H2 = 0 and H2^⊥ ∩ H1 = 0 inside A_M
    if lattice::intersect(&d1, l2)? != m || lattice::intersect(&d2, l1)? != m {
        return Err(Error::Hypothesis("the two isotropic subgroups are not transversal".into()));
    }
    // write x = a + y with a ∈ L1, y ∈ L2^∨
    let den = l1.basis_den().lcm(d2.basis_den());
    let gens = l1.basis_num().scale(&(&den / l1.basis_den())).stack(&d2.basis_num().scale(&(&den / d2.basis_den())));
    let n = l1.rank();
    let mut images = Vec::with_capacity(source.form().length());
    for x in source.generator_lifts() {
        let target_vec: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(den.clone())).collect();
        if target_vec.iter().any(|c| !c.is_integer()) {
            return Err(Error::Invariant("dual vector has unexpected denominator".into()));
        }
        let t: Vec<BigInt> = target_vec.iter().map(|c| c.to_integer()).collect();
        let coef = linalg::solve_integer_combination(&gens, &t)
            .ok_or_else(|| Error::Hypothesis("L1^∨ is not contained in L1 + L2^∨".into()))?;
        let mut y = vec![BigRational::zero(); n];
        for (k, c) in coef[n..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let bv = d2.basis_vector(k);
            let c = BigRational::from_integer(c.clone());
            for (yj, bj) in y.iter_mut().zip(&bv) {
                *yj += &c * bj;
            }
        }
        images.push(target.element_of(&y)?);
    }
    let iso = DiscIso { source, target, images };
    let ok = is_isometry(iso.source.form(), iso.target.form(), &iso.images, u64::MAX)?;
    invariant(ok, || "natural map between discriminant forms is not an isometry".into())?;
    Ok(iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn form(l: &Lattice) -> FiniteQuadForm {
        discriminant_form(l).unwrap()
    }

    #[test]
    fn rank_one_forms() {
        let a = form(&corpus::diag(&[2]));
        assert_eq!(a.divisors(), &[2]);
        assert_eq!(a.q_value(&[1]), BigRational::new(1.into(), 2.into()));
        let b = form(&corpus::diag(&[-2]));
        assert_eq!(b.q_value(&[1]), BigRational::new(3.into(), 2.into()));
        assert!(form(&corpus::hyperbolic()).is_trivial());
    }

    #[test]
    fn isotropic_elements_of_small_forms() {
        assert_eq!(FiniteQuadForm::trivial().isotropic_elements(10).unwrap(), vec![Vec::<u64>::new()]);
        assert_eq!(form(&corpus::diag(&[2])).isotropic_elements(10).unwrap(), vec![vec![0]]);
        let a = form(&corpus::diag(&[2, -2]));
        let iso = a.isotropic_elements(10).unwrap();
        assert_eq!(iso.len(), 2);
        assert_eq!(iso[1], vec![1, 1]);
    }

    #[test]
    fn order_equals_discriminant() {
        for e in corpus::neighbor_corpus() {
            let a = form(&e.lattice);
            assert_eq!(BigInt::from(a.order().unwrap()), e.lattice.discriminant().abs(), "{}", e.name);
            assert!(a.is_nondegenerate());
        }
    }

    #[test]
    fn milgram_small_cases() {
        assert_eq!(milgram_signature(&FiniteQuadForm::trivial(), 10).unwrap(), 0);
        assert_eq!(milgram_signature(&form(&corpus::diag(&[2])), 10).unwrap(), 1);
        assert_eq!(milgram_signature(&form(&corpus::diag(&[-2])), 10).unwrap(), 7);
        assert_eq!(milgram_signature(&form(&corpus::e6()), 10).unwrap(), 6);
        assert_eq!(milgram_signature(&form(&corpus::a(4)), 10).unwrap(), 4);
    }

    #[test]
    fn isomorphism_search() {
        let a = form(&corpus::diag(&[2]));
        let b = form(&corpus::diag(&[-2]));
        assert!(finite_form_isomorphic(&a, &a, 100).unwrap().is_some());
        assert!(finite_form_isomorphic(&a, &b, 100).unwrap().is_none());
        // A_2 ≅ <6>? no: A(A2) = Z/3 with q = 2/3, A(<6>) = Z/6
        let a2 = form(&corpus::a(2));
        let e6m = form(&corpus::e6().scaled(-1));
        assert!(finite_form_isomorphic(&a2, &e6m, 100).unwrap().is_some());
    }

    #[test]
    fn orthogonal_sum_compatibility() {
        let l1 = corpus::a(2);
        let l2 = corpus::diag(&[2, 6]);
        let sum = discriminant_form(&l1.orthogonal_sum(&l2)).unwrap();
        let direct = form(&l1).direct_sum(&form(&l2));
        // compare q-value multisets
        let mut x: Vec<_> = sum.elements(1000).unwrap().iter().map(|e| sum.q_value(e)).collect();
        let mut y: Vec<_> = direct.elements(1000).unwrap().iter().map(|e| direct.q_value(e)).collect();
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }

    #[test]
    fn element_round_trip() {
        let l = corpus::sum(&[corpus::a(2), corpus::diag(&[4])]);
        let dg = DiscriminantGroup::of(&EmbeddedLattice::whole(&l)).unwrap();
        for x in dg.form().elements(100).unwrap() {
            assert_eq!(dg.element_of(&dg.lift(&x)).unwrap(), x);
        }
    }

    #[test]
    fn overlattices_of_index_two_sublattice_of_u() {
        let u = corpus::hyperbolic();
        let m = EmbeddedLattice::new(u.clone(), &IntMatrix::from_i64(&[vec![1, 0], vec![0, 2]]), BigInt::one()).unwrap();
        let dg = DiscriminantGroup::of(&m).unwrap();
        let iso: Vec<_> = dg.form().isotropic_elements(100).unwrap().into_iter().filter(|x| x.iter().any(|&c| c != 0)).collect();
        assert_eq!(iso.len(), 2);
        let overs: Vec<_> = iso
            .iter()
            .map(|x| overlattice_from_isotropic(&m, &IsotropicSubgroup::new(dg.form(), vec![x.clone()]).unwrap()).unwrap())
            .collect();
        assert!(overs.contains(&EmbeddedLattice::whole(&u)));
        for o in &overs {
            assert_eq!(o.discriminant(), BigRational::from_integer((-1).into()));
        }
        let h0 = IsotropicSubgroup::new(dg.form(), vec![]).unwrap();
        assert_eq!(overlattice_from_isotropic(&m, &h0).unwrap(), m);
    }

    #[test]
    fn natural_iso_identity() {
        let l = EmbeddedLattice::whole(&corpus::sum(&[corpus::a(2), corpus::hyperbolic()]));
        let iso = natural_disc_iso(&l, &l).unwrap();
        assert_eq!(iso.images, vec![vec![1]]);
    }

    #[test]
    fn invalid_forms_rejected() {
        // q(g) = 1/3 on Z/2 is not well defined
        assert!(FiniteQuadForm::new(vec![2], vec![vec![1]], 3).is_err());
        assert!(FiniteQuadForm::new(vec![2], vec![vec![1]], 2).is_ok());
        assert!(!FiniteQuadForm::new(vec![2], vec![vec![2]], 2).unwrap().is_nondegenerate());
    }
}
