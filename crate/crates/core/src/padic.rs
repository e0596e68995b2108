//! Generalized neighbors at odd primes dividing the discriminant.
//!
//! At an odd prime `p` the localization splits as `U_0 ⊥ U_1(p) ⊥ ...`; lines
//! are taken inside a fixed global lift of the unimodular part `U_0`, which
//! is computed from a Jordan decomposition.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::disc_form::{self, DiscriminantGroup, FiniteQuadForm, IsotropicSubgroup, Subgroup};
use crate::error::{invariant, Error, Result};
use crate::lattice::{self, EmbeddedLattice, Lattice, ModularFunctional};
use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::neighbors::{self, IsotropicLine};

/// One Jordan constituent `p^scale · (unit block)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JordanBlock {
    pub scale: u32,
    /// Diagonal unit block, entries reduced mod `p^precision`.
    pub units: Vec<BigInt>,
}

impl JordanBlock {
    pub fn rank(&self) -> usize {
        self.units.len()
    }

    /// Legendre symbol of the block determinant.
    pub fn det_class(&self, p: u64) -> i8 {
        let det = self.units.iter().fold(BigInt::one(), |a, u| a * u);
        arith::legendre(arith::reduce(&det, p) as i64, p)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModularDecomposition {
    pub p: u64,
    pub precision: u32,
    pub blocks: Vec<JordanBlock>,
    /// Rows `t_i` with `T · gram · Tᵀ ≡ diag(p^{s_i} u_i) mod p^precision`.
    pub transform: IntMatrix,
    /// Scale of each row of `transform`.
    pub row_scales: Vec<u32>,
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::UnsupportedPrime(2));
    }
    if !arith::is_prime(p) {
        return Err(Error::InvalidModulus(p));
    }
    Ok(())
}

fn val_mod(x: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut x = x.clone();
    let mut v = 0;
    while v < cap && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// The precision used by default: `n + v_p(disc) + 4`.
pub fn default_precision(l: &Lattice, p: u64, n: u32) -> u32 {
    n + arith::valuation(&l.discriminant(), p) + 4
}

/// Diagonalizes the form over `Z/p^N` by unimodular integer row operations.
pub fn jordan_decomposition(l: &Lattice, p: u64, precision: u32) -> Result<ModularDecomposition> {
    require_odd_prime(p)?;
    let need = arith::valuation(&l.discriminant(), p) + 1;
    if precision < need {
        return Err(Error::InsufficientPrecision { valuation: need - 1, precision });
    }
    let n = l.rank();
    let pb = BigInt::from(p);
    let modulus = pb.pow(precision);
    let red = |x: &BigInt| x.mod_floor(&modulus);
    let mut a = l.gram().clone();
    let mut t = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = red(&a[(i, j)]);
        }
    }
    let mut scales = Vec::with_capacity(n);
    for k in 0..n {
        // entry of minimal valuation in the trailing block
        let mut best = (precision, k, k);
        for i in k..n {
            for j in i..n {
                let v = val_mod(&a[(i, j)], &pb, precision);
                if v < best.0 || (v == best.0 && i == j && best.1 != best.2) {
                    best = (v, i, j);
                }
            }
        }
        let (v, i, j) = best;
        if v >= precision {
            return Err(Error::InsufficientPrecision { valuation: v, precision });
        }
        let diag_ok = val_mod(&a[(i, i)], &pb, precision) == v;
        let piv = if i == j || diag_ok {
            i
        } else if val_mod(&a[(j, j)], &pb, precision) == v {
            j
        } else {
            // e_i <- e_i + e_j; the diagonal entry gains 2 a_ij of valuation v
            let one = BigInt::one();
            a.add_row_multiple(i, j, &one);
            a.add_col_multiple(i, j, &one);
            t.add_row_multiple(i, j, &one);
            i
        };
        a.swap_rows(k, piv);
        a.swap_cols(k, piv);
        t.swap_rows(k, piv);
        let pv = pb.pow(v);
        let unit = &a[(k, k)] / &pv;
        let inv = mod_inverse(&unit, &modulus).ok_or_else(|| Error::Invariant("pivot is not a unit times p^v".into()))?;
        for r in k + 1..n {
            if a[(r, k)].is_zero() {
                continue;
            }
            let w = &a[(r, k)] / &pv;
            let f = -(w * &inv).mod_floor(&modulus);
            a.add_row_multiple(r, k, &f);
            a.add_col_multiple(r, k, &f);
            t.add_row_multiple(r, k, &f);
        }
        for x in 0..n {
            for y in 0..n {
                a[(x, y)] = red(&a[(x, y)]);
            }
            for y in 0..n {
                t[(x, y)] = red(&t[(x, y)]);
            }
        }
        scales.push(v);
    }
    let mut blocks: Vec<JordanBlock> = Vec::new();
    for (k, &s) in scales.iter().enumerate() {
        let unit = (&a[(k, k)] / pb.pow(s)).mod_floor(&modulus);
        match blocks.last_mut() {
            Some(b) if b.scale == s => b.units.push(unit),
            _ => blocks.push(JordanBlock { scale: s, units: vec![unit] }),
        }
    }
    let check = t.mul(l.gram()).mul(&t.transpose());
    for x in 0..n {
        for y in 0..n {
            let want = if x == y { a[(x, x)].clone() } else { BigInt::zero() };
            invariant((&check[(x, y)] - want).is_multiple_of(&modulus), || "Jordan transform check failed".into())?;
        }
    }
    Ok(ModularDecomposition { p, precision, blocks, transform: t, row_scales: scales })
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some((e.x * e.gcd.signum()).mod_floor(m))
}

/// A global lift of the unimodular Jordan constituent at `p`, with its
/// orthogonal complement in `L`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnimodularPart {
    pub p: u64,
    /// Rows span a primitive sublattice `U ⊆ L` with `p ∤ disc(U)`.
    pub basis: IntMatrix,
    /// Rows span `U^⊥ ∩ L` (may be empty).
    pub complement: IntMatrix,
}

impl UnimodularPart {
    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// `U` with its induced form.
    pub fn lattice(&self, l: &Lattice) -> Result<Lattice> {
        l.restricted(&self.basis)
    }
}

/// Saturation of the row span inside `Z^n`.
fn saturate(rows: &IntMatrix) -> IntMatrix {
    // the Z-span of the rational row space intersected with Z^n is the
    // orthogonal of the orthogonal
    let perp = linalg::left_kernel(&rows.transpose());
    if perp.nrows() == 0 {
        return IntMatrix::identity(rows.ncols());
    }
    linalg::left_kernel(&perp.transpose())
}

/// The maximal unimodular sublattice at `p`, realized globally.
pub fn maximal_unimodular_sublattice(l: &Lattice, p: u64) -> Result<UnimodularPart> {
    require_odd_prime(p)?;
    let jd = jordan_decomposition(l, p, default_precision(l, p, 1))?;
    let rows: Vec<usize> = (0..l.rank()).filter(|&i| jd.row_scales[i] == 0).collect();
    if rows.is_empty() {
        return Err(Error::NoUnimodularPart(p));
    }
    let basis = if rows.len() == l.rank() { IntMatrix::identity(l.rank()) } else { saturate(&jd.transform.select_rows(&rows)) };
    let u = l.restricted(&basis)?;
    invariant(!u.discriminant().is_multiple_of(&BigInt::from(p)), || "unimodular part has discriminant divisible by p".into())?;
    let complement = if basis.nrows() == l.rank() {
        IntMatrix::zeros(0, l.rank())
    } else {
        linalg::left_kernel(&l.gram().mul(&basis.transpose()))
    };
    Ok(UnimodularPart { p, basis, complement })
}

/// The `p`-primary component of a generalized line: a generator of a line in
/// `L/p^nL` lying in the image of `U/p^nU`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LinePart {
    pub p: u64,
    pub n: u32,
    /// Generator in `L/p^nL`, reduced.
    pub gen: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeneralizedLine {
    parent: Arc<Lattice>,
    d: u64,
    /// Canonical generator in `L/dL`.
    gen: Vec<u64>,
    parts: Vec<LinePart>,
}

impl PartialOrd for GeneralizedLine {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GeneralizedLine {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.d, &self.gen).cmp(&(other.d, &other.gen))
    }
}

fn part_is_classical(l: &Lattice, p: u64) -> bool {
    !l.discriminant().is_multiple_of(&BigInt::from(p))
}

fn check_generalized_modulus(l: &Lattice, d: u64) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidModulus(d));
    }
    l.require_even()?;
    if d % 2 == 0 && !part_is_classical(l, 2) {
        return Err(Error::UnsupportedPrime(2));
    }
    Ok(())
}

impl GeneralizedLine {
    /// Validates per-prime parts and assembles the line.
    pub fn new(parent: &Lattice, parts: Vec<LinePart>) -> Result<Self> {
        let parent = Arc::new(parent.clone());
        let mut parts = parts;
        parts.sort();
        if parts.windows(2).any(|w| w[0].p == w[1].p) {
            return Err(Error::InvalidLine("repeated prime".into()));
        }
        let mut per_prime = Vec::new();
        for part in &parts {
            validate_part(&parent, part)?;
            per_prime.push((part.p.pow(part.n), vec![part.gen.clone()]));
        }
        let d: u64 = parts.iter().map(|x| x.p.pow(x.n)).product();
        check_generalized_modulus(&parent, d)?;
        let gen = neighbors::combine_crt(&per_prime, parent.rank()).pop().expect("one combination");
        let gen = neighbors::canonical_generator(&gen, d.max(1));
        Ok(GeneralizedLine { parent, d, gen, parts })
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

    pub fn parts(&self) -> &[LinePart] {
        &self.parts
    }

    /// The classical line when `gcd(d, disc) = 1`.
    pub fn to_classical(&self) -> Result<IsotropicLine> {
        let g: Vec<BigInt> = self.gen.iter().map(|&x| BigInt::from(x)).collect();
        IsotropicLine::new(&self.parent, self.d, &g)
    }
}

fn validate_part(l: &Lattice, part: &LinePart) -> Result<()> {
    let q = part.p.checked_pow(part.n).ok_or_else(|| Error::TooLarge("prime power".into()))?;
    if !arith::is_prime(part.p) || part.n == 0 {
        return Err(Error::InvalidLine(format!("invalid prime power {}^{}", part.p, part.n)));
    }
    if part.gen.len() != l.rank() || part.gen.iter().any(|&x| x >= q) {
        return Err(Error::InvalidLine("generator not reduced mod p^n".into()));
    }
    if part.gen.iter().all(|&x| x % part.p == 0) {
        return Err(Error::InvalidLine("generator does not have order p^n".into()));
    }
    let big: Vec<BigInt> = part.gen.iter().map(|&x| BigInt::from(x)).collect();
    if !l.half_norm(&big).is_multiple_of(&BigInt::from(q)) {
        return Err(Error::InvalidLine("generator is not isotropic".into()));
    }
    if part_is_classical(l, part.p) {
        return Ok(());
    }
    if part.p == 2 {
        return Err(Error::UnsupportedPrime(2));
    }
    // must lie in U/p^nU
    let u = maximal_unimodular_sublattice(l, part.p)?;
    let gens = u.basis.stack(&IntMatrix::identity(l.rank()).scale(&BigInt::from(q)));
    if linalg::solve_integer_combination(&gens, &big).is_none() {
        return Err(Error::InvalidLine("generator is not contained in the unimodular part".into()));
    }
    Ok(())
}

/// Generators (reduced mod `p^n`) of all isotropic lines of the image of
/// `U/p^nU`, each normalized with first unit coordinate 1 in `U`-coordinates.
fn part_generators(l: &Lattice, p: u64, n: u32) -> Result<Vec<Vec<u64>>> {
    if part_is_classical(l, p) {
        return Ok(neighbors::lines_mod_prime_power(l, p, n));
    }
    require_odd_prime(p)?;
    let u = maximal_unimodular_sublattice(l, p)?;
    let ul = u.lattice(l)?;
    let q = p.pow(n);
    let coeffs = neighbors::lines_mod_prime_power(&ul, p, n);
    Ok(coeffs
        .into_iter()
        .map(|c| {
            let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            u.basis.left_mul_vec(&big).iter().map(|x| arith::reduce(x, q)).collect()
        })
        .collect())
}

fn part_class_count(l: &Lattice, p: u64, n: u32) -> Result<u64> {
    let r = if part_is_classical(l, p) { l.rank() } else { maximal_unimodular_sublattice(l, p)?.rank() };
    Ok(neighbors::class_count(r, p, n).unwrap_or(u64::MAX))
}

/// All generalized `d`-isotropic lines, sorted by canonical generator.
pub fn generalized_isotropic_lines(l: &Lattice, d: u64, max_classes: u64) -> Result<Vec<GeneralizedLine>> {
    check_generalized_modulus(l, d)?;
    let factors = arith::factor(d);
    let mut budget = 0u64;
    for &(p, n) in &factors {
        budget = budget.saturating_add(part_class_count(l, p, n)?);
    }
    if budget > max_classes {
        return Err(Error::BoundExceeded { what: format!("{budget} candidate classes"), bound: max_classes });
    }
    let per_prime: Vec<(u64, u32, Vec<Vec<u64>>)> =
        factors.iter().map(|&(p, n)| part_generators(l, p, n).map(|g| (p, n, g))).collect::<Result<_>>()?;
    let total: u64 = per_prime.iter().map(|x| x.2.len() as u64).product();
    if total > max_classes {
        return Err(Error::BoundExceeded { what: format!("{total} lines"), bound: max_classes });
    }
    let parent = Arc::new(l.clone());
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; per_prime.len()];
    if per_prime.iter().any(|x| x.2.is_empty()) {
        return Ok(out);
    }
    loop {
        let parts: Vec<LinePart> = per_prime
            .iter()
            .zip(&idx)
            .map(|((p, n, gens), &i)| {
                let q = p.pow(*n);
                LinePart { p: *p, n: *n, gen: neighbors::canonical_generator(&gens[i], q) }
            })
            .collect();
        let crt_in: Vec<(u64, Vec<Vec<u64>>)> = parts.iter().map(|x| (x.p.pow(x.n), vec![x.gen.clone()])).collect();
        let gen = neighbors::combine_crt(&crt_in, l.rank()).pop().expect("one combination");
        out.push(GeneralizedLine { parent: Arc::clone(&parent), d, gen: neighbors::canonical_generator(&gen, d.max(1)), parts });
        // odometer
        let mut k = idx.len();
        loop {
            if k == 0 {
                out.sort();
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_prime[k].2.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `N_d(L)`, the number of generalized `d`-isotropic lines.
pub fn count_generalized_isotropic_lines(l: &Lattice, d: u64, max_classes: u64) -> Result<u64> {
    check_generalized_modulus(l, d)?;
    let mut total = 1u64;
    for (p, n) in arith::factor(d) {
        let c = part_class_count(l, p, n)?;
        if c > max_classes {
            return Err(Error::BoundExceeded { what: format!("{c} candidate classes"), bound: max_classes });
        }
        let host = if part_is_classical(l, p) { l.clone() } else { maximal_unimodular_sublattice(l, p)?.lattice(l)? };
        total = total.saturating_mul(neighbors::count_lines_mod_prime_power(&host, p, n));
    }
    Ok(total)
}

/// A global lift `v` of the line generator whose `p`-parts lie in the
/// unimodular parts and with `(v, v) ∈ 2d²Z`.
pub fn normalized_lift(line: &GeneralizedLine) -> Result<Vec<BigInt>> {
    let l = line.parent();
    let d = line.d();
    let n = l.rank();
    let v: Vec<BigInt> = line.gen().iter().map(|&x| BigInt::from(x)).collect();
    if d == 1 {
        return Ok(vec![BigInt::zero(); n]);
    }
    let db = BigInt::from(d);
    let k = l.half_norm(&v);
    invariant(k.is_multiple_of(&db), || "generalized line is not isotropic".into())?;
    let k = k / &db;
    // per prime power: solve (v, w) ≡ -k with w in U (or L)
    let mut w_parts: Vec<(u64, Vec<u64>)> = Vec::new();
    for part in line.parts() {
        let q = part.p.pow(part.n);
        let qb = BigInt::from(q);
        let basis = if part_is_classical(l, part.p) { IntMatrix::identity(n) } else { maximal_unimodular_sublattice(l, part.p)?.basis };
        let gv = l.pairing_row(&v);
        let vals: Vec<BigInt> = (0..basis.nrows()).map(|i| basis.row(i).iter().zip(&gv).map(|(a, b)| a * b).sum()).collect();
        let mut g = qb.clone();
        let mut coef = vec![BigInt::zero(); vals.len()];
        for (j, x) in vals.iter().enumerate() {
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
        invariant(g.is_one(), || "pairing on the unimodular part is not perfect".into())?;
        let c: Vec<BigInt> = coef.iter().map(|c| (-&k * c).mod_floor(&qb)).collect();
        let w = basis.left_mul_vec(&c);
        w_parts.push((q, w.iter().map(|x| arith::reduce(x, q)).collect()));
    }
    let crt_in: Vec<(u64, Vec<Vec<u64>>)> = w_parts.into_iter().map(|(q, w)| (q, vec![w])).collect();
    let w = neighbors::combine_crt(&crt_in, n).pop().expect("one combination");
    let out: Vec<BigInt> = v.iter().zip(&w).map(|(a, b)| a + &db * BigInt::from(*b)).collect();
    invariant(l.norm(&out).is_multiple_of(&(BigInt::from(2) * &db * &db)), || "normalized lift has wrong norm".into())?;
    Ok(out)
}

/// `M = { x ∈ L : (v, x) ≡ 0 mod d }`.
pub fn generalized_split(line: &GeneralizedLine) -> Result<EmbeddedLattice> {
    let l = line.parent();
    let whole = EmbeddedLattice::whole(l);
    if line.d() == 1 {
        return Ok(whole);
    }
    let v: Vec<BigInt> = line.gen().iter().map(|&x| BigInt::from(x)).collect();
    let f = ModularFunctional::new(l.pairing_row(&v), BigInt::from(line.d()))?;
    let m = lattice::kernel_of_hom(&whole, &f)?;
    invariant(lattice::index(&m, &whole)? == BigInt::from(line.d()), || "generalized split has wrong index".into())?;
    Ok(m)
}

/// `L' = M + Z v/d`.
pub fn generalized_neighbor(line: &GeneralizedLine) -> Result<EmbeddedLattice> {
    let l = line.parent();
    if line.d() == 1 {
        return Ok(EmbeddedLattice::whole(l));
    }
    let v = normalized_lift(line)?;
    let m = generalized_split(line)?;
    let d = BigInt::from(line.d());
    let gens = m.basis_num().scale(&d).stack(&IntMatrix::from_rows(vec![v], l.rank())?);
    let n = EmbeddedLattice::new(l.clone(), &gens, d)?;
    invariant(n.is_even(), || "generalized neighbor is not even".into())?;
    Ok(n)
}

/// Invariant-factor presentation of a subgroup as a finite quadratic form,
/// with its generators in the ambient group.
pub fn subgroup_form(form: &FiniteQuadForm, s: &Subgroup) -> Result<(FiniteQuadForm, Vec<disc_form::Element>)> {
    let gens: Vec<disc_form::Element> = s.generators().to_vec();
    let m = gens.len();
    let k = form.length();
    if m == 0 || k == 0 {
        return Ok((FiniteQuadForm::trivial(), vec![]));
    }
    let e = form.divisors().iter().fold(1u64, |a, &d| a.lcm(&d));
    // relations c with Σ c_j g_j = 0: scale coordinate i by e/d_i, solve mod e
    let rel_in = IntMatrix::from_rows(
        gens.iter().map(|g| g.iter().zip(form.divisors()).map(|(&x, &d)| BigInt::from(x * (e / d))).collect()).collect(),
        k,
    )?;
    let rel = linalg::kernel_mod(&rel_in, &BigInt::from(e));
    let s_nf = linalg::smith(&rel);
    let mut divisors = Vec::new();
    let mut new_gens = Vec::new();
    for i in 0..m {
        let di = s_nf.diag.get(i).cloned().unwrap_or_else(BigInt::zero).abs();
        if di.is_one() {
            continue;
        }
        let di = di.to_u64().ok_or_else(|| Error::TooLarge("subgroup divisor".into()))?;
        let mut h = form.zero();
        for j in 0..m {
            let c = arith::reduce(&s_nf.v_inv[(i, j)], e);
            h = form.add(&h, &form.scalar(c, &gens[j]));
        }
        divisors.push(di);
        new_gens.push(h);
    }
    let den = form.den();
    let q_num: Vec<Vec<BigInt>> = (0..new_gens.len())
        .map(|i| {
            (0..new_gens.len())
                .map(|j| BigInt::from(if i == j { form.q(&new_gens[i]) } else { form.b(&new_gens[i], &new_gens[j]) }))
                .collect()
        })
        .collect();
    let sub = FiniteQuadForm::from_big(divisors, &q_num, den)?;
    invariant(sub.order()? == s.order() as u64, || "subgroup presentation has the wrong order".into())?;
    Ok((sub, new_gens))
}

/// Transversal candidates `H'` for a generalized split: isotropic,
/// `H ∩ H' = 0`, `H' ≅ L/M`, `(H')^⊥ ≅ H' ⊥ A_L`, and at each prime dividing
/// `gcd(d, disc)` the overlattice is `M'_p ⊥ U^⊥` (it lies in
/// `M + (U + p^n L)/d`).
pub fn generalized_transversals(line: &GeneralizedLine, bound: u64) -> Result<(DiscriminantGroup, Subgroup, Vec<Subgroup>)> {
    let l = line.parent();
    let m = generalized_split(line)?;
    let dg = DiscriminantGroup::of(&m)?;
    let h = neighbors::quotient_subgroup(&dg, &EmbeddedLattice::whole(l))?;
    let cands = neighbors::transversal_candidates(dg.form(), &h, bound)?;
    let al = disc_form::discriminant_form(l)?;
    let d = BigInt::from(line.d());
    let mut windows = Vec::new();
    for part in line.parts() {
        if part_is_classical(l, part.p) {
            continue;
        }
        let u = maximal_unimodular_sublattice(l, part.p)?;
        let q = BigInt::from(part.p).pow(part.n);
        let gens = m.basis_num().scale(&d).stack(&u.basis).stack(&IntMatrix::identity(l.rank()).scale(&q));
        windows.push(EmbeddedLattice::new(l.clone(), &gens, d.clone())?);
    }
    let mut ok = Vec::new();
    for c in cands {
        let over = disc_form::overlattice_in(&dg, &c)?;
        if !windows.iter().all(|w| w.contains(&over)) {
            continue;
        }
        let perp = c.orthogonal(dg.form(), bound)?;
        let (perp_form, _) = subgroup_form(dg.form(), &perp)?;
        let (c_form, _) = subgroup_form(dg.form(), &c)?;
        let expected = c_form.direct_sum(&al);
        let expected_elems = Subgroup::generated_by(&expected, (0..expected.length()).map(|i| expected.generator(i)).collect())?;
        let (expected, _) = subgroup_form(&expected, &expected_elems)?;
        if disc_form::finite_form_isomorphic(&perp_form, &expected, bound)?.is_some() {
            ok.push(c);
        }
    }
    Ok((dg, h, ok))
}

/// The unique transversal of a generalized split.
pub fn generalized_transverse_subgroup(line: &GeneralizedLine, bound: u64) -> Result<IsotropicSubgroup> {
    let (dg, _, cands) = generalized_transversals(line, bound)?;
    if cands.len() != 1 {
        return Err(Error::NonSplit { candidates: cands.len() });
    }
    IsotropicSubgroup::new(dg.form(), cands[0].generators().to_vec())
}

/// Local data at one prime: generators with `p`-power denominators of the
/// desired localization `L'_p`.
#[derive(Clone, Debug)]
pub struct LocalChange {
    pub p: u64,
    pub generators: RatMatrix,
}

const MAX_GLUE_EXPONENT: u32 = 64;

fn p_power_den(x: &BigRational, p: u64) -> bool {
    let mut d = x.denom().clone();
    let pb = BigInt::from(p);
    while d.is_multiple_of(&pb) {
        d /= &pb;
    }
    d.is_one()
}

/// The lattice `L'` with `L'_p` given by the local data and `L'_q = L_q`
/// elsewhere.
pub fn glue_localizations(l: &Lattice, changes: &[LocalChange]) -> Result<EmbeddedLattice> {
    let whole = EmbeddedLattice::whole(l);
    let n = l.rank();
    let mut seen = Vec::new();
    let mut locals: Vec<(u64, u32, EmbeddedLattice)> = Vec::new();
    for ch in changes {
        if !arith::is_prime(ch.p) {
            return Err(Error::InconsistentLocalData(format!("{} is not prime", ch.p)));
        }
        if seen.contains(&ch.p) {
            return Err(Error::InconsistentLocalData(format!("prime {} given twice", ch.p)));
        }
        seen.push(ch.p);
        if ch.generators.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ch.generators.ncols() });
        }
        for i in 0..ch.generators.nrows() {
            if ch.generators.row(i).iter().any(|x| !p_power_den(x, ch.p)) {
                return Err(Error::InconsistentLocalData(format!("denominator not a power of {}", ch.p)));
            }
        }
        // X(K) = span(gens) + p^K L, decreasing in K until stable
        let pb = BigInt::from(ch.p);
        let make = |k: u32| -> Result<EmbeddedLattice> {
            let mut rows = RatMatrix::zeros(ch.generators.nrows() + n, n);
            for i in 0..ch.generators.nrows() {
                for j in 0..n {
                    rows[(i, j)] = ch.generators[(i, j)].clone();
                }
            }
            let pk = BigRational::from_integer(pb.pow(k));
            for i in 0..n {
                rows[(ch.generators.nrows() + i, i)] = pk.clone();
            }
            EmbeddedLattice::from_rational(l.clone(), &rows)
        };
        let mut k = 0;
        let mut cur = make(0)?;
        loop {
            let next = make(k + 1)?;
            if next == cur {
                break;
            }
            k += 1;
            if k > MAX_GLUE_EXPONENT {
                return Err(Error::InconsistentLocalData(format!("local data at {} does not span a lattice", ch.p)));
            }
            cur = next;
        }
        locals.push((ch.p, k, cur));
    }
    if locals.is_empty() {
        return Ok(whole);
    }
    // L' = Σ_r u_r X_r with u_r = ∏_{q ≠ r} q^{K_q}
    let mut acc: Option<EmbeddedLattice> = None;
    for (idx, (_, _, x)) in locals.iter().enumerate() {
        let u: BigInt = locals.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, (q, k, _))| BigInt::from(*q).pow(*k)).product();
        let scaled = EmbeddedLattice::new(l.clone(), &x.basis_num().scale(&u), x.basis_den().clone())?;
        acc = Some(match acc {
            None => scaled,
            Some(a) => lattice::lattice_sum(&a, &scaled)?,
        });
    }
    let out = acc.expect("at least one local change");
    // localization checks
    for (p, _, x) in &locals {
        let pb = BigInt::from(*p);
        let i = lattice::intersect(&out, x)?;
        for big in [&out, x] {
            if lattice::index(&i, big)?.is_multiple_of(&pb) {
                return Err(Error::Invariant(format!("glued lattice differs from the local datum at {p}")));
            }
        }
    }
    let i = lattice::intersect(&out, &whole)?;
    for big in [&out, &whole] {
        let idx = lattice::index(&i, big)?;
        let mut rest = idx;
        for (p, _, _) in &locals {
            let pb = BigInt::from(*p);
            while rest.is_multiple_of(&pb) {
                rest /= &pb;
            }
        }
        invariant(rest.is_one(), || "glued lattice changed an unchanged prime".into())?;
    }
    Ok(out)
}

/// The localization data of an embedded lattice at `p`, as its basis.
pub fn local_datum(m: &EmbeddedLattice, p: u64) -> LocalChange {
    LocalChange { p, generators: m.basis() }
}
