//! Lattice data of K3 surfaces: the K3 lattice, (NS, T) pairs glued along
//! their discriminant forms, Brauer torsion and the lattices attached to
//! isotropic Brauer lines.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::corpus;
use crate::disc_form::{self, DiscriminantGroup, Element, Subgroup};
use crate::error::{invariant, Error, Result};
use crate::lattice::{self, EmbeddedLattice, Lattice, ModularFunctional};
use crate::linalg::{self, IntMatrix};
use crate::neighbors::{self, IsotropicLine};
use crate::padic::{self, GeneralizedLine};

pub const K3_RANK: usize = 22;

/// `U³ ⊕ E8(-1)²`.
pub fn k3_lattice() -> Lattice {
    let u = corpus::hyperbolic();
    let e = corpus::e8().scaled(-1);
    corpus::sum(&[u.clone(), u.clone(), u, e.clone(), e])
}

/// Outcome of a one-sided embedding test.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Embeddable {
    Yes,
    Unknown,
}

impl Embeddable {
    pub fn as_str(self) -> &'static str {
        match self {
            Embeddable::Yes => "yes",
            Embeddable::Unknown => "unknown",
        }
    }
}

fn require_transcendental_type(l: &Lattice) -> Result<()> {
    l.require_even()?;
    let (pos, neg) = l.signature();
    if pos != 2 || neg > 19 {
        return Err(Error::WrongSignature(format!("expected signature (2, k) with k <= 19, got ({pos}, {neg})")));
    }
    Ok(())
}

/// Sufficient criteria for a primitive embedding into the K3 lattice:
/// rank at most 10, or `ℓ(A_L) <= 20 - rank`.
pub fn embeds_primitively_sufficient(l: &Lattice) -> Result<Embeddable> {
    require_transcendental_type(l)?;
    if l.rank() <= 10 {
        return Ok(Embeddable::Yes);
    }
    let len = disc_form::discriminant_form(l)?.length();
    if len + l.rank() + 2 <= K3_RANK {
        return Ok(Embeddable::Yes);
    }
    Ok(Embeddable::Unknown)
}

/// No proper even overlattice, i.e. no nonzero isotropic element in `A_L`.
pub fn is_maximal(l: &Lattice, bound: u64) -> Result<bool> {
    let form = disc_form::discriminant_form(l)?;
    Ok(form.isotropic_elements(bound)?.iter().all(|x| x.iter().all(|&c| c == 0)))
}

/// Adjoins isotropic classes until none is left.
pub fn maximalize(m: &EmbeddedLattice, bound: u64) -> Result<EmbeddedLattice> {
    let mut cur = m.clone();
    loop {
        let dg = DiscriminantGroup::of(&cur)?;
        let iso = dg.form().isotropic_elements(bound)?;
        let Some(x) = iso.into_iter().find(|x| x.iter().any(|&c| c != 0)) else {
            return Ok(cur);
        };
        let h = Subgroup::generated_by(dg.form(), vec![x])?;
        cur = disc_form::overlattice_in(&dg, &h)?;
    }
}

/// `T ⊗ Z/d` with the pairing `(x, y) mod d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BrauerTorsion {
    pub t: Lattice,
    pub d: u64,
}

impl BrauerTorsion {
    pub fn new(t: &Lattice, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidModulus(d));
        }
        Ok(BrauerTorsion { t: t.clone(), d })
    }

    pub fn order(&self) -> Option<u64> {
        self.d.checked_pow(self.t.rank() as u32)
    }

    pub fn pairing(&self, x: &[u64], y: &[u64]) -> u64 {
        let bx: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        let by: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
        crate::arith::reduce(&self.t.pair(&bx, &by), self.d)
    }

    /// Perfect iff the Gram determinant is a unit mod `d`.
    pub fn is_perfect(&self) -> bool {
        self.t.discriminant().gcd(&BigInt::from(self.d)).is_one()
    }

    /// The functional `y ↦ (x, y)/d ∈ Q/Z`, as values on the basis.
    pub fn functional(&self, x: &[u64]) -> Vec<BigRational> {
        let bx: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        let d = BigInt::from(self.d);
        self.t.pairing_row(&bx).into_iter().map(|v| BigRational::new(v.mod_floor(&d), d.clone())).collect()
    }
}

/// Kernel of a finite set of `Q/Z`-valued functionals, given by their values
/// on the basis of `t`.
#[derive(Clone, Debug)]
pub struct BrauerKernel {
    pub kernel: EmbeddedLattice,
    /// `|B|`, the order of the image of evaluation.
    pub order: BigInt,
}

pub fn brauer_kernel(t: &Lattice, functionals: &[Vec<BigRational>]) -> Result<BrauerKernel> {
    let n = t.rank();
    if functionals.is_empty() {
        return Ok(BrauerKernel { kernel: EmbeddedLattice::whole(t), order: BigInt::one() });
    }
    for f in functionals {
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
    }
    let den = functionals.iter().flatten().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let cols = IntMatrix::from_rows(
        (0..n)
            .map(|i| functionals.iter().map(|f| (&f[i] * BigRational::from_integer(den.clone())).to_integer().mod_floor(&den)).collect())
            .collect(),
        functionals.len(),
    )?;
    let basis = linalg::kernel_mod(&cols, &den);
    let kernel = EmbeddedLattice::new(t.clone(), &basis, BigInt::one())?;
    // |B| = |image of Z^n in (Z/den)^k| = den^k / |coker|
    let k = functionals.len();
    let stacked = cols.stack(&IntMatrix::identity(k).scale(&den));
    let h = linalg::row_lattice_basis(&stacked);
    let covol = h.det().abs();
    let order = den.pow(k as u32) / covol;
    let idx = lattice::index(&kernel, &EmbeddedLattice::whole(t))?;
    invariant(idx == order, || "Brauer kernel index differs from |B|".into())?;
    Ok(BrauerKernel { kernel, order })
}

/// A Néron–Severi lattice and a transcendental lattice with an
/// anti-isometry `A_ns → A_t`, given as images of the generators of
/// `discriminant_form(ns)` in `discriminant_form(t)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct K3LatticePair {
    ns: Lattice,
    t: Lattice,
    glue: Vec<Element>,
}

impl K3LatticePair {
    pub fn new(ns: Lattice, t: Lattice, glue: Vec<Element>) -> Result<Self> {
        let pair = K3LatticePair { ns, t, glue };
        pair.glued_lattice()?;
        Ok(pair)
    }

    /// Searches for a glue map with [`disc_form::finite_form_isomorphic`].
    pub fn with_found_glue(ns: Lattice, t: Lattice, bound: u64) -> Result<Self> {
        let a = disc_form::discriminant_form(&ns)?;
        let b = disc_form::discriminant_form(&t)?.negated();
        let glue = disc_form::finite_form_isomorphic(&a, &b, bound)?
            .ok_or_else(|| Error::Hypothesis("A_ns is not anti-isometric to A_t".into()))?;
        Self::new(ns, t, glue)
    }

    pub fn ns(&self) -> &Lattice {
        &self.ns
    }

    pub fn t(&self) -> &Lattice {
        &self.t
    }

    pub fn glue(&self) -> &[Element] {
        &self.glue
    }

    pub fn picard_number(&self) -> usize {
        self.ns.rank()
    }

    /// The overlattice of `ns ⊕ t` generated by the graph of the glue map;
    /// fails unless it is even, unimodular and of signature (3, 19).
    pub fn glued_lattice(&self) -> Result<Lattice> {
        let rho = self.ns.rank();
        if rho + self.t.rank() != K3_RANK {
            return Err(Error::Hypothesis(format!("ranks {} + {} do not sum to 22", rho, self.t.rank())));
        }
        self.ns.require_even()?;
        self.t.require_even()?;
        if self.ns.signature() != (1, rho - 1) {
            return Err(Error::WrongSignature(format!("ns has signature {:?}", self.ns.signature())));
        }
        if self.t.signature() != (2, 20 - rho) {
            return Err(Error::WrongSignature(format!("t has signature {:?}", self.t.signature())));
        }
        let dn = DiscriminantGroup::of(&EmbeddedLattice::whole(&self.ns))?;
        let dt = DiscriminantGroup::of(&EmbeddedLattice::whole(&self.t))?;
        let a = dn.form();
        let b = dt.form().negated();
        if self.glue.len() != a.length() {
            return Err(Error::Hypothesis("glue has the wrong number of images".into()));
        }
        for g in &self.glue {
            b.check_element(g)?;
        }
        if a.order()? != b.order()? || !disc_form::is_isometry(a, &b, &self.glue, disc_form::DEFAULT_ISO_BOUND)? {
            return Err(Error::Hypothesis("glue is not an anti-isometry A_ns → A_t".into()));
        }
        let sum = self.ns.orthogonal_sum(&self.t);
        let graph: Vec<Vec<BigRational>> = (0..a.length())
            .map(|i| {
                let mut v = dn.lift(&a.generator(i));
                v.extend(dt.lift(&self.glue[i]));
                v
            })
            .collect();
        let glued = EmbeddedLattice::whole(&sum).extended_by(&graph)?;
        let l = glued.to_lattice()?;
        if !l.is_even() || !l.discriminant().abs().is_one() || l.signature() != (3, 19) {
            return Err(Error::Hypothesis("glued lattice is not even unimodular of signature (3, 19)".into()));
        }
        Ok(l)
    }
}

fn transport(pair: &K3LatticePair, neighbor: &EmbeddedLattice) -> Result<K3LatticePair> {
    let iso = disc_form::natural_disc_iso(&EmbeddedLattice::whole(&pair.t), neighbor)?;
    let t2 = neighbor.to_lattice()?;
    invariant(iso.target.form() == &disc_form::discriminant_form(&t2)?, || "neighbor form presentation mismatch".into())?;
    let glue = pair.glue.iter().map(|g| iso.apply(g)).collect();
    let out = K3LatticePair::new(pair.ns.clone(), t2, glue).map_err(|e| match e {
        Error::Hypothesis(s) | Error::WrongSignature(s) => Error::Invariant(format!("transported pair fails the gluing check: {s}")),
        e => e,
    })?;
    invariant(out.t.discriminant().abs() == pair.t.discriminant().abs(), || "neighbor changed |disc(t)|".into())?;
    Ok(out)
}

/// The pair of `X_ℓ`: same `ns`, `t` replaced by the neighbor.
pub fn k3_neighbor_data(pair: &K3LatticePair, line: &IsotropicLine) -> Result<K3LatticePair> {
    if line.parent() != pair.t() {
        return Err(Error::InvalidLine("line does not live on the transcendental lattice".into()));
    }
    if line.d() == 1 {
        return Ok(pair.clone());
    }
    transport(pair, &neighbors::neighbor_from_line(line)?)
}

pub fn k3_generalized_neighbor_data(pair: &K3LatticePair, line: &GeneralizedLine) -> Result<K3LatticePair> {
    if line.parent() != pair.t() {
        return Err(Error::InvalidLine("line does not live on the transcendental lattice".into()));
    }
    if line.d() == 1 {
        return Ok(pair.clone());
    }
    transport(pair, &padic::generalized_neighbor(line)?)
}

/// Transcendental lattice of `Y_ℓ`, i.e. `ker(ℓ)`, and whether it is known
/// to embed primitively into the K3 lattice.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub t_split: Lattice,
    pub embeddable: Embeddable,
}

fn split_data(pair: &K3LatticePair, m: &EmbeddedLattice, d: u64, generalized: bool) -> Result<SplitData> {
    let t_split = m.to_lattice()?;
    let dd = BigInt::from(d) * BigInt::from(d);
    invariant(t_split.discriminant().abs() == dd * pair.t.discriminant().abs(), || "disc(ker ℓ) is not d² disc(t)".into())?;
    let rho = pair.picard_number();
    let hypothesis = if d == 1 {
        false
    } else if generalized {
        disc_form::discriminant_form(&pair.t)?.length() + 3 <= rho
    } else {
        rho >= 3
    };
    let embeddable = if hypothesis { Embeddable::Yes } else { embeds_primitively_sufficient(&t_split)? };
    Ok(SplitData { t_split, embeddable })
}

pub fn k3_split_data(pair: &K3LatticePair, line: &IsotropicLine) -> Result<SplitData> {
    if line.parent() != pair.t() {
        return Err(Error::InvalidLine("line does not live on the transcendental lattice".into()));
    }
    let m = if line.d() == 1 { EmbeddedLattice::whole(&pair.t) } else { neighbors::split_sublattice(line)? };
    split_data(pair, &m, line.d(), false)
}

pub fn k3_generalized_split_data(pair: &K3LatticePair, line: &GeneralizedLine) -> Result<SplitData> {
    if line.parent() != pair.t() {
        return Err(Error::InvalidLine("line does not live on the transcendental lattice".into()));
    }
    let m = padic::generalized_split(line)?;
    split_data(pair, &m, line.d(), true)
}

/// A `d`-isotropic line found among `e_i` and `e_i ± e_j` before falling
/// back to full enumeration (bounded by `max_classes`).
pub fn find_isotropic_line(l: &Lattice, d: u64, max_classes: u64) -> Result<Option<IsotropicLine>> {
    neighbors::check_modulus(l, d)?;
    let n = l.rank();
    let db = BigInt::from(d);
    let mut tries: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        tries.push(v);
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::one();
                v[j] = BigInt::from(s);
                tries.push(v);
            }
        }
    }
    for v in tries {
        if l.half_norm(&v).is_multiple_of(&db) {
            return Ok(Some(IsotropicLine::new(l, d, &v)?));
        }
    }
    Ok(neighbors::enumerate_isotropic_lines(l, d, max_classes)?.into_iter().next())
}

/// Classical Brauer line functional attached to a line.
pub fn line_functional(line: &IsotropicLine) -> Vec<BigRational> {
    let f: ModularFunctional = line.functional();
    let d = BigInt::from(line.d());
    f.values.iter().map(|v| BigRational::new(v.mod_floor(&d), d.clone())).collect()
}

/// Named K3 lattice pairs used as fixtures.
pub fn k3_fixtures() -> Result<Vec<(&'static str, K3LatticePair)>> {
    let u = corpus::hyperbolic;
    let e8m = || corpus::e8().scaled(-1);
    let specs: Vec<(&'static str, Lattice, Lattice)> = vec![
        ("U | U^2+E8(-1)^2", u(), corpus::sum(&[u(), u(), e8m(), e8m()])),
        ("<2> | <-2>+U^2+E8(-1)^2", corpus::diag(&[2]), corpus::sum(&[corpus::diag(&[-2]), u(), u(), e8m(), e8m()])),
        ("<4> | <-4>+U^2+E8(-1)^2", corpus::diag(&[4]), corpus::sum(&[corpus::diag(&[-4]), u(), u(), e8m(), e8m()])),
        ("U+<-2> | <2>+U+E8(-1)^2", corpus::sum(&[u(), corpus::diag(&[-2])]), corpus::sum(&[corpus::diag(&[2]), u(), e8m(), e8m()])),
        (
            "U+D4(-1)^2+E8(-1) | T(A)(2)",
            corpus::sum(&[u(), corpus::d(4).scaled(-1), corpus::d(4).scaled(-1), e8m()]),
            crate::kummer::kummer_transcendental().scaled(2),
        ),
        ("U+E8(-1) | U^2+E8(-1)", corpus::sum(&[u(), e8m()]), corpus::sum(&[u(), u(), e8m()])),
        ("U+E8(-1)^2+<-2> | U+<2>", corpus::sum(&[u(), e8m(), e8m(), corpus::diag(&[-2])]), corpus::sum(&[u(), corpus::diag(&[2])])),
        ("U+E8(-1)^2+A2(-1) | A2", corpus::sum(&[u(), e8m(), e8m(), corpus::a(2).scaled(-1)]), corpus::a(2)),
        ("U+E8(-1)+<-6> | <6>+U+E8(-1)", corpus::sum(&[u(), e8m(), corpus::diag(&[-6])]), corpus::sum(&[corpus::diag(&[6]), u(), e8m()])),
    ];
    specs
        .into_iter()
        .map(|(name, ns, t)| K3LatticePair::with_found_glue(ns, t, disc_form::DEFAULT_ISO_BOUND).map(|p| (name, p)))
        .collect()
}

/// Number of generators of `A_L`.
pub fn discriminant_length(l: &Lattice) -> Result<usize> {
    Ok(disc_form::discriminant_form(l)?.length())
}
