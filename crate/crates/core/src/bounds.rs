//! Stability bounds for virtually abelian groups, invariant and norm
//! subrings of Laurent polynomial rings `A0 = Z[Gamma^omega]`, and bounded
//! finite-generation certificates.
//!
//! For `Gamma = Z^n` of finite index the bound is `d = n + 1`, and
//! `n + 2` copies of `H(A)` are needed. Krull dimensions are not computed.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Group, GroupElement};
use crate::lattice::Lattice;
use crate::ring::{RingElement, UnitaryRing};

pub const DEFAULT_DEGREE_BOUND: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityBound {
    pub d: usize,
    pub summands: usize,
}

/// `(n + 1, n + 2)` for a group with a free-abelian subgroup of rank `n` and
/// finite index.
pub fn stability_bound_for_rank(n: usize) -> StabilityBound {
    StabilityBound { d: n + 1, summands: n + 2 }
}

pub fn stability_bound(group: &Group) -> StabilityBound {
    stability_bound_for_rank(group.virtual_rank())
}

/// An extension `1 -> Z^n -> pi -> G -> 1` described by the induced action of
/// `G` on `Z^n` and the orientation character on `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVirtuallyAbelian", into = "RawVirtuallyAbelian")]
pub struct VirtuallyAbelianInput {
    n: usize,
    group: FiniteGroup,
    /// `action[g]` sends exponent vector `e` to `action[g] * e`.
    action: Vec<Vec<Vec<i64>>>,
    omega: Vec<i8>,
    ring: UnitaryRing,
}

#[derive(Serialize, Deserialize)]
struct RawVirtuallyAbelian {
    n: usize,
    group: Group,
    action: Vec<Vec<Vec<i64>>>,
    omega: Vec<i8>,
}

impl TryFrom<RawVirtuallyAbelian> for VirtuallyAbelianInput {
    type Error = Error;
    fn try_from(raw: RawVirtuallyAbelian) -> Result<Self> {
        let Group::Finite(g) = raw.group else {
            return Err(Error::InvalidGroup("the quotient group must be finite".into()));
        };
        VirtuallyAbelianInput::new(raw.n, g, raw.action, raw.omega)
    }
}

impl From<VirtuallyAbelianInput> for RawVirtuallyAbelian {
    fn from(x: VirtuallyAbelianInput) -> Self {
        RawVirtuallyAbelian {
            n: x.n,
            group: Group::Finite(x.group),
            action: x.action,
            omega: x.omega,
        }
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Fraction-free Gaussian elimination.
fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k] == BigInt::from(0) {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != BigInt::from(0)) else {
                return BigInt::from(0);
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    &a[n - 1][n - 1] * sign
}

impl VirtuallyAbelianInput {
    /// Validates dimensions, `det = +-1`, the homomorphism property against
    /// the multiplication table, and invariance of `omega` under the action.
    pub fn new(n: usize, group: FiniteGroup, action: Vec<Vec<Vec<i64>>>, omega: Vec<i8>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGroup(msg));
        if action.len() != group.order() {
            return bad(format!("expected {} action matrices, got {}", group.order(), action.len()));
        }
        if omega.len() != n || omega.iter().any(|&s| s != 1 && s != -1) {
            return bad(format!("omega must list {n} signs"));
        }
        for (g, m) in action.iter().enumerate() {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return bad(format!("action matrix {g} is not {n}x{n}"));
            }
            let det = determinant(m);
            if det != BigInt::from(1) && det != BigInt::from(-1) {
                return bad(format!("action matrix {g} has determinant {det}"));
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if action[group.mul(g, h)] != mat_mul(&action[g], &action[h]) {
                    return bad(format!("action is not a homomorphism at ({g}, {h})"));
                }
            }
        }
        for (g, m) in action.iter().enumerate() {
            for i in 0..n {
                // omega(g . e_i) = prod_j omega_j^{m_ji}
                let s: i8 = (0..n).map(|j| if m[j][i] % 2 != 0 { omega[j] } else { 1 }).product();
                if s != omega[i] {
                    return bad(format!("omega is not invariant under the action of {g}"));
                }
            }
        }
        let ring = UnitaryRing::standard(Group::free_abelian(n, omega.clone())?);
        Ok(VirtuallyAbelianInput {
            n,
            group,
            action,
            omega,
            ring,
        })
    }

    /// The standard presentation of a group from one of the three families:
    /// finite (`n = 0`), `Z^n` (trivial quotient), and the infinite dihedral
    /// group as `Z = <ab>` extended by `C2` acting by `-1`.
    pub fn from_group(group: &Group) -> Result<Self> {
        match group {
            Group::Finite(g) => Self::new(0, g.clone(), vec![vec![]; g.order()], vec![]),
            Group::FreeAbelian { rank, omega } => {
                let id = (0..*rank).map(|i| (0..*rank).map(|j| i64::from(i == j)).collect()).collect();
                Self::new(*rank, FiniteGroup::cyclic(1, 1)?, vec![id], omega.clone())
            }
            Group::InfiniteDihedral { omega_a, omega_b } => Self::new(
                1,
                FiniteGroup::cyclic(2, *omega_a)?,
                vec![vec![vec![1]], vec![vec![-1]]],
                vec![omega_a * omega_b],
            ),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// `A0 = Z[Z^n]` with involution twisted by `omega`.
    pub fn ring(&self) -> &UnitaryRing {
        &self.ring
    }

    pub fn stability_bound(&self) -> StabilityBound {
        stability_bound_for_rank(self.n)
    }

    fn act_exponent(&self, g: usize, e: &[i64]) -> Vec<i64> {
        let m = &self.action[g];
        (0..self.n).map(|i| (0..self.n).map(|j| m[i][j] * e[j]).sum()).collect()
    }

    pub fn act(&self, g: usize, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (e, c) in x.terms() {
            let GroupElement::FreeAbelian(e) = e else {
                panic!("element of A0 expected");
            };
            out.add_term(GroupElement::FreeAbelian(self.act_exponent(g, e)), c.clone());
        }
        out
    }

    pub fn is_invariant(&self, x: &RingElement) -> bool {
        (0..self.group.order()).all(|g| self.act(g, x) == *x)
    }

    fn orbit(&self, e: &[i64]) -> BTreeSet<GroupElement> {
        (0..self.group.order())
            .map(|g| GroupElement::FreeAbelian(self.act_exponent(g, e)))
            .collect()
    }
}

/// Largest total degree among the monomials of `x`.
pub fn degree(ring: &UnitaryRing, x: &RingElement) -> u64 {
    x.support().map(|g| ring.group().degree(g)).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubringKind {
    /// The invariant ring `R = A0^G`.
    R,
    /// The norm subring `R0` of `R`.
    R0,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorsCertificate {
    pub ring: SubringKind,
    pub generators: Vec<RingElement>,
    /// How each generator was obtained, parallel to `generators`.
    pub construction: Vec<String>,
    /// Only monomials up to this degree were considered.
    pub degree_bound: u64,
    /// Every generator was checked to be fixed by every element of `G`.
    pub all_invariant: bool,
}

/// Orbit sums of the monomials of degree at most `degree_bound`, ordered by
/// the smallest degree in the orbit.
pub fn invariant_generators(input: &VirtuallyAbelianInput, degree_bound: u64) -> Result<GeneratorsCertificate> {
    if degree_bound == 0 && input.n > 0 {
        return Err(Error::precondition("degree bound must be at least 1"));
    }
    let ring = input.ring();
    let mut orbits: BTreeMap<(u64, GroupElement), RingElement> = BTreeMap::new();
    let mut covered = BTreeSet::new();
    for m in ring.group().ball(degree_bound) {
        if covered.contains(&m) {
            continue;
        }
        let GroupElement::FreeAbelian(e) = &m else {
            unreachable!("A0 is a Laurent ring");
        };
        let orbit = input.orbit(e);
        let key = orbit
            .iter()
            .map(|g| (ring.group().degree(g), g.clone()))
            .min()
            .expect("orbits are nonempty");
        let sum = orbit
            .iter()
            .fold(RingElement::zero(), |acc, g| &acc + &RingElement::monomial(1, g.clone()));
        covered.extend(orbit);
        orbits.insert(key, sum);
    }
    let generators: Vec<RingElement> = orbits.into_values().collect();
    let all_invariant = generators.iter().all(|x| input.is_invariant(x));
    if !all_invariant {
        return Err(Error::InternalCheckFailed("an orbit sum is not invariant".into()));
    }
    Ok(GeneratorsCertificate {
        ring: SubringKind::R,
        construction: generators.iter().map(|_| "orbit sum".to_string()).collect(),
        generators,
        degree_bound,
        all_invariant,
    })
}

/// Norms `r conj(r)` and polarizations `r conj(s) + s conj(r)` of the
/// `R`-generators, then products of these, all within `degree_bound`.
///
/// Polarizations equal `N(r + s) - N(r) - N(s)`, so every output lies in the
/// subring generated by norms.
pub fn norm_generators(
    input: &VirtuallyAbelianInput,
    cert_r: &GeneratorsCertificate,
    degree_bound: u64,
) -> Result<GeneratorsCertificate> {
    if cert_r.ring != SubringKind::R {
        return Err(Error::precondition("norm generators are built from a certificate for R"));
    }
    if let Some(bad) = cert_r.generators.iter().position(|x| !input.is_invariant(x)) {
        return Err(Error::precondition(format!("generator {bad} of R is not invariant")));
    }
    let ring = input.ring();
    let mut out: Vec<(RingElement, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |x: RingElement, how: String, out: &mut Vec<(RingElement, String)>| {
        if !x.is_zero() && degree(ring, &x) <= degree_bound && seen.insert(x.clone()) {
            out.push((x, how));
        }
    };
    let gens = &cert_r.generators;
    for (i, r) in gens.iter().enumerate() {
        push(ring.mul(r, &ring.involute(r)), format!("norm(r{i})"), &mut out);
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let x = ring.mul(&gens[i], &ring.involute(&gens[j]));
            push(&x + &ring.involute(&x), format!("polar(r{i}, r{j})"), &mut out);
        }
    }
    // close under products within the bound
    let mut start = 0;
    while start < out.len() {
        let end = out.len();
        for i in start..end {
            for j in 0..=i {
                let x = ring.mul(&out[i].0, &out[j].0);
                let how = format!("({}) * ({})", out[i].1, out[j].1);
                push(x, how, &mut out);
            }
        }
        start = end;
    }
    let all_invariant = out.iter().all(|(x, _)| input.is_invariant(x));
    if !all_invariant {
        return Err(Error::InternalCheckFailed("a norm generator is not invariant".into()));
    }
    let (generators, construction) = out.into_iter().unzip();
    Ok(GeneratorsCertificate {
        ring: SubringKind::R0,
        generators,
        construction,
        degree_bound,
        all_invariant,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: u64,
    pub monomials: usize,
    pub failures: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgReport {
    pub passed: bool,
    pub degree_bound: u64,
    /// Maximal degree of the ring elements used in the spanning set.
    pub spanning_degree: u64,
    pub spanning_set_size: usize,
    pub per_degree: Vec<DegreeReport>,
    pub note: String,
}

/// Checks that every monomial of degree at most `degree_bound` lies in the
/// `Z`-span of `{s * c}`, where `c` runs over `candidates` and `s` over
/// products of `ring_generators` (and 1) of degree at most
/// `degree_bound + max deg(c)`. A pass certifies the bounded range only.
pub fn verify_fg_module(
    ring: &UnitaryRing,
    ring_generators: &[RingElement],
    candidates: &[RingElement],
    degree_bound: u64,
) -> Result<FgReport> {
    for x in ring_generators.iter().chain(candidates) {
        ring.check(x).map_err(|_| Error::ContextMismatch)?;
    }
    let max_candidate = candidates.iter().map(|c| degree(ring, c)).max().unwrap_or(0);
    let spanning_degree = degree_bound + max_candidate;

    // products of generators, bounded both by degree and by the number of
    // factors (degree-0 generators would otherwise never stop)
    let mut products: BTreeSet<RingElement> = BTreeSet::from([ring.one()]);
    let mut layer = vec![ring.one()];
    for _ in 0..=spanning_degree {
        let mut next = Vec::new();
        for x in &layer {
            for g in ring_generators {
                let y = ring.mul(x, g);
                if !y.is_zero() && degree(ring, &y) <= spanning_degree && products.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }

    let spanning: Vec<RingElement> = products
        .iter()
        .flat_map(|s| candidates.iter().map(move |c| ring.mul(s, c)))
        .filter(|x| !x.is_zero())
        .collect();
    let monomials = ring.group().ball(degree_bound);
    let mut coords: BTreeMap<GroupElement, usize> = BTreeMap::new();
    for g in spanning.iter().flat_map(|x| x.support()).chain(&monomials) {
        let next = coords.len();
        coords.entry(g.clone()).or_insert(next);
    }
    let to_vec = |x: &RingElement| {
        let mut v = vec![BigInt::from(0); coords.len()];
        for (g, c) in x.terms() {
            v[coords[g]] = c.clone();
        }
        v
    };
    let mut lattice = Lattice::new(coords.len());
    for x in &spanning {
        lattice.insert(to_vec(x));
    }
    let mut per_degree: BTreeMap<u64, DegreeReport> = BTreeMap::new();
    for m in &monomials {
        let d = ring.group().degree(m);
        let entry = per_degree.entry(d).or_insert_with(|| DegreeReport {
            degree: d,
            monomials: 0,
            failures: Vec::new(),
        });
        entry.monomials += 1;
        if !lattice.contains(&to_vec(&RingElement::monomial(1, m.clone()))) {
            entry.failures.push(m.clone());
        }
    }
    let per_degree: Vec<DegreeReport> = per_degree.into_values().collect();
    Ok(FgReport {
        passed: per_degree.iter().all(|d| d.failures.is_empty()),
        degree_bound,
        spanning_degree,
        spanning_set_size: spanning.len(),
        per_degree,
        note: format!("bounded certificate: covers monomials of degree <= {degree_bound} only"),
    })
}
