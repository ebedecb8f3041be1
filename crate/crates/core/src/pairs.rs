//! Hyperbolic pairs: completion of an isotropic vector with a dual vector to
//! a hyperbolic pair, and a breadth-first transitivity search on
//! `V (+) H(P)` over finite coefficient rings `(Z/m)[pi]`.
//!
//! The search uses the transvection families generating the elementary
//! subgroup: `u, v in P`; `u, v in P*`; `u in P, v in P*` and its mirror;
//! `u in P, v in V`; `u in P*, v in V`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::QuadraticModule;
use crate::group::GroupElement;
use crate::matrix::{Matrix, ModuleVector};
use crate::ring::{RingElement, UnitaryRing};
use crate::transvection::Transvection;

/// `(p, q)` with `mu(p) = mu(q) = 0` and `<p, q> = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperbolicPair {
    pub p: ModuleVector,
    pub q: ModuleVector,
}

impl HyperbolicPair {
    /// Checks the defining identities over the integral group ring.
    pub fn new(m: &QuadraticModule, p: ModuleVector, q: ModuleVector) -> Result<Self> {
        if !m.is_isotropic(&p)? {
            return Err(Error::precondition("mu(p) must vanish"));
        }
        if !m.is_isotropic(&q)? {
            return Err(Error::precondition("mu(q) must vanish"));
        }
        if m.inner(&p, &q)? != m.ring().one() {
            return Err(Error::precondition("<p, q> must equal 1"));
        }
        Ok(HyperbolicPair { p, q })
    }
}

/// Completes an isotropic `p` to a hyperbolic pair using a vector `y` with
/// `<p, y>` a trivial unit `+-g`.
///
/// With `y' = conj(w^-1) y` for `w = <p, y>` one has `<p, y'> = 1`, and
/// `q = y' - c p` for the reduced representative `c` of `mu(y')` satisfies
/// `mu(q) = [c] - [conj c] = 0`.
pub fn complete_pair(m: &QuadraticModule, p: &ModuleVector, y: &ModuleVector) -> Result<HyperbolicPair> {
    let ring = m.ring();
    if !ring.lambda_is_one() {
        return Err(Error::Unsupported("pair completion requires lambda = +1".into()));
    }
    if !m.is_isotropic(p)? {
        return Err(Error::precondition("mu(p) must vanish"));
    }
    let w = m.inner(p, y)?;
    let (sign, g) = w.as_trivial_unit().ok_or_else(|| {
        Error::precondition(format!("<p, y> = {w} is not a trivial unit, so y cannot be normalized"))
    })?;
    let w_inv = RingElement::monomial(sign, ring.group().inverse(g));
    let y1 = y.scale_left(ring, &ring.involute(&w_inv));
    let c = m.mu(&y1)?;
    let q = &y1 - &p.scale_left(ring, &c);
    HyperbolicPair::new(m, p.clone(), q)
        .map_err(|e| Error::InternalCheckFailed(format!("completed pair: {e}")))
}

/// Coefficient domain for generator enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientDomain {
    /// `(Z/m)[pi]`, all coefficients in `0..m`, support the whole (finite) group.
    Modular(u32),
    /// `Z[pi]`, coefficients in `-h..=h`, support the unit ball of the group.
    Height(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `u, v in P`
    #[serde(rename = "P,P")]
    PP,
    /// `u, v in P*`
    #[serde(rename = "P*,P*")]
    QQ,
    /// `u in P, v in P*`
    #[serde(rename = "P,P*")]
    PQ,
    /// `u in P*, v in P`
    #[serde(rename = "P*,P")]
    QP,
    /// `u in P, v in V`
    #[serde(rename = "P,V")]
    PV,
    /// `u in P*, v in V`
    #[serde(rename = "P*,V")]
    QV,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::PP, Family::QQ, Family::PQ, Family::QP, Family::PV, Family::QV];

    pub fn parse(s: &str) -> Result<Family> {
        Ok(match s {
            "P,P" | "pp" => Family::PP,
            "P*,P*" | "qq" => Family::QQ,
            "P,P*" | "pq" => Family::PQ,
            "P*,P" | "qp" => Family::QP,
            "P,V" | "pv" => Family::PV,
            "P*,V" | "qv" => Family::QV,
            other => return Err(Error::Unsupported(format!("unknown generator family {other:?}"))),
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::PP => "P,P",
            Family::QQ => "P*,P*",
            Family::PQ => "P,P*",
            Family::QP => "P*,P",
            Family::PV => "P,V",
            Family::QV => "P*,V",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    P,
    Q,
    V,
}

impl Family {
    fn slots(self) -> (Slot, Slot) {
        match self {
            Family::PP => (Slot::P, Slot::P),
            Family::QQ => (Slot::Q, Slot::Q),
            Family::PQ => (Slot::P, Slot::Q),
            Family::QP => (Slot::Q, Slot::P),
            Family::PV => (Slot::P, Slot::V),
            Family::QV => (Slot::Q, Slot::V),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub family: Family,
    #[serde(flatten)]
    pub transvection: Transvection,
}

/// Generators listed in order of application.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorWord {
    pub steps: Vec<Generator>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSet {
    pub generators: Vec<Generator>,
    /// Number of `(u, a, v)` candidates examined.
    pub examined: usize,
    /// Valid candidates acting as the identity (not listed).
    pub trivial: usize,
    /// Valid candidates duplicating the matrix of an earlier generator.
    pub duplicates: usize,
}

/// The module `V (+) H(A^r)` (basis `V`, `p_1..p_r`, `q_1..q_r`) with
/// arithmetic in a fixed coefficient domain.
#[derive(Clone, Debug)]
pub struct StabilizedSpace {
    ring: UnitaryRing,
    domain: CoefficientDomain,
    module: QuadraticModule,
    v_rank: usize,
    p_rank: usize,
}

impl StabilizedSpace {
    pub fn new(v: &QuadraticModule, p_rank: usize, domain: CoefficientDomain) -> Result<Self> {
        let ring = v.ring().clone();
        if !ring.lambda_is_one() {
            return Err(Error::Unsupported("hyperbolic pair search requires lambda = +1".into()));
        }
        match domain {
            CoefficientDomain::Modular(m) => {
                if m < 2 {
                    return Err(Error::precondition("modulus must be at least 2"));
                }
                if !ring.group().is_finite() {
                    return Err(Error::Unsupported(
                        "finite coefficient rings require a finite group".into(),
                    ));
                }
            }
            CoefficientDomain::Height(h) => {
                if h == 0 {
                    return Err(Error::precondition("height bound must be positive"));
                }
            }
        }
        if p_rank == 0 {
            return Err(Error::precondition("rank(P) must be at least 1"));
        }
        let module = v.orthogonal_sum(&QuadraticModule::hyperbolic(&ring, p_rank)?)?;
        Ok(StabilizedSpace {
            ring,
            domain,
            module,
            v_rank: v.rank(),
            p_rank,
        })
    }

    pub fn ring(&self) -> &UnitaryRing {
        &self.ring
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    /// The underlying integral module; all arithmetic is done there and then
    /// reduced.
    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }

    pub fn v_rank(&self) -> usize {
        self.v_rank
    }

    pub fn p_rank(&self) -> usize {
        self.p_rank
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    fn modulus(&self) -> Option<BigInt> {
        match self.domain {
            CoefficientDomain::Modular(m) => Some(BigInt::from(m)),
            CoefficientDomain::Height(_) => None,
        }
    }

    /// Coefficients reduced into `0..m` (no-op over the integers).
    pub fn reduce(&self, x: &RingElement) -> RingElement {
        match self.modulus() {
            Some(m) => x.map_coefficients(|_, c| c.mod_floor(&m)),
            None => x.clone(),
        }
    }

    pub fn reduce_vector(&self, x: &ModuleVector) -> ModuleVector {
        x.map(|c| self.reduce(c))
    }

    pub fn reduce_matrix(&self, x: &Matrix) -> Matrix {
        x.map(|c| self.reduce(c))
    }

    /// Canonical representative of `x` modulo `Lambda` (and `m`).
    pub fn lambda_class(&self, x: &RingElement) -> RingElement {
        let Some(m) = self.modulus() else {
            return self.ring.reduce(x);
        };
        let group = self.ring.group();
        let two = BigInt::from(2);
        let self_inverse_modulus = m.gcd(&two);
        let mut out = RingElement::zero();
        for (g, c) in x.terms() {
            let inv = group.inverse(g);
            match g.cmp(&inv) {
                std::cmp::Ordering::Greater => {
                    let c = if group.omega(g) == 1 { c.clone() } else { -c };
                    out.add_term(inv, c);
                }
                _ => out.add_term(g.clone(), c.clone()),
            }
        }
        out.map_coefficients(|g, c| {
            let c = c.mod_floor(&m);
            if group.inverse(g) == *g && group.omega(g) == -1 {
                c.mod_floor(&self_inverse_modulus)
            } else {
                c
            }
        })
    }

    pub fn inner(&self, x: &ModuleVector, y: &ModuleVector) -> Result<RingElement> {
        Ok(self.reduce(&self.module.inner(x, y)?))
    }

    pub fn mu(&self, x: &ModuleVector) -> Result<RingElement> {
        Ok(self.lambda_class(&self.module.mu(x)?))
    }

    pub fn is_hyperbolic_pair(&self, p: &ModuleVector, q: &ModuleVector) -> Result<bool> {
        Ok(self.mu(p)?.is_zero() && self.mu(q)?.is_zero() && self.inner(p, q)? == self.ring.one())
    }

    /// The defining conditions of a transvection in this domain.
    pub fn is_valid_transvection(&self, t: &Transvection) -> Result<bool> {
        Ok(self.inner(&t.u, &t.v)?.is_zero()
            && self.mu(&t.u)?.is_zero()
            && self.lambda_class(&(&self.module.mu(&t.v)? - &t.a)).is_zero())
    }

    pub fn matrix(&self, t: &Transvection) -> Result<Matrix> {
        Ok(self.reduce_matrix(&t.matrix(&self.module)?))
    }

    pub fn apply(&self, t: &Transvection, x: &ModuleVector) -> Result<ModuleVector> {
        Ok(self.reduce_vector(&t.apply(&self.module, x)?))
    }

    /// Form and refinement preserved on all basis vectors and basis pairs,
    /// which determines preservation everywhere.
    pub fn verify_isometry(&self, f: &Matrix) -> Result<bool> {
        let n = self.rank();
        let images: Vec<ModuleVector> = (0..n).map(|i| ModuleVector::new(f.row(i).to_vec())).collect();
        for i in 0..n {
            let ei = self.module.basis(i);
            if self.mu(&images[i])? != self.mu(&ei)? {
                return Ok(false);
            }
            for j in 0..n {
                if self.inner(&images[i], &images[j])? != self.inner(&ei, &self.module.basis(j))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Group-ring coefficients allowed in one coordinate.
    pub fn coefficient_values(&self) -> Vec<RingElement> {
        let (support, values): (Vec<GroupElement>, Vec<BigInt>) = match self.domain {
            CoefficientDomain::Modular(m) => (self.ring.group().ball(0), (0..m).map(BigInt::from).collect()),
            CoefficientDomain::Height(h) => {
                let h = h as i64;
                (self.ring.group().ball(1), (-h..=h).map(BigInt::from).collect())
            }
        };
        self.ring.enumerate(&support, &values)
    }

    fn slot_range(&self, slot: Slot) -> std::ops::Range<usize> {
        let (k, r) = (self.v_rank, self.p_rank);
        match slot {
            Slot::V => 0..k,
            Slot::P => k..k + r,
            Slot::Q => k + r..k + 2 * r,
        }
    }

    fn slot_vectors(&self, slot: Slot, values: &[RingElement], budget: usize) -> Result<Vec<ModuleVector>> {
        let range = self.slot_range(slot);
        let count = (values.len() as f64).powi(range.len() as i32);
        if count > budget as f64 {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut out = vec![self.module.zero_vector()];
        for i in range {
            let mut next = Vec::with_capacity(out.len() * values.len());
            for x in &out {
                for c in values {
                    let mut y = x.clone();
                    y.coords[i] = c.clone();
                    next.push(y);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Parameters `a` with `[a] = mu(v)`: every coefficient choice in the
    /// modular case, `mu(v) + b - conj(b)` over the integers.
    fn parameters(&self, v: &ModuleVector, values: &[RingElement]) -> Result<Vec<RingElement>> {
        let mu_v = self.module.mu(v)?;
        let target = self.lambda_class(&mu_v);
        Ok(match self.domain {
            CoefficientDomain::Modular(_) => values
                .iter()
                .filter(|a| self.lambda_class(a) == target)
                .cloned()
                .collect(),
            CoefficientDomain::Height(_) => {
                let mut seen = HashSet::new();
                values
                    .iter()
                    .map(|b| &(&mu_v + b) - &self.ring.involute(b))
                    .filter(|a| seen.insert(a.clone()))
                    .collect()
            }
        })
    }

    /// All valid transvections of the given families with coordinates in the
    /// coefficient domain, deduplicated by matrix; identity-acting ones are
    /// dropped. `budget` caps the number of candidates examined.
    pub fn enumerate_generators(&self, families: &[Family], budget: usize) -> Result<GeneratorSet> {
        let values = self.coefficient_values();
        let identity = Matrix::identity(&self.ring, self.rank());
        let mut seen: HashSet<Matrix> = HashSet::new();
        let mut set = GeneratorSet {
            generators: Vec::new(),
            examined: 0,
            trivial: 0,
            duplicates: 0,
        };
        for &family in families {
            let (us, vs) = family.slots();
            let u_list = self.slot_vectors(us, &values, budget)?;
            let v_list = self.slot_vectors(vs, &values, budget)?;
            for u in u_list.iter().filter(|u| !u.is_zero()) {
                // sigma_{u,a,0} already belongs to the parallel families
                for v in v_list.iter().filter(|v| vs != Slot::V || !v.is_zero()) {
                    if !self.inner(u, v)?.is_zero() {
                        continue;
                    }
                    for a in self.parameters(v, &values)? {
                        set.examined += 1;
                        if set.examined > budget {
                            return Err(Error::BudgetExceeded { budget });
                        }
                        let t = Transvection::unchecked(u.clone(), a, v.clone());
                        if !self.is_valid_transvection(&t)? {
                            return Err(Error::InternalCheckFailed(format!(
                                "enumerated {family} candidate fails the transvection conditions"
                            )));
                        }
                        let f = self.matrix(&t)?;
                        if f == identity {
                            set.trivial += 1;
                        } else if seen.insert(f) {
                            set.generators.push(Generator { family, transvection: t });
                        } else {
                            set.duplicates += 1;
                        }
                    }
                }
            }
        }
        Ok(set)
    }

    /// All vectors with coordinates in the domain (modular domains only).
    pub fn all_vectors(&self, budget: usize) -> Result<Vec<ModuleVector>> {
        self.require_modular()?;
        let values = self.coefficient_values();
        let count = (values.len() as f64).powi(self.rank() as i32);
        if count > budget as f64 {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut out = vec![ModuleVector::zero(0)];
        for _ in 0..self.rank() {
            out = out
                .iter()
                .flat_map(|x| {
                    values
                        .iter()
                        .map(move |c| x.concat(&ModuleVector::new(vec![c.clone()])))
                })
                .collect();
        }
        Ok(out)
    }

    /// Every hyperbolic pair of the finite module, by exhaustive enumeration.
    pub fn hyperbolic_pairs(&self, budget: usize) -> Result<Vec<HyperbolicPair>> {
        let isotropic: Vec<ModuleVector> = self
            .all_vectors(budget)?
            .into_iter()
            .map(|x| Ok((self.mu(&x)?.is_zero(), x)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(iso, x)| iso.then_some(x))
            .collect();
        let mut out = Vec::new();
        for p in &isotropic {
            for q in &isotropic {
                if self.inner(p, q)? == self.ring.one() {
                    out.push(HyperbolicPair { p: p.clone(), q: q.clone() });
                }
            }
        }
        Ok(out)
    }

    /// `(p_1, q_1)`.
    pub fn standard_pair(&self) -> HyperbolicPair {
        let n = self.rank();
        HyperbolicPair {
            p: ModuleVector::basis(&self.ring, n, self.v_rank),
            q: ModuleVector::basis(&self.ring, n, self.v_rank + self.p_rank),
        }
    }

    fn require_modular(&self) -> Result<()> {
        match self.domain {
            CoefficientDomain::Modular(_) => Ok(()),
            CoefficientDomain::Height(_) => Err(Error::Unsupported(
                "exhaustive search requires a finite coefficient ring".into(),
            )),
        }
    }

    /// Applies a word to a pair, generator by generator.
    pub fn apply_word(&self, word: &GeneratorWord, pair: &HyperbolicPair) -> Result<HyperbolicPair> {
        let mut p = self.reduce_vector(&pair.p);
        let mut q = self.reduce_vector(&pair.q);
        for g in &word.steps {
            p = self.apply(&g.transvection, &p)?;
            q = self.apply(&g.transvection, &q)?;
        }
        Ok(HyperbolicPair { p, q })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub node_budget: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 12,
            node_budget: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TransportOutcome {
    Found { word: GeneratorWord },
    /// Every state within `depth` steps was explored without reaching the target.
    Exhausted { depth: usize },
    /// The node budget ran out first.
    BudgetExceeded { nodes: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportReport {
    #[serde(flatten)]
    pub outcome: TransportOutcome,
    pub nodes_explored: usize,
    pub generators: usize,
    pub warnings: Vec<String>,
}

fn rank_warning(space: &StabilizedSpace) -> Vec<String> {
    if space.p_rank() < 2 {
        vec![format!(
            "rank(P) = {} < 2: transitivity on hyperbolic pairs may fail at this rank",
            space.p_rank()
        )]
    } else {
        Vec::new()
    }
}

/// Breadth-first search for a shortest word in `generators` carrying
/// `source` to `target`; ties are broken by generator order.
pub fn transport(
    space: &StabilizedSpace,
    generators: &[Generator],
    source: &HyperbolicPair,
    target: &HyperbolicPair,
    limits: SearchLimits,
) -> Result<TransportReport> {
    space.require_modular()?;
    for (name, pair) in [("source", source), ("target", target)] {
        if !space.is_hyperbolic_pair(&pair.p, &pair.q)? {
            return Err(Error::precondition(format!("{name} is not a hyperbolic pair")));
        }
    }
    let matrices = generators
        .iter()
        .map(|g| space.matrix(&g.transvection))
        .collect::<Result<Vec<_>>>()?;
    let start = space.apply_word(&GeneratorWord::default(), source)?;
    let goal = space.apply_word(&GeneratorWord::default(), target)?;
    let search = bfs(space, &matrices, start, Some(&goal), limits)?;
    let outcome = match (search.goal, search.budget_hit) {
        (Some(path), _) => TransportOutcome::Found {
            word: GeneratorWord {
                steps: path.into_iter().map(|i| generators[i].clone()).collect(),
            },
        },
        (None, true) => TransportOutcome::BudgetExceeded { nodes: search.visited.len() },
        (None, false) => TransportOutcome::Exhausted { depth: search.depth },
    };
    Ok(TransportReport {
        outcome,
        nodes_explored: search.visited.len(),
        generators: generators.len(),
        warnings: rank_warning(space),
    })
}

struct Search {
    visited: Vec<HyperbolicPair>,
    goal: Option<Vec<usize>>,
    depth: usize,
    budget_hit: bool,
}

fn bfs(
    space: &StabilizedSpace,
    matrices: &[Matrix],
    start: HyperbolicPair,
    goal: Option<&HyperbolicPair>,
    limits: SearchLimits,
) -> Result<Search> {
    let ring = space.ring();
    // state index -> (parent, generator)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut index: HashMap<HyperbolicPair, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut frontier = VecDeque::from([0usize]);
    let mut depth = 0;
    let path_to = |mut i: usize, parent: &[Option<(usize, usize)>]| {
        let mut path = Vec::new();
        while let Some((p, g)) = parent[i] {
            path.push(g);
            i = p;
        }
        path.reverse();
        path
    };
    if goal == Some(&states[0]) {
        return Ok(Search {
            visited: states,
            goal: Some(Vec::new()),
            depth: 0,
            budget_hit: false,
        });
    }
    while !frontier.is_empty() && depth < limits.max_depth {
        depth += 1;
        let mut next = VecDeque::new();
        for &s in &frontier {
            for (gi, f) in matrices.iter().enumerate() {
                let image = HyperbolicPair {
                    p: space.reduce_vector(&states[s].p.apply_matrix(ring, f)?),
                    q: space.reduce_vector(&states[s].q.apply_matrix(ring, f)?),
                };
                if index.contains_key(&image) {
                    continue;
                }
                if states.len() >= limits.node_budget {
                    return Ok(Search {
                        visited: states,
                        goal: None,
                        depth,
                        budget_hit: true,
                    });
                }
                let id = states.len();
                index.insert(image.clone(), id);
                parent.push(Some((s, gi)));
                let hit = goal == Some(&image);
                states.push(image);
                if hit {
                    let path = path_to(id, &parent);
                    return Ok(Search {
                        visited: states,
                        goal: Some(path),
                        depth,
                        budget_hit: false,
                    });
                }
                next.push_back(id);
            }
        }
        frontier = next;
    }
    Ok(Search {
        visited: states,
        goal: None,
        depth,
        budget_hit: false,
    })
}

/// Orbit of the standard pair compared with the set of all hyperbolic pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub total_pairs: usize,
    pub reachable: usize,
    /// Pairs outside the orbit of the standard pair.
    pub unreachable: Vec<HyperbolicPair>,
    pub nodes_explored: usize,
    /// False when the node budget or depth limit cut the orbit short.
    pub orbit_complete: bool,
    pub warnings: Vec<String>,
}

impl TransitivityReport {
    pub fn transitive(&self) -> bool {
        self.orbit_complete && self.unreachable.is_empty()
    }
}

pub fn check_transitivity(
    space: &StabilizedSpace,
    generators: &[Generator],
    limits: SearchLimits,
    enumeration_budget: usize,
) -> Result<TransitivityReport> {
    let pairs = space.hyperbolic_pairs(enumeration_budget)?;
    let matrices = generators
        .iter()
        .map(|g| space.matrix(&g.transvection))
        .collect::<Result<Vec<_>>>()?;
    let search = bfs(space, &matrices, space.standard_pair(), None, limits)?;
    let orbit: HashSet<&HyperbolicPair> = search.visited.iter().collect();
    // the frontier is empty when the depth loop ended early
    let orbit_complete = !search.budget_hit && search.depth < limits.max_depth;
    let unreachable: Vec<HyperbolicPair> = pairs.iter().filter(|p| !orbit.contains(p)).cloned().collect();
    Ok(TransitivityReport {
        total_pairs: pairs.len(),
        reachable: pairs.len() - unreachable.len(),
        unreachable,
        nodes_explored: search.visited.len(),
        orbit_complete,
        warnings: rank_warning(space),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Group};

    fn trivial_ring() -> UnitaryRing {
        UnitaryRing::standard(Group::trivial())
    }

    fn hyp(ring: &UnitaryRing, k: usize) -> QuadraticModule {
        QuadraticModule::hyperbolic(ring, k).unwrap()
    }

    fn v(ring: &UnitaryRing, coords: &[i64]) -> ModuleVector {
        ModuleVector::new(coords.iter().map(|&c| ring.int(c)).collect())
    }

    #[test]
    fn completion_examples() {
        let ring = trivial_ring();
        let h1 = hyp(&ring, 1);
        let pair = complete_pair(&h1, &v(&ring, &[1, 0]), &v(&ring, &[0, 1])).unwrap();
        assert_eq!(pair.q, v(&ring, &[0, 1]));

        let h2 = hyp(&ring, 2);
        // basis p1 p2 q1 q2; y = q1 + p2
        let pair = complete_pair(&h2, &v(&ring, &[1, 0, 0, 0]), &v(&ring, &[0, 1, 1, 0])).unwrap();
        assert_eq!(pair.q, v(&ring, &[0, 1, 1, 0]));

        // y = q + p has mu = 1, and subtracting p restores q
        assert_eq!(h1.mu(&v(&ring, &[1, 1])).unwrap(), ring.one());
        let pair = complete_pair(&h1, &v(&ring, &[1, 0]), &v(&ring, &[1, 1])).unwrap();
        assert_eq!(pair.q, v(&ring, &[0, 1]));
    }

    #[test]
    fn completion_normalizes_units() {
        let ring = UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(3, 1).unwrap()));
        let h1 = hyp(&ring, 1);
        let g = GroupElement::Finite(1);
        let p = ModuleVector::new(vec![ring.one(), RingElement::zero()]);
        let y = ModuleVector::new(vec![RingElement::monomial(2, g.clone()), RingElement::monomial(-1, g)]);
        let pair = complete_pair(&h1, &p, &y).unwrap();
        assert_eq!(h1.inner(&pair.p, &pair.q).unwrap(), ring.one());
        assert!(h1.is_isotropic(&pair.q).unwrap());
    }

    #[test]
    fn completion_rejects_bad_inputs() {
        let ring = trivial_ring();
        let h1 = hyp(&ring, 1);
        assert!(complete_pair(&h1, &v(&ring, &[1, 0]), &v(&ring, &[0, 2])).is_err());
        assert!(complete_pair(&h1, &v(&ring, &[1, 1]), &v(&ring, &[0, 1])).is_err());
    }

    #[test]
    fn modular_lambda_classes() {
        let ring = UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(2, -1).unwrap()));
        let h = hyp(&ring, 1);
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 1, CoefficientDomain::Modular(3)).unwrap();
        assert_eq!(space.module(), &h);
        let t = GroupElement::Finite(1);
        // t - conj(t) = 2t lies in Lambda, and 3t vanishes mod 3, so t does too
        assert!(space.lambda_class(&RingElement::monomial(1, t.clone())).is_zero());
        let space2 = StabilizedSpace::new(&zero, 1, CoefficientDomain::Modular(2)).unwrap();
        assert!(!space2.lambda_class(&RingElement::monomial(1, t)).is_zero());
    }

    #[test]
    fn empty_v_families() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 1, CoefficientDomain::Modular(2)).unwrap();
        let set = space.enumerate_generators(&[Family::PV, Family::QV], 10_000).unwrap();
        assert!(set.generators.is_empty());
        assert_eq!(set.examined, 0);
    }

    #[test]
    fn rank_one_parallel_family_is_trivial_over_integers() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 1, CoefficientDomain::Height(2)).unwrap();
        let set = space.enumerate_generators(&[Family::PP], 10_000).unwrap();
        // u = alpha p, v = beta p, a in Lambda = 0: q -> q + (beta alpha - alpha beta) p
        assert!(set.generators.is_empty());
        assert_eq!(set.trivial, set.examined);
        assert_eq!(set.examined, 4 * 5);
    }

    #[test]
    fn enumeration_oracle_rank_one_mod_two() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 1, CoefficientDomain::Modular(2)).unwrap();
        let set = space.enumerate_generators(&Family::ALL, 10_000).unwrap();
        // oracle: all 2x2 matrices over F2 preserving the form and q, excluding I
        let mut oracle = 0;
        for bits in 0u32..16 {
            let e = |k: u32| ring.int(((bits >> k) & 1) as i64);
            let f = Matrix::from_rows(vec![vec![e(0), e(1)], vec![e(2), e(3)]]).unwrap();
            if f != Matrix::identity(&ring, 2) && space.verify_isometry(&f).unwrap() {
                oracle += 1;
            }
        }
        // the only nontrivial isometry of H(F2) is the swap, which is not a transvection here
        assert_eq!(oracle, 1);
        assert!(set.generators.is_empty());
    }

    #[test]
    fn transport_trivial_and_verified() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 2, CoefficientDomain::Modular(2)).unwrap();
        let gens = space.enumerate_generators(&Family::ALL, 100_000).unwrap().generators;
        for g in &gens {
            assert!(space.verify_isometry(&space.matrix(&g.transvection).unwrap()).unwrap());
        }
        let std = space.standard_pair();
        let report = transport(&space, &gens, &std, &std, SearchLimits::default()).unwrap();
        assert_eq!(report.outcome, TransportOutcome::Found { word: GeneratorWord::default() });
        let target = HyperbolicPair {
            p: v(&ring, &[0, 1, 0, 0]),
            q: v(&ring, &[0, 0, 0, 1]),
        };
        let report = transport(&space, &gens, &std, &target, SearchLimits::default()).unwrap();
        let TransportOutcome::Found { word } = report.outcome else {
            panic!("expected a word, got {:?}", report.outcome);
        };
        assert_eq!(space.apply_word(&word, &std).unwrap(), target);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn rank_one_mod_three_findings() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 1, CoefficientDomain::Modular(3)).unwrap();
        let gens = space.enumerate_generators(&Family::ALL, 100_000).unwrap().generators;
        let report = check_transitivity(&space, &gens, SearchLimits::default(), 100_000).unwrap();
        // pairs: (a p, a^-1 q) and (b q, b^-1 p) for a, b in {1, 2}
        assert_eq!(report.total_pairs, 4);
        assert!(report.orbit_complete);
        assert_eq!(report.reachable, 1);
        assert_eq!(report.unreachable.len(), 3);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn rank_two_mod_two_transitive() {
        let ring = trivial_ring();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let space = StabilizedSpace::new(&zero, 2, CoefficientDomain::Modular(2)).unwrap();
        let set = space.enumerate_generators(&Family::ALL, 100_000).unwrap();
        let report = check_transitivity(&space, &set.generators, SearchLimits::default(), 100_000).unwrap();
        // 9 nonzero isotropic vectors in F2^4, each with 4 isotropic partners
        assert_eq!(report.total_pairs, 36);
        assert!(report.transitive(), "{report:?}");
    }
}
