//! Factorization of a stabilized transvection `sigma_{p,a,v} (+) Id_{H(P-)}`
//! on `K (+) H(P+) (+) H(P-)`, `K = V0 (+) V1`, into transvections
//! `sigma_{p_i,0,v_j}` with unimodular `p_i in V0 (+) P+` and isotropic
//! `v_j in K (+) H(P-)`.
//!
//! Basis of the ambient module: `V0`, `V1`, then `p+, q+, p-, q-`.
//!
//! The construction:
//!
//! 1. `v_0 = v + p- - a q-`, `v_1 = -p-`, `v_2 = a q-`. Each is isotropic and
//!    orthogonal to `p`, and `sigma_{p,0,v_2} sigma_{p,0,v_1} sigma_{p,0,v_0}`
//!    is the stabilized target.
//! 2. Writing `p = p' + c p+`, set `p_0 = p' + p+` and expand `c - 1` as a sum
//!    of signed group elements `s_i`, giving `p_i = s_i p+`. For fixed `v_j`
//!    the transvections `sigma_{p_i,0,v_j}` commute and multiply to
//!    `sigma_{p,0,v_j}`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::QuadraticModule;
use crate::matrix::{Matrix, ModuleVector};
use crate::ring::RingElement;
use crate::transvection::{compose, Transvection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInput", into = "RawInput")]
pub struct FactorizationInput {
    v0: QuadraticModule,
    v1: QuadraticModule,
    target: Transvection,
    /// `V0 (+) V1 (+) H(P+)`
    source: QuadraticModule,
    /// `source (+) H(P-)`
    ambient: QuadraticModule,
}

#[derive(Serialize, Deserialize)]
struct RawInput {
    v0: QuadraticModule,
    v1: QuadraticModule,
    target: Transvection,
}

impl TryFrom<RawInput> for FactorizationInput {
    type Error = Error;
    fn try_from(raw: RawInput) -> Result<Self> {
        FactorizationInput::new(raw.v0, raw.v1, raw.target)
    }
}

impl From<FactorizationInput> for RawInput {
    fn from(x: FactorizationInput) -> Self {
        RawInput {
            v0: x.v0,
            v1: x.v1,
            target: x.target,
        }
    }
}

/// Basis positions inside the ambient module.
#[derive(Clone, Copy, Debug)]
pub struct Layout {
    pub v0_rank: usize,
    pub k_rank: usize,
}

impl Layout {
    pub fn p_plus(&self) -> usize {
        self.k_rank
    }
    pub fn q_plus(&self) -> usize {
        self.k_rank + 1
    }
    pub fn p_minus(&self) -> usize {
        self.k_rank + 2
    }
    pub fn q_minus(&self) -> usize {
        self.k_rank + 3
    }
    pub fn is_v0(&self, i: usize) -> bool {
        i < self.v0_rank
    }
    pub fn is_v1(&self, i: usize) -> bool {
        (self.v0_rank..self.k_rank).contains(&i)
    }
}

fn nonzero_outside(x: &ModuleVector, allowed: impl Fn(usize) -> bool) -> Option<usize> {
    x.coords
        .iter()
        .enumerate()
        .find(|(i, c)| !c.is_zero() && !allowed(*i))
        .map(|(i, _)| i)
}

impl FactorizationInput {
    /// Checks the contexts, the nonsingularity certificate on `V0`, the
    /// target's defining conditions on `K (+) H(P+)`, and the supports
    /// `p in V0 (+) P+`, `v in K`.
    pub fn new(v0: QuadraticModule, v1: QuadraticModule, target: Transvection) -> Result<Self> {
        if v0.ring() != v1.ring() {
            return Err(Error::ContextMismatch);
        }
        if !v0.is_nonsingular_certified() {
            return Err(Error::precondition(
                "V0 must carry a nonsingularity certificate",
            ));
        }
        let ring = v0.ring().clone();
        let plane = QuadraticModule::hyperbolic(&ring, 1)?;
        let source = v0.orthogonal_sum(&v1)?.orthogonal_sum(&plane)?;
        let ambient = source.orthogonal_sum(&plane)?;
        target.validate(&source)?;
        let layout = Layout {
            v0_rank: v0.rank(),
            k_rank: v0.rank() + v1.rank(),
        };
        if let Some(i) = nonzero_outside(&target.u, |i| layout.is_v0(i) || i == layout.p_plus()) {
            return Err(Error::precondition(format!(
                "p must lie in V0 (+) P+, but coordinate {i} is nonzero"
            )));
        }
        if let Some(i) = nonzero_outside(&target.v, |i| i < layout.k_rank) {
            return Err(Error::precondition(format!(
                "v must lie in K, but coordinate {i} is nonzero"
            )));
        }
        // (A, +) is generated by the units +-g of the group ring, so the
        // additive-generation hypothesis holds for every supported input.
        Ok(FactorizationInput {
            v0,
            v1,
            target,
            source,
            ambient,
        })
    }

    pub fn v0(&self) -> &QuadraticModule {
        &self.v0
    }

    pub fn v1(&self) -> &QuadraticModule {
        &self.v1
    }

    pub fn target(&self) -> &Transvection {
        &self.target
    }

    /// `K (+) H(P+)`, where the target acts.
    pub fn source(&self) -> &QuadraticModule {
        &self.source
    }

    /// `K (+) H(P+) (+) H(P-)`, where the factors act.
    pub fn ambient(&self) -> &QuadraticModule {
        &self.ambient
    }

    pub fn layout(&self) -> Layout {
        Layout {
            v0_rank: self.v0.rank(),
            k_rank: self.v0.rank() + self.v1.rank(),
        }
    }

    /// Extends a vector of the source module by zero `H(P-)` coordinates.
    pub fn embed(&self, x: &ModuleVector) -> ModuleVector {
        x.concat(&ModuleVector::zero(2))
    }

    /// Matrix of `target (+) Id_{H(P-)}` on the ambient module.
    pub fn stabilized_target_matrix(&self) -> Result<Matrix> {
        let ring = self.ambient.ring();
        Ok(self
            .target
            .matrix(&self.source)?
            .block_diagonal(&Matrix::identity(ring, 2)))
    }

    /// `v_0, v_1, v_2` in the ambient module.
    pub fn split_v(&self) -> [ModuleVector; 3] {
        let ring = self.ambient.ring();
        let l = self.layout();
        let a = &self.target.a;
        let n = self.ambient.rank();
        let mut v0 = self.embed(&self.target.v);
        v0.coords[l.p_minus()] = ring.one();
        v0.coords[l.q_minus()] = -a;
        let mut v1 = ModuleVector::zero(n);
        v1.coords[l.p_minus()] = -ring.one();
        let mut v2 = ModuleVector::zero(n);
        v2.coords[l.q_minus()] = a.clone();
        [v0, v1, v2]
    }

    /// The three transvections `sigma_{p,0,v_j}` in application order.
    pub fn three_factor_split(&self) -> Result<[Transvection; 3]> {
        let p = self.embed(&self.target.u);
        let [v0, v1, v2] = self.split_v();
        let make = |v: ModuleVector| {
            Transvection::new(&self.ambient, p.clone(), RingElement::zero(), v)
                .map_err(|e| Error::InternalCheckFailed(format!("v-split factor: {e}")))
        };
        Ok([make(v0)?, make(v1)?, make(v2)?])
    }
}

/// Signed group elements summing to `x`, in the canonical element order.
pub fn unit_decomposition(x: &RingElement) -> Vec<RingElement> {
    let mut out = Vec::new();
    for (g, c) in x.terms() {
        let sign = if c.is_negative() { -1 } else { 1 };
        let copies = c.abs().to_usize().expect("coefficient multiplicity fits in memory");
        out.extend(std::iter::repeat_n(RingElement::monomial(sign, g.clone()), copies));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFactor {
    /// Index `j` of the `v_j` this factor belongs to.
    pub block: usize,
    pub u: ModuleVector,
    pub v: ModuleVector,
    /// A vector pairing to 1 with `u`.
    pub witness: ModuleVector,
}

impl CertificateFactor {
    pub fn transvection(&self) -> Transvection {
        Transvection::unchecked(self.u.clone(), RingElement::zero(), self.v.clone())
    }
}

/// Factors of `sigma_{p_i,0,v_j}` listed in order of application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationCertificate {
    pub factors: Vec<CertificateFactor>,
    /// Number of `v`-blocks (always 3).
    pub v_split: usize,
    /// Number of factors in each `v`-block, `1 + n` with `n = |c - 1|_1`.
    pub p_split: Vec<usize>,
}

/// Runs the construction. Every emitted factor is validated; a failure is an
/// [`Error::InternalCheckFailed`].
pub fn factorize(input: &FactorizationInput) -> Result<FactorizationCertificate> {
    let ambient = input.ambient();
    let ring = ambient.ring();
    let l = input.layout();
    let p = input.embed(&input.target.u);
    let v_blocks = input.split_v();
    for (j, v) in v_blocks.iter().enumerate() {
        if !ambient.is_isotropic(v)? || !ambient.inner(v, &p)?.is_zero() {
            return Err(Error::InternalCheckFailed(format!(
                "v_{j} is not isotropic and orthogonal to p"
            )));
        }
    }

    let c = p.coords[l.p_plus()].clone();
    let mut p_prime = p.clone();
    p_prime.coords[l.p_plus()] = RingElement::zero();

    let n = ambient.rank();
    let mut q_plus = ModuleVector::zero(n);
    q_plus.coords[l.q_plus()] = ring.one();

    let mut p0 = p_prime;
    p0.coords[l.p_plus()] = ring.one();
    let mut pieces: Vec<(ModuleVector, ModuleVector)> = vec![(p0, q_plus.clone())];
    for s in unit_decomposition(&(&c - &ring.one())) {
        let (sign, g) = s.as_trivial_unit().expect("decomposition yields units");
        let mut pi = ModuleVector::zero(n);
        pi.coords[l.p_plus()] = s.clone();
        // <s p+, b q+> = s conj(b) = 1  for  b = conj(s^-1)
        let s_inv = RingElement::monomial(sign, ring.group().inverse(g));
        let mut witness = ModuleVector::zero(n);
        witness.coords[l.q_plus()] = ring.involute(&s_inv);
        pieces.push((pi, witness));
    }

    let mut factors = Vec::with_capacity(3 * pieces.len());
    for (j, v) in v_blocks.iter().enumerate() {
        for (u, w) in &pieces {
            Transvection::new(ambient, u.clone(), RingElement::zero(), v.clone())
                .map_err(|e| Error::InternalCheckFailed(format!("factor for v_{j}: {e}")))?;
            if ambient.inner(u, w)? != ring.one() {
                return Err(Error::InternalCheckFailed(format!(
                    "unimodularity witness for a factor of v_{j} does not pair to 1"
                )));
            }
            factors.push(CertificateFactor {
                block: j,
                u: u.clone(),
                v: v.clone(),
                witness: w.clone(),
            });
        }
    }
    Ok(FactorizationCertificate {
        factors,
        v_split: 3,
        p_split: vec![pieces.len(); 3],
    })
}

/// Outcome of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub factors_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_discrepancy: Option<String>,
}

impl VerificationReport {
    fn fail(factors_checked: usize, msg: String) -> Self {
        VerificationReport {
            passed: false,
            factors_checked,
            first_discrepancy: Some(msg),
        }
    }
}

/// Recomputes everything from the certificate's vectors: each factor's
/// defining conditions, supports and witness, then the composite matrix
/// against `target (+) Id`.
pub fn verify_certificate(input: &FactorizationInput, cert: &FactorizationCertificate) -> VerificationReport {
    match verify_inner(input, cert) {
        Ok(report) => report,
        Err(e) => VerificationReport::fail(0, e.to_string()),
    }
}

fn verify_inner(input: &FactorizationInput, cert: &FactorizationCertificate) -> Result<VerificationReport> {
    let ambient = input.ambient();
    let ring = ambient.ring();
    let l = input.layout();
    if cert.p_split.len() != cert.v_split || cert.p_split.iter().sum::<usize>() != cert.factors.len() {
        return Ok(VerificationReport::fail(
            0,
            format!(
                "block counts {:?} do not account for {} factors",
                cert.p_split,
                cert.factors.len()
            ),
        ));
    }
    for (k, f) in cert.factors.iter().enumerate() {
        let fail = |msg: String| Ok(VerificationReport::fail(k, format!("factor {k}: {msg}")));
        for (name, x) in [("u", &f.u), ("v", &f.v), ("witness", &f.witness)] {
            if let Err(e) = ambient.check_vector(x) {
                return fail(format!("{name}: {e}"));
            }
        }
        if let Some(i) = nonzero_outside(&f.u, |i| l.is_v0(i) || i == l.p_plus()) {
            return fail(format!("u has nonzero coordinate {i} outside V0 (+) P+"));
        }
        if let Some(i) = nonzero_outside(&f.v, |i| i != l.p_plus() && i != l.q_plus()) {
            return fail(format!("v has nonzero coordinate {i} outside K (+) H(P-)"));
        }
        if let Some(c) = f.transvection().failed_condition(ambient)? {
            return fail(format!("violates {c}"));
        }
        if !ambient.is_isotropic(&f.v)? {
            return fail("v is not isotropic".into());
        }
        if ambient.inner(&f.u, &f.witness)? != ring.one() {
            return fail("witness does not pair to 1 with u".into());
        }
    }
    // factors are in application order; compose() wants the last one first
    let ts: Vec<Transvection> = cert.factors.iter().rev().map(CertificateFactor::transvection).collect();
    let composite = compose(ambient, &ts)?;
    let expected = input.stabilized_target_matrix()?;
    if let Some((i, j)) = composite.first_difference(&expected) {
        return Ok(VerificationReport::fail(
            cert.factors.len(),
            format!(
                "composite differs from the stabilized target at ({i}, {j}): {} vs {}",
                composite.get(i, j),
                expected.get(i, j)
            ),
        ));
    }
    Ok(VerificationReport {
        passed: true,
        factors_checked: cert.factors.len(),
        first_discrepancy: None,
    })
}

/// `n = |c - 1|_1`, the number of unit pieces per block.
pub fn expected_unit_pieces(input: &FactorizationInput) -> BigInt {
    let l = input.layout();
    let ring = input.ambient().ring();
    (&input.target.u.coords[l.p_plus()] - &ring.one()).l1_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Group, GroupElement};
    use crate::ring::UnitaryRing;

    fn zc2m() -> UnitaryRing {
        UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(2, -1).unwrap()))
    }

    fn t() -> GroupElement {
        GroupElement::Finite(1)
    }

    fn vec_from(coords: Vec<RingElement>) -> ModuleVector {
        ModuleVector::new(coords)
    }

    /// V0 = V1 = 0; source is H(P+) with basis p+, q+.
    fn bare_input(ring: &UnitaryRing, c: RingElement, a: RingElement) -> FactorizationInput {
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let target = Transvection::unchecked(
            vec_from(vec![c, RingElement::zero()]),
            a,
            ModuleVector::zero(2),
        );
        FactorizationInput::new(zero.clone(), zero, target).unwrap()
    }

    #[test]
    fn twisted_parameter_example() {
        let ring = zc2m();
        let two_t = RingElement::monomial(2, t());
        let input = bare_input(&ring, ring.one(), two_t.clone());
        let [v0, v1, v2] = input.split_v();
        // basis p+, q+, p-, q-
        let z = RingElement::zero;
        assert_eq!(v0, vec_from(vec![z(), z(), ring.one(), -&two_t]));
        assert_eq!(v1, vec_from(vec![z(), z(), -ring.one(), z()]));
        assert_eq!(v2, vec_from(vec![z(), z(), z(), two_t.clone()]));
        let cert = factorize(&input).unwrap();
        assert_eq!(cert.factors.len(), 3);
        assert_eq!(cert.p_split, vec![1, 1, 1]);
        for f in &cert.factors {
            assert_eq!(f.u, vec_from(vec![ring.one(), z(), z(), z()]));
        }
        let report = verify_certificate(&input, &cert);
        assert!(report.passed, "{report:?}");

        // oracle: apply both sides to the four basis vectors directly
        let ambient = input.ambient();
        let target = input.target();
        for i in 0..4 {
            let e = ambient.basis(i);
            let mut x = e.clone();
            for f in &cert.factors {
                x = f.transvection().apply(ambient, &x).unwrap();
            }
            let expected = if i < 2 {
                input.embed(&target.apply(input.source(), &ModuleVector::new(e.coords[..2].to_vec())).unwrap())
            } else {
                e
            };
            assert_eq!(x, expected, "basis vector {i}");
        }
    }

    #[test]
    fn trivial_target_collapses() {
        let ring = zc2m();
        let input = bare_input(&ring, ring.one(), RingElement::zero());
        let cert = factorize(&input).unwrap();
        assert_eq!(cert.factors.len(), 3);
        let ambient = input.ambient();
        // v_2 = a q- vanishes; the other two factors are nontrivial but cancel
        let id = Matrix::identity(&ring, 4);
        assert_ne!(cert.factors[0].transvection().matrix(ambient).unwrap(), id);
        assert_ne!(cert.factors[1].transvection().matrix(ambient).unwrap(), id);
        assert!(cert.factors[2].v.is_zero());
        assert!(verify_certificate(&input, &cert).passed);
    }

    #[test]
    fn coefficient_shift_decomposes_into_units() {
        let ring = zc2m();
        let c = RingElement::from_terms([(2, GroupElement::Finite(0)), (1, t())]);
        let input = bare_input(&ring, c, RingElement::zero());
        assert_eq!(
            unit_decomposition(&RingElement::from_terms([(1, GroupElement::Finite(0)), (1, t())])),
            vec![ring.one(), RingElement::monomial(1, t())]
        );
        let cert = factorize(&input).unwrap();
        assert_eq!(cert.p_split, vec![3, 3, 3]);
        let us: Vec<&ModuleVector> = cert.factors[..3].iter().map(|f| &f.u).collect();
        let z = RingElement::zero;
        assert_eq!(us[0], &vec_from(vec![ring.one(), z(), z(), z()]));
        assert_eq!(us[1], &vec_from(vec![ring.one(), z(), z(), z()]));
        assert_eq!(us[2], &vec_from(vec![RingElement::monomial(1, t()), z(), z(), z()]));
        assert!(verify_certificate(&input, &cert).passed);
    }

    #[test]
    fn negative_coefficients_use_negative_units() {
        let ring = zc2m();
        let c = RingElement::from_terms([(-1, GroupElement::Finite(0)), (-2, t())]);
        let input = bare_input(&ring, c, RingElement::zero());
        let cert = factorize(&input).unwrap();
        // c - 1 = -2 - 2t
        assert_eq!(expected_unit_pieces(&input), BigInt::from(4));
        assert_eq!(cert.p_split, vec![5, 5, 5]);
        assert!(verify_certificate(&input, &cert).passed);
    }

    #[test]
    fn mutations_detected() {
        let ring = zc2m();
        let c = RingElement::from_terms([(2, GroupElement::Finite(0)), (1, t())]);
        let input = bare_input(&ring, c, RingElement::monomial(2, t()));
        let cert = factorize(&input).unwrap();

        let mut dropped = cert.clone();
        dropped.factors.remove(4);
        dropped.p_split[1] -= 1;
        let report = verify_certificate(&input, &dropped);
        assert!(!report.passed);
        assert!(report.first_discrepancy.unwrap().contains("composite"));

        let mut truncated = cert.clone();
        truncated.factors.pop();
        assert!(!verify_certificate(&input, &truncated).passed);

        let mut swapped = cert.clone();
        swapped.factors.swap(1, 2);
        assert!(verify_certificate(&input, &swapped).passed);

        let mut bad_witness = cert.clone();
        bad_witness.factors[0].witness = input.ambient().zero_vector();
        assert!(!verify_certificate(&input, &bad_witness).passed);
    }

    #[test]
    fn support_preconditions() {
        let ring = zc2m();
        let zero = QuadraticModule::zero(ring.clone()).unwrap();
        let plain = QuadraticModule::new(ring.clone(), Matrix::zeros(0, 0), vec![], None).unwrap();
        let target = Transvection::unchecked(
            vec_from(vec![ring.one(), RingElement::zero()]),
            RingElement::zero(),
            ModuleVector::zero(2),
        );
        // V0 without certificate
        assert!(matches!(
            FactorizationInput::new(plain, zero.clone(), target),
            Err(Error::PreconditionViolation(_))
        ));
        let certified = zero.clone();
        // p with a q+ coordinate
        let target = Transvection::unchecked(
            vec_from(vec![RingElement::zero(), ring.one()]),
            RingElement::zero(),
            ModuleVector::zero(2),
        );
        assert!(FactorizationInput::new(certified.clone(), zero.clone(), target).is_err());
        // v with a p+ coordinate
        let target = Transvection::unchecked(
            vec_from(vec![ring.one(), RingElement::zero()]),
            RingElement::zero(),
            vec_from(vec![ring.one(), RingElement::zero()]),
        );
        assert!(FactorizationInput::new(certified, zero, target).is_err());
    }
}
