//! Transvections `sigma_{u,a,v}` of a quadratic module.
//!
//! For `<u, v> = 0`, `mu(u) = 0` and `mu(v) = [a]` the map
//!
//! ```text
//! x  ->  x + <x, v> u - <x, u> v - <x, u> a u
//! ```
//!
//! is an isometry. Written with `<x, .>` the coefficients are left-linear in
//! `x`, so the map is a module endomorphism and has a matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::QuadraticModule;
use crate::matrix::{Matrix, ModuleVector};
use crate::ring::RingElement;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transvection {
    pub u: ModuleVector,
    pub a: RingElement,
    pub v: ModuleVector,
}

/// Which defining condition a triple fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransvectionCondition {
    Orthogonal,
    IsotropicU,
    ParameterClass,
}

impl fmt::Display for TransvectionCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransvectionCondition::Orthogonal => "<u, v> = 0",
            TransvectionCondition::IsotropicU => "mu(u) = 0",
            TransvectionCondition::ParameterClass => "mu(v) = [a]",
        })
    }
}

impl Transvection {
    /// Validated constructor.
    pub fn new(m: &QuadraticModule, u: ModuleVector, a: RingElement, v: ModuleVector) -> Result<Self> {
        let t = Transvection { u, a, v };
        t.validate(m)?;
        Ok(t)
    }

    /// Builds the triple without checking the defining conditions.
    pub fn unchecked(u: ModuleVector, a: RingElement, v: ModuleVector) -> Self {
        Transvection { u, a, v }
    }

    pub fn identity(m: &QuadraticModule) -> Self {
        Transvection {
            u: m.zero_vector(),
            a: RingElement::zero(),
            v: m.zero_vector(),
        }
    }

    /// First failing condition, if any.
    pub fn failed_condition(&self, m: &QuadraticModule) -> Result<Option<TransvectionCondition>> {
        m.check_vector(&self.u)?;
        m.check_vector(&self.v)?;
        m.ring().check(&self.a)?;
        if !m.inner(&self.u, &self.v)?.is_zero() {
            return Ok(Some(TransvectionCondition::Orthogonal));
        }
        if !m.mu(&self.u)?.is_zero() {
            return Ok(Some(TransvectionCondition::IsotropicU));
        }
        if !m.ring().is_in_lambda(&(&m.mu(&self.v)? - &self.a)) {
            return Ok(Some(TransvectionCondition::ParameterClass));
        }
        Ok(None)
    }

    pub fn validate(&self, m: &QuadraticModule) -> Result<()> {
        match self.failed_condition(m)? {
            None => Ok(()),
            Some(c) => Err(Error::precondition(format!("transvection requires {c}"))),
        }
    }

    pub fn apply(&self, m: &QuadraticModule, x: &ModuleVector) -> Result<ModuleVector> {
        let ring = m.ring();
        let xv = m.inner(x, &self.v)?;
        let xu = m.inner(x, &self.u)?;
        let mut out = x.clone();
        if !xv.is_zero() {
            out = &out + &self.u.scale_left(ring, &xv);
        }
        if !xu.is_zero() {
            out = &out - &self.v.scale_left(ring, &xu);
            let coeff = ring.mul(&xu, &self.a);
            if !coeff.is_zero() {
                out = &out - &self.u.scale_left(ring, &coeff);
            }
        }
        Ok(out)
    }

    /// Row `i` is the image of the `i`-th basis vector.
    pub fn matrix(&self, m: &QuadraticModule) -> Result<Matrix> {
        let rows = (0..m.rank())
            .map(|i| self.apply(m, &m.basis(i)).map(|v| v.coords))
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, 0));
        }
        Matrix::from_rows(rows)
    }

    /// `sigma_{u, <v,v> - a, -v}`, the two-sided inverse.
    pub fn inverse(&self, m: &QuadraticModule) -> Result<Transvection> {
        let vv = m.inner(&self.v, &self.v)?;
        Ok(Transvection {
            u: self.u.clone(),
            a: &vv - &self.a,
            v: -&self.v,
        })
    }
}

/// Matrix of `f_1 . f_2 . ... . f_k` (rightmost applied first) for maps
/// given by their matrices.
pub fn compose_matrices(m: &QuadraticModule, maps: &[Matrix]) -> Result<Matrix> {
    let ring = m.ring();
    let mut acc = Matrix::identity(ring, m.rank());
    for f in maps.iter().rev() {
        if f.rows() != m.rank() || f.cols() != m.rank() {
            return Err(Error::DimensionMismatch {
                expected: m.rank(),
                found: f.rows(),
            });
        }
        acc = acc.mul(ring, f)?;
    }
    Ok(acc)
}

/// Matrix of `t_1 . t_2 . ... . t_k` (rightmost applied first).
pub fn compose(m: &QuadraticModule, ts: &[Transvection]) -> Result<Matrix> {
    let mats = ts.iter().map(|t| t.matrix(m)).collect::<Result<Vec<_>>>()?;
    compose_matrices(m, &mats)
}

/// Result of an isometry check; `counterexample` describes the first failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub vectors_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// Checks `<f x, f y> = <x, y>` on all basis pairs and all pairs of samples,
/// and `mu(f x) = mu(x)` on basis vectors and samples.
pub fn verify_isometry_with(
    m: &QuadraticModule,
    f: impl Fn(&ModuleVector) -> Result<ModuleVector>,
    samples: &[ModuleVector],
) -> Result<IsometryReport> {
    let mut vectors: Vec<ModuleVector> = (0..m.rank()).map(|i| m.basis(i)).collect();
    vectors.extend(samples.iter().cloned());
    let images = vectors.iter().map(&f).collect::<Result<Vec<_>>>()?;
    let basis_count = m.rank();
    let mut report = IsometryReport {
        passed: true,
        pairs_checked: 0,
        vectors_checked: 0,
        counterexample: None,
    };
    for (k, (x, fx)) in vectors.iter().zip(&images).enumerate() {
        report.vectors_checked += 1;
        let before = m.mu(x)?;
        let after = m.mu(fx)?;
        if before != after {
            report.passed = false;
            report.counterexample = Some(format!(
                "mu changes on vector {k}: {before} -> {after}"
            ));
            return Ok(report);
        }
    }
    for i in 0..vectors.len() {
        for j in 0..vectors.len() {
            // samples are paired with each other and with the basis
            if i >= basis_count && j >= basis_count && i > j {
                continue;
            }
            report.pairs_checked += 1;
            let before = m.inner(&vectors[i], &vectors[j])?;
            let after = m.inner(&images[i], &images[j])?;
            if before != after {
                report.passed = false;
                report.counterexample = Some(format!(
                    "form changes on pair ({i}, {j}): {before} -> {after}"
                ));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// [`verify_isometry_with`] for a transvection applied by its formula.
pub fn verify_isometry(m: &QuadraticModule, t: &Transvection, samples: &[ModuleVector]) -> Result<IsometryReport> {
    verify_isometry_with(m, |x| t.apply(m, x), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Group, GroupElement};
    use crate::ring::UnitaryRing;

    fn z() -> UnitaryRing {
        UnitaryRing::standard(Group::trivial())
    }

    #[test]
    fn identity_transvection() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let p = h.basis(0);
        let t = Transvection::new(&h, p, RingElement::zero(), h.zero_vector()).unwrap();
        let x = ModuleVector::new(vec![ring.int(3), ring.int(-2)]);
        assert_eq!(t.apply(&h, &x).unwrap(), x);
        assert_eq!(t.matrix(&h).unwrap(), Matrix::identity(&ring, 2));
        assert_eq!(compose(&h, &[Transvection::identity(&h)]).unwrap(), Matrix::identity(&ring, 2));
    }

    #[test]
    fn p1_p2_transvection_on_basis() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 2).unwrap();
        let (p1, p2, q1, q2) = (h.basis(0), h.basis(1), h.basis(2), h.basis(3));
        let t = Transvection::new(&h, p1.clone(), RingElement::zero(), p2.clone()).unwrap();
        assert_eq!(t.apply(&h, &q1).unwrap(), &q1 - &p2);
        assert_eq!(t.apply(&h, &q2).unwrap(), &q2 + &p1);
        assert_eq!(t.apply(&h, &p1).unwrap(), p1);
        assert_eq!(t.apply(&h, &p2).unwrap(), p2);
        assert!(verify_isometry(&h, &t, &[]).unwrap().passed);
        // hand check: <q1 - p2, q2 + p1> = 0 = <q1, q2>
        assert!(h.inner(&(&q1 - &p2), &(&q2 + &p1)).unwrap().is_zero());
    }

    #[test]
    fn twisted_parameter_term() {
        let ring = UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(2, -1).unwrap()));
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let (p, q) = (h.basis(0), h.basis(1));
        let two_t = RingElement::monomial(2, GroupElement::Finite(1));
        let t = Transvection::new(&h, p.clone(), two_t.clone(), h.zero_vector()).unwrap();
        assert_eq!(t.apply(&h, &q).unwrap(), &q - &p.scale_left(&ring, &two_t));
        assert!(verify_isometry(&h, &t, &[]).unwrap().passed);
    }

    #[test]
    fn preconditions_named() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let (p, q) = (h.basis(0), h.basis(1));
        let err = Transvection::new(&h, p.clone(), RingElement::zero(), q.clone()).unwrap_err();
        assert!(err.to_string().contains("<u, v> = 0"), "{err}");
        let pq = &p + &q;
        let t = Transvection::unchecked(pq, RingElement::zero(), h.zero_vector());
        assert_eq!(t.failed_condition(&h).unwrap(), Some(TransvectionCondition::IsotropicU));
        let t = Transvection::unchecked(p.clone(), ring.one(), h.zero_vector());
        assert_eq!(t.failed_condition(&h).unwrap(), Some(TransvectionCondition::ParameterClass));
    }

    #[test]
    fn corrupted_parameter_fails_isometry() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let t = Transvection::unchecked(h.basis(0), ring.one(), h.zero_vector());
        let report = verify_isometry(&h, &t, &[]).unwrap();
        assert!(!report.passed);
        assert!(report.counterexample.is_some());
    }

    /// Searches `sigma_{u, b, -v}` over small `b` for a two-sided inverse and
    /// compares the hit with the closed form `b = <v,v> - a`.
    #[test]
    fn inverse_matches_brute_force() {
        let ring = UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(2, -1).unwrap()));
        let t_el = GroupElement::Finite(1);
        let h = QuadraticModule::hyperbolic(&ring, 2).unwrap();
        let e = GroupElement::Finite(0);
        // u = p1, v = 3t p1 + p2 + q2, a = 1 + 2t (mu(v) = [1], 2t lies in Lambda)
        let u = h.basis(0);
        let v = ModuleVector::new(vec![
            RingElement::monomial(3, t_el.clone()),
            RingElement::monomial(1, e.clone()),
            RingElement::zero(),
            RingElement::monomial(1, e.clone()),
        ]);
        let a = RingElement::from_terms([(1, e.clone()), (2, t_el.clone())]);
        let t = Transvection::new(&h, u.clone(), a, v.clone()).unwrap();
        let id = Matrix::identity(&ring, 4);
        let mut hits = Vec::new();
        for c0 in -4..=4 {
            for c1 in -4..=4 {
                let b = RingElement::from_terms([(c0, e.clone()), (c1, t_el.clone())]);
                let cand = Transvection::unchecked(u.clone(), b.clone(), -&v);
                if compose(&h, &[cand.clone(), t.clone()]).unwrap() == id
                    && compose(&h, &[t.clone(), cand]).unwrap() == id
                {
                    hits.push(b);
                }
            }
        }
        assert_eq!(hits.len(), 1);
        let inv = t.inverse(&h).unwrap();
        assert_eq!(inv.a, hits[0]);
        inv.validate(&h).unwrap();
    }
}
