//! Free quadratic modules `(M, <.,.>, mu)` over a unitary group ring.
//!
//! The hermitian form is stored as a Gram matrix `G_ij = <e_i, e_j>` and the
//! quadratic refinement by its values on the basis, as canonical
//! representatives of `A / Lambda`. Everything else is determined by
//!
//! ```text
//! <a x, b y> = a <x, y> conj(b)
//! mu(sum a_i e_i) = [ sum_i a_i mu_i conj(a_i) + sum_{i<j} a_i G_ij conj(a_j) ]
//! ```

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::matrix::{Matrix, ModuleVector};
use crate::ring::{RingElement, UnitaryRing};

/// Inverse of the Gram matrix, checked on both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsingularityCertificate {
    pub inverse_gram: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModule", into = "RawModule")]
pub struct QuadraticModule {
    ring: UnitaryRing,
    gram: Matrix,
    mu: Vec<RingElement>,
    certificate: Option<NonsingularityCertificate>,
}

#[derive(Serialize, Deserialize)]
struct RawModule {
    context: UnitaryRing,
    rank: usize,
    gram: Matrix,
    mu: Vec<RingElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<NonsingularityCertificate>,
}

impl TryFrom<RawModule> for QuadraticModule {
    type Error = Error;
    fn try_from(raw: RawModule) -> Result<Self> {
        // an empty `gram` array carries no column count
        let gram = if raw.rank == 0 && raw.gram.rows() == 0 {
            Matrix::zeros(0, 0)
        } else {
            raw.gram
        };
        if gram.rows() != raw.rank {
            return Err(Error::InvalidModule(format!(
                "rank is {} but the Gram matrix has {} rows",
                raw.rank,
                gram.rows()
            )));
        }
        QuadraticModule::new(raw.context, gram, raw.mu, raw.certificate)
    }
}

impl From<QuadraticModule> for RawModule {
    fn from(m: QuadraticModule) -> Self {
        RawModule {
            rank: m.rank(),
            context: m.ring,
            gram: m.gram,
            mu: m.mu,
            certificate: m.certificate,
        }
    }
}

/// Outcome of a unimodularity query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unimodularity {
    /// `<x, witness> = 1`.
    Unimodular(ModuleVector),
    /// The supplied witness does not pair to 1 with `x`.
    WitnessRejected,
    /// No dual vector was found within the search bounds.
    Unknown,
}

impl Unimodularity {
    pub fn is_unimodular(&self) -> bool {
        matches!(self, Unimodularity::Unimodular(_))
    }
}

/// Bounds for the fallback dual-vector search.
#[derive(Clone, Debug)]
pub struct SearchBounds {
    /// Largest absolute coefficient tried.
    pub coefficient_bound: u32,
    /// Maximum number of group elements in each coordinate.
    pub max_support: usize,
    /// Maximum number of nonzero coordinates.
    pub max_nonzero_coords: usize,
    /// Maximum number of candidate vectors examined.
    pub budget: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            coefficient_bound: 2,
            max_support: 2,
            max_nonzero_coords: 2,
            budget: 200_000,
        }
    }
}

impl QuadraticModule {
    /// Validates hermitian symmetry, the diagonal compatibility
    /// `[mu_i + conj(mu_i)] = [G_ii]`, and the certificate if present.
    /// Refinement values are stored in canonical form.
    pub fn new(
        ring: UnitaryRing,
        gram: Matrix,
        mu: Vec<RingElement>,
        certificate: Option<NonsingularityCertificate>,
    ) -> Result<Self> {
        if !ring.lambda_is_one() {
            return Err(Error::Unsupported(
                "quadratic modules are implemented for lambda = +1 and the minimal form parameter".into(),
            ));
        }
        if !gram.is_square() {
            return Err(Error::InvalidModule("Gram matrix is not square".into()));
        }
        let n = gram.rows();
        if mu.len() != n {
            return Err(Error::InvalidModule(format!(
                "{} refinement values for rank {n}",
                mu.len()
            )));
        }
        gram.check_entries(&ring)?;
        for x in &mu {
            ring.check(x)?;
        }
        for i in 0..n {
            for j in i..n {
                let expected = ring.mul(ring.lambda(), &ring.involute(gram.get(i, j)));
                if *gram.get(j, i) != expected {
                    return Err(Error::InvalidModule(format!(
                        "form is not hermitian at ({j}, {i})"
                    )));
                }
            }
        }
        let mu: Vec<RingElement> = mu.iter().map(|x| ring.reduce(x)).collect();
        for (i, m) in mu.iter().enumerate() {
            let diff = &(m + &ring.involute(m)) - gram.get(i, i);
            if !ring.is_in_lambda(&diff) {
                return Err(Error::InvalidModule(format!(
                    "refinement value {i} is incompatible with the diagonal entry"
                )));
            }
        }
        let module = QuadraticModule {
            ring,
            gram,
            mu,
            certificate: None,
        };
        match certificate {
            None => Ok(module),
            Some(c) => module.with_certificate(c),
        }
    }

    /// The rank-0 module, trivially nonsingular.
    pub fn zero(ring: UnitaryRing) -> Result<Self> {
        let cert = NonsingularityCertificate {
            inverse_gram: Matrix::zeros(0, 0),
        };
        Self::new(ring, Matrix::zeros(0, 0), vec![], Some(cert))
    }

    /// Attaches a nonsingularity certificate after checking it.
    pub fn with_certificate(mut self, certificate: NonsingularityCertificate) -> Result<Self> {
        self.check_certificate(&certificate)?;
        self.certificate = Some(certificate);
        Ok(self)
    }

    fn check_certificate(&self, c: &NonsingularityCertificate) -> Result<()> {
        let h = &c.inverse_gram;
        let n = self.rank();
        if h.rows() != n || h.cols() != n {
            return Err(Error::InvalidModule("certificate has the wrong shape".into()));
        }
        h.check_entries(&self.ring)?;
        let id = Matrix::identity(&self.ring, n);
        if self.gram.mul(&self.ring, h)? != id || h.mul(&self.ring, &self.gram)? != id {
            return Err(Error::InvalidModule(
                "certificate is not a two-sided inverse of the Gram matrix".into(),
            ));
        }
        Ok(())
    }

    /// The hyperbolic module `H(A^k)` with basis `p_1..p_k, q_1..q_k`.
    pub fn hyperbolic(ring: &UnitaryRing, k: usize) -> Result<Self> {
        let mut gram = Matrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            gram.set(i, k + i, ring.one());
            gram.set(k + i, i, ring.one());
        }
        let cert = NonsingularityCertificate {
            inverse_gram: gram.clone(),
        };
        Self::new(ring.clone(), gram, vec![RingElement::zero(); 2 * k], Some(cert))
    }

    pub fn ring(&self) -> &UnitaryRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn mu_basis(&self) -> &[RingElement] {
        &self.mu
    }

    pub fn certificate(&self) -> Option<&NonsingularityCertificate> {
        self.certificate.as_ref()
    }

    pub fn is_nonsingular_certified(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn basis(&self, i: usize) -> ModuleVector {
        ModuleVector::basis(&self.ring, self.rank(), i)
    }

    pub fn zero_vector(&self) -> ModuleVector {
        ModuleVector::zero(self.rank())
    }

    /// Checks dimension and that every coordinate lies in the ring.
    pub fn check_vector(&self, x: &ModuleVector) -> Result<()> {
        if x.dim() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.dim(),
            });
        }
        x.coords.iter().try_for_each(|c| self.ring.check(c))
    }

    fn check_dim(&self, x: &ModuleVector) -> Result<()> {
        if x.dim() != self.rank() {
            Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// `x G`, the row of values `<x, e_j>`.
    fn pair_row(&self, x: &ModuleVector) -> Vec<RingElement> {
        let n = self.rank();
        let mut row = vec![RingElement::zero(); n];
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, slot) in row.iter_mut().enumerate() {
                let g = self.gram.get(i, j);
                if !g.is_zero() {
                    *slot += &self.ring.mul(a, g);
                }
            }
        }
        row
    }

    /// `<x, y> = sum_ij a_i G_ij conj(b_j)`.
    pub fn inner(&self, x: &ModuleVector, y: &ModuleVector) -> Result<RingElement> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let row = self.pair_row(x);
        let mut out = RingElement::zero();
        for (w, b) in row.iter().zip(&y.coords) {
            if !w.is_zero() && !b.is_zero() {
                out += &self.ring.mul(w, &self.ring.involute(b));
            }
        }
        Ok(out)
    }

    /// Canonical representative of `mu(x)` in `A / Lambda`.
    pub fn mu(&self, x: &ModuleVector) -> Result<RingElement> {
        self.check_dim(x)?;
        let ring = &self.ring;
        let conj: Vec<RingElement> = x.coords.iter().map(|a| ring.involute(a)).collect();
        let mut acc = RingElement::zero();
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !self.mu[i].is_zero() {
                acc += &ring.mul(&ring.mul(a, &self.mu[i]), &conj[i]);
            }
            for j in i + 1..self.rank() {
                let g = self.gram.get(i, j);
                if !g.is_zero() && !conj[j].is_zero() {
                    acc += &ring.mul(&ring.mul(a, g), &conj[j]);
                }
            }
        }
        Ok(ring.reduce(&acc))
    }

    pub fn is_isotropic(&self, x: &ModuleVector) -> Result<bool> {
        Ok(self.mu(x)?.is_zero())
    }

    /// Orthogonal sum with block-diagonal Gram matrix; certificates compose
    /// blockwise when both summands carry one.
    pub fn orthogonal_sum(&self, other: &QuadraticModule) -> Result<QuadraticModule> {
        if self.ring != other.ring {
            return Err(Error::ContextMismatch);
        }
        let gram = self.gram.block_diagonal(&other.gram);
        let mut mu = self.mu.clone();
        mu.extend(other.mu.iter().cloned());
        let certificate = match (&self.certificate, &other.certificate) {
            (Some(a), Some(b)) => Some(NonsingularityCertificate {
                inverse_gram: a.inverse_gram.block_diagonal(&b.inverse_gram),
            }),
            _ => None,
        };
        Ok(QuadraticModule {
            ring: self.ring.clone(),
            gram,
            mu,
            certificate,
        })
    }

    /// Reorders the basis: new basis vector `i` is old basis vector `perm[i]`.
    pub fn permute_basis(&self, perm: &[usize]) -> Result<QuadraticModule> {
        let n = self.rank();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::precondition("not a permutation of the basis"));
        }
        Ok(QuadraticModule {
            ring: self.ring.clone(),
            gram: self.gram.permute(perm),
            mu: perm.iter().map(|&p| self.mu[p].clone()).collect(),
            certificate: self.certificate.as_ref().map(|c| NonsingularityCertificate {
                inverse_gram: c.inverse_gram.permute(perm),
            }),
        })
    }

    /// The same form in the basis whose `i`-th vector is row `i` of `change`.
    /// `change_inverse` must be its two-sided inverse.
    pub fn change_basis(&self, change: &Matrix, change_inverse: &Matrix) -> Result<QuadraticModule> {
        let ring = &self.ring;
        let n = self.rank();
        let id = Matrix::identity(ring, n);
        if change.mul(ring, change_inverse)? != id || change_inverse.mul(ring, change)? != id {
            return Err(Error::precondition("basis change is not invertible as given"));
        }
        let gram = change
            .mul(ring, &self.gram)?
            .mul(ring, &change.conjugate_transpose(ring))?;
        let mu = (0..n)
            .map(|i| self.mu(&ModuleVector::new(change.row(i).to_vec())))
            .collect::<Result<Vec<_>>>()?;
        let certificate = match &self.certificate {
            Some(c) => Some(NonsingularityCertificate {
                inverse_gram: change_inverse
                    .conjugate_transpose(ring)
                    .mul(ring, &c.inverse_gram)?
                    .mul(ring, change_inverse)?,
            }),
            None => None,
        };
        QuadraticModule::new(ring.clone(), gram, mu, certificate)
    }

    /// Decides whether some `y` has `<x, y> = 1`.
    ///
    /// A supplied witness is only verified. Otherwise a dual vector is
    /// constructed when a coordinate of `x` is a trivial unit `+-g` whose basis
    /// vector has a hyperbolic partner, or through the nonsingularity
    /// certificate; failing both, a bounded search is run.
    pub fn is_unimodular(
        &self,
        x: &ModuleVector,
        witness: Option<&ModuleVector>,
        bounds: &SearchBounds,
    ) -> Result<Unimodularity> {
        self.check_vector(x)?;
        let one = self.ring.one();
        if let Some(w) = witness {
            self.check_vector(w)?;
            return Ok(if self.inner(x, w)? == one {
                Unimodularity::Unimodular(w.clone())
            } else {
                Unimodularity::WitnessRejected
            });
        }
        if let Some(y) = self.constructed_dual(x)? {
            return Ok(Unimodularity::Unimodular(y));
        }
        Ok(self.search_dual(x, bounds))
    }

    /// `conj(u^-1)` for a trivial unit `u = +-g`.
    fn conj_inverse_unit(&self, sign: i8, g: &GroupElement) -> RingElement {
        let inv = RingElement::monomial(sign, self.ring.group().inverse(g));
        self.ring.involute(&inv)
    }

    fn constructed_dual(&self, x: &ModuleVector) -> Result<Option<ModuleVector>> {
        let n = self.rank();
        let one = self.ring.one();
        for (i, a) in x.coords.iter().enumerate() {
            let Some((sign, g)) = a.as_trivial_unit() else {
                continue;
            };
            let scalar = self.conj_inverse_unit(sign, g);
            // partner j: column j of G is the i-th unit vector
            let partner = (0..n).find(|&j| {
                (0..n).all(|k| {
                    let e = self.gram.get(k, j);
                    if k == i {
                        *e == one
                    } else {
                        e.is_zero()
                    }
                })
            });
            let candidate = if let Some(j) = partner {
                let mut y = self.zero_vector();
                y.coords[j] = scalar;
                y
            } else if let Some(cert) = &self.certificate {
                // y_j = conj(H_ji u^-1)  gives  <x, y> = sum_k a_k (G H)_ki u^-1 = a_i u^-1
                let u_inv = self.ring.involute(&scalar);
                let col: Vec<RingElement> = (0..n)
                    .map(|j| {
                        self.ring
                            .involute(&self.ring.mul(cert.inverse_gram.get(j, i), &u_inv))
                    })
                    .collect();
                ModuleVector::new(col)
            } else {
                continue;
            };
            if self.inner(x, &candidate)? == one {
                return Ok(Some(candidate));
            }
        }
        Ok(None)
    }

    fn search_dual(&self, x: &ModuleVector, bounds: &SearchBounds) -> Unimodularity {
        let ring = &self.ring;
        let group = ring.group();
        let mut elements = if group.is_finite() {
            group.ball(0)
        } else {
            group.ball(1)
        };
        for c in &x.coords {
            for g in c.support() {
                elements.push(group.inverse(g));
            }
        }
        elements.sort();
        elements.dedup();

        let b = bounds.coefficient_bound as i64;
        let values: Vec<BigInt> = (-b..=b).filter(|&v| v != 0).map(BigInt::from).collect();
        let mut scalars: Vec<RingElement> = Vec::new();
        for (i, g) in elements.iter().enumerate() {
            for v in &values {
                scalars.push(RingElement::monomial(v.clone(), g.clone()));
                if bounds.max_support >= 2 {
                    for h in &elements[i + 1..] {
                        for w in &values {
                            let mut s = RingElement::monomial(v.clone(), g.clone());
                            s.add_term(h.clone(), w.clone());
                            scalars.push(s);
                        }
                    }
                }
            }
        }

        // <x, y> = sum_j row_j conj(y_j)
        let row = self.pair_row(x);
        let one = ring.one();
        let n = self.rank();
        let contributions: Vec<Vec<RingElement>> = (0..n)
            .map(|j| {
                scalars
                    .iter()
                    .map(|s| ring.mul(&row[j], &ring.involute(s)))
                    .collect()
            })
            .collect();
        let mut examined = 0usize;
        for j in 0..n {
            for (s, val) in scalars.iter().zip(&contributions[j]) {
                examined += 1;
                if examined > bounds.budget {
                    return Unimodularity::Unknown;
                }
                if *val == one {
                    let mut y = self.zero_vector();
                    y.coords[j] = s.clone();
                    return Unimodularity::Unimodular(y);
                }
            }
        }
        if bounds.max_nonzero_coords >= 2 {
            for j in 0..n {
                for k in j + 1..n {
                    for (s, vs) in scalars.iter().zip(&contributions[j]) {
                        for (t, vt) in scalars.iter().zip(&contributions[k]) {
                            examined += 1;
                            if examined > bounds.budget {
                                return Unimodularity::Unknown;
                            }
                            if vs + vt == one {
                                let mut y = self.zero_vector();
                                y.coords[j] = s.clone();
                                y.coords[k] = t.clone();
                                return Unimodularity::Unimodular(y);
                            }
                        }
                    }
                }
            }
        }
        Unimodularity::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Group};

    fn z() -> UnitaryRing {
        UnitaryRing::standard(Group::trivial())
    }

    fn zc2m() -> UnitaryRing {
        UnitaryRing::standard(Group::Finite(FiniteGroup::cyclic(2, -1).unwrap()))
    }

    fn vec_of(ring: &UnitaryRing, coeffs: &[i64]) -> ModuleVector {
        ModuleVector::new(coeffs.iter().map(|&c| ring.int(c)).collect())
    }

    #[test]
    fn hyperbolic_plane_values() {
        let ring = zc2m();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let (p, q) = (h.basis(0), h.basis(1));
        assert_eq!(h.inner(&p, &q).unwrap(), ring.one());
        assert_eq!(h.inner(&q, &p).unwrap(), ring.one());
        assert!(h.mu(&p).unwrap().is_zero());
        assert!(h.mu(&q).unwrap().is_zero());
        assert_eq!(h.gram().to_rows(), vec![vec![RingElement::zero(), ring.one()], vec![ring.one(), RingElement::zero()]]);
        assert!(h.inner(&h.zero_vector(), &q).unwrap().is_zero());
        let t = ring.elem(GroupElement::Finite(1));
        assert!(h.mu(&p.scale_left(&ring, &t)).unwrap().is_zero());
    }

    #[test]
    fn p_plus_q_over_integers() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let x = vec_of(&ring, &[1, 1]);
        assert_eq!(h.inner(&x, &x).unwrap(), ring.int(2));
        assert_eq!(h.mu(&x).unwrap(), ring.one());
        assert!(!h.is_isotropic(&x).unwrap());
        assert!(h.is_isotropic(&h.basis(0)).unwrap());
        assert!(h.is_isotropic(&h.zero_vector()).unwrap());
    }

    #[test]
    fn rank_zero_and_dimension_errors() {
        let ring = z();
        let h0 = QuadraticModule::hyperbolic(&ring, 0).unwrap();
        assert_eq!(h0.rank(), 0);
        let h1 = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        assert!(matches!(
            h1.inner(&vec_of(&ring, &[1]), &h1.basis(0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(h1.orthogonal_sum(&h0).unwrap(), h1);
    }

    #[test]
    fn sum_of_planes_is_permuted_hyperbolic() {
        let ring = zc2m();
        let h1 = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let h2 = QuadraticModule::hyperbolic(&ring, 2).unwrap();
        // p1 q1 p2 q2 -> p1 p2 q1 q2
        let sum = h1.orthogonal_sum(&h1).unwrap();
        assert_eq!(sum.permute_basis(&[0, 2, 1, 3]).unwrap(), h2);
        let x = sum.basis(0);
        let y = sum.basis(3);
        assert!(sum.inner(&x, &y).unwrap().is_zero());
    }

    #[test]
    fn hermitian_violation_rejected() {
        let ring = zc2m();
        let t = ring.elem(GroupElement::Finite(1));
        // G_10 must be conj(t) = -t
        let gram = Matrix::from_rows(vec![vec![RingElement::zero(), t.clone()], vec![t.clone(), RingElement::zero()]]).unwrap();
        assert!(QuadraticModule::new(ring.clone(), gram, vec![RingElement::zero(); 2], None).is_err());
        // diagonal 1 cannot be mu + conj(mu)
        let gram = Matrix::from_rows(vec![vec![ring.one()]]).unwrap();
        assert!(QuadraticModule::new(ring, gram, vec![RingElement::zero()], None).is_err());
    }

    #[test]
    fn unimodular_with_witness_and_construction() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let bounds = SearchBounds::default();
        let (p, q) = (h.basis(0), h.basis(1));
        assert_eq!(h.is_unimodular(&p, Some(&q), &bounds).unwrap(), Unimodularity::Unimodular(q.clone()));
        assert_eq!(h.is_unimodular(&p, Some(&p), &bounds).unwrap(), Unimodularity::WitnessRejected);
        assert_eq!(h.is_unimodular(&p, None, &bounds).unwrap(), Unimodularity::Unimodular(q.clone()));
        let minus_p = vec_of(&ring, &[-1, 0]);
        match h.is_unimodular(&minus_p, None, &bounds).unwrap() {
            Unimodularity::Unimodular(y) => assert_eq!(h.inner(&minus_p, &y).unwrap(), ring.one()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn twice_p_is_not_found() {
        // every value <2p, y> is even, so no dual vector exists at all
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let two_p = vec_of(&ring, &[2, 0]);
        for b in -4..=4 {
            for c in -4..=4 {
                let y = vec_of(&ring, &[b, c]);
                assert_ne!(h.inner(&two_p, &y).unwrap(), ring.one());
            }
        }
        assert_eq!(
            h.is_unimodular(&two_p, None, &SearchBounds::default()).unwrap(),
            Unimodularity::Unknown
        );
    }

    #[test]
    fn search_finds_non_basis_dual() {
        // <2p + 3q, b p + c q> = 2c + 3b, solved by b = 1, c = -1
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let x = vec_of(&ring, &[2, 3]);
        match h.is_unimodular(&x, None, &SearchBounds::default()).unwrap() {
            Unimodularity::Unimodular(y) => assert_eq!(h.inner(&x, &y).unwrap(), ring.one()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_checked() {
        let ring = z();
        let h = QuadraticModule::hyperbolic(&ring, 2).unwrap();
        let cert = h.certificate().unwrap().clone();
        assert_eq!(cert.inverse_gram, h.gram().clone());
        let bad = NonsingularityCertificate {
            inverse_gram: Matrix::identity(&ring, 4),
        };
        assert!(h.clone().with_certificate(bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let ring = zc2m();
        let h = QuadraticModule::hyperbolic(&ring, 1).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        let back: QuadraticModule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        let empty = QuadraticModule::zero(ring).unwrap();
        let s = serde_json::to_string(&empty).unwrap();
        assert_eq!(serde_json::from_str::<QuadraticModule>(&s).unwrap(), empty);
    }
}
