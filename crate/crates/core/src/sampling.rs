//! Seeded generators of random valid inputs, shared by the property tests,
//! the randomized suites and the command-line tool.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::factorization::FactorizationInput;
use crate::form::QuadraticModule;
use crate::group::{FiniteGroup, Group, GroupElement};
use crate::matrix::{Matrix, ModuleVector};
use crate::ring::{RingElement, UnitaryRing};
use crate::transvection::Transvection;

/// A nonsingular module obtained from `H(A^k)` by a random change of basis.
#[derive(Clone, Debug)]
pub struct TwistedHyperbolic {
    pub module: QuadraticModule,
    /// Rows are the new basis vectors in standard coordinates.
    pub change: Matrix,
    pub change_inverse: Matrix,
}

impl TwistedHyperbolic {
    /// Coordinates, in the twisted basis, of a vector given in the standard one.
    pub fn from_standard(&self, x: &ModuleVector) -> ModuleVector {
        x.apply_matrix(self.module.ring(), &self.change_inverse)
            .expect("dimensions agree")
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    /// Largest absolute coefficient.
    pub height: i64,
    /// Largest number of terms in a random ring element.
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            height: 3,
            max_terms: 2,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn sign(&mut self) -> i8 {
        if self.rng.gen_bool(0.5) {
            1
        } else {
            -1
        }
    }

    /// A finite group of order at most 6 with a random orientation character.
    pub fn finite_group(&mut self) -> Group {
        let g = match self.rng.gen_range(0..8) {
            0 => FiniteGroup::cyclic(1, 1),
            1 => FiniteGroup::cyclic(2, 1),
            2 => FiniteGroup::cyclic(2, -1),
            3 => FiniteGroup::cyclic(3, 1),
            4 => FiniteGroup::cyclic(4, self.sign()),
            5 => Ok(FiniteGroup::symmetric3(self.rng.gen_bool(0.5))),
            6 => {
                let a = FiniteGroup::cyclic(2, self.sign()).expect("valid");
                let b = FiniteGroup::cyclic(2, self.sign()).expect("valid");
                Ok(a.product(&b))
            }
            _ => FiniteGroup::cyclic(6, self.sign()),
        };
        Group::Finite(g.expect("built-in group tables are valid"))
    }

    pub fn free_abelian_group(&mut self) -> Group {
        let rank = self.rng.gen_range(1..=2);
        let omega = (0..rank).map(|_| self.sign()).collect();
        Group::free_abelian(rank, omega).expect("valid")
    }

    pub fn dihedral_group(&mut self) -> Group {
        let (a, b) = (self.sign(), self.sign());
        Group::infinite_dihedral(a, b).expect("valid")
    }

    /// A group from one of the three families, chosen uniformly.
    pub fn group(&mut self) -> Group {
        match self.rng.gen_range(0..3) {
            0 => self.finite_group(),
            1 => self.free_abelian_group(),
            _ => self.dihedral_group(),
        }
    }

    pub fn ring(&mut self) -> UnitaryRing {
        let g = self.group();
        UnitaryRing::standard(g)
    }

    /// Group elements that random ring elements are supported on: the whole
    /// group when finite, exponents of norm at most 1 for `Z^n`, words of
    /// length at most 3 for the infinite dihedral group.
    pub fn support_pool(ring: &UnitaryRing) -> Vec<GroupElement> {
        match ring.group() {
            Group::FreeAbelian { .. } => ring.group().ball(1),
            g => g.ball(3),
        }
    }

    pub fn element(&mut self, ring: &UnitaryRing) -> RingElement {
        let pool = Self::support_pool(ring);
        let terms = self.rng.gen_range(0..=self.max_terms);
        let mut x = RingElement::zero();
        for _ in 0..terms {
            let g = pool.choose(&mut self.rng).expect("pool is nonempty").clone();
            let c = self.rng.gen_range(-self.height..=self.height);
            x.add_term(g, c.into());
        }
        x
    }

    pub fn nonzero_element(&mut self, ring: &UnitaryRing) -> RingElement {
        loop {
            let x = self.element(ring);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// A trivial unit `+-g`.
    pub fn unit(&mut self, ring: &UnitaryRing) -> RingElement {
        let pool = Self::support_pool(ring);
        let g = pool.choose(&mut self.rng).expect("pool is nonempty").clone();
        RingElement::monomial(self.sign(), g)
    }

    pub fn vector(&mut self, ring: &UnitaryRing, n: usize) -> ModuleVector {
        ModuleVector::new((0..n).map(|_| self.element(ring)).collect())
    }

    /// A quadratic module of the given rank with random Gram matrix and
    /// refinement values, usually singular.
    pub fn module(&mut self, ring: &UnitaryRing, rank: usize) -> QuadraticModule {
        let mu: Vec<RingElement> = (0..rank).map(|_| self.element(ring)).collect();
        let mut gram = Matrix::zeros(rank, rank);
        for i in 0..rank {
            gram.set(i, i, &mu[i] + &ring.involute(&mu[i]));
            for j in i + 1..rank {
                let x = self.element(ring);
                gram.set(j, i, ring.involute(&x));
                gram.set(i, j, x);
            }
        }
        QuadraticModule::new(ring.clone(), gram, mu, None).expect("hermitian by construction")
    }

    /// A random invertible matrix: a product of elementary matrices
    /// `I + r e_ij` and diagonal trivial units, returned with its inverse.
    pub fn invertible_matrix(&mut self, ring: &UnitaryRing, n: usize, steps: usize) -> (Matrix, Matrix) {
        let mut m = Matrix::identity(ring, n);
        let mut inv = Matrix::identity(ring, n);
        if n == 0 {
            return (m, inv);
        }
        for _ in 0..steps {
            let mut e = Matrix::identity(ring, n);
            let mut e_inv = Matrix::identity(ring, n);
            if n >= 2 && self.rng.gen_bool(0.7) {
                let i = self.rng.gen_range(0..n);
                let j = (i + self.rng.gen_range(1..n)) % n;
                let r = self.element(ring);
                e.set(i, j, r.clone());
                e_inv.set(i, j, -r);
            } else {
                let i = self.rng.gen_range(0..n);
                let u = self.unit(ring);
                let (s, g) = u.as_trivial_unit().expect("unit");
                e_inv.set(i, i, RingElement::monomial(s, ring.group().inverse(g)));
                e.set(i, i, u);
            }
            m = e.mul(ring, &m).expect("square");
            inv = inv.mul(ring, &e_inv).expect("square");
        }
        (m, inv)
    }

    pub fn twisted_hyperbolic(&mut self, ring: &UnitaryRing, k: usize) -> TwistedHyperbolic {
        let h = QuadraticModule::hyperbolic(ring, k).expect("hyperbolic");
        let (change, change_inverse) = self.invertible_matrix(ring, 2 * k, 3);
        let module = h.change_basis(&change, &change_inverse).expect("invertible");
        TwistedHyperbolic {
            module,
            change,
            change_inverse,
        }
    }

    /// A valid input for the factorization algorithm, with `dim V0` in
    /// `{0, 2}` and `dim V1 <= 2`.
    pub fn factorization_input(&mut self, ring: &UnitaryRing) -> FactorizationInput {
        let (v0, line) = if self.rng.gen_bool(0.5) {
            let t = self.twisted_hyperbolic(ring, 1);
            let w = t.from_standard(&ModuleVector::basis(ring, 2, 0));
            (t.module, Some(w))
        } else {
            (QuadraticModule::zero(ring.clone()).expect("rank 0"), None)
        };
        let k0 = v0.rank();
        let k1 = self.rng.gen_range(0..=2);
        let v1 = self.module(ring, k1);
        let n = k0 + k1 + 2;

        let mut p = ModuleVector::zero(n);
        let mut v = ModuleVector::zero(n);
        match &line {
            Some(w) if self.rng.gen_bool(0.7) => {
                // p' = r w and the V0-part of v on the same isotropic line
                let r = self.element(ring);
                let s = self.element(ring);
                for i in 0..k0 {
                    p.coords[i] = ring.mul(&r, &w.coords[i]);
                    v.coords[i] = ring.mul(&s, &w.coords[i]);
                }
            }
            _ => {
                for i in 0..k0 {
                    v.coords[i] = self.element(ring);
                }
            }
        }
        for i in k0..k0 + k1 {
            v.coords[i] = self.element(ring);
        }
        p.coords[k0 + k1] = self.element(ring);

        let source = v0
            .orthogonal_sum(&v1)
            .and_then(|m| m.orthogonal_sum(&QuadraticModule::hyperbolic(ring, 1)?))
            .expect("same ring");
        let mut a = source.mu(&v).expect("dimensions agree");
        if self.rng.gen_bool(0.5) {
            let b = self.element(ring);
            a = &(&a + &b) - &ring.involute(&b);
        }
        let target = Transvection::new(&source, p, a, v).expect("valid by construction");
        FactorizationInput::new(v0, v1, target).expect("valid by construction")
    }

    /// `V (+) H(A^k)` with a random `V` of rank `v_rank`; basis `V`, then
    /// `p_1..p_k`, then `q_1..q_k`.
    pub fn stabilized_module(&mut self, ring: &UnitaryRing, v_rank: usize, k: usize) -> QuadraticModule {
        self.module(ring, v_rank)
            .orthogonal_sum(&QuadraticModule::hyperbolic(ring, k).expect("hyperbolic"))
            .expect("same ring")
    }

    /// A valid transvection on the standard `V (+) H(A^k)`: `u` in `P`,
    /// `v` with `q`-coordinates only where `u` has no `p`-coordinate.
    pub fn transvection_on(&mut self, m: &QuadraticModule, v_rank: usize, k: usize) -> Transvection {
        let ring = m.ring().clone();
        let n = v_rank + 2 * k;
        let mut u = ModuleVector::zero(n);
        let mut v = ModuleVector::zero(n);
        for i in 0..v_rank {
            v.coords[i] = self.element(&ring);
        }
        for i in 0..k {
            if self.rng.gen_bool(0.6) {
                u.coords[v_rank + i] = self.element(&ring);
            }
            v.coords[v_rank + i] = self.element(&ring);
            if u.coords[v_rank + i].is_zero() {
                v.coords[v_rank + k + i] = self.element(&ring);
            }
        }
        let mut a = m.mu(&v).expect("dimensions agree");
        if self.rng.gen_bool(0.5) {
            let b = self.element(&ring);
            a = &(&a + &b) - &ring.involute(&b);
        }
        Transvection::new(m, u, a, v).expect("valid by construction")
    }

    /// A random module `V (+) H(A^k)` in a twisted basis, with a valid
    /// transvection expressed in that basis.
    pub fn transvection(&mut self, ring: &UnitaryRing) -> (QuadraticModule, Transvection) {
        let v_rank = self.rng.gen_range(0..=2);
        let k = self.rng.gen_range(1..=2);
        let m = self.stabilized_module(ring, v_rank, k);
        let t = self.transvection_on(&m, v_rank, k);
        let (change, change_inverse) = self.invertible_matrix(ring, m.rank(), 2);
        let twisted = m.change_basis(&change, &change_inverse).expect("invertible");
        let to_new = |x: &ModuleVector| x.apply_matrix(ring, &change_inverse).expect("dimensions agree");
        let t = Transvection::unchecked(to_new(&t.u), t.a.clone(), to_new(&t.v));
        debug_assert!(t.validate(&twisted).is_ok());
        (twisted, t)
    }

    /// An instance for hyperbolic-pair completion on `V (+) H(A^k)`: an
    /// isotropic `p = phi(p_1)` for a random product of transvections `phi`,
    /// and `y` with `<p, y>` a trivial unit.
    pub fn completion_instance(&mut self, ring: &UnitaryRing) -> Result<(QuadraticModule, ModuleVector, ModuleVector)> {
        let v_rank = self.rng.gen_range(0..=1);
        let k = self.rng.gen_range(1..=2);
        let m = self.stabilized_module(ring, v_rank, k);
        let n = m.rank();
        let steps = self.rng.gen_range(1..=3);
        let phi: Vec<Transvection> = (0..steps).map(|_| self.transvection_on(&m, v_rank, k)).collect();
        let image = |x: ModuleVector| -> Result<ModuleVector> {
            phi.iter().try_fold(x, |acc, t| t.apply(&m, &acc))
        };
        let p = image(ModuleVector::basis(ring, n, v_rank))?;
        let mut y = ModuleVector::zero(n);
        for i in 0..n {
            let c = if i == v_rank + k { self.unit(ring) } else if i == v_rank { self.element(ring) } else { RingElement::zero() };
            if !c.is_zero() {
                y = &y + &image(ModuleVector::basis(ring, n, i))?.scale_left(ring, &c);
            }
        }
        // components along the other hyperbolic planes stay orthogonal to p
        for i in 1..k {
            for idx in [v_rank + i, v_rank + k + i] {
                let c = self.element(ring);
                y = &y + &image(ModuleVector::basis(ring, n, idx))?.scale_left(ring, &c);
            }
        }
        Ok((m, p, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            let ra = a.ring();
            let rb = b.ring();
            assert_eq!(ra, rb);
            assert_eq!(a.element(&ra), b.element(&rb));
        }
    }

    #[test]
    fn invertible_matrices_invert() {
        let mut s = Sampler::new(1);
        for _ in 0..20 {
            let ring = s.ring();
            let (m, inv) = s.invertible_matrix(&ring, 3, 4);
            assert_eq!(m.mul(&ring, &inv).unwrap(), Matrix::identity(&ring, 3));
        }
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut s = Sampler::new(2);
        for _ in 0..30 {
            let ring = s.ring();
            let input = s.factorization_input(&ring);
            input.target().validate(input.source()).unwrap();
            let (m, t) = s.transvection(&ring);
            t.validate(&m).unwrap();
            let (m, p, y) = s.completion_instance(&ring).unwrap();
            assert!(m.is_isotropic(&p).unwrap());
            assert!(m.inner(&p, &y).unwrap().as_trivial_unit().is_some());
        }
    }
}
