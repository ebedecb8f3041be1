//! The integral group ring `A = Z[pi^omega]` with involution
//! `conj(g) = omega(g) g^-1`, and canonical reduction modulo the minimal form
//! parameter `{a - conj(a)}` for `lambda = +1`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};

/// Finite formal integer combination of group elements, kept sorted by the
/// group's total order with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    terms: BTreeMap<GroupElement, BigInt>,
}

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coefficient: impl Into<BigInt>, g: GroupElement) -> Self {
        let mut x = Self::zero();
        x.add_term(g, coefficient.into());
        x
    }

    /// Builds an element from arbitrary terms, summing duplicates.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C, GroupElement)>,
        C: Into<BigInt>,
    {
        let mut x = Self::zero();
        for (c, g) in terms {
            x.add_term(g, c.into());
        }
        x
    }

    pub fn add_term(&mut self, g: GroupElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, g: &GroupElement) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn scale(&self, k: &BigInt) -> RingElement {
        if k.is_zero() {
            return RingElement::zero();
        }
        RingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map_coefficients(&self, mut f: impl FnMut(&GroupElement, &BigInt) -> BigInt) -> Self {
        let mut out = RingElement::zero();
        for (g, c) in &self.terms {
            out.add_term(g.clone(), f(g, c));
        }
        out
    }

    /// If this element is `+-g` for a single group element, returns the sign and `g`.
    pub fn as_trivial_unit(&self) -> Option<(i8, &GroupElement)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (g, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((1, g))
        } else if (-c).is_one() {
            Some((-1, g))
        } else {
            None
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let c = c.abs();
            if g.is_identity() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{g}")?;
            } else {
                write!(f, "{c}*{g}")?;
            }
        }
        Ok(())
    }
}

impl Add<&RingElement> for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for RingElement {
    type Output = RingElement;
    fn add(mut self, rhs: RingElement) -> RingElement {
        self += &rhs;
        self
    }
}

impl AddAssign<&RingElement> for RingElement {
    fn add_assign(&mut self, rhs: &RingElement) {
        for (g, c) in &rhs.terms {
            self.add_term(g.clone(), c.clone());
        }
    }
}

impl Sub<&RingElement> for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(mut self, rhs: RingElement) -> RingElement {
        self -= &rhs;
        self
    }
}

impl SubAssign<&RingElement> for RingElement {
    fn sub_assign(&mut self, rhs: &RingElement) {
        for (g, c) in &rhs.terms {
            self.add_term(g.clone(), -c);
        }
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

/// Integer coefficient in JSON: a number when it fits in 64 bits, otherwise a
/// decimal string. Both forms are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficient(pub BigInt);

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Coefficient;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coefficient, E> {
                Ok(Coefficient(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coefficient, E> {
                Ok(Coefficient(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coefficient, E> {
                v.trim()
                    .parse::<BigInt>()
                    .map(Coefficient)
                    .map_err(|_| E::custom(format!("invalid integer string {v:?}")))
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (g, c) in &self.terms {
            seq.serialize_element(&(Coefficient(c.clone()), g))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RingElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RingElement;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of [coefficient, element] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<RingElement, A::Error> {
                let mut x = RingElement::zero();
                while let Some((c, g)) = seq.next_element::<(Coefficient, GroupElement)>()? {
                    x.add_term(g, c.0);
                }
                Ok(x)
            }
        }
        deserializer.deserialize_seq(V)
    }
}

/// The group ring of a group with orientation character, together with the
/// central unit `lambda` of the unitary structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "FullContext")]
pub struct UnitaryRing {
    group: Arc<Group>,
    lambda: RingElement,
}

#[derive(Serialize, Deserialize)]
struct FullContext {
    group: Group,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<RingElement>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawContext {
    Full(FullContext),
    Bare(Group),
}

impl TryFrom<RawContext> for UnitaryRing {
    type Error = Error;
    fn try_from(raw: RawContext) -> Result<Self> {
        match raw {
            RawContext::Full(FullContext { group, lambda: None }) | RawContext::Bare(group) => {
                Ok(UnitaryRing::standard(group))
            }
            RawContext::Full(FullContext { group, lambda: Some(l) }) => UnitaryRing::new(group, l),
        }
    }
}

impl From<UnitaryRing> for FullContext {
    fn from(r: UnitaryRing) -> Self {
        FullContext {
            group: (*r.group).clone(),
            lambda: Some(r.lambda),
        }
    }
}

impl UnitaryRing {
    /// `lambda = +1`.
    pub fn standard(group: Group) -> Self {
        let lambda = RingElement::monomial(1, group.identity());
        UnitaryRing {
            group: Arc::new(group),
            lambda,
        }
    }

    /// Checks that `lambda` is central and satisfies `lambda * conj(lambda) = 1`.
    pub fn new(group: Group, lambda: RingElement) -> Result<Self> {
        let ring = UnitaryRing {
            group: Arc::new(group),
            lambda: RingElement::zero(),
        };
        ring.check(&lambda)?;
        if ring.mul(&lambda, &ring.involute(&lambda)) != ring.one() {
            return Err(Error::precondition("lambda * conj(lambda) != 1"));
        }
        let probes = match ring.group.as_ref() {
            Group::Finite(_) => ring.group.ball(0),
            other => other.ball(1),
        };
        for g in probes {
            let g = RingElement::monomial(1, g);
            if ring.mul(&lambda, &g) != ring.mul(&g, &lambda) {
                return Err(Error::precondition("lambda is not central"));
            }
        }
        Ok(UnitaryRing { lambda, ..ring })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn lambda(&self) -> &RingElement {
        &self.lambda
    }

    pub fn lambda_is_one(&self) -> bool {
        self.lambda == self.one()
    }

    pub fn one(&self) -> RingElement {
        RingElement::monomial(1, self.group.identity())
    }

    pub fn int(&self, n: impl Into<BigInt>) -> RingElement {
        RingElement::monomial(n, self.group.identity())
    }

    pub fn elem(&self, g: GroupElement) -> RingElement {
        RingElement::monomial(1, g)
    }

    /// Validates every group element in `x`.
    pub fn check(&self, x: &RingElement) -> Result<()> {
        x.support().try_for_each(|g| self.group.validate(g))
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (g, c) in x.terms() {
            for (h, d) in y.terms() {
                out.add_term(self.group.mul(g, h), c * d);
            }
        }
        out
    }

    pub fn checked_mul(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// `sum c_g g  ->  sum c_g omega(g) g^-1`.
    pub fn involute(&self, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (g, c) in x.terms() {
            let c = if self.group.omega(g) == 1 { c.clone() } else { -c };
            out.add_term(self.group.inverse(g), c);
        }
        out
    }

    /// Canonical representative of `x + Lambda_min`.
    ///
    /// `Lambda_min` is spanned by `g - omega(g) g^-1`. For an orbit
    /// `{g, g^-1}` with `g < g^-1` the coefficient of `g^-1` is moved onto `g`;
    /// a self-inverse `g` with `omega(g) = -1` keeps its coefficient mod 2.
    pub fn reduce_mod_lambda(&self, x: &RingElement) -> Result<RingElement> {
        if !self.lambda_is_one() {
            return Err(Error::Unsupported(
                "reduction modulo the form parameter is implemented for lambda = +1 only".into(),
            ));
        }
        Ok(self.reduce(x))
    }

    /// [`UnitaryRing::reduce_mod_lambda`] for a context already known to have `lambda = +1`.
    pub(crate) fn reduce(&self, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (g, c) in x.terms() {
            let inv = self.group.inverse(g);
            let omega = self.group.omega(g);
            match g.cmp(&inv) {
                std::cmp::Ordering::Equal => {
                    if omega == -1 {
                        out.add_term(g.clone(), c.mod_floor(&BigInt::from(2)));
                    } else {
                        out.add_term(g.clone(), c.clone());
                    }
                }
                std::cmp::Ordering::Less => out.add_term(g.clone(), c.clone()),
                std::cmp::Ordering::Greater => {
                    let c = if omega == 1 { c.clone() } else { -c };
                    out.add_term(inv, c);
                }
            }
        }
        out
    }

    pub fn is_in_lambda(&self, x: &RingElement) -> bool {
        self.reduce(x).is_zero()
    }

    /// All ring elements supported on `support` with every coefficient drawn
    /// from `values` (which should contain zero). Exponential in `support.len()`; callers bound it.
    pub fn enumerate(&self, support: &[GroupElement], values: &[BigInt]) -> Vec<RingElement> {
        let mut out = vec![RingElement::zero()];
        for g in support {
            let mut next = Vec::with_capacity(out.len() * values.len());
            for x in &out {
                for v in values {
                    let mut y = x.clone();
                    y.add_term(g.clone(), v.clone());
                    next.push(y);
                }
            }
            out = next;
        }
        out
    }
}
