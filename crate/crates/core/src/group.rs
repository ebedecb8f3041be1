//! Group elements in canonical form for the three supported families:
//! finite groups given by a multiplication table, free-abelian groups `Z^n`,
//! and the infinite dihedral group `C2 * C2 = <a, b | a^2 = b^2 = 1>`.
//!
//! Every group carries an orientation character `omega: G -> {+1, -1}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    fn other(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }
}

/// Reduced word in `C2 * C2`. Reduced words strictly alternate, so a word is
/// determined by its length and first letter.
///
/// Ordered by length, then lexicographically (`a < b`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DihedralWord {
    len: u32,
    first: Letter,
}

impl DihedralWord {
    pub const EMPTY: DihedralWord = DihedralWord { len: 0, first: Letter::A };

    pub fn new(len: u32, first: Letter) -> Self {
        if len == 0 {
            Self::EMPTY
        } else {
            DihedralWord { len, first }
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn letter_at(&self, i: u32) -> Letter {
        if i % 2 == 0 {
            self.first
        } else {
            self.first.other()
        }
    }

    fn last(&self) -> Letter {
        self.letter_at(self.len - 1)
    }

    /// Number of occurrences of `a` and `b`.
    fn letter_counts(&self) -> (u32, u32) {
        let major = self.len.div_ceil(2);
        let minor = self.len / 2;
        match self.first {
            Letter::A => (major, minor),
            Letter::B => (minor, major),
        }
    }

    pub fn mul(&self, rhs: &DihedralWord) -> DihedralWord {
        if self.is_empty() {
            return *rhs;
        }
        if rhs.is_empty() {
            return *self;
        }
        if self.last() != rhs.first {
            return DihedralWord::new(self.len + rhs.len, self.first);
        }
        // Adjacent letters cancel pairwise until one side is exhausted.
        if self.len >= rhs.len {
            DihedralWord::new(self.len - rhs.len, self.first)
        } else {
            DihedralWord::new(rhs.len - self.len, rhs.letter_at(self.len))
        }
    }

    pub fn inverse(&self) -> DihedralWord {
        if self.is_empty() {
            *self
        } else {
            DihedralWord::new(self.len, self.last())
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidElement {
            element: format!("{s:?}"),
            reason: reason.to_string(),
        };
        let mut letters = s.chars().map(|c| match c {
            'a' => Ok(Letter::A),
            'b' => Ok(Letter::B),
            _ => Err(invalid("dihedral words use only the letters a and b")),
        });
        let first = match letters.next() {
            None => return Ok(Self::EMPTY),
            Some(l) => l?,
        };
        let mut prev = first;
        let mut len = 1u32;
        for l in letters {
            let l = l?;
            if l == prev {
                return Err(invalid("word is not reduced (repeated letter)"));
            }
            prev = l;
            len += 1;
        }
        Ok(DihedralWord::new(len, first))
    }
}

impl fmt::Display for DihedralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.letter_at(i).as_char())?;
        }
        Ok(())
    }
}

/// A group element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Finite(usize),
    FreeAbelian(Vec<i64>),
    Dihedral(DihedralWord),
}

impl GroupElement {
    fn family_rank(&self) -> u8 {
        match self {
            GroupElement::Finite(_) => 0,
            GroupElement::FreeAbelian(_) => 1,
            GroupElement::Dihedral(_) => 2,
        }
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Finite(x), Finite(y)) => x.cmp(y),
            (FreeAbelian(x), FreeAbelian(y)) => x.cmp(y),
            (Dihedral(x), Dihedral(y)) => x.cmp(y),
            _ => self.family_rank().cmp(&other.family_rank()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GroupElement {
    /// True for the identity of whichever family the element belongs to.
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Finite(i) => *i == 0,
            GroupElement::FreeAbelian(v) => v.iter().all(|&e| e == 0),
            GroupElement::Dihedral(w) => w.is_empty(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        match self {
            GroupElement::Finite(i) => write!(f, "g{i}"),
            GroupElement::FreeAbelian(v) => {
                let mut first = true;
                for (i, &e) in v.iter().enumerate().filter(|(_, &e)| e != 0) {
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    let name = if v.len() == 1 { "u".to_string() } else { format!("u{}", i + 1) };
                    if e == 1 {
                        write!(f, "{name}")?;
                    } else {
                        write!(f, "{name}^{e}")?;
                    }
                }
                Ok(())
            }
            GroupElement::Dihedral(w) => write!(f, "{w}"),
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            GroupElement::Finite(i) => serializer.serialize_u64(*i as u64),
            GroupElement::FreeAbelian(v) => v.serialize(serializer),
            GroupElement::Dihedral(w) => serializer.serialize_str(&w.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(u64),
            Exponents(Vec<i64>),
            Word(String),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Index(i) => GroupElement::Finite(i as usize),
            Raw::Exponents(v) => GroupElement::FreeAbelian(v),
            Raw::Word(s) => {
                GroupElement::Dihedral(DihedralWord::parse(&s).map_err(serde::de::Error::custom)?)
            }
        })
    }
}

/// Finite group given by its Cayley table; index 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    omega: Vec<i8>,
}

impl FiniteGroup {
    /// Validates the table exhaustively (closure, identity, associativity,
    /// inverses) and checks that `omega` is a homomorphism to `{+1, -1}`.
    pub fn new(table: Vec<Vec<usize>>, omega: Vec<i8>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: String| Err(Error::InvalidGroup(msg));
        if n == 0 {
            return bad("empty multiplication table".into());
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has length {} (expected {n})", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return bad(format!("row {i} contains out-of-range entry {x}"));
            }
        }
        for i in 0..n {
            if table[0][i] != i || table[i][0] != i {
                return bad(format!("index 0 is not a two-sided identity (fails at {i})"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            match (0..n).find(|&b| table[a][b] == 0 && table[b][a] == 0) {
                Some(b) => *inv = b,
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        if omega.len() != n {
            return bad(format!("omega has {} entries for a group of order {n}", omega.len()));
        }
        if omega.iter().any(|&s| s != 1 && s != -1) {
            return bad("omega values must be +1 or -1".into());
        }
        for a in 0..n {
            for b in 0..n {
                if omega[table[a][b]] != omega[a] * omega[b] {
                    return bad(format!("omega is not a homomorphism at ({a}, {b})"));
                }
            }
        }
        Ok(FiniteGroup { table, inverse, omega })
    }

    /// Like [`FiniteGroup::new`], additionally checking a supplied inverse table.
    pub fn with_inverse(table: Vec<Vec<usize>>, inverse: Vec<usize>, omega: Vec<i8>) -> Result<Self> {
        let group = Self::new(table, omega)?;
        if group.inverse != inverse {
            return Err(Error::InvalidGroup("inverse table is incorrect".into()));
        }
        Ok(group)
    }

    /// Cyclic group of order `n` generated by `t = 1`, with `omega(t) = omega_generator`.
    pub fn cyclic(n: usize, omega_generator: i8) -> Result<Self> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let omega = (0..n).map(|k| if k % 2 == 0 { 1 } else { omega_generator }).collect();
        Self::new(table, omega)
    }

    /// Group of permutations closed under composition, listed with the identity first.
    /// `signed` selects the sign character as orientation character.
    pub fn from_permutations(perms: &[Vec<usize>], signed: bool) -> Result<Self> {
        let index_of = |p: &Vec<usize>| perms.iter().position(|q| q == p);
        let mut table = Vec::with_capacity(perms.len());
        for p in perms {
            let mut row = Vec::with_capacity(perms.len());
            for q in perms {
                // (p * q)(i) = p(q(i))
                let pq: Vec<usize> = q.iter().map(|&i| p[i]).collect();
                row.push(index_of(&pq).ok_or_else(|| {
                    Error::InvalidGroup("permutations are not closed under composition".into())
                })?);
            }
            table.push(row);
        }
        let omega = perms
            .iter()
            .map(|p| if signed { permutation_sign(p) } else { 1 })
            .collect();
        Self::new(table, omega)
    }

    /// The symmetric group on three letters.
    pub fn symmetric3(signed: bool) -> Self {
        let perms = vec![
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        Self::from_permutations(&perms, signed).expect("S3 table is valid")
    }

    /// Direct product, element `(i, j)` stored at index `i * |H| + j`.
    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order(), other.order());
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| self.table[x / m][y / m] * m + other.table[x % m][y % m])
                    .collect()
            })
            .collect();
        let omega = (0..n * m).map(|x| self.omega[x / m] * other.omega[x % m]).collect();
        FiniteGroup::new(table, omega).expect("product of valid groups is valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn omega_values(&self) -> &[i8] {
        &self.omega
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

fn permutation_sign(p: &[usize]) -> i8 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A group together with its orientation character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub enum Group {
    Finite(FiniteGroup),
    FreeAbelian { rank: usize, omega: Vec<i8> },
    InfiniteDihedral { omega_a: i8, omega_b: i8 },
}

fn check_sign(s: i8, what: &str) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::InvalidGroup(format!("omega({what}) must be +1 or -1")))
    }
}

impl Group {
    pub fn trivial() -> Self {
        Group::Finite(FiniteGroup::cyclic(1, 1).expect("trivial group"))
    }

    pub fn free_abelian(rank: usize, omega: Vec<i8>) -> Result<Self> {
        if omega.len() != rank {
            return Err(Error::InvalidGroup(format!(
                "free abelian group of rank {rank} needs {rank} omega signs, got {}",
                omega.len()
            )));
        }
        for (i, &s) in omega.iter().enumerate() {
            check_sign(s, &format!("generator {i}"))?;
        }
        Ok(Group::FreeAbelian { rank, omega })
    }

    pub fn infinite_dihedral(omega_a: i8, omega_b: i8) -> Result<Self> {
        check_sign(omega_a, "a")?;
        check_sign(omega_b, "b")?;
        Ok(Group::InfiniteDihedral { omega_a, omega_b })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Finite(_))
    }

    /// Rank of a finite-index free-abelian subgroup.
    pub fn virtual_rank(&self) -> usize {
        match self {
            Group::Finite(_) => 0,
            Group::FreeAbelian { rank, .. } => *rank,
            Group::InfiniteDihedral { .. } => 1,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Finite(_) => GroupElement::Finite(0),
            Group::FreeAbelian { rank, .. } => GroupElement::FreeAbelian(vec![0; *rank]),
            Group::InfiniteDihedral { .. } => GroupElement::Dihedral(DihedralWord::EMPTY),
        }
    }

    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        let invalid = |reason: String| {
            Err(Error::InvalidElement {
                element: g.to_string(),
                reason,
            })
        };
        match (self, g) {
            (Group::Finite(fg), GroupElement::Finite(i)) => {
                if *i < fg.order() {
                    Ok(())
                } else {
                    invalid(format!("index out of range for a group of order {}", fg.order()))
                }
            }
            (Group::FreeAbelian { rank, .. }, GroupElement::FreeAbelian(v)) => {
                if v.len() == *rank {
                    Ok(())
                } else {
                    invalid(format!("exponent vector has length {} (rank {rank})", v.len()))
                }
            }
            (Group::InfiniteDihedral { .. }, GroupElement::Dihedral(_)) => Ok(()),
            _ => invalid("element belongs to a different group family".into()),
        }
    }

    /// Product of two elements already known to be valid for this group.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (self, g, h) {
            (Group::Finite(fg), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(fg.mul(*a, *b))
            }
            (Group::FreeAbelian { .. }, GroupElement::FreeAbelian(x), GroupElement::FreeAbelian(y)) => {
                GroupElement::FreeAbelian(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            (Group::InfiniteDihedral { .. }, GroupElement::Dihedral(x), GroupElement::Dihedral(y)) => {
                GroupElement::Dihedral(x.mul(y))
            }
            _ => panic!("group element {g} or {h} does not belong to this group"),
        }
    }

    /// Validated product.
    pub fn checked_mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (Group::Finite(fg), GroupElement::Finite(a)) => GroupElement::Finite(fg.inverse(*a)),
            (Group::FreeAbelian { .. }, GroupElement::FreeAbelian(x)) => {
                GroupElement::FreeAbelian(x.iter().map(|a| -a).collect())
            }
            (Group::InfiniteDihedral { .. }, GroupElement::Dihedral(w)) => {
                GroupElement::Dihedral(w.inverse())
            }
            _ => panic!("group element {g} does not belong to this group"),
        }
    }

    pub fn omega(&self, g: &GroupElement) -> i8 {
        match (self, g) {
            (Group::Finite(fg), GroupElement::Finite(a)) => fg.omega[*a],
            (Group::FreeAbelian { omega, .. }, GroupElement::FreeAbelian(x)) => omega
                .iter()
                .zip(x)
                .map(|(&s, &e)| if s == -1 && e % 2 != 0 { -1 } else { 1 })
                .product(),
            (Group::InfiniteDihedral { omega_a, omega_b }, GroupElement::Dihedral(w)) => {
                let (na, nb) = w.letter_counts();
                let sa = if na % 2 == 1 { *omega_a } else { 1 };
                let sb = if nb % 2 == 1 { *omega_b } else { 1 };
                sa * sb
            }
            _ => panic!("group element {g} does not belong to this group"),
        }
    }

    pub fn pow(&self, g: &GroupElement, k: u32) -> GroupElement {
        let mut acc = self.identity();
        for _ in 0..k {
            acc = self.mul(&acc, g);
        }
        acc
    }

    /// Word length (free-abelian: total absolute exponent; finite: 0).
    pub fn degree(&self, g: &GroupElement) -> u64 {
        match g {
            GroupElement::Finite(_) => 0,
            GroupElement::FreeAbelian(x) => x.iter().map(|e| e.unsigned_abs()).sum(),
            GroupElement::Dihedral(w) => u64::from(w.len()),
        }
    }

    /// All elements of degree at most `radius`, in the canonical order.
    /// Finite groups return every element.
    pub fn ball(&self, radius: u64) -> Vec<GroupElement> {
        let mut out = match self {
            Group::Finite(fg) => (0..fg.order()).map(GroupElement::Finite).collect(),
            Group::FreeAbelian { rank, .. } => {
                let r = radius as i64;
                let mut acc: Vec<Vec<i64>> = vec![vec![]];
                for _ in 0..*rank {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        let used: i64 = prefix.iter().map(|e| e.abs()).sum();
                        for e in -(r - used)..=(r - used) {
                            let mut v = prefix.clone();
                            v.push(e);
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                acc.into_iter().map(GroupElement::FreeAbelian).collect()
            }
            Group::InfiniteDihedral { .. } => {
                let mut v = vec![GroupElement::Dihedral(DihedralWord::EMPTY)];
                for len in 1..=radius as u32 {
                    v.push(GroupElement::Dihedral(DihedralWord::new(len, Letter::A)));
                    v.push(GroupElement::Dihedral(DihedralWord::new(len, Letter::B)));
                }
                v
            }
        };
        out.sort();
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawGroup {
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inverse: Option<Vec<usize>>,
        omega: Vec<i8>,
    },
    FreeAbelian {
        rank: usize,
        omega: Vec<i8>,
    },
    InfiniteDihedral {
        omega: DihedralOmega,
    },
}

#[derive(Serialize, Deserialize)]
struct DihedralOmega {
    a: i8,
    b: i8,
}

impl TryFrom<RawGroup> for Group {
    type Error = Error;

    fn try_from(raw: RawGroup) -> Result<Self> {
        match raw {
            RawGroup::Finite { table, inverse: None, omega } => {
                Ok(Group::Finite(FiniteGroup::new(table, omega)?))
            }
            RawGroup::Finite { table, inverse: Some(inv), omega } => {
                Ok(Group::Finite(FiniteGroup::with_inverse(table, inv, omega)?))
            }
            RawGroup::FreeAbelian { rank, omega } => Group::free_abelian(rank, omega),
            RawGroup::InfiniteDihedral { omega } => Group::infinite_dihedral(omega.a, omega.b),
        }
    }
}

impl From<Group> for RawGroup {
    fn from(g: Group) -> Self {
        match g {
            Group::Finite(fg) => RawGroup::Finite {
                table: fg.table,
                inverse: None,
                omega: fg.omega,
            },
            Group::FreeAbelian { rank, omega } => RawGroup::FreeAbelian { rank, omega },
            Group::InfiniteDihedral { omega_a, omega_b } => RawGroup::InfiniteDihedral {
                omega: DihedralOmega { a: omega_a, b: omega_b },
            },
        }
    }
}
