use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An integer 2×2 matrix of determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det == 1 {
            Ok(GroupElement { a, b, c, d })
        } else {
            Err(Error::NotUnimodular { a, b, c, d })
        }
    }

    pub(crate) fn new_unchecked(a: i64, b: i64, c: i64, d: i64) -> Self {
        debug_assert_eq!(a as i128 * d as i128 - b as i128 * c as i128, 1);
        GroupElement { a, b, c, d }
    }

    /// `[a, b, c, d]`.
    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// `γ ≡ I (mod n)`.
    pub fn is_identity_mod(&self, n: u64) -> bool {
        let n = n as i64;
        self.a.rem_euclid(n) == 1 % n
            && self.d.rem_euclid(n) == 1 % n
            && self.b.rem_euclid(n) == 0
            && self.c.rem_euclid(n) == 0
    }

    /// Sum of squared entries; equals `2 cosh d(i, γi)`.
    pub fn frobenius_sqr(&self) -> i128 {
        self.entries().iter().map(|&e| e as i128 * e as i128).sum()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "SL2Z")]
    Sl2z,
    /// Principal congruence subgroup `Γ(N)`.
    #[serde(rename = "GammaN")]
    Gamma(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub covolume: f64,
    pub kappa: u8,
    pub contains_minus_identity: bool,
}

impl GroupSpec {
    pub fn sl2z() -> GroupSpec {
        make_group(GroupKind::Sl2z).expect("SL(2,Z) is always valid")
    }

    pub fn gamma(level: u64) -> Result<GroupSpec> {
        make_group(GroupKind::Gamma(level))
    }

    /// Congruence level; 1 for the full modular group.
    pub fn level(&self) -> u64 {
        match self.kind {
            GroupKind::Sl2z => 1,
            GroupKind::Gamma(n) => n,
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        let n = self.level();
        n == 1 || g.is_identity_mod(n)
    }

    /// Index of `Γ` in SL(2,ℤ).
    pub fn index(&self) -> u64 {
        sl2_index(self.level())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Sl2z => write!(f, "SL2Z"),
            GroupKind::Gamma(n) => write!(f, "Gamma({n})"),
        }
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `[SL(2,ℤ) : Γ(N)] = N³ ∏_{p|N} (1 − p⁻²)`.
fn sl2_index(n: u64) -> u64 {
    prime_divisors(n).iter().fold(n * n * n, |acc, &p| acc / (p * p) * (p * p - 1))
}

pub fn make_group(kind: GroupKind) -> Result<GroupSpec> {
    let level = match kind {
        GroupKind::Sl2z => 1,
        GroupKind::Gamma(0) => return Err(Error::InvalidLevel(0)),
        GroupKind::Gamma(n) => n,
    };
    let contains_minus_identity = level <= 2;
    // The quotient is tiled by [PSL(2,ℤ) : Γ̄] copies of the modular
    // fundamental domain of area π/3; Γ̄ = Γ/{±I} halves the SL index
    // exactly when −I ∉ Γ.
    let sl_index = sl2_index(level);
    let psl_index = if contains_minus_identity { sl_index } else { sl_index / 2 };
    Ok(GroupSpec {
        kind,
        covolume: PI / 3.0 * psl_index as f64,
        kappa: if contains_minus_identity { 2 } else { 1 },
        contains_minus_identity,
    })
}
