//! Perfect difference sets.
//!
//! A perfect difference set of order `q` is a set of `q + 1` residues modulo
//! `m = q² + q + 1` whose `q² + q` ordered differences `a_i − a_j` (`i ≠ j`)
//! hit every nonzero residue exactly once.

mod canonical;
mod feasibility;
mod search;
mod singer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::GfError;

pub use canonical::{canonical_form, equivalent, CanonicalForm};
pub use feasibility::{
    bruck_ryser_excludes, feasibility, is_prime_power, wilbrink_excludes, ExhaustiveResult,
    FeasibilityReport, FeasibilityVerdict, DEFAULT_FEASIBILITY_BUDGET,
};
pub use search::{
    enumerate_all, exhaustive_search, exhaustive_search_parallel, SearchOutcome, SearchReport,
    DEFAULT_BUDGET,
};
pub use singer::{singer_construct, MAX_SINGER_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdsError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("order {q} exceeds the supported maximum {max}")]
    OrderTooLarge { q: u64, max: u64 },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("modulus {m} does not match order {q} (expected {expected})")]
    ModulusMismatch { q: u64, m: u64, expected: u64 },
    #[error("not a perfect difference set: {0}")]
    InvalidPds(Witness),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Reason a candidate fails to be a perfect difference set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The order is zero or `q² + q + 1` overflows.
    InvalidOrder { q: u64 },
    /// Wrong number of residues.
    WrongSize { expected: u64, found: u64 },
    /// Two candidates agree modulo `m`.
    DuplicateResidue { residue: u64 },
    /// A nonzero residue that is not a difference.
    Missing { difference: u64 },
    /// A nonzero residue hit more than once.
    Repeated { difference: u64, count: u64 },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::InvalidOrder { q } => write!(f, "invalid order {q}"),
            Witness::WrongSize { expected, found } => {
                write!(f, "expected {expected} residues, found {found}")
            }
            Witness::DuplicateResidue { residue } => write!(f, "residue {residue} repeated"),
            Witness::Missing { difference } => write!(f, "difference {difference} missing"),
            Witness::Repeated { difference, count } => {
                write!(f, "difference {difference} occurs {count} times")
            }
        }
    }
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// `q² + q + 1`, if it fits.
pub fn modulus_for_order(q: u64) -> Option<u64> {
    q.checked_mul(q)?.checked_add(q)?.checked_add(1)
}

/// Inverse of [`modulus_for_order`].
pub fn order_for_modulus(m: u64) -> Option<u64> {
    // q² + q + 1 = m  ⇒  q = (√(4m − 3) − 1) / 2
    let disc = m.checked_mul(4)?.checked_sub(3)?;
    let s = disc.isqrt();
    if s * s != disc || s % 2 == 0 {
        return None;
    }
    let q = (s - 1) / 2;
    (q >= 1).then_some(q)
}

/// Checks whether `candidate` is a perfect difference set of order `q`
/// (entries taken modulo `q² + q + 1`). On failure the verdict carries the
/// first problem found.
pub fn verify(candidate: &[i64], q: u64) -> Verdict {
    let fail = |w| Verdict {
        valid: false,
        witness: Some(w),
    };
    let m = match modulus_for_order(q) {
        Some(m) if q >= 1 => m,
        _ => return fail(Witness::InvalidOrder { q }),
    };
    if candidate.len() as u64 != q + 1 {
        return fail(Witness::WrongSize {
            expected: q + 1,
            found: candidate.len() as u64,
        });
    }
    let mut residues: Vec<u64> = candidate
        .iter()
        .map(|&a| a.rem_euclid(m as i64) as u64)
        .collect();
    residues.sort_unstable();
    if let Some(w) = residues.windows(2).find(|w| w[0] == w[1]) {
        return fail(Witness::DuplicateResidue { residue: w[0] });
    }
    match difference_defect(&residues, m) {
        Some(w) => fail(w),
        None => Verdict {
            valid: true,
            witness: None,
        },
    }
}

/// First nonzero residue whose multiplicity among the ordered differences is
/// not exactly one.
fn difference_defect(residues: &[u64], m: u64) -> Option<Witness> {
    let mut counts = vec![0u64; m as usize];
    for &a in residues {
        for &b in residues {
            if a != b {
                counts[((a + m - b) % m) as usize] += 1;
            }
        }
    }
    counts
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &c)| c != 1)
        .map(|(d, &c)| {
            if c == 0 {
                Witness::Missing {
                    difference: d as u64,
                }
            } else {
                Witness::Repeated {
                    difference: d as u64,
                    count: c,
                }
            }
        })
}

/// A verified perfect difference set: residues are sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PdsRecord")]
pub struct PerfectDifferenceSet {
    q: u64,
    m: u64,
    residues: Vec<u64>,
}

/// Unchecked JSON shape of a [`PerfectDifferenceSet`].
#[derive(Debug, Clone, Deserialize)]
struct PdsRecord {
    q: u64,
    m: u64,
    residues: Vec<i64>,
}

impl TryFrom<PdsRecord> for PerfectDifferenceSet {
    type Error = PdsError;

    fn try_from(r: PdsRecord) -> Result<Self, PdsError> {
        let expected = modulus_for_order(r.q).ok_or(PdsError::ZeroOrder)?;
        if r.m != expected {
            return Err(PdsError::ModulusMismatch {
                q: r.q,
                m: r.m,
                expected,
            });
        }
        Self::new(r.q, &r.residues)
    }
}

impl PerfectDifferenceSet {
    /// Validates `residues` (taken mod `q² + q + 1`) as an order-`q` set.
    pub fn new(q: u64, residues: &[i64]) -> Result<Self, PdsError> {
        if q == 0 {
            return Err(PdsError::ZeroOrder);
        }
        let verdict = verify(residues, q);
        if let Some(w) = verdict.witness {
            return Err(PdsError::InvalidPds(w));
        }
        let m = modulus_for_order(q).expect("checked by verify");
        let mut residues: Vec<u64> = residues
            .iter()
            .map(|&a| a.rem_euclid(m as i64) as u64)
            .collect();
        residues.sort_unstable();
        Ok(PerfectDifferenceSet { q, m, residues })
    }

    pub fn from_unsigned(q: u64, residues: &[u64]) -> Result<Self, PdsError> {
        let signed: Vec<i64> = residues.iter().map(|&a| a as i64).collect();
        Self::new(q, &signed)
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// `q² + q + 1`.
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Sorted residues in `[0, m)`.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Number of residues, `q + 1`.
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// The `q² + q` ordered differences `a_i − a_j mod m`, `i ≠ j`.
    pub fn differences(&self) -> Vec<u64> {
        let m = self.m;
        let mut out = Vec::with_capacity(self.residues.len() * (self.residues.len() - 1));
        for &a in &self.residues {
            for &b in &self.residues {
                if a != b {
                    out.push((a + m - b) % m);
                }
            }
        }
        out
    }

    /// The image `u·D + t mod m`. Fails unless `gcd(u, m) = 1`.
    pub fn transform(&self, u: u64, t: u64) -> Result<Self, PdsError> {
        let m = self.m;
        let image: Vec<u64> = self
            .residues
            .iter()
            .map(|&a| (crate::arith::mul_mod(u % m, a, m) + t % m) % m)
            .collect();
        Self::from_unsigned(self.q, &image)
    }
}
