use serde::{Deserialize, Serialize};

use crate::arith::{mul_mod, units};

use super::PerfectDifferenceSet;

/// Lex-least sorted representative of a difference set under the affine
/// maps `a ↦ u·a + t (mod m)` with `gcd(u, m) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub q: u64,
    pub m: u64,
    pub residues: Vec<u64>,
}

impl CanonicalForm {
    pub fn to_pds(&self) -> PerfectDifferenceSet {
        PerfectDifferenceSet::from_unsigned(self.q, &self.residues)
            .expect("canonical forms are images of verified sets")
    }
}

/// Canonical representative of the affine class of `pds`.
///
/// Any image containing 0 sorts before any image that does not, so only the
/// translations moving some `u·a_j` to 0 need to be tried: `(q + 1)·φ(m)`
/// candidates instead of `m·φ(m)`.
pub fn canonical_form(pds: &PerfectDifferenceSet) -> CanonicalForm {
    let m = pds.modulus();
    let mut best: Option<Vec<u64>> = None;
    let mut image = Vec::with_capacity(pds.len());
    for u in units(m) {
        let scaled: Vec<u64> = pds.residues().iter().map(|&a| mul_mod(u, a, m)).collect();
        for &pivot in &scaled {
            image.clear();
            image.extend(scaled.iter().map(|&x| (x + m - pivot) % m));
            image.sort_unstable();
            if best.as_ref().is_none_or(|b| image < *b) {
                best = Some(image.clone());
            }
        }
    }
    CanonicalForm {
        q: pds.order(),
        m,
        residues: best.expect("a set has at least one element"),
    }
}

/// Whether two sets of the same order are affinely equivalent.
pub fn equivalent(a: &PerfectDifferenceSet, b: &PerfectDifferenceSet) -> bool {
    a.order() == b.order() && canonical_form(a) == canonical_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;

    /// Brute force over all m·φ(m) affine images.
    fn brute(pds: &PerfectDifferenceSet) -> Vec<u64> {
        let m = pds.modulus();
        let mut best: Option<Vec<u64>> = None;
        for u in (1..m).filter(|&u| gcd(u, m) == 1) {
            for t in 0..m {
                let mut img: Vec<u64> = pds.residues().iter().map(|&a| (u * a + t) % m).collect();
                img.sort();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn examples() {
        let d = PerfectDifferenceSet::new(2, &[1, 2, 4]).unwrap();
        assert_eq!(brute(&d), vec![0, 1, 3]);
        assert_eq!(canonical_form(&d).residues, vec![0, 1, 3]);

        let a = PerfectDifferenceSet::new(2, &[0, 1, 3]).unwrap();
        let b = PerfectDifferenceSet::new(2, &[0, 2, 6]).unwrap();
        assert!(equivalent(&a, &b));
    }

    #[test]
    fn idempotent_and_matches_brute_force() {
        for (q, set) in [
            (2u64, vec![0i64, 1, 3]),
            (3, vec![0, 1, 3, 9]),
            (4, vec![0, 1, 4, 14, 16]),
            (5, vec![0, 1, 3, 8, 12, 18]),
        ] {
            let d = PerfectDifferenceSet::new(q, &set).unwrap();
            let c = canonical_form(&d);
            assert_eq!(c.residues, brute(&d));
            assert_eq!(canonical_form(&c.to_pds()), c);
            assert_eq!(c.residues[0], 0);
            for (u, t) in [(2, 5), (3, 1), (5, 11)] {
                if let Ok(img) = d.transform(u, t) {
                    assert_eq!(canonical_form(&img), c);
                }
            }
        }
    }
}
