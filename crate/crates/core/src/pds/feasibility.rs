use serde::{Deserialize, Serialize};

use crate::arith::is_sum_of_two_squares;

use super::search::{exhaustive_search, SearchOutcome};
use super::singer::{singer_construct, MAX_SINGER_ORDER};
use super::PerfectDifferenceSet;

/// Node budget used by [`feasibility`] when none is given. Much smaller
/// than the standalone search default: orders like 10 stay open unless a
/// larger budget is requested explicitly.
pub const DEFAULT_FEASIBILITY_BUDGET: u64 = 1_000_000;

pub fn is_prime_power(order: u64) -> bool {
    crate::arith::is_prime_power(order)
}

/// Bruck-Ryser: no set of order `n` when `n ≡ 1, 2 (mod 4)` and `n` is not
/// a sum of two squares.
pub fn bruck_ryser_excludes(order: u64) -> bool {
    matches!(order % 4, 1 | 2) && !is_sum_of_two_squares(order)
}

/// Wilbrink: no set of order `n ≥ 6` with `n ≡ 3, 6 (mod 9)`.
pub fn wilbrink_excludes(order: u64) -> bool {
    order >= 6 && matches!(order % 9, 3 | 6)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result")]
pub enum ExhaustiveResult {
    Found { set: PerfectDifferenceSet },
    NoneExists,
    BudgetExceeded,
    NotAttempted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityVerdict {
    Exists,
    Excluded,
    OpenByTheseTests,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub order: u64,
    pub is_prime_power: bool,
    pub bruck_ryser_excludes: bool,
    pub wilbrink_excludes: bool,
    pub exhaustive_result: ExhaustiveResult,
    /// Search nodes used, when the search ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_nodes: Option<u64>,
    /// Singer set for prime-power orders within the construction's range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singer: Option<PerfectDifferenceSet>,
    pub verdict: FeasibilityVerdict,
    /// Tests that decided the verdict: `"prime-power"`, `"bruck-ryser"`,
    /// `"wilbrink"`, `"exhaustive-search"`.
    pub reasons: Vec<String>,
}

/// Combines the prime-power test, the two exclusion criteria and, for
/// orders that are not prime powers, an exhaustive search under
/// `search_budget` nodes (0 skips the search).
pub fn feasibility(order: u64, search_budget: u64) -> FeasibilityReport {
    assert!(order >= 1, "order must be positive");
    let pp = is_prime_power(order);
    let br = bruck_ryser_excludes(order);
    let wb = wilbrink_excludes(order);

    let (exhaustive_result, search_nodes) = if pp || search_budget == 0 {
        (ExhaustiveResult::NotAttempted, None)
    } else {
        let report = exhaustive_search(order, search_budget);
        let r = match report.outcome {
            SearchOutcome::Found { set } => ExhaustiveResult::Found { set },
            SearchOutcome::NoneExists => ExhaustiveResult::NoneExists,
            SearchOutcome::BudgetExceeded => ExhaustiveResult::BudgetExceeded,
        };
        (r, Some(report.nodes))
    };
    let singer = if pp && order <= MAX_SINGER_ORDER {
        singer_construct(order).ok()
    } else {
        None
    };

    let found = matches!(exhaustive_result, ExhaustiveResult::Found { .. });
    let none = matches!(exhaustive_result, ExhaustiveResult::NoneExists);
    let mut reasons = Vec::new();
    let verdict = if pp || found {
        if pp {
            reasons.push("prime-power".to_string());
        }
        if found {
            reasons.push("exhaustive-search".to_string());
        }
        FeasibilityVerdict::Exists
    } else if br || wb || none {
        if br {
            reasons.push("bruck-ryser".to_string());
        }
        if wb {
            reasons.push("wilbrink".to_string());
        }
        if none {
            reasons.push("exhaustive-search".to_string());
        }
        FeasibilityVerdict::Excluded
    } else {
        FeasibilityVerdict::OpenByTheseTests
    };
    debug_assert!(
        !(found && (br || wb)),
        "exclusion test contradicted by a found set at order {order}"
    );

    FeasibilityReport {
        order,
        is_prime_power: pp,
        bruck_ryser_excludes: br,
        wilbrink_excludes: wb,
        exhaustive_result,
        search_nodes,
        singer,
        verdict,
        reasons,
    }
}
