//! Backtracking search for perfect difference sets.
//!
//! Every difference set contains a pair `(x, x + 1)` because 1 is a
//! difference; translating by `−x` gives a set containing both 0 and 1.
//! The search therefore fixes `a₁ = 0, a₂ = 1` and extends with increasing
//! residues, keeping a table of the differences already covered. Exhausting
//! this tree proves that no set of the given order exists.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{modulus_for_order, PerfectDifferenceSet};

/// Default node budget.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result")]
pub enum SearchOutcome {
    Found { set: PerfectDifferenceSet },
    NoneExists,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub order: u64,
    pub modulus: u64,
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    /// Residues placed beyond the fixed prefix `{0, 1}`.
    pub nodes: u64,
}

struct Searcher {
    m: u32,
    size: usize,
    chosen: Vec<u32>,
    covered: Vec<bool>,
    nodes: u64,
    budget: u64,
}

enum Stop {
    Budget,
    Visitor,
}

impl Searcher {
    fn new(q: u64, budget: u64) -> Self {
        let m = modulus_for_order(q).expect("search order overflow") as u32;
        let mut s = Searcher {
            m,
            size: q as usize + 1,
            chosen: Vec::with_capacity(q as usize + 1),
            covered: vec![false; m as usize],
            nodes: 0,
            budget,
        };
        assert!(s.try_push(0) && s.try_push(1));
        s
    }

    /// Places `c` if none of its new differences is already covered.
    fn try_push(&mut self, c: u32) -> bool {
        let m = self.m;
        let mut marked = 0;
        let mut ok = true;
        for i in 0..self.chosen.len() {
            let d = (c + m - self.chosen[i]) % m;
            if self.covered[d as usize] || self.covered[(m - d) as usize] {
                ok = false;
                break;
            }
            self.covered[d as usize] = true;
            self.covered[(m - d) as usize] = true;
            marked += 1;
        }
        if !ok {
            for &a in &self.chosen[..marked] {
                let d = (c + m - a) % m;
                self.covered[d as usize] = false;
                self.covered[(m - d) as usize] = false;
            }
            return false;
        }
        self.chosen.push(c);
        true
    }

    fn pop(&mut self) {
        let c = self.chosen.pop().expect("pop on empty prefix");
        let m = self.m;
        for &a in &self.chosen {
            let d = (c + m - a) % m;
            self.covered[d as usize] = false;
            self.covered[(m - d) as usize] = false;
        }
    }

    /// Depth-first extension of the current prefix with residues `≥ start`.
    fn dfs<F>(&mut self, start: u32, visit: &mut F) -> ControlFlow<Stop>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if self.chosen.len() == self.size {
            return match visit(&self.chosen) {
                ControlFlow::Continue(()) => ControlFlow::Continue(()),
                ControlFlow::Break(()) => ControlFlow::Break(Stop::Visitor),
            };
        }
        let remaining = (self.size - self.chosen.len()) as u32;
        // Leave room for the residues still to be placed.
        let last = self.m - remaining;
        for c in start..=last {
            if !self.try_push(c) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.pop();
                return ControlFlow::Break(Stop::Budget);
            }
            let flow = self.dfs(c + 1, visit);
            self.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn to_pds(q: u64, residues: &[u32]) -> PerfectDifferenceSet {
    let r: Vec<u64> = residues.iter().map(|&a| a as u64).collect();
    PerfectDifferenceSet::from_unsigned(q, &r).expect("search only emits complete difference sets")
}

/// Sequential search; returns the first set in the normalized tree.
pub fn exhaustive_search(q: u64, budget: u64) -> SearchReport {
    assert!(q >= 1, "order must be positive");
    let mut s = Searcher::new(q, budget);
    let mut found = None;
    let flow = s.dfs(2, &mut |set| {
        found = Some(to_pds(q, set));
        ControlFlow::Break(())
    });
    let outcome = match (flow, found) {
        (_, Some(set)) => SearchOutcome::Found { set },
        (ControlFlow::Break(Stop::Budget), None) => SearchOutcome::BudgetExceeded,
        _ => SearchOutcome::NoneExists,
    };
    SearchReport {
        order: q,
        modulus: s.m as u64,
        outcome,
        nodes: s.nodes.min(budget),
    }
}

struct Branch {
    nodes: u64,
    found: Option<(PerfectDifferenceSet, u64)>,
    exceeded: bool,
}

/// Parallel search: the tree is split on the third residue and the
/// branches run on `threads` workers (0 = rayon default).
///
/// Each branch runs under the full budget; the sequential outcome is then
/// replayed from the per-branch node counts, so the report (including the
/// set found and the node count) equals [`exhaustive_search`]'s.
pub fn exhaustive_search_parallel(q: u64, budget: u64, threads: usize) -> SearchReport {
    assert!(q >= 1, "order must be positive");
    let m = modulus_for_order(q).expect("search order overflow");
    if q == 1 {
        return exhaustive_search(q, budget);
    }
    let remaining_after_third = q as u32 + 1 - 3;
    let thirds: Vec<u32> = (2..=(m as u32 - 1 - remaining_after_third)).collect();
    let lowest_found = AtomicUsize::new(usize::MAX);

    let run = |(idx, &c): (usize, &u32)| -> Branch {
        if idx > lowest_found.load(Ordering::Relaxed) {
            return Branch {
                nodes: 0,
                found: None,
                exceeded: false,
            };
        }
        let mut s = Searcher::new(q, budget);
        if !s.try_push(c) {
            return Branch {
                nodes: 0,
                found: None,
                exceeded: false,
            };
        }
        s.nodes = 1;
        let mut found = None;
        let flow = s.dfs(c + 1, &mut |set| {
            found = Some(to_pds(q, set));
            ControlFlow::Break(())
        });
        let nodes = s.nodes;
        if found.is_some() {
            lowest_found.fetch_min(idx, Ordering::Relaxed);
        }
        Branch {
            nodes,
            found: found.map(|f| (f, nodes)),
            exceeded: matches!(flow, ControlFlow::Break(Stop::Budget)),
        }
    };

    let branches: Vec<Branch> = if threads == 0 {
        thirds.par_iter().enumerate().map(run).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| thirds.par_iter().enumerate().map(run).collect())
    };

    // Replay the sequential order.
    let mut total = 0u64;
    let mut outcome = SearchOutcome::NoneExists;
    for b in branches {
        if let Some((set, at)) = b.found {
            if total + at <= budget {
                total += at;
                outcome = SearchOutcome::Found { set };
            } else {
                total = budget;
                outcome = SearchOutcome::BudgetExceeded;
            }
            break;
        }
        total += b.nodes;
        if b.exceeded || total > budget {
            total = budget;
            outcome = SearchOutcome::BudgetExceeded;
            break;
        }
    }
    SearchReport {
        order: q,
        modulus: m,
        outcome,
        nodes: total,
    }
}

/// Every set in the normalized tree (all sets containing 0 and 1), or
/// `None` if the budget runs out first.
pub fn enumerate_all(q: u64, budget: u64) -> Option<Vec<PerfectDifferenceSet>> {
    assert!(q >= 1, "order must be positive");
    let mut s = Searcher::new(q, budget);
    let mut all = Vec::new();
    if q == 1 {
        return Some(vec![to_pds(q, &s.chosen)]);
    }
    match s.dfs(2, &mut |set| {
        all.push(to_pds(q, set));
        ControlFlow::Continue(())
    }) {
        ControlFlow::Break(Stop::Budget) => None,
        _ => Some(all),
    }
}
