//! Seeded comparison of the table deciders against the residue search.

use super::{certify_by_search, in_ttot1, in_ttot2, SearchMode, SearchVerdict, TwoAdicTuple};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Valid tuples with coefficients drawn uniformly from `[-bound, bound]`.
pub fn random_tuples(seed: u64, count: usize, bound: i64) -> Vec<TwoAdicTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let [a, b, c, d] = [0; 4].map(|_: i64| rng.gen_range(-bound..=bound));
        if let Ok(t) = TwoAdicTuple::new(a, b, c, d) {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub tuple: [i128; 4],
    pub mode: SearchMode,
    pub decider: bool,
    pub search: SearchVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableCheck {
    pub checked: usize,
    pub depth: u32,
    pub inconclusive: usize,
    pub disagreements: Vec<Mismatch>,
}

impl TableCheck {
    pub fn clean(&self) -> bool {
        self.inconclusive == 0 && self.disagreements.is_empty()
    }
}

/// Runs both deciders and the search on each tuple. An inconclusive search
/// is counted separately and is not a disagreement.
pub fn check_tables(tuples: &[TwoAdicTuple], depth: u32) -> Result<TableCheck> {
    let mut report = TableCheck { checked: 0, depth, inconclusive: 0, disagreements: Vec::new() };
    for t in tuples {
        let (q1, q2) = t.forms();
        for (mode, claim) in [(SearchMode::SinglePair, in_ttot1(t)), (SearchMode::Product, in_ttot2(t))] {
            let search = certify_by_search(q1, q2, mode, depth)?;
            match search {
                SearchVerdict::Inconclusive => report.inconclusive += 1,
                SearchVerdict::Soluble { .. } if claim => {}
                SearchVerdict::Insoluble if !claim => {}
                _ => report.disagreements.push(Mismatch {
                    tuple: [t.a as i128, t.b(), t.c(), t.d()],
                    mode,
                    decider: claim,
                    search,
                }),
            }
        }
        report.checked += 1;
    }
    Ok(report)
}
