//! The best-offer rate graph.
//!
//! Vertices are currencies, and a directed edge A>B carries the quality of
//! the best offer in that book: the edge exists only while the book is
//! non-empty. Each edge stores the exact rational rate, its float weight
//! -ln(rate) for shortest-path work, and the head offer's remaining depth
//! for sizing.
//!
//! The graph is versioned by ledger index and is normally advanced
//! incrementally from [`BookDelta`]s; only the pairs whose best offer
//! changed are touched, and a delta that skips a ledger is refused so a
//! caller can fall back to [`RateGraph::rebuild`].

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive};
use thiserror::Error;

use crate::book::{BookDelta, BookSet, Offer, PairKey};
use crate::types::{AccountId, Amount, CurrencyId, LedgerIndex, OfferSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("delta for ledger {got} cannot advance graph at version {version} (want {want})")]
    VersionGap { version: LedgerIndex, want: LedgerIndex, got: LedgerIndex },
}

/// One directed edge: the best offer of its book, reduced to what detection
/// and sizing need.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEdge {
    /// Taker gets per unit taker pays; exact.
    pub rate: BigRational,
    /// -ln(rate); the float shadow used by shortest-path passes.
    pub weight: f64,
    /// Remaining depth of the head offer, in the pay currency.
    pub capacity: Amount,
    pub offer_owner: AccountId,
    pub offer_sequence: OfferSequence,
}

impl RateEdge {
    fn from_offer(offer: &Offer) -> RateEdge {
        let rate = offer.quality();
        RateEdge {
            weight: -rational_ln(&rate),
            rate,
            capacity: offer.taker_pays.clone(),
            offer_owner: offer.owner.clone(),
            offer_sequence: offer.sequence,
        }
    }
}

/// Best-offer graph at a specific ledger version.
#[derive(Debug, Clone, PartialEq)]
pub struct RateGraph {
    edges: BTreeMap<PairKey, RateEdge>,
    version: LedgerIndex,
}

impl RateGraph {
    pub fn empty(version: LedgerIndex) -> Self {
        RateGraph { edges: BTreeMap::new(), version }
    }

    /// Derives the whole graph from the current books.
    pub fn rebuild(books: &BookSet, version: LedgerIndex) -> Self {
        let edges = books
            .pairs()
            .filter_map(|pair| {
                books.best(pair).map(|o| (pair.clone(), RateEdge::from_offer(o)))
            })
            .collect();
        RateGraph { edges, version }
    }

    /// Advances one ledger using a close delta, touching only the pairs the
    /// delta names. Returns whether anything was reprocessed; `false` means
    /// no best offer changed, so every derived result from the previous
    /// version still stands.
    pub fn update(&mut self, delta: &BookDelta, books: &BookSet) -> Result<bool, GraphError> {
        let want = self.version + 1;
        if delta.ledger != want {
            return Err(GraphError::VersionGap { version: self.version, want, got: delta.ledger });
        }
        self.version = delta.ledger;
        if delta.best_changed.is_empty() {
            return Ok(false);
        }
        for pair in &delta.best_changed {
            match books.best(pair) {
                Some(offer) => {
                    self.edges.insert(pair.clone(), RateEdge::from_offer(offer));
                }
                None => {
                    self.edges.remove(pair);
                }
            }
        }
        Ok(true)
    }

    pub fn version(&self) -> LedgerIndex {
        self.version
    }

    pub fn edge(&self, pair: &PairKey) -> Option<&RateEdge> {
        self.edges.get(pair)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&PairKey, &RateEdge)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Currencies that appear as an endpoint of at least one edge.
    pub fn vertices(&self) -> BTreeSet<CurrencyId> {
        self.edges
            .keys()
            .flat_map(|p| [p.pay.clone(), p.get.clone()])
            .collect()
    }
}

/// ln of a positive rational, surviving magnitudes outside f64 range.
fn rational_ln(r: &BigRational) -> f64 {
    debug_assert!(r.is_positive());
    if let Some(f) = r.to_f64() {
        if f.is_finite() && f > 0.0 {
            return f.ln();
        }
    }
    big_ln(r.numer()) - big_ln(r.denom())
}

/// ln of a positive big integer via its leading digits.
fn big_ln(n: &BigInt) -> f64 {
    let s = n.to_string();
    let take = s.len().min(17);
    let lead: f64 = s[..take].parse().expect("decimal digits");
    lead.ln() + (s.len() - take) as f64 * std::f64::consts::LN_10
}
