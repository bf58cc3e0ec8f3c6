//! Per-pair order books with price-time priority and per-ledger tracking of
//! which best offers changed.
//!
//! A book is keyed by the directed pair (currency the taker pays, currency
//! the taker gets). Offers sort best-first by quality (taker gets per unit
//! taker pays, descending), then placement ledger, then sequence. Partial
//! fills are proportional, so a partially consumed offer keeps its quality
//! exactly.

// Error variants carry the offending pair and amounts for diagnostics;
// these paths are cold, the extra Result width is fine.
#![allow(clippy::result_large_err)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{AccountId, Amount, CurrencyId, LedgerIndex, OfferSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BookError {
    #[error("offer {owner}:{sequence} already exists")]
    DuplicateOffer { owner: AccountId, sequence: OfferSequence },
    #[error("offer pays and gets the same currency {0}")]
    SelfPair(CurrencyId),
    #[error("offer amounts must be positive")]
    NonPositive,
    #[error("no offers in book {0}")]
    EmptyBook(PairKey),
    #[error("fill exceeds the best offer: {0}")]
    FillExceedsHead(String),
    #[error("amount currency {amount} does not match book {pair}")]
    CurrencyMismatch { pair: PairKey, amount: CurrencyId },
}

/// Directed trading pair, from the taker's point of view: a taker holding
/// `pay` spends it into this book and receives `get`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PairKey {
    pub pay: CurrencyId,
    pub get: CurrencyId,
}

impl PairKey {
    pub fn new(pay: CurrencyId, get: CurrencyId) -> Self {
        PairKey { pay, get }
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.pay, self.get)
    }
}

impl std::str::FromStr for PairKey {
    type Err = crate::types::TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pay, get) = s.split_once('>').ok_or_else(|| {
            crate::types::TypeError::Currency(format!("pair {s:?} is not PAY>GET"))
        })?;
        Ok(PairKey::new(pay.parse()?, get.parse()?))
    }
}

impl TryFrom<String> for PairKey {
    type Error = crate::types::TypeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PairKey> for String {
    fn from(p: PairKey) -> String {
        p.to_string()
    }
}

/// A resting offer. `taker_pays` is what a taker must hand the owner,
/// `taker_gets` what the owner hands back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offer {
    pub owner: AccountId,
    pub sequence: OfferSequence,
    pub taker_pays: Amount,
    pub taker_gets: Amount,
    pub placed_at: LedgerIndex,
}

impl Offer {
    pub fn pair(&self) -> PairKey {
        PairKey::new(self.taker_pays.currency().clone(), self.taker_gets.currency().clone())
    }

    /// Taker gets per unit taker pays. Higher is better for the taker.
    pub fn quality(&self) -> BigRational {
        self.taker_gets.value() / self.taker_pays.value()
    }
}

/// Book priority: quality descending, then older placement, then lower
/// sequence, then owner. The final keys make the order total, since
/// (owner, sequence) is unique.
fn priority(a: &Offer, b: &Offer) -> Ordering {
    b.quality()
        .cmp(&a.quality())
        .then_with(|| a.placed_at.cmp(&b.placed_at))
        .then_with(|| a.sequence.cmp(&b.sequence))
        .then_with(|| a.owner.cmp(&b.owner))
}

/// Owner, sequence and remaining amounts of a best offer; the unit of
/// comparison for change tracking. A partial fill changes the amounts and
/// therefore counts as a change even though the offer identity is stable.
type HeadSnapshot = Option<(AccountId, OfferSequence, BigRational, BigRational)>;

/// One book side: offers sorted best-first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BookSide {
    offers: Vec<Offer>,
}

impl BookSide {
    pub fn best(&self) -> Option<&Offer> {
        self.offers.first()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Offer> {
        self.offers.iter()
    }

    pub fn len(&self) -> usize {
        self.offers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offers.is_empty()
    }

    fn head_snapshot(&self) -> HeadSnapshot {
        self.best().map(|o| {
            (
                o.owner.clone(),
                o.sequence,
                o.taker_pays.value().clone(),
                o.taker_gets.value().clone(),
            )
        })
    }

    fn insert(&mut self, offer: Offer) {
        let at = self.offers.partition_point(|held| priority(held, &offer) != Ordering::Greater);
        self.offers.insert(at, offer);
    }
}

/// Every book side, plus a global (owner, sequence) index and the set of
/// pairs whose best offer changed since the last [`BookSet::close_delta`].
#[derive(Debug, Clone, Default)]
pub struct BookSet {
    books: BTreeMap<PairKey, BookSide>,
    index: BTreeMap<(AccountId, OfferSequence), PairKey>,
    dirty: BTreeSet<PairKey>,
}

/// Pairs whose best offer changed while a ledger was open. "Changed" is
/// sticky within the ledger: a head that was replaced and later restored is
/// still reported, so consumers may re-derive an edge and find it equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookDelta {
    pub ledger: LedgerIndex,
    pub best_changed: BTreeSet<PairKey>,
}

impl BookSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn side(&self, pair: &PairKey) -> Option<&BookSide> {
        self.books.get(pair)
    }

    pub fn best(&self, pair: &PairKey) -> Option<&Offer> {
        self.books.get(pair).and_then(BookSide::best)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairKey> {
        self.books.keys().filter(|p| !self.books[p].is_empty())
    }

    pub fn get(&self, owner: &AccountId, sequence: OfferSequence) -> Option<&Offer> {
        let pair = self.index.get(&(owner.clone(), sequence))?;
        self.books
            .get(pair)?
            .iter()
            .find(|o| o.owner == *owner && o.sequence == sequence)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Adds an offer, enforcing positive amounts, distinct currencies and a
    /// globally unused (owner, sequence).
    pub fn insert(&mut self, offer: Offer) -> Result<(), BookError> {
        if offer.taker_pays.currency() == offer.taker_gets.currency() {
            return Err(BookError::SelfPair(offer.taker_pays.currency().clone()));
        }
        if offer.taker_pays.is_zero() || offer.taker_gets.is_zero() {
            return Err(BookError::NonPositive);
        }
        let key = (offer.owner.clone(), offer.sequence);
        if self.index.contains_key(&key) {
            return Err(BookError::DuplicateOffer { owner: key.0, sequence: key.1 });
        }
        let pair = offer.pair();
        self.index.insert(key, pair.clone());
        self.tracked(&pair, |side| side.insert(offer));
        Ok(())
    }

    /// Removes an offer if present; returns whether it existed.
    pub fn cancel(&mut self, owner: &AccountId, sequence: OfferSequence) -> bool {
        let Some(pair) = self.index.remove(&(owner.clone(), sequence)) else {
            return false;
        };
        self.tracked(&pair, |side| {
            side.offers
                .retain(|o| !(o.owner == *owner && o.sequence == sequence));
        });
        true
    }

    /// Shrinks the best offer by a fill. The fill must not exceed the head;
    /// the head is removed once either side reaches zero.
    pub fn reduce_best(
        &mut self,
        pair: &PairKey,
        pays_fill: &Amount,
        gets_fill: &Amount,
    ) -> Result<(), BookError> {
        if pays_fill.currency() != &pair.pay {
            return Err(BookError::CurrencyMismatch {
                pair: pair.clone(),
                amount: pays_fill.currency().clone(),
            });
        }
        if gets_fill.currency() != &pair.get {
            return Err(BookError::CurrencyMismatch {
                pair: pair.clone(),
                amount: gets_fill.currency().clone(),
            });
        }
        let head = self.best(pair).ok_or_else(|| BookError::EmptyBook(pair.clone()))?;
        if pays_fill.value() > head.taker_pays.value() || gets_fill.value() > head.taker_gets.value() {
            return Err(BookError::FillExceedsHead(format!(
                "fill {pays_fill} / {gets_fill} vs head {} / {}",
                head.taker_pays, head.taker_gets
            )));
        }
        let owner = head.owner.clone();
        let sequence = head.sequence;
        let mut exhausted = false;
        self.tracked(pair, |side| {
            let head = &mut side.offers[0];
            head.taker_pays = head.taker_pays.checked_sub(pays_fill).expect("checked above");
            head.taker_gets = head.taker_gets.checked_sub(gets_fill).expect("checked above");
            if head.taker_pays.is_zero() || head.taker_gets.is_zero() {
                side.offers.remove(0);
                exhausted = true;
            }
        });
        if exhausted {
            self.index.remove(&(owner, sequence));
        }
        Ok(())
    }

    /// Removes and returns the best offer.
    pub fn remove_best(&mut self, pair: &PairKey) -> Result<Offer, BookError> {
        if self.best(pair).is_none() {
            return Err(BookError::EmptyBook(pair.clone()));
        }
        let mut removed: Option<Offer> = None;
        self.tracked(pair, |side| {
            removed = Some(side.offers.remove(0));
        });
        let offer = removed.expect("head existed");
        self.index.remove(&(offer.owner.clone(), offer.sequence));
        Ok(offer)
    }

    /// Spends `spend` into the book, walking offers in priority order and
    /// partially filling the last one proportionally. Returns (spent,
    /// received); spent falls short of the request only when the book runs
    /// out of depth. Balance-unaware: every resting offer is taken at face
    /// value.
    pub fn consume(&mut self, pair: &PairKey, spend: &Amount) -> Result<(Amount, Amount), BookError> {
        if spend.currency() != &pair.pay {
            return Err(BookError::CurrencyMismatch {
                pair: pair.clone(),
                amount: spend.currency().clone(),
            });
        }
        let mut remaining = spend.value().clone();
        let mut spent = Amount::zero(pair.pay.clone());
        let mut received = Amount::zero(pair.get.clone());
        while !remaining.is_zero() {
            let Some(head) = self.best(pair) else { break };
            if head.taker_pays.value() <= &remaining {
                // Full fill.
                let pays = head.taker_pays.clone();
                let gets = head.taker_gets.clone();
                remaining -= pays.value();
                spent = spent.checked_add(&pays).expect("same currency");
                received = received.checked_add(&gets).expect("same currency");
                self.remove_best(pair)?;
            } else {
                // Proportional partial fill: quality is preserved exactly.
                let fraction = &remaining / head.taker_pays.value();
                let pays = Amount::exact(remaining.clone(), pair.pay.clone());
                let gets = head.taker_gets.mul_exact(&fraction);
                spent = spent.checked_add(&pays).expect("same currency");
                received = received.checked_add(&gets).expect("same currency");
                self.reduce_best(pair, &pays, &gets)?;
                remaining = BigRational::zero();
            }
        }
        Ok((spent, received))
    }

    /// Ends the change-tracking window: returns the pairs whose best offer
    /// changed since the previous close, tagged with the closing ledger.
    pub fn close_delta(&mut self, ledger: LedgerIndex) -> BookDelta {
        BookDelta { ledger, best_changed: std::mem::take(&mut self.dirty) }
    }

    /// Runs a mutation on one book side and marks the pair dirty when the
    /// head differs before and after.
    fn tracked(&mut self, pair: &PairKey, f: impl FnOnce(&mut BookSide)) {
        let side = self.books.entry(pair.clone()).or_default();
        let before = side.head_snapshot();
        f(side);
        if side.head_snapshot() != before {
            self.dirty.insert(pair.clone());
        }
    }
}
