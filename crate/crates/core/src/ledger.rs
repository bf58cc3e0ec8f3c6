//! Deterministic ledger simulator: accounts, trustlines, offer crossing,
//! path payments and fee burning.
//!
//! Transactions queue into the open ledger and apply in submission order at
//! [`Ledger::close`]. The fee burns first; a transaction that cannot pay it
//! burns what the submitter has and does nothing else. Payment effects are
//! all-or-nothing unless partial delivery is flagged, and every balance
//! mutation flows through one transfer routine that also maintains the
//! per-currency outstanding totals the conservation check audits.
//!
//! Deliberate departures from full XRPL semantics, chosen to keep the model
//! small: no reserves, offers do not escrow funds, trust limits cap payment
//! receipt but not book fills, and accounts are created by any native
//! delivery.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::book::{BookDelta, BookSet, Offer, PairKey};
use crate::types::{
    AccountId, Amount, CurrencyId, LedgerIndex, OfferSequence, SignedXrp, TxResultCode,
    DROPS_PER_XRP,
};

/// The pre-funded root account.
pub const GENESIS: &str = "GENESIS";

/// Native units initially held by the genesis account.
pub const GENESIS_XRP: u64 = 100_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustLine {
    /// Units of the issuer's currency held. Never negative and never above
    /// what the issuer has outstanding.
    pub balance: BigRational,
    /// Receive ceiling for payments. Book fills may exceed it.
    pub limit: BigRational,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Account {
    xrp: BigRational,
    lines: BTreeMap<CurrencyId, TrustLine>,
}

/// A transaction as submitted. Structural validation happens at apply time
/// and surfaces as a [`TxResultCode`], not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum Transaction {
    /// Moves value. Without `paths` this is a same-currency transfer; with
    /// `paths` it is a conversion that crosses each hop's book in order,
    /// requires `send_max`, and never fills below the implied quality floor
    /// deliver / send_max.
    Payment {
        from: AccountId,
        to: AccountId,
        deliver: Amount,
        send_max: Option<Amount>,
        paths: Vec<PairKey>,
        /// Deliver as much as the books and limits allow, possibly nothing,
        /// and still succeed.
        partial: bool,
        /// Accepted for wire compatibility; conversions here never ripple
        /// through trustlines anyway.
        no_direct: bool,
    },
    OfferCreate {
        owner: AccountId,
        /// Assigned from the owner's counter when absent.
        sequence: Option<OfferSequence>,
        taker_pays: Amount,
        taker_gets: Amount,
    },
    OfferCancel { owner: AccountId, sequence: OfferSequence },
    /// Creates or resizes the account's line for `limit.currency()`.
    TrustSet { account: AccountId, limit: Amount },
}

impl Transaction {
    pub fn submitter(&self) -> &AccountId {
        match self {
            Transaction::Payment { from, .. } => from,
            Transaction::OfferCreate { owner, .. } => owner,
            Transaction::OfferCancel { owner, .. } => owner,
            Transaction::TrustSet { account, .. } => account,
        }
    }
}

/// One crossed maker offer: what the taker paid into it and received from
/// it. Amounts are the fill, not the offer's full size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsumedOffer {
    pub pair: PairKey,
    pub owner: AccountId,
    pub sequence: OfferSequence,
    pub paid: Amount,
    pub received: Amount,
}

/// Terminal record of one applied transaction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxOutcome {
    pub code: TxResultCode,
    /// What actually reached the destination; payments only.
    pub delivered: Option<Amount>,
    pub fee_charged: Amount,
    pub offers_consumed: Vec<ConsumedOffer>,
}

impl TxOutcome {
    fn failed(code: TxResultCode, fee_charged: Amount) -> Self {
        TxOutcome { code, delivered: None, fee_charged, offers_consumed: Vec::new() }
    }
}

/// Everything a closed ledger reports.
#[derive(Debug, Clone)]
pub struct CloseResult {
    pub index: LedgerIndex,
    /// Outcomes in submission order.
    pub outcomes: Vec<TxOutcome>,
    pub delta: BookDelta,
}

#[derive(Debug, Clone)]
pub struct Ledger {
    fee: Amount,
    closed: LedgerIndex,
    accounts: BTreeMap<AccountId, Account>,
    /// Outstanding total per issued currency, maintained independently of
    /// the line balances so conservation is a real cross-check.
    issued: BTreeMap<CurrencyId, BigRational>,
    books: BookSet,
    queue: Vec<Transaction>,
    next_seq: BTreeMap<AccountId, OfferSequence>,
    burned: BigRational,
}

impl Ledger {
    pub fn new(fee_drops: u64) -> Self {
        let mut accounts = BTreeMap::new();
        accounts.insert(
            AccountId::new(GENESIS).expect("static id"),
            Account {
                xrp: BigRational::from_integer(GENESIS_XRP.into()),
                lines: BTreeMap::new(),
            },
        );
        Ledger {
            fee: Amount::from_drops(fee_drops),
            closed: 0,
            accounts,
            issued: BTreeMap::new(),
            books: BookSet::new(),
            queue: Vec::new(),
            next_seq: BTreeMap::new(),
            burned: BigRational::zero(),
        }
    }

    pub fn fee(&self) -> &Amount {
        &self.fee
    }

    pub fn closed_index(&self) -> LedgerIndex {
        self.closed
    }

    pub fn books(&self) -> &BookSet {
        &self.books
    }

    pub fn account_exists(&self, account: &AccountId) -> bool {
        self.accounts.contains_key(account)
    }

    /// Native or line balance; zero when the account or line is absent.
    pub fn balance(&self, account: &AccountId, currency: &CurrencyId) -> BigRational {
        let Some(acct) = self.accounts.get(account) else {
            return BigRational::zero();
        };
        match currency {
            CurrencyId::Native => acct.xrp.clone(),
            c => acct.lines.get(c).map(|l| l.balance.clone()).unwrap_or_else(BigRational::zero),
        }
    }

    pub fn trustline(&self, account: &AccountId, currency: &CurrencyId) -> Option<&TrustLine> {
        self.accounts.get(account)?.lines.get(currency)
    }

    pub fn total_burned(&self) -> &BigRational {
        &self.burned
    }

    /// Queues a transaction into the open ledger.
    pub fn submit(&mut self, tx: Transaction) {
        self.queue.push(tx);
    }

    /// Applies the queue in order, stamps the new ledger index, and hands
    /// back the outcomes plus the book delta for this window.
    pub fn close(&mut self) -> CloseResult {
        let index = self.closed + 1;
        let queue = std::mem::take(&mut self.queue);
        let mut outcomes = Vec::with_capacity(queue.len());
        for tx in queue {
            outcomes.push(self.apply(tx, index));
        }
        let delta = self.books.close_delta(index);
        self.closed = index;
        CloseResult { index, outcomes, delta }
    }

    fn apply(&mut self, tx: Transaction, index: LedgerIndex) -> TxOutcome {
        let submitter = tx.submitter().clone();
        let Some(acct) = self.accounts.get_mut(&submitter) else {
            // Nobody exists to charge: reject outright.
            return TxOutcome::failed(TxResultCode::MalformedTx, Amount::from_drops(0));
        };
        // Fee burns first and is kept on every failure path.
        let due = self.fee.value().clone();
        let paid = acct.xrp.clone().min(due.clone());
        acct.xrp -= &paid;
        self.burned += &paid;
        let fee_charged = Amount::exact(paid.clone(), CurrencyId::Native);
        if paid < due {
            return TxOutcome::failed(TxResultCode::InsufficientFee, fee_charged);
        }

        match tx {
            Transaction::Payment { from, to, deliver, send_max, paths, partial, .. } => {
                if paths.is_empty() {
                    self.apply_direct_payment(from, to, deliver, partial, fee_charged)
                } else {
                    self.apply_path_payment(from, to, deliver, send_max, paths, partial, fee_charged)
                }
            }
            Transaction::OfferCreate { owner, sequence, taker_pays, taker_gets } => {
                self.apply_offer_create(owner, sequence, taker_pays, taker_gets, index, fee_charged)
            }
            Transaction::OfferCancel { owner, sequence } => {
                let code = if self.books.cancel(&owner, sequence) {
                    TxResultCode::Success
                } else {
                    // Cancelling nothing is harmless and still final.
                    TxResultCode::NoSuchOffer
                };
                TxOutcome { code, delivered: None, fee_charged, offers_consumed: Vec::new() }
            }
            Transaction::TrustSet { account, limit } => {
                let code = self.apply_trust_set(&account, &limit);
                TxOutcome { code, delivered: None, fee_charged, offers_consumed: Vec::new() }
            }
        }
    }

    fn apply_trust_set(&mut self, account: &AccountId, limit: &Amount) -> TxResultCode {
        let currency = limit.currency().clone();
        let CurrencyId::Issued { ref issuer, .. } = currency else {
            return TxResultCode::MalformedTx;
        };
        if issuer == account {
            return TxResultCode::MalformedTx;
        }
        let acct = self.accounts.get_mut(account).expect("fee was charged");
        acct.lines
            .entry(currency)
            .and_modify(|line| line.limit = limit.value().clone())
            .or_insert_with(|| TrustLine { balance: BigRational::zero(), limit: limit.value().clone() });
        TxResultCode::Success
    }

    /// Whether the account may hold a balance in the currency at all.
    fn can_hold(&self, account: &AccountId, currency: &CurrencyId) -> bool {
        match currency {
            CurrencyId::Native => true,
            CurrencyId::Issued { issuer, .. } => {
                issuer == account
                    || self
                        .accounts
                        .get(account)
                        .is_some_and(|a| a.lines.contains_key(currency))
            }
        }
    }

    /// Spendable balance; `None` means unlimited (an issuer spending its own
    /// currency issues more).
    fn available(&self, account: &AccountId, currency: &CurrencyId) -> Option<BigRational> {
        match currency {
            CurrencyId::Native => Some(self.balance(account, currency)),
            CurrencyId::Issued { issuer, .. } if issuer == account => None,
            _ => Some(self.balance(account, currency)),
        }
    }

    /// Payment-receive headroom; `None` means unlimited (native, or the
    /// issuer redeeming).
    fn receive_capacity(&self, account: &AccountId, currency: &CurrencyId) -> Option<BigRational> {
        match currency {
            CurrencyId::Native => None,
            CurrencyId::Issued { issuer, .. } if issuer == account => None,
            c => {
                let line = self.trustline(account, c);
                Some(match line {
                    Some(l) => (&l.limit - &l.balance).max(BigRational::zero()),
                    None => BigRational::zero(),
                })
            }
        }
    }

    /// Moves value between accounts, issuing or redeeming when an issuer is
    /// an endpoint and keeping the outstanding totals current. Callers have
    /// already established funding and the destination's right to hold.
    fn transfer(&mut self, from: &AccountId, to: &AccountId, currency: &CurrencyId, value: &BigRational) {
        if value.is_zero() {
            return;
        }
        debug_assert!(value.is_positive());
        match currency {
            CurrencyId::Native => {
                let src = self.accounts.get_mut(from).expect("funded source");
                debug_assert!(src.xrp >= *value, "native overdraft by {from}");
                src.xrp -= value;
                self.accounts.entry(to.clone()).or_default().xrp += value;
            }
            CurrencyId::Issued { issuer, .. } => {
                if from == issuer {
                    *self.issued.entry(currency.clone()).or_insert_with(BigRational::zero) += value;
                } else {
                    let line = self
                        .accounts
                        .get_mut(from)
                        .and_then(|a| a.lines.get_mut(currency))
                        .expect("source line exists");
                    debug_assert!(line.balance >= *value, "line overdraft by {from}");
                    line.balance -= value;
                }
                if to == issuer {
                    let outstanding = self
                        .issued
                        .get_mut(currency)
                        .expect("redemption implies prior issuance");
                    *outstanding -= value;
                } else {
                    let line = self
                        .accounts
                        .get_mut(to)
                        .and_then(|a| a.lines.get_mut(currency))
                        .expect("destination line exists");
                    line.balance += value;
                }
            }
        }
    }

    fn apply_direct_payment(
        &mut self,
        from: AccountId,
        to: AccountId,
        deliver: Amount,
        partial: bool,
        fee_charged: Amount,
    ) -> TxOutcome {
        if deliver.is_zero() || from == to {
            return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
        }
        let currency = deliver.currency().clone();
        if !currency.is_native() && !self.can_hold(&to, &currency) {
            return TxOutcome::failed(TxResultCode::PathDry, fee_charged);
        }
        let sendable = self
            .available(&from, &currency)
            .unwrap_or_else(|| deliver.value().clone());
        let headroom = self
            .receive_capacity(&to, &currency)
            .unwrap_or_else(|| deliver.value().clone());
        let deliverable = deliver.value().clone().min(sendable).min(headroom);

        if &deliverable < deliver.value() && !partial {
            let code = if currency.is_native() {
                TxResultCode::Unfunded
            } else if deliverable.is_zero() {
                TxResultCode::PathDry
            } else {
                TxResultCode::PartialityNotAllowed
            };
            return TxOutcome::failed(code, fee_charged);
        }
        self.transfer(&from, &to, &currency, &deliverable);
        TxOutcome {
            code: TxResultCode::Success,
            delivered: Some(Amount::exact(deliverable, currency)),
            fee_charged,
            offers_consumed: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_path_payment(
        &mut self,
        from: AccountId,
        to: AccountId,
        deliver: Amount,
        send_max: Option<Amount>,
        paths: Vec<PairKey>,
        partial: bool,
        fee_charged: Amount,
    ) -> TxOutcome {
        let Some(send_max) = send_max else {
            return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
        };
        // Structural checks: the hops must chain from the spend currency to
        // the deliver currency, no book may appear twice (its head would be
        // scanned once but filled twice), and a native-to-native conversion
        // is not a payment shape this ledger accepts. Revisiting a currency
        // is fine; the round trip through native depends on it.
        let mut seen: BTreeSet<&PairKey> = BTreeSet::new();
        let chained = paths.first().map(|p| p.pay == *send_max.currency()).unwrap_or(false)
            && paths.last().map(|p| p.get == *deliver.currency()).unwrap_or(false)
            && paths.windows(2).all(|w| w[0].get == w[1].pay)
            && paths.iter().all(|p| p.pay != p.get && seen.insert(p));
        if !chained
            || deliver.is_zero()
            || send_max.is_zero()
            || (send_max.currency().is_native() && deliver.currency().is_native())
        {
            return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
        }
        if !self.can_hold(&to, deliver.currency()) {
            return TxOutcome::failed(TxResultCode::PathDry, fee_charged);
        }

        // Worst acceptable deal over the whole conversion.
        let required_quality = deliver.value() / send_max.value();

        // Fills run against live state but must be retractable: snapshot
        // first, commit by keeping, roll back by restoring.
        let snapshot = (self.accounts.clone(), self.books.clone(), self.issued.clone());

        let mut spent = BigRational::zero();
        let mut delivered = BigRational::zero();
        let mut consumed: Vec<ConsumedOffer> = Vec::new();

        'fills: while &delivered < deliver.value() && &spent < send_max.value() {
            // Scan pass: composite rate, per-hop depth, and what each maker
            // would pay out per unit spent. A maker serving several hops in
            // the same currency must fund them jointly.
            let mut qualities = Vec::with_capacity(paths.len());
            let mut carried = BigRational::one();
            let mut spend_cap: Option<BigRational> = None;
            let mut payouts: BTreeMap<(AccountId, CurrencyId), BigRational> = BTreeMap::new();
            for pair in &paths {
                let Some(head) = self.books.best(pair) else { break 'fills };
                if self
                    .available(&head.owner, &pair.get)
                    .is_some_and(|f| f.is_zero())
                {
                    // A husk: its owner cannot pay out anything. Drop it and
                    // rescan the path.
                    let owner = head.owner.clone();
                    let sequence = head.sequence;
                    self.books.cancel(&owner, sequence);
                    continue 'fills;
                }
                let quality = head.quality();
                let cap_here = head.taker_pays.value() / &carried;
                spend_cap = Some(match spend_cap {
                    Some(c) => c.min(cap_here),
                    None => cap_here,
                });
                if !matches!(&pair.get, CurrencyId::Issued { issuer, .. } if issuer == &head.owner)
                {
                    let per_unit = &carried * &quality;
                    *payouts
                        .entry((head.owner.clone(), pair.get.clone()))
                        .or_insert_with(BigRational::zero) += per_unit;
                }
                carried *= &quality;
                qualities.push(quality);
            }
            let total_quality = carried;
            if total_quality < required_quality {
                break;
            }

            // The source's own spend counts against the same funding pool
            // as any payouts it owes as a maker along the way.
            if !matches!(send_max.currency(), CurrencyId::Issued { issuer, .. } if issuer == &from)
            {
                *payouts
                    .entry((from.clone(), send_max.currency().clone()))
                    .or_insert_with(BigRational::zero) += BigRational::one();
            }
            let mut cap = spend_cap.expect("paths verified non-empty");
            for ((owner, currency), per_unit) in &payouts {
                cap = cap.min(self.balance(owner, currency) / per_unit);
            }
            cap = cap.min(send_max.value() - &spent);
            cap = cap.min((deliver.value() - &delivered) / &total_quality);
            if let Some(headroom) = self.receive_capacity(&to, deliver.currency()) {
                // Live headroom: earlier fills already count against it.
                cap = cap.min(headroom / &total_quality);
            }
            if !cap.is_positive() {
                break;
            }

            // Push the fill through the chain: the source pays the first
            // maker, each maker pays the next, the last maker pays the
            // destination.
            let mut amount = cap.clone();
            let mut payer = from.clone();
            for (pair, quality) in paths.iter().zip(&qualities) {
                let head = self.books.best(pair).expect("scanned above");
                let owner = head.owner.clone();
                let sequence = head.sequence;
                let received = &amount * quality;
                self.transfer(&payer, &owner, &pair.pay, &amount);
                self.books
                    .reduce_best(
                        pair,
                        &Amount::exact(amount.clone(), pair.pay.clone()),
                        &Amount::exact(received.clone(), pair.get.clone()),
                    )
                    .expect("fill within scanned depth");
                consumed.push(ConsumedOffer {
                    pair: pair.clone(),
                    owner: owner.clone(),
                    sequence,
                    paid: Amount::exact(amount.clone(), pair.pay.clone()),
                    received: Amount::exact(received.clone(), pair.get.clone()),
                });
                payer = owner;
                amount = received;
            }
            self.transfer(&payer, &to, deliver.currency(), &amount);
            spent += cap;
            delivered += amount;
        }

        if &delivered < deliver.value() && !partial {
            let (accounts, books, issued) = snapshot;
            self.accounts = accounts;
            self.books = books;
            self.issued = issued;
            let code = if delivered.is_zero() {
                TxResultCode::PathDry
            } else {
                TxResultCode::PartialityNotAllowed
            };
            return TxOutcome::failed(code, fee_charged);
        }
        TxOutcome {
            code: TxResultCode::Success,
            delivered: Some(Amount::exact(delivered, deliver.currency().clone())),
            fee_charged,
            offers_consumed: consumed,
        }
    }

    fn apply_offer_create(
        &mut self,
        owner: AccountId,
        sequence: Option<OfferSequence>,
        taker_pays: Amount,
        taker_gets: Amount,
        index: LedgerIndex,
        fee_charged: Amount,
    ) -> TxOutcome {
        if taker_pays.is_zero()
            || taker_gets.is_zero()
            || taker_pays.currency() == taker_gets.currency()
        {
            return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
        }
        // The owner must be entitled to receive what the offer buys...
        if !self.can_hold(&owner, taker_pays.currency()) {
            return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
        }
        // ...and must hold at least something of what it sells.
        let funded = match self.available(&owner, taker_gets.currency()) {
            None => true,
            Some(balance) => balance.is_positive(),
        };
        if !funded {
            return TxOutcome::failed(TxResultCode::Unfunded, fee_charged);
        }
        let sequence = match sequence {
            Some(s) => {
                if self.books.get(&owner, s).is_some() {
                    return TxOutcome::failed(TxResultCode::MalformedTx, fee_charged);
                }
                let next = self.next_seq.entry(owner.clone()).or_insert(1);
                *next = (*next).max(s + 1);
                s
            }
            None => {
                let next = self.next_seq.entry(owner.clone()).or_insert(1);
                let s = *next;
                *next += 1;
                s
            }
        };

        // Cross the opposite book while it offers at least the price this
        // offer names. Fills happen at each maker's own quality.
        let opposite = PairKey::new(taker_gets.currency().clone(), taker_pays.currency().clone());
        let limit_quality = taker_pays.value() / taker_gets.value();
        let mut budget = taker_gets.value().clone(); // spendable, in gets currency
        let mut wanted = taker_pays.value().clone(); // to acquire, in pays currency
        let mut consumed = Vec::new();

        while budget.is_positive() && wanted.is_positive() {
            let Some(head) = self.books.best(&opposite) else { break };
            let quality = head.quality();
            if quality < limit_quality {
                break;
            }
            let head_owner = head.owner.clone();
            let head_seq = head.sequence;
            let funding = self.available(&head_owner, &opposite.get);
            let eff_gets = match funding {
                Some(f) => f.min(head.taker_gets.value().clone()),
                None => head.taker_gets.value().clone(),
            };
            if eff_gets.is_zero() {
                self.books.cancel(&head_owner, head_seq);
                continue;
            }
            let eff_pays = &eff_gets / &quality;
            let own_funds = self
                .available(&owner, taker_gets.currency())
                .unwrap_or_else(|| budget.clone());
            // Spend no more than acquires the rest of taker_pays.
            let spend = budget.clone().min(own_funds).min(eff_pays).min(&wanted / &quality);
            if !spend.is_positive() {
                break;
            }
            let received = &spend * &quality;
            self.transfer(&owner, &head_owner, &opposite.pay, &spend);
            self.transfer(&head_owner, &owner, &opposite.get, &received);
            self.books
                .reduce_best(
                    &opposite,
                    &Amount::exact(spend.clone(), opposite.pay.clone()),
                    &Amount::exact(received.clone(), opposite.get.clone()),
                )
                .expect("fill within head");
            consumed.push(ConsumedOffer {
                pair: opposite.clone(),
                owner: head_owner,
                sequence: head_seq,
                paid: Amount::exact(spend.clone(), opposite.pay.clone()),
                received: Amount::exact(received.clone(), opposite.get.clone()),
            });
            budget -= &spend;
            wanted -= &received;
        }

        // Rest whatever was neither filled nor satisfied.
        if budget.is_positive() && wanted.is_positive() {
            self.books
                .insert(Offer {
                    owner,
                    sequence,
                    taker_pays: Amount::exact(wanted, taker_pays.currency().clone()),
                    taker_gets: Amount::exact(budget, taker_gets.currency().clone()),
                    placed_at: index,
                })
                .expect("sequence checked unused");
        }
        TxOutcome {
            code: TxResultCode::Success,
            delivered: None,
            fee_charged,
            offers_consumed: consumed,
        }
    }

    /// Exact audit of the two conservation laws: every issued currency's
    /// line balances sum to its outstanding total, and all native value plus
    /// burned fees equals the genesis endowment.
    pub fn check_conservation(&self) -> Result<(), String> {
        let mut line_totals: BTreeMap<&CurrencyId, BigRational> = BTreeMap::new();
        for acct in self.accounts.values() {
            for (currency, line) in &acct.lines {
                if line.balance.is_negative() {
                    return Err(format!("negative line balance in {currency}"));
                }
                *line_totals.entry(currency).or_insert_with(BigRational::zero) += &line.balance;
            }
        }
        for (currency, outstanding) in &self.issued {
            let held = line_totals.remove(currency).unwrap_or_else(BigRational::zero);
            if &held != outstanding {
                return Err(format!(
                    "{currency}: lines hold {held} but outstanding is {outstanding}"
                ));
            }
        }
        if let Some((currency, held)) = line_totals.iter().find(|(_, v)| !v.is_zero()) {
            return Err(format!("{currency}: lines hold {held} with no issuance"));
        }
        let native: BigRational = self.accounts.values().map(|a| a.xrp.clone()).sum();
        let endowment = BigRational::from_integer(GENESIS_XRP.into());
        if &native + &self.burned != endowment {
            return Err(format!(
                "native {} + burned {} != endowment {}",
                native, self.burned, endowment
            ));
        }
        Ok(())
    }

    /// Signed native balance move of an account between two observations;
    /// convenience for profit accounting.
    pub fn native_delta(before: &BigRational, after: &BigRational) -> SignedXrp {
        SignedXrp::from_rational(after - before)
    }
}

/// Drops-to-native helper for fee math in callers.
pub fn drops(n: u64) -> BigRational {
    BigRational::new(n.into(), DROPS_PER_XRP.into())
}
