//! Turns confirmed opportunities into transactions and accounts for what
//! actually happened.
//!
//! A detected cycle executes as one circular payment: the bot pays itself,
//! send_max in the start currency, across the cycle's books. Native cannot
//! be both ends of such a payment, so the cycle is rotated to start at an
//! issued currency the bot holds. The payment carries the partial-delivery
//! flag; its implied quality floor (deliver over send_max equals the cycle
//! product) means every fill clears at least the detected rate, so the
//! worst case is delivering nothing and losing only the fee.
//!
//! A native-to-native gain needs two transactions: the first converts
//! through the books and parks the proceeds with a second account as a
//! self-issued bridge token, the second redeems the bridge back. Aggregate
//! native gain over both accounts is x' - x minus two fees.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::book::PairKey;
use crate::detect::Confirmed;
use crate::graph::RateGraph;
use crate::ledger::{Ledger, Transaction, TxOutcome, GENESIS};
use crate::types::{
    render_rational, AccountId, Amount, CurrencyId, LedgerIndex, SignedXrp, TxResultCode,
    TypeError,
};

/// Issued currencies the bot may trade through. Native is always
/// permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Allowlist {
    All,
    Only(std::collections::BTreeSet<CurrencyId>),
}

impl Allowlist {
    /// One entry per line as `CODE ISSUER`; `#` starts a comment, blank
    /// lines are skipped.
    pub fn parse(text: &str) -> Result<Self, TypeError> {
        let mut set = std::collections::BTreeSet::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let code = parts.next().unwrap_or("");
            let issuer = parts.next().ok_or_else(|| {
                TypeError::Currency(format!("allowlist line needs CODE ISSUER: {line:?}"))
            })?;
            if parts.next().is_some() {
                return Err(TypeError::Currency(format!(
                    "allowlist line has trailing tokens: {line:?}"
                )));
            }
            set.insert(CurrencyId::issued(code, issuer)?);
        }
        Ok(Allowlist::Only(set))
    }

    pub fn permits(&self, currency: &CurrencyId) -> bool {
        match self {
            Allowlist::All => true,
            Allowlist::Only(set) => currency.is_native() || set.contains(currency),
        }
    }
}

/// An executable cycle trade: one circular payment plus the bookkeeping
/// needed to settle it afterwards.
#[derive(Debug, Clone)]
pub struct Plan {
    pub account: AccountId,
    pub payment: Transaction,
    /// Rotation start; also the currency spent and delivered.
    pub start: CurrencyId,
    pub spend: Amount,
    pub deliver: Amount,
    /// Exact cycle rate product; the payment's quality floor.
    pub product: BigRational,
    pub cycle: String,
    /// The close this plan is priced against; it must execute there.
    pub deadline: LedgerIndex,
}

/// Builds the circular payment for a confirmed cycle, or nothing when the
/// bot cannot trade it: a currency off the allowlist, no issued start the
/// bot holds, no sizing room, or no native left for the fee.
pub fn plan_cycle(
    confirmed: &Confirmed,
    graph: &RateGraph,
    ledger: &Ledger,
    bot: &AccountId,
    allowlist: &Allowlist,
) -> Option<Plan> {
    let cycle = &confirmed.cycle;
    if !cycle.currencies().iter().all(|c| allowlist.permits(c)) {
        return None;
    }
    if ledger.balance(bot, &CurrencyId::Native) < ledger.fee().value().clone() {
        return None;
    }
    // First issued currency, in cycle order, that the bot holds and can
    // receive more of.
    let start = cycle.currencies().into_iter().find(|c| {
        !c.is_native()
            && ledger.balance(bot, c).is_positive()
            && ledger.trustline(bot, c).is_some()
    })?;
    let rotated = cycle.rotate_to(&start)?;

    // Sizing oracle per leg: a spend of s at the start moves s * carried
    // through leg i, so the head depth caps s at capacity / carried.
    let mut carried = BigRational::one();
    let mut notional: Option<BigRational> = None;
    for pair in &rotated.edges {
        let edge = graph.edge(pair)?;
        let cap = edge.capacity.value() / &carried;
        notional = Some(match notional {
            Some(n) => n.min(cap),
            None => cap,
        });
        carried *= &edge.rate;
    }
    let product = carried;
    debug_assert_eq!(product, confirmed.product);
    let mut notional = notional?.min(ledger.balance(bot, &start));
    // The delivery lands on the bot's own line; keep the full round within
    // its limit even before the spent side frees up.
    let line = ledger.trustline(bot, &start)?;
    let headroom = (&line.limit - &line.balance).max(BigRational::zero());
    notional = notional.min(headroom / &product);
    if !notional.is_positive() {
        return None;
    }

    let spend = Amount::exact(notional.clone(), start.clone());
    let deliver = Amount::exact(&notional * &product, start.clone());
    let payment = Transaction::Payment {
        from: bot.clone(),
        to: bot.clone(),
        deliver: deliver.clone(),
        send_max: Some(spend.clone()),
        paths: rotated.edges.clone(),
        partial: true,
        no_direct: true,
    };
    Some(Plan {
        account: bot.clone(),
        payment,
        start,
        spend,
        deliver,
        product,
        cycle: rotated.to_string(),
        deadline: ledger.closed_index() + 1,
    })
}

/// The two-transaction native round trip. `first` converts `x` native
/// through the mid-currency books back to native and parks `x_prime` as
/// `bridge` (issued by `a`) with `b`; `second` redeems it. The bridge hop
/// crosses `a`'s own one-to-one offer, handed back in `setup` along with
/// `b`'s trustline.
#[derive(Debug, Clone)]
pub struct RoundTripPlan {
    pub setup: Vec<Transaction>,
    pub first: Transaction,
    pub second: Transaction,
    /// x' - x - 2 fees: what the pair of accounts nets if both legs apply.
    pub expected_gain: SignedXrp,
}

pub fn plan_round_trip(
    a: &AccountId,
    b: &AccountId,
    x: &Amount,
    x_prime: &Amount,
    mids: &[CurrencyId],
    bridge_code: &str,
    fee: &Amount,
) -> Option<RoundTripPlan> {
    if !x.currency().is_native() || !x_prime.currency().is_native() {
        return None;
    }
    // At least two distinct issued mids: a single mid would mean two
    // mutually opposite books, and overlapping ones cross at placement
    // rather than rest.
    let distinct: std::collections::BTreeSet<_> = mids.iter().collect();
    if mids.len() < 2 || distinct.len() != mids.len() || mids.iter().any(|m| m.is_native()) {
        return None;
    }
    // Two fees burn no matter what; anything not strictly above them is
    // not worth submitting.
    let cost = x.value() + fee.value() * BigRational::from_integer(2.into());
    if x_prime.value() <= &cost {
        return None;
    }
    let bridge = CurrencyId::issued(bridge_code, a.as_str()).ok()?;
    let bridged = Amount::exact(x_prime.value().clone(), bridge.clone());
    let setup = vec![
        Transaction::TrustSet { account: b.clone(), limit: bridged.clone() },
        Transaction::OfferCreate {
            owner: a.clone(),
            sequence: None,
            taker_pays: x_prime.clone(),
            taker_gets: bridged.clone(),
        },
    ];
    let mut paths = Vec::with_capacity(mids.len() + 2);
    let mut at = CurrencyId::Native;
    for mid in mids {
        paths.push(PairKey::new(at, mid.clone()));
        at = mid.clone();
    }
    paths.push(PairKey::new(at, CurrencyId::Native));
    paths.push(PairKey::new(CurrencyId::Native, bridge));
    let first = Transaction::Payment {
        from: a.clone(),
        to: b.clone(),
        deliver: bridged.clone(),
        send_max: Some(x.clone()),
        paths,
        partial: false,
        no_direct: true,
    };
    let second = Transaction::Payment {
        from: b.clone(),
        to: a.clone(),
        deliver: bridged,
        send_max: None,
        paths: vec![],
        partial: false,
        no_direct: false,
    };
    let expected_gain = SignedXrp::from_rational(x_prime.value() - cost);
    Some(RoundTripPlan { setup, first, second, expected_gain })
}

/// What [`run_round_trip`] measured.
#[derive(Debug, Clone)]
pub struct RoundTripRun {
    pub plan: RoundTripPlan,
    /// Native gained across both accounts over the two payment legs,
    /// setup fees excluded.
    pub gain: SignedXrp,
}

/// Builds a self-contained market where a native round trip of `x` in and
/// `x_prime` out is available through two mid-currency books, then plans
/// and executes both legs. The books are sized so the whole notional flows:
/// native to MID at two per one, MID to MD2 at par, MD2 back to native at
/// whatever closes the loop at exactly `x_prime / x`.
pub fn run_round_trip(
    x: &Amount,
    x_prime: &Amount,
    fee_drops: u64,
) -> Result<RoundTripRun, String> {
    if !x.currency().is_native() || !x_prime.currency().is_native() {
        return Err("both legs must be native amounts".into());
    }
    if x.is_zero() || x_prime.is_zero() {
        return Err("amounts must be positive".into());
    }
    let a = AccountId::new("A").expect("static id");
    let b = AccountId::new("B").expect("static id");
    let gw = AccountId::new("GW").expect("static id");
    let mid = CurrencyId::issued("MID", gw.as_str()).expect("static code");
    let md2 = CurrencyId::issued("MD2", gw.as_str()).expect("static code");

    let mut ledger = Ledger::new(fee_drops);
    let stake = Amount::exact(
        x.value() + x_prime.value() + BigRational::from_integer(1_000.into()),
        CurrencyId::Native,
    );
    for who in ["A", "B", "M1", "M2", "M3", "GW"] {
        ledger.submit(Transaction::Payment {
            from: AccountId::new(GENESIS).expect("static id"),
            to: AccountId::new(who).expect("static id"),
            deliver: stake.clone(),
            send_max: None,
            paths: vec![],
            partial: false,
            no_direct: false,
        });
    }
    ledger.close();

    let two = BigRational::from_integer(2.into());
    let ten = BigRational::from_integer(10.into());
    let m = Amount::exact(x.value() * &two, mid.clone());
    let m2 = Amount::exact(x.value() * &two, md2.clone());
    let roomy = |c: &CurrencyId| Amount::exact(x.value() * &ten, c.clone());
    let m1 = AccountId::new("M1").expect("static id");
    let m2a = AccountId::new("M2").expect("static id");
    let m3 = AccountId::new("M3").expect("static id");
    for (who, c) in [(&m1, &mid), (&m2a, &mid), (&m2a, &md2), (&m3, &md2)] {
        ledger.submit(Transaction::TrustSet { account: (*who).clone(), limit: roomy(c) });
    }
    for (who, amount) in [(&m1, &m), (&m2a, &m2)] {
        ledger.submit(Transaction::Payment {
            from: gw.clone(),
            to: (*who).clone(),
            deliver: amount.clone(),
            send_max: None,
            paths: vec![],
            partial: false,
            no_direct: false,
        });
    }
    ledger.close();

    for (owner, pays, gets) in [
        (&m1, x.clone(), m.clone()),
        (&m2a, m.clone(), m2.clone()),
        (&m3, m2.clone(), x_prime.clone()),
    ] {
        ledger.submit(Transaction::OfferCreate {
            owner: (*owner).clone(),
            sequence: None,
            taker_pays: pays,
            taker_gets: gets,
        });
    }
    let placed = ledger.close();
    if placed.outcomes.iter().any(|o| o.code != TxResultCode::Success) {
        return Err("market bootstrap failed".into());
    }

    let plan = plan_round_trip(&a, &b, x, x_prime, &[mid, md2], "BRD", ledger.fee())
        .ok_or("no gainful round trip at these amounts and fee")?;
    for tx in &plan.setup {
        ledger.submit(tx.clone());
    }
    let setup = ledger.close();
    if setup.outcomes.iter().any(|o| o.code != TxResultCode::Success) {
        return Err("round trip setup failed".into());
    }

    let before = ledger.balance(&a, &CurrencyId::Native) + ledger.balance(&b, &CurrencyId::Native);
    for (leg, tx) in [("first", &plan.first), ("second", &plan.second)] {
        ledger.submit(tx.clone());
        let closed = ledger.close();
        let code = closed.outcomes[0].code;
        if code != TxResultCode::Success {
            return Err(format!("{leg} leg failed: {code}"));
        }
    }
    ledger
        .check_conservation()
        .map_err(|e| format!("conservation broken: {e}"))?;
    let after = ledger.balance(&a, &CurrencyId::Native) + ledger.balance(&b, &CurrencyId::Native);
    let gain = SignedXrp::from_rational(after - before);
    Ok(RoundTripRun { plan, gain })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlanStatus {
    /// Delivered in full at or above the planned rate.
    Completed,
    /// Applied but delivered less than planned, possibly nothing; the
    /// quality floor limits the damage to the fee.
    Incomplete,
    /// The ledger refused it; only the fee moved.
    Rejected,
}

pub(crate) fn serialize_issued<S: Serializer>(
    map: &BTreeMap<CurrencyId, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut out = s.serialize_map(Some(map.len()))?;
    for (currency, value) in map {
        let text = if value.is_negative() {
            format!("-{}", render_rational(&-value.clone()))
        } else {
            render_rational(value)
        };
        out.serialize_entry(&currency.to_string(), &text)?;
    }
    out.end()
}

/// What one executed plan did to the bot's balances.
#[derive(Debug, Clone, Serialize)]
pub struct PnlRecord {
    pub ledger: LedgerIndex,
    pub cycle: String,
    pub status: PlanStatus,
    pub fees_paid: Amount,
    /// Net native movement including fees.
    pub native: SignedXrp,
    /// Net movement per issued currency.
    #[serde(serialize_with = "serialize_issued")]
    pub issued: BTreeMap<CurrencyId, BigRational>,
}

/// Reads the outcome of a cycle plan back into a profit record. The spend
/// is recovered from the first-hop fills; the bot's native only ever moves
/// by the fee.
pub fn settle(plan: &Plan, executed_in: LedgerIndex, outcome: &TxOutcome) -> PnlRecord {
    let fees = outcome.fee_charged.clone();
    let native = -SignedXrp::from_amount(&fees).expect("fee is native");
    let first_hop = plan
        .payment
        .paths()
        .first()
        .expect("cycle plans always carry paths")
        .clone();
    let mut issued = BTreeMap::new();
    let (status, net_start) = match (&outcome.code, &outcome.delivered) {
        (code, Some(delivered)) if code.applied() => {
            let spent: BigRational = outcome
                .offers_consumed
                .iter()
                .filter(|fill| fill.pair == first_hop)
                .map(|fill| fill.paid.value().clone())
                .sum();
            let status = if delivered == &plan.deliver {
                PlanStatus::Completed
            } else {
                PlanStatus::Incomplete
            };
            (status, delivered.value() - spent)
        }
        _ => (PlanStatus::Rejected, BigRational::zero()),
    };
    if !net_start.is_zero() {
        issued.insert(plan.start.clone(), net_start);
    }
    PnlRecord {
        ledger: executed_in,
        cycle: plan.cycle.clone(),
        status,
        fees_paid: fees,
        native,
        issued,
    }
}

impl Transaction {
    /// Path hops of a payment; empty for everything else.
    pub fn paths(&self) -> &[PairKey] {
        match self {
            Transaction::Payment { paths, .. } => paths,
            _ => &[],
        }
    }
}
