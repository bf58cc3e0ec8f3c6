//! Fixture replay: feeds recorded ledger activity through the simulator
//! with the detection loop riding along.
//!
//! Fixtures are JSON lines, one event per line, each naming the ledger it
//! executes in. Per close the loop is: apply that ledger's events plus any
//! plan from the previous close, take the book delta, update the rate
//! graph (skipping detection entirely when no best offer moved), detect,
//! plan, and queue the plan for the next close. The run report is built
//! from ordered containers only, so serializing it twice from the same
//! fixtures yields identical bytes. Wall-clock numbers stay out of it.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::book::PairKey;
use crate::detect;
use crate::graph::{GraphError, RateGraph};
use crate::ledger::{Ledger, Transaction, TxOutcome};
use crate::strategy::{plan_cycle, serialize_issued, settle, Allowlist, Plan, PlanStatus, PnlRecord};
use crate::types::{
    render_rational, AccountId, Amount, CurrencyId, LedgerIndex, OfferSequence, SignedXrp,
};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: ledger index must be 1 or greater")]
    BadLedger { line: usize },
    #[error("graph fell out of step: {0}")]
    Version(#[from] GraphError),
    #[error("ledger {ledger}, event {index}: {code} under strict replay")]
    Strict { ledger: LedgerIndex, index: usize, code: String },
}

/// Payment flags on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WireFlag {
    Partial,
    NoDirect,
}

/// One transaction as fixtures spell it. Amounts are "VALUE CURRENCY",
/// path hops "PAY>GET".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum WireTx {
    Payment {
        from: AccountId,
        to: AccountId,
        deliver: Amount,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        send_max: Option<Amount>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        paths: Vec<PairKey>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        flags: Vec<WireFlag>,
    },
    OfferCreate {
        owner: AccountId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<OfferSequence>,
        taker_pays: Amount,
        taker_gets: Amount,
    },
    OfferCancel {
        owner: AccountId,
        sequence: OfferSequence,
    },
    TrustSet {
        account: AccountId,
        limit: Amount,
    },
}

impl From<WireTx> for Transaction {
    fn from(wire: WireTx) -> Transaction {
        match wire {
            WireTx::Payment { from, to, deliver, send_max, paths, flags } => {
                Transaction::Payment {
                    from,
                    to,
                    deliver,
                    send_max,
                    paths,
                    partial: flags.contains(&WireFlag::Partial),
                    no_direct: flags.contains(&WireFlag::NoDirect),
                }
            }
            WireTx::OfferCreate { owner, sequence, taker_pays, taker_gets } => {
                Transaction::OfferCreate { owner, sequence, taker_pays, taker_gets }
            }
            WireTx::OfferCancel { owner, sequence } => {
                Transaction::OfferCancel { owner, sequence }
            }
            WireTx::TrustSet { account, limit } => Transaction::TrustSet { account, limit },
        }
    }
}

/// A fixture line: the transaction and the ledger whose close applies it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub ledger: LedgerIndex,
    pub tx: WireTx,
}

/// Reads JSONL fixtures; blank lines are allowed, anything else must be a
/// whole event.
pub fn parse_fixtures<R: BufRead>(reader: R) -> Result<Vec<LedgerEvent>, ReplayError> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ReplayError::Parse { line: i + 1, msg: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let event: LedgerEvent = serde_json::from_str(&line)
            .map_err(|e| ReplayError::Parse { line: i + 1, msg: e.to_string() })?;
        if event.ledger == 0 {
            return Err(ReplayError::BadLedger { line: i + 1 });
        }
        events.push(event);
    }
    Ok(events)
}

#[derive(Debug, Clone)]
pub struct ReplayConfig {
    pub fee_drops: u64,
    pub allowlist: Allowlist,
    pub bot: AccountId,
    /// Abort when a fixture transaction fails to apply.
    pub strict: bool,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            fee_drops: 10,
            allowlist: Allowlist::All,
            bot: AccountId::new("BOT").expect("static id"),
            strict: false,
        }
    }
}

/// A found loop as the report prints it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpportunityNote {
    pub cycle: String,
    pub product: String,
}

/// One close, from the report's point of view.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerRow {
    pub ledger: LedgerIndex,
    /// Fixture transactions applied at this close.
    pub events: usize,
    /// Outcome tally of those transactions.
    pub codes: BTreeMap<String, usize>,
    /// Pairs whose best offer moved.
    pub changed: Vec<PairKey>,
    /// True when nothing moved and detection reused the prior answer.
    pub skipped: bool,
    pub opportunity: Option<OpportunityNote>,
    /// A plan was built and queued for the next close.
    pub planned: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub ledgers: LedgerIndex,
    pub events: usize,
    pub detections: usize,
    pub skips: usize,
    pub plans: usize,
    pub completed: usize,
    pub incomplete: usize,
    pub rejected: usize,
    /// Everything burned, fixture traffic included.
    pub fees_burned: Amount,
    pub bot_fees: Amount,
    pub bot_native: SignedXrp,
    #[serde(serialize_with = "serialize_issued")]
    pub bot_issued: BTreeMap<CurrencyId, num::rational::BigRational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub fee_drops: u64,
    pub ledgers: Vec<LedgerRow>,
    pub pnl: Vec<PnlRecord>,
    pub totals: Totals,
    /// Detection wall time; reported on request, never serialized.
    #[serde(skip)]
    pub detect_nanos: u128,
}

impl RunReport {
    /// Stable textual form; equal inputs give equal bytes.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Runs the full loop over parsed fixtures. Closes every ledger from 1 to
/// one past the last event so a plan hatched at the end still executes.
pub fn replay(events: Vec<LedgerEvent>, config: &ReplayConfig) -> Result<RunReport, ReplayError> {
    let mut by_ledger: BTreeMap<LedgerIndex, Vec<WireTx>> = BTreeMap::new();
    for event in events {
        by_ledger.entry(event.ledger).or_default().push(event.tx);
    }
    let last = by_ledger.keys().next_back().copied().unwrap_or(0) + 1;

    let mut ledger = Ledger::new(config.fee_drops);
    let mut graph = RateGraph::empty(0);
    let mut cached: Option<detect::Confirmed> = None;
    let mut pending: Option<Plan> = None;
    let mut rows = Vec::new();
    let mut pnl: Vec<PnlRecord> = Vec::new();
    let mut detect_nanos = 0u128;
    let mut detections = 0usize;
    let mut skips = 0usize;
    let mut plans = 0usize;
    let mut total_events = 0usize;

    for index in 1..=last {
        let batch = by_ledger.remove(&index).unwrap_or_default();
        let events_here = batch.len();
        total_events += events_here;
        for tx in batch {
            ledger.submit(tx.into());
        }
        let executing = pending.take();
        if let Some(plan) = &executing {
            ledger.submit(plan.payment.clone());
        }
        let result = ledger.close();

        let mut codes: BTreeMap<String, usize> = BTreeMap::new();
        for (i, outcome) in result.outcomes.iter().take(events_here).enumerate() {
            *codes.entry(outcome.code.to_string()).or_insert(0) += 1;
            if config.strict && !outcome.code.applied() {
                return Err(ReplayError::Strict {
                    ledger: index,
                    index: i + 1,
                    code: outcome.code.to_string(),
                });
            }
        }
        if let Some(plan) = executing {
            let outcome: &TxOutcome = result.outcomes.last().expect("plan was submitted");
            pnl.push(settle(&plan, index, outcome));
        }

        let changed: Vec<PairKey> = result.delta.best_changed.iter().cloned().collect();
        let moved = graph.update(&result.delta, ledger.books())?;
        let skipped = !moved;
        if skipped {
            skips += 1;
        } else {
            let started = Instant::now();
            cached = detect::detect(&graph);
            detect_nanos += started.elapsed().as_nanos();
        }
        if cached.is_some() {
            detections += 1;
        }
        let opportunity = cached.as_ref().map(|c| OpportunityNote {
            cycle: c.cycle.to_string(),
            product: render_rational(&c.product),
        });
        // The last close has no successor to execute in; detection is
        // still reported.
        let mut planned = false;
        if index < last {
            if let Some(confirmed) = &cached {
                if let Some(plan) =
                    plan_cycle(confirmed, &graph, &ledger, &config.bot, &config.allowlist)
                {
                    pending = Some(plan);
                    planned = true;
                    plans += 1;
                }
            }
        }
        rows.push(LedgerRow {
            ledger: index,
            events: events_here,
            codes,
            changed,
            skipped,
            opportunity,
            planned,
        });
    }

    let mut bot_native = SignedXrp::zero();
    let mut bot_fees = Amount::from_drops(0);
    let mut bot_issued: BTreeMap<CurrencyId, num::rational::BigRational> = BTreeMap::new();
    let (mut completed, mut incomplete, mut rejected) = (0, 0, 0);
    for record in &pnl {
        match record.status {
            PlanStatus::Completed => completed += 1,
            PlanStatus::Incomplete => incomplete += 1,
            PlanStatus::Rejected => rejected += 1,
        }
        bot_native += record.native.clone();
        bot_fees = bot_fees.checked_add(&record.fees_paid).expect("fees are native");
        for (currency, net) in &record.issued {
            use num::Zero;
            *bot_issued
                .entry(currency.clone())
                .or_insert_with(num::rational::BigRational::zero) += net;
        }
    }
    let totals = Totals {
        ledgers: last,
        events: total_events,
        detections,
        skips,
        plans,
        completed,
        incomplete,
        rejected,
        fees_burned: Amount::exact(ledger.total_burned().clone(), CurrencyId::Native),
        bot_fees,
        bot_native,
        bot_issued,
    };
    Ok(RunReport { fee_drops: config.fee_drops, ledgers: rows, pnl, totals, detect_nanos })
}
