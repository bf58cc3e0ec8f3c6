//! Arbitrage engine for an XRPL-style decentralized exchange.
//!
//! The pipeline: per-pair order books feed a currency graph whose edges are
//! the best offers, Bellman-Ford finds negative cycles (positive-gain loops),
//! exact rational arithmetic confirms and sizes each opportunity, and a
//! deterministic ledger simulator executes the resulting transaction plans.
//!
//! - [`types`]: currencies, accounts, exact amounts, result codes
//! - [`book`]: per-pair sorted offer lists with per-ledger change tracking
//! - [`graph`]: best-offer rate graph with incremental updates
//! - [`detect`]: Bellman-Ford cycle detection and opportunity evaluation
//! - [`ledger`]: the simulated ledger (accounts, trustlines, offer crossing,
//!   payments with flags, fee burning)
//! - [`strategy`]: turning opportunities into transaction plans and PnL
//! - [`replay`]: fixture parsing and the per-ledger detect-and-take loop
//! - [`scenario`]: seed-deterministic fixture generation

pub mod book;
pub mod detect;
pub mod graph;
pub mod ledger;
pub mod replay;
pub mod scenario;
pub mod strategy;
pub mod types;

pub use book::{BookDelta, BookSet, Offer, PairKey};
pub use detect::{Confirmed, Cycle, Opportunity};
pub use graph::RateGraph;
pub use ledger::{CloseResult, Ledger, Transaction, TxOutcome};
pub use replay::{parse_fixtures, replay, LedgerEvent, ReplayConfig, RunReport, WireTx};
pub use scenario::{generate, GenParams, Plant, Scenario};
pub use strategy::{Allowlist, Plan, PlanStatus, PnlRecord, RoundTripPlan, RoundTripRun};
pub use types::{AccountId, Amount, CurrencyCode, CurrencyId, LedgerIndex, SignedXrp, TxResultCode};
