//! Seed-deterministic fixture generation.
//!
//! Random offers follow a potential discipline: every currency carries a
//! price, and an offer paying `v` of `a` for `w` of `b` only enters the
//! fixture when `w * p_b <= v * p_a * d` for a discount `d < 1`. Any loop
//! through such offers multiplies to less than one, so the background
//! market is arbitrage-free by construction, and no two random offers can
//! cross at placement for the same reason.
//!
//! A planted cycle runs through its own currencies (native plus `P...`
//! issues), touching no random book. Its offers land in one ledger with
//! chain-aligned depths, so the whole notional flows through, and the
//! bootstrap gives the taker inventory and line headroom to take it all.

use num::rational::BigRational;
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ledger::GENESIS;
use crate::replay::{LedgerEvent, WireTx};
use crate::types::{render_rational, Amount, CurrencyId, LedgerIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    /// Exact loop product; must exceed one.
    pub product: BigRational,
    /// Edge count; at least three, or the loop's own offers would sit in
    /// mutually opposite books and cross at placement.
    pub length: usize,
}

impl Plant {
    /// Reads a product given as a fraction (`11/10`) or a decimal (`1.1`)
    /// plus an edge count. Range checks happen in [`generate`].
    pub fn parse(product: &str, length: &str) -> Result<Plant, String> {
        let product = if let Some((n, d)) = product.split_once('/') {
            let n: num::BigInt = n.trim().parse().map_err(|_| format!("bad numerator {n:?}"))?;
            let d: num::BigInt = d.trim().parse().map_err(|_| format!("bad denominator {d:?}"))?;
            if d == num::BigInt::from(0) {
                return Err("zero denominator".into());
            }
            BigRational::new(n, d)
        } else {
            crate::types::parse_decimal(product.trim()).map_err(|e| e.to_string())?.0
        };
        let length: usize = length.trim().parse().map_err(|_| format!("bad length {length:?}"))?;
        Ok(Plant { product, length })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    /// Background pool size (native joins it for free).
    pub currencies: usize,
    /// Background offers to place.
    pub offers: usize,
    /// Ledgers of offer activity after the two bootstrap ledgers.
    pub ledgers: LedgerIndex,
    pub plant: Option<Plant>,
}

/// What the generator knows the fixture contains.
#[derive(Debug, Clone, Serialize)]
pub struct Truth {
    pub seed: u64,
    pub currencies: usize,
    pub offers: usize,
    pub ledgers: LedgerIndex,
    pub planted: Option<PlantTruth>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlantTruth {
    /// Canonical display form, as detection will report it.
    pub cycle: String,
    pub product: String,
    /// The close at which the loop goes live.
    pub ledger: LedgerIndex,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub events: Vec<LedgerEvent>,
    pub truth: Truth,
}

impl Scenario {
    /// The JSONL body `parse_fixtures` reads back.
    pub fn render_events(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}

const RANDOM_MAKERS: usize = 6;
const IOU_SEED: u64 = 1_000_000;
const MAKER_XRP: u64 = 50_000;

fn code(prefix: char, i: usize) -> String {
    format!("{prefix}{i:03}")
}

fn pay(from: &str, to: &str, amount: Amount) -> WireTx {
    WireTx::Payment {
        from: from.parse().expect("static id"),
        to: to.parse().expect("static id"),
        deliver: amount,
        send_max: None,
        paths: vec![],
        flags: vec![],
    }
}

fn trust(account: &str, limit: Amount) -> WireTx {
    WireTx::TrustSet { account: account.parse().expect("static id"), limit }
}

fn offer(owner: &str, pays: Amount, gets: Amount) -> WireTx {
    WireTx::OfferCreate {
        owner: owner.parse().expect("static id"),
        sequence: None,
        taker_pays: pays,
        taker_gets: gets,
    }
}

fn whole(n: u64, currency: CurrencyId) -> Amount {
    Amount::exact(BigRational::from_integer(n.into()), currency)
}

pub fn generate(params: &GenParams) -> Result<Scenario, String> {
    if params.currencies == 0 || params.currencies > 999 {
        return Err("currencies must be in 1..=999".into());
    }
    if params.ledgers == 0 {
        return Err("at least one activity ledger is needed".into());
    }
    if let Some(plant) = &params.plant {
        if plant.product <= BigRational::one() {
            return Err("planted product must exceed 1".into());
        }
        if !(3..=99).contains(&plant.length) {
            return Err("planted length must be in 3..=99".into());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gw = "GW";
    let makers: Vec<String> = (1..=RANDOM_MAKERS).map(|i| format!("m{i}")).collect();
    let pool: Vec<CurrencyId> = (1..=params.currencies)
        .map(|i| CurrencyId::issued(&code('C', i), gw).expect("generated code"))
        .collect();
    // Tradables include native; prices are the no-arbitrage potential.
    let mut tradables = vec![CurrencyId::Native];
    tradables.extend(pool.iter().cloned());
    let prices: Vec<u64> = tradables.iter().map(|_| rng.gen_range(1..=999)).collect();

    let mut events = Vec::new();
    let at = |ledger: LedgerIndex, tx: WireTx| LedgerEvent { ledger, tx };

    // Ledger 1: native funding.
    events.push(at(1, pay(GENESIS, gw, whole(10_000, CurrencyId::Native))));
    for maker in &makers {
        events.push(at(1, pay(GENESIS, maker, whole(MAKER_XRP, CurrencyId::Native))));
    }
    events.push(at(1, pay(GENESIS, "BOT", whole(1_000, CurrencyId::Native))));

    // Ledger 2: every maker can hold and sell every pool currency.
    for maker in &makers {
        for currency in &pool {
            events.push(at(2, trust(maker, whole(10 * IOU_SEED, currency.clone()))));
            events.push(at(2, pay(gw, maker, whole(IOU_SEED, currency.clone()))));
        }
    }

    // Background offers: never profitable to loop through, by potential.
    let first_activity: LedgerIndex = 3;
    let last_activity: LedgerIndex = 2 + params.ledgers;
    let mut placed = 0usize;
    while placed < params.offers {
        let ai = rng.gen_range(0..tradables.len());
        let bi = rng.gen_range(0..tradables.len());
        if ai == bi {
            continue;
        }
        let v: u64 = rng.gen_range(1..=500);
        // Discount in [0.90, 0.99]: strictly value-losing.
        let d_pct: u64 = rng.gen_range(90..=99);
        // w <= v * (p_a / p_b) * d, taken as the floor.
        let w = (v * prices[ai] * d_pct) / (prices[bi] * 100);
        if !(1..=5_000).contains(&w) {
            continue;
        }
        let ledger = rng.gen_range(first_activity..=last_activity);
        let maker = &makers[rng.gen_range(0..makers.len())];
        events.push(at(
            ledger,
            offer(
                maker,
                whole(v, tradables[ai].clone()),
                whole(w, tradables[bi].clone()),
            ),
        ));
        placed += 1;
    }
    // Heartbeat pins the activity span even when no offer drew the last
    // ledger.
    events.push(at(last_activity, pay(GENESIS, gw, whole(1, CurrencyId::Native))));

    // The plant: its own currencies, its own makers, one ledger.
    let planted = params.plant.as_ref().map(|plant| {
        let n = plant.product.numer().clone();
        let d = plant.product.denom().clone();
        // Leg amounts a_0 .. a_len with a_0 = 100 d native, doubling into
        // the first issue, flat through the middle, and closing at
        // a_0 * product = 100 n native. All integers.
        let hundred = BigRational::from_integer(100.into());
        let base = &hundred * BigRational::from_integer(d.clone());
        let closing = &hundred * BigRational::from_integer(n.clone());
        let mut legs: Vec<CurrencyId> = vec![CurrencyId::Native];
        for i in 1..plant.length {
            legs.push(CurrencyId::issued(&code('P', i), gw).expect("generated code"));
        }
        let mut amounts = vec![base.clone()];
        let two = BigRational::from_integer(2.into());
        for _ in 1..plant.length {
            amounts.push(&base * &two);
        }
        amounts.push(closing);

        for i in 0..plant.length {
            let owner = format!("pm{}", i + 1);
            let gets_cur = legs[(i + 1) % plant.length].clone();
            let pays_cur = legs[i].clone();
            // Native funding covers fees and any native leg it must pay.
            let native_need = 1_000
                + if gets_cur.is_native() {
                    amounts[i + 1].to_integer().try_into().unwrap_or(0u64) + 1
                } else {
                    0
                };
            events.push(at(1, pay(GENESIS, &owner, whole(native_need, CurrencyId::Native))));
            if !pays_cur.is_native() {
                events.push(at(
                    2,
                    trust(&owner, Amount::exact(&amounts[i] * &two, pays_cur.clone())),
                ));
            }
            if !gets_cur.is_native() {
                events.push(at(
                    2,
                    trust(&owner, Amount::exact(&amounts[i + 1] * &two, gets_cur.clone())),
                ));
                events.push(at(2, pay(gw, &owner, Amount::exact(amounts[i + 1].clone(), gets_cur.clone()))));
            }
            events.push(at(
                last_activity,
                offer(
                    &owner,
                    Amount::exact(amounts[i].clone(), pays_cur),
                    Amount::exact(amounts[i + 1].clone(), gets_cur),
                ),
            ));
        }
        // The taker holds the first issue and has headroom for the return.
        let start = legs[1].clone();
        let inventory = amounts[1].clone();
        let headroom = &inventory * (&plant.product + &two);
        events.push(at(2, trust("BOT", Amount::exact(headroom, start.clone()))));
        events.push(at(2, pay(gw, "BOT", Amount::exact(inventory, start.clone()))));

        let mut cycle = String::new();
        for c in legs.iter().chain(std::iter::once(&legs[0])) {
            if !cycle.is_empty() {
                cycle.push('>');
            }
            cycle.push_str(&c.to_string());
        }
        PlantTruth {
            cycle,
            product: render_rational(&plant.product),
            ledger: last_activity,
        }
    });

    // Group by ledger without reordering within one; replay does the same.
    events.sort_by_key(|e| e.ledger);
    let truth = Truth {
        seed: params.seed,
        currencies: params.currencies,
        offers: params.offers,
        ledgers: params.ledgers,
        planted,
    };
    Ok(Scenario { events, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replay::{parse_fixtures, replay, ReplayConfig};
    use num::Signed;
    use std::io::Cursor;

    fn quick(seed: u64, plant: Option<Plant>) -> GenParams {
        GenParams { seed, currencies: 8, offers: 60, ledgers: 5, plant }
    }

    #[test]
    fn same_seed_same_bytes_different_seed_different() {
        let a = generate(&quick(7, None)).unwrap().render_events();
        let b = generate(&quick(7, None)).unwrap().render_events();
        let c = generate(&quick(8, None)).unwrap().render_events();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn background_market_is_arbitrage_free() {
        for seed in [1, 2, 3, 4, 5] {
            let scenario = generate(&quick(seed, None)).unwrap();
            let events = parse_fixtures(Cursor::new(scenario.render_events())).unwrap();
            let report = replay(events, &ReplayConfig::default()).unwrap();
            assert_eq!(
                report.totals.detections, 0,
                "seed {seed} leaked an arbitrage loop"
            );
            // And nothing crossed at placement: every offer rested.
            for row in &report.ledgers {
                assert!(!row.codes.contains_key("MalformedTx"), "bad bootstrap");
                assert!(!row.codes.contains_key("Unfunded"), "unfunded fixture offer");
            }
        }
    }

    #[test]
    fn planted_cycle_is_detected_taken_and_profits() {
        let plant = Plant { product: crate::types::rational(11, 10), length: 3 };
        let scenario = generate(&quick(42, Some(plant))).unwrap();
        let truth = scenario.truth.planted.as_ref().unwrap();
        let events = parse_fixtures(Cursor::new(scenario.render_events())).unwrap();
        let report = replay(events, &ReplayConfig::default()).unwrap();
        let live = report
            .ledgers
            .iter()
            .find(|r| r.opportunity.is_some())
            .expect("plant detected");
        assert_eq!(live.ledger, truth.ledger);
        let note = live.opportunity.as_ref().unwrap();
        assert_eq!(note.cycle, truth.cycle);
        assert_eq!(note.product, truth.product);
        assert!(live.planned);
        assert_eq!(report.totals.completed, 1, "plan executed in full");
        // The start currency nets positive.
        let gain: Vec<_> = report.totals.bot_issued.values().collect();
        assert_eq!(gain.len(), 1);
        assert!(gain[0].is_positive());
    }

    #[test]
    fn parameter_validation_rejects_nonsense() {
        assert!(generate(&GenParams { seed: 1, currencies: 0, offers: 0, ledgers: 1, plant: None }).is_err());
        assert!(generate(&GenParams { seed: 1, currencies: 3, offers: 0, ledgers: 0, plant: None }).is_err());
        let flat = Plant { product: BigRational::one(), length: 3 };
        assert!(generate(&quick(1, Some(flat))).is_err());
        let short = Plant { product: crate::types::rational(11, 10), length: 2 };
        assert!(generate(&quick(1, Some(short))).is_err());
    }

    #[test]
    fn plant_parse_reads_fractions_and_decimals() {
        let eleven_tenths = crate::types::rational(11, 10);
        assert_eq!(Plant::parse("11/10", "3").unwrap().product, eleven_tenths);
        assert_eq!(Plant::parse("1.1", "3").unwrap().product, eleven_tenths);
        assert_eq!(Plant::parse("1.1", "4").unwrap().length, 4);
        assert!(Plant::parse("x", "3").is_err());
        assert!(Plant::parse("1/0", "3").is_err());
        assert!(Plant::parse("1.1", "many").is_err());
    }
}
