//! Negative-cycle detection over the rate graph, and exact evaluation of
//! what a detected cycle is worth.
//!
//! A trading loop whose rates multiply above 1 is exactly a cycle whose
//! -ln(rate) weights sum below 0. The fast path runs Bellman-Ford on the
//! float weights with a strict improvement threshold, then re-checks any
//! extracted cycle with exact rational arithmetic. If the float pass finds a
//! witness but the exact check cannot stand a cycle up (threshold effects
//! near product 1), an all-rational multiplicative Bellman-Ford settles it.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;

use crate::book::PairKey;
use crate::graph::RateGraph;
use crate::types::{AccountId, Amount, CurrencyId, OfferSequence};

/// Minimum float improvement for a relaxation to count. Keeps rounding noise
/// on product-exactly-1 loops from masquerading as arbitrage; genuine cycles
/// in bounded-rate books clear this by many orders of magnitude.
pub const RELAX_EPSILON: f64 = 1e-12;

/// Where distance propagation starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// A virtual origin with a zero-weight edge to every currency: all
    /// distances start at 0, so every cycle is reachable.
    Virtual,
    /// A concrete currency; only cycles reachable from it are found.
    At(CurrencyId),
}

/// Distances and predecessors after the relaxation passes, plus the witness
/// vertex that still relaxed on the extra pass, if any.
#[derive(Debug, Clone)]
pub struct BellmanState {
    pub dist: BTreeMap<CurrencyId, f64>,
    /// For each improved vertex: the currency it was reached from and the
    /// pair that did it.
    pub pred: BTreeMap<CurrencyId, (CurrencyId, PairKey)>,
    pub witness: Option<CurrencyId>,
}

/// A trading loop in trade order: each edge receives the currency the next
/// edge spends, wrapping around.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cycle {
    pub edges: Vec<PairKey>,
}

impl Cycle {
    pub fn new(edges: Vec<PairKey>) -> Self {
        let c = Cycle { edges };
        debug_assert!(c.is_well_formed());
        c
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Chain property: consecutive edges hand over the right currency and
    /// the loop closes, with no currency visited twice.
    pub fn is_well_formed(&self) -> bool {
        if self.edges.len() < 2 {
            return false;
        }
        let closes = self
            .edges
            .iter()
            .zip(self.edges.iter().cycle().skip(1))
            .all(|(e, next)| e.get == next.pay);
        let mut seen = std::collections::BTreeSet::new();
        closes && self.edges.iter().all(|e| seen.insert(e.pay.clone()))
    }

    /// Currencies in trade order, starting with the first edge's pay side.
    pub fn currencies(&self) -> Vec<CurrencyId> {
        self.edges.iter().map(|e| e.pay.clone()).collect()
    }

    /// Rotates so the loop starts by spending `start`.
    pub fn rotate_to(&self, start: &CurrencyId) -> Option<Cycle> {
        let at = self.edges.iter().position(|e| &e.pay == start)?;
        let mut edges = self.edges.clone();
        edges.rotate_left(at);
        Some(Cycle { edges })
    }

    /// Rotates so the smallest currency comes first; one representative per
    /// loop regardless of where extraction happened to land.
    pub fn canonical(&self) -> Cycle {
        let min = self.edges.iter().map(|e| &e.pay).min().expect("non-empty");
        self.rotate_to(&min.clone()).expect("own currency")
    }
}

impl std::fmt::Display for Cycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.currencies().iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            write!(f, "{c}")?;
        }
        match self.edges.last() {
            Some(e) => write!(f, ">{}", e.get),
            None => Ok(()),
        }
    }
}

/// A cycle that exact arithmetic confirmed profitable, with its gross rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Confirmed {
    pub cycle: Cycle,
    /// Product of the edge rates; strictly above 1.
    pub product: BigRational,
}

/// Runs the relaxation passes over the float weights.
pub fn bellman_ford(graph: &RateGraph, source: Source) -> BellmanState {
    let vertices = graph.vertices();
    let mut dist: BTreeMap<CurrencyId, f64> = match &source {
        Source::Virtual => vertices.iter().map(|v| (v.clone(), 0.0)).collect(),
        Source::At(c) => vertices
            .iter()
            .map(|v| (v.clone(), if v == c { 0.0 } else { f64::INFINITY }))
            .collect(),
    };
    let mut pred: BTreeMap<CurrencyId, (CurrencyId, PairKey)> = BTreeMap::new();
    let n = vertices.len();

    let mut settled = n == 0;
    for _ in 1..n {
        let mut changed = false;
        for (pair, edge) in graph.edges() {
            let du = dist[&pair.pay];
            if du.is_infinite() {
                continue;
            }
            let cand = du + edge.weight;
            if cand < dist[&pair.get] - RELAX_EPSILON {
                dist.insert(pair.get.clone(), cand);
                pred.insert(pair.get.clone(), (pair.pay.clone(), pair.clone()));
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }

    // Extra pass: anything still improving sits on (or downstream of) a
    // negative cycle. The first hit in deterministic edge order is the
    // witness; recording its predecessor puts the cycle into `pred`.
    let mut witness = None;
    if !settled {
        for (pair, edge) in graph.edges() {
            let du = dist[&pair.pay];
            if du.is_infinite() {
                continue;
            }
            if du + edge.weight < dist[&pair.get] - RELAX_EPSILON {
                pred.insert(pair.get.clone(), (pair.pay.clone(), pair.clone()));
                witness = Some(pair.get.clone());
                break;
            }
        }
    }

    BellmanState { dist, pred, witness }
}

/// Walks predecessors from the witness until a vertex repeats, and returns
/// that loop in trade order.
pub fn extract_cycle(state: &BellmanState) -> Option<Cycle> {
    let witness = state.witness.as_ref()?;
    walk_pred_cycle(&state.pred, witness)
}

fn walk_pred_cycle(
    pred: &BTreeMap<CurrencyId, (CurrencyId, PairKey)>,
    witness: &CurrencyId,
) -> Option<Cycle> {
    // path_edges[i] leads from path[i + 1] to path[i].
    let mut path = vec![witness.clone()];
    let mut path_edges: Vec<PairKey> = Vec::new();
    for _ in 0..=2 * pred.len() {
        let cur = path.last().expect("non-empty");
        let (from, pair) = pred.get(cur)?;
        path_edges.push(pair.clone());
        if let Some(at) = path.iter().position(|v| v == from) {
            let mut edges: Vec<PairKey> = path_edges[at..].to_vec();
            edges.reverse();
            let cycle = Cycle { edges };
            return cycle.is_well_formed().then_some(cycle);
        }
        path.push(from.clone());
    }
    None
}

/// Exact check of a cycle against the live graph: the product of current
/// edge rates, if every edge still exists and the product clears 1.
pub fn confirm(graph: &RateGraph, cycle: &Cycle) -> Option<Confirmed> {
    let mut product = BigRational::one();
    for pair in &cycle.edges {
        product *= &graph.edge(pair)?.rate;
    }
    (product > BigRational::one()).then(|| Confirmed { cycle: cycle.canonical(), product })
}

/// Full detection: float pass, exact confirmation, rational fallback when
/// the float result does not survive confirmation. Returns one confirmed
/// cycle or nothing.
pub fn detect(graph: &RateGraph) -> Option<Confirmed> {
    let state = bellman_ford(graph, Source::Virtual);
    state.witness.as_ref()?;
    if let Some(found) = extract_cycle(&state).and_then(|c| confirm(graph, &c)) {
        return Some(found);
    }
    // Float witness the exact check could not confirm: rerun the whole
    // search in rationals. Authoritative and slower; rare by construction.
    detect_exact(graph)
}

/// Multiplicative Bellman-Ford in exact arithmetic: distances are the best
/// known products of rates from a virtual source (all start at 1), and an
/// edge relaxes when it strictly raises the destination's product. A vertex
/// still relaxing after |V| - 1 passes witnesses a product-above-1 loop.
pub fn detect_exact(graph: &RateGraph) -> Option<Confirmed> {
    let vertices = graph.vertices();
    let n = vertices.len();
    let mut dist: BTreeMap<CurrencyId, BigRational> =
        vertices.into_iter().map(|v| (v, BigRational::one())).collect();
    let mut pred: BTreeMap<CurrencyId, (CurrencyId, PairKey)> = BTreeMap::new();

    let mut settled = n == 0;
    for _ in 1..n {
        let mut changed = false;
        for (pair, edge) in graph.edges() {
            let cand = &dist[&pair.pay] * &edge.rate;
            if cand > dist[&pair.get] {
                dist.insert(pair.get.clone(), cand);
                pred.insert(pair.get.clone(), (pair.pay.clone(), pair.clone()));
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if settled {
        return None;
    }
    for (pair, edge) in graph.edges() {
        if &dist[&pair.pay] * &edge.rate > dist[&pair.get] {
            pred.insert(pair.get.clone(), (pair.pay.clone(), pair.clone()));
            let cycle = walk_pred_cycle(&pred, &pair.get)?;
            return confirm(graph, &cycle);
        }
    }
    None
}

/// One hop of a sized opportunity: spend `spend` into `pair`'s best offer
/// and receive `receive`, both exact at the head rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub pair: PairKey,
    pub rate: BigRational,
    pub spend: Amount,
    pub receive: Amount,
    pub offer_owner: AccountId,
    pub offer_sequence: OfferSequence,
}

/// A confirmed cycle sized against head-offer depth and costed against
/// transaction fees. The loop is rotated to start and end in the native
/// currency, so profit is a native amount.
#[derive(Debug, Clone, PartialEq)]
pub struct Opportunity {
    pub cycle: Cycle,
    /// Gross rate around the loop; above 1.
    pub product: BigRational,
    pub legs: Vec<Leg>,
    /// Native spend entering the first leg; whole drops.
    pub notional: Amount,
    /// Native gain after `fee_budget`, strictly positive.
    pub net_profit: Amount,
    /// Total fees assumed while costing, in native units.
    pub fee_budget: Amount,
}

/// Sizes a confirmed cycle against the current graph and prices it net of
/// fees. `fee` is the per-transaction cost and `tx_count` how many
/// transactions executing the loop will take.
///
/// Yields nothing when the loop never touches the native currency (profit
/// would have no denomination), when head depth forces the viable spend to
/// zero drops, or when fees eat the whole edge.
pub fn evaluate(
    graph: &RateGraph,
    confirmed: &Confirmed,
    fee: &Amount,
    tx_count: u32,
) -> Option<Opportunity> {
    debug_assert!(fee.currency().is_native());
    let cycle = confirmed.cycle.rotate_to(&CurrencyId::Native)?;

    // Largest start-currency spend that keeps every leg within its head
    // offer's depth: push each capacity back to the start through the rates
    // before it and take the minimum.
    let mut carried = BigRational::one();
    let mut notional: Option<BigRational> = None;
    for pair in &cycle.edges {
        let edge = graph.edge(pair)?;
        let cap_at_start = edge.capacity.value() / &carried;
        notional = Some(match notional {
            Some(best) => best.min(cap_at_start),
            None => cap_at_start,
        });
        carried *= &edge.rate;
    }
    debug_assert_eq!(carried, confirmed.product);

    // The payment entering the loop must be whole drops.
    let notional = Amount::exact(notional?, CurrencyId::Native)
        .mul_floor(&BigRational::one())
        .ok()?;
    if notional.is_zero() {
        return None;
    }

    let mut legs = Vec::with_capacity(cycle.len());
    let mut rolling = notional.clone();
    for pair in &cycle.edges {
        let edge = graph.edge(pair)?;
        let receive = rolling.mul_exact(&edge.rate);
        let receive = Amount::exact(receive.value().clone(), pair.get.clone());
        legs.push(Leg {
            pair: pair.clone(),
            rate: edge.rate.clone(),
            spend: rolling.clone(),
            receive: receive.clone(),
            offer_owner: edge.offer_owner.clone(),
            offer_sequence: edge.offer_sequence,
        });
        rolling = receive;
    }

    let fee_budget = fee.mul_floor(&BigRational::from_integer(BigInt::from(tx_count))).ok()?;
    let gross_gain = rolling.checked_sub(&notional).ok()?;
    let net_profit = gross_gain.checked_sub(&fee_budget).ok()?;
    if net_profit.is_zero() {
        return None;
    }
    Some(Opportunity {
        cycle,
        product: confirmed.product.clone(),
        legs,
        notional,
        net_profit,
        fee_budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::{BookSet, Offer};
    use crate::types::rational;
    use proptest::prelude::*;

    fn acct(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn cur(code: &str) -> CurrencyId {
        CurrencyId::issued(code, "GG").unwrap()
    }

    /// Builds a graph straight from (pay, get, rate numerator, denominator,
    /// capacity-in-pay) rows.
    fn graph_of(rows: &[(&CurrencyId, &CurrencyId, i64, i64, i64)]) -> RateGraph {
        let mut books = BookSet::new();
        for (i, (pay, get, num, den, cap)) in rows.iter().enumerate() {
            books
                .insert(Offer {
                    owner: acct("mm"),
                    sequence: i as u32 + 1,
                    taker_pays: Amount::exact(rational(*cap, 1), (*pay).clone()),
                    taker_gets: Amount::exact(rational(cap * num, *den), (*get).clone()),
                    placed_at: 1,
                })
                .unwrap();
        }
        RateGraph::rebuild(&books, 1)
    }

    fn xrp() -> CurrencyId {
        CurrencyId::Native
    }

    #[test]
    fn triangle_above_one_is_witnessed_and_extracted() {
        // 2 * 3 * 1/5 = 6/5 > 1.
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 2, 1, 100),
            (&b, &c, 3, 1, 1000),
            (&c, &a, 1, 5, 1000),
        ]);
        let state = bellman_ford(&graph, Source::Virtual);
        assert!(state.witness.is_some());
        let cycle = extract_cycle(&state).expect("cycle extracted");
        assert_eq!(cycle.len(), 3);
        let found = confirm(&graph, &cycle).expect("confirmed");
        assert_eq!(found.product, rational(6, 5));
        // Full pipeline agrees.
        assert_eq!(detect(&graph).unwrap().product, rational(6, 5));
        assert_eq!(detect_exact(&graph).unwrap().product, rational(6, 5));
    }

    #[test]
    fn triangle_at_exactly_one_stays_quiet() {
        // 2 * 3 * 1/6 = 1: no gain, and float noise must not invent one.
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 2, 1, 100),
            (&b, &c, 3, 1, 1000),
            (&c, &a, 1, 6, 1000),
        ]);
        let state = bellman_ford(&graph, Source::Virtual);
        assert!(state.witness.is_none());
        assert!(detect(&graph).is_none());
        assert!(detect_exact(&graph).is_none());
    }

    #[test]
    fn no_edge_above_one_settles_immediately()  {
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 1, 2, 100),
            (&b, &c, 2, 3, 1000),
            (&c, &a, 9, 10, 1000),
        ]);
        assert!(detect(&graph).is_none());
    }

    #[test]
    fn directed_source_only_reaches_its_component() {
        let (a, b) = (cur("AAA"), cur("BBB"));
        let (c, d) = (cur("CCC"), cur("DDD"));
        // Profitable loop lives on c/d; a/b is separate and quiet.
        let graph = graph_of(&[
            (&a, &b, 1, 2, 100),
            (&c, &d, 2, 1, 100),
            (&d, &c, 2, 3, 1000),
        ]);
        let from_a = bellman_ford(&graph, Source::At(a));
        assert!(from_a.witness.is_none(), "loop not reachable from a");
        let from_c = bellman_ford(&graph, Source::At(c));
        assert!(from_c.witness.is_some());
        // The virtual source reaches everything.
        assert!(bellman_ford(&graph, Source::Virtual).witness.is_some());
    }

    #[test]
    fn detect_returns_canonical_rotation() {
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&b, &c, 3, 1, 1000),
            (&c, &a, 1, 5, 1000),
            (&a, &b, 2, 1, 100),
        ]);
        let found = detect(&graph).unwrap();
        // Native sorts first, so the canonical loop starts at the native leg.
        assert_eq!(found.cycle.edges[0].pay, xrp());
        assert!(found.cycle.is_well_formed());
    }

    #[test]
    fn evaluate_sizes_and_prices_the_loop() {
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 2, 1, 100),   // up to 100 XRP in
            (&b, &c, 3, 1, 200),   // up to 200 BBB in = 100 XRP equivalent
            (&c, &a, 1, 5, 600),   // up to 600 CCC in = 100 XRP equivalent
        ]);
        let found = detect(&graph).unwrap();
        let fee = Amount::from_drops(10);
        let opp = evaluate(&graph, &found, &fee, 2).expect("profitable");
        assert_eq!(opp.notional, Amount::parse("100", xrp()).unwrap());
        // 100 -> 200 -> 600 -> 120: 20 XRP gross, minus two fees.
        assert_eq!(opp.net_profit, Amount::parse("19.99998", xrp()).unwrap());
        assert_eq!(opp.legs.len(), 3);
        assert_eq!(opp.legs[2].receive, Amount::parse("120", xrp()).unwrap());
        assert_eq!(opp.fee_budget, Amount::from_drops(20));
    }

    #[test]
    fn evaluate_respects_the_tightest_leg() {
        let (a, b, c) = (xrp(), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 2, 1, 100),
            (&b, &c, 3, 1, 100), // only 100 BBB deep: start capped at 50 XRP
            (&c, &a, 1, 5, 600),
        ]);
        let found = detect(&graph).unwrap();
        let opp = evaluate(&graph, &found, &Amount::from_drops(10), 2).unwrap();
        assert_eq!(opp.notional, Amount::parse("50", xrp()).unwrap());
        for leg in &opp.legs {
            let cap = graph.edge(&leg.pair).unwrap().capacity.clone();
            assert!(leg.spend.value() <= cap.value(), "leg over capacity");
        }
    }

    #[test]
    fn evaluate_skips_loops_without_native() {
        let (a, b, c) = (cur("AAA"), cur("BBB"), cur("CCC"));
        let graph = graph_of(&[
            (&a, &b, 2, 1, 100),
            (&b, &c, 3, 1, 1000),
            (&c, &a, 1, 5, 1000),
        ]);
        let found = detect(&graph).unwrap();
        assert_eq!(evaluate(&graph, &found, &Amount::from_drops(10), 2), None);
    }

    #[test]
    fn evaluate_rejects_fee_dominated_loops() {
        let (a, b) = (xrp(), cur("BBB"));
        // Tiny loop: 1 XRP -> 1.000001 XRP, 1 drop gross gain.
        let graph = graph_of(&[(&a, &b, 1, 1, 1), (&b, &a, 1000001, 1000000, 2)]);
        let found = detect_exact(&graph).unwrap();
        assert!(evaluate(&graph, &found, &Amount::from_drops(10), 2).is_none());
        // With no fee the drop of gain stands.
        let opp = evaluate(&graph, &found, &Amount::from_drops(0), 2).unwrap();
        assert_eq!(opp.net_profit, Amount::from_drops(1));
    }

    /// Brute force: every simple loop by DFS, products in exact arithmetic.
    fn brute_force_has_gain(graph: &RateGraph) -> bool {
        fn dfs(
            graph: &RateGraph,
            start: &CurrencyId,
            at: &CurrencyId,
            product: BigRational,
            visited: &mut Vec<CurrencyId>,
        ) -> bool {
            for (pair, edge) in graph.edges() {
                if &pair.pay != at {
                    continue;
                }
                if &pair.get == start {
                    if &product * &edge.rate > BigRational::one() {
                        return true;
                    }
                    continue;
                }
                if visited.contains(&pair.get) {
                    continue;
                }
                visited.push(pair.get.clone());
                if dfs(graph, start, &pair.get.clone(), &product * &edge.rate, visited) {
                    return true;
                }
                visited.pop();
            }
            false
        }
        let vertices = graph.vertices();
        vertices.iter().any(|start| {
            let mut visited = vec![start.clone()];
            dfs(graph, start, start, BigRational::one(), &mut visited)
        })
    }

    /// Rates drawn as n/d with both sides small keeps any genuine gain far
    /// above the float threshold.
    fn arb_graph() -> impl Strategy<Value = RateGraph> {
        proptest::collection::vec((0u8..5, 0u8..5, 1i64..=20, 1i64..=20), 1..14).prop_map(|rows| {
            let codes = ["AAA", "BBB", "CCC", "DDD"];
            let currency = |i: u8| -> CurrencyId {
                if i.is_multiple_of(5) { CurrencyId::Native } else { cur(codes[(i as usize % 5) - 1]) }
            };
            let mut books = BookSet::new();
            for (i, (from, to, num, den)) in rows.iter().enumerate() {
                let (pay, get) = (currency(*from), currency(*to));
                if pay == get {
                    continue;
                }
                let _ = books.insert(Offer {
                    owner: acct("mm"),
                    sequence: i as u32 + 1,
                    taker_pays: Amount::exact(rational(*den * 1_000, 1), pay),
                    taker_gets: Amount::exact(rational(*num * 1_000, 1), get),
                    placed_at: 1,
                });
            }
            RateGraph::rebuild(&books, 1)
        })
    }

    proptest! {
        /// Oracle: detection agrees with exhaustive loop enumeration.
        #[test]
        fn prop_detect_matches_brute_force(graph in arb_graph()) {
            let found = detect(&graph);
            let any = brute_force_has_gain(&graph);
            prop_assert_eq!(found.is_some(), any);
            if let Some(c) = found {
                prop_assert!(c.product > BigRational::one());
                prop_assert!(c.cycle.is_well_formed());
                // The reported product really is the product of live edges.
                let live: BigRational = c.cycle.edges.iter()
                    .map(|p| graph.edge(p).unwrap().rate.clone())
                    .product();
                prop_assert_eq!(live, c.product);
            }
        }

        /// The exact engine agrees with the hybrid pipeline on existence.
        #[test]
        fn prop_exact_and_hybrid_agree(graph in arb_graph()) {
            prop_assert_eq!(detect(&graph).is_some(), detect_exact(&graph).is_some());
        }

        /// Sizing never exceeds any leg's head depth, legs chain exactly,
        /// and the claimed net profit is the chained gain minus fees.
        #[test]
        fn prop_evaluate_is_consistent(graph in arb_graph(), fee_drops in 0u64..100) {
            if let Some(found) = detect(&graph) {
                let fee = Amount::from_drops(fee_drops);
                if let Some(opp) = evaluate(&graph, &found, &fee, 1) {
                    prop_assert!(!opp.net_profit.is_zero());
                    let mut rolling = opp.notional.clone();
                    for leg in &opp.legs {
                        prop_assert_eq!(&leg.spend, &rolling);
                        let cap = &graph.edge(&leg.pair).unwrap().capacity;
                        prop_assert!(leg.spend.value() <= cap.value());
                        prop_assert_eq!(leg.receive.value(), &(leg.spend.value() * &leg.rate));
                        rolling = leg.receive.clone();
                    }
                    let expect = rolling.checked_sub(&opp.notional).unwrap()
                        .checked_sub(&opp.fee_budget).unwrap();
                    prop_assert_eq!(&opp.net_profit, &expect);
                }
            }
        }
    }
}
