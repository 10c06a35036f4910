//! Comparison-graph topologies, budget allocation and node-load realization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ComparisonBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    Complete,
    Cycle,
    Star,
    Chain,
    RandomTree,
    ErdosRenyi,
}

impl TopologyKind {
    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Complete => "complete",
            TopologyKind::Cycle => "cycle",
            TopologyKind::Star => "star",
            TopologyKind::Chain => "chain",
            TopologyKind::RandomTree => "random-tree",
            TopologyKind::ErdosRenyi => "erdos-renyi",
        }
    }
}

/// A topology family on k items. `p` is used by Erdős–Rényi graphs and `seed`
/// by the random kinds (default 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: TopologyKind,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Topology {
    pub fn new(kind: TopologyKind, k: usize) -> Self {
        Self {
            kind,
            k,
            p: None,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Invalid {
                what: "topology",
                reason: format!("k = {} but at least two items are required", self.k),
            });
        }
        if self.kind == TopologyKind::ErdosRenyi {
            check_probability(self.p.unwrap_or(f64::NAN))?;
        }
        Ok(())
    }

    /// Edge list in allocation order.
    pub fn edges(&self) -> Result<Vec<(usize, usize)>> {
        self.validate()?;
        let k = self.k;
        let seed = self.seed.unwrap_or(0);
        Ok(match self.kind {
            TopologyKind::Complete => (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .collect(),
            TopologyKind::Cycle => {
                let mut e: Vec<_> = (0..k - 1).map(|i| (i, i + 1)).collect();
                if k > 2 {
                    e.push((0, k - 1));
                }
                e
            }
            TopologyKind::Star => (1..k).map(|j| (0, j)).collect(),
            TopologyKind::Chain => (0..k - 1).map(|i| (i, i + 1)).collect(),
            TopologyKind::RandomTree => random_tree_edges(k, &mut ChaCha8Rng::seed_from_u64(seed)),
            TopologyKind::ErdosRenyi => er_edges(
                k,
                self.p.unwrap_or(0.0),
                &mut ChaCha8Rng::seed_from_u64(seed),
            ),
        })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Invalid {
            what: "edge probability",
            reason: format!("{p} is not in [0, 1]"),
        })
    }
}

/// Uniform labelled tree on k nodes decoded from a random Prüfer sequence.
/// Edges are returned sorted with the smaller endpoint first.
pub fn random_tree_edges<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if k < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..k.saturating_sub(2))
        .map(|_| rng.random_range(0..k))
        .collect();
    let mut degree = vec![1usize; k];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    for &s in &seq {
        let leaf = (0..k)
            .find(|&v| degree[v] == 1)
            .expect("a leaf always exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

fn er_edges<R: Rng + ?Sized>(k: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Spread `total` over `edges` as evenly as possible, extra units on the
/// first edges in the given order.
fn spread(k: usize, edges: &[(usize, usize)], total: u64) -> ComparisonBudget {
    let mut budget = ComparisonBudget::zeros(k);
    if edges.is_empty() {
        return budget;
    }
    let m = edges.len() as u64;
    let (q, r) = (total / m, total % m);
    for (t, &(i, j)) in edges.iter().enumerate() {
        budget.set(i, j, q + u64::from((t as u64) < r));
    }
    budget
}

/// Chain weights in {q, q+1} with `r` extras placed to minimise the sum of
/// squared node loads (the earliest placement wins ties).
fn chain_weights(m: usize, q: u64, r: usize) -> Vec<u64> {
    // cost[t][used][prev]: minimal remaining cost from edge t on, having placed
    // `used` extras so far and with x_{t-1} = prev.
    let inf = u128::MAX;
    let sq = |x: u64| (x as u128) * (x as u128);
    let mut cost = vec![vec![[inf; 2]; r + 1]; m + 1];
    for used in 0..=r {
        for prev in 0..2 {
            if used == r {
                cost[m][used][prev] = sq(q + prev as u64);
            }
        }
    }
    let step = |t: usize, prev: usize, x: usize| -> u128 {
        let w = q + x as u64;
        if t == 0 {
            sq(w)
        } else {
            sq(q + prev as u64 + w)
        }
    };
    for t in (0..m).rev() {
        for used in 0..=r {
            for prev in 0..2 {
                let mut best = inf;
                for x in 0..2 {
                    if used + x > r || cost[t + 1][used + x][x] == inf {
                        continue;
                    }
                    best = best.min(step(t, prev, x) + cost[t + 1][used + x][x]);
                }
                cost[t][used][prev] = best;
            }
        }
    }
    let mut weights = Vec::with_capacity(m);
    let (mut used, mut prev) = (0, 0);
    for t in 0..m {
        let option = |x: usize| -> u128 {
            if used + x > r || cost[t + 1][used + x][x] == inf {
                inf
            } else {
                step(t, prev, x) + cost[t + 1][used + x][x]
            }
        };
        let x = if option(1) <= option(0) { 1 } else { 0 };
        weights.push(q + x as u64);
        used += x;
        prev = x;
    }
    weights
}

/// Allocate `total_n` comparisons over the edges of `topo`.
///
/// Regular families and random trees split the budget evenly with the
/// remainder on the lowest-index edges. The chain places its remainder to
/// keep node loads as even as possible. The star puts one comparison on each
/// spoke and the rest on edge (0, 1). Erdős–Rényi graphs divide the budget
/// evenly over whichever edges were drawn, and stay empty if none were.
pub fn build_budget(topo: &Topology, total_n: u64) -> Result<ComparisonBudget> {
    let edges = topo.edges()?;
    if total_n < edges.len() as u64 {
        return Err(Error::BudgetTooSmall {
            total: total_n,
            edges: edges.len(),
        });
    }
    let k = topo.k;
    Ok(match topo.kind {
        TopologyKind::Star => {
            let mut budget = ComparisonBudget::zeros(k);
            for &(i, j) in &edges[1..] {
                budget.set(i, j, 1);
            }
            budget.set(0, 1, total_n - (k as u64 - 2));
            budget
        }
        TopologyKind::Chain => {
            let m = edges.len();
            let weights = chain_weights(m, total_n / m as u64, (total_n % m as u64) as usize);
            let mut budget = ComparisonBudget::zeros(k);
            for (&(i, j), w) in edges.iter().zip(weights) {
                budget.set(i, j, w);
            }
            budget
        }
        _ => spread(k, &edges, total_n),
    })
}

/// Water-filling node loads n_i = (μ - a_i)^+ with Σ n_i = total_n, rounded to
/// integers by largest remainder (lowest index first on ties).
pub fn water_fill(a: &[f64], total_n: u64) -> Vec<u64> {
    let k = a.len();
    if k == 0 || total_n == 0 {
        return vec![0; k];
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| a[x].total_cmp(&a[y]).then(x.cmp(&y)));
    let total = total_n as f64;
    let mut prefix = 0.0;
    let mut level = f64::NAN;
    for (m, &idx) in order.iter().enumerate() {
        prefix += a[idx];
        let mu = (total + prefix) / (m + 1) as f64;
        if m + 1 == k || mu <= a[order[m + 1]] {
            level = mu;
            break;
        }
    }
    let real: Vec<f64> = a.iter().map(|&ai| (level - ai).max(0.0)).collect();
    let mut loads: Vec<u64> = real.iter().map(|x| x.floor() as u64).collect();
    // Guard against round-off pushing the floors past the budget.
    while loads.iter().sum::<u64>() > total_n {
        let i = (0..k)
            .filter(|&i| loads[i] > 0)
            .max_by(|&x, &y| (a[x] + loads[x] as f64).total_cmp(&(a[y] + loads[y] as f64)))
            .expect("positive loads exist");
        loads[i] -= 1;
    }
    let mut rest = total_n - loads.iter().sum::<u64>();
    let mut by_remainder: Vec<usize> = (0..k).collect();
    by_remainder.sort_by(|&x, &y| {
        let fx = real[x] - loads[x] as f64;
        let fy = real[y] - loads[y] as f64;
        fy.total_cmp(&fx).then(x.cmp(&y))
    });
    for &i in by_remainder.iter().cycle() {
        if rest == 0 {
            break;
        }
        loads[i] += 1;
        rest -= 1;
    }
    loads
}

/// Realise integer node loads as a budget with half row sums equal to `loads`,
/// by repeatedly joining the two items with the largest residual degree.
pub fn realize_node_loads(loads: &[u64]) -> Result<ComparisonBudget> {
    let k = loads.len();
    let mut residual: Vec<u64> = loads.iter().map(|&x| 2 * x).collect();
    let total: u64 = residual.iter().sum();
    if let Some((i, &max)) = residual
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
    {
        if max > total - max {
            return Err(Error::InfeasibleLoads(format!(
                "load of item {i} exceeds the sum of all other loads"
            )));
        }
    }
    let mut budget = ComparisonBudget::zeros(k);
    loop {
        let mut first: Option<usize> = None;
        let mut second: Option<usize> = None;
        for i in 0..k {
            if residual[i] == 0 {
                continue;
            }
            match first {
                Some(f) if residual[i] <= residual[f] => match second {
                    Some(s) if residual[i] <= residual[s] => {}
                    _ => second = Some(i),
                },
                _ => {
                    second = first;
                    first = Some(i);
                }
            }
        }
        match (first, second) {
            (None, _) => return Ok(budget),
            (Some(i), Some(j)) => {
                budget.add(i, j, 1);
                residual[i] -= 1;
                residual[j] -= 1;
            }
            (Some(i), None) => {
                return Err(Error::InfeasibleLoads(format!(
                    "item {i} is left with unmatched load"
                )))
            }
        }
    }
}

/// Erdős–Rényi graph where each present edge gets `per_edge` comparisons.
pub fn er_graph_budget<R: Rng + ?Sized>(
    k: usize,
    p: f64,
    per_edge: u64,
    rng: &mut R,
) -> Result<ComparisonBudget> {
    check_probability(p)?;
    if per_edge == 0 {
        return Err(Error::Invalid {
            what: "per-edge budget",
            reason: "must be at least 1".into(),
        });
    }
    let mut budget = ComparisonBudget::zeros(k);
    for (i, j) in er_edges(k, p, rng) {
        budget.set(i, j, per_edge);
    }
    Ok(budget)
}

/// Erdős–Rényi graph with a fixed total budget split evenly over the drawn edges.
pub fn er_fixed_total_budget<R: Rng + ?Sized>(
    k: usize,
    p: f64,
    total_n: u64,
    rng: &mut R,
) -> Result<ComparisonBudget> {
    check_probability(p)?;
    let edges = er_edges(k, p, rng);
    if total_n < edges.len() as u64 {
        return Err(Error::BudgetTooSmall {
            total: total_n,
            edges: edges.len(),
        });
    }
    Ok(spread(k, &edges, total_n))
}

/// Whether the comparison graph with an edge wherever n_ij > 0 is connected.
pub fn is_connected(budget: &ComparisonBudget) -> bool {
    let k = budget.k();
    if k == 0 {
        return true;
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..k {
            if !seen[j] && budget.get(i, j) > 0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Connectivity threshold ln k / k of Erdős–Rényi graphs.
pub fn connectivity_threshold(k: usize) -> f64 {
    (k as f64).ln() / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(a: &[f64], n: &[u64]) -> f64 {
        a.iter().zip(n).map(|(a, n)| (a + *n as f64).ln()).sum()
    }

    /// Best Σ ln(a_i + n_i) over every composition of `total` into k parts.
    fn exhaustive(a: &[f64], total: u64) -> f64 {
        fn rec(a: &[f64], left: u64, acc: &mut Vec<u64>, best: &mut f64) {
            if acc.len() + 1 == a.len() {
                acc.push(left);
                *best = best.max(score(a, acc));
                acc.pop();
                return;
            }
            for x in 0..=left {
                acc.push(x);
                rec(a, left - x, acc, best);
                acc.pop();
            }
        }
        let mut best = f64::NEG_INFINITY;
        rec(a, total, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn edge_counts() {
        for k in 2..9 {
            let e = |kind| Topology::new(kind, k).edges().unwrap().len();
            assert_eq!(e(TopologyKind::Complete), k * (k - 1) / 2);
            assert_eq!(e(TopologyKind::Cycle), if k > 2 { k } else { 1 });
            assert_eq!(e(TopologyKind::Star), k - 1);
            assert_eq!(e(TopologyKind::Chain), k - 1);
            assert_eq!(e(TopologyKind::RandomTree), k - 1);
        }
    }

    #[test]
    fn paper_allocations() {
        let c = build_budget(&Topology::new(TopologyKind::Cycle, 10), 100).unwrap();
        assert!(c.edges().all(|(_, _, n)| n == 10));
        assert_eq!(c.edges().count(), 10);
        let f = build_budget(&Topology::new(TopologyKind::Complete, 5), 100).unwrap();
        assert!(f.edges().all(|(_, _, n)| n == 10));
        let s = build_budget(&Topology::new(TopologyKind::Star, 10), 100).unwrap();
        assert_eq!(s.get(0, 1), 92);
        assert!((2..10).all(|j| s.get(0, j) == 1));
    }

    #[test]
    fn budget_too_small() {
        let err = build_budget(&Topology::new(TopologyKind::Complete, 5), 9).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetTooSmall {
                total: 9,
                edges: 10
            }
        );
    }

    #[test]
    fn chain_remainder_evens_out_loads() {
        // k = 5, n = 10: four edges, two extras. Ends get the extras so that
        // the leaves are not starved.
        let b = build_budget(&Topology::new(TopologyKind::Chain, 5), 10).unwrap();
        assert_eq!(b.total(), 10);
        let w: Vec<u64> = (0..4).map(|t| b.get(t, t + 1)).collect();
        assert_eq!(w, vec![3, 2, 2, 3]);
    }

    #[test]
    fn random_tree_is_spanning_tree() {
        for seed in 0..50 {
            let edges = Topology::new(TopologyKind::RandomTree, 9)
                .with_seed(seed)
                .edges()
                .unwrap();
            let mut parent: Vec<usize> = (0..9).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for &(i, j) in &edges {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                assert_ne!(ri, rj, "cycle in tree");
                parent[ri] = rj;
            }
            assert_eq!(edges.len(), 8);
        }
    }

    #[test]
    fn water_fill_examples() {
        assert_eq!(water_fill(&[2.0; 4], 12), vec![3, 3, 3, 3]);
        assert_eq!(water_fill(&[1.0, 1.0, 10.0], 4), vec![2, 2, 0]);
        assert_eq!(water_fill(&[1.0, 1.0, 10.0], 0), vec![0, 0, 0]);
        assert_eq!(water_fill(&[1.0, 1.0, 10.0], 20), vec![10, 10, 0]);
    }

    #[test]
    fn water_fill_exhaustive_small() {
        let patterns: Vec<Vec<f64>> = vec![
            vec![1.0, 1.0],
            vec![3.0, 3.0, 3.0],
            vec![1.0, 1.0, 10.0],
            vec![1.0, 2.5, 4.0, 7.0],
            vec![5.0; 4],
        ];
        for a in &patterns {
            for total in 0..=12 {
                let n = water_fill(a, total);
                assert_eq!(n.iter().sum::<u64>(), total);
                assert!(
                    score(a, &n) >= exhaustive(a, total) - 1e-12,
                    "a={a:?} n={total}"
                );
            }
        }
    }

    #[test]
    fn realize_examples() {
        let b = realize_node_loads(&[2, 1, 1]).unwrap();
        assert_eq!(b.node_loads(), vec![2.0, 1.0, 1.0]);
        assert_eq!((b.get(0, 1), b.get(0, 2), b.get(1, 2)), (2, 2, 0));
        assert!(matches!(
            realize_node_loads(&[5, 1]),
            Err(Error::InfeasibleLoads(_))
        ));
        let b = realize_node_loads(&[3; 6]).unwrap();
        assert_eq!(b.node_loads(), vec![3.0; 6]);
        assert_eq!(realize_node_loads(&[0, 0, 0]).unwrap().total(), 0);
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(
            &build_budget(&Topology::new(TopologyKind::Chain, 6), 10).unwrap()
        ));
        let mut b = ComparisonBudget::zeros(4);
        b.set(0, 1, 2);
        b.set(2, 3, 2);
        assert!(!is_connected(&b));
        b.set(1, 2, 1);
        assert!(is_connected(&b));
    }

    #[test]
    fn er_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(er_graph_budget(10, 0.0, 3, &mut rng).unwrap().total(), 0);
        let full = er_graph_budget(10, 1.0, 3, &mut rng).unwrap();
        assert_eq!(full.edges().count(), 45);
        assert!(full.edges().all(|(_, _, n)| n == 3));
        assert!(er_graph_budget(10, 1.5, 3, &mut rng).is_err());
        assert!(er_graph_budget(10, 0.5, 0, &mut rng).is_err());
    }

    #[test]
    fn er_edge_count_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = er_graph_budget(100, 0.5, 1, &mut rng).unwrap();
        let sd = (4950.0f64 * 0.25).sqrt();
        assert!((b.edges().count() as f64 - 2475.0).abs() < 4.0 * sd);
    }

    #[test]
    fn er_fixed_total_spreads_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = er_fixed_total_budget(30, 0.2, 1000, &mut rng).unwrap();
        assert_eq!(b.total(), 1000);
        let weights: Vec<u64> = b.edges().map(|e| e.2).collect();
        let (lo, hi) = (weights.iter().min().unwrap(), weights.iter().max().unwrap());
        assert!(hi - lo <= 1);
    }

    proptest! {
        #[test]
        fn budgets_are_exact(k in 2usize..14, extra in 0u64..400, kind_ix in 0usize..6, seed in 0u64..100) {
            let kinds = [
                TopologyKind::Complete,
                TopologyKind::Cycle,
                TopologyKind::Star,
                TopologyKind::Chain,
                TopologyKind::RandomTree,
                TopologyKind::ErdosRenyi,
            ];
            let topo = Topology::new(kinds[kind_ix], k).with_seed(seed).with_p(0.5);
            let edges = topo.edges().unwrap().len() as u64;
            let total = edges + extra;
            let b = build_budget(&topo, total).unwrap();
            if edges == 0 {
                prop_assert_eq!(b.total(), 0);
            } else {
                prop_assert_eq!(b.total(), total);
            }
            for i in 0..k {
                prop_assert_eq!(b.get(i, i), 0);
                for j in 0..k {
                    prop_assert_eq!(b.get(i, j), b.get(j, i));
                }
            }
        }

        #[test]
        fn realized_loads_round_trip(loads in prop::collection::vec(0u64..30, 2..8)) {
            let total: u64 = loads.iter().sum();
            let max = *loads.iter().max().unwrap();
            match realize_node_loads(&loads) {
                Ok(b) => {
                    let got: Vec<f64> = b.node_loads();
                    let want: Vec<f64> = loads.iter().map(|&x| x as f64).collect();
                    prop_assert_eq!(got, want);
                }
                Err(_) => prop_assert!(max > total - max),
            }
        }

        #[test]
        fn water_fill_sums(a in prop::collection::vec(0.5f64..20.0, 1..10), total in 0u64..5000) {
            prop_assert_eq!(water_fill(&a, total).iter().sum::<u64>(), total);
        }
    }
}
