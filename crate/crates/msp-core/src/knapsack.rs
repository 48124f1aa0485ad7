//! Knapsack family: exact DP, value-scaling approximation scheme,
//! exact multidimensional branch-and-bound, and subset-sum decisions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on DP states (weight axis) for [`kps_exact`].
pub const DEFAULT_DP_STATES: usize = 10_000_000;
/// Default cap on branch-and-bound nodes for [`mkps_exact`].
pub const DEFAULT_BB_NODES: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum KnapsackError {
    #[error("weights must be integral for the exact DP")]
    WeightsNotIntegral,
    #[error("capacity {0} exceeds the DP state limit")]
    CapacityTooLargeForDp(f64),
    #[error("epsilon must lie in (0, 1)")]
    InvalidEpsilon,
    #[error("branch-and-bound node limit exhausted")]
    SearchBudgetExceeded,
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplicity {
    Bounded(u64),
    Unbounded,
}

/// Back-reference from an item to whatever produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItemTag {
    None,
    /// full-vehicle item for (arc, mode)
    Arc { arc: usize, mode: usize },
    /// rest item covering the leftover passengers on an arc
    Rest { arc: usize, mode: usize },
    /// partially filled vehicle carrying `load` passengers
    Partial { arc: usize, mode: usize, load: u64 },
    /// plain positional reference into a source problem
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub value: f64,
    pub weights: Vec<f64>,
    pub multiplicity: Multiplicity,
    pub tag: ItemTag,
}

impl KnapsackItem {
    pub fn new(value: f64, weights: Vec<f64>, multiplicity: Multiplicity, tag: ItemTag) -> Self {
        KnapsackItem { value, weights, multiplicity, tag }
    }

    /// Convenience for one-dimensional 0/1 items.
    pub fn simple(value: f64, weight: f64) -> Self {
        KnapsackItem::new(value, vec![weight], Multiplicity::Bounded(1), ItemTag::None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub items: Vec<KnapsackItem>,
    /// bounds A'_1..A'_r
    pub bounds: Vec<f64>,
    /// target A for decision variants
    pub target: Option<f64>,
}

impl KnapsackInstance {
    pub fn new(
        items: Vec<KnapsackItem>,
        bounds: Vec<f64>,
        target: Option<f64>,
    ) -> Result<Self, KnapsackError> {
        if bounds.is_empty() {
            return Err(KnapsackError::InvalidInstance("at least one bound required".into()));
        }
        if bounds.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(KnapsackError::InvalidInstance("bounds must be finite and >= 0".into()));
        }
        for (i, item) in items.iter().enumerate() {
            if item.weights.len() != bounds.len() {
                return Err(KnapsackError::InvalidInstance(format!(
                    "item {i} has {} weights, expected {}",
                    item.weights.len(),
                    bounds.len()
                )));
            }
            if !item.value.is_finite() || item.value < 0.0 {
                return Err(KnapsackError::InvalidInstance(format!("item {i} has a bad value")));
            }
            if item.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(KnapsackError::InvalidInstance(format!("item {i} has a bad weight")));
            }
            if let Multiplicity::Bounded(0) = item.multiplicity {
                return Err(KnapsackError::InvalidInstance(format!(
                    "item {i} has multiplicity 0"
                )));
            }
        }
        Ok(KnapsackInstance { items, bounds, target })
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    /// Largest usable count of `item` under the bounds alone.
    fn max_count(&self, item: &KnapsackItem) -> Result<u64, KnapsackError> {
        let mut cap = u64::MAX;
        for (j, &w) in item.weights.iter().enumerate() {
            if w > 0.0 {
                cap = cap.min((self.bounds[j] / w).floor() as u64);
            }
        }
        match item.multiplicity {
            Multiplicity::Bounded(m) => Ok(cap.min(m)),
            Multiplicity::Unbounded => {
                if cap == u64::MAX {
                    if item.value > 0.0 {
                        Err(KnapsackError::InvalidInstance(
                            "unbounded item with zero weight and positive value".into(),
                        ))
                    } else {
                        Ok(0)
                    }
                } else {
                    Ok(cap)
                }
            }
        }
    }
}

/// Item counts plus the achieved totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub counts: Vec<u64>,
    pub value: f64,
    pub weights: Vec<f64>,
}

impl Selection {
    pub fn from_counts(inst: &KnapsackInstance, counts: Vec<u64>) -> Self {
        let mut value = 0.0;
        let mut weights = vec![0.0; inst.dimension()];
        for (item, &c) in inst.items.iter().zip(counts.iter()) {
            value += item.value * c as f64;
            for (j, &w) in item.weights.iter().enumerate() {
                weights[j] += w * c as f64;
            }
        }
        Selection { counts, value, weights }
    }

    pub fn empty(inst: &KnapsackInstance) -> Self {
        Selection::from_counts(inst, vec![0; inst.items.len()])
    }

    /// All bounds respected (exact comparison on the DP-integral path,
    /// tolerance-free by construction elsewhere).
    pub fn fits(&self, inst: &KnapsackInstance) -> bool {
        self.weights.iter().zip(inst.bounds.iter()).all(|(w, b)| w <= b)
    }
}

/// One binary-splitting piece: `units` copies of item `item`.
struct Piece {
    item: usize,
    units: u64,
    value: f64,
    weight: f64,
}

fn split_items(inst: &KnapsackInstance) -> Result<Vec<Piece>, KnapsackError> {
    let mut pieces = Vec::new();
    for (i, item) in inst.items.iter().enumerate() {
        let mut remaining = inst.max_count(item)?;
        let mut chunk = 1u64;
        while remaining > 0 {
            let units = chunk.min(remaining);
            pieces.push(Piece {
                item: i,
                units,
                value: item.value * units as f64,
                weight: item.weights[0] * units as f64,
            });
            remaining -= units;
            chunk = chunk.saturating_mul(2);
        }
    }
    Ok(pieces)
}

/// Exact bounded/unbounded knapsack via weight-indexed DP. One weight
/// dimension, integral weights.
pub fn kps_exact(inst: &KnapsackInstance) -> Result<Selection, KnapsackError> {
    kps_exact_with_limit(inst, DEFAULT_DP_STATES)
}

pub fn kps_exact_with_limit(
    inst: &KnapsackInstance,
    max_states: usize,
) -> Result<Selection, KnapsackError> {
    if inst.dimension() != 1 {
        return Err(KnapsackError::PremiseViolated("kps_exact requires r = 1".into()));
    }
    if inst.items.iter().any(|it| it.weights[0].fract() != 0.0) {
        return Err(KnapsackError::WeightsNotIntegral);
    }
    let cap = inst.bounds[0].floor();
    if cap + 1.0 > max_states as f64 {
        return Err(KnapsackError::CapacityTooLargeForDp(cap));
    }
    let cap = cap as usize;
    let pieces = split_items(inst)?;

    // dp[w] = best value with total weight <= w; decisions[p] records the
    // states improved by piece p for backtracking.
    let mut dp = vec![0.0f64; cap + 1];
    let words = cap / 64 + 1;
    let mut decisions: Vec<Vec<u64>> = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        let mut bits = vec![0u64; words];
        let pw = piece.weight as usize;
        if piece.value > 0.0 && pw <= cap {
            for w in (pw..=cap).rev() {
                let cand = dp[w - pw] + piece.value;
                if cand > dp[w] {
                    dp[w] = cand;
                    bits[w / 64] |= 1 << (w % 64);
                }
            }
        }
        decisions.push(bits);
    }

    let mut counts = vec![0u64; inst.items.len()];
    let mut w = cap;
    for (p, piece) in pieces.iter().enumerate().rev() {
        if decisions[p][w / 64] >> (w % 64) & 1 == 1 {
            counts[piece.item] += piece.units;
            w -= piece.weight as usize;
        }
    }
    Ok(Selection::from_counts(inst, counts))
}

/// Value-scaling approximation scheme: returned value is at least
/// `(1 - epsilon)` times the optimum, weight within the bound.
pub fn kps_fptas(inst: &KnapsackInstance, epsilon: f64) -> Result<Selection, KnapsackError> {
    if inst.dimension() != 1 {
        return Err(KnapsackError::PremiseViolated("kps_fptas requires r = 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(KnapsackError::InvalidEpsilon);
    }
    let pieces = split_items(inst)?;
    let s_max = pieces.iter().map(|p| p.value).fold(0.0f64, f64::max);
    if s_max == 0.0 || pieces.is_empty() {
        return Ok(Selection::empty(inst));
    }
    let k = epsilon * s_max / pieces.len() as f64;
    let scaled: Vec<u64> = pieces.iter().map(|p| (p.value / k).floor() as u64).collect();
    let v_total: u64 = scaled.iter().sum();

    // dp[v] = least weight reaching scaled value exactly v
    let mut dp = vec![f64::INFINITY; v_total as usize + 1];
    dp[0] = 0.0;
    let words = v_total as usize / 64 + 1;
    let mut decisions: Vec<Vec<u64>> = Vec::with_capacity(pieces.len());
    let cap = inst.bounds[0];
    for (p, piece) in pieces.iter().enumerate() {
        let mut bits = vec![0u64; words];
        let sv = scaled[p] as usize;
        if sv > 0 {
            for v in (sv..=v_total as usize).rev() {
                let cand = dp[v - sv] + piece.weight;
                if cand < dp[v] && cand <= cap {
                    dp[v] = cand;
                    bits[v / 64] |= 1 << (v % 64);
                }
            }
        }
        decisions.push(bits);
    }
    let mut best_v = 0;
    for (v, &w) in dp.iter().enumerate() {
        if w <= cap {
            best_v = v;
        }
    }
    let mut counts = vec![0u64; inst.items.len()];
    let mut v = best_v;
    for (p, piece) in pieces.iter().enumerate().rev() {
        if decisions[p][v / 64] >> (v % 64) & 1 == 1 {
            counts[piece.item] += piece.units;
            v -= scaled[p] as usize;
        }
    }
    Ok(Selection::from_counts(inst, counts))
}

/// Exact multidimensional knapsack by depth-first branch and bound.
/// Among optima, returns the lexicographically smallest count vector.
pub fn mkps_exact(inst: &KnapsackInstance) -> Result<Selection, KnapsackError> {
    mkps_exact_with_limit(inst, DEFAULT_BB_NODES)
}

pub fn mkps_exact_with_limit(
    inst: &KnapsackInstance,
    node_limit: u64,
) -> Result<Selection, KnapsackError> {
    let n = inst.items.len();
    let mut max_counts = Vec::with_capacity(n);
    for item in &inst.items {
        max_counts.push(inst.max_count(item)?);
    }
    // suffix_bound[i] = loosest possible value from items i..
    let mut suffix_bound = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_bound[i] = suffix_bound[i + 1] + inst.items[i].value * max_counts[i] as f64;
    }

    struct Search<'a> {
        inst: &'a KnapsackInstance,
        max_counts: &'a [u64],
        suffix_bound: &'a [f64],
        counts: Vec<u64>,
        slack: Vec<f64>,
        best: Option<(f64, Vec<u64>)>,
        nodes: u64,
        node_limit: u64,
    }

    impl Search<'_> {
        fn dfs(&mut self, i: usize, value: f64) -> Result<(), KnapsackError> {
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return Err(KnapsackError::SearchBudgetExceeded);
            }
            if let Some((best_value, _)) = &self.best {
                // equal-value completions found later are lexicographically
                // larger, so <= prunes without losing the tie-break
                if value + self.suffix_bound[i] <= *best_value {
                    return Ok(());
                }
            }
            if i == self.inst.items.len() {
                self.best = Some((value, self.counts.clone()));
                return Ok(());
            }
            let item = &self.inst.items[i];
            let mut fit = self.max_counts[i];
            for (j, &w) in item.weights.iter().enumerate() {
                if w > 0.0 {
                    fit = fit.min((self.slack[j] / w).floor() as u64);
                }
            }
            for c in 0..=fit {
                self.counts[i] = c;
                if c > 0 {
                    for (j, &w) in item.weights.iter().enumerate() {
                        self.slack[j] -= w;
                    }
                }
                self.dfs(i + 1, value + item.value * c as f64)?;
            }
            for (j, &w) in item.weights.iter().enumerate() {
                self.slack[j] += w * fit as f64;
            }
            self.counts[i] = 0;
            Ok(())
        }
    }

    let mut search = Search {
        inst,
        max_counts: &max_counts,
        suffix_bound: &suffix_bound,
        counts: vec![0; n],
        slack: inst.bounds.clone(),
        best: None,
        nodes: 0,
        node_limit,
    };
    search.dfs(0, 0.0)?;
    let (_, counts) = search.best.expect("the empty selection is always explored");
    Ok(Selection::from_counts(inst, counts))
}

/// SSUM/ESUM decision: is there a 0/1 selection with sum in `[A, A']`
/// (`exact`: sum equal to A)? Returns a lexicographically-first witness.
pub fn subset_sum_decide(
    inst: &KnapsackInstance,
    exact: bool,
) -> Result<(bool, Option<Selection>), KnapsackError> {
    if inst.dimension() != 1 {
        return Err(KnapsackError::PremiseViolated("subset_sum requires r = 1".into()));
    }
    for (i, item) in inst.items.iter().enumerate() {
        if item.value != item.weights[0] {
            return Err(KnapsackError::PremiseViolated(format!(
                "item {i} has value != weight"
            )));
        }
    }
    let lo = match inst.target {
        Some(a) => a,
        None => return Err(KnapsackError::PremiseViolated("target A is required".into())),
    };
    let hi = if exact { lo } else { inst.bounds[0] };
    let n = inst.items.len();
    let values: Vec<f64> = inst.items.iter().map(|it| it.value).collect();
    let mut suffix = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + values[i];
    }

    fn dfs(
        i: usize,
        sum: f64,
        lo: f64,
        hi: f64,
        values: &[f64],
        suffix: &[f64],
        picked: &mut Vec<u64>,
    ) -> bool {
        if sum > hi || sum + suffix[i] < lo {
            return false;
        }
        if sum >= lo {
            return true;
        }
        if i == values.len() {
            return false;
        }
        picked[i] = 1;
        if dfs(i + 1, sum + values[i], lo, hi, values, suffix, picked) {
            return true;
        }
        picked[i] = 0;
        dfs(i + 1, sum, lo, hi, values, suffix, picked)
    }

    let mut picked = vec![0u64; n];
    if dfs(0, 0.0, lo, hi, &values, &suffix, &mut picked) {
        Ok((true, Some(Selection::from_counts(inst, picked))))
    } else {
        Ok((false, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn simple_instance(items: &[(f64, f64)], bound: f64) -> KnapsackInstance {
        KnapsackInstance::new(
            items.iter().map(|&(s, w)| KnapsackItem::simple(s, w)).collect(),
            vec![bound],
            None,
        )
        .unwrap()
    }

    /// Exhaustive optimum for bounded one-dimensional instances.
    fn brute_optimum(inst: &KnapsackInstance) -> f64 {
        fn rec(inst: &KnapsackInstance, i: usize, slack: f64, value: f64, best: &mut f64) {
            if value > *best {
                *best = value;
            }
            if i == inst.items.len() {
                return;
            }
            let item = &inst.items[i];
            let cap = match item.multiplicity {
                Multiplicity::Bounded(m) => m,
                Multiplicity::Unbounded => {
                    if item.weights[0] > 0.0 {
                        (slack / item.weights[0]).floor() as u64
                    } else {
                        0
                    }
                }
            };
            for c in 0..=cap {
                let w = item.weights[0] * c as f64;
                if w > slack {
                    break;
                }
                rec(inst, i + 1, slack - w, value + item.value * c as f64, best);
            }
        }
        let mut best = 0.0;
        rec(inst, 0, inst.bounds[0], 0.0, &mut best);
        best
    }

    #[test]
    fn kps_exact_textbook_triple() {
        // exhaustive enumeration gives 220 = 100 + 120
        let inst = simple_instance(&[(60.0, 10.0), (100.0, 20.0), (120.0, 30.0)], 50.0);
        let sel = kps_exact(&inst).unwrap();
        assert_eq!(sel.value, 220.0);
        assert_eq!(sel.counts, vec![0, 1, 1]);
        assert!(sel.fits(&inst));
    }

    #[test]
    fn kps_exact_empty() {
        let inst = simple_instance(&[], 10.0);
        let sel = kps_exact(&inst).unwrap();
        assert_eq!(sel.value, 0.0);
        assert!(sel.counts.is_empty());
    }

    #[test]
    fn kps_exact_unbounded_single() {
        let inst = KnapsackInstance::new(
            vec![KnapsackItem::new(3.0, vec![2.0], Multiplicity::Unbounded, ItemTag::None)],
            vec![7.0],
            None,
        )
        .unwrap();
        let sel = kps_exact(&inst).unwrap();
        assert_eq!(sel.counts, vec![3]);
        assert_eq!(sel.value, 9.0);
    }

    #[test]
    fn kps_exact_rejects_fractional_weights() {
        let inst = simple_instance(&[(1.0, 0.5)], 3.0);
        assert_eq!(kps_exact(&inst).unwrap_err(), KnapsackError::WeightsNotIntegral);
    }

    #[test]
    fn kps_exact_respects_state_limit() {
        let inst = simple_instance(&[(1.0, 1.0)], 100.0);
        assert!(matches!(
            kps_exact_with_limit(&inst, 50).unwrap_err(),
            KnapsackError::CapacityTooLargeForDp(_)
        ));
    }

    #[test]
    fn kps_exact_matches_enumeration_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let items: Vec<KnapsackItem> = (0..n)
                .map(|_| {
                    KnapsackItem::new(
                        rng.gen_range(0..=30) as f64,
                        vec![rng.gen_range(0..=12) as f64],
                        Multiplicity::Bounded(rng.gen_range(1..=3)),
                        ItemTag::None,
                    )
                })
                .collect();
            let inst =
                KnapsackInstance::new(items, vec![rng.gen_range(0..=40) as f64], None).unwrap();
            let sel = kps_exact(&inst).unwrap();
            assert_eq!(sel.value, brute_optimum(&inst));
            assert!(sel.fits(&inst));
        }
    }

    #[test]
    fn fptas_single_fitting_item_is_exact() {
        let inst = simple_instance(&[(5.0, 3.0)], 4.0);
        let sel = kps_fptas(&inst, 0.5).unwrap();
        assert_eq!(sel.value, 5.0);
    }

    #[test]
    fn fptas_zero_bound_is_empty() {
        let inst = simple_instance(&[(5.0, 3.0)], 0.0);
        let sel = kps_fptas(&inst, 0.5).unwrap();
        assert_eq!(sel.value, 0.0);
    }

    #[test]
    fn fptas_rejects_bad_epsilon() {
        let inst = simple_instance(&[(5.0, 3.0)], 4.0);
        assert_eq!(kps_fptas(&inst, 0.0).unwrap_err(), KnapsackError::InvalidEpsilon);
        assert_eq!(kps_fptas(&inst, 1.0).unwrap_err(), KnapsackError::InvalidEpsilon);
    }

    #[test]
    fn fptas_within_guarantee_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &eps in &[0.3, 0.1] {
            for _ in 0..60 {
                let n = rng.gen_range(1..=7);
                let items: Vec<KnapsackItem> = (0..n)
                    .map(|_| {
                        KnapsackItem::new(
                            rng.gen_range(0..=50) as f64,
                            vec![rng.gen_range(1..=15) as f64],
                            Multiplicity::Bounded(rng.gen_range(1..=2)),
                            ItemTag::None,
                        )
                    })
                    .collect();
                let inst =
                    KnapsackInstance::new(items, vec![rng.gen_range(0..=40) as f64], None).unwrap();
                let exact = kps_exact(&inst).unwrap();
                let approx = kps_fptas(&inst, eps).unwrap();
                assert!(approx.fits(&inst));
                assert!(
                    approx.value >= (1.0 - eps) * exact.value - 1e-9,
                    "eps={eps}: {} < {}",
                    approx.value,
                    exact.value
                );
            }
        }
    }

    #[test]
    fn mkps_two_dimensional_example() {
        // all four subsets enumerated by hand: only item 1 fits alone
        let inst = KnapsackInstance::new(
            vec![
                KnapsackItem::new(5.0, vec![2.0, 3.0], Multiplicity::Bounded(1), ItemTag::None),
                KnapsackItem::new(4.0, vec![3.0, 1.0], Multiplicity::Bounded(1), ItemTag::None),
            ],
            vec![4.0, 3.0],
            None,
        )
        .unwrap();
        let sel = mkps_exact(&inst).unwrap();
        assert_eq!(sel.counts, vec![1, 0]);
        assert_eq!(sel.value, 5.0);
    }

    #[test]
    fn mkps_zero_bounds_empty() {
        let inst = KnapsackInstance::new(
            vec![KnapsackItem::new(5.0, vec![2.0, 3.0], Multiplicity::Bounded(1), ItemTag::None)],
            vec![0.0, 0.0],
            None,
        )
        .unwrap();
        let sel = mkps_exact(&inst).unwrap();
        assert_eq!(sel.counts, vec![0]);
    }

    #[test]
    fn mkps_agrees_with_kps_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let items: Vec<KnapsackItem> = (0..n)
                .map(|_| {
                    KnapsackItem::new(
                        rng.gen_range(0..=30) as f64,
                        vec![rng.gen_range(0..=12) as f64],
                        Multiplicity::Bounded(rng.gen_range(1..=3)),
                        ItemTag::None,
                    )
                })
                .collect();
            let inst =
                KnapsackInstance::new(items, vec![rng.gen_range(0..=35) as f64], None).unwrap();
            let a = kps_exact(&inst).unwrap();
            let b = mkps_exact(&inst).unwrap();
            assert_eq!(a.value, b.value);
            assert!(b.fits(&inst));
        }
    }

    #[test]
    fn mkps_node_limit_enforced() {
        let items: Vec<KnapsackItem> = (0..20)
            .map(|i| KnapsackItem::new(1.0 + i as f64, vec![1.0], Multiplicity::Bounded(3), ItemTag::None))
            .collect();
        let inst = KnapsackInstance::new(items, vec![30.0], None).unwrap();
        assert_eq!(
            mkps_exact_with_limit(&inst, 10).unwrap_err(),
            KnapsackError::SearchBudgetExceeded
        );
    }

    #[test]
    fn mkps_lexicographic_tie_break() {
        // two identical items, bound fits one: pick the earlier one
        let inst = KnapsackInstance::new(
            vec![KnapsackItem::simple(4.0, 3.0), KnapsackItem::simple(4.0, 3.0)],
            vec![3.0],
            None,
        )
        .unwrap();
        let sel = mkps_exact(&inst).unwrap();
        assert_eq!(sel.counts, vec![0, 1]);
    }

    fn ssum_instance(values: &[f64], a: f64, a_prime: f64) -> KnapsackInstance {
        KnapsackInstance::new(
            values.iter().map(|&s| KnapsackItem::simple(s, s)).collect(),
            vec![a_prime],
            Some(a),
        )
        .unwrap()
    }

    #[test]
    fn esum_hits_target() {
        let inst = ssum_instance(&[1.0, 2.0, 3.0], 4.0, 4.0);
        let (ok, witness) = subset_sum_decide(&inst, true).unwrap();
        assert!(ok);
        assert_eq!(witness.unwrap().counts, vec![1, 0, 1]);
    }

    #[test]
    fn esum_misses_target() {
        let inst = ssum_instance(&[2.0, 4.0], 5.0, 5.0);
        let (ok, witness) = subset_sum_decide(&inst, true).unwrap();
        assert!(!ok);
        assert!(witness.is_none());
    }

    #[test]
    fn ssum_empty_zero_target() {
        let inst = ssum_instance(&[], 0.0, 0.0);
        let (ok, witness) = subset_sum_decide(&inst, false).unwrap();
        assert!(ok);
        assert_eq!(witness.unwrap().counts, Vec::<u64>::new());
    }

    #[test]
    fn ssum_rejects_mismatched_items() {
        let inst = KnapsackInstance::new(
            vec![KnapsackItem::simple(2.0, 3.0)],
            vec![5.0],
            Some(2.0),
        )
        .unwrap();
        assert!(matches!(
            subset_sum_decide(&inst, false).unwrap_err(),
            KnapsackError::PremiseViolated(_)
        ));
    }
}
