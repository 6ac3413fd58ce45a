//! Exhaustive catalogues and seeded random generators for partitions,
//! weights, configurations, trees and chains.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chambers::{HassettWeight, PnWeight, QnWeight};
use crate::configs::{CoincidencePartition, PnConfig, QnConfig, Section};
use crate::curves::{Chain, ChainMark, Mark, PointedTree, TreeEdge};
use crate::index::{set_partitions, IdxSet};
use crate::projline::{int, rat, ProjPoint, Rat};

/// Every coincidence partition of `n` sections.
pub fn qn_partitions(n: usize) -> Vec<CoincidencePartition> {
    set_partitions(n)
        .into_iter()
        .map(|b| CoincidencePartition::from_blocks(n, b))
        .collect()
}

/// Every partition together with every choice of blocks sitting at `0` and `∞`.
pub fn pn_partitions(n: usize) -> Vec<CoincidencePartition> {
    let mut out = Vec::new();
    for blocks in set_partitions(n) {
        let choices: Vec<IdxSet> = std::iter::once(IdxSet::EMPTY)
            .chain(blocks.iter().copied())
            .collect();
        for &j0 in &choices {
            for &jinf in &choices {
                if j0.is_empty() || jinf.is_empty() || j0 != jinf {
                    out.push(CoincidencePartition::with_anchors(
                        n,
                        blocks.clone(),
                        j0,
                        jinf,
                    ));
                }
            }
        }
    }
    out
}

/// All labelled trees on `m` vertices, via Prüfer sequences.
pub fn labelled_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    if m <= 1 {
        return vec![Vec::new()];
    }
    if m == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let len = m - 2;
    let total = m.pow(len as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % m);
            c /= m;
        }
        out.push(prufer_decode(&seq, m));
    }
    out
}

fn prufer_decode(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; m];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &s in seq {
        let leaf = (0..m).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn random_labelled_tree<R: Rng>(m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if m <= 1 {
        return Vec::new();
    }
    if m == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..m - 2).map(|_| rng.gen_range(0..m)).collect();
    prufer_decode(&seq, m)
}

/// Combinatorial type of a pointed tree: the component graph and the
/// component carrying each mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    pub components: usize,
    pub edges: Vec<(usize, usize)>,
    pub marks: Vec<usize>,
}

impl TreeShape {
    fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    fn resident(&self, v: usize) -> usize {
        self.marks.iter().filter(|&&c| c == v).count()
    }

    /// At least three special points on every component.
    pub fn is_gk_stable(&self) -> bool {
        (0..self.components).all(|v| self.degree(v) + self.resident(v) >= 3)
    }

    /// The splits cut out by the edges, each normalized to contain mark 0.
    pub fn splits(&self) -> Vec<IdxSet> {
        let n = self.marks.len();
        let mut out: Vec<IdxSet> = (0..self.edges.len())
            .map(|k| {
                let (a, _) = self.edges[k];
                // components reachable from a without edge k
                let mut seen = vec![false; self.components];
                let mut stack = vec![a];
                seen[a] = true;
                while let Some(v) = stack.pop() {
                    for (j, &(x, y)) in self.edges.iter().enumerate() {
                        if j == k {
                            continue;
                        }
                        let w = if x == v {
                            y
                        } else if y == v {
                            x
                        } else {
                            continue;
                        };
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                let side: IdxSet = (0..n).filter(|&i| seen[self.marks[i]]).collect();
                if side.contains(0) {
                    side
                } else {
                    side.complement(n)
                }
            })
            .collect();
        out.sort();
        out
    }
}

/// All tree shapes with at most `max_components` components; GK-stable
/// shapes only (up to isomorphism) when `stable` is set.
pub fn tree_shapes(n: usize, max_components: usize, stable: bool) -> Vec<TreeShape> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<IdxSet>> = BTreeSet::new();
    for m in 1..=max_components.max(1) {
        for edges in labelled_trees(m) {
            let total = m.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let marks: Vec<usize> = (0..n)
                    .map(|_| {
                        let v = c % m;
                        c /= m;
                        v
                    })
                    .collect();
                let shape = TreeShape {
                    components: m,
                    edges: edges.clone(),
                    marks,
                };
                if stable {
                    if shape.is_gk_stable() && seen.insert(shape.splits()) {
                        out.push(shape);
                    }
                } else {
                    out.push(shape);
                }
            }
        }
    }
    out
}

/// The GK-stable shapes on `n` marks up to isomorphism.
pub fn gk_shapes(n: usize) -> Vec<TreeShape> {
    tree_shapes(n, n.saturating_sub(2).max(1), true)
}

/// A random GK-stable shape with `n ≥ 3` marks.
pub fn random_gk_shape<R: Rng>(n: usize, rng: &mut R) -> TreeShape {
    loop {
        let m = rng.gen_range(1..=n.saturating_sub(2).max(1));
        let edges = random_labelled_tree(m, rng);
        let marks = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let shape = TreeShape {
            components: m,
            edges,
            marks,
        };
        if shape.is_gk_stable() {
            return shape;
        }
    }
}

/// The generator behind every seeded command and suite.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random rational with bounded numerator and denominator.
pub fn random_rat<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-12..=12), rng.gen_range(1..=7))
}

/// A random point of `P^1`, occasionally `∞`.
pub fn random_point<R: Rng>(rng: &mut R) -> ProjPoint {
    if rng.gen_ratio(1, 10) {
        ProjPoint::infinity()
    } else {
        ProjPoint::affine(random_rat(rng))
    }
}

/// `k` pairwise distinct random points.
pub fn distinct_points<R: Rng>(k: usize, rng: &mut R) -> Vec<ProjPoint> {
    let mut out: Vec<ProjPoint> = Vec::with_capacity(k);
    while out.len() < k {
        let p = random_point(rng);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Random node and mark coordinates for a shape; marks on a component are
/// pairwise distinct.
pub fn realize_shape<R: Rng>(shape: &TreeShape, rng: &mut R) -> PointedTree {
    let mut pools: Vec<Vec<ProjPoint>> = (0..shape.components)
        .map(|v| distinct_points(shape.degree(v) + shape.resident(v), rng))
        .collect();
    let edges = shape
        .edges
        .iter()
        .map(|&(a, b)| {
            let at_a = pools[a].pop().expect("enough points");
            let at_b = pools[b].pop().expect("enough points");
            TreeEdge { a, b, at_a, at_b }
        })
        .collect();
    let marks = shape
        .marks
        .iter()
        .enumerate()
        .map(|(label, &c)| Mark {
            label,
            component: c,
            point: pools[c].pop().expect("enough points"),
        })
        .collect();
    PointedTree::new(shape.components, edges, marks).expect("distinct points on every component")
}

/// A random admissible Hassett weight: `0 < a_i ≤ 1`, `Σ a_i > 2`.
pub fn random_hassett_weight<R: Rng>(n: usize, rng: &mut R) -> HassettWeight {
    loop {
        let d: i64 = rng.gen_range(2..=8);
        let a: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(1..=d), d)).collect();
        if a.iter().fold(Rat::zero(), |s, x| s + x) > int(2) {
            return HassettWeight::new(a).expect("admissible");
        }
    }
}

/// A random `a`-stable tree; coincidences among marks are drawn on purpose.
pub fn random_a_stable_tree<R: Rng>(a: &HassettWeight, rng: &mut R) -> PointedTree {
    let n = a.n();
    for _ in 0..1000 {
        let m = rng.gen_range(1..=n.saturating_sub(2).max(1));
        let edges = random_labelled_tree(m, rng);
        let comp: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let shape = TreeShape {
            components: m,
            edges: edges.clone(),
            marks: comp.clone(),
        };
        let mut pools: Vec<Vec<ProjPoint>> = (0..m)
            .map(|v| {
                let res = shape.resident(v);
                let groups = if res == 0 { 0 } else { rng.gen_range(1..=res) };
                distinct_points(shape.degree(v) + groups, rng)
            })
            .collect();
        let tree_edges: Vec<TreeEdge> = edges
            .iter()
            .map(|&(x, y)| TreeEdge {
                a: x,
                b: y,
                at_a: pools[x].pop().unwrap(),
                at_b: pools[y].pop().unwrap(),
            })
            .collect();
        let marks = comp
            .iter()
            .enumerate()
            .map(|(label, &c)| Mark {
                label,
                component: c,
                point: pools[c].choose(rng).expect("a group").clone(),
            })
            .collect();
        if let Ok(t) = PointedTree::new(m, tree_edges, marks) {
            if t.is_a_stable(a) {
                return t;
            }
        }
    }
    PointedTree::single(distinct_points(n, rng)).expect("distinct points")
}

/// Component of each mark for every ordered set partition of `n` marks.
pub fn chain_shapes(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for blocks in set_partitions(n) {
        let m = blocks.len();
        let mut order: Vec<usize> = (0..m).collect();
        loop {
            let mut comp = vec![0; n];
            for (pos, &b) in order.iter().enumerate() {
                for i in blocks[b].iter() {
                    comp[i] = pos;
                }
            }
            out.push(comp);
            if !next_permutation(&mut order) {
                break;
            }
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Random nonzero values for a chain shape; marks on a component coincide now and then.
pub fn realize_chain<R: Rng>(comp: &[usize], rng: &mut R) -> Chain {
    let m = comp.iter().max().map_or(1, |c| c + 1);
    let mut marks: Vec<ChainMark> = Vec::with_capacity(comp.len());
    for (label, &c) in comp.iter().enumerate() {
        let earlier: Vec<&ChainMark> = marks.iter().filter(|mk| mk.component == c).collect();
        let value = if !earlier.is_empty() && rng.gen_ratio(1, 5) {
            earlier.choose(rng).expect("nonempty").value.clone()
        } else {
            loop {
                let v = random_rat(rng);
                if !v.is_zero() {
                    break v;
                }
            }
        };
        marks.push(ChainMark {
            label,
            component: c,
            value,
        });
    }
    Chain::new(m, marks).expect("valid chain")
}

/// A random Losev-Manin stable chain with `n` marks.
pub fn random_chain<R: Rng>(n: usize, rng: &mut R) -> Chain {
    let m = rng.gen_range(1..=n);
    let mut comp: Vec<usize> = (0..m).collect();
    comp.extend((m..n).map(|_| rng.gen_range(0..m)));
    comp.shuffle(rng);
    realize_chain(&comp, rng)
}

/// Random `θ` with `Σθ = 2` and `0 ≤ θ_i ≤ 1`, entries with denominators
/// dividing `Σ k_i` for `k_i ≤ d`; small `d` lands on walls often.
pub fn random_qn_weight<R: Rng>(n: usize, d: i64, rng: &mut R) -> QnWeight {
    loop {
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=d)).collect();
        let s: i64 = k.iter().sum();
        if s == 0 || k.iter().any(|&x| 2 * x > s) {
            continue;
        }
        return QnWeight::new(k.iter().map(|&x| rat(2 * x, s)).collect())
            .expect("in the hypersimplex");
    }
}

/// Random `(η_1, η_2, θ)` in `Δ^1 × Δ^{n-1}` (with `η ≤ 0`).
pub fn random_pn_weight<R: Rng>(n: usize, d: i64, rng: &mut R) -> PnWeight {
    let e = rat(rng.gen_range(0..=d), d);
    let k: Vec<i64> = loop {
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=d)).collect();
        if k.iter().sum::<i64>() > 0 {
            break k;
        }
    };
    let s: i64 = k.iter().sum();
    let theta = k.iter().map(|&x| rat(x, s)).collect();
    PnWeight::new(-e.clone(), e - Rat::one(), theta).expect("in the product of simplices")
}

/// Sections drawn from a small pool, so coincidences are common; zero
/// sections appear with probability `1/zero_odds` each.
pub fn random_sections<R: Rng>(n: usize, zero_odds: u32, rng: &mut R) -> Vec<Section> {
    let pool = distinct_points(rng.gen_range(1..=n), rng);
    (0..n)
        .map(|_| {
            if zero_odds > 0 && rng.gen_ratio(1, zero_odds) {
                Section::Zero
            } else {
                Section::Point(pool.choose(rng).expect("nonempty").clone())
            }
        })
        .collect()
}

pub fn random_qn_config<R: Rng>(n: usize, zero_odds: u32, rng: &mut R) -> QnConfig {
    QnConfig::new(random_sections(n, zero_odds, rng)).expect("n ≥ 3")
}

/// Like [`random_qn_config`], with the anchors `0` and `∞` in the pool now and then.
pub fn random_pn_config<R: Rng>(n: usize, zero_odds: u32, rng: &mut R) -> PnConfig {
    let mut secs = random_sections(n, zero_odds, rng);
    for s in secs.iter_mut() {
        if matches!(s, Section::Point(_)) {
            match rng.gen_range(0..6) {
                0 => *s = Section::Point(ProjPoint::zero()),
                1 => *s = Section::Point(ProjPoint::infinity()),
                _ => {}
            }
        }
    }
    PnConfig::new(secs).expect("n ≥ 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn catalogue_sizes() {
        assert_eq!(labelled_trees(4).len(), 16);
        assert_eq!(labelled_trees(5).len(), 125);
        assert_eq!(gk_shapes(3).len(), 1);
        assert_eq!(gk_shapes(4).len(), 4);
        assert_eq!(gk_shapes(5).len(), 26);
        // ordered Bell numbers
        assert_eq!(chain_shapes(3).len(), 13);
        assert_eq!(chain_shapes(4).len(), 75);
        assert_eq!(qn_partitions(4).len(), 15);
        assert!(pn_partitions(3).iter().all(|p| p.is_valid()));
    }

    #[test]
    fn generators_respect_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..=7 {
            let t = realize_shape(&random_gk_shape(n, &mut rng), &mut rng);
            assert!(t.is_gk_stable());
            let a = random_hassett_weight(n, &mut rng);
            assert!(random_a_stable_tree(&a, &mut rng).is_a_stable(&a));
            assert!(random_chain(n, &mut rng).is_lm_stable());
        }
    }
}
