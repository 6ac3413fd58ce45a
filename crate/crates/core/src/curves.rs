//! Stable pointed trees and chains of projective lines, their chart
//! coordinates, the functor conditions on chart families, and
//! reconstruction of the curve from a family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chambers::{
    cover_check, hassett_polytope, stability_polytope, HassettWeight, Mode, Polytope, StabPolytope,
};
use crate::configs::{glue_fiber, CoincidencePartition, Config, GluedFiber, QnConfig};
use crate::error::{Error, Result};
use crate::index::IdxSet;
use crate::projline::{moebius_apply, moebius_from_triple, pp_eq, rat_serde, ProjPoint, Rat};

/// Largest number of marks supported by the index sets.
pub const MAX_MARKS: usize = 31;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    /// Node point on component `a`.
    pub at_a: ProjPoint,
    /// Node point on component `b`.
    pub at_b: ProjPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    #[serde(with = "crate::index::one_based")]
    pub label: usize,
    pub component: usize,
    pub point: ProjPoint,
}

/// A tree of projective lines with marked points. Components are `0..m`;
/// marks are sorted by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct PointedTree {
    components: usize,
    edges: Vec<TreeEdge>,
    marks: Vec<Mark>,
}

#[derive(Deserialize)]
struct RawTree {
    components: usize,
    edges: Vec<TreeEdge>,
    marks: Vec<Mark>,
}

impl TryFrom<RawTree> for PointedTree {
    type Error = Error;
    fn try_from(r: RawTree) -> Result<Self> {
        PointedTree::new(r.components, r.edges, r.marks)
    }
}

impl PointedTree {
    /// Validates the tree shape, node distinctness and that no mark sits on a node.
    pub fn new(components: usize, edges: Vec<TreeEdge>, mut marks: Vec<Mark>) -> Result<Self> {
        let bad = |m: &str| Err(Error::Invalid(m.to_string()));
        if components == 0 {
            return bad("a tree needs at least one component");
        }
        if edges.len() + 1 != components {
            return bad("a tree on m components has m - 1 edges");
        }
        let mut parent: Vec<usize> = (0..components).collect();
        fn root(p: &mut Vec<usize>, mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &edges {
            if e.a >= components || e.b >= components || e.a == e.b {
                return bad("edge endpoints must be distinct components");
            }
            let (ra, rb) = (root(&mut parent, e.a), root(&mut parent, e.b));
            if ra == rb {
                return bad("edges contain a cycle");
            }
            parent[ra] = rb;
        }
        marks.sort_by_key(|m| m.label);
        if marks.windows(2).any(|w| w[0].label == w[1].label) {
            return bad("mark labels must be distinct");
        }
        if marks
            .iter()
            .any(|m| m.label >= MAX_MARKS || m.component >= components)
        {
            return bad("mark label or component out of range");
        }
        let tree = PointedTree {
            components,
            edges,
            marks,
        };
        for v in 0..components {
            let nodes = tree.node_points(v);
            for (i, p) in nodes.iter().enumerate() {
                if nodes[..i].iter().any(|q| pp_eq(p, q)) {
                    return bad("node points on a component must be distinct");
                }
            }
            for m in tree.marks.iter().filter(|m| m.component == v) {
                if nodes.iter().any(|q| pp_eq(&m.point, q)) {
                    return bad("marks must not sit on nodes");
                }
            }
        }
        Ok(tree)
    }

    /// A single component carrying the given points as marks `0..n`.
    pub fn single(points: Vec<ProjPoint>) -> Result<Self> {
        let marks = points
            .into_iter()
            .enumerate()
            .map(|(label, point)| Mark {
                label,
                component: 0,
                point,
            })
            .collect();
        PointedTree::new(1, Vec::new(), marks)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn n(&self) -> usize {
        self.marks.len()
    }

    pub fn labels(&self) -> IdxSet {
        self.marks.iter().map(|m| m.label).collect()
    }

    /// Whether the labels are exactly `0..n`.
    fn has_contiguous_labels(&self) -> bool {
        self.labels() == IdxSet::full(self.n())
    }

    /// `(neighbour, node point on v)` for every edge at `v`.
    pub fn neighbours(&self, v: usize) -> Vec<(usize, ProjPoint)> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.a == v {
                    Some((e.b, e.at_a.clone()))
                } else if e.b == v {
                    Some((e.a, e.at_b.clone()))
                } else {
                    None
                }
            })
            .collect()
    }

    fn node_points(&self, v: usize) -> Vec<ProjPoint> {
        self.neighbours(v).into_iter().map(|(_, p)| p).collect()
    }

    fn resident(&self, v: usize) -> impl Iterator<Item = &Mark> {
        self.marks.iter().filter(move |m| m.component == v)
    }

    /// Position of every mark as seen from component `v`: its own point if
    /// it lies on `v`, otherwise the node point leading to it. Sorted by label.
    pub fn positions(&self, v: usize) -> Vec<(usize, ProjPoint)> {
        let mut entry: Vec<Option<ProjPoint>> = vec![None; self.components];
        let mut stack: Vec<(usize, usize, ProjPoint)> = self
            .neighbours(v)
            .into_iter()
            .map(|(w, p)| (w, v, p))
            .collect();
        while let Some((w, from, p)) = stack.pop() {
            entry[w] = Some(p.clone());
            for (x, _) in self.neighbours(w) {
                if x != from {
                    stack.push((x, w, p.clone()));
                }
            }
        }
        self.marks
            .iter()
            .map(|m| {
                let p = if m.component == v {
                    m.point.clone()
                } else {
                    entry[m.component].clone().expect("connected")
                };
                (m.label, p)
            })
            .collect()
    }

    /// Marks on the far side of each edge at `v`, keyed by neighbour.
    pub fn branches(&self, v: usize) -> Vec<(usize, IdxSet)> {
        self.neighbours(v)
            .into_iter()
            .map(|(w, _)| {
                let mut set = IdxSet::EMPTY;
                let mut stack = vec![(w, v)];
                while let Some((x, from)) = stack.pop() {
                    for m in self.resident(x) {
                        set.insert(m.label);
                    }
                    for (y, _) in self.neighbours(x) {
                        if y != from {
                            stack.push((y, x));
                        }
                    }
                }
                (w, set)
            })
            .collect()
    }

    /// Grothendieck-Knudsen stability: distinct marks and at least three
    /// special points per component.
    pub fn is_gk_stable(&self) -> bool {
        if self.n() < 3 {
            return false;
        }
        (0..self.components).all(|v| {
            let pts: Vec<&ProjPoint> = self.resident(v).map(|m| &m.point).collect();
            let distinct = pts
                .iter()
                .enumerate()
                .all(|(i, p)| !pts[..i].iter().any(|q| pp_eq(p, q)));
            distinct && pts.len() + self.neighbours(v).len() >= 3
        })
    }

    /// Hassett stability for weights `a` indexed by label.
    pub fn is_a_stable(&self, a: &HassettWeight) -> bool {
        if !self.has_contiguous_labels() || a.n() != self.n() {
            return false;
        }
        let w = a.a();
        for v in 0..self.components {
            let res: Vec<&Mark> = self.resident(v).collect();
            for m in &res {
                let coincident = res
                    .iter()
                    .filter(|o| pp_eq(&o.point, &m.point))
                    .fold(Rat::zero(), |acc, o| acc + &w[o.label]);
                if coincident > Rat::one() {
                    return false;
                }
            }
            let degree = res.iter().fold(
                Rat::from_integer(self.neighbours(v).len().into()),
                |acc, m| acc + &w[m.label],
            );
            if degree <= Rat::from_integer(2.into()) {
                return false;
            }
        }
        true
    }

    /// The chart of the component separating the three marks of `t`,
    /// normalized to `(0, ∞, 1)`; sections ordered by label.
    pub fn contract_to_chart(&self, t: [usize; 3]) -> Option<QnConfig> {
        let labels: Vec<usize> = self.labels().to_vec();
        let idx: Vec<usize> = t
            .iter()
            .map(|l| labels.iter().position(|x| x == l))
            .collect::<Option<_>>()?;
        (0..self.components).find_map(|v| {
            let pos: Vec<ProjPoint> = self.positions(v).into_iter().map(|(_, p)| p).collect();
            chart_on(&pos, [idx[0], idx[1], idx[2]])
        })
    }
}

/// Normalizes `pos` by the triple when its three points are distinct.
fn chart_on(pos: &[ProjPoint], t: [usize; 3]) -> Option<QnConfig> {
    let m = moebius_from_triple(&pos[t[0]], &pos[t[1]], &pos[t[2]]).ok()?;
    QnConfig::from_points(pos.iter().map(|p| moebius_apply(&m, p)).collect()).ok()
}

/// `contract_to_chart` as a free function.
pub fn contract_to_chart(tree: &PointedTree, t: [usize; 3]) -> Option<QnConfig> {
    tree.contract_to_chart(t)
}

/// Forgets the marks outside `keep` and contracts components with fewer
/// than three special points.
pub fn contract_gamma_i(tree: &PointedTree, keep: IdxSet) -> Result<PointedTree> {
    if keep.intersection(tree.labels()).len() < 3 {
        return Err(Error::Invalid(
            "contraction needs at least three kept marks".into(),
        ));
    }
    let mut alive = vec![true; tree.components];
    let mut edges: Vec<TreeEdge> = tree.edges.clone();
    let mut marks: Vec<Mark> = tree
        .marks
        .iter()
        .filter(|m| keep.contains(m.label))
        .cloned()
        .collect();
    loop {
        let found = (0..tree.components).filter(|&v| alive[v]).find_map(|v| {
            let inc: Vec<usize> = (0..edges.len())
                .filter(|&k| edges[k].a == v || edges[k].b == v)
                .collect();
            let nm = marks.iter().filter(|m| m.component == v).count();
            (inc.len() + nm < 3 && !inc.is_empty()).then_some((v, inc))
        });
        let Some((v, inc)) = found else { break };
        alive[v] = false;
        let other = |e: &TreeEdge| {
            if e.a == v {
                (e.b, e.at_b.clone())
            } else {
                (e.a, e.at_a.clone())
            }
        };
        if inc.len() == 1 {
            let (w, at_w) = other(&edges[inc[0]]);
            for m in marks.iter_mut().filter(|m| m.component == v) {
                m.component = w;
                m.point = at_w.clone();
            }
            edges.remove(inc[0]);
        } else {
            let (u, at_u) = other(&edges[inc[0]]);
            let (w, at_w) = other(&edges[inc[1]]);
            edges.remove(inc[1]);
            edges.remove(inc[0]);
            edges.push(TreeEdge {
                a: u,
                b: w,
                at_a: at_u,
                at_b: at_w,
            });
        }
    }
    let mut new_index = vec![usize::MAX; tree.components];
    let mut m = 0;
    for v in 0..tree.components {
        if alive[v] {
            new_index[v] = m;
            m += 1;
        }
    }
    for e in &mut edges {
        e.a = new_index[e.a];
        e.b = new_index[e.b];
    }
    for mk in &mut marks {
        mk.component = new_index[mk.component];
    }
    PointedTree::new(m, edges, marks)
}

/// `w = Σ_l min(1, Σ_{i∈J_l} a_i)`.
pub fn hassett_weight_w(partition: &CoincidencePartition, a: &HassettWeight) -> Rat {
    partition.blocks.iter().fold(Rat::zero(), |acc, b| {
        let s = b.iter().fold(Rat::zero(), |s, i| s + &a.a()[i]);
        acc + if s > Rat::one() { Rat::one() } else { s }
    })
}

/// Which moduli problem a chart family describes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMode {
    Gk,
    Hassett { a: HassettWeight },
    Lm,
}

impl fmt::Display for FamilyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyMode::Gk => f.write_str("gk"),
            FamilyMode::Hassett { .. } => f.write_str("hassett"),
            FamilyMode::Lm => f.write_str("lm"),
        }
    }
}

/// Chart label: an ordered triple for trees, a single mark for chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartLabel {
    Triple([usize; 3]),
    Index(usize),
}

impl fmt::Display for ChartLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartLabel::Triple([a, b, c]) => write!(f, "({},{},{})", a + 1, b + 1, c + 1),
            ChartLabel::Index(i) => write!(f, "({})", i + 1),
        }
    }
}

/// Normalized chart configurations indexed by chart label. The key set is
/// the set of active charts. Charts are kept (and serialized) in
/// lexicographic label order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct LimitFamily {
    pub mode: FamilyMode,
    pub n: usize,
    pub charts: BTreeMap<ChartLabel, Vec<ProjPoint>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawChart {
    #[serde(with = "crate::index::one_based_vec")]
    chart: Vec<usize>,
    sections: Vec<ProjPoint>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawFamily {
    mode: FamilyMode,
    n: usize,
    charts: Vec<RawChart>,
}

impl TryFrom<RawFamily> for LimitFamily {
    type Error = Error;
    fn try_from(r: RawFamily) -> Result<Self> {
        let mut charts = BTreeMap::new();
        for c in r.charts {
            let label = match (&r.mode, c.chart.as_slice()) {
                (FamilyMode::Lm, [i]) => ChartLabel::Index(*i),
                (FamilyMode::Gk | FamilyMode::Hassett { .. }, [a, b, c]) => {
                    ChartLabel::Triple([*a, *b, *c])
                }
                _ => {
                    return Err(Error::Invalid(
                        "chart label does not fit the family mode".into(),
                    ))
                }
            };
            if c.sections.len() != r.n {
                return Err(Error::Invalid(format!(
                    "chart {label} has {} sections, expected {}",
                    c.sections.len(),
                    r.n
                )));
            }
            if charts.insert(label, c.sections).is_some() {
                return Err(Error::Invalid(format!("chart {label} listed twice")));
            }
        }
        Ok(LimitFamily {
            mode: r.mode,
            n: r.n,
            charts,
        })
    }
}

impl From<LimitFamily> for RawFamily {
    fn from(f: LimitFamily) -> Self {
        let charts = f
            .charts
            .into_iter()
            .map(|(label, sections)| RawChart {
                chart: match label {
                    ChartLabel::Triple(t) => t.to_vec(),
                    ChartLabel::Index(i) => vec![i],
                },
                sections,
            })
            .collect();
        RawFamily {
            mode: f.mode,
            n: f.n,
            charts,
        }
    }
}

/// Chart coordinates of a GK- or Hassett-stable tree.
pub fn moduli_coordinates(tree: &PointedTree, mode: &FamilyMode) -> Result<LimitFamily> {
    match mode {
        FamilyMode::Gk if !tree.is_gk_stable() || !tree.has_contiguous_labels() => {
            return Err(Error::UnstableInput(
                "tree is not Grothendieck-Knudsen stable".into(),
            ))
        }
        FamilyMode::Hassett { a } if !tree.is_a_stable(a) => {
            return Err(Error::UnstableInput("tree is not a-stable".into()))
        }
        FamilyMode::Lm => return Err(Error::Invalid("chains use lm_moduli_coordinates".into())),
        _ => {}
    }
    let n = tree.n();
    let mut charts = BTreeMap::new();
    for v in 0..tree.components {
        let pos: Vec<ProjPoint> = tree.positions(v).into_iter().map(|(_, p)| p).collect();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if let Some(c) = chart_on(&pos, [i, j, k]) {
                        charts.insert(
                            ChartLabel::Triple([i, j, k]),
                            c.points().expect("no zero sections"),
                        );
                    }
                }
            }
        }
    }
    Ok(LimitFamily {
        mode: mode.clone(),
        n,
        charts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMark {
    #[serde(with = "crate::index::one_based")]
    pub label: usize,
    pub component: usize,
    /// Nonzero affine coordinate on the component.
    #[serde(with = "rat_serde")]
    pub value: Rat,
}

/// A chain `C_1, …, C_m`: the point `0` of `C_k` meets `∞` of `C_{k+1}`;
/// `s_∞` is `∞` on `C_1` and `s_0` is `0` on `C_m`. Marks are sorted by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawChain")]
pub struct Chain {
    components: usize,
    marks: Vec<ChainMark>,
}

#[derive(Deserialize)]
struct RawChain {
    components: usize,
    marks: Vec<ChainMark>,
}

impl TryFrom<RawChain> for Chain {
    type Error = Error;
    fn try_from(r: RawChain) -> Result<Self> {
        Chain::new(r.components, r.marks)
    }
}

impl Chain {
    pub fn new(components: usize, mut marks: Vec<ChainMark>) -> Result<Self> {
        if components == 0 {
            return Err(Error::Invalid(
                "a chain needs at least one component".into(),
            ));
        }
        marks.sort_by_key(|m| m.label);
        if marks.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(Error::Invalid("mark labels must be distinct".into()));
        }
        if marks
            .iter()
            .any(|m| m.label >= MAX_MARKS || m.component >= components)
        {
            return Err(Error::Invalid(
                "mark label or component out of range".into(),
            ));
        }
        if marks.iter().any(|m| m.value.is_zero()) {
            return Err(Error::Invalid("chain marks avoid 0 and ∞".into()));
        }
        Ok(Chain { components, marks })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn marks(&self) -> &[ChainMark] {
        &self.marks
    }

    pub fn n(&self) -> usize {
        self.marks.len()
    }

    /// Every component carries a mark (coincident marks are allowed).
    pub fn is_lm_stable(&self) -> bool {
        self.n() >= 1 && (0..self.components).all(|k| self.marks.iter().any(|m| m.component == k))
    }

    /// Each component rescaled so that its lowest-labelled mark sits at `1`.
    pub fn canonical(&self) -> Chain {
        let marks = self
            .marks
            .iter()
            .map(|m| {
                let lead = self
                    .marks
                    .iter()
                    .find(|o| o.component == m.component)
                    .expect("own component");
                ChainMark {
                    label: m.label,
                    component: m.component,
                    value: &m.value / &lead.value,
                }
            })
            .collect();
        Chain {
            components: self.components,
            marks,
        }
    }

    pub fn is_isomorphic(&self, other: &Chain) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Losev-Manin chart coordinates of a chain.
pub fn lm_moduli_coordinates(chain: &Chain) -> Result<LimitFamily> {
    if !chain.is_lm_stable() || chain.marks.iter().enumerate().any(|(i, m)| m.label != i) {
        return Err(Error::UnstableInput(
            "chain is not Losev-Manin stable".into(),
        ));
    }
    let mut charts = BTreeMap::new();
    for mi in &chain.marks {
        let secs = chain
            .marks
            .iter()
            .map(|mj| {
                if mj.component > mi.component {
                    ProjPoint::zero()
                } else if mj.component < mi.component {
                    ProjPoint::infinity()
                } else {
                    ProjPoint::affine(&mj.value / &mi.value)
                }
            })
            .collect();
        charts.insert(ChartLabel::Index(mi.label), secs);
    }
    Ok(LimitFamily {
        mode: FamilyMode::Lm,
        n: chain.n(),
        charts,
    })
}

/// One functor condition with its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorReport {
    pub checks: Vec<ConditionCheck>,
}

impl FunctorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn record(&mut self, condition: &str, failure: Option<String>) {
        self.checks.push(ConditionCheck {
            condition: condition.into(),
            passed: failure.is_none(),
            witness: failure,
        });
    }
}

fn triple_orderings([a, b, c]: [usize; 3]) -> [[usize; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// Whether the points at `idx` are pairwise distinct.
fn distinct_at(secs: &[ProjPoint], idx: &[usize]) -> bool {
    idx.iter()
        .enumerate()
        .all(|(k, &i)| idx[..k].iter().all(|&j| !pp_eq(&secs[i], &secs[j])))
}

fn first_failure<I: IntoIterator<Item = Option<String>>>(it: I) -> Option<String> {
    it.into_iter().flatten().next()
}

/// Checks the defining conditions of the functor of the family's moduli
/// problem; every failure carries a concrete witness.
pub fn verify_functor_conditions(family: &LimitFamily) -> FunctorReport {
    match &family.mode {
        FamilyMode::Lm => verify_lm(family),
        FamilyMode::Gk => verify_trees(family, None),
        FamilyMode::Hassett { a } => verify_trees(family, Some(a)),
    }
}

fn shape_failure(family: &LimitFamily) -> Option<String> {
    let n = family.n;
    if n > MAX_MARKS {
        return Some(format!("n = {n} exceeds {MAX_MARKS}"));
    }
    for (label, secs) in &family.charts {
        if secs.len() != n {
            return Some(format!("chart {label} has {} sections", secs.len()));
        }
        let ok = match (label, &family.mode) {
            (ChartLabel::Index(i), FamilyMode::Lm) => *i < n,
            (ChartLabel::Triple(t), FamilyMode::Gk | FamilyMode::Hassett { .. }) => {
                t.iter().all(|&i| i < n) && t[0] != t[1] && t[1] != t[2] && t[0] != t[2]
            }
            _ => false,
        };
        if !ok {
            return Some(format!(
                "chart label {label} does not fit n = {n} and mode {}",
                family.mode
            ));
        }
    }
    None
}

fn verify_trees(family: &LimitFamily, a: Option<&HassettWeight>) -> FunctorReport {
    let mut report = FunctorReport { checks: Vec::new() };
    let n = family.n;
    let shape = shape_failure(family).or_else(|| {
        if n < 3 {
            Some("at least three marks are needed".into())
        } else if a.is_some_and(|a| a.n() != n) {
            Some("Hassett weight length differs from n".into())
        } else if family.charts.is_empty() {
            Some("no active chart".into())
        } else {
            None
        }
    });
    report.record("shape", shape.clone());
    if shape.is_some() {
        return report;
    }
    let charts = &family.charts;
    let get = |t: [usize; 3]| charts.get(&ChartLabel::Triple(t));
    let one = ProjPoint::one();

    // (0) anchors
    report.record(
        "0",
        first_failure(charts.iter().map(|(label, s)| {
            let ChartLabel::Triple([i1, i2, i3]) = *label else {
                unreachable!()
            };
            (!(s[i1].is_zero() && s[i2].is_infinity() && pp_eq(&s[i3], &one)))
                .then(|| format!("chart {label} does not place its triple at 0, ∞, 1"))
        })),
    );

    // (1) permutations of the upper indices, and the four-point relation
    let mut c1 = None;
    for label in charts.keys() {
        let ChartLabel::Triple(t) = *label else {
            unreachable!()
        };
        if let Some(missing) = triple_orderings(t).into_iter().find(|o| get(*o).is_none()) {
            c1 = Some(format!(
                "chart {label} is active but {} is not",
                ChartLabel::Triple(missing)
            ));
            break;
        }
        let [i1, i2, i3] = t;
        let (s, s213, s321) = (
            get(t).unwrap(),
            get([i2, i1, i3]).unwrap(),
            get([i3, i2, i1]).unwrap(),
        );
        for i4 in 0..n {
            let a_ok = s213[i4].c0() * s[i4].c0() == s213[i4].c1() * s[i4].c1();
            let b_ok = s321[i4].c0() * s[i4].c1() == s321[i4].c1() * (s[i4].c1() - s[i4].c0());
            if !a_ok || !b_ok {
                c1 = Some(format!(
                    "permutation relation fails for chart {label} at section {}",
                    i4 + 1
                ));
                break;
            }
        }
        if c1.is_some() {
            break;
        }
        for i4 in (0..n).filter(|i| !t.contains(i)) {
            if let Some(s124) = get([i1, i2, i4]) {
                if s[i4].c0() * s124[i3].c0() != s[i4].c1() * s124[i3].c1() {
                    c1 = Some(format!(
                        "four-point relation fails for charts {label} and {}",
                        ChartLabel::Triple([i1, i2, i4])
                    ));
                    break;
                }
            }
        }
        if c1.is_some() {
            break;
        }
    }
    report.record("1", c1);

    // (2) five-point relation
    let mut c2 = None;
    'outer: for label in charts.keys() {
        let ChartLabel::Triple(t) = *label else {
            unreachable!()
        };
        let [i1, i2, _] = t;
        let s = &charts[label];
        for i4 in (0..n).filter(|i| !t.contains(i)) {
            let Some(s124) = get([i1, i2, i4]) else {
                continue;
            };
            for i5 in (0..n).filter(|&i| !t.contains(&i) && i != i4) {
                let lhs = s[i4].c0() * s[i5].c1() * s124[i5].c0();
                let rhs = s[i4].c1() * s[i5].c0() * s124[i5].c1();
                if lhs != rhs {
                    c2 = Some(format!(
                        "five-point relation fails for charts {label}, {} at sections {}, {}",
                        ChartLabel::Triple([i1, i2, i4]),
                        i4 + 1,
                        i5 + 1
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.record("2", c2);

    // (3) degree of every active chart
    let ones = HassettWeight::ones(n);
    let a_eff = a.unwrap_or(&ones);
    let partitions: Vec<(ChartLabel, CoincidencePartition)> = charts
        .iter()
        .map(|(l, s)| {
            (
                *l,
                QnConfig::from_points(s.clone())
                    .and_then(|c| c.coincidence_partition())
                    .expect("n ≥ 3"),
            )
        })
        .collect();
    report.record(
        "3",
        first_failure(partitions.iter().map(|(l, p)| {
            let w = hassett_weight_w(p, a_eff);
            (w <= Rat::from_integer(2.into())).then(|| format!("chart {l} has w = {w} ≤ 2"))
        })),
    );

    // (4) the chart stability polytopes cover P(a), resp. Δ(2,n)
    let mut distinct: Vec<CoincidencePartition> =
        partitions.iter().map(|(_, p)| p.clone()).collect();
    distinct.sort_by(|x, y| x.blocks.cmp(&y.blocks));
    distinct.dedup();
    let polys: Vec<Polytope> = distinct
        .into_iter()
        .map(|p| {
            stability_polytope(&StabPolytope {
                mode: Mode::Qn,
                partition: p,
            })
            .polytope
        })
        .collect();
    let target = match a {
        Some(a) => hassett_polytope(a),
        None => Polytope::ambient(Mode::Qn, n),
    };
    report.record(
        "4",
        match cover_check(&polys, &target) {
            Ok(r) if r.covered => None,
            Ok(r) => Some(format!(
                "weight {} is in no chart polytope",
                serde_json::to_string(&r.uncovered).unwrap_or_default()
            )),
            Err(e) => Some(format!("covering undecided: {e}")),
        },
    );

    // (5) charts are active wherever their triple is separated
    let mut c5 = None;
    'outer5: for (label, s) in charts {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if distinct_at(s, &[i, j, k]) && get([i, j, k]).is_none() {
                        c5 = Some(format!(
                            "chart {label} separates {} but that chart is inactive",
                            ChartLabel::Triple([i, j, k])
                        ));
                        break 'outer5;
                    }
                }
            }
        }
    }
    report.record("5", c5);

    if a.is_none() {
        let total = n * (n - 1) * (n - 2);
        report.record(
            "gk-all-charts",
            (charts.len() != total)
                .then(|| format!("{} of {total} charts are active", charts.len())),
        );
    }
    report
}

fn verify_lm(family: &LimitFamily) -> FunctorReport {
    let mut report = FunctorReport { checks: Vec::new() };
    let n = family.n;
    let shape = shape_failure(family).or_else(|| {
        (n == 0 || family.charts.len() != n)
            .then(|| format!("{} of {n} charts are present", family.charts.len()))
    });
    report.record("shape", shape.clone());
    if shape.is_some() {
        return report;
    }
    let s = |i: usize| &family.charts[&ChartLabel::Index(i)];
    report.record(
        "lm-diagonal",
        first_failure((0..n).map(|i| {
            (s(i)[i].c0() != s(i)[i].c1()).then(|| format!("chart ({}) has s_i ≠ 1", i + 1))
        })),
    );
    let mut triple = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (sj, si) = (s(j), s(i));
                let lhs = sj[i].c0() * si[k].c0() * sj[k].c1();
                let rhs = sj[i].c1() * si[k].c1() * sj[k].c0();
                if lhs != rhs {
                    triple = Some(format!(
                        "triple relation fails for i={}, j={}, k={}",
                        i + 1,
                        j + 1,
                        k + 1
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.record("lm-triple", triple);
    report
}

/// A curve rebuilt from a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Curve {
    Tree { tree: PointedTree },
    Chain { chain: Chain },
}

fn inconsistent(condition: &str, detail: impl Into<String>) -> Error {
    Error::InconsistentFamily {
        condition: condition.into(),
        detail: detail.into(),
    }
}

fn check_verified(family: &LimitFamily) -> Result<()> {
    let report = verify_functor_conditions(family);
    match report.first_failure() {
        Some(f) => Err(inconsistent(
            &f.condition,
            f.witness.clone().unwrap_or_default(),
        )),
        None => Ok(()),
    }
}

/// Rebuilds the tree or chain whose chart coordinates are `family`.
pub fn reconstruct(family: &LimitFamily) -> Result<Curve> {
    match family.mode {
        FamilyMode::Lm => Ok(Curve::Chain {
            chain: reconstruct_chain(family)?,
        }),
        _ => Ok(Curve::Tree {
            tree: reconstruct_tree(family)?,
        }),
    }
}

/// Whether two configurations with equal coincidence partitions differ by a Möbius map.
fn moebius_equivalent(p: &CoincidencePartition, a: &[ProjPoint], b: &[ProjPoint]) -> bool {
    let t = [0, 1, 2].map(|k| p.blocks[k].min().expect("nonempty block"));
    match (chart_on(a, t), chart_on(b, t)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Rebuilds a stable tree from a GK or Hassett family.
pub fn reconstruct_tree(family: &LimitFamily) -> Result<PointedTree> {
    if family.mode == FamilyMode::Lm {
        return Err(Error::Invalid(
            "chain families use reconstruct_chain".into(),
        ));
    }
    check_verified(family)?;
    let n = family.n;
    // one component per coincidence partition
    let mut groups: Vec<(CoincidencePartition, &Vec<ProjPoint>)> = Vec::new();
    for (label, secs) in &family.charts {
        let part = QnConfig::from_points(secs.clone())?.coincidence_partition()?;
        match groups.iter().find(|(p, _)| *p == part) {
            Some((p, rep)) => {
                if !moebius_equivalent(p, rep, secs) {
                    return Err(inconsistent(
                        "component",
                        format!("chart {label} shares a partition but not a component"),
                    ));
                }
            }
            None => groups.push((part, secs)),
        }
    }
    let full = IdxSet::full(n);
    let point_of = |secs: &[ProjPoint], block: IdxSet| secs[block.min().expect("nonempty")].clone();
    let mut edges = Vec::new();
    let mut edge_blocks: Vec<BTreeSet<IdxSet>> = vec![BTreeSet::new(); groups.len()];
    for g in 0..groups.len() {
        for h in g + 1..groups.len() {
            let pair = groups[g].0.blocks.iter().find_map(|x| {
                groups[h]
                    .0
                    .blocks
                    .iter()
                    .find(|y| x.is_disjoint(**y) && x.union(**y) == full)
                    .map(|y| (*x, *y))
            });
            let Some((x, y)) = pair else { continue };
            // x holds the marks beyond h as seen from g, y those beyond g
            let (i, j) = (y.min().expect("nonempty"), x.min().expect("nonempty"));
            let ca = Config::Qn(QnConfig::from_points(groups[g].1.clone())?);
            let cb = Config::Qn(QnConfig::from_points(groups[h].1.clone())?);
            match glue_fiber(&ca, &cb, Some((i, j))) {
                Ok(GluedFiber::TwoComponents { at_node, .. }) if at_node.is_empty() => {}
                other => {
                    return Err(inconsistent(
                        "gluing",
                        format!("components {g} and {h} do not glue to adjacent lines: {other:?}"),
                    ))
                }
            }
            edges.push(TreeEdge {
                a: g,
                b: h,
                at_a: point_of(groups[g].1, x),
                at_b: point_of(groups[h].1, y),
            });
            edge_blocks[g].insert(x);
            edge_blocks[h].insert(y);
        }
    }
    let mut marks = Vec::with_capacity(n);
    for (g, (part, secs)) in groups.iter().enumerate() {
        for b in part.blocks.iter().filter(|b| !edge_blocks[g].contains(b)) {
            for label in b.iter() {
                marks.push(Mark {
                    label,
                    component: g,
                    point: secs[label].clone(),
                });
            }
        }
    }
    let tree = PointedTree::new(groups.len(), edges, marks)
        .map_err(|e| inconsistent("tree", e.to_string()))?;
    let back = moduli_coordinates(&tree, &family.mode)
        .map_err(|e| inconsistent("stability", e.to_string()))?;
    if back != *family {
        return Err(inconsistent(
            "round-trip",
            "the rebuilt tree has different chart coordinates",
        ));
    }
    Ok(tree)
}

/// Rebuilds a chain from a Losev-Manin family.
pub fn reconstruct_chain(family: &LimitFamily) -> Result<Chain> {
    if family.mode != FamilyMode::Lm {
        return Err(Error::Invalid("tree families use reconstruct_tree".into()));
    }
    check_verified(family)?;
    let n = family.n;
    let s = |i: usize| &family.charts[&ChartLabel::Index(i)];
    let finite = |p: &ProjPoint| !p.is_zero() && !p.is_infinity();
    let mut comp_of = vec![usize::MAX; n];
    let mut leads: Vec<usize> = Vec::new();
    for i in 0..n {
        if comp_of[i] != usize::MAX {
            continue;
        }
        for j in i..n {
            if finite(&s(i)[j]) {
                comp_of[j] = leads.len();
            }
        }
        leads.push(i);
    }
    // earlier components are the ones seen at ∞
    let mut order: Vec<usize> = (0..leads.len()).collect();
    order.sort_by_key(|&g| s(leads[g]).iter().filter(|p| p.is_infinity()).count());
    let mut rank = vec![0; leads.len()];
    for (r, &g) in order.iter().enumerate() {
        rank[g] = r;
    }
    let marks = (0..n)
        .map(|j| {
            let g = comp_of[j];
            ChainMark {
                label: j,
                component: rank[g],
                value: s(leads[g])[j].value().expect("finite"),
            }
        })
        .collect();
    let chain = Chain::new(leads.len(), marks).map_err(|e| inconsistent("chain", e.to_string()))?;
    let back =
        lm_moduli_coordinates(&chain).map_err(|e| inconsistent("stability", e.to_string()))?;
    if back != *family {
        return Err(inconsistent(
            "round-trip",
            "the rebuilt chain has different chart coordinates",
        ));
    }
    Ok(chain)
}

/// Canonical description of one component: the partition its positions
/// induce and the positions normalized by the least marks of its first
/// three blocks.
fn component_key(tree: &PointedTree, v: usize) -> Option<(Vec<IdxSet>, Vec<ProjPoint>)> {
    let pos: Vec<ProjPoint> = tree.positions(v).into_iter().map(|(_, p)| p).collect();
    let labels = tree.labels();
    let part = QnConfig::from_points(pos.clone())
        .ok()?
        .coincidence_partition()
        .ok()?;
    if part.blocks.len() < 3 {
        return None;
    }
    let moved = moebius_equivalent_key(&part, &pos)?;
    // blocks in label terms
    let lbl: Vec<usize> = labels.to_vec();
    let blocks = part
        .blocks
        .iter()
        .map(|b| b.iter().map(|k| lbl[k]).collect())
        .collect();
    Some((blocks, moved))
}

fn moebius_equivalent_key(p: &CoincidencePartition, pos: &[ProjPoint]) -> Option<Vec<ProjPoint>> {
    let t = [0, 1, 2].map(|k| p.blocks[k].min().expect("nonempty block"));
    chart_on(pos, t).and_then(|c| c.points().ok())
}

/// Isomorphism of pointed trees: same marks and, per component, the same
/// configuration up to Möbius maps.
pub fn is_isomorphic(a: &PointedTree, b: &PointedTree) -> bool {
    if a.labels() != b.labels() || a.components != b.components {
        return false;
    }
    let keys = |t: &PointedTree| -> Option<Vec<(Vec<IdxSet>, Vec<ProjPoint>)>> {
        let mut k: Vec<_> = (0..t.components)
            .map(|v| component_key(t, v))
            .collect::<Option<_>>()?;
        k.sort();
        Some(k)
    };
    match (keys(a), keys(b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Tree with `s_0 ↦ 1`, `s_∞ ↦ 2` and chain mark `i ↦ i + 3` (1-based).
pub fn chain_to_hassett_tree(chain: &Chain) -> Result<PointedTree> {
    let m = chain.components;
    let edges = (0..m.saturating_sub(1))
        .map(|k| TreeEdge {
            a: k,
            b: k + 1,
            at_a: ProjPoint::zero(),
            at_b: ProjPoint::infinity(),
        })
        .collect();
    let mut marks = vec![
        Mark {
            label: 0,
            component: m - 1,
            point: ProjPoint::zero(),
        },
        Mark {
            label: 1,
            component: 0,
            point: ProjPoint::infinity(),
        },
    ];
    marks.extend(chain.marks.iter().map(|cm| Mark {
        label: cm.label + 2,
        component: cm.component,
        point: ProjPoint::affine(cm.value.clone()),
    }));
    PointedTree::new(m, edges, marks)
}

/// Inverse of [`chain_to_hassett_tree`] for trees stable for `(1, 1, ε, …, ε)`.
pub fn hassett_tree_to_chain(tree: &PointedTree) -> Result<Chain> {
    let n = tree.n();
    if n < 3 || !tree.is_a_stable(&HassettWeight::losev_manin(n)) {
        return Err(Error::UnstableInput(
            "tree is not stable for (1, 1, ε, …, ε)".into(),
        ));
    }
    let comp = |l: usize| tree.marks[l].component;
    let (start, end) = (comp(1), comp(0));
    // walk from the s_∞ component to the s_0 component
    let mut path = vec![start];
    let mut prev = usize::MAX;
    while *path.last().expect("nonempty") != end {
        let v = *path.last().expect("nonempty");
        let next = tree
            .branches(v)
            .into_iter()
            .find(|(w, set)| *w != prev && set.contains(0))
            .map(|(w, _)| w)
            .ok_or_else(|| Error::Invalid("disconnected tree".into()))?;
        prev = v;
        path.push(next);
    }
    if path.len() != tree.components {
        return Err(Error::UnstableInput(
            "tree is not a chain between the heavy marks".into(),
        ));
    }
    let mut marks = Vec::with_capacity(n - 2);
    for (k, &v) in path.iter().enumerate() {
        let pos = tree.positions(v);
        let (zero, inf) = (&pos[0].1, &pos[1].1);
        let m = crate::projline::moebius_from_pair(zero, inf)?;
        for mk in tree
            .marks
            .iter()
            .filter(|mk| mk.component == v && mk.label >= 2)
        {
            let value = moebius_apply(&m, &mk.point)
                .value()
                .expect("marks avoid the nodes");
            marks.push(ChainMark {
                label: mk.label - 2,
                component: k,
                value,
            });
        }
    }
    Ok(Chain::new(path.len(), marks)?.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projline::{int, rat};

    fn aff(x: i64) -> ProjPoint {
        ProjPoint::affine(int(x))
    }

    /// Components 0 and 1 joined at `∞ ~ 0`; `left` marks on 0, `right` on 1.
    fn two(left: &[usize], right: &[usize]) -> PointedTree {
        let mut marks = Vec::new();
        for (k, &l) in left.iter().enumerate() {
            marks.push(Mark {
                label: l,
                component: 0,
                point: aff(k as i64),
            });
        }
        for (k, &l) in right.iter().enumerate() {
            marks.push(Mark {
                label: l,
                component: 1,
                point: aff(k as i64 + 1),
            });
        }
        let e = TreeEdge {
            a: 0,
            b: 1,
            at_a: ProjPoint::infinity(),
            at_b: ProjPoint::zero(),
        };
        PointedTree::new(2, vec![e], marks).unwrap()
    }

    #[test]
    fn gk_examples() {
        assert!(PointedTree::single(vec![aff(0), aff(1), aff(2)])
            .unwrap()
            .is_gk_stable());
        assert!(!two(&[0, 1], &[2]).is_gk_stable());
        assert!(two(&[0, 1], &[2, 3]).is_gk_stable());
        assert!(PointedTree::single(vec![aff(0), aff(0), aff(2)]).is_ok());
        let bad = PointedTree::new(2, vec![], vec![]);
        assert!(bad.is_err());
    }

    #[test]
    fn hassett_examples() {
        let t = PointedTree::single(vec![aff(0), aff(0), aff(1), aff(2)]).unwrap();
        let a = HassettWeight::new(vec![rat(1, 2), rat(1, 2), int(1), int(1)]).unwrap();
        assert!(t.is_a_stable(&a));
        let a = HassettWeight::new(vec![rat(3, 4), rat(3, 4), int(1), int(1)]).unwrap();
        assert!(!t.is_a_stable(&a));
        let t = two(&[0, 1], &[2, 3]);
        assert_eq!(t.is_a_stable(&HassettWeight::ones(4)), t.is_gk_stable());
        let p = CoincidencePartition::singletons(5);
        assert_eq!(hassett_weight_w(&p, &HassettWeight::ones(5)), int(5));
        let p = CoincidencePartition::from_blocks(
            5,
            vec![
                [0, 1].into_iter().collect(),
                IdxSet::single(2),
                IdxSet::single(3),
                IdxSet::single(4),
            ],
        );
        assert_eq!(
            hassett_weight_w(&p, &HassettWeight::new(vec![rat(3, 5); 5]).unwrap()),
            rat(14, 5)
        );
        let p = CoincidencePartition::from_blocks(5, vec![IdxSet::full(5)]);
        assert_eq!(hassett_weight_w(&p, &HassettWeight::ones(5)), int(1));
    }

    #[test]
    fn lm_examples() {
        let c = Chain::new(
            1,
            vec![ChainMark {
                label: 0,
                component: 0,
                value: int(3),
            }],
        )
        .unwrap();
        assert!(c.is_lm_stable());
        let c = Chain::new(
            2,
            vec![
                ChainMark {
                    label: 0,
                    component: 0,
                    value: int(3),
                },
                ChainMark {
                    label: 1,
                    component: 0,
                    value: int(2),
                },
            ],
        )
        .unwrap();
        assert!(!c.is_lm_stable());
        let marks = (0..3)
            .map(|k| ChainMark {
                label: k,
                component: k,
                value: int(1),
            })
            .collect();
        assert!(Chain::new(3, marks).unwrap().is_lm_stable());
    }

    #[test]
    fn single_component_charts() {
        let lambda = rat(5, 7);
        let t = PointedTree::single(vec![
            ProjPoint::zero(),
            ProjPoint::infinity(),
            ProjPoint::one(),
            ProjPoint::affine(lambda.clone()),
        ])
        .unwrap();
        let f = moduli_coordinates(&t, &FamilyMode::Gk).unwrap();
        assert_eq!(f.charts.len(), 24);
        assert_eq!(
            f.charts[&ChartLabel::Triple([0, 1, 2])][3],
            ProjPoint::affine(lambda)
        );
        assert!(verify_functor_conditions(&f).passed());
        let back = reconstruct_tree(&f).unwrap();
        assert!(is_isomorphic(&back, &t));
    }

    #[test]
    fn contraction() {
        let t = two(&[0, 1], &[2, 3]);
        let same = contract_gamma_i(&t, IdxSet::full(4)).unwrap();
        assert_eq!(same, t);
        let c = contract_gamma_i(&t, [0, 2, 3].into_iter().collect()).unwrap();
        assert_eq!(c.components(), 1);
        // mark 1 lands on the former node point
        assert_eq!(c.marks()[0].point, ProjPoint::zero());
        let chart = t.contract_to_chart([0, 2, 3]).unwrap();
        // marks 1 and 2 both sit at the node seen from the second component
        assert_eq!(chart.points().unwrap()[0], chart.points().unwrap()[1]);
        let direct = c.contract_to_chart([0, 2, 3]).unwrap();
        assert_eq!(
            direct.points().unwrap(),
            vec![
                chart.points().unwrap()[0].clone(),
                chart.points().unwrap()[2].clone(),
                chart.points().unwrap()[3].clone()
            ]
        );
        let h = PointedTree::single(vec![aff(0), aff(0), aff(1), aff(2)]).unwrap();
        assert!(h.contract_to_chart([0, 1, 2]).is_none());
    }

    #[test]
    fn two_component_round_trip() {
        let t = two(&[0, 3], &[1, 2]);
        let f = moduli_coordinates(&t, &FamilyMode::Gk).unwrap();
        // s_4 meets s_1 in the chart (1,2,3)
        assert_eq!(
            f.charts[&ChartLabel::Triple([0, 1, 2])][3],
            ProjPoint::zero()
        );
        let r = verify_functor_conditions(&f);
        assert!(r.passed(), "{r:?}");
        let back = reconstruct_tree(&f).unwrap();
        assert!(is_isomorphic(&back, &t));
        assert_eq!(moduli_coordinates(&back, &FamilyMode::Gk).unwrap(), f);
    }

    #[test]
    fn perturbation_detected() {
        let t = two(&[0, 3, 4], &[1, 2]);
        let mut f = moduli_coordinates(&t, &FamilyMode::Gk).unwrap();
        let chart = f.charts.get_mut(&ChartLabel::Triple([0, 1, 2])).unwrap();
        chart[4] = ProjPoint::affine(rat(17, 3));
        let r = verify_functor_conditions(&f);
        assert!(!r.passed());
        assert!(matches!(
            reconstruct_tree(&f),
            Err(Error::InconsistentFamily { .. })
        ));
    }

    #[test]
    fn chains_round_trip() {
        let marks = vec![
            ChainMark {
                label: 0,
                component: 1,
                value: int(2),
            },
            ChainMark {
                label: 1,
                component: 0,
                value: int(-3),
            },
            ChainMark {
                label: 2,
                component: 1,
                value: rat(1, 2),
            },
            ChainMark {
                label: 3,
                component: 1,
                value: rat(1, 2),
            },
        ];
        let c = Chain::new(2, marks).unwrap();
        let f = lm_moduli_coordinates(&c).unwrap();
        assert!(verify_functor_conditions(&f).passed());
        assert!(reconstruct_chain(&f).unwrap().is_isomorphic(&c));
        let t = chain_to_hassett_tree(&c).unwrap();
        assert!(t.is_a_stable(&HassettWeight::losev_manin(6)));
        assert!(hassett_tree_to_chain(&t).unwrap().is_isomorphic(&c));
    }

    #[test]
    fn json_round_trip() {
        let t = two(&[0, 3], &[1, 2]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<PointedTree>(&s).unwrap(), t);
        let f = moduli_coordinates(&t, &FamilyMode::Gk).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"chart\":[1,2,3]"));
        assert_eq!(serde_json::from_str::<LimitFamily>(&s).unwrap(), f);
    }
}
