//! Property suites checking the library against independent oracles.
//!
//! Every suite is deterministic in its seed: cases are drawn sequentially
//! from a seeded generator, evaluated through [`Exec`], and folded in case
//! order, so the first counterexample reported does not depend on the
//! execution strategy.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, Mutex};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{
    chain_shapes, distinct_points, gk_shapes, pn_partitions, qn_partitions, random_a_stable_tree,
    random_chain, random_gk_shape, random_hassett_weight, random_pn_config, random_pn_weight,
    random_point, random_qn_config, random_qn_weight, realize_chain, realize_shape, tree_shapes,
};
use crate::chambers::{
    classify_weight, cover_check, default_epsilon, enumerate_chambers_with, hassett_polytope,
    stability_polytope, theta_i, theta_t, ChamberComplex, Classification, HassettWeight, Mode,
    PnWeight, Polytope, QnWeight, SignVector, StabPolytope, Vertex, Wall, Weight,
};
use crate::configs::{
    brute_force_semistable, check_limit_equations, glue_fiber, is_semistable, map_config_qn2_pn,
    normalize_chart_qn, BruteForce, CoincidencePartition, Config, GluedFiber, QnConfig, Section,
    Verdict, VerdictKind,
};
use crate::curves::{
    chain_to_hassett_tree, hassett_tree_to_chain, is_isomorphic, lm_moduli_coordinates,
    moduli_coordinates, reconstruct_chain, reconstruct_tree, verify_functor_conditions, ChartLabel,
    FamilyMode, LimitFamily, PointedTree,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::IdxSet;
use crate::limits::Limits;
use crate::projline::{moebius_apply, pp_eq, ProjPoint};
use crate::quiverwt::{in_qn2_pn_region, map_wall_qn2_pn, weight_map_qn2_pn};

/// Version tag of every JSON document written by the tools.
pub const SCHEMA: &str = "quiver-moduli/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    StabilityOracle,
    ThetaPolytope,
    ChambersVsGrid,
    ChartStability,
    RoundtripGk,
    RoundtripLm,
    RoundtripHassett,
    FiveTerm,
    HassettSpecial,
    Qn2Pn,
    Covering,
    LimitEquations,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::StabilityOracle,
        Suite::ThetaPolytope,
        Suite::ChambersVsGrid,
        Suite::ChartStability,
        Suite::RoundtripGk,
        Suite::RoundtripLm,
        Suite::RoundtripHassett,
        Suite::HassettSpecial,
        Suite::Qn2Pn,
        Suite::LimitEquations,
        Suite::FiveTerm,
        Suite::Covering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StabilityOracle => "stability-oracle",
            Suite::ThetaPolytope => "theta-polytope",
            Suite::ChambersVsGrid => "chambers-vs-grid",
            Suite::ChartStability => "chart-stability",
            Suite::RoundtripGk => "roundtrip-gk",
            Suite::RoundtripLm => "roundtrip-lm",
            Suite::RoundtripHassett => "roundtrip-hassett",
            Suite::FiveTerm => "five-term",
            Suite::HassettSpecial => "hassett-special",
            Suite::Qn2Pn => "qn2-pn",
            Suite::Covering => "covering",
            Suite::LimitEquations => "limit-equations",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'")))
    }
}

/// Size caps for a run; unset fields use the suite's defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl Bounds {
    fn n(&self, default: usize) -> usize {
        self.max_n.map_or(default, |m| m.min(default))
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.map_or(default, |s| s.min(default))
    }
}

impl FromStr for Bounds {
    type Err = Error;
    /// `max_n=5,samples=100`
    fn from_str(s: &str) -> Result<Self> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("bad bound '{part}'")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad bound value '{v}'")))?;
            match k.trim() {
                "max_n" => b.max_n = Some(v),
                "samples" => b.samples = Some(v),
                other => return Err(Error::Invalid(format!("unknown bound '{other}'"))),
            }
        }
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub passed: bool,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub seed: u64,
    pub bounds: Bounds,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

/// Per-case outcome: one slot per property, `Some(witness)` on failure,
/// `None` when the property does not apply to the case.
type Outcome = Vec<Option<std::result::Result<(), Value>>>;

struct Collector {
    props: Vec<PropertyReport>,
}

impl Collector {
    fn new(names: &[&str]) -> Self {
        let props = names
            .iter()
            .map(|n| PropertyReport {
                property: (*n).into(),
                passed: true,
                cases: 0,
                counterexample: None,
            })
            .collect();
        Collector { props }
    }

    fn absorb(&mut self, outcome: Outcome) {
        for (p, o) in self.props.iter_mut().zip(outcome) {
            match o {
                None => {}
                Some(Ok(())) => p.cases += 1,
                Some(Err(w)) => {
                    p.cases += 1;
                    if p.passed {
                        p.passed = false;
                        p.counterexample = Some(w);
                    }
                }
            }
        }
    }

    fn run<T: Sync>(&mut self, exec: Exec, cases: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) {
        for o in exec.map(cases, f) {
            self.absorb(o);
        }
    }

    /// Records `cases` evaluations of one property with an optional failure.
    fn tally(&mut self, idx: usize, cases: u64, failure: Option<Value>) {
        let p = &mut self.props[idx];
        p.cases += cases;
        if let Some(w) = failure {
            if p.passed {
                p.passed = false;
                p.counterexample = Some(w);
            }
        }
    }

    /// Records a property evaluated outside of a case loop.
    fn single(&mut self, idx: usize, r: std::result::Result<(), Value>) {
        let mut o: Outcome = vec![None; self.props.len()];
        o[idx] = Some(r);
        self.absorb(o);
    }
}

fn check(ok: bool, witness: impl FnOnce() -> Value) -> Option<std::result::Result<(), Value>> {
    Some(if ok { Ok(()) } else { Err(witness()) })
}

fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    // FNV-1a over the tag keeps the streams of different parts independent
    let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// A stability decision procedure; the suites accept a replacement so that
/// deliberately broken checkers can be shown to be caught.
pub type StabilityFn = dyn Fn(&Config, &Weight) -> Result<Verdict> + Sync;

pub fn run_suite(suite: Suite, seed: u64, bounds: Bounds, exec: Exec) -> SuiteReport {
    run_suite_with(suite, seed, bounds, exec, &is_semistable)
}

pub fn run_suite_with(
    suite: Suite,
    seed: u64,
    bounds: Bounds,
    exec: Exec,
    stab: &StabilityFn,
) -> SuiteReport {
    let properties = match suite {
        Suite::StabilityOracle => stability_oracle(seed, bounds, exec, stab),
        Suite::ThetaPolytope => theta_polytope_suite(bounds, exec, stab),
        Suite::ChambersVsGrid => chambers_vs_grid(bounds, exec, stab),
        Suite::ChartStability => chart_stability(bounds, exec, stab),
        Suite::RoundtripGk => roundtrip_gk(seed, bounds, exec),
        Suite::RoundtripLm => roundtrip_lm(seed, bounds, exec),
        Suite::RoundtripHassett => roundtrip_hassett(seed, bounds, exec),
        Suite::FiveTerm => five_term(seed, bounds, exec),
        Suite::HassettSpecial => hassett_special(seed, bounds, exec),
        Suite::Qn2Pn => qn2_pn(seed, bounds, exec, stab),
        Suite::Covering => covering(seed, bounds, exec),
        Suite::LimitEquations => limit_equations(seed, bounds, exec),
    };
    SuiteReport {
        schema: SCHEMA,
        suite: suite.name().into(),
        seed,
        bounds,
        passed: properties.iter().all(|p| p.passed),
        properties,
    }
}

fn kind(stab: &StabilityFn, c: &Config, w: &Weight) -> std::result::Result<VerdictKind, String> {
    stab(c, w).map(|v| v.kind()).map_err(|e| e.to_string())
}

fn partition_config(mode: Mode, p: &CoincidencePartition) -> Config {
    match mode {
        Mode::Qn => Config::Qn(p.qn_representative()),
        Mode::Pn => Config::Pn(p.pn_representative()),
    }
}

fn partitions(mode: Mode, n: usize) -> Vec<CoincidencePartition> {
    match mode {
        Mode::Qn => qn_partitions(n),
        Mode::Pn => pn_partitions(n),
    }
}

// ---------------------------------------------------------------- stability

fn with_zero_block(c: &Config, block: IdxSet) -> Config {
    let secs: Vec<Section> = c
        .sections()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if block.contains(i) {
                Section::Zero
            } else {
                s.clone()
            }
        })
        .collect();
    match c {
        Config::Qn(_) => Config::Qn(QnConfig::new(secs).expect("same length")),
        Config::Pn(_) => Config::Pn(crate::configs::PnConfig::new(secs).expect("same length")),
    }
}

/// Chamber complexes are costly and shared between suites.
fn chambers(mode: Mode, n: usize, exec: Exec) -> Result<Arc<ChamberComplex>> {
    static CACHE: LazyLock<Mutex<HashMap<(Mode, usize), Arc<ChamberComplex>>>> =
        LazyLock::new(Default::default);
    if let Some(c) = CACHE.lock().expect("cache lock").get(&(mode, n)) {
        return Ok(c.clone());
    }
    let c = Arc::new(enumerate_chambers_with(mode, n, exec, Limits::from_env())?);
    CACHE
        .lock()
        .expect("cache lock")
        .insert((mode, n), c.clone());
    Ok(c)
}

/// Configurations for the exhaustive comparison. `Q_n`: one per coincidence
/// partition. `P_n`: stability only sees which sections vanish at `0` or
/// `∞`, so one configuration per anchor pattern `(J_0, J_∞)`. Each comes
/// with a variant whose first free class is replaced by zero sections.
fn oracle_configs(mode: Mode, n: usize) -> Vec<Config> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for p in partitions(mode, n) {
        if mode == Mode::Pn && !seen.insert((p.j0, p.jinf)) {
            continue;
        }
        let c = partition_config(mode, &p);
        if let Some(&b) = p.blocks.iter().find(|b| **b != p.j0 && **b != p.jinf) {
            out.push(with_zero_block(&c, b));
        }
        out.push(c);
    }
    out
}

fn stability_oracle(
    seed: u64,
    bounds: Bounds,
    exec: Exec,
    stab: &StabilityFn,
) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["exhaustive", "random"]);
    let compare = |c: &Config, oracle: &BruteForce, w: &Weight| -> Option<Value> {
        let fast = kind(stab, c, w);
        let slow = oracle
            .verdict(w)
            .map(|v| v.kind())
            .map_err(|e| e.to_string());
        (fast != slow).then(|| json!({"config": c, "weight": w, "verdict": format!("{fast:?}"), "oracle": format!("{slow:?}")}))
    };
    for mode in [Mode::Qn, Mode::Pn] {
        for n in 3..=bounds.n(5) {
            let complex = match chambers(mode, n, exec) {
                Ok(c) => c,
                Err(e) => {
                    col.single(
                        0,
                        Err(json!({"mode": mode, "n": n, "error": e.to_string()})),
                    );
                    continue;
                }
            };
            let weights: Vec<&Weight> = complex
                .chambers
                .iter()
                .map(|c| &c.witness)
                .chain(complex.edges.iter().map(|e| &e.facet_point))
                .collect();
            let configs = oracle_configs(mode, n);
            let results = exec.map(&configs, |c| {
                let oracle = BruteForce::new(c);
                weights.iter().find_map(|w| compare(c, &oracle, w))
            });
            for r in results {
                col.tally(0, weights.len() as u64, r);
            }
        }
    }
    let mut rng = rng_for(seed, "stability-random");
    let total = bounds.samples(2000);
    let cases: Vec<(Config, Weight)> = (0..total)
        .filter_map(|k| {
            let n = if k % 2 == 0 { 6 } else { 7 };
            if n > bounds.n(7) {
                return None;
            }
            let d = *[2i64, 3, 4, 12].choose(&mut rng).expect("nonempty");
            Some(if rng.gen_bool(0.5) {
                (
                    Config::Qn(random_qn_config(n, 12, &mut rng)),
                    Weight::Qn(random_qn_weight(n, d, &mut rng)),
                )
            } else {
                (
                    Config::Pn(random_pn_config(n, 12, &mut rng)),
                    Weight::Pn(random_pn_weight(n, d, &mut rng)),
                )
            })
        })
        .collect();
    col.run(exec, &cases, |(c, w)| {
        let slow = brute_force_semistable(c, w).map(|v| v.kind()).map_err(|e| e.to_string());
        let fast = kind(stab, c, w);
        vec![None, check(fast == slow, || json!({"config": c, "weight": w, "verdict": format!("{fast:?}"), "oracle": format!("{slow:?}")}))]
    });
    col.props
}

fn theta_polytope_suite(bounds: Bounds, exec: Exec, stab: &StabilityFn) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["qn-vertices", "pn-vertices"]);
    for n in 4..=bounds.n(6) {
        for (slot, mode) in [(0, Mode::Qn), (1, Mode::Pn)] {
            let parts = partitions(mode, n);
            col.run(exec, &parts, |p| {
                let geometry: BTreeSet<Vertex> = stability_polytope(&StabPolytope { mode, partition: p.clone() })
                    .vertices
                    .into_iter()
                    .collect();
                let c = partition_config(mode, p);
                let all: Vec<Vertex> = match mode {
                    Mode::Qn => (0..n).flat_map(|i| (i + 1..n).map(move |j| Vertex::Qn(i, j))).collect(),
                    Mode::Pn => (0..n).flat_map(|i| [Vertex::Pn(i, 1), Vertex::Pn(i, 2)]).collect(),
                };
                let semistable: BTreeSet<Vertex> = all
                    .into_iter()
                    .filter(|v| stab(&c, &v.weight(n)).map(|x| x.is_semistable()).unwrap_or(false))
                    .collect();
                let mut o = vec![None, None];
                o[slot] = check(geometry == semistable, || {
                    json!({"partition": p, "polytope_vertices": geometry, "semistable_vertices": semistable})
                });
                o
            });
        }
    }
    col.props
}

// ----------------------------------------------------------------- chambers

/// Calls `f` on every interior point of the integer grid with denominator
/// `den`: `Q_n` points are `θ = k/den` with `Σk = 2·den`; `P_n` points are
/// `(η_1, η_2, θ) = (-e, e - den, k)/den` with `Σk = den`. The first entry of
/// the vector passed to `f` is `e` for `P_n` and unused for `Q_n`.
fn for_each_grid_point(mode: Mode, n: usize, den: i64, f: &mut dyn FnMut(&[i64])) {
    fn go(total: i64, left: usize, hi: i64, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if left == 0 {
            if total == 0 {
                f(cur);
            }
            return;
        }
        let rest_min = left as i64 - 1;
        for k in 1..=hi.min(total - rest_min) {
            cur.push(k);
            go(total - k, left - 1, hi, cur, f);
            cur.pop();
        }
    }
    match mode {
        Mode::Qn => go(2 * den, n, den - 1, &mut vec![0], f),
        Mode::Pn => {
            for e in 1..den {
                go(den, n, den, &mut vec![e], f);
            }
        }
    }
}

fn grid_weight(mode: Mode, den: i64, p: &[i64]) -> Weight {
    use crate::projline::rat;
    let theta = p[1..].iter().map(|&k| rat(k, den)).collect();
    match mode {
        Mode::Qn => Weight::Qn(QnWeight::new(theta).expect("grid point")),
        Mode::Pn => Weight::Pn(
            PnWeight::new(rat(-p[0], den), rat(p[0] - den, den), theta).expect("grid point"),
        ),
    }
}

/// The sign vectors met by a fine grid, and the wall crossings seen at grid
/// points lying on exactly one wall. Wall values are integers
/// (`den · form`), so a point off a wall is at least `1/den` away from it and
/// a point on one wall has both neighbouring cells within reach.
struct GridCells {
    buckets: BTreeMap<SignVector, Vec<i64>>,
    crossings: BTreeSet<(SignVector, SignVector, Wall)>,
}

fn grid_cells(mode: Mode, n: usize, den: i64, walls: &[Wall]) -> GridCells {
    let mut buckets = BTreeMap::new();
    let mut crossings = BTreeSet::new();
    let mut sums = vec![0i64; 1 << n];
    for_each_grid_point(mode, n, den, &mut |p| {
        for bits in 1..sums.len() {
            let low = bits.trailing_zeros() as usize;
            sums[bits] = sums[bits & (bits - 1)] + p[1 + low];
        }
        // Q_n: Σ_J θ - 1; P_n: η_1 + Σ_J θ
        let offset = match mode {
            Mode::Qn => den,
            Mode::Pn => p[0],
        };
        let values: Vec<i64> = walls
            .iter()
            .map(|w| sums[w.j.bits() as usize] - offset)
            .collect();
        let zeros: Vec<usize> = (0..values.len()).filter(|&h| values[h] == 0).collect();
        match zeros.as_slice() {
            [] => {
                buckets
                    .entry(SignVector(values.iter().map(|&v| v > 0).collect()))
                    .or_insert_with(|| p.to_vec());
            }
            [h] => {
                let plus = SignVector(
                    values
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| k == *h || v > 0)
                        .collect(),
                );
                let mut minus = plus.clone();
                minus.0[*h] = false;
                crossings.insert((minus, plus, walls[*h]));
            }
            _ => {}
        }
    });
    GridCells { buckets, crossings }
}

fn chambers_vs_grid(bounds: Bounds, exec: Exec, stab: &StabilityFn) -> Vec<PropertyReport> {
    let mut col = Collector::new(&[
        "chamber-set",
        "adjacency",
        "witness-verdicts",
        "chambers-distinguished",
    ]);
    for mode in [Mode::Qn, Mode::Pn] {
        for n in 4..=bounds.n(5) {
            let complex = match chambers(mode, n, exec) {
                Ok(c) => c,
                Err(e) => {
                    col.single(
                        0,
                        Err(json!({"mode": mode, "n": n, "error": e.to_string()})),
                    );
                    continue;
                }
            };
            let den = GRID_DENOMINATOR;
            let grid = grid_cells(mode, n, den, &complex.walls);
            let lib: BTreeSet<SignVector> =
                complex.chambers.iter().map(|c| c.signs.clone()).collect();
            let oracle: BTreeSet<SignVector> = grid.buckets.keys().cloned().collect();
            col.single(
                0,
                if lib == oracle {
                    Ok(())
                } else {
                    Err(json!({"mode": mode, "n": n,
                        "missing_in_grid": lib.difference(&oracle).map(|s| s.to_string()).collect::<Vec<_>>(),
                        "missing_in_library": oracle.difference(&lib).map(|s| s.to_string()).collect::<Vec<_>>()}))
                },
            );
            let lib_adj: BTreeSet<(SignVector, SignVector, Wall)> = complex
                .edges
                .iter()
                .map(|e| {
                    let (a, b) = (&complex.chambers[e.a].signs, &complex.chambers[e.b].signs);
                    let h = complex
                        .walls
                        .iter()
                        .position(|w| *w == e.wall)
                        .expect("known wall");
                    // orient as (minus side, plus side)
                    if a.0[h] {
                        (b.clone(), a.clone(), e.wall)
                    } else {
                        (a.clone(), b.clone(), e.wall)
                    }
                })
                .collect();
            col.single(
                1,
                if lib_adj == grid.crossings {
                    Ok(())
                } else {
                    let fmt = |s: BTreeSet<&(SignVector, SignVector, Wall)>| {
                        s.iter()
                            .map(|(a, b, w)| format!("{a}|{b}|{w}"))
                            .collect::<Vec<_>>()
                    };
                    Err(json!({"mode": mode, "n": n,
                        "only_library": fmt(lib_adj.difference(&grid.crossings).collect()),
                        "only_grid": fmt(grid.crossings.difference(&lib_adj).collect())}))
                },
            );
            // verdict profiles over all partitions, from the library witness and a grid witness
            let configs: Vec<Config> = partitions(mode, n)
                .iter()
                .map(|p| partition_config(mode, p))
                .collect();
            let profiles: Vec<(Vec<Option<VerdictKind>>, Option<Value>)> = exec.map(&complex.chambers, |c| {
                let profile: Vec<Option<VerdictKind>> = configs.iter().map(|cf| kind(stab, cf, &c.witness).ok()).collect();
                let witness = grid.buckets.get(&c.signs).and_then(|p| {
                    let other = grid_weight(mode, den, p);
                    configs.iter().zip(&profile).find_map(|(cf, k)| {
                        let k2 = kind(stab, cf, &other).ok();
                        (k2 != *k).then(|| json!({"chamber": c.signs, "config": cf, "witness_a": c.witness, "witness_b": other}))
                    })
                });
                (profile, witness)
            });
            for (_, w) in &profiles {
                col.single(2, w.clone().map_or(Ok(()), Err));
            }
            let mut seen: BTreeMap<&Vec<Option<VerdictKind>>, usize> = BTreeMap::new();
            for (k, (p, _)) in profiles.iter().enumerate() {
                let r = match seen.insert(p, k) {
                    Some(other) => Err(
                        json!({"mode": mode, "n": n, "chambers": [complex.chambers[other].signs, complex.chambers[k].signs]}),
                    ),
                    None => Ok(()),
                };
                col.single(3, r);
            }
        }
    }
    col.props
}

/// Denominator of the chamber oracle's grid.
const GRID_DENOMINATOR: i64 = 40;

fn chart_stability(bounds: Bounds, exec: Exec, stab: &StabilityFn) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["qn-theta-t", "pn-theta-i"]);
    for n in 3..=bounds.n(6) {
        let eps = default_epsilon(n);
        let triples: Vec<[usize; 3]> = (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k])))
            .collect();
        let weights: Vec<([usize; 3], Weight)> = triples
            .iter()
            .map(|&t| (t, Weight::Qn(theta_t(n, t, &eps).expect("generic"))))
            .collect();
        let parts = qn_partitions(n);
        col.run(exec, &parts, |p| {
            let c = Config::Qn(p.qn_representative());
            let idx = p.block_index();
            let r = weights.iter().find_map(|(t, w)| {
                let separated =
                    idx[t[0]] != idx[t[1]] && idx[t[1]] != idx[t[2]] && idx[t[0]] != idx[t[2]];
                let k = kind(stab, &c, w);
                ((k == Ok(VerdictKind::Stable)) != separated).then(
                    || json!({"partition": p, "T": t.map(|i| i + 1), "verdict": format!("{k:?}")}),
                )
            });
            vec![Some(r.map_or(Ok(()), Err)), None]
        });
    }
    for n in 1..=bounds.n(6) {
        let eps = default_epsilon(n);
        let weights: Vec<Weight> = (0..n)
            .map(|i| Weight::Pn(theta_i(n, i, &eps).expect("generic")))
            .collect();
        let parts = pn_partitions(n);
        col.run(exec, &parts, |p| {
            let c = Config::Pn(p.pn_representative());
            let r = weights.iter().enumerate().find_map(|(i, w)| {
                let expected = if p.j0.contains(i) || p.jinf.contains(i) {
                    VerdictKind::Unstable
                } else {
                    VerdictKind::Stable
                };
                let k = kind(stab, &c, w);
                (k != Ok(expected))
                    .then(|| json!({"partition": p, "i": i + 1, "verdict": format!("{k:?}")}))
            });
            vec![None, Some(r.map_or(Ok(()), Err))]
        });
    }
    col.props
}

// ------------------------------------------------------------------- curves

/// The trees exercised by the GK round trip: every shape for `n ≤ 5` with
/// `samples` coordinate draws, and random trees for `n = 6, 7`.
pub fn gk_trees(seed: u64, bounds: Bounds) -> Vec<PointedTree> {
    let mut rng = rng_for(seed, "gk-trees");
    let per_shape = bounds.samples(200);
    let mut out = Vec::new();
    for n in 3..=bounds.n(5) {
        for shape in gk_shapes(n) {
            out.extend((0..per_shape).map(|_| realize_shape(&shape, &mut rng)));
        }
    }
    let random = bounds.samples(500);
    for k in 0..random {
        let n = if k % 2 == 0 { 6 } else { 7 };
        if n <= bounds.n(7) {
            out.push(realize_shape(&random_gk_shape(n, &mut rng), &mut rng));
        }
    }
    out
}

/// Hassett weights with random stable trees: `20` weights per `n ≤ 5`.
pub fn hassett_cases(seed: u64, bounds: Bounds) -> Vec<(HassettWeight, PointedTree)> {
    let mut rng = rng_for(seed, "hassett-trees");
    let mut out = Vec::new();
    let weights = bounds.samples(20);
    let trees = bounds.samples(10);
    for n in 3..=bounds.n(5) {
        for _ in 0..weights {
            let a = random_hassett_weight(n, &mut rng);
            for _ in 0..trees {
                out.push((a.clone(), random_a_stable_tree(&a, &mut rng)));
            }
        }
    }
    out
}

fn round_trip(
    tree: &PointedTree,
    mode: &FamilyMode,
) -> [Option<std::result::Result<(), Value>>; 3] {
    let family = match moduli_coordinates(tree, mode) {
        Ok(f) => f,
        Err(e) => {
            let w = json!({"tree": tree, "error": e.to_string()});
            return [Some(Err(w)), None, None];
        }
    };
    let report = verify_functor_conditions(&family);
    let conditions = check(
        report.passed(),
        || json!({"tree": tree, "failure": report.first_failure()}),
    );
    let (iso, fix) = match reconstruct_tree(&family) {
        Ok(back) => (
            check(
                is_isomorphic(&back, tree),
                || json!({"tree": tree, "reconstructed": back}),
            ),
            check(
                moduli_coordinates(&back, mode).as_ref() == Ok(&family),
                || json!({"tree": tree, "reconstructed": back}),
            ),
        ),
        Err(e) => {
            let w = json!({"tree": tree, "error": e.to_string()});
            (Some(Err(w.clone())), Some(Err(w)))
        }
    };
    [conditions, iso, fix]
}

fn roundtrip_gk(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&[
        "functor-conditions",
        "reconstruct-isomorphic",
        "coordinates-fixpoint",
        "contraction-compatible",
    ]);
    let trees = gk_trees(seed, bounds);
    let mut rng = rng_for(seed, "gk-contraction");
    // a kept set and a triple inside it per tree
    let subsets: Vec<(IdxSet, [usize; 3])> = trees
        .iter()
        .map(|t| {
            let n = t.n();
            let mut labels: Vec<usize> = (0..n).collect();
            labels.shuffle(&mut rng);
            let size = rng.gen_range(3..=n);
            let keep: IdxSet = labels[..size].iter().copied().collect();
            (keep, [labels[0], labels[1], labels[2]])
        })
        .collect();
    let cases: Vec<(&PointedTree, &(IdxSet, [usize; 3]))> = trees.iter().zip(&subsets).collect();
    col.run(exec, &cases, |(tree, (keep, t))| {
        let mut o: Outcome = round_trip(tree, &FamilyMode::Gk).into_iter().collect();
        let contracted = crate::curves::contract_gamma_i(tree, *keep);
        let full = tree.contract_to_chart(*t);
        let small = contracted.as_ref().ok().and_then(|c| c.contract_to_chart(*t));
        let expected: Option<Vec<ProjPoint>> =
            full.and_then(|c| c.points().ok()).map(|p| keep.iter().map(|i| p[i].clone()).collect());
        let got = small.and_then(|c| c.points().ok());
        o.push(check(expected.is_some() && expected == got, || {
            json!({"tree": tree, "keep": keep.iter().map(|i| i + 1).collect::<Vec<_>>(), "T": t.map(|i| i + 1)})
        }));
        o
    });
    col.props
}

fn roundtrip_lm(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&[
        "functor-identities",
        "reconstruct-isomorphic",
        "coordinates-fixpoint",
    ]);
    let mut rng = rng_for(seed, "lm-chains");
    let per_shape = bounds.samples(3);
    let mut chains = Vec::new();
    for n in 1..=bounds.n(5) {
        for shape in chain_shapes(n) {
            chains.extend((0..per_shape).map(|_| realize_chain(&shape, &mut rng)));
        }
    }
    if bounds.n(6) >= 6 {
        chains.extend((0..bounds.samples(300)).map(|_| random_chain(6, &mut rng)));
    }
    col.run(exec, &chains, |chain| {
        let family = match lm_moduli_coordinates(chain) {
            Ok(f) => f,
            Err(e) => {
                return vec![
                    Some(Err(json!({"chain": chain, "error": e.to_string()}))),
                    None,
                    None,
                ]
            }
        };
        let report = verify_functor_conditions(&family);
        let ident = check(
            report.passed(),
            || json!({"chain": chain, "failure": report.first_failure()}),
        );
        match reconstruct_chain(&family) {
            Ok(back) => vec![
                ident,
                check(
                    back.is_isomorphic(chain),
                    || json!({"chain": chain, "reconstructed": back}),
                ),
                check(
                    lm_moduli_coordinates(&back).as_ref() == Ok(&family),
                    || json!({"chain": chain}),
                ),
            ],
            Err(e) => {
                let w = json!({"chain": chain, "error": e.to_string()});
                vec![ident, Some(Err(w.clone())), Some(Err(w))]
            }
        }
    });
    col.props
}

fn roundtrip_hassett(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&[
        "functor-conditions",
        "reconstruct-isomorphic",
        "coordinates-fixpoint",
        "deletion-detected",
        "perturbation-detected",
    ]);
    let cases = hassett_cases(seed, bounds);
    let mut rng = rng_for(seed, "hassett-mutations");
    // which chart to delete, which to perturb and the new section value
    let mutations: Vec<(usize, usize, ProjPoint)> = cases
        .iter()
        .map(|_| {
            (
                rng.gen::<u32>() as usize,
                rng.gen::<u32>() as usize,
                random_point(&mut rng),
            )
        })
        .collect();
    let inputs: Vec<(&(HassettWeight, PointedTree), &(usize, usize, ProjPoint))> =
        cases.iter().zip(&mutations).collect();
    col.run(exec, &inputs, |((a, tree), (del, pert, value))| {
        let mode = FamilyMode::Hassett { a: a.clone() };
        let mut o: Outcome = round_trip(tree, &mode).into_iter().collect();
        let Ok(family) = moduli_coordinates(tree, &mode) else {
            o.extend([None, None]);
            return o;
        };
        let labels: Vec<ChartLabel> = family.charts.keys().copied().collect();
        let mut deleted = family.clone();
        let gone = labels[del % labels.len()];
        deleted.charts.remove(&gone);
        o.push(check(
            !verify_functor_conditions(&deleted).passed() && reconstruct_tree(&deleted).is_err(),
            || json!({"tree": tree, "a": a, "deleted": gone.to_string()}),
        ));
        let target = labels[pert % labels.len()];
        let ChartLabel::Triple(t) = target else {
            unreachable!("tree families use triples")
        };
        let free: Vec<usize> = (0..family.n).filter(|i| !t.contains(i)).collect();
        if free.is_empty() {
            o.push(None);
            return o;
        }
        let k = free[pert / labels.len() % free.len()];
        let mut perturbed = family.clone();
        let secs = perturbed.charts.get_mut(&target).expect("active");
        secs[k] = if pp_eq(&secs[k], value) {
            ProjPoint::from_ints(7919, 104_729)
        } else {
            value.clone()
        };
        o.push(check(
            !verify_functor_conditions(&perturbed).passed()
                && reconstruct_tree(&perturbed).is_err(),
            || json!({"tree": tree, "a": a, "chart": target.to_string(), "section": k + 1}),
        ));
        o
    });
    col.props
}

fn five_term(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["five-term", "permutation", "four-point"]);
    let mut rng = rng_for(seed, "five-term");
    let configs: Vec<Vec<ProjPoint>> = (0..bounds.samples(1000))
        .map(|_| distinct_points(5, &mut rng))
        .collect();
    col.run(exec, &configs, |pts| {
        let tree = PointedTree::single(pts.clone()).expect("distinct points");
        let fam = moduli_coordinates(&tree, &FamilyMode::Gk).expect("stable");
        let s = |t: [usize; 3], i: usize| -> (crate::projline::Rat, crate::projline::Rat) {
            let p = &fam.charts[&ChartLabel::Triple(t)][i];
            (p.c0().clone(), p.c1().clone())
        };
        let (mut five, mut perm, mut four) = (Ok(()), Ok(()), Ok(()));
        for i1 in 0..5 {
            for i2 in 0..5 {
                for i3 in 0..5 {
                    for i4 in 0..5 {
                        let idx = [i1, i2, i3, i4];
                        if (0..4).any(|x| (0..x).any(|y| idx[x] == idx[y])) {
                            continue;
                        }
                        let t = [i1, i2, i3];
                        let (a0, a1) = s(t, i4);
                        let (b0, b1) = s([i2, i1, i3], i4);
                        let (c0, c1) = s([i3, i2, i1], i4);
                        if &b0 * &a0 != &b1 * &a1 || &c0 * &a1 != &c1 * (&a1 - &a0) {
                            perm = Err(json!({"points": pts, "T": [i1 + 1, i2 + 1, i3 + 1], "i4": i4 + 1}));
                        }
                        let (d0, d1) = s([i1, i2, i4], i3);
                        if &a0 * &d0 != &a1 * &d1 {
                            four = Err(json!({"points": pts, "T": [i1 + 1, i2 + 1, i3 + 1], "i4": i4 + 1}));
                        }
                        let i5 = (0..5).find(|x| !idx.contains(x)).expect("five indices");
                        let (e0, e1) = s(t, i5);
                        let (f0, f1) = s([i1, i2, i4], i5);
                        if &a0 * &e1 * &f0 != &a1 * &e0 * &f1 {
                            five = Err(json!({"points": pts, "indices": [i1 + 1, i2 + 1, i3 + 1, i4 + 1, i5 + 1]}));
                        }
                    }
                }
            }
        }
        vec![Some(five), Some(perm), Some(four)]
    });
    col.props
}

fn hassett_special(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["ones-equals-gk", "chain-to-tree", "tree-to-chain"]);
    let mut rng = rng_for(seed, "hassett-special");
    let mut trees = Vec::new();
    for n in 3..=bounds.n(5) {
        for shape in tree_shapes(n, n - 1, false) {
            trees.push(realize_shape(&shape, &mut rng));
        }
    }
    col.run(exec, &trees, |t| {
        let ones = HassettWeight::ones(t.n());
        vec![
            check(
                t.is_a_stable(&ones) == t.is_gk_stable(),
                || json!({"tree": t}),
            ),
            None,
            None,
        ]
    });
    let mut chains = Vec::new();
    for n in 1..=bounds.n(5) {
        for shape in chain_shapes(n) {
            chains.push(realize_chain(&shape, &mut rng));
        }
    }
    col.run(exec, &chains, |c| {
        let a = HassettWeight::losev_manin(c.n() + 2);
        let ok = chain_to_hassett_tree(c)
            .ok()
            .filter(|t| t.is_a_stable(&a))
            .and_then(|t| hassett_tree_to_chain(&t).ok())
            .is_some_and(|back| back.is_isomorphic(c));
        vec![None, check(ok, || json!({"chain": c})), None]
    });
    let mut lm_trees = Vec::new();
    for n in 3..=bounds.n(5) + 2 {
        let a = HassettWeight::losev_manin(n);
        lm_trees.extend((0..bounds.samples(100)).map(|_| random_a_stable_tree(&a, &mut rng)));
    }
    col.run(exec, &lm_trees, |t| {
        let ok = hassett_tree_to_chain(t)
            .ok()
            .filter(|c| c.is_lm_stable())
            .and_then(|c| chain_to_hassett_tree(&c).ok())
            .is_some_and(|back| is_isomorphic(&back, t));
        vec![None, None, check(ok, || json!({"tree": t}))]
    });
    col.props
}

fn qn2_pn(seed: u64, bounds: Bounds, exec: Exec, stab: &StabilityFn) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["verdicts-agree", "walls-to-walls"]);
    let mut rng = rng_for(seed, "qn2-pn");
    let max_n = bounds.n(5);
    let total = bounds.samples(500);
    let mut cases = Vec::with_capacity(total);
    while cases.len() < total {
        let n = rng.gen_range(1..=max_n);
        let n2 = n + 2;
        let a = rng.gen_range(0..n2);
        let b = (a + rng.gen_range(1..n2)) % n2;
        let d = *[3i64, 4, 6, 24].choose(&mut rng).expect("nonempty");
        let theta = random_qn_weight(n2, d, &mut rng);
        // the apex e_a + e_b has no image
        if !in_qn2_pn_region(&theta, a, b, true) || weight_map_qn2_pn(&theta, a, b).is_err() {
            continue;
        }
        let config = random_qn_config(n2, 0, &mut rng);
        if pp_eq(
            config.sections()[a].point().expect("no zeros"),
            config.sections()[b].point().expect("no zeros"),
        ) {
            continue;
        }
        cases.push((config, theta, a, b));
    }
    col.run(exec, &cases, |(config, theta, a, b)| {
        let n2 = theta.n();
        let w = Weight::Qn(theta.clone());
        let Ok(mapped) = weight_map_qn2_pn(theta, *a, *b) else {
            return vec![Some(Err(json!({"weight": theta, "a": a + 1, "b": b + 1}))), None];
        };
        let on_qn: Vec<Wall> = match classify_weight(&w) {
            Classification::OnWalls { inner, .. } => inner,
            Classification::Generic { .. } => Vec::new(),
        };
        let on_pn: BTreeSet<Wall> = match classify_weight(&Weight::Pn(mapped.clone())) {
            Classification::OnWalls { inner, .. } => inner.into_iter().collect(),
            Classification::Generic { .. } => BTreeSet::new(),
        };
        let images: Option<BTreeSet<Wall>> = on_qn.iter().map(|&x| map_wall_qn2_pn(n2, x, *a, *b)).collect();
        let walls = check(images.as_ref() == Some(&on_pn), || {
            json!({"weight": theta, "a": a + 1, "b": b + 1, "qn_walls": on_qn, "pn_walls": on_pn})
        });
        let verdicts = if on_qn.is_empty() {
            let q = kind(stab, &Config::Qn(config.clone()), &w);
            let p = map_config_qn2_pn(config, *a, *b)
                .map_err(|e| e.to_string())
                .and_then(|pc| kind(stab, &Config::Pn(pc), &Weight::Pn(mapped.clone())));
            check(q == p, || json!({"config": config, "weight": theta, "a": a + 1, "b": b + 1, "qn": format!("{q:?}"), "pn": format!("{p:?}")}))
        } else {
            None
        };
        vec![verdicts, walls]
    });
    col.props
}

fn covering(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&["gk-cover", "hassett-cover"]);
    let chart_polys = |fam: &LimitFamily| -> Vec<Polytope> {
        let mut parts: Vec<CoincidencePartition> = fam
            .charts
            .values()
            .map(|s| {
                QnConfig::from_points(s.clone())
                    .and_then(|c| c.coincidence_partition())
                    .expect("no zero sections")
            })
            .collect();
        parts.sort_by(|x, y| x.blocks.cmp(&y.blocks));
        parts.dedup();
        parts
            .into_iter()
            .map(|p| {
                stability_polytope(&StabPolytope {
                    mode: Mode::Qn,
                    partition: p,
                })
                .polytope
            })
            .collect()
    };
    let covered = |polys: &[Polytope], target: &Polytope| {
        cover_check(polys, target)
            .map(|r| r.covered)
            .unwrap_or(false)
    };
    let trees = gk_trees(seed, bounds);
    col.run(exec, &trees, |t| {
        let fam = moduli_coordinates(t, &FamilyMode::Gk).expect("stable");
        vec![
            check(
                covered(&chart_polys(&fam), &Polytope::ambient(Mode::Qn, t.n())),
                || json!({"tree": t}),
            ),
            None,
        ]
    });
    let cases = hassett_cases(seed, bounds);
    col.run(exec, &cases, |(a, t)| {
        let fam = moduli_coordinates(t, &FamilyMode::Hassett { a: a.clone() }).expect("stable");
        vec![
            None,
            check(
                covered(&chart_polys(&fam), &hassett_polytope(a)),
                || json!({"tree": t, "a": a}),
            ),
        ]
    });
    col.props
}

/// Marks beyond the edge at `g` that leads towards component `h`.
fn side_toward(tree: &PointedTree, g: usize, h: usize) -> IdxSet {
    for (w, set) in tree.branches(g) {
        // is h in the subtree behind w?
        let mut stack = vec![(w, g)];
        while let Some((x, from)) = stack.pop() {
            if x == h {
                return set;
            }
            for (y, _) in tree.neighbours(x) {
                if y != from {
                    stack.push((y, x));
                }
            }
        }
    }
    IdxSet::EMPTY
}

/// The component whose positions separate the triple of each chart.
fn chart_components(tree: &PointedTree) -> Vec<Vec<[usize; 3]>> {
    (0..tree.components())
        .map(|v| {
            let pos = tree.positions(v);
            let n = pos.len();
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let distinct = i != j
                            && j != k
                            && i != k
                            && !pp_eq(&pos[i].1, &pos[j].1)
                            && !pp_eq(&pos[j].1, &pos[k].1)
                            && !pp_eq(&pos[i].1, &pos[k].1);
                        if distinct {
                            out.push([i, j, k]);
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Möbius equivalence of two point configurations by normalizing both at
/// the least indices of their first three coincidence classes.
fn moebius_equivalent(a: &QnConfig, b: &QnConfig) -> bool {
    let (Ok(pa), Ok(pb)) = (a.coincidence_partition(), b.coincidence_partition()) else {
        return false;
    };
    if pa != pb || pa.blocks.len() < 3 {
        return false;
    }
    let t = [0, 1, 2].map(|k| pa.blocks[k].min().expect("nonempty"));
    matches!((normalize_chart_qn(a, t), normalize_chart_qn(b, t)), (Ok(x), Ok(y)) if x == y)
}

fn limit_equations(seed: u64, bounds: Bounds, exec: Exec) -> Vec<PropertyReport> {
    let mut col = Collector::new(&[
        "equations-hold",
        "irreducible-iff-equivalent",
        "node-partition",
    ]);
    let trees = gk_trees(seed, bounds);
    let mut rng = rng_for(seed, "limit-charts");
    // one random chart per component and per ordered component pair
    let picks: Vec<Vec<((usize, [usize; 3]), (usize, [usize; 3]))>> = trees
        .iter()
        .map(|t| {
            let comps = chart_components(t);
            let m = comps.len();
            let mut out = Vec::new();
            for g in 0..m {
                for h in g..m {
                    let a = *comps[g]
                        .choose(&mut rng)
                        .expect("stable components carry charts");
                    let b = *comps[h]
                        .choose(&mut rng)
                        .expect("stable components carry charts");
                    out.push(((g, a), (h, b)));
                }
            }
            out
        })
        .collect();
    let cases: Vec<(
        &PointedTree,
        &Vec<((usize, [usize; 3]), (usize, [usize; 3]))>,
    )> = trees.iter().zip(&picks).collect();
    col.run(exec, &cases, |(tree, pairs)| {
        let fam = moduli_coordinates(tree, &FamilyMode::Gk).expect("stable");
        let n = tree.n();
        let (mut eq, mut irr, mut part) = (Ok(()), Ok(()), Ok(()));
        for &((g, ta), (h, tb)) in pairs.iter() {
            let ca = QnConfig::from_points(fam.charts[&ChartLabel::Triple(ta)].clone()).expect("no zeros");
            let cb = QnConfig::from_points(fam.charts[&ChartLabel::Triple(tb)].clone()).expect("no zeros");
            let (xa, xb) = (Config::Qn(ca.clone()), Config::Qn(cb.clone()));
            let equivalent = moebius_equivalent(&ca, &cb);
            let same = g == h;
            let witness = |what: &str| {
                json!({"tree": tree, "chart_a": ta.map(|i| i + 1), "chart_b": tb.map(|i| i + 1), "what": what})
            };
            if equivalent != same && irr.is_ok() {
                irr = Err(witness("Möbius equivalence differs from sharing a component"));
            }
            let (x, y) = if same { (IdxSet::EMPTY, IdxSet::EMPTY) } else { (side_toward(tree, g, h), side_toward(tree, h, g)) };
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    match check_limit_equations(&xa, &xb, Some((i, j))) {
                        Ok(true) | Err(Error::DegeneratePair(..)) => {}
                        _ => {
                            if eq.is_ok() {
                                eq = Err(witness(&format!("anchor pair ({}, {})", i + 1, j + 1)));
                            }
                            continue;
                        }
                    }
                    let glued = match glue_fiber(&xa, &xb, Some((i, j))) {
                        Ok(gf) => gf,
                        Err(Error::DegeneratePair(..)) => continue,
                        Err(e) => {
                            if irr.is_ok() {
                                irr = Err(witness(&e.to_string()));
                            }
                            continue;
                        }
                    };
                    match (&glued, same) {
                        (GluedFiber::Irreducible { moebius }, true) => {
                            let moved: Vec<ProjPoint> = ca.points().expect("no zeros").iter().map(|p| moebius_apply(moebius, p)).collect();
                            if moved != cb.points().expect("no zeros") && irr.is_ok() {
                                irr = Err(witness("gluing map does not carry chart a onto chart b"));
                            }
                        }
                        (GluedFiber::TwoComponents { on_a, on_b, at_node, .. }, false) => {
                            let full = IdxSet::full(n);
                            let expected = (full.difference(x), full.difference(y), x.intersection(y));
                            if (*on_a, *on_b, *at_node) != expected && part.is_ok() {
                                part = Err(witness(&format!("anchor pair ({}, {})", i + 1, j + 1)));
                            }
                        }
                        _ => {
                            if irr.is_ok() {
                                irr = Err(witness(&format!("wrong fiber type at anchor pair ({}, {})", i + 1, j + 1)));
                            }
                        }
                    }
                }
            }
        }
        vec![Some(eq), Some(irr), Some(part)]
    });
    col.props
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Bounds {
        Bounds {
            max_n: Some(4),
            samples: Some(5),
        }
    }

    #[test]
    fn bounds_parse() {
        assert_eq!("max_n=4, samples=5".parse::<Bounds>().unwrap(), small());
        assert!("depth=3".parse::<Bounds>().is_err());
        assert_eq!("roundtrip-gk".parse::<Suite>().unwrap(), Suite::RoundtripGk);
    }

    #[test]
    fn small_runs_pass() {
        for suite in Suite::ALL {
            let r = run_suite(suite, 1, small(), Exec::default());
            assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
            assert!(
                r.properties.iter().any(|p| p.cases > 0),
                "{suite}: {:?}",
                r.properties
            );
        }
    }

    #[test]
    fn negated_verdicts_are_caught() {
        let broken = |c: &Config, w: &Weight| -> Result<Verdict> {
            Ok(match is_semistable(c, w)? {
                Verdict::Stable => Verdict::Unstable {
                    witness: crate::configs::Subrep {
                        dims: vec![0],
                        line: None,
                        sections: IdxSet::EMPTY,
                        value: crate::projline::int(0),
                    },
                },
                Verdict::Unstable { .. } => Verdict::Stable,
                v => v,
            })
        };
        let r = run_suite_with(Suite::StabilityOracle, 1, small(), Exec::default(), &broken);
        assert!(!r.passed);
        assert!(r.properties[0].counterexample.is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite(Suite::RoundtripHassett, 9, small(), Exec::Parallel);
        let b = run_suite(Suite::RoundtripHassett, 9, small(), Exec::Sequential);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
