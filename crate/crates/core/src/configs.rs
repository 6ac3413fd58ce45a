//! Representations of `Q_n` and `P_n` as configurations of sections of the
//! projective line: stability, chart normalization, limit equations and
//! fiberwise gluing.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chambers::{stability_polytope, Mode, PnWeight, QnWeight, StabPolytope, Weight};
use crate::error::{Error, Result};
use crate::index::IdxSet;
use crate::projline::{
    int, moebius_apply, moebius_from_pair, moebius_from_triple, pp_eq, CommonDen, Moebius,
    ProjPoint, Rat,
};

/// A section `s_i`: either the zero map or a point of the projective line.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Zero,
    Point(ProjPoint),
}

impl Section {
    pub fn point(&self) -> Option<&ProjPoint> {
        match self {
            Section::Zero => None,
            Section::Point(p) => Some(p),
        }
    }

    pub fn affine(x: Rat) -> Self {
        Section::Point(ProjPoint::affine(x))
    }
}

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Zero => f.write_str("zero"),
            Section::Point(p) => fmt::Debug::fmt(p, f),
        }
    }
}

impl Serialize for Section {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Section::Zero => s.serialize_str("zero"),
            Section::Point(p) => p.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Section {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Point(ProjPoint),
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "zero" => Ok(Section::Zero),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown section {t:?}"))),
            Raw::Point(p) => Ok(Section::Point(p)),
        }
    }
}

fn points(sections: &[Section]) -> Result<Vec<ProjPoint>> {
    sections
        .iter()
        .enumerate()
        .map(|(i, s)| s.point().cloned().ok_or(Error::ZeroSection(i)))
        .collect()
}

fn zeros(sections: &[Section]) -> IdxSet {
    sections
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == Section::Zero)
        .map(|(i, _)| i)
        .collect()
}

/// A representation `(s_1, …, s_n)` of `Q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Section>", into = "Vec<Section>")]
pub struct QnConfig(Vec<Section>);

impl TryFrom<Vec<Section>> for QnConfig {
    type Error = Error;
    fn try_from(v: Vec<Section>) -> Result<Self> {
        QnConfig::new(v)
    }
}

impl From<QnConfig> for Vec<Section> {
    fn from(c: QnConfig) -> Self {
        c.0
    }
}

impl QnConfig {
    pub fn new(sections: Vec<Section>) -> Result<Self> {
        if sections.len() < 3 || sections.len() > 31 {
            return Err(Error::Invalid("Q_n configurations need 3 ≤ n ≤ 31".into()));
        }
        Ok(QnConfig(sections))
    }

    pub fn from_points(points: Vec<ProjPoint>) -> Result<Self> {
        QnConfig::new(points.into_iter().map(Section::Point).collect())
    }

    /// Affine integer points.
    pub fn affine(values: &[i64]) -> Self {
        QnConfig::from_points(values.iter().map(|&x| ProjPoint::affine(int(x))).collect())
            .expect("n ≥ 3")
    }

    pub fn sections(&self) -> &[Section] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// The points, failing on zero sections.
    pub fn points(&self) -> Result<Vec<ProjPoint>> {
        points(&self.0)
    }

    pub fn coincidence_partition(&self) -> Result<CoincidencePartition> {
        let pts = self.points()?;
        Ok(CoincidencePartition::from_blocks(self.n(), classes(&pts)))
    }

    pub fn apply(&self, m: &Moebius) -> QnConfig {
        QnConfig(
            self.0
                .iter()
                .map(|s| match s {
                    Section::Zero => Section::Zero,
                    Section::Point(p) => Section::Point(moebius_apply(m, p)),
                })
                .collect(),
        )
    }
}

/// A representation of `P_n`; the anchors `s_0 = (0:1)` and `s_∞ = (1:0)` are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Section>", into = "Vec<Section>")]
pub struct PnConfig(Vec<Section>);

impl TryFrom<Vec<Section>> for PnConfig {
    type Error = Error;
    fn try_from(v: Vec<Section>) -> Result<Self> {
        PnConfig::new(v)
    }
}

impl From<PnConfig> for Vec<Section> {
    fn from(c: PnConfig) -> Self {
        c.0
    }
}

impl PnConfig {
    pub fn new(sections: Vec<Section>) -> Result<Self> {
        if sections.is_empty() || sections.len() > 31 {
            return Err(Error::Invalid("P_n configurations need 1 ≤ n ≤ 31".into()));
        }
        Ok(PnConfig(sections))
    }

    pub fn from_points(points: Vec<ProjPoint>) -> Result<Self> {
        PnConfig::new(points.into_iter().map(Section::Point).collect())
    }

    pub fn sections(&self) -> &[Section] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn points(&self) -> Result<Vec<ProjPoint>> {
        points(&self.0)
    }

    pub fn coincidence_partition(&self) -> Result<CoincidencePartition> {
        let pts = self.points()?;
        let j0 = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_zero())
            .map(|(i, _)| i)
            .collect();
        let jinf = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_infinity())
            .map(|(i, _)| i)
            .collect();
        Ok(CoincidencePartition::with_anchors(
            self.n(),
            classes(&pts),
            j0,
            jinf,
        ))
    }

    /// `(J_0, J_∞)` ignoring zero sections.
    fn anchor_sets(&self) -> (IdxSet, IdxSet) {
        let mut j0 = IdxSet::EMPTY;
        let mut jinf = IdxSet::EMPTY;
        for (i, s) in self.0.iter().enumerate() {
            if let Section::Point(p) = s {
                if p.is_zero() {
                    j0.insert(i);
                } else if p.is_infinity() {
                    jinf.insert(i);
                }
            }
        }
        (j0, jinf)
    }
}

/// Either kind of configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", content = "sections", rename_all = "lowercase")]
pub enum Config {
    Qn(QnConfig),
    Pn(PnConfig),
}

impl Config {
    pub fn mode(&self) -> Mode {
        match self {
            Config::Qn(_) => Mode::Qn,
            Config::Pn(_) => Mode::Pn,
        }
    }

    pub fn sections(&self) -> &[Section] {
        match self {
            Config::Qn(c) => c.sections(),
            Config::Pn(c) => c.sections(),
        }
    }

    pub fn n(&self) -> usize {
        self.sections().len()
    }

    pub fn coincidence_partition(&self) -> Result<CoincidencePartition> {
        match self {
            Config::Qn(c) => c.coincidence_partition(),
            Config::Pn(c) => c.coincidence_partition(),
        }
    }
}

/// Classes of equal points, ordered by least element.
fn classes(pts: &[ProjPoint]) -> Vec<IdxSet> {
    let mut out: Vec<(ProjPoint, IdxSet)> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        match out.iter_mut().find(|(q, _)| pp_eq(p, q)) {
            Some((_, set)) => set.insert(i),
            None => out.push((p.clone(), IdxSet::single(i))),
        }
    }
    out.into_iter().map(|(_, s)| s).collect()
}

/// Partition of the section indices by equality; for `P_n` also the
/// classes meeting the anchors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoincidencePartition {
    pub n: usize,
    pub blocks: Vec<IdxSet>,
    #[serde(default)]
    pub j0: IdxSet,
    #[serde(default)]
    pub jinf: IdxSet,
}

impl CoincidencePartition {
    pub fn from_blocks(n: usize, mut blocks: Vec<IdxSet>) -> Self {
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| IdxSet::min(*b));
        CoincidencePartition {
            n,
            blocks,
            j0: IdxSet::EMPTY,
            jinf: IdxSet::EMPTY,
        }
    }

    pub fn with_anchors(n: usize, blocks: Vec<IdxSet>, j0: IdxSet, jinf: IdxSet) -> Self {
        let mut p = CoincidencePartition::from_blocks(n, blocks);
        p.j0 = j0;
        p.jinf = jinf;
        p
    }

    pub fn singletons(n: usize) -> Self {
        CoincidencePartition::from_blocks(n, (0..n).map(IdxSet::single).collect())
    }

    /// Block number of every index.
    pub fn block_index(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for i in b.iter() {
                out[i] = k;
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = IdxSet::EMPTY;
        for b in &self.blocks {
            if b.is_empty() || !b.is_disjoint(seen) {
                return false;
            }
            seen = seen.union(*b);
        }
        let anchors_ok = |j: IdxSet| j.is_empty() || self.blocks.contains(&j);
        seen == IdxSet::full(self.n)
            && self.j0.is_disjoint(self.jinf)
            && anchors_ok(self.j0)
            && anchors_ok(self.jinf)
    }

    /// A `Q_n` configuration realizing the partition: block `k` sits at the affine point `k`.
    pub fn qn_representative(&self) -> QnConfig {
        let idx = self.block_index();
        QnConfig::new(
            idx.into_iter()
                .map(|k| Section::affine(int(k as i64)))
                .collect(),
        )
        .expect("n ≥ 3")
    }

    /// A `P_n` configuration realizing the partition, with `j0`/`jinf` at the anchors.
    pub fn pn_representative(&self) -> PnConfig {
        let idx = self.block_index();
        let secs = (0..self.n)
            .map(|i| {
                if self.j0.contains(i) {
                    Section::Point(ProjPoint::zero())
                } else if self.jinf.contains(i) {
                    Section::Point(ProjPoint::infinity())
                } else {
                    Section::affine(int(idx[i] as i64 + 1))
                }
            })
            .collect();
        PnConfig::new(secs).expect("n ≥ 1")
    }
}

/// A subrepresentation: dimensions at the 2-dimensional part (`[dim V'_p]`
/// for `Q_n`, `[dim V'_{p1}, dim V'_{p2}]` for `P_n`), the line when
/// `dim V'_p = 1`, and the set of vertices `q_i` included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subrep {
    pub dims: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line: Option<ProjPoint>,
    pub sections: IdxSet,
    #[serde(with = "crate::projline::rat_serde")]
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    StrictlySemistable { witness: Subrep },
    Unstable { witness: Subrep },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Stable => VerdictKind::Stable,
            Verdict::StrictlySemistable { .. } => VerdictKind::StrictlySemistable,
            Verdict::Unstable { .. } => VerdictKind::Unstable,
        }
    }

    pub fn is_semistable(&self) -> bool {
        !matches!(self, Verdict::Unstable { .. })
    }

    /// Verdict from the maximal `θ(V')` over proper nonzero subrepresentations.
    fn from_max(best: Subrep) -> Verdict {
        if best.value.is_negative() {
            Verdict::Stable
        } else if best.value.is_zero() {
            Verdict::StrictlySemistable { witness: best }
        } else {
            Verdict::Unstable { witness: best }
        }
    }
}

/// Arithmetic needed to evaluate `θ(V')`; implemented for machine integers
/// over a common denominator and for exact rationals.
trait Value:
    Clone
    + PartialOrd
    + Zero
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + Sub<Output = Self>
{
}
impl<T> Value for T where
    T: Clone
        + PartialOrd
        + Zero
        + Neg<Output = T>
        + for<'a> Add<&'a T, Output = T>
        + Sub<Output = T>
{
}

fn sum_over<T: Value>(theta: &[T], set: IdxSet) -> T {
    set.iter().fold(T::zero(), |acc, i| acc + &theta[i])
}

/// Keeps the first candidate of maximal value.
fn keep_max<C, T: Value>(best: &mut Option<(C, T)>, cand: C, value: T) {
    if best.as_ref().is_none_or(|(_, b)| value > *b) {
        *best = Some((cand, value));
    }
}

fn check_len(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::Invalid(format!(
            "configuration has {n} sections but the weight has {m}"
        )));
    }
    Ok(())
}

/// Candidate subrepresentations of a `Q_n` configuration.
#[derive(Clone, Copy)]
enum QnCand {
    /// Only the zero sections.
    Zeros,
    /// A coincidence class, by index, together with the zero sections.
    Line(usize),
    /// A line through no section.
    Free,
    /// Everything except `q_i`.
    Drop(usize),
}

fn qn_best<T: Value>(t: &[T], one: &T, z: IdxSet, lines: &[(ProjPoint, IdxSet)]) -> (QnCand, T) {
    let mut best = None;
    if !z.is_empty() {
        keep_max(&mut best, QnCand::Zeros, sum_over(t, z));
    }
    for (k, (_, j)) in lines.iter().enumerate() {
        keep_max(
            &mut best,
            QnCand::Line(k),
            sum_over(t, j.union(z)) - one.clone(),
        );
    }
    keep_max(&mut best, QnCand::Free, sum_over(t, z) - one.clone());
    for (i, ti) in t.iter().enumerate() {
        keep_max(&mut best, QnCand::Drop(i), -ti.clone());
    }
    best.expect("n ≥ 1 candidates")
}

/// `θ`-stability of a `Q_n` configuration via its coincidence classes.
pub fn is_semistable_qn(config: &QnConfig, theta: &QnWeight) -> Result<Verdict> {
    let n = config.n();
    check_len(n, theta.n())?;
    let z = zeros(config.sections());
    let mut lines: Vec<(ProjPoint, IdxSet)> = Vec::new();
    for (i, s) in config.sections().iter().enumerate() {
        if let Some(p) = s.point() {
            match lines.iter_mut().find(|(q, _)| pp_eq(p, q)) {
                Some((_, set)) => set.insert(i),
                None => lines.push((p.clone(), IdxSet::single(i))),
            }
        }
    }
    let (cand, value) = match CommonDen::new(theta.theta()) {
        Some(c) => {
            let (cand, v) = qn_best(&c.num, &c.den, z, &lines);
            (cand, c.rat(v))
        }
        None => qn_best(theta.theta(), &Rat::one(), z, &lines),
    };
    let best = match cand {
        QnCand::Zeros => Subrep {
            dims: vec![0],
            line: None,
            sections: z,
            value,
        },
        QnCand::Line(k) => Subrep {
            dims: vec![1],
            line: Some(lines[k].0.clone()),
            sections: lines[k].1.union(z),
            value,
        },
        QnCand::Free => {
            let free = free_line(lines.iter().map(|(p, _)| p));
            Subrep {
                dims: vec![1],
                line: Some(free),
                sections: z,
                value,
            }
        }
        QnCand::Drop(i) => Subrep {
            dims: vec![2],
            line: None,
            sections: IdxSet::full(n).without(i),
            value,
        },
    };
    Ok(Verdict::from_max(best))
}

/// A point different from all of `used`.
fn free_line<'a>(used: impl Iterator<Item = &'a ProjPoint>) -> ProjPoint {
    let used: Vec<&ProjPoint> = used.collect();
    (0i64..)
        .map(|k| ProjPoint::affine(int(k)))
        .chain(std::iter::once(ProjPoint::infinity()))
        .find(|p| !used.iter().any(|q| pp_eq(p, q)))
        .expect("infinitely many points")
}

/// Candidate subrepresentations of a `P_n` configuration, as
/// `(dim V'_{p1}, dim V'_{p2}, sections)`.
fn pn_best<T: Value>(
    eta: [&T; 2],
    t: &[T],
    z: IdxSet,
    j0: IdxSet,
    jinf: IdxSet,
) -> (([u8; 2], IdxSet), T) {
    let mut best = None;
    if !z.is_empty() {
        keep_max(&mut best, ([0, 0], z), sum_over(t, z));
    }
    let s = jinf.union(z);
    keep_max(&mut best, ([1, 0], s), sum_over(t, s) + eta[0]);
    let s = j0.union(z);
    keep_max(&mut best, ([0, 1], s), sum_over(t, s) + eta[1]);
    let full = IdxSet::full(t.len());
    for (i, ti) in t.iter().enumerate() {
        keep_max(&mut best, ([1, 1], full.without(i)), -ti.clone());
    }
    best.expect("candidates")
}

/// `θ`-stability of a `P_n` configuration via `J_0`, `J_∞`.
pub fn is_semistable_pn(config: &PnConfig, theta: &PnWeight) -> Result<Verdict> {
    let n = config.n();
    check_len(n, theta.n())?;
    let z = zeros(config.sections());
    let (j0, jinf) = config.anchor_sets();
    let ((dims, sections), value) = match CommonDen::new(
        [theta.eta1(), theta.eta2()]
            .into_iter()
            .chain(theta.theta()),
    ) {
        Some(c) => {
            let (cand, v) = pn_best([&c.num[0], &c.num[1]], &c.num[2..], z, j0, jinf);
            (cand, c.rat(v))
        }
        None => pn_best([theta.eta1(), theta.eta2()], theta.theta(), z, j0, jinf),
    };
    Ok(Verdict::from_max(Subrep {
        dims: dims.to_vec(),
        line: None,
        sections,
        value,
    }))
}

/// Dispatches on the configuration and weight kinds.
pub fn is_semistable(config: &Config, theta: &Weight) -> Result<Verdict> {
    match (config, theta) {
        (Config::Qn(c), Weight::Qn(w)) => is_semistable_qn(c, w),
        (Config::Pn(c), Weight::Pn(w)) => is_semistable_pn(c, w),
        _ => Err(Error::Invalid(
            "configuration and weight belong to different quivers".into(),
        )),
    }
}

/// Stability by enumerating subrepresentations directly.
pub fn brute_force_semistable(config: &Config, theta: &Weight) -> Result<Verdict> {
    BruteForce::new(config).verdict(theta)
}

/// A subrepresentation without its weight value.
#[derive(Clone, Debug)]
struct Candidate {
    dims: Vec<u8>,
    line: Option<ProjPoint>,
    sections: IdxSet,
}

/// The exhaustive oracle with the subrepresentations of one configuration
/// listed once, for evaluation against many weights.
#[derive(Clone, Debug)]
pub struct BruteForce {
    mode: Mode,
    n: usize,
    candidates: Vec<Candidate>,
}

impl BruteForce {
    pub fn new(config: &Config) -> Self {
        let candidates = match config {
            Config::Qn(c) => qn_candidates(c),
            Config::Pn(c) => pn_candidates(c),
        };
        BruteForce {
            mode: config.mode(),
            n: config.n(),
            candidates,
        }
    }

    pub fn verdict(&self, theta: &Weight) -> Result<Verdict> {
        check_len(self.n, theta.n())?;
        if theta.mode() != self.mode {
            return Err(Error::Invalid(
                "configuration and weight belong to different quivers".into(),
            ));
        }
        // clear denominators once; every value is then an integer sum
        let x = theta.coords();
        let (c, value) = match CommonDen::new(&x) {
            Some(cd) => {
                let (c, v) = self.max_over(&cd.num, &cd.den);
                (c, cd.rat(v))
            }
            None => {
                let den = x.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
                let num: Vec<BigInt> = x.iter().map(|r| r.numer() * (&den / r.denom())).collect();
                let (c, v) = self.max_over(&num, &den);
                (c, Rat::new(v, den))
            }
        };
        Ok(Verdict::from_max(Subrep {
            dims: c.dims.clone(),
            line: c.line.clone(),
            sections: c.sections,
            value,
        }))
    }

    /// The first candidate of maximal scaled value `den·θ(V')`.
    fn max_over<T>(&self, num: &[T], den: &T) -> (&Candidate, T)
    where
        T: Clone
            + Ord
            + Zero
            + From<u8>
            + for<'a> std::ops::AddAssign<&'a T>
            + for<'a> std::ops::SubAssign<&'a T>,
        for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
    {
        let off = self.mode.theta_offset();
        let mut best: Option<(&Candidate, T)> = None;
        for c in &self.candidates {
            let mut v = T::zero();
            for i in c.sections.iter() {
                v += &num[off + i];
            }
            match self.mode {
                Mode::Qn => v -= &(den * &T::from(c.dims[0])),
                Mode::Pn => {
                    if c.dims[0] == 1 {
                        v += &num[0];
                    }
                    if c.dims[1] == 1 {
                        v += &num[1];
                    }
                }
            }
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((c, v));
            }
        }
        best.expect("n ≥ 1")
    }
}

fn qn_candidates(config: &QnConfig) -> Vec<Candidate> {
    let n = config.n();
    let secs = config.sections();
    // candidate subspaces of V_p: 0, lines of present sections, coordinate axes, everything
    let mut spaces: Vec<(u8, Option<ProjPoint>)> = vec![(0, None)];
    let mut lines: Vec<ProjPoint> = vec![ProjPoint::zero(), ProjPoint::infinity()];
    for p in secs.iter().filter_map(Section::point) {
        if !lines.iter().any(|q| pp_eq(p, q)) {
            lines.push(p.clone());
        }
    }
    spaces.extend(lines.into_iter().map(|p| (1, Some(p))));
    spaces.push((2, None));
    let mut out = Vec::new();
    for (dim, line) in &spaces {
        let fits = |i: usize| match (&secs[i], dim, line) {
            (Section::Zero, _, _) => true,
            (_, 2, _) => true,
            (Section::Point(p), 1, Some(l)) => pp_eq(p, l),
            _ => false,
        };
        for s in IdxSet::all_subsets(n) {
            if !s.iter().all(fits) {
                continue;
            }
            let proper = !(*dim == 2 && s.len() == n);
            let nonzero = *dim > 0 || !s.is_empty();
            if proper && nonzero {
                out.push(Candidate {
                    dims: vec![*dim],
                    line: line.clone(),
                    sections: s,
                });
            }
        }
    }
    out
}

fn pn_candidates(config: &PnConfig) -> Vec<Candidate> {
    let n = config.n();
    let secs = config.sections();
    let mut out = Vec::new();
    // bit 0: p1, bit 1: p2, bits 2..: q_i
    for bits in 1u64..(1u64 << (n + 2)) - 1 {
        let (d1, d2) = ((bits & 1) as u8, (bits >> 1 & 1) as u8);
        let s = IdxSet::from_bits((bits >> 2) as u32);
        let closed = s.iter().all(|i| match &secs[i] {
            Section::Zero => true,
            // q_i → p1 is s_{i,0}, q_i → p2 is s_{i,1}
            Section::Point(p) => (p.c0().is_zero() || d1 == 1) && (p.c1().is_zero() || d2 == 1),
        });
        if closed {
            out.push(Candidate {
                dims: vec![d1, d2],
                line: None,
                sections: s,
            });
        }
    }
    out
}

/// `Θ(V)`: the stability polytope of a configuration without zero sections.
pub fn theta_polytope(config: &Config) -> Result<StabPolytope> {
    Ok(StabPolytope {
        mode: config.mode(),
        partition: config.coincidence_partition()?,
    })
}

/// Vertices of `Θ(V)` in the coordinates of its mode.
pub fn theta_polytope_vertices(config: &Config) -> Result<Vec<crate::chambers::Vertex>> {
    Ok(stability_polytope(&theta_polytope(config)?).vertices)
}

/// Möbius-normalizes so that `s_{i1}, s_{i2}, s_{i3}` become `0, ∞, 1`.
pub fn normalize_chart_qn(config: &QnConfig, t: [usize; 3]) -> Result<QnConfig> {
    let pts = config.points()?;
    if t.iter().any(|&i| i >= pts.len()) {
        return Err(Error::Invalid("chart index out of range".into()));
    }
    let m = moebius_from_triple(&pts[t[0]], &pts[t[1]], &pts[t[2]])?;
    Ok(config.apply(&m))
}

/// Rescales diagonally so that `s_i = (1:1)`.
pub fn normalize_chart_pn(config: &PnConfig, i: usize) -> Result<PnConfig> {
    let pts = config.points()?;
    let p = pts
        .get(i)
        .ok_or_else(|| Error::Invalid("chart index out of range".into()))?;
    if p.is_zero() || p.is_infinity() {
        return Err(Error::DegenerateAnchor(i));
    }
    let m = Moebius::new(p.c1().clone(), Rat::zero(), Rat::zero(), p.c0().clone())?;
    PnConfig::from_points(pts.iter().map(|q| moebius_apply(&m, q)).collect())
}

/// The configurations of two charts moved so that the anchor pair sits at
/// `0` and `∞`; returns the points and the normalizing maps.
fn anchored(
    a: &Config,
    b: &Config,
    pair: Option<(usize, usize)>,
) -> Result<([Vec<ProjPoint>; 2], [Moebius; 2])> {
    if a.mode() != b.mode() || a.n() != b.n() {
        return Err(Error::Invalid("charts of different shapes".into()));
    }
    let pa = points(a.sections())?;
    let pb = points(b.sections())?;
    match (a.mode(), pair) {
        (Mode::Pn, _) => Ok(([pa, pb], [Moebius::identity(), Moebius::identity()])),
        (Mode::Qn, Some((i, j))) => {
            if i >= pa.len() || j >= pa.len() {
                return Err(Error::Invalid("anchor index out of range".into()));
            }
            let ma = moebius_from_pair(&pa[i], &pa[j]).map_err(|_| Error::DegeneratePair(i, j))?;
            let mb = moebius_from_pair(&pb[i], &pb[j]).map_err(|_| Error::DegeneratePair(i, j))?;
            let na = pa.iter().map(|p| moebius_apply(&ma, p)).collect();
            let nb = pb.iter().map(|p| moebius_apply(&mb, p)).collect();
            Ok(([na, nb], [ma, mb]))
        }
        (Mode::Qn, None) => Err(Error::Invalid("Q_n charts need an anchor pair".into())),
    }
}

/// `(A_{k,0}·B_{k,1}, A_{k,1}·B_{k,0})` per section.
fn limit_vectors(a: &[ProjPoint], b: &[ProjPoint]) -> Vec<(Rat, Rat)> {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.c0() * q.c1(), p.c1() * q.c0()))
        .collect()
}

/// The limit equations `A_{k,0}A_{l,1}B_{k,1}B_{l,0} = A_{k,1}A_{l,0}B_{k,0}B_{l,1}`
/// for all `k, l`, after moving `(i, j)` to `(0, ∞)` in both charts.
///
/// `pair` is the anchor pair `(i, j)` for `Q_n` and ignored for `P_n`.
pub fn check_limit_equations(a: &Config, b: &Config, pair: Option<(usize, usize)>) -> Result<bool> {
    let ([pa, pb], _) = anchored(a, b, pair)?;
    // all (u_k, v_k) must be pairwise proportional
    let vecs = limit_vectors(&pa, &pb);
    let Some((u0, v0)) = vecs.iter().find(|(u, v)| !u.is_zero() || !v.is_zero()) else {
        return Ok(true);
    };
    Ok(vecs.iter().all(|(u, v)| u * v0 == v * u0))
}

/// The equations evaluated literally over all `k, l`.
pub fn check_limit_equations_literal(
    a: &Config,
    b: &Config,
    pair: Option<(usize, usize)>,
) -> Result<bool> {
    let ([pa, pb], _) = anchored(a, b, pair)?;
    let n = pa.len();
    for k in 0..n {
        for l in 0..n {
            let lhs = pa[k].c0() * pa[l].c1() * pb[k].c1() * pb[l].c0();
            let rhs = pa[k].c1() * pa[l].c0() * pb[k].c0() * pb[l].c1();
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The fiber of the curve glued from two charts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GluedFiber {
    /// One component; `moebius` carries chart `A` onto chart `B`.
    Irreducible { moebius: Moebius },
    /// Two lines meeting at a node. Sections in `on_a` lie on the component
    /// mapped isomorphically to chart `A` (and are contracted to `node_b` in
    /// chart `B`), symmetrically for `on_b`; `at_node` sections hit the node.
    TwoComponents {
        on_a: IdxSet,
        on_b: IdxSet,
        at_node: IdxSet,
        node_a: ProjPoint,
        node_b: ProjPoint,
    },
}

/// Glues the two charts along the graph of their limit equations.
pub fn glue_fiber(a: &Config, b: &Config, pair: Option<(usize, usize)>) -> Result<GluedFiber> {
    if !check_limit_equations(a, b, pair)? {
        return Err(Error::EquationsFail);
    }
    let ([pa, pb], [ma, mb]) = anchored(a, b, pair)?;
    let finite = |p: &ProjPoint| !p.is_zero() && !p.is_infinity();
    if let Some(k) = (0..pa.len()).find(|&k| finite(&pa[k]) && finite(&pb[k])) {
        let c = pb[k].value().expect("finite") / pa[k].value().expect("finite");
        let diag = Moebius::diagonal(c)?;
        let m = mb.inverse().compose(&diag).compose(&ma);
        return Ok(GluedFiber::Irreducible { moebius: m });
    }
    let n = pa.len();
    // orientation: the node sits at (0, ∞) or at (∞, 0) of the two charts
    let first = (0..n).all(|k| pa[k].is_zero() || pb[k].is_infinity());
    let (node_a, node_b) = if first {
        (ProjPoint::zero(), ProjPoint::infinity())
    } else {
        (ProjPoint::infinity(), ProjPoint::zero())
    };
    let mut on_a = IdxSet::EMPTY;
    let mut on_b = IdxSet::EMPTY;
    let mut at_node = IdxSet::EMPTY;
    for k in 0..n {
        match (pp_eq(&pa[k], &node_a), pp_eq(&pb[k], &node_b)) {
            (true, true) => at_node.insert(k),
            (false, true) => on_a.insert(k),
            (true, false) => on_b.insert(k),
            (false, false) => return Err(Error::EquationsFail),
        }
    }
    Ok(GluedFiber::TwoComponents {
        on_a,
        on_b,
        at_node,
        node_a: moebius_apply(&ma.inverse(), &node_a),
        node_b: moebius_apply(&mb.inverse(), &node_b),
    })
}

/// The `P_n` configuration obtained by sending `s_a ↦ ∞`, `s_b ↦ 0` and dropping both.
pub fn map_config_qn2_pn(config: &QnConfig, a: usize, b: usize) -> Result<PnConfig> {
    let secs = config.sections();
    if a >= secs.len() || b >= secs.len() || a == b {
        return Err(Error::Invalid("a and b must be distinct indices".into()));
    }
    let (Some(pa), Some(pb)) = (secs[a].point(), secs[b].point()) else {
        return Err(Error::DegeneratePair(a, b));
    };
    let m = moebius_from_pair(pb, pa).map_err(|_| Error::DegeneratePair(a, b))?;
    let rest = secs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != a && *i != b)
        .map(|(_, s)| match s {
            Section::Zero => Section::Zero,
            Section::Point(p) => Section::Point(moebius_apply(&m, p)),
        })
        .collect();
    PnConfig::new(rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::{Containment, Vertex};
    use crate::projline::{cross_ratio, rat};
    use proptest::prelude::*;

    fn half(n: usize) -> QnWeight {
        QnWeight::barycenter(n)
    }

    #[test]
    fn partitions() {
        let p = QnConfig::affine(&[0, 1, 2, 3])
            .coincidence_partition()
            .unwrap();
        assert_eq!(p, CoincidencePartition::singletons(4));
        let p = QnConfig::affine(&[5, 5, 7, 7])
            .coincidence_partition()
            .unwrap();
        assert_eq!(
            p.blocks,
            vec![[0, 1].into_iter().collect(), [2, 3].into_iter().collect()]
        );
        let c = PnConfig::from_points(vec![ProjPoint::zero(), ProjPoint::one()]).unwrap();
        assert_eq!(c.coincidence_partition().unwrap().j0, IdxSet::single(0));
        let z = QnConfig::new(vec![
            Section::Zero,
            Section::affine(int(1)),
            Section::affine(int(2)),
        ])
        .unwrap();
        assert_eq!(z.coincidence_partition(), Err(Error::ZeroSection(0)));
    }

    #[test]
    fn stability_examples() {
        let th = half(4);
        let v = is_semistable_qn(&QnConfig::affine(&[0, 1, 2, 3]), &th).unwrap();
        assert_eq!(v, Verdict::Stable);
        let v = is_semistable_qn(&QnConfig::affine(&[0, 0, 2, 3]), &th).unwrap();
        match v {
            Verdict::StrictlySemistable { witness } => {
                assert_eq!(witness.sections, [0, 1].into_iter().collect())
            }
            other => panic!("{other:?}"),
        }
        let v = is_semistable_qn(&QnConfig::affine(&[0, 0, 0, 3]), &th).unwrap();
        match v {
            Verdict::Unstable { witness } => {
                assert_eq!(witness.sections, [0, 1, 2].into_iter().collect())
            }
            other => panic!("{other:?}"),
        }
        // J_0 = {1}, θ_1 = 1/2 > -η_2 = 1/4
        let c = PnConfig::from_points(vec![ProjPoint::zero(), ProjPoint::one()]).unwrap();
        let w = PnWeight::new(rat(-3, 4), rat(-1, 4), vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(
            is_semistable_pn(&c, &w).unwrap().kind(),
            VerdictKind::Unstable
        );
        let bf = brute_force_semistable(&Config::Pn(c), &Weight::Pn(w)).unwrap();
        assert_eq!(bf.kind(), VerdictKind::Unstable);
    }

    #[test]
    fn zero_sections() {
        let c = QnConfig::new(vec![
            Section::Zero,
            Section::affine(int(1)),
            Section::affine(int(2)),
            Section::affine(int(3)),
        ])
        .unwrap();
        let v = is_semistable_qn(&c, &half(4)).unwrap();
        assert!(matches!(v, Verdict::Unstable { ref witness } if witness.dims == vec![0]));
        let w = QnWeight::new(vec![int(0), rat(2, 3), rat(2, 3), rat(2, 3)]).unwrap();
        assert_eq!(
            is_semistable_qn(&c, &w).unwrap().kind(),
            VerdictKind::StrictlySemistable
        );
    }

    #[test]
    fn polytope_vertices_match_stability() {
        for n in 4..=5 {
            for blocks in crate::index::set_partitions(n) {
                let cfg = CoincidencePartition::from_blocks(n, blocks).qn_representative();
                let verts = theta_polytope_vertices(&Config::Qn(cfg.clone())).unwrap();
                for i in 0..n {
                    for j in i + 1..n {
                        let v = is_semistable_qn(&cfg, &QnWeight::vertex(n, i, j)).unwrap();
                        assert_eq!(verts.contains(&Vertex::Qn(i, j)), v.is_semistable());
                    }
                }
            }
        }
        let two = Config::Qn(QnConfig::affine(&[1, 1, 2, 2]));
        let g = stability_polytope(&theta_polytope(&two).unwrap());
        assert!(!g.polytope.is_full_dimensional());
        let generic = Config::Qn(QnConfig::affine(&[1, 2, 3, 4]));
        let g = stability_polytope(&theta_polytope(&generic).unwrap());
        assert_eq!(
            g.polytope.contains(&Weight::Qn(half(4))),
            Containment::Interior
        );
    }

    #[test]
    fn chart_normalization() {
        let c = QnConfig::from_points(vec![
            ProjPoint::zero(),
            ProjPoint::infinity(),
            ProjPoint::one(),
            ProjPoint::affine(rat(5, 3)),
        ])
        .unwrap();
        assert_eq!(normalize_chart_qn(&c, [0, 1, 2]).unwrap(), c);
        let c = QnConfig::affine(&[3, -1, 4, 7]);
        let pts = c.points().unwrap();
        let out = normalize_chart_qn(&c, [0, 1, 2]).unwrap();
        assert_eq!(
            out.points().unwrap()[3],
            cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap()
        );
        assert_eq!(
            normalize_chart_qn(&QnConfig::affine(&[1, 1, 2]), [0, 1, 2]),
            Err(Error::DegenerateTriple)
        );

        let p = PnConfig::from_points(vec![ProjPoint::one(), ProjPoint::zero()]).unwrap();
        assert_eq!(normalize_chart_pn(&p, 0).unwrap(), p);
        let p = PnConfig::from_points(vec![ProjPoint::from_ints(2, 1), ProjPoint::from_ints(4, 1)])
            .unwrap();
        let q = normalize_chart_pn(&p, 0).unwrap();
        assert_eq!(
            q.points().unwrap(),
            vec![ProjPoint::one(), ProjPoint::from_ints(2, 1)]
        );
        assert_eq!(
            normalize_chart_pn(&q, 1).unwrap().points().unwrap()[1],
            ProjPoint::one()
        );
        let bad = PnConfig::from_points(vec![ProjPoint::zero()]).unwrap();
        assert_eq!(normalize_chart_pn(&bad, 0), Err(Error::DegenerateAnchor(0)));
    }

    #[test]
    fn limit_equations_examples() {
        let a = Config::Qn(QnConfig::affine(&[0, 1, 3, 7]));
        assert!(check_limit_equations(&a, &a, Some((0, 1))).unwrap());
        assert!(
            matches!(glue_fiber(&a, &a, Some((0, 1))).unwrap(), GluedFiber::Irreducible { moebius } if moebius == Moebius::identity())
        );
        let pa = PnConfig::from_points(vec![ProjPoint::affine(int(2)), ProjPoint::affine(int(5))])
            .unwrap();
        let pb = PnConfig::from_points(vec![ProjPoint::affine(int(6)), ProjPoint::affine(int(15))])
            .unwrap();
        assert!(check_limit_equations(&Config::Pn(pa.clone()), &Config::Pn(pb), None).unwrap());
        let pc = PnConfig::from_points(vec![ProjPoint::affine(int(6)), ProjPoint::affine(int(16))])
            .unwrap();
        assert!(!check_limit_equations(&Config::Pn(pa), &Config::Pn(pc), None).unwrap());
        assert_eq!(
            check_limit_equations(&a, &a, Some((0, 0))),
            Err(Error::DegeneratePair(0, 0))
        );
    }

    #[test]
    fn glue_across_a_wall() {
        // one side: s3 = s4 separated; the other: s1 = s2 separated
        let a = Config::Qn(
            QnConfig::from_points(vec![
                ProjPoint::zero(),
                ProjPoint::one(),
                ProjPoint::infinity(),
                ProjPoint::infinity(),
            ])
            .unwrap(),
        );
        let b = Config::Qn(
            QnConfig::from_points(vec![
                ProjPoint::zero(),
                ProjPoint::zero(),
                ProjPoint::infinity(),
                ProjPoint::one(),
            ])
            .unwrap(),
        );
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(check_limit_equations(&a, &b, Some((i, j))).unwrap());
            match glue_fiber(&a, &b, Some((i, j))).unwrap() {
                GluedFiber::TwoComponents {
                    on_a,
                    on_b,
                    at_node,
                    ..
                } => {
                    assert_eq!(on_a, [0, 1].into_iter().collect());
                    assert_eq!(on_b, [2, 3].into_iter().collect());
                    assert!(at_node.is_empty());
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn map_to_pn() {
        let c = QnConfig::from_points(vec![
            ProjPoint::infinity(),
            ProjPoint::zero(),
            ProjPoint::one(),
            ProjPoint::affine(int(3)),
        ])
        .unwrap();
        let m = map_config_qn2_pn(&c, 0, 1).unwrap();
        assert_eq!(
            m.points().unwrap(),
            vec![ProjPoint::one(), ProjPoint::affine(int(3))]
        );
        assert_eq!(
            map_config_qn2_pn(&QnConfig::affine(&[1, 1, 2]), 0, 1),
            Err(Error::DegeneratePair(0, 1))
        );
    }

    fn point() -> impl Strategy<Value = Section> {
        prop_oneof![
            1 => Just(Section::Zero),
            1 => Just(Section::Point(ProjPoint::infinity())),
            6 => (-2i64..3).prop_map(|x| Section::affine(int(x))),
        ]
    }

    fn qn_weight(n: usize) -> impl Strategy<Value = QnWeight> {
        proptest::collection::vec(0u32..6, n).prop_filter_map("weight", move |raw| {
            let total: u32 = raw.iter().sum();
            if total == 0 {
                return None;
            }
            QnWeight::new(
                raw.iter()
                    .map(|&x| Rat::new((2 * x).into(), total.into()))
                    .collect(),
            )
            .ok()
        })
    }

    fn pn_weight(n: usize) -> impl Strategy<Value = PnWeight> {
        (0u32..5, proptest::collection::vec(0u32..5, n)).prop_filter_map("weight", |(e, raw)| {
            let total: u32 = raw.iter().sum();
            if total == 0 {
                return None;
            }
            let eta1 = rat(-(e as i64), 4);
            PnWeight::new(
                eta1.clone(),
                -Rat::one() - eta1,
                raw.iter()
                    .map(|&x| Rat::new(x.into(), total.into()))
                    .collect(),
            )
            .ok()
        })
    }

    proptest! {
        #[test]
        fn qn_matches_brute_force(secs in proptest::collection::vec(point(), 5), w in qn_weight(5)) {
            let c = Config::Qn(QnConfig::new(secs).unwrap());
            let w = Weight::Qn(w);
            prop_assert_eq!(is_semistable(&c, &w).unwrap().kind(), brute_force_semistable(&c, &w).unwrap().kind());
        }

        #[test]
        fn pn_matches_brute_force(secs in proptest::collection::vec(point(), 4), w in pn_weight(4)) {
            let c = Config::Pn(PnConfig::new(secs).unwrap());
            let w = Weight::Pn(w);
            prop_assert_eq!(is_semistable(&c, &w).unwrap().kind(), brute_force_semistable(&c, &w).unwrap().kind());
        }

        #[test]
        fn limit_check_matches_literal(a in proptest::collection::vec(-3i64..4, 5), b in proptest::collection::vec(-3i64..4, 5), scale in 1i64..5) {
            let mk = |v: &[i64]| {
                let mut pts: Vec<ProjPoint> = v.iter().map(|&x| ProjPoint::affine(int(x))).collect();
                pts[1] = ProjPoint::infinity();
                pts[0] = ProjPoint::zero();
                Config::Qn(QnConfig::from_points(pts).unwrap())
            };
            let (ca, cb) = (mk(&a), mk(&b));
            let fast = check_limit_equations(&ca, &cb, Some((0, 1))).unwrap();
            prop_assert_eq!(fast, check_limit_equations_literal(&ca, &cb, Some((0, 1))).unwrap());
            prop_assert_eq!(fast, check_limit_equations(&cb, &ca, Some((0, 1))).unwrap());
            // a diagonal rescaling of one chart changes nothing
            let Config::Qn(qa) = &ca else { unreachable!() };
            let scaled = Config::Qn(qa.apply(&Moebius::diagonal(int(scale)).unwrap()));
            prop_assert!(check_limit_equations(&ca, &scaled, Some((0, 1))).unwrap());
        }
    }
}
