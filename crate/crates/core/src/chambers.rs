//! Normalized weight polytopes, inner walls, chambers and stability polytopes.
//!
//! Coordinates: a `Q_n` weight is `θ ∈ Δ(2,n)` (the vertex weight `η = -1`
//! is implicit); a `P_n` weight is `(η1, η2, θ1..θn) ∈ Δ¹×Δ^{n-1}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{LazyLock, Mutex};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::configs::CoincidencePartition;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::IdxSet;
use crate::limits::Limits;
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::projline::{int, rat, rat_serde, rat_vec_serde, Rat};

/// Which quiver a weight or configuration belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Qn,
    Pn,
}

impl Mode {
    /// Number of coordinates of a normalized weight.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Mode::Qn => n,
            Mode::Pn => n + 2,
        }
    }

    /// Offset of `θ_1` in the coordinate vector.
    pub(crate) fn theta_offset(self) -> usize {
        match self {
            Mode::Qn => 0,
            Mode::Pn => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Qn => "qn",
            Mode::Pn => "pn",
        })
    }
}

fn sum(v: &[Rat]) -> Rat {
    v.iter().fold(Rat::zero(), |acc, x| acc + x)
}

/// A point of `Δ(2,n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawQnWeight")]
pub struct QnWeight {
    #[serde(with = "rat_vec_serde")]
    theta: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawQnWeight {
    #[serde(with = "rat_vec_serde")]
    theta: Vec<Rat>,
}

impl TryFrom<RawQnWeight> for QnWeight {
    type Error = Error;
    fn try_from(r: RawQnWeight) -> Result<Self> {
        QnWeight::new(r.theta)
    }
}

impl QnWeight {
    pub fn new(theta: Vec<Rat>) -> Result<Self> {
        if theta.len() < 2 {
            return Err(Error::Invalid("a Q_n weight needs n ≥ 2 entries".into()));
        }
        if theta.iter().any(|t| t.is_negative() || *t > Rat::one()) {
            return Err(Error::Invalid("Q_n weights satisfy 0 ≤ θ_i ≤ 1".into()));
        }
        if sum(&theta) != int(2) {
            return Err(Error::Invalid("Q_n weights satisfy Σθ_i = 2".into()));
        }
        Ok(QnWeight { theta })
    }

    pub fn theta(&self) -> &[Rat] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `e_i + e_j`.
    pub fn vertex(n: usize, i: usize, j: usize) -> Self {
        let mut theta = vec![Rat::zero(); n];
        theta[i] += Rat::one();
        theta[j] += Rat::one();
        QnWeight::new(theta).expect("vertex of the hypersimplex")
    }

    pub fn barycenter(n: usize) -> Self {
        QnWeight::new(vec![rat(2, n as i64); n]).expect("barycenter")
    }
}

/// A point of `Δ¹×Δ^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPnWeight")]
pub struct PnWeight {
    #[serde(with = "rat_serde")]
    eta1: Rat,
    #[serde(with = "rat_serde")]
    eta2: Rat,
    #[serde(with = "rat_vec_serde")]
    theta: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawPnWeight {
    #[serde(with = "rat_serde")]
    eta1: Rat,
    #[serde(with = "rat_serde")]
    eta2: Rat,
    #[serde(with = "rat_vec_serde")]
    theta: Vec<Rat>,
}

impl TryFrom<RawPnWeight> for PnWeight {
    type Error = Error;
    fn try_from(r: RawPnWeight) -> Result<Self> {
        PnWeight::new(r.eta1, r.eta2, r.theta)
    }
}

impl PnWeight {
    pub fn new(eta1: Rat, eta2: Rat, theta: Vec<Rat>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Invalid("a P_n weight needs n ≥ 1 entries".into()));
        }
        if eta1.is_positive() || eta2.is_positive() || &eta1 + &eta2 != int(-1) {
            return Err(Error::Invalid(
                "P_n weights satisfy η1, η2 ≤ 0 and η1 + η2 = -1".into(),
            ));
        }
        if theta.iter().any(|t| t.is_negative()) || sum(&theta) != Rat::one() {
            return Err(Error::Invalid(
                "P_n weights satisfy θ_i ≥ 0 and Σθ_i = 1".into(),
            ));
        }
        Ok(PnWeight { eta1, eta2, theta })
    }

    pub fn eta1(&self) -> &Rat {
        &self.eta1
    }

    pub fn eta2(&self) -> &Rat {
        &self.eta2
    }

    pub fn theta(&self) -> &[Rat] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `e_i - f_k` for `k ∈ {1, 2}`.
    pub fn vertex(n: usize, i: usize, k: u8) -> Self {
        let mut theta = vec![Rat::zero(); n];
        theta[i] = Rat::one();
        let (e1, e2) = if k == 1 {
            (int(-1), int(0))
        } else {
            (int(0), int(-1))
        };
        PnWeight::new(e1, e2, theta).expect("vertex of the product of simplices")
    }
}

/// A normalized weight of either quiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Pn(PnWeight),
    Qn(QnWeight),
}

impl Weight {
    pub fn mode(&self) -> Mode {
        match self {
            Weight::Qn(_) => Mode::Qn,
            Weight::Pn(_) => Mode::Pn,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Weight::Qn(w) => w.n(),
            Weight::Pn(w) => w.n(),
        }
    }

    pub fn coords(&self) -> Vec<Rat> {
        match self {
            Weight::Qn(w) => w.theta.clone(),
            Weight::Pn(w) => {
                let mut v = vec![w.eta1.clone(), w.eta2.clone()];
                v.extend(w.theta.iter().cloned());
                v
            }
        }
    }

    pub fn from_coords(mode: Mode, mut x: Vec<Rat>) -> Result<Self> {
        match mode {
            Mode::Qn => Ok(Weight::Qn(QnWeight::new(x)?)),
            Mode::Pn => {
                if x.len() < 3 {
                    return Err(Error::Invalid("too few coordinates".into()));
                }
                let theta = x.split_off(2);
                let eta2 = x.pop().expect("two entries");
                let eta1 = x.pop().expect("one entry");
                Ok(Weight::Pn(PnWeight::new(eta1, eta2, theta)?))
            }
        }
    }
}

/// An affine function `coeffs·x + constant` on weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl Affine {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(c, _)| !c.is_zero())
            .fold(self.constant.clone(), |acc, (c, v)| acc + c * v)
    }

    /// `Σ_{i∈J} θ_i + constant` in the coordinates of `mode`.
    fn theta_sum(mode: Mode, n: usize, j: IdxSet, constant: Rat) -> Affine {
        let mut coeffs = vec![Rat::zero(); mode.dim(n)];
        for i in j.iter() {
            coeffs[mode.theta_offset() + i] = Rat::one();
        }
        Affine { coeffs, constant }
    }

    fn coordinate(dim: usize, i: usize, scale: Rat, constant: Rat) -> Affine {
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = scale;
        Affine { coeffs, constant }
    }

    /// Canonical equation of the hyperplane `{f = 0}` within the ambient
    /// affine span: reduced modulo the ambient equalities, scaled to coprime
    /// integers with first nonzero coefficient positive.
    fn hyperplane_key(&self, mode: Mode, n: usize) -> Affine {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let mut f = self.clone();
        // eliminate θ_1 (and η2 for P_n) using the equalities
        for (g, pivot) in ambient_equalities(mode, n).iter().zip(match mode {
            Mode::Qn => vec![0],
            Mode::Pn => vec![1, 2],
        }) {
            let c = f.coeffs[pivot].clone() / &g.coeffs[pivot];
            if !c.is_zero() {
                for (x, y) in f.coeffs.iter_mut().zip(&g.coeffs) {
                    *x -= &c * y;
                }
                f.constant -= &c * &g.constant;
            }
        }
        let all = || f.coeffs.iter().chain(std::iter::once(&f.constant));
        let l = all().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = all()
            .map(|c| (c * Rat::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return f;
        }
        if ints
            .iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_negative())
        {
            g = -g;
        }
        let mut v: Vec<Rat> = ints
            .into_iter()
            .map(|x| Rat::from_integer(x / &g))
            .collect();
        let constant = v.pop().expect("constant");
        Affine {
            coeffs: v,
            constant,
        }
    }
}

/// An inner wall. For `Q_n`, `j` is the side of `{J, Jᶜ}` containing the
/// smallest index; for `P_n`, `j` is the ∞-side (`Σ_J θ = -η1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wall {
    #[serde(rename = "J")]
    pub j: IdxSet,
}

impl Wall {
    /// Canonical `Q_n` wall for the unordered partition `{J, Jᶜ}`.
    pub fn qn(n: usize, j: IdxSet) -> Wall {
        if j.contains(0) {
            Wall { j }
        } else {
            Wall { j: j.complement(n) }
        }
    }

    /// Affine form whose sign is the side of the wall (`+` means `J` heavy).
    pub fn form(self, mode: Mode, n: usize) -> Affine {
        match mode {
            Mode::Qn => Affine::theta_sum(mode, n, self.j, int(-1)),
            Mode::Pn => {
                let mut a = Affine::theta_sum(mode, n, self.j, Rat::zero());
                a.coeffs[0] = Rat::one();
                a
            }
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", self.j)
    }
}

/// All inner walls, each once.
pub fn enumerate_walls(mode: Mode, n: usize) -> Result<Vec<Wall>> {
    if n > 12 {
        return Err(Error::TooLarge {
            what: format!("wall enumeration for n = {n}"),
            bound: 12,
        });
    }
    let mut out = Vec::new();
    match mode {
        Mode::Qn => {
            for j in IdxSet::all_subsets(n) {
                let k = j.len();
                if j.contains(0) && k >= 2 && k + 2 <= n {
                    out.push(Wall { j });
                }
            }
        }
        Mode::Pn => {
            let full = IdxSet::full(n);
            for j in IdxSet::all_subsets(n) {
                if !j.is_empty() && j != full {
                    out.push(Wall { j });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Facets of the ambient polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterWall {
    /// `θ_i = 0`.
    ThetaZero(#[serde(with = "crate::index::one_based")] usize),
    /// `θ_i = 1` (`Q_n` only).
    ThetaOne(#[serde(with = "crate::index::one_based")] usize),
    /// `η_k = 0` for `k ∈ {1, 2}` (`P_n` only).
    EtaZero(u8),
}

/// Strict bound constraints `f < 0` describing the interior of the ambient polytope.
fn ambient_bounds(mode: Mode, n: usize) -> Vec<(OuterWall, Affine)> {
    let d = mode.dim(n);
    let off = mode.theta_offset();
    let mut out = Vec::new();
    if mode == Mode::Pn {
        for k in 0..2 {
            out.push((
                OuterWall::EtaZero(k as u8 + 1),
                Affine::coordinate(d, k, int(1), int(0)),
            ));
        }
    }
    for i in 0..n {
        out.push((
            OuterWall::ThetaZero(i),
            Affine::coordinate(d, off + i, int(-1), int(0)),
        ));
        if mode == Mode::Qn {
            out.push((
                OuterWall::ThetaOne(i),
                Affine::coordinate(d, off + i, int(1), int(-1)),
            ));
        }
    }
    out
}

/// Equalities `f = 0` cutting out the affine span of the ambient polytope.
fn ambient_equalities(mode: Mode, n: usize) -> Vec<Affine> {
    let all = IdxSet::full(n);
    match mode {
        Mode::Qn => vec![Affine::theta_sum(mode, n, all, int(-2))],
        Mode::Pn => {
            let mut eta = Affine {
                coeffs: vec![Rat::zero(); n + 2],
                constant: int(1),
            };
            eta.coeffs[0] = Rat::one();
            eta.coeffs[1] = Rat::one();
            vec![eta, Affine::theta_sum(mode, n, all, int(-1))]
        }
    }
}

/// Sign pattern of a chamber: `true` for `+` (the wall's `J` side is heavy).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<bool>);

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                _ => Err(D::Error::custom("sign vectors use '+' and '-'")),
            })
            .collect::<std::result::Result<Vec<bool>, _>>()
            .map(SignVector)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Generic {
        signs: SignVector,
    },
    OnWalls {
        inner: Vec<Wall>,
        outer: Vec<OuterWall>,
    },
}

impl Classification {
    pub fn is_generic(&self) -> bool {
        matches!(self, Classification::Generic { .. })
    }
}

/// Exact wall membership of a weight.
pub fn classify_weight(w: &Weight) -> Classification {
    let (mode, n) = (w.mode(), w.n());
    let x = w.coords();
    let walls = enumerate_walls(mode, n).unwrap_or_else(|_| Vec::new());
    let outer: Vec<OuterWall> = ambient_bounds(mode, n)
        .into_iter()
        .filter(|(_, f)| f.eval(&x).is_zero())
        .map(|(o, _)| o)
        .collect();
    let mut inner = Vec::new();
    let mut signs = Vec::with_capacity(walls.len());
    for wall in &walls {
        let v = wall.form(mode, n).eval(&x);
        if v.is_zero() {
            inner.push(*wall);
        }
        signs.push(v.is_positive());
    }
    if inner.is_empty() && outer.is_empty() {
        Classification::Generic {
            signs: SignVector(signs),
        }
    } else {
        Classification::OnWalls { inner, outer }
    }
}

/// Result of a slack-maximizing feasibility program.
#[derive(Clone, Debug)]
pub(crate) struct SlackPoint {
    pub x: Vec<Rat>,
}

/// Maximizes `t ≤ 1` subject to `f(x) + t ≤ 0` for every strict constraint,
/// `g(x) = 0` for every equality, and the ambient interior bounds.
/// Returns the optimizer when `t* > 0`, i.e. when the open system is feasible.
pub(crate) fn max_slack(
    mode: Mode,
    n: usize,
    equalities: &[Affine],
    strict: &[Affine],
) -> Option<SlackPoint> {
    let d = mode.dim(n);
    // P_n coordinates η ≤ 0 are substituted by u = -η ≥ 0
    let flip = |j: usize| mode == Mode::Pn && j < 2;
    let var_coeffs = |f: &Affine| -> Vec<Rat> {
        let mut row: Vec<Rat> = f
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if flip(j) { -c } else { c.clone() })
            .collect();
        row.push(Rat::zero());
        row
    };
    let mut objective = vec![Rat::zero(); d + 1];
    objective[d] = Rat::one();
    let mut lp = LinearProgram::new(d + 1, objective);
    for g in ambient_equalities(mode, n).iter().chain(equalities) {
        lp.push(var_coeffs(g), Cmp::Eq, -&g.constant);
    }
    let bounds = ambient_bounds(mode, n);
    for f in bounds.iter().map(|(_, f)| f).chain(strict) {
        let mut row = var_coeffs(f);
        row[d] = Rat::one();
        lp.push(row, Cmp::Le, -&f.constant);
    }
    let mut t_row = vec![Rat::zero(); d + 1];
    t_row[d] = Rat::one();
    lp.push(t_row, Cmp::Le, Rat::one());
    match lp.solve() {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            let x = x[..d]
                .iter()
                .enumerate()
                .map(|(j, v)| if flip(j) { -v } else { v.clone() })
                .collect();
            Some(SlackPoint { x })
        }
        _ => None,
    }
}

/// A chamber: a realizable sign vector with an interior witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chamber {
    pub signs: SignVector,
    pub witness: Weight,
}

/// Two chambers sharing a facet on `wall`, with a point in the facet's relative interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberEdge {
    pub a: usize,
    pub b: usize,
    pub wall: Wall,
    pub facet_point: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberComplex {
    pub mode: Mode,
    pub n: usize,
    pub walls: Vec<Wall>,
    pub chambers: Vec<Chamber>,
    pub edges: Vec<ChamberEdge>,
}

/// Cells of a hyperplane arrangement inside an open convex domain.
pub(crate) struct Arrangement {
    pub mode: Mode,
    pub n: usize,
    pub hyperplanes: Vec<Affine>,
    /// Strict constraints `f < 0` cutting the domain out of the ambient interior.
    pub domain: Vec<Affine>,
}

pub(crate) struct Cell {
    pub signs: Vec<bool>,
    pub witness: Vec<Rat>,
}

pub(crate) struct CellEdge {
    pub a: usize,
    pub b: usize,
    pub hyperplane: usize,
    pub point: Vec<Rat>,
}

impl Arrangement {
    fn signed(&self, h: usize, positive: bool) -> Affine {
        // `+` side means f > 0, i.e. -f < 0
        let f = &self.hyperplanes[h];
        if positive {
            Affine {
                coeffs: f.coeffs.iter().map(|c| -c).collect(),
                constant: -&f.constant,
            }
        } else {
            f.clone()
        }
    }

    fn strict_system(&self, signs: &[bool], skip: Option<usize>) -> Vec<Affine> {
        let mut out = self.domain.clone();
        for (h, &s) in signs.iter().enumerate() {
            if Some(h) != skip {
                out.push(self.signed(h, s));
            }
        }
        out
    }

    fn cell_witness(&self, signs: &[bool]) -> Option<Vec<Rat>> {
        max_slack(self.mode, self.n, &[], &self.strict_system(signs, None)).map(|p| p.x)
    }

    fn facet_point(&self, signs: &[bool], h: usize) -> Option<Vec<Rat>> {
        let eq = [self.hyperplanes[h].clone()];
        max_slack(self.mode, self.n, &eq, &self.strict_system(signs, Some(h))).map(|p| p.x)
    }

    /// Finds one cell greedily, fixing signs hyperplane by hyperplane.
    fn start_cell(&self, lps: &mut u64) -> Option<Cell> {
        let mut x = max_slack(self.mode, self.n, &[], &self.domain)?.x;
        *lps += 1;
        let mut signs: Vec<bool> = Vec::with_capacity(self.hyperplanes.len());
        for (h, f) in self.hyperplanes.iter().enumerate() {
            let v = f.eval(&x);
            if !v.is_zero() {
                signs.push(v.is_positive());
                continue;
            }
            let partial = Arrangement {
                mode: self.mode,
                n: self.n,
                hyperplanes: self.hyperplanes[..=h].to_vec(),
                domain: self.domain.clone(),
            };
            signs.push(true);
            *lps += 1;
            match partial.cell_witness(&signs) {
                Some(y) => x = y,
                None => {
                    signs[h] = false;
                    *lps += 1;
                    x = partial.cell_witness(&signs)?;
                }
            }
        }
        Some(Cell { signs, witness: x })
    }

    /// Breadth-first walk over cells through their facets.
    pub fn cells(&self, exec: Exec, limits: Limits) -> Result<(Vec<Cell>, Vec<CellEdge>)> {
        let mut lps = 0u64;
        let Some(start) = self.start_cell(&mut lps) else {
            return Ok((Vec::new(), Vec::new()));
        };
        let m = self.hyperplanes.len();
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        index.insert(start.signs.clone(), 0);
        let mut cells = vec![start];
        let mut edges = Vec::new();
        // facet results keyed by the shared sign vector with the crossed wall marked
        let mut facets: HashMap<(Vec<bool>, usize), Option<Vec<Rat>>> = HashMap::new();
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut jobs: Vec<(usize, usize)> = Vec::new();
            for &c in &frontier {
                for h in 0..m {
                    let mut key = cells[c].signs.clone();
                    key[h] = false;
                    if !facets.contains_key(&(key, h)) {
                        jobs.push((c, h));
                    }
                }
            }
            lps += jobs.len() as u64;
            if lps > limits.max_lps {
                return Err(Error::TooLarge {
                    what: "linear programs in chamber enumeration".into(),
                    bound: limits.max_lps,
                });
            }
            let results = exec.map(&jobs, |&(c, h)| self.facet_point(&cells[c].signs, h));
            for (&(c, h), r) in jobs.iter().zip(results) {
                let mut key = cells[c].signs.clone();
                key[h] = false;
                facets.entry((key, h)).or_insert(r);
            }
            let mut fresh: Vec<Vec<bool>> = Vec::new();
            for &c in &frontier {
                for h in 0..m {
                    let mut key = cells[c].signs.clone();
                    key[h] = false;
                    if facets[&(key, h)].is_some() {
                        let mut nb = cells[c].signs.clone();
                        nb[h] = !nb[h];
                        if !index.contains_key(&nb) && !fresh.contains(&nb) {
                            fresh.push(nb);
                        }
                    }
                }
            }
            lps += fresh.len() as u64;
            let witnesses = exec.map(&fresh, |s| self.cell_witness(s));
            frontier.clear();
            for (s, w) in fresh.into_iter().zip(witnesses) {
                let w = w.expect("a cell across a facet is nonempty");
                index.insert(s.clone(), cells.len());
                frontier.push(cells.len());
                cells.push(Cell {
                    signs: s,
                    witness: w,
                });
            }
        }
        for ((key, h), point) in facets {
            if let Some(point) = point {
                let mut plus = key.clone();
                plus[h] = true;
                let (a, b) = (index[&key], index[&plus]);
                edges.push(CellEdge {
                    a: a.min(b),
                    b: a.max(b),
                    hyperplane: h,
                    point,
                });
            }
        }
        edges.sort_by(|x, y| (x.a, x.b, x.hyperplane).cmp(&(y.a, y.b, y.hyperplane)));
        Ok((cells, edges))
    }
}

/// Chambers of `Δ(2,n)` (`n ≤ 7`) or `Δ¹×Δ^{n-1}` (`n ≤ 6`) with adjacency.
pub fn enumerate_chambers(mode: Mode, n: usize) -> Result<ChamberComplex> {
    enumerate_chambers_with(mode, n, Exec::default(), Limits::from_env())
}

pub fn enumerate_chambers_with(
    mode: Mode,
    n: usize,
    exec: Exec,
    limits: Limits,
) -> Result<ChamberComplex> {
    let (lo, hi) = match mode {
        Mode::Qn => (3, 7),
        Mode::Pn => (1, 6),
    };
    if n > hi {
        return Err(Error::TooLarge {
            what: format!("chamber enumeration for {mode} with n = {n}"),
            bound: hi as u64,
        });
    }
    if n < lo {
        return Err(Error::Invalid(format!("{mode} needs n ≥ {lo}")));
    }
    let walls = enumerate_walls(mode, n)?;
    let arr = Arrangement {
        mode,
        n,
        hyperplanes: walls.iter().map(|w| w.form(mode, n)).collect(),
        domain: Vec::new(),
    };
    let (cells, edges) = arr.cells(exec, limits)?;
    // canonical order: by sign vector
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].signs.cmp(&cells[b].signs));
    let mut rank = vec![0; cells.len()];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let chambers = order
        .iter()
        .map(|&c| Chamber {
            signs: SignVector(cells[c].signs.clone()),
            witness: Weight::from_coords(mode, cells[c].witness.clone())
                .expect("witness in the polytope"),
        })
        .collect();
    let mut edges: Vec<ChamberEdge> = edges
        .into_iter()
        .map(|e| {
            let (a, b) = (rank[e.a], rank[e.b]);
            ChamberEdge {
                a: a.min(b),
                b: a.max(b),
                wall: walls[e.hyperplane],
                facet_point: Weight::from_coords(mode, e.point)
                    .expect("facet point in the polytope"),
            }
        })
        .collect();
    edges.sort_by(|x, y| (x.a, x.b, x.wall).cmp(&(y.a, y.b, y.wall)));
    Ok(ChamberComplex {
        mode,
        n,
        walls,
        chambers,
        edges,
    })
}

/// Adjacency recomputed from scratch: pairs of chambers whose sign vectors
/// differ in one wall and whose common facet is full-dimensional.
pub fn chamber_adjacency(complex: &ChamberComplex) -> Vec<(usize, usize, Wall)> {
    let (mode, n) = (complex.mode, complex.n);
    let arr = Arrangement {
        mode,
        n,
        hyperplanes: complex.walls.iter().map(|w| w.form(mode, n)).collect(),
        domain: Vec::new(),
    };
    let index: HashMap<&SignVector, usize> = complex
        .chambers
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.signs, i))
        .collect();
    let mut out = Vec::new();
    for (a, c) in complex.chambers.iter().enumerate() {
        for h in 0..complex.walls.len() {
            let mut s = c.signs.0.clone();
            s[h] = !s[h];
            if let Some(&b) = index.get(&SignVector(s)) {
                if a < b && arr.facet_point(&c.signs.0, h).is_some() {
                    out.push((a, b, complex.walls[h]));
                }
            }
        }
    }
    out
}

/// `θ^T`: `2/3 (1-ε)` on `T` and `2ε/(n-3)` elsewhere; `(2/3, 2/3, 2/3)` when `n = 3`.
pub fn theta_t(n: usize, t: [usize; 3], eps: &Rat) -> Result<QnWeight> {
    let tset: IdxSet = t.into_iter().collect();
    if tset.len() != 3 || t.iter().any(|&i| i >= n) {
        return Err(Error::Invalid("T must be three distinct indices".into()));
    }
    if !eps.is_positive() {
        return Err(Error::BadEpsilon(crate::projline::rat_to_string(eps)));
    }
    let w = if n == 3 {
        vec![rat(2, 3); 3]
    } else {
        let on = rat(2, 3) * (Rat::one() - eps);
        let off = eps * rat(2, n as i64 - 3);
        (0..n)
            .map(|i| {
                if tset.contains(i) {
                    on.clone()
                } else {
                    off.clone()
                }
            })
            .collect()
    };
    let w = QnWeight::new(w).map_err(|_| Error::BadEpsilon(crate::projline::rat_to_string(eps)))?;
    if !classify_weight(&Weight::Qn(w.clone())).is_generic() {
        return Err(Error::BadEpsilon(crate::projline::rat_to_string(eps)));
    }
    Ok(w)
}

/// `θ^i`: `η = (-1/2, -1/2)`, `θ_i = 1-ε`, `θ_j = ε/(n-1)`; `θ_1 = 1` when `n = 1`.
pub fn theta_i(n: usize, i: usize, eps: &Rat) -> Result<PnWeight> {
    if i >= n {
        return Err(Error::Invalid("index out of range".into()));
    }
    if !eps.is_positive() {
        return Err(Error::BadEpsilon(crate::projline::rat_to_string(eps)));
    }
    let theta = if n == 1 {
        vec![Rat::one()]
    } else {
        let off = eps / int(n as i64 - 1);
        (0..n)
            .map(|j| {
                if j == i {
                    Rat::one() - eps
                } else {
                    off.clone()
                }
            })
            .collect()
    };
    let w = PnWeight::new(rat(-1, 2), rat(-1, 2), theta)
        .map_err(|_| Error::BadEpsilon(crate::projline::rat_to_string(eps)))?;
    if !classify_weight(&Weight::Pn(w.clone())).is_generic() {
        return Err(Error::BadEpsilon(crate::projline::rat_to_string(eps)));
    }
    Ok(w)
}

/// Default chart-weight parameter `1/n²`.
pub fn default_epsilon(n: usize) -> Rat {
    rat(1, (n * n) as i64)
}

/// A convex polytope inside the ambient weight polytope: the ambient
/// constraints plus `f(x) ≤ 0` for every `f` in `ineqs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polytope {
    pub mode: Mode,
    pub n: usize,
    pub ineqs: Vec<Affine>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Interior,
    Boundary,
    Outside,
}

impl Polytope {
    pub fn ambient(mode: Mode, n: usize) -> Polytope {
        Polytope {
            mode,
            n,
            ineqs: Vec::new(),
        }
    }

    /// Exact classification via the defining inequalities.
    pub fn contains(&self, w: &Weight) -> Containment {
        assert_eq!(
            (w.mode(), w.n()),
            (self.mode, self.n),
            "incompatible polytope and weight"
        );
        let x = w.coords();
        let mut boundary = false;
        for f in ambient_bounds(self.mode, self.n)
            .iter()
            .map(|(_, f)| f)
            .chain(&self.ineqs)
        {
            let v = f.eval(&x);
            if v.is_positive() {
                return Containment::Outside;
            }
            if v.is_zero() {
                boundary = true;
            }
        }
        if boundary {
            Containment::Boundary
        } else {
            Containment::Interior
        }
    }

    /// Whether the interior is nonempty.
    pub fn is_full_dimensional(&self) -> bool {
        max_slack(self.mode, self.n, &[], &self.ineqs).is_some()
    }
}

/// Input data of a stability polytope: the coincidence partition (for `P_n`
/// only `j0` and `jinf` matter).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabPolytope {
    pub mode: Mode,
    pub partition: CoincidencePartition,
}

/// A vertex of the ambient polytope: `e_i + e_j` or `e_i - f_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vertex {
    Qn(
        #[serde(with = "crate::index::one_based")] usize,
        #[serde(with = "crate::index::one_based")] usize,
    ),
    Pn(#[serde(with = "crate::index::one_based")] usize, u8),
}

impl Vertex {
    pub fn weight(self, n: usize) -> Weight {
        match self {
            Vertex::Qn(i, j) => Weight::Qn(QnWeight::vertex(n, i, j)),
            Vertex::Pn(i, k) => Weight::Pn(PnWeight::vertex(n, i, k)),
        }
    }
}

/// Vertices, facet walls and the inequality description of `Θ(V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabGeometry {
    pub vertices: Vec<Vertex>,
    pub facets: Vec<Wall>,
    pub polytope: Polytope,
}

pub fn stability_polytope(sp: &StabPolytope) -> StabGeometry {
    let p = &sp.partition;
    let n = p.n;
    let mode = sp.mode;
    let mut vertices = Vec::new();
    let mut facets = Vec::new();
    let mut ineqs = Vec::new();
    match mode {
        Mode::Qn => {
            let block_of = p.block_index();
            for i in 0..n {
                for j in i + 1..n {
                    if block_of[i] != block_of[j] {
                        vertices.push(Vertex::Qn(i, j));
                    }
                }
            }
            for &b in &p.blocks {
                if b.len() >= 2 {
                    ineqs.push(Affine::theta_sum(mode, n, b, int(-1)));
                    if b.len() + 2 <= n {
                        facets.push(Wall::qn(n, b));
                    }
                }
            }
        }
        Mode::Pn => {
            for i in 0..n {
                if !p.j0.contains(i) {
                    vertices.push(Vertex::Pn(i, 1));
                }
            }
            for i in 0..n {
                if !p.jinf.contains(i) {
                    vertices.push(Vertex::Pn(i, 2));
                }
            }
            let full = IdxSet::full(n);
            if !p.j0.is_empty() {
                // η2 + Σ_{J0} θ ≤ 0
                let mut f = Affine::theta_sum(mode, n, p.j0, Rat::zero());
                f.coeffs[1] = Rat::one();
                ineqs.push(f);
                if p.j0 != full {
                    facets.push(Wall {
                        j: p.j0.complement(n),
                    });
                }
            }
            if !p.jinf.is_empty() {
                // η1 + Σ_{J∞} θ ≤ 0
                let mut f = Affine::theta_sum(mode, n, p.jinf, Rat::zero());
                f.coeffs[0] = Rat::one();
                ineqs.push(f);
                if p.jinf != full {
                    facets.push(Wall { j: p.jinf });
                }
            }
        }
    }
    vertices.sort();
    facets.sort();
    facets.dedup();
    StabGeometry {
        vertices,
        facets,
        polytope: Polytope { mode, n, ineqs },
    }
}

/// `P(a) = {θ ∈ Δ(2,n) | θ ≤ a}`.
pub fn hassett_polytope(a: &HassettWeight) -> Polytope {
    let n = a.n();
    let ineqs = (0..n)
        .map(|i| Affine::coordinate(n, i, int(1), -a.a()[i].clone()))
        .collect();
    Polytope {
        mode: Mode::Qn,
        n,
        ineqs,
    }
}

pub fn polytope_contains(p: &Polytope, w: &Weight) -> Containment {
    p.contains(w)
}

/// Whether the interiors of two polytopes meet.
pub fn interiors_intersect(a: &Polytope, b: &Polytope) -> bool {
    assert_eq!((a.mode, a.n), (b.mode, b.n), "incompatible polytopes");
    let strict: Vec<Affine> = a.ineqs.iter().chain(&b.ineqs).cloned().collect();
    max_slack(a.mode, a.n, &[], &strict).is_some()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub covered: bool,
    /// A target point lying in no member polytope.
    pub uncovered: Option<Weight>,
}

static COVER_CACHE: LazyLock<Mutex<HashMap<(Vec<Polytope>, Polytope), CoverResult>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Decides whether the union of `polys` contains `target`.
///
/// Every member and the target are unions of closed cells of the arrangement
/// formed by all their defining hyperplanes, so it suffices to test one
/// interior witness per cell of that arrangement inside the target.
pub fn cover_check(polys: &[Polytope], target: &Polytope) -> Result<CoverResult> {
    let mut key_polys: Vec<Polytope> = polys.to_vec();
    key_polys.sort_by(|a, b| a.ineqs.cmp(&b.ineqs));
    key_polys.dedup();
    let key = (key_polys, target.clone());
    if let Some(r) = COVER_CACHE.lock().expect("cache lock").get(&key) {
        return Ok(r.clone());
    }
    let r = cover_check_uncached(&key.0, target, Exec::default(), Limits::from_env())?;
    COVER_CACHE
        .lock()
        .expect("cache lock")
        .insert(key, r.clone());
    Ok(r)
}

pub fn cover_check_uncached(
    polys: &[Polytope],
    target: &Polytope,
    exec: Exec,
    limits: Limits,
) -> Result<CoverResult> {
    let (mode, n) = (target.mode, target.n);
    if n > 12 {
        return Err(Error::TooLarge {
            what: "cover check".into(),
            bound: 12,
        });
    }
    let mut planes: BTreeMap<Affine, ()> = BTreeMap::new();
    for p in polys {
        assert_eq!((p.mode, p.n), (mode, n), "incompatible polytopes");
        for f in &p.ineqs {
            planes.insert(f.hyperplane_key(mode, n), ());
        }
    }
    let arr = Arrangement {
        mode,
        n,
        hyperplanes: planes.into_keys().collect(),
        domain: target.ineqs.clone(),
    };
    let (cells, _) = arr.cells(exec, limits)?;
    for c in cells {
        let w = Weight::from_coords(mode, c.witness).expect("cell witness in the polytope");
        if !polys.iter().any(|p| p.contains(&w) != Containment::Outside) {
            return Ok(CoverResult {
                covered: false,
                uncovered: Some(w),
            });
        }
    }
    Ok(CoverResult {
        covered: true,
        uncovered: None,
    })
}

/// Hassett weight `a` with `0 < a_i ≤ 1` and `Σa_i > 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHassett")]
pub struct HassettWeight {
    #[serde(with = "rat_vec_serde")]
    a: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawHassett {
    #[serde(with = "rat_vec_serde")]
    a: Vec<Rat>,
}

impl TryFrom<RawHassett> for HassettWeight {
    type Error = Error;
    fn try_from(r: RawHassett) -> Result<Self> {
        HassettWeight::new(r.a)
    }
}

impl HassettWeight {
    pub fn new(a: Vec<Rat>) -> Result<Self> {
        if a.iter().any(|x| !x.is_positive() || *x > Rat::one()) {
            return Err(Error::Invalid("Hassett weights satisfy 0 < a_i ≤ 1".into()));
        }
        if sum(&a) <= int(2) {
            return Err(Error::Invalid("Hassett weights satisfy Σa_i > 2".into()));
        }
        Ok(HassettWeight { a })
    }

    /// `(1, …, 1)`.
    pub fn ones(n: usize) -> Self {
        HassettWeight::new(vec![Rat::one(); n]).expect("n ≥ 3")
    }

    /// `(1, 1, ε, …, ε)` with `ε = 1/(10n)`.
    pub fn losev_manin(n: usize) -> Self {
        let eps = rat(1, 10 * n as i64);
        let a = (0..n)
            .map(|i| if i < 2 { Rat::one() } else { eps.clone() })
            .collect();
        HassettWeight::new(a).expect("two heavy marks and at least one light one")
    }

    pub fn a(&self) -> &[Rat] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Parses `"a1,a2,..."` with entries `num/den` or integers.
    pub fn parse(s: &str) -> Result<Self> {
        let a = s
            .split(',')
            .map(crate::projline::parse_rat)
            .collect::<Result<Vec<Rat>>>()?;
        HassettWeight::new(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::{CoincidencePartition, QnConfig};

    fn qw(v: &[(i64, i64)]) -> Weight {
        Weight::Qn(QnWeight::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap())
    }

    #[test]
    fn wall_counts() {
        let w = enumerate_walls(Mode::Qn, 4).unwrap();
        let sets: Vec<Vec<usize>> = w.iter().map(|w| w.j.to_vec()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        assert_eq!(enumerate_walls(Mode::Qn, 5).unwrap().len(), 10);
        assert_eq!(enumerate_walls(Mode::Qn, 6).unwrap().len(), 25);
        assert_eq!(enumerate_walls(Mode::Pn, 3).unwrap().len(), 6);
        assert!(enumerate_walls(Mode::Qn, 13).is_err());
    }

    #[test]
    fn classify_examples() {
        match classify_weight(&qw(&[(1, 2); 4])) {
            Classification::OnWalls { inner, outer } => {
                assert_eq!(inner.len(), 3);
                assert!(outer.is_empty());
            }
            other => panic!("{other:?}"),
        }
        // 7/8 + 1/8 = 1 puts (7/8, 5/8, 3/8, 1/8) on the wall {1,4}|{2,3}
        match classify_weight(&qw(&[(7, 8), (5, 8), (3, 8), (1, 8)])) {
            Classification::OnWalls { inner, .. } => {
                assert_eq!(
                    inner,
                    vec![Wall {
                        j: [0, 3].into_iter().collect()
                    }]
                )
            }
            other => panic!("{other:?}"),
        }
        assert!(classify_weight(&qw(&[(9, 10), (6, 10), (3, 10), (2, 10)])).is_generic());
        match classify_weight(&qw(&[(1, 1), (1, 3), (1, 3), (1, 3)])) {
            Classification::OnWalls { outer, .. } => {
                assert_eq!(outer, vec![OuterWall::ThetaOne(0)])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chart_weights() {
        let w = theta_t(5, [0, 1, 2], &rat(1, 25)).unwrap();
        let expect: Vec<Rat> = vec![
            rat(16, 25),
            rat(16, 25),
            rat(16, 25),
            rat(1, 25),
            rat(1, 25),
        ];
        assert_eq!(w.theta(), &expect[..]);
        let w = theta_t(4, [0, 1, 3], &rat(1, 16)).unwrap();
        assert_eq!(w.theta()[2], rat(2, 16));
        for n in 3..=8 {
            for t in [[0, 1, 2], [n - 3, n - 2, n - 1]] {
                theta_t(n, t, &default_epsilon(n)).unwrap();
            }
        }
        let w = theta_i(3, 0, &rat(1, 9)).unwrap();
        assert_eq!((w.eta1(), w.eta2()), (&rat(-1, 2), &rat(-1, 2)));
        assert_eq!(w.theta(), &[rat(8, 9), rat(1, 18), rat(1, 18)][..]);
        for n in 1..=6 {
            for i in 0..n {
                theta_i(n, i, &default_epsilon(n)).unwrap();
            }
        }
        // ε = 1/2 makes θ^T land on walls for n = 5
        assert!(matches!(
            theta_t(5, [0, 1, 2], &rat(1, 4)),
            Err(Error::BadEpsilon(_))
        ));
    }

    #[test]
    fn stab_polytope_examples() {
        let cfg = QnConfig::affine(&[0, 0, 1, 2]);
        let part = cfg.coincidence_partition().unwrap();
        let g = stability_polytope(&StabPolytope {
            mode: Mode::Qn,
            partition: part,
        });
        let verts: Vec<(usize, usize)> = g
            .vertices
            .iter()
            .map(|v| match v {
                Vertex::Qn(i, j) => (*i, *j),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(verts, vec![(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(
            g.facets,
            vec![Wall {
                j: [0, 1].into_iter().collect()
            }]
        );
        let bary = Weight::Qn(QnWeight::barycenter(4));
        assert_eq!(g.polytope.contains(&bary), Containment::Boundary);

        let all = CoincidencePartition::singletons(5);
        let g = stability_polytope(&StabPolytope {
            mode: Mode::Qn,
            partition: all,
        });
        assert!(g.facets.is_empty() && g.polytope.ineqs.is_empty());
        assert_eq!(
            g.polytope.contains(&Weight::Qn(QnWeight::barycenter(5))),
            Containment::Interior
        );

        let two = CoincidencePartition::from_blocks(
            4,
            vec![[0, 1].into_iter().collect(), [2, 3].into_iter().collect()],
        );
        let g = stability_polytope(&StabPolytope {
            mode: Mode::Qn,
            partition: two,
        });
        assert!(!g.polytope.is_full_dimensional());
        assert_eq!(
            g.polytope.contains(&qw(&[(3, 4), (1, 4), (1, 2), (1, 2)])),
            Containment::Boundary
        );
    }

    #[test]
    fn hassett_polytope_with_unit_weights() {
        let p = hassett_polytope(&HassettWeight::ones(4));
        assert_eq!(
            p.contains(&qw(&[(1, 1), (1, 3), (1, 3), (1, 3)])),
            Containment::Boundary
        );
        assert_eq!(
            p.contains(&qw(&[(9, 10), (6, 10), (3, 10), (2, 10)])),
            Containment::Interior
        );
        let p = hassett_polytope(
            &HassettWeight::new(vec![rat(3, 4), rat(3, 4), rat(3, 4), rat(3, 4)]).unwrap(),
        );
        assert_eq!(
            p.contains(&qw(&[(9, 10), (6, 10), (3, 10), (2, 10)])),
            Containment::Outside
        );
    }

    fn poly(blocks: &[&[usize]], n: usize) -> Polytope {
        let blocks = blocks.iter().map(|b| b.iter().copied().collect()).collect();
        let part = CoincidencePartition::from_blocks(n, blocks);
        stability_polytope(&StabPolytope {
            mode: Mode::Qn,
            partition: part,
        })
        .polytope
    }

    #[test]
    fn interiors_examples() {
        let a = poly(&[&[0, 1], &[2], &[3]], 4);
        assert!(interiors_intersect(&a, &a));
        // {1,2} light and {3,4} light cannot both hold strictly
        assert!(!interiors_intersect(&a, &poly(&[&[2, 3], &[0], &[1]], 4)));
        assert!(interiors_intersect(&a, &poly(&[&[0, 2], &[1], &[3]], 4)));
        let wall = poly(&[&[0, 1], &[2, 3]], 4);
        assert!(!interiors_intersect(&wall, &Polytope::ambient(Mode::Qn, 4)));
    }

    #[test]
    fn complementary_walls_share_a_key() {
        let a = Affine::theta_sum(Mode::Qn, 4, [0, 1].into_iter().collect(), int(-1));
        let b = Affine::theta_sum(Mode::Qn, 4, [2, 3].into_iter().collect(), int(-1));
        assert_eq!(a.hyperplane_key(Mode::Qn, 4), b.hyperplane_key(Mode::Qn, 4));
        let c = Affine::theta_sum(Mode::Qn, 4, [0, 2].into_iter().collect(), int(-1));
        assert_ne!(a.hyperplane_key(Mode::Qn, 4), c.hyperplane_key(Mode::Qn, 4));
        let w = Wall {
            j: [0].into_iter().collect(),
        }
        .form(Mode::Pn, 3);
        let mut flipped = Affine::theta_sum(Mode::Pn, 3, [1, 2].into_iter().collect(), Rat::zero());
        flipped.coeffs[1] = Rat::one();
        assert_eq!(
            w.hyperplane_key(Mode::Pn, 3),
            flipped.hyperplane_key(Mode::Pn, 3)
        );
    }

    #[test]
    fn cover_examples() {
        let target = Polytope::ambient(Mode::Qn, 4);
        let wall = poly(&[&[0, 1], &[2, 3]], 4);
        let r = cover_check(&[wall], &target).unwrap();
        assert!(!r.covered && r.uncovered.is_some());
        let halves = [
            poly(&[&[0, 1], &[2], &[3]], 4),
            poly(&[&[2, 3], &[0], &[1]], 4),
        ];
        assert!(cover_check(&halves, &target).unwrap().covered);
        assert!(!cover_check(&halves[..1], &target).unwrap().covered);
    }

    #[test]
    fn small_chamber_counts() {
        let c = enumerate_chambers(Mode::Qn, 4).unwrap();
        assert_eq!(c.chambers.len(), 8);
        assert_eq!(c.edges.len(), 12);
        for ch in &c.chambers {
            assert_eq!(
                classify_weight(&ch.witness),
                Classification::Generic {
                    signs: ch.signs.clone()
                }
            );
        }
        let c = enumerate_chambers(Mode::Qn, 5).unwrap();
        assert_eq!((c.chambers.len(), c.edges.len()), (76, 180));
        let p = enumerate_chambers(Mode::Pn, 2).unwrap();
        assert_eq!(p.walls.len(), 2);
        assert!(enumerate_chambers(Mode::Qn, 8).is_err());
    }

    #[test]
    fn adjacency_recomputed_matches_walk() {
        for (mode, n) in [(Mode::Qn, 5), (Mode::Pn, 3)] {
            let c = enumerate_chambers(mode, n).unwrap();
            let adj = chamber_adjacency(&c);
            let walk: Vec<(usize, usize, Wall)> =
                c.edges.iter().map(|e| (e.a, e.b, e.wall)).collect();
            let mut adj_sorted = adj.clone();
            adj_sorted.sort();
            let mut walk_sorted = walk.clone();
            walk_sorted.sort();
            assert_eq!(adj_sorted, walk_sorted);
        }
    }

    #[test]
    fn exhaustive_sign_vectors_match_walk() {
        // every sign vector tested directly by LP
        for (mode, n) in [(Mode::Qn, 4), (Mode::Qn, 5), (Mode::Pn, 2), (Mode::Pn, 3)] {
            let c = enumerate_chambers(mode, n).unwrap();
            let walls = enumerate_walls(mode, n).unwrap();
            let arr = Arrangement {
                mode,
                n,
                hyperplanes: walls.iter().map(|w| w.form(mode, n)).collect(),
                domain: Vec::new(),
            };
            let m = walls.len();
            let mut feasible = Vec::new();
            for bits in 0u32..1 << m {
                let s: Vec<bool> = (0..m).map(|h| bits >> h & 1 == 1).collect();
                if arr.cell_witness(&s).is_some() {
                    feasible.push(SignVector(s));
                }
            }
            feasible.sort();
            let found: Vec<SignVector> = c.chambers.iter().map(|ch| ch.signs.clone()).collect();
            assert_eq!(found, feasible, "{mode} n={n}");
        }
    }

    #[test]
    fn sequential_and_parallel_walks_agree() {
        let a = enumerate_chambers_with(Mode::Pn, 3, Exec::Parallel, Limits::default()).unwrap();
        let b = enumerate_chambers_with(Mode::Pn, 3, Exec::Sequential, Limits::default()).unwrap();
        assert_eq!(a, b);
        let tight = Limits {
            max_candidates: 10,
            max_lps: 10,
        };
        assert!(matches!(
            enumerate_chambers_with(Mode::Qn, 5, Exec::Sequential, tight),
            Err(Error::TooLarge { .. })
        ));
    }
}
