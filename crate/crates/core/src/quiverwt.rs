//! Finite quivers, dimension vectors, weight spaces and candidate walls,
//! together with `Q_n`, `P_n` and the weight projection `Q_{n+2} → P_n`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chambers::{PnWeight, QnWeight, Wall};
use crate::error::{Error, Result};
use crate::index::IdxSet;
use crate::limits::Limits;
use crate::projline::{int, rat_to_string, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    /// `(source, target)` vertex labels.
    pub arrows: Vec<(String, String)>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String)>) -> Result<Self> {
        for (s, t) in &arrows {
            if !vertices.contains(s) || !vertices.contains(t) {
                return Err(Error::Invalid(format!(
                    "arrow {s} -> {t} uses an undeclared vertex"
                )));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let idx = |v: &String| {
            self.vertices
                .iter()
                .position(|w| w == v)
                .expect("declared vertex")
        };
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for (s, t) in &self.arrows {
                let (a, b) = (idx(s), idx(t));
                if seen[a] != seen[b] {
                    seen[a] = true;
                    seen[b] = true;
                    changed = true;
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

/// Dimensions in the quiver's vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimVector(pub Vec<u64>);

impl DimVector {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.iter().all(|&d| d == 0) {
            return Err(Error::Invalid(
                "dimension vector must have a positive entry".into(),
            ));
        }
        Ok(DimVector(entries))
    }

    pub fn is_indivisible(&self) -> bool {
        use num_integer::Integer;
        self.0.iter().fold(0u64, |g, &d| g.gcd(&d)) == 1
    }
}

/// A weight in `H(Q,d)`, in the quiver's vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralWeight(Vec<Rat>);

impl GeneralWeight {
    pub fn new(entries: Vec<Rat>, d: &DimVector) -> Result<Self> {
        if entries.len() != d.0.len() {
            return Err(Error::Invalid(
                "weight and dimension vector differ in length".into(),
            ));
        }
        let pairing = entries
            .iter()
            .zip(&d.0)
            .fold(Rat::zero(), |acc, (t, &k)| acc + t * int(k as i64));
        if !pairing.is_zero() {
            return Err(Error::Invalid(
                "weight does not pair to zero with the dimension vector".into(),
            ));
        }
        Ok(GeneralWeight(entries))
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    /// Vertex label → `"num/den"`.
    pub fn to_map(&self, q: &Quiver) -> BTreeMap<String, String> {
        q.vertices
            .iter()
            .cloned()
            .zip(self.0.iter().map(rat_to_string))
            .collect()
    }

    /// `Q_n` weight `(η = -1, θ)`.
    pub fn from_qn(w: &QnWeight) -> Self {
        let mut v = vec![int(-1)];
        v.extend(w.theta().iter().cloned());
        GeneralWeight(v)
    }

    /// `P_n` weight `(η1, η2, θ)`.
    pub fn from_pn(w: &PnWeight) -> Self {
        let mut v = vec![w.eta1().clone(), w.eta2().clone()];
        v.extend(w.theta().iter().cloned());
        GeneralWeight(v)
    }
}

/// Vertices `p, q1..qn`, arrows `q_i → p`, `d = (2,1,…,1)`.
pub fn qn_quiver(n: usize) -> Result<(Quiver, DimVector)> {
    if n < 3 {
        return Err(Error::Invalid("Q_n needs n ≥ 3".into()));
    }
    let mut vertices = vec!["p".to_string()];
    vertices.extend((1..=n).map(|i| format!("q{i}")));
    let arrows = (1..=n)
        .map(|i| (format!("q{i}"), "p".to_string()))
        .collect();
    let mut d = vec![2];
    d.extend(std::iter::repeat(1).take(n));
    Ok((Quiver::new(vertices, arrows)?, DimVector::new(d)?))
}

/// Vertices `p1, p2, q1..qn`, arrows `q_i → p1` and `q_i → p2`, `d = (1,…,1)`.
pub fn pn_quiver(n: usize) -> Result<(Quiver, DimVector)> {
    if n < 1 {
        return Err(Error::Invalid("P_n needs n ≥ 1".into()));
    }
    let mut vertices = vec!["p1".to_string(), "p2".to_string()];
    vertices.extend((1..=n).map(|i| format!("q{i}")));
    let mut arrows = Vec::with_capacity(2 * n);
    for i in 1..=n {
        arrows.push((format!("q{i}"), "p1".to_string()));
        arrows.push((format!("q{i}"), "p2".to_string()));
    }
    Ok((
        Quiver::new(vertices, arrows)?,
        DimVector::new(vec![1; n + 2])?,
    ))
}

/// All `0 < d' < d` of which `d` is not an integer multiple.
pub fn wall_hyperplanes(d: &DimVector) -> Result<Vec<DimVector>> {
    wall_hyperplanes_with(d, Limits::from_env())
}

pub fn wall_hyperplanes_with(d: &DimVector, limits: Limits) -> Result<Vec<DimVector>> {
    let mut total: u64 = 1;
    for &k in &d.0 {
        total = total.saturating_mul(k + 1);
        if total > limits.max_candidates {
            return Err(Error::TooLarge {
                what: "candidate subdimension vectors".into(),
                bound: limits.max_candidates,
            });
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; d.0.len()];
    loop {
        let nonzero = cur.iter().any(|&x| x > 0);
        let is_multiple = nonzero && {
            let (i, &c) = cur
                .iter()
                .enumerate()
                .find(|(_, &c)| c > 0)
                .expect("nonzero");
            d.0[i] % c == 0 && {
                let m = d.0[i] / c;
                cur.iter().zip(&d.0).all(|(&c, &k)| c * m == k)
            }
        };
        if nonzero && !is_multiple {
            out.push(DimVector(cur.clone()));
        }
        // mixed-radix increment
        let mut pos = 0;
        loop {
            if pos == cur.len() {
                return Ok(out);
            }
            if cur[pos] < d.0[pos] {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
            pos += 1;
        }
    }
}

/// Whether `θ` avoids every candidate hyperplane `Σ θ_q d'_q = 0`.
pub fn weight_not_on_candidate_wall(theta: &GeneralWeight, d: &DimVector) -> Result<bool> {
    let cands = wall_hyperplanes(d)?;
    Ok(cands.iter().all(|c| {
        let s = theta
            .0
            .iter()
            .zip(&c.0)
            .fold(Rat::zero(), |acc, (t, &k)| acc + t * int(k as i64));
        !s.is_zero()
    }))
}

/// Projection `Δ(2,n+2)_{a,b} → Δ¹×Δ^{n-1}` along segments towards `e_a + e_b`.
pub fn weight_map_qn2_pn(theta: &QnWeight, a: usize, b: usize) -> Result<PnWeight> {
    let n2 = theta.n();
    if a >= n2 || b >= n2 || a == b {
        return Err(Error::Invalid("a and b must be distinct indices".into()));
    }
    let t = theta.theta();
    let rest: Vec<Rat> = (0..n2)
        .filter(|&i| i != a && i != b)
        .map(|i| t[i].clone())
        .collect();
    let others = rest.iter().fold(Rat::zero(), |acc, x| acc + x);
    if &t[a] + &t[b] < others {
        return Err(Error::OutsideCone);
    }
    if others.is_zero() {
        return Err(Error::Apex);
    }
    let lambda = Rat::one() / &others;
    let eta1 = &lambda * (&t[a] - Rat::one());
    let eta2 = &lambda * (&t[b] - Rat::one());
    let theta = rest.into_iter().map(|x| &lambda * x).collect();
    PnWeight::new(eta1, eta2, theta)
}

/// Image of a `Q_{n+2}` inner wall meeting the interior of `Δ(2,n+2)_{a,b}`:
/// the wall separating `a` from `b` maps to a `P_n` wall, reindexed to the
/// remaining indices. `None` for walls not separating `a` and `b`.
pub fn map_wall_qn2_pn(n2: usize, wall: Wall, a: usize, b: usize) -> Option<Wall> {
    let side = if wall.j.contains(a) {
        wall.j
    } else {
        wall.j.complement(n2)
    };
    if side.contains(b) {
        return None;
    }
    let j: IdxSet = (0..n2)
        .filter(|&i| i != a && i != b)
        .enumerate()
        .filter(|(_, i)| side.contains(*i))
        .map(|(k, _)| k)
        .collect();
    Some(Wall { j })
}

/// Whether `θ` lies in the cone region `θ_a + θ_b ≥ Σ_{i≠a,b} θ_i`, strictly when `strict`.
pub fn in_qn2_pn_region(theta: &QnWeight, a: usize, b: usize, strict: bool) -> bool {
    let t = theta.theta();
    let others = (0..t.len())
        .filter(|&i| i != a && i != b)
        .fold(Rat::zero(), |acc, i| acc + &t[i]);
    let diff = &t[a] + &t[b] - others;
    if strict {
        diff.is_positive()
    } else {
        !diff.is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::{classify_weight, enumerate_walls, Classification, Mode, Weight};
    use crate::projline::rat;
    use proptest::prelude::*;

    #[test]
    fn quiver_shapes() {
        let (q, d) = qn_quiver(4).unwrap();
        assert_eq!((q.vertices.len(), q.arrows.len()), (5, 4));
        assert_eq!(d.0, vec![2, 1, 1, 1, 1]);
        assert!(q.is_connected() && d.is_indivisible());
        let (q, _) = qn_quiver(3).unwrap();
        assert_eq!((q.vertices.len(), q.arrows.len()), (4, 3));
        let (q, d) = pn_quiver(2).unwrap();
        assert_eq!((q.vertices.len(), q.arrows.len()), (4, 4));
        assert!(q.is_connected() && d.is_indivisible());
        let (q, _) = pn_quiver(5).unwrap();
        assert_eq!((q.vertices.len(), q.arrows.len()), (7, 10));
        assert!(Quiver::new(vec!["a".into()], vec![("a".into(), "b".into())]).is_err());
    }

    #[test]
    fn candidate_walls() {
        let two = wall_hyperplanes(&DimVector(vec![1, 1])).unwrap();
        assert_eq!(two, vec![DimVector(vec![1, 0]), DimVector(vec![0, 1])]);
        let mut c = wall_hyperplanes(&DimVector(vec![2, 1])).unwrap();
        c.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(
            c.iter().map(|d| d.0.clone()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        assert!(wall_hyperplanes(&DimVector(vec![2])).unwrap().is_empty());
        let tight = Limits {
            max_candidates: 3,
            max_lps: 3,
        };
        assert!(matches!(
            wall_hyperplanes_with(&DimVector(vec![2, 1]), tight),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn candidate_wall_avoidance() {
        let (_, d) = qn_quiver(4).unwrap();
        let bary = GeneralWeight::from_qn(&QnWeight::barycenter(4));
        assert!(!weight_not_on_candidate_wall(&bary, &d).unwrap());
        let w = |v: [(i64, i64); 4]| {
            GeneralWeight::from_qn(
                &QnWeight::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap(),
            )
        };
        // 7/8 + 1/8 = 1 lies on a candidate wall
        assert!(!weight_not_on_candidate_wall(&w([(7, 8), (5, 8), (3, 8), (1, 8)]), &d).unwrap());
        assert!(
            weight_not_on_candidate_wall(&w([(9, 10), (6, 10), (3, 10), (2, 10)]), &d).unwrap()
        );
        assert!(!weight_not_on_candidate_wall(&w([(1, 1), (1, 2), (1, 2), (0, 1)]), &d).unwrap());
        assert!(GeneralWeight::new(vec![int(1), int(1)], &DimVector(vec![1, 1])).is_err());
    }

    #[test]
    fn projection_examples() {
        let t = QnWeight::new(vec![rat(3, 4), rat(3, 4), rat(1, 4), rat(1, 4)]).unwrap();
        let p = weight_map_qn2_pn(&t, 0, 1).unwrap();
        assert_eq!((p.eta1(), p.eta2()), (&rat(-1, 2), &rat(-1, 2)));
        assert_eq!(p.theta(), &[rat(1, 2), rat(1, 2)][..]);
        assert_eq!(
            weight_map_qn2_pn(&QnWeight::vertex(4, 0, 1), 0, 1),
            Err(Error::Apex)
        );
        assert_eq!(
            weight_map_qn2_pn(&QnWeight::vertex(4, 2, 3), 0, 1),
            Err(Error::OutsideCone)
        );
        // the boundary θ_a + θ_b = Σ others maps to η1 + η2 = -1 with η' = λθ - λ
        let t = QnWeight::new(vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]).unwrap();
        let p = weight_map_qn2_pn(&t, 0, 1).unwrap();
        assert_eq!((p.eta1(), p.eta2()), (&rat(-1, 2), &rat(-1, 2)));
    }

    #[test]
    fn walls_map_to_walls() {
        for n2 in 4..=7 {
            let (a, b) = (0, n2 - 1);
            let mapped: Vec<Wall> = enumerate_walls(Mode::Qn, n2)
                .unwrap()
                .into_iter()
                .filter_map(|w| map_wall_qn2_pn(n2, w, a, b))
                .filter(|w| !w.j.is_empty() && w.j != IdxSet::full(n2 - 2))
                .collect();
            let mut sorted = mapped.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), mapped.len());
            assert_eq!(sorted, enumerate_walls(Mode::Pn, n2 - 2).unwrap());
        }
    }

    fn weight_in_region(n2: usize, b: usize) -> impl Strategy<Value = QnWeight> {
        proptest::collection::vec(1u32..40, n2).prop_filter_map("region", move |raw| {
            let total: u32 = raw.iter().sum();
            let theta: Vec<Rat> = raw
                .iter()
                .map(|&x| Rat::new((2 * x).into(), total.into()))
                .collect();
            let w = QnWeight::new(theta).ok()?;
            in_qn2_pn_region(&w, 0, b, true).then_some(w)
        })
    }

    proptest! {
        #[test]
        fn fibers_are_segments(w in weight_in_region(5, 1), mu in 1u32..=10) {
            let p = weight_map_qn2_pn(&w, 0, 1).unwrap();
            let apex = QnWeight::vertex(5, 0, 1);
            let mu = Rat::new(mu.into(), 10.into());
            let mixed: Vec<Rat> = apex
                .theta()
                .iter()
                .zip(w.theta())
                .map(|(e, t)| (Rat::one() - &mu) * e + &mu * t)
                .collect();
            let q = weight_map_qn2_pn(&QnWeight::new(mixed).unwrap(), 0, 1).unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn wall_membership_transfers(w in weight_in_region(6, 5)) {
            let p = weight_map_qn2_pn(&w, 0, 5).unwrap();
            let qn = classify_weight(&Weight::Qn(w.clone()));
            let pn = classify_weight(&Weight::Pn(p));
            let mut qn_inner: Vec<Wall> = match qn {
                Classification::OnWalls { inner, .. } => inner
                    .into_iter()
                    .filter_map(|wl| map_wall_qn2_pn(6, wl, 0, 5))
                    .filter(|wl| !wl.j.is_empty() && wl.j != IdxSet::full(4))
                    .collect(),
                Classification::Generic { .. } => Vec::new(),
            };
            qn_inner.sort();
            let pn_inner = match pn {
                Classification::OnWalls { inner, .. } => inner,
                Classification::Generic { .. } => Vec::new(),
            };
            prop_assert_eq!(qn_inner, pn_inner);
        }
    }
}
