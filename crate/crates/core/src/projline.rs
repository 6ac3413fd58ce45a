//! Exact arithmetic on the projective line over the rationals.
//!
//! Points and Möbius classes are stored in canonical form (first nonzero
//! coordinate equal to one), so structural equality coincides with
//! projective equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always reduced with positive denominator.
pub type Rat = BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats a rational as `"num/den"` (the denominator is always written).
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rationals written over one common denominator, kept only while every
/// numerator stays below `2^62` so that sums of up to 64 terms cannot
/// overflow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonDen {
    pub den: i128,
    pub num: Vec<i128>,
}

impl CommonDen {
    const CAP: i128 = 1 << 62;

    pub fn new<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Option<Self> {
        let xs: Vec<&Rat> = xs.into_iter().collect();
        let mut den: i128 = 1;
        for x in &xs {
            let d = x.denom().to_i128()?;
            den = den.checked_mul(d / gcd_i128(den, d))?;
            if den >= Self::CAP {
                return None;
            }
        }
        let num = xs
            .iter()
            .map(|x| {
                let v = x
                    .numer()
                    .to_i128()?
                    .checked_mul(den / x.denom().to_i128()?)?;
                (v.abs() < Self::CAP).then_some(v)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(CommonDen { den, num })
    }

    pub fn rat(&self, v: i128) -> Rat {
        Rat::new(BigInt::from(v), BigInt::from(self.den))
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub(crate) mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

pub(crate) mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(rat_to_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}

/// A point `(c0 : c1)` of the projective line.
///
/// `(0:1)` is zero, `(1:0)` is infinity and `(x:1)` is the affine value `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    c0: Rat,
    c1: Rat,
}

impl ProjPoint {
    /// Canonicalizes `(c0 : c1)`; fails on `(0:0)`.
    pub fn new(c0: Rat, c1: Rat) -> Result<Self> {
        if c0.is_zero() {
            if c1.is_zero() {
                return Err(Error::Invalid("(0:0) is not a projective point".into()));
            }
            return Ok(ProjPoint { c0, c1: Rat::one() });
        }
        let c1 = c1 / &c0;
        Ok(ProjPoint { c0: Rat::one(), c1 })
    }

    pub fn from_ints(c0: i64, c1: i64) -> Self {
        ProjPoint::new(int(c0), int(c1)).expect("nonzero coordinates")
    }

    /// The affine point `x`, i.e. `(x : 1)`.
    pub fn affine(x: Rat) -> Self {
        ProjPoint::new(x, Rat::one()).expect("c1 = 1")
    }

    pub fn zero() -> Self {
        ProjPoint {
            c0: Rat::zero(),
            c1: Rat::one(),
        }
    }

    pub fn infinity() -> Self {
        ProjPoint {
            c0: Rat::one(),
            c1: Rat::zero(),
        }
    }

    pub fn one() -> Self {
        ProjPoint {
            c0: Rat::one(),
            c1: Rat::one(),
        }
    }

    pub fn c0(&self) -> &Rat {
        &self.c0
    }

    pub fn c1(&self) -> &Rat {
        &self.c1
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero()
    }

    pub fn is_infinity(&self) -> bool {
        self.c1.is_zero()
    }

    /// Affine value `c0/c1`, or `None` at infinity.
    pub fn value(&self) -> Option<Rat> {
        if self.c1.is_zero() {
            None
        } else {
            Some(&self.c0 / &self.c1)
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.c0, self.c1)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [rat_to_string(&self.c0), rat_to_string(&self.c1)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let c0 = parse_rat(&a).map_err(D::Error::custom)?;
        let c1 = parse_rat(&b).map_err(D::Error::custom)?;
        ProjPoint::new(c0, c1).map_err(D::Error::custom)
    }
}

/// Projective equality by cross-multiplication.
pub fn pp_eq(p: &ProjPoint, q: &ProjPoint) -> bool {
    &p.c0 * &q.c1 == &p.c1 * &q.c0
}

/// `d(p, q) = p.c0·q.c1 − p.c1·q.c0`; zero iff `p = q`.
///
/// Every chart equation in the crate goes through this helper, so the sign
/// convention lives in one place.
pub fn det(p: &ProjPoint, q: &ProjPoint) -> Rat {
    &p.c0 * &q.c1 - &p.c1 * &q.c0
}

/// A class of invertible 2×2 matrices up to scale.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Moebius {
    m: [Rat; 4],
}

impl Moebius {
    /// Row-major entries `(m00, m01, m10, m11)`; fails on zero determinant.
    pub fn new(m00: Rat, m01: Rat, m10: Rat, m11: Rat) -> Result<Self> {
        if (&m00 * &m11 - &m01 * &m10).is_zero() {
            return Err(Error::Invalid("singular Möbius matrix".into()));
        }
        let mut m = [m00, m01, m10, m11];
        let lead = m
            .iter()
            .find(|x| !x.is_zero())
            .cloned()
            .expect("nonsingular");
        for x in m.iter_mut() {
            *x = &*x / &lead;
        }
        Ok(Moebius { m })
    }

    pub fn identity() -> Self {
        Moebius {
            m: [Rat::one(), Rat::zero(), Rat::zero(), Rat::one()],
        }
    }

    /// Diagonal map `(x0 : x1) ↦ (λ·x0 : x1)`; fixes zero and infinity.
    pub fn diagonal(lambda: Rat) -> Result<Self> {
        Moebius::new(lambda, Rat::zero(), Rat::zero(), Rat::one())
    }

    pub fn entries(&self) -> &[Rat; 4] {
        &self.m
    }

    pub fn det(&self) -> Rat {
        &self.m[0] * &self.m[3] - &self.m[1] * &self.m[2]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Moebius::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
            .expect("product of invertible matrices")
    }

    pub fn inverse(&self) -> Moebius {
        let [a, b, c, d] = &self.m;
        Moebius::new(d.clone(), -b, -c, a.clone()).expect("invertible")
    }
}

impl fmt::Debug for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl Serialize for Moebius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = &self.m;
        [
            [rat_to_string(a), rat_to_string(b)],
            [rat_to_string(c), rat_to_string(d)],
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Moebius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [[a, b], [c, e]] = <[[String; 2]; 2]>::deserialize(d)?;
        let p = |s: &str| parse_rat(s).map_err(D::Error::custom);
        Moebius::new(p(&a)?, p(&b)?, p(&c)?, p(&e)?).map_err(D::Error::custom)
    }
}

pub fn moebius_apply(m: &Moebius, p: &ProjPoint) -> ProjPoint {
    let [a, b, c, d] = &m.m;
    let x0 = a * &p.c0 + b * &p.c1;
    let x1 = c * &p.c0 + d * &p.c1;
    ProjPoint::new(x0, x1).expect("invertible map sends points to points")
}

/// The Möbius class sending `p0 ↦ 0`, `pinf ↦ ∞`, `p1 ↦ 1`.
pub fn moebius_from_triple(p0: &ProjPoint, pinf: &ProjPoint, p1: &ProjPoint) -> Result<Moebius> {
    let alpha = det(p1, pinf);
    let beta = det(p1, p0);
    if alpha.is_zero() || beta.is_zero() || det(p0, pinf).is_zero() {
        return Err(Error::DegenerateTriple);
    }
    // Row 0 vanishes at p0, row 1 at pinf; the scalars balance p1 to (1:1).
    Moebius::new(
        &alpha * &p0.c1,
        -(&alpha * &p0.c0),
        &beta * &pinf.c1,
        -(&beta * &pinf.c0),
    )
}

/// Möbius class with `p0 ↦ 0` and `pinf ↦ ∞`, determined up to a diagonal factor.
pub fn moebius_from_pair(p0: &ProjPoint, pinf: &ProjPoint) -> Result<Moebius> {
    if pp_eq(p0, pinf) {
        return Err(Error::DegenerateTriple);
    }
    Moebius::new(p0.c1.clone(), -&p0.c0, -&pinf.c1, pinf.c0.clone())
}

/// `(d14·d23 : d13·d24)`: sends `p1, p2, p3` to `0, ∞, 1`.
pub fn cross_ratio(
    p1: &ProjPoint,
    p2: &ProjPoint,
    p3: &ProjPoint,
    p4: &ProjPoint,
) -> Result<ProjPoint> {
    if pp_eq(p1, p2) || pp_eq(p1, p3) || pp_eq(p2, p3) {
        return Err(Error::DegenerateTriple);
    }
    let num = det(p1, p4) * det(p2, p3);
    let den = det(p1, p3) * det(p2, p4);
    Ok(ProjPoint::new(num, den).expect("distinct reference points"))
}

/// The invariant `f^{i,j}_{k,l}` of four sections, as a projective value.
pub fn cross_ratio_invariant(
    config: &[ProjPoint],
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<ProjPoint> {
    let s = |x: usize| {
        config
            .get(x)
            .ok_or_else(|| Error::Invalid(format!("index {x} out of range")))
    };
    let (si, sj, sk, sl) = (s(i)?, s(j)?, s(k)?, s(l)?);
    let num = det(sj, sl) * det(sk, si);
    let den = det(sl, si) * det(sj, sk);
    ProjPoint::new(num, den).map_err(|_| Error::Indeterminate)
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn common_den_refuses_huge_values() {
        let big = Rat::new(BigInt::from(1) << 70, BigInt::from(3));
        assert!(CommonDen::new(&[rat(1, 2), big]).is_none());
        assert_eq!(
            CommonDen::new(&[rat(1, 2), rat(-2, 3)]).unwrap(),
            CommonDen {
                den: 6,
                num: vec![3, -4]
            }
        );
    }

    fn pt(a: i64, b: i64) -> ProjPoint {
        ProjPoint::from_ints(a, b)
    }

    #[test]
    fn pp_eq_examples() {
        assert!(pp_eq(&pt(0, 1), &pt(0, 1)));
        assert!(pp_eq(&pt(1, 2), &pt(2, 4)));
        assert!(!pp_eq(&pt(1, 0), &pt(0, 1)));
        assert_eq!(pt(1, 2), pt(2, 4));
        assert_eq!(pt(3, 5).c1(), &rat(5, 3));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(moebius_apply(&Moebius::identity(), &pt(3, 5)), pt(3, 5));
        let swap = Moebius::new(int(0), int(1), int(1), int(0)).unwrap();
        assert_eq!(moebius_apply(&swap, &pt(0, 1)), ProjPoint::infinity());
        let m = Moebius::new(int(1), int(0), int(-1), int(1)).unwrap();
        assert_eq!(moebius_apply(&m, &pt(1, 1)), ProjPoint::infinity());
    }

    #[test]
    fn from_triple_examples() {
        let m = moebius_from_triple(&pt(0, 1), &pt(1, 0), &pt(1, 1)).unwrap();
        assert_eq!(m, Moebius::identity());
        let m = moebius_from_triple(&pt(1, 1), &pt(1, 0), &pt(0, 1)).unwrap();
        let cr = cross_ratio(&pt(1, 1), &pt(1, 0), &pt(0, 1), &pt(2, 1)).unwrap();
        assert_eq!(moebius_apply(&m, &pt(2, 1)), cr);
        let m = moebius_from_triple(&pt(0, 1), &pt(1, 0), &pt(2, 1)).unwrap();
        assert_eq!(moebius_apply(&m, &pt(2, 1)), ProjPoint::one());
        assert_eq!(
            moebius_from_triple(&pt(0, 1), &pt(0, 2), &pt(1, 1)),
            Err(Error::DegenerateTriple)
        );
    }

    #[test]
    fn cross_ratio_examples() {
        let a = |x| pt(x, 1);
        assert_eq!(cross_ratio(&a(0), &a(1), &a(2), &a(3)).unwrap(), pt(3, 4));
        let x = ProjPoint::affine(rat(-7, 3));
        assert_eq!(cross_ratio(&a(0), &pt(1, 0), &a(1), &x).unwrap(), x);
        assert_eq!(
            cross_ratio(&a(0), &pt(1, 0), &a(1), &a(1)).unwrap(),
            pt(1, 1)
        );
        assert_eq!(
            cross_ratio(&a(0), &a(0), &a(1), &a(2)),
            Err(Error::DegenerateTriple)
        );
    }

    #[test]
    fn invariant_examples() {
        // s_i = 0, s_j = ∞ reduces to (s_k0 s_l1 : s_k1 s_l0)
        let cfg = vec![pt(0, 1), pt(1, 0), pt(5, 3), pt(-2, 7)];
        let f = cross_ratio_invariant(&cfg, 0, 1, 2, 3).unwrap();
        assert_eq!(f, ProjPoint::new(int(5 * 7), int(3 * -2)).unwrap());
        assert_eq!(cross_ratio_invariant(&cfg, 0, 1, 2, 2).unwrap(), pt(1, 1));
        let cfg = vec![pt(0, 1), pt(1, 0), pt(1, 1), pt(2, 1)];
        assert_eq!(cross_ratio_invariant(&cfg, 0, 1, 2, 3).unwrap(), pt(1, 2));
        let cfg = vec![pt(0, 1), pt(0, 1), pt(0, 1), pt(0, 1)];
        assert_eq!(
            cross_ratio_invariant(&cfg, 0, 1, 2, 3),
            Err(Error::Indeterminate)
        );
    }

    #[test]
    fn serde_shapes() {
        let p = ProjPoint::affine(rat(-3, 4));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/1","-4/3"]"#);
        let back: ProjPoint = serde_json::from_str(r#"["-6","8"]"#).unwrap();
        assert_eq!(back, p);
        let m = Moebius::new(int(2), int(1), int(0), int(4)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/1","1/2"],["0/1","2/1"]]"#);
        assert!(serde_json::from_str::<ProjPoint>(r#"["0","0"]"#).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-12i64..=12, 1i64..=7).prop_map(|(n, d)| rat(n, d))
    }

    fn point() -> impl Strategy<Value = ProjPoint> {
        prop_oneof![
            9 => small_rat().prop_map(ProjPoint::affine),
            1 => Just(ProjPoint::infinity()),
        ]
    }

    fn moebius() -> impl Strategy<Value = Moebius> {
        (small_rat(), small_rat(), small_rat(), small_rat())
            .prop_filter_map("singular", |(a, b, c, d)| Moebius::new(a, b, c, d).ok())
    }

    proptest! {
        #[test]
        fn common_den_is_exact(xs in prop::collection::vec((-1000i64..1000, 1i64..500), 0..8)) {
            let rs: Vec<Rat> = xs.iter().map(|&(a, b)| rat(a, b)).collect();
            let c = CommonDen::new(&rs).unwrap();
            for (r, &v) in rs.iter().zip(&c.num) {
                prop_assert_eq!(&c.rat(v), r);
            }
        }

        #[test]
        fn cross_ratio_is_pgl2_invariant(m in moebius(), p1 in point(), p2 in point(), p3 in point(), p4 in point()) {
            prop_assume!(!pp_eq(&p1, &p2) && !pp_eq(&p1, &p3) && !pp_eq(&p2, &p3));
            let before = cross_ratio(&p1, &p2, &p3, &p4).unwrap();
            let img = |p: &ProjPoint| moebius_apply(&m, p);
            let after = cross_ratio(&img(&p1), &img(&p2), &img(&p3), &img(&p4)).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn cross_ratio_matches_normalizing_map(p1 in point(), p2 in point(), p3 in point(), p4 in point()) {
            prop_assume!(!pp_eq(&p1, &p2) && !pp_eq(&p1, &p3) && !pp_eq(&p2, &p3));
            let m = moebius_from_triple(&p1, &p2, &p3).unwrap();
            prop_assert_eq!(moebius_apply(&m, &p4), cross_ratio(&p1, &p2, &p3, &p4).unwrap());
        }

        #[test]
        fn invariant_ignores_moebius_and_scaling(
            m in moebius(),
            pts in proptest::collection::vec(point(), 4),
            scale in proptest::collection::vec(small_rat(), 4),
        ) {
            let Ok(before) = cross_ratio_invariant(&pts, 0, 1, 2, 3) else { return Ok(()); };
            // scaling a section by a nonzero factor leaves its canonical point unchanged
            let moved: Vec<ProjPoint> = pts
                .iter()
                .zip(&scale)
                .map(|(p, s)| {
                    let s = if s.is_zero() { int(3) } else { s.clone() };
                    let q = ProjPoint::new(p.c0() * &s, p.c1() * &s).unwrap();
                    moebius_apply(&m, &q)
                })
                .collect();
            prop_assert_eq!(cross_ratio_invariant(&moved, 0, 1, 2, 3).unwrap(), before);
        }

        #[test]
        fn canonical_form_is_idempotent(p in point(), s in small_rat()) {
            prop_assume!(!s.is_zero());
            let q = ProjPoint::new(p.c0() * &s, p.c1() * &s).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(ProjPoint::new(q.c0().clone(), q.c1().clone()).unwrap(), q);
        }

        #[test]
        fn compose_and_inverse(m in moebius(), p in point()) {
            let id = m.compose(&m.inverse());
            prop_assert_eq!(id, Moebius::identity());
            prop_assert_eq!(moebius_apply(&m.inverse(), &moebius_apply(&m, &p)), p);
        }
    }
}
