//! Exact linear programming: dense two-phase simplex with Bland's rule.
//!
//! The solver first runs over `Ratio<i128>` with checked arithmetic and
//! reruns over arbitrary-precision rationals if any operation overflows.
//! The programs built by this crate have small 0/1 coefficient matrices, so
//! the fast path almost always succeeds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::projline::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, x: Vec<Rat> },
}

impl LinearProgram {
    pub fn new(n_vars: usize, objective: Vec<Rat>) -> Self {
        assert_eq!(objective.len(), n_vars);
        LinearProgram {
            n_vars,
            constraints: Vec::new(),
            objective,
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rat>, cmp: Cmp, rhs: Rat) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        match Tableau::<Ratio<i128>>::build(self).and_then(|t| t.run()) {
            Some(out) => out,
            None => Tableau::<Rat>::build(self)
                .and_then(|t| t.run())
                .expect("arbitrary precision never overflows"),
        }
    }

    /// Solves over arbitrary precision only; used to cross-check the fast path.
    pub fn solve_big(&self) -> LpOutcome {
        Tableau::<Rat>::build(self)
            .and_then(|t| t.run())
            .expect("arbitrary precision never overflows")
    }
}

trait Scalar: Clone + PartialEq + Sized {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn cmp_zero(&self) -> Ordering;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn cmp_val(&self, o: &Self) -> Option<Ordering>;
    fn from_rat(r: &Rat) -> Option<Self>;
    fn to_rat(&self) -> Rat;
}

impl Scalar for Ratio<i128> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cmp_zero(&self) -> Ordering {
        self.numer().cmp(&0)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn cmp_val(&self, o: &Self) -> Option<Ordering> {
        // a/b vs c/d with positive denominators
        let l = self.numer().checked_mul(o.denom())?;
        let r = o.numer().checked_mul(self.denom())?;
        Some(l.cmp(&r))
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        Some(Ratio::new_raw(r.numer().to_i128()?, r.denom().to_i128()?))
    }
    fn to_rat(&self) -> Rat {
        Rat::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cmp_zero(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn cmp_val(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        Some(r.clone())
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
}

struct Tableau<S> {
    /// `rows[i]` has `cols + 1` entries; the last one is the right-hand side.
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
    n_vars: usize,
    /// Artificial columns are `first_art..cols`.
    first_art: usize,
    objective: Vec<S>,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram) -> Option<Self> {
        let m = lp.constraints.len();
        let n_slack = lp.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let first_art = lp.n_vars + n_slack;
        // rows are scaled so that the rhs is nonnegative; a row needs an
        // artificial unless its slack enters with coefficient +1
        let mut plan = Vec::with_capacity(m);
        let mut slack = lp.n_vars;
        let mut n_art = 0;
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let slack_col = match c.cmp {
                Cmp::Eq => None,
                _ => {
                    slack += 1;
                    Some(slack - 1)
                }
            };
            let slack_sign_pos = match c.cmp {
                Cmp::Le => !flip,
                Cmp::Ge => flip,
                Cmp::Eq => false,
            };
            let needs_art = !(slack_col.is_some() && slack_sign_pos);
            if needs_art {
                n_art += 1;
            }
            plan.push((flip, slack_col, needs_art));
        }
        let cols = first_art + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = first_art;
        for (c, &(flip, slack_col, needs_art)) in lp.constraints.iter().zip(&plan) {
            let mut row = vec![S::zero(); cols + 1];
            for (j, a) in c.coeffs.iter().enumerate() {
                let a = if flip { -a } else { a.clone() };
                row[j] = S::from_rat(&a)?;
            }
            if let Some(sc) = slack_col {
                let pos = match c.cmp {
                    Cmp::Le => !flip,
                    _ => flip,
                };
                row[sc] = if pos {
                    S::one()
                } else {
                    S::zero().sub(&S::one())?
                };
                if !needs_art {
                    basis.push(sc);
                }
            }
            if needs_art {
                row[art] = S::one();
                basis.push(art);
                art += 1;
            }
            let rhs = if flip { -&c.rhs } else { c.rhs.clone() };
            row[cols] = S::from_rat(&rhs)?;
            rows.push(row);
        }
        let mut objective = vec![S::zero(); cols];
        for (j, c) in lp.objective.iter().enumerate() {
            objective[j] = S::from_rat(c)?;
        }
        Some(Tableau {
            rows,
            basis,
            cols,
            n_vars: lp.n_vars,
            first_art,
            objective,
        })
    }

    /// Reduced costs `c_j - c_B·column_j` and `-z` in the last entry.
    fn reduced_costs(&self, c: &[S]) -> Option<Vec<S>> {
        let mut d: Vec<S> = c.to_vec();
        d.push(S::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    d[j] = d[j].sub(&cb.mul(v)?)?;
                }
            }
        }
        Some(d)
    }

    fn pivot(&mut self, r: usize, col: usize, d: &mut [S]) -> Option<()> {
        let p = self.rows[r][col].clone();
        let nz: Vec<usize> = (0..=self.cols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[r][j] = self.rows[r][j].div(&p)?;
        }
        let pivot_row: Vec<(usize, S)> = nz.iter().map(|&j| (j, self.rows[r][j].clone())).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            let row = &mut self.rows[i];
            for (j, v) in &pivot_row {
                row[*j] = row[*j].sub(&f.mul(v)?)?;
            }
        }
        if !d[col].is_zero() {
            let f = d[col].clone();
            for (j, v) in &pivot_row {
                d[*j] = d[*j].sub(&f.mul(v)?)?;
            }
        }
        self.basis[r] = col;
        Some(())
    }

    /// Optimizes over columns `< limit`; `Ok(false)` means unbounded.
    fn optimize(&mut self, d: &mut Vec<S>, limit: usize) -> Option<bool> {
        loop {
            let Some(col) = (0..limit).find(|&j| d[j].cmp_zero() == Ordering::Greater) else {
                return Some(true);
            };
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if a.cmp_zero() != Ordering::Greater {
                    continue;
                }
                let ratio = self.rows[i][self.cols].div(a)?;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match ratio.cmp_val(&br)? {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            let Some((r, _)) = best else {
                return Some(false);
            };
            self.pivot(r, col, d)?;
        }
    }

    fn run(mut self) -> Option<LpOutcome> {
        if self.first_art < self.cols {
            let mut c1 = vec![S::zero(); self.cols];
            for c in c1.iter_mut().skip(self.first_art) {
                *c = S::zero().sub(&S::one())?;
            }
            let mut d = self.reduced_costs(&c1)?;
            let bounded = self.optimize(&mut d, self.cols)?;
            debug_assert!(bounded);
            if !d[self.cols].is_zero() {
                return Some(LpOutcome::Infeasible);
            }
            // drive remaining (zero-valued) artificials out of the basis
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_art {
                    match (0..self.first_art).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(j) => {
                            self.pivot(r, j, &mut d)?;
                            r += 1;
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
            for row in &mut self.rows {
                for v in row.iter_mut().take(self.cols).skip(self.first_art) {
                    *v = S::zero();
                }
            }
        }
        let objective = self.objective.clone();
        let mut d = self.reduced_costs(&objective)?;
        if !self.optimize(&mut d, self.first_art)? {
            return Some(LpOutcome::Unbounded);
        }
        let mut x = vec![<Rat as Zero>::zero(); self.n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                x[b] = self.rows[r][self.cols].to_rat();
            }
        }
        let value = -d[self.cols].to_rat();
        Some(LpOutcome::Optimal { value, x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projline::{int, rat};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_example() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2, ints(&[3, 5]));
        lp.push(ints(&[1, 0]), Cmp::Le, int(4));
        lp.push(ints(&[0, 2]), Cmp::Le, int(12));
        lp.push(ints(&[3, 2]), Cmp::Le, int(18));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                value: int(36),
                x: ints(&[2, 6])
            }
        );
    }

    #[test]
    fn equalities_and_ge() {
        // max x, x + y = 1, y ≥ 1/3
        let mut lp = LinearProgram::new(2, ints(&[1, 0]));
        lp.push(ints(&[1, 1]), Cmp::Eq, int(1));
        lp.push(ints(&[0, 1]), Cmp::Ge, rat(1, 3));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                value: rat(2, 3),
                x: vec![rat(2, 3), rat(1, 3)]
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, ints(&[1]));
        lp.push(ints(&[1]), Cmp::Ge, int(2));
        lp.push(ints(&[1]), Cmp::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(2, ints(&[1, 1]));
        lp.push(ints(&[1, -1]), Cmp::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2, ints(&[1, 2]));
        lp.push(ints(&[1, 1]), Cmp::Eq, int(1));
        lp.push(ints(&[2, 2]), Cmp::Eq, int(2));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                value: int(2),
                x: ints(&[0, 1])
            }
        );
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland terminates.
        let mut lp = LinearProgram::new(4, vec![rat(3, 4), int(-150), rat(1, 50), int(-6)]);
        lp.push(
            vec![rat(1, 4), int(-60), rat(-1, 25), int(9)],
            Cmp::Le,
            int(0),
        );
        lp.push(
            vec![rat(1, 2), int(-90), rat(-1, 50), int(3)],
            Cmp::Le,
            int(0),
        );
        lp.push(ints(&[0, 0, 1, 0]), Cmp::Le, int(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 20)),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn fast_path_agrees_with_big(
            coeffs in proptest::collection::vec(-3i64..=3, 12),
            rhs in proptest::collection::vec(-4i64..=6, 4),
            obj in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let mut lp = LinearProgram::new(3, ints(&obj));
            for r in 0..4 {
                let cmp = if r == 3 { Cmp::Eq } else { Cmp::Le };
                lp.push(ints(&coeffs[3 * r..3 * r + 3]), cmp, int(rhs[r]));
            }
            let fast = lp.solve();
            let big = lp.solve_big();
            prop_assert_eq!(&fast, &big);
            if let LpOutcome::Optimal { x, value } = fast {
                // feasibility and objective value of the returned point
                for c in &lp.constraints {
                    let lhs: Rat = c.coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
                    match c.cmp {
                        Cmp::Le => prop_assert!(lhs <= c.rhs),
                        Cmp::Ge => prop_assert!(lhs >= c.rhs),
                        Cmp::Eq => prop_assert!(lhs == c.rhs),
                    }
                }
                prop_assert!(x.iter().all(|v| !v.is_negative()));
                let z: Rat = lp.objective.iter().zip(&x).map(|(a, b)| a * b).sum();
                prop_assert_eq!(z, value);
            }
        }
    }
}
