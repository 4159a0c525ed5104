//! Orientation-preserving piecewise-linear homeomorphisms of ℝ with exact
//! rational breakpoints and slope 1 outside them.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear between consecutive `(breakpoints[i], values[i])`, translation
/// by the end displacement beyond either end. No breakpoints is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLHomeo {
    breakpoints: Vec<BigRational>,
    values: Vec<BigRational>,
}

/// Serialised form: rationals as `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLTable {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

fn strictly_increasing(v: &[BigRational]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl PLHomeo {
    pub fn identity() -> Self {
        PLHomeo {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn translation(by: BigRational) -> Self {
        if by.is_zero() {
            return PLHomeo::identity();
        }
        PLHomeo {
            breakpoints: vec![BigRational::zero()],
            values: vec![by],
        }
    }

    pub fn new(breakpoints: Vec<BigRational>, values: Vec<BigRational>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::Invalid("breakpoints and values differ in length".to_string()));
        }
        if !strictly_increasing(&breakpoints) || !strictly_increasing(&values) {
            return Err(Error::Invalid("PL map must be strictly increasing".to_string()));
        }
        Ok(PLHomeo { breakpoints, values }.simplified())
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Drops breakpoints where the map is already linear.
    fn simplified(mut self) -> Self {
        let n = self.breakpoints.len();
        if n == 1 {
            let d = &self.values[0] - &self.breakpoints[0];
            return if d.is_zero() {
                PLHomeo::identity()
            } else {
                PLHomeo::translation(d)
            };
        }
        if n == 0 {
            return self;
        }
        let slope =
            |i: usize, j: usize, s: &Self| (&s.values[j] - &s.values[i]) / (&s.breakpoints[j] - &s.breakpoints[i]);
        let one = BigRational::one();
        let keep: Vec<bool> = (0..n)
            .map(|i| {
                let left = if i == 0 { one.clone() } else { slope(i - 1, i, &self) };
                let right = if i == n - 1 {
                    one.clone()
                } else {
                    slope(i, i + 1, &self)
                };
                left != right
            })
            .collect();
        if !keep.iter().any(|&k| k) {
            let d = &self.values[0] - &self.breakpoints[0];
            return if d.is_zero() {
                PLHomeo::identity()
            } else {
                PLHomeo::translation(d)
            };
        }
        let mut i = 0;
        self.breakpoints.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        let mut j = 0;
        self.values.retain(|_| {
            j += 1;
            keep[j - 1]
        });
        self
    }

    fn eval_on(xs: &[BigRational], ys: &[BigRational], x: &BigRational) -> BigRational {
        if xs.is_empty() {
            return x.clone();
        }
        let last = xs.len() - 1;
        if x <= &xs[0] {
            return x - &xs[0] + &ys[0];
        }
        if x >= &xs[last] {
            return x - &xs[last] + &ys[last];
        }
        let i = xs.partition_point(|b| b <= x) - 1;
        if &xs[i] == x {
            return ys[i].clone();
        }
        let t = (x - &xs[i]) / (&xs[i + 1] - &xs[i]);
        &ys[i] + t * (&ys[i + 1] - &ys[i])
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        Self::eval_on(&self.breakpoints, &self.values, x)
    }

    pub fn inverse(&self) -> PLHomeo {
        PLHomeo {
            breakpoints: self.values.clone(),
            values: self.breakpoints.clone(),
        }
    }

    pub fn eval_inverse(&self, y: &BigRational) -> BigRational {
        Self::eval_on(&self.values, &self.breakpoints, y)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PLHomeo) -> PLHomeo {
        let mut xs: Vec<BigRational> = other.breakpoints.clone();
        xs.extend(self.breakpoints.iter().map(|b| other.eval_inverse(b)));
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| self.eval(&other.eval(x))).collect();
        PLHomeo {
            breakpoints: xs,
            values: ys,
        }
        .simplified()
    }

    pub fn to_table(&self) -> PLTable {
        PLTable {
            breakpoints: self.breakpoints.iter().map(|b| b.to_string()).collect(),
            values: self.values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn from_table(t: &PLTable) -> Result<Self> {
        let parse = |s: &String| {
            s.parse::<BigRational>()
                .map_err(|_| Error::Invalid(format!("bad rational `{s}`")))
        };
        PLHomeo::new(
            t.breakpoints.iter().map(parse).collect::<Result<_>>()?,
            t.values.iter().map(parse).collect::<Result<_>>()?,
        )
    }

    /// Maximal closed subsets of `[lo, hi]` where the map is the identity,
    /// as `(start, end)` pairs (`start == end` for isolated points).
    pub fn fixed_set(&self, lo: &BigRational, hi: &BigRational) -> Vec<(BigRational, BigRational)> {
        let mut pts: Vec<BigRational> = vec![lo.clone(), hi.clone()];
        pts.extend(self.breakpoints.iter().filter(|b| *b > lo && *b < hi).cloned());
        pts.sort();
        pts.dedup();
        let disp = |x: &BigRational| self.eval(x) - x;
        let mut out: Vec<(BigRational, BigRational)> = Vec::new();
        let push = |a: BigRational, b: BigRational, out: &mut Vec<(BigRational, BigRational)>| {
            if let Some(last) = out.last_mut() {
                if last.1 >= a {
                    if b > last.1 {
                        last.1 = b;
                    }
                    return;
                }
            }
            out.push((a, b));
        };
        for w in pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).chain(
            // a degenerate window still has one point to test
            (pts.len() == 1).then(|| (pts[0].clone(), pts[0].clone())),
        ) {
            let (a, b) = w;
            let (da, db) = (disp(&a), disp(&b));
            let zero = BigRational::zero();
            if da == zero && db == zero {
                push(a, b, &mut out);
            } else if da == zero {
                push(a.clone(), a, &mut out);
            } else if db == zero {
                push(b.clone(), b, &mut out);
            } else if (da > zero) != (db > zero) {
                let x = &a + &da * (&b - &a) / (&da - &db);
                push(x.clone(), x, &mut out);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn pl(pts: &[(i64, i64)]) -> PLHomeo {
        PLHomeo::new(
            pts.iter().map(|p| q(p.0)).collect(),
            pts.iter().map(|p| q(p.1)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaluation_interpolates_and_extends() {
        let f = pl(&[(0, 0), (2, 1), (4, 5)]);
        assert_eq!(f.eval(&q(1)), BigRational::new(1.into(), 2.into()));
        assert_eq!(f.eval(&q(10)), q(11));
        assert_eq!(f.eval(&q(-3)), q(-3));
        assert_eq!(f.eval_inverse(&f.eval(&q(3))), q(3));
    }

    #[test]
    fn rejects_decreasing_data() {
        assert!(PLHomeo::new(vec![q(0), q(1)], vec![q(1), q(0)]).is_err());
    }

    #[test]
    fn composition_and_inverse() {
        let f = pl(&[(0, 0), (2, 1), (4, 5)]);
        let g = pl(&[(-1, 0), (1, 3)]);
        let fg = f.compose(&g);
        for x in -6..8 {
            let x = BigRational::new(x.into(), 3.into());
            assert_eq!(fg.eval(&x), f.eval(&g.eval(&x)));
        }
        let id = f.compose(&f.inverse());
        assert_eq!(id, PLHomeo::identity());
        assert_eq!(PLHomeo::from_table(&f.to_table()).unwrap(), f);
    }

    #[test]
    fn fixed_sets() {
        let f = pl(&[(0, 0), (2, 1), (4, 5)]);
        // fixed on (-inf, 0], crosses again at x = 3
        let fix = f.fixed_set(&q(-2), &q(6));
        assert_eq!(fix, vec![(q(-2), q(0)), (q(3), q(3))]);
        let t = PLHomeo::translation(q(1));
        assert!(t.fixed_set(&q(-5), &q(5)).is_empty());
    }
}
