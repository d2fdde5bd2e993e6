//! Dual numbers over the rationals and exact Jacobians.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mat::{Mat, Scalar};
use crate::rat::Rat;

/// `value + eps * deriv` with `eps^2 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRat {
    pub value: Rat,
    pub deriv: Rat,
}

impl DualRat {
    pub fn new(value: Rat, deriv: Rat) -> Self {
        DualRat { value, deriv }
    }

    pub fn constant(value: Rat) -> Self {
        DualRat { value, deriv: Rat::zero() }
    }

    pub fn variable(value: Rat) -> Self {
        DualRat { value, deriv: Rat::one() }
    }
}

impl Add for DualRat {
    type Output = DualRat;
    fn add(self, o: DualRat) -> DualRat {
        DualRat { value: self.value + o.value, deriv: self.deriv + o.deriv }
    }
}

impl Sub for DualRat {
    type Output = DualRat;
    fn sub(self, o: DualRat) -> DualRat {
        DualRat { value: self.value - o.value, deriv: self.deriv - o.deriv }
    }
}

impl Mul for DualRat {
    type Output = DualRat;
    fn mul(self, o: DualRat) -> DualRat {
        let deriv = &self.value * &o.deriv + &self.deriv * &o.value;
        DualRat { value: self.value * o.value, deriv }
    }
}

impl Div for DualRat {
    type Output = DualRat;
    /// Panics when the value part of the divisor is zero.
    fn div(self, o: DualRat) -> DualRat {
        let deriv = (&self.deriv * &o.value - &self.value * &o.deriv) / (&o.value * &o.value);
        DualRat { value: self.value / o.value, deriv }
    }
}

impl Neg for DualRat {
    type Output = DualRat;
    fn neg(self) -> DualRat {
        DualRat { value: -self.value, deriv: -self.deriv }
    }
}

impl Zero for DualRat {
    fn zero() -> Self {
        DualRat::constant(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.deriv.is_zero()
    }
}

impl One for DualRat {
    fn one() -> Self {
        DualRat::constant(Rat::one())
    }
}

impl Scalar for DualRat {
    fn is_zero_value(&self) -> bool {
        self.value.is_zero()
    }
}

pub fn lift(m: &Mat) -> Mat<DualRat> {
    m.map(|x| DualRat::constant(x.clone()))
}

pub fn values(m: &Mat<DualRat>) -> Mat {
    m.map(|x| x.value.clone())
}

pub fn derivs(m: &Mat<DualRat>) -> Mat {
    m.map(|x| x.deriv.clone())
}

/// Jacobian of `f` at `point`, one dual evaluation per input coordinate.
/// Rows index outputs, columns index inputs.
pub fn jacobian_exact<F>(f: F, point: &[Rat]) -> Result<Mat>
where
    F: Fn(&[DualRat]) -> Result<Vec<DualRat>>,
{
    let n = point.len();
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut out_len = None;
    for k in 0..n {
        let args: Vec<DualRat> = point
            .iter()
            .enumerate()
            .map(|(i, x)| if i == k { DualRat::variable(x.clone()) } else { DualRat::constant(x.clone()) })
            .collect();
        let out = f(&args)?;
        match out_len {
            None => out_len = Some(out.len()),
            Some(l) if l != out.len() => {
                return Err(Error::DimensionMismatch(format!(
                    "map returned {} outputs, earlier {l}",
                    out.len()
                )))
            }
            _ => {}
        }
        columns.push(out.into_iter().map(|d| d.deriv).collect());
    }
    let rows = match out_len {
        Some(l) => l,
        None => {
            let probe: Vec<DualRat> = Vec::new();
            f(&probe)?.len()
        }
    };
    Ok(Mat::from_fn(rows, n, |i, j| columns[j][i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use proptest::prelude::*;

    fn sq(v: &[DualRat]) -> Result<Vec<DualRat>> {
        if v.len() != 1 {
            return Err(Error::DimensionMismatch("expected one input".into()));
        }
        Ok(vec![v[0].clone() * v[0].clone()])
    }

    #[test]
    fn square_at_three() {
        let j = jacobian_exact(sq, &[int(3)]).unwrap();
        assert_eq!(j, Mat::from_ints(&[&[6]]));
    }

    #[test]
    fn product_and_sum() {
        let f = |v: &[DualRat]| Ok(vec![v[0].clone() * v[1].clone(), v[0].clone() + v[1].clone()]);
        let j = jacobian_exact(f, &[int(2), int(5)]).unwrap();
        assert_eq!(j, Mat::from_ints(&[&[5, 2], &[1, 1]]));
    }

    #[test]
    fn wrong_arity_is_rejected() {
        assert!(jacobian_exact(sq, &[int(1), int(2)]).is_err());
    }

    #[test]
    fn quotient_rule() {
        let f = |v: &[DualRat]| Ok(vec![DualRat::one() / v[0].clone()]);
        let j = jacobian_exact(f, &[int(4)]).unwrap();
        assert_eq!(j[(0, 0)], crate::rat::rat(-1, 16));
    }

    #[test]
    fn determinant_derivative_is_adjugate_trace() {
        // d/dt det(A + tE_ij) = adj(A)_ji
        let a = Mat::from_ints(&[&[2, 1, 0], &[1, 3, 4], &[0, 5, 1]]);
        let adj = a.adjugate().unwrap();
        let flat: Vec<Rat> = a.entries().to_vec();
        let f = |v: &[DualRat]| Ok(vec![Mat::new(3, 3, v.to_vec())?.det()?]);
        let j = jacobian_exact(f, &flat).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(j[(0, i * 3 + k)], adj[(k, i)]);
            }
        }
    }

    fn poly_g(v: &[DualRat]) -> Vec<DualRat> {
        vec![v[0].clone() * v[1].clone() - v[1].clone(), v[0].clone() * v[0].clone() + v[1].clone()]
    }

    fn poly_h(v: &[DualRat]) -> Vec<DualRat> {
        vec![v[0].clone() * v[1].clone() * v[1].clone(), v[0].clone() - v[1].clone() * v[0].clone()]
    }

    proptest! {
        #[test]
        fn chain_rule(a in -20i64..20, b in -20i64..20) {
            let p = [int(a), int(b)];
            let gp: Vec<Rat> = poly_g(&[DualRat::constant(p[0].clone()), DualRat::constant(p[1].clone())])
                .into_iter().map(|d| d.value).collect();
            let jg = jacobian_exact(|v| Ok(poly_g(v)), &p).unwrap();
            let jh = jacobian_exact(|v| Ok(poly_h(v)), &gp).unwrap();
            let jhg = jacobian_exact(|v| Ok(poly_h(&poly_g(v))), &p).unwrap();
            prop_assert_eq!(jhg, &jh * &jg);
        }
    }
}
