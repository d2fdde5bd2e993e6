//! Rational scalars and their string form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn sign(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// `(-1)^k` as a rational.
pub fn neg_one_pow(k: i64) -> Rat {
    if k.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

pub fn pow(x: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Always `num/den`, including integers (`3/1`).
pub fn to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse(s: &str) -> Result<Rat> {
    let bad = || Error::ParseRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// `n/d` with `n` in `[-bound, bound]` and `d` in `[1, bound]`.
pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rat {
    let b = bound.max(1);
    let n = rng.gen_range(-b..=b);
    let d = rng.gen_range(1..=b);
    rat(n, d)
}

/// Like [`random`] but never zero.
pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rat {
    loop {
        let x = random(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let x = rat(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(to_string(&Rat::zero()), "0/1");
    }

    #[test]
    fn string_round_trip() {
        for s in ["3/1", "-7/12", "0/1"] {
            assert_eq!(to_string(&parse(s).unwrap()), s);
        }
        assert_eq!(parse("5").unwrap(), int(5));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn sampling_respects_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x = random(&mut rng, 10);
            assert!(x.numer().abs() <= BigInt::from(10));
            assert!(x.denom() <= &BigInt::from(10));
        }
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow(&int(2), -3), rat(1, 8));
        assert_eq!(neg_one_pow(-1), int(-1));
    }
}
