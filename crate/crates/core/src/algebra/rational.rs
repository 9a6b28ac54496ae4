use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational in canonical form.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub trait RationalExt {
    fn positive_part(&self) -> Rational;
    fn to_f64_lossy(&self) -> f64;
    fn to_i64_exact(&self) -> Option<i64>;
    /// Nearest integer, halves rounded up.
    fn round_half_up(&self) -> BigInt;
    fn decimal(&self, places: usize) -> String;
}

impl RationalExt for Rational {
    fn positive_part(&self) -> Rational {
        if self.is_positive() {
            self.clone()
        } else {
            Rational::zero()
        }
    }

    fn to_f64_lossy(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn to_i64_exact(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn round_half_up(&self) -> BigInt {
        (self + rat(1, 2)).floor().to_integer()
    }

    fn decimal(&self, places: usize) -> String {
        // exact half-up rounding at the requested precision
        let scale = BigInt::from(10u32).pow(places as u32);
        let neg = self.is_negative();
        let scaled = (self.abs() * Rational::from_integer(scale.clone())).round_half_up();
        let (whole, frac) = scaled.div_rem(&scale);
        let sign = if neg && !scaled.is_zero() { "-" } else { "" };
        if places == 0 {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = places)
        }
    }
}

/// Least common multiple of the denominators; 1 for an empty input.
pub fn lcm_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else if let Some((w, f)) = s.split_once('.') {
        let neg = w.starts_with('-');
        let digits = format!("{}{}", w.trim_start_matches('-'), f);
        let n: BigInt = digits.parse().ok()?;
        let d = BigInt::from(10u32).pow(f.len() as u32);
        let v = Rational::new(n, d);
        Some(if neg { -v } else { v })
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Solves a square rational system by Gauss-Jordan elimination; `None` when singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    assert_eq!(b.len(), n, "rhs length");
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}
