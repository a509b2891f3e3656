use alloc::format;
use alloc::string::String;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Neg, Sub};
use core::str::FromStr;

use num_integer::Integer;

use super::C64;
use crate::Error;

/// An angle `θ = (numerator / denominator) · π`, kept in lowest terms and normalized
/// into `(−π, π]`.
///
/// Arithmetic is exact, so conditions such as `θ₁ + θ₂ + θ₃ = π (mod 2π)` are
/// decided without rounding. Floating values appear only through [`Angle::radians`],
/// [`Angle::gamma`] and [`Angle::half_phase`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    num: i64,
    den: i64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };
    pub const PI: Angle = Angle { num: 1, den: 1 };

    /// `(num/den)·π` reduced mod 2π. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Angle {
        assert!(den != 0, "angle denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        num /= g;
        den /= g;
        // bring num/den into (-1, 1]
        let period = 2 * den;
        num = num.rem_euclid(period);
        if num > den {
            num -= period;
        }
        let g = num.gcd(&den).max(1);
        Angle { num: num / g, den: den / g }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn radians(self) -> f64 {
        core::f64::consts::PI * self.num as f64 / self.den as f64
    }

    /// `|θ|` in radians, with `θ` taken in `(−π, π]`.
    pub fn abs_radians(self) -> f64 {
        self.radians().abs()
    }

    /// `γ = exp(iθ)`. Multiples of π/2 are exact.
    pub fn gamma(self) -> C64 {
        exp_i_pi_fraction(self.num, self.den)
    }

    /// `μ = exp(iθ/2)`, the principal square root of `γ` for `θ ∈ (−π, π]`.
    pub fn half_phase(self) -> C64 {
        exp_i_pi_fraction(self.num, 2 * self.den)
    }

    /// Best rational approximation of `radians/π` with denominator at most `max_den`.
    pub fn approximate(radians: f64, max_den: i64) -> Angle {
        let x = radians / core::f64::consts::PI;
        // Stern–Brocot style continued-fraction convergents.
        let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
        let mut r = x;
        for _ in 0..64 {
            let a = r.floor();
            let ai = a as i64;
            let p2 = ai * p1 + p0;
            let q2 = ai * q1 + q0;
            if q2 > max_den || q2 <= 0 {
                break;
            }
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = r - a;
            if frac.abs() < 1e-15 {
                break;
            }
            r = 1.0 / frac;
        }
        if q1 == 0 {
            return Angle::new(x.round() as i64, 1);
        }
        Angle::new(p1, q1)
    }
}

/// `exp(iπ·num/den)` with exact values at quarter turns.
fn exp_i_pi_fraction(num: i64, den: i64) -> C64 {
    debug_assert!(den > 0);
    let t = num.rem_euclid(2 * den);
    // quadrant k and remainder such that num/den ≡ (k + rem/den)/2 (mod 2)
    let twice = 2 * t;
    let k = twice / den;
    let rem = twice - k * den;
    let phi = core::f64::consts::FRAC_PI_2 * rem as f64 / den as f64;
    let base = C64::new(phi.cos(), phi.sin());
    match k % 4 {
        0 => base,
        1 => C64::new(-base.im, base.re),
        2 => C64::new(-base.re, -base.im),
        _ => C64::new(base.im, -base.re),
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        let l = self.den.lcm(&rhs.den);
        Angle::new(self.num * (l / self.den) + rhs.num * (l / rhs.den), l)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.num, self.den)
    }
}

impl Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(iter: I) -> Angle {
        iter.fold(Angle::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Angle> for Angle {
    fn sum<I: Iterator<Item = &'a Angle>>(iter: I) -> Angle {
        iter.copied().sum()
    }
}

impl fmt::Display for Angle {
    /// Formats as the fraction of π accepted by [`FromStr`], e.g. `1/3` or `-1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({}·π)", self)
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Parses `p/q` or `p` as a fraction of π.
    fn from_str(s: &str) -> Result<Angle, Error> {
        let bad = || Error::AngleParse(String::from(s));
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: i64 = p.parse().map_err(|_| bad())?;
        let q: i64 = q.parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Angle::new(p, q))
    }
}

impl Angle {
    /// `"p/q"` form used in reports.
    pub fn to_fraction_string(self) -> String {
        format!("{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    #[test]
    fn normalizes_into_half_open_interval() {
        assert_eq!(Angle::new(-1, 1), Angle::PI);
        assert_eq!(Angle::new(3, 2), Angle::new(-1, 2));
        assert_eq!(Angle::new(4, 6), Angle::new(2, 3));
        assert_eq!(Angle::new(2, -4), Angle::new(-1, 2));
        assert_eq!(Angle::new(0, 7), Angle::ZERO);
        assert_eq!(Angle::new(2, 1), Angle::ZERO);
    }

    #[test]
    fn thirds_sum_to_pi() {
        let t = Angle::new(1, 3);
        assert_eq!([t, t, t].iter().sum::<Angle>(), Angle::PI);
        assert_eq!(Angle::new(1, 6) + Angle::new(1, 3) + Angle::new(1, 2), Angle::PI);
        assert_ne!(Angle::new(1, 4) + Angle::new(1, 4) + Angle::new(1, 4), Angle::PI);
    }

    #[test]
    fn gamma_exact_on_quarter_turns() {
        assert_eq!(Angle::PI.gamma(), C64::new(-1.0, 0.0));
        assert_eq!(Angle::new(1, 2).gamma(), C64::new(0.0, 1.0));
        assert_eq!(Angle::new(-1, 2).gamma(), C64::new(0.0, -1.0));
        assert_eq!(Angle::ZERO.gamma(), C64::new(1.0, 0.0));
        assert_eq!(Angle::PI.half_phase(), C64::new(0.0, 1.0));
        let g = Angle::new(1, 3).gamma();
        assert!((g - C64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn parses_fractions() {
        assert_eq!("1/3".parse::<Angle>().unwrap(), Angle::new(1, 3));
        assert_eq!(" -5/6 ".parse::<Angle>().unwrap(), Angle::new(-5, 6));
        assert_eq!("1".parse::<Angle>().unwrap(), Angle::PI);
        assert!("1/0".parse::<Angle>().is_err());
        assert!("x".parse::<Angle>().is_err());
        assert_eq!(Angle::new(-1, 2).to_string(), "-1/2");
    }

    #[test]
    fn approximates_radians() {
        let a = Angle::approximate(0.2, 1000);
        assert!((a.radians() - 0.2).abs() < 1e-5);
        assert_eq!(Angle::approximate(core::f64::consts::PI / 3.0, 100), Angle::new(1, 3));
    }

    proptest! {
        #[test]
        fn canonical_form(num in -1000i64..1000, den in 1i64..200) {
            let a = Angle::new(num, den);
            prop_assert!(a.den > 0);
            prop_assert_eq!(a.num.gcd(&a.den), 1);
            prop_assert!(-a.den < a.num && a.num <= a.den);
            let g = a.gamma();
            let r = core::f64::consts::PI * num as f64 / den as f64;
            prop_assert!((g - C64::new(r.cos(), r.sin())).norm() < 1e-12);
        }

        #[test]
        fn addition_matches_phases(a in -50i64..50, b in 1i64..30, c in -50i64..50, d in 1i64..30) {
            let (x, y) = (Angle::new(a, b), Angle::new(c, d));
            let lhs = (x + y).gamma();
            let rhs = x.gamma() * y.gamma();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert_eq!(x - x, Angle::ZERO);
        }
    }
}
