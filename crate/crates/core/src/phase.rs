//! Exact arithmetic in ℚ/ℤ and formal sums of roots of unity.
//!
//! A [`Phase`] `p/q` stands for `exp(2πi·p/q)`; the group law of U(1) becomes
//! addition. A [`PhaseSum`] is a formal ℚ-linear combination of phases, i.e. an
//! element of the group ring ℚ[ℚ/ℤ].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A degree in ℤ₂ = {±1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_odd(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("{v} is not a sign"))),
        }
    }

    pub fn is_odd(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(-1)^k`
    pub fn pow(k: usize) -> Sign {
        Sign::from_odd(k % 2 == 1)
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_odd(self.is_odd() != rhs.is_odd())
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "-" } else { "+" })
    }
}

/// An element of ℚ/ℤ in lowest terms with `0 <= num < den`.
///
/// Denominators are machine words; every operation checks for overflow and
/// panics rather than wrapping.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const HALF: Phase = Phase { num: 1, den: 2 };

    /// Reduces `num/den` modulo 1.
    pub fn new(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase with zero denominator");
        let (num, den) = if den < 0 {
            (-(num as i128), -(den as i128))
        } else {
            (num as i128, den as i128)
        };
        Self::from_i128(num, den)
    }

    fn from_i128(num: i128, den: i128) -> Phase {
        let r = num.rem_euclid(den);
        let g = r.gcd(&den);
        Phase {
            num: (r / g) as u64,
            den: (den / g) as u64,
        }
    }

    /// `r/k` for a residue `r` modulo `k`.
    pub fn from_residue(r: u64, k: u64) -> Phase {
        Self::from_i128(r as i128, k as i128)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn neg(self) -> Phase {
        if self.num == 0 {
            self
        } else {
            Phase {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn scale(self, k: i64) -> Phase {
        Self::from_i128(self.num as i128 * k as i128, self.den as i128)
    }

    /// The inversion action of ℤ₂ on U(1).
    pub fn act(self, s: Sign) -> Phase {
        match s {
            Sign::Plus => self,
            Sign::Minus => self.neg(),
        }
    }

    /// `k·self` for a sign `k`.
    pub fn signed(self, s: Sign) -> Phase {
        self.act(s)
    }

    /// Some `x` with `2x = self`.
    pub fn half(self) -> Phase {
        Self::from_i128(self.num as i128, 2 * self.den as i128)
    }

    /// The order of the phase in ℚ/ℤ.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn as_rational(self) -> Rational {
        Rational::new(self.num as i64, self.den as i64)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        if rhs.num == 0 {
            return self;
        }
        if self.num == 0 {
            return rhs;
        }
        let g = self.den.gcd(&rhs.den);
        let l = (self.den / g) as u128 * rhs.den as u128;
        assert!(l <= u64::MAX as u128, "phase denominator overflow");
        let n = self.num as u128 * (l / self.den as u128) + rhs.num as u128 * (l / rhs.den as u128);
        let n = n % l;
        let h = n.gcd(&l);
        Phase {
            num: (n / h) as u64,
            den: (l / h) as u64,
        }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + rhs.neg()
    }
}

impl SubAssign for Phase {
    fn sub_assign(&mut self, rhs: Phase) {
        *self = *self - rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::neg(self)
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, |a, b| a + b)
    }
}

impl Default for Phase {
    fn default() -> Phase {
        Phase::ZERO
    }
}

impl Ord for Phase {
    fn cmp(&self, other: &Phase) -> Ordering {
        (self.den, self.num).cmp(&(other.den, other.num))
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Phase) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Phase {
    type Err = Error;

    /// Accepts `p/q` or a bare integer; the value is reduced modulo 1.
    fn from_str(s: &str) -> Result<Phase> {
        let bad = || Error::Parse(format!("bad phase '{s}'"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Phase::new(p, q))
            }
            None => {
                let p: i64 = s.parse().map_err(|_| bad())?;
                Ok(Phase::new(p, 1))
            }
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_i64())
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Phase, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A formal ℚ-linear combination of phases in canonical form: phases
/// distinct, coefficients nonzero, sorted by `(den, num)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PhaseSum {
    terms: Vec<(Rational, Phase)>,
}

impl PhaseSum {
    pub fn zero() -> PhaseSum {
        PhaseSum { terms: Vec::new() }
    }

    pub fn one() -> PhaseSum {
        Self::from_phase(Phase::ZERO)
    }

    pub fn from_phase(p: Phase) -> PhaseSum {
        Self::term(Rational::one(), p)
    }

    pub fn term(c: Rational, p: Phase) -> PhaseSum {
        if c.is_zero() {
            Self::zero()
        } else {
            PhaseSum { terms: vec![(c, p)] }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, Phase)>>(iter: I) -> PhaseSum {
        let mut terms: Vec<(Rational, Phase)> = iter.into_iter().collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(Rational, Phase)> = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            match out.last_mut() {
                Some(last) if last.1 == p => last.0 += c,
                _ => out.push((c, p)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        PhaseSum { terms: out }
    }

    pub fn terms(&self) -> &[(Rational, Phase)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single phase of a monomial with coefficient 1.
    pub fn as_phase(&self) -> Option<Phase> {
        match self.terms.as_slice() {
            [(c, p)] if c.is_one() => Some(*p),
            _ => None,
        }
    }

    pub fn scale(&self, c: Rational) -> PhaseSum {
        Self::from_terms(self.terms.iter().map(|(a, p)| (a * c, *p)))
    }

    /// Multiplication by `exp(2πi·p)`.
    pub fn rotate(&self, p: Phase) -> PhaseSum {
        Self::from_terms(self.terms.iter().map(|(a, q)| (*a, *q + p)))
    }

    /// Complex conjugation, which is ℚ-linear here.
    pub fn conj(&self) -> PhaseSum {
        Self::from_terms(self.terms.iter().map(|(a, q)| (*a, q.neg())))
    }

    pub fn act(&self, s: Sign) -> PhaseSum {
        match s {
            Sign::Plus => self.clone(),
            Sign::Minus => self.conj(),
        }
    }

    /// The least common multiple of the denominators.
    pub fn conductor(&self) -> u64 {
        self.terms.iter().fold(1u64, |l, (_, p)| l.lcm(&p.den()))
    }

    /// Evaluates the sum as a complex number and returns it when rational.
    ///
    /// Works in ℚ(ζ_N) for `N` the conductor by reducing modulo the `N`-th
    /// cyclotomic polynomial, so the answer is exact.
    pub fn to_rational(&self) -> Option<Rational> {
        let n = self.conductor() as usize;
        let mut poly = vec![Rational::zero(); n];
        for (c, p) in &self.terms {
            let e = (p.num() as usize) * (n / p.den() as usize);
            poly[e] += c;
        }
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        for i in (deg..n).rev() {
            let c = poly[i];
            if c.is_zero() {
                continue;
            }
            for (j, a) in phi.iter().enumerate() {
                poly[i - deg + j] -= c * Rational::from_integer(*a);
            }
        }
        if poly[1..deg.max(1)].iter().all(|c| c.is_zero()) {
            Some(poly[0])
        } else {
            None
        }
    }
}

impl Add for &PhaseSum {
    type Output = PhaseSum;
    fn add(self, rhs: &PhaseSum) -> PhaseSum {
        PhaseSum::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl Add for PhaseSum {
    type Output = PhaseSum;
    fn add(self, rhs: PhaseSum) -> PhaseSum {
        &self + &rhs
    }
}

impl AddAssign<&PhaseSum> for PhaseSum {
    fn add_assign(&mut self, rhs: &PhaseSum) {
        *self = &*self + rhs;
    }
}

impl Neg for &PhaseSum {
    type Output = PhaseSum;
    fn neg(self) -> PhaseSum {
        self.scale(-Rational::one())
    }
}

impl Sub for &PhaseSum {
    type Output = PhaseSum;
    fn sub(self, rhs: &PhaseSum) -> PhaseSum {
        self + &(-rhs)
    }
}

impl Mul for &PhaseSum {
    type Output = PhaseSum;
    fn mul(self, rhs: &PhaseSum) -> PhaseSum {
        PhaseSum::from_terms(
            self.terms
                .iter()
                .flat_map(|(a, p)| rhs.terms.iter().map(move |(b, q)| (a * b, *p + *q))),
        )
    }
}

impl fmt::Display for PhaseSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*e({})", format_rational(c), p)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PhaseSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1 divided by every Φ_d with d a proper divisor of n
    let mut p = vec![0i64; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            p = divide_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, a) in den.iter().enumerate() {
                rem[i + j] -= c * a;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Evaluates `Σ exp(2πi·p)` over the phases, exactly.
pub fn sum_of_roots<I: IntoIterator<Item = Phase>>(phases: I) -> Option<Rational> {
    PhaseSum::from_terms(phases.into_iter().map(|p| (Rational::one(), p))).to_rational()
}

pub(crate) fn rational_is_nonneg_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ph(s: &str) -> Phase {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(ph("1/3") + ph("1/2"), ph("5/6"));
        assert_eq!(ph("1/4").act(Sign::Minus), ph("3/4"));
        assert_eq!(ph("1/6").scale(6), Phase::ZERO);
        assert_eq!(Phase::ZERO.den(), 1);
        assert_eq!(ph("6/4").to_string(), "1/2");
        assert_eq!(ph("-1/3").to_string(), "2/3");
    }

    #[test]
    fn parse_errors() {
        assert!("1/0".parse::<Phase>().is_err());
        assert!("x".parse::<Phase>().is_err());
    }

    #[test]
    fn half_doubles_back() {
        for s in ["0/1", "1/2", "1/3", "5/8"] {
            let p = ph(s);
            assert_eq!(p.half() + p.half(), p);
        }
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn root_sums() {
        let third = |k| Phase::new(k, 3);
        assert_eq!(sum_of_roots([third(0), third(1), third(2)]), Some(Rational::zero()));
        assert_eq!(sum_of_roots([third(1), third(2)]), Some(Rational::from_integer(-1)));
        assert_eq!(sum_of_roots([Phase::new(1, 4)]), None);
        assert_eq!(
            sum_of_roots([Phase::new(1, 4), Phase::new(3, 4), Phase::HALF]),
            Some(Rational::from_integer(-1))
        );
        assert_eq!(sum_of_roots([Phase::new(1, 8), Phase::new(7, 8)]), None);
        assert_eq!(
            sum_of_roots([Phase::new(1, 6), Phase::new(5, 6)]),
            Some(Rational::from_integer(1))
        );
    }

    #[test]
    fn phase_sum_canonical() {
        let s = PhaseSum::from_terms(vec![
            (Rational::one(), ph("1/2")),
            (Rational::one(), ph("1/3")),
            (-Rational::one(), ph("1/2")),
        ]);
        assert_eq!(s.terms(), &[(Rational::one(), ph("1/3"))]);
        let t = &s * &PhaseSum::from_phase(ph("2/3"));
        assert_eq!(t, PhaseSum::one());
    }
}
