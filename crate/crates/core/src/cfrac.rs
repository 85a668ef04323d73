//! Continued-fraction arithmetic: digit streams with periodic tails, exact
//! convergents, Brjuno partial sums, high-type membership, and the digit
//! surgery used to build perturbed rotation numbers.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 512;

/// Partial quotients `[a_0; a_1, a_2, ...]` stored as a finite prefix and an
/// optional repeating block. The tail is never materialized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigitStreamRepr", into = "DigitStreamRepr")]
pub struct DigitStream {
    prefix: Vec<BigUint>,
    period: Vec<BigUint>,
}

impl DigitStream {
    pub fn new(prefix: Vec<BigUint>, period: Vec<BigUint>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidDigits("missing integer part a_0".into()));
        }
        if let Some(j) = prefix.iter().skip(1).position(Zero::is_zero) {
            return Err(Error::InvalidDigits(format!("a_{} = 0", j + 1)));
        }
        if period.iter().any(Zero::is_zero) {
            return Err(Error::InvalidDigits("zero in repeating block".into()));
        }
        Ok(DigitStream { prefix, period })
    }

    pub fn from_u64(prefix: &[u64], period: &[u64]) -> Result<Self> {
        Self::new(
            prefix.iter().map(|&d| BigUint::from(d)).collect(),
            period.iter().map(|&d| BigUint::from(d)).collect(),
        )
    }

    pub fn finite(digits: Vec<BigUint>) -> Result<Self> {
        Self::new(digits, Vec::new())
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn period(&self) -> &[BigUint] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Number of digits (including `a_0`) for finite streams.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    pub fn digit(&self, j: usize) -> Option<&BigUint> {
        if j < self.prefix.len() {
            Some(&self.prefix[j])
        } else if self.period.is_empty() {
            None
        } else {
            Some(&self.period[(j - self.prefix.len()) % self.period.len()])
        }
    }

    /// `a_0, a_1, ...` lazily; infinite for periodic streams.
    pub fn iter(&self) -> impl Iterator<Item = &BigUint> + '_ {
        let periodic = self.period.iter().cycle();
        self.prefix.iter().chain(periodic)
    }

    /// The first `n` digits `a_0..a_{n-1}` (fewer if the stream is finite).
    pub fn take(&self, n: usize) -> Vec<BigUint> {
        self.iter().take(n).cloned().collect()
    }

    pub fn convergents(&self) -> Convergents<'_> {
        Convergents::new(self)
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.prefix[0])?;
        for (i, d) in self.prefix.iter().skip(1).enumerate() {
            write!(f, "{}{}", if i == 0 { ";" } else { "," }, d)?;
        }
        if !self.period.is_empty() {
            let sep = if self.prefix.len() == 1 { ";" } else { "," };
            let block: Vec<String> = self.period.iter().map(ToString::to_string).collect();
            write!(f, "{sep}({})...", block.join(","))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DigitRepr {
    Small(u64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct DigitStreamRepr {
    prefix: Vec<DigitRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    period: Vec<DigitRepr>,
}

fn digit_from_repr(d: DigitRepr) -> Result<BigUint> {
    match d {
        DigitRepr::Small(v) => Ok(BigUint::from(v)),
        DigitRepr::Big(s) => s
            .parse()
            .map_err(|_| Error::InvalidDigits(format!("not an integer: {s:?}"))),
    }
}

fn digit_to_repr(d: BigUint) -> DigitRepr {
    match d.to_u64() {
        Some(v) => DigitRepr::Small(v),
        None => DigitRepr::Big(d.to_string()),
    }
}

impl TryFrom<DigitStreamRepr> for DigitStream {
    type Error = Error;
    fn try_from(r: DigitStreamRepr) -> Result<Self> {
        let prefix = r.prefix.into_iter().map(digit_from_repr).collect::<Result<_>>()?;
        let period = r.period.into_iter().map(digit_from_repr).collect::<Result<_>>()?;
        DigitStream::new(prefix, period)
    }
}

impl From<DigitStream> for DigitStreamRepr {
    fn from(s: DigitStream) -> Self {
        DigitStreamRepr {
            prefix: s.prefix.into_iter().map(digit_to_repr).collect(),
            period: s.period.into_iter().map(digit_to_repr).collect(),
        }
    }
}

/// Convergent `p_n / q_n` of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximant {
    pub p: BigUint,
    pub q: BigUint,
    pub index: usize,
}

impl Approximant {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()))
    }
}

/// Lazy convergent recurrence `p_n = a_n p_{n-1} + p_{n-2}`,
/// `q_n = a_n q_{n-1} + q_{n-2}` seeded with `p_{-1} = 1, q_{-1} = 0`.
pub struct Convergents<'a> {
    digits: Box<dyn Iterator<Item = &'a BigUint> + 'a>,
    prev: (BigUint, BigUint),
    prev2: (BigUint, BigUint),
    index: usize,
}

impl<'a> Convergents<'a> {
    fn new(stream: &'a DigitStream) -> Self {
        Convergents {
            digits: Box::new(stream.iter()),
            prev: (BigUint::one(), BigUint::zero()),
            prev2: (BigUint::zero(), BigUint::one()),
            index: 0,
        }
    }
}

impl Iterator for Convergents<'_> {
    type Item = Approximant;

    fn next(&mut self) -> Option<Approximant> {
        let a = self.digits.next()?;
        let p = a * &self.prev.0 + &self.prev2.0;
        let q = a * &self.prev.1 + &self.prev2.1;
        self.prev2 = std::mem::replace(&mut self.prev, (p.clone(), q.clone()));
        let out = Approximant { p, q, index: self.index };
        self.index += 1;
        Some(out)
    }
}

/// Convergents `p_k/q_k` for `k = 1..=n` (fewer when the stream terminates).
pub fn approximants(digits: &DigitStream, n: usize) -> Vec<Approximant> {
    digits.convergents().skip(1).take(n).collect()
}

/// Exact value of a finite continued fraction.
pub fn cf_eval(digits: &[BigUint]) -> Result<BigRational> {
    let stream = DigitStream::finite(digits.to_vec())?;
    let last = stream
        .convergents()
        .last()
        .expect("validated stream has a_0");
    Ok(last.to_rational())
}

/// A real number known to lie in `[center - radius, center + radius]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    center: BigRational,
    radius: BigRational,
}

impl Real {
    pub fn exact(value: BigRational) -> Self {
        Real { center: value, radius: BigRational::zero() }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::exact(BigRational::new(p.into(), q.into()))
    }

    pub fn with_radius(center: BigRational, radius: BigRational) -> Self {
        Real { center, radius: radius.abs() }
    }

    /// Parses a plain decimal literal; the radius is half a unit in the last place.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDigits(format!("not a decimal literal: {s:?}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all = format!("{int_part}{frac_part}");
        if !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut num: BigInt = all.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let radius = BigRational::new(BigInt::one(), den.clone() * 2);
        Ok(Real { center: BigRational::new(num, den), radius })
    }

    /// Enclosure of `sqrt(n)` with radius `2^-bits`.
    pub fn sqrt(n: u64, bits: u32) -> Self {
        let scale = BigUint::one() << (2 * bits as usize);
        let s = (BigUint::from(n) * scale).sqrt();
        let den = BigInt::one() << bits as usize;
        let center = BigRational::new(BigInt::from(s) * 2 + 1, den.clone() * 2);
        Real { center, radius: BigRational::new(BigInt::one(), den) }
    }

    /// `(sqrt(5) - 1) / 2`.
    pub fn golden_conjugate(bits: u32) -> Self {
        let r = Self::sqrt(5, bits);
        let two = BigRational::from_integer(2.into());
        Real {
            center: (r.center - BigRational::one()) / &two,
            radius: r.radius / two,
        }
    }

    pub fn center(&self) -> &BigRational {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.center)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Gauss-map expansion of `x` into `n_terms` fractional digits.
///
/// Digits are emitted only while both interval endpoints agree on them. An
/// exact rational input terminates early with its finite expansion.
pub fn cf_expand(x: &Real, n_terms: usize) -> Result<DigitStream> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut lo = &x.center - &x.radius;
    let mut hi = &x.center + &x.radius;
    if lo <= zero || hi >= one {
        return Err(Error::InvalidDigits("cf_expand requires 0 < x < 1".into()));
    }
    let mut digits = vec![BigUint::zero()];
    for obtained in 0..n_terms {
        if hi.is_zero() {
            break;
        }
        if lo <= zero {
            return Err(Error::PrecisionExhausted { obtained, requested: n_terms });
        }
        let inv_lo = lo.recip();
        let inv_hi = hi.recip();
        let a_hi = inv_lo.floor();
        let a_lo = inv_hi.floor();
        if a_lo != a_hi {
            return Err(Error::PrecisionExhausted { obtained, requested: n_terms });
        }
        let a = a_lo.to_integer();
        let a_rat = BigRational::from_integer(a.clone());
        lo = inv_hi - &a_rat;
        hi = inv_lo - a_rat;
        digits.push(a.to_biguint().expect("1/x > 1 on (0,1)"));
    }
    DigitStream::finite(digits)
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ratio_f64(num: f64, den: &BigUint) -> f64 {
    let bits = den.bits();
    if bits <= 1000 {
        num / den.to_f64().unwrap_or(f64::INFINITY)
    } else {
        (num.ln() - ln_big(den)).exp()
    }
}

/// Partial Brjuno sum `sum_{k=0}^{n_terms-1} ln(q_{k+1}) / q_k` with `q_0 = 1`.
pub fn brjuno_sum(digits: &DigitStream, n_terms: usize) -> f64 {
    let qs: Vec<BigUint> = digits.convergents().take(n_terms + 1).map(|c| c.q).collect();
    qs.windows(2)
        .map(|w| ratio_f64(ln_big(&w[1]), &w[0]))
        .sum()
}

/// Membership in `HT_N`: every fractional digit is at least `n`.
pub fn is_high_type(digits: &DigitStream, n: u64) -> bool {
    let n = BigUint::from(n);
    digits.prefix.iter().skip(1).chain(&digits.period).all(|a| *a >= n)
}

/// `(ln A)^(1/q)` and `A^(1/q)`, the two growth quantities constraining the
/// inserted digit `A` relative to the denominator `q`.
pub fn schedule_growth(a: &BigUint, q: &BigUint) -> (f64, f64) {
    let ln_a = ln_big(a);
    let ln_q = ln_big(q);
    let inv_q = (-ln_q).exp();
    let log_root = if ln_a <= 0.0 { 0.0 } else { (ln_a.ln() * inv_q).exp() };
    (log_root, (ln_a * inv_q).exp())
}

/// An irrational rotation number in `(0, 1)` carried as its digit stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigitStream", into = "DigitStream")]
pub struct RotationNumber {
    digits: DigitStream,
    precision_bits: u32,
}

impl TryFrom<DigitStream> for RotationNumber {
    type Error = Error;
    fn try_from(d: DigitStream) -> Result<Self> {
        RotationNumber::new(d)
    }
}

impl From<RotationNumber> for DigitStream {
    fn from(r: RotationNumber) -> Self {
        r.digits
    }
}

impl RotationNumber {
    pub fn new(digits: DigitStream) -> Result<Self> {
        if !digits.prefix[0].is_zero() {
            return Err(Error::InvalidDigits("rotation numbers need a_0 = 0".into()));
        }
        if digits.digit(1).is_none() {
            return Err(Error::InvalidDigits("no fractional digits".into()));
        }
        if digits.len() == Some(2) && digits.prefix[1].is_one() {
            return Err(Error::InvalidDigits("[0;1] equals 1".into()));
        }
        Ok(RotationNumber { digits, precision_bits: DEFAULT_PRECISION_BITS })
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    /// `[0; 1, 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::periodic(1)
    }

    /// `[0; n, n, n, ...]`.
    pub fn periodic(n: u64) -> Self {
        let digits = DigitStream::from_u64(&[0], &[n.max(1)]).expect("valid");
        RotationNumber::new(digits).expect("valid")
    }

    pub fn digits(&self) -> &DigitStream {
        &self.digits
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// A rational within `2^-precision_bits` of the value (exact when finite).
    pub fn value(&self) -> BigRational {
        let target = self.precision_bits as u64;
        let mut last = None;
        for c in self.digits.convergents() {
            let done = 2 * c.q.bits() > target + 1;
            last = Some(c);
            if done {
                break;
            }
        }
        last.expect("nonempty").to_rational()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value())
    }

    pub fn approximants(&self, n: usize) -> Vec<Approximant> {
        approximants(&self.digits, n)
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.digits.fmt(f)
    }
}

/// `alpha_n = [a_0, ..., a_n, A_n, t_1, t_2, ...]`.
pub fn perturbed_rotation(
    alpha: &RotationNumber,
    n: usize,
    a_n: &BigUint,
    theta: &RotationNumber,
) -> Result<RotationNumber> {
    if a_n.is_zero() {
        return Err(Error::InvalidDigits("inserted digit must be >= 1".into()));
    }
    let head = alpha.digits.take(n + 1);
    if head.len() < n + 1 {
        return Err(Error::InvalidDigits(format!("alpha has fewer than {} digits", n + 1)));
    }
    let mut prefix = head;
    prefix.push(a_n.clone());
    prefix.extend(theta.digits.prefix.iter().skip(1).cloned());
    let digits = DigitStream::new(prefix, theta.digits.period.clone())?;
    Ok(RotationNumber::new(digits)?.with_precision(alpha.precision_bits))
}

/// The digit table `b_j` and the truncations `theta_l` built from a base
/// expansion, insertion indices `m_t` and inserted digits `A_t`.
#[derive(Clone, Debug)]
pub struct ThetaSchedule {
    b: Vec<BigUint>,
    members: Vec<RotationNumber>,
    fill: u64,
}

impl ThetaSchedule {
    /// `b_j` for `1 <= j <= m_L + 1`.
    pub fn b(&self, j: usize) -> Option<&BigUint> {
        j.checked_sub(1).and_then(|i| self.b.get(i))
    }

    /// `theta_l` for `l = 1..=L`.
    pub fn members(&self) -> &[RotationNumber] {
        &self.members
    }

    /// The known head `[0; b_1, ..., b_{m_L+1}]` of the limit expansion.
    pub fn limit_head(&self) -> DigitStream {
        let mut prefix = vec![BigUint::zero()];
        prefix.extend(self.b.iter().cloned());
        DigitStream::finite(prefix).expect("b_j >= 1")
    }

    pub fn fill(&self) -> u64 {
        self.fill
    }
}

pub fn theta_schedule(
    theta0: &DigitStream,
    m: &[usize],
    a: &[BigUint],
    n_fill: u64,
) -> Result<ThetaSchedule> {
    if m.is_empty() || m.len() != a.len() {
        return Err(Error::InvalidSchedule("m and A must be nonempty and equally long".into()));
    }
    if m[0] < 1 || m.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("m must be strictly increasing from >= 1".into()));
    }
    if a.iter().any(Zero::is_zero) || n_fill == 0 {
        return Err(Error::InvalidSchedule("digits must be >= 1".into()));
    }
    let head = theta0.take(m[0] + 1);
    if head.len() < m[0] + 1 {
        return Err(Error::InvalidSchedule(format!("theta0 needs {} digits", m[0])));
    }
    let last = *m.last().expect("nonempty") + 1;
    let fill = BigUint::from(n_fill);
    let mut b: Vec<BigUint> = (1..=last)
        .map(|j| if j <= m[0] { head[j].clone() } else { fill.clone() })
        .collect();
    for (mt, at) in m.iter().zip(a) {
        b[*mt] = at.clone();
    }
    let members = m
        .iter()
        .map(|&ml| {
            let mut prefix = vec![BigUint::zero()];
            prefix.extend(b[..=ml].iter().cloned());
            let digits = DigitStream::new(prefix, vec![fill.clone()])?;
            RotationNumber::new(digits)
        })
        .collect::<Result<_>>()?;
    Ok(ThetaSchedule { b, members, fill: n_fill })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&d| BigUint::from(d)).collect()
    }

    #[test]
    fn golden_expansion_is_all_ones() {
        let x = Real::golden_conjugate(256);
        let d = cf_expand(&x, 10).unwrap();
        assert_eq!(d.prefix(), big(&[0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]).as_slice());
    }

    #[test]
    fn rational_terminates() {
        let d = cf_expand(&Real::ratio(1, 3), 2).unwrap();
        assert_eq!(d.prefix(), big(&[0, 3]).as_slice());
    }

    #[test]
    fn pi_fraction_digits() {
        // pi - 3 to 100 decimals
        let x = Real::from_decimal(
            "0.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679",
        )
        .unwrap();
        let d = cf_expand(&x, 4).unwrap();
        assert_eq!(d.prefix(), big(&[0, 7, 15, 1, 292]).as_slice());
    }

    #[test]
    fn low_precision_input_is_reported() {
        let x = Real::from_decimal("0.14159").unwrap();
        assert!(matches!(
            cf_expand(&x, 20),
            Err(Error::PrecisionExhausted { requested: 20, .. })
        ));
    }

    #[test]
    fn out_of_range_input_rejected() {
        assert!(cf_expand(&Real::ratio(3, 2), 3).is_err());
    }

    #[test]
    fn eval_small_cases() {
        assert_eq!(cf_eval(&big(&[0, 2])).unwrap(), BigRational::new(1.into(), 2.into()));
        let pi = cf_eval(&big(&[0, 7, 15, 1, 292])).unwrap();
        assert_eq!(pi, BigRational::new(4687.into(), 33102.into()));
        let mut ones = vec![0u64];
        ones.extend([1; 30]);
        let g = rational_to_f64(&cf_eval(&big(&ones)).unwrap());
        assert!((g - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_zero_digit() {
        assert!(cf_eval(&big(&[0, 2, 0, 3])).is_err());
    }

    #[test]
    fn pell_denominators() {
        let d = DigitStream::from_u64(&[0], &[2]).unwrap();
        let q: Vec<u64> = approximants(&d, 4).iter().map(|a| a.q.to_u64().unwrap()).collect();
        assert_eq!(q, vec![2, 5, 12, 29]);
    }

    #[test]
    fn brjuno_first_terms() {
        let g = RotationNumber::golden();
        // q_0 = q_1 = 1 for a_1 = 1, so the first term vanishes.
        assert_eq!(brjuno_sum(g.digits(), 1), 0.0);
        assert!((brjuno_sum(g.digits(), 2) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn high_type_checks() {
        let three = DigitStream::from_u64(&[0], &[3]).unwrap();
        assert!(is_high_type(&three, 3));
        let broken = DigitStream::from_u64(&[0, 3, 2], &[3]).unwrap();
        assert!(!is_high_type(&broken, 3));
        // beta = [0; N, a_1, a_2, ...] stays in HT_N when alpha does
        let beta = DigitStream::from_u64(&[0, 5], &[5, 7]).unwrap();
        assert!(is_high_type(&beta, 5));
    }

    #[test]
    fn perturbed_rotation_layout() {
        let theta = RotationNumber::periodic(2);
        let an = perturbed_rotation(&RotationNumber::golden(), 3, &BigUint::from(10u8), &theta)
            .unwrap();
        assert_eq!(an.digits().take(8), big(&[0, 1, 1, 1, 10, 2, 2, 2]));
    }

    #[test]
    fn schedule_table_cases() {
        let base = DigitStream::from_u64(&[0, 4, 5, 6], &[3]).unwrap();
        let s = theta_schedule(&base, &[2, 5, 7], &big(&[100, 200, 300]), 3).unwrap();
        let b: Vec<u64> = (1..=8).map(|j| s.b(j).unwrap().to_u64().unwrap()).collect();
        // a_1, a_2, A_1, N, N, A_2, N, A_3
        assert_eq!(b, vec![4, 5, 100, 3, 3, 200, 3, 300]);
        let last = s.members()[1].digits().take(9);
        assert_eq!(last, big(&[0, 4, 5, 100, 3, 3, 200, 3, 3]));
    }

    #[test]
    fn schedule_rejects_nonincreasing_m() {
        let base = DigitStream::from_u64(&[0], &[3]).unwrap();
        let err = theta_schedule(&base, &[3, 3], &big(&[5, 6]), 3).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(_)));
    }

    #[test]
    fn json_shape() {
        let d = DigitStream::from_u64(&[0, 1, 1, 1], &[2]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"prefix":[0,1,1,1],"period":[2]}"#);
        let huge = DigitStream::new(vec![BigUint::zero(), BigUint::one() << 80usize], vec![]).unwrap();
        let back: DigitStream = serde_json::from_str(&serde_json::to_string(&huge).unwrap()).unwrap();
        assert_eq!(back, huge);
    }

    #[test]
    fn rotation_value_precision() {
        let g = RotationNumber::golden();
        let exact = (5f64.sqrt() - 1.0) / 2.0;
        assert!((g.to_f64() - exact).abs() < 1e-16);
        assert_eq!(g.to_string(), "[0;(1)...]");
    }
}
