//! Exact arithmetic in cyclotomic fields `ℚ(ζ_N)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ScalarError;

/// An element of `ℚ(ζ_N)` in the power basis `1, ζ, .., ζ^{φ(N)-1}`.
///
/// Values of different orders compare equal when they denote the same
/// number; arithmetic lifts both operands to the least common order.
#[derive(Clone)]
pub struct Cyc {
    order: u64,
    coeffs: Vec<BigRational>,
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_div(&num, &cyclotomic_polynomial(d));
    }
    let p = Arc::new(num);
    cache().lock().unwrap().insert(n, p.clone());
    p
}

fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn reduce(mut poly: Vec<BigRational>, order: u64) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(order);
    let deg = phi.len() - 1;
    for k in (deg..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[k], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        for (i, p) in phi.iter().enumerate().take(deg) {
            if !p.is_zero() {
                poly[k - deg + i] -= &c * BigRational::from_integer(p.clone());
            }
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

impl Cyc {
    pub fn zero(order: u64) -> Self {
        Self { order, coeffs: vec![BigRational::zero(); totient(order) as usize] }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u64, q: BigRational) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = q;
        c
    }

    pub fn from_int(order: u64, k: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(k.into()))
    }

    /// `ζ_N^k`.
    pub fn root_of_unity(order: u64, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut poly = vec![BigRational::zero(); e.max(totient(order) as usize - 1) + 1];
        poly[e] = BigRational::one();
        Self { order, coeffs: reduce(poly, order) }
    }

    /// `e^{2πi·r}` for a rational `r`, in `ℚ(ζ_den(r))`.
    pub fn exp_2pi_i(r: &BigRational) -> Self {
        let den = r.denom().to_u64().expect("root of unity order fits in u64");
        let num = r.numer().mod_floor(r.denom()).to_i64().unwrap();
        Self::root_of_unity(den, num)
    }

    /// Builds an element from power-basis coordinates, reducing if needed.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Self {
        Self { order, coeffs: reduce(coeffs, order) }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in `ℚ`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then_some(&self.coeffs[0])
    }

    /// Re-expresses the element in `ℚ(ζ_M)`; `M` must be a multiple of the order.
    pub fn lift(&self, order: u64) -> Self {
        assert!(order % self.order == 0, "cannot lift order {} to {}", self.order, order);
        if order == self.order {
            return self.clone();
        }
        let step = (order / self.order) as usize;
        let mut poly = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        if poly.len() < totient(order) as usize {
            poly.resize(totient(order) as usize, BigRational::zero());
        }
        Self { order, coeffs: reduce(poly, order) }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = a.order.lcm(&b.order);
        (a.lift(l), b.lift(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.order == other.order {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return Self { order: self.order, coeffs };
        }
        let (a, b) = Self::common(self, other);
        a.add(&b)
    }

    pub fn neg(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order != other.order {
            let (a, b) = Self::common(self, other);
            return a.mul(&b);
        }
        let n = self.coeffs.len();
        let mut poly = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        Self { order: self.order, coeffs: reduce(poly, self.order) }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(self.order, q.recip()));
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, s) = poly_xgcd(trim(self.coeffs.clone()), phi);
        // g is a nonzero constant because Φ_N is irreducible
        debug_assert_eq!(g.len(), 1);
        let inv_g = g[0].recip();
        let s: Vec<BigRational> = s.into_iter().map(|c| c * &inv_g).collect();
        Ok(Self::from_coeffs(self.order, pad(s, totient(self.order) as usize)))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self, ScalarError> {
        let mut base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// The multiplicative order if the element is a root of unity.
    pub fn root_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let bound = self.order.lcm(&2);
        if !self.pow(bound as i64).ok()?.is_one() {
            return None;
        }
        divisors(bound).into_iter().find(|&d| self.pow(d as i64).unwrap().is_one())
    }

    /// `(d, k)` with the element equal to `ζ_d^k`, `gcd(k, d) = 1`, if it is a root of unity.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        let d = self.root_order()?;
        (0..d).find(|&k| k.gcd(&d) == 1 && Cyc::root_of_unity(d, k as i64) == *self).map(|k| (d, k))
    }

    /// Roots of unity as `1`, `-1`, `zetaN` or `zetaN^k`; other values as sums.
    pub fn to_text(&self) -> String {
        match self.as_root_of_unity() {
            Some((1, _)) => "1".into(),
            Some((2, _)) => "-1".into(),
            Some((d, 1)) => format!("zeta{d}"),
            Some((d, k)) => format!("zeta{d}^{k}"),
            None => self.to_string(),
        }
    }

    /// Whether the element is a primitive `m`-th root of unity.
    pub fn is_primitive_root(&self, m: u64) -> bool {
        self.root_order() == Some(m)
    }

    /// Image under `ζ_N ↦ g` in `𝔽_p`, where `g` has order `N` modulo `p`.
    /// `None` if a denominator vanishes modulo `p`.
    pub fn reduce_mod(&self, p: u64, g: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let mut acc = 0u64;
        let mut power = 1u64;
        for c in &self.coeffs {
            if !c.is_zero() {
                let den = c.denom().mod_floor(&pb).to_u64().unwrap();
                if den == 0 {
                    return None;
                }
                let num = c.numer().mod_floor(&pb).to_u64().unwrap();
                let v = num * super::inv_mod(den, p) % p;
                acc = (acc + v * power) % p;
            }
            power = power * g % p;
        }
        Some(acc)
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn pad(mut p: Vec<BigRational>, n: usize) -> Vec<BigRational> {
    if p.len() < n {
        p.resize(n, BigRational::zero());
    }
    p
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = trim(a.to_vec());
    if rem.len() <= db {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= &c * bi;
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

fn poly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    let need = q.len() + b.len() - 1;
    if out.len() < need {
        out.resize(need, BigRational::zero());
    }
    for (i, qi) in q.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] -= qi * bj;
        }
    }
    trim(out)
}

/// Returns `(g, s)` with `s·a ≡ g (mod b)`.
fn poly_xgcd(a: Vec<BigRational>, b: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyc {}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let zeta = match k {
                0 => String::new(),
                1 => format!("zeta{}", self.order),
                _ => format!("zeta{}^{}", self.order, k),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&zeta)?;
            } else {
                write!(f, "{mag}*{zeta}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc[{}]({})", self.order, self)
    }
}

/// JSON form: `{"order": N, "coeffs": ["a/b", ...]}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CycCoordinates {
    pub order: u64,
    pub coeffs: Vec<String>,
}

impl From<&Cyc> for CycCoordinates {
    fn from(c: &Cyc) -> Self {
        Self { order: c.order, coeffs: c.coeffs.iter().map(ToString::to_string).collect() }
    }
}

impl TryFrom<&CycCoordinates> for Cyc {
    type Error = ScalarError;

    fn try_from(c: &CycCoordinates) -> Result<Self, ScalarError> {
        if c.order == 0 {
            return Err(ScalarError::Parse("order must be positive".into()));
        }
        let coeffs = c
            .coeffs
            .iter()
            .map(|s| s.trim().parse::<BigRational>().map_err(|_| ScalarError::Parse(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() > totient(c.order) as usize {
            return Err(ScalarError::Parse(format!(
                "{} coordinates given for order {}",
                coeffs.len(),
                c.order
            )));
        }
        Ok(Cyc::from_coeffs(c.order, pad(coeffs, totient(c.order) as usize)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| cyclotomic_polynomial(n).iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        for n in 1..40 {
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, totient(n));
        }
    }

    #[test]
    fn basic_identities() {
        let z = Cyc::root_of_unity(3, 1);
        let s = z.add(&z.pow(2).unwrap()).add(&Cyc::one(3));
        assert!(s.is_zero());
        assert_eq!(Cyc::root_of_unity(4, 1).pow(2).unwrap(), Cyc::from_int(4, -1));
        assert!(Cyc::root_of_unity(6, 2).is_primitive_root(3));
        assert!(Cyc::root_of_unity(6, 1).is_primitive_root(6));
        assert_eq!(Cyc::from_int(5, -1).root_order(), Some(2));
        assert_eq!(Cyc::from_int(1, 2).root_order(), None);
        assert!(Cyc::zero(3).inv().is_err());
    }

    #[test]
    fn lifting_preserves_value() {
        let z3 = Cyc::root_of_unity(3, 1);
        assert_eq!(z3, Cyc::root_of_unity(12, 4));
        assert_eq!(z3.lift(12), Cyc::root_of_unity(12, 4));
        assert_eq!(Cyc::one(1), Cyc::one(7));
        let mixed = Cyc::root_of_unity(4, 1).mul(&Cyc::root_of_unity(3, 1));
        assert_eq!(mixed, Cyc::root_of_unity(12, 7));
    }

    #[test]
    fn exp_form() {
        assert_eq!(Cyc::exp_2pi_i(&q(1, 2)), Cyc::from_int(1, -1));
        assert_eq!(Cyc::exp_2pi_i(&q(-1, 3)), Cyc::root_of_unity(3, 2));
    }

    #[test]
    fn coordinates_roundtrip() {
        let x = Cyc::root_of_unity(5, 3).add(&Cyc::from_rational(5, q(2, 7)));
        let c = CycCoordinates::from(&x);
        assert_eq!(Cyc::try_from(&c).unwrap(), x);
        assert_eq!(Cyc::root_of_unity(3, 2).to_string(), "-1 - zeta3");
    }

    fn arb_cyc(order: u64) -> impl Strategy<Value = Cyc> {
        proptest::collection::vec((-9i64..10, 1i64..5), totient(order) as usize)
            .prop_map(move |v| Cyc::from_coeffs(order, v.into_iter().map(|(a, b)| q(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_cyc(12), b in arb_cyc(12), c in arb_cyc(12)) {
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn inverse_in_prime_order(a in arb_cyc(7)) {
            if !a.is_zero() {
                prop_assert!(a.inv().unwrap().mul(&a).is_one());
            }
        }
    }
}
