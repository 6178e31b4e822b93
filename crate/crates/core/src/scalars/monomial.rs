//! Symbolic monomials: a root of unity times a product of symbols raised to
//! rational powers.
//!
//! Symbols are either free parameters (`x1`, `q`) or torsion symbols with a
//! declared order (`q[4]` satisfies `q⁴ = 1`). A fractional exponent such as
//! `x1^(1/3)` stands for a fixed but unspecified root; evaluation asks the
//! caller for its value instead of choosing a branch.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Cyc, ScalarError};

/// A formal symbol. `order` is `Some(d)` for a symbol constrained by `sᵈ = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub order: Option<u64>,
}

impl Symbol {
    pub fn param(name: impl Into<String>) -> Self {
        Self { name: name.into(), order: None }
    }

    pub fn torsion(name: impl Into<String>, order: u64) -> Self {
        Self { name: name.into(), order: Some(order) }
    }

    fn natural_key(&self) -> (&str, Option<u64>, &str) {
        let split = self.name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (prefix, digits) = self.name.split_at(split);
        (prefix, digits.parse().ok(), digits)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.natural_key()
            .cmp(&other.natural_key())
            .then_with(|| self.name.cmp(&other.name))
            .then_with(|| self.order.cmp(&other.order))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            Some(d) => write!(f, "{}[{}]", self.name, d),
            None => f.write_str(&self.name),
        }
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let m = Monomial::parse(&text).map_err(serde::de::Error::custom)?;
        match (m.unit.is_zero(), m.exps.len(), m.exps.iter().next()) {
            (true, 1, Some((sym, e))) if e.is_one() => Ok(sym.clone()),
            _ => Err(serde::de::Error::custom(format!("not a symbol: {text}"))),
        }
    }
}

impl serde::Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Monomial::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// `e^{2πi·unit} · ∏ sym^exp` in normal form: `unit ∈ [0, 1)`, torsion
/// exponents reduced modulo their order, zero exponents dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    unit: BigRational,
    exps: BTreeMap<Symbol, BigRational>,
}

fn frac_mod(x: &BigRational, m: &BigInt) -> BigRational {
    // x mod m for rational x and positive integer m
    let den = x.denom();
    let num = x.numer().mod_floor(&(m * den));
    BigRational::new(num, den.clone())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Default for Monomial {
    fn default() -> Self {
        Self::one()
    }
}

impl Monomial {
    pub fn one() -> Self {
        Self { unit: BigRational::zero(), exps: BTreeMap::new() }
    }

    /// `e^{2πi·r}`.
    pub fn root_of_unity(r: BigRational) -> Self {
        Self { unit: frac_mod(&r, &BigInt::one()), exps: BTreeMap::new() }
    }

    pub fn minus_one() -> Self {
        Self::root_of_unity(BigRational::new(1.into(), 2.into()))
    }

    pub fn symbol(sym: Symbol) -> Self {
        Self::one().with_factor(sym, rat(1))
    }

    pub fn param(name: &str) -> Self {
        Self::symbol(Symbol::param(name))
    }

    pub fn torsion(name: &str, order: u64) -> Self {
        Self::symbol(Symbol::torsion(name, order))
    }

    /// Multiplies in `sym^exp` and renormalizes.
    pub fn with_factor(mut self, sym: Symbol, exp: BigRational) -> Self {
        let entry = self.exps.entry(sym.clone()).or_insert_with(BigRational::zero);
        *entry += exp;
        if let Some(d) = sym.order {
            *entry = frac_mod(entry, &BigInt::from(d));
        }
        if entry.is_zero() {
            self.exps.remove(&sym);
        }
        self
    }

    /// The exponent of `e^{2πi·r}`, in `[0, 1)`.
    pub fn unit(&self) -> &BigRational {
        &self.unit
    }

    pub fn exponents(&self) -> &BTreeMap<Symbol, BigRational> {
        &self.exps
    }

    pub fn exponent(&self, sym: &Symbol) -> BigRational {
        self.exps.get(sym).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_one(&self) -> bool {
        self.unit.is_zero() && self.exps.is_empty()
    }

    /// True when the monomial is a constant root of unity.
    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        out.unit = frac_mod(&(&out.unit + &other.unit), &BigInt::one());
        for (s, e) in &other.exps {
            out = out.with_factor(s.clone(), e.clone());
        }
        out
    }

    pub fn inv(&self) -> Monomial {
        self.pow(&rat(-1))
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    pub fn pow_int(&self, k: i64) -> Monomial {
        self.pow(&rat(k))
    }

    /// Rational power. The root-of-unity part takes the principal branch
    /// `e^{2πi·unit·r}`; symbol exponents are scaled.
    pub fn pow(&self, r: &BigRational) -> Monomial {
        let mut out = Monomial::root_of_unity(&self.unit * r);
        for (s, e) in &self.exps {
            out = out.with_factor(s.clone(), e * r);
        }
        out
    }

    /// Like [`Monomial::pow`], rejecting results whose exponent denominators
    /// exceed `cap`.
    pub fn pow_capped(&self, r: &BigRational, cap: u64) -> Result<Monomial, ScalarError> {
        let out = self.pow(r);
        let den = out.max_denominator();
        if den > cap {
            return Err(ScalarError::DenominatorCap { den, cap });
        }
        Ok(out)
    }

    /// Largest denominator among symbol exponents (1 when all are integers).
    pub fn max_denominator(&self) -> u64 {
        self.exps.values().map(|e| e.denom().to_u64().unwrap_or(u64::MAX)).max().unwrap_or(1)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.exps.keys()
    }

    /// Replaces symbols by monomials; symbols missing from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Monomial>) -> Monomial {
        let mut out = Monomial::root_of_unity(self.unit.clone());
        for (s, e) in &self.exps {
            match map.get(s) {
                Some(m) => out = out.mul(&m.pow(e)),
                None => out = out.with_factor(s.clone(), e.clone()),
            }
        }
        out
    }

    /// Renames symbols by name, keeping exponents.
    pub fn rename(&self, f: impl Fn(&Symbol) -> Symbol) -> Monomial {
        let mut out = Monomial::root_of_unity(self.unit.clone());
        for (s, e) in &self.exps {
            out = out.with_factor(f(s), e.clone());
        }
        out
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<Cyc, ScalarError> {
        let mut acc = Cyc::exp_2pi_i(&self.unit);
        for (s, e) in &self.exps {
            acc = acc.mul(&assignment.power(s, e)?);
        }
        Ok(acc)
    }

    /// Parses the text form, e.g. `-1 * x1^(1/3) * x2^-1 * q[4]^3` or
    /// `x2^2/x1`.
    pub fn parse(text: &str) -> Result<Monomial, ScalarError> {
        let mut p = Parser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, text };
        let m = p.product()?;
        if p.pos != p.chars.len() {
            return Err(p.error());
        }
        Ok(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.unit.is_zero() {
            parts.push(unit_text(&self.unit));
        }
        for (s, e) in &self.exps {
            parts.push(if e.is_one() {
                s.to_string()
            } else if e.is_integer() {
                format!("{s}^{e}")
            } else {
                format!("{s}^({e})")
            });
        }
        if parts.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&parts.join(" * "))
    }
}

fn unit_text(r: &BigRational) -> String {
    let (num, den) = (r.numer(), r.denom());
    if *den == BigInt::from(2) {
        "-1".into()
    } else if num.is_one() {
        format!("zeta{den}")
    } else {
        format!("zeta{den}^{num}")
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self) -> ScalarError {
        ScalarError::Parse(self.text.to_string())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn product(&mut self) -> Result<Monomial, ScalarError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                acc = acc.div(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Monomial, ScalarError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            Ok(base.pow(&e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error());
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().map_err(|_| self.error())
    }

    fn signed_integer(&mut self) -> Result<BigInt, ScalarError> {
        let neg = self.eat('-');
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<BigRational, ScalarError> {
        if self.eat('(') {
            let num = self.signed_integer()?;
            let den = if self.eat('/') { self.integer()? } else { BigInt::one() };
            if !self.eat(')') || den.is_zero() {
                return Err(self.error());
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(self.signed_integer()?))
        }
    }

    fn atom(&mut self) -> Result<Monomial, ScalarError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let m = self.product()?;
                if !self.eat(')') {
                    return Err(self.error());
                }
                Ok(m)
            }
            Some('-') => {
                self.pos += 1;
                Ok(Monomial::minus_one().mul(&self.atom()?))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                if v.is_one() {
                    Ok(Monomial::one())
                } else {
                    Err(self.error())
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if let Some(n) = name.strip_prefix("zeta").and_then(|d| d.parse::<u64>().ok()) {
                    if n == 0 {
                        return Err(self.error());
                    }
                    return Ok(Monomial::root_of_unity(BigRational::new(1.into(), n.into())));
                }
                if self.eat('[') {
                    let order = self.integer()?.to_u64().filter(|&d| d > 0).ok_or_else(|| self.error())?;
                    if !self.eat(']') {
                        return Err(self.error());
                    }
                    Ok(Monomial::torsion(&name, order))
                } else {
                    Ok(Monomial::param(&name))
                }
            }
            _ => Err(self.error()),
        }
    }
}

/// Concrete values for symbols, plus explicitly chosen roots.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    values: BTreeMap<String, Cyc>,
    roots: BTreeMap<(String, u64), Cyc>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: Cyc) -> &mut Self {
        self.values.insert(name.to_string(), value);
        self
    }

    /// Records the chosen value of `name^(1/den)`.
    pub fn set_root(&mut self, name: &str, den: u64, value: Cyc) -> &mut Self {
        if den == 1 {
            return self.set(name, value);
        }
        self.roots.insert((name.to_string(), den), value);
        self
    }

    pub fn with(mut self, name: &str, value: Cyc) -> Self {
        self.set(name, value);
        self
    }

    pub fn with_root(mut self, name: &str, den: u64, value: Cyc) -> Self {
        self.set_root(name, den, value);
        self
    }

    pub fn value(&self, name: &str) -> Option<&Cyc> {
        self.values.get(name)
    }

    pub fn values(&self) -> &BTreeMap<String, Cyc> {
        &self.values
    }

    pub fn roots(&self) -> &BTreeMap<(String, u64), Cyc> {
        &self.roots
    }

    /// `sym^exp` under this assignment.
    pub fn power(&self, sym: &Symbol, exp: &BigRational) -> Result<Cyc, ScalarError> {
        let den = exp.denom().to_u64().unwrap();
        let num = exp.numer().to_i64().unwrap();
        let base = if den == 1 {
            (self.values.get(&sym.name).cloned(), 1)
        } else {
            self.roots
                .iter()
                .filter(|((n, d), _)| *n == sym.name && d % den == 0)
                .min_by_key(|((_, d), _)| *d)
                .map(|((_, d), v)| (Some(v.clone()), d / den))
                .unwrap_or((None, 0))
        };
        match base {
            (Some(v), step) => {
                if let Some(d) = sym.order {
                    if den == 1 && !v.pow(d as i64)?.is_one() {
                        return Err(ScalarError::TorsionViolated { name: sym.name.clone(), order: d });
                    }
                }
                v.pow(num * step as i64)
            }
            (None, _) if den == 1 => Err(ScalarError::Unassigned(sym.name.clone())),
            (None, _) => Err(ScalarError::RootNotSupplied { name: sym.name.clone(), den }),
        }
    }

    /// Parses `a=1,e=1,b=zeta3` style lists. A key `x^(1/d)` sets a root.
    /// Values are products of rationals, `zetaN`, `zetaN^k` and a leading `-`.
    pub fn parse(text: &str) -> Result<Assignment, ScalarError> {
        let mut out = Assignment::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| ScalarError::Parse(item.into()))?;
            let value = parse_value(value)?;
            let key = key.trim();
            if let Some((name, root)) = key.split_once('^') {
                let den = root
                    .trim()
                    .strip_prefix("(1/")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|d| d.parse::<u64>().ok())
                    .filter(|&d| d > 0)
                    .ok_or_else(|| ScalarError::Parse(item.into()))?;
                out.set_root(name.trim(), den, value);
            } else {
                out.set(key, value);
            }
        }
        Ok(out)
    }
}

/// Parses a concrete value such as `-2/3*zeta5^2`.
pub fn parse_value(text: &str) -> Result<Cyc, ScalarError> {
    let err = || ScalarError::Parse(text.to_string());
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, t.clone()),
    };
    if body.is_empty() {
        return Err(err());
    }
    let mut acc = Cyc::one(1);
    for factor in body.split('*') {
        let v = if let Some(rest) = factor.strip_prefix("zeta") {
            let (n, k) = match rest.split_once('^') {
                Some((n, k)) => (n, k.trim_matches(|c| c == '(' || c == ')')),
                None => (rest, "1"),
            };
            let n: u64 = n.parse().map_err(|_| err())?;
            let k: i64 = k.parse().map_err(|_| err())?;
            if n == 0 {
                return Err(err());
            }
            Cyc::root_of_unity(n, k)
        } else {
            let q: BigRational = factor.parse().map_err(|_| err())?;
            Cyc::from_rational(1, q)
        };
        acc = acc.mul(&v);
    }
    if neg {
        acc = acc.neg();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cancellation_and_powers() {
        assert_eq!(m("x1*x2^-1").mul(&m("x2*x3")), m("x1*x3"));
        let p = m("x4*x5/x1^2").pow(&q(1, 3));
        assert_eq!(p.to_string(), "x1^(-2/3) * x4^(1/3) * x5^(1/3)");
        let h = m("q[4]").pow(&q(1, 2));
        assert_eq!(h.pow_int(2), m("q[4]"));
        assert!(h.pow_int(8).is_one());
        assert!(!h.pow_int(4).is_one());
    }

    #[test]
    fn text_roundtrip() {
        for s in ["1", "-1", "zeta3^2 * q[4]^3 * x1^(1/3) * x2^-1", "x2 * x10", "zeta12^5 * z1^(-1/2)"] {
            assert_eq!(m(s).to_string(), s);
        }
        assert_eq!(m("x2^2/x1").to_string(), "x1^-1 * x2^2");
        assert_eq!(m("-x1").to_string(), "-1 * x1");
        assert_eq!(m("(x1*x2)^(1/2)").to_string(), "x1^(1/2) * x2^(1/2)");
        assert_eq!(m("q[4]^5").to_string(), "q[4]");
        assert!(Monomial::parse("2*x1").is_err());
        assert!(Monomial::parse("x1^").is_err());
        assert!(Monomial::parse("x1)").is_err());
    }

    #[test]
    fn evaluation() {
        let z3 = Cyc::root_of_unity(3, 1);
        let a = Assignment::new().with("x1", z3.clone()).with("x2", z3);
        assert!(m("x1*x2^-1").evaluate(&a).unwrap().is_one());
        let b = Assignment::new().with("q", Cyc::root_of_unity(4, 1));
        assert_eq!(m("q^2").evaluate(&b).unwrap(), Cyc::from_int(1, -1));
        let one = Assignment::parse("x1=1,x3=1,x4=1").unwrap();
        assert!(m("x3^3/(x1*x4)").evaluate(&one).unwrap().is_one());
        assert_eq!(
            m("x1^(1/3)").evaluate(&one),
            Err(ScalarError::RootNotSupplied { name: "x1".into(), den: 3 })
        );
        assert_eq!(m("y").evaluate(&one), Err(ScalarError::Unassigned("y".into())));
        let roots = Assignment::parse("x^(1/6)=zeta12").unwrap();
        assert_eq!(m("x^(1/3)").evaluate(&roots).unwrap(), Cyc::root_of_unity(6, 1));
        let bad = Assignment::parse("q=zeta3").unwrap();
        assert!(matches!(m("q[4]").evaluate(&bad), Err(ScalarError::TorsionViolated { .. })));
    }

    #[test]
    fn value_syntax() {
        assert_eq!(parse_value("-zeta4").unwrap(), Cyc::root_of_unity(4, 3));
        assert_eq!(parse_value("2/3*zeta3^2").unwrap(), Cyc::root_of_unity(3, 2).scale(&q(2, 3)));
        assert!(parse_value("zeta0").is_err());
    }

    #[test]
    fn natural_symbol_order() {
        let x = m("x10*x2*x1*a");
        assert_eq!(x.to_string(), "a * x1 * x2 * x10");
    }

    fn arb_mono() -> impl Strategy<Value = Monomial> {
        (
            -5i64..5,
            proptest::collection::vec((0usize..4, -6i64..7, 1i64..4), 0..5),
        )
            .prop_map(|(u, fs)| {
                let mut out = Monomial::root_of_unity(q(u, 6));
                for (s, n, d) in fs {
                    let sym = if s == 3 { Symbol::torsion("q", 4) } else { Symbol::param(format!("x{s}")) };
                    out = out.with_factor(sym, q(n, d));
                }
                out
            })
    }

    fn arb_assignment() -> Assignment {
        let mut a = Assignment::new();
        for (k, name) in ["x0", "x1", "x2"].iter().enumerate() {
            // values with roots of all needed orders: x = ζ_72^(6k+1) and roots of it
            let base = Cyc::root_of_unity(72, 6 * k as i64 + 5);
            for d in [1u64, 2, 3, 6] {
                a.set_root(name, d, base.pow(6 / d as i64).unwrap());
            }
        }
        a.set_root("q", 6, Cyc::root_of_unity(24, 1));
        a.set("q", Cyc::root_of_unity(4, 1));
        a
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_mono(), b in arb_mono(), c in arb_mono()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert!(a.mul(&a.inv()).is_one());
            prop_assert_eq!(Monomial::parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn evaluation_is_multiplicative(a in arb_mono(), b in arb_mono()) {
            let asg = arb_assignment();
            let lhs = a.mul(&b).evaluate(&asg).unwrap();
            let rhs = a.evaluate(&asg).unwrap().mul(&b.evaluate(&asg).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
