//! Coefficient fields for rank computations: `ℚ(ζ_N)` exactly, or `𝔽_p`
//! with `p ≡ 1 (mod N)` and `ζ_N` sent to an element of order `N`.

use std::fmt;

use crate::scalars::{inv_mod, pow_mod, prime_factors, Cyc};

pub trait Field: Send + Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// The image of a cyclotomic number, `None` if it is not defined here.
    fn embed(&self, c: &Cyc) -> Option<Self::Elem>;
}

/// `ℚ(ζ_N)` with every element stored at order `N`.
#[derive(Clone, Debug)]
pub struct CycField {
    order: u64,
}

impl CycField {
    pub fn new(order: u64) -> Self {
        Self { order: order.max(1) }
    }

    pub fn order(&self) -> u64 {
        self.order
    }
}

impl Field for CycField {
    type Elem = Cyc;

    fn zero(&self) -> Cyc {
        Cyc::zero(self.order)
    }
    fn is_zero(&self, a: &Cyc) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Cyc, b: &Cyc) -> Cyc {
        a.add(b)
    }
    fn sub(&self, a: &Cyc, b: &Cyc) -> Cyc {
        a.sub(b)
    }
    fn mul(&self, a: &Cyc, b: &Cyc) -> Cyc {
        a.mul(b)
    }
    fn inv(&self, a: &Cyc) -> Cyc {
        a.inv().expect("inverse of zero")
    }
    fn embed(&self, c: &Cyc) -> Option<Cyc> {
        (self.order % c.order() == 0).then(|| c.lift(self.order))
    }
}

/// `𝔽_p` together with a chosen element `root` of multiplicative order `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    root: u64,
    order: u64,
}

impl PrimeField {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn root(&self) -> u64 {
        self.root
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        inv_mod(*a, self.p)
    }
    fn embed(&self, c: &Cyc) -> Option<u64> {
        if self.order % c.order() != 0 {
            return None;
        }
        let g = pow_mod(self.root, self.order / c.order(), self.p);
        c.reduce_mod(self.p, g)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes below `2^31` with `p ≡ 1 (mod N)`, in decreasing order, each with
/// an element of order exactly `N`.
pub fn prime_fields(order: u64) -> impl Iterator<Item = PrimeField> {
    let order = order.max(1);
    let limit = (1u64 << 31) - 1;
    let start = (limit - 1) / order;
    (1..=start).rev().filter_map(move |k| {
        let p = k * order + 1;
        if !is_prime(p) {
            return None;
        }
        let factors = prime_factors(p - 1);
        let generator = (2..p).find(|&h| factors.iter().all(|&q| pow_mod(h, (p - 1) / q, p) != 1))?;
        Some(PrimeField { p, root: pow_mod(generator, (p - 1) / order, p), order })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_carry_roots_of_the_right_order() {
        for n in [1u64, 3, 4, 12, 20] {
            for f in prime_fields(n).take(3) {
                assert_eq!((f.prime() - 1) % n, 0);
                assert_eq!(pow_mod(f.root(), n, f.prime()), 1);
                for q in prime_factors(n) {
                    assert_ne!(pow_mod(f.root(), n / q, f.prime()), 1);
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let f = prime_fields(12).next().unwrap();
        let a = Cyc::root_of_unity(3, 1);
        let b = Cyc::root_of_unity(4, 1).add(&Cyc::from_int(1, 2));
        let ab = a.mul(&b);
        let (ea, eb) = (f.embed(&a).unwrap(), f.embed(&b).unwrap());
        assert_eq!(f.embed(&ab).unwrap(), f.mul(&ea, &eb));
        // 1 + ζ_3 + ζ_3² = 0
        let s = Cyc::one(3).add(&a).add(&a.mul(&a));
        assert_eq!(f.embed(&s), Some(0));
    }
}
