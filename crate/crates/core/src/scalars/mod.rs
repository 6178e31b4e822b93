//! Scalars: exact cyclotomic numbers ([`Cyc`]) and symbolic monomials
//! ([`Monomial`]) in formal parameters and roots of unity.

mod cyclotomic;
mod monomial;

pub use cyclotomic::{cyclotomic_polynomial, totient, Cyc, CycCoordinates};
pub(crate) use cyclotomic::prime_factors;
pub use monomial::parse_value;
pub use monomial::{Assignment, Monomial, Symbol};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("no value assigned to {0}")]
    Unassigned(String),
    #[error("no value supplied for {name}^(1/{den})")]
    RootNotSupplied { name: String, den: u64 },
    #[error("exponent denominator {den} exceeds the cap {cap}")]
    DenominatorCap { den: u64, cap: u64 },
    #[error("value assigned to {name} is not a root of unity of order dividing {order}")]
    TorsionViolated { name: String, order: u64 },
}

/// Inverse of `a` modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}
