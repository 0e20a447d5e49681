//! Arbitrary-precision modular arithmetic, prime and modulus generation, and
//! canonical byte encodings shared by every instantiation.

mod bits;
mod group;
mod modulus;
mod primes;
mod rng;

pub use bits::Bits;
pub use group::{gen_schnorr_group, hash_to_subgroup, SchnorrGroup};
pub use modulus::{gen_modulus, ModulusForm, RsaLikeModulus};
pub use primes::{gen_prime, is_prime};
pub use rng::OtRng;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors raised by the arithmetic and generation routines.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MathError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("generation error: retry budget exhausted while {0}")]
    Generation(String),
    #[error("overflow error: value does not fit in {0} bytes")]
    Overflow(usize),
}

/// `base^exp mod modulus`. The modulus must be at least 2.
pub fn pow_mod(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint, MathError> {
    if *modulus < BigUint::from(2u32) {
        return Err(MathError::Parameter("pow_mod: modulus < 2".into()));
    }
    Ok(base.modpow(exp, modulus))
}

/// Jacobi symbol `(a|n)` for odd `n >= 3`.
pub fn jacobi(a: &BigUint, n: &BigUint) -> Result<i8, MathError> {
    if n.is_even() || *n < BigUint::from(3u32) {
        return Err(MathError::Parameter(
            "jacobi: n must be odd and >= 3".into(),
        ));
    }
    let mut a = a % n;
    let mut n = n.clone();
    let mut t: i8 = 1;
    let three = BigUint::from(3u32);
    let four = BigUint::from(4u32);
    let five = BigUint::from(5u32);
    let eight = BigUint::from(8u32);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = &n % &eight;
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if &a % &four == three && &n % &four == three {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        Ok(t)
    } else {
        Ok(0)
    }
}

/// Big-endian encoding zero-padded to exactly `byte_len` bytes.
pub fn canonical_encode(x: &BigUint, byte_len: usize) -> Result<Vec<u8>, MathError> {
    let raw = x.to_bytes_be();
    let raw = if x.is_zero() { Vec::new() } else { raw };
    if raw.len() > byte_len {
        return Err(MathError::Overflow(byte_len));
    }
    let mut out = vec![0u8; byte_len - raw.len()];
    out.extend_from_slice(&raw);
    Ok(out)
}

/// Inverse of [`canonical_encode`].
pub fn canonical_decode(bytes: &[u8]) -> BigUint {
    BigUint::from_bytes_be(bytes)
}

/// Number of bytes needed to encode any value below `modulus`.
pub fn byte_len_of(modulus: &BigUint) -> usize {
    (modulus.bits() as usize).div_ceil(8)
}

pub(crate) fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// True when `gcd(a, n) = 1`.
pub fn coprime(a: &BigUint, n: &BigUint) -> bool {
    gcd(a, n).is_one()
}
