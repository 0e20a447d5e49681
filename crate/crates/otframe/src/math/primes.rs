use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{MathError, OtRng};

/// Rounds of Miller-Rabin used for every generated prime.
pub const MILLER_RABIN_ROUNDS: usize = 64;

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Miller-Rabin primality test with `MILLER_RABIN_ROUNDS` random bases.
pub fn is_prime(n: &BigUint, rng: &mut OtRng) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // n is odd and > 251 here.
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits.
pub fn gen_prime(bits: u64, rng: &mut OtRng) -> Result<BigUint, MathError> {
    if bits < 2 {
        return Err(MathError::Parameter("gen_prime: bits must be >= 2".into()));
    }
    if bits == 2 {
        return Ok(BigUint::from(if rng.coin() { 2u32 } else { 3u32 }));
    }
    let budget = 40 * (bits as usize) * (bits as usize) + 1000;
    for _ in 0..budget {
        let candidate = rng.odd_with_bits(bits);
        if is_prime(&candidate, rng) {
            return Ok(candidate);
        }
    }
    Err(MathError::Generation(format!(
        "searching for a {bits}-bit prime"
    )))
}
