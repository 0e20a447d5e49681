use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use super::{gen_prime, is_prime, MathError, OtRng};

/// Prime-order subgroup of `Z_p^*`: `q` divides `p - 1` and `g` generates the
/// order-`q` subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrGroup {
    pub p: BigUint,
    pub q: BigUint,
    pub g: BigUint,
}

impl SchnorrGroup {
    /// Builds a group from explicit components, checking every invariant.
    pub fn new(p: BigUint, q: BigUint, g: BigUint, rng: &mut OtRng) -> Result<Self, MathError> {
        let group = SchnorrGroup { p, q, g };
        group.check(rng)?;
        Ok(group)
    }

    pub fn check(&self, rng: &mut OtRng) -> Result<(), MathError> {
        if !is_prime(&self.p, rng) {
            return Err(MathError::Parameter("group: p is not prime".into()));
        }
        if !is_prime(&self.q, rng) {
            return Err(MathError::Parameter("group: q is not prime".into()));
        }
        if !((&self.p - 1u32) % &self.q).is_zero() {
            return Err(MathError::Parameter("group: q does not divide p-1".into()));
        }
        if self.g <= BigUint::one() || self.g >= self.p {
            return Err(MathError::Parameter("group: g out of range".into()));
        }
        if !self.g.modpow(&self.q, &self.p).is_one() {
            return Err(MathError::Parameter("group: g^q != 1".into()));
        }
        Ok(())
    }

    /// True when `x` lies in the order-`q` subgroup (and is a canonical
    /// representative in `[1, p)`).
    pub fn contains(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.p && x.modpow(&self.q, &self.p).is_one()
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.p)
    }

    /// Uniform exponent in `Z_q`.
    pub fn random_exponent(&self, rng: &mut OtRng) -> BigUint {
        rng.below(&self.q)
    }
}

/// Generates a Schnorr group with a `bits_p`-bit modulus and a `bits_q`-bit
/// subgroup order. The generator is obtained as `r^((p-1)/q)` for random `r`,
/// rejecting 1.
pub fn gen_schnorr_group(
    bits_p: u64,
    bits_q: u64,
    rng: &mut OtRng,
) -> Result<SchnorrGroup, MathError> {
    if bits_q >= bits_p {
        return Err(MathError::Parameter(
            "gen_schnorr_group: bits_q must be < bits_p".into(),
        ));
    }
    if bits_q < 3 {
        return Err(MathError::Parameter(
            "gen_schnorr_group: bits_q must be >= 3".into(),
        ));
    }
    let outer_budget = 4096;
    for _ in 0..outer_budget {
        let q = gen_prime(bits_q, rng)?;
        // p = q*m + 1 with m even so that p is odd.
        let m_bits = bits_p - bits_q;
        let inner_budget = 64 * bits_p as usize + 256;
        for _ in 0..inner_budget {
            let mut m = rng.gen_biguint(m_bits + 1);
            m.set_bit(0, false);
            if m.is_zero() {
                continue;
            }
            let p = &q * &m + 1u32;
            if p.bits() != bits_p {
                continue;
            }
            if !is_prime(&p, rng) {
                continue;
            }
            let cofactor = m;
            for _ in 0..256 {
                let r = rng.range(&BigUint::from(2u32), &p);
                let g = r.modpow(&cofactor, &p);
                if !g.is_one() {
                    return Ok(SchnorrGroup { p, q, g });
                }
            }
            break;
        }
    }
    Err(MathError::Generation(format!(
        "searching for a {bits_p}/{bits_q}-bit Schnorr group"
    )))
}

/// Deterministically maps a seed string into the order-`q` subgroup via
/// hashing and cofactor exponentiation, so that nobody learns a discrete log
/// relation to any chosen generator.
pub fn hash_to_subgroup(group: &SchnorrGroup, seed: &[u8]) -> BigUint {
    let cofactor = (&group.p - 1u32) / &group.q;
    let mut counter: u32 = 0;
    loop {
        let mut hasher = Sha256::new();
        hasher.update(b"OTF-H2G-v1");
        hasher.update((group.p.bits()).to_be_bytes());
        hasher.update(group.p.to_bytes_be());
        hasher.update(seed);
        hasher.update(counter.to_be_bytes());
        let mut bytes = hasher.finalize().to_vec();
        // Widen past p if needed so the rejection step stays cheap.
        while (BigUint::from_bytes_be(&bytes)).bits() + 8 < group.p.bits() {
            let mut h2 = Sha256::new();
            h2.update(b"OTF-H2G-more");
            h2.update(&bytes);
            bytes.extend_from_slice(&h2.finalize());
        }
        let u = BigUint::from_bytes_be(&bytes) % &group.p;
        if u.is_zero() {
            counter += 1;
            continue;
        }
        let h = u.modpow(&cofactor, &group.p);
        if !h.is_one() {
            return h;
        }
        counter += 1;
    }
}
