use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::coprime;

/// Deterministic-when-seeded random source. All randomness in the crate is
/// drawn through an injected `OtRng`; no operation touches ambient entropy
/// directly.
pub struct OtRng(ChaCha20Rng);

impl OtRng {
    pub fn seeded(seed: u64) -> Self {
        OtRng(ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn from_seed_bytes(seed: [u8; 32]) -> Self {
        OtRng(ChaCha20Rng::from_seed(seed))
    }

    pub fn from_entropy() -> Self {
        OtRng(ChaCha20Rng::from_entropy())
    }

    /// Draws a child seed; forked generators evolve independently of the
    /// parent's later draws.
    pub fn fork(&mut self) -> OtRng {
        OtRng::from_seed_bytes(self.seed32())
    }

    pub fn seed32(&mut self) -> [u8; 32] {
        let mut s = [0u8; 32];
        self.0.fill_bytes(&mut s);
        s
    }

    pub fn bytes16(&mut self) -> [u8; 16] {
        let mut s = [0u8; 16];
        self.0.fill_bytes(&mut s);
        s
    }

    pub fn fill(&mut self, buf: &mut [u8]) {
        self.0.fill_bytes(buf);
    }

    /// Uniform in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: &BigUint) -> BigUint {
        self.0.gen_biguint_below(bound)
    }

    /// Uniform in `[low, high)`.
    pub fn range(&mut self, low: &BigUint, high: &BigUint) -> BigUint {
        self.0.gen_biguint_range(low, high)
    }

    /// Uniform over the units of `Z_modulus`.
    pub fn unit_below(&mut self, modulus: &BigUint) -> BigUint {
        loop {
            let x = self.below(modulus);
            if !num_traits::Zero::is_zero(&x) && coprime(&x, modulus) {
                return x;
            }
        }
    }

    /// Uniform `bits`-bit integer with the top bit set.
    pub fn odd_with_bits(&mut self, bits: u64) -> BigUint {
        let mut x = self.0.gen_biguint(bits);
        x.set_bit(bits - 1, true);
        x.set_bit(0, true);
        x
    }

    pub fn coin_string(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.0.next_u32() & 1 == 1).collect()
    }

    pub fn coin(&mut self) -> bool {
        self.0.next_u32() & 1 == 1
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        // Rejection sampling keeps the distribution exactly uniform.
        let n64 = n as u64;
        let zone = u64::MAX - u64::MAX % n64;
        loop {
            let v = self.0.next_u64();
            if v < zone {
                return (v % n64) as usize;
            }
        }
    }

    pub fn gen_biguint(&mut self, bits: u64) -> BigUint {
        self.0.gen_biguint(bits)
    }

    /// Uniform nonzero element below `bound`.
    pub fn nonzero_below(&mut self, bound: &BigUint) -> BigUint {
        self.range(&BigUint::one(), bound)
    }
}

impl RngCore for OtRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

impl CryptoRng for OtRng {}
