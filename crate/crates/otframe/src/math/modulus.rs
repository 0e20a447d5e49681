use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::{gen_prime, is_prime, MathError, OtRng};

/// Which residuosity construction the modulus is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusForm {
    /// Requires `gcd(N, (p-1)(q-1)) = 1`.
    Dnr,
    /// Requires `p = q = 3 (mod 4)` and `p < q < 2p - 1`.
    Dqr,
}

/// An RSA-like modulus `N = p * q` with the form-specific side conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaLikeModulus {
    pub p: BigUint,
    pub q: BigUint,
    pub n: BigUint,
    pub form: ModulusForm,
}

impl RsaLikeModulus {
    pub fn new(
        p: BigUint,
        q: BigUint,
        form: ModulusForm,
        rng: &mut OtRng,
    ) -> Result<Self, MathError> {
        if !is_prime(&p, rng) || !is_prime(&q, rng) {
            return Err(MathError::Parameter(
                "modulus: p and q must be prime".into(),
            ));
        }
        if p == q {
            return Err(MathError::Parameter("modulus: p and q must differ".into()));
        }
        if p.is_even() || q.is_even() {
            return Err(MathError::Parameter("modulus: p and q must be odd".into()));
        }
        let n = &p * &q;
        match form {
            ModulusForm::Dnr => {
                let phi = (&p - 1u32) * (&q - 1u32);
                if !n.gcd(&phi).is_one() {
                    return Err(MathError::Parameter(
                        "modulus: gcd(N, (p-1)(q-1)) != 1".into(),
                    ));
                }
            }
            ModulusForm::Dqr => {
                let three = BigUint::from(3u32);
                let four = BigUint::from(4u32);
                if &p % &four != three || &q % &four != three {
                    return Err(MathError::Parameter(
                        "modulus: p and q must be 3 mod 4".into(),
                    ));
                }
                let upper = (&p << 1) - 1u32;
                if !(p < q && q < upper) {
                    return Err(MathError::Parameter(
                        "modulus: p < q < 2p-1 violated".into(),
                    ));
                }
            }
        }
        Ok(RsaLikeModulus { p, q, n, form })
    }

    pub fn n_squared(&self) -> BigUint {
        &self.n * &self.n
    }
}

/// Searches for a modulus of the requested form with `bits_prime`-bit factors.
pub fn gen_modulus(
    bits_prime: u64,
    form: ModulusForm,
    rng: &mut OtRng,
) -> Result<RsaLikeModulus, MathError> {
    if bits_prime < 3 {
        return Err(MathError::Parameter(
            "gen_modulus: bits_prime must be >= 3".into(),
        ));
    }
    let budget = 4096;
    match form {
        ModulusForm::Dnr => {
            for _ in 0..budget {
                let p = gen_prime(bits_prime, rng)?;
                let q = gen_prime(bits_prime, rng)?;
                if p == q {
                    continue;
                }
                if let Ok(m) = RsaLikeModulus::new(p, q, form, rng) {
                    return Ok(m);
                }
            }
        }
        ModulusForm::Dqr => {
            let three = BigUint::from(3u32);
            let four = BigUint::from(4u32);
            for _ in 0..budget {
                let p = gen_prime(bits_prime, rng)?;
                if &p % &four != three {
                    continue;
                }
                // q must fall strictly between p and 2p-1.
                let upper = (&p << 1) - 1u32;
                for _ in 0..512 {
                    let q = rng.range(&(&p + 1u32), &upper);
                    if &q % &four != three || !is_prime(&q, rng) {
                        continue;
                    }
                    if let Ok(m) = RsaLikeModulus::new(p.clone(), q, form, rng) {
                        return Ok(m);
                    }
                }
            }
        }
    }
    Err(MathError::Generation(format!(
        "searching for a {form:?} modulus with {bits_prime}-bit primes"
    )))
}
