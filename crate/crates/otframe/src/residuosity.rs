//! Universal projective families under the decisional N-th residuosity and
//! decisional quadratic residuosity assumptions.
//!
//! Both share the exponentiation template: the hash key is a uniform
//! exponent `hk`, the projective key is `g^hk`, hashing raises the instance
//! to `hk` and projecting raises the projective key to the witness exponent.
//! They bound the guessing probability on smooth instances rather than
//! making it uniform, so the protocol uses them through the amplifier.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::math::{
    byte_len_of, canonical_encode, coprime, gen_modulus, gen_schnorr_group, jacobi, MathError,
    ModulusForm, OtRng, RsaLikeModulus, SchnorrGroup,
};
use crate::sph::{
    Assumption, Family, InstancePair, InvalidWitness, KeyPair, Kind, Profile, UniversalFamily,
};
use crate::wire::{ByteReader, ByteWriter, WireError};

/// Witness for both residuosity families: exponent `r` plus the offset `v`
/// (fixed to 0 in the quadratic construction and for projective instances).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResWitness {
    pub r: BigUint,
    pub v: BigUint,
}

/// Family parameter `(N, g)` plus the sizing profile the parameters were
/// generated under (the modulus size check is enforced only in production).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResParams {
    pub n: BigUint,
    pub g: BigUint,
    pub profile: Profile,
}

/// Bit length every factor must have in production.
const PRODUCTION_PRIME_BITS: u64 = 1024;

/// The production-profile modulus size check: `N` must exceed `2^(2k)` for
/// `k = PRODUCTION_PRIME_BITS - 1`, i.e. carry at least 2047 bits.
fn modulus_size_ok(n: &BigUint, profile: Profile) -> bool {
    match profile {
        Profile::Toy => true,
        Profile::Production => n.bits() >= 2 * PRODUCTION_PRIME_BITS - 1,
    }
}

fn toy_modulus(form: ModulusForm, rng: &mut OtRng) -> RsaLikeModulus {
    let (p, q) = match form {
        ModulusForm::Dnr => (3u32, 5u32),
        ModulusForm::Dqr => (7u32, 11u32),
    };
    RsaLikeModulus::new(BigUint::from(p), BigUint::from(q), form, rng)
        .expect("toy fixtures satisfy the form invariants")
}

fn modulus_for_profile(
    form: ModulusForm,
    profile: Profile,
    rng: &mut OtRng,
) -> Result<RsaLikeModulus, MathError> {
    match profile {
        Profile::Toy => Ok(toy_modulus(form, rng)),
        Profile::Production => gen_modulus(PRODUCTION_PRIME_BITS, form, rng),
    }
}

pub struct DnrFamily;
pub struct DqrFamily;

impl DnrFamily {
    /// `g = a^(N*T) mod N^2` with `T = N^(2*bitlen(N))` kills every small
    /// order component of a random unit.
    pub fn derive_generator(n: &BigUint, a: &BigUint) -> BigUint {
        let n_sq = n * n;
        let exp_power = 2 * n.bits() as u32;
        let t = n.pow(exp_power);
        a.modpow(&(n * t), &n_sq)
    }
}

impl DqrFamily {
    /// `g = a^(2*T) mod N` with `T = 2^bitlen(N)` is a square with odd order.
    pub fn derive_generator(n: &BigUint, a: &BigUint) -> BigUint {
        let t = BigUint::one() << n.bits();
        a.modpow(&(t << 1), n)
    }
}

impl Family for DnrFamily {
    type Params = ResParams;
    type Instance = BigUint;
    type Witness = ResWitness;
    type HashKey = BigUint;
    type ProjKey = BigUint;
    type Value = BigUint;

    const ASSUMPTION: Assumption = Assumption::Dnr;

    fn pg(profile: Profile, rng: &mut OtRng) -> Result<ResParams, MathError> {
        let m = modulus_for_profile(ModulusForm::Dnr, profile, rng)?;
        let n_sq = m.n_squared();
        let a = rng.unit_below(&n_sq);
        let g = Self::derive_generator(&m.n, &a);
        Ok(ResParams { n: m.n, g, profile })
    }

    fn is(params: &ResParams, kind: Kind, rng: &mut OtRng) -> InstancePair<Self> {
        let n_sq = &params.n * &params.n;
        let r = rng.unit_below(&params.n);
        let base = params.g.modpow(&r, &n_sq);
        match kind {
            Kind::Projective => InstancePair {
                instance: base,
                witness: ResWitness {
                    r,
                    v: BigUint::zero(),
                },
                kind,
            },
            Kind::Smooth => {
                let v = rng.unit_below(&params.n);
                let instance = (&base * (BigUint::one() + &v * &params.n)) % &n_sq;
                InstancePair {
                    instance,
                    witness: ResWitness { r, v },
                    kind,
                }
            }
        }
    }

    fn di(params: &ResParams, x: &BigUint, w: &ResWitness) -> Result<Kind, InvalidWitness> {
        let n = &params.n;
        let n_sq = n * n;
        if !modulus_size_ok(n, params.profile) {
            return Err(InvalidWitness("modulus below the profile size".into()));
        }
        if !coprime(&params.g, &n_sq) || x.is_zero() || x >= &n_sq || !coprime(x, &n_sq) {
            return Err(InvalidWitness("instance outside the unit group".into()));
        }
        if w.r.is_zero() || w.r >= *n || !coprime(&w.r, n) {
            return Err(InvalidWitness(
                "witness exponent outside the unit group".into(),
            ));
        }
        let v = &w.v % n;
        let base = params.g.modpow(&w.r, &n_sq);
        if v.is_zero() {
            if *x == base {
                Ok(Kind::Projective)
            } else {
                Err(InvalidWitness("instance is not g^r".into()))
            }
        } else {
            let expected = (&base * (BigUint::one() + &v * n)) % &n_sq;
            if *x == expected {
                Ok(Kind::Smooth)
            } else {
                Err(InvalidWitness("instance is not g^r(1+vN)".into()))
            }
        }
    }

    fn kg(params: &ResParams, _x: &BigUint, rng: &mut OtRng) -> KeyPair<Self> {
        let n_sq = &params.n * &params.n;
        let hk = rng.below(&n_sq);
        let pk = params.g.modpow(&hk, &n_sq);
        KeyPair {
            hash_key: hk,
            proj_key: pk,
        }
    }

    fn hash(params: &ResParams, x: &BigUint, hk: &BigUint) -> BigUint {
        let n_sq = &params.n * &params.n;
        x.modpow(hk, &n_sq)
    }

    fn phash(params: &ResParams, _x: &BigUint, pk: &BigUint, w: &ResWitness) -> BigUint {
        let n_sq = &params.n * &params.n;
        pk.modpow(&w.r, &n_sq)
    }

    fn value_byte_len(params: &ResParams) -> usize {
        byte_len_of(&(&params.n * &params.n))
    }

    fn value_bytes(params: &ResParams, value: &BigUint) -> Vec<u8> {
        canonical_encode(value, Self::value_byte_len(params)).expect("value below modulus")
    }

    fn commit_group(
        _params: &ResParams,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<SchnorrGroup, MathError> {
        commit_group_for_profile(profile, rng)
    }

    fn validate_params(
        params: &ResParams,
        profile: Profile,
        _rng: &mut OtRng,
    ) -> Result<(), String> {
        validate_res_params(params, profile, ModulusForm::Dnr)
    }

    fn validate_instance(params: &ResParams, x: &BigUint) -> bool {
        let n_sq = &params.n * &params.n;
        !x.is_zero() && x < &n_sq && coprime(x, &n_sq)
    }

    fn validate_proj_key(params: &ResParams, pk: &BigUint) -> bool {
        let n_sq = &params.n * &params.n;
        !pk.is_zero() && pk < &n_sq && coprime(pk, &n_sq)
    }

    fn write_params(params: &ResParams, w: &mut ByteWriter) {
        w.put_uint(&params.n);
        w.put_uint(&params.g);
    }

    fn read_params(r: &mut ByteReader<'_>, profile: Profile) -> Result<ResParams, WireError> {
        read_res_params(r, profile)
    }

    fn write_instance(_params: &ResParams, x: &BigUint, w: &mut ByteWriter) {
        w.put_uint(x);
    }

    fn read_instance(params: &ResParams, r: &mut ByteReader<'_>) -> Result<BigUint, WireError> {
        let x = r.uint()?;
        if x >= &params.n * &params.n {
            return Err(WireError::Malformed("instance >= N^2".into()));
        }
        Ok(x)
    }

    fn write_witness(_params: &ResParams, wit: &ResWitness, w: &mut ByteWriter) {
        w.put_uint(&wit.r);
        w.put_uint(&wit.v);
    }

    fn read_witness(params: &ResParams, r: &mut ByteReader<'_>) -> Result<ResWitness, WireError> {
        read_res_witness(params, r)
    }

    fn write_proj_key(_params: &ResParams, pk: &BigUint, w: &mut ByteWriter) {
        w.put_uint(pk);
    }

    fn read_proj_key(params: &ResParams, r: &mut ByteReader<'_>) -> Result<BigUint, WireError> {
        let pk = r.uint()?;
        if pk >= &params.n * &params.n {
            return Err(WireError::Malformed("projective key >= N^2".into()));
        }
        Ok(pk)
    }
}

impl UniversalFamily for DnrFamily {
    const EPSILON: (u32, u32) = (1, 2);
}

impl Family for DqrFamily {
    type Params = ResParams;
    type Instance = BigUint;
    type Witness = ResWitness;
    type HashKey = BigUint;
    type ProjKey = BigUint;
    type Value = BigUint;

    const ASSUMPTION: Assumption = Assumption::Dqr;

    fn pg(profile: Profile, rng: &mut OtRng) -> Result<ResParams, MathError> {
        let m = modulus_for_profile(ModulusForm::Dqr, profile, rng)?;
        let a = rng.unit_below(&m.n);
        let g = Self::derive_generator(&m.n, &a);
        Ok(ResParams { n: m.n, g, profile })
    }

    fn is(params: &ResParams, kind: Kind, rng: &mut OtRng) -> InstancePair<Self> {
        let r = rng.below(&params.n);
        let base = params.g.modpow(&r, &params.n);
        let instance = match kind {
            Kind::Projective => base,
            Kind::Smooth => (&params.n - base) % &params.n,
        };
        InstancePair {
            instance,
            witness: ResWitness {
                r,
                v: BigUint::zero(),
            },
            kind,
        }
    }

    fn di(params: &ResParams, x: &BigUint, w: &ResWitness) -> Result<Kind, InvalidWitness> {
        let n = &params.n;
        if !modulus_size_ok(n, params.profile) {
            return Err(InvalidWitness("modulus below the profile size".into()));
        }
        if !coprime(&params.g, n) || x.is_zero() || x >= n || !coprime(x, n) {
            return Err(InvalidWitness("instance outside the unit group".into()));
        }
        if !w.v.is_zero() {
            return Err(InvalidWitness("offset component must be zero".into()));
        }
        if w.r >= *n {
            return Err(InvalidWitness("witness exponent out of range".into()));
        }
        let base = params.g.modpow(&w.r, n);
        if *x == base {
            Ok(Kind::Projective)
        } else if *x == (n - &base) % n {
            Ok(Kind::Smooth)
        } else {
            Err(InvalidWitness(
                "instance matches neither g^r nor N-g^r".into(),
            ))
        }
    }

    fn kg(params: &ResParams, _x: &BigUint, rng: &mut OtRng) -> KeyPair<Self> {
        let hk = rng.below(&params.n);
        let pk = params.g.modpow(&hk, &params.n);
        KeyPair {
            hash_key: hk,
            proj_key: pk,
        }
    }

    fn hash(params: &ResParams, x: &BigUint, hk: &BigUint) -> BigUint {
        x.modpow(hk, &params.n)
    }

    fn phash(params: &ResParams, _x: &BigUint, pk: &BigUint, w: &ResWitness) -> BigUint {
        pk.modpow(&w.r, &params.n)
    }

    fn value_byte_len(params: &ResParams) -> usize {
        byte_len_of(&params.n)
    }

    fn value_bytes(params: &ResParams, value: &BigUint) -> Vec<u8> {
        canonical_encode(value, Self::value_byte_len(params)).expect("value below modulus")
    }

    fn commit_group(
        _params: &ResParams,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<SchnorrGroup, MathError> {
        commit_group_for_profile(profile, rng)
    }

    fn validate_params(
        params: &ResParams,
        profile: Profile,
        _rng: &mut OtRng,
    ) -> Result<(), String> {
        validate_res_params(params, profile, ModulusForm::Dqr)?;
        match jacobi(&params.g, &params.n) {
            Ok(1) => Ok(()),
            _ => Err("generator must have Jacobi symbol 1".into()),
        }
    }

    fn validate_instance(params: &ResParams, x: &BigUint) -> bool {
        !x.is_zero() && x < &params.n && coprime(x, &params.n)
    }

    fn validate_proj_key(params: &ResParams, pk: &BigUint) -> bool {
        !pk.is_zero() && pk < &params.n && coprime(pk, &params.n)
    }

    fn write_params(params: &ResParams, w: &mut ByteWriter) {
        w.put_uint(&params.n);
        w.put_uint(&params.g);
    }

    fn read_params(r: &mut ByteReader<'_>, profile: Profile) -> Result<ResParams, WireError> {
        read_res_params(r, profile)
    }

    fn write_instance(_params: &ResParams, x: &BigUint, w: &mut ByteWriter) {
        w.put_uint(x);
    }

    fn read_instance(params: &ResParams, r: &mut ByteReader<'_>) -> Result<BigUint, WireError> {
        let x = r.uint()?;
        if x >= params.n {
            return Err(WireError::Malformed("instance >= N".into()));
        }
        Ok(x)
    }

    fn write_witness(_params: &ResParams, wit: &ResWitness, w: &mut ByteWriter) {
        w.put_uint(&wit.r);
        w.put_uint(&wit.v);
    }

    fn read_witness(params: &ResParams, r: &mut ByteReader<'_>) -> Result<ResWitness, WireError> {
        read_res_witness(params, r)
    }

    fn write_proj_key(_params: &ResParams, pk: &BigUint, w: &mut ByteWriter) {
        w.put_uint(pk);
    }

    fn read_proj_key(params: &ResParams, r: &mut ByteReader<'_>) -> Result<BigUint, WireError> {
        let pk = r.uint()?;
        if pk >= params.n {
            return Err(WireError::Malformed("projective key >= N".into()));
        }
        Ok(pk)
    }
}

impl UniversalFamily for DqrFamily {
    const EPSILON: (u32, u32) = (1, 2);
}

fn commit_group_for_profile(profile: Profile, rng: &mut OtRng) -> Result<SchnorrGroup, MathError> {
    match profile {
        Profile::Toy => gen_schnorr_group(5, 4, rng),
        Profile::Production => gen_schnorr_group(2048, 256, rng),
    }
}

fn validate_res_params(
    params: &ResParams,
    profile: Profile,
    form: ModulusForm,
) -> Result<(), String> {
    if params.profile != profile {
        return Err("parameter profile mismatch".into());
    }
    match profile {
        Profile::Toy => {
            let expect = match form {
                ModulusForm::Dnr => 15u32,
                ModulusForm::Dqr => 77u32,
            };
            if params.n != BigUint::from(expect) {
                return Err(format!("toy modulus must be {expect}"));
            }
        }
        Profile::Production => {
            if !modulus_size_ok(&params.n, profile) {
                return Err("modulus below the production size".into());
            }
            if params.n.is_even() {
                return Err("modulus must be odd".into());
            }
        }
    }
    let modulus = match form {
        ModulusForm::Dnr => &params.n * &params.n,
        ModulusForm::Dqr => params.n.clone(),
    };
    if params.g.is_zero() || params.g >= modulus || !coprime(&params.g, &modulus) {
        return Err("generator outside the unit group".into());
    }
    Ok(())
}

fn read_res_params(r: &mut ByteReader<'_>, profile: Profile) -> Result<ResParams, WireError> {
    let n = r.uint()?;
    let g = r.uint()?;
    if n < BigUint::from(3u32) {
        return Err(WireError::Malformed("modulus too small".into()));
    }
    if g >= &n * &n {
        return Err(WireError::Malformed("generator out of range".into()));
    }
    Ok(ResParams { n, g, profile })
}

fn read_res_witness(params: &ResParams, r: &mut ByteReader<'_>) -> Result<ResWitness, WireError> {
    let rr = r.uint()?;
    let v = r.uint()?;
    if rr >= params.n || v >= params.n {
        return Err(WireError::Malformed("witness component >= N".into()));
    }
    Ok(ResWitness { r: rr, v })
}
