//! Smooth projective family under the decisional Diffie-Hellman assumption.
//!
//! Instances are triples `(g^a, g^b, g^c)` over a prime-order Schnorr group;
//! the projective ones have `c = a*b`. Smoothness here is exact (the key map
//! `(u, v) -> (pk, hk)` is a bijection on smooth instances), so the family
//! is used directly, without amplification.

use num_bigint::BigUint;
use num_traits::One;

use crate::math::{
    byte_len_of, canonical_encode, gen_schnorr_group, MathError, OtRng, SchnorrGroup,
};
use crate::sph::{Assumption, Family, InstancePair, InvalidWitness, KeyPair, Kind, Profile};
use crate::wire::{ByteReader, ByteWriter, WireError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhParams {
    pub group: SchnorrGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhInstance {
    pub alpha: BigUint,
    pub beta: BigUint,
    pub gamma: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhWitness {
    pub a: BigUint,
    pub b: BigUint,
}

pub struct DdhFamily;

/// Bit sizes (p, q) per profile.
fn profile_bits(profile: Profile) -> (u64, u64) {
    match profile {
        Profile::Toy => (5, 4),
        Profile::Production => (2048, 256),
    }
}

impl Family for DdhFamily {
    type Params = DdhParams;
    type Instance = DdhInstance;
    type Witness = DdhWitness;
    type HashKey = BigUint;
    type ProjKey = BigUint;
    type Value = BigUint;

    const ASSUMPTION: Assumption = Assumption::Ddh;

    fn pg(profile: Profile, rng: &mut OtRng) -> Result<DdhParams, MathError> {
        let (bits_p, bits_q) = profile_bits(profile);
        Ok(DdhParams {
            group: gen_schnorr_group(bits_p, bits_q, rng)?,
        })
    }

    fn is(params: &DdhParams, kind: Kind, rng: &mut OtRng) -> InstancePair<Self> {
        let g = &params.group;
        let a = g.random_exponent(rng);
        let b = g.random_exponent(rng);
        let ab = (&a * &b) % &g.q;
        let c = match kind {
            Kind::Projective => ab,
            Kind::Smooth => {
                // Reject c = a*b so sampled kinds are definite.
                loop {
                    let c = g.random_exponent(rng);
                    if c != ab {
                        break c;
                    }
                }
            }
        };
        InstancePair {
            instance: DdhInstance {
                alpha: g.pow(&g.g, &a),
                beta: g.pow(&g.g, &b),
                gamma: g.pow(&g.g, &c),
            },
            witness: DdhWitness { a, b },
            kind,
        }
    }

    fn di(params: &DdhParams, x: &DdhInstance, w: &DdhWitness) -> Result<Kind, InvalidWitness> {
        let g = &params.group;
        if g.pow(&g.g, &w.a) != x.alpha || g.pow(&g.g, &w.b) != x.beta {
            return Err(InvalidWitness(
                "witness does not explain the first two components".into(),
            ));
        }
        let ab = (&w.a * &w.b) % &g.q;
        if g.pow(&g.g, &ab) == x.gamma {
            Ok(Kind::Projective)
        } else {
            Ok(Kind::Smooth)
        }
    }

    fn kg(params: &DdhParams, x: &DdhInstance, rng: &mut OtRng) -> KeyPair<Self> {
        let g = &params.group;
        let u = g.random_exponent(rng);
        let v = g.random_exponent(rng);
        let pk = g.mul(&g.pow(&x.alpha, &u), &g.pow(&g.g, &v));
        let hk = g.mul(&g.pow(&x.gamma, &u), &g.pow(&x.beta, &v));
        KeyPair {
            hash_key: hk,
            proj_key: pk,
        }
    }

    fn hash(_params: &DdhParams, _x: &DdhInstance, hk: &BigUint) -> BigUint {
        hk.clone()
    }

    fn phash(params: &DdhParams, _x: &DdhInstance, pk: &BigUint, w: &DdhWitness) -> BigUint {
        params.group.pow(pk, &w.b)
    }

    fn value_byte_len(params: &DdhParams) -> usize {
        byte_len_of(&params.group.p)
    }

    fn value_bytes(params: &DdhParams, value: &BigUint) -> Vec<u8> {
        canonical_encode(value, Self::value_byte_len(params)).expect("value below modulus")
    }

    fn commit_group(
        params: &DdhParams,
        _profile: Profile,
        _rng: &mut OtRng,
    ) -> Result<SchnorrGroup, MathError> {
        Ok(params.group.clone())
    }

    fn validate_params(
        params: &DdhParams,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<(), String> {
        let (bits_p, bits_q) = profile_bits(profile);
        if params.group.p.bits() != bits_p || params.group.q.bits() != bits_q {
            return Err(format!("group size does not match the {profile} profile"));
        }
        params.group.check(rng).map_err(|e| e.to_string())
    }

    fn validate_instance(params: &DdhParams, x: &DdhInstance) -> bool {
        let g = &params.group;
        g.contains(&x.alpha) && g.contains(&x.beta) && g.contains(&x.gamma)
    }

    fn validate_proj_key(params: &DdhParams, pk: &BigUint) -> bool {
        params.group.contains(pk)
    }

    fn write_params(params: &DdhParams, w: &mut ByteWriter) {
        w.put_uint(&params.group.p);
        w.put_uint(&params.group.q);
        w.put_uint(&params.group.g);
    }

    fn read_params(r: &mut ByteReader<'_>, _profile: Profile) -> Result<DdhParams, WireError> {
        let p = r.uint()?;
        let q = r.uint()?;
        let g = r.uint()?;
        if p < BigUint::from(3u32) || q < BigUint::from(2u32) || g <= BigUint::one() || g >= p {
            return Err(WireError::Malformed("ddh group out of range".into()));
        }
        Ok(DdhParams {
            group: SchnorrGroup { p, q, g },
        })
    }

    fn write_instance(_params: &DdhParams, x: &DdhInstance, w: &mut ByteWriter) {
        w.put_uint(&x.alpha);
        w.put_uint(&x.beta);
        w.put_uint(&x.gamma);
    }

    fn read_instance(params: &DdhParams, r: &mut ByteReader<'_>) -> Result<DdhInstance, WireError> {
        let alpha = r.uint()?;
        let beta = r.uint()?;
        let gamma = r.uint()?;
        for e in [&alpha, &beta, &gamma] {
            if *e >= params.group.p {
                return Err(WireError::Malformed("instance element >= p".into()));
            }
        }
        Ok(DdhInstance { alpha, beta, gamma })
    }

    fn write_witness(_params: &DdhParams, wit: &DdhWitness, w: &mut ByteWriter) {
        w.put_uint(&wit.a);
        w.put_uint(&wit.b);
    }

    fn read_witness(params: &DdhParams, r: &mut ByteReader<'_>) -> Result<DdhWitness, WireError> {
        let a = r.uint()?;
        let b = r.uint()?;
        if a >= params.group.q || b >= params.group.q {
            return Err(WireError::Malformed("witness exponent >= q".into()));
        }
        Ok(DdhWitness { a, b })
    }

    fn write_proj_key(_params: &DdhParams, pk: &BigUint, w: &mut ByteWriter) {
        w.put_uint(pk);
    }

    fn read_proj_key(params: &DdhParams, r: &mut ByteReader<'_>) -> Result<BigUint, WireError> {
        let pk = r.uint()?;
        if pk >= params.group.p {
            return Err(WireError::Malformed("projective key >= p".into()));
        }
        Ok(pk)
    }
}
