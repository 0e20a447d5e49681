//! Perfectly hiding (Pedersen) and perfectly binding (ElGamal-style)
//! commitments over a Schnorr group, plus chunked commitments to coin
//! strings.
//!
//! The second generator `h` is derived by hashing a fixed public seed into
//! the subgroup, so no party holds a discrete-log trapdoor for it.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::math::{hash_to_subgroup, OtRng, SchnorrGroup};

/// Public seed behind the second generator.
const H_SEED: &[u8] = b"otframe/commit/h/v1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommitError {
    #[error("parameter error: {0}")]
    Parameter(String),
}

/// Commitment key: the group plus the trapdoor-free second generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitKey {
    pub group: SchnorrGroup,
    pub h: BigUint,
}

impl CommitKey {
    pub fn derive(group: SchnorrGroup) -> CommitKey {
        let h = hash_to_subgroup(&group, H_SEED);
        CommitKey { group, h }
    }
}

/// Opening of a single commitment: the committed value and the blinding
/// randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decommitment {
    pub value: BigUint,
    pub randomness: BigUint,
}

fn check_range(ck: &CommitKey, m: &BigUint, r: &BigUint) -> Result<(), CommitError> {
    if m >= &ck.group.q || r >= &ck.group.q {
        return Err(CommitError::Parameter(
            "commit: value and randomness must be below q".into(),
        ));
    }
    Ok(())
}

/// `C = g^m * h^r`. Perfectly hiding, computationally binding.
pub fn pedersen_commit(ck: &CommitKey, m: &BigUint, r: &BigUint) -> Result<BigUint, CommitError> {
    check_range(ck, m, r)?;
    let g = &ck.group;
    Ok(g.mul(&g.pow(&g.g, m), &g.pow(&ck.h, r)))
}

pub fn pedersen_verify(ck: &CommitKey, commitment: &BigUint, d: &Decommitment) -> bool {
    match pedersen_commit(ck, &d.value, &d.randomness) {
        Ok(c) => &c == commitment,
        Err(_) => false,
    }
}

/// `C = (g^r, h^r * g^m)`. Perfectly binding, computationally hiding.
pub fn elgamal_commit(
    ck: &CommitKey,
    m: &BigUint,
    r: &BigUint,
) -> Result<(BigUint, BigUint), CommitError> {
    check_range(ck, m, r)?;
    let g = &ck.group;
    Ok((g.pow(&g.g, r), g.mul(&g.pow(&ck.h, r), &g.pow(&g.g, m))))
}

pub fn elgamal_verify(ck: &CommitKey, commitment: &(BigUint, BigUint), d: &Decommitment) -> bool {
    match elgamal_commit(ck, &d.value, &d.randomness) {
        Ok(c) => &c == commitment,
        Err(_) => false,
    }
}

/// Bits per chunk when committing a bit string: floor(log2 q), so every
/// chunk value stays below q.
pub fn chunk_bits(q: &BigUint) -> usize {
    (q.bits() - 1) as usize
}

/// Number of commitments a `len`-bit coin string needs under `ck`.
pub fn chunk_count(ck: &CommitKey, len: usize) -> usize {
    let cb = chunk_bits(&ck.group.q);
    len.div_ceil(cb)
}

/// Splits a bit string into big-endian chunk values of at most
/// [`chunk_bits`] bits each.
pub fn chunk_coin_string(bits: &[bool], cb: usize) -> Vec<BigUint> {
    bits.chunks(cb)
        .map(|chunk| {
            let mut v = BigUint::zero();
            for &b in chunk {
                v <<= 1;
                if b {
                    v += 1u32;
                }
            }
            v
        })
        .collect()
}

fn unchunk_coin_string(values: &[BigUint], cb: usize, len: usize) -> Option<Vec<bool>> {
    if values.len() != len.div_ceil(cb) {
        return None;
    }
    let mut bits = Vec::with_capacity(len);
    for (idx, v) in values.iter().enumerate() {
        let width = cb.min(len - idx * cb);
        // Chunk values above their width would give a second encoding of
        // the same string; reject them.
        if v.bits() as usize > width {
            return None;
        }
        for i in (0..width).rev() {
            bits.push(v.bit(i as u64));
        }
    }
    Some(bits)
}

/// Per-chunk openings of a committed coin string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinOpening {
    pub chunks: Vec<Decommitment>,
}

/// Commits a coin string chunkwise with the hiding scheme.
pub fn commit_coin_hiding(
    ck: &CommitKey,
    bits: &[bool],
    rng: &mut OtRng,
) -> (Vec<BigUint>, CoinOpening) {
    let cb = chunk_bits(&ck.group.q);
    let mut commitments = Vec::new();
    let mut chunks = Vec::new();
    for value in chunk_coin_string(bits, cb) {
        let r = rng.below(&ck.group.q);
        commitments.push(pedersen_commit(ck, &value, &r).expect("chunk below q"));
        chunks.push(Decommitment {
            value,
            randomness: r,
        });
    }
    (commitments, CoinOpening { chunks })
}

/// Commits a coin string chunkwise with the binding scheme.
pub fn commit_coin_binding(
    ck: &CommitKey,
    bits: &[bool],
    rng: &mut OtRng,
) -> (Vec<(BigUint, BigUint)>, CoinOpening) {
    let cb = chunk_bits(&ck.group.q);
    let mut commitments = Vec::new();
    let mut chunks = Vec::new();
    for value in chunk_coin_string(bits, cb) {
        let r = rng.below(&ck.group.q);
        commitments.push(elgamal_commit(ck, &value, &r).expect("chunk below q"));
        chunks.push(Decommitment {
            value,
            randomness: r,
        });
    }
    (commitments, CoinOpening { chunks })
}

/// Verifies a chunked hiding commitment and reassembles the `len`-bit coin
/// string.
pub fn verify_coin_hiding(
    ck: &CommitKey,
    commitments: &[BigUint],
    opening: &CoinOpening,
    len: usize,
) -> Option<Vec<bool>> {
    if commitments.len() != opening.chunks.len() {
        return None;
    }
    for (c, d) in commitments.iter().zip(&opening.chunks) {
        if !pedersen_verify(ck, c, d) {
            return None;
        }
    }
    let values: Vec<BigUint> = opening.chunks.iter().map(|d| d.value.clone()).collect();
    unchunk_coin_string(&values, chunk_bits(&ck.group.q), len)
}

/// Verifies a chunked binding commitment and reassembles the `len`-bit coin
/// string.
pub fn verify_coin_binding(
    ck: &CommitKey,
    commitments: &[(BigUint, BigUint)],
    opening: &CoinOpening,
    len: usize,
) -> Option<Vec<bool>> {
    if commitments.len() != opening.chunks.len() {
        return None;
    }
    for (c, d) in commitments.iter().zip(&opening.chunks) {
        if !elgamal_verify(ck, c, d) {
            return None;
        }
    }
    let values: Vec<BigUint> = opening.chunks.iter().map(|d| d.value.clone()).collect();
    unchunk_coin_string(&values, chunk_bits(&ck.group.q), len)
}
