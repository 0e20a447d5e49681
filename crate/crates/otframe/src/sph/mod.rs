//! Hash-family abstraction: the base smooth projective family interface, the
//! pairwise-independent extractor, the universal-to-smooth amplifier and the
//! composite family that samples whole instance vectors and supports
//! feasible cheating.

mod amplify;
mod composite;
mod extractor;

pub use amplify::{profile_amplifier_dims, repetition_count, AmpParams, AmpProjKey, Amplified};
pub use composite::Sphdhc;
pub use extractor::{lhl_extract, ExtractorSeed};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::math::{MathError, OtRng, SchnorrGroup};
use crate::wire::{ByteReader, ByteWriter, WireError};

/// Parameter sizing profile shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Tiny groups and moduli so that exhaustive checks are possible.
    Toy,
    /// 2048-bit moduli with 256-bit subgroup orders.
    Production,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "toy" => Ok(Profile::Toy),
            "production" => Ok(Profile::Production),
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Toy => "toy",
            Profile::Production => "production",
        })
    }
}

/// Intractability assumption behind a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    Ddh,
    Dnr,
    Dqr,
}

impl FromStr for Assumption {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ddh" => Ok(Assumption::Ddh),
            "dnr" => Ok(Assumption::Dnr),
            "dqr" => Ok(Assumption::Dqr),
            other => Err(format!("unknown assumption {other:?}")),
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::Ddh => "ddh",
            Assumption::Dnr => "dnr",
            Assumption::Dqr => "dqr",
        })
    }
}

/// Whether an instance carries a hash value reachable through its witness
/// (projective) or statistically hidden from the projective key (smooth).
/// The distinguisher encodes projective as 0 and smooth as 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Projective,
    Smooth,
}

impl Kind {
    pub fn bit(self) -> u8 {
        match self {
            Kind::Projective => 0,
            Kind::Smooth => 1,
        }
    }
}

/// The distinguisher's error: the witness does not place the instance in
/// either relation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid witness: {0}")]
pub struct InvalidWitness(pub String);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SphError {
    #[error("parameter error: {0}")]
    Parameter(String),
}

/// An instance together with its witness and kind.
pub struct InstancePair<F: Family + ?Sized> {
    pub instance: F::Instance,
    pub witness: F::Witness,
    pub kind: Kind,
}

impl<F: Family + ?Sized> Clone for InstancePair<F> {
    fn clone(&self) -> Self {
        InstancePair {
            instance: self.instance.clone(),
            witness: self.witness.clone(),
            kind: self.kind,
        }
    }
}

impl<F: Family + ?Sized> fmt::Debug for InstancePair<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InstancePair")
            .field("instance", &self.instance)
            .field("witness", &self.witness)
            .field("kind", &self.kind)
            .finish()
    }
}

/// Secret hash key plus the public projective key for one instance.
pub struct KeyPair<F: Family + ?Sized> {
    pub hash_key: F::HashKey,
    pub proj_key: F::ProjKey,
}

impl<F: Family + ?Sized> Clone for KeyPair<F> {
    fn clone(&self) -> Self {
        KeyPair {
            hash_key: self.hash_key.clone(),
            proj_key: self.proj_key.clone(),
        }
    }
}

/// A smooth projective hash family with distinguishability and hard subset
/// membership: parameter generation, mode-selected instance sampling, the
/// witness-based distinguisher, per-instance key generation and the two hash
/// evaluation routes.
///
/// Every randomized operation takes an explicit [`OtRng`] and is otherwise
/// pure; parameter values are immutable and freely shareable.
pub trait Family {
    type Params: Clone + fmt::Debug;
    type Instance: Clone + PartialEq + fmt::Debug;
    type Witness: Clone + fmt::Debug;
    type HashKey: Clone + fmt::Debug;
    type ProjKey: Clone + PartialEq + fmt::Debug;
    type Value: Clone + Eq + std::hash::Hash + fmt::Debug;

    const ASSUMPTION: Assumption;

    fn pg(profile: Profile, rng: &mut OtRng) -> Result<Self::Params, MathError>;
    fn is(params: &Self::Params, kind: Kind, rng: &mut OtRng) -> InstancePair<Self>;
    fn di(
        params: &Self::Params,
        instance: &Self::Instance,
        witness: &Self::Witness,
    ) -> Result<Kind, InvalidWitness>;
    fn kg(params: &Self::Params, instance: &Self::Instance, rng: &mut OtRng) -> KeyPair<Self>;
    fn hash(params: &Self::Params, instance: &Self::Instance, hk: &Self::HashKey) -> Self::Value;
    fn phash(
        params: &Self::Params,
        instance: &Self::Instance,
        pk: &Self::ProjKey,
        witness: &Self::Witness,
    ) -> Self::Value;

    /// Length of the canonical encoding of any hash value under `params`.
    fn value_byte_len(params: &Self::Params) -> usize;
    /// Canonical fixed-length encoding of a hash value.
    fn value_bytes(params: &Self::Params, value: &Self::Value) -> Vec<u8>;

    /// Group backing the coin-toss commitments for sessions under `params`.
    fn commit_group(
        params: &Self::Params,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<SchnorrGroup, MathError>;

    /// Full semantic validation of received parameters, including the
    /// profile's size requirements.
    fn validate_params(
        params: &Self::Params,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<(), String>;
    /// Membership validation for instances received from the peer.
    fn validate_instance(params: &Self::Params, instance: &Self::Instance) -> bool;
    /// Structural validation for projective keys received from the peer.
    fn validate_proj_key(params: &Self::Params, pk: &Self::ProjKey) -> bool;

    fn write_params(params: &Self::Params, w: &mut ByteWriter);
    fn read_params(r: &mut ByteReader<'_>, profile: Profile) -> Result<Self::Params, WireError>;
    fn write_instance(params: &Self::Params, instance: &Self::Instance, w: &mut ByteWriter);
    fn read_instance(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::Instance, WireError>;
    fn write_witness(params: &Self::Params, witness: &Self::Witness, w: &mut ByteWriter);
    fn read_witness(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::Witness, WireError>;
    fn write_proj_key(params: &Self::Params, pk: &Self::ProjKey, w: &mut ByteWriter);
    fn read_proj_key(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::ProjKey, WireError>;
}

/// A family whose smooth instances only bound the guessing probability by
/// `EPSILON` instead of making the hash value statistically uniform. Such a
/// family is promoted to a smooth one by [`Amplified`].
pub trait UniversalFamily: Family {
    /// Registered guessing-probability bound as (numerator, denominator).
    const EPSILON: (u32, u32);
}
