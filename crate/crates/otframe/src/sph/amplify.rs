use std::fmt;
use std::marker::PhantomData;

use crate::math::{Bits, MathError, OtRng, SchnorrGroup};
use crate::wire::{ByteReader, ByteWriter, WireError};

use super::extractor::{lhl_extract, ExtractorSeed};
use super::{
    Family, InstancePair, InvalidWitness, KeyPair, Kind, Profile, SphError, UniversalFamily,
};

/// Repetitions needed so that `m * log2(1/eps)` bits of residual entropy
/// cover `ell_out + 2*sigma`, which drives the extractor's distance below
/// `2^-sigma`.
pub fn repetition_count(
    epsilon: (u32, u32),
    ell_out: usize,
    sigma: usize,
) -> Result<usize, SphError> {
    let (num, den) = epsilon;
    if num == 0 || den == 0 || num >= den {
        return Err(SphError::Parameter(
            "amplifier: epsilon must satisfy 0 < epsilon < 1".into(),
        ));
    }
    if ell_out == 0 {
        return Err(SphError::Parameter(
            "amplifier: output length must be >= 1".into(),
        ));
    }
    let per_rep = (den as f64 / num as f64).log2();
    Ok(((ell_out + 2 * sigma) as f64 / per_rep).ceil() as usize)
}

/// (output bits, statistical parameter) used by each profile.
pub fn profile_amplifier_dims(profile: Profile) -> (usize, usize) {
    match profile {
        Profile::Toy => (8, 3),
        Profile::Production => (256, 40),
    }
}

/// Parameters of an amplified family: the base parameters plus the extractor
/// dimensions and the repetition count.
pub struct AmpParams<B: Family> {
    pub base: B::Params,
    pub ell_out: usize,
    pub sigma: usize,
    pub reps: usize,
}

impl<B: Family> AmpParams<B> {
    pub fn new(
        base: B::Params,
        epsilon: (u32, u32),
        ell_out: usize,
        sigma: usize,
    ) -> Result<Self, SphError> {
        let reps = repetition_count(epsilon, ell_out, sigma)?;
        Ok(AmpParams {
            base,
            ell_out,
            sigma,
            reps,
        })
    }

    pub fn for_profile(
        base: B::Params,
        epsilon: (u32, u32),
        profile: Profile,
    ) -> Result<Self, SphError> {
        let (ell_out, sigma) = profile_amplifier_dims(profile);
        Self::new(base, epsilon, ell_out, sigma)
    }

    /// Bit length of the concatenated base hash encodings fed to the
    /// extractor.
    pub fn ell_in(&self) -> usize {
        self.reps * B::value_byte_len(&self.base) * 8
    }
}

impl<B: Family> Clone for AmpParams<B> {
    fn clone(&self) -> Self {
        AmpParams {
            base: self.base.clone(),
            ell_out: self.ell_out,
            sigma: self.sigma,
            reps: self.reps,
        }
    }
}

impl<B: Family> fmt::Debug for AmpParams<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmpParams")
            .field("base", &self.base)
            .field("ell_out", &self.ell_out)
            .field("sigma", &self.sigma)
            .field("reps", &self.reps)
            .finish()
    }
}

/// Hash key of the amplified family: one base hash key per repetition plus
/// the (public) extractor seed, so that evaluation needs no other state.
pub struct AmpHashKey<B: Family> {
    pub base: Vec<B::HashKey>,
    pub seed: ExtractorSeed,
}

impl<B: Family> Clone for AmpHashKey<B> {
    fn clone(&self) -> Self {
        AmpHashKey {
            base: self.base.clone(),
            seed: self.seed.clone(),
        }
    }
}

impl<B: Family> fmt::Debug for AmpHashKey<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmpHashKey")
            .field("base", &self.base)
            .field("seed", &self.seed)
            .finish()
    }
}

/// Projective key of the amplified family: the base keys of each repetition
/// plus the extractor seed.
pub struct AmpProjKey<B: Family> {
    pub base: Vec<B::ProjKey>,
    pub seed: ExtractorSeed,
}

impl<B: Family> Clone for AmpProjKey<B> {
    fn clone(&self) -> Self {
        AmpProjKey {
            base: self.base.clone(),
            seed: self.seed.clone(),
        }
    }
}

impl<B: Family> PartialEq for AmpProjKey<B> {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.seed == other.seed
    }
}

impl<B: Family> fmt::Debug for AmpProjKey<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmpProjKey")
            .field("base", &self.base)
            .field("seed", &self.seed)
            .finish()
    }
}

/// Smooth projective family built from a universal one by hashing the same
/// instance under independent keys and extracting the concatenated values.
pub struct Amplified<B>(PhantomData<B>);

impl<B: UniversalFamily> Amplified<B> {
    fn concat_values(params: &AmpParams<B>, values: &[B::Value]) -> Bits {
        let mut bytes = Vec::with_capacity(params.ell_in() / 8);
        for v in values {
            bytes.extend_from_slice(&B::value_bytes(&params.base, v));
        }
        Bits::from_bytes(&bytes, bytes.len() * 8).expect("byte-aligned input")
    }
}

impl<B: UniversalFamily> Family for Amplified<B> {
    type Params = AmpParams<B>;
    type Instance = B::Instance;
    type Witness = B::Witness;
    type HashKey = AmpHashKey<B>;
    type ProjKey = AmpProjKey<B>;
    type Value = Bits;

    const ASSUMPTION: super::Assumption = B::ASSUMPTION;

    fn pg(profile: Profile, rng: &mut OtRng) -> Result<Self::Params, MathError> {
        let base = B::pg(profile, rng)?;
        AmpParams::for_profile(base, B::EPSILON, profile)
            .map_err(|e| MathError::Parameter(e.to_string()))
    }

    fn is(params: &Self::Params, kind: Kind, rng: &mut OtRng) -> InstancePair<Self> {
        let pair = B::is(&params.base, kind, rng);
        InstancePair {
            instance: pair.instance,
            witness: pair.witness,
            kind: pair.kind,
        }
    }

    fn di(
        params: &Self::Params,
        instance: &Self::Instance,
        witness: &Self::Witness,
    ) -> Result<Kind, InvalidWitness> {
        B::di(&params.base, instance, witness)
    }

    fn kg(params: &Self::Params, instance: &Self::Instance, rng: &mut OtRng) -> KeyPair<Self> {
        let mut hks = Vec::with_capacity(params.reps);
        let mut pks = Vec::with_capacity(params.reps);
        for _ in 0..params.reps {
            let kp = B::kg(&params.base, instance, rng);
            hks.push(kp.hash_key);
            pks.push(kp.proj_key);
        }
        let seed = ExtractorSeed::sample(params.ell_out, params.ell_in(), rng);
        KeyPair {
            hash_key: AmpHashKey {
                base: hks,
                seed: seed.clone(),
            },
            proj_key: AmpProjKey { base: pks, seed },
        }
    }

    fn hash(params: &Self::Params, instance: &Self::Instance, hk: &Self::HashKey) -> Self::Value {
        let values: Vec<B::Value> = hk
            .base
            .iter()
            .map(|bhk| B::hash(&params.base, instance, bhk))
            .collect();
        let input = Self::concat_values(params, &values);
        lhl_extract(&hk.seed, &input).expect("dimensions fixed by params")
    }

    fn phash(
        params: &Self::Params,
        instance: &Self::Instance,
        pk: &Self::ProjKey,
        witness: &Self::Witness,
    ) -> Self::Value {
        let values: Vec<B::Value> = pk
            .base
            .iter()
            .map(|bpk| B::phash(&params.base, instance, bpk, witness))
            .collect();
        let input = Self::concat_values(params, &values);
        lhl_extract(&pk.seed, &input).expect("dimensions fixed by params")
    }

    fn value_byte_len(params: &Self::Params) -> usize {
        params.ell_out.div_ceil(8)
    }

    fn value_bytes(_params: &Self::Params, value: &Self::Value) -> Vec<u8> {
        value.as_bytes().to_vec()
    }

    fn commit_group(
        params: &Self::Params,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<SchnorrGroup, MathError> {
        B::commit_group(&params.base, profile, rng)
    }

    fn validate_params(
        params: &Self::Params,
        profile: Profile,
        rng: &mut OtRng,
    ) -> Result<(), String> {
        let (ell_out, sigma) = profile_amplifier_dims(profile);
        if params.ell_out != ell_out || params.sigma != sigma {
            return Err("amplifier dimensions do not match profile".into());
        }
        B::validate_params(&params.base, profile, rng)
    }

    fn validate_instance(params: &Self::Params, instance: &Self::Instance) -> bool {
        B::validate_instance(&params.base, instance)
    }

    fn validate_proj_key(params: &Self::Params, pk: &Self::ProjKey) -> bool {
        pk.base.len() == params.reps
            && pk
                .base
                .iter()
                .all(|b| B::validate_proj_key(&params.base, b))
            && pk.seed.out_len() == params.ell_out
            && pk.seed.in_len() == params.ell_in()
    }

    fn write_params(params: &Self::Params, w: &mut ByteWriter) {
        B::write_params(&params.base, w);
    }

    fn read_params(r: &mut ByteReader<'_>, profile: Profile) -> Result<Self::Params, WireError> {
        let base = B::read_params(r, profile)?;
        AmpParams::for_profile(base, B::EPSILON, profile)
            .map_err(|e| WireError::Malformed(e.to_string()))
    }

    fn write_instance(params: &Self::Params, instance: &Self::Instance, w: &mut ByteWriter) {
        B::write_instance(&params.base, instance, w);
    }

    fn read_instance(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::Instance, WireError> {
        B::read_instance(&params.base, r)
    }

    fn write_witness(params: &Self::Params, witness: &Self::Witness, w: &mut ByteWriter) {
        B::write_witness(&params.base, witness, w);
    }

    fn read_witness(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::Witness, WireError> {
        B::read_witness(&params.base, r)
    }

    fn write_proj_key(params: &Self::Params, pk: &Self::ProjKey, w: &mut ByteWriter) {
        for bpk in &pk.base {
            B::write_proj_key(&params.base, bpk, w);
        }
        for row in pk.seed.rows() {
            w.put_raw(row.as_bytes());
        }
        w.put_raw(pk.seed.offset().as_bytes());
    }

    fn read_proj_key(
        params: &Self::Params,
        r: &mut ByteReader<'_>,
    ) -> Result<Self::ProjKey, WireError> {
        let mut base = Vec::with_capacity(params.reps);
        for _ in 0..params.reps {
            base.push(B::read_proj_key(&params.base, r)?);
        }
        let ell_in = params.ell_in();
        let row_bytes = ell_in.div_ceil(8);
        let mut rows = Vec::with_capacity(params.ell_out);
        for _ in 0..params.ell_out {
            let raw = r.take(row_bytes)?;
            rows.push(
                Bits::from_bytes(raw, ell_in)
                    .ok_or_else(|| WireError::Malformed("extractor row padding".into()))?,
            );
        }
        let off_raw = r.take(params.ell_out.div_ceil(8))?;
        let offset = Bits::from_bytes(off_raw, params.ell_out)
            .ok_or_else(|| WireError::Malformed("extractor offset padding".into()))?;
        let seed = ExtractorSeed::from_parts(rows, offset)
            .map_err(|e| WireError::Malformed(e.to_string()))?;
        Ok(AmpProjKey { base, seed })
    }
}
