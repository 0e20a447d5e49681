use std::collections::BTreeSet;

use crate::commit::{chunk_count, commit_coin_binding, verify_coin_hiding, CoinOpening, CommitKey};
use crate::math::OtRng;
use crate::protocol::pad::{derive_pad, xor_bytes, PadContext};
use crate::sph::{Family, InstancePair, Kind, Sphdhc};

use super::gamma::{gamma_sample, Permutation};
use super::{
    session_id, Abort, FlowF1, FlowF2, FlowF3, FlowF4, ProtocolConfig, SetupError, WitnessOpening,
};

/// Receiver state machine. Each step consumes the previous state, so flows
/// can only be processed in protocol order.
pub struct Receiver;

/// State after emitting F1, waiting for the sender's commitment and opening.
pub struct ReceiverAwaitingCoins<F: Family> {
    cfg: ProtocolConfig,
    selection: Vec<usize>,
    family: Sphdhc<F>,
    commit_key: CommitKey,
    nonce: [u8; 16],
    vectors: Vec<Vec<InstancePair<F>>>,
    coin: Vec<bool>,
    coin_opening: CoinOpening,
    coin_commitment: Vec<(num_bigint::BigUint, num_bigint::BigUint)>,
}

/// State after emitting F4 (and the empty F5), waiting for the ciphertexts.
pub struct ReceiverAwaitingCipher<F: Family> {
    cfg: ProtocolConfig,
    selection: Vec<usize>,
    family: Sphdhc<F>,
    session: [u8; 32],
    /// Unchosen vectors after the second reordering, by vector index.
    unchosen: Vec<(usize, Vec<InstancePair<F>>)>,
}

impl Receiver {
    /// Step R1 plus the coin commitment: generates parameters, samples and
    /// shuffles K instance vectors and commits to a fresh coin string.
    ///
    /// `selection` holds the 0-based indices of the h messages to receive.
    pub fn start<F: Family>(
        cfg: &ProtocolConfig,
        selection: &BTreeSet<usize>,
        rng: &mut OtRng,
    ) -> Result<(ReceiverAwaitingCoins<F>, FlowF1<F>), SetupError> {
        cfg.validate()?;
        validate_selection(cfg, selection)?;
        let params = F::pg(cfg.profile, rng)?;
        let family = Sphdhc::<F>::new(params, cfg.n, cfg.h)?;
        Self::start_with_family(cfg, selection, family, rng)
    }

    /// As [`start`], with the composite family (and so the instance
    /// vectors' sampling) supplied by the caller. The adversary module uses
    /// this to substitute dishonest vectors.
    pub(crate) fn start_with_family<F: Family>(
        cfg: &ProtocolConfig,
        selection: &BTreeSet<usize>,
        family: Sphdhc<F>,
        rng: &mut OtRng,
    ) -> Result<(ReceiverAwaitingCoins<F>, FlowF1<F>), SetupError> {
        let vectors: Vec<Vec<InstancePair<F>>> = (0..cfg.k_cut)
            .map(|_| {
                let v = family.sample_vector(rng);
                Permutation::random(cfg.n, rng).apply(&v)
            })
            .collect();
        Self::assemble_f1(cfg, selection, family, vectors, None, rng)
    }

    /// Lowest-level constructor: explicit vectors and optionally a scripted
    /// coin. Used by the adversary module.
    pub(crate) fn assemble_f1<F: Family>(
        cfg: &ProtocolConfig,
        selection: &BTreeSet<usize>,
        family: Sphdhc<F>,
        vectors: Vec<Vec<InstancePair<F>>>,
        scripted_coin: Option<Vec<bool>>,
        rng: &mut OtRng,
    ) -> Result<(ReceiverAwaitingCoins<F>, FlowF1<F>), SetupError> {
        cfg.validate()?;
        validate_selection(cfg, selection)?;
        let commit_group = F::commit_group(&family.params, cfg.profile, rng)?;
        let commit_key = CommitKey::derive(commit_group.clone());
        let coin = scripted_coin.unwrap_or_else(|| rng.coin_string(cfg.k_cut));
        assert_eq!(coin.len(), cfg.k_cut);
        let (coin_commitment, coin_opening) = commit_coin_binding(&commit_key, &coin, rng);
        let nonce = rng.bytes16();
        let f1 = FlowF1 {
            nonce,
            params: family.params.clone(),
            commit_group,
            vectors: vectors
                .iter()
                .map(|v| v.iter().map(|p| p.instance.clone()).collect())
                .collect(),
            coin_commitment: coin_commitment.clone(),
        };
        Ok((
            ReceiverAwaitingCoins {
                cfg: *cfg,
                selection: selection.iter().copied().collect(),
                family,
                commit_key,
                nonce,
                vectors,
                coin,
                coin_opening,
                coin_commitment,
            },
            f1,
        ))
    }
}

fn validate_selection(cfg: &ProtocolConfig, selection: &BTreeSet<usize>) -> Result<(), SetupError> {
    if selection.len() != cfg.h {
        return Err(SetupError::Parameter(format!(
            "selection must contain exactly h = {} indices",
            cfg.h
        )));
    }
    if selection.iter().any(|&i| i >= cfg.n) {
        return Err(SetupError::Parameter("selection index out of range".into()));
    }
    Ok(())
}

impl<F: Family> ReceiverAwaitingCoins<F> {
    /// Steps R3 and R4: verify the sender's coin opening, derive the chosen
    /// set, open the smooth entries of every chosen vector and sample the
    /// reorderings for the unchosen ones.
    pub fn on_coins(
        self,
        f2: &FlowF2,
        f3: &FlowF3,
        rng: &mut OtRng,
    ) -> Result<(ReceiverAwaitingCipher<F>, FlowF4<F>), Abort> {
        let k = self.cfg.k_cut;
        let expected_chunks = chunk_count(&self.commit_key, k);
        if f2.coin_commitment.len() != expected_chunks {
            return Err(Abort::receiver("coin commitment has wrong chunk count"));
        }
        if f2
            .coin_commitment
            .iter()
            .any(|c| !self.commit_key.group.contains(c))
        {
            return Err(Abort::receiver("coin commitment element outside subgroup"));
        }
        let sender_coin = verify_coin_hiding(&self.commit_key, &f2.coin_commitment, &f3.opening, k)
            .ok_or_else(|| Abort::receiver("sender coin opening failed verification"))?;
        let joint: Vec<bool> = self
            .coin
            .iter()
            .zip(&sender_coin)
            .map(|(a, b)| a ^ b)
            .collect();
        let chosen: BTreeSet<usize> = (0..k).filter(|&i| joint[i]).collect();

        let mut openings = Vec::new();
        let mut perms = Vec::new();
        let mut unchosen = Vec::new();
        let selection: BTreeSet<usize> = self.selection.iter().copied().collect();
        for (i, vector) in self.vectors.iter().enumerate() {
            if chosen.contains(&i) {
                for (j, pair) in vector.iter().enumerate() {
                    if pair.kind == Kind::Smooth {
                        openings.push(WitnessOpening {
                            vector: i,
                            position: j,
                            witness: pair.witness.clone(),
                        });
                    }
                }
            } else {
                let projective: BTreeSet<usize> = vector
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.kind == Kind::Projective)
                    .map(|(j, _)| j)
                    .collect();
                let pi = gamma_sample(&projective, &selection, self.cfg.n, rng)
                    .map_err(|e| Abort::receiver(format!("reordering failed: {e}")))?;
                unchosen.push((i, pi.apply(vector)));
                perms.push((i, pi));
            }
        }

        let f4 = FlowF4 {
            opening: self.coin_opening,
            openings,
            perms,
        };
        Ok((
            ReceiverAwaitingCipher {
                cfg: self.cfg,
                selection: self.selection,
                family: self.family,
                session: session_id(&self.nonce, &f2.nonce),
                unchosen,
            },
            f4,
        ))
    }

    /// The receiver's own binding commitment, for tests.
    pub fn coin_commitment(&self) -> &[(num_bigint::BigUint, num_bigint::BigUint)] {
        &self.coin_commitment
    }
}

impl<F: Family> ReceiverAwaitingCipher<F> {
    /// Step R5: validate the ciphertext and key matrix shapes, then strip
    /// the pads of the selected positions.
    pub fn on_f6(self, f6: &super::FlowF6<F>) -> Result<Vec<Vec<u8>>, Abort> {
        let n = self.cfg.n;
        if f6.ciphertexts.len() != n {
            return Err(Abort::receiver("ciphertext vector has wrong arity"));
        }
        if f6.ciphertexts.iter().any(|c| c.len() != self.cfg.msg_len) {
            return Err(Abort::receiver("ciphertext length mismatch"));
        }
        let expected: Vec<usize> = self.unchosen.iter().map(|(i, _)| *i).collect();
        let got: Vec<usize> = f6.proj_keys.iter().map(|(i, _)| *i).collect();
        if expected != got {
            return Err(Abort::receiver(
                "projective key matrix does not cover the unchosen set",
            ));
        }
        for (_, row) in &f6.proj_keys {
            if row.len() != n {
                return Err(Abort::receiver("projective key row has wrong arity"));
            }
            if row
                .iter()
                .any(|pk| !F::validate_proj_key(&self.family.params, pk))
            {
                return Err(Abort::receiver("projective key failed validation"));
            }
        }

        let mut out = Vec::with_capacity(self.selection.len());
        for &j in &self.selection {
            let mut message = f6.ciphertexts[j].clone();
            for ((i, reordered), (_, pks)) in self.unchosen.iter().zip(&f6.proj_keys) {
                let pair = &reordered[j];
                debug_assert_eq!(pair.kind, Kind::Projective);
                let beta = F::phash(&self.family.params, &pair.instance, &pks[j], &pair.witness);
                let pad = derive_pad(
                    &F::value_bytes(&self.family.params, &beta),
                    self.cfg.msg_len,
                    &PadContext {
                        session_id: self.session,
                        vector: *i as u32,
                        position: j as u32,
                    },
                );
                xor_bytes(&mut message, &pad);
            }
            out.push(message);
        }
        Ok(out)
    }

    /// Positions of the second reordering's projective entries, for the
    /// encoding-soundness checks in tests.
    pub fn unchosen_projective_positions(&self) -> Vec<(usize, BTreeSet<usize>)> {
        self.unchosen
            .iter()
            .map(|(i, v)| {
                (
                    *i,
                    v.iter()
                        .enumerate()
                        .filter(|(_, p)| p.kind == Kind::Projective)
                        .map(|(j, _)| j)
                        .collect(),
                )
            })
            .collect()
    }
}
