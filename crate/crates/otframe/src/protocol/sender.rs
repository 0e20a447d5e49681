use std::collections::{BTreeMap, BTreeSet};

use crate::commit::{chunk_count, commit_coin_hiding, verify_coin_binding, CommitKey};
use crate::math::OtRng;
use crate::protocol::pad::{derive_pad, xor_bytes, PadContext};
use crate::sph::{Family, Kind};

use super::{
    session_id, Abort, FlowF1, FlowF2, FlowF3, FlowF4, FlowF6, ProtocolConfig, SetupError,
};

/// Sender state machine, constructed with the messages to transfer.
pub struct Sender {
    cfg: ProtocolConfig,
    messages: Vec<Vec<u8>>,
}

/// State after emitting F2 and F3, waiting for the receiver's openings.
pub struct SenderAwaitingOpen<F: Family> {
    cfg: ProtocolConfig,
    messages: Vec<Vec<u8>>,
    params: F::Params,
    commit_key: CommitKey,
    session: [u8; 32],
    vectors: Vec<Vec<F::Instance>>,
    receiver_commitment: Vec<(num_bigint::BigUint, num_bigint::BigUint)>,
    coin: Vec<bool>,
}

impl Sender {
    pub fn new(cfg: &ProtocolConfig, messages: Vec<Vec<u8>>) -> Result<Self, SetupError> {
        cfg.validate()?;
        if messages.len() != cfg.n {
            return Err(SetupError::Parameter(format!(
                "expected {} messages, got {}",
                cfg.n,
                messages.len()
            )));
        }
        if messages.iter().any(|m| m.len() != cfg.msg_len) {
            return Err(SetupError::Parameter(
                "all messages must have the configured length".into(),
            ));
        }
        Ok(Sender {
            cfg: *cfg,
            messages,
        })
    }

    /// Step S1: validate everything the receiver sent, then commit to a
    /// fresh coin string and immediately open it (the receiver is already
    /// bound by its own commitment from F1).
    pub fn on_f1<F: Family>(
        self,
        f1: FlowF1<F>,
        rng: &mut OtRng,
    ) -> Result<(SenderAwaitingOpen<F>, FlowF2, FlowF3), Abort> {
        self.on_f1_with_coin(f1, None, rng)
    }

    /// As [`on_f1`], with an optionally scripted coin. Experiments use the
    /// scripted form; the honest path draws the coin from the generator.
    pub(crate) fn on_f1_with_coin<F: Family>(
        self,
        f1: FlowF1<F>,
        scripted_coin: Option<Vec<bool>>,
        rng: &mut OtRng,
    ) -> Result<(SenderAwaitingOpen<F>, FlowF2, FlowF3), Abort> {
        let cfg = &self.cfg;
        F::validate_params(&f1.params, cfg.profile, rng)
            .map_err(|e| Abort::sender(format!("family parameters rejected: {e}")))?;
        f1.commit_group
            .check(rng)
            .map_err(|e| Abort::sender(format!("commitment group rejected: {e}")))?;
        if f1.vectors.len() != cfg.k_cut {
            return Err(Abort::sender("wrong number of instance vectors"));
        }
        for vector in &f1.vectors {
            if vector.len() != cfg.n {
                return Err(Abort::sender("instance vector has wrong arity"));
            }
            for instance in vector {
                if !F::validate_instance(&f1.params, instance) {
                    return Err(Abort::sender("instance failed validation"));
                }
            }
        }
        let commit_key = CommitKey::derive(f1.commit_group.clone());
        if f1.coin_commitment.len() != chunk_count(&commit_key, cfg.k_cut) {
            return Err(Abort::sender("coin commitment has wrong chunk count"));
        }
        for (c1, c2) in &f1.coin_commitment {
            if !commit_key.group.contains(c1) || !commit_key.group.contains(c2) {
                return Err(Abort::sender("coin commitment element outside subgroup"));
            }
        }

        let coin = scripted_coin.unwrap_or_else(|| rng.coin_string(cfg.k_cut));
        assert_eq!(coin.len(), cfg.k_cut);
        let (commitment, opening) = commit_coin_hiding(&commit_key, &coin, rng);
        let nonce = rng.bytes16();
        Ok((
            SenderAwaitingOpen {
                cfg: self.cfg,
                messages: self.messages,
                params: f1.params,
                commit_key,
                session: session_id(&f1.nonce, &nonce),
                vectors: f1.vectors,
                receiver_commitment: f1.coin_commitment,
                coin,
            },
            FlowF2 {
                nonce,
                coin_commitment: commitment,
            },
            FlowF3 { opening },
        ))
    }
}

impl<F: Family> SenderAwaitingOpen<F> {
    /// Step S3: verify the receiver's coin opening, run the cut-and-choose
    /// checks on every chosen vector, then reorder the unchosen ones and
    /// encrypt.
    pub fn on_f4(self, f4: &FlowF4<F>, rng: &mut OtRng) -> Result<FlowF6<F>, Abort> {
        let cfg = &self.cfg;
        let k = cfg.k_cut;
        let receiver_coin =
            verify_coin_binding(&self.commit_key, &self.receiver_commitment, &f4.opening, k)
                .ok_or_else(|| Abort::sender("receiver coin opening failed verification"))?;
        let joint: Vec<bool> = self
            .coin
            .iter()
            .zip(&receiver_coin)
            .map(|(a, b)| a ^ b)
            .collect();
        let chosen: BTreeSet<usize> = (0..k).filter(|&i| joint[i]).collect();

        // Group the openings, rejecting references to unchosen vectors,
        // out-of-range positions and duplicates.
        let mut by_vector: BTreeMap<usize, Vec<(usize, &F::Witness)>> = BTreeMap::new();
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for opening in &f4.openings {
            if opening.vector >= k || !chosen.contains(&opening.vector) {
                return Err(Abort::sender("opening references an unchosen vector"));
            }
            if opening.position >= cfg.n {
                return Err(Abort::sender("opening position out of range"));
            }
            if !seen.insert((opening.vector, opening.position)) {
                return Err(Abort::sender("duplicate opening"));
            }
            by_vector
                .entry(opening.vector)
                .or_default()
                .push((opening.position, &opening.witness));
        }
        // Every chosen vector must expose at least t = n - h smooth entries.
        for &i in &chosen {
            let opened = by_vector.get(&i).map(Vec::len).unwrap_or(0);
            if opened < cfg.t() {
                return Err(Abort::sender(format!(
                    "vector {i} opened only {opened} smooth entries"
                )));
            }
            for (j, witness) in by_vector.get(&i).into_iter().flatten() {
                match F::di(&self.params, &self.vectors[i][*j], witness) {
                    Ok(Kind::Smooth) => {}
                    Ok(Kind::Projective) => {
                        return Err(Abort::sender(format!(
                            "vector {i} position {j} opened as smooth but is projective"
                        )));
                    }
                    Err(e) => {
                        return Err(Abort::sender(format!(
                            "vector {i} position {j} witness rejected: {e}"
                        )));
                    }
                }
            }
        }

        // Exactly one reordering per unchosen vector, in ascending order.
        let unchosen: Vec<usize> = (0..k).filter(|i| !chosen.contains(i)).collect();
        let perm_indices: Vec<usize> = f4.perms.iter().map(|(i, _)| *i).collect();
        if perm_indices != unchosen {
            return Err(Abort::sender(
                "reorderings do not cover exactly the unchosen vectors",
            ));
        }
        if f4.perms.iter().any(|(_, p)| p.n() != cfg.n) {
            return Err(Abort::sender("reordering has wrong arity"));
        }

        // Encrypt: every position of every unchosen vector contributes an
        // independent hash pad.
        let mut ciphertexts = self.messages.clone();
        let mut proj_keys = Vec::with_capacity(f4.perms.len());
        for (i, pi) in &f4.perms {
            let reordered = pi.apply(&self.vectors[*i]);
            let mut row = Vec::with_capacity(cfg.n);
            for (j, instance) in reordered.iter().enumerate() {
                let keys = F::kg(&self.params, instance, rng);
                let beta = F::hash(&self.params, instance, &keys.hash_key);
                let pad = derive_pad(
                    &F::value_bytes(&self.params, &beta),
                    cfg.msg_len,
                    &PadContext {
                        session_id: self.session,
                        vector: *i as u32,
                        position: j as u32,
                    },
                );
                xor_bytes(&mut ciphertexts[j], &pad);
                row.push(keys.proj_key);
            }
            proj_keys.push((*i, row));
        }
        Ok(FlowF6 {
            ciphertexts,
            proj_keys,
        })
    }

    /// The joint coin as the sender sees it after F4, for tests.
    pub fn coin(&self) -> &[bool] {
        &self.coin
    }
}
