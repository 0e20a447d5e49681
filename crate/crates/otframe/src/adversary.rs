//! Scripted malicious receivers and the statistical experiments around the
//! cut-and-choose check: detection of illegal vectors, the escape-rate
//! measurement and the feasible-cheating extraction.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::commit::{chunk_count, commit_coin_binding, verify_coin_hiding, CoinOpening, CommitKey};
use crate::math::OtRng;
use crate::protocol::{
    derive_pad, gamma_sample, session_id, Abort, FlowF1, FlowF2, FlowF3, FlowF4, FlowF6,
    PadContext, Permutation, ProtocolConfig, Sender, SetupError, WitnessOpening,
};
use crate::sph::{Family, InstancePair, Kind, Sphdhc};

/// How one of the K instance vectors is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorPlan {
    /// Prescribed sampling: h projective, t smooth.
    Honest,
    /// One extra projective entry smuggled in: h+1 projective, t-1 smooth.
    ExtraProjective,
    /// Every entry projective (the feasible-cheating sampler).
    AllProjective,
}

/// A receiver that follows the protocol's message schedule but controls how
/// its vectors are generated, opening only genuinely smooth entries.
pub struct AdversaryReceiver<F: Family> {
    cfg: ProtocolConfig,
    selection: Vec<usize>,
    family: Sphdhc<F>,
    commit_key: CommitKey,
    nonce: [u8; 16],
    vectors: Vec<Vec<InstancePair<F>>>,
    coin: Vec<bool>,
    coin_opening: CoinOpening,
}

/// Post-coin state: ready to decrypt whatever the reorderings made
/// reachable.
pub struct AdversaryCipher<F: Family> {
    cfg: ProtocolConfig,
    family: Sphdhc<F>,
    session: [u8; 32],
    chosen: BTreeSet<usize>,
    unchosen: Vec<(usize, Vec<InstancePair<F>>)>,
}

impl<F: Family> AdversaryReceiver<F> {
    pub fn start(
        cfg: &ProtocolConfig,
        selection: &BTreeSet<usize>,
        plans: &[VectorPlan],
        scripted_coin: Option<Vec<bool>>,
        rng: &mut OtRng,
    ) -> Result<(Self, FlowF1<F>), SetupError> {
        cfg.validate()?;
        if plans.len() != cfg.k_cut {
            return Err(SetupError::Parameter(
                "one vector plan per cut-and-choose slot required".into(),
            ));
        }
        if selection.len() != cfg.h || selection.iter().any(|&j| j >= cfg.n) {
            return Err(SetupError::Parameter("invalid selection".into()));
        }
        let params = F::pg(cfg.profile, rng)?;
        let family = Sphdhc::<F>::new(params, cfg.n, cfg.h)?;
        let vectors: Vec<Vec<InstancePair<F>>> = plans
            .iter()
            .map(|plan| {
                let raw = match plan {
                    VectorPlan::Honest => family.sample_vector(rng),
                    VectorPlan::AllProjective => family.cheat(rng),
                    VectorPlan::ExtraProjective => {
                        let mut v = Vec::with_capacity(cfg.n);
                        for _ in 0..cfg.h + 1 {
                            let mut child = rng.fork();
                            v.push(F::is(&family.params, Kind::Projective, &mut child));
                        }
                        for _ in cfg.h + 1..cfg.n {
                            let mut child = rng.fork();
                            v.push(F::is(&family.params, Kind::Smooth, &mut child));
                        }
                        v
                    }
                };
                Permutation::random(cfg.n, rng).apply(&raw)
            })
            .collect();
        let commit_group = F::commit_group(&family.params, cfg.profile, rng)?;
        let commit_key = CommitKey::derive(commit_group.clone());
        let coin = scripted_coin.unwrap_or_else(|| rng.coin_string(cfg.k_cut));
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
            coin_commitment,
        };
        Ok((
            AdversaryReceiver {
                cfg: *cfg,
                selection: selection.iter().copied().collect(),
                family,
                commit_key,
                nonce,
                vectors,
                coin,
                coin_opening,
            },
            f1,
        ))
    }

    /// Mirrors the honest coin verification and step R4, except that each
    /// unchosen vector is reordered onto the selection extended with as many
    /// extra target positions as the vector has surplus projective entries.
    pub fn on_coins(
        self,
        f2: &FlowF2,
        f3: &FlowF3,
        rng: &mut OtRng,
    ) -> Result<(AdversaryCipher<F>, FlowF4<F>), Abort> {
        let k = self.cfg.k_cut;
        let expected_chunks = chunk_count(&self.commit_key, k);
        if f2.coin_commitment.len() != expected_chunks {
            return Err(Abort::receiver("coin commitment has wrong chunk count"));
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

        let selection: BTreeSet<usize> = self.selection.iter().copied().collect();
        let extras: Vec<usize> = (0..self.cfg.n).filter(|j| !selection.contains(j)).collect();
        let mut openings = Vec::new();
        let mut perms = Vec::new();
        let mut unchosen = Vec::new();
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
                let surplus = projective.len().saturating_sub(self.cfg.h);
                let mut target = selection.clone();
                target.extend(extras.iter().take(surplus));
                let pi = gamma_sample(&projective, &target, self.cfg.n, rng)
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
            AdversaryCipher {
                cfg: self.cfg,
                family: self.family,
                session: session_id(&self.nonce, &f2.nonce),
                chosen,
                unchosen,
            },
            f4,
        ))
    }
}

impl<F: Family> AdversaryCipher<F> {
    pub fn chosen(&self) -> &BTreeSet<usize> {
        &self.chosen
    }

    pub fn unchosen_indices(&self) -> Vec<usize> {
        self.unchosen.iter().map(|(i, _)| *i).collect()
    }

    /// Attempts to decrypt every position, using whatever witness sits
    /// there after the reordering. Positions without projective entries in
    /// every unchosen vector come out as noise.
    pub fn decrypt_all(&self, f6: &FlowF6<F>) -> Result<Vec<Vec<u8>>, Abort> {
        let n = self.cfg.n;
        if f6.ciphertexts.len() != n || f6.proj_keys.len() != self.unchosen.len() {
            return Err(Abort::receiver("ciphertext or key matrix has wrong arity"));
        }
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut message = f6.ciphertexts[j].clone();
            for ((i, reordered), (i2, pks)) in self.unchosen.iter().zip(&f6.proj_keys) {
                debug_assert_eq!(i, i2);
                let pair = &reordered[j];
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
                crate::protocol::xor_bytes(&mut message, &pad);
            }
            out.push(message);
        }
        Ok(out)
    }
}

/// A receiver emitting `h+1`-projective vectors at the given (0-based)
/// slots, honest everywhere else.
pub fn cheating_receiver<F: Family>(
    cfg: &ProtocolConfig,
    selection: &BTreeSet<usize>,
    illegal: &BTreeSet<usize>,
    rng: &mut OtRng,
) -> Result<(AdversaryReceiver<F>, FlowF1<F>), SetupError> {
    if illegal.is_empty() {
        return Err(SetupError::Parameter(
            "illegal slot set must be nonempty".into(),
        ));
    }
    if illegal.iter().any(|&i| i >= cfg.k_cut) {
        return Err(SetupError::Parameter("illegal slot out of range".into()));
    }
    let plans: Vec<VectorPlan> = (0..cfg.k_cut)
        .map(|i| {
            if illegal.contains(&i) {
                VectorPlan::ExtraProjective
            } else {
                VectorPlan::Honest
            }
        })
        .collect();
    AdversaryReceiver::start(cfg, selection, &plans, None, rng)
}

/// Aggregate results of the escape experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeStats {
    pub k: usize,
    pub d: usize,
    pub trials: usize,
    /// Sessions where no abort happened and the unchosen set was exactly
    /// the illegal set.
    pub escapes: usize,
    /// Escapes where the receiver really decrypted more than h messages.
    pub escapes_verified: usize,
    /// Sessions where some illegal slot was chosen for opening.
    pub overlap_trials: usize,
    /// Of those, how many the sender aborted (detection completeness wants
    /// all of them).
    pub overlap_aborts: usize,
}

impl EscapeStats {
    pub fn rate(&self) -> f64 {
        self.escapes as f64 / self.trials as f64
    }

    pub fn csv_header() -> &'static str {
        "k,d,trials,escapes,rate"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6}",
            self.k,
            self.d,
            self.trials,
            self.escapes,
            self.rate()
        )
    }
}

fn experiment_messages(cfg: &ProtocolConfig, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = OtRng::seeded(seed ^ 0x6d73675f73656564);
    (0..cfg.n)
        .map(|_| {
            let mut m = vec![0u8; cfg.msg_len];
            rng.fill(&mut m);
            m
        })
        .collect()
}

struct TrialResult {
    escape: bool,
    escape_verified: bool,
    overlap: bool,
    aborted: bool,
    correct_decrypts: usize,
}

fn run_cheating_trial<F: Family>(
    cfg: &ProtocolConfig,
    selection: &BTreeSet<usize>,
    illegal: &BTreeSet<usize>,
    messages: &[Vec<u8>],
    receiver_rng: &mut OtRng,
    sender_rng: &mut OtRng,
    scripted: Option<(Vec<bool>, Vec<bool>)>,
) -> Result<TrialResult, SetupError> {
    let (receiver_coin, sender_coin) = match scripted {
        Some((r, s)) => (Some(r), Some(s)),
        None => (None, None),
    };
    let plans: Vec<VectorPlan> = (0..cfg.k_cut)
        .map(|i| {
            if illegal.contains(&i) {
                VectorPlan::ExtraProjective
            } else {
                VectorPlan::Honest
            }
        })
        .collect();
    let (receiver, f1) =
        AdversaryReceiver::<F>::start(cfg, selection, &plans, receiver_coin, receiver_rng)?;
    let sender = Sender::new(cfg, messages.to_vec())?;
    let (sender, f2, f3) = sender
        .on_f1_with_coin(f1, sender_coin, sender_rng)
        .map_err(|a| SetupError::Parameter(format!("sender rejected honest-shaped F1: {a}")))?;
    let (receiver, f4) = receiver
        .on_coins(&f2, &f3, receiver_rng)
        .map_err(|a| SetupError::Parameter(format!("receiver-side failure: {a}")))?;
    let chosen = receiver.chosen().clone();
    let overlap = illegal.intersection(&chosen).next().is_some();
    match sender.on_f4(&f4, sender_rng) {
        Err(_) => Ok(TrialResult {
            escape: false,
            escape_verified: false,
            overlap,
            aborted: true,
            correct_decrypts: 0,
        }),
        Ok(f6) => {
            let unchosen: BTreeSet<usize> = receiver.unchosen_indices().into_iter().collect();
            let escape = unchosen == *illegal;
            let decrypted = receiver
                .decrypt_all(&f6)
                .map_err(|a| SetupError::Parameter(format!("decrypt failed: {a}")))?;
            let correct = decrypted
                .iter()
                .zip(messages)
                .filter(|(got, want)| got == want)
                .count();
            Ok(TrialResult {
                escape,
                escape_verified: escape && correct > cfg.h,
                overlap,
                aborted: false,
                correct_decrypts: correct,
            })
        }
    }
}

/// Runs `trials` sessions of a receiver with `d` illegal vectors against an
/// honest sender with uniform coins, counting escapes (no abort and the
/// unchosen set exactly the illegal set).
pub fn escape_experiment<F: Family>(
    cfg: &ProtocolConfig,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<EscapeStats, SetupError> {
    cfg.validate()?;
    if d < 1 || d > cfg.k_cut {
        return Err(SetupError::Parameter("need 1 <= d <= K".into()));
    }
    let selection: BTreeSet<usize> = (0..cfg.h).collect();
    let illegal: BTreeSet<usize> = (0..d).collect();
    let messages = experiment_messages(cfg, seed);
    let mut master = OtRng::seeded(seed);
    let trial_seeds: Vec<([u8; 32], [u8; 32])> = (0..trials)
        .map(|_| (master.seed32(), master.seed32()))
        .collect();

    let results: Result<Vec<TrialResult>, SetupError> = trial_seeds
        .par_iter()
        .map(|(rs, ss)| {
            run_cheating_trial::<F>(
                cfg,
                &selection,
                &illegal,
                &messages,
                &mut OtRng::from_seed_bytes(*rs),
                &mut OtRng::from_seed_bytes(*ss),
                None,
            )
        })
        .collect();
    let results = results?;
    Ok(EscapeStats {
        k: cfg.k_cut,
        d,
        trials,
        escapes: results.iter().filter(|r| r.escape).count(),
        escapes_verified: results.iter().filter(|r| r.escape_verified).count(),
        overlap_trials: results.iter().filter(|r| r.overlap).count(),
        overlap_aborts: results.iter().filter(|r| r.overlap && r.aborted).count(),
    })
}

/// One row of the exhaustive coin sweep.
#[derive(Debug, Clone)]
pub struct EscapeRun {
    /// The joint coin r, bit i true when vector i is opened.
    pub coin: Vec<bool>,
    pub aborted: bool,
    pub escape: bool,
    pub correct_decrypts: usize,
}

/// Enumerates every joint coin r (receiver coin scripted to zero, sender
/// coin scripted to r) and reports, per coin, whether the sender aborted
/// and whether the escape event happened.
pub fn escape_event_table<F: Family>(
    cfg: &ProtocolConfig,
    d: usize,
    seed: u64,
) -> Result<Vec<EscapeRun>, SetupError> {
    cfg.validate()?;
    if d < 1 || d > cfg.k_cut || cfg.k_cut > 16 {
        return Err(SetupError::Parameter(
            "need 1 <= d <= K and K small enough to enumerate".into(),
        ));
    }
    let selection: BTreeSet<usize> = (0..cfg.h).collect();
    let illegal: BTreeSet<usize> = (0..d).collect();
    let messages = experiment_messages(cfg, seed);
    let mut master = OtRng::seeded(seed);
    let coins: Vec<Vec<bool>> = (0..1u32 << cfg.k_cut)
        .map(|r| (0..cfg.k_cut).map(|i| r >> i & 1 == 1).collect())
        .collect();
    let seeds: Vec<([u8; 32], [u8; 32])> = coins
        .iter()
        .map(|_| (master.seed32(), master.seed32()))
        .collect();
    coins
        .into_par_iter()
        .zip(seeds)
        .map(|(coin, (rs, ss))| {
            let zero = vec![false; cfg.k_cut];
            let result = run_cheating_trial::<F>(
                cfg,
                &selection,
                &illegal,
                &messages,
                &mut OtRng::from_seed_bytes(rs),
                &mut OtRng::from_seed_bytes(ss),
                Some((zero, coin.clone())),
            )?;
            Ok(EscapeRun {
                coin,
                aborted: result.aborted,
                escape: result.escape,
                correct_decrypts: result.correct_decrypts,
            })
        })
        .collect()
}

/// Plays a receiver whose unchosen slots hold all-projective vectors (the
/// coin toss is scripted so those slots are never opened), then decrypts
/// every position of the ciphertext vector.
///
/// With `honest_vectors` the unchosen slots hold prescribed vectors
/// instead, so only the selected positions can decrypt correctly.
pub fn cheat_extraction<F: Family>(
    cfg: &ProtocolConfig,
    messages: &[Vec<u8>],
    selection: &BTreeSet<usize>,
    honest_vectors: bool,
    rng: &mut OtRng,
) -> Result<Vec<Vec<u8>>, SetupError> {
    cfg.validate()?;
    let unchosen_slots = cfg.k_cut.div_ceil(2).max(1);
    let plans: Vec<VectorPlan> = (0..cfg.k_cut)
        .map(|i| {
            if i < unchosen_slots && !honest_vectors {
                VectorPlan::AllProjective
            } else {
                VectorPlan::Honest
            }
        })
        .collect();
    // r has zeros exactly on the slots that must stay unopened.
    let joint: Vec<bool> = (0..cfg.k_cut).map(|i| i >= unchosen_slots).collect();
    let receiver_coin = rng.coin_string(cfg.k_cut);
    let sender_coin: Vec<bool> = joint
        .iter()
        .zip(&receiver_coin)
        .map(|(r, s)| r ^ s)
        .collect();

    let mut receiver_rng = rng.fork();
    let mut sender_rng = rng.fork();
    let (receiver, f1) = AdversaryReceiver::<F>::start(
        cfg,
        selection,
        &plans,
        Some(receiver_coin),
        &mut receiver_rng,
    )?;
    let sender = Sender::new(cfg, messages.to_vec())?;
    let (sender, f2, f3) = sender
        .on_f1_with_coin(f1, Some(sender_coin), &mut sender_rng)
        .map_err(|a| SetupError::Parameter(format!("sender rejected F1: {a}")))?;
    let (receiver, f4) = receiver
        .on_coins(&f2, &f3, &mut receiver_rng)
        .map_err(|a| SetupError::Parameter(format!("coin exchange failed: {a}")))?;
    let f6 = sender
        .on_f4(&f4, &mut sender_rng)
        .map_err(|a| SetupError::Parameter(format!("sender aborted: {a}")))?;
    receiver
        .decrypt_all(&f6)
        .map_err(|a| SetupError::Parameter(format!("decrypt failed: {a}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddh::DdhFamily;
    use crate::sph::Profile;

    fn toy_cfg(n: usize, h: usize, k: usize) -> ProtocolConfig {
        ProtocolConfig {
            n,
            h,
            k_cut: k,
            msg_len: 8,
            profile: Profile::Toy,
        }
    }

    #[test]
    fn cheating_receiver_requires_illegal_slots() {
        let cfg = toy_cfg(2, 1, 2);
        let mut rng = OtRng::seeded(1);
        let selection: BTreeSet<usize> = [0].into();
        assert!(
            cheating_receiver::<DdhFamily>(&cfg, &selection, &BTreeSet::new(), &mut rng).is_err()
        );
        assert!(cheating_receiver::<DdhFamily>(&cfg, &selection, &[5].into(), &mut rng).is_err());
        assert!(cheating_receiver::<DdhFamily>(&cfg, &selection, &[1].into(), &mut rng).is_ok());
    }

    #[test]
    fn chosen_illegal_vector_always_aborts() {
        let cfg = toy_cfg(3, 1, 2);
        let selection: BTreeSet<usize> = [0].into();
        let illegal: BTreeSet<usize> = [0].into();
        let messages = experiment_messages(&cfg, 7);
        // Joint coin opens slot 0 (the illegal one).
        let receiver_coin = vec![false, false];
        let sender_coin = vec![true, false];
        let result = run_cheating_trial::<DdhFamily>(
            &cfg,
            &selection,
            &illegal,
            &messages,
            &mut OtRng::seeded(21),
            &mut OtRng::seeded(22),
            Some((receiver_coin, sender_coin)),
        )
        .unwrap();
        assert!(result.aborted);
        assert!(result.overlap);
        assert!(!result.escape);
    }

    #[test]
    fn unopened_illegal_vectors_escape_and_overdecrypt() {
        let cfg = toy_cfg(3, 1, 2);
        let selection: BTreeSet<usize> = [0].into();
        let illegal: BTreeSet<usize> = [0, 1].into();
        let messages = experiment_messages(&cfg, 9);
        // Joint coin all-zero: nothing opened, unchosen = illegal.
        let result = run_cheating_trial::<DdhFamily>(
            &cfg,
            &selection,
            &illegal,
            &messages,
            &mut OtRng::seeded(31),
            &mut OtRng::seeded(32),
            Some((vec![false, false], vec![false, false])),
        )
        .unwrap();
        assert!(!result.aborted);
        assert!(result.escape);
        assert!(result.escape_verified);
        assert!(result.correct_decrypts > cfg.h);
    }

    #[test]
    fn single_coin_escape_rate_is_one_half() {
        let cfg = toy_cfg(2, 1, 1);
        let table = escape_event_table::<DdhFamily>(&cfg, 1, 5).unwrap();
        assert_eq!(table.len(), 2);
        let escapes: Vec<bool> = table.iter().map(|r| r.escape).collect();
        assert_eq!(escapes.iter().filter(|&&e| e).count(), 1);
        // Escape exactly when the single vector stays unopened.
        for run in &table {
            assert_eq!(run.escape, !run.coin[0]);
        }
    }

    #[test]
    fn extraction_recovers_everything_with_cheat_vectors() {
        let cfg = toy_cfg(3, 1, 4);
        let selection: BTreeSet<usize> = [1].into();
        let messages = experiment_messages(&cfg, 11);
        let mut rng = OtRng::seeded(41);
        let got =
            cheat_extraction::<DdhFamily>(&cfg, &messages, &selection, false, &mut rng).unwrap();
        assert_eq!(got, messages);
    }

    #[test]
    fn extraction_with_honest_vectors_only_hits_the_selection() {
        let cfg = toy_cfg(3, 1, 4);
        let selection: BTreeSet<usize> = [1].into();
        let messages = experiment_messages(&cfg, 13);
        let mut rng = OtRng::seeded(43);
        let got =
            cheat_extraction::<DdhFamily>(&cfg, &messages, &selection, true, &mut rng).unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(got[1], messages[1]);
        assert_ne!(got[0], messages[0]);
        assert_ne!(got[2], messages[2]);
    }
}
