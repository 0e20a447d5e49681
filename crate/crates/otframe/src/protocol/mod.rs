//! The six-flow transfer engine.
//!
//! Flow layout (mirroring the six communication rounds):
//!
//! | flow | direction          | contents                                        |
//! |------|--------------------|--------------------------------------------------|
//! | F1   | receiver -> sender | family params, commit group, K shuffled instance vectors, binding commitment to s' |
//! | F2   | sender -> receiver | hiding commitment to s                            |
//! | F3   | sender -> receiver | opening of s                                      |
//! | F4   | receiver -> sender | opening of s', witness openings for chosen vectors, reorderings for unchosen ones |
//! | F5   | receiver -> sender | empty (keeps the six-round structure)             |
//! | F6   | sender -> receiver | ciphertexts and the projective-key matrix         |
//!
//! The receiver is bound by its perfectly binding commitment in F1 before
//! the sender opens s in F3, so the joint coin `r = s xor s'` stays uniform
//! against a cheating receiver. Receiver-side verification failures abort
//! with label 1, sender-side with label 2.

mod gamma;
mod pad;
mod receiver;
mod sender;
mod session;

pub use gamma::{gamma_sample, Permutation};
pub use pad::{derive_pad, xor_bytes, PadContext};
pub use receiver::{Receiver, ReceiverAwaitingCipher, ReceiverAwaitingCoins};
pub use sender::{Sender, SenderAwaitingOpen};
pub use session::{run_local_session, run_local_session_with_rngs, LocalSession, TranscriptFrame};

use num_bigint::BigUint;
use thiserror::Error;

use crate::commit::CoinOpening;
use crate::math::{MathError, SchnorrGroup};
use crate::sph::{Family, Profile, SphError};

/// Session-wide configuration both parties agree on out of band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    /// Number of sender messages.
    pub n: usize,
    /// Number of messages the receiver obtains.
    pub h: usize,
    /// Cut-and-choose width (number of instance vectors).
    pub k_cut: usize,
    /// Message length in bytes; all messages share it.
    pub msg_len: usize,
    pub profile: Profile,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), SetupError> {
        if self.h < 1 || self.h >= self.n {
            return Err(SetupError::Parameter("config: need 1 <= h < n".into()));
        }
        if self.k_cut < 1 {
            return Err(SetupError::Parameter("config: need K >= 1".into()));
        }
        let max_n = match self.profile {
            Profile::Toy => u8::MAX as usize,
            Profile::Production => u16::MAX as usize,
        };
        if self.n > max_n || self.k_cut > u16::MAX as usize || self.msg_len > u16::MAX as usize {
            return Err(SetupError::Parameter("config: dimension too large".into()));
        }
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.n - self.h
    }
}

/// Local usage or generation failures before any flow is exchanged.
#[derive(Debug, Error)]
pub enum SetupError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Sph(#[from] SphError),
}

/// Which party detected the failure: the receiver outputs label 1, the
/// sender label 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortLabel {
    Receiver,
    Sender,
}

impl std::fmt::Display for AbortLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AbortLabel::Receiver => "abort_1",
            AbortLabel::Sender => "abort_2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{label}: {reason}")]
pub struct Abort {
    pub label: AbortLabel,
    pub reason: String,
}

impl Abort {
    pub fn receiver(reason: impl Into<String>) -> Self {
        Abort {
            label: AbortLabel::Receiver,
            reason: reason.into(),
        }
    }

    pub fn sender(reason: impl Into<String>) -> Self {
        Abort {
            label: AbortLabel::Sender,
            reason: reason.into(),
        }
    }
}

/// First flow: family parameters, the commitment group, the shuffled
/// instance vectors (public parts only) and the binding commitment to the
/// receiver's coin.
pub struct FlowF1<F: Family> {
    pub nonce: [u8; 16],
    pub params: F::Params,
    pub commit_group: SchnorrGroup,
    pub vectors: Vec<Vec<F::Instance>>,
    pub coin_commitment: Vec<(BigUint, BigUint)>,
}

impl<F: Family> Clone for FlowF1<F> {
    fn clone(&self) -> Self {
        FlowF1 {
            nonce: self.nonce,
            params: self.params.clone(),
            commit_group: self.commit_group.clone(),
            vectors: self.vectors.clone(),
            coin_commitment: self.coin_commitment.clone(),
        }
    }
}

/// Second flow: the hiding commitment to the sender's coin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowF2 {
    pub nonce: [u8; 16],
    pub coin_commitment: Vec<BigUint>,
}

/// Third flow: the sender opens its coin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowF3 {
    pub opening: CoinOpening,
}

/// One opened witness: vector index and position (both 0-based here; the
/// wire uses 1-based indices).
pub struct WitnessOpening<F: Family> {
    pub vector: usize,
    pub position: usize,
    pub witness: F::Witness,
}

impl<F: Family> Clone for WitnessOpening<F> {
    fn clone(&self) -> Self {
        WitnessOpening {
            vector: self.vector,
            position: self.position,
            witness: self.witness.clone(),
        }
    }
}

/// Fourth flow: the receiver opens its coin, opens the smooth entries of
/// every chosen vector and sends a reordering for every unchosen one.
pub struct FlowF4<F: Family> {
    pub opening: CoinOpening,
    pub openings: Vec<WitnessOpening<F>>,
    pub perms: Vec<(usize, Permutation)>,
}

impl<F: Family> Clone for FlowF4<F> {
    fn clone(&self) -> Self {
        FlowF4 {
            opening: self.opening.clone(),
            openings: self.openings.clone(),
            perms: self.perms.clone(),
        }
    }
}

/// Sixth flow: one ciphertext per message and the projective keys for every
/// unchosen vector.
pub struct FlowF6<F: Family> {
    pub ciphertexts: Vec<Vec<u8>>,
    pub proj_keys: Vec<(usize, Vec<F::ProjKey>)>,
}

impl<F: Family> Clone for FlowF6<F> {
    fn clone(&self) -> Self {
        FlowF6 {
            ciphertexts: self.ciphertexts.clone(),
            proj_keys: self.proj_keys.clone(),
        }
    }
}

/// A protocol flow as it appears on the wire.
pub enum Flow<F: Family> {
    F1(FlowF1<F>),
    F2(FlowF2),
    F3(FlowF3),
    F4(FlowF4<F>),
    F5,
    F6(FlowF6<F>),
    Abort,
}

impl<F: Family> Flow<F> {
    pub fn name(&self) -> &'static str {
        match self {
            Flow::F1(_) => "F1",
            Flow::F2(_) => "F2",
            Flow::F3(_) => "F3",
            Flow::F4(_) => "F4",
            Flow::F5 => "F5",
            Flow::F6(_) => "F6",
            Flow::Abort => "abort",
        }
    }
}

/// Builds the 32-byte session id from the two nonces.
pub fn session_id(receiver_nonce: &[u8; 16], sender_nonce: &[u8; 16]) -> [u8; 32] {
    let mut sid = [0u8; 32];
    sid[..16].copy_from_slice(receiver_nonce);
    sid[16..].copy_from_slice(sender_nonce);
    sid
}
