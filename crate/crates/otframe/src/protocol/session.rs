use std::collections::BTreeSet;

use crate::math::OtRng;
use crate::sph::Family;
use crate::wire;

use super::{Abort, ProtocolConfig, Receiver, Sender, SetupError};

/// One frame of a session transcript, as it would appear on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptFrame {
    pub from_receiver: bool,
    pub bytes: Vec<u8>,
}

/// Result of an in-process session: the byte-exact transcript plus the
/// receiver's output (or the abort that ended the run).
pub struct LocalSession {
    pub transcript: Vec<TranscriptFrame>,
    pub outcome: Result<Vec<Vec<u8>>, Abort>,
}

/// Drives both state machines through the six flows in order, recording
/// every frame. The two parties' generators are forked from `rng`
/// (receiver first), so a seed fully determines the run.
pub fn run_local_session<F: Family>(
    cfg: &ProtocolConfig,
    messages: Vec<Vec<u8>>,
    selection: &BTreeSet<usize>,
    rng: &mut OtRng,
) -> Result<LocalSession, SetupError> {
    let mut receiver_rng = rng.fork();
    let mut sender_rng = rng.fork();
    run_local_session_with_rngs::<F>(cfg, messages, selection, &mut receiver_rng, &mut sender_rng)
}

pub fn run_local_session_with_rngs<F: Family>(
    cfg: &ProtocolConfig,
    messages: Vec<Vec<u8>>,
    selection: &BTreeSet<usize>,
    receiver_rng: &mut OtRng,
    sender_rng: &mut OtRng,
) -> Result<LocalSession, SetupError> {
    let mut transcript = Vec::with_capacity(6);
    let push = |transcript: &mut Vec<TranscriptFrame>, from_receiver: bool, bytes: Vec<u8>| {
        transcript.push(TranscriptFrame {
            from_receiver,
            bytes,
        });
    };

    let sender = Sender::new(cfg, messages)?;
    let (receiver, f1) = Receiver::start::<F>(cfg, selection, receiver_rng)?;
    push(&mut transcript, true, wire::encode_f1::<F>(&f1));
    let params = f1.params.clone();

    let (sender, f2, f3) = match sender.on_f1(f1, sender_rng) {
        Ok(v) => v,
        Err(abort) => {
            push(&mut transcript, false, wire::encode_abort());
            return Ok(LocalSession {
                transcript,
                outcome: Err(abort),
            });
        }
    };
    push(&mut transcript, false, wire::encode_f2(&f2));
    push(&mut transcript, false, wire::encode_f3(&f3));

    let (receiver, f4) = match receiver.on_coins(&f2, &f3, receiver_rng) {
        Ok(v) => v,
        Err(abort) => {
            push(&mut transcript, true, wire::encode_abort());
            return Ok(LocalSession {
                transcript,
                outcome: Err(abort),
            });
        }
    };
    push(
        &mut transcript,
        true,
        wire::encode_f4::<F>(&f4, &params, cfg),
    );
    push(&mut transcript, true, wire::encode_f5());

    let f6 = match sender.on_f4(&f4, sender_rng) {
        Ok(v) => v,
        Err(abort) => {
            push(&mut transcript, false, wire::encode_abort());
            return Ok(LocalSession {
                transcript,
                outcome: Err(abort),
            });
        }
    };
    push(
        &mut transcript,
        false,
        wire::encode_f6::<F>(&f6, &params, cfg),
    );

    let outcome = receiver.on_f6(&f6);
    Ok(LocalSession {
        transcript,
        outcome,
    })
}
