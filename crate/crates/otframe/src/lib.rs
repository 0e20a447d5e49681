//! Fully simulatable h-out-of-n oblivious transfer built on smooth projective
//! hash families.
//!
//! The crate provides:
//!
//! * [`math`] — arbitrary-precision modular arithmetic, prime/modulus
//!   generation and canonical byte encodings shared by every instantiation.
//! * [`sph`] — the hash-family abstraction: a base smooth projective family,
//!   the universal-to-smooth amplifier built from an affine GF(2) extractor,
//!   and the composite family that samples whole instance vectors and
//!   supports feasible cheating.
//! * [`ddh`], [`residuosity`] — concrete families under the decisional
//!   Diffie-Hellman, decisional N-th residuosity and decisional quadratic
//!   residuosity assumptions.
//! * [`commit`] — Pedersen (perfectly hiding) and ElGamal-style (perfectly
//!   binding) commitments over a Schnorr group, plus chunked commitments to
//!   coin strings.
//! * [`protocol`] — the six-flow transfer engine: receiver and sender state
//!   machines, the constrained permutation sampler, cut-and-choose
//!   verification and pad-based encryption.
//! * [`adversary`] — scripted malicious receivers and the statistical escape
//!   experiments.
//! * [`wire`], [`net`] — byte-exact frame encoding and the in-memory / TCP
//!   transports.
//! * [`cli`] — the operator command line.

pub mod adversary;
pub mod cli;
pub mod commit;
pub mod ddh;
pub mod math;
pub mod net;
pub mod protocol;
pub mod residuosity;
pub mod sph;
pub mod wire;
