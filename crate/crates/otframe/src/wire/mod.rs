//! Byte-exact message encoding.
//!
//! Every integer travels as a 2-byte big-endian length followed by its
//! minimal big-endian magnitude (zero encodes as the empty string); vectors
//! as a 2-byte count followed by the elements. Decoders reject any
//! non-minimal integer and any trailing bytes, so structurally equal
//! messages have exactly one encoding.

mod body;
mod frame;

pub use body::*;
pub use frame::{
    decode_frame, encode_frame, FlowTag, FRAME_HEADER_LEN, MAGIC, MAX_BODY_LEN, VERSION,
};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WireError {
    #[error("truncated message")]
    Truncated,
    #[error("bad magic")]
    BadMagic,
    #[error("unknown version {0:#x}")]
    BadVersion(u8),
    #[error("unknown flow tag {0:#x}")]
    UnknownTag(u8),
    #[error("non-canonical integer encoding")]
    NonCanonical,
    #[error("frame body too long")]
    TooLong,
    #[error("malformed message: {0}")]
    Malformed(String),
}

pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        ByteWriter { buf: Vec::new() }
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn put_raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Length-prefixed minimal big-endian integer.
    pub fn put_uint(&mut self, x: &BigUint) {
        let raw = if x.is_zero() {
            Vec::new()
        } else {
            x.to_bytes_be()
        };
        debug_assert!(raw.len() <= u16::MAX as usize);
        self.put_u16(raw.len() as u16);
        self.put_raw(&raw);
    }

    /// Length-prefixed byte string.
    pub fn put_bstr(&mut self, bytes: &[u8]) {
        debug_assert!(bytes.len() <= u16::MAX as usize);
        self.put_u16(bytes.len() as u16);
        self.put_raw(bytes);
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

impl Default for ByteWriter {
    fn default() -> Self {
        Self::new()
    }
}

pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.buf.len() - self.pos < n {
            return Err(WireError::Truncated);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, WireError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u32(&mut self) -> Result<u32, WireError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn uint(&mut self) -> Result<BigUint, WireError> {
        let len = self.u16()? as usize;
        let raw = self.take(len)?;
        if !raw.is_empty() && raw[0] == 0 {
            return Err(WireError::NonCanonical);
        }
        Ok(BigUint::from_bytes_be(raw))
    }

    pub fn bstr(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.u16()? as usize;
        self.take(len)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Decoding must consume the whole buffer.
    pub fn expect_end(&self) -> Result<(), WireError> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(WireError::Malformed("trailing bytes".into()))
        }
    }
}
