use super::WireError;

/// Fixed frame preamble: magic, version, flow tag, 4-byte body length.
pub const MAGIC: [u8; 4] = *b"OTF1";
pub const VERSION: u8 = 0x01;
pub const FRAME_HEADER_LEN: usize = 4 + 1 + 1 + 4;
/// Upper bound on accepted body sizes; protects readers from hostile length
/// fields.
pub const MAX_BODY_LEN: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowTag {
    F1 = 0x01,
    F2 = 0x02,
    F3 = 0x03,
    F4 = 0x04,
    F5 = 0x05,
    F6 = 0x06,
    Abort = 0x7f,
}

impl FlowTag {
    pub fn from_byte(b: u8) -> Result<FlowTag, WireError> {
        Ok(match b {
            0x01 => FlowTag::F1,
            0x02 => FlowTag::F2,
            0x03 => FlowTag::F3,
            0x04 => FlowTag::F4,
            0x05 => FlowTag::F5,
            0x06 => FlowTag::F6,
            0x7f => FlowTag::Abort,
            other => return Err(WireError::UnknownTag(other)),
        })
    }
}

pub fn encode_frame(tag: FlowTag, body: &[u8]) -> Vec<u8> {
    assert!(body.len() <= MAX_BODY_LEN);
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(tag as u8);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
    out
}

pub fn decode_frame(bytes: &[u8]) -> Result<(FlowTag, &[u8]), WireError> {
    if bytes.len() < FRAME_HEADER_LEN {
        return Err(WireError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(WireError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(WireError::BadVersion(bytes[4]));
    }
    let tag = FlowTag::from_byte(bytes[5])?;
    let len = u32::from_be_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    if len > MAX_BODY_LEN {
        return Err(WireError::TooLong);
    }
    if bytes.len() != FRAME_HEADER_LEN + len {
        return Err(WireError::Truncated);
    }
    Ok((tag, &bytes[FRAME_HEADER_LEN..]))
}
