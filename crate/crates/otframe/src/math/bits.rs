/// Fixed-length bit vector packed MSB-first into bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

impl Bits {
    pub fn zero(len: usize) -> Self {
        Bits {
            len,
            bytes: vec![0u8; len.div_ceil(8)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// Reconstructs from packed bytes; padding bits in the last byte must be
    /// zero so that every bit string has exactly one encoding.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        if !len.is_multiple_of(8) {
            let pad_mask = 0xffu8 >> (len % 8);
            if let Some(last) = bytes.last() {
                if last & pad_mask != 0 {
                    return None;
                }
            }
        }
        Some(Bits {
            len,
            bytes: bytes.to_vec(),
        })
    }

    pub fn random(len: usize, rng: &mut super::OtRng) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill(&mut bytes);
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Bits { len, bytes }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u8 << (7 - i % 8);
        if v {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Parity of the AND of two equal-length bit vectors.
    pub fn dot(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len);
        let mut acc = 0u8;
        for (a, b) in self.bytes.iter().zip(&other.bytes) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}
