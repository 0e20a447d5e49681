use crate::math::{Bits, OtRng};

use super::SphError;

/// Seed of the affine extractor `y -> A*y xor b` over GF(2). Affine maps
/// with uniform `A` and `b` form a pairwise-independent family, which is
/// what the amplifier's leftover-hash argument needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractorSeed {
    rows: Vec<Bits>,
    offset: Bits,
}

impl ExtractorSeed {
    pub fn sample(out_len: usize, in_len: usize, rng: &mut OtRng) -> Self {
        ExtractorSeed {
            rows: (0..out_len).map(|_| Bits::random(in_len, rng)).collect(),
            offset: Bits::random(out_len, rng),
        }
    }

    pub fn from_parts(rows: Vec<Bits>, offset: Bits) -> Result<Self, SphError> {
        if rows.len() != offset.len() {
            return Err(SphError::Parameter(
                "extractor: row count must equal offset length".into(),
            ));
        }
        let in_len = rows.first().map(Bits::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != in_len) {
            return Err(SphError::Parameter("extractor: ragged matrix".into()));
        }
        Ok(ExtractorSeed { rows, offset })
    }

    pub fn out_len(&self) -> usize {
        self.offset.len()
    }

    pub fn in_len(&self) -> usize {
        self.rows.first().map(Bits::len).unwrap_or(0)
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn offset(&self) -> &Bits {
        &self.offset
    }
}

/// `A*input xor b` over GF(2).
pub fn lhl_extract(seed: &ExtractorSeed, input: &Bits) -> Result<Bits, SphError> {
    if input.len() != seed.in_len() {
        return Err(SphError::Parameter(format!(
            "extractor: input has {} bits, seed expects {}",
            input.len(),
            seed.in_len()
        )));
    }
    let mut out = Bits::zero(seed.out_len());
    for (i, row) in seed.rows.iter().enumerate() {
        out.set(i, row.dot(input) ^ seed.offset.get(i));
    }
    Ok(out)
}
