use num_bigint::BigUint;

use crate::commit::{CoinOpening, Decommitment};
use crate::math::SchnorrGroup;
use crate::protocol::{
    Flow, FlowF1, FlowF2, FlowF3, FlowF4, FlowF6, Permutation, ProtocolConfig, WitnessOpening,
};
use crate::sph::{Family, Profile};

use super::frame::{decode_frame, encode_frame, FlowTag};
use super::{ByteReader, ByteWriter, WireError};

fn put_count(w: &mut ByteWriter, v: usize) {
    debug_assert!(v <= u16::MAX as usize);
    w.put_u16(v as u16);
}

fn read_count(r: &mut ByteReader<'_>, max: usize, what: &str) -> Result<usize, WireError> {
    let v = r.u16()? as usize;
    if v > max {
        return Err(WireError::Malformed(format!(
            "{what} count {v} exceeds {max}"
        )));
    }
    Ok(v)
}

/// 1-based index on the wire, 0-based in memory.
fn put_index(w: &mut ByteWriter, v: usize) {
    put_count(w, v + 1);
}

fn read_index(r: &mut ByteReader<'_>, bound: usize, what: &str) -> Result<usize, WireError> {
    let v = r.u16()? as usize;
    if v < 1 || v > bound {
        return Err(WireError::Malformed(format!(
            "{what} index {v} out of range"
        )));
    }
    Ok(v - 1)
}

fn put_group(w: &mut ByteWriter, g: &SchnorrGroup) {
    w.put_uint(&g.p);
    w.put_uint(&g.q);
    w.put_uint(&g.g);
}

fn read_group(r: &mut ByteReader<'_>) -> Result<SchnorrGroup, WireError> {
    let p = r.uint()?;
    let q = r.uint()?;
    let g = r.uint()?;
    if p < BigUint::from(3u32) || q < BigUint::from(2u32) || g >= p {
        return Err(WireError::Malformed("commitment group out of range".into()));
    }
    Ok(SchnorrGroup { p, q, g })
}

fn put_opening(w: &mut ByteWriter, opening: &CoinOpening) {
    put_count(w, opening.chunks.len());
    for d in &opening.chunks {
        w.put_uint(&d.value);
        w.put_uint(&d.randomness);
    }
}

fn read_opening(r: &mut ByteReader<'_>, expected_chunks: usize) -> Result<CoinOpening, WireError> {
    let count = read_count(r, expected_chunks, "opening chunk")?;
    if count != expected_chunks {
        return Err(WireError::Malformed("opening chunk count mismatch".into()));
    }
    let mut chunks = Vec::with_capacity(count);
    for _ in 0..count {
        chunks.push(Decommitment {
            value: r.uint()?,
            randomness: r.uint()?,
        });
    }
    Ok(CoinOpening { chunks })
}

fn put_permutation(w: &mut ByteWriter, pi: &Permutation, profile: Profile) {
    for i in 0..pi.n() {
        match profile {
            Profile::Toy => w.put_u8((pi.image(i) + 1) as u8),
            Profile::Production => w.put_u16((pi.image(i) + 1) as u16),
        }
    }
}

fn read_permutation(
    r: &mut ByteReader<'_>,
    n: usize,
    profile: Profile,
) -> Result<Permutation, WireError> {
    let mut images = Vec::with_capacity(n);
    for _ in 0..n {
        let raw = match profile {
            Profile::Toy => r.u8()? as usize,
            Profile::Production => r.u16()? as usize,
        };
        if raw < 1 || raw > n {
            return Err(WireError::Malformed(
                "permutation image out of range".into(),
            ));
        }
        images.push(raw - 1);
    }
    Permutation::from_images(images)
        .map_err(|_| WireError::Malformed("permutation is not a bijection".into()))
}

pub fn encode_f1<F: Family>(f1: &FlowF1<F>) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.put_raw(&f1.nonce);
    F::write_params(&f1.params, &mut w);
    put_group(&mut w, &f1.commit_group);
    put_count(&mut w, f1.vectors.len());
    put_count(&mut w, f1.vectors.first().map(Vec::len).unwrap_or(0));
    for vector in &f1.vectors {
        for instance in vector {
            F::write_instance(&f1.params, instance, &mut w);
        }
    }
    put_count(&mut w, f1.coin_commitment.len());
    for (c1, c2) in &f1.coin_commitment {
        w.put_uint(c1);
        w.put_uint(c2);
    }
    encode_frame(FlowTag::F1, &w.into_bytes())
}

pub fn decode_f1<F: Family>(body: &[u8], cfg: &ProtocolConfig) -> Result<FlowF1<F>, WireError> {
    let mut r = ByteReader::new(body);
    let mut nonce = [0u8; 16];
    nonce.copy_from_slice(r.take(16)?);
    let params = F::read_params(&mut r, cfg.profile)?;
    let commit_group = read_group(&mut r)?;
    let k = read_count(&mut r, cfg.k_cut, "vector")?;
    let n = read_count(&mut r, cfg.n, "entry")?;
    if k != cfg.k_cut || n != cfg.n {
        return Err(WireError::Malformed("vector dimensions mismatch".into()));
    }
    let mut vectors = Vec::with_capacity(k);
    for _ in 0..k {
        let mut vector = Vec::with_capacity(n);
        for _ in 0..n {
            vector.push(F::read_instance(&params, &mut r)?);
        }
        vectors.push(vector);
    }
    let chunks = read_count(&mut r, u16::MAX as usize, "commitment chunk")?;
    let mut coin_commitment = Vec::with_capacity(chunks);
    for _ in 0..chunks {
        coin_commitment.push((r.uint()?, r.uint()?));
    }
    r.expect_end()?;
    Ok(FlowF1 {
        nonce,
        params,
        commit_group,
        vectors,
        coin_commitment,
    })
}

pub fn encode_f2(f2: &FlowF2) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.put_raw(&f2.nonce);
    put_count(&mut w, f2.coin_commitment.len());
    for c in &f2.coin_commitment {
        w.put_uint(c);
    }
    encode_frame(FlowTag::F2, &w.into_bytes())
}

pub fn decode_f2(body: &[u8], expected_chunks: usize) -> Result<FlowF2, WireError> {
    let mut r = ByteReader::new(body);
    let mut nonce = [0u8; 16];
    nonce.copy_from_slice(r.take(16)?);
    let chunks = read_count(&mut r, expected_chunks, "commitment chunk")?;
    if chunks != expected_chunks {
        return Err(WireError::Malformed(
            "commitment chunk count mismatch".into(),
        ));
    }
    let mut coin_commitment = Vec::with_capacity(chunks);
    for _ in 0..chunks {
        coin_commitment.push(r.uint()?);
    }
    r.expect_end()?;
    Ok(FlowF2 {
        nonce,
        coin_commitment,
    })
}

pub fn encode_f3(f3: &FlowF3) -> Vec<u8> {
    let mut w = ByteWriter::new();
    put_opening(&mut w, &f3.opening);
    encode_frame(FlowTag::F3, &w.into_bytes())
}

pub fn decode_f3(body: &[u8], expected_chunks: usize) -> Result<FlowF3, WireError> {
    let mut r = ByteReader::new(body);
    let opening = read_opening(&mut r, expected_chunks)?;
    r.expect_end()?;
    Ok(FlowF3 { opening })
}

pub fn encode_f4<F: Family>(f4: &FlowF4<F>, params: &F::Params, cfg: &ProtocolConfig) -> Vec<u8> {
    let mut w = ByteWriter::new();
    put_opening(&mut w, &f4.opening);
    put_count(&mut w, f4.openings.len());
    for opening in &f4.openings {
        put_index(&mut w, opening.vector);
        put_index(&mut w, opening.position);
        F::write_witness(params, &opening.witness, &mut w);
    }
    put_count(&mut w, f4.perms.len());
    for (i, pi) in &f4.perms {
        put_index(&mut w, *i);
        put_permutation(&mut w, pi, cfg.profile);
    }
    encode_frame(FlowTag::F4, &w.into_bytes())
}

pub fn decode_f4<F: Family>(
    body: &[u8],
    params: &F::Params,
    cfg: &ProtocolConfig,
    expected_chunks: usize,
) -> Result<FlowF4<F>, WireError> {
    let mut r = ByteReader::new(body);
    let opening = read_opening(&mut r, expected_chunks)?;
    let openings_count = read_count(&mut r, cfg.k_cut * cfg.n, "witness opening")?;
    let mut openings = Vec::with_capacity(openings_count);
    let mut last: Option<(usize, usize)> = None;
    for _ in 0..openings_count {
        let vector = read_index(&mut r, cfg.k_cut, "opening vector")?;
        let position = read_index(&mut r, cfg.n, "opening position")?;
        if let Some(prev) = last {
            if (vector, position) <= prev {
                return Err(WireError::Malformed(
                    "witness openings must be strictly ascending".into(),
                ));
            }
        }
        last = Some((vector, position));
        openings.push(WitnessOpening {
            vector,
            position,
            witness: F::read_witness(params, &mut r)?,
        });
    }
    let perm_count = read_count(&mut r, cfg.k_cut, "reordering")?;
    let mut perms = Vec::with_capacity(perm_count);
    let mut last_i: Option<usize> = None;
    for _ in 0..perm_count {
        let i = read_index(&mut r, cfg.k_cut, "reordering vector")?;
        if let Some(prev) = last_i {
            if i <= prev {
                return Err(WireError::Malformed(
                    "reorderings must be strictly ascending".into(),
                ));
            }
        }
        last_i = Some(i);
        perms.push((i, read_permutation(&mut r, cfg.n, cfg.profile)?));
    }
    r.expect_end()?;
    Ok(FlowF4 {
        opening,
        openings,
        perms,
    })
}

pub fn encode_f5() -> Vec<u8> {
    encode_frame(FlowTag::F5, &[])
}

pub fn decode_f5(body: &[u8]) -> Result<(), WireError> {
    if body.is_empty() {
        Ok(())
    } else {
        Err(WireError::Malformed("F5 carries no payload".into()))
    }
}

pub fn encode_f6<F: Family>(f6: &FlowF6<F>, params: &F::Params, _cfg: &ProtocolConfig) -> Vec<u8> {
    let mut w = ByteWriter::new();
    put_count(&mut w, f6.ciphertexts.len());
    for c in &f6.ciphertexts {
        w.put_bstr(c);
    }
    put_count(&mut w, f6.proj_keys.len());
    for (i, row) in &f6.proj_keys {
        put_index(&mut w, *i);
        for pk in row {
            F::write_proj_key(params, pk, &mut w);
        }
    }
    encode_frame(FlowTag::F6, &w.into_bytes())
}

pub fn decode_f6<F: Family>(
    body: &[u8],
    params: &F::Params,
    cfg: &ProtocolConfig,
) -> Result<FlowF6<F>, WireError> {
    let mut r = ByteReader::new(body);
    let n = read_count(&mut r, cfg.n, "ciphertext")?;
    if n != cfg.n {
        return Err(WireError::Malformed("ciphertext count mismatch".into()));
    }
    let mut ciphertexts = Vec::with_capacity(n);
    for _ in 0..n {
        let c = r.bstr()?;
        if c.len() != cfg.msg_len {
            return Err(WireError::Malformed("ciphertext length mismatch".into()));
        }
        ciphertexts.push(c.to_vec());
    }
    let rows = read_count(&mut r, cfg.k_cut, "projective key row")?;
    let mut proj_keys = Vec::with_capacity(rows);
    let mut last_i: Option<usize> = None;
    for _ in 0..rows {
        let i = read_index(&mut r, cfg.k_cut, "projective key row")?;
        if let Some(prev) = last_i {
            if i <= prev {
                return Err(WireError::Malformed(
                    "projective key rows must be strictly ascending".into(),
                ));
            }
        }
        last_i = Some(i);
        let mut row = Vec::with_capacity(cfg.n);
        for _ in 0..cfg.n {
            row.push(F::read_proj_key(params, &mut r)?);
        }
        proj_keys.push((i, row));
    }
    r.expect_end()?;
    Ok(FlowF6 {
        ciphertexts,
        proj_keys,
    })
}

pub fn encode_abort() -> Vec<u8> {
    encode_frame(FlowTag::Abort, &[])
}

/// Encodes any typed flow into a full frame.
pub fn encode_flow<F: Family>(
    flow: &Flow<F>,
    params: Option<&F::Params>,
    cfg: &ProtocolConfig,
) -> Vec<u8> {
    match flow {
        Flow::F1(f1) => encode_f1::<F>(f1),
        Flow::F2(f2) => encode_f2(f2),
        Flow::F3(f3) => encode_f3(f3),
        Flow::F4(f4) => encode_f4::<F>(f4, params.expect("params required for F4"), cfg),
        Flow::F5 => encode_f5(),
        Flow::F6(f6) => encode_f6::<F>(f6, params.expect("params required for F6"), cfg),
        Flow::Abort => encode_abort(),
    }
}

/// Splits a frame and returns its tag and body.
pub fn split_frame(bytes: &[u8]) -> Result<(FlowTag, &[u8]), WireError> {
    decode_frame(bytes)
}
