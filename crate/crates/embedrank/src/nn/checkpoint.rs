//! Binary model checkpoints: magic, version, JSON metadata, then raw
//! little-endian f64 parameter blocks. Writing the same parameters and
//! metadata always produces identical bytes.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"ERCK";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Layout: magic (4 bytes), version (u32 LE), metadata length (u64 LE),
/// metadata (UTF-8 JSON), block count (u64 LE), then per block a u64 LE
/// length followed by that many f64 LE values.
pub fn write_checkpoint(path: &Path, meta: &serde_json::Value, blocks: &[&[f64]]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(CHECKPOINT_MAGIC).map_err(io)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes()).map_err(io)?;
    let meta_bytes = serde_json::to_vec(meta)
        .map_err(|e| Error::Invalid(format!("unserializable checkpoint metadata: {e}")))?;
    w.write_all(&(meta_bytes.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&meta_bytes).map_err(io)?;
    w.write_all(&(blocks.len() as u64).to_le_bytes()).map_err(io)?;
    for block in blocks {
        w.write_all(&(block.len() as u64).to_le_bytes()).map_err(io)?;
        for v in *block {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_checkpoint(path: &Path) -> Result<(serde_json::Value, Vec<Vec<f64>>)> {
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingArtifact(path.to_path_buf(), "train-embedder".into())
        } else {
            Error::io(path, e)
        }
    })?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Data(format!("{}: not a model checkpoint (bad magic)", path.display())));
    }
    let version = read_u32(&mut r, path)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Data(format!(
            "{}: unsupported checkpoint version {version}",
            path.display()
        )));
    }
    let meta_len = read_u64(&mut r, path)? as usize;
    let mut meta_bytes = vec![0u8; meta_len];
    r.read_exact(&mut meta_bytes).map_err(|e| Error::io(path, e))?;
    let meta: serde_json::Value = serde_json::from_slice(&meta_bytes)
        .map_err(|e| Error::Data(format!("{}: corrupt checkpoint metadata: {e}", path.display())))?;

    let n_blocks = read_u64(&mut r, path)? as usize;
    let mut blocks = Vec::with_capacity(n_blocks);
    for _ in 0..n_blocks {
        let len = read_u64(&mut r, path)? as usize;
        let mut buf = vec![0u8; len * 8];
        r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
        let block = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        blocks.push(block);
    }
    Ok((meta, blocks))
}

fn read_u32<R: Read>(r: &mut R, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let meta = serde_json::json!({"arch": "test", "seed": 7});
        let b1 = vec![1.5, -2.25, 1e-300, f64::MIN_POSITIVE];
        let b2 = vec![0.1 + 0.2];
        write_checkpoint(&path, &meta, &[&b1, &b2]).unwrap();
        let (meta2, blocks) = read_checkpoint(&path).unwrap();
        assert_eq!(meta2, meta);
        assert_eq!(blocks.len(), 2);
        for (a, b) in b1.iter().zip(&blocks[0]) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(b2[0].to_bits(), blocks[1][0].to_bits());
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        let meta = serde_json::json!({"k": [1, 2, 3]});
        let block = vec![3.14159, -2.71828];
        write_checkpoint(&p1, &meta, &[&block]).unwrap();
        write_checkpoint(&p2, &meta, &[&block]).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.ckpt");
        std::fs::write(&path, b"NOPE rest of file").unwrap();
        let err = read_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
    }

    #[test]
    fn truncated_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let meta = serde_json::json!({});
        let block = vec![1.0, 2.0, 3.0];
        write_checkpoint(&path, &meta, &[&block]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(read_checkpoint(&path).is_err());
    }
}
