//! Value-layer checkpoints.
//!
//! Layout (all integers big-endian):
//!
//! ```text
//! magic           4 bytes  "3FLS"
//! version         u16
//! n               u8
//! layer_index     u8
//! symmetry        u8       0 or 1
//! record_count    u64
//! checksum        32 bytes SHA-256 of the record section
//! records         record_count x { key: 16 bytes, len: u32, magnitude: len bytes }
//! ```

use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::count::BigCount;
use crate::error::{Error, Result};
use crate::mask::{check_n, full_bits};

pub const CHECKPOINT_VERSION: u16 = 1;
const MAGIC: &[u8; 4] = b"3FLS";
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 1 + 8 + 32;
const MAX_MAGNITUDE_BYTES: usize = 1 << 20;

/// All values of one popcount layer, keyed by mask, sorted by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerStore {
    n: usize,
    layer_index: usize,
    symmetry: bool,
    keys: Vec<u128>,
    values: Vec<BigCount>,
}

impl LayerStore {
    /// `records` must have strictly ascending keys of popcount `layer_index`.
    pub fn new(
        n: usize,
        layer_index: usize,
        symmetry: bool,
        records: Vec<(u128, BigCount)>,
    ) -> Result<Self> {
        let (keys, values) = records.into_iter().unzip();
        let store = LayerStore {
            n,
            layer_index,
            symmetry,
            keys,
            values,
        };
        store.validate()?;
        Ok(store)
    }

    pub(crate) fn from_parts(
        n: usize,
        layer_index: usize,
        symmetry: bool,
        keys: Vec<u128>,
        values: Vec<BigCount>,
    ) -> Self {
        LayerStore {
            n,
            layer_index,
            symmetry,
            keys,
            values,
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<u128>, Vec<BigCount>) {
        (self.keys, self.values)
    }

    fn validate(&self) -> Result<()> {
        check_n(self.n).map_err(|_| Error::Corrupt(format!("n = {}", self.n)))?;
        if self.layer_index > self.n {
            return Err(Error::Corrupt(format!(
                "layer {} exceeds n = {}",
                self.layer_index, self.n
            )));
        }
        if self.keys.len() != self.values.len() {
            return Err(Error::Corrupt("key/value count mismatch".into()));
        }
        for (i, &k) in self.keys.iter().enumerate() {
            if k & !full_bits(self.n) != 0 || k.count_ones() as usize != self.layer_index {
                return Err(Error::Corrupt(format!(
                    "key {k:#x} does not belong to this layer"
                )));
            }
            if i > 0 && self.keys[i - 1] >= k {
                return Err(Error::Corrupt("keys are not strictly ascending".into()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layer_index(&self) -> usize {
        self.layer_index
    }

    pub fn symmetry(&self) -> bool {
        self.symmetry
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub fn get(&self, key: u128) -> Option<&BigCount> {
        self.keys.binary_search(&key).ok().map(|i| &self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, &BigCount)> {
        self.keys.iter().copied().zip(self.values.iter())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        write_layer(
            w,
            self.n,
            self.layer_index,
            self.symmetry,
            &self.keys,
            &self.values,
        )
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(truncated)?;
        if &header[..4] != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = u16::from_be_bytes([header[4], header[5]]);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Version {
                found: version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let n = usize::from(header[6]);
        let layer_index = usize::from(header[7]);
        let symmetry = match header[8] {
            0 => false,
            1 => true,
            other => return Err(Error::Corrupt(format!("symmetry flag {other}"))),
        };
        let count = u64::from_be_bytes(header[9..17].try_into().unwrap());
        let checksum = &header[17..49];

        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if Sha256::digest(&body).as_slice() != checksum {
            return Err(Error::Checksum);
        }

        let mut keys = Vec::new();
        let mut values = Vec::new();
        let mut rest = body.as_slice();
        for _ in 0..count {
            if rest.len() < 20 {
                return Err(Error::Corrupt("record section truncated".into()));
            }
            let key = u128::from_be_bytes(rest[..16].try_into().unwrap());
            let len = u32::from_be_bytes(rest[16..20].try_into().unwrap()) as usize;
            rest = &rest[20..];
            if len > MAX_MAGNITUDE_BYTES || rest.len() < len {
                return Err(Error::Corrupt(format!("record length {len}")));
            }
            keys.push(key);
            values.push(BigCount::from_be_bytes(&rest[..len]));
            rest = &rest[len..];
        }
        if !rest.is_empty() {
            return Err(Error::Corrupt("trailing bytes after records".into()));
        }
        let store = LayerStore::from_parts(n, layer_index, symmetry, keys, values);
        store.validate()?;
        Ok(store)
    }
}

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Corrupt("header truncated".into())
    } else {
        Error::Io(e)
    }
}

pub(crate) fn write_layer<W: Write>(
    mut w: W,
    n: usize,
    layer_index: usize,
    symmetry: bool,
    keys: &[u128],
    values: &[BigCount],
) -> Result<()> {
    debug_assert_eq!(keys.len(), values.len());
    let mut body = Vec::with_capacity(keys.len() * 32);
    for (k, v) in keys.iter().zip(values) {
        let mag = v.to_be_bytes();
        body.extend_from_slice(&k.to_be_bytes());
        body.extend_from_slice(&(mag.len() as u32).to_be_bytes());
        body.extend_from_slice(&mag);
    }
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_be_bytes())?;
    w.write_all(&[n as u8, layer_index as u8, u8::from(symmetry)])?;
    w.write_all(&(keys.len() as u64).to_be_bytes())?;
    w.write_all(Sha256::digest(&body).as_slice())?;
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

/// Writes `store` to `path` via a temporary file and rename, so a crash
/// mid-write leaves the previous checkpoint intact.
pub fn checkpoint(store: &LayerStore, path: &Path) -> Result<()> {
    write_atomically(path, |w| store.write_to(w))
}

pub(crate) fn write_atomically<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<()>,
{
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        write(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn resume(path: &Path) -> Result<LayerStore> {
    LayerStore::read_from(BufReader::new(fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> LayerStore {
        LayerStore::new(
            10,
            5,
            false,
            vec![
                (0b11111, BigCount::from(3u64)),
                (0b1011011000, BigCount::ZERO),
                (
                    0b1111100000,
                    "123456789012345678901234567890123456789012"
                        .parse()
                        .unwrap(),
                ),
            ],
        )
        .unwrap()
    }

    fn encode(s: &LayerStore) -> Vec<u8> {
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        buf
    }

    #[test]
    fn header_layout() {
        let buf = encode(&sample());
        assert_eq!(&buf[..4], b"3FLS");
        assert_eq!(&buf[4..6], &[0, 1]);
        assert_eq!(&buf[6..9], &[10, 5, 0]);
        assert_eq!(u64::from_be_bytes(buf[9..17].try_into().unwrap()), 3);
        // first record: key, then 4-byte length 1, then the byte 3
        assert_eq!(
            u128::from_be_bytes(buf[49..65].try_into().unwrap()),
            0b11111
        );
        assert_eq!(&buf[65..70], &[0, 0, 0, 1, 3]);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("layer.ckpt");
        checkpoint(&sample(), &path).unwrap();
        assert_eq!(resume(&path).unwrap(), sample());
    }

    #[test]
    fn tampered_payload_fails_checksum() {
        let mut buf = encode(&sample());
        let last = buf.len() - 1;
        buf[last] ^= 0x40;
        assert!(matches!(
            LayerStore::read_from(buf.as_slice()),
            Err(Error::Checksum)
        ));
    }

    #[test]
    fn version_and_magic_are_checked() {
        let mut buf = encode(&sample());
        buf[5] = 9;
        assert!(matches!(
            LayerStore::read_from(buf.as_slice()),
            Err(Error::Version {
                found: 9,
                expected: 1
            })
        ));
        buf[0] = b'X';
        assert!(matches!(
            LayerStore::read_from(buf.as_slice()),
            Err(Error::Corrupt(_))
        ));
        assert!(matches!(
            LayerStore::read_from(&buf[..10]),
            Err(Error::Corrupt(_))
        ));
    }

    #[test]
    fn rejects_keys_from_other_layers() {
        assert!(LayerStore::new(10, 2, false, vec![(0b111, BigCount::ONE)]).is_err());
        assert!(LayerStore::new(
            10,
            1,
            false,
            vec![(0b10, BigCount::ONE), (0b1, BigCount::ONE)]
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            n in 1usize..=127,
            raw in proptest::collection::vec((any::<u128>(), any::<u128>(), any::<u8>()), 0..40),
        ) {
            // Reduce random keys onto the layer of popcount min(n, 3).
            let layer = n.min(3);
            let mut records: Vec<(u128, BigCount)> = raw
                .into_iter()
                .map(|(k, v, scale)| {
                    let mut key = 0u128;
                    let mut bit = (k % n as u128) as u32;
                    while (key.count_ones() as usize) < layer {
                        key |= 1 << bit;
                        bit = (bit + 1) % n as u32;
                    }
                    let value = &BigCount::from(v) * &BigCount::from(u64::from(scale) << 56);
                    (key, value)
                })
                .collect();
            records.sort_by_key(|r| r.0);
            records.dedup_by_key(|r| r.0);
            let store = LayerStore::new(n, layer, n % 2 == 0, records).unwrap();
            let back = LayerStore::read_from(encode(&store).as_slice()).unwrap();
            prop_assert_eq!(back, store);
        }
    }
}
