use std::borrow::Cow;
use std::fs;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::store::{self, write_atomically, LayerStore};
use super::{CountStats, MemoryCap};
use crate::count::BigCount;
use crate::error::{Error, Result};
use crate::mask::{allowed_bits, bit_positions, check_n, full_bits, reflect_bits};

const VALUES_FILE: &str = "values.ckpt";
const KEYS_MAGIC: &[u8; 4] = b"3FRK";
const KEYS_VERSION: u16 = 1;

/// Parents expanded per batch before their children are sorted and deduped.
const EXPAND_CHUNK: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct LayeredOptions {
    /// Store one representative per reflection pair.
    pub symmetry: bool,
    /// Where key layers are spilled and value layers checkpointed. `None`
    /// keeps everything in memory.
    pub spill_dir: Option<PathBuf>,
    /// Worker threads.
    pub parallelism: usize,
    pub memory_cap: MemoryCap,
    /// Stop with [`Error::Interrupted`] once this value layer has been
    /// checkpointed. Only honoured with a `spill_dir`.
    pub stop_after_layer: Option<usize>,
    /// Per-layer progress on stderr.
    pub progress: bool,
}

impl Default for LayeredOptions {
    fn default() -> Self {
        LayeredOptions {
            symmetry: false,
            spill_dir: None,
            parallelism: 1,
            memory_cap: MemoryCap::default(),
            stop_after_layer: None,
            progress: false,
        }
    }
}

enum KeyLayer {
    Resident(Vec<u128>),
    Spilled { path: PathBuf, len: usize },
}

impl KeyLayer {
    fn len(&self) -> usize {
        match self {
            KeyLayer::Resident(v) => v.len(),
            KeyLayer::Spilled { len, .. } => *len,
        }
    }

    fn resident_len(&self) -> usize {
        match self {
            KeyLayer::Resident(v) => v.len(),
            KeyLayer::Spilled { .. } => 0,
        }
    }
}

fn keys_path(dir: &Path, layer: usize) -> PathBuf {
    dir.join(format!("reach-{layer:03}.keys"))
}

fn write_keys(path: &Path, n: usize, layer: usize, symmetry: bool, keys: &[u128]) -> Result<()> {
    let mut body = Vec::with_capacity(keys.len() * 16);
    for k in keys {
        body.extend_from_slice(&k.to_be_bytes());
    }
    write_atomically(path, |w| {
        w.write_all(KEYS_MAGIC)?;
        w.write_all(&KEYS_VERSION.to_be_bytes())?;
        w.write_all(&[n as u8, layer as u8, u8::from(symmetry)])?;
        w.write_all(&(keys.len() as u64).to_be_bytes())?;
        w.write_all(Sha256::digest(&body).as_slice())?;
        w.write_all(&body)?;
        Ok(())
    })
}

fn read_keys(path: &Path, n: usize, layer: usize, symmetry: bool) -> Result<Vec<u128>> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut header = [0u8; 49];
    r.read_exact(&mut header)
        .map_err(|_| Error::Corrupt(format!("{}: header truncated", path.display())))?;
    if &header[..4] != KEYS_MAGIC {
        return Err(Error::Corrupt(format!("{}: bad magic", path.display())));
    }
    let version = u16::from_be_bytes([header[4], header[5]]);
    if version != KEYS_VERSION {
        return Err(Error::Version {
            found: version,
            expected: KEYS_VERSION,
        });
    }
    if header[6..9] != [n as u8, layer as u8, u8::from(symmetry)] {
        return Err(Error::CheckpointMismatch(format!(
            "{} was written for a different run",
            path.display()
        )));
    }
    let count = u64::from_be_bytes(header[9..17].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if Sha256::digest(&body).as_slice() != &header[17..49] {
        return Err(Error::Checksum);
    }
    if body.len() != count * 16 {
        return Err(Error::Corrupt(format!(
            "{}: length mismatch",
            path.display()
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| u128::from_be_bytes(c.try_into().unwrap()))
        .collect())
}

struct Run<'a> {
    n: usize,
    opts: &'a LayeredOptions,
    stats: CountStats,
}

impl Run<'_> {
    #[inline]
    fn canon(&self, bits: u128) -> u128 {
        if self.opts.symmetry {
            bits.min(reflect_bits(self.n, bits))
        } else {
            bits
        }
    }

    fn check_budget(&mut self, values: usize, keys: usize, layer: usize) -> Result<()> {
        self.stats.peak_resident_states = self.stats.peak_resident_states.max(values as u64);
        self.stats.peak_index_states = self.stats.peak_index_states.max(keys as u64);
        let total = (values + keys) as u64;
        if total > self.opts.memory_cap.states() {
            return Err(Error::MemoryBudget {
                cap: self.opts.memory_cap.states(),
                states: total,
                layer: Some(layer),
            });
        }
        Ok(())
    }

    fn children<'s>(&'s self, parent: u128) -> impl Iterator<Item = u128> + 's {
        bit_positions(allowed_bits(self.n, parent))
            .map(move |j| self.canon(parent & !(1u128 << (j - 1))))
    }

    /// Sorted, deduplicated children of every mask in `parents`.
    fn expand(&mut self, parents: &[u128], held: usize, layer: usize) -> Result<Vec<u128>> {
        let mut acc: Vec<u128> = Vec::new();
        let mut compacted = 0usize;
        for chunk in parents.chunks(EXPAND_CHUNK) {
            let mut part: Vec<u128> = chunk
                .par_iter()
                .flat_map_iter(|&p| self.children(p))
                .collect();
            part.par_sort_unstable();
            part.dedup();
            acc.extend_from_slice(&part);
            if acc.len() > 2 * compacted + EXPAND_CHUNK {
                acc.par_sort_unstable();
                acc.dedup();
                compacted = acc.len();
            }
            self.check_budget(0, held + parents.len() + acc.len() + part.len(), layer)?;
        }
        acc.par_sort_unstable();
        acc.dedup();
        acc.shrink_to_fit();
        Ok(acc)
    }

    /// Reachable masks per popcount, from the all-unplaced mask down.
    fn reach(&mut self) -> Result<Vec<KeyLayer>> {
        let n = self.n;
        let mut layers: Vec<Option<KeyLayer>> = (0..=n).map(|_| None).collect();
        let mut current = vec![self.canon(full_bits(n))];
        for m in (1..=n).rev() {
            let held: usize = layers.iter().flatten().map(KeyLayer::resident_len).sum();
            let next = self.expand(&current, held, m - 1)?;
            if self.opts.progress {
                eprintln!("reach: layer {:>3} -> {} masks", m - 1, next.len());
            }
            layers[m] = Some(self.park(m, current)?);
            current = next;
        }
        layers[0] = Some(self.park(0, current)?);
        Ok(layers.into_iter().map(Option::unwrap).collect())
    }

    fn park(&self, layer: usize, keys: Vec<u128>) -> Result<KeyLayer> {
        match &self.opts.spill_dir {
            Some(dir) => {
                let path = keys_path(dir, layer);
                write_keys(&path, self.n, layer, self.opts.symmetry, &keys)?;
                Ok(KeyLayer::Spilled {
                    path,
                    len: keys.len(),
                })
            }
            None => Ok(KeyLayer::Resident(keys)),
        }
    }

    fn load<'l>(&self, layer: usize, layers: &'l [KeyLayer]) -> Result<Cow<'l, [u128]>> {
        match &layers[layer] {
            KeyLayer::Resident(v) => Ok(Cow::Borrowed(v)),
            KeyLayer::Spilled { path, len } => {
                let keys = read_keys(path, self.n, layer, self.opts.symmetry)?;
                if keys.len() != *len {
                    return Err(Error::Corrupt(format!(
                        "{}: length changed",
                        path.display()
                    )));
                }
                Ok(Cow::Owned(keys))
            }
        }
    }

    /// Fills value layers `start.layer_index() + 1 ..= n` and returns the value
    /// of the all-unplaced mask.
    fn accumulate(&mut self, layers: &[KeyLayer], start: LayerStore) -> Result<BigCount> {
        let n = self.n;
        let index: usize = layers.iter().map(KeyLayer::resident_len).sum();
        let first = start.layer_index() + 1;
        let (mut prev_keys, mut prev_vals) = start.into_parts();
        for m in first..=n {
            let keys = self.load(m, layers)?;
            self.check_budget(prev_keys.len() + keys.len(), index, m)?;
            let vals: Vec<BigCount> = keys
                .par_iter()
                .map(|&mask| {
                    let mut total = BigCount::ZERO;
                    for child in self.children(mask) {
                        let at = prev_keys
                            .binary_search(&child)
                            .expect("child mask missing from reachable layer");
                        total += &prev_vals[at];
                    }
                    total
                })
                .collect();
            if self.opts.progress {
                eprintln!("accumulate: layer {m:>3} ({} masks)", keys.len());
            }
            let keys = keys.into_owned();
            if let Some(dir) = &self.opts.spill_dir {
                write_atomically(&dir.join(VALUES_FILE), |w| {
                    store::write_layer(w, n, m, self.opts.symmetry, &keys, &vals)
                })?;
                if self.opts.stop_after_layer == Some(m) && m < n {
                    return Err(Error::Interrupted {
                        layer: m,
                        dir: dir.clone(),
                    });
                }
            }
            prev_keys = keys;
            prev_vals = vals;
        }
        debug_assert_eq!(prev_keys, [full_bits(n)]);
        Ok(prev_vals.swap_remove(0))
    }

    fn finish(&mut self, layers: &[KeyLayer], started: Instant) {
        self.stats.layer_sizes = layers.iter().map(|l| l.len() as u64).collect();
        self.stats.visited_states = self.stats.layer_sizes.iter().sum();
        self.stats.elapsed = started.elapsed();
    }

    fn cleanup(&self, layers: &[KeyLayer]) {
        if let Some(dir) = &self.opts.spill_dir {
            for l in layers {
                if let KeyLayer::Spilled { path, .. } = l {
                    let _ = fs::remove_file(path);
                }
            }
            let _ = fs::remove_file(dir.join(VALUES_FILE));
        }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool")
        .install(f)
}

fn prepare_dir(opts: &LayeredOptions) -> Result<()> {
    if let Some(dir) = &opts.spill_dir {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

/// `θ(n)` by forward reachability then backward accumulation over popcount
/// layers. The result does not depend on `parallelism` or `symmetry`.
///
/// With a `spill_dir`, key layers live on disk between passes and every
/// completed value layer is checkpointed there; the files are removed once
/// the count finishes.
pub fn count_layered(n: usize, opts: &LayeredOptions) -> Result<(BigCount, CountStats)> {
    check_n(n)?;
    prepare_dir(opts)?;
    let started = Instant::now();
    in_pool(opts.parallelism, || {
        let mut run = Run {
            n,
            opts,
            stats: CountStats::default(),
        };
        let layers = run.reach()?;
        let base = run.load(0, &layers)?.into_owned();
        let ones = vec![BigCount::ONE; base.len()];
        let start = LayerStore::from_parts(n, 0, opts.symmetry, base, ones);
        let value = run.accumulate(&layers, start)?;
        run.finish(&layers, started);
        run.cleanup(&layers);
        Ok((value, run.stats))
    })
}

/// Continues an interrupted [`count_layered`] run from the value checkpoint in
/// `dir`. `n` and the symmetry flag come from the checkpoint; spilled key
/// layers are reused when intact and recomputed otherwise.
pub fn resume_layered(dir: &Path, opts: &LayeredOptions) -> Result<(BigCount, CountStats)> {
    let started = Instant::now();
    let store = store::resume(&dir.join(VALUES_FILE))?;
    let n = store.n();
    let opts = LayeredOptions {
        symmetry: store.symmetry(),
        spill_dir: Some(dir.to_path_buf()),
        ..opts.clone()
    };
    in_pool(opts.parallelism, || {
        let mut run = Run {
            n,
            opts: &opts,
            stats: CountStats::default(),
        };
        let spilled: Result<Vec<KeyLayer>> = (0..=n)
            .map(|m| {
                let path = keys_path(dir, m);
                let len = read_keys(&path, n, m, opts.symmetry)?.len();
                Ok(KeyLayer::Spilled { path, len })
            })
            .collect();
        let layers = match spilled {
            Ok(layers) => layers,
            Err(_) => run.reach()?,
        };
        if run.load(store.layer_index(), &layers)?.as_ref() != store.keys() {
            return Err(Error::CheckpointMismatch(format!(
                "layer {} keys differ from the reachable set",
                store.layer_index()
            )));
        }
        let value = run.accumulate(&layers, store)?;
        run.finish(&layers, started);
        run.cleanup(&layers);
        Ok((value, run.stats))
    })
}

/// Reachable masks per popcount layer (index = number of unplaced integers),
/// without symmetry reduction.
pub fn visited_state_counts(n: usize) -> Result<Vec<u64>> {
    check_n(n)?;
    let opts = LayeredOptions {
        memory_cap: MemoryCap::UNLIMITED,
        ..LayeredOptions::default()
    };
    let mut run = Run {
        n,
        opts: &opts,
        stats: CountStats::default(),
    };
    Ok(run.reach()?.iter().map(|l| l.len() as u64).collect())
}
