//! The table of index differences at which two root boxes can hold an
//! orthogonal pair.
//!
//! The base set holds the root boxes `u` whose box can contain a zero of
//! `1 + sum_k e^{2 i pi phi_k}`, tested against the exact all-ones vector. The
//! table is its union of `+eps` shifts, `eps` in `{0, 1}^5`, mod `N'`. Two root
//! boxes `u`, `v` can hold orthogonal vectors only if `u - v mod N'` is in the
//! table.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::bounds::{BoundKind, Interval, Target};
use super::grid::GridVector;
use super::multiscale::{MultiscaleEngine, PreparedColumn};

const MAGIC: &[u8; 4] = b"ORT1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn to_le_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        bytes.truncate(self.len.div_ceil(8));
        bytes
    }

    fn from_le_bytes(len: usize, bytes: &[u8]) -> Self {
        let mut s = Self::new(len);
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut w = [0u8; 8];
            w[..chunk.len()].copy_from_slice(chunk);
            s.words[i] = u64::from_le_bytes(w);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrtTable {
    pub nprime: u32,
    pub generations: u32,
    members: Bitset,
}

/// Root boxes whose multiscale improved bound against the all-ones vector
/// survives down to level `generations`.
pub fn compute_ort_base(nprime: u32, generations: u32) -> Bitset {
    compute_difference_base(nprime, generations, Target::Orthogonal)
}

/// As [`compute_ort_base`] for either target.
pub fn compute_difference_base(nprime: u32, generations: u32, target: Target) -> Bitset {
    let engine = MultiscaleEngine::new(nprime, generations);
    let cols = [PreparedColumn::new(&[Interval::point(0.0); 5])];
    let n = nprime as usize;
    let chunk = n.pow(3);
    let flags: Vec<Vec<bool>> = (0..n * n)
        .into_par_iter()
        .map(|c| {
            (c * chunk..(c + 1) * chunk)
                .map(|i| {
                    let v = GridVector::from_linear_index(i, nprime);
                    engine.survives(&v, &cols, BoundKind::Improved, target)
                })
                .collect()
        })
        .collect();
    let mut out = Bitset::new(n.pow(5));
    for (i, f) in flags.into_iter().flatten().enumerate() {
        if f {
            out.set(i);
        }
    }
    out
}

fn shift_union(base: &Bitset, nprime: u32) -> Bitset {
    let mut out = Bitset::new(base.len());
    for i in base.iter_ones() {
        let j = GridVector::from_linear_index(i, nprime).indices;
        for e in 0..32 {
            let shifted: [u32; 5] = std::array::from_fn(|k| (j[k] + ((e >> k) & 1)) % nprime);
            out.set(GridVector::root(shifted).linear_index(nprime));
        }
    }
    out
}

pub fn compute_ort(nprime: u32, generations: u32) -> OrtTable {
    let base = compute_ort_base(nprime, generations);
    OrtTable { nprime, generations, members: shift_union(&base, nprime) }
}

impl OrtTable {
    pub fn from_base(base: &Bitset, nprime: u32, generations: u32) -> Self {
        Self { nprime, generations, members: shift_union(base, nprime) }
    }

    pub fn count(&self) -> u64 {
        self.members.count()
    }

    pub fn members(&self) -> &Bitset {
        &self.members
    }

    /// Whether the root box with these indices is in the table.
    #[inline]
    pub fn contains(&self, indices: &[u32; 5]) -> bool {
        let n = self.nprime as usize;
        self.members.get(indices.iter().fold(0usize, |acc, &j| acc * n + j as usize))
    }

    /// Membership of `u - v mod N'`; no checks on the inputs.
    #[inline]
    pub fn orthogonal_indices(&self, u: &[u32; 5], v: &[u32; 5]) -> bool {
        let n = self.nprime;
        self.contains(&std::array::from_fn(|k| (u[k] + n - v[k]) % n))
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.nprime.to_le_bytes())?;
        w.write_all(&self.generations.to_le_bytes())?;
        w.write_all(&self.count().to_le_bytes())?;
        w.write_all(&self.members.to_le_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut head = [0u8; 20];
        r.read_exact(&mut head).map_err(|_| Error::Format("truncated header".into()))?;
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let nprime = u32::from_le_bytes(head[4..8].try_into().unwrap());
        let generations = u32::from_le_bytes(head[8..12].try_into().unwrap());
        let count = u64::from_le_bytes(head[12..20].try_into().unwrap());
        if !(2..=64).contains(&nprime) {
            return Err(Error::Format(format!("implausible N' = {nprime}")));
        }
        let len = (nprime as usize).pow(5);
        let mut bytes = Vec::with_capacity(len.div_ceil(8));
        r.read_to_end(&mut bytes)?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Format(format!("expected {} bitset bytes, found {}", len.div_ceil(8), bytes.len())));
        }
        let members = Bitset::from_le_bytes(len, &bytes);
        if members.count() != count {
            return Err(Error::Format(format!("header count {count} but {} bits set", members.count())));
        }
        Ok(Self { nprime, generations, members })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// Loads the table at `path` if it matches `(nprime, generations)`,
    /// otherwise computes it and writes it there.
    pub fn load_or_compute(path: &Path, nprime: u32, generations: u32) -> Result<Self> {
        if path.exists() {
            let t = Self::load(path)?;
            if t.nprime == nprime && t.generations == generations {
                return Ok(t);
            }
        }
        let t = compute_ort(nprime, generations);
        t.save(path)?;
        Ok(t)
    }
}

/// Whether root boxes `u` and `v` on the `N'` grid can hold orthogonal vectors.
pub fn are_nprime_orthogonal(u: &GridVector, v: &GridVector, nprime: u32, table: &OrtTable) -> Result<bool> {
    if nprime != table.nprime {
        return Err(Error::TableMismatch { table: table.nprime, requested: nprime });
    }
    if u.level != 0 || v.level != 0 {
        return Err(Error::Precondition("N'-orthogonality is defined on root boxes".into()));
    }
    if u.indices.iter().chain(&v.indices).any(|&j| j >= nprime) {
        return Err(Error::Precondition(format!("indices must be below N' = {nprime}")));
    }
    Ok(table.orthogonal_indices(&u.indices, &v.indices))
}
