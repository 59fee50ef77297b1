//! Dense brute-force references: every variable subset is a bit mask, chains
//! are dense bit vectors, and ranks come from plain Gaussian elimination.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use concurrence::complex::Simplex;
use concurrence::BinaryMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(seed: u64, max_vars: usize, max_obs: usize) -> BinaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(1..=max_vars);
    let n = rng.gen_range(1..=max_obs);
    let p = rng.gen_range(0.25..0.75);
    let rows = (0..n)
        .map(|_| (0..v).map(|_| u8::from(rng.gen_bool(p))).collect())
        .collect();
    BinaryMatrix::new((0..v).map(|i| format!("v{i}")).collect(), rows).unwrap()
}

pub fn mask_of(s: &Simplex) -> u32 {
    s.vertices().iter().fold(0, |m, &v| m | 1 << v)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Bits(pub Vec<u64>);

impl Bits {
    fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

/// Fully reduced row echelon basis; reduction against it is linear and canonical.
struct Rref {
    rows: Vec<(usize, Bits)>,
}

impl Rref {
    fn new(vectors: Vec<Bits>) -> Self {
        let mut r = Rref { rows: Vec::new() };
        for v in vectors {
            let v = r.reduce(v);
            if let Some(p) = v.lowest() {
                for (_, row) in r.rows.iter_mut() {
                    if row.get(p) {
                        row.xor(&v);
                    }
                }
                r.rows.push((p, v));
            }
        }
        r
    }
    fn reduce(&self, mut v: Bits) -> Bits {
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor(row);
            }
        }
        v
    }
    fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub struct Dense {
    pub n_vars: usize,
    /// Concurrence count of every subset mask.
    pub counts: Vec<usize>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct NarrowOracle {
    /// Short cycles (as vertex masks) grouped by homology class.
    pub classes: BTreeSet<BTreeSet<u32>>,
    /// Unordered pairs of classes whose sum is also narrow.
    pub adjacent: BTreeSet<(BTreeSet<u32>, BTreeSet<u32>)>,
}

impl Dense {
    pub fn new(bm: &BinaryMatrix) -> Self {
        let v = bm.n_vars();
        assert!(v <= 12);
        let rows: Vec<u32> = (0..bm.n_obs())
            .map(|o| (0..v).filter(|&j| bm.get(o, j)).fold(0, |m, j| m | 1 << j))
            .collect();
        let counts = (0..1u32 << v)
            .map(|s| rows.iter().filter(|&&r| r & s == s).count())
            .collect();
        Dense { n_vars: v, counts }
    }

    pub fn levels(&self) -> usize {
        self.counts.iter().skip(1).copied().max().unwrap_or(0)
    }

    pub fn frame(&self, f: usize, d: usize) -> Vec<u32> {
        (1..1u32 << self.n_vars)
            .filter(|s| s.count_ones() as usize == d + 1 && self.counts[*s as usize] >= f)
            .collect()
    }

    fn boundary_vectors(&self, f: usize, k: usize) -> Vec<Bits> {
        if k == 0 {
            return Vec::new();
        }
        let faces = self.frame(f, k - 1);
        let index: BTreeMap<u32, usize> = faces.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        self.frame(f, k)
            .into_iter()
            .map(|s| self.chain(&index, faces.len(), facets(s)))
            .collect()
    }

    fn chain(&self, index: &BTreeMap<u32, usize>, n: usize, masks: impl Iterator<Item = u32>) -> Bits {
        let mut b = Bits::zero(n);
        for m in masks {
            b.flip(index[&m]);
        }
        b
    }

    pub fn betti(&self, f: usize, d: usize) -> usize {
        let n = self.frame(f, d).len();
        let r_d = Rref::new(self.boundary_vectors(f, d)).rank();
        let r_up = Rref::new(self.boundary_vectors(f, d + 1)).rank();
        n - r_d - r_up
    }

    pub fn euler(&self, f: usize) -> i64 {
        (1..1u32 << self.n_vars)
            .filter(|s| self.counts[*s as usize] >= f)
            .map(|s| if s.count_ones() % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    pub fn narrow(&self, f: usize, d: usize) -> NarrowOracle {
        let faces = self.frame(f, d);
        let index: BTreeMap<u32, usize> = faces.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let bounds = Rref::new(self.boundary_vectors(f, d + 1));
        let mut groups: BTreeMap<Bits, BTreeSet<u32>> = BTreeMap::new();
        for s in (1..1u32 << self.n_vars).filter(|s| s.count_ones() as usize == d + 2) {
            if !facets(s).all(|t| index.contains_key(&t)) {
                continue;
            }
            let nf = bounds.reduce(self.chain(&index, faces.len(), facets(s)));
            if !nf.is_zero() {
                groups.entry(nf).or_default().insert(s);
            }
        }
        let keys: Vec<&Bits> = groups.keys().collect();
        let mut adjacent = BTreeSet::new();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                let mut sum = keys[i].clone();
                sum.xor(keys[j]);
                if groups.contains_key(&sum) {
                    let (a, b) = (groups[keys[i]].clone(), groups[keys[j]].clone());
                    adjacent.insert(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        NarrowOracle {
            classes: groups.into_values().collect(),
            adjacent,
        }
    }
}

fn facets(s: u32) -> impl Iterator<Item = u32> {
    (0..32).filter(move |b| s >> b & 1 == 1).map(move |b| s & !(1 << b))
}

/// The library's narrow classes in the oracle's shape.
pub fn narrow_from_library(
    fc: &concurrence::FilteredComplex,
    f: usize,
    d: usize,
) -> concurrence::Result<NarrowOracle> {
    use concurrence::localization::{adjacent_among, narrow_classes};
    let found = narrow_classes(fc, f, d)?;
    let sets: Vec<BTreeSet<u32>> = found
        .iter()
        .map(|c| c.short_cycles.iter().map(mask_of).collect())
        .collect();
    let adjacent = adjacent_among(&found)
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (sets[i].clone(), sets[j].clone());
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    Ok(NarrowOracle {
        classes: sets.into_iter().collect(),
        adjacent,
    })
}
