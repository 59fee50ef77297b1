//! Localization of homology classes by short cycles.
//!
//! A short `d`-cycle on a `(d+2)`-set `S` is the boundary of the simplex `S`:
//! its `d + 2` facets. It exists in a frame when all facets do, and it is a
//! nonzero class there unless it bounds. Everything here is computed level by
//! level; classes are not tracked across levels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::gf2::{self, EchelonBasis};
use crate::persistence::{boundary_indices, Decomposition, PersistencePair};

/// A same-dimension chain with Z/2 coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainGF2 {
    dim: usize,
    simplices: BTreeSet<Simplex>,
}

impl ChainGF2 {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            simplices: BTreeSet::new(),
        }
    }

    /// Sum of the given simplices; repeated simplices cancel in pairs.
    pub fn from_simplices(dim: usize, simplices: impl IntoIterator<Item = Simplex>) -> Result<Self> {
        let mut c = Self::zero(dim);
        for s in simplices {
            if s.dim() != dim {
                return Err(Error::invalid(format!(
                    "simplex {s:?} has dimension {}, chain has dimension {dim}",
                    s.dim()
                )));
            }
            c.toggle(s);
        }
        Ok(c)
    }

    fn toggle(&mut self, s: Simplex) {
        if !self.simplices.remove(&s) {
            self.simplices.insert(s);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn add(&self, other: &ChainGF2) -> Result<ChainGF2> {
        if self.dim != other.dim {
            return Err(Error::invalid("cannot add chains of different dimensions"));
        }
        let simplices = self
            .simplices
            .symmetric_difference(&other.simplices)
            .cloned()
            .collect();
        Ok(Self {
            dim: self.dim,
            simplices,
        })
    }

    /// The boundary, one dimension down. Zero for 0-chains (unreduced homology).
    pub fn boundary(&self) -> ChainGF2 {
        if self.dim == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.dim - 1);
        for s in &self.simplices {
            for f in s.facets() {
                out.toggle(f);
            }
        }
        out
    }
}

/// The `d + 2` facets of the simplex on `vertices`.
pub fn short_cycle_chain(vertices: &Simplex) -> Result<ChainGF2> {
    if vertices.len() < 2 {
        return Err(Error::invalid("a short cycle needs at least two vertices"));
    }
    ChainGF2::from_simplices(vertices.dim() - 1, vertices.facets())
}

fn check_dim(fc: &FilteredComplex, d: usize) -> Result<()> {
    if d + 1 > fc.max_dim_stored() {
        return Err(Error::InsufficientStoredDimension {
            needed: d + 1,
            stored: fc.max_dim_stored(),
        });
    }
    Ok(())
}

/// `(d+2)`-sets of variables whose facets all lie in the frame at level `f`,
/// found by extending each `d`-simplex of the frame by one larger vertex.
pub fn enumerate_short_cycles(fc: &FilteredComplex, f: usize, d: usize) -> Result<Vec<Simplex>> {
    check_dim(fc, d)?;
    let f = f.max(1);
    let vertices: Vec<u32> = fc
        .simplices(0)
        .iter()
        .filter(|(_, c)| *c >= f)
        .map(|(s, _)| s.vertices()[0])
        .collect();
    let mut out = Vec::new();
    for (sigma, c) in fc.simplices(d) {
        if *c < f {
            continue;
        }
        let last = *sigma.vertices().last().expect("nonempty");
        for &v in vertices.iter().filter(|&&v| v > last) {
            let candidate = sigma.with_vertex(v);
            if candidate.facets().all(|face| fc.in_frame(&face, f)) {
                out.push(candidate);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The boundary space `B_d` of one frame, for membership tests.
#[derive(Debug, Clone)]
pub struct LevelBoundaries {
    f: usize,
    d: usize,
    basis: EchelonBasis,
}

impl LevelBoundaries {
    pub fn new(fc: &FilteredComplex, f: usize, d: usize) -> Result<Self> {
        check_dim(fc, d)?;
        let f = f.max(1);
        let mut basis = EchelonBasis::new();
        for i in fc.frame_indices(f, d + 1) {
            basis.insert(boundary_indices(fc, &fc.simplices(d + 1)[i].0));
        }
        Ok(Self { f, d, basis })
    }

    pub fn level(&self) -> usize {
        self.f
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn contains(&self, chain: &[usize]) -> bool {
        self.basis.contains(chain.to_vec())
    }
}

/// Indices (within dimension `d`) of a chain's simplices, checking that each is in frame `f`.
fn chain_indices(fc: &FilteredComplex, f: usize, z: &ChainGF2) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(z.len());
    for s in z.simplices() {
        if !fc.in_frame(s, f) {
            return Err(Error::ChainNotInFrame);
        }
        idx.push(fc.position(s).expect("in frame implies stored"));
    }
    idx.sort_unstable();
    Ok(idx)
}

fn facet_indices(fc: &FilteredComplex, s: &Simplex) -> Vec<usize> {
    let mut v: Vec<usize> = s
        .facets()
        .map(|face| fc.position(&face).expect("short cycle facets are stored"))
        .collect();
    v.sort_unstable();
    v
}

/// Whether `z` bounds in the frame at level `f`.
pub fn is_boundary(fc: &FilteredComplex, f: usize, z: &ChainGF2) -> Result<bool> {
    check_dim(fc, z.dim())?;
    let idx = chain_indices(fc, f, z)?;
    if idx.is_empty() {
        return Ok(true);
    }
    Ok(LevelBoundaries::new(fc, f, z.dim())?.contains(&idx))
}

/// All short cycles of frame `f` homologous to the cycle `z`.
pub fn localize(fc: &FilteredComplex, f: usize, z: &ChainGF2) -> Result<Vec<Simplex>> {
    check_dim(fc, z.dim())?;
    let f = f.max(1);
    let idx = chain_indices(fc, f, z)?;
    if !z.boundary().is_empty() {
        return Err(Error::NotACycle);
    }
    let boundaries = LevelBoundaries::new(fc, f, z.dim())?;
    Ok(enumerate_short_cycles(fc, f, z.dim())?
        .into_iter()
        .filter(|s| boundaries.contains(&gf2::add(&idx, &facet_indices(fc, s))))
        .collect())
}

/// One basis element of `H_d` at a level: the persistence class it comes from
/// and a representative cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisClass {
    pub pair: PersistencePair,
    pub cycle: Vec<usize>,
}

/// `H_d` of one frame with a basis and a way to name the class of any cycle.
#[derive(Debug, Clone)]
pub struct LevelHomology {
    f: usize,
    d: usize,
    boundaries: LevelBoundaries,
    classes: EchelonBasis,
    basis: Vec<BasisClass>,
}

impl LevelHomology {
    pub fn level(&self) -> usize {
        self.f
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn betti(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    pub fn boundaries(&self) -> &LevelBoundaries {
        &self.boundaries
    }

    /// Coordinates (sorted basis indices) of the class of a cycle given by
    /// its `d`-simplex indices. Empty means the cycle bounds.
    pub fn classify(&self, cycle: &[usize]) -> Vec<usize> {
        let (rem, tag) = self.classes.reduce_tagged(cycle.to_vec(), Vec::new());
        debug_assert!(rem.is_empty(), "classified chain is not a cycle of this frame");
        tag
    }
}

/// Computes per-level homology in one dimension, reusing a single persistence
/// reduction for the class bases.
#[derive(Debug)]
pub struct Localizer<'a> {
    fc: &'a FilteredComplex,
    d: usize,
    decomposition: Decomposition<'a>,
}

impl<'a> Localizer<'a> {
    pub fn new(fc: &'a FilteredComplex, d: usize) -> Result<Self> {
        check_dim(fc, d)?;
        let decomposition = Decomposition::new(fc, d, Some(d))?;
        Ok(Self { fc, d, decomposition })
    }

    pub fn complex(&self) -> &'a FilteredComplex {
        self.fc
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Highest level with any `d`-simplex; above it `H_d` is zero.
    pub fn top_level(&self) -> usize {
        self.fc.simplices(self.d).iter().map(|(_, c)| *c).max().unwrap_or(0)
    }

    pub fn level(&self, f: usize) -> Result<LevelHomology> {
        let f = f.max(1);
        let d = self.d;
        let boundaries = LevelBoundaries::new(self.fc, f, d)?;
        let mut classes = boundaries.basis.clone();
        let mut basis = Vec::new();
        for raw in self.decomposition.raw_pairs() {
            let pair = self.decomposition.to_pair(raw);
            if pair.dimension != d || !pair.alive_at(f) {
                continue;
            }
            let cycle = self
                .decomposition
                .representative(raw)
                .expect("cycles retained for this dimension");
            let dependent = classes.insert_tagged(cycle.clone(), vec![basis.len()]);
            debug_assert!(dependent.is_none(), "alive classes are independent modulo boundaries");
            basis.push(BasisClass { pair, cycle });
        }
        Ok(LevelHomology {
            f,
            d,
            boundaries,
            classes,
            basis,
        })
    }

    /// Narrow classes at one level: nonzero classes with a short representative.
    pub fn narrow_classes(&self, level: &LevelHomology) -> Result<Vec<NarrowClass>> {
        let mut groups: BTreeMap<Vec<usize>, Vec<Simplex>> = BTreeMap::new();
        for s in enumerate_short_cycles(self.fc, level.f, self.d)? {
            let class = level.classify(&facet_indices(self.fc, &s));
            if !class.is_empty() {
                groups.entry(class).or_default().push(s);
            }
        }
        Ok(groups
            .into_iter()
            .map(|(class, short_cycles)| NarrowClass {
                level: level.f,
                pairs: class.iter().map(|&i| level.basis[i].pair).collect(),
                class,
                short_cycles,
            })
            .collect())
    }
}

/// A nonzero class at one level together with all its short representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowClass {
    pub level: usize,
    /// Basis indices whose sum is this class.
    pub class: Vec<usize>,
    /// Persistence pairs of those basis elements.
    pub pairs: Vec<PersistencePair>,
    pub short_cycles: Vec<Simplex>,
}

pub fn narrow_classes(fc: &FilteredComplex, f: usize, d: usize) -> Result<Vec<NarrowClass>> {
    let loc = Localizer::new(fc, d)?;
    let level = loc.level(f)?;
    loc.narrow_classes(&level)
}

/// Unordered pairs (indices into `classes`) of distinct narrow classes whose sum is narrow.
pub fn adjacent_among(classes: &[NarrowClass]) -> Vec<(usize, usize)> {
    let keys: BTreeSet<&[usize]> = classes.iter().map(|c| c.class.as_slice()).collect();
    let mut out = Vec::new();
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let sum = gf2::add(&classes[i].class, &classes[j].class);
            if keys.contains(sum.as_slice()) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Adjacent pairs at one level, as pairs of narrow classes.
pub fn adjacent_pairs(
    fc: &FilteredComplex,
    f: usize,
    d: usize,
) -> Result<Vec<(NarrowClass, NarrowClass)>> {
    let classes = narrow_classes(fc, f, d)?;
    Ok(adjacent_among(&classes)
        .into_iter()
        .map(|(i, j)| (classes[i].clone(), classes[j].clone()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortCycleRecord {
    pub vertices: Simplex,
    pub dimension: usize,
    /// Levels at which the short cycle is present and does not bound, ascending.
    pub levels_nonbounding: Vec<usize>,
}

impl ShortCycleRecord {
    pub fn cycle_lifespan(&self) -> usize {
        self.levels_nonbounding.len()
    }

    pub fn contiguous(&self) -> bool {
        self.levels_nonbounding.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

/// For every `(d+2)`-set that is a short cycle at some level, the levels at
/// which it does not bound. Sets that never fail to bound are omitted.
pub fn cycle_lifespans(fc: &FilteredComplex, d: usize) -> Result<Vec<ShortCycleRecord>> {
    let candidates = enumerate_short_cycles(fc, 1, d)?;
    let info: Vec<(Vec<usize>, usize, usize)> = candidates
        .iter()
        .map(|s| {
            let facets = facet_indices(fc, s);
            let present_to = facets
                .iter()
                .map(|&i| fc.simplices(d)[i].1)
                .min()
                .unwrap_or(0);
            (facets, present_to, fc.count(s).unwrap_or(0))
        })
        .collect();
    let top = info.iter().map(|x| x.1).max().unwrap_or(0);
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); candidates.len()];
    for f in 1..=top {
        let mut boundaries: Option<LevelBoundaries> = None;
        for (k, (facets, present_to, filled)) in info.iter().enumerate() {
            if *present_to < f || *filled >= f {
                continue;
            }
            let b = match &boundaries {
                Some(b) => b,
                None => boundaries.insert(LevelBoundaries::new(fc, f, d)?),
            };
            if !b.contains(facets) {
                levels[k].push(f);
            }
        }
    }
    Ok(candidates
        .into_iter()
        .zip(levels)
        .filter(|(_, l)| !l.is_empty())
        .map(|(vertices, levels_nonbounding)| ShortCycleRecord {
            vertices,
            dimension: d,
            levels_nonbounding,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct NarrowClassJson {
    pub basis: Vec<usize>,
    pub persistence: Vec<[usize; 2]>,
    pub short_cycles: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub betti: usize,
    pub short_cycles: usize,
    pub narrow_classes: Vec<NarrowClassJson>,
    /// Index pairs into `narrow_classes`.
    pub adjacent_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShortCycleRecordJson {
    pub vertices: Vec<String>,
    pub levels: Vec<usize>,
    pub cycle_lifespan: usize,
    pub contiguous: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationReport {
    pub dimension: usize,
    pub var_labels: Vec<String>,
    pub levels: Vec<LevelReport>,
    pub short_cycle_records: Vec<ShortCycleRecordJson>,
}

fn label_list(fc: &FilteredComplex, s: &Simplex) -> Vec<String> {
    s.labels(fc.labels()).into_iter().map(String::from).collect()
}

/// Full localization report in dimension `d` for the given levels (all levels
/// carrying `d`-simplices when `None`).
pub fn localization_report(
    fc: &FilteredComplex,
    d: usize,
    levels: Option<&[usize]>,
) -> Result<LocalizationReport> {
    let loc = Localizer::new(fc, d)?;
    let chosen: Vec<usize> = match levels {
        Some(ls) => {
            let mut v: Vec<usize> = ls.iter().copied().filter(|&f| f >= 1).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        None => (1..=loc.top_level()).collect(),
    };
    let mut level_reports = Vec::with_capacity(chosen.len());
    for f in chosen {
        let level = loc.level(f)?;
        let classes = loc.narrow_classes(&level)?;
        level_reports.push(LevelReport {
            level: f,
            betti: level.betti(),
            short_cycles: enumerate_short_cycles(fc, f, d)?.len(),
            adjacent_pairs: adjacent_among(&classes).into_iter().map(|(i, j)| [i, j]).collect(),
            narrow_classes: classes
                .iter()
                .map(|c| NarrowClassJson {
                    basis: c.class.clone(),
                    persistence: c.pairs.iter().map(|p| [p.birth, p.death]).collect(),
                    short_cycles: c.short_cycles.iter().map(|s| label_list(fc, s)).collect(),
                })
                .collect(),
        });
    }
    let records = cycle_lifespans(fc, d)?
        .into_iter()
        .map(|r| ShortCycleRecordJson {
            vertices: label_list(fc, &r.vertices),
            cycle_lifespan: r.cycle_lifespan(),
            contiguous: r.contiguous(),
            levels: r.levels_nonbounding,
        })
        .collect();
    Ok(LocalizationReport {
        dimension: d,
        var_labels: fc.labels().to_vec(),
        levels: level_reports,
        short_cycle_records: records,
    })
}
