//! Persistent homology over Z/2 of the descending frequency filtration.
//!
//! Simplices enter in order of decreasing count; ties go to lower dimension and
//! then to lexicographic vertex order, which keeps every face ahead of its
//! cofaces. The boundary matrix in that order is reduced column by column,
//! highest dimension first, with clearing. A pair `(σ, τ)` becomes
//! `(dim σ, count σ, count τ)`; unpaired classes die at level 0.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::gf2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dimension: usize,
    pub birth: usize,
    pub death: usize,
}

impl PersistencePair {
    pub fn lifespan(&self) -> usize {
        self.birth - self.death
    }

    /// Whether the class exists in the frame at level `f`.
    pub fn alive_at(&self, f: usize) -> bool {
        self.birth >= f && f > self.death
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub input_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
    max_dim: usize,
    provenance: Provenance,
}

impl PersistenceDiagram {
    /// Build from raw pairs; zero-lifespan pairs are dropped and the rest sorted.
    pub fn from_pairs(
        mut pairs: Vec<PersistencePair>,
        max_dim: usize,
        provenance: Provenance,
    ) -> Self {
        pairs.retain(|p| p.birth > p.death && p.dimension <= max_dim);
        pairs.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then(b.birth.cmp(&a.birth))
                .then(b.death.cmp(&a.death))
        });
        Self {
            pairs,
            max_dim,
            provenance,
        }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn in_dim(&self, d: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dimension == d)
    }

    /// `(birth, death)` of the pairs in dimension `d`, sorted by birth then death, descending.
    pub fn birth_death(&self, d: usize) -> Vec<(usize, usize)> {
        self.in_dim(d).map(|p| (p.birth, p.death)).collect()
    }

    /// Number of dimension-`d` classes alive in the frame at level `f`.
    pub fn betti_at(&self, f: usize, d: usize) -> usize {
        self.in_dim(d).filter(|p| p.alive_at(f)).count()
    }

    /// Distinct `(birth, death)` with multiplicities, ordered as in [`Self::birth_death`].
    pub fn multiplicities(&self, d: usize) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (b, de) in self.birth_death(d) {
            match out.last_mut() {
                Some(last) if last.0 == b && last.1 == de => last.2 += 1,
                _ => out.push((b, de, 1)),
            }
        }
        out
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            dims: (0..=self.max_dim)
                .map(|d| DimPairs {
                    d,
                    pairs: self.birth_death(d).into_iter().map(|(b, de)| [b, de]).collect(),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_json(json: &DiagramJson) -> Self {
        let max_dim = json.dims.iter().map(|d| d.d).max().unwrap_or(0);
        let pairs = json
            .dims
            .iter()
            .flat_map(|dp| {
                dp.pairs.iter().map(move |&[birth, death]| PersistencePair {
                    dimension: dp.d,
                    birth,
                    death,
                })
            })
            .collect();
        Self::from_pairs(pairs, max_dim, json.provenance.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimPairs {
    pub d: usize,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub dims: Vec<DimPairs>,
    pub provenance: Provenance,
}

/// One persistence pair as found by the reduction, before zero-lifespan pairs
/// are discarded. Positions index the filtration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawPair {
    pub creator: usize,
    pub destroyer: Option<usize>,
}

/// Reduced boundary matrix of a filtered complex, with enough retained to
/// recover representative cycles in one chosen dimension.
#[derive(Debug, Clone)]
pub struct Decomposition<'a> {
    fc: &'a FilteredComplex,
    max_dim: usize,
    order: Vec<(usize, usize)>,
    position: Vec<Vec<usize>>,
    pairs: Vec<RawPair>,
    cycles: HashMap<usize, Vec<usize>>,
}

fn config_hash(max_dim: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!(
        "concurrence-persistence;max_dim={max_dim};order=count-desc,dim-asc,lex-asc;death-floor=0;dim0=unreduced"
    ));
    hex::encode(h.finalize())
}

/// Facet indices (within dimension `dim s - 1`) of a stored simplex, sorted.
pub(crate) fn boundary_indices(fc: &FilteredComplex, s: &Simplex) -> Vec<usize> {
    let mut b: Vec<usize> = s
        .facets()
        .map(|f| fc.position(&f).expect("stored complexes are closed under faces"))
        .collect();
    b.sort_unstable();
    b
}

impl<'a> Decomposition<'a> {
    /// Reduce all stored simplices of dimension `≤ max_dim + 1`. When
    /// `cycles_in` is `Some(d)`, representative cycles of dimension `d`
    /// are retained.
    pub fn new(fc: &'a FilteredComplex, max_dim: usize, cycles_in: Option<usize>) -> Result<Self> {
        if fc.max_dim_stored() < max_dim + 1 {
            return Err(Error::InsufficientStoredDimension {
                needed: max_dim + 1,
                stored: fc.max_dim_stored(),
            });
        }
        let top = max_dim + 1;
        let mut order: Vec<(usize, usize)> = (0..=top)
            .flat_map(|d| (0..fc.simplices(d).len()).map(move |i| (d, i)))
            .collect();
        order.sort_by(|&(da, ia), &(db, ib)| {
            let ca = fc.simplices(da)[ia].1;
            let cb = fc.simplices(db)[ib].1;
            cb.cmp(&ca).then(da.cmp(&db)).then(ia.cmp(&ib))
        });
        let mut position: Vec<Vec<usize>> = (0..=top).map(|d| vec![0; fc.simplices(d).len()]).collect();
        for (p, &(d, i)) in order.iter().enumerate() {
            position[d][i] = p;
        }

        let n = order.len();
        let mut cleared = vec![false; n];
        let mut pivot_col: HashMap<usize, usize> = HashMap::new();
        let mut reduced: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut pairs = Vec::new();
        let mut cycles = HashMap::new();
        let mut creators: Vec<usize> = Vec::new();

        for dim in (0..=top).rev() {
            let track = cycles_in == Some(dim);
            let mut combos: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut cols: Vec<usize> = (0..fc.simplices(dim).len()).map(|i| position[dim][i]).collect();
            cols.sort_unstable();
            for j in cols {
                if cleared[j] {
                    continue;
                }
                let mut col: Vec<usize> = if dim == 0 {
                    Vec::new()
                } else {
                    let (_, i) = order[j];
                    let mut c: Vec<usize> = boundary_indices(fc, &fc.simplices(dim)[i].0)
                        .into_iter()
                        .map(|fi| position[dim - 1][fi])
                        .collect();
                    c.sort_unstable();
                    c
                };
                let mut combo = if track { vec![j] } else { Vec::new() };
                while let Some(&low) = col.last() {
                    match pivot_col.get(&low) {
                        Some(&k) => {
                            gf2::add_assign(&mut col, &reduced[&k]);
                            if track {
                                gf2::add_assign(&mut combo, &combos[&k]);
                            }
                        }
                        None => break,
                    }
                }
                match col.last() {
                    Some(&low) => {
                        pivot_col.insert(low, j);
                        cleared[low] = true;
                        pairs.push(RawPair {
                            creator: low,
                            destroyer: Some(j),
                        });
                        if cycles_in == Some(dim - 1) {
                            cycles.insert(low, col.clone());
                        }
                        if track {
                            combos.insert(j, combo);
                        }
                        reduced.insert(j, col);
                    }
                    None => {
                        if dim <= max_dim {
                            creators.push(j);
                            if track {
                                cycles.insert(j, combo);
                            }
                        }
                    }
                }
            }
        }
        for c in creators {
            pairs.push(RawPair {
                creator: c,
                destroyer: None,
            });
        }
        pairs.retain(|p| order[p.creator].0 <= max_dim);
        pairs.sort_by_key(|p| p.creator);

        Ok(Self {
            fc,
            max_dim,
            order,
            position,
            pairs,
            cycles,
        })
    }

    pub fn complex(&self) -> &'a FilteredComplex {
        self.fc
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// `(dimension, index within dimension)` of the simplex at filtration position `p`.
    pub fn simplex_at(&self, p: usize) -> (usize, usize) {
        self.order[p]
    }

    pub fn position_of(&self, dim: usize, idx: usize) -> usize {
        self.position[dim][idx]
    }

    pub fn raw_pairs(&self) -> &[RawPair] {
        &self.pairs
    }

    pub fn count_at(&self, p: usize) -> usize {
        let (d, i) = self.order[p];
        self.fc.simplices(d)[i].1
    }

    pub fn to_pair(&self, raw: &RawPair) -> PersistencePair {
        PersistencePair {
            dimension: self.order[raw.creator].0,
            birth: self.count_at(raw.creator),
            death: raw.destroyer.map_or(0, |t| self.count_at(t)),
        }
    }

    /// Representative cycle of a class (as indices into the creator's
    /// dimension), if cycles were retained for that dimension.
    pub fn representative(&self, raw: &RawPair) -> Option<Vec<usize>> {
        let cyc = self.cycles.get(&raw.creator)?;
        let mut idx: Vec<usize> = cyc.iter().map(|&p| self.order[p].1).collect();
        idx.sort_unstable();
        Some(idx)
    }

    pub fn diagram(&self) -> PersistenceDiagram {
        let pairs = self.pairs.iter().map(|r| self.to_pair(r)).collect();
        PersistenceDiagram::from_pairs(
            pairs,
            self.max_dim,
            Provenance {
                config_hash: config_hash(self.max_dim),
                input_digest: self.fc.digest(),
            },
        )
    }
}

/// Persistence pairs in dimensions `0..=max_dim`.
pub fn compute_persistence(fc: &FilteredComplex, max_dim: usize) -> Result<PersistenceDiagram> {
    Ok(Decomposition::new(fc, max_dim, None)?.diagram())
}

/// `rank H_d` of the frame at level `f`, from boundary ranks of that frame alone.
pub fn betti(fc: &FilteredComplex, f: usize, d: usize) -> Result<usize> {
    if d + 1 > fc.max_dim_stored() {
        return Err(Error::InsufficientStoredDimension {
            needed: d + 1,
            stored: fc.max_dim_stored(),
        });
    }
    let f = f.max(1);
    let n_d = fc.frame_indices(f, d).len();
    let boundary_rank = |k: usize| -> usize {
        if k == 0 {
            return 0;
        }
        gf2::rank(
            fc.frame_indices(f, k)
                .into_iter()
                .map(|i| boundary_indices(fc, &fc.simplices(k)[i].0)),
        )
    };
    Ok(n_d - boundary_rank(d) - boundary_rank(d + 1))
}

/// Plot table for dimension `d`: `birth,death,multiplicity`.
pub fn plot_csv(diagram: &PersistenceDiagram, d: usize) -> String {
    let mut out = String::from("birth,death,multiplicity\n");
    for (b, de, m) in diagram.multiplicities(d) {
        let _ = writeln!(out, "{b},{de},{m}");
    }
    out
}

/// Death-versus-birth scatter for dimension `d`. Coinciding points are drawn
/// as one larger circle.
pub fn plot_svg(diagram: &PersistenceDiagram, d: usize) -> String {
    const SIZE: f64 = 400.0;
    const MARGIN: f64 = 40.0;
    let points = diagram.multiplicities(d);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    if !points.is_empty() {
        let max = points.iter().map(|p| p.0).max().unwrap_or(1).max(1) as f64;
        let span = SIZE - 2.0 * MARGIN;
        let x = |v: usize| MARGIN + span * v as f64 / max;
        let y = |v: usize| SIZE - MARGIN - span * v as f64 / max;
        let _ = writeln!(
            out,
            r#"<g stroke="black" stroke-width="1"><line x1="{MARGIN}" y1="{b}" x2="{e}" y2="{b}"/><line x1="{MARGIN}" y1="{b}" x2="{MARGIN}" y2="{MARGIN}"/><line x1="{MARGIN}" y1="{b}" x2="{e}" y2="{MARGIN}" stroke-dasharray="4 4" stroke="gray"/></g>"#,
            b = SIZE - MARGIN,
            e = SIZE - MARGIN,
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">birth</text>"#,
            SIZE / 2.0,
            SIZE - 10.0
        );
        let _ = writeln!(
            out,
            r#"<text x="12" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {})">death</text>"#,
            SIZE / 2.0,
            SIZE / 2.0
        );
        let mut labels = BTreeMap::new();
        labels.insert(0usize, ());
        labels.insert(max as usize, ());
        for v in labels.keys() {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{}" font-size="10" text-anchor="middle">{v}</text>"#,
                x(*v),
                SIZE - MARGIN + 14.0
            );
        }
        for (b, de, m) in points {
            let r = 3.0 * (m as f64).sqrt();
            let _ = writeln!(
                out,
                r#"<circle cx="{:.1}" cy="{:.1}" r="{r:.2}" fill="none" stroke="black"><title>birth {b}, death {de}, x{m}</title></circle>"#,
                x(b),
                y(de)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
