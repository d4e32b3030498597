//! Vietoris-Rips filtration construction from a point cloud or distance
//! matrix.
//!
//! Simplices are ordered by (filtration value, dimension, lexicographic
//! vertex order). The order is total, so two builds over the same input are
//! bit-identical, which downstream reduction relies on.

use crate::embedding::PointCloud;
use thiserror::Error;

/// Pairwise Euclidean distances, stored as the condensed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    condensed: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RipsError {
    #[error("max_dim {max_dim} is not below the point count {n}")]
    DimensionTooLarge { max_dim: usize, n: usize },
    #[error("epsilon_max must be positive, got {0}")]
    InvalidEpsilonMax(f64),
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("filtration would contain {0} simplices, beyond the supported limit")]
    FiltrationTooLarge(usize),
}

impl DistanceMatrix {
    /// Validate and wrap an explicit full matrix. Entries must be symmetric,
    /// finite, non-negative, with a zero diagonal.
    pub fn from_full(rows: &[Vec<f64>]) -> Result<Self, RipsError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(RipsError::InvalidDistanceMatrix(
                "matrix must be square and non-empty".into(),
            ));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(RipsError::InvalidDistanceMatrix(format!(
                    "diagonal entry ({i},{i}) is not zero"
                )));
            }
            for j in 0..n {
                let d = rows[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(RipsError::InvalidDistanceMatrix(format!(
                        "entry ({i},{j}) is not a finite non-negative number"
                    )));
                }
                if rows[i][j] != rows[j][i] {
                    return Err(RipsError::InvalidDistanceMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                condensed.push(rows[i][j]);
            }
        }
        Ok(Self { n, condensed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn condensed_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else if i < j {
            self.condensed[self.condensed_index(i, j)]
        } else {
            self.condensed[self.condensed_index(j, i)]
        }
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        self.condensed.iter().copied().fold(0.0, f64::max)
    }
}

/// Euclidean distance matrix of a point cloud.
pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let p = cloud.point(i);
        for j in (i + 1)..n {
            let q = cloud.point(j);
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            condensed.push(d2.sqrt());
        }
    }
    DistanceMatrix { n, condensed }
}

/// An ordered Vietoris-Rips filtration. Stored as parallel arrays; simplex
/// `j` owns `verts[offsets[j]..offsets[j+1]]` (sorted ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    values: Vec<f64>,
    dims: Vec<u8>,
    offsets: Vec<u32>,
    verts: Vec<u32>,
}

impl Filtration {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j] as usize
    }

    pub fn vertices(&self, j: usize) -> &[u32] {
        &self.verts[self.offsets[j] as usize..self.offsets[j + 1] as usize]
    }

    /// Largest simplex dimension present.
    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn count_in_dim(&self, dim: usize) -> usize {
        self.dims.iter().filter(|&&d| d as usize == dim).count()
    }
}

/// One dimension's simplices during construction, in generation (lex) order.
struct DimBuffer {
    stride: usize,
    values: Vec<f64>,
    verts: Vec<u32>,
}

impl DimBuffer {
    fn new(dim: usize) -> Self {
        Self {
            stride: dim + 1,
            values: Vec::new(),
            verts: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn vertices(&self, i: usize) -> &[u32] {
        &self.verts[i * self.stride..(i + 1) * self.stride]
    }

    /// Sort order within one dimension: value, then lexicographic vertices.
    fn sorted_permutation(&self) -> Vec<u32> {
        let mut perm: Vec<u32> = (0..self.len() as u32).collect();
        perm.sort_unstable_by(|&a, &b| {
            self.values[a as usize]
                .total_cmp(&self.values[b as usize])
                .then_with(|| self.vertices(a as usize).cmp(self.vertices(b as usize)))
        });
        perm
    }
}

/// Build the Rips filtration of `dist` up to simplex dimension `max_dim`,
/// including every simplex whose value (max pairwise vertex distance) is at
/// most `epsilon_max`. `None` means the full diameter.
pub fn build_rips_filtration(
    dist: &DistanceMatrix,
    max_dim: usize,
    epsilon_max: Option<f64>,
) -> Result<Filtration, RipsError> {
    let n = dist.n();
    if max_dim >= n {
        return Err(RipsError::DimensionTooLarge { max_dim, n });
    }
    let eps = match epsilon_max {
        Some(e) if e <= 0.0 || !e.is_finite() => return Err(RipsError::InvalidEpsilonMax(e)),
        Some(e) => e,
        None => dist.diameter(),
    };

    // Forward neighbor lists: fnbrs[i] holds j > i with d(i,j) <= eps.
    let mut fnbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dist.get(i, j) <= eps {
                fnbrs[i].push(j as u32);
            }
        }
    }

    let mut buffers: Vec<DimBuffer> = (0..=max_dim).map(DimBuffer::new).collect();
    for v in 0..n as u32 {
        buffers[0].values.push(0.0);
        buffers[0].verts.push(v);
    }

    if max_dim >= 1 {
        let mut path: Vec<u32> = Vec::with_capacity(max_dim + 1);
        let mut edge_candidates: Vec<u32> = Vec::new();
        let mut scratch: Vec<Vec<u32>> = vec![Vec::new(); max_dim.saturating_sub(2)];
        for i in 0..n {
            for jj in 0..fnbrs[i].len() {
                let j = fnbrs[i][jj];
                let value = dist.get(i, j as usize);
                buffers[1].values.push(value);
                buffers[1].verts.extend_from_slice(&[i as u32, j]);
                if max_dim >= 2 {
                    path.clear();
                    path.extend_from_slice(&[i as u32, j]);
                    intersect_into(&fnbrs[i], &fnbrs[j as usize], &mut edge_candidates);
                    extend_cliques(
                        dist,
                        &fnbrs,
                        value,
                        max_dim,
                        &mut path,
                        &edge_candidates,
                        &mut scratch,
                        &mut buffers,
                    );
                }
            }
        }
    }

    merge_dimension_buffers(buffers)
}

/// `out = a ∩ b` for sorted ascending slices.
fn intersect_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
}

/// Grow the clique in `path` by each candidate in turn, recording every
/// extension and recursing while below `max_dim`.
#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    dist: &DistanceMatrix,
    fnbrs: &[Vec<u32>],
    path_value: f64,
    max_dim: usize,
    path: &mut Vec<u32>,
    candidates: &[u32],
    scratch: &mut [Vec<u32>],
    buffers: &mut [DimBuffer],
) {
    for &c in candidates {
        let mut value = path_value;
        for &v in path.iter() {
            value = value.max(dist.get(v as usize, c as usize));
        }
        let dim = path.len(); // dimension of path + c
        buffers[dim].values.push(value);
        buffers[dim].verts.extend_from_slice(path);
        buffers[dim].verts.push(c);
        if dim < max_dim {
            let (head, tail) = scratch.split_at_mut(1);
            intersect_into(candidates, &fnbrs[c as usize], &mut head[0]);
            path.push(c);
            extend_cliques(dist, fnbrs, value, max_dim, path, &head[0], tail, buffers);
            path.pop();
        }
    }
}

/// Merge per-dimension buffers into one globally ordered filtration.
fn merge_dimension_buffers(buffers: Vec<DimBuffer>) -> Result<Filtration, RipsError> {
    let total: usize = buffers.iter().map(DimBuffer::len).sum();
    let total_verts: usize = buffers.iter().map(|b| b.verts.len()).sum();
    if total >= u32::MAX as usize || total_verts >= u32::MAX as usize {
        return Err(RipsError::FiltrationTooLarge(total));
    }

    let perms: Vec<Vec<u32>> = buffers.iter().map(DimBuffer::sorted_permutation).collect();
    let mut cursors = vec![0usize; buffers.len()];
    let mut filtration = Filtration {
        values: Vec::with_capacity(total),
        dims: Vec::with_capacity(total),
        offsets: Vec::with_capacity(total + 1),
        verts: Vec::with_capacity(total_verts),
    };
    filtration.offsets.push(0);

    for _ in 0..total {
        // Smallest (value, dim) across dimension streams; each stream is
        // already value-then-lex sorted.
        let mut best: Option<(f64, usize)> = None;
        for (d, buffer) in buffers.iter().enumerate() {
            if cursors[d] < buffer.len() {
                let v = buffer.values[perms[d][cursors[d]] as usize];
                if best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, d));
                }
            }
        }
        let (value, d) = best.expect("total count matches buffer contents");
        let idx = perms[d][cursors[d]] as usize;
        cursors[d] += 1;
        filtration.values.push(value);
        filtration.dims.push(d as u8);
        filtration.verts.extend_from_slice(buffers[d].vertices(idx));
        filtration.offsets.push(filtration.verts.len() as u32);
    }
    Ok(filtration)
}
