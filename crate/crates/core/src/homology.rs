//! Persistence computation over the two-element field: boundary matrix
//! assembly and column reduction.
//!
//! Reduction processes dimensions top-down with clearing: the birth column
//! of every pair is known to reduce to zero and is skipped when its
//! dimension is reached. Working columns are max-heaps of row indices with
//! lazy mod-2 cancellation.

use crate::diagram::{PersistenceDiagram, PersistencePoint};
use crate::rips::Filtration;
use std::collections::{BinaryHeap, HashMap};
use thiserror::Error;

/// Sparse mod-2 boundary matrix in filtration order. Column `j` lists the
/// filtration indices of the codimension-1 faces of simplex `j`, sorted
/// ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    offsets: Vec<u32>,
    entries: Vec<u32>,
    dims: Vec<u8>,
}

#[derive(Debug, Error, PartialEq)]
pub enum HomologyError {
    #[error("face of simplex {simplex} not found in filtration; face closure violated")]
    FaceNotFound { simplex: usize },
}

impl BoundaryMatrix {
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.entries[self.offsets[j] as usize..self.offsets[j + 1] as usize]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j] as usize
    }
}

/// Build the boundary matrix of a filtration.
pub fn build_boundary_matrix(filtration: &Filtration) -> Result<BoundaryMatrix, HomologyError> {
    let n = filtration.len();
    let top_dim = filtration.max_dim();

    // Face lookup per dimension; the top dimension has no cofaces and needs
    // no map.
    let mut index_of: Vec<HashMap<&[u32], u32>> = vec![HashMap::new(); top_dim.max(1)];
    for j in 0..n {
        let d = filtration.dim(j);
        if d < top_dim {
            index_of[d].insert(filtration.vertices(j), j as u32);
        }
    }

    let mut offsets = Vec::with_capacity(n + 1);
    let mut entries = Vec::new();
    let mut dims = Vec::with_capacity(n);
    let mut face: Vec<u32> = Vec::new();
    let mut column: Vec<u32> = Vec::new();
    offsets.push(0u32);
    for j in 0..n {
        let d = filtration.dim(j);
        dims.push(d as u8);
        if d > 0 {
            let vs = filtration.vertices(j);
            column.clear();
            for skip in 0..vs.len() {
                face.clear();
                face.extend(vs.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v));
                let idx = index_of[d - 1]
                    .get(face.as_slice())
                    .copied()
                    .ok_or(HomologyError::FaceNotFound { simplex: j })?;
                column.push(idx);
            }
            column.sort_unstable();
            entries.extend_from_slice(&column);
        }
        offsets.push(entries.len() as u32);
    }
    Ok(BoundaryMatrix {
        offsets,
        entries,
        dims,
    })
}

/// Persistence pairs (birth index, death index) plus unpaired (essential)
/// birth indices, both sorted ascending by birth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pairs: Vec<(u32, u32)>,
    essentials: Vec<u32>,
}

impl Pairing {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn essentials(&self) -> &[u32] {
        &self.essentials
    }
}

const NO_PIVOT: u32 = u32::MAX;

/// Pop the heap down to its true maximum under mod-2 cancellation: entries
/// occurring an even number of times vanish.
fn pop_pivot(heap: &mut BinaryHeap<u32>) -> Option<u32> {
    while let Some(top) = heap.pop() {
        if heap.peek() == Some(&top) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
    None
}

/// Reduce the boundary matrix and read off the persistence pairing.
pub fn reduce(matrix: &BoundaryMatrix) -> Pairing {
    let n = matrix.len();
    let top_dim = (0..n).map(|j| matrix.dim(j)).max().unwrap_or(0);

    let mut pivot_of_row: Vec<u32> = vec![NO_PIVOT; n];
    let mut cleared = vec![false; n];
    let mut reduced: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut heap: BinaryHeap<u32> = BinaryHeap::new();

    for d in (1..=top_dim).rev() {
        for j in 0..n {
            if matrix.dim(j) != d || cleared[j] {
                continue;
            }
            heap.clear();
            heap.extend(matrix.column(j).iter().copied());
            while let Some(low) = pop_pivot(&mut heap) {
                let owner = pivot_of_row[low as usize];
                if owner == NO_PIVOT {
                    // New pivot: freeze the reduced column for later additions.
                    pivot_of_row[low as usize] = j as u32;
                    pairs.push((low, j as u32));
                    cleared[low as usize] = true;
                    let mut col = Vec::with_capacity(heap.len() + 1);
                    col.push(low);
                    while let Some(e) = pop_pivot(&mut heap) {
                        col.push(e);
                    }
                    // entries were popped in descending order
                    col.reverse();
                    reduced.insert(j as u32, col);
                    break;
                }
                // Add the owning column; its pivot cancels `low`.
                heap.push(low);
                heap.extend(reduced[&owner].iter().copied());
            }
        }
    }

    let mut is_death = vec![false; n];
    let mut is_birth = vec![false; n];
    for &(b, dth) in &pairs {
        is_birth[b as usize] = true;
        is_death[dth as usize] = true;
    }
    let essentials: Vec<u32> = (0..n as u32)
        .filter(|&j| !is_birth[j as usize] && !is_death[j as usize])
        .collect();
    pairs.sort_unstable();
    Pairing { pairs, essentials }
}

/// Read persistence diagrams for dimensions `0..=max_homology_dim` out of a
/// pairing. Zero-persistence pairs (birth value equal to death value) are
/// dropped.
pub fn extract_diagrams(
    pairing: &Pairing,
    filtration: &Filtration,
    max_homology_dim: usize,
) -> Vec<PersistenceDiagram> {
    let mut points: Vec<Vec<PersistencePoint>> = vec![Vec::new(); max_homology_dim + 1];
    for &(b, d) in pairing.pairs() {
        let dim = filtration.dim(b as usize);
        if dim > max_homology_dim {
            continue;
        }
        let birth = filtration.value(b as usize);
        let death = filtration.value(d as usize);
        if birth == death {
            continue;
        }
        points[dim].push(PersistencePoint { birth, death });
    }
    for &b in pairing.essentials() {
        let dim = filtration.dim(b as usize);
        if dim > max_homology_dim {
            continue;
        }
        points[dim].push(PersistencePoint {
            birth: filtration.value(b as usize),
            death: f64::INFINITY,
        });
    }
    points
        .into_iter()
        .enumerate()
        .map(|(dim, mut pts)| {
            pts.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
            PersistenceDiagram::new_unchecked(dim, pts)
        })
        .collect()
}

/// Number of pairs a diagram extraction would drop for having zero
/// persistence; kept as a debug statistic.
pub fn zero_persistence_count(pairing: &Pairing, filtration: &Filtration) -> usize {
    pairing
        .pairs()
        .iter()
        .filter(|&&(b, d)| filtration.value(b as usize) == filtration.value(d as usize))
        .count()
}
