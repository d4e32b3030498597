//! Persistence diagrams and the metrics computed from them: lifetime
//! spectrum, total persistence, persistence entropy, bottleneck distance,
//! and the Hausdorff distance between point clouds.

use crate::embedding::PointCloud;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

/// A single (birth, death) pair. `death` is `f64::INFINITY` for essential
/// classes; any finite point satisfies `death > birth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// `death - birth`; infinite for essential points.
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    /// L-infinity distance to the diagonal under optimal matching,
    /// `(death - birth) / 2`.
    fn diagonal_cost(&self) -> f64 {
        (self.death - self.birth) / 2.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DiagramError {
    #[error("point {index} is invalid: birth {birth}, death {death}")]
    InvalidPoint {
        index: usize,
        birth: f64,
        death: f64,
    },
    #[error("point clouds have different ambient dimensions ({x} vs {y})")]
    DimensionMismatch { x: usize, y: usize },
}

/// Multiset of persistence points in one homology dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    dim: usize,
    points: Vec<PersistencePoint>,
}

impl PersistenceDiagram {
    /// Validating constructor: births must be finite and non-negative, and
    /// every finite death must exceed its birth.
    pub fn new(dim: usize, points: Vec<PersistencePoint>) -> Result<Self, DiagramError> {
        for (index, p) in points.iter().enumerate() {
            let birth_ok = p.birth.is_finite() && p.birth >= 0.0;
            let death_ok = p.death == f64::INFINITY || (p.death.is_finite() && p.death > p.birth);
            if !birth_ok || !death_ok {
                return Err(DiagramError::InvalidPoint {
                    index,
                    birth: p.birth,
                    death: p.death,
                });
            }
        }
        Ok(Self { dim, points })
    }

    /// Constructor for internal callers that guarantee the invariants.
    pub(crate) fn new_unchecked(dim: usize, points: Vec<PersistencePoint>) -> Self {
        Self { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PersistencePoint] {
        &self.points
    }

    pub fn finite_points(&self) -> impl Iterator<Item = &PersistencePoint> {
        self.points.iter().filter(|p| !p.is_essential())
    }

    pub fn essential_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_essential()).count()
    }

    /// The lifetime spectrum of the finite points.
    pub fn lifetimes(&self) -> Spectrum {
        Spectrum {
            lifetimes: self.finite_points().map(PersistencePoint::lifetime).collect(),
        }
    }
}

/// Multiset of finite-bar lifetimes.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lifetimes: Vec<f64>,
}

impl Spectrum {
    /// Build a spectrum directly from lifetimes, which must be positive and
    /// finite.
    pub fn from_lifetimes(lifetimes: Vec<f64>) -> Result<Self, DiagramError> {
        for (index, &l) in lifetimes.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(DiagramError::InvalidPoint {
                    index,
                    birth: 0.0,
                    death: l,
                });
            }
        }
        Ok(Self { lifetimes })
    }

    pub fn lifetimes(&self) -> &[f64] {
        &self.lifetimes
    }

    pub fn len(&self) -> usize {
        self.lifetimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifetimes.is_empty()
    }

    /// Total persistence: the L1 norm of the spectrum.
    pub fn total_persistence(&self) -> f64 {
        self.lifetimes.iter().sum()
    }

    /// Shannon entropy (natural log) of lifetimes normalized by total
    /// persistence. Zero for empty and single-bar spectra.
    pub fn entropy(&self) -> f64 {
        if self.lifetimes.len() < 2 {
            return 0.0;
        }
        let total = self.total_persistence();
        -self
            .lifetimes
            .iter()
            .map(|&l| {
                let p = l / total;
                p * p.ln()
            })
            .sum::<f64>()
    }

    /// Arithmetic mean lifetime; zero for an empty spectrum.
    pub fn mean_lifetime(&self) -> f64 {
        if self.lifetimes.is_empty() {
            return 0.0;
        }
        self.total_persistence() / self.lifetimes.len() as f64
    }
}

fn linf(p: &PersistencePoint, q: &PersistencePoint) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

/// Exact bottleneck distance between two diagrams of the same homology
/// dimension.
///
/// Finite points may match each other or the diagonal; essential points
/// must match essential points, so diagrams with different essential
/// counts are infinitely far apart. Computed by binary search over the
/// finite set of candidate costs with a bipartite-matching feasibility
/// test at each step.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    debug_assert_eq!(a.dim(), b.dim(), "diagrams must share a dimension");

    let mut ess_a: Vec<f64> = a
        .points()
        .iter()
        .filter(|p| p.is_essential())
        .map(|p| p.birth)
        .collect();
    let mut ess_b: Vec<f64> = b
        .points()
        .iter()
        .filter(|p| p.is_essential())
        .map(|p| p.birth)
        .collect();
    if ess_a.len() != ess_b.len() {
        return f64::INFINITY;
    }
    ess_a.sort_by(f64::total_cmp);
    ess_b.sort_by(f64::total_cmp);
    let essential_cost = ess_a
        .iter()
        .zip(&ess_b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let fin_a: Vec<PersistencePoint> = a.finite_points().copied().collect();
    let fin_b: Vec<PersistencePoint> = b.finite_points().copied().collect();
    if fin_a.is_empty() && fin_b.is_empty() {
        return essential_cost;
    }

    let mut candidates: Vec<f64> = Vec::new();
    candidates.extend(fin_a.iter().map(PersistencePoint::diagonal_cost));
    candidates.extend(fin_b.iter().map(PersistencePoint::diagonal_cost));
    for p in &fin_a {
        for q in &fin_b {
            candidates.push(linf(p, q));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Smallest candidate admitting a feasible matching; the largest always
    // does (send everything to the diagonal).
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if matching_feasible(&fin_a, &fin_b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    essential_cost.max(candidates[lo])
}

/// Perfect-matching feasibility at threshold `r`, on the doubled graph
/// where each side is augmented with one diagonal slot per opposing point.
fn matching_feasible(fa: &[PersistencePoint], fb: &[PersistencePoint], r: f64) -> bool {
    let (na, nb) = (fa.len(), fb.len());
    let total = na + nb;

    // Left vertices: 0..na are A's points, na.. are diagonal slots for B.
    // Right vertices: 0..nb are B's points, nb.. are diagonal slots for A.
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(total);
    for (i, p) in fa.iter().enumerate() {
        let mut edges: Vec<usize> = (0..nb).filter(|&j| linf(p, &fb[j]) <= r).collect();
        if p.diagonal_cost() <= r {
            edges.push(nb + i);
        }
        adj.push(edges);
    }
    for (j, q) in fb.iter().enumerate() {
        let mut edges: Vec<usize> = Vec::with_capacity(na + 1);
        if q.diagonal_cost() <= r {
            edges.push(j);
        }
        edges.extend(nb..nb + na);
        adj.push(edges);
    }

    // Kuhn's augmenting-path maximum matching.
    let mut matched_right: Vec<usize> = vec![usize::MAX; total];
    let mut visited: Vec<bool> = vec![false; total];
    let mut size = 0usize;
    for left in 0..total {
        visited.iter_mut().for_each(|v| *v = false);
        if augment(left, &adj, &mut matched_right, &mut visited) {
            size += 1;
        }
    }
    size == total
}

fn augment(
    left: usize,
    adj: &[Vec<usize>],
    matched_right: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for &right in &adj[left] {
        if visited[right] {
            continue;
        }
        visited[right] = true;
        if matched_right[right] == usize::MAX
            || augment(matched_right[right], adj, matched_right, visited)
        {
            matched_right[right] = left;
            return true;
        }
    }
    false
}

/// Hausdorff distance between two clouds in the same ambient dimension.
pub fn hausdorff_distance(x: &PointCloud, y: &PointCloud) -> Result<f64, DiagramError> {
    if x.dim() != y.dim() {
        return Err(DiagramError::DimensionMismatch {
            x: x.dim(),
            y: y.dim(),
        });
    }
    let directed = |from: &PointCloud, to: &PointCloud| {
        from.iter_points()
            .map(|p| {
                to.iter_points()
                    .map(|q| {
                        p.iter()
                            .zip(q)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}

struct PointRecord<'a> {
    dim: usize,
    point: &'a PersistencePoint,
}

impl Serialize for PointRecord<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PointRecord", 3)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("birth", &self.point.birth)?;
        if self.point.is_essential() {
            s.serialize_field("death", "inf")?;
        } else {
            s.serialize_field("death", &self.point.death)?;
        }
        s.end()
    }
}

/// JSON export: an array of `{dim, birth, death}` records where `death` is
/// a number or the string `"inf"`.
pub fn diagrams_to_json(diagrams: &[PersistenceDiagram]) -> String {
    let records: Vec<PointRecord> = diagrams
        .iter()
        .flat_map(|d| {
            d.points().iter().map(move |point| PointRecord {
                dim: d.dim(),
                point,
            })
        })
        .collect();
    serde_json::to_string(&records).expect("diagram serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(dim: usize, pts: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            dim,
            pts.iter()
                .map(|&(birth, death)| PersistencePoint { birth, death })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn lifetimes_exclude_essentials() {
        let d = diagram(1, &[(1.0, std::f64::consts::SQRT_2)]);
        let s = d.lifetimes();
        assert_eq!(s.lifetimes().len(), 1);
        assert!((s.lifetimes()[0] - 0.41421356237309515).abs() < 1e-15);

        let essential_only = diagram(0, &[(0.0, f64::INFINITY)]);
        assert!(essential_only.lifetimes().is_empty());
        assert!(diagram(0, &[]).lifetimes().is_empty());
    }

    #[test]
    fn total_persistence_sums() {
        assert_eq!(
            Spectrum::from_lifetimes(vec![0.1, 0.2, 0.3])
                .unwrap()
                .total_persistence(),
            0.6
        );
        assert_eq!(Spectrum { lifetimes: vec![] }.total_persistence(), 0.0);
    }

    #[test]
    fn entropy_values() {
        let single = Spectrum::from_lifetimes(vec![3.7]).unwrap();
        assert_eq!(single.entropy(), 0.0);

        let uniform = Spectrum::from_lifetimes(vec![0.5; 4]).unwrap();
        assert!((uniform.entropy() - 4.0f64.ln()).abs() < 1e-12);

        let skewed = Spectrum::from_lifetimes(vec![0.75, 0.25]).unwrap();
        assert!((skewed.entropy() - 0.5623351446188083).abs() < 1e-12);

        assert_eq!(Spectrum { lifetimes: vec![] }.entropy(), 0.0);
    }

    #[test]
    fn mean_lifetime_values() {
        assert_eq!(
            Spectrum::from_lifetimes(vec![0.1, 0.3]).unwrap().mean_lifetime(),
            0.2
        );
        assert_eq!(Spectrum { lifetimes: vec![] }.mean_lifetime(), 0.0);
        let single = Spectrum::from_lifetimes(vec![0.41421356]).unwrap();
        assert_eq!(single.mean_lifetime(), 0.41421356);
    }

    #[test]
    fn bottleneck_identical_is_zero() {
        let d = diagram(1, &[(0.0, 1.0), (0.5, 2.0), (0.0, f64::INFINITY)]);
        assert_eq!(bottleneck_distance(&d, &d), 0.0);
    }

    #[test]
    fn bottleneck_single_point_to_empty() {
        let d = diagram(1, &[(0.0, 1.0)]);
        let empty = diagram(1, &[]);
        assert_eq!(bottleneck_distance(&d, &empty), 0.5);
        assert_eq!(bottleneck_distance(&empty, &d), 0.5);
    }

    #[test]
    fn bottleneck_prefers_direct_match() {
        let a = diagram(1, &[(0.0, 1.0)]);
        let b = diagram(1, &[(0.0, 1.2)]);
        assert!((bottleneck_distance(&a, &b) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bottleneck_mismatched_essentials_is_infinite() {
        let a = diagram(0, &[(0.0, f64::INFINITY)]);
        let b = diagram(0, &[]);
        assert_eq!(bottleneck_distance(&a, &b), f64::INFINITY);
    }

    #[test]
    fn bottleneck_essential_births_matter() {
        let a = diagram(0, &[(0.0, f64::INFINITY)]);
        let b = diagram(0, &[(0.3, f64::INFINITY)]);
        assert!((bottleneck_distance(&a, &b) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bottleneck_diagonal_beats_expensive_match() {
        // matching the two points directly costs 10; both to diagonal costs 0.5
        let a = diagram(1, &[(0.0, 1.0)]);
        let b = diagram(1, &[(10.0, 11.0)]);
        assert_eq!(bottleneck_distance(&a, &b), 0.5);
    }

    #[test]
    fn hausdorff_known_values() {
        let single = |coords: Vec<f64>| PointCloud::from_rows(vec![coords]).unwrap();
        let x = single(vec![0.0, 0.0]);
        assert_eq!(hausdorff_distance(&x, &x).unwrap(), 0.0);

        let y = single(vec![3.0, 4.0]);
        assert_eq!(hausdorff_distance(&x, &y).unwrap(), 5.0);

        let pair = PointCloud::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(hausdorff_distance(&pair, &x).unwrap(), 1.0);

        let z = PointCloud::from_rows(vec![vec![0.0]]).unwrap();
        assert!(matches!(
            hausdorff_distance(&x, &z),
            Err(DiagramError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_export_marks_essentials() {
        let diagrams = vec![
            diagram(0, &[(0.0, 1.0), (0.0, f64::INFINITY)]),
            diagram(1, &[(1.0, 2.5)]),
        ];
        let json = diagrams_to_json(&diagrams);
        assert_eq!(
            json,
            r#"[{"dim":0,"birth":0.0,"death":1.0},{"dim":0,"birth":0.0,"death":"inf"},{"dim":1,"birth":1.0,"death":2.5}]"#
        );
    }

    #[test]
    fn diagram_rejects_bad_points() {
        assert!(PersistenceDiagram::new(
            0,
            vec![PersistencePoint {
                birth: 1.0,
                death: 1.0
            }]
        )
        .is_err());
        assert!(PersistenceDiagram::new(
            0,
            vec![PersistencePoint {
                birth: -0.5,
                death: 1.0
            }]
        )
        .is_err());
    }
}
