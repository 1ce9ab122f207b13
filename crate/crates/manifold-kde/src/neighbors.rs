//! k-nearest-neighbor geodesic distances H_n(p) and the clamped adaptive
//! bandwidth ζ_n(p) = min(H_n(p), inj_g M).

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{GeometryError, Manifold, ManifoldPoint};

#[derive(Debug, Error)]
pub enum NeighborError {
    #[error("k must satisfy 1 <= k <= n, got k = {k} with n = {n}")]
    InvalidK { k: usize, n: usize },
    #[error("sample set must contain at least one point")]
    EmptySample,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// An immutable i.i.d. sample of points on one manifold.
///
/// Construction validates every point against the manifold's membership
/// invariant; afterwards queries are read-only and may run concurrently.
#[derive(Debug, Clone)]
pub struct SampleSet {
    manifold: Manifold,
    points: Vec<ManifoldPoint>,
}

impl SampleSet {
    pub fn new(manifold: Manifold, points: Vec<ManifoldPoint>) -> Result<Self, NeighborError> {
        if points.is_empty() {
            return Err(NeighborError::EmptySample);
        }
        for p in &points {
            manifold.check_point(p)?;
        }
        Ok(Self { manifold, points })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// H_n(p): the geodesic distance from `p` to its k-th nearest sample
    /// point (duplicates counted with multiplicity; ties are irrelevant
    /// since only the order statistic is returned).
    pub fn knn_distance(&self, p: &ManifoldPoint, k: usize) -> Result<f64, NeighborError> {
        let mut distances = self.distances_from(p)?;
        Ok(kth_smallest(&mut distances, k, self.len())?)
    }

    /// Elementwise [`Self::knn_distance`] over many query points,
    /// evaluated in parallel. The selection path returns exactly the same
    /// order statistics as a full sort would.
    pub fn knn_distance_batch(
        &self,
        queries: &[ManifoldPoint],
        k: usize,
    ) -> Result<Vec<f64>, NeighborError> {
        if k < 1 || k > self.len() {
            return Err(NeighborError::InvalidK { k, n: self.len() });
        }
        queries
            .par_iter()
            .map(|p| self.knn_distance(p, k))
            .collect()
    }

    pub(crate) fn distances_from(&self, p: &ManifoldPoint) -> Result<Vec<f64>, NeighborError> {
        self.points
            .iter()
            .map(|x| self.manifold.distance(p, x).map_err(NeighborError::from))
            .collect()
    }
}

/// ζ_n(p) = min(H, inj_g M); the identity on manifolds with infinite
/// injectivity radius.
pub fn clamped_bandwidth(h: f64, manifold: &Manifold) -> f64 {
    h.min(manifold.injectivity_radius())
}

/// k-th smallest entry of `distances`, by in-place selection in O(n)
/// expected time.
fn kth_smallest(distances: &mut [f64], k: usize, n: usize) -> Result<f64, NeighborError> {
    if k < 1 || k > n {
        return Err(NeighborError::InvalidK { k, n });
    }
    let (_, kth, _) = distances.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*kth)
}
