//! Shared fixtures for the criterion benchmarks.

use manifold_kde::geometry::{Manifold, ManifoldPoint};
use manifold_kde::models::{DensityModel, UniformSphere};
use manifold_kde::neighbors::SampleSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic uniform sample on the unit sphere.
pub fn sphere_sample(n: usize, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    UniformSphere::new().sample(&mut rng, n)
}

/// Deterministic query points on the unit sphere.
pub fn sphere_queries(m: usize, seed: u64) -> Vec<ManifoldPoint> {
    sphere_sample(m, seed).points().to_vec()
}

/// Brute-force k-th nearest-neighbor distance by full sort, the reference
/// the selection path is benchmarked against.
pub fn brute_force_knn(sample: &SampleSet, p: &ManifoldPoint, k: usize) -> f64 {
    let m: &Manifold = sample.manifold();
    let mut ds: Vec<f64> = sample
        .points()
        .iter()
        .map(|x| m.distance(p, x).expect("points share the manifold"))
        .collect();
    ds.sort_by(f64::total_cmp);
    ds[k - 1]
}
