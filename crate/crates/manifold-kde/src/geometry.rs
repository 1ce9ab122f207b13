//! Geometry of the supported manifolds: the Euclidean space ℝ^d, the
//! 2-sphere of radius R embedded in ℝ³, and the unit cylinder S¹ × ℝ with
//! the metric induced from ℝ³.
//!
//! Everything downstream (bandwidths, kernel weights, simulation ground
//! truth) is built from four primitives defined here: the geodesic distance
//! d_g, the volume density function θ_p(q), the exp/log maps, and
//! geodesic-ball volumes. All of them have closed forms on the supported
//! manifolds.
//!
//! Points are stored in embedding coordinates: length d for ℝ^d, length 3
//! for the sphere and the cylinder. A cylinder point with angular
//! coordinate r and axial coordinate s is stored as (cos r, sin r, s).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::gamma_half_plus_one;

/// Relative tolerance for the point-membership invariants.
const POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point has {got} coordinates, manifold embeds in {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point does not satisfy the manifold constraint (deviation {deviation:.3e})")]
    PointOffManifold { deviation: f64 },
    #[error("volume density is undefined at distance {distance} >= injectivity radius {injectivity_radius}")]
    BeyondInjectivityRadius { distance: f64, injectivity_radius: f64 },
    #[error("log map is undefined at or beyond the cut locus (distance {distance})")]
    CutLocus { distance: f64 },
    #[error("vector is not tangent at the base point (deviation {deviation:.3e})")]
    NotTangent { deviation: f64 },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("dimension must be at least 1")]
    InvalidDimension,
}

/// A point on a manifold, stored in embedding coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    coords: Vec<f64>,
}

impl ManifoldPoint {
    /// Wraps raw embedding coordinates without validation. Use
    /// [`Manifold::point`] to construct a checked point.
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for ManifoldPoint {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

/// One of the supported manifolds, together with its geometric constants.
///
/// The intrinsic dimension, injectivity radius, and scalar curvature are
/// all determined by the variant:
///
/// | manifold     | dim | injectivity radius | scalar curvature |
/// |--------------|-----|--------------------|------------------|
/// | Euclidean(d) | d   | +∞                 | 0                |
/// | Sphere(R)    | 2   | πR                 | 2/R²             |
/// | Cylinder     | 2   | π                  | 0                |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Manifold {
    Euclidean { dim: usize },
    Sphere { radius: f64 },
    Cylinder,
}

impl Manifold {
    pub fn euclidean(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidDimension);
        }
        Ok(Self::Euclidean { dim })
    }

    pub fn sphere(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Self::Sphere { radius })
    }

    pub fn cylinder() -> Self {
        Self::Cylinder
    }

    /// Intrinsic dimension d.
    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } => *dim,
            Self::Sphere { .. } | Self::Cylinder => 2,
        }
    }

    /// Dimension of the embedding space points are stored in.
    pub fn embedding_dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } => *dim,
            Self::Sphere { .. } | Self::Cylinder => 3,
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match self {
            Self::Euclidean { .. } => f64::INFINITY,
            Self::Sphere { radius } => PI * radius,
            Self::Cylinder => PI,
        }
    }

    /// Scalar curvature τ (trace of the Ricci tensor).
    pub fn scalar_curvature(&self) -> f64 {
        match self {
            Self::Euclidean { .. } | Self::Cylinder => 0.0,
            Self::Sphere { radius } => 2.0 / (radius * radius),
        }
    }

    /// Validates embedding coordinates and wraps them into a point.
    pub fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint, GeometryError> {
        let p = ManifoldPoint::new(coords);
        self.check_point(&p)?;
        Ok(p)
    }

    /// Checks the membership invariant for `p`.
    pub fn check_point(&self, p: &ManifoldPoint) -> Result<(), GeometryError> {
        if p.dim() != self.embedding_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.embedding_dim(),
                got: p.dim(),
            });
        }
        match self {
            Self::Euclidean { .. } => Ok(()),
            Self::Sphere { radius } => {
                let norm = norm(p.coords());
                let deviation = (norm - radius).abs() / radius;
                if deviation > POINT_TOLERANCE {
                    return Err(GeometryError::PointOffManifold { deviation });
                }
                Ok(())
            }
            Self::Cylinder => {
                let c = p.coords();
                let deviation = (c[0] * c[0] + c[1] * c[1] - 1.0).abs();
                if deviation > POINT_TOLERANCE {
                    return Err(GeometryError::PointOffManifold { deviation });
                }
                Ok(())
            }
        }
    }

    fn check_pair(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<(), GeometryError> {
        let expected = self.embedding_dim();
        for point in [p, q] {
            if point.dim() != expected {
                return Err(GeometryError::DimensionMismatch { expected, got: point.dim() });
            }
        }
        Ok(())
    }

    /// Geodesic distance between `p` and `q`.
    ///
    /// Sphere: R·arccos(⟨p,q⟩/R²), evaluated as R·atan2(‖p×q‖, ⟨p,q⟩) —
    /// the same value, but well conditioned at both ends, so that
    /// d(p, p) = 0 and d(p, -p) = πR hold exactly. Cylinder: the flat
    /// product distance with the angular difference wrapped to [-π, π],
    /// which is the true geodesic distance for every pair of points.
    pub fn distance(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64, GeometryError> {
        self.check_pair(p, q)?;
        Ok(match self {
            Self::Euclidean { .. } => {
                let mut sum = 0.0;
                for (a, b) in p.coords().iter().zip(q.coords()) {
                    let d = a - b;
                    sum += d * d;
                }
                sum.sqrt()
            }
            Self::Sphere { radius } => {
                let a = p.coords();
                let b = q.coords();
                let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                let cx = a[1] * b[2] - a[2] * b[1];
                let cy = a[2] * b[0] - a[0] * b[2];
                let cz = a[0] * b[1] - a[1] * b[0];
                let cross = (cx * cx + cy * cy + cz * cz).sqrt();
                radius * cross.atan2(dot)
            }
            Self::Cylinder => {
                let pc = p.coords();
                let qc = q.coords();
                let dr = wrap_angle(pc[1].atan2(pc[0]) - qc[1].atan2(qc[0]));
                let ds = pc[2] - qc[2];
                (dr * dr + ds * ds).sqrt()
            }
        })
    }

    /// Volume density function θ_base(q): the ratio of the Riemannian
    /// volume element to the flat one in normal coordinates at `base`,
    /// evaluated at `q`.
    ///
    /// It equals 1 identically on ℝ^d and the cylinder, and
    /// R·|sin(d/R)|/d on the sphere, with θ_base(base) = 1. Only defined
    /// for distance(base, q) < injectivity radius; callers must clamp
    /// first.
    pub fn volume_density(&self, base: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64, GeometryError> {
        let d = self.distance(base, q)?;
        let inj = self.injectivity_radius();
        if d >= inj {
            return Err(GeometryError::BeyondInjectivityRadius {
                distance: d,
                injectivity_radius: inj,
            });
        }
        Ok(match self {
            Self::Euclidean { .. } | Self::Cylinder => 1.0,
            Self::Sphere { radius } => {
                if d == 0.0 {
                    1.0
                } else {
                    radius * (d / radius).sin().abs() / d
                }
            }
        })
    }

    /// Exponential map: follows the geodesic from `p` with initial velocity
    /// `v` (a tangent vector in embedding coordinates) for unit time.
    pub fn exp_map(&self, p: &ManifoldPoint, v: &[f64]) -> Result<ManifoldPoint, GeometryError> {
        self.check_point(p)?;
        if v.len() != self.embedding_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.embedding_dim(),
                got: v.len(),
            });
        }
        match self {
            Self::Euclidean { .. } => Ok(ManifoldPoint::new(
                p.coords().iter().zip(v).map(|(a, b)| a + b).collect(),
            )),
            Self::Sphere { radius } => {
                self.check_tangent(p, v)?;
                let t = norm(v);
                if t == 0.0 {
                    return Ok(p.clone());
                }
                let angle = t / radius;
                let (sin, cos) = angle.sin_cos();
                let coords = p
                    .coords()
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * cos + b / t * radius * sin)
                    .collect();
                Ok(ManifoldPoint::new(coords))
            }
            Self::Cylinder => {
                self.check_tangent(p, v)?;
                let c = p.coords();
                let r = c[1].atan2(c[0]);
                // Angular component of v in the embedding is a multiple of
                // the unit tangent (-sin r, cos r, 0).
                let da = v[1] * r.cos() - v[0] * r.sin();
                let new_angle = r + da;
                Ok(ManifoldPoint::new(vec![new_angle.cos(), new_angle.sin(), c[2] + v[2]]))
            }
        }
    }

    /// Logarithm map: the tangent vector at `p` whose exponential is `q`.
    /// Requires distance(p, q) < injectivity radius; its norm equals the
    /// geodesic distance.
    pub fn log_map(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<Vec<f64>, GeometryError> {
        let d = self.distance(p, q)?;
        if d >= self.injectivity_radius() {
            return Err(GeometryError::CutLocus { distance: d });
        }
        Ok(match self {
            Self::Euclidean { .. } => q.coords().iter().zip(p.coords()).map(|(b, a)| b - a).collect(),
            Self::Sphere { radius } => {
                if d == 0.0 {
                    return Ok(vec![0.0; 3]);
                }
                let angle = d / radius;
                let cos = angle.cos();
                // Component of q orthogonal to p, rescaled to length d.
                let scale = cos / radius;
                let ortho: Vec<f64> = q
                    .coords()
                    .iter()
                    .zip(p.coords())
                    .map(|(b, a)| b / radius - a * scale)
                    .collect();
                let ortho_norm = norm(&ortho);
                ortho.iter().map(|x| x / ortho_norm * d).collect()
            }
            Self::Cylinder => {
                let pc = p.coords();
                let qc = q.coords();
                let rp = pc[1].atan2(pc[0]);
                let rq = qc[1].atan2(qc[0]);
                let da = wrap_angle(rq - rp);
                vec![-rp.sin() * da, rp.cos() * da, qc[2] - pc[2]]
            }
        })
    }

    /// Volume of the geodesic ball of radius `r`.
    ///
    /// Euclidean: λ(𝒱₁)·r^d. Sphere: 2πR²(1 − cos(r/R)). Cylinder: πr².
    /// `r` may equal the injectivity radius (boundary case, taken as the
    /// limit) but not exceed it on the sphere and the cylinder.
    pub fn geodesic_ball_volume(&self, r: f64) -> Result<f64, GeometryError> {
        if !(r > 0.0) {
            return Err(GeometryError::InvalidRadius(r));
        }
        match self {
            Self::Euclidean { dim } => Ok(unit_ball_volume(*dim) * r.powi(*dim as i32)),
            Self::Sphere { radius } => {
                if r > self.injectivity_radius() {
                    return Err(GeometryError::InvalidRadius(r));
                }
                Ok(2.0 * PI * radius * radius * (1.0 - (r / radius).cos()))
            }
            Self::Cylinder => {
                if r > self.injectivity_radius() {
                    return Err(GeometryError::InvalidRadius(r));
                }
                Ok(PI * r * r)
            }
        }
    }

    fn check_tangent(&self, p: &ManifoldPoint, v: &[f64]) -> Result<(), GeometryError> {
        let radial = match self {
            Self::Euclidean { .. } => return Ok(()),
            Self::Sphere { radius } => {
                let dot: f64 = p.coords().iter().zip(v).map(|(a, b)| a * b).sum();
                dot / radius
            }
            Self::Cylinder => {
                let c = p.coords();
                v[0] * c[0] + v[1] * c[1]
            }
        };
        let scale = norm(v).max(1.0);
        if radial.abs() > 1e-6 * scale {
            return Err(GeometryError::NotTangent { deviation: radial.abs() });
        }
        Ok(())
    }
}

/// Lebesgue volume λ(𝒱₁) of the unit ball in ℝ^d: π^{d/2} / Γ(d/2 + 1).
pub fn unit_ball_volume(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    PI.powf(d as f64 / 2.0) / gamma_half_plus_one(d)
}

/// Surface measure of the unit sphere S^{d-1} in ℝ^d.
pub fn unit_sphere_surface(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Wraps an angle difference to [-π, π).
pub fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Midpoint latitude–longitude product grid on the sphere of radius
/// `radius`, with quadrature weights R² sin(φ) Δφ Δλ (φ the colatitude).
/// The weights sum to the sphere area up to the midpoint-rule error, so
/// `Σ w_i f(p_i)` approximates `∫ f dν_g`. Points are emitted row-major,
/// colatitude before longitude.
pub fn sphere_lat_lon_grid(radius: f64, n_lat: usize, n_lon: usize) -> Vec<(ManifoldPoint, f64)> {
    let d_phi = PI / n_lat as f64;
    let d_lambda = 2.0 * PI / n_lon as f64;
    let mut grid = Vec::with_capacity(n_lat * n_lon);
    for i in 0..n_lat {
        let phi = (i as f64 + 0.5) * d_phi;
        let (sin_phi, cos_phi) = phi.sin_cos();
        let weight = radius * radius * sin_phi * d_phi * d_lambda;
        for j in 0..n_lon {
            let lambda = (j as f64 + 0.5) * d_lambda;
            let point = ManifoldPoint::new(vec![
                radius * sin_phi * lambda.cos(),
                radius * sin_phi * lambda.sin(),
                radius * cos_phi,
            ]);
            grid.push((point, weight));
        }
    }
    grid
}

/// Product quadrature grid on the cylinder over the axial window
/// [axial_lo, axial_hi]: midpoint rule in the angle (periodic, so it
/// converges spectrally for smooth densities), composite Simpson along the
/// axis. `n_axial` is the number of Simpson intervals and must be even.
/// Weights integrate against dθ dt, which is the Riemannian volume of the
/// unit cylinder.
pub fn cylinder_box_grid(
    n_angle: usize,
    axial_lo: f64,
    axial_hi: f64,
    n_axial: usize,
) -> Vec<(ManifoldPoint, f64)> {
    assert!(n_axial >= 2 && n_axial % 2 == 0, "Simpson rule needs an even interval count");
    let d_theta = 2.0 * PI / n_angle as f64;
    let h = (axial_hi - axial_lo) / n_axial as f64;
    let mut grid = Vec::with_capacity(n_angle * (n_axial + 1));
    for i in 0..n_angle {
        let theta = (i as f64 + 0.5) * d_theta;
        let (sin_t, cos_t) = theta.sin_cos();
        for j in 0..=n_axial {
            let simpson = if j == 0 || j == n_axial {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let t = axial_lo + j as f64 * h;
            let point = ManifoldPoint::new(vec![cos_t, sin_t, t]);
            grid.push((point, d_theta * simpson * h / 3.0));
        }
    }
    grid
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
