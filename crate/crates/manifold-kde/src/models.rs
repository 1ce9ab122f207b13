//! Generative models with exact densities, used as simulation ground
//! truth, plus the asymptotic variance σ²(p) of the adaptive estimator.
//!
//! Every sampler is exact (inverse-CDF or rejection, no MCMC), so
//! replication variability is attributable to sampling alone. Densities
//! are expressed w.r.t. the Riemannian volume measure of the model's
//! manifold; on the unit cylinder that measure coincides with dθ dt.

use std::f64::consts::PI;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{unit_ball_volume, Manifold, ManifoldPoint};
use crate::kernel::{squared_integral, Kernel, KernelScaling};
use crate::neighbors::SampleSet;
use crate::numeric::{bessel_i0, orthonormal_frame};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("concentration parameter must be positive, got {0}")]
    InvalidConcentration(f64),
    #[error("mean direction must be a unit vector (norm {0})")]
    MeanNotUnit(f64),
    #[error("axial standard deviation must be positive, got {0}")]
    InvalidAxialSd(f64),
    #[error("density vanishes at the requested point")]
    ZeroDensity,
}

/// A sampling distribution on a manifold paired with its exact density.
pub trait DensityModel: Send + Sync {
    fn manifold(&self) -> Manifold;
    fn name(&self) -> &'static str;
    /// Density w.r.t. dν_g at a point of the model's manifold.
    fn density(&self, p: &ManifoldPoint) -> f64;
    /// Draws n i.i.d. points.
    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> SampleSet;
}

/// Von Mises–Fisher distribution on the unit 2-sphere:
/// f(x) = C₃(κ) exp(κ⟨x, μ⟩) with C₃(κ) = κ/(4π sinh κ).
#[derive(Debug, Clone)]
pub struct VonMisesFisher {
    mu: [f64; 3],
    kappa: f64,
    log_norm: f64,
}

impl VonMisesFisher {
    pub fn new(mu: [f64; 3], kappa: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(ModelError::InvalidConcentration(kappa));
        }
        let norm = (mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(ModelError::MeanNotUnit(norm));
        }
        // ln C₃(κ) = ln κ − ln(4π sinh κ).
        let log_norm = kappa.ln() - (4.0 * PI).ln() - kappa.sinh().ln();
        Ok(Self { mu, kappa, log_norm })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mean_direction(&self) -> [f64; 3] {
        self.mu
    }
}

impl DensityModel for VonMisesFisher {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere { radius: 1.0 }
    }

    fn name(&self) -> &'static str {
        "von-mises-fisher"
    }

    fn density(&self, p: &ManifoldPoint) -> f64 {
        let c = p.coords();
        let dot = c[0] * self.mu[0] + c[1] * self.mu[1] + c[2] * self.mu[2];
        (self.log_norm + self.kappa * dot).exp()
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> SampleSet {
        // Tangent-normal decomposition: the component w = ⟨x, μ⟩ has density
        // ∝ exp(κw) on [-1, 1] and is drawn by inverse CDF; the tangential
        // angle is uniform.
        let (e1, e2) = orthonormal_frame(self.mu);
        let points = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let w = 1.0 + ((u + (1.0 - u) * (-2.0 * self.kappa).exp()).ln()) / self.kappa;
                let radial = (1.0 - w * w).max(0.0).sqrt();
                let psi = rng.random_range(0.0..2.0 * PI);
                let (sin_psi, cos_psi) = psi.sin_cos();
                ManifoldPoint::new(vec![
                    radial * (cos_psi * e1[0] + sin_psi * e2[0]) + w * self.mu[0],
                    radial * (cos_psi * e1[1] + sin_psi * e2[1]) + w * self.mu[1],
                    radial * (cos_psi * e1[2] + sin_psi * e2[2]) + w * self.mu[2],
                ])
            })
            .collect();
        SampleSet::new(self.manifold(), points).expect("sampled points lie on the sphere")
    }
}

/// Uniform distribution on the unit 2-sphere, sampled by normalizing
/// standard Gaussian triples; density ≡ 1/(4π).
#[derive(Debug, Clone, Default)]
pub struct UniformSphere;

impl UniformSphere {
    pub fn new() -> Self {
        Self
    }
}

impl DensityModel for UniformSphere {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere { radius: 1.0 }
    }

    fn name(&self) -> &'static str {
        "uniform-sphere"
    }

    fn density(&self, _p: &ManifoldPoint) -> f64 {
        1.0 / (4.0 * PI)
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> SampleSet {
        let points = (0..n)
            .map(|_| loop {
                let v: [f64; 3] = [
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                ];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if norm > 1e-12 {
                    return ManifoldPoint::new(vec![v[0] / norm, v[1] / norm, v[2] / norm]);
                }
            })
            .collect();
        SampleSet::new(self.manifold(), points).expect("normalized points lie on the sphere")
    }
}

/// Mardia–Sutton distribution on the cylinder S¹ × ℝ: a von Mises angular
/// component and a conditionally Gaussian axial component,
///
///   θ ~ vM(mean_angle, κ),   t | θ ~ N(a + b cos θ, σ²).
///
/// The joint density w.r.t. dθ dt is
/// exp(κ cos(θ − mean_angle))/(2π I₀(κ)) · φ_σ(t − a − b cos θ).
#[derive(Debug, Clone)]
pub struct MardiaSutton {
    mean_angle: f64,
    kappa: f64,
    a: f64,
    b: f64,
    sigma: f64,
    i0: f64,
}

impl MardiaSutton {
    pub fn new(mean_angle: f64, kappa: f64, a: f64, b: f64, sigma: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(ModelError::InvalidConcentration(kappa));
        }
        if !(sigma > 0.0) {
            return Err(ModelError::InvalidAxialSd(sigma));
        }
        Ok(Self { mean_angle, kappa, a, b, sigma, i0: bessel_i0(kappa) })
    }

    /// The parameters of the simulation model: mean direction (-1, 0)
    /// (angle π), κ = 5, t | θ ~ N(1 + 2√5 cos θ, 1).
    pub fn simulation_model() -> Self {
        Self::new(PI, 5.0, 1.0, 2.0 * 5.0f64.sqrt(), 1.0).expect("fixed parameters are valid")
    }

    /// Joint density in (angle, axial) coordinates.
    pub fn density_angle_axial(&self, theta: f64, t: f64) -> f64 {
        let angular = (self.kappa * (theta - self.mean_angle).cos()).exp() / (2.0 * PI * self.i0);
        let z = (t - self.a - self.b * theta.cos()) / self.sigma;
        let axial = (-0.5 * z * z).exp() / (self.sigma * (2.0 * PI).sqrt());
        angular * axial
    }

    /// Mean of the axial component given the angle.
    pub fn conditional_axial_mean(&self, theta: f64) -> f64 {
        self.a + self.b * theta.cos()
    }
}

impl DensityModel for MardiaSutton {
    fn manifold(&self) -> Manifold {
        Manifold::Cylinder
    }

    fn name(&self) -> &'static str {
        "mardia-sutton"
    }

    fn density(&self, p: &ManifoldPoint) -> f64 {
        let c = p.coords();
        self.density_angle_axial(c[1].atan2(c[0]), c[2])
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> SampleSet {
        let points = (0..n)
            .map(|_| {
                let theta = sample_von_mises(rng, self.mean_angle, self.kappa);
                let mean = self.conditional_axial_mean(theta);
                let noise: f64 = StandardNormal.sample(rng);
                let t = mean + self.sigma * noise;
                ManifoldPoint::new(vec![theta.cos(), theta.sin(), t])
            })
            .collect();
        SampleSet::new(self.manifold(), points).expect("sampled points lie on the cylinder")
    }
}

/// Exact draw from the circular von Mises distribution vM(mean, κ) by the
/// Best–Fisher rejection method with a wrapped-Cauchy envelope.
pub fn sample_von_mises(rng: &mut dyn RngCore, mean: f64, kappa: f64) -> f64 {
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.random();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random();
            let angle = if u3 < 0.5 { -f.acos() } else { f.acos() };
            return wrap_to_two_pi(mean + angle);
        }
    }
}

fn wrap_to_two_pi(a: f64) -> f64 {
    a.rem_euclid(2.0 * PI)
}

/// Asymptotic variance of the adaptive estimator at p:
/// σ²(p) = λ(𝒱₁) f²(p) ∫_{𝒱₁} K²(‖u‖) du, with the kernel taken under the
/// same scaling the estimator uses.
pub fn asymptotic_sigma_sq(
    model: &dyn DensityModel,
    p: &ManifoldPoint,
    kernel: &Kernel,
    scaling: KernelScaling,
) -> Result<f64, ModelError> {
    let f = model.density(p);
    if !(f > 0.0) {
        return Err(ModelError::ZeroDensity);
    }
    let d = model.manifold().dim();
    let resolved = kernel.resolve(scaling, d);
    Ok(unit_ball_volume(d) * f * f * squared_integral(&resolved, d))
}

/// Serializable description of a model, for experiment configs and the
/// command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    VonMisesFisher { mu: [f64; 3], kappa: f64 },
    UniformSphere,
    MardiaSutton { mean_angle: f64, kappa: f64, a: f64, b: f64, sigma: f64 },
}

impl ModelSpec {
    /// The simulation presets: vMF(μ = (0,0,1), κ = 3), the uniform
    /// sphere, and the Mardia–Sutton cylinder model.
    pub fn simulation_models() -> [ModelSpec; 3] {
        [
            ModelSpec::VonMisesFisher { mu: [0.0, 0.0, 1.0], kappa: 3.0 },
            ModelSpec::UniformSphere,
            ModelSpec::MardiaSutton {
                mean_angle: PI,
                kappa: 5.0,
                a: 1.0,
                b: 2.0 * 5.0f64.sqrt(),
                sigma: 1.0,
            },
        ]
    }

    pub fn build(&self) -> Result<Box<dyn DensityModel>, ModelError> {
        Ok(match self {
            Self::VonMisesFisher { mu, kappa } => Box::new(VonMisesFisher::new(*mu, *kappa)?),
            Self::UniformSphere => Box::new(UniformSphere::new()),
            Self::MardiaSutton { mean_angle, kappa, a, b, sigma } => {
                Box::new(MardiaSutton::new(*mean_angle, *kappa, *a, *b, *sigma)?)
            }
        })
    }
}
