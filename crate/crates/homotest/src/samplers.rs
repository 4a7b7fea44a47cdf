//! Seeded generators for every distribution used by the experiment suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitCircle, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

fn default_torus_big() -> f64 {
    2.0
}

fn default_torus_tube() -> f64 {
    1.0
}

/// A named sampling distribution with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Mixture of von Mises distributions on the unit circle.
    VonmisesMixtureCircle {
        weights: Vec<f64>,
        mean_directions: Vec<[f64; 2]>,
        kappas: Vec<f64>,
    },
    /// Mixture of von Mises-Fisher distributions on the unit 2-sphere.
    VmfMixtureSphere {
        weights: Vec<f64>,
        mean_directions: Vec<[f64; 3]>,
        kappas: Vec<f64>,
    },
    /// Multivariate normal with full covariance.
    Mvn { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Uniform on the closed unit disk in the plane.
    UniformDisk,
    /// Uniform on the unit square `[0,1]^2`.
    UniformSquare,
    /// Uniform on the solid unit cube `[0,1]^3`.
    UniformCube,
    /// Uniform on the surface of the unit 2-sphere.
    UniformSphereSurface,
    /// Area-uniform sample of the torus of revolution in `R^3`.
    Torus {
        #[serde(default = "default_torus_big")]
        big_radius: f64,
        #[serde(default = "default_torus_tube")]
        tube_radius: f64,
    },
    /// Swiss roll `(t cos t, h, t sin t)`, `t ~ U[1.5π, 4.5π]`, `h ~ U[0, 10]`.
    SwissRoll,
    /// Archimedean spiral `r = t / 2π`, `t ~ U[0, 4π]`, plus optional
    /// isotropic Gaussian noise.
    Spiral {
        #[serde(default)]
        noise: f64,
    },
}

impl DistributionSpec {
    /// The reference circle mixture: weights 1/3 and 2/3, means
    /// `(1,0)` and `(0,1)`, concentrations 3 and 4.
    pub fn circle_mixture() -> Self {
        DistributionSpec::VonmisesMixtureCircle {
            weights: vec![1.0 / 3.0, 2.0 / 3.0],
            mean_directions: vec![[1.0, 0.0], [0.0, 1.0]],
            kappas: vec![3.0, 4.0],
        }
    }

    /// Equal-weight sphere mixture with axis means and concentrations 3, 4, 5.
    pub fn sphere_mixture() -> Self {
        DistributionSpec::VmfMixtureSphere {
            weights: vec![1.0 / 3.0; 3],
            mean_directions: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            kappas: vec![3.0, 4.0, 5.0],
        }
    }

    /// Bivariate normal with zero mean and off-diagonal covariance 0.5.
    pub fn mvn2() -> Self {
        DistributionSpec::Mvn {
            mean: vec![0.0, 0.0],
            cov: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        }
    }

    /// Trivariate normal with zero mean and off-diagonal covariance 0.5.
    pub fn mvn3() -> Self {
        DistributionSpec::Mvn {
            mean: vec![0.0; 3],
            cov: vec![
                vec![1.0, 0.5, 0.5],
                vec![0.5, 1.0, 0.5],
                vec![0.5, 0.5, 1.0],
            ],
        }
    }

    pub fn torus_default() -> Self {
        DistributionSpec::Torus { big_radius: 2.0, tube_radius: 1.0 }
    }

    /// Ambient dimension of the generated points.
    pub fn ambient_dim(&self) -> usize {
        match self {
            DistributionSpec::VonmisesMixtureCircle { .. }
            | DistributionSpec::UniformDisk
            | DistributionSpec::UniformSquare
            | DistributionSpec::Spiral { .. } => 2,
            DistributionSpec::VmfMixtureSphere { .. }
            | DistributionSpec::UniformCube
            | DistributionSpec::UniformSphereSurface
            | DistributionSpec::Torus { .. }
            | DistributionSpec::SwissRoll => 3,
            DistributionSpec::Mvn { mean, .. } => mean.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::VonmisesMixtureCircle { weights, mean_directions, kappas } => {
                validate_mixture(weights, mean_directions.len(), kappas)?;
                for (i, m) in mean_directions.iter().enumerate() {
                    if crate::geometry::euclidean_norm(m) < 1e-12 {
                        return Err(Error::InvalidSpec(format!("mean direction {i} is zero")));
                    }
                }
                Ok(())
            }
            DistributionSpec::VmfMixtureSphere { weights, mean_directions, kappas } => {
                validate_mixture(weights, mean_directions.len(), kappas)?;
                for (i, m) in mean_directions.iter().enumerate() {
                    if crate::geometry::euclidean_norm(m) < 1e-12 {
                        return Err(Error::InvalidSpec(format!("mean direction {i} is zero")));
                    }
                }
                Ok(())
            }
            DistributionSpec::Mvn { mean, cov } => {
                let d = mean.len();
                if d == 0 {
                    return Err(Error::InvalidSpec("mean must be nonempty".into()));
                }
                if cov.len() != d || cov.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidSpec("covariance shape must match mean".into()));
                }
                for i in 0..d {
                    for j in 0..d {
                        if (cov[i][j] - cov[j][i]).abs() > 1e-12 {
                            return Err(Error::InvalidSpec("covariance not symmetric".into()));
                        }
                    }
                }
                cholesky(cov)
                    .ok_or_else(|| Error::InvalidSpec("covariance not positive definite".into()))?;
                Ok(())
            }
            DistributionSpec::Torus { big_radius, tube_radius } => {
                if !(0.0 < *tube_radius && tube_radius < big_radius && big_radius.is_finite()) {
                    return Err(Error::InvalidSpec(
                        "torus requires 0 < tube_radius < big_radius < inf".into(),
                    ));
                }
                Ok(())
            }
            DistributionSpec::Spiral { noise } => {
                if *noise < 0.0 || !noise.is_finite() {
                    return Err(Error::InvalidSpec("spiral noise must be >= 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn validate_mixture(weights: &[f64], n_means: usize, kappas: &[f64]) -> Result<()> {
    if weights.is_empty() || weights.len() != n_means || weights.len() != kappas.len() {
        return Err(Error::InvalidSpec(
            "weights, mean_directions and kappas must have equal nonzero length".into(),
        ));
    }
    if weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidSpec("mixture weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSpec(format!("mixture weights sum to {total}, not 1")));
    }
    if kappas.iter().any(|&k| k <= 0.0) {
        return Err(Error::InvalidSpec("concentrations must be positive".into()));
    }
    Ok(())
}

/// Draws `n` points with a fresh ChaCha stream seeded by `seed`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(spec, n, &mut rng)
}

pub fn sample_with_rng(
    spec: &DistributionSpec,
    n: usize,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let points = match spec {
        DistributionSpec::VonmisesMixtureCircle { weights, mean_directions, kappas } => (0..n)
            .map(|_| {
                let c = pick_component(weights, rng);
                let mu = mean_directions[c][1].atan2(mean_directions[c][0]);
                let theta = sample_von_mises(mu, kappas[c], rng);
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        DistributionSpec::VmfMixtureSphere { weights, mean_directions, kappas } => (0..n)
            .map(|_| {
                let c = pick_component(weights, rng);
                sample_vmf_sphere(&mean_directions[c], kappas[c], rng)
            })
            .collect(),
        DistributionSpec::Mvn { mean, cov } => {
            let chol = cholesky(cov).expect("validated");
            let d = mean.len();
            (0..n)
                .map(|_| {
                    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    (0..d)
                        .map(|i| mean[i] + (0..=i).map(|j| chol[i][j] * z[j]).sum::<f64>())
                        .collect()
                })
                .collect()
        }
        DistributionSpec::UniformDisk => (0..n)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
        DistributionSpec::UniformSquare => {
            (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect()
        }
        DistributionSpec::UniformCube => (0..n)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
            .collect(),
        DistributionSpec::UniformSphereSurface => (0..n)
            .map(|_| {
                let p: [f64; 3] = UnitSphere.sample(rng);
                p.to_vec()
            })
            .collect(),
        DistributionSpec::Torus { big_radius: big, tube_radius: tube } => (0..n)
            .map(|_| {
                // Area-uniform: accept theta with probability prop. to R + r cos(theta).
                let theta = loop {
                    let t = rng.gen::<f64>() * std::f64::consts::TAU;
                    if rng.gen::<f64>() * (big + tube) <= big + tube * t.cos() {
                        break t;
                    }
                };
                let psi = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![
                    (big + tube * theta.cos()) * psi.cos(),
                    (big + tube * theta.cos()) * psi.sin(),
                    tube * theta.sin(),
                ]
            })
            .collect(),
        DistributionSpec::SwissRoll => (0..n)
            .map(|_| {
                let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * rng.gen::<f64>());
                let h = 10.0 * rng.gen::<f64>();
                vec![t * t.cos(), h, t * t.sin()]
            })
            .collect(),
        DistributionSpec::Spiral { noise } => (0..n)
            .map(|_| {
                let t = rng.gen::<f64>() * 4.0 * std::f64::consts::PI;
                let r = t / std::f64::consts::TAU;
                let mut p = vec![r * t.cos(), r * t.sin()];
                if *noise > 0.0 {
                    for x in &mut p {
                        let z: f64 = rng.sample(StandardNormal);
                        *x += noise * z;
                    }
                }
                p
            })
            .collect(),
    };
    PointCloud::new(points)
}

fn pick_component(weights: &[f64], rng: &mut impl Rng) -> usize {
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u <= acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Best-Fisher rejection sampler for the von Mises distribution on angles.
pub fn sample_von_mises(mu: f64, kappa: f64, rng: &mut impl Rng) -> f64 {
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1 = rng.gen::<f64>();
        let z = (std::f64::consts::PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2 = rng.gen::<f64>();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3 = rng.gen::<f64>();
            let sign = if u3 > 0.5 { 1.0 } else { -1.0 };
            return mu + sign * f.acos();
        }
    }
}

/// Ulrich/Wood sampler for the von Mises-Fisher distribution on S^2: draws
/// the cosine component by inversion and rotates the north pole to `mu`.
fn sample_vmf_sphere(mu: &[f64; 3], kappa: f64, rng: &mut impl Rng) -> Vec<f64> {
    let u = rng.gen::<f64>();
    // w ~ density prop. to exp(kappa * w) on [-1, 1]
    let w = 1.0 + (u + (1.0 - u) * (-2.0 * kappa).exp()).ln() / kappa;
    let circle: [f64; 2] = UnitCircle.sample(rng);
    let s = (1.0 - w * w).max(0.0).sqrt();
    let local = [s * circle[0], s * circle[1], w];
    rotate_from_north(mu, &local)
}

/// Rotates a vector expressed relative to the north pole `(0,0,1)` so that
/// the pole maps onto the (normalized) direction `mu`.
fn rotate_from_north(mu: &[f64; 3], v: &[f64; 3]) -> Vec<f64> {
    let norm = crate::geometry::euclidean_norm(mu);
    let m = [mu[0] / norm, mu[1] / norm, mu[2] / norm];
    // Rodrigues rotation about axis = north x m.
    let axis = [-m[1], m[0], 0.0];
    let sin_a = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
    if sin_a < 1e-12 {
        return if m[2] > 0.0 {
            v.to_vec()
        } else {
            vec![v[0], -v[1], -v[2]]
        };
    }
    let k = [axis[0] / sin_a, axis[1] / sin_a, 0.0];
    let cos_a = m[2];
    let kv = [
        k[1] * v[2] - k[2] * v[1],
        k[2] * v[0] - k[0] * v[2],
        k[0] * v[1] - k[1] * v[0],
    ];
    let kdv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    (0..3)
        .map(|i| v[i] * cos_a + kv[i] * sin_a + k[i] * kdv * (1.0 - cos_a))
        .collect()
}

/// Lower-triangular Cholesky factor; `None` when not positive definite.
fn cholesky(cov: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = cov.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = cov[i][i] - s;
                if v <= 0.0 {
                    return None;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (cov[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean_norm;

    #[test]
    fn torus_points_satisfy_parametric_identity() {
        let pc = sample(&DistributionSpec::torus_default(), 1000, 7).unwrap();
        for p in pc.points() {
            let ring = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let lhs = (ring - 2.0) * (ring - 2.0) + p[2] * p[2];
            assert!((lhs - 1.0).abs() < 1e-9, "off-torus point {p:?}");
        }
    }

    #[test]
    fn sphere_surface_points_have_unit_norm() {
        let pc = sample(&DistributionSpec::UniformSphereSurface, 1000, 3).unwrap();
        for p in pc.points() {
            assert!((euclidean_norm(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_mixture_mean_direction() {
        let pc = sample(&DistributionSpec::circle_mixture(), 100_000, 11).unwrap();
        let mut mean = [0.0, 0.0];
        for p in pc.points() {
            mean[0] += p[0];
            mean[1] += p[1];
        }
        // weight-averaged mean direction: 1/3 * (1,0) + 2/3 * (0,1)
        let expected = [1.0 / 3.0, 2.0 / 3.0];
        let dotp = mean[0] * expected[0] + mean[1] * expected[1];
        assert!(dotp > 0.0);
    }

    #[test]
    fn support_membership() {
        let disk = sample(&DistributionSpec::UniformDisk, 500, 1).unwrap();
        assert!(disk.points().iter().all(|p| euclidean_norm(p) <= 1.0 + 1e-12));
        let square = sample(&DistributionSpec::UniformSquare, 500, 1).unwrap();
        assert!(square
            .points()
            .iter()
            .all(|p| p.iter().all(|&x| (0.0..=1.0).contains(&x))));
        let cube = sample(&DistributionSpec::UniformCube, 500, 1).unwrap();
        assert_eq!(cube.dim(), 3);
        assert!(cube
            .points()
            .iter()
            .all(|p| p.iter().all(|&x| (0.0..=1.0).contains(&x))));
        assert_eq!(sample(&DistributionSpec::Spiral { noise: 0.0 }, 10, 1).unwrap().dim(), 2);
        assert_eq!(sample(&DistributionSpec::SwissRoll, 10, 1).unwrap().dim(), 3);
    }

    #[test]
    fn determinism() {
        let spec = DistributionSpec::sphere_mixture();
        let a = sample(&spec, 200, 42).unwrap();
        let b = sample(&spec, 200, 42).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, 200, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad_weights = DistributionSpec::VonmisesMixtureCircle {
            weights: vec![0.5, 0.4],
            mean_directions: vec![[1.0, 0.0], [0.0, 1.0]],
            kappas: vec![1.0, 1.0],
        };
        assert!(matches!(bad_weights.validate(), Err(Error::InvalidSpec(_))));

        let bad_torus = DistributionSpec::Torus { big_radius: 1.0, tube_radius: 2.0 };
        assert!(matches!(bad_torus.validate(), Err(Error::InvalidSpec(_))));

        let bad_cov = DistributionSpec::Mvn {
            mean: vec![0.0, 0.0],
            cov: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        };
        assert!(matches!(bad_cov.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn mvn_spec_roundtrips_through_json() {
        let spec = DistributionSpec::mvn3();
        let text = serde_json::to_string(&spec).unwrap();
        let back: DistributionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    /// Chi-squared goodness of fit of the von Mises sampler against its
    /// density over 36 angular bins at significance 0.001.
    #[test]
    fn von_mises_goodness_of_fit() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let (mu, kappa) = (0.7, 2.5);
        let n = 100_000usize;
        let bins = 36usize;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = vec![0usize; bins];
        for _ in 0..n {
            let theta = sample_von_mises(mu, kappa, &mut rng).rem_euclid(std::f64::consts::TAU);
            counts[((theta / std::f64::consts::TAU) * bins as f64) as usize % bins] += 1;
        }
        // Expected bin masses by quadrature of exp(kappa cos(theta - mu)).
        let quad = 200;
        let mut masses = vec![0.0f64; bins];
        let width = std::f64::consts::TAU / bins as f64;
        for (b, mass) in masses.iter_mut().enumerate() {
            for q in 0..quad {
                let theta = width * (b as f64 + (q as f64 + 0.5) / quad as f64);
                *mass += (kappa * (theta - mu).cos()).exp();
            }
        }
        let total: f64 = masses.iter().sum();
        let stat: f64 = counts
            .iter()
            .zip(&masses)
            .map(|(&c, &m)| {
                let e = n as f64 * m / total;
                (c as f64 - e) * (c as f64 - e) / e
            })
            .sum();
        let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "chi2 = {stat:.2} >= {critical:.2}");
    }
}
