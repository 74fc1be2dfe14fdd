//! Physical configuration: extended obstacles as smooth closed star-shaped
//! curves, point scatterers with their scattering coefficients, and the
//! incident plane wave, plus boundary discretization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SCATTERER_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    pub fn add(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.y - other.y)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// Closed star-shaped curve `x(t) = center + r(t) (cos(t+rot), sin(t+rot))`
/// with a trigonometric radial function
/// `r(t) = a0 + sum_m (a_m cos mt + b_m sin mt)`.
///
/// Keeping `r` trigonometric makes the first and second derivatives of the
/// parameterization analytic, so boundary normals and curvature terms carry
/// no numerical differentiation error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParametricCurve {
    pub center: Vec2,
    pub rotation: f64,
    /// a_0, a_1, ... cosine coefficients of r(t).
    pub cos_coeffs: Vec<f64>,
    /// b_1, b_2, ... sine coefficients of r(t) (index 0 corresponds to m=1).
    pub sin_coeffs: Vec<f64>,
}

impl ParametricCurve {
    /// The five-leaf test obstacle `r(t) = 2 + 0.5 cos(5t)`.
    pub fn five_leaf(center: Vec2, rotation: f64) -> Self {
        ParametricCurve {
            center,
            rotation,
            cos_coeffs: vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.5],
            sin_coeffs: vec![],
        }
    }

    pub fn circle(center: Vec2, radius: f64) -> Self {
        ParametricCurve {
            center,
            rotation: 0.0,
            cos_coeffs: vec![radius],
            sin_coeffs: vec![],
        }
    }

    pub fn radius(&self, t: f64) -> f64 {
        let mut r = 0.0;
        for (m, a) in self.cos_coeffs.iter().enumerate() {
            r += a * (m as f64 * t).cos();
        }
        for (i, b) in self.sin_coeffs.iter().enumerate() {
            r += b * ((i + 1) as f64 * t).sin();
        }
        r
    }

    pub fn radius_deriv(&self, t: f64) -> f64 {
        let mut dr = 0.0;
        for (m, a) in self.cos_coeffs.iter().enumerate() {
            dr -= a * m as f64 * (m as f64 * t).sin();
        }
        for (i, b) in self.sin_coeffs.iter().enumerate() {
            let m = (i + 1) as f64;
            dr += b * m * (m * t).cos();
        }
        dr
    }

    pub fn radius_deriv2(&self, t: f64) -> f64 {
        let mut d2 = 0.0;
        for (m, a) in self.cos_coeffs.iter().enumerate() {
            let m = m as f64;
            d2 -= a * m * m * (m * t).cos();
        }
        for (i, b) in self.sin_coeffs.iter().enumerate() {
            let m = (i + 1) as f64;
            d2 -= b * m * m * (m * t).sin();
        }
        d2
    }

    pub fn position(&self, t: f64) -> Vec2 {
        let e = Vec2::from_angle(t + self.rotation);
        self.center.add(e.scale(self.radius(t)))
    }

    /// First derivative of the parameterization.
    pub fn deriv(&self, t: f64) -> Vec2 {
        let th = t + self.rotation;
        let e = Vec2::from_angle(th);
        let n = Vec2::new(-th.sin(), th.cos());
        e.scale(self.radius_deriv(t)).add(n.scale(self.radius(t)))
    }

    /// Second derivative of the parameterization.
    pub fn deriv2(&self, t: f64) -> Vec2 {
        let th = t + self.rotation;
        let e = Vec2::from_angle(th);
        let n = Vec2::new(-th.sin(), th.cos());
        let r = self.radius(t);
        let dr = self.radius_deriv(t);
        let d2r = self.radius_deriv2(t);
        e.scale(d2r - r).add(n.scale(2.0 * dr))
    }

    /// True if `p` lies strictly inside the curve, using the radial
    /// representation relative to the center.
    pub fn contains(&self, p: Vec2) -> bool {
        let d = p.sub(self.center);
        let rho = d.norm();
        if rho == 0.0 {
            return true;
        }
        let t = d.y.atan2(d.x) - self.rotation;
        rho < self.radius(t)
    }

    /// Signed distance proxy: `|p - center| - r(angle)`. Positive outside.
    pub fn radial_clearance(&self, p: Vec2) -> f64 {
        let d = p.sub(self.center);
        let rho = d.norm();
        let t = d.y.atan2(d.x) - self.rotation;
        rho - self.radius(t)
    }
}

/// Uniform-parameter Nyström discretization of one closed curve.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    pub nodes_t: Vec<f64>,
    pub positions: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub speeds: Vec<f64>,
    /// Second derivative of the parameterization at each node (curvature
    /// term of the singular-kernel diagonal).
    pub second_derivs: Vec<Vec2>,
}

impl BoundaryDiscretization {
    pub fn len(&self) -> usize {
        self.nodes_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes_t.is_empty()
    }

    /// Trapezoid weight in parameter space.
    pub fn param_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.len() as f64
    }

    pub fn arclength(&self) -> f64 {
        self.param_step() * self.speeds.iter().sum::<f64>()
    }

    /// Typical spacing between adjacent nodes, used for near-boundary checks.
    pub fn node_spacing(&self) -> f64 {
        self.arclength() / self.len() as f64
    }
}

/// Samples a curve at `n` uniform parameter nodes `t_i = 2 pi i / n`.
///
/// Normals are computed from the analytic derivative and oriented into the
/// exterior; a non-positive radial value anywhere is a degenerate curve.
pub fn sample_boundary(curve: &ParametricCurve, n: usize) -> Result<BoundaryDiscretization> {
    if n < 16 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "boundary node count must be even and >= 16, got {n}"
        )));
    }
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut disc = BoundaryDiscretization {
        nodes_t: Vec::with_capacity(n),
        positions: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        speeds: Vec::with_capacity(n),
        second_derivs: Vec::with_capacity(n),
    };
    for i in 0..n {
        let t = h * i as f64;
        if curve.radius(t) <= 0.0 {
            return Err(Error::DegenerateCurve { t });
        }
        let pos = curve.position(t);
        let d = curve.deriv(t);
        let speed = d.norm();
        // Outward normal for a counterclockwise parameterization.
        let nu = Vec2::new(d.y / speed, -d.x / speed);
        debug_assert!(nu.dot(pos.sub(curve.center)) > 0.0, "normal not outward");
        disc.nodes_t.push(t);
        disc.positions.push(pos);
        disc.normals.push(nu);
        disc.speeds.push(speed);
        disc.second_derivs.push(curve.deriv2(t));
    }
    Ok(disc)
}

/// Nonlinearity order of a point-scatterer population, with the scattering
/// coefficients of each scatterer. All vectors have length m.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Nonlinearity {
    Linear {
        sigma: Vec<f64>,
    },
    Quadratic {
        /// Linear coefficient at the fundamental, sigma^(1)_{k,1}.
        sig1_1: Vec<f64>,
        /// Linear coefficient at the second harmonic, sigma^(1)_{k,2}.
        sig1_2: Vec<f64>,
        /// Quadratic coefficient in the fundamental equation, sigma^(2)_{k,1}.
        sig2_1: Vec<f64>,
        /// Quadratic coefficient in the second-harmonic equation, sigma^(2)_{k,2}.
        sig2_2: Vec<f64>,
    },
    Cubic {
        sig1_1: Vec<f64>,
        sig1_2: Vec<f64>,
        /// Kerr-type coefficient |phi1|^2 phi1, sigma^(3)_{k,1}.
        sig3_1: Vec<f64>,
        /// Conjugate-mixing coefficient conj(phi1)^2 phi3, sigma^(3)_{k,2}.
        sig3_2: Vec<f64>,
        /// Third-harmonic source coefficient phi1^3, sigma^(3)_{k,3}.
        sig3_3: Vec<f64>,
    },
}

impl Nonlinearity {
    pub fn order(&self) -> u32 {
        match self {
            Nonlinearity::Linear { .. } => 1,
            Nonlinearity::Quadratic { .. } => 2,
            Nonlinearity::Cubic { .. } => 3,
        }
    }

    /// Harmonic indices carried by this nonlinearity order.
    pub fn harmonic_indices(&self) -> &'static [u32] {
        match self {
            Nonlinearity::Linear { .. } => &[1],
            Nonlinearity::Quadratic { .. } => &[1, 2],
            Nonlinearity::Cubic { .. } => &[1, 3],
        }
    }

    fn coefficient_len(&self) -> Option<usize> {
        let all = |vs: &[&Vec<f64>]| {
            let n = vs[0].len();
            vs.iter().all(|v| v.len() == n).then_some(n)
        };
        match self {
            Nonlinearity::Linear { sigma } => Some(sigma.len()),
            Nonlinearity::Quadratic {
                sig1_1,
                sig1_2,
                sig2_1,
                sig2_2,
            } => all(&[sig1_1, sig1_2, sig2_1, sig2_2]),
            Nonlinearity::Cubic {
                sig1_1,
                sig1_2,
                sig3_1,
                sig3_2,
                sig3_3,
            } => all(&[sig1_1, sig1_2, sig3_1, sig3_2, sig3_3]),
        }
    }

    /// Linear coefficients at each harmonic carried by this order.
    pub fn linear_coefficients(&self) -> Vec<&[f64]> {
        match self {
            Nonlinearity::Linear { sigma } => vec![sigma],
            Nonlinearity::Quadratic { sig1_1, sig1_2, .. } => vec![sig1_1, sig1_2],
            Nonlinearity::Cubic { sig1_1, sig1_2, .. } => vec![sig1_1, sig1_2],
        }
    }

    /// Same order with all nonlinear coefficients zeroed.
    pub fn linearized(&self) -> Nonlinearity {
        match self {
            Nonlinearity::Linear { sigma } => Nonlinearity::Linear {
                sigma: sigma.clone(),
            },
            Nonlinearity::Quadratic {
                sig1_1,
                sig1_2,
                sig2_1,
                ..
            } => Nonlinearity::Quadratic {
                sig1_1: sig1_1.clone(),
                sig1_2: sig1_2.clone(),
                sig2_1: vec![0.0; sig2_1.len()],
                sig2_2: vec![0.0; sig2_1.len()],
            },
            Nonlinearity::Cubic {
                sig1_1,
                sig1_2,
                sig3_1,
                ..
            } => Nonlinearity::Cubic {
                sig1_1: sig1_1.clone(),
                sig1_2: sig1_2.clone(),
                sig3_1: vec![0.0; sig3_1.len()],
                sig3_2: vec![0.0; sig3_1.len()],
                sig3_3: vec![0.0; sig3_1.len()],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointScattererSet {
    pub positions: Vec<Vec2>,
    pub nonlinearity: Nonlinearity,
}

impl PointScattererSet {
    pub fn new(positions: Vec<Vec2>, nonlinearity: Nonlinearity) -> Result<Self> {
        let set = PointScattererSet {
            positions,
            nonlinearity,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn empty() -> Self {
        PointScattererSet {
            positions: vec![],
            nonlinearity: Nonlinearity::Linear { sigma: vec![] },
        }
    }

    /// Linear population with a shared coefficient.
    pub fn uniform_linear(positions: Vec<Vec2>, sigma: f64) -> Result<Self> {
        let m = positions.len();
        PointScattererSet::new(positions, Nonlinearity::Linear {
            sigma: vec![sigma; m],
        })
    }

    pub fn uniform_quadratic(positions: Vec<Vec2>, sig1: f64, sig2: f64) -> Result<Self> {
        let m = positions.len();
        PointScattererSet::new(positions, Nonlinearity::Quadratic {
            sig1_1: vec![sig1; m],
            sig1_2: vec![sig1; m],
            sig2_1: vec![sig2; m],
            sig2_2: vec![sig2; m],
        })
    }

    pub fn uniform_cubic(positions: Vec<Vec2>, sig1: f64, sig3: f64) -> Result<Self> {
        let m = positions.len();
        PointScattererSet::new(positions, Nonlinearity::Cubic {
            sig1_1: vec![sig1; m],
            sig1_2: vec![sig1; m],
            sig3_1: vec![sig3; m],
            sig3_2: vec![sig3; m],
            sig3_3: vec![sig3; m],
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.positions.len();
        match self.nonlinearity.coefficient_len() {
            Some(n) if n == m => {}
            _ => {
                return Err(Error::InvalidScene(format!(
                    "coefficient vectors do not all have length {m}"
                )))
            }
        }
        for sig in self.nonlinearity.linear_coefficients() {
            if sig.iter().any(|&s| s < 0.0) {
                return Err(Error::InvalidScene(
                    "linear scattering coefficients must be nonnegative".into(),
                ));
            }
        }
        for i in 0..m {
            for k in (i + 1)..m {
                let d = self.positions[i].sub(self.positions[k]).norm();
                if d < MIN_SCATTERER_SEPARATION {
                    return Err(Error::InvalidScene(format!(
                        "point scatterers {i} and {k} are closer than {MIN_SCATTERER_SEPARATION:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same coefficients, new positions (moving-scatterer modality).
    pub fn at_positions(&self, positions: Vec<Vec2>) -> Result<Self> {
        PointScattererSet::new(positions, self.nonlinearity.clone())
    }
}

/// Plane incident wave `exp(i kappa r . d)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IncidentWave {
    pub kappa: f64,
    pub direction: Vec2,
}

impl IncidentWave {
    pub fn new(kappa: f64, direction: Vec2) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(Error::Domain(format!("wavenumber must be positive: {kappa}")));
        }
        if (direction.norm() - 1.0).abs() > 1e-14 {
            return Err(Error::Domain(format!(
                "incident direction must be a unit vector, |d| = {}",
                direction.norm()
            )));
        }
        Ok(IncidentWave { kappa, direction })
    }

    pub fn from_angle(kappa: f64, beta: f64) -> Result<Self> {
        IncidentWave::new(kappa, Vec2::from_angle(beta))
    }

    pub fn field_at(&self, r: Vec2) -> num_complex::Complex64 {
        num_complex::Complex64::new(0.0, self.kappa * r.dot(self.direction)).exp()
    }
}

/// Harmonic wavenumbers kappa_j = j * kappa for the orders present.
#[derive(Debug, Clone)]
pub struct HarmonicSet {
    pub base: f64,
    pub indices: Vec<u32>,
}

impl HarmonicSet {
    pub fn for_nonlinearity(kappa: f64, nl: &Nonlinearity) -> Self {
        HarmonicSet {
            base: kappa,
            indices: nl.harmonic_indices().to_vec(),
        }
    }

    pub fn kappa(&self, j: u32) -> f64 {
        self.base * j as f64
    }
}

/// Places point scatterers on a ray through the origin in the incidence
/// direction: `position_k = radii_k (cos beta, sin beta)`.
pub fn place_aligned_point_scatterers(radii: &[f64], beta: f64) -> Result<Vec<Vec2>> {
    if radii.is_empty() {
        return Err(Error::Config("empty radius list".into()));
    }
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    if !increasing || radii[0] <= 0.0 {
        return Err(Error::Config(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let d = Vec2::from_angle(beta);
    Ok(radii.iter().map(|&r| d.scale(r)).collect())
}

/// Uniform random positions in the annulus r0 < |r| < r1, reproducible from
/// the seed. Uniform in angle and in radius, resampled on collisions.
pub fn random_annulus_positions(count: usize, r0: f64, r1: f64, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec2> = Vec::with_capacity(count);
    while out.len() < count {
        let theta = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let r = rng.gen_range(r0..r1);
        let p = Vec2::from_angle(theta).scale(r);
        if out
            .iter()
            .all(|q| q.sub(p).norm() >= MIN_SCATTERER_SEPARATION)
        {
            out.push(p);
        }
    }
    out
}

/// Complete physical configuration: obstacles plus a point-scatterer set.
#[derive(Debug, Clone)]
pub struct Scene {
    pub obstacles: Vec<ParametricCurve>,
    pub scatterers: PointScattererSet,
}

impl Scene {
    pub fn new(obstacles: Vec<ParametricCurve>, scatterers: PointScattererSet) -> Result<Self> {
        scatterers.validate()?;
        for (i, p) in scatterers.positions.iter().enumerate() {
            for (o, curve) in obstacles.iter().enumerate() {
                if curve.radial_clearance(*p) <= 0.0 {
                    return Err(Error::InvalidScene(format!(
                        "point scatterer {i} lies inside or on obstacle {o}"
                    )));
                }
            }
        }
        Ok(Scene {
            obstacles,
            scatterers,
        })
    }

    pub fn obstacle_only(obstacles: Vec<ParametricCurve>) -> Self {
        Scene {
            obstacles,
            scatterers: PointScattererSet::empty(),
        }
    }
}
