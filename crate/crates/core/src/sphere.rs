//! Bloch-sphere geometry: directions, Cartesian conversion, single-copy
//! fidelities and uniform sampling.

use std::f64::consts::{PI, TAU};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pure qubit state cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩, identified with the
/// point (θ, φ) on the unit sphere.
///
/// θ is clamped to [0, π] and φ reduced to [0, 2π). At the poles φ carries no
/// information and is stored as 0, so two directions compare equal exactly
/// when they denote the same point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub const NORTH: Direction = Direction {
        theta: 0.0,
        phi: 0.0,
    };
    pub const SOUTH: Direction = Direction {
        theta: PI,
        phi: 0.0,
    };

    pub fn new(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let phi = if theta == 0.0 || theta == PI {
            0.0
        } else {
            let p = phi.rem_euclid(TAU);
            // rem_euclid can round up to exactly TAU for tiny negative input
            if p >= TAU {
                0.0
            } else {
                p
            }
        };
        Direction { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_cartesian(&self) -> UnitVector {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        UnitVector {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn from_cartesian(v: UnitVector) -> Result<Self> {
        Self::from_xyz(v.x, v.y, v.z)
    }

    /// Direction of an arbitrary vector. Vectors whose norm is within 1e-6
    /// of one are renormalized; anything further off is rejected.
    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        UnitVector::new(x, y, z).map(|u| u.direction())
    }

    pub fn antipode(&self) -> Self {
        Direction::new(PI - self.theta, self.phi + PI)
    }
}

/// Cartesian point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-9 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitVector {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-9 {
            return Err(Error::ZeroVector);
        }
        Ok(UnitVector {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn direction(&self) -> Direction {
        let rho = self.x.hypot(self.y);
        let theta = rho.atan2(self.z);
        let phi = if rho == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        };
        Direction::new(theta, phi)
    }

    /// Central angle to `other`, accurate near 0 and π.
    pub fn angle_to(&self, other: &UnitVector) -> f64 {
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        (cx * cx + cy * cy + cz * cz).sqrt().atan2(self.dot(other))
    }
}

/// |⟨Ω_a|Ω_b⟩|² = (1 + cos γ)/2, with cos γ taken from the Cartesian dot
/// product.
pub fn overlap_sq(a: &Direction, b: &Direction) -> f64 {
    overlap_sq_cartesian(&a.to_cartesian(), &b.to_cartesian())
}

#[inline]
pub fn overlap_sq_cartesian(a: &UnitVector, b: &UnitVector) -> f64 {
    (0.5 * (1.0 + a.dot(b))).clamp(0.0, 1.0)
}

/// Proper rotation of R³, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    /// R = R_z(alpha) · R_y(beta) · R_z(gamma).
    pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let (sg, cg) = gamma.sin_cos();
        Rotation([
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ])
    }

    pub fn apply(&self, v: &UnitVector) -> UnitVector {
        let r = &self.0;
        let x = r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z;
        let y = r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z;
        let z = r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z;
        // rotation preserves the norm up to rounding
        let n = (x * x + y * y + z * z).sqrt();
        UnitVector {
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    pub fn apply_direction(&self, d: &Direction) -> Direction {
        self.apply(&d.to_cartesian()).direction()
    }
}

/// Uniform sampler on the sphere backed by a seeded ChaCha8 stream.
///
/// Each direction consumes exactly two 64-bit outputs, so draw `i` of a
/// given `(seed, stream)` pair is reachable directly through [`seek`].
///
/// [`seek`]: SphereSampler::seek
#[derive(Debug, Clone)]
pub struct SphereSampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl SphereSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SphereSampler { rng, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Positions the stream so that the next call to [`sample`] returns
    /// draw number `draw_index`.
    ///
    /// [`sample`]: SphereSampler::sample
    pub fn seek(&mut self, draw_index: u64) {
        // two u64 = four 32-bit words per draw
        self.rng.set_word_pos(u128::from(draw_index) * 4);
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// cos θ uniform on [−1, 1], φ uniform on [0, 2π).
    pub fn sample(&mut self) -> Direction {
        let u = self.uniform();
        let v = self.uniform();
        let cos_theta = 1.0 - 2.0 * u;
        Direction::new(cos_theta.clamp(-1.0, 1.0).acos(), TAU * v)
    }

    pub fn sample_many(&mut self, count: usize) -> Vec<Direction> {
        (0..count).map(|_| self.sample()).collect()
    }
}
