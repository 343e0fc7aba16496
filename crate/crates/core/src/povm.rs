//! Finite measurements Σ_k c_k |Ω_k⟩⟨Ω_k|^{⊗N} on the symmetric subspace
//! of N qubits, built from quadratures and checked against completeness in
//! scalar and operator form.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{detect_strength, SphericalQuadrature, DEFAULT_TOLERANCE, FOUR_PI};
use crate::sphere::{Direction, SphereSampler, UnitVector};

/// Largest N the operator-level check accepts unless the caller raises it.
pub const DEFAULT_OPERATOR_CAP: usize = 60;

/// Seed for the deterministic test directions used by the scalar checks.
pub const TEST_DIRECTION_SEED: u64 = 0x05ee_d0fd_1ec7;

const WEIGHT_SUM_TOL: f64 = 1e-10;
const LOG_SPACE_ABOVE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub c: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinitePovm {
    copies: usize,
    elements: Vec<PovmElement>,
}

impl FinitePovm {
    /// Requires N ≥ 1, every c_k > 0 and Σ c_k = N + 1 within 1e-10.
    pub fn new(copies: usize, elements: Vec<PovmElement>) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidPovm("at least one copy is required".into()));
        }
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if let Some((i, e)) = elements
            .iter()
            .enumerate()
            .find(|(_, e)| !(e.c > 0.0) || !e.c.is_finite())
        {
            return Err(Error::InvalidPovm(format!(
                "coefficient {} of element {i} is not positive",
                e.c
            )));
        }
        let sum: f64 = elements.iter().map(|e| e.c).sum();
        if (sum - (copies + 1) as f64).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidPovm(format!(
                "coefficients sum to {sum}, expected {}",
                copies + 1
            )));
        }
        Ok(FinitePovm { copies, elements })
    }

    /// Skips every check; for perturbation experiments on deliberately
    /// broken measurements.
    pub fn new_unchecked(copies: usize, elements: Vec<PovmElement>) -> Self {
        FinitePovm { copies, elements }
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.elements.iter().map(|e| e.c).sum()
    }

    pub fn export(&self) -> PovmExport {
        PovmExport {
            copies: self.copies,
            n: self.len(),
            elements: self
                .elements
                .iter()
                .map(|e| ExportedElement {
                    c: e.c,
                    theta: e.direction.theta(),
                    phi: e.direction.phi(),
                })
                .collect(),
            score_exact: exact_score(self),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.export())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let export: PovmExport = serde_json::from_str(text)?;
        export.into_povm()
    }
}

/// JSON form `{N, n, elements: [{c, theta, phi}], score_exact}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmExport {
    #[serde(rename = "N")]
    pub copies: usize,
    pub n: usize,
    pub elements: Vec<ExportedElement>,
    pub score_exact: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExportedElement {
    pub c: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PovmExport {
    pub fn into_povm(self) -> Result<FinitePovm> {
        if self.n != self.elements.len() {
            return Err(Error::InvalidPovm(format!(
                "n = {} but {} elements listed",
                self.n,
                self.elements.len()
            )));
        }
        let elements = self
            .elements
            .iter()
            .map(|e| {
                if !e.theta.is_finite() || !e.phi.is_finite() {
                    return Err(Error::InvalidPovm("non-finite angle".into()));
                }
                Ok(PovmElement {
                    c: e.c,
                    direction: Direction::new(e.theta, e.phi),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FinitePovm::new(self.copies, elements)
    }
}

/// c_k = (N+1) w_k / (4π); requires the rule to be exact through degree N.
pub fn povm_from_quadrature(q: &SphericalQuadrature, copies: usize) -> Result<FinitePovm> {
    if copies == 0 {
        return Err(Error::InvalidPovm("at least one copy is required".into()));
    }
    let strength = detect_strength(q, copies, DEFAULT_TOLERANCE)?;
    if strength < copies {
        return Err(Error::InsufficientStrength {
            found: strength,
            required: copies,
        });
    }
    let scale = (copies + 1) as f64 / FOUR_PI;
    let elements = q
        .points()
        .iter()
        .map(|p| PovmElement {
            c: p.weight * scale,
            direction: p.direction,
        })
        .collect();
    FinitePovm::new(copies, elements)
}

/// Average fidelity Σ_k c_k / (N + 2). Equals the optimum (N+1)/(N+2) for
/// every valid POVM.
pub fn exact_score(p: &FinitePovm) -> f64 {
    p.coefficient_sum() / (p.copies + 2) as f64
}

pub fn optimal_score(copies: usize) -> f64 {
    (copies + 1) as f64 / (copies + 2) as f64
}

/// Coherent projectors in structure-of-arrays form, so the per-direction
/// power sums vectorize.
struct Projectors {
    c: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl Projectors {
    fn new(items: impl Iterator<Item = (f64, UnitVector)>) -> Self {
        let mut p = Projectors {
            c: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
        };
        for (c, u) in items {
            p.c.push(c);
            p.x.push(u.x);
            p.y.push(u.y);
            p.z.push(u.z);
        }
        p
    }

    /// Σ_k c_k |⟨Ω_k|Ω⟩|^{2·exponent} − 1 at Ω. `base` and `acc` are scratch.
    fn defect(
        &self,
        exponent: usize,
        d: &Direction,
        base: &mut Vec<f64>,
        acc: &mut Vec<f64>,
    ) -> f64 {
        let v = d.to_cartesian();
        base.clear();
        base.extend(
            self.x
                .iter()
                .zip(&self.y)
                .zip(&self.z)
                .map(|((x, y), z)| (0.5 * (1.0 + x * v.x + y * v.y + z * v.z)).clamp(0.0, 1.0)),
        );
        acc.clear();
        acc.extend_from_slice(&self.c);
        // square-and-multiply, one pass over all elements per exponent bit
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                acc.iter_mut().zip(base.iter()).for_each(|(a, b)| *a *= b);
            }
            e >>= 1;
            if e > 0 {
                base.iter_mut().for_each(|b| *b *= *b);
            }
        }
        acc.iter().sum::<f64>() - 1.0
    }

    fn max_abs_defect(&self, exponent: usize, directions: &[Direction]) -> f64 {
        let eval = |(base, acc): &mut (Vec<f64>, Vec<f64>), d: &Direction| {
            self.defect(exponent, d, base, acc).abs()
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            directions
                .par_iter()
                .map_init(|| (Vec::new(), Vec::new()), eval)
                .reduce(|| 0.0, f64::max)
        }
        #[cfg(not(feature = "parallel"))]
        {
            let mut scratch = (Vec::new(), Vec::new());
            directions
                .iter()
                .map(|d| eval(&mut scratch, d))
                .fold(0.0, f64::max)
        }
    }
}

/// max over Ω of |Σ_k c_k |⟨Ω_k|Ω⟩|^{2N} − 1|.
pub fn scalar_completeness_residual(p: &FinitePovm, directions: &[Direction]) -> f64 {
    let proj = Projectors::new(p.elements.iter().map(|e| (e.c, e.direction.to_cartesian())));
    proj.max_abs_defect(p.copies, directions)
}

/// Probe directions for band-limit `order`: 10·(order+1)² seeded uniform
/// draws, both poles, and the supplied extra points.
pub fn test_directions(order: usize, extra: impl IntoIterator<Item = Direction>) -> Vec<Direction> {
    let count = 10 * (order + 1) * (order + 1);
    let mut sampler = SphereSampler::new(TEST_DIRECTION_SEED);
    let mut dirs = sampler.sample_many(count);
    dirs.push(Direction::NORTH);
    dirs.push(Direction::SOUTH);
    dirs.extend(extra);
    dirs
}

/// The default probe set for a POVM: [`test_directions`] for its N plus its
/// own element directions.
pub fn default_test_directions(p: &FinitePovm) -> Vec<Direction> {
    test_directions(p.copies, p.elements.iter().map(|e| e.direction))
}

/// |Ω⟩^{⊗N} in the symmetric (Dicke) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeVector {
    amplitudes: Vec<Complex64>,
}

impl DickeVector {
    pub fn copies(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &DickeVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// amplitude_j = √C(N,j) · cos^{N−j}(θ/2) · (e^{iφ} sin(θ/2))^j.
///
/// The magnitude is assembled in log space above N = 50 so that neither
/// the binomial nor the powers overflow.
pub fn dicke_amplitudes(copies: usize, d: &Direction) -> DickeVector {
    let half = d.theta() / 2.0;
    let (s, c) = half.sin_cos();
    let phi = d.phi();
    let amplitudes = if copies <= LOG_SPACE_ABOVE {
        let mut binom = 1.0f64;
        (0..=copies)
            .map(|j| {
                if j > 0 {
                    binom = binom * (copies - j + 1) as f64 / j as f64;
                }
                let mag = binom.sqrt() * c.powi((copies - j) as i32) * s.powi(j as i32);
                Complex64::from_polar(mag, j as f64 * phi)
            })
            .collect()
    } else {
        let (ln_c, ln_s) = (c.ln(), s.ln());
        let mut ln_binom = 0.0f64;
        (0..=copies)
            .map(|j| {
                if j > 0 {
                    ln_binom += ((copies - j + 1) as f64 / j as f64).ln();
                }
                // 0·ln 0 counts as 0
                let a = if copies - j == 0 {
                    0.0
                } else {
                    (copies - j) as f64 * ln_c
                };
                let b = if j == 0 { 0.0 } else { j as f64 * ln_s };
                let mag = (0.5 * ln_binom + a + b).exp();
                Complex64::from_polar(mag, j as f64 * phi)
            })
            .collect()
    };
    DickeVector { amplitudes }
}

/// Hermitian accumulator Σ_k c_k v_k v_k† over the Dicke basis, in fixed
/// chunks combined in order.
fn accumulate_projectors(copies: usize, items: &[(f64, Direction)]) -> Vec<Complex64> {
    let dim = copies + 1;
    let chunk_sum = |chunk: &[(f64, Direction)]| {
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, d) in chunk {
            let v = dicke_amplitudes(copies, d);
            let a = v.amplitudes();
            for i in 0..dim {
                let ai = a[i] * *c;
                for j in i..dim {
                    m[i * dim + j] += ai * a[j].conj();
                }
            }
        }
        m
    };
    let chunks: Vec<&[(f64, Direction)]> = items.chunks(64).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        chunks.par_iter().map(|c| chunk_sum(c)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<Complex64>> = chunks.iter().map(|c| chunk_sum(c)).collect();
    let mut total = vec![Complex64::new(0.0, 0.0); dim * dim];
    for part in parts {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    for i in 0..dim {
        for j in 0..i {
            total[i * dim + j] = total[j * dim + i].conj();
        }
    }
    total
}

fn max_deviation_from_scaled_identity(m: &[Complex64], dim: usize, diag: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { diag } else { 0.0 };
            worst = worst.max((m[i * dim + j] - target).norm());
        }
    }
    worst
}

/// max entry of |Σ_k c_k v_k v_k† − I| in the Dicke basis, v_k = |Ω_k⟩^{⊗N}.
pub fn operator_completeness_residual(p: &FinitePovm, cap: usize) -> Result<f64> {
    if p.copies > cap {
        return Err(Error::CapExceeded {
            copies: p.copies,
            cap,
        });
    }
    let items: Vec<(f64, Direction)> = p.elements.iter().map(|e| (e.c, e.direction)).collect();
    let m = accumulate_projectors(p.copies, &items);
    Ok(max_deviation_from_scaled_identity(&m, p.copies + 1, 1.0))
}

/// Discrete version of ∫dΩ |Ω⟩⟨Ω|^{⊗M} = I/(M+1) (unit measure): returns the
/// max entry deviation of Σ_k (w_k/4π) v_k v_k† from I/(M+1).
pub fn schur_moment_residual(q: &SphericalQuadrature, moment: usize) -> Result<f64> {
    if moment > 0 {
        let strength = detect_strength(q, moment, DEFAULT_TOLERANCE)?;
        if strength < moment {
            return Err(Error::InsufficientStrength {
                found: strength,
                required: moment,
            });
        }
    }
    let items: Vec<(f64, Direction)> = q
        .points()
        .iter()
        .map(|p| (p.weight / FOUR_PI, p.direction))
        .collect();
    let m = accumulate_projectors(moment, &items);
    Ok(max_deviation_from_scaled_identity(
        &m,
        moment + 1,
        1.0 / (moment + 1) as f64,
    ))
}

/// Completeness defect in one total-spin sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinResidual {
    /// 2s, kept as an integer so half-integer spins stay exact.
    pub twice_spin: usize,
    pub residual: f64,
}

impl SpinResidual {
    pub fn spin(&self) -> f64 {
        self.twice_spin as f64 / 2.0
    }
}

/// For each spin s = s₀, s₀+1, …, N/2 of N qubits, reuses the quadrature
/// with c_k^{(s)} = (2s+1) w_k/(4π) and reports
/// max_Ω |Σ_k c_k^{(s)} |⟨Ω_k|Ω⟩|^{4s} − 1|.
pub fn subspace_completeness_residuals(
    q: &SphericalQuadrature,
    copies: usize,
) -> Result<Vec<SpinResidual>> {
    let strength = detect_strength(q, copies.max(1), DEFAULT_TOLERANCE)?;
    if strength < copies {
        return Err(Error::InsufficientStrength {
            found: strength,
            required: copies,
        });
    }
    let dirs = test_directions(copies, q.directions());
    let mut out = Vec::new();
    let mut twice_spin = copies % 2;
    while twice_spin <= copies {
        let scale = (twice_spin + 1) as f64 / FOUR_PI;
        let proj = Projectors::new(
            q.points()
                .iter()
                .map(|p| (p.weight * scale, p.direction.to_cartesian())),
        );
        let residual = proj.max_abs_defect(twice_spin, &dirs);
        out.push(SpinResidual {
            twice_spin,
            residual,
        });
        twice_spin += 2;
    }
    Ok(out)
}

/// Σ_{s=s₀}^{N/2} n(s): `pure_counts` maps a copy number 2s to the size of
/// an optimal pure-state POVM for 2s qubits; n(0) = 1 is implied.
pub fn mixed_min_elements(copies: usize, pure_counts: &BTreeMap<usize, usize>) -> Result<usize> {
    let mut total = 0;
    let mut twice_spin = copies % 2;
    while twice_spin <= copies {
        total += if twice_spin == 0 {
            1
        } else {
            *pure_counts
                .get(&twice_spin)
                .ok_or(Error::MissingCount { copies: twice_spin })?
        };
        twice_spin += 2;
    }
    Ok(total)
}

/// Closed form of Σ_s (2s+1)⌈(2s+1)/2⌉, the mixed-state count obtained from
/// product-rule POVMs.
/// Evaluated over a common denominator of 24 so integer values come out
/// exactly.
pub fn mixed_legendre_bound(copies: usize) -> f64 {
    let n = copies as u128;
    let scaled = if copies.is_multiple_of(2) {
        2 * n * n * n + 15 * n * n + 34 * n + 24
    } else {
        2 * n * n * n + 12 * n * n + 22 * n + 12
    };
    scaled as f64 / 24.0
}
