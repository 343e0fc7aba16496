//! Complex spherical harmonics Y_l^m, orthonormal over the full solid angle
//! (∫ |Y_l^m|² dΩ = 1 with ∫ dΩ = 4π, so Y_0^0 = 1/√(4π)), with the
//! Condon–Shortley phase.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::{assoc_legendre, sectoral, upward_coefficients};
use crate::sphere::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    l: usize,
    m: i64,
}

impl HarmonicIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(HarmonicIndex { l, m })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// Position in the flat (l, m) ordering l² + l + m used by [`HarmonicRow`].
    pub fn flat(&self) -> usize {
        ((self.l * self.l + self.l) as i64 + self.m) as usize
    }
}

#[inline]
fn cs_phase(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Y_l^m(θ, φ) = (−1)^m P̄_l^m(cos θ) e^{imφ} for m ≥ 0, and
/// Y_l^{−m} = (−1)^m conj(Y_l^m).
pub fn ylm(idx: HarmonicIndex, d: &Direction) -> Result<Complex64> {
    let am = idx.m.unsigned_abs() as usize;
    let p = assoc_legendre(idx.l, am, d.theta().cos())?;
    let (s, c) = (am as f64 * d.phi()).sin_cos();
    let positive = Complex64::new(c, s) * (cs_phase(am) * p);
    Ok(if idx.m >= 0 {
        positive
    } else {
        positive.conj() * cs_phase(am)
    })
}

/// All Y_l^m(d) for 0 ≤ l ≤ l_max, stored flat at index l² + l + m.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicRow {
    l_max: usize,
    values: Vec<Complex64>,
}

impl HarmonicRow {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        assert!(l <= self.l_max && m.unsigned_abs() as usize <= l);
        self.values[((l * l + l) as i64 + m) as usize]
    }

    /// The 2l + 1 values of degree l, ordered m = −l..=l.
    pub fn degree(&self, l: usize) -> &[Complex64] {
        &self.values[l * l..(l + 1) * (l + 1)]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }
}

/// Evaluates every harmonic up to `l_max` at `d` in one O(l_max²) pass.
pub fn harmonic_row(l_max: usize, d: &Direction) -> HarmonicRow {
    let size = (l_max + 1) * (l_max + 1);
    let mut values = vec![Complex64::new(0.0, 0.0); size];
    let mut legendre = vec![0.0; l_max + 1];
    RecurrenceTable::new(l_max).fill_row(d, &mut legendre, &mut values);
    HarmonicRow { l_max, values }
}

/// Precomputed recurrence coefficients for repeated row evaluation.
pub(crate) struct RecurrenceTable {
    l_max: usize,
    /// (a, b) at packed index l(l+1)/2 + m
    coefficients: Vec<(f64, f64)>,
    /// sqrt((2m+1)/(2m)) for m ≥ 1
    sectoral_factors: Vec<f64>,
}

impl RecurrenceTable {
    pub(crate) fn new(l_max: usize) -> Self {
        let mut coefficients = vec![(0.0, 0.0); (l_max + 1) * (l_max + 2) / 2];
        for l in 1..=l_max {
            for m in 0..l {
                coefficients[l * (l + 1) / 2 + m] = upward_coefficients(l, m);
            }
        }
        let sectoral_factors = (0..=l_max)
            .map(|m| {
                let mf = m as f64;
                if m == 0 {
                    1.0
                } else {
                    ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt()
                }
            })
            .collect();
        RecurrenceTable {
            l_max,
            coefficients,
            sectoral_factors,
        }
    }

    /// Writes Y_l^m(d) into `out` (length (l_max+1)², flat l² + l + m),
    /// using `legendre` (length l_max+1) as scratch.
    pub(crate) fn fill_row(&self, d: &Direction, legendre: &mut [f64], out: &mut [Complex64]) {
        let l_max = self.l_max;
        let x = d.theta().cos();
        let s = d.theta().sin();
        // P̄_m^m, advanced one order per m; same products as `sectoral`
        let mut diagonal = sectoral(0, s);
        for m in 0..=l_max {
            if m > 0 {
                diagonal *= self.sectoral_factors[m] * s;
            }
            let mut p_prev = 0.0;
            let mut p = diagonal;
            legendre[m] = p;
            for l in (m + 1)..=l_max {
                let (a, b) = self.coefficients[l * (l + 1) / 2 + m];
                let next = a * x * p - b * p_prev;
                p_prev = p;
                p = next;
                legendre[l] = p;
            }
            let (sn, cs) = (m as f64 * d.phi()).sin_cos();
            let phase = Complex64::new(cs, sn) * cs_phase(m);
            for l in m..=l_max {
                let v = phase * legendre[l];
                let base = l * l + l;
                out[base + m] = v;
                if m > 0 {
                    out[base - m] = v.conj() * cs_phase(m);
                }
            }
        }
    }
}
