//! Weighted point sets on the sphere: the separated-variables product rule,
//! ingestion of tabulated grids, and certification of the harmonic order a
//! rule integrates exactly.
//!
//! Weights use the solid-angle convention: they sum to 4π, and a rule is
//! exact at degree l when Σ_k w_k Y_l^m(Ω_k) = 0 for every m (l ≥ 1).

use std::f64::consts::{PI, TAU};
use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::RecurrenceTable;
use crate::orthopoly::gauss_legendre_rule;
use crate::sphere::{Direction, Rotation, UnitVector};

pub const FOUR_PI: f64 = 4.0 * PI;

/// Residual threshold separating exact degrees from failing ones.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Two points closer than this (radians) are treated as the same point.
pub const DUPLICATE_ANGLE: f64 = 1e-9;

const WEIGHT_SUM_RELATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub direction: Direction,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalQuadrature {
    points: Vec<WeightedPoint>,
    label: String,
}

impl SphericalQuadrature {
    /// Validates positivity of every weight and Σw = 4π (relative 1e-10).
    pub fn new(points: Vec<WeightedPoint>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain(
                "a quadrature needs at least one point".into(),
            ));
        }
        for (index, p) in points.iter().enumerate() {
            if !(p.weight > 0.0) || !p.weight.is_finite() {
                return Err(Error::Weight {
                    index,
                    weight: p.weight,
                });
            }
        }
        let sum: f64 = points.iter().map(|p| p.weight).sum();
        if (sum - FOUR_PI).abs() > WEIGHT_SUM_RELATIVE_TOL * FOUR_PI {
            return Err(Error::WeightSum { sum });
        }
        Ok(SphericalQuadrature {
            points,
            label: label.into(),
        })
    }

    /// Equal weights 4π/n.
    pub fn uniform(directions: &[Direction], label: impl Into<String>) -> Result<Self> {
        let w = FOUR_PI / directions.len().max(1) as f64;
        let points = directions
            .iter()
            .map(|&direction| WeightedPoint {
                direction,
                weight: w,
            })
            .collect();
        Self::new(points, label)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        self.points.iter().map(|p| p.direction)
    }

    pub fn weight_sum(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn is_equal_weight(&self) -> bool {
        let w0 = self.points[0].weight;
        self.points
            .iter()
            .all(|p| (p.weight - w0).abs() <= 1e-12 * w0)
    }

    pub fn rotated(&self, rotation: &Rotation) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| WeightedPoint {
                direction: rotation.apply_direction(&p.direction),
                weight: p.weight,
            })
            .collect();
        SphericalQuadrature {
            points,
            label: self.label.clone(),
        }
    }

    /// Applies the rule to a function on the sphere (solid-angle measure).
    pub fn integrate(&self, f: impl Fn(&Direction) -> f64) -> f64 {
        self.points.iter().map(|p| p.weight * f(&p.direction)).sum()
    }

    pub fn export(&self) -> QuadratureExport {
        QuadratureExport {
            label: self.label.clone(),
            n: self.len(),
            convention: "solid_angle_4pi".to_string(),
            points: self
                .points
                .iter()
                .map(|p| ExportedPoint {
                    theta: p.direction.theta(),
                    phi: p.direction.phi(),
                    weight: p.weight,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.export())?)
    }
}

/// JSON form of a quadrature. Floats are written in shortest round-trip
/// form, so reading them back reproduces the rule bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureExport {
    pub label: String,
    pub n: usize,
    pub convention: String,
    pub points: Vec<ExportedPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExportedPoint {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Tensor rule: N+1 equally spaced azimuths φ_j = 2πj/(N+1) times the
/// ⌈(N+1)/2⌉-point Gauss–Legendre rule in cos θ. Exact through degree N,
/// with (N+1)·⌈(N+1)/2⌉ points.
pub fn product_rule(order: usize) -> SphericalQuadrature {
    let azimuths = order + 1;
    let polar = gauss_legendre_rule(azimuths.div_ceil(2)).expect("Gauss-Legendre rule for n >= 1");
    let dphi = TAU / azimuths as f64;
    let mut points = Vec::with_capacity(azimuths * polar.degree());
    for (x, w) in polar.iter() {
        let theta = x.acos();
        for j in 0..azimuths {
            points.push(WeightedPoint {
                direction: Direction::new(theta, j as f64 * dphi),
                weight: w * dphi,
            });
        }
    }
    SphericalQuadrature::new(points, format!("product rule, order {order}"))
        .expect("product rule weights are positive and sum to 4*pi")
}

/// Harmonic residuals of a quadrature, degree by degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub l_max_tested: usize,
    /// Entry l−1 holds max_m |Σ_k w_k Y_l^m(Ω_k)|.
    pub residual_per_l: Vec<f64>,
    /// |Σ_k w_k − 4π|, the degree-0 condition.
    pub weight_sum_residual: f64,
    pub strength: usize,
    pub tol: f64,
}

impl CertificationReport {
    pub fn residual(&self, l: usize) -> Option<f64> {
        l.checked_sub(1)
            .and_then(|i| self.residual_per_l.get(i).copied())
    }

    /// Largest residual over degrees 1..=strength (0 when strength is 0).
    pub fn max_exact_residual(&self) -> f64 {
        self.residual_per_l[..self.strength]
            .iter()
            .fold(0.0, |a, &b| a.max(b))
    }
}

const CERTIFY_CHUNK: usize = 128;

/// Partial sums Σ w Y_l^m for m ≥ 0, packed at l(l+1)/2 + m.
fn harmonic_sums(
    table: &RecurrenceTable,
    points: &[WeightedPoint],
    l_max: usize,
) -> Vec<Complex64> {
    let packed = (l_max + 1) * (l_max + 2) / 2;
    let mut sums = vec![Complex64::new(0.0, 0.0); packed];
    let mut row = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
    let mut scratch = vec![0.0; l_max + 1];
    for p in points {
        table.fill_row(&p.direction, &mut scratch, &mut row);
        for l in 0..=l_max {
            let base = l * l + l;
            let packed_base = l * (l + 1) / 2;
            for m in 0..=l {
                sums[packed_base + m] += row[base + m] * p.weight;
            }
        }
    }
    sums
}

/// Measures how far the rule is from integrating each Y_l^m exactly, for
/// 1 ≤ l ≤ `l_max`. The strength is the largest L with every residual up to
/// L at or below `tol`. Since weights are real, |Σ w Y_l^{−m}| = |Σ w Y_l^m|
/// and only m ≥ 0 is accumulated.
///
/// Points are summed in fixed-size chunks whose partial sums are combined
/// in chunk order, so the report does not depend on the thread count.
pub fn certify(q: &SphericalQuadrature, l_max: usize, tol: f64) -> Result<CertificationReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    for (index, p) in q.points.iter().enumerate() {
        if !(p.weight > 0.0) {
            return Err(Error::Weight {
                index,
                weight: p.weight,
            });
        }
    }
    let table = RecurrenceTable::new(l_max);
    let chunks: Vec<&[WeightedPoint]> = q.points.chunks(CERTIFY_CHUNK).collect();
    #[cfg(feature = "parallel")]
    let partials: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        chunks
            .par_iter()
            .map(|c| harmonic_sums(&table, c, l_max))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Vec<Complex64>> = chunks
        .iter()
        .map(|c| harmonic_sums(&table, c, l_max))
        .collect();

    let packed = (l_max + 1) * (l_max + 2) / 2;
    let mut sums = vec![Complex64::new(0.0, 0.0); packed];
    for part in &partials {
        for (acc, v) in sums.iter_mut().zip(part) {
            *acc += v;
        }
    }

    let mut residual_per_l = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let base = l * (l + 1) / 2;
        let worst = sums[base..=base + l]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.norm()));
        residual_per_l.push(worst);
    }
    let strength = residual_per_l.iter().take_while(|&&r| r <= tol).count();
    Ok(CertificationReport {
        l_max_tested: l_max,
        residual_per_l,
        weight_sum_residual: (q.weight_sum() - FOUR_PI).abs(),
        strength,
        tol,
    })
}

/// Strength of `q`, probing degrees up to `cap`.
pub fn detect_strength(q: &SphericalQuadrature, cap: usize, tol: f64) -> Result<usize> {
    if cap == 0 {
        return Err(Error::Domain("strength cap must be at least 1".into()));
    }
    Ok(certify(q, cap, tol)?.strength)
}

/// Number of points of the Lebedev rule of degree N = 6a + 5.
pub fn lebedev_count(order: usize) -> Result<usize> {
    if order % 6 != 5 {
        return Err(Error::Domain(format!(
            "order {order} is not of the form 6a+5"
        )));
    }
    Ok((order + 1) * (order + 1) / 3 + 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Every point gets 4π/n; a fourth column, if present, is ignored.
    Uniform,
    /// The fourth column is required and rescaled to sum to 4π.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedPointSet {
    pub quadrature: SphericalQuadrature,
    /// Factor applied to the supplied weights (1 in uniform mode).
    pub weight_scale: f64,
}

/// Reads a point set: one "x y z" or "x y z w" per line, `#` comments and
/// blank lines skipped.
pub fn ingest_pointset<R: BufRead>(
    reader: R,
    mode: WeightMode,
    label: impl Into<String>,
) -> Result<IngestedPointSet> {
    let mut vectors: Vec<(usize, UnitVector)> = Vec::new();
    let mut weights: Vec<Option<f64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 or 4 columns, found {}", fields.len()),
            });
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a number: {field:?}"),
            })?;
            if !slot.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value {field:?}"),
                });
            }
        }
        let v = UnitVector::new(values[0], values[1], values[2]).map_err(|e| Error::AtLine {
            line: line_no,
            source: Box::new(e),
        })?;
        vectors.push((line_no, v));
        weights.push((fields.len() == 4).then_some(values[3]));
    }
    if vectors.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no points".into(),
        });
    }
    check_duplicates(&vectors)?;

    let n = vectors.len();
    let (raw, weight_scale) = match mode {
        WeightMode::Uniform => (vec![FOUR_PI / n as f64; n], 1.0),
        WeightMode::Explicit => {
            let mut raw = Vec::with_capacity(n);
            for (index, (w, (line, _))) in weights.iter().zip(&vectors).enumerate() {
                let w = w.ok_or_else(|| Error::Parse {
                    line: *line,
                    message: "explicit weight mode needs a fourth column".into(),
                })?;
                if !(w > 0.0) {
                    return Err(Error::Weight { index, weight: w });
                }
                raw.push(w);
            }
            let scale = FOUR_PI / raw.iter().sum::<f64>();
            (raw.into_iter().map(|w| w * scale).collect(), scale)
        }
    };
    let points = vectors
        .iter()
        .zip(raw)
        .map(|((_, v), weight)| WeightedPoint {
            direction: v.direction(),
            weight,
        })
        .collect();
    Ok(IngestedPointSet {
        quadrature: SphericalQuadrature::new(points, label)?,
        weight_scale,
    })
}

/// Explicit when every data line carries a fourth column, else uniform.
pub fn detect_weight_mode(text: &str) -> WeightMode {
    let mut any = false;
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        any = true;
        if content.split_whitespace().count() != 4 {
            return WeightMode::Uniform;
        }
    }
    if any {
        WeightMode::Explicit
    } else {
        WeightMode::Uniform
    }
}

/// Reads a point-set file; `mode = None` picks the mode with
/// [`detect_weight_mode`]. The file name becomes the label.
pub fn read_pointset_file(path: &Path, mode: Option<WeightMode>) -> Result<IngestedPointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mode = mode.unwrap_or_else(|| detect_weight_mode(&text));
    let label = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_pointset(&text, mode, label)
}

pub fn parse_pointset(
    text: &str,
    mode: WeightMode,
    label: impl Into<String>,
) -> Result<IngestedPointSet> {
    ingest_pointset(text.as_bytes(), mode, label)
}

/// Sort-and-sweep on x: two points within the duplicate angle also differ
/// by at most that much in x.
fn check_duplicates(vectors: &[(usize, UnitVector)]) -> Result<()> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| vectors[a].1.x.total_cmp(&vectors[b].1.x));
    for (pos, &i) in order.iter().enumerate() {
        let (line_i, vi) = vectors[i];
        for &j in &order[pos + 1..] {
            let (line_j, vj) = vectors[j];
            if vj.x - vi.x > DUPLICATE_ANGLE {
                break;
            }
            if vi.angle_to(&vj) < DUPLICATE_ANGLE {
                return Err(Error::DuplicatePoint {
                    first: line_i.min(line_j),
                    second: line_i.max(line_j),
                });
            }
        }
    }
    Ok(())
}
