//! Element counts of optimal POVMs by construction method, for a range of
//! copy numbers. Lebedev and design counts come from grid files that are
//! certified on load, never from assumed sizes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyhedra;
use crate::povm::mixed_min_elements;
use crate::quadrature::{
    detect_strength, product_rule, read_pointset_file, SphericalQuadrature, WeightMode,
    DEFAULT_TOLERANCE,
};

/// Minimal optimal POVM sizes found by exhaustive search for N ≤ 7, shown
/// for comparison only.
pub const REFERENCE_MINIMAL: [usize; 7] = [2, 4, 6, 10, 12, 18, 22];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Computed,
    Ingested,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub value: usize,
    pub source: Source,
}

impl Count {
    fn computed(value: usize) -> Self {
        Count {
            value,
            source: Source::Computed,
        }
    }

    fn ingested(value: usize) -> Self {
        Count {
            value,
            source: Source::Ingested,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub copies: usize,
    pub reference: Option<Count>,
    pub legendre: Count,
    pub lebedev: Option<Count>,
    pub design: Option<Count>,
    pub legendre_mixed: Count,
    pub lebedev_mixed: Option<Count>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedGrid {
    pub path: PathBuf,
    pub count: usize,
    /// Detected strength, capped at the probe limit used when loading.
    pub strength: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridCatalog {
    pub lebedev: Vec<CertifiedGrid>,
    pub designs: Vec<CertifiedGrid>,
    /// Files that could not serve as a POVM, e.g. rules with a negative
    /// weight, with the reason.
    pub rejected: Vec<(PathBuf, Error)>,
}

impl GridCatalog {
    /// Loads `lebedev_*.txt` (weighted when a fourth column is present) and
    /// `design_*.txt` (always equal weights) from `dir`, certifying each up
    /// to `cap`. A missing directory yields an empty catalog; files whose
    /// weights are not all positive are listed in `rejected`.
    pub fn load(dir: &Path, cap: usize) -> Result<Self> {
        let mut catalog = GridCatalog::default();
        let Ok(entries) = fs::read_dir(dir) else {
            return Ok(catalog);
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        for path in paths {
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_owned();
            let (mode, bucket) = if name.starts_with("lebedev_") {
                (None, &mut catalog.lebedev)
            } else if name.starts_with("design_") {
                (Some(WeightMode::Uniform), &mut catalog.designs)
            } else {
                continue;
            };
            match read_pointset_file(&path, mode) {
                Ok(set) => bucket.push(certify_grid(path, &set.quadrature, cap)?),
                Err(e @ (Error::Weight { .. } | Error::WeightSum { .. })) => {
                    catalog.rejected.push((path, e))
                }
                Err(e) => return Err(e),
            }
        }
        Ok(catalog)
    }

    /// Lebedev size reported at N: only where some grid has strength
    /// exactly N, taking the smallest grid with strength ≥ N.
    pub fn lebedev_count(&self, copies: usize) -> Option<usize> {
        if !self.lebedev.iter().any(|g| g.strength == copies) {
            return None;
        }
        smallest(&self.lebedev, copies)
    }

    pub fn design_count(&self, copies: usize) -> Option<usize> {
        smallest(&self.designs, copies)
    }
}

fn smallest(grids: &[CertifiedGrid], copies: usize) -> Option<usize> {
    grids
        .iter()
        .filter(|g| g.strength >= copies)
        .map(|g| g.count)
        .min()
}

fn certify_grid(path: PathBuf, q: &SphericalQuadrature, cap: usize) -> Result<CertifiedGrid> {
    Ok(CertifiedGrid {
        path,
        count: q.len(),
        strength: detect_strength(q, cap.max(1), DEFAULT_TOLERANCE)?,
    })
}

/// Rows N = 1..=nmax. Pass the catalog loaded with a cap of at least
/// nmax + 1 so exact strengths up to nmax are resolved.
pub fn build_table(nmax: usize, catalog: &GridCatalog) -> Result<Vec<TableRow>> {
    if nmax == 0 {
        return Err(Error::Domain("nmax must be at least 1".into()));
    }
    let legendre: BTreeMap<usize, usize> = (1..=nmax).map(|n| (n, product_rule(n).len())).collect();

    // one copy needs only a strength-1 rule; the antipodal pair is the
    // smallest such and stands in for the missing Lebedev entry
    let pair = polyhedra::antipodal_pair();
    let pair_strength = detect_strength(&pair, 2, DEFAULT_TOLERANCE)?;
    let mut lebedev_pure: BTreeMap<usize, usize> = BTreeMap::new();
    if pair_strength >= 1 {
        lebedev_pure.insert(1, pair.len());
    }
    for n in 2..=nmax {
        if let Some(c) = catalog.lebedev_count(n) {
            lebedev_pure.insert(n, c);
        }
    }

    let mut rows = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let lebedev_mixed = if n % 2 == 1 {
            mixed_min_elements(n, &lebedev_pure)
                .ok()
                .map(Count::ingested)
        } else {
            None
        };
        rows.push(TableRow {
            copies: n,
            reference: REFERENCE_MINIMAL.get(n - 1).map(|&value| Count {
                value,
                source: Source::Reference,
            }),
            legendre: Count::computed(legendre[&n]),
            lebedev: catalog.lebedev_count(n).map(Count::ingested),
            design: catalog.design_count(n).map(Count::ingested),
            legendre_mixed: Count::computed(mixed_min_elements(n, &legendre)?),
            lebedev_mixed,
        });
    }
    Ok(rows)
}
