//! Equal-weight point sets from regular polyhedra, all of which are
//! spherical designs.

use crate::quadrature::SphericalQuadrature;
use crate::sphere::Direction;

fn from_vertices(vertices: &[[f64; 3]], label: &str) -> SphericalQuadrature {
    let dirs: Vec<Direction> = vertices
        .iter()
        .map(|v| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            Direction::from_xyz(v[0] / n, v[1] / n, v[2] / n).expect("nonzero vertex")
        })
        .collect();
    SphericalQuadrature::uniform(&dirs, label).expect("uniform weights are valid")
}

/// North and south pole; strength 1.
pub fn antipodal_pair() -> SphericalQuadrature {
    from_vertices(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]], "antipodal pair")
}

/// Strength 2.
pub fn tetrahedron() -> SphericalQuadrature {
    from_vertices(
        &[
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ],
        "tetrahedron",
    )
}

/// Strength 3.
pub fn octahedron() -> SphericalQuadrature {
    from_vertices(
        &[
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        "octahedron",
    )
}

/// Strength 3.
pub fn cube() -> SphericalQuadrature {
    let mut v = Vec::with_capacity(8);
    for x in [-1.0, 1.0] {
        for y in [-1.0, 1.0] {
            for z in [-1.0, 1.0] {
                v.push([x, y, z]);
            }
        }
    }
    from_vertices(&v, "cube")
}

/// Strength 5.
pub fn icosahedron() -> SphericalQuadrature {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for a in [1.0, -1.0] {
        for b in [g, -g] {
            v.push([0.0, a, b]);
            v.push([a, b, 0.0]);
            v.push([b, 0.0, a]);
        }
    }
    from_vertices(&v, "icosahedron")
}
