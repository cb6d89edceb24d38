//! Parametric mesh generators and refinement.
//!
//! All generators record their parameters in the mesh's [`MeshRecipe`] so
//! that [`refine`] rebuilds a boundary-conforming mesh at higher resolution
//! instead of merely splitting facets.

mod ventricles;

pub use ventricles::VentricleParams;

use crate::mesh::{Cell, Mesh, MeshError, MeshRecipe, QualityReport};
use crate::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Axis-aligned box split into hexahedra; sides are tagged `xmin`, `xmax`,
/// `ymin`, `ymax`, `zmin`, `zmax`.
#[derive(Debug, Clone)]
pub struct BoxSpec {
    pub size: [f64; 3],
    pub divisions: [usize; 3],
}

pub fn build_box_mesh(spec: &BoxSpec) -> Result<Mesh, GeometryError> {
    let [lx, ly, lz] = spec.size;
    let [nx, ny, nz] = spec.divisions;
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "box size must be positive, got {:?}",
            spec.size
        )));
    }
    if nx < 1 || ny < 1 || nz < 1 {
        return Err(GeometryError::InvalidParameter(
            "box divisions must be at least 1".into(),
        ));
    }
    let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(Vec3::new(
                    lx * i as f64 / nx as f64,
                    ly * j as f64 / ny as f64,
                    lz * k as f64 / nz as f64,
                ));
            }
        }
    }
    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.push(Cell::hex([
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]));
            }
        }
    }
    let mut mesh = Mesh::from_cells(nodes, cells, |_, n| {
        let ax = [n.x.abs(), n.y.abs(), n.z.abs()];
        let axis = (0..3).max_by(|&a, &b| ax[a].total_cmp(&ax[b])).unwrap();
        match (axis, n[axis] > 0.0) {
            (0, false) => "xmin".into(),
            (0, true) => "xmax".into(),
            (1, false) => "ymin".into(),
            (1, true) => "ymax".into(),
            (2, false) => "zmin".into(),
            (2, true) => "zmax".into(),
            _ => unreachable!(),
        }
    })?;
    mesh.recipe = Some(MeshRecipe::Box(spec.clone()));
    Ok(mesh)
}

/// Circular pipe benchmark geometry.
#[derive(Debug, Clone)]
pub struct CylinderSpec {
    pub radius: f64,
    pub length: f64,
    /// cells across one radius of the cross-section
    pub radial_divisions: usize,
    pub axial_divisions: usize,
}

/// Builds a hexahedral cylinder with the axis along +z and patches `inlet`
/// (z = 0), `outlet` (z = length) and `wall`.
///
/// The cross-section is a single-block elliptic square-to-disc mapping, so
/// cells stay well-shaped without a degenerate axis.
pub fn build_cylinder_mesh(
    radius: f64,
    length: f64,
    radial_divisions: usize,
    axial_divisions: usize,
) -> Result<Mesh, GeometryError> {
    if !(radius > 0.0) || !(length > 0.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "cylinder radius/length must be positive, got r = {radius}, L = {length}"
        )));
    }
    if radial_divisions < 2 || axial_divisions < 2 {
        return Err(GeometryError::InvalidParameter(
            "cylinder divisions must be at least 2".into(),
        ));
    }
    let m = radial_divisions; // cross-section is (2m)^2 cells
    let nz = axial_divisions;
    let np = 2 * m + 1;
    let id = |i: usize, j: usize, k: usize| (k * np + j) * np + i;
    // concentric square-to-disc mapping: grid squares become annular rings,
    // so boundary cells are clean sectors and interior shear stays moderate
    let disc = |u: f64, v: f64| -> (f64, f64) {
        if u == 0.0 && v == 0.0 {
            return (0.0, 0.0);
        }
        let (r, theta) = if u.abs() >= v.abs() {
            (u, std::f64::consts::FRAC_PI_4 * v / u)
        } else {
            (v, std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4 * u / v)
        };
        (r * theta.cos(), r * theta.sin())
    };
    let mut nodes = Vec::with_capacity(np * np * (nz + 1));
    for k in 0..=nz {
        let z = length * k as f64 / nz as f64;
        for j in 0..np {
            let v = 2.0 * j as f64 / (2 * m) as f64 - 1.0;
            for i in 0..np {
                let u = 2.0 * i as f64 / (2 * m) as f64 - 1.0;
                let (x, y) = disc(u, v);
                nodes.push(Vec3::new(radius * x, radius * y, z));
            }
        }
    }
    let mut cells = Vec::with_capacity(4 * m * m * nz);
    for k in 0..nz {
        for j in 0..2 * m {
            for i in 0..2 * m {
                cells.push(Cell::hex([
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]));
            }
        }
    }
    let mut mesh = Mesh::from_cells(nodes, cells, |_, n| {
        if n.z < -0.5 {
            "inlet".into()
        } else if n.z > 0.5 {
            "outlet".into()
        } else {
            "wall".into()
        }
    })?;
    mesh.recipe = Some(MeshRecipe::Cylinder(CylinderSpec {
        radius,
        length,
        radial_divisions,
        axial_divisions,
    }));
    Ok(mesh)
}

/// Idealized two-inlet/two-outlet ventricular system.
pub fn build_ventricular_system(params: &VentricleParams) -> Result<Mesh, GeometryError> {
    ventricles::build(params)
}

/// Rebuilds a generated mesh `level` halvings finer; falls back to uniform
/// subdivision for meshes without a recipe.
pub fn refine(mesh: &Mesh, level: u32) -> Result<Mesh, GeometryError> {
    if level == 0 {
        return Err(GeometryError::InvalidParameter(
            "refinement level must be >= 1".into(),
        ));
    }
    let factor = 1usize << level;
    match &mesh.recipe {
        Some(MeshRecipe::Box(spec)) => {
            let mut s = spec.clone();
            for d in &mut s.divisions {
                *d *= factor;
            }
            build_box_mesh(&s)
        }
        Some(MeshRecipe::Cylinder(spec)) => build_cylinder_mesh(
            spec.radius,
            spec.length,
            spec.radial_divisions * factor,
            spec.axial_divisions * factor,
        ),
        Some(MeshRecipe::Ventricles(params)) => {
            let mut p = params.clone();
            p.cell_size_fine /= factor as f64;
            p.cell_size_coarse /= factor as f64;
            build_ventricular_system(&p)
        }
        None => {
            let mut out = mesh.subdivide()?;
            for _ in 1..level {
                out = out.subdivide()?;
            }
            Ok(out)
        }
    }
}

/// Quality metrics of a mesh (see [`QualityReport`]).
pub fn mesh_quality(mesh: &Mesh) -> QualityReport {
    mesh.quality()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_volume_matches_analytic_value() {
        let (r, l) = (0.9e-3, 12e-3);
        let mesh = build_cylinder_mesh(r, l, 8, 40).unwrap();
        mesh.validate().unwrap();
        let vol = mesh.geometry().total_volume();
        let exact = std::f64::consts::PI * r * r * l;
        assert!(
            (vol - exact).abs() / exact < 0.03,
            "volume {vol:.4e} vs analytic {exact:.4e}"
        );
        for p in ["inlet", "outlet", "wall"] {
            assert!(mesh.has_patch(p));
        }
    }

    #[test]
    fn cylinder_closure_holds_per_cell() {
        let mesh = build_cylinder_mesh(0.9e-3, 12e-3, 4, 10).unwrap();
        let geo = mesh.geometry();
        let max_area = geo.face_area.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for ci in 0..mesh.n_cells() {
            let sum: Vec3 = mesh
                .cell_faces(ci)
                .iter()
                .map(|&(fi, s)| geo.face_area[fi] * s)
                .sum();
            assert!(sum.norm() < 1e-12 * max_area);
        }
    }

    #[test]
    fn degenerate_cylinder_is_rejected() {
        assert!(build_cylinder_mesh(0.0, 1.0, 8, 8).is_err());
        assert!(build_cylinder_mesh(1.0, -1.0, 8, 8).is_err());
        assert!(build_cylinder_mesh(1.0, 1.0, 1, 8).is_err());
    }

    #[test]
    fn refinement_increases_element_count_and_preserves_patches() {
        let mesh = build_cylinder_mesh(0.9e-3, 12e-3, 3, 8).unwrap();
        let mut counts = vec![mesh.n_cells()];
        for level in 1..=2 {
            let fine = refine(&mesh, level).unwrap();
            for p in ["inlet", "outlet", "wall"] {
                assert!(fine.has_patch(p));
            }
            counts.push(fine.n_cells());
        }
        assert!(counts[0] < counts[1] && counts[1] < counts[2]);
    }

    #[test]
    fn refinement_volume_converges() {
        let exact = std::f64::consts::PI * 0.9e-3 * 0.9e-3 * 12e-3;
        let mesh = build_cylinder_mesh(0.9e-3, 12e-3, 2, 4).unwrap();
        let mut errs = Vec::new();
        for level in 0..3 {
            let m = if level == 0 {
                mesh.clone()
            } else {
                refine(&mesh, level).unwrap()
            };
            errs.push((m.geometry().total_volume() - exact).abs());
        }
        // successive-level differences shrink
        assert!((errs[1] - errs[2]).abs() < (errs[0] - errs[1]).abs());
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
    }

    #[test]
    fn refined_cylinder_quality_is_acceptable() {
        let mesh = build_cylinder_mesh(0.9e-3, 12e-3, 8, 40).unwrap();
        let q = mesh_quality(&mesh);
        assert!(q.max_skewness < 0.85, "skew {}", q.max_skewness);
        assert!(q.min_orthogonal_quality > 0.15, "oq {}", q.min_orthogonal_quality);
        assert_eq!(q.element_count, mesh.n_cells());
        assert!(q.min_edge_length > 0.0);
    }

    #[test]
    fn box_mesh_patches_and_volume() {
        let mesh = build_box_mesh(&BoxSpec {
            size: [1.0, 2.0, 3.0],
            divisions: [2, 3, 4],
        })
        .unwrap();
        assert_eq!(mesh.n_cells(), 24);
        assert!((mesh.geometry().total_volume() - 6.0).abs() < 1e-12);
        for p in ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"] {
            assert!(mesh.has_patch(p));
        }
        assert_eq!(mesh.patch("xmin").unwrap().faces.len(), 12);
    }
}
