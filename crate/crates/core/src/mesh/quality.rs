//! Element quality metrics: skewness, aspect ratio, orthogonal quality.

use super::{CellKind, Mesh};
use crate::Vec3;

/// Mesh quality summary used by the independence studies and the dynamic
/// remesh guard.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub max_skewness: f64,
    pub max_aspect_ratio: f64,
    pub min_orthogonal_quality: f64,
    pub element_count: usize,
    pub min_edge_length: f64,
}

pub(super) fn report(mesh: &Mesh) -> QualityReport {
    let geo = mesh.geometry();
    let mut max_skew: f64 = 0.0;
    let mut max_ar: f64 = 1.0;
    let mut min_oq: f64 = 1.0;
    let mut min_edge = f64::INFINITY;

    for ci in 0..mesh.n_cells() {
        max_skew = max_skew.max(cell_skewness(mesh, ci));
        let (emin, emax) = edge_range(mesh, ci);
        min_edge = min_edge.min(emin);
        max_ar = max_ar.max(emax / emin);

        for &(fi, sign) in mesh.cell_faces(ci) {
            let n = geo.face_area[fi] * sign;
            let nn = n.norm();
            if nn == 0.0 {
                min_oq = 0.0;
                continue;
            }
            let to_face = geo.face_centroid[fi] - geo.cell_centroid[ci];
            if to_face.norm() > 0.0 {
                min_oq = min_oq.min((n.dot(&to_face.normalize()) / nn).clamp(0.0, 1.0));
            }
            let f = &mesh.faces[fi];
            if let Some(nb) = f.neighbour {
                let other = if f.owner == ci { nb } else { f.owner };
                let d = geo.cell_centroid[other] - geo.cell_centroid[ci];
                if d.norm() > 0.0 {
                    min_oq = min_oq.min((n.dot(&d.normalize()) / nn).clamp(0.0, 1.0));
                }
            }
        }
    }

    QualityReport {
        max_skewness: max_skew,
        max_aspect_ratio: max_ar,
        min_orthogonal_quality: min_oq,
        element_count: mesh.n_cells(),
        min_edge_length: min_edge,
    }
}

pub(super) fn cell_skewness(mesh: &Mesh, ci: usize) -> f64 {
    match mesh.cells[ci].kind {
        // equilateral-volume deviation: 1 - V / V(regular tet in same circumsphere)
        CellKind::Tet4 => {
            let n = mesh.cells[ci].nodes();
            let p: Vec<Vec3> = n.iter().map(|&i| mesh.nodes[i]).collect();
            let v = (p[1] - p[0])
                .dot(&(p[2] - p[0]).cross(&(p[3] - p[0])))
                .abs()
                / 6.0;
            match circumradius(&p) {
                Some(r) => {
                    let a = r * (8.0f64 / 3.0).sqrt();
                    let v_ideal = a.powi(3) / (6.0 * 2.0f64.sqrt());
                    (1.0 - v / v_ideal).clamp(0.0, 1.0)
                }
                None => 1.0,
            }
        }
        // normalized equiangle skewness over the quad faces
        CellKind::Hex8 => {
            let mut worst: f64 = 0.0;
            for &(fi, _) in mesh.cell_faces(ci) {
                let fnodes = mesh.faces[fi].nodes();
                let k = fnodes.len();
                for i in 0..k {
                    let prev = mesh.nodes[fnodes[(i + k - 1) % k]];
                    let here = mesh.nodes[fnodes[i]];
                    let next = mesh.nodes[fnodes[(i + 1) % k]];
                    let a = (prev - here).normalize();
                    let b = (next - here).normalize();
                    let theta = a.dot(&b).clamp(-1.0, 1.0).acos().to_degrees();
                    let ideal = if k == 3 { 60.0 } else { 90.0 };
                    let s = ((theta - ideal) / (180.0 - ideal)).max((ideal - theta) / ideal);
                    worst = worst.max(s);
                }
            }
            worst.clamp(0.0, 1.0)
        }
    }
}

fn edge_range(mesh: &Mesh, ci: usize) -> (f64, f64) {
    let cell = &mesh.cells[ci];
    let edges: &[(usize, usize)] = match cell.kind {
        CellKind::Tet4 => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        CellKind::Hex8 => &[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
        ],
    };
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &(a, b) in edges {
        let l = (mesh.nodes[cell.nodes()[a]] - mesh.nodes[cell.nodes()[b]]).norm();
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (lo, hi)
}

fn circumradius(p: &[Vec3]) -> Option<f64> {
    // 2 (p_i - p_0) . x = |p_i|^2 - |p_0|^2, i = 1..3
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = Vec3::zeros();
    for i in 1..4 {
        let d = p[i] - p[0];
        m.set_row(i - 1, &(2.0 * d).transpose());
        rhs[i - 1] = p[i].norm_squared() - p[0].norm_squared();
    }
    let center = m.lu().solve(&rhs)?;
    Some((center - p[0]).norm())
}

#[cfg(test)]
mod tests {
    use crate::mesh::{Cell, Mesh};
    use crate::Vec3;

    fn single_tet(p: [Vec3; 4]) -> Mesh {
        Mesh::from_cells(p.to_vec(), vec![Cell::tet([0, 1, 2, 3])], |_, _| {
            "wall".into()
        })
        .unwrap()
    }

    #[test]
    fn regular_tetrahedron_is_ideal() {
        // vertices of a regular tet inscribed in the unit cube
        let mesh = single_tet([
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ]);
        let q = mesh.quality();
        assert!(q.max_skewness < 1e-10, "skew = {}", q.max_skewness);
        assert!(
            q.min_orthogonal_quality > 1.0 - 1e-10,
            "oq = {}",
            q.min_orthogonal_quality
        );
        assert_eq!(q.element_count, 1);
        assert!((q.max_aspect_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sliver_tetrahedron_is_flagged() {
        // four nearly coplanar points close to a common circumcircle
        let eps = 1e-3;
        let mesh = single_tet([
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, eps),
            Vec3::new(0.0, -1.0, eps),
        ]);
        let q = mesh.quality();
        assert!(q.max_skewness > 0.9, "skew = {}", q.max_skewness);
    }

    #[test]
    fn unit_cube_hex_quality() {
        let nodes = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ];
        let mesh = Mesh::from_cells(
            nodes,
            vec![Cell::hex([0, 1, 2, 3, 4, 5, 6, 7])],
            |_, _| "wall".into(),
        )
        .unwrap();
        let q = mesh.quality();
        assert!(q.max_skewness < 1e-12);
        assert!(q.min_orthogonal_quality > 1.0 - 1e-12);
        assert!((q.min_edge_length - 1.0).abs() < 1e-12);
    }
}
