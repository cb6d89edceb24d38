//! Uniform 1-to-8 cell subdivision with patch inheritance.

use super::{Cell, CellKind, Mesh, MeshError, Patch};
use crate::Vec3;
use std::collections::HashMap;

pub(super) fn subdivide(mesh: &Mesh) -> Result<Mesh, MeshError> {
    let mut nodes = mesh.nodes.clone();
    let mut edge_mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut face_mid: HashMap<[usize; 4], usize> = HashMap::new();

    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Vec3>| -> usize {
        let key = (a.min(b), a.max(b));
        *edge_mid.entry(key).or_insert_with(|| {
            nodes.push((nodes[a] + nodes[b]) * 0.5);
            nodes.len() - 1
        })
    };

    let mut cells: Vec<Cell> = Vec::with_capacity(mesh.n_cells() * 8);
    let mut parent_of: Vec<usize> = Vec::with_capacity(mesh.n_cells() * 8);

    for (ci, cell) in mesh.cells.iter().enumerate() {
        match cell.kind {
            CellKind::Tet4 => {
                let v = cell.nodes();
                let m01 = mid(v[0], v[1], &mut nodes);
                let m02 = mid(v[0], v[2], &mut nodes);
                let m03 = mid(v[0], v[3], &mut nodes);
                let m12 = mid(v[1], v[2], &mut nodes);
                let m13 = mid(v[1], v[3], &mut nodes);
                let m23 = mid(v[2], v[3], &mut nodes);
                let children = [
                    [v[0], m01, m02, m03],
                    [v[1], m12, m01, m13],
                    [v[2], m02, m12, m23],
                    [v[3], m03, m13, m23],
                    [m01, m23, m02, m12],
                    [m01, m23, m12, m13],
                    [m01, m23, m13, m03],
                    [m01, m23, m03, m02],
                ];
                for mut child in children {
                    orient_tet(&nodes, &mut child);
                    cells.push(Cell::tet(child));
                    parent_of.push(ci);
                }
            }
            CellKind::Hex8 => {
                let v = cell.nodes();
                // lattice coordinates of the 8 corners in VTK ordering
                const CORNER: [(usize, usize, usize); 8] = [
                    (0, 0, 0),
                    (2, 0, 0),
                    (2, 2, 0),
                    (0, 2, 0),
                    (0, 0, 2),
                    (2, 0, 2),
                    (2, 2, 2),
                    (0, 2, 2),
                ];
                let corner_at = |a: usize, b: usize, c: usize| -> usize {
                    let idx = CORNER.iter().position(|&p| p == (a, b, c)).unwrap();
                    v[idx]
                };
                let mut lattice = [[[usize::MAX; 3]; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        for c in 0..3 {
                            let odd =
                                (a % 2 != 0) as u8 + (b % 2 != 0) as u8 + (c % 2 != 0) as u8;
                            lattice[a][b][c] = match odd {
                                0 => corner_at(a, b, c),
                                1 => {
                                    // midpoint of the edge along the odd axis
                                    let (p, q) = if a % 2 != 0 {
                                        (corner_at(a - 1, b, c), corner_at(a + 1, b, c))
                                    } else if b % 2 != 0 {
                                        (corner_at(a, b - 1, c), corner_at(a, b + 1, c))
                                    } else {
                                        (corner_at(a, b, c - 1), corner_at(a, b, c + 1))
                                    };
                                    mid(p, q, &mut nodes)
                                }
                                2 => {
                                    // center of the face spanned by the two odd axes
                                    let corners: [usize; 4] = if a % 2 == 0 {
                                        [
                                            corner_at(a, b - 1, c - 1),
                                            corner_at(a, b + 1, c - 1),
                                            corner_at(a, b + 1, c + 1),
                                            corner_at(a, b - 1, c + 1),
                                        ]
                                    } else if b % 2 == 0 {
                                        [
                                            corner_at(a - 1, b, c - 1),
                                            corner_at(a + 1, b, c - 1),
                                            corner_at(a + 1, b, c + 1),
                                            corner_at(a - 1, b, c + 1),
                                        ]
                                    } else {
                                        [
                                            corner_at(a - 1, b - 1, c),
                                            corner_at(a + 1, b - 1, c),
                                            corner_at(a + 1, b + 1, c),
                                            corner_at(a - 1, b + 1, c),
                                        ]
                                    };
                                    let mut key = corners;
                                    key.sort_unstable();
                                    *face_mid.entry(key).or_insert_with(|| {
                                        let p = (nodes[corners[0]]
                                            + nodes[corners[1]]
                                            + nodes[corners[2]]
                                            + nodes[corners[3]])
                                            * 0.25;
                                        nodes.push(p);
                                        nodes.len() - 1
                                    })
                                }
                                _ => {
                                    let p: Vec3 =
                                        v.iter().map(|&i| nodes[i]).sum::<Vec3>() / 8.0;
                                    nodes.push(p);
                                    nodes.len() - 1
                                }
                            };
                        }
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            cells.push(Cell::hex([
                                lattice[i][j][k],
                                lattice[i + 1][j][k],
                                lattice[i + 1][j + 1][k],
                                lattice[i][j + 1][k],
                                lattice[i][j][k + 1],
                                lattice[i + 1][j][k + 1],
                                lattice[i + 1][j + 1][k + 1],
                                lattice[i][j + 1][k + 1],
                            ]));
                            parent_of.push(ci);
                        }
                    }
                }
            }
        }
    }

    let mut fine = Mesh::from_cells(nodes, cells, |_, _| String::new())?;

    // inherit patch tags: a child boundary face lies on exactly one boundary
    // face of its parent cell; identify it by plane distance
    let parent_geo = mesh.geometry();
    let fine_geo = fine.geometry();
    let names: Vec<String> = mesh.patches.iter().map(|p| p.name.clone()).collect();
    let mut face_patch = vec![None; fine.faces.len()];
    let mut patch_faces: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for (fi, f) in fine.faces.iter().enumerate() {
        if !f.is_boundary() {
            continue;
        }
        let parent = parent_of[f.owner];
        let c = fine_geo.face_centroid[fi];
        let mut best: Option<(f64, usize)> = None;
        for &(pf, _) in mesh.cell_faces(parent) {
            if !mesh.faces[pf].is_boundary() {
                continue;
            }
            let n = parent_geo.face_area[pf].normalize();
            let plane = ((c - parent_geo.face_centroid[pf]).dot(&n)).abs();
            let lateral = (c - parent_geo.face_centroid[pf]).norm();
            let score = plane + 1e-3 * lateral;
            if best.map_or(true, |(s, _)| score < s) {
                best = Some((score, pf));
            }
        }
        let pf = best.ok_or(MeshError::UntaggedBoundaryFace(fi))?.1;
        let pi = mesh.face_patch(pf).unwrap();
        face_patch[fi] = Some(pi);
        patch_faces[pi].push(fi);
    }
    fine.face_patch = face_patch;
    fine.patches = names
        .into_iter()
        .zip(patch_faces)
        .map(|(name, faces)| Patch { name, faces })
        .collect();
    fine.recipe = mesh.recipe.clone();
    Ok(fine)
}

fn orient_tet(nodes: &[Vec3], t: &mut [usize; 4]) {
    let v = (nodes[t[1]] - nodes[t[0]])
        .dot(&(nodes[t[2]] - nodes[t[0]]).cross(&(nodes[t[3]] - nodes[t[0]])));
    if v < 0.0 {
        t.swap(2, 3);
    }
}
