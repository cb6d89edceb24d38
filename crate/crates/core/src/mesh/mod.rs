//! Unstructured volume meshes with tagged boundary patches.
//!
//! Cells are tetrahedra or hexahedra; the face-based view (owner/neighbour
//! adjacency with outward area vectors) is what the finite-volume solver
//! consumes, while the node-based connectivity serves the finite-element and
//! output paths. Faces are triangulated by a fan around the face centroid for
//! all metric computations, so cell closure (sum of outward area vectors = 0)
//! and the divergence-theorem volume identity hold to roundoff even for
//! warped quad faces.

mod quality;
mod subdivide;

pub use quality::QualityReport;

use crate::Vec3;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-manifold face shared by more than two cells (nodes {0:?})")]
    NonManifold(Vec<usize>),
    #[error("boundary face {0} is not assigned to any patch")]
    UntaggedBoundaryFace(usize),
    #[error("mesh has {0} connected components, expected 1")]
    Disconnected(usize),
    #[error("cell {0} has non-positive volume {1:.3e}")]
    InvertedCell(usize, f64),
    #[error("unknown patch '{0}'")]
    UnknownPatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Tet4,
    Hex8,
}

impl CellKind {
    pub fn node_count(self) -> usize {
        match self {
            CellKind::Tet4 => 4,
            CellKind::Hex8 => 8,
        }
    }

    /// VTK legacy cell type id.
    pub fn vtk_id(self) -> u8 {
        match self {
            CellKind::Tet4 => 10,
            CellKind::Hex8 => 12,
        }
    }

    /// Local faces with nodes ordered so the fan normal points outward.
    fn local_faces(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Tet4 => &[&[0, 2, 1], &[0, 1, 3], &[1, 2, 3], &[0, 3, 2]],
            CellKind::Hex8 => &[
                &[0, 3, 2, 1],
                &[4, 5, 6, 7],
                &[0, 1, 5, 4],
                &[1, 2, 6, 5],
                &[2, 3, 7, 6],
                &[3, 0, 4, 7],
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub kind: CellKind,
    nodes: [usize; 8],
}

impl Cell {
    pub fn tet(n: [usize; 4]) -> Self {
        Cell {
            kind: CellKind::Tet4,
            nodes: [n[0], n[1], n[2], n[3], 0, 0, 0, 0],
        }
    }

    pub fn hex(n: [usize; 8]) -> Self {
        Cell {
            kind: CellKind::Hex8,
            nodes: n,
        }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.kind.node_count()]
    }
}

/// Mesh face: triangle or quad, stored once, oriented outward from `owner`.
#[derive(Debug, Clone)]
pub struct Face {
    nodes: [usize; 4],
    len: u8,
    pub owner: usize,
    pub neighbour: Option<usize>,
}

impl Face {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.len as usize]
    }

    pub fn is_boundary(&self) -> bool {
        self.neighbour.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub name: String,
    pub faces: Vec<usize>,
}

/// Regeneration parameters captured by the structured generators so that
/// refinement can rebuild a boundary-conforming mesh instead of merely
/// subdividing facets.
#[derive(Debug, Clone)]
pub enum MeshRecipe {
    Box(crate::geometry::BoxSpec),
    Cylinder(crate::geometry::CylinderSpec),
    Ventricles(crate::geometry::VentricleParams),
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Vec3>,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub patches: Vec<Patch>,
    /// face index -> patch index for boundary faces
    face_patch: Vec<Option<usize>>,
    /// per-cell list of (face index, outward sign: +1 owner / -1 neighbour)
    cell_faces: Vec<Vec<(usize, f64)>>,
    pub cell_zones: BTreeMap<String, Vec<usize>>,
    pub face_zones: BTreeMap<String, Vec<usize>>,
    pub recipe: Option<MeshRecipe>,
}

impl Mesh {
    /// Builds the face-based view from raw cells and tags every boundary face
    /// with the patch name returned by `tag` (given face centroid and outward
    /// normal direction).
    pub fn from_cells(
        nodes: Vec<Vec3>,
        mut cells: Vec<Cell>,
        tag: impl Fn(Vec3, Vec3) -> String,
    ) -> Result<Mesh, MeshError> {
        // canonicalize orientation so local faces point outward
        for cell in &mut cells {
            let n = cell.nodes();
            let flip = match cell.kind {
                CellKind::Tet4 => {
                    (nodes[n[1]] - nodes[n[0]])
                        .dot(&(nodes[n[2]] - nodes[n[0]]).cross(&(nodes[n[3]] - nodes[n[0]])))
                        < 0.0
                }
                CellKind::Hex8 => {
                    let bottom: Vec3 = n[..4].iter().map(|&i| nodes[i]).sum::<Vec3>() / 4.0;
                    let top: Vec3 = n[4..].iter().map(|&i| nodes[i]).sum::<Vec3>() / 4.0;
                    let e1 = nodes[n[1]] - nodes[n[0]];
                    let e2 = nodes[n[3]] - nodes[n[0]];
                    e1.cross(&e2).dot(&(top - bottom)) < 0.0
                }
            };
            if flip {
                match cell.kind {
                    CellKind::Tet4 => cell.nodes.swap(2, 3),
                    CellKind::Hex8 => {
                        for i in 0..4 {
                            cell.nodes.swap(i, i + 4);
                        }
                    }
                }
            }
        }
        let mut key_map: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        let mut faces: Vec<Face> = Vec::new();

        for (ci, cell) in cells.iter().enumerate() {
            for local in cell.kind.local_faces() {
                let mut fnodes = [0usize; 4];
                for (k, &l) in local.iter().enumerate() {
                    fnodes[k] = cell.nodes()[l];
                }
                let len = local.len() as u8;
                let mut key: Vec<usize> = fnodes[..len as usize].to_vec();
                key.sort_unstable();
                match key_map.get(&key) {
                    None => {
                        key_map.insert(key, faces.len());
                        faces.push(Face {
                            nodes: fnodes,
                            len,
                            owner: ci,
                            neighbour: None,
                        });
                    }
                    Some(&fi) => {
                        if faces[fi].neighbour.is_some() {
                            return Err(MeshError::NonManifold(
                                faces[fi].nodes().to_vec(),
                            ));
                        }
                        faces[fi].neighbour = Some(ci);
                    }
                }
            }
        }

        let mut cell_faces = vec![Vec::new(); cells.len()];
        for (fi, f) in faces.iter().enumerate() {
            cell_faces[f.owner].push((fi, 1.0));
            if let Some(n) = f.neighbour {
                cell_faces[n].push((fi, -1.0));
            }
        }

        // Patch assignment by centroid + outward normal.
        let mut patch_names: Vec<String> = Vec::new();
        let mut patch_faces: Vec<Vec<usize>> = Vec::new();
        let mut face_patch = vec![None; faces.len()];
        for (fi, f) in faces.iter().enumerate() {
            if !f.is_boundary() {
                continue;
            }
            let (area, centroid) = face_metrics(&nodes, f.nodes());
            let name = tag(centroid, area.normalize());
            let pi = match patch_names.iter().position(|p| *p == name) {
                Some(pi) => pi,
                None => {
                    patch_names.push(name);
                    patch_faces.push(Vec::new());
                    patch_names.len() - 1
                }
            };
            patch_faces[pi].push(fi);
            face_patch[fi] = Some(pi);
        }

        let patches = patch_names
            .into_iter()
            .zip(patch_faces)
            .map(|(name, faces)| Patch { name, faces })
            .collect();

        let mesh = Mesh {
            nodes,
            cells,
            faces,
            patches,
            face_patch,
            cell_faces,
            cell_zones: BTreeMap::new(),
            face_zones: BTreeMap::new(),
            recipe: None,
        };
        for (fi, f) in mesh.faces.iter().enumerate() {
            if f.is_boundary() && mesh.face_patch[fi].is_none() {
                return Err(MeshError::UntaggedBoundaryFace(fi));
            }
        }
        Ok(mesh)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn patch(&self, name: &str) -> Result<&Patch, MeshError> {
        self.patches
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| MeshError::UnknownPatch(name.to_string()))
    }

    pub fn has_patch(&self, name: &str) -> bool {
        self.patches.iter().any(|p| p.name == name)
    }

    /// Patch index of a boundary face.
    pub fn face_patch(&self, face: usize) -> Option<usize> {
        self.face_patch[face]
    }

    pub fn cell_faces(&self, cell: usize) -> &[(usize, f64)] {
        &self.cell_faces[cell]
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_boundary())
            .map(|(i, _)| i)
    }

    /// All node indices that lie on the boundary surface.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut on = vec![false; self.nodes.len()];
        for f in self.faces.iter().filter(|f| f.is_boundary()) {
            for &n in f.nodes() {
                on[n] = true;
            }
        }
        (0..self.nodes.len()).filter(|&i| on[i]).collect()
    }

    /// Geometric quantities for the current node positions.
    pub fn geometry(&self) -> MeshGeometry {
        MeshGeometry::compute(self)
    }

    /// Verifies positivity of all cell volumes and single connectedness.
    pub fn validate(&self) -> Result<(), MeshError> {
        let geo = self.geometry();
        for (ci, &v) in geo.cell_volume.iter().enumerate() {
            if !(v > 0.0) {
                return Err(MeshError::InvertedCell(ci, v));
            }
        }
        let ncomp = self.connected_components();
        if ncomp != 1 {
            return Err(MeshError::Disconnected(ncomp));
        }
        Ok(())
    }

    pub fn connected_components(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(c) = stack.pop() {
                for &(fi, _) in &self.cell_faces[c] {
                    let f = &self.faces[fi];
                    let other = if f.owner == c { f.neighbour } else { Some(f.owner) };
                    if let Some(o) = other {
                        if !seen[o] {
                            seen[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        count
    }

    /// Euler characteristic (V - E + F) of the boundary surface.
    pub fn boundary_euler_characteristic(&self) -> i64 {
        use std::collections::HashSet;
        let mut verts: HashSet<usize> = HashSet::new();
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        let mut nf: i64 = 0;
        for f in self.faces.iter().filter(|f| f.is_boundary()) {
            nf += 1;
            let n = f.nodes();
            for i in 0..n.len() {
                verts.insert(n[i]);
                let a = n[i];
                let b = n[(i + 1) % n.len()];
                edges.insert((a.min(b), a.max(b)));
            }
        }
        verts.len() as i64 - edges.len() as i64 + nf
    }

    /// Uniform subdivision (every tet -> 8 tets, every hex -> 8 hexes) with
    /// patch tags inherited from the parent boundary faces.
    pub fn subdivide(&self) -> Result<Mesh, MeshError> {
        subdivide::subdivide(self)
    }

    pub fn quality(&self) -> QualityReport {
        quality::report(self)
    }
}

/// Area vector (fan sum, outward per stored orientation) and area-weighted
/// centroid of a polygonal face.
pub fn face_metrics(nodes: &[Vec3], face_nodes: &[usize]) -> (Vec3, Vec3) {
    let m: Vec3 = face_nodes.iter().map(|&i| nodes[i]).sum::<Vec3>() / face_nodes.len() as f64;
    let mut area = Vec3::zeros();
    let mut centroid = Vec3::zeros();
    let mut total = 0.0;
    for i in 0..face_nodes.len() {
        let a = nodes[face_nodes[i]];
        let b = nodes[face_nodes[(i + 1) % face_nodes.len()]];
        let n = (a - m).cross(&(b - m)) * 0.5;
        let t = n.norm();
        area += n;
        centroid += (a + b + m) / 3.0 * t;
        total += t;
    }
    if total > 0.0 {
        centroid /= total;
    } else {
        centroid = m;
    }
    (area, centroid)
}

/// Per-entity geometric quantities derived from node positions.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub face_area: Vec<Vec3>,
    pub face_centroid: Vec<Vec3>,
    pub cell_centroid: Vec<Vec3>,
    pub cell_volume: Vec<f64>,
}

impl MeshGeometry {
    pub fn compute(mesh: &Mesh) -> MeshGeometry {
        let nf = mesh.faces.len();
        let mut face_area = vec![Vec3::zeros(); nf];
        let mut face_centroid = vec![Vec3::zeros(); nf];
        for (fi, f) in mesh.faces.iter().enumerate() {
            let (a, c) = face_metrics(&mesh.nodes, f.nodes());
            face_area[fi] = a;
            face_centroid[fi] = c;
        }
        let nc = mesh.cells.len();
        let mut cell_volume = vec![0.0; nc];
        let mut cell_centroid = vec![Vec3::zeros(); nc];
        for ci in 0..nc {
            let r0: Vec3 = mesh.cells[ci]
                .nodes()
                .iter()
                .map(|&i| mesh.nodes[i])
                .sum::<Vec3>()
                / mesh.cells[ci].nodes().len() as f64;
            let mut vol = 0.0;
            let mut cen = Vec3::zeros();
            for &(fi, sign) in mesh.cell_faces(ci) {
                let fnodes = mesh.faces[fi].nodes();
                let m: Vec3 =
                    fnodes.iter().map(|&i| mesh.nodes[i]).sum::<Vec3>() / fnodes.len() as f64;
                for i in 0..fnodes.len() {
                    let a = mesh.nodes[fnodes[i]];
                    let b = mesh.nodes[fnodes[(i + 1) % fnodes.len()]];
                    // signed tet (r0, m, a, b) with face orientation flipped
                    // for neighbour cells
                    let v = (m - r0).dot(&(a - r0).cross(&(b - r0))) / 6.0 * sign;
                    vol += v;
                    cen += (r0 + m + a + b) / 4.0 * v;
                }
            }
            cell_volume[ci] = vol;
            cell_centroid[ci] = if vol.abs() > 0.0 { cen / vol } else { r0 };
        }
        MeshGeometry {
            face_area,
            face_centroid,
            cell_centroid,
            cell_volume,
        }
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volume.iter().sum()
    }

    /// Volume enclosed by the boundary surface via the divergence theorem.
    pub fn boundary_enclosed_volume(&self, mesh: &Mesh) -> f64 {
        let mut v = 0.0;
        for (fi, f) in mesh.faces.iter().enumerate() {
            if f.is_boundary() {
                v += self.face_centroid[fi].dot(&self.face_area[fi]) / 3.0;
            }
        }
        v
    }
}
