//! Idealized ventricular-system generator.
//!
//! The fluid domain is the union of implicit primitives — two lateral
//! ellipsoid cavities with 3 mm inlet holes on top, two foramen-of-Monro
//! ducts, a midline third-ventricle slab, the aqueduct tube, a fourth
//! ventricle cavity and two outlet ducts. A graded Cartesian grid is marked
//! against the implicit region and boundary nodes are snapped onto the
//! isosurface, which keeps the mesh watertight and single-component by
//! construction while staying desk-scale.

use super::GeometryError;
use crate::mesh::{Cell, Mesh, MeshError, MeshRecipe};
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct VentricleParams {
    /// center of the +x lateral ventricle (the -x one mirrors it)
    pub lateral_center: [f64; 3],
    pub lateral_semi_axes: [f64; 3],
    /// CSF production holes on top of the lateral ventricles
    pub inlet_hole_diameter: f64,
    pub inlet_center_xy: [f64; 2],
    pub inlet_top_z: f64,
    pub monro_radius: f64,
    pub monro_upper: [f64; 3],
    pub monro_lower: [f64; 3],
    pub third_center: [f64; 3],
    pub third_size: [f64; 3],
    pub aqueduct_diameter: f64,
    pub aqueduct_length: f64,
    /// y position of the aqueduct / fourth-ventricle / outlet column
    pub aqueduct_y: f64,
    pub fourth_semi_axes: [f64; 3],
    pub outlet_radius: f64,
    pub outlet_length: f64,
    pub outlet_offset_x: f64,
    pub cell_size_fine: f64,
    pub cell_size_coarse: f64,
    /// lateral-interior probe zone excludes cells this close to the inlets
    pub inlet_exclusion_radius: f64,
}

impl Default for VentricleParams {
    fn default() -> Self {
        VentricleParams {
            lateral_center: [7.0e-3, 0.0, 16.0e-3],
            lateral_semi_axes: [8.5e-3, 25.0e-3, 11.5e-3],
            inlet_hole_diameter: 3.0e-3,
            inlet_center_xy: [7.0e-3, 5.0e-3],
            inlet_top_z: 30.0e-3,
            monro_radius: 0.7e-3,
            monro_upper: [5.0e-3, 0.0, 7.0e-3],
            monro_lower: [1.0e-3, 0.0, -1.0e-3],
            third_center: [0.0, -1.0e-3, -4.0e-3],
            third_size: [3.0e-3, 14.0e-3, 8.0e-3],
            aqueduct_diameter: 1.8e-3,
            aqueduct_length: 18.0e-3,
            aqueduct_y: -6.0e-3,
            fourth_semi_axes: [5.5e-3, 5.5e-3, 4.5e-3],
            outlet_radius: 0.68e-3,
            outlet_length: 20.0e-3,
            outlet_offset_x: 2.0e-3,
            cell_size_fine: 0.55e-3,
            cell_size_coarse: 1.6e-3,
            inlet_exclusion_radius: 8.0e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    LateralLeft,
    LateralRight,
    InletLeft,
    InletRight,
    MonroLeft,
    MonroRight,
    Third,
    Aqueduct,
    Fourth,
    OutletMagendie,
    OutletLuschka,
}

enum Prim {
    Ellipsoid { center: Vec3, semi: Vec3 },
    Cylinder { a: Vec3, b: Vec3, r: f64 },
    Slab { center: Vec3, half: Vec3 },
}

impl Prim {
    fn sdf(&self, p: Vec3) -> f64 {
        match *self {
            Prim::Ellipsoid { center, semi } => {
                let q = p - center;
                let k0 = Vec3::new(q.x / semi.x, q.y / semi.y, q.z / semi.z).norm();
                let k1 = Vec3::new(
                    q.x / (semi.x * semi.x),
                    q.y / (semi.y * semi.y),
                    q.z / (semi.z * semi.z),
                )
                .norm();
                if k1 == 0.0 {
                    -semi.min()
                } else {
                    k0 * (k0 - 1.0) / k1
                }
            }
            Prim::Cylinder { a, b, r } => {
                let ba = b - a;
                let pa = p - a;
                let baba = ba.dot(&ba);
                let paba = pa.dot(&ba);
                let x = (pa * baba - ba * paba).norm() - r * baba;
                let y = (paba - baba * 0.5).abs() - baba * 0.5;
                let x2 = x * x;
                let y2 = y * y * baba;
                let d = if x.max(y) < 0.0 {
                    -x2.min(y2)
                } else {
                    (if x > 0.0 { x2 } else { 0.0 }) + (if y > 0.0 { y2 } else { 0.0 })
                };
                d.signum() * d.abs().sqrt() / baba
            }
            Prim::Slab { center, half } => {
                let q = (p - center).abs() - half;
                let outside = Vec3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
                outside + q.max().min(0.0)
            }
        }
    }
}

struct Domain {
    prims: Vec<(Region, Prim)>,
}

impl Domain {
    fn sdf(&self, p: Vec3) -> f64 {
        self.prims
            .iter()
            .map(|(_, pr)| pr.sdf(p))
            .fold(f64::INFINITY, f64::min)
    }

    fn region(&self, p: Vec3) -> Region {
        self.prims
            .iter()
            .map(|(r, pr)| (*r, pr.sdf(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    }

    fn gradient(&self, p: Vec3, h: f64) -> Vec3 {
        let dx = self.sdf(p + Vec3::new(h, 0.0, 0.0)) - self.sdf(p - Vec3::new(h, 0.0, 0.0));
        let dy = self.sdf(p + Vec3::new(0.0, h, 0.0)) - self.sdf(p - Vec3::new(0.0, h, 0.0));
        let dz = self.sdf(p + Vec3::new(0.0, 0.0, h)) - self.sdf(p - Vec3::new(0.0, 0.0, h));
        Vec3::new(dx, dy, dz) / (2.0 * h)
    }
}

struct Derived {
    third_bottom: f64,
    aqueduct_mid_z: f64,
    fourth_center: Vec3,
    outlet_bottom_z: f64,
    inlet_tube_bottom: [Vec3; 2],
}

fn domain(p: &VentricleParams) -> Result<(Domain, Derived), GeometryError> {
    for (name, v) in [
        ("inlet_hole_diameter", p.inlet_hole_diameter),
        ("monro_radius", p.monro_radius),
        ("aqueduct_diameter", p.aqueduct_diameter),
        ("aqueduct_length", p.aqueduct_length),
        ("outlet_radius", p.outlet_radius),
        ("outlet_length", p.outlet_length),
        ("cell_size_fine", p.cell_size_fine),
        ("cell_size_coarse", p.cell_size_coarse),
    ] {
        if !(v > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }

    let lc = Vec3::from(p.lateral_center);
    let ls = Vec3::from(p.lateral_semi_axes);
    let mirror = |v: Vec3| Vec3::new(-v.x, v.y, v.z);

    let third_center = Vec3::from(p.third_center);
    let third_half = Vec3::from(p.third_size) * 0.5;
    let third_bottom = third_center.z - third_half.z;
    let third_top = third_center.z + third_half.z;

    let aq_r = 0.5 * p.aqueduct_diameter;
    let aq_start = Vec3::new(0.0, p.aqueduct_y, third_bottom + 1.0e-3);
    let aq_end = Vec3::new(0.0, p.aqueduct_y, third_bottom - p.aqueduct_length);

    let fs = Vec3::from(p.fourth_semi_axes);
    let fourth_center = Vec3::new(0.0, p.aqueduct_y, aq_end.z + 1.0e-3 - fs.z);

    let outlet_top_z = fourth_center.z - fs.z + 1.2e-3;
    let outlet_bottom_z = outlet_top_z - p.outlet_length;
    let out_right = (
        Vec3::new(p.outlet_offset_x, p.aqueduct_y, outlet_top_z),
        Vec3::new(p.outlet_offset_x, p.aqueduct_y, outlet_bottom_z),
    );
    let out_left = (mirror(out_right.0), mirror(out_right.1));

    // inlet tubes start below the lateral top surface and end at a flat cap
    let (ix, iy) = (p.inlet_center_xy[0], p.inlet_center_xy[1]);
    let rel = ((ix - lc.x) / ls.x).powi(2) + ((iy - lc.y) / ls.y).powi(2);
    if rel >= 1.0 {
        return Err(GeometryError::InvalidParameter(
            "inlet hole center lies outside the lateral ventricle footprint".into(),
        ));
    }
    let lateral_top = lc.z + ls.z * (1.0 - rel).sqrt();
    if p.inlet_top_z <= lateral_top {
        return Err(GeometryError::InvalidParameter(
            "inlet_top_z must sit above the lateral ventricle".into(),
        ));
    }
    let inlet_bottom = Vec3::new(ix, iy, lateral_top - 2.0e-3);
    let inlet_top = Vec3::new(ix, iy, p.inlet_top_z);

    let monro_u = Vec3::from(p.monro_upper);
    let monro_l = Vec3::from(p.monro_lower);
    if monro_l.z >= third_top {
        return Err(GeometryError::InvalidParameter(
            "monro_lower must reach into the third ventricle".into(),
        ));
    }

    let prims = vec![
        (
            Region::LateralRight,
            Prim::Ellipsoid {
                center: lc,
                semi: ls,
            },
        ),
        (
            Region::LateralLeft,
            Prim::Ellipsoid {
                center: mirror(lc),
                semi: ls,
            },
        ),
        (
            Region::InletRight,
            Prim::Cylinder {
                a: inlet_bottom,
                b: inlet_top,
                r: 0.5 * p.inlet_hole_diameter,
            },
        ),
        (
            Region::InletLeft,
            Prim::Cylinder {
                a: mirror(inlet_bottom),
                b: mirror(inlet_top),
                r: 0.5 * p.inlet_hole_diameter,
            },
        ),
        (
            Region::MonroRight,
            Prim::Cylinder {
                a: monro_u,
                b: monro_l,
                r: p.monro_radius,
            },
        ),
        (
            Region::MonroLeft,
            Prim::Cylinder {
                a: mirror(monro_u),
                b: mirror(monro_l),
                r: p.monro_radius,
            },
        ),
        (
            Region::Third,
            Prim::Slab {
                center: third_center,
                half: third_half,
            },
        ),
        (
            Region::Aqueduct,
            Prim::Cylinder {
                a: aq_start,
                b: aq_end,
                r: aq_r,
            },
        ),
        (
            Region::Fourth,
            Prim::Ellipsoid {
                center: fourth_center,
                semi: fs,
            },
        ),
        (
            Region::OutletMagendie,
            Prim::Cylinder {
                a: out_left.0,
                b: out_left.1,
                r: p.outlet_radius,
            },
        ),
        (
            Region::OutletLuschka,
            Prim::Cylinder {
                a: out_right.0,
                b: out_right.1,
                r: p.outlet_radius,
            },
        ),
    ];

    Ok((
        Domain { prims },
        Derived {
            third_bottom,
            aqueduct_mid_z: 0.5 * (aq_start.z + aq_end.z),
            fourth_center,
            outlet_bottom_z,
            inlet_tube_bottom: [inlet_bottom, mirror(inlet_bottom)],
        },
    ))
}

/// Graded 1D coordinates: `fine` spacing inside the band, `coarse` outside,
/// with steps clamped to land exactly on the band edges.
fn axis_coords(min: f64, max: f64, band: (f64, f64), fine: f64, coarse: f64) -> Vec<f64> {
    let mut xs = vec![min];
    let mut x = min;
    let (lo, hi) = band;
    while x < max - 1e-12 {
        let h = if x >= lo - 1e-12 && x < hi - 1e-12 {
            // inside band: step fine, land on hi
            fine.min(hi - x).max(0.5 * fine)
        } else if x < lo {
            // approach the band edge without overshooting
            coarse.min(lo - x).max(0.5 * fine)
        } else {
            coarse
        };
        x += h;
        xs.push(x);
    }
    xs
}

pub fn build(params: &VentricleParams) -> Result<Mesh, GeometryError> {
    let (dom, derived) = domain(params)?;
    let hf = params.cell_size_fine;
    let hc = params.cell_size_coarse;

    let lc = Vec3::from(params.lateral_center);
    let ls = Vec3::from(params.lateral_semi_axes);
    let margin = 1.5 * hc;

    let x_max = (lc.x + ls.x).max(params.inlet_center_xy[0] + params.inlet_hole_diameter) + margin;
    let y_min = (lc.y - ls.y).min(params.aqueduct_y - params.fourth_semi_axes[1]) - margin;
    let y_max = lc.y + ls.y + margin;
    let z_min = derived.outlet_bottom_z - margin;
    let z_max = params.inlet_top_z + margin;

    // fine bands cover everything that must be resolved across its width
    let fine_x = (
        -(params.inlet_center_xy[0] + 0.5 * params.inlet_hole_diameter + 2.0 * hf),
        params.inlet_center_xy[0] + 0.5 * params.inlet_hole_diameter + 2.0 * hf,
    );
    let fine_y = (
        params.aqueduct_y - params.fourth_semi_axes[1] - 2.0 * hf,
        (params.inlet_center_xy[1] + 0.5 * params.inlet_hole_diameter + 2.0 * hf)
            .max(params.third_center[1] + 0.5 * params.third_size[1] + 2.0 * hf),
    );
    let fine_z = (
        derived.outlet_bottom_z - 2.0 * hf,
        params.monro_upper[2] + params.monro_radius + 2.0 * hf,
    );

    let xs = axis_coords(-x_max, x_max, fine_x, hf, hc);
    let ys = axis_coords(y_min, y_max, fine_y, hf, hc);
    let zs = axis_coords(z_min, z_max, fine_z, hf, hc);

    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    let node_id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;

    // mark cells whose center lies inside the implicit region
    let mut keep = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = Vec3::new(
                    0.5 * (xs[i] + xs[i + 1]),
                    0.5 * (ys[j] + ys[j + 1]),
                    0.5 * (zs[k] + zs[k + 1]),
                );
                if dom.sdf(c) < 0.0 {
                    keep.push((i, j, k, c));
                }
            }
        }
    }
    if keep.is_empty() {
        return Err(GeometryError::InvalidParameter(
            "implicit region contains no cells at this resolution".into(),
        ));
    }

    // compact node numbering over used nodes only
    let mut node_map = vec![usize::MAX; (nx + 1) * (ny + 1) * (nz + 1)];
    let mut nodes: Vec<Vec3> = Vec::new();
    let mut node_size: Vec<f64> = Vec::new();
    let mut cells = Vec::with_capacity(keep.len());
    let mut regions = Vec::with_capacity(keep.len());
    for &(i, j, k, c) in &keep {
        let corners = [
            (i, j, k),
            (i + 1, j, k),
            (i + 1, j + 1, k),
            (i, j + 1, k),
            (i, j, k + 1),
            (i + 1, j, k + 1),
            (i + 1, j + 1, k + 1),
            (i, j + 1, k + 1),
        ];
        let h_local = (xs[i + 1] - xs[i]).min(ys[j + 1] - ys[j]).min(zs[k + 1] - zs[k]);
        let mut ids = [0usize; 8];
        for (q, &(a, b, d)) in corners.iter().enumerate() {
            let gid = node_id(a, b, d);
            if node_map[gid] == usize::MAX {
                node_map[gid] = nodes.len();
                nodes.push(Vec3::new(xs[a], ys[b], zs[d]));
                node_size.push(h_local);
            }
            let nid = node_map[gid];
            node_size[nid] = node_size[nid].min(h_local);
            ids[q] = nid;
        }
        cells.push(Cell::hex(ids));
        regions.push(dom.region(c));
    }

    // provisional mesh to discover boundary nodes, then snap them to the
    // isosurface (clamped to keep cells from inverting)
    let provisional = Mesh::from_cells(nodes.clone(), cells.clone(), |_, _| "wall".into())?;
    for &bn in &provisional.boundary_nodes() {
        let original = nodes[bn];
        let clamp = 0.49 * node_size[bn];
        let mut p = original;
        for _ in 0..4 {
            let d = dom.sdf(p);
            let g = dom.gradient(p, 1e-6);
            let g2 = g.norm_squared();
            if g2 < 1e-12 {
                break;
            }
            p -= g * (d / g2);
        }
        let mut step = p - original;
        let n = step.norm();
        if n > clamp {
            step *= clamp / n;
        }
        nodes[bn] = original + step;
    }

    // roll back snaps that inverted a cell
    let mut guard = 0;
    loop {
        let test = Mesh::from_cells(nodes.clone(), cells.clone(), |_, _| "wall".into())?;
        let geo = test.geometry();
        let bad: Vec<usize> = (0..test.n_cells())
            .filter(|&ci| geo.cell_volume[ci] <= 0.0)
            .collect();
        if bad.is_empty() || guard > 8 {
            break;
        }
        for ci in bad {
            for &nid in test.cells[ci].nodes() {
                let gid_pos = provisional.nodes[nid];
                nodes[nid] = 0.5 * (nodes[nid] + gid_pos);
            }
        }
        guard += 1;
    }

    let inlet_half_band = 0.6 * hc;
    let outlet_half_band = 0.6 * hf;
    let inlet_top = params.inlet_top_z;
    let outlet_bottom = derived.outlet_bottom_z;
    let dom_ref = &dom;
    let mut mesh = Mesh::from_cells(nodes, cells, |c, n| {
        if (c.z - inlet_top).abs() < inlet_half_band && n.z > 0.5 {
            if c.x < 0.0 {
                "inlet_left".into()
            } else {
                "inlet_right".into()
            }
        } else if (c.z - outlet_bottom).abs() < outlet_half_band && n.z < -0.5 {
            if c.x < 0.0 {
                "outlet_magendie".into()
            } else {
                "outlet_luschka".into()
            }
        } else if dom_ref.region(c) == Region::Third {
            "third_ventricle_wall".into()
        } else {
            "wall".into()
        }
    })?;

    // cell zones for metric probes
    let mut zones: std::collections::BTreeMap<String, Vec<usize>> = Default::default();
    let mut push = |name: &str, ci: usize, zones: &mut std::collections::BTreeMap<String, Vec<usize>>| {
        zones.entry(name.to_string()).or_default().push(ci)
    };
    let geo = mesh.geometry();
    for ci in 0..mesh.n_cells() {
        let name = match regions[ci] {
            Region::LateralLeft | Region::LateralRight => "lateral_ventricles",
            Region::InletLeft | Region::InletRight => "inlet_tubes",
            Region::MonroLeft | Region::MonroRight => "monro",
            Region::Third => "third_ventricle",
            Region::Aqueduct => "aqueduct",
            Region::Fourth => "fourth_ventricle",
            Region::OutletMagendie | Region::OutletLuschka => "outlet_ducts",
        };
        push(name, ci, &mut zones);
        if name == "lateral_ventricles" {
            let c = geo.cell_centroid[ci];
            let far = derived
                .inlet_tube_bottom
                .iter()
                .all(|&b| (c - b).norm() > params.inlet_exclusion_radius);
            if far {
                push("lateral_interior", ci, &mut zones);
            }
        }
    }
    mesh.cell_zones = zones;

    // interior faces crossing the aqueduct midplane, both sides in the
    // aqueduct zone
    let aq_cells: std::collections::HashSet<usize> = mesh
        .cell_zones
        .get("aqueduct")
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    let mid_z = derived.aqueduct_mid_z;
    let mut midplane = Vec::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        if let Some(nb) = f.neighbour {
            let a = geo.cell_centroid[f.owner].z - mid_z;
            let b = geo.cell_centroid[nb].z - mid_z;
            if (a <= 0.0) != (b <= 0.0) && aq_cells.contains(&f.owner) && aq_cells.contains(&nb) {
                midplane.push(fi);
            }
        }
    }
    mesh.face_zones.insert("aqueduct_midplane".into(), midplane);

    mesh.recipe = Some(MeshRecipe::Ventricles(params.clone()));
    mesh.validate().map_err(|e| match e {
        MeshError::Disconnected(n) => GeometryError::Mesh(MeshError::Disconnected(n)),
        other => GeometryError::Mesh(other),
    })?;

    for patch in [
        "inlet_left",
        "inlet_right",
        "outlet_magendie",
        "outlet_luschka",
        "third_ventricle_wall",
        "wall",
    ] {
        if !mesh.has_patch(patch) {
            return Err(GeometryError::InvalidParameter(format!(
                "generated mesh is missing patch '{patch}'"
            )));
        }
    }
    let _ = derived.fourth_center;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_system_is_connected_and_watertight() {
        let mesh = build(&VentricleParams::default()).unwrap();
        mesh.validate().unwrap();
        assert_eq!(mesh.connected_components(), 1);
        assert_eq!(mesh.boundary_euler_characteristic(), 2);
    }

    #[test]
    fn default_volume_lands_in_segmented_band() {
        let mesh = build(&VentricleParams::default()).unwrap();
        let vol_mm3 = mesh.geometry().total_volume() * 1e9;
        assert!(
            (20_000.0..=30_000.0).contains(&vol_mm3),
            "volume {vol_mm3:.0} mm^3"
        );
    }

    #[test]
    fn named_patches_and_zones_exist() {
        let mesh = build(&VentricleParams::default()).unwrap();
        for z in [
            "lateral_ventricles",
            "lateral_interior",
            "third_ventricle",
            "aqueduct",
            "fourth_ventricle",
            "outlet_ducts",
        ] {
            assert!(
                mesh.cell_zones.get(z).is_some_and(|v| !v.is_empty()),
                "zone {z}"
            );
        }
        assert!(!mesh.face_zones["aqueduct_midplane"].is_empty());
    }

    #[test]
    fn inlet_patch_area_approximates_hole() {
        let mesh = build(&VentricleParams::default()).unwrap();
        let geo = mesh.geometry();
        let hole = std::f64::consts::PI * (1.5e-3f64).powi(2);
        for p in ["inlet_left", "inlet_right"] {
            let area: f64 = mesh
                .patch(p)
                .unwrap()
                .faces
                .iter()
                .map(|&f| geo.face_area[f].norm())
                .sum();
            assert!(
                (area - hole).abs() / hole < 0.45,
                "{p} area {area:.3e} vs hole {hole:.3e}"
            );
        }
    }
}
