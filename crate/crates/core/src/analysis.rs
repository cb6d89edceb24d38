//! Post-processing metrics and the analytic solutions used as solver
//! oracles: Reynolds/Womersley numbers, plane pressure drops, peak-velocity
//! and backflow detection, and the oscillatory pipe-flow profile.

use crate::mesh::{Mesh, MeshGeometry};
use crate::Vec3;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("baseline must be positive, got {0}")]
    ZeroBaseline(f64),
    #[error("Womersley series evaluation is unreliable for alpha = {0} > 50")]
    WomersleyRange(f64),
    #[error("radius fraction {0} outside [-1, 1]")]
    RadiusOutOfRange(f64),
    #[error("region or plane selects no cells/faces")]
    EmptyRegion,
    #[error("series spans {span:.4} s, shorter than one period {period:.4} s")]
    InsufficientData { span: f64, period: f64 },
}

/// Summary metrics extracted from a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMetrics {
    pub peak_aqueduct_velocity: f64,
    pub aqueduct_pressure_drop: f64,
    pub lateral_ventricle_peak_pressure: f64,
    pub reynolds: f64,
    pub womersley: f64,
    pub peak_wall_deformation: f64,
}

/// `Re = rho v D / mu`.
pub fn reynolds(density: f64, velocity: f64, diameter: f64, viscosity: f64) -> f64 {
    density * velocity * diameter / viscosity
}

/// `alpha = L sqrt(2 pi rho / (T mu))`.
pub fn womersley(length: f64, period: f64, density: f64, viscosity: f64) -> f64 {
    length * (2.0 * std::f64::consts::PI * density / (period * viscosity)).sqrt()
}

/// `100 (value - baseline) / baseline`.
pub fn percent_change(baseline: f64, value: f64) -> Result<f64, AnalysisError> {
    if baseline <= 0.0 {
        return Err(AnalysisError::ZeroBaseline(baseline));
    }
    Ok(100.0 * (value - baseline) / baseline)
}

/// Oriented cutting plane for flux and pressure probes.
#[derive(Debug, Clone, Copy)]
pub struct Plane {
    pub origin: Vec3,
    pub normal: Vec3,
}

impl Plane {
    pub fn new(origin: Vec3, normal: Vec3) -> Plane {
        Plane {
            origin,
            normal: normal.normalize(),
        }
    }

    fn side(&self, p: Vec3) -> f64 {
        (p - self.origin).dot(&self.normal)
    }
}

/// Interior faces whose adjacent cell centroids straddle the plane.
pub fn plane_faces(mesh: &Mesh, geo: &MeshGeometry, plane: &Plane) -> Vec<usize> {
    let mut out = Vec::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        if let Some(nb) = f.neighbour {
            let a = plane.side(geo.cell_centroid[f.owner]);
            let b = plane.side(geo.cell_centroid[nb]);
            if a <= 0.0 && b > 0.0 || a > 0.0 && b <= 0.0 {
                out.push(fi);
            }
        }
    }
    out
}

/// Area-weighted mean pressure over the faces cut by a plane.
pub fn plane_mean_pressure(
    mesh: &Mesh,
    geo: &MeshGeometry,
    pressure: &[f64],
    plane: &Plane,
) -> Result<f64, AnalysisError> {
    let faces = plane_faces(mesh, geo, plane);
    if faces.is_empty() {
        return Err(AnalysisError::EmptyRegion);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for fi in faces {
        let f = &mesh.faces[fi];
        let area = geo.face_area[fi].norm();
        let p = 0.5 * (pressure[f.owner] + pressure[f.neighbour.unwrap()]);
        num += area * p;
        den += area;
    }
    Ok(num / den)
}

/// Upstream-minus-downstream area-weighted mean pressure difference.
pub fn pressure_drop(
    mesh: &Mesh,
    geo: &MeshGeometry,
    pressure: &[f64],
    upstream: &Plane,
    downstream: &Plane,
) -> Result<f64, AnalysisError> {
    Ok(plane_mean_pressure(mesh, geo, pressure, upstream)?
        - plane_mean_pressure(mesh, geo, pressure, downstream)?)
}

/// Area-weighted mean of the owner-cell pressure over a boundary patch.
pub fn patch_mean_pressure(
    mesh: &Mesh,
    geo: &MeshGeometry,
    pressure: &[f64],
    patch: &str,
) -> Result<f64, AnalysisError> {
    let patch = mesh.patch(patch).map_err(|_| AnalysisError::EmptyRegion)?;
    if patch.faces.is_empty() {
        return Err(AnalysisError::EmptyRegion);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &fi in &patch.faces {
        let area = geo.face_area[fi].norm();
        num += area * pressure[mesh.faces[fi].owner];
        den += area;
    }
    Ok(num / den)
}

/// Peak velocity magnitude over a cell region; returns (magnitude, cell).
pub fn peak_velocity_in_cells(
    cells: &[usize],
    velocity: &[Vec3],
) -> Result<(f64, usize), AnalysisError> {
    if cells.is_empty() {
        return Err(AnalysisError::EmptyRegion);
    }
    let mut best = (0.0f64, cells[0]);
    for &c in cells {
        let m = velocity[c].norm();
        if m > best.0 {
            best = (m, c);
        }
    }
    Ok(best)
}

/// Peak magnitude of a scalar time series; returns (value, time of peak).
pub fn peak_of_series(times: &[f64], values: &[f64]) -> Result<(f64, f64), AnalysisError> {
    if times.is_empty() || times.len() != values.len() {
        return Err(AnalysisError::EmptyRegion);
    }
    let mut best = (values[0].abs(), times[0]);
    for (&t, &v) in times.iter().zip(values) {
        if v.abs() > best.0 {
            best = (v.abs(), t);
        }
    }
    Ok(best)
}

/// Sign-reversal (negative-flux) intervals of an axial-flux series that must
/// cover at least one full period. Interval endpoints are linearly
/// interpolated zero crossings.
pub fn detect_backflow(
    times: &[f64],
    flux: &[f64],
    period: f64,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    assert_eq!(times.len(), flux.len());
    if times.len() < 2 {
        return Err(AnalysisError::InsufficientData {
            span: 0.0,
            period,
        });
    }
    let span = times[times.len() - 1] - times[0];
    if span + 1e-12 < period {
        return Err(AnalysisError::InsufficientData { span, period });
    }
    let cross = |i: usize| -> f64 {
        // zero crossing between samples i and i+1
        let (t0, t1) = (times[i], times[i + 1]);
        let (f0, f1) = (flux[i], flux[i + 1]);
        t0 + (t1 - t0) * (f0 / (f0 - f1))
    };
    let mut intervals = Vec::new();
    let mut start: Option<f64> = if flux[0] < 0.0 { Some(times[0]) } else { None };
    for i in 0..times.len() - 1 {
        let (f0, f1) = (flux[i], flux[i + 1]);
        if f0 >= 0.0 && f1 < 0.0 {
            start = Some(cross(i));
        } else if f0 < 0.0 && f1 >= 0.0 {
            if let Some(s) = start.take() {
                intervals.push((s, cross(i)));
            }
        }
    }
    if let Some(s) = start {
        intervals.push((s, times[times.len() - 1]));
    }
    Ok(intervals)
}

/// Complex Bessel function of the first kind, order zero, by power series.
fn bessel_j0(z: Complex64) -> Complex64 {
    let q = -z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..=300 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Analytic oscillatory pipe-flow (Womersley) axial velocity.
///
/// The driving pressure gradient is `-dp/dx = G cos(omega t)`; `phase` is
/// `omega t`, `radius_fraction` is r/R. Returns the velocity in m/s.
pub fn womersley_velocity(
    radius_fraction: f64,
    phase: f64,
    alpha: f64,
    grad_amplitude: f64,
    density: f64,
    omega: f64,
) -> Result<f64, AnalysisError> {
    if alpha > 50.0 {
        return Err(AnalysisError::WomersleyRange(alpha));
    }
    if !(-1.0..=1.0).contains(&radius_fraction) {
        return Err(AnalysisError::RadiusOutOfRange(radius_fraction));
    }
    let i32_ = Complex64::new(0.0, 1.0).powf(1.5); // i^(3/2)
    let z_wall = i32_ * alpha;
    let z_r = i32_ * alpha * radius_fraction.abs();
    let profile = Complex64::new(1.0, 0.0) - bessel_j0(z_r) / bessel_j0(z_wall);
    let scale = grad_amplitude / (Complex64::new(0.0, 1.0) * density * omega);
    let u = scale * profile * Complex64::new(0.0, phase).exp();
    Ok(u.re)
}
