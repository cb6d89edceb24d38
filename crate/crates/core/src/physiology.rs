//! Physiological source models: pulsatile CSF production, tumor growth and
//! the loads it exerts on the third-ventricle wall.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhysiologyError {
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("patch area must be positive, got {0}")]
    ZeroArea(f64),
}

/// m^3/s for a rate given in ml/day.
pub fn ml_per_day(v: f64) -> f64 {
    v * 1e-6 / 86_400.0
}

/// m^3/s for a rate given in ml/min.
pub fn ml_per_min(v: f64) -> f64 {
    v * 1e-6 / 60.0
}

/// Pulsatile CSF production: bulk rate plus two cardiac harmonics,
/// `V(t) = B + X sin(w t + a) + Y sin(2 w t + b)` in m^3/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveform {
    /// bulk volumetric production rate B (m^3/s)
    pub bulk: f64,
    /// first-harmonic amplitude X (m^3/s)
    pub harmonic1: f64,
    /// second-harmonic amplitude Y (m^3/s)
    pub harmonic2: f64,
    /// cardiac angular frequency (rad/s)
    pub omega: f64,
    /// first-harmonic phase (rad)
    pub phase1: f64,
    /// second-harmonic phase (rad)
    pub phase2: f64,
}

impl Waveform {
    /// Boundary-condition source of record: 500 ml/day bulk production with
    /// the published harmonic amplitudes at a 1 Hz heart rate.
    pub fn bulk_dominated() -> Waveform {
        Waveform {
            bulk: ml_per_day(500.0),
            harmonic1: ml_per_min(0.21),
            harmonic2: ml_per_min(0.05),
            omega: 2.0 * std::f64::consts::PI,
            phase1: 0.0,
            phase2: 0.0,
        }
    }

    /// Pulsation-dominated variant with the 0.3 ml/day bulk term; the
    /// harmonics then reverse the net inflow once per cardiac cycle, which is
    /// the regime in which aqueduct backflow exists at all.
    pub fn pulsatile() -> Waveform {
        Waveform {
            bulk: ml_per_day(0.3),
            ..Waveform::bulk_dominated()
        }
    }

    /// Steady bulk-only waveform (used by steady benchmarks).
    pub fn steady(bulk: f64) -> Waveform {
        Waveform {
            bulk,
            harmonic1: 0.0,
            harmonic2: 0.0,
            omega: 2.0 * std::f64::consts::PI,
            phase1: 0.0,
            phase2: 0.0,
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    /// Total volumetric production rate at time `t` (m^3/s).
    pub fn volume_rate(&self, t: f64) -> f64 {
        self.bulk
            + self.harmonic1 * (self.omega * t + self.phase1).sin()
            + self.harmonic2 * (2.0 * self.omega * t + self.phase2).sin()
    }

    /// Mass production rate at time `t` (kg/s).
    pub fn mass_rate(&self, t: f64, density: f64) -> f64 {
        density * self.volume_rate(t)
    }
}

/// Evaluates the inflow waveform; errors on negative time.
pub fn inflow_volume_rate(w: &Waveform, t: f64) -> Result<f64, PhysiologyError> {
    if t < 0.0 {
        return Err(PhysiologyError::NegativeTime(t));
    }
    Ok(w.volume_rate(t))
}

/// Gompertz tumor growth together with the mass-derived body load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TumorModel {
    /// initial tumor volume (mm^3)
    pub initial_volume_mm3: f64,
    /// proliferation rate alpha (1/day)
    pub growth_rate: f64,
    /// exponential decay constant beta (1/day)
    pub decay_rate: f64,
    /// tumor mass density (kg/m^3)
    pub density: f64,
    /// gravitational acceleration (m/s^2)
    pub gravity: f64,
}

impl TumorModel {
    pub fn new(initial_volume_mm3: f64) -> TumorModel {
        TumorModel {
            initial_volume_mm3,
            growth_rate: 0.279,
            decay_rate: 0.1470,
            density: 1040.0,
            gravity: 9.81,
        }
    }

    /// Saturation volume as t -> infinity (mm^3).
    pub fn asymptotic_volume_mm3(&self) -> f64 {
        self.initial_volume_mm3 * (self.growth_rate / self.decay_rate).exp()
    }
}

/// Tumor volume after `t_days` of growth (mm^3):
/// `V(t) = V0 exp((alpha/beta)(1 - exp(-beta t)))`.
pub fn gompertz_volume(model: &TumorModel, t_days: f64) -> Result<f64, PhysiologyError> {
    if t_days < 0.0 {
        return Err(PhysiologyError::NegativeTime(t_days));
    }
    let ratio = model.growth_rate / model.decay_rate;
    Ok(model.initial_volume_mm3 * (ratio * (1.0 - (-model.decay_rate * t_days).exp())).exp())
}

/// Weight of the tumor mass: `F = rho g V` with the volume in mm^3.
pub fn tumor_body_force(volume_mm3: f64, density: f64, gravity: f64) -> f64 {
    density * gravity * volume_mm3 * 1e-9
}

/// Converts the tumor body force to a uniform inward pressure on the
/// third-ventricle wall patch.
pub fn tumor_wall_pressure(force: f64, patch_area: f64) -> Result<f64, PhysiologyError> {
    if patch_area <= 0.0 {
        return Err(PhysiologyError::ZeroArea(patch_area));
    }
    Ok(force / patch_area)
}

/// Cardiac-resolution time-step rule `dt = 1/(20 f)`.
pub fn timestep_from_heart_rate(frequency_hz: f64) -> f64 {
    1.0 / (20.0 * frequency_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BULK_500_ML_DAY: f64 = 5.787037037037037e-9;

    #[test]
    fn bulk_rate_at_t0_with_zero_phases() {
        let w = Waveform::bulk_dominated();
        assert!((inflow_volume_rate(&w, 0.0).unwrap() - BULK_500_ML_DAY).abs() < 1e-22);
        assert!((w.mass_rate(0.0, 1000.0) - 5.787037037037037e-6).abs() < 1e-18);
    }

    #[test]
    fn negative_time_is_rejected() {
        let w = Waveform::bulk_dominated();
        assert!(inflow_volume_rate(&w, -0.1).is_err());
    }

    #[test]
    fn mean_over_one_period_is_bulk() {
        let w = Waveform::bulk_dominated();
        let n = 200_000;
        let dt = w.period() / n as f64;
        // midpoint rule over a full period; harmonics integrate to zero
        let mean: f64 = (0..n)
            .map(|i| w.volume_rate((i as f64 + 0.5) * dt))
            .sum::<f64>()
            / n as f64;
        assert!((mean - w.bulk).abs() < 1e-12 * w.bulk.max(w.harmonic1));
    }

    #[test]
    fn harmonic_peak_from_dense_scan() {
        // independent oracle: dense scan of the waveform over one period
        let w = Waveform::bulk_dominated();
        let n = 2_000_000usize;
        let mut best = f64::NEG_INFINITY;
        let mut best_t = 0.0;
        for i in 0..=n {
            let t = w.period() * i as f64 / n as f64;
            let v = w.volume_rate(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let harmonic_peak = best - w.bulk;
        // frozen from the scan: 3.8251628e-9 m^3/s at 19.212% of the cycle
        assert!(
            (harmonic_peak - 3.8251628045e-9).abs() < 1e-14,
            "peak {harmonic_peak:.10e}"
        );
        assert!((best_t / w.period() - 0.19212).abs() < 1e-3);
    }

    #[test]
    fn waveform_is_periodic() {
        let w = Waveform::bulk_dominated();
        let scale = w.bulk + w.harmonic1 + w.harmonic2;
        for t in [0.0, 0.123, 0.5, 0.789] {
            let d = (w.volume_rate(t + w.period()) - w.volume_rate(t)).abs();
            assert!(d < 1e-12 * scale);
        }
    }

    #[test]
    fn pulsatile_variant_reverses_once_per_cycle() {
        let w = Waveform::pulsatile();
        let n = 100_000;
        let mut crossings = 0;
        let mut prev = w.volume_rate(0.0);
        for i in 1..=n {
            let v = w.volume_rate(w.period() * i as f64 / n as f64);
            if prev >= 0.0 && v < 0.0 {
                crossings += 1;
            }
            prev = v;
        }
        assert_eq!(crossings, 1);
    }

    #[test]
    fn gompertz_matches_published_growth() {
        // (initial, 35-day) pairs with their published targets
        let cases = [
            (997.29, 6580.9776, 6590.0),
            (545.36, 3598.7545, 3604.0),
            (1300.14, 8579.4424, 8592.0),
        ];
        for (v0, frozen, published) in cases {
            let m = TumorModel::new(v0);
            let v = gompertz_volume(&m, 35.0).unwrap();
            assert!((v - frozen).abs() < 1e-3, "v = {v:.6}");
            assert!((v - published).abs() / published < 0.01);
        }
    }

    #[test]
    fn gompertz_limits() {
        let m = TumorModel::new(997.29);
        assert_eq!(gompertz_volume(&m, 0.0).unwrap(), 997.29);
        let asymptote = m.asymptotic_volume_mm3();
        assert!((asymptote - 6654.0).abs() / 6654.0 < 0.005);
        assert!(asymptote > gompertz_volume(&m, 35.0).unwrap());
        assert!((gompertz_volume(&m, 10_000.0).unwrap() - asymptote).abs() < 1e-6 * asymptote);
    }

    #[test]
    fn gompertz_is_monotone_and_bounded() {
        let m = TumorModel::new(545.36);
        let cap = m.asymptotic_volume_mm3();
        let mut prev = 0.0;
        for i in 0..=400 {
            let v = gompertz_volume(&m, i as f64 * 0.25).unwrap();
            assert!(v > prev);
            assert!(v <= cap * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn gompertz_satisfies_its_ode() {
        // dV/dt = alpha exp(-beta t) V(t); compare closed form against a
        // central finite difference
        let m = TumorModel::new(997.29);
        let h = 1e-5;
        for &t in &[0.5, 5.0, 15.0, 30.0] {
            let v = gompertz_volume(&m, t).unwrap();
            let dv = (gompertz_volume(&m, t + h).unwrap() - gompertz_volume(&m, t - h).unwrap())
                / (2.0 * h);
            let expected = m.growth_rate * (-m.decay_rate * t).exp() * v;
            assert!((dv - expected).abs() < 1e-6 * expected.abs());
        }
    }

    #[test]
    fn tumor_forces_match_published_values() {
        let cases = [(6590.0, 0.0672), (3604.0, 0.0368), (8592.0, 0.0877)];
        for (v, f_published) in cases {
            let f = tumor_body_force(v, 1040.0, 9.81);
            assert!(
                (f - f_published).abs() / f_published < 0.005,
                "V={v}: F={f:.6}"
            );
        }
        assert_eq!(tumor_body_force(0.0, 1040.0, 9.81), 0.0);
    }

    #[test]
    fn force_is_linear_in_volume_and_density() {
        let f = tumor_body_force(1234.0, 1040.0, 9.81);
        assert_eq!(tumor_body_force(2.0 * 1234.0, 1040.0, 9.81), 2.0 * f);
        assert_eq!(tumor_body_force(1234.0, 2.0 * 1040.0, 9.81), 2.0 * f);
    }

    #[test]
    fn wall_pressure_conversion() {
        let p = tumor_wall_pressure(0.0672, 2e-4).unwrap();
        assert!((p - 336.0).abs() < 1e-9);
        assert_eq!(tumor_wall_pressure(0.0, 2e-4).unwrap(), 0.0);
        let half = tumor_wall_pressure(0.0672, 4e-4).unwrap();
        assert!((half - p / 2.0).abs() < 1e-12);
        assert!(tumor_wall_pressure(1.0, 0.0).is_err());
    }

    #[test]
    fn timestep_rule() {
        assert_eq!(timestep_from_heart_rate(1.0), 0.05);
        assert_eq!(timestep_from_heart_rate(2.0), 0.025);
        // the production runs use 0.01 s, below the rule's ceiling
        assert!(0.01 <= timestep_from_heart_rate(1.0));
    }
}
