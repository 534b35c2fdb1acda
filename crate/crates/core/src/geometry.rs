//! Curvature profiles `R(r, t)`, thermodynamic parameters, and the steering
//! parameter `gamma(t) = scale * beta * R(t)` that indexes the initial state.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Constant { base: f64 },
    LinearRamp { base: f64, rate: f64 },
    Sinusoidal { base: f64, amplitude: f64, period: f64 },
    GaussianPulse { base: f64, amplitude: f64, center: f64, width: f64 },
}

/// Scalar curvature drive.  Carries an optional validity interval and a
/// spatial label for the patch the curvature was sampled on; the label is
/// bookkeeping only and never enters the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    shape: Shape,
    interval: Option<(f64, f64)>,
    position: Vec<f64>,
}

impl CurvatureProfile {
    pub fn constant(base: f64) -> Result<Self> {
        check_finite("base", base)?;
        Ok(Self::from_shape(Shape::Constant { base }))
    }

    pub fn linear_ramp(base: f64, rate: f64) -> Result<Self> {
        check_finite("base", base)?;
        check_finite("rate", rate)?;
        Ok(Self::from_shape(Shape::LinearRamp { base, rate }))
    }

    pub fn sinusoidal(base: f64, amplitude: f64, period: f64) -> Result<Self> {
        check_finite("base", base)?;
        check_finite("amplitude", amplitude)?;
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::domain("period", format!("must be positive, got {period}")));
        }
        Ok(Self::from_shape(Shape::Sinusoidal { base, amplitude, period }))
    }

    pub fn gaussian_pulse(base: f64, amplitude: f64, center: f64, width: f64) -> Result<Self> {
        check_finite("base", base)?;
        check_finite("amplitude", amplitude)?;
        check_finite("center", center)?;
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::domain("width", format!("must be positive, got {width}")));
        }
        Ok(Self::from_shape(Shape::GaussianPulse { base, amplitude, center, width }))
    }

    fn from_shape(shape: Shape) -> Self {
        CurvatureProfile { shape, interval: None, position: vec![0.0] }
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        check_finite("interval start", lo)?;
        check_finite("interval end", hi)?;
        if lo > hi {
            return Err(Error::domain("interval", format!("start {lo} exceeds end {hi}")));
        }
        self.interval = Some((lo, hi));
        Ok(self)
    }

    pub fn with_position(mut self, position: Vec<f64>) -> Result<Self> {
        if let Some(x) = position.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain("position", format!("must be finite, got {x}")));
        }
        self.position = position;
        Ok(self)
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        self.interval
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    fn check_time(&self, t: f64) -> Result<()> {
        check_finite("time", t)?;
        if let Some((lo, hi)) = self.interval {
            if t < lo || t > hi {
                return Err(Error::OutsideInterval { t, lo, hi });
            }
        }
        Ok(())
    }

    /// `R(t)`.
    pub fn curvature_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match &self.shape {
            Shape::Constant { base } => *base,
            Shape::LinearRamp { base, rate } => base + rate * t,
            Shape::Sinusoidal { base, amplitude, period } => {
                // Reduce to one period first so whole-period times land on the
                // starting value exactly.
                let x = (t / period).rem_euclid(1.0);
                base + amplitude * (std::f64::consts::TAU * x).sin()
            }
            Shape::GaussianPulse { base, amplitude, center, width } => {
                let z = (t - center) / width;
                base + amplitude * (-0.5 * z * z).exp()
            }
        })
    }

    /// `dR/dt`, from the closed forms.
    pub fn curvature_rate_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match &self.shape {
            Shape::Constant { .. } => 0.0,
            Shape::LinearRamp { rate, .. } => *rate,
            Shape::Sinusoidal { amplitude, period, .. } => {
                let x = (t / period).rem_euclid(1.0);
                amplitude * std::f64::consts::TAU / period * (std::f64::consts::TAU * x).cos()
            }
            Shape::GaussianPulse { amplitude, center, width, .. } => {
                let z = (t - center) / width;
                -amplitude * z / width * (-0.5 * z * z).exp()
            }
        })
    }
}

/// Inverse temperature and companions.  The temperature is derived, so
/// `beta * k_b * T = 1` holds by construction.  `gamma_scale` is the unit
/// conversion applied when `beta * R` is used as the dimensionless steering
/// parameter; it defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoParams {
    beta: f64,
    k_b: f64,
    gamma_scale: f64,
}

impl ThermoParams {
    pub fn from_beta(beta: f64, k_b: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::domain("beta", format!("must be finite and positive, got {beta}")));
        }
        if !k_b.is_finite() || k_b <= 0.0 {
            return Err(Error::domain("k_b", format!("must be finite and positive, got {k_b}")));
        }
        Ok(ThermoParams { beta, k_b, gamma_scale: 1.0 })
    }

    pub fn from_temperature(temperature: f64, k_b: f64) -> Result<Self> {
        if !temperature.is_finite() || temperature <= 0.0 {
            return Err(Error::domain(
                "temperature",
                format!("must be finite and positive, got {temperature}"),
            ));
        }
        Self::from_beta(1.0 / (k_b * temperature), k_b)
    }

    pub fn with_gamma_scale(mut self, gamma_scale: f64) -> Result<Self> {
        if !gamma_scale.is_finite() || gamma_scale <= 0.0 {
            return Err(Error::domain(
                "gamma_scale",
                format!("must be finite and positive, got {gamma_scale}"),
            ));
        }
        self.gamma_scale = gamma_scale;
        Ok(self)
    }

    /// Same parameters at a different inverse temperature; used by the
    /// finite-difference energy estimate.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let mut shifted = Self::from_beta(beta, self.k_b)?;
        shifted.gamma_scale = self.gamma_scale;
        Ok(shifted)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn temperature(&self) -> f64 {
        1.0 / (self.k_b * self.beta)
    }

    pub fn gamma_scale(&self) -> f64 {
        self.gamma_scale
    }
}

/// Steering parameter `gamma(t) = gamma_scale * beta * R(t)`.
pub fn gamma_at(profile: &CurvatureProfile, thermo: &ThermoParams, t: f64) -> Result<f64> {
    Ok(thermo.gamma_scale() * thermo.beta() * profile.curvature_at(t)?)
}

/// Curvature-indexed initial level: `floor(gamma)` reduced into `0..n` with a
/// Euclidean modulus, so negative `gamma` still lands in range.  Total for
/// every finite `gamma` (the floor is taken in big-integer arithmetic).
pub fn initial_index(gamma: f64, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::domain("state count", "must be at least 1"));
    }
    if !gamma.is_finite() {
        return Err(Error::domain("gamma", format!("must be finite, got {gamma}")));
    }
    let floor = BigInt::from_f64(gamma.floor()).expect("finite float converts");
    let n_big = BigInt::from(n);
    let rem = ((floor % &n_big) + &n_big) % &n_big;
    Ok(rem.to_usize().expect("reduced value fits"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub time: f64,
    pub curvature: f64,
    pub gamma: f64,
    pub curvature_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePath {
    pub points: Vec<PathPoint>,
}

/// Uniformly sampled drive over `[t0, t1]`; the first and last samples hit the
/// endpoints exactly.
pub fn curvature_path(
    profile: &CurvatureProfile,
    thermo: &ThermoParams,
    t0: f64,
    t1: f64,
    samples: usize,
) -> Result<CurvaturePath> {
    if samples < 2 {
        return Err(Error::domain("samples", format!("need at least 2, got {samples}")));
    }
    check_finite("t0", t0)?;
    check_finite("t1", t1)?;
    if t1 < t0 {
        return Err(Error::domain("time range", format!("t1 {t1} before t0 {t0}")));
    }
    let dt = (t1 - t0) / (samples - 1) as f64;
    let mut points = Vec::with_capacity(samples);
    for k in 0..samples {
        let time = if k == samples - 1 { t1 } else { t0 + k as f64 * dt };
        points.push(PathPoint {
            time,
            curvature: profile.curvature_at(time)?,
            gamma: gamma_at(profile, thermo, time)?,
            curvature_rate: profile.curvature_rate_at(time)?,
        });
    }
    Ok(CurvaturePath { points })
}

fn check_finite(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("must be finite, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn profile_values() {
        let c = CurvatureProfile::constant(2.0).unwrap();
        assert_eq!(c.curvature_at(123.0).unwrap(), 2.0);
        assert_eq!(c.curvature_rate_at(123.0).unwrap(), 0.0);

        let ramp = CurvatureProfile::linear_ramp(1.0, 0.5).unwrap();
        assert_eq!(ramp.curvature_at(4.0).unwrap(), 3.0);
        assert_eq!(ramp.curvature_rate_at(4.0).unwrap(), 0.5);

        let pulse = CurvatureProfile::gaussian_pulse(0.0, 2.0, 5.0, 1.0).unwrap();
        assert_eq!(pulse.curvature_at(5.0).unwrap(), 2.0);
        assert!(pulse.curvature_at(50.0).unwrap() < 1e-100);
    }

    #[test]
    fn sinusoid_closes_exactly_after_one_period() {
        let s = CurvatureProfile::sinusoidal(1.0, 0.3, 7.5).unwrap();
        assert_eq!(s.curvature_at(0.0).unwrap(), 1.0);
        assert_eq!(s.curvature_at(7.5).unwrap(), s.curvature_at(0.0).unwrap());
        assert_eq!(s.curvature_at(75.0).unwrap(), 1.0);
        // Quarter period sits on the crest.
        assert!((s.curvature_at(7.5 / 4.0).unwrap() - 1.3).abs() < 1e-12);
    }

    #[test]
    fn interval_is_enforced() {
        let p = CurvatureProfile::linear_ramp(0.0, 1.0).unwrap().with_interval(0.0, 10.0).unwrap();
        assert!(p.curvature_at(5.0).is_ok());
        let err = p.curvature_at(10.5).unwrap_err();
        assert_eq!(err.code(), "E_INTERVAL");
    }

    #[test]
    fn thermo_identity_holds() {
        let tp = ThermoParams::from_beta(2.0, 1.0).unwrap();
        assert!((tp.beta() * tp.k_b() * tp.temperature() - 1.0).abs() < 1e-12);
        let tp = ThermoParams::from_temperature(0.25, 2.0).unwrap();
        assert!((tp.beta() - 2.0).abs() < 1e-12);
        assert!((tp.beta() * tp.k_b() * tp.temperature() - 1.0).abs() < 1e-12);
        assert!(ThermoParams::from_beta(-1.0, 1.0).is_err());
        assert!(ThermoParams::from_beta(0.0, 1.0).is_err());
        assert!(ThermoParams::from_beta(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn gamma_values() {
        let tp = ThermoParams::from_beta(2.0, 1.0).unwrap();
        let ramp = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        assert_eq!(gamma_at(&ramp, &tp, 2.0).unwrap(), 6.0);
        let tp = ThermoParams::from_beta(0.5, 1.0).unwrap();
        let c = CurvatureProfile::constant(3.0).unwrap();
        assert_eq!(gamma_at(&c, &tp, 0.0).unwrap(), 1.5);
        let scaled = tp.with_gamma_scale(2.0).unwrap();
        assert_eq!(gamma_at(&c, &scaled, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn initial_index_examples() {
        assert_eq!(initial_index(0.0, 5).unwrap(), 0);
        assert_eq!(initial_index(7.9, 5).unwrap(), 2);
        assert_eq!(initial_index(-1.2, 5).unwrap(), 3);
        assert_eq!(initial_index(4.9999999, 5).unwrap(), 4);
    }

    #[test]
    fn initial_index_is_total_on_finite_input() {
        // Magnitudes far beyond integer range still reduce.
        assert!(initial_index(1e300, 7).unwrap() < 7);
        assert!(initial_index(-1e300, 7).unwrap() < 7);
        assert_eq!(initial_index(-0.0, 5).unwrap(), 0);
        assert_eq!(initial_index(f64::MAX, 3).unwrap(), initial_index(f64::MAX, 3).unwrap());
        assert!(initial_index(f64::NAN, 5).is_err());
        assert!(initial_index(f64::INFINITY, 5).is_err());
        assert!(initial_index(1.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn index_always_in_range(gamma in -1e12f64..1e12, n in 1usize..1000) {
            prop_assert!(initial_index(gamma, n).unwrap() < n);
        }

        #[test]
        fn index_is_periodic_in_n(gamma in -1e6f64..1e6, n in 1usize..100) {
            // Shifting gamma by n shifts the floor by n; stay away from
            // integer boundaries so the float addition cannot cross one.
            prop_assume!((gamma - gamma.round()).abs() > 1e-6);
            let a = initial_index(gamma, n).unwrap();
            let b = initial_index(gamma + n as f64, n).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn path_grid_hits_endpoints_exactly() {
        let tp = ThermoParams::from_beta(1.0, 1.0).unwrap();
        let ramp = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        let path = curvature_path(&ramp, &tp, 0.0, 2.0, 5).unwrap();
        let r: Vec<f64> = path.points.iter().map(|p| p.curvature).collect();
        assert_eq!(r, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(path.points[0].curvature, ramp.curvature_at(0.0).unwrap());
        assert_eq!(path.points[4].curvature, ramp.curvature_at(2.0).unwrap());
        assert!(path.points.iter().all(|p| p.curvature_rate == 1.0));

        let s = CurvatureProfile::sinusoidal(1.0, 0.3, 2.0).unwrap();
        let loop_path = curvature_path(&s, &tp, 0.0, 2.0, 11).unwrap();
        assert_eq!(loop_path.points[0].curvature, loop_path.points[10].curvature);
    }

    #[test]
    fn path_rejects_bad_grids() {
        let tp = ThermoParams::from_beta(1.0, 1.0).unwrap();
        let c = CurvatureProfile::constant(1.0).unwrap();
        assert!(curvature_path(&c, &tp, 0.0, 1.0, 1).is_err());
        assert!(curvature_path(&c, &tp, 1.0, 0.0, 5).is_err());
    }
}
