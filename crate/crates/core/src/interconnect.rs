//! The interconnection map between stable-equilibrium energies of two
//! systems, its derivative, and thermodynamic temperature relative to a
//! reference state.
//!
//! `f11(b, c, E_B)` returns the energy E_C at which system C's entropy
//! increment from its anchor equals system B's increment from its anchor.
//! Its derivative is the inverse-temperature ratio β_B(E_B)/β_C(E_C), and
//! temperature is T_ref · β_ref / β(point).

use thiserror::Error;

use crate::numerics::{self, NumericsError};
use crate::spectra::{builtin, Builtin, EnergySpectrum};
use crate::thermo::{self, ThermoError};

/// Temperature assigned to the triple-point reference preset, in kelvin.
pub const TRIPLE_POINT_KELVIN: f64 = 273.16;

#[derive(Debug, Error)]
pub enum InterconnectError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("entropy increment {delta_s} outside the attainable interval ({low}, {high}) of the target system")]
    DeltaSOutOfRange { delta_s: f64, low: f64, high: f64 },
    #[error("reference temperature must be positive, got {0}")]
    NonPositiveReferenceTemperature(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A stable-equilibrium point: spectrum plus an admissible energy.
#[derive(Debug, Clone)]
pub struct SePoint {
    spectrum: EnergySpectrum,
    energy: f64,
}

impl SePoint {
    pub fn new(spectrum: EnergySpectrum, energy: f64) -> Result<Self, ThermoError> {
        thermo::check_admissible(&spectrum, energy)?;
        Ok(Self { spectrum, energy })
    }

    /// The point at the canonical energy of `beta`.
    pub fn at_beta(spectrum: EnergySpectrum, beta: f64) -> Result<Self, ThermoError> {
        let energy = thermo::mean_energy(&spectrum, beta)?;
        Ok(Self { spectrum, energy })
    }

    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn beta(&self) -> Result<f64, ThermoError> {
        thermo::beta_from_energy(&self.spectrum, self.energy)
    }

    /// Same spectrum, different anchor energy.
    pub fn with_energy(&self, energy: f64) -> Result<Self, ThermoError> {
        Self::new(self.spectrum.clone(), energy)
    }
}

/// Reference system, reference energy, and the arbitrarily assigned
/// temperature of that reference state.
#[derive(Debug, Clone)]
pub struct TemperatureScale {
    reference: SePoint,
    t_ref: f64,
}

impl TemperatureScale {
    pub fn new(reference: SePoint, t_ref: f64) -> Result<Self, InterconnectError> {
        if !(t_ref > 0.0) || !t_ref.is_finite() {
            return Err(InterconnectError::NonPositiveReferenceTemperature(t_ref));
        }
        Ok(Self { reference, t_ref })
    }

    /// Kelvin-flavored preset: a synthetic reference spectrum held at
    /// β = 1 with assigned temperature 273.16.
    pub fn triple_point() -> Self {
        let spectrum = builtin(Builtin::Harmonic {
            omega: 1.0,
            n_levels: 32,
        })
        .expect("builtin parameters are valid");
        let reference = SePoint::at_beta(spectrum, 1.0).expect("beta = 1 is admissible");
        Self {
            reference,
            t_ref: TRIPLE_POINT_KELVIN,
        }
    }

    pub fn reference(&self) -> &SePoint {
        &self.reference
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    /// Inverse temperature of the reference state.
    pub fn beta_ref(&self) -> Result<f64, ThermoError> {
        self.reference.beta()
    }
}

/// How a derivative of the interconnection map is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMethod {
    /// β_B(E_B) / β_C(E_C), exact for canonical models.
    Analytic,
    /// Richardson-extrapolated central difference; `None` picks
    /// h = 1e−4 × (admissible window width), clipped to the boundaries.
    FiniteDifference { step: Option<f64> },
}

/// E_C such that the C-entropy increment from `c`'s anchor equals the
/// B-entropy increment of `e_b` from `b`'s anchor. Strictly increasing
/// in `e_b`; ΔS is matched to ≤ 1e−12.
pub fn f11(b: &SePoint, c: &SePoint, e_b: f64) -> Result<f64, InterconnectError> {
    thermo::check_admissible(b.spectrum(), e_b)?;
    let delta_s = thermo::entropy_from_energy(b.spectrum(), e_b)?
        - thermo::entropy_from_energy(b.spectrum(), b.energy)?;
    let s_anchor_c = thermo::entropy_from_energy(c.spectrum(), c.energy)?;
    let target = s_anchor_c + delta_s;
    let beta_c = thermo::beta_from_entropy(c.spectrum(), target).map_err(|e| match e {
        ThermoError::EntropyOutOfRange { low, high, .. } => InterconnectError::DeltaSOutOfRange {
            delta_s,
            low: low - s_anchor_c,
            high: high - s_anchor_c,
        },
        other => InterconnectError::Thermo(other),
    })?;
    Ok(thermo::mean_energy(c.spectrum(), beta_c)?)
}

fn default_fd_step(b: &SePoint, e_b: f64) -> Result<f64, InterconnectError> {
    let lo = b.spectrum().min_energy();
    let hi = b.spectrum().infinite_temperature_energy();
    let h = 1e-4 * (hi - lo);
    // both E_B ± h must stay strictly admissible
    let h = h.min(0.5 * (e_b - lo)).min(0.5 * (hi - e_b));
    if !(h > 0.0) || e_b + h == e_b {
        return Err(NumericsError::StepUnderflow { h }.into());
    }
    Ok(h)
}

/// Derivative of `f11` at `e_b`.
pub fn df11(
    b: &SePoint,
    c: &SePoint,
    e_b: f64,
    method: DerivativeMethod,
) -> Result<f64, InterconnectError> {
    match method {
        DerivativeMethod::Analytic => {
            let e_c = f11(b, c, e_b)?;
            let beta_b = thermo::beta_from_energy(b.spectrum(), e_b)?;
            let beta_c = thermo::beta_from_energy(c.spectrum(), e_c)?;
            Ok(beta_b / beta_c)
        }
        DerivativeMethod::FiniteDifference { step } => {
            let h = match step {
                Some(h) if h > 0.0 => h,
                Some(h) => return Err(NumericsError::StepUnderflow { h }.into()),
                None => default_fd_step(b, e_b)?,
            };
            thermo::check_admissible(b.spectrum(), e_b - h)?;
            thermo::check_admissible(b.spectrum(), e_b + h)?;
            let f = |x: f64| f11(b, c, x).expect("grid stays inside the admissible window");
            Ok(numerics::richardson_central(&f, e_b, h)?)
        }
    }
}

/// Temperature of `point` on `scale`: T_ref · β_ref / β(point).
pub fn temperature(
    point: &SePoint,
    scale: &TemperatureScale,
    method: DerivativeMethod,
) -> Result<f64, InterconnectError> {
    // Anchor the reference-to-point interconnection so the reference maps
    // to the point itself; the derivative at the reference energy is then
    // exactly the temperature ratio T_point / T_ref.
    let ratio = df11(scale.reference(), point, scale.reference().energy(), method)?;
    Ok(scale.t_ref() * ratio)
}

/// T^C / T^B measured directly as the derivative of f11 at `b`'s anchor,
/// with no reference scale involved.
pub fn temperature_ratio(
    b: &SePoint,
    c: &SePoint,
    method: DerivativeMethod,
) -> Result<f64, InterconnectError> {
    df11(b, c, b.energy(), method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{builtin, Builtin};
    use crate::thermo::{entropy_from_energy, mean_energy};
    use approx::assert_relative_eq;

    fn tl_point(beta: f64) -> SePoint {
        SePoint::at_beta(builtin(Builtin::TwoLevel { gap: 1.0 }).unwrap(), beta).unwrap()
    }

    fn harmonic_point(beta: f64) -> SePoint {
        SePoint::at_beta(
            builtin(Builtin::Harmonic { omega: 1.0, n_levels: 64 }).unwrap(),
            beta,
        )
        .unwrap()
    }

    // Independent oracle: invert the C-entropy match by plain bisection on
    // entropy_from_energy, no Newton machinery involved.
    fn f11_bisection_oracle(b: &SePoint, c: &SePoint, e_b: f64) -> f64 {
        let delta_s = entropy_from_energy(b.spectrum(), e_b).unwrap()
            - entropy_from_energy(b.spectrum(), b.energy()).unwrap();
        let target = entropy_from_energy(c.spectrum(), c.energy()).unwrap() + delta_s;
        let mut lo = c.spectrum().min_energy();
        let mut hi = c.spectrum().infinite_temperature_energy();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if entropy_from_energy(c.spectrum(), mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn f11_identity_when_anchors_coincide() {
        let b = tl_point(1.0);
        for &beta in &[0.3, 0.7, 1.0, 2.0, 8.0] {
            let e = mean_energy(b.spectrum(), beta).unwrap();
            assert_relative_eq!(f11(&b, &b, e).unwrap(), e, max_relative = 1e-10);
        }
    }

    #[test]
    fn f11_two_level_to_harmonic_matches_bisection_oracle() {
        let b = tl_point(1.0);
        let c = harmonic_point(1.0);
        let e_b = mean_energy(b.spectrum(), 0.5).unwrap();
        let e_c = f11(&b, &c, e_b).unwrap();
        let oracle = f11_bisection_oracle(&b, &c, e_b);
        assert_relative_eq!(e_c, oracle, max_relative = 1e-9);
        // the matched increment is the two-level ΔS between β=1 and β=0.5
        let delta_s_c = entropy_from_energy(c.spectrum(), e_c).unwrap()
            - entropy_from_energy(c.spectrum(), c.energy()).unwrap();
        assert_relative_eq!(delta_s_c, 0.080645, epsilon = 1e-6);
    }

    #[test]
    fn f11_shift_invariance_between_anchor_pairs() {
        let b1 = tl_point(1.0);
        let c1 = harmonic_point(1.0);
        // move both anchors along the same interconnection curve
        let e_b2 = mean_energy(b1.spectrum(), 0.6).unwrap();
        let e_c2 = f11(&b1, &c1, e_b2).unwrap();
        let b2 = b1.with_energy(e_b2).unwrap();
        let c2 = c1.with_energy(e_c2).unwrap();
        let lo = 0.05;
        let hi = 0.45;
        for i in 0..20 {
            let e = lo + (hi - lo) * i as f64 / 19.0;
            let via1 = f11(&b1, &c1, e).unwrap();
            let via2 = f11(&b2, &c2, e).unwrap();
            assert!((via1 - via2).abs() <= 1e-10, "anchor pairs disagree at {e}: {via1} vs {via2}");
        }
    }

    #[test]
    fn f11_range_error_reports_attainable_interval() {
        // tiny target system cannot absorb a large entropy increment
        let b = harmonic_point(0.05);
        let c = tl_point(1.0);
        let e_b = mean_energy(b.spectrum(), 0.01).unwrap();
        match f11(&b, &c, e_b) {
            Err(InterconnectError::DeltaSOutOfRange { low, high, .. }) => {
                assert!(low < high);
            }
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn df11_identity_point_is_one() {
        let b = tl_point(1.0);
        let d = df11(&b, &b, b.energy(), DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn df11_beta_ratio_at_anchor() {
        let b = tl_point(1.0);
        let c = harmonic_point(2.0);
        let analytic = df11(&b, &c, b.energy(), DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(analytic, 0.5, max_relative = 1e-9);
        let fd = df11(&b, &c, b.energy(), DerivativeMethod::FiniteDifference { step: None }).unwrap();
        assert_relative_eq!(analytic, fd, max_relative = 1e-6);
    }

    #[test]
    fn df11_inverse_derivative_relation() {
        let b = tl_point(0.8);
        let c = harmonic_point(1.5);
        let e_b = mean_energy(b.spectrum(), 1.2).unwrap();
        let forward = df11(&b, &c, e_b, DerivativeMethod::Analytic).unwrap();
        let e_c = f11(&b, &c, e_b).unwrap();
        let backward = df11(&c, &b, e_c, DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(forward * backward, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn temperature_of_reference_is_t_ref() {
        let scale = TemperatureScale::new(tl_point(1.0), 1.0).unwrap();
        let t = temperature(scale.reference(), &scale, DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(t, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn temperature_beta_ratio_example() {
        let scale = TemperatureScale::new(tl_point(1.0), 1.0).unwrap();
        let point = tl_point(2.0);
        let t = temperature(&point, &scale, DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(t, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn triple_point_preset_constant() {
        let scale = TemperatureScale::triple_point();
        assert_eq!(scale.t_ref(), 273.16);
        let t = temperature(scale.reference(), &scale, DerivativeMethod::Analytic).unwrap();
        assert_relative_eq!(t, 273.16, max_relative = 1e-10);
    }

    #[test]
    fn temperature_ratio_is_scale_free() {
        let b = tl_point(0.7);
        let c = harmonic_point(1.9);
        let direct = temperature_ratio(&b, &c, DerivativeMethod::Analytic).unwrap();
        let scale1 = TemperatureScale::new(tl_point(1.0), 1.0).unwrap();
        let scale2 = TemperatureScale::triple_point();
        for scale in [&scale1, &scale2] {
            let tb = temperature(&b, scale, DerivativeMethod::Analytic).unwrap();
            let tc = temperature(&c, scale, DerivativeMethod::Analytic).unwrap();
            assert_relative_eq!(tc / tb, direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn composition_through_intermediate_system() {
        let b = tl_point(0.9);
        let c = harmonic_point(1.4);
        let r = SePoint::at_beta(
            builtin(Builtin::Random { seed: 7, n_levels: 16, range: (0.0, 5.0) }).unwrap(),
            1.0,
        )
        .unwrap();
        for i in 0..10 {
            let e_b = mean_energy(b.spectrum(), 0.6 + 0.1 * i as f64).unwrap();
            let direct = f11(&b, &c, e_b).unwrap();
            let via_r = f11(&r, &c, f11(&b, &r, e_b).unwrap()).unwrap();
            assert!((direct - via_r).abs() <= 1e-10);
        }
    }

    #[test]
    fn fd_step_validation() {
        let b = tl_point(1.0);
        let c = harmonic_point(1.0);
        assert!(matches!(
            df11(&b, &c, b.energy(), DerivativeMethod::FiniteDifference { step: Some(0.0) }),
            Err(InterconnectError::Numerics(NumericsError::StepUnderflow { .. }))
        ));
    }
}
