//! The operational entropy route: quadrature of 1/T along reversible
//! standard processes, absolute entropy against a reference state, and
//! bracketing bounds from irreversible protocols.
//!
//! Measured entropies are reported in units of k. The scale's implied
//! Boltzmann constant 1/(β_ref·T_ref) converts the raw −∫dE/T integral
//! into k-units, which is what makes the result independent of the
//! chosen reference scale. The measurement always runs the analytic
//! route alongside; disagreement beyond tolerance is an error, never
//! silently resolved.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::interconnect::{SePoint, TemperatureScale};
use crate::numerics::{self, NumericsError};
use crate::processes::{self, simulate_standard_process, vn_entropy, ModelState, ProcessError};
use crate::spectra::EnergySpectrum;
use crate::thermo::{self, ThermoError};

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("operational ΔS = {operational} disagrees with analytic ΔS = {analytic} beyond tolerance {tol}")]
    RouteDisagreement {
        operational: f64,
        analytic: f64,
        tol: f64,
    },
    #[error("cannot sample a distribution with mean energy {energy}: outside ({low}, {high})")]
    UnattainableSampleEnergy { energy: f64, low: f64, high: f64 },
}

/// Quadrature and cross-check tolerances for entropy measurements.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute tolerance of the adaptive Simpson integral, in units k.
    pub abs_tol: f64,
    /// Subdivision cap.
    pub max_subdivisions: usize,
    /// Allowed |operational − analytic| disagreement, in units k.
    pub cross_check_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 100_000,
            cross_check_tol: 1e-8,
        }
    }
}

/// One operational entropy-difference measurement.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyMeasurement {
    /// ΔS = S(a2) − S(a1) in units k, from the quadrature route.
    pub delta_s: f64,
    pub e_b_initial: f64,
    pub e_b_final_rev: f64,
    pub quadrature_error_estimate: f64,
}

/// −∫_{e_from}^{e_to} dE / T^B(E) on `scale`, converted to units of k.
fn neg_integral_inverse_temperature(
    b_spectrum: &EnergySpectrum,
    e_from: f64,
    e_to: f64,
    scale: &TemperatureScale,
    quad: &QuadratureConfig,
) -> Result<(f64, f64), EntropyError> {
    let beta_ref = scale.beta_ref()?;
    let t_ref = scale.t_ref();
    // T(E) = T_ref · β_ref / β(E); implied k = 1/(β_ref·T_ref)
    let inv_temperature = |e: f64| {
        let beta = thermo::beta_from_energy(b_spectrum, e)
            .expect("integration path stays inside the admissible window");
        beta / (t_ref * beta_ref)
    };
    let k_scale = 1.0 / (beta_ref * t_ref);
    let (integral, estimate) = numerics::adaptive_simpson(
        &inv_temperature,
        e_from,
        e_to,
        quad.abs_tol * k_scale,
        quad.max_subdivisions,
    )?;
    Ok((-integral / k_scale, estimate / k_scale))
}

/// Measure S(a2) − S(a1) through a reversible standard process with
/// auxiliary system `b`, integrating 1/T over the auxiliary's energy
/// change. Fails if the quadrature route and the analytic route disagree
/// beyond the configured tolerance.
pub fn entropy_difference(
    a1: &ModelState,
    a2: &ModelState,
    b: &SePoint,
    scale: &TemperatureScale,
    quad: &QuadratureConfig,
) -> Result<EntropyMeasurement, EntropyError> {
    let outcome = simulate_standard_process(a1, a2, b, 0.0)?;
    let (delta_s, quadrature_error_estimate) = neg_integral_inverse_temperature(
        b.spectrum(),
        outcome.e_b_initial,
        outcome.e_b_final,
        scale,
        quad,
    )?;
    let analytic = vn_entropy(a2) - vn_entropy(a1);
    if (delta_s - analytic).abs() > quad.cross_check_tol {
        return Err(EntropyError::RouteDisagreement {
            operational: delta_s,
            analytic,
            tol: quad.cross_check_tol,
        });
    }
    Ok(EntropyMeasurement {
        delta_s,
        e_b_initial: outcome.e_b_initial,
        e_b_final_rev: outcome.e_b_final,
        quadrature_error_estimate,
    })
}

/// Absolute entropy of `a1` given a reference state `a0` with assigned
/// entropy `s0`.
pub fn entropy_value(
    a1: &ModelState,
    a0: &ModelState,
    s0: f64,
    b: &SePoint,
    scale: &TemperatureScale,
    quad: &QuadratureConfig,
) -> Result<f64, EntropyError> {
    Ok(s0 + entropy_difference(a0, a1, b, scale, quad)?.delta_s)
}

/// Two-sided bracket on an entropy difference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
}

/// Bracket S(a2) − S(a1) between two irreversible protocols: a forward
/// one producing `sigma_f` and a backward one producing `sigma_b`.
/// Both sides collapse onto ΔS exactly when both sigmas vanish.
pub fn irreversible_bound(
    a1: &ModelState,
    a2: &ModelState,
    b_forward: &SePoint,
    sigma_f: f64,
    b_backward: &SePoint,
    sigma_b: f64,
    scale: &TemperatureScale,
    quad: &QuadratureConfig,
) -> Result<EntropyBracket, EntropyError> {
    let forward = simulate_standard_process(a1, a2, b_forward, sigma_f)?;
    let (lower, _) = neg_integral_inverse_temperature(
        b_forward.spectrum(),
        forward.e_b_initial,
        forward.e_b_final,
        scale,
        quad,
    )?;
    let backward = simulate_standard_process(a2, a1, b_backward, sigma_b)?;
    let (neg_upper, _) = neg_integral_inverse_temperature(
        b_backward.spectrum(),
        backward.e_b_initial,
        backward.e_b_final,
        scale,
        quad,
    )?;
    Ok(EntropyBracket {
        lower,
        upper: -neg_upper,
    })
}

/// Sample a random distribution on `spectrum`'s microstates with mean
/// energy exactly `energy`.
///
/// Oracle used by the maximum-entropy checks: draw two uniform-weight
/// random distributions and mix the pair by solving the 1-D mixing
/// equation; when the pair does not straddle the target, mix with the
/// pure extreme microstate on the needed side instead.
pub fn sample_same_energy_state<R: Rng>(
    spectrum: &EnergySpectrum,
    energy: f64,
    rng: &mut R,
) -> Result<ModelState, EntropyError> {
    let energies = processes::expanded_energies(spectrum);
    let low = energies[0];
    let high = energies[energies.len() - 1];
    if !(energy > low) || !(energy < high) {
        return Err(EntropyError::UnattainableSampleEnergy { energy, low, high });
    }
    let dist = Uniform::new(0.0f64, 1.0);
    let draw = |rng: &mut R| {
        let mut w: Vec<f64> = (0..energies.len()).map(|_| dist.sample(rng)).collect();
        let sum: f64 = w.iter().sum();
        for x in &mut w {
            *x /= sum;
        }
        w
    };
    let mean = |p: &[f64]| p.iter().zip(&energies).map(|(pi, ei)| pi * ei).sum::<f64>();

    let p = draw(rng);
    let e_p = mean(&p);
    let mut partner: Option<Vec<f64>> = None;
    for _ in 0..32 {
        let q = draw(rng);
        if (mean(&q) - energy).signum() != (e_p - energy).signum() {
            partner = Some(q);
            break;
        }
    }
    let q = partner.unwrap_or_else(|| {
        // pure extreme state on the opposite side of the target
        let mut q = vec![0.0; energies.len()];
        if e_p > energy {
            q[0] = 1.0;
        } else {
            *q.last_mut().unwrap() = 1.0;
        }
        q
    });
    let e_q = mean(&q);
    // λ e_p + (1−λ) e_q = energy
    let lambda = (energy - e_q) / (e_p - e_q);
    let probs: Vec<f64> = p
        .iter()
        .zip(&q)
        .map(|(pi, qi)| lambda * pi + (1.0 - lambda) * qi)
        .collect();
    Ok(ModelState::new(spectrum.clone(), probs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interconnect::TemperatureScale;
    use crate::spectra::{builtin, Builtin};
    use crate::thermo::mean_energy;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tl() -> EnergySpectrum {
        builtin(Builtin::TwoLevel { gap: 1.0 }).unwrap()
    }

    fn harmonic_aux() -> SePoint {
        SePoint::at_beta(
            builtin(Builtin::Harmonic { omega: 1.0, n_levels: 64 }).unwrap(),
            1.0,
        )
        .unwrap()
    }

    fn unit_scale() -> TemperatureScale {
        let reference = SePoint::at_beta(tl(), 1.0).unwrap();
        TemperatureScale::new(reference, 1.0).unwrap()
    }

    #[test]
    fn null_measurement_is_zero() {
        let a = ModelState::canonical(tl(), 1.0).unwrap();
        let m = entropy_difference(&a, &a, &harmonic_aux(), &unit_scale(), &QuadratureConfig::default())
            .unwrap();
        assert_eq!(m.delta_s, 0.0);
        assert_eq!(m.e_b_initial, m.e_b_final_rev);
    }

    #[test]
    fn two_level_relaxation_measurement() {
        let a1 = ModelState::canonical(tl(), 1.0).unwrap();
        let a2 = ModelState::canonical(tl(), 0.5).unwrap();
        let m = entropy_difference(&a1, &a2, &harmonic_aux(), &unit_scale(), &QuadratureConfig::default())
            .unwrap();
        assert_relative_eq!(m.delta_s, 0.080645, epsilon = 1e-6);
        assert!((m.delta_s - (vn_entropy(&a2) - vn_entropy(&a1))).abs() < 1e-8);
    }

    #[test]
    fn auxiliary_independence() {
        let a1 = ModelState::canonical(tl(), 1.0).unwrap();
        let a2 = ModelState::canonical(tl(), 0.5).unwrap();
        let aux1 = harmonic_aux();
        let aux2 = SePoint::at_beta(
            builtin(Builtin::Random { seed: 7, n_levels: 16, range: (0.0, 5.0) }).unwrap(),
            0.4,
        )
        .unwrap();
        let quad = QuadratureConfig::default();
        let scale = unit_scale();
        let m1 = entropy_difference(&a1, &a2, &aux1, &scale, &quad).unwrap();
        let m2 = entropy_difference(&a1, &a2, &aux2, &scale, &quad).unwrap();
        assert!((m1.delta_s - m2.delta_s).abs() <= 1e-8);
    }

    #[test]
    fn scale_independence() {
        let a1 = ModelState::canonical(tl(), 0.9).unwrap();
        let a2 = ModelState::canonical(tl(), 0.3).unwrap();
        let quad = QuadratureConfig::default();
        let aux = harmonic_aux();
        let m1 = entropy_difference(&a1, &a2, &aux, &unit_scale(), &quad).unwrap();
        let m2 =
            entropy_difference(&a1, &a2, &aux, &TemperatureScale::triple_point(), &quad).unwrap();
        assert!((m1.delta_s - m2.delta_s).abs() <= 1e-8);
    }

    #[test]
    fn entropy_value_identity_and_chain() {
        let a0 = ModelState::canonical(tl(), 1.0).unwrap();
        let a1 = ModelState::canonical(tl(), 0.7).unwrap();
        let a2 = ModelState::canonical(tl(), 0.4).unwrap();
        let aux = harmonic_aux();
        let scale = unit_scale();
        let quad = QuadratureConfig::default();
        assert_eq!(entropy_value(&a0, &a0, 3.25, &aux, &scale, &quad).unwrap(), 3.25);
        // chain consistency through the intermediate state
        let direct = entropy_value(&a2, &a0, 0.0, &aux, &scale, &quad).unwrap();
        let s1 = entropy_value(&a1, &a0, 0.0, &aux, &scale, &quad).unwrap();
        let chained = entropy_value(&a2, &a1, s1, &aux, &scale, &quad).unwrap();
        assert!((direct - chained).abs() <= 2e-8);
    }

    #[test]
    fn entropy_value_with_vn_reference_matches_vn() {
        let a0 = ModelState::canonical(tl(), 1.0).unwrap();
        let a1 = ModelState::canonical(tl(), 0.5).unwrap();
        let s = entropy_value(
            &a1,
            &a0,
            vn_entropy(&a0),
            &harmonic_aux(),
            &unit_scale(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((s - vn_entropy(&a1)).abs() <= 1e-8);
    }

    #[test]
    fn reversible_bracket_collapses() {
        let a1 = ModelState::canonical(tl(), 1.0).unwrap();
        let a2 = ModelState::canonical(tl(), 0.5).unwrap();
        let aux = harmonic_aux();
        let b = irreversible_bound(&a1, &a2, &aux, 0.0, &aux, 0.0, &unit_scale(), &QuadratureConfig::default())
            .unwrap();
        assert!((b.lower - b.upper).abs() <= 1e-8);
        assert_relative_eq!(b.lower, 0.080645, epsilon = 1e-6);
    }

    #[test]
    fn symmetric_bracket_widths() {
        let a1 = ModelState::canonical(tl(), 1.0).unwrap();
        let a2 = ModelState::canonical(tl(), 0.5).unwrap();
        let aux = harmonic_aux();
        let b = irreversible_bound(&a1, &a2, &aux, 0.01, &aux, 0.01, &unit_scale(), &QuadratureConfig::default())
            .unwrap();
        assert_relative_eq!(b.lower, 0.070645, epsilon = 1e-6);
        assert_relative_eq!(b.upper, 0.090645, epsilon = 1e-6);
    }

    #[test]
    fn asymmetric_bracket_widths() {
        let a1 = ModelState::canonical(tl(), 1.0).unwrap();
        let a2 = ModelState::canonical(tl(), 0.5).unwrap();
        let aux = harmonic_aux();
        let delta_s = vn_entropy(&a2) - vn_entropy(&a1);
        let b = irreversible_bound(&a1, &a2, &aux, 0.02, &aux, 0.005, &unit_scale(), &QuadratureConfig::default())
            .unwrap();
        assert!((delta_s - b.lower - 0.02).abs() <= 1e-8);
        assert!((b.upper - delta_s - 0.005).abs() <= 1e-8);
        assert!(b.lower < delta_s && delta_s < b.upper);
    }

    #[test]
    fn same_energy_sampler_hits_target_exactly() {
        let s = builtin(Builtin::Random { seed: 5, n_levels: 8, range: (0.0, 6.0) }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &beta in &[0.2, 1.0, 5.0] {
            let target = mean_energy(&s, beta).unwrap();
            let state = sample_same_energy_state(&s, target, &mut rng).unwrap();
            assert!((state.energy() - target).abs() <= 1e-10 * target.abs().max(1.0));
        }
    }

    #[test]
    fn same_energy_sampler_rejects_out_of_range() {
        let s = tl();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_same_energy_state(&s, 1.5, &mut rng),
            Err(EntropyError::UnattainableSampleEnergy { .. })
        ));
    }

    #[test]
    fn canonical_beats_sampled_distributions() {
        let s = builtin(Builtin::Random { seed: 12, n_levels: 6, range: (0.0, 5.0) }).unwrap();
        let beta = 0.8;
        let target = mean_energy(&s, beta).unwrap();
        let canonical = ModelState::canonical(s.clone(), beta).unwrap();
        let s_max = vn_entropy(&canonical);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let sample = sample_same_energy_state(&s, target, &mut rng).unwrap();
            assert!(vn_entropy(&sample) < s_max);
        }
    }
}
