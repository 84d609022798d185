//! Canonical stable-equilibrium thermodynamics of a spectrum: partition
//! function, mean energy, entropy, heat capacity, and the inversions β(E)
//! and β(S).
//!
//! All entropies are in units of k; β is in units 1/(k·energy). The
//! admissible energy window of a finite spectrum is the open interval
//! between the ground energy and the degeneracy-weighted mean energy
//! (the β → 0⁺ limit), matching the restriction to β > 0.

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{self, NumericsError};
use crate::spectra::EnergySpectrum;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("energy {energy} is at or below the ground energy {min} (β → ∞ boundary)")]
    EnergyBelowMin { energy: f64, min: f64 },
    #[error("energy {energy} is at or above the infinite-temperature energy {max} (β = 0 boundary)")]
    EnergyAboveMax { energy: f64, max: f64 },
    #[error("entropy {entropy} outside the attainable open interval ({low}, {high})")]
    EntropyOutOfRange { entropy: f64, low: f64, high: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Stable-equilibrium state: a spectrum together with an inverse
/// temperature β > 0.
#[derive(Debug, Clone)]
pub struct CanonicalState {
    spectrum: EnergySpectrum,
    beta: f64,
}

impl CanonicalState {
    pub fn new(spectrum: EnergySpectrum, beta: f64) -> Result<Self, ThermoError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ThermoError::NonPositiveBeta(beta));
        }
        Ok(Self { spectrum, beta })
    }

    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn energy(&self) -> f64 {
        mean_energy(&self.spectrum, self.beta).expect("beta validated at construction")
    }

    /// Canonical probabilities over degeneracy-expanded microstates,
    /// ascending in energy.
    pub fn microstate_probabilities(&self) -> Vec<f64> {
        let e0 = self.spectrum.min_energy();
        let mut probs = Vec::with_capacity(self.spectrum.microstate_count() as usize);
        let mut z = 0.0;
        for level in self.spectrum.levels() {
            let w = (-self.beta * (level.energy - e0)).exp();
            z += level.degeneracy as f64 * w;
            for _ in 0..level.degeneracy {
                probs.push(w);
            }
        }
        for p in &mut probs {
            *p /= z;
        }
        probs
    }
}

/// lnZ, mean energy, entropy and heat capacity at one β.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThermoPoint {
    pub ln_z: f64,
    pub energy: f64,
    pub entropy: f64,
    pub heat_capacity: f64,
}

fn check_beta(beta: f64) -> Result<(), ThermoError> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(ThermoError::NonPositiveBeta(beta));
    }
    Ok(())
}

/// log Σ_j g_j exp(−β ε_j), max-shift stabilized.
pub fn ln_partition(spectrum: &EnergySpectrum, beta: f64) -> Result<f64, ThermoError> {
    check_beta(beta)?;
    let terms: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|l| (l.degeneracy as f64).ln() - beta * l.energy)
        .collect();
    Ok(numerics::log_sum_exp(&terms))
}

/// Boltzmann weights relative to the ground level and their normalizer.
fn shifted_weights(spectrum: &EnergySpectrum, beta: f64) -> (Vec<f64>, f64) {
    let e0 = spectrum.min_energy();
    let weights: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|l| l.degeneracy as f64 * (-beta * (l.energy - e0)).exp())
        .collect();
    let z = weights.iter().sum();
    (weights, z)
}

/// Canonical mean energy E(β) = Σ g ε e^{−βε} / Z; strictly decreasing in β.
pub fn mean_energy(spectrum: &EnergySpectrum, beta: f64) -> Result<f64, ThermoError> {
    check_beta(beta)?;
    let (weights, z) = shifted_weights(spectrum, beta);
    let e = spectrum
        .levels()
        .iter()
        .zip(&weights)
        .map(|(l, w)| l.energy * w)
        .sum::<f64>()
        / z;
    Ok(e)
}

/// Canonical energy variance Var(ε) at β.
pub fn energy_variance(spectrum: &EnergySpectrum, beta: f64) -> Result<f64, ThermoError> {
    check_beta(beta)?;
    let (weights, z) = shifted_weights(spectrum, beta);
    let mean = spectrum
        .levels()
        .iter()
        .zip(&weights)
        .map(|(l, w)| l.energy * w)
        .sum::<f64>()
        / z;
    let var = spectrum
        .levels()
        .iter()
        .zip(&weights)
        .map(|(l, w)| (l.energy - mean).powi(2) * w)
        .sum::<f64>()
        / z;
    Ok(var)
}

/// Canonical entropy S(β) = βE + lnZ, in units of k. Equals
/// −Σ p ln p over microstates.
pub fn entropy_se(spectrum: &EnergySpectrum, beta: f64) -> Result<f64, ThermoError> {
    check_beta(beta)?;
    // evaluate in the ground-shifted frame: β(E−ε₀) and ln(Z·e^{βε₀}) are
    // both O(1) at large β, avoiding the βε₀ cancellation of βE + lnZ
    let e0 = spectrum.min_energy();
    let (weights, z) = shifted_weights(spectrum, beta);
    let e_shifted = spectrum
        .levels()
        .iter()
        .zip(&weights)
        .map(|(l, w)| (l.energy - e0) * w)
        .sum::<f64>()
        / z;
    Ok(beta * e_shifted + z.ln())
}

/// Heat capacity C(β) = β² Var(ε), in units of k. Positive on (0, ∞) for
/// any spectrum with at least two distinct levels.
pub fn heat_capacity(spectrum: &EnergySpectrum, beta: f64) -> Result<f64, ThermoError> {
    Ok(beta * beta * energy_variance(spectrum, beta)?)
}

pub fn thermo_point(spectrum: &EnergySpectrum, beta: f64) -> Result<ThermoPoint, ThermoError> {
    let ln_z = ln_partition(spectrum, beta)?;
    let energy = mean_energy(spectrum, beta)?;
    Ok(ThermoPoint {
        ln_z,
        energy,
        entropy: entropy_se(spectrum, beta)?,
        heat_capacity: beta * beta * energy_variance(spectrum, beta)?,
    })
}

/// Check that `energy` lies strictly inside the admissible open window.
pub fn check_admissible(spectrum: &EnergySpectrum, energy: f64) -> Result<(), ThermoError> {
    let min = spectrum.min_energy();
    let max = spectrum.infinite_temperature_energy();
    if !(energy > min) {
        return Err(ThermoError::EnergyBelowMin { energy, min });
    }
    if !(energy < max) {
        return Err(ThermoError::EnergyAboveMax { energy, max });
    }
    Ok(())
}

/// Invert the strictly decreasing E(β): bracketed Newton with bisection
/// fallback, bracket grown by doubling from β = 1.
pub fn beta_from_energy(spectrum: &EnergySpectrum, energy: f64) -> Result<f64, ThermoError> {
    check_admissible(spectrum, energy)?;
    let tol = 1e-14 * energy.abs().max(1.0);
    let root = numerics::solve_decreasing(
        |beta| mean_energy(spectrum, beta).expect("solver keeps beta positive"),
        |beta| -energy_variance(spectrum, beta).expect("solver keeps beta positive"),
        energy,
        1.0,
        tol,
    )?;
    Ok(root.x)
}

/// Invert the strictly decreasing S(β); dS/dβ = −β Var(ε).
pub fn beta_from_entropy(spectrum: &EnergySpectrum, entropy: f64) -> Result<f64, ThermoError> {
    let (low, high) = entropy_range(spectrum);
    if !(entropy > low) || !(entropy < high) {
        return Err(ThermoError::EntropyOutOfRange {
            entropy,
            low,
            high,
        });
    }
    // tight: entropy residuals are amplified by 1/β when mapped to energy
    let tol = 1e-15 * entropy.abs().max(1.0);
    let root = numerics::solve_decreasing(
        |beta| entropy_se(spectrum, beta).expect("solver keeps beta positive"),
        |beta| -beta * energy_variance(spectrum, beta).expect("solver keeps beta positive"),
        entropy,
        1.0,
        tol,
    )?;
    Ok(root.x)
}

/// Open interval of entropies attainable at β ∈ (0, ∞):
/// (ln g_ground, ln Σg).
pub fn entropy_range(spectrum: &EnergySpectrum) -> (f64, f64) {
    let ground_degeneracy = spectrum.levels()[0].degeneracy as f64;
    (
        ground_degeneracy.ln(),
        (spectrum.microstate_count() as f64).ln(),
    )
}

/// S as a function of energy: S_se(β(E)).
pub fn entropy_from_energy(spectrum: &EnergySpectrum, energy: f64) -> Result<f64, ThermoError> {
    let beta = beta_from_energy(spectrum, energy)?;
    entropy_se(spectrum, beta)
}

/// h₁(E) = S_se(E) − S_se(E₁); strictly increasing in E, zero at E₁.
pub fn h1(spectrum: &EnergySpectrum, energy: f64, energy_ref: f64) -> Result<f64, ThermoError> {
    if energy == energy_ref {
        check_admissible(spectrum, energy)?;
        return Ok(0.0);
    }
    Ok(entropy_from_energy(spectrum, energy)? - entropy_from_energy(spectrum, energy_ref)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{builtin, Builtin, EnergySpectrum};
    use approx::assert_relative_eq;

    fn tl() -> EnergySpectrum {
        builtin(Builtin::TwoLevel { gap: 1.0 }).unwrap()
    }

    // Direct-summation oracle, independent of the max-shift path above.
    fn oracle(spectrum: &EnergySpectrum, beta: f64) -> (f64, f64, f64, f64) {
        let z: f64 = spectrum
            .levels()
            .iter()
            .map(|l| l.degeneracy as f64 * (-beta * l.energy).exp())
            .sum();
        let e: f64 = spectrum
            .levels()
            .iter()
            .map(|l| l.energy * l.degeneracy as f64 * (-beta * l.energy).exp())
            .sum::<f64>()
            / z;
        let e2: f64 = spectrum
            .levels()
            .iter()
            .map(|l| l.energy * l.energy * l.degeneracy as f64 * (-beta * l.energy).exp())
            .sum::<f64>()
            / z;
        (z.ln(), e, beta * e + z.ln(), beta * beta * (e2 - e * e))
    }

    #[test]
    fn ln_partition_two_level() {
        let expect = (1.0 + (-1.0f64).exp()).ln(); // 0.313262...
        assert_relative_eq!(ln_partition(&tl(), 1.0).unwrap(), expect, epsilon = 1e-15);
        assert_relative_eq!(expect, 0.313262, epsilon = 1e-6);
    }

    #[test]
    fn ln_partition_energy_shift_identity() {
        let s = tl();
        let shifted = s.shifted(2.5);
        for &beta in &[0.3, 1.0, 7.0] {
            assert_relative_eq!(
                ln_partition(&shifted, beta).unwrap(),
                ln_partition(&s, beta).unwrap() - beta * 2.5,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn ln_partition_harmonic_against_geometric_series() {
        let s = builtin(Builtin::Harmonic { omega: 1.0, n_levels: 64 }).unwrap();
        // truncation of the geometric tail is ~e^{-64}, far below 1e-12
        let closed_form = -((1.0f64 - (-1.0f64).exp()).ln());
        assert_relative_eq!(closed_form, 0.458675, epsilon = 1e-6);
        assert!((ln_partition(&s, 1.0).unwrap() - closed_form).abs() < 1e-12);
    }

    #[test]
    fn mean_energy_two_level() {
        let expect = (-1.0f64).exp() / (1.0 + (-1.0f64).exp()); // 0.268941...
        assert_relative_eq!(mean_energy(&tl(), 1.0).unwrap(), expect, epsilon = 1e-15);
        assert_relative_eq!(expect, 0.268941, epsilon = 1e-6);
    }

    #[test]
    fn mean_energy_symmetric_spectrum_near_zero_beta() {
        let s = EnergySpectrum::new("sym", [(-1.0, 1), (1.0, 1)]).unwrap();
        assert!(mean_energy(&s, 1e-12).unwrap().abs() < 1e-11);
    }

    #[test]
    fn mean_energy_ground_state_limit() {
        assert!(mean_energy(&tl(), 1e3).unwrap() < 1e-300);
    }

    #[test]
    fn entropy_two_level_values() {
        assert_relative_eq!(entropy_se(&tl(), 1.0).unwrap(), 0.582203, epsilon = 1e-6);
        assert_relative_eq!(entropy_se(&tl(), 0.5).unwrap(), 0.662847, epsilon = 1e-6);
        // uniform limit
        assert_relative_eq!(entropy_se(&tl(), 1e-9).unwrap(), 2.0f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn entropy_matches_microstate_sum() {
        let s = builtin(Builtin::Random { seed: 11, n_levels: 8, range: (0.0, 5.0) }).unwrap();
        for &beta in &[0.2, 1.0, 3.0] {
            let state = CanonicalState::new(s.clone(), beta).unwrap();
            let direct: f64 = state
                .microstate_probabilities()
                .iter()
                .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
                .sum();
            assert_relative_eq!(entropy_se(&s, beta).unwrap(), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn heat_capacity_two_level() {
        let e = (-1.0f64).exp();
        let expect = e / (1.0 + e).powi(2); // 0.196612...
        assert_relative_eq!(heat_capacity(&tl(), 1.0).unwrap(), expect, epsilon = 1e-15);
        assert_relative_eq!(expect, 0.196612, epsilon = 1e-6);
    }

    #[test]
    fn heat_capacity_degenerate_rich_matches_effective_two_level() {
        // all mass at energies 0 and delta, with degeneracies
        let s = EnergySpectrum::new("rich", [(0.0, 3), (0.8, 5)]).unwrap();
        let (_, _, _, c) = oracle(&s, 1.3);
        assert_relative_eq!(heat_capacity(&s, 1.3).unwrap(), c, max_relative = 1e-12);
    }

    #[test]
    fn heat_capacity_matches_finite_difference_of_energy() {
        let s = builtin(Builtin::Random { seed: 4, n_levels: 12, range: (0.0, 8.0) }).unwrap();
        for &beta in &[0.1, 1.0, 5.0] {
            let h = 1e-5 * beta;
            let de = (mean_energy(&s, beta + h).unwrap() - mean_energy(&s, beta - h).unwrap())
                / (2.0 * h);
            let c_fd = -beta * beta * de;
            assert_relative_eq!(heat_capacity(&s, beta).unwrap(), c_fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn thermo_matches_direct_oracle() {
        let s = builtin(Builtin::Random { seed: 9, n_levels: 6, range: (0.0, 4.0) }).unwrap();
        let (ln_z, e, entropy, c) = oracle(&s, 0.7);
        let p = thermo_point(&s, 0.7).unwrap();
        assert_relative_eq!(p.ln_z, ln_z, max_relative = 1e-13);
        assert_relative_eq!(p.energy, e, max_relative = 1e-13);
        assert_relative_eq!(p.entropy, entropy, max_relative = 1e-13);
        assert_relative_eq!(p.heat_capacity, c, max_relative = 1e-12);
    }

    #[test]
    fn beta_from_energy_round_trip() {
        let e = mean_energy(&tl(), 1.0).unwrap();
        assert_relative_eq!(beta_from_energy(&tl(), e).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn beta_from_energy_boundary_errors() {
        assert!(matches!(
            beta_from_energy(&tl(), 0.5),
            Err(ThermoError::EnergyAboveMax { .. })
        ));
        assert!(matches!(
            beta_from_energy(&tl(), -0.1),
            Err(ThermoError::EnergyBelowMin { .. })
        ));
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(matches!(ln_partition(&tl(), 0.0), Err(ThermoError::NonPositiveBeta(_))));
        assert!(matches!(entropy_se(&tl(), -1.0), Err(ThermoError::NonPositiveBeta(_))));
    }

    #[test]
    fn h1_examples() {
        let s = tl();
        let e_half = mean_energy(&s, 0.5).unwrap();
        let e_one = mean_energy(&s, 1.0).unwrap();
        assert_relative_eq!(h1(&s, e_half, e_one).unwrap(), 0.080645, epsilon = 1e-6);
        assert_eq!(h1(&s, e_one, e_one).unwrap(), 0.0);
    }

    #[test]
    fn h1_strictly_increasing_on_grid() {
        let s = builtin(Builtin::Random { seed: 2, n_levels: 7, range: (0.0, 6.0) }).unwrap();
        let lo = s.min_energy();
        let hi = s.infinite_temperature_energy();
        let e_ref = 0.5 * (lo + hi);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=100 {
            let e = lo + (hi - lo) * i as f64 / 101.0;
            let v = h1(&s, e, e_ref).unwrap();
            assert!(v > prev, "h1 not strictly increasing at grid point {i}");
            prev = v;
        }
    }

    #[test]
    fn beta_from_entropy_round_trip() {
        let s = builtin(Builtin::Random { seed: 5, n_levels: 10, range: (0.0, 10.0) }).unwrap();
        for &beta in &[0.05, 0.8, 20.0] {
            let entropy = entropy_se(&s, beta).unwrap();
            assert_relative_eq!(
                beta_from_entropy(&s, entropy).unwrap(),
                beta,
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn shift_covariance() {
        let s = builtin(Builtin::Random { seed: 6, n_levels: 5, range: (0.0, 3.0) }).unwrap();
        let shifted = s.shifted(1.75);
        let beta = 0.9;
        assert_relative_eq!(
            mean_energy(&shifted, beta).unwrap(),
            mean_energy(&s, beta).unwrap() + 1.75,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            entropy_se(&shifted, beta).unwrap(),
            entropy_se(&s, beta).unwrap(),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            heat_capacity(&shifted, beta).unwrap(),
            heat_capacity(&s, beta).unwrap(),
            max_relative = 1e-10
        );
    }
}
