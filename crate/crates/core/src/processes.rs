//! Weight processes standard with respect to an auxiliary system:
//! nonequilibrium model states, entropy accounting of reversible and
//! irreversible protocols, unitary feasibility, and weight-polygonal
//! energy bookkeeping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interconnect::SePoint;
use crate::spectra::{compose, EnergySpectrum, SpectrumError};
use crate::thermo::{self, CanonicalState, ThermoError};

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("probability vector has length {got}, expected the microstate count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("probability {value} at index {index} is negative or non-finite")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1 within {NORMALIZATION_TOL}")]
    NotNormalized { sum: f64 },
    #[error("states belong to different systems: '{a}' vs '{b}'")]
    SpectrumMismatch { a: String, b: String },
    #[error("composite dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("microstate counts differ: {a} vs {b}")]
    MicrostateCountMismatch { a: u64, b: u64 },
    #[error("required auxiliary entropy {target} outside the attainable interval ({low}, {high})")]
    TargetEntropyOutOfRange { target: f64, low: f64, high: f64 },
    #[error("entropy production must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// General (possibly nonequilibrium) state: a probability vector over the
/// degeneracy-expanded microstates of a spectrum, ascending in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    spectrum: EnergySpectrum,
    probs: Vec<f64>,
}

/// Energies of the degeneracy-expanded microstates, ascending.
pub fn expanded_energies(spectrum: &EnergySpectrum) -> Vec<f64> {
    let mut out = Vec::with_capacity(spectrum.microstate_count() as usize);
    for level in spectrum.levels() {
        for _ in 0..level.degeneracy {
            out.push(level.energy);
        }
    }
    out
}

impl ModelState {
    pub fn new(spectrum: EnergySpectrum, probs: Vec<f64>) -> Result<Self, ProcessError> {
        let expected = spectrum.microstate_count() as usize;
        if probs.len() != expected {
            return Err(ProcessError::LengthMismatch {
                got: probs.len(),
                expected,
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ProcessError::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProcessError::NotNormalized { sum });
        }
        Ok(Self { spectrum, probs })
    }

    /// Canonical (stable-equilibrium) state at β.
    pub fn canonical(spectrum: EnergySpectrum, beta: f64) -> Result<Self, ProcessError> {
        let state = CanonicalState::new(spectrum.clone(), beta)?;
        let probs = state.microstate_probabilities();
        Self::new(spectrum, probs)
    }

    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn energy(&self) -> f64 {
        expanded_energies(&self.spectrum)
            .iter()
            .zip(&self.probs)
            .map(|(e, p)| e * p)
            .sum()
    }
}

/// −Σ p ln p with 0·ln 0 = 0, in units of k.
pub fn vn_entropy(state: &ModelState) -> f64 {
    state
        .probs()
        .iter()
        .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
        .sum()
}

/// Outcome of a weight process for AB standard with respect to B.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StandardProcessOutcome {
    pub e_b_initial: f64,
    pub e_b_final: f64,
    pub sigma: f64,
    pub reversible: bool,
}

/// Run a standard weight process taking A from `a1` to `a2` with auxiliary
/// system B starting at `b`, producing entropy `sigma` ≥ 0.
///
/// The final B entropy is S^B(E_B1) − ΔS^A + σ; sigma = 0 reproduces the
/// reversible minimum of E_B_final, and E_B_final is strictly increasing
/// in sigma.
pub fn simulate_standard_process(
    a1: &ModelState,
    a2: &ModelState,
    b: &SePoint,
    sigma: f64,
) -> Result<StandardProcessOutcome, ProcessError> {
    if !(sigma >= 0.0) {
        return Err(ProcessError::NegativeSigma(sigma));
    }
    if a1.spectrum() != a2.spectrum() {
        return Err(ProcessError::SpectrumMismatch {
            a: a1.spectrum().name().to_string(),
            b: a2.spectrum().name().to_string(),
        });
    }
    let delta_s_a = vn_entropy(a2) - vn_entropy(a1);
    let e_b_initial = b.energy();
    let s_b_initial = thermo::entropy_from_energy(b.spectrum(), e_b_initial)?;
    let target = s_b_initial - delta_s_a + sigma;
    let e_b_final = if target == s_b_initial {
        e_b_initial
    } else {
        let beta = thermo::beta_from_entropy(b.spectrum(), target).map_err(|e| match e {
            ThermoError::EntropyOutOfRange { low, high, .. } => {
                ProcessError::TargetEntropyOutOfRange { target, low, high }
            }
            other => ProcessError::Thermo(other),
        })?;
        thermo::mean_energy(b.spectrum(), beta)?
    };
    Ok(StandardProcessOutcome {
        e_b_initial,
        e_b_final,
        sigma,
        reversible: sigma == 0.0,
    })
}

/// True iff the sorted multiset of products {p_i q_j} of the initial pair
/// matches that of the final pair elementwise within `tol`: the unitary
/// feasibility criterion for the composite process.
pub fn unitary_feasible(
    pa1: &ModelState,
    pb1: &ModelState,
    pa2: &ModelState,
    pb2: &ModelState,
    tol: f64,
) -> Result<bool, ProcessError> {
    let dim1 = pa1.probs().len() * pb1.probs().len();
    let dim2 = pa2.probs().len() * pb2.probs().len();
    if dim1 != dim2 {
        return Err(ProcessError::DimensionMismatch {
            left: dim1,
            right: dim2,
        });
    }
    let mut initial = product_probs(pa1.probs(), pb1.probs());
    let mut fin = product_probs(pa2.probs(), pb2.probs());
    initial.sort_by(f64::total_cmp);
    fin.sort_by(f64::total_cmp);
    Ok(initial
        .iter()
        .zip(&fin)
        .all(|(x, y)| (x - y).abs() <= tol))
}

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-10;

fn product_probs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &pa in a {
        for &pb in b {
            out.push(pa * pb);
        }
    }
    out
}

/// The mirrored nonequilibrium state: B's canonical probabilities at
/// `beta`, carried over to `a`'s microstates in increasing-energy order
/// (hence decreasing probability).
pub fn mirror_nonequilibrium(
    a: &EnergySpectrum,
    b: &EnergySpectrum,
    beta: f64,
) -> Result<ModelState, ProcessError> {
    if a.microstate_count() != b.microstate_count() {
        return Err(ProcessError::MicrostateCountMismatch {
            a: a.microstate_count(),
            b: b.microstate_count(),
        });
    }
    let donor = CanonicalState::new(b.clone(), beta)?;
    // canonical probabilities are already descending in b's ascending
    // energy order
    ModelState::new(a.clone(), donor.microstate_probabilities())
}

/// Product state p ⊗ q on the composed spectrum, probabilities reordered
/// to match the composed spectrum's ascending microstate energies.
pub fn product_state(a: &ModelState, b: &ModelState) -> Result<ModelState, ProcessError> {
    let composed = compose(a.spectrum(), b.spectrum())?;
    let ea = expanded_energies(a.spectrum());
    let eb = expanded_energies(b.spectrum());
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(ea.len() * eb.len());
    for (i, &e1) in ea.iter().enumerate() {
        for (j, &e2) in eb.iter().enumerate() {
            pairs.push((e1 + e2, a.probs()[i] * b.probs()[j]));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    ModelState::new(composed, pairs.into_iter().map(|(_, p)| p).collect())
}

/// Direction of one leg relative to the polygonal's overall traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegDirection {
    Forward,
    Backward,
}

/// One weight process in a polygonal: work done by the system in the
/// leg's own direction, plus that direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub work: f64,
    pub direction: LegDirection,
}

/// Ordered chain of weight-process legs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightPolygonal {
    pub legs: Vec<Leg>,
}

impl WeightPolygonal {
    pub fn new(legs: Vec<Leg>) -> Self {
        Self { legs }
    }

    /// Traversal in the opposite direction: leg order and directions flip.
    pub fn reversed(&self) -> Self {
        Self {
            legs: self
                .legs
                .iter()
                .rev()
                .map(|leg| Leg {
                    work: leg.work,
                    direction: match leg.direction {
                        LegDirection::Forward => LegDirection::Backward,
                        LegDirection::Backward => LegDirection::Forward,
                    },
                })
                .collect(),
        }
    }
}

/// Work done by the system in the polygonal: forward legs add, backward
/// legs subtract.
pub fn polygonal_work(polygonal: &WeightPolygonal) -> f64 {
    polygonal
        .legs
        .iter()
        .map(|leg| match leg.direction {
            LegDirection::Forward => leg.work,
            LegDirection::Backward => -leg.work,
        })
        .sum()
}

/// Energy difference between the polygonal's endpoints: the opposite of
/// the work done.
pub fn energy_difference(polygonal: &WeightPolygonal) -> f64 {
    -polygonal_work(polygonal)
}
