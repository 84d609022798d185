//! Discrete energy-spectrum system models: construction, validation,
//! composition, built-in generators, and the JSON file format.

use std::collections::BTreeMap;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the microstate count of a composed spectrum.
pub const DEFAULT_MICROSTATE_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("failed to read spectrum file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse spectrum file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("spectrum '{name}' has fewer than 2 distinct energy levels")]
    TooFewLevels { name: String },
    #[error("spectrum '{name}' contains a non-finite energy")]
    NonFiniteEnergy { name: String },
    #[error("spectrum '{name}' contains a level with degeneracy {degeneracy} < 1")]
    InvalidDegeneracy { name: String, degeneracy: u64 },
    #[error("composition would exceed the microstate cap: {count} > {cap}")]
    MicrostateOverflow { count: u128, cap: u64 },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("duplicate spectrum name '{0}' in library")]
    DuplicateName(String),
}

/// One energy level: eigenvalue and its degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub degeneracy: u64,
}

/// Discrete eigenvalue/degeneracy model of a closed system's Hamiltonian.
///
/// Invariants (enforced at construction): energies strictly increasing and
/// finite, at least two distinct levels, every degeneracy ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpectrum {
    name: String,
    levels: Vec<Level>,
}

/// Relative tolerance under which two energies count as the same level.
fn merge_tolerance(energy: f64) -> f64 {
    1e-12 * energy.abs().max(1.0)
}

impl EnergySpectrum {
    /// Build a spectrum from raw levels. Input is sorted ascending; levels
    /// with equal energy (within the merge tolerance) are merged with
    /// degeneracies summed.
    pub fn new(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = (f64, u64)>,
    ) -> Result<Self, SpectrumError> {
        let name = name.into();
        let mut raw: Vec<Level> = levels
            .into_iter()
            .map(|(energy, degeneracy)| Level { energy, degeneracy })
            .collect();
        for level in &raw {
            if !level.energy.is_finite() {
                return Err(SpectrumError::NonFiniteEnergy { name });
            }
            if level.degeneracy < 1 {
                return Err(SpectrumError::InvalidDegeneracy {
                    name,
                    degeneracy: level.degeneracy,
                });
            }
        }
        raw.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let mut merged: Vec<Level> = Vec::with_capacity(raw.len());
        for level in raw {
            match merged.last_mut() {
                Some(last) if (level.energy - last.energy).abs() <= merge_tolerance(last.energy) => {
                    last.degeneracy += level.degeneracy;
                }
                _ => merged.push(level),
            }
        }
        if merged.len() < 2 {
            return Err(SpectrumError::TooFewLevels { name });
        }
        Ok(Self { name, levels: merged })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Total number of microstates (sum of degeneracies).
    pub fn microstate_count(&self) -> u64 {
        self.levels.iter().map(|l| l.degeneracy).sum()
    }

    /// Lowest energy level.
    pub fn min_energy(&self) -> f64 {
        self.levels[0].energy
    }

    pub fn max_energy(&self) -> f64 {
        self.levels[self.levels.len() - 1].energy
    }

    /// Degeneracy-weighted mean energy, the β → 0⁺ limit of the canonical
    /// mean energy and the upper edge of the admissible energy window.
    pub fn infinite_temperature_energy(&self) -> f64 {
        let count = self.microstate_count() as f64;
        self.levels
            .iter()
            .map(|l| l.degeneracy as f64 * l.energy)
            .sum::<f64>()
            / count
    }

    /// A copy with every level shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            name: format!("{}+{}", self.name, offset),
            levels: self
                .levels
                .iter()
                .map(|l| Level {
                    energy: l.energy + offset,
                    degeneracy: l.degeneracy,
                })
                .collect(),
        }
    }

    /// Load a spectrum from its JSON file representation.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SpectrumError> {
        let text = std::fs::read_to_string(path)?;
        let file: SpectrumFile = serde_json::from_str(&text)?;
        Self::new(file.name, file.levels.iter().map(|l| (l.energy, l.degeneracy)))
    }

    /// Serialize to the JSON file representation.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SpectrumError> {
        let file = SpectrumFile {
            name: self.name.clone(),
            levels: self.levels.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = SpectrumFile {
            name: self.name.clone(),
            levels: self.levels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spectrum serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    name: String,
    levels: Vec<Level>,
}

/// Tensor composition: all pairwise energy sums with product degeneracies,
/// merged within tolerance. The microstate count multiplies.
pub fn compose(a: &EnergySpectrum, b: &EnergySpectrum) -> Result<EnergySpectrum, SpectrumError> {
    compose_with_cap(a, b, DEFAULT_MICROSTATE_CAP)
}

pub fn compose_with_cap(
    a: &EnergySpectrum,
    b: &EnergySpectrum,
    cap: u64,
) -> Result<EnergySpectrum, SpectrumError> {
    let count = a.microstate_count() as u128 * b.microstate_count() as u128;
    if count > cap as u128 {
        return Err(SpectrumError::MicrostateOverflow { count, cap });
    }
    let mut sums = Vec::with_capacity(a.levels.len() * b.levels.len());
    for la in &a.levels {
        for lb in &b.levels {
            sums.push((la.energy + lb.energy, la.degeneracy * lb.degeneracy));
        }
    }
    EnergySpectrum::new(format!("{}*{}", a.name, b.name), sums)
}

/// Built-in spectrum generators.
#[derive(Debug, Clone)]
pub enum Builtin {
    /// Two levels at 0 and `gap`, both nondegenerate.
    TwoLevel { gap: f64 },
    /// Truncated harmonic ladder {n·omega : n = 0..n_levels−1}.
    Harmonic { omega: f64, n_levels: u64 },
    /// Deterministic random spectrum: `n_levels` energies uniform in
    /// `range`, nondegenerate, identical for identical seeds.
    Random {
        seed: u64,
        n_levels: u64,
        range: (f64, f64),
    },
}

pub fn builtin(kind: Builtin) -> Result<EnergySpectrum, SpectrumError> {
    match kind {
        Builtin::TwoLevel { gap } => {
            if !(gap > 0.0) {
                return Err(SpectrumError::InvalidParameters(format!(
                    "two_level gap must be positive, got {gap}"
                )));
            }
            EnergySpectrum::new(format!("two_level({gap})"), [(0.0, 1), (gap, 1)])
        }
        Builtin::Harmonic { omega, n_levels } => {
            if !(omega > 0.0) || n_levels < 2 {
                return Err(SpectrumError::InvalidParameters(format!(
                    "harmonic requires omega > 0 and n_levels >= 2, got ({omega}, {n_levels})"
                )));
            }
            EnergySpectrum::new(
                format!("harmonic({omega},{n_levels})"),
                (0..n_levels).map(|n| (n as f64 * omega, 1)),
            )
        }
        Builtin::Random {
            seed,
            n_levels,
            range,
        } => {
            if n_levels < 2 || !(range.1 > range.0) || !range.0.is_finite() || !range.1.is_finite() {
                return Err(SpectrumError::InvalidParameters(format!(
                    "random requires n_levels >= 2 and a finite nonempty range, got ({n_levels}, {:?})",
                    range
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dist = Uniform::new(range.0, range.1);
            // retry draws that would merge into an existing level
            let mut energies: Vec<f64> = Vec::with_capacity(n_levels as usize);
            while energies.len() < n_levels as usize {
                let e = dist.sample(&mut rng);
                if energies
                    .iter()
                    .all(|&x| (x - e).abs() > merge_tolerance(x))
                {
                    energies.push(e);
                }
            }
            EnergySpectrum::new(
                format!("random({seed},{n_levels})"),
                energies.into_iter().map(|e| (e, 1)),
            )
        }
    }
}

/// Named collection of spectra.
#[derive(Debug, Default)]
pub struct SpectrumLibrary {
    spectra: BTreeMap<String, EnergySpectrum>,
}

impl SpectrumLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, spectrum: EnergySpectrum) -> Result<(), SpectrumError> {
        if self.spectra.contains_key(spectrum.name()) {
            return Err(SpectrumError::DuplicateName(spectrum.name().to_string()));
        }
        self.spectra.insert(spectrum.name().to_string(), spectrum);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&EnergySpectrum> {
        self.spectra.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.spectra.keys().map(String::as_str)
    }
}
