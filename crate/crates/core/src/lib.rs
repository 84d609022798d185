//! Numerical realization of operational temperature and entropy for finite
//! discrete-energy-spectrum models: canonical thermodynamics, the
//! interconnection map between systems, standard processes with controlled
//! irreversibility, operational entropy measurement by quadrature, and a
//! graph-based extension to states outside the equilibrium family. Every
//! structural property is certified by the seeded suite in [`harness`].

pub mod entropy;
pub mod extension;
pub mod harness;
pub mod interconnect;
pub mod numerics;
pub mod processes;
pub mod spectra;
pub mod thermo;

pub use entropy::{EntropyBracket, EntropyMeasurement, QuadratureConfig};
pub use extension::{AccessibilityGraph, EntropyRangeResult, NondecreaseVerdict};
pub use interconnect::{DerivativeMethod, SePoint, TemperatureScale, TRIPLE_POINT_KELVIN};
pub use processes::{ModelState, StandardProcessOutcome};
pub use spectra::{Builtin, EnergySpectrum, SpectrumLibrary};
pub use thermo::ThermoPoint;
