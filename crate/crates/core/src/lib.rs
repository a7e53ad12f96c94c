//! Detects statistically significant control-flow and duration differences
//! between two variants of a business process, from their event logs.
//!
//! The pipeline has three stages:
//!
//! 1. **Feature generation** ([`encoding`]): every trace is binarized into one
//!    indicator time series per activity (or per directly-follows edge), each
//!    series is turned into Haar wavelet coefficients ([`haar`]), and the
//!    per-unit coefficient blocks are stacked into sparse design-matrix rows.
//! 2. **Feature selection** ([`select`]): for every candidate unit, an RBF-kernel
//!    SVM ([`classify`]) is cross-validated on the traces containing that unit;
//!    a one-sided t-test ([`stats`]) decides whether the classifier beats the
//!    no-information baseline, i.e. whether the unit discriminates the variants.
//! 3. **Filtering** ([`fingerprint`]): each variant is reduced to the traces
//!    carrying discriminatory units and rendered as an annotated
//!    directly-follows graph (the variant's mutual fingerprint), with Welch
//!    tests marking edges whose durations differ.
//!
//! [`eventlog`] handles XES/CSV ingestion and variant splitting, and
//! [`synthgen`] generates seeded synthetic logs with planted differences for
//! testing and calibration.

pub mod classify;
pub mod encoding;
mod error;
pub mod eventlog;
pub mod fingerprint;
pub mod haar;
pub mod select;
pub mod stats;
pub mod synthgen;

pub use classify::{ClassifierConfig, FoldScore, GammaParam, SvmClassifier};
pub use encoding::{AugmentedDesignMatrix, DesignMatrix, FeatureKind, FeatureUnit, StackedVector};
pub use error::{Error, Result};
pub use eventlog::{AttrValue, Event, EventLog, Predicate, SplitRule, Trace, VariantSplit};
pub use fingerprint::MutualFingerprint;
pub use haar::{HaarBasis, TimeSeries, WaveletVector};
pub use select::{CandidateResult, SelectionConfig, SelectionReport};
pub use stats::TestResult;
pub use synthgen::PlantSpec;

/// Version stamped into every serialized artifact (reports, fingerprints,
/// manifests) so downstream consumers can detect format changes.
pub const SCHEMA_VERSION: u32 = 1;
