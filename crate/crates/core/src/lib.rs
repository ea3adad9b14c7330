//! ECG biometrics pipeline.
//!
//! The crate is organized along the processing chain of a wearable-ECG
//! authentication system:
//!
//! - [`signal`]: core signal containers, validity handling, clean-episode
//!   extraction
//! - [`edf`]: a minimal EDF(+) codec for single-channel ECG exchange
//! - [`dsp`]: anti-aliased downsampling and linear-phase FIR bandpass
//!   filtering
//! - [`segmentation`]: R-peak detection, fiducial delineation, and
//!   interval-outlier rejection
//! - [`features`]: interval statistics over three-beat windows, feature
//!   selection, and dataset composition
//! - [`models`]: random forest, linear max-margin, and MLP classifiers
//!   behind one scoring interface
//! - [`eval`]: the pairwise user-vs-attacker authentication protocol,
//!   ROC/AUC/EER metrics, and multi-beat decision fusion
//! - [`synth`]: a deterministic synthetic multi-subject ECG corpus
//!   generator with ground-truth annotations

pub mod dsp;
pub mod edf;
pub mod eval;
pub mod features;
pub mod models;
pub mod rng;
pub mod segmentation;
pub mod signal;
pub mod stats;
pub mod synth;
pub mod tree;
