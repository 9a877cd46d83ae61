//! Multimodal biometric recognition.
//!
//! Two chains share one Fisher discriminant implementation:
//!
//! * face: pixels → [`pca`] → [`lda`] → [`knn`]
//! * voice: samples → [`mfcc`] → [`lda`] → [`svm`]
//!
//! [`pipeline`] enrolls clients, fuses the two verdicts at score level and
//! handles identification and verification; [`modelfile`] persists the fitted
//! system.

pub mod error;
pub mod experiment;
pub mod ingest;
pub mod knn;
pub mod lda;
pub mod linalg;
pub mod mfcc;
pub mod modelfile;
pub mod pca;
pub mod pipeline;
pub mod svm;
pub mod synth;

pub use error::{Error, ModelFileError, Result};
pub use ingest::{AudioRecord, ImageRecord, LabeledDataset};
pub use linalg::{EigenPairs, Matrix, Vector};
pub use pca::{Subspace, SubspaceKind};
pub use pipeline::{Decision, Enrollment, PipelineConfig, SystemModel, Verdict};
