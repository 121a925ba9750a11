//! Cross-lingual linear maps between word-embedding spaces, document semantic
//! fingerprints, and topical clustering of bilingual document collections.

pub mod cluster;
pub mod corpus;
pub mod editdist;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod fingerprint;
pub mod mapping;
pub mod pipeline;
pub mod synth;

pub use cluster::{kmeans, pca_2d, ClusterResult, KMeansParams, Projection2d};
pub use corpus::{Document, DocumentSet, FeatureMatrix, FeatureSpace, Scheme, VocabMode, Vocabulary};
pub use editdist::{QuasiTranslation, TargetInventory};
pub use embeddings::{EmbeddingModel, Neighbor};
pub use error::{Error, ErrorClass, Result};
pub use eval::ClusterTopicReport;
pub use fingerprint::FingerprintMode;
pub use mapping::{Lexicon, PairedMatrices, TransformMatrix};

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "xlingmap/1";
