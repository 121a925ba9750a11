//! K-means clustering and a 2-D PCA projection for plotting.

mod kmeans;
mod pca;

pub use kmeans::{kmeans, ClusterResult, KMeansParams};
pub use pca::{pca_2d, Projection2d};
