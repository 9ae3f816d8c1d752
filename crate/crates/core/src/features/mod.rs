//! The four interpretable features: one aggregated Laplacian
//! coefficient per color channel and the inner-ring edge length.

mod cache;
mod canny;
mod laplacian;
mod ring;

pub use cache::{read_cache, write_cache, CacheRow, CACHE_HEADER};
pub use canny::{canny, CannyParams};
pub use laplacian::{aggregated_laplacian, aggregated_laplacian_over, laplacian, SumRegion};
pub use ring::{boundary_erosion_radius, equivalent_diameter, inner_ring_length, remove_outer_boundary};

use rayon::prelude::*;

use crate::error::Result;
use crate::raster::{split_channels, ImageRgb};

/// The feature vector a classifier sees for one image.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureVector {
    pub alc_r: f64,
    pub alc_g: f64,
    pub alc_b: f64,
    pub ring_length: usize,
}

impl FeatureVector {
    /// Feature order used everywhere downstream: alc_r, alc_g, alc_b, ring.
    pub fn to_array(self) -> [f64; 4] {
        [self.alc_r, self.alc_g, self.alc_b, self.ring_length as f64]
    }
}

/// Number of features per sample.
pub const FEATURE_COUNT: usize = 4;

/// Human-readable feature names, aligned with [`FeatureVector::to_array`].
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["alc_r", "alc_g", "alc_b", "ring_len"];

/// Computes the full feature vector for one image.
pub fn extract_features(image: &ImageRgb, params: &CannyParams) -> Result<FeatureVector> {
    let (r, g, b) = split_channels(image);
    Ok(FeatureVector {
        alc_r: aggregated_laplacian(&r)?,
        alc_g: aggregated_laplacian(&g)?,
        alc_b: aggregated_laplacian(&b)?,
        ring_length: inner_ring_length(image, params)?,
    })
}

/// Extracts features for a batch of images on the current thread pool.
/// Results are indexed by input position, so the output order never
/// depends on scheduling.
pub fn extract_features_batch(
    images: &[ImageRgb],
    params: &CannyParams,
) -> Vec<Result<FeatureVector>> {
    images
        .par_iter()
        .map(|image| extract_features(image, params))
        .collect()
}
