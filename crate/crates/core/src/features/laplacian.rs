//! Discrete Laplacian and its aggregated (summed) coefficient.
//!
//! The operator is the 5-point stencil
//! `L(x,y) = I(x+1,y) + I(x-1,y) + I(x,y+1) + I(x,y-1) - 4 I(x,y)`
//! with replicated-edge neighbors at the border, applied to raw 0..=255
//! intensities. Summed over the full grid the replicate border makes
//! every row and column telescope to zero, so the all-pixels sum is an
//! exact invariant; [`SumRegion::Interior`] is the sensitivity switch
//! that keeps the border terms out of the sum instead.

use crate::error::{Error, Result};
use crate::raster::{ChannelGrid, MIN_SIDE};

/// Which pixels contribute to [`aggregated_laplacian_over`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumRegion {
    /// Every pixel, border included.
    #[default]
    AllPixels,
    /// Interior pixels only (x and y at least one away from the border).
    Interior,
}

/// 5-point Laplacian with replicated borders; output has the input's shape.
pub fn laplacian(grid: &ChannelGrid) -> Result<ChannelGrid> {
    let (w, h) = (grid.width(), grid.height());
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::dimensions(format!(
            "laplacian needs at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}"
        )));
    }
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let v = grid.get_clamped(xi + 1, yi)
                + grid.get_clamped(xi - 1, yi)
                + grid.get_clamped(xi, yi + 1)
                + grid.get_clamped(xi, yi - 1)
                - 4.0 * grid.get(x, y);
            values.push(v);
        }
    }
    ChannelGrid::new(w, h, values)
}

/// Sum of the Laplacian response over all pixels.
pub fn aggregated_laplacian(grid: &ChannelGrid) -> Result<f64> {
    aggregated_laplacian_over(grid, SumRegion::AllPixels)
}

/// Sum of the Laplacian response over the chosen region.
pub fn aggregated_laplacian_over(grid: &ChannelGrid, region: SumRegion) -> Result<f64> {
    let lap = laplacian(grid)?;
    let (w, h) = (lap.width(), lap.height());
    let sum = match region {
        SumRegion::AllPixels => lap.values().iter().sum(),
        SumRegion::Interior => {
            let mut acc = 0.0;
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    acc += lap.get(x, y);
                }
            }
            acc
        }
    };
    Ok(sum)
}
