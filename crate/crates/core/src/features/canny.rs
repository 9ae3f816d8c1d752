//! Canny edge detection: Gaussian smoothing, Sobel gradients,
//! non-maximum suppression with the gradient direction quantized to
//! four bins, and double-threshold hysteresis.
//!
//! The hysteresis thresholds are fractions of the maximum gradient
//! magnitude, which makes the edge mask invariant under affine
//! rescaling of the input intensities.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, ChannelGrid, MIN_SIDE};

/// Detector parameters. The defaults are the conventional choices and
/// are exposed as CLI flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    /// Standard deviation of the smoothing kernel; radius is ceil(3 sigma).
    pub gaussian_sigma: f64,
    /// Weak hysteresis threshold as a fraction of the max gradient magnitude.
    pub low_fraction: f64,
    /// Strong hysteresis threshold as a fraction of the max gradient magnitude.
    pub high_fraction: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self { gaussian_sigma: 1.4, low_fraction: 0.1, high_fraction: 0.3 }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma.is_finite() && self.gaussian_sigma > 0.0) {
            return Err(Error::invalid("canny sigma must be positive"));
        }
        let (lo, hi) = (self.low_fraction, self.high_fraction);
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi <= 1.0) {
            return Err(Error::invalid(
                "canny thresholds must satisfy 0 < low < high <= 1",
            ));
        }
        Ok(())
    }
}

/// Runs the detector and returns the binary edge mask.
pub fn canny(grid: &ChannelGrid, params: &CannyParams) -> Result<BinaryMask> {
    params.validate()?;
    let (w, h) = (grid.width(), grid.height());
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::dimensions(format!(
            "canny needs at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}"
        )));
    }

    let smoothed = gaussian_blur(grid, params.gaussian_sigma);
    let (gx, gy) = sobel(&smoothed);
    let magnitude = ChannelGrid::from_fn(w, h, |x, y| gx.get(x, y).hypot(gy.get(x, y)))?;

    let max_magnitude = magnitude.values().iter().cloned().fold(0.0, f64::max);
    if max_magnitude == 0.0 {
        return Ok(BinaryMask::empty(w, h));
    }
    let strong = params.high_fraction * max_magnitude;
    let weak = params.low_fraction * max_magnitude;

    let thinned = non_maximum_suppression(&magnitude, &gx, &gy);
    Ok(hysteresis(&thinned, strong, weak))
}

/// Separable Gaussian blur with replicated borders.
fn gaussian_blur(grid: &ChannelGrid, sigma: f64) -> ChannelGrid {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for t in -radius..=radius {
        kernel.push((-((t * t) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h) = (grid.width(), grid.height());
    let horizontal = ChannelGrid::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, k)| k * grid.get_clamped(x as isize + i as isize - radius, y as isize))
            .sum()
    })
    .expect("blur preserves dimensions");
    ChannelGrid::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, k)| k * horizontal.get_clamped(x as isize, y as isize + i as isize - radius))
            .sum()
    })
    .expect("blur preserves dimensions")
}

/// 3x3 Sobel gradients with replicated borders.
fn sobel(grid: &ChannelGrid) -> (ChannelGrid, ChannelGrid) {
    let (w, h) = (grid.width(), grid.height());
    let at = |x: usize, y: usize, dx: isize, dy: isize| {
        grid.get_clamped(x as isize + dx, y as isize + dy)
    };
    let gx = ChannelGrid::from_fn(w, h, |x, y| {
        (at(x, y, 1, -1) + 2.0 * at(x, y, 1, 0) + at(x, y, 1, 1))
            - (at(x, y, -1, -1) + 2.0 * at(x, y, -1, 0) + at(x, y, -1, 1))
    })
    .expect("sobel preserves dimensions");
    let gy = ChannelGrid::from_fn(w, h, |x, y| {
        (at(x, y, -1, 1) + 2.0 * at(x, y, 0, 1) + at(x, y, 1, 1))
            - (at(x, y, -1, -1) + 2.0 * at(x, y, 0, -1) + at(x, y, 1, -1))
    })
    .expect("sobel preserves dimensions");
    (gx, gy)
}

/// Offset to the neighbor pair for a gradient direction quantized to
/// 0, 45, 90 or 135 degrees.
fn direction_offset(gx: f64, gy: f64) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (1, 0)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps only pixels that are local magnitude maxima along the gradient
/// direction. Equal-magnitude plateaus keep exactly one side: a pixel
/// survives when strictly above its backward neighbor and at least as
/// large as its forward neighbor. Border pixels are suppressed.
fn non_maximum_suppression(
    magnitude: &ChannelGrid,
    gx: &ChannelGrid,
    gy: &ChannelGrid,
) -> ChannelGrid {
    let (w, h) = (magnitude.width(), magnitude.height());
    let mut out = vec![0.0; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let m = magnitude.get(x, y);
            if m == 0.0 {
                continue;
            }
            let (dx, dy) = direction_offset(gx.get(x, y), gy.get(x, y));
            let backward = magnitude.get_clamped(x as isize - dx, y as isize - dy);
            let forward = magnitude.get_clamped(x as isize + dx, y as isize + dy);
            if m > backward && m >= forward {
                out[y * w + x] = m;
            }
        }
    }
    ChannelGrid::new(w, h, out).expect("suppression preserves dimensions")
}

/// Double-threshold edge linking: strong pixels seed a flood fill that
/// claims 8-connected chains of weak pixels.
fn hysteresis(thinned: &ChannelGrid, strong: f64, weak: f64) -> BinaryMask {
    let (w, h) = (thinned.width(), thinned.height());
    let mut mask = BinaryMask::empty(w, h);
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if thinned.get(x, y) >= strong && !mask.get(x, y) {
                mask.set(x, y, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for ny in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                        for nx in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                            if !mask.get(nx, ny) && thinned.get(nx, ny) >= weak {
                                mask.set(nx, ny, true);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn connected_components(mask: &BinaryMask) -> usize {
        let (w, h) = (mask.width(), mask.height());
        let mut seen = vec![false; w * h];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..w * h {
            if !mask.bits()[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(idx) = stack.pop() {
                let (x, y) = (idx % w, idx / w);
                for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                        let nidx = ny * w + nx;
                        if mask.bits()[nidx] && !seen[nidx] {
                            seen[nidx] = true;
                            stack.push(nidx);
                        }
                    }
                }
            }
        }
        components
    }

    #[test]
    fn params_validation() {
        assert!(CannyParams::default().validate().is_ok());
        assert!(CannyParams { gaussian_sigma: 0.0, ..Default::default() }.validate().is_err());
        assert!(CannyParams { low_fraction: 0.5, high_fraction: 0.2, ..Default::default() }
            .validate()
            .is_err());
        assert!(CannyParams { low_fraction: 0.1, high_fraction: 1.5, ..Default::default() }
            .validate()
            .is_err());
    }

    #[test]
    fn constant_grid_has_no_edges() {
        let grid = ChannelGrid::from_fn(32, 32, |_, _| 120.0).unwrap();
        let mask = canny(&grid, &CannyParams::default()).unwrap();
        assert_eq!(mask.count(), 0);
    }

    #[test]
    fn tiny_grid_is_rejected() {
        let grid = ChannelGrid::from_fn(2, 8, |_, _| 0.0).unwrap();
        assert!(matches!(
            canny(&grid, &CannyParams::default()).unwrap_err(),
            Error::Dimensions(_)
        ));
    }

    // Analytic step-edge expectation: a vertical step produces one thin
    // vertical line whose pixel count is close to the grid height.
    #[test]
    fn vertical_step_edge_is_a_single_thin_line() {
        let (w, h) = (40usize, 32usize);
        let mid = w / 2;
        let grid = ChannelGrid::from_fn(w, h, |x, _| if x < mid { 0.0 } else { 255.0 }).unwrap();
        let mask = canny(&grid, &CannyParams::default()).unwrap();

        let count = mask.count();
        let lo = (0.7 * h as f64) as usize;
        let hi = (1.3 * h as f64).ceil() as usize;
        assert!((lo..=hi).contains(&count), "count {count} outside [{lo},{hi}]");

        // Every edge pixel hugs the step column and no row holds more
        // than one, i.e. the line is one pixel wide.
        for y in 0..h {
            let row: Vec<usize> = (0..w).filter(|&x| mask.get(x, y)).collect();
            assert!(row.len() <= 1, "row {y} has {} edge pixels", row.len());
            for x in &row {
                assert!((mid - 2..=mid + 1).contains(x), "stray edge at ({x},{y})");
            }
        }
    }

    // Connected-component oracle: a ring of contrasting intensity on a
    // uniform background exposes its two boundaries as two closed
    // contours (the intensity bump has a gradient extremum on each side).
    #[test]
    fn annulus_yields_two_contours() {
        let side = 96usize;
        let c = side as f64 / 2.0;
        let (rho, half_t) = (20.0, 1.5);
        let grid = ChannelGrid::from_fn(side, side, |x, y| {
            let d = ((x as f64 + 0.5 - c).powi(2) + (y as f64 + 0.5 - c).powi(2)).sqrt();
            if (d - rho).abs() <= half_t {
                200.0
            } else {
                80.0
            }
        })
        .unwrap();
        let mask = canny(&grid, &CannyParams::default()).unwrap();
        assert!(mask.count() > 0);
        assert_eq!(connected_components(&mask), 2);
    }

    // Fraction-of-max thresholds make the mask exactly invariant under
    // positive affine intensity maps up to floating-point rounding; a
    // pure rescale keeps even the rounding identical.
    #[test]
    fn affine_intensity_invariance() {
        let grid = ChannelGrid::from_fn(48, 48, |x, y| {
            let d = ((x as f64 - 24.0).powi(2) + (y as f64 - 21.0).powi(2)).sqrt();
            if d < 15.0 {
                180.0 + ((x * 31 + y * 17) % 13) as f64
            } else {
                12.0 + ((x * 7 + y * 29) % 11) as f64
            }
        })
        .unwrap();
        let scaled = ChannelGrid::from_fn(48, 48, |x, y| 0.5 * grid.get(x, y) + 20.0).unwrap();
        let params = CannyParams::default();
        let base = canny(&grid, &params).unwrap();
        assert!(base.count() > 0);
        assert_eq!(base, canny(&scaled, &params).unwrap());
    }
}
