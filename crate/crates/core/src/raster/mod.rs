//! Raster containers and the pixel-level operations the feature
//! extractors are built on: channel splitting, grayscale conversion,
//! foreground masking and binary erosion.
//!
//! All types are immutable after construction and all operations are
//! pure functions, so everything here is safe to use from many threads.

mod pngio;

pub use pngio::{load_png, save_png};

use crate::error::{Error, Result};

/// Default intensity threshold separating cell foreground from the
/// black background. Nonzero to tolerate compression noise.
pub const DEFAULT_CELL_THRESHOLD: u8 = 10;

/// Minimum image side supported by the second-derivative stencils.
pub const MIN_SIDE: usize = 3;

/// An 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl ImageRgb {
    /// Builds an image from row-major pixel triples.
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::dimensions(format!(
                "image must be at least {MIN_SIDE}x{MIN_SIDE}, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::dimensions(format!(
                "pixel buffer holds {} entries, expected {}",
                pixels.len(),
                width * height
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Solid-color image, mostly useful in tests and for mask export.
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, value: [u8; 3]) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// The image rotated a quarter turn counter-clockwise.
    pub fn rotate90(&self) -> ImageRgb {
        let (w, h) = (self.width, self.height);
        let mut out = vec![[0u8; 3]; w * h];
        for y in 0..h {
            for x in 0..w {
                // (x, y) -> (y, w - 1 - x) in the h x w output
                out[(w - 1 - x) * h + y] = self.pixel(x, y);
            }
        }
        ImageRgb { width: h, height: w, pixels: out }
    }
}

/// A single real-valued plane: one color channel, a grayscale image,
/// or a filter response. Values are finite but otherwise unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ChannelGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::dimensions(format!(
                "value buffer holds {} entries, expected {}",
                values.len(),
                width * height
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(Self { width, height, values })
    }

    /// Builds a grid by evaluating `f` at every (x, y).
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Value at (x, y) with coordinates clamped to the grid, i.e. a
    /// replicated border.
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A row-major boolean plane: edge maps and foreground masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::dimensions(format!(
                "bit buffer holds {} entries, expected {}",
                bits.len(),
                width * height
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![true; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    /// Number of set bits.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Pointwise AND with another mask of the same dimensions.
    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::dimensions(format!(
                "mask dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| *a && *b)
            .collect();
        Ok(BinaryMask { width: self.width, height: self.height, bits })
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }
}

/// Splits an image into its red, green and blue planes. Intensities are
/// promoted to reals unscaled, so values stay in 0..=255.
pub fn split_channels(image: &ImageRgb) -> (ChannelGrid, ChannelGrid, ChannelGrid) {
    let n = image.width * image.height;
    let mut r = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for px in &image.pixels {
        r.push(px[0] as f64);
        g.push(px[1] as f64);
        b.push(px[2] as f64);
    }
    let make = |values| ChannelGrid { width: image.width, height: image.height, values };
    (make(r), make(g), make(b))
}

/// ITU-R BT.601 luminance: 0.299 r + 0.587 g + 0.114 b.
pub fn to_grayscale(image: &ImageRgb) -> ChannelGrid {
    let values = image
        .pixels
        .iter()
        .map(|px| 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64)
        .collect();
    ChannelGrid { width: image.width, height: image.height, values }
}

/// Foreground mask: a bit is set where max(r, g, b) exceeds `threshold`.
pub fn cell_mask(image: &ImageRgb, threshold: u8) -> BinaryMask {
    let bits = image
        .pixels
        .iter()
        .map(|px| px.iter().copied().max().unwrap() > threshold)
        .collect();
    BinaryMask { width: image.width, height: image.height, bits }
}

/// Binary erosion with a square (Chebyshev) structuring element.
///
/// A bit survives iff every bit within Chebyshev distance `radius` was
/// set in the input; positions outside the image count as unset, so a
/// full mask loses a border band of width `radius`. Radius 0 is the
/// identity. Runs as two separable passes over false-count prefix sums.
pub fn erode_mask(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width, mask.height);
    let r = radius;

    // Horizontal pass: out[x] = all of row[x-r ..= x+r] set, in-bounds only.
    let mut horiz = vec![false; w * h];
    let mut prefix = vec![0usize; w + 1];
    for y in 0..h {
        let row = &mask.bits[y * w..(y + 1) * w];
        for x in 0..w {
            prefix[x + 1] = prefix[x] + usize::from(!row[x]);
        }
        let out_row = &mut horiz[y * w..(y + 1) * w];
        for x in 0..w {
            let in_bounds = x >= r && x + r < w;
            out_row[x] = in_bounds && prefix[x + r + 1] == prefix[x - r];
        }
    }

    // Vertical pass over the horizontal result.
    let mut bits = vec![false; w * h];
    let mut col_prefix = vec![0usize; h + 1];
    for x in 0..w {
        for y in 0..h {
            col_prefix[y + 1] = col_prefix[y] + usize::from(!horiz[y * w + x]);
        }
        for y in 0..h {
            let in_bounds = y >= r && y + r < h;
            bits[y * w + x] = in_bounds && col_prefix[y + r + 1] == col_prefix[y - r];
        }
    }
    BinaryMask { width: w, height: h, bits }
}
