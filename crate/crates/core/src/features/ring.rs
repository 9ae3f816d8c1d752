//! Inner-ring extraction: strip the cell's outer rim from an edge map
//! and count what remains.

use crate::error::{Error, Result};
use crate::raster::{self, BinaryMask, ImageRgb};

use super::canny::{canny, CannyParams};

/// Diameter of the circle with the same area as the mask: 2 sqrt(area / pi).
pub fn equivalent_diameter(mask: &BinaryMask) -> f64 {
    2.0 * (mask.count() as f64 / std::f64::consts::PI).sqrt()
}

/// Erosion radius used to peel the cell rim off an edge map.
pub fn boundary_erosion_radius(cell: &BinaryMask) -> usize {
    ((0.1 * equivalent_diameter(cell)).floor() as usize).max(2)
}

/// Keeps only edges that survive eroding the cell mask, deleting the
/// rim edges of the cell while preserving interior (ring) structure.
pub fn remove_outer_boundary(edges: &BinaryMask, cell: &BinaryMask) -> Result<BinaryMask> {
    if edges.width() != cell.width() || edges.height() != cell.height() {
        return Err(Error::dimensions(format!(
            "edge mask is {}x{} but cell mask is {}x{}",
            edges.width(),
            edges.height(),
            cell.width(),
            cell.height()
        )));
    }
    let eroded = raster::erode_mask(cell, boundary_erosion_radius(cell));
    edges.and(&eroded)
}

/// Number of edge pixels left inside the cell after boundary removal —
/// the length estimate for the parasite ring.
pub fn inner_ring_length(image: &ImageRgb, params: &CannyParams) -> Result<usize> {
    let edges = canny(&raster::to_grayscale(image), params)?;
    let cell = raster::cell_mask(image, raster::DEFAULT_CELL_THRESHOLD);
    Ok(remove_outer_boundary(&edges, &cell)?.count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_image(side: usize, radius: f64, color: [u8; 3]) -> ImageRgb {
        let c = side as f64 / 2.0;
        let mut img = ImageRgb::filled(side, side, [0, 0, 0]).unwrap();
        for y in 0..side {
            for x in 0..side {
                let (dx, dy) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
                if (dx * dx + dy * dy).sqrt() <= radius {
                    img.set_pixel(x, y, color);
                }
            }
        }
        img
    }

    fn with_annulus(mut img: ImageRgb, rho: f64, half_t: f64, color: [u8; 3]) -> ImageRgb {
        let c = img.width() as f64 / 2.0;
        for y in 0..img.height() {
            for x in 0..img.width() {
                let (dx, dy) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
                if ((dx * dx + dy * dy).sqrt() - rho).abs() <= half_t {
                    img.set_pixel(x, y, color);
                }
            }
        }
        img
    }

    #[test]
    fn equivalent_diameter_of_disk() {
        let img = disk_image(128, 40.0, [200, 120, 120]);
        let mask = raster::cell_mask(&img, 10);
        let d = equivalent_diameter(&mask);
        assert!((d - 80.0).abs() < 1.5, "diameter {d}");
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = BinaryMask::empty(4, 4);
        let b = BinaryMask::empty(5, 4);
        assert!(matches!(remove_outer_boundary(&a, &b).unwrap_err(), Error::Dimensions(_)));
    }

    #[test]
    fn empty_edge_mask_stays_empty() {
        let img = disk_image(96, 36.0, [200, 120, 120]);
        let cell = raster::cell_mask(&img, 10);
        let empty = BinaryMask::empty(96, 96);
        assert_eq!(remove_outer_boundary(&empty, &cell).unwrap().count(), 0);
    }

    // Synthetic disk oracle: a plain disk exposes only its rim, and the
    // rim does not survive boundary removal.
    #[test]
    fn plain_disk_rim_is_removed() {
        let img = disk_image(128, 45.0, [200, 120, 120]);
        let edges = canny(&raster::to_grayscale(&img), &CannyParams::default()).unwrap();
        let rim_pixels = edges.count();
        assert!(rim_pixels > 0);
        let cell = raster::cell_mask(&img, 10);
        let kept = remove_outer_boundary(&edges, &cell).unwrap().count();
        assert!(
            kept as f64 <= 0.02 * rim_pixels as f64,
            "kept {kept} of {rim_pixels} rim pixels"
        );
    }

    // Synthetic annulus oracle: ring edges at half radius survive
    // boundary removal nearly intact. "Inner contour" pixels are judged
    // geometrically: edge pixels within a band around the ring radius.
    #[test]
    fn inner_ring_edges_survive_boundary_removal() {
        let side = 128usize;
        let (disk_r, rho) = (45.0, 22.5);
        let img = with_annulus(disk_image(side, disk_r, [200, 120, 120]), rho, 1.0, [90, 40, 110]);
        let edges = canny(&raster::to_grayscale(&img), &CannyParams::default()).unwrap();
        let cell = raster::cell_mask(&img, 10);
        let kept = remove_outer_boundary(&edges, &cell).unwrap();

        let c = side as f64 / 2.0;
        let (mut ring_edge_total, mut ring_edge_kept) = (0usize, 0usize);
        for y in 0..side {
            for x in 0..side {
                let d = ((x as f64 + 0.5 - c).powi(2) + (y as f64 + 0.5 - c).powi(2)).sqrt();
                if (d - rho).abs() <= 4.0 && edges.get(x, y) {
                    ring_edge_total += 1;
                    if kept.get(x, y) {
                        ring_edge_kept += 1;
                    }
                }
            }
        }
        assert!(ring_edge_total > 0);
        assert!(
            ring_edge_kept as f64 >= 0.9 * ring_edge_total as f64,
            "kept {ring_edge_kept} of {ring_edge_total} ring-contour pixels"
        );
    }

    #[test]
    fn all_black_image_has_zero_ring_length() {
        let img = ImageRgb::filled(64, 64, [0, 0, 0]).unwrap();
        assert_eq!(inner_ring_length(&img, &CannyParams::default()).unwrap(), 0);
    }

    // Synthetic oracle: a clean disk has almost no interior edges
    // relative to its perimeter.
    #[test]
    fn uniform_disk_ring_length_is_tiny() {
        let img = disk_image(128, 45.0, [200, 120, 120]);
        let count = inner_ring_length(&img, &CannyParams::default()).unwrap();
        let perimeter = 2.0 * std::f64::consts::PI * 45.0;
        assert!((count as f64) <= 0.05 * perimeter, "count {count}");
    }

    // Documents the contour-counting geometry: the annulus has two
    // boundaries, so the raw pixel count lands near the sum of the two
    // contour circumferences (roughly 4 pi rho), not 2 pi rho.
    #[test]
    fn annulus_ring_length_counts_both_contours() {
        let side = 144usize;
        let (disk_r, rho) = (55.0, 20.0);
        let img = with_annulus(disk_image(side, disk_r, [200, 120, 120]), rho, 1.0, [90, 40, 110]);
        let count = inner_ring_length(&img, &CannyParams::default()).unwrap() as f64;
        let both_contours = 4.0 * std::f64::consts::PI * rho;
        assert!(
            (0.6 * both_contours..=1.2 * both_contours).contains(&count),
            "count {count} vs two-contour estimate {both_contours}"
        );
    }

    // 90-degree rotation is a pixel permutation, so the count moves only
    // by discretization effects.
    #[test]
    fn ring_length_stable_under_quarter_turn() {
        let side = 128usize;
        let img = with_annulus(disk_image(side, 45.0, [200, 120, 120]), 20.0, 1.0, [90, 40, 110]);
        let base = inner_ring_length(&img, &CannyParams::default()).unwrap();
        let turned = inner_ring_length(&img.rotate90(), &CannyParams::default()).unwrap();
        assert!(base > 0);
        let rel = (base as f64 - turned as f64).abs() / base as f64;
        assert!(rel <= 0.10, "rotation changed count {base} -> {turned}");
    }

    #[test]
    fn ring_color_darkens_the_grayscale_plane() {
        // Keeps the color constants honest: the ring must contrast with
        // the cell body in grayscale for edges to exist.
        let b = 0.299 * 200.0 + 0.587 * 120.0 + 0.114 * 120.0;
        let r = 0.299 * 90.0 + 0.587 * 40.0 + 0.114 * 110.0;
        assert!(b - r > 60.0);
    }
}
