//! Seeded test inputs: band-limited complex Gaussian fields and chirps.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use bilab_core::grid::{coord_norm, forward_transform, inverse_transform, Coord, SampledFunction};
use bilab_core::Grid;

/// Physical samples of a spectrum given on the grid in FFT order.
pub fn to_physical(grid: &Grid, spectrum: Vec<Complex64>) -> Vec<Complex64> {
    let s = SampledFunction::frequency(grid.clone(), spectrum).expect("spectrum matches the grid");
    inverse_transform(&s).expect("frequency samples").into_values()
}

/// `f̂` of physical samples.
pub fn to_spectrum(grid: &Grid, physical: &[Complex64]) -> Vec<Complex64> {
    let f = SampledFunction::physical(grid.clone(), physical.to_vec()).expect("samples match the grid");
    forward_transform(&f).expect("physical samples").into_values()
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b)
}

/// Complex white noise on the physical lattice.
pub fn white(grid: &Grid, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..grid.len()).map(|_| gaussian(&mut rng)).collect()
}

/// Field whose spectrum is complex Gaussian on `lo ≤ |ξ| ≤ hi` and zero elsewhere.
///
/// Coefficients are drawn for every lattice point in FFT order, so the
/// field for a given seed does not depend on the band.
pub fn band_limited(grid: &Grid, lo: f64, hi: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let spec = (0..grid.len())
        .map(|q| {
            let z = gaussian(&mut rng);
            let r = coord_norm(&grid.freq_point(q), dim);
            if r >= lo && r <= hi {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    to_physical(grid, spec)
}

/// `ĝ(η) = e^{-iφ(η)}` on `lo ≤ |η| ≤ hi` (restricted to `η₁ > 0` if `positive`).
pub fn chirp(grid: &Grid, phase: &dyn Fn(&Coord<f64>) -> f64, lo: f64, hi: f64, positive: bool) -> Vec<Complex64> {
    let dim = grid.dim();
    let spec = (0..grid.len())
        .map(|q| {
            let eta = grid.freq_point(q);
            let r = coord_norm(&eta, dim);
            if r >= lo && r <= hi && (!positive || eta[0] > 0.0) {
                Complex64::from_polar(1.0, -phase(&eta))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    to_physical(grid, spec)
}

pub fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn l2_norm(grid: &Grid, v: &[Complex64]) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> Grid {
        Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn band_is_respected() {
        let g = torus();
        let f = band_limited(&g, 4.0, 8.0, 3);
        let s = to_spectrum(&g, &f);
        for (q, v) in s.iter().enumerate() {
            let r = g.freq_point(q)[0].abs();
            if !(4.0..=8.0).contains(&r) {
                assert!(v.norm() < 1e-12);
            }
        }
        assert_eq!(f, band_limited(&g, 4.0, 8.0, 3));
    }

    #[test]
    fn unit_chirp_has_flat_spectrum() {
        let g = torus();
        let c = chirp(&g, &|e| e[0] * e[0] / 7.0, 2.0, 10.0, true);
        let s = to_spectrum(&g, &c);
        let on: Vec<f64> = s.iter().enumerate().filter(|(q, _)| (2.0..=10.0).contains(&g.freq_point(*q)[0])).map(|(_, v)| v.norm()).collect();
        assert_eq!(on.len(), 9);
        assert!(on.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
