//! Splitting a symbol into x-factors times x-independent shapes,
//! `σ(x, ξ, η) = Σ_t a_t(x) b_t(ξ, η)`.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use bilab_core::grid::{coord_norm, Coord, Direction};
use bilab_core::partitions::psi;
use bilab_core::symbols::{Exotic, Symbol};
use bilab_core::Grid;

pub type Shape<'a> = Box<dyn Fn(&Coord<f64>, &Coord<f64>) -> Complex64 + Send + Sync + 'a>;

/// Sampled x-dependence of one term.
#[derive(Clone, Debug, PartialEq)]
pub enum XFactor {
    One,
    Zero,
    Samples(Vec<Complex64>),
}

impl XFactor {
    pub fn is_zero(&self) -> bool {
        match self {
            XFactor::Zero => true,
            XFactor::One => false,
            XFactor::Samples(v) => v.iter().all(|z| z.norm() == 0.0),
        }
    }

    pub fn at(&self, x: usize) -> Complex64 {
        match self {
            XFactor::One => Complex64::new(1.0, 0.0),
            XFactor::Zero => Complex64::new(0.0, 0.0),
            XFactor::Samples(v) => v[x],
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            XFactor::One => 1.0,
            XFactor::Zero => 0.0,
            XFactor::Samples(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// `ψ_k(D/s)` applied on the torus.
    pub fn band(&self, grid: &Grid, k: usize, s: f64) -> XFactor {
        match self {
            XFactor::Zero => XFactor::Zero,
            XFactor::One => {
                if k == 0 {
                    XFactor::One
                } else {
                    XFactor::Zero
                }
            }
            XFactor::Samples(v) => {
                let mut w = v.clone();
                grid.fft(&mut w, Direction::Forward);
                let n = grid.len() as f64;
                for (q, z) in w.iter_mut().enumerate() {
                    let r = coord_norm(&grid.freq_point(q), grid.dim());
                    *z *= psi(k, r / s) / n;
                }
                grid.fft(&mut w, Direction::Inverse);
                XFactor::Samples(w)
            }
        }
    }
}

pub struct Term<'a> {
    pub factor: XFactor,
    pub shape: Shape<'a>,
}

/// A symbol together with the way its x-dependence is split.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    /// x-independent symbol: one term `σ(0, ξ, η)`.
    Multiplier(&'a dyn Symbol<f64>),
    /// Shell-wise x-modulation of the built-in symbol: one term per dyadic shell.
    Exotic(&'a Exotic<f64>),
    /// Any symbol, one term per grid point `y` with `a_y = 1_{x=y}`.
    Sampled(&'a dyn Symbol<f64>),
}

impl<'a> Source<'a> {
    /// Multiplier when `σ` is declared x-independent, otherwise sampled.
    pub fn of(sigma: &'a dyn Symbol<f64>) -> Self {
        if sigma.is_x_independent() {
            Source::Multiplier(sigma)
        } else {
            Source::Sampled(sigma)
        }
    }

    pub fn exotic(sigma: &'a Exotic<f64>) -> Self {
        if sigma.kappa == 0.0 {
            Source::Multiplier(sigma)
        } else {
            Source::Exotic(sigma)
        }
    }

    pub fn symbol(&self) -> &'a dyn Symbol<f64> {
        match *self {
            Source::Multiplier(s) | Source::Sampled(s) => s,
            Source::Exotic(s) => s,
        }
    }

    pub fn dim(&self) -> usize {
        self.symbol().dim()
    }

    /// Terms whose shapes cover the dyadic shells in `shells`; `None` keeps
    /// every shell the grid can carry.
    pub fn terms(&self, grid: &Grid, shells: Option<RangeInclusive<usize>>) -> Vec<Term<'a>> {
        match *self {
            Source::Multiplier(s) => {
                vec![Term { factor: XFactor::One, shape: Box::new(move |a, b| s.eval(&[0.0, 0.0], a, b)) }]
            }
            Source::Sampled(s) => (0..grid.len())
                .map(|y| {
                    let mut v = vec![Complex64::new(0.0, 0.0); grid.len()];
                    v[y] = Complex64::new(1.0, 0.0);
                    let xy = grid.x_point(y);
                    Term { factor: XFactor::Samples(v), shape: Box::new(move |a, b| s.eval(&xy, a, b)) }
                })
                .collect(),
            Source::Exotic(s) => {
                let reach = grid.max_freq() * (2.0 * grid.dim() as f64).sqrt();
                let top = (reach.log2().ceil().max(0.0) as usize) + 1;
                let shells = shells.unwrap_or(0..=top);
                let lo = shells.start().saturating_sub(1);
                let hi = (*shells.end() + 1).min(top);
                (lo..=hi).map(|jj| exotic_term(s, grid, jj)).collect()
            }
        }
    }
}

fn exotic_term<'a>(s: &'a Exotic<f64>, grid: &Grid, jj: usize) -> Term<'a> {
    let lam = s.kappa * 2f64.powf(jj as f64 * s.rho);
    let dim = s.dim;
    let factor = XFactor::Samples(
        (0..grid.len())
            .map(|x| {
                let p = grid.x_point(x);
                let sum: f64 = p.iter().take(dim).map(|v| (s.omega * v).sin()).sum();
                Complex64::from_polar(1.0, lam * sum)
            })
            .collect(),
    );
    let shape = move |a: &Coord<f64>, b: &Coord<f64>| {
        let u = coord_norm(a, dim);
        let v = coord_norm(b, dim);
        let r2 = u * u + v * v;
        let w = psi(jj, r2.sqrt());
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let pw = s.phase_weight(u, v);
        let ph = if pw == 0.0 { 0.0 } else { pw * s.phase_of(b) };
        Complex64::from_polar(w * (1.0 + r2).powf(s.m / 2.0), ph)
    };
    Term { factor, shape: Box::new(shape) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exotic_terms_reassemble_the_symbol() {
        let g = Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
        for rho in [0.0, 0.5, 0.8] {
            let s = Exotic::new(1, -0.3, rho);
            let terms = Source::exotic(&s).terms(&g, None);
            for (x, a, b) in [(3usize, 5.0, -2.0), (40, -17.0, 9.0), (11, 0.0, 0.0), (63, 31.0, -32.0)] {
                let sum: Complex64 = terms.iter().map(|t| t.factor.at(x) * (t.shape)(&[a, 0.0], &[b, 0.0])).sum();
                let direct = s.eval(&g.x_point(x), &[a, 0.0], &[b, 0.0]);
                assert!((sum - direct).norm() < 1e-13, "rho {rho}: {sum} vs {direct}");
            }
        }
    }

    #[test]
    fn banding_a_constant() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        assert_eq!(XFactor::One.band(&g, 0, 2.0), XFactor::One);
        assert!(XFactor::One.band(&g, 1, 2.0).is_zero());
        let ones = XFactor::Samples(vec![Complex64::new(1.0, 0.0); 16]);
        let b = ones.band(&g, 0, 2.0);
        assert!((b.sup() - 1.0).abs() < 1e-14);
        assert!(ones.band(&g, 2, 2.0).sup() < 1e-15);
    }
}
