//! Operators of grouped pieces `Σ_{ν ∈ G} σ_{j,k,ν}` and their L² × L^∞ → L² ratios.

use num_complex::Complex64;
use rayon::prelude::*;

use bilab_core::grid::{coord_norm, Coord, Direction};
use bilab_core::operators::{BilinearOperator, EvalPath};
use bilab_core::partitions::{psi, Lattice, UniformFamily};
use bilab_core::{Grid, LabError, Result};

use crate::fields::{l2_norm, sup_norm, white};
use crate::source::{Source, XFactor};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Nonzero entries `(ξ, η, ξ+η mod N, value)` of an x-independent symbol on the lattice.
#[derive(Clone, Debug)]
pub struct PairTable {
    entries: Vec<(u32, u32, u32, C)>,
}

impl PairTable {
    /// Tabulates `value` over labels with `max_a |q_a| ≤ radius` (all labels if `None`).
    pub fn build(grid: &Grid, radius: Option<i64>, value: &(dyn Fn(&Coord<f64>, &Coord<f64>) -> C + Sync)) -> Self {
        let half = (grid.points_per_axis() / 2) as i64;
        let r = radius.unwrap_or(half).min(half);
        let axis: Vec<i64> = (-r..=r).filter(|q| *q >= -half && *q < half).collect();
        let labels: Vec<[i64; 2]> = if grid.dim() == 1 {
            axis.iter().map(|a| [*a, 0]).collect()
        } else {
            axis.iter().flat_map(|a| axis.iter().map(move |b| [*a, b.to_owned()])).collect()
        };
        let entries = labels
            .par_iter()
            .map(|qa| {
                let xi = grid.freq_of_labels(*qa);
                let fa = grid.flat_of_labels(*qa) as u32;
                let mut row = Vec::new();
                for qb in &labels {
                    let v = value(&xi, &grid.freq_of_labels(*qb));
                    if v != ZERO {
                        let z = grid.flat_of_labels([qa[0] + qb[0], qa[1] + qb[1]]) as u32;
                        row.push((fa, grid.flat_of_labels(*qb) as u32, z, v));
                    }
                }
                row
            })
            .collect::<Vec<_>>()
            .concat();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn convolve(&self, fh: &[C], gh: &[C], out: &mut [C]) {
        for &(a, b, z, v) in &self.entries {
            out[z as usize] += v * fh[a as usize] * gh[b as usize];
        }
    }

    /// `C[ξ] = Σ_η σ ĝ(η) H(ξ+η)` (`first`) or `C[η] = Σ_ξ σ f̂(ξ) H(ξ+η)`.
    fn contract(&self, u: &[C], hh: &[C], first: bool, out: &mut [C]) {
        for &(a, b, z, v) in &self.entries {
            if first {
                out[a as usize] += v * u[b as usize] * hh[z as usize];
            } else {
                out[b as usize] += v * u[a as usize] * hh[z as usize];
            }
        }
    }
}

/// `T(f,g)(x) = Σ_t c_t(x) T_{b_t}(f,g)(x)` with each `b_t` tabulated.
pub struct SeparableOperator {
    grid: Grid,
    terms: Vec<(XFactor, PairTable)>,
}

impl SeparableOperator {
    pub fn new(grid: &Grid, terms: Vec<(XFactor, PairTable)>) -> Self {
        let terms = terms.into_iter().filter(|(c, t)| !c.is_zero() && !t.is_empty()).collect();
        Self { grid: grid.clone(), terms }
    }

    /// The whole symbol on the lattice.
    pub fn full(source: Source<'_>, grid: &Grid) -> Result<Self> {
        check_dim(source, grid)?;
        let terms = source
            .terms(grid, None)
            .into_iter()
            .map(|t| {
                let table = PairTable::build(grid, None, &*t.shape);
                (t.factor, table)
            })
            .collect();
        Ok(Self::new(grid, terms))
    }

    /// `Σ_{ν ∈ G} σ_{j,k,ν}`; `k = None` sums over all x-bands.
    pub fn grouped(
        source: Source<'_>,
        grid: &Grid,
        j: usize,
        k: Option<usize>,
        rho: f64,
        grouping: &Grouping,
        phi: &UniformFamily,
    ) -> Result<Self> {
        check_dim(source, grid)?;
        grouping.check()?;
        check_shell(grid, j)?;
        let s = 2f64.powf(j as f64 * rho);
        let dim = grid.dim();
        let radius = (2f64.powi(j as i32 + 1) / grid.dxi()).ceil() as i64 + 1;
        let terms = source
            .terms(grid, Some(j..=j))
            .into_iter()
            .filter_map(|t| {
                let factor = match k {
                    Some(k) => t.factor.band(grid, k, s),
                    None => t.factor,
                };
                if factor.is_zero() {
                    return None;
                }
                let shape = &t.shape;
                let value = move |a: &Coord<f64>, b: &Coord<f64>| {
                    let u = coord_norm(a, dim);
                    let v = coord_norm(b, dim);
                    let w = psi(j, (u * u + v * v).sqrt());
                    if w == 0.0 {
                        return ZERO;
                    }
                    let gw = grouping.weight(a, b, s, phi, dim);
                    if gw == 0.0 {
                        return ZERO;
                    }
                    shape(a, b) * (w * gw)
                };
                Some((factor, PairTable::build(grid, Some(radius), &value)))
            })
            .collect();
        Ok(Self::new(grid, terms))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn spectrum(&self, f: &[C]) -> Vec<C> {
        let mut v = f.to_vec();
        self.grid.fft(&mut v, Direction::Forward);
        let dv = self.grid.cell_volume();
        v.iter_mut().for_each(|z| *z *= dv);
        v
    }

    fn weight2(&self) -> f64 {
        self.grid.freq_weight() * self.grid.freq_weight()
    }

    fn transpose(&self, u: &[C], h: &[C], first: bool) -> Vec<C> {
        let uh = self.spectrum(u);
        let len = self.grid.len();
        let mut acc = vec![ZERO; len];
        for (c, table) in &self.terms {
            let mut hh: Vec<C> = (0..len).map(|x| c.at(x) * h[x]).collect();
            self.grid.fft(&mut hh, Direction::Inverse);
            table.contract(&uh, &hh, first, &mut acc);
        }
        self.grid.fft(&mut acc, Direction::Forward);
        let w = self.grid.cell_volume() * self.weight2();
        acc.iter_mut().for_each(|z| *z *= w);
        acc
    }
}

fn check_dim(source: Source<'_>, grid: &Grid) -> Result<()> {
    if source.dim() != grid.dim() {
        return Err(LabError::GridMismatch("symbol and grid dimensions differ".into()));
    }
    Ok(())
}

/// The `Ψ_j` annulus must fit inside the lattice.
pub fn check_shell(grid: &Grid, j: usize) -> Result<()> {
    if j == 0 {
        return Err(LabError::InvalidArgument("pieces start at j = 1".into()));
    }
    if 2f64.powi(j as i32 + 1) > grid.max_freq() {
        return Err(LabError::OutOfRange(format!("shell j = {j} exceeds the grid frequency range")));
    }
    Ok(())
}

impl BilinearOperator<f64> for SeparableOperator {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn path(&self) -> EvalPath {
        EvalPath::Tabulated
    }
    fn apply(&self, f: &[C], g: &[C]) -> Vec<C> {
        let fh = self.spectrum(f);
        let gh = self.spectrum(g);
        let len = self.grid.len();
        let w = self.weight2();
        let mut out = vec![ZERO; len];
        for (c, table) in &self.terms {
            let mut v = vec![ZERO; len];
            table.convolve(&fh, &gh, &mut v);
            self.grid.fft(&mut v, Direction::Inverse);
            for (x, o) in out.iter_mut().enumerate() {
                *o += c.at(x) * v[x] * w;
            }
        }
        out
    }
    fn transpose1(&self, h: &[C], g: &[C]) -> Vec<C> {
        self.transpose(g, h, true)
    }
    fn transpose2(&self, f: &[C], h: &[C]) -> Vec<C> {
        self.transpose(f, h, false)
    }
}

/// Which `ν = (ν₁, ν₂)` enter the sum.
#[derive(Clone, Debug, PartialEq)]
pub enum Grouping {
    Single([Lattice; 2]),
    /// Fixed `ν₁`, all `ν₂`.
    Line(Lattice),
    /// `ν₁ + ν₂ = μ`.
    Diagonal(Lattice),
    /// `ν₁ ∈ Λ`, all `ν₂`.
    Lines(Vec<Lattice>),
    /// `ν₁ + ν₂ ∈ Λ`.
    Diagonals(Vec<Lattice>),
    /// Every `ν`.
    Annulus,
}

fn shifted(t: &Coord<f64>, s: f64, nu: &Lattice) -> [f64; 2] {
    [t[0] / s - nu[0] as f64, t[1] / s - nu[1] as f64]
}

impl Grouping {
    fn check(&self) -> Result<()> {
        match self {
            Grouping::Lines(l) | Grouping::Diagonals(l) if l.is_empty() => {
                Err(LabError::InvalidArgument("empty group".into()))
            }
            _ => Ok(()),
        }
    }

    /// `Σ_{ν ∈ G} φ(ξ/s - ν₁) φ(η/s - ν₂)`.
    pub fn weight(&self, xi: &Coord<f64>, eta: &Coord<f64>, s: f64, phi: &UniformFamily, dim: usize) -> f64 {
        let diag = |mu: &Lattice| {
            let base = [(xi[0] / s).floor() as i64, (xi[1] / s).floor() as i64];
            let span: Vec<i64> = (-1..=1).collect();
            let mut acc = 0.0;
            for d0 in &span {
                for d1 in if dim == 1 { &span[1..2] } else { &span[..] } {
                    let n1 = if dim == 1 { [base[0] + d0, 0] } else { [base[0] + d0, base[1] + d1] };
                    let a = phi.phi(&shifted(xi, s, &n1));
                    if a != 0.0 {
                        let n2 = [mu[0] - n1[0], mu[1] - n1[1]];
                        acc += a * phi.phi(&shifted(eta, s, &n2));
                    }
                }
            }
            acc
        };
        match self {
            Grouping::Single(nu) => phi.phi(&shifted(xi, s, &nu[0])) * phi.phi(&shifted(eta, s, &nu[1])),
            Grouping::Line(n1) => phi.phi(&shifted(xi, s, n1)),
            Grouping::Lines(l) => l.iter().map(|n1| phi.phi(&shifted(xi, s, n1))).sum(),
            Grouping::Diagonal(mu) => diag(mu),
            Grouping::Diagonals(l) => l.iter().map(diag).sum(),
            Grouping::Annulus => 1.0,
        }
    }
}

/// `‖T(f,g)‖₂ / (‖f‖₂ ‖g‖_∞)`.
pub fn l2_linf_ratio(op: &dyn BilinearOperator<f64>, f: &[C], g: &[C]) -> Result<f64> {
    let grid = op.grid();
    let nf = l2_norm(grid, f);
    let ng = sup_norm(g);
    if !(nf > 0.0 && ng > 0.0) {
        return Err(LabError::InvalidArgument("inputs must be nonzero".into()));
    }
    Ok(l2_norm(grid, &op.apply(f, g)) / (nf * ng))
}

/// `‖T(f,g)‖₂ / (‖f‖₂‖g‖_∞)` for the grouped pieces.
#[allow(clippy::too_many_arguments)]
pub fn grouped_l2_scan(
    source: Source<'_>,
    grid: &Grid,
    grouping: &Grouping,
    j: usize,
    k: Option<usize>,
    rho: f64,
    phi: &UniformFamily,
    f: &[C],
    g: &[C],
) -> Result<f64> {
    let op = SeparableOperator::grouped(source, grid, j, k, rho, grouping, phi)?;
    l2_linf_ratio(&op, f, g)
}

/// Best pair found from one starting `g`.
#[derive(Clone, Debug)]
pub struct Extremal {
    pub ratio: f64,
    pub f: Vec<C>,
    pub g: Vec<C>,
    /// Index of the winning starting `g` among the candidates.
    pub candidate: usize,
}

/// Largest singular value of `f ↦ T(f, g)` divided by `‖g‖_∞`.
pub fn frozen_g_norm(op: &dyn BilinearOperator<f64>, g: &[C], iterations: usize, seed: u64) -> (f64, Vec<C>) {
    let grid = op.grid();
    let ng = sup_norm(g);
    if ng == 0.0 {
        return (0.0, vec![ZERO; grid.len()]);
    }
    let mut f = white(grid, seed);
    let mut best = 0.0f64;
    let mut best_f = f.clone();
    for _ in 0..iterations.max(1) {
        let nf = l2_norm(grid, &f);
        if nf == 0.0 {
            break;
        }
        f.iter_mut().for_each(|z| *z /= nf);
        let t = op.apply(&f, g);
        let r = l2_norm(grid, &t) / ng;
        if r > best {
            best = r;
            best_f = f.clone();
        }
        let hc: Vec<C> = t.iter().map(|z| z.conj()).collect();
        f = op.transpose1(&hc, g).into_iter().map(|z| z.conj()).collect();
    }
    (best, best_f)
}

/// Alternating ascent: the best `f` for the current `g`, then the unimodular
/// `g` that norms `⟨T(f,·), h⟩` with `h = conj T(f,g)/‖T(f,g)‖₂`.
///
/// Both steps can only raise the ratio, so the result is at least
/// [`frozen_g_norm`] of the starting `g`.
pub fn alternating_norm(
    op: &dyn BilinearOperator<f64>,
    g0: &[C],
    iterations: usize,
    rounds: usize,
    seed: u64,
) -> (f64, Vec<C>, Vec<C>) {
    let grid = op.grid();
    let mut g = g0.to_vec();
    let (mut best, mut f) = frozen_g_norm(op, &g, iterations, seed);
    let mut best_g = g.clone();
    for round in 0..rounds {
        let t = op.apply(&f, &g);
        let nt = l2_norm(grid, &t);
        if nt == 0.0 {
            break;
        }
        let h: Vec<C> = t.iter().map(|z| z.conj() / nt).collect();
        let v = op.transpose2(&f, &h);
        let next: Vec<C> = v.iter().map(|z| if z.norm() > 0.0 { z.conj() / z.norm() } else { ZERO }).collect();
        if sup_norm(&next) == 0.0 {
            break;
        }
        g = next;
        let (r, nf) = frozen_g_norm(op, &g, iterations, seed.wrapping_add(round as u64 + 1));
        if r > best {
            best = r;
            best_g = g.clone();
        }
        f = nf;
    }
    (best, f, best_g)
}

/// Maximum of [`alternating_norm`] over the starting `g`s.
pub fn extremal_ratio(
    op: &dyn BilinearOperator<f64>,
    candidates: &[Vec<C>],
    iterations: usize,
    rounds: usize,
    seed: u64,
) -> Extremal {
    let runs: Vec<(f64, Vec<C>, Vec<C>)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, g)| alternating_norm(op, g, iterations, rounds, seed.wrapping_add(i as u64)))
        .collect();
    let mut out = Extremal { ratio: 0.0, f: Vec::new(), g: Vec::new(), candidate: 0 };
    for (i, (r, f, g)) in runs.into_iter().enumerate() {
        if r > out.ratio || out.f.is_empty() {
            out = Extremal { ratio: r.max(out.ratio), f, g, candidate: i };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use bilab_core::operators::{pairing, FastOperator};
    use bilab_core::partitions::build_uniform;
    use bilab_core::symbols::{Exotic, Tabulated};

    fn torus(n: usize) -> Grid {
        Grid::new(1, n, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn full_multiplier_matches_fast_path() {
        let g = torus(32);
        let s = Exotic::multiplier(1, -0.25, 0.5);
        let op = SeparableOperator::full(Source::exotic(&s), &g).unwrap();
        let fast = FastOperator::new(&s, &g).unwrap();
        let (f, h) = (white(&g, 1), white(&g, 2));
        let a = op.apply(&f, &h);
        let b = fast.apply(&f, &h);
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10 * sup_norm(&b));
    }

    #[test]
    fn sampled_source_matches_exotic_source() {
        let g = torus(16);
        let s = Exotic::new(1, -0.25, 0.5);
        let a = SeparableOperator::full(Source::exotic(&s), &g).unwrap();
        let b = SeparableOperator::full(Source::Sampled(&s), &g).unwrap();
        let (f, h) = (white(&g, 3), white(&g, 4));
        let (u, v) = (a.apply(&f, &h), b.apply(&f, &h));
        let err = u.iter().zip(&v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10 * sup_norm(&u));
    }

    #[test]
    fn transposes_satisfy_duality() {
        let g = torus(32);
        let t = Tabulated::random(&g, 0.0, 0.5, false, 4, 9);
        let phi = build_uniform(1).unwrap();
        let op = SeparableOperator::grouped(Source::Sampled(&t), &g, 2, Some(1), 0.5, &Grouping::Annulus, &phi).unwrap();
        let (f, h, k) = (white(&g, 5), white(&g, 6), white(&g, 7));
        let base = pairing(&g, &op.apply(&f, &h), &k);
        let one = pairing(&g, &op.transpose1(&k, &h), &f);
        let two = pairing(&g, &op.transpose2(&f, &k), &h);
        assert!(base.norm() > 1e-6);
        assert!((base - one).norm() < 1e-10 * base.norm(), "{base} {one} {two}");
        assert!((base - two).norm() < 1e-10 * base.norm());
    }

    #[test]
    fn line_weights_sum_to_annulus() {
        let phi = build_uniform(1).unwrap();
        let s = 2.0;
        for (a, b) in [(3.3, -7.1), (0.0, 12.5), (-9.9, 4.0)] {
            let lines: f64 = (-10..=10).map(|n| Grouping::Line([n, 0]).weight(&[a, 0.0], &[b, 0.0], s, &phi, 1)).sum();
            let diags: f64 = (-20..=20).map(|n| Grouping::Diagonal([n, 0]).weight(&[a, 0.0], &[b, 0.0], s, &phi, 1)).sum();
            assert!((lines - 1.0).abs() < 1e-14 && (diags - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_group_is_rejected() {
        let g = torus(32);
        let s = Exotic::multiplier(1, -0.25, 0.5);
        let phi = build_uniform(1).unwrap();
        let r = SeparableOperator::grouped(Source::exotic(&s), &g, 2, Some(0), 0.5, &Grouping::Lines(vec![]), &phi);
        assert!(r.is_err());
        assert!(SeparableOperator::grouped(Source::exotic(&s), &g, 4, Some(0), 0.5, &Grouping::Annulus, &phi).is_err()
            && SeparableOperator::grouped(Source::exotic(&s), &g, 3, Some(0), 0.5, &Grouping::Annulus, &phi).is_ok());
    }
}
