//! Piece-level estimates: derivative decay of `σ_{j,k,ν}`, pointwise kernel
//! domination and the square-function bound.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use bilab_core::grid::{coord_norm, peak_average, Coord, SampledFunction};
use bilab_core::operators::{uniform_project, BilinearOperator};
use bilab_core::partitions::{psi, DyadicFamily, Lattice, UniformFamily};
use bilab_core::symbols::{active_nu, MultiIndex, Symbol};
use bilab_core::{Function, Grid, LabError, Result};

use crate::fit::{Claim, FitReport, Variable};
use crate::fields::{band_limited, chirp};
use crate::grouped::{check_shell, extremal_ratio, Extremal, Grouping, SeparableOperator};
use crate::source::{Shape, Source, XFactor};

/// Relative level below which a measured sup counts as vanished.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Difference steps per box side length `2^{jρ}`.
pub const STEPS_PER_BOX: usize = 8;

fn taps(order: usize, h: f64) -> Vec<(i64, f64)> {
    match order {
        0 => vec![(0, 1.0)],
        1 => vec![(-1, -0.5 / h), (1, 0.5 / h)],
        _ => vec![(-1, 1.0 / (h * h)), (0, -2.0 / (h * h)), (1, 1.0 / (h * h))],
    }
}

/// `max_ν sup_{x,ξ,η} |∂^β_ξ ∂^γ_η σ_{j,k,ν}|`.
///
/// The frequency variables are sampled off the grid lattice with step
/// `2^{jρ}/STEPS_PER_BOX`, so the difference quotients resolve each box
/// equally well at every `j`. The x-factors are banded on the grid.
#[allow(clippy::too_many_arguments)]
pub fn piece_sup(
    source: Source<'_>,
    grid: &Grid,
    j: usize,
    k: usize,
    beta: MultiIndex,
    gamma: MultiIndex,
    rho: f64,
    phi: &UniformFamily,
    dyadic: &DyadicFamily,
) -> Result<f64> {
    check_shell(grid, j)?;
    let dim = grid.dim();
    if [beta, gamma].iter().any(|m| m.iter().any(|o| *o > 2)) {
        return Err(LabError::InvalidArgument("derivative orders are limited to 2 per variable".into()));
    }
    let s = 2f64.powf(j as f64 * rho);
    let h = s / STEPS_PER_BOX as f64;
    let steps = STEPS_PER_BOX as i64;
    // Terms sharing an x-factor are merged, so each frequency point needs one x-scan per distinct factor.
    let mut terms: Vec<(XFactor, Vec<Shape<'_>>)> = Vec::new();
    for t in source.terms(grid, Some(j..=j)) {
        let c = t.factor.band(grid, k, s);
        if c.is_zero() {
            continue;
        }
        match terms.iter_mut().find(|(d, _)| *d == c) {
            Some((_, shapes)) => shapes.push(t.shape),
            None => terms.push((c, vec![t.shape])),
        }
    }
    let bounds: Vec<f64> = terms.iter().map(|(c, _)| c.sup()).collect();
    let global = AtomicU64::new(0f64.to_bits());
    if terms.is_empty() {
        return Ok(0.0);
    }
    // Scalar coordinates (ξ_0, ξ_1, η_0, η_1) restricted to the active axes.
    let slots: Vec<(usize, usize)> = (0..2).flat_map(|v| (0..dim).map(move |a| (v, a))).collect();
    let orders: Vec<usize> = slots.iter().map(|&(v, a)| if v == 0 { beta[a] } else { gamma[a] }).collect();
    let mut stencil: Vec<(Vec<i64>, f64)> = vec![(vec![0; slots.len()], 1.0)];
    for (i, o) in orders.iter().enumerate() {
        stencil = stencil
            .into_iter()
            .flat_map(|(off, w)| {
                taps(*o, h).into_iter().map(move |(d, tw)| {
                    let mut off = off.clone();
                    off[i] = d;
                    (off, w * tw)
                })
            })
            .collect();
    }
    let nus = active_nu(j, rho, dyadic, dim);
    let len = grid.len();
    let sup = nus
        .par_iter()
        .map(|nu| {
            let lo: Vec<i64> = slots.iter().map(|&(v, a)| (nu[v][a] - 1) * steps - 1).collect();
            let hi: Vec<i64> = slots.iter().map(|&(v, a)| (nu[v][a] + 1) * steps + 1).collect();
            let ext: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
            let total: usize = ext.iter().product();
            let point = |flat: usize| -> Vec<i64> {
                let mut rem = flat;
                let mut q = vec![0; ext.len()];
                for i in (0..ext.len()).rev() {
                    q[i] = lo[i] + (rem % ext[i]) as i64;
                    rem /= ext[i];
                }
                q
            };
            let index = |q: &[i64]| -> usize { q.iter().zip(&lo).zip(&ext).fold(0, |acc, ((v, l), e)| acc * e + (v - l) as usize) };
            let coords = |q: &[i64]| -> ([f64; 2], [f64; 2]) {
                let mut a = [0.0; 2];
                let mut b = [0.0; 2];
                for (i, &(v, ax)) in slots.iter().enumerate() {
                    let val = q[i] as f64 * h;
                    if v == 0 {
                        a[ax] = val;
                    } else {
                        b[ax] = val;
                    }
                }
                (a, b)
            };
            let nf = [[nu[0][0] as f64, nu[0][1] as f64], [nu[1][0] as f64, nu[1][1] as f64]];
            let tables: Vec<Vec<Complex64>> = terms
                .iter()
                .map(|(_, shapes)| {
                    (0..total)
                        .map(|flat| {
                            let q = point(flat);
                            let (a, b) = coords(&q);
                            let r = (coord_norm(&a, dim).powi(2) + coord_norm(&b, dim).powi(2)).sqrt();
                            let w = psi(j, r)
                                * phi.phi(&[a[0] / s - nf[0][0], a[1] / s - nf[0][1]])
                                * phi.phi(&[b[0] / s - nf[1][0], b[1] / s - nf[1][1]]);
                            if w == 0.0 {
                                Complex64::new(0.0, 0.0)
                            } else {
                                shapes.iter().map(|sh| sh(&a, &b)).sum::<Complex64>() * w
                            }
                        })
                        .collect()
                })
                .collect();
            let mut best = 0.0f64;
            for flat in 0..total {
                let q = point(flat);
                if q.iter().zip(&lo).zip(&hi).any(|((v, l), h)| *v <= *l || *v >= *h) {
                    continue;
                }
                let d: Vec<Complex64> = tables
                    .iter()
                    .map(|tab| {
                        stencil.iter().fold(Complex64::new(0.0, 0.0), |acc, (off, w)| {
                            let p: Vec<i64> = q.iter().zip(off).map(|(a, b)| a + b).collect();
                            acc + tab[index(&p)] * *w
                        })
                    })
                    .collect();
                if d.iter().all(|z| z.norm() == 0.0) {
                    continue;
                }
                let bound: f64 = d.iter().zip(&bounds).map(|(z, b)| z.norm() * b).sum();
                if terms.len() == 1 {
                    best = best.max(bound);
                } else if bound > best.max(f64::from_bits(global.load(Ordering::Relaxed))) {
                    for x in 0..len {
                        let v: Complex64 = terms.iter().zip(&d).map(|((c, _), dv)| c.at(x) * dv).sum();
                        best = best.max(v.norm());
                    }
                }
            }
            global.fetch_max(best.to_bits(), Ordering::Relaxed);
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

/// Derivative-decay fits of `σ_{j,k,ν}` in `j` (at `k = 0`) and in `k` (at a fixed `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySpec {
    pub j_range: Vec<usize>,
    pub k_range: Vec<usize>,
    pub fixed_j: usize,
    pub beta: MultiIndex,
    pub gamma: MultiIndex,
    /// Decay orders `N` checked against the k-fit.
    pub n_list: Vec<f64>,
    pub rho: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub j_fit: FitReport,
    pub k_fits: Vec<FitReport>,
}

pub fn piece_decay_fit(
    source: Source<'_>,
    grid: &Grid,
    spec: &DecaySpec,
    phi: &UniformFamily,
    dyadic: &DyadicFamily,
) -> Result<DecayReport> {
    if spec.j_range.len() < 3 || spec.k_range.len() < 3 {
        return Err(LabError::InvalidArgument("degenerate range: a fit needs at least three points".into()));
    }
    let m = source.symbol().order();
    let dim = grid.dim();
    let order = (spec.beta.iter().take(dim).sum::<usize>() + spec.gamma.iter().take(dim).sum::<usize>()) as f64;
    let sup = |j: usize, k: usize| piece_sup(source, grid, j, k, spec.beta, spec.gamma, spec.rho, phi, dyadic);
    let jv = spec.j_range.iter().map(|j| sup(*j, 0)).collect::<Result<Vec<f64>>>()?;
    let tag = format!("decay beta={:?} gamma={:?} rho={}", &spec.beta[..dim], &spec.gamma[..dim], spec.rho);
    let j_fit = FitReport::fit(
        format!("{tag} vs j"),
        Variable::J,
        spec.j_range.iter().map(|j| *j as i64).collect(),
        &jv,
        None,
        m - spec.rho * order,
        spec.tolerance,
        Claim::Equal,
    )?;
    let kv = spec.k_range.iter().map(|k| sup(spec.fixed_j, *k)).collect::<Result<Vec<f64>>>()?;
    let top = kv.iter().cloned().fold(0.0, f64::max);
    let floor = if top > 0.0 { Some(top.log2() + NOISE_FLOOR.log2()) } else { None };
    let k_fits = spec
        .n_list
        .iter()
        .map(|n| {
            FitReport::fit(
                format!("{tag} vs k at j={} N={n}", spec.fixed_j),
                Variable::K,
                spec.k_range.iter().map(|k| *k as i64).collect(),
                &kv,
                floor,
                -n,
                spec.tolerance,
                Claim::AtMost,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayReport { j_fit, k_fits })
}

fn peak(grid: &Grid, v: &[Complex64], a: f64) -> Result<Vec<f64>> {
    let f = SampledFunction::physical(grid.clone(), v.to_vec())?;
    Ok(peak_average(&f, a)?.values().iter().map(|z| z.re).collect())
}

/// `sup_x |T_{σ_{j,k,ν}}(f,g)(x)| / (2^{jm} S_{2^{jρ}}f(x) S_{2^{jρ}}g(x))`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_ratio(
    source: Source<'_>,
    grid: &Grid,
    j: usize,
    k: usize,
    nu: [Lattice; 2],
    rho: f64,
    phi: &UniformFamily,
    f: &[Complex64],
    g: &[Complex64],
) -> Result<f64> {
    let op = SeparableOperator::grouped(source, grid, j, Some(k), rho, &Grouping::Single(nu), phi)?;
    let t = op.apply(f, g);
    let s = 2f64.powf(j as f64 * rho);
    let (sf, sg) = (peak(grid, f, s)?, peak(grid, g, s)?);
    let scale = 2f64.powf(j as f64 * source.symbol().order());
    Ok(t.iter()
        .zip(sf.iter().zip(&sg))
        .map(|(v, (a, b))| v.norm() / (scale * a * b).max(1e-300))
        .fold(0.0, f64::max))
}

/// `sup_x (Σ_ℓ |φ̃(2^{-jρ}D - ℓ)f(x)|²)^{1/2} / S_{2^{jρ}}(|f|²)(x)^{1/2}`.
pub fn square_function_ratio(f: &Function, j: usize, rho: f64, phi: &UniformFamily) -> Result<f64> {
    let grid = f.grid();
    let s = 2f64.powf(j as f64 * rho);
    let reach = (grid.max_freq() / s).ceil() as i64 + 2;
    let axis: Vec<i64> = (-reach..=reach).collect();
    let ells: Vec<Lattice> = if grid.dim() == 1 {
        axis.iter().map(|a| [*a, 0]).collect()
    } else {
        axis.iter().flat_map(|a| axis.iter().map(move |b| [*a, *b])).collect()
    };
    let len = grid.len();
    let parts: Vec<Vec<f64>> = ells
        .par_iter()
        .filter_map(|l| match uniform_project(f, j, *l, rho, phi) {
            Ok(p) => Some(Ok(p.values().iter().map(|z| z.norm_sqr()).collect())),
            Err(LabError::OutOfRange(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lhs = vec![0.0; len];
    for p in &parts {
        for (a, b) in lhs.iter_mut().zip(p) {
            *a += b;
        }
    }
    let sq: Vec<Complex64> = f.values().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let rhs = peak(grid, &sq, s)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| a.sqrt() / b.max(1e-300).sqrt()).fold(0.0, f64::max))
}

/// Samples of a sampled x-factor, for callers inspecting terms.
pub fn factor_samples(c: &XFactor, len: usize) -> Vec<Complex64> {
    (0..len).map(|x| c.at(x)).collect()
}

/// Test inputs `g` for shell `j`: chirps matched to the symbol's `η`-phase on
/// a few windows around `|η| ≈ 2^j`, the constant, and a band-limited field.
pub fn candidates(sigma: &dyn Symbol<f64>, grid: &Grid, j: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let jf = j as f64;
    let mut out = vec![vec![Complex64::new(1.0, 0.0); grid.len()]];
    if sigma.eta_phase(&[0.0, 0.0]).is_some() {
        let phase = |eta: &Coord<f64>| sigma.eta_phase(eta).unwrap_or(0.0);
        for (a, b) in [(jf - 0.5, jf + 0.5), (jf - 1.0, jf + 1.0), (jf - 1.0, jf)] {
            for positive in [true, false] {
                out.push(chirp(grid, &phase, 2f64.powf(a), 2f64.powf(b), positive));
            }
        }
        // Inflection points of φ make caustics, so also try each radial run where φ'' keeps its sign.
        for (lo, hi) in convex_runs(&phase, grid.dxi(), 2f64.powf(jf - 1.0), 2f64.powf(jf + 1.0)) {
            out.push(chirp(grid, &phase, lo, hi, true));
        }
    }
    out.push(band_limited(grid, 2f64.powf(jf - 1.0), 2f64.powf(jf + 1.0), seed));
    out
}

/// Maximal radial intervals of `[lo, hi]` on which the second difference of `φ` keeps one sign.
fn convex_runs(phase: &dyn Fn(&Coord<f64>) -> f64, h: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let q0 = (lo / h).ceil() as i64;
    let q1 = (hi / h).floor() as i64;
    let at = |q: i64| phase(&[q as f64 * h, 0.0]);
    let mut runs = Vec::new();
    let mut start = q0;
    let mut sign = 0.0;
    for q in q0..=q1 {
        let d2 = at(q + 1) - 2.0 * at(q) + at(q - 1);
        let sg = d2.signum();
        if sign != 0.0 && sg != sign {
            runs.push((start, q - 1));
            start = q;
        }
        sign = sg;
    }
    runs.push((start, q1));
    runs.into_iter()
        .filter(|(a, b)| b - a >= 4)
        .map(|(a, b)| (a as f64 * h, b as f64 * h))
        .collect()
}

/// A box on the `j`-th shell: `ν₁ = 0` and `ν₂` at `|η| ≈ 1.5·2^j`.
pub fn shell_nu(j: usize, rho: f64) -> [Lattice; 2] {
    let s = 2f64.powf(j as f64 * rho);
    [[0, 0], [(1.5 * 2f64.powi(j as i32) / s).round() as i64, 0]]
}

/// Settings shared by the grouped-estimate fits.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedSpec {
    pub j_range: Vec<usize>,
    pub k_range: Vec<usize>,
    pub fixed_j: usize,
    pub rho: f64,
    /// Power iterations per `g`.
    pub iterations: usize,
    /// Alternating `g` updates per candidate.
    pub rounds: usize,
    pub seed: u64,
    pub tolerance: f64,
}

fn group_size(g: &Grouping) -> usize {
    match g {
        Grouping::Lines(l) | Grouping::Diagonals(l) => l.len(),
        _ => 1,
    }
}

/// Largest `‖Σ_G T_{σ_{j,k,ν}}(f,g)‖₂ / (‖f‖₂‖g‖_∞)` found over the candidates.
pub fn grouped_extremal(
    source: Source<'_>,
    grid: &Grid,
    grouping: &Grouping,
    j: usize,
    k: Option<usize>,
    phi: &UniformFamily,
    spec: &GroupedSpec,
) -> Result<Extremal> {
    let op = SeparableOperator::grouped(source, grid, j, k, spec.rho, grouping, phi)?;
    let cands = candidates(source.symbol(), grid, j, spec.seed);
    Ok(extremal_ratio(&op, &cands, spec.iterations, spec.rounds, spec.seed))
}

/// Fit of the grouped `L²×L^∞→L²` ratio against `j`.
///
/// For `Lines`/`Diagonals` the ratio is divided by `|Λ|^{1/2}` before fitting.
#[allow(clippy::too_many_arguments)]
pub fn grouped_j_fit(
    experiment: &str,
    source: Source<'_>,
    grid: &Grid,
    grouping: &dyn Fn(usize) -> Grouping,
    k: Option<usize>,
    predicted: f64,
    claim: Claim,
    spec: &GroupedSpec,
    phi: &UniformFamily,
) -> Result<FitReport> {
    let mut values = Vec::with_capacity(spec.j_range.len());
    let mut sizes = Vec::new();
    for &j in &spec.j_range {
        let g = grouping(j);
        let size = group_size(&g);
        let e = grouped_extremal(source, grid, &g, j, k, phi, spec)?;
        values.push(e.ratio / (size as f64).sqrt());
        sizes.push(size);
    }
    let mut report = FitReport::fit(
        experiment.to_string(),
        Variable::J,
        spec.j_range.iter().map(|j| *j as i64).collect(),
        &values,
        None,
        predicted,
        spec.tolerance,
        claim,
    )?;
    if sizes.iter().any(|s| *s > 1) {
        let top = *sizes.iter().max().unwrap_or(&1);
        report = report.with_constant("max group size", top as f64);
    }
    Ok(report)
}

fn k_fits(experiment: &str, ks: &[usize], values: &[f64], n_list: &[f64], tolerance: f64) -> Result<Vec<FitReport>> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    let floor = if top > 0.0 { Some(top.log2() + NOISE_FLOOR.log2()) } else { None };
    n_list
        .iter()
        .map(|n| {
            FitReport::fit(
                format!("{experiment} N={n}"),
                Variable::K,
                ks.iter().map(|k| *k as i64).collect(),
                values,
                floor,
                -n,
                tolerance,
                Claim::AtMost,
            )
        })
        .collect()
}

/// Decay in `k` of the grouped ratio at `spec.fixed_j`.
pub fn grouped_k_fit(
    experiment: &str,
    source: Source<'_>,
    grid: &Grid,
    grouping: &Grouping,
    n_list: &[f64],
    spec: &GroupedSpec,
    phi: &UniformFamily,
) -> Result<Vec<FitReport>> {
    let j = spec.fixed_j;
    let values = spec
        .k_range
        .iter()
        .map(|k| Ok(grouped_extremal(source, grid, grouping, j, Some(*k), phi, spec)?.ratio))
        .collect::<Result<Vec<f64>>>()?;
    k_fits(experiment, &spec.k_range, &values, n_list, spec.tolerance)
}

/// Decay in `k` of [`pointwise_ratio`] at `spec.fixed_j` for the box [`shell_nu`].
pub fn pointwise_k_fit(
    source: Source<'_>,
    grid: &Grid,
    n_list: &[f64],
    spec: &GroupedSpec,
    phi: &UniformFamily,
) -> Result<Vec<FitReport>> {
    let j = spec.fixed_j;
    let nu = shell_nu(j, spec.rho);
    let jf = j as f64;
    let f = band_limited(grid, 0.0, 2f64.powf(jf + 1.0), spec.seed);
    let g = band_limited(grid, 2f64.powf(jf - 1.0), 2f64.powf(jf + 1.0), spec.seed + 1);
    let values = spec
        .k_range
        .iter()
        .map(|k| pointwise_ratio(source, grid, j, *k, nu, spec.rho, phi, &f, &g))
        .collect::<Result<Vec<f64>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::ContractViolation("pointwise ratio is not finite".into()));
    }
    k_fits(&format!("pointwise j={j}"), &spec.k_range, &values, n_list, spec.tolerance)
}
