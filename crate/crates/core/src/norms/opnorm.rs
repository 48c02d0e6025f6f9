use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::grid::{lp_norm, GridSpec};
use crate::norms::{dual_exponent, ExponentTriple};
use crate::operators::BilinearOperator;
use crate::scalar::{lit, Real};

type C<T> = Complex<T>;
/// A starting pair (f, g) of physical samples.
pub type StartPair<T> = (Vec<C<T>>, Vec<C<T>>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpnormConfig {
    /// Random starting pairs, in addition to the constant pair.
    pub trials: usize,
    /// Alternating maximisation rounds per start.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for OpnormConfig {
    fn default() -> Self {
        Self { trials: 4, rounds: 12, seed: 1 }
    }
}

/// Best ratio `‖T(f,g)‖_r / (‖f‖_p ‖g‖_q)` found, with the maximising pair.
#[derive(Clone, Debug)]
pub struct OpnormEstimate<T: Real> {
    pub ratio: T,
    pub f: Vec<C<T>>,
    pub g: Vec<C<T>>,
    /// Number of ratios evaluated.
    pub evaluations: usize,
}

/// Unit vector `w` of `L^s` maximising `Re ⟨v, w⟩`, where `v ∈ L^{s'}`.
pub fn norming_element<T: Real>(grid: &GridSpec<T>, v: &[C<T>], s: T) -> Vec<C<T>> {
    let zero = C::new(T::zero(), T::zero());
    let peak = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if peak == T::zero() {
        return vec![zero; v.len()];
    }
    if s.is_infinite() {
        return v.iter().map(|z| if z.norm() > T::zero() { z.conj() / z.norm() } else { zero }).collect();
    }
    if s == T::one() {
        let k = v.iter().position(|z| z.norm() == peak).unwrap();
        let mut w = vec![zero; v.len()];
        w[k] = v[k].conj() / (v[k].norm() * grid.cell_volume());
        return w;
    }
    let sp = dual_exponent(s);
    // scale out the peak to keep the powers in range
    let u: Vec<C<T>> = v.iter().map(|z| *z / peak).collect();
    let norm = lp_norm(grid, &u, sp).unwrap_or(T::one());
    let den = norm.powf(sp - T::one());
    u.iter()
        .map(|z| {
            let a = z.norm();
            if a == T::zero() {
                zero
            } else {
                z.conj() * a.powf(sp - lit(2.0)) / den
            }
        })
        .collect()
}

fn ratio<T: Real>(op: &dyn BilinearOperator<T>, e: &ExponentTriple<T>, f: &[C<T>], g: &[C<T>]) -> (T, Vec<C<T>>) {
    let grid = op.grid();
    let t = op.apply(f, g);
    let nf = lp_norm(grid, f, e.p).unwrap_or(T::zero());
    let ng = lp_norm(grid, g, e.q).unwrap_or(T::zero());
    let nt = lp_norm(grid, &t, e.r).unwrap_or(T::zero());
    let r = if nf > T::zero() && ng > T::zero() { nt / (nf * ng) } else { T::zero() };
    (r, t)
}

/// Alternating maximisation of `|⟨T(f,g), h⟩|` from the given starting pairs.
///
/// Every reported value is an attained ratio, hence a lower bound for the
/// discrete operator norm. For `r < 1` no dual step exists and only the
/// starting ratios are evaluated.
pub fn opnorm_lower_from<T: Real>(
    op: &dyn BilinearOperator<T>,
    e: &ExponentTriple<T>,
    starts: &[StartPair<T>],
    rounds: usize,
) -> Result<OpnormEstimate<T>> {
    let grid = op.grid();
    let len = grid.len();
    let mut best = OpnormEstimate { ratio: T::zero(), f: vec![], g: vec![], evaluations: 0 };
    let consider = |best: &mut OpnormEstimate<T>, r: T, f: &[C<T>], g: &[C<T>]| {
        best.evaluations += 1;
        if r > best.ratio || best.f.is_empty() {
            best.ratio = best.ratio.max(r);
            best.f = f.to_vec();
            best.g = g.to_vec();
        }
    };
    let rp = dual_exponent(e.r);
    for (f0, g0) in starts {
        if f0.len() != len || g0.len() != len {
            return invalid("starting pair does not match the grid");
        }
        let (mut f, mut g) = (f0.clone(), g0.clone());
        let (r, mut t) = ratio(op, e, &f, &g);
        consider(&mut best, r, &f, &g);
        if e.r < T::one() {
            continue;
        }
        for _ in 0..rounds {
            let h = norming_element(grid, &t, rp);
            let u = op.transpose1(&h, &g);
            let nf = norming_element(grid, &u, e.p);
            if nf.iter().all(|z| z.norm() == T::zero()) {
                break;
            }
            f = nf;
            let (r, t1) = ratio(op, e, &f, &g);
            consider(&mut best, r, &f, &g);
            let h = norming_element(grid, &t1, rp);
            let v = op.transpose2(&f, &h);
            let ng = norming_element(grid, &v, e.q);
            if ng.iter().all(|z| z.norm() == T::zero()) {
                break;
            }
            g = ng;
            let (r, t2) = ratio(op, e, &f, &g);
            consider(&mut best, r, &f, &g);
            t = t2;
        }
    }
    Ok(best)
}

/// Lower bound for `‖T‖_{L^p × L^q → L^r}` from the constant pair and
/// `cfg.trials` seeded complex Gaussian pairs.
///
/// Trials are drawn from one seeded stream, so raising `trials` only adds
/// starts and the estimate is nondecreasing in it.
pub fn opnorm_lower<T: Real>(
    op: &dyn BilinearOperator<T>,
    e: &ExponentTriple<T>,
    cfg: &OpnormConfig,
) -> Result<OpnormEstimate<T>> {
    let len = op.grid().len();
    let one = vec![C::new(T::one(), T::zero()); len];
    let mut starts = vec![(one.clone(), one)];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = || -> Vec<C<T>> {
        (0..len)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                C::new(lit(a), lit(b))
            })
            .collect()
    };
    for _ in 0..cfg.trials {
        let f = draw();
        let g = draw();
        starts.push((f, g));
    }
    opnorm_lower_from(op, e, &starts, cfg.rounds)
}
