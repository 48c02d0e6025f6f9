//! One function per experiment. Each returns what it measured and its hard assertions.

use std::time::Instant;

use num_complex::Complex64;

use bilab_core::grid::SampledFunction;
use bilab_core::norms::{
    critical_order, m0_max, m0_piecewise, opnorm_lower, region, weak_decompose, weak_from_pieces, OpnormConfig,
};
use bilab_core::operators::{BilinearOperator, DirectOperator, FastOperator};
use bilab_core::partitions::{build_dyadic, build_uniform, lambda_diag, lambda_line, psi};
use bilab_core::{Exponents, Grid, LabError, Rational};
use bilab_lab::fields::white;
use bilab_lab::lemmas::{grouped_j_fit, piece_decay_fit, shell_nu, DecaySpec, GroupedSpec};
use bilab_lab::rescale::rescale_invariance;
use bilab_lab::theorem::{theorem_ratio, Target};
use bilab_lab::{Claim, Grouping, SeparableOperator, Source};

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{num, Outcome, Table};

/// Why a suite could not produce an outcome.
#[derive(Debug)]
pub enum SuiteError {
    /// The configuration is unusable for this experiment (exit 3).
    Invalid(String),
    /// The computation failed (exit 1).
    Failed(String),
}

impl From<LabError> for SuiteError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::InvalidArgument(_) | LabError::OutOfRange(_) | LabError::GridMismatch(_) => {
                SuiteError::Invalid(e.to_string())
            }
            LabError::ContractViolation(_) => SuiteError::Failed(e.to_string()),
        }
    }
}

type Run = Result<Outcome, SuiteError>;

pub fn run(c: &ExperimentConfig) -> Run {
    match c.experiment {
        Experiment::PartitionsCheck => partitions_check(c),
        Experiment::DecayFit => decay_fit(c),
        Experiment::LambdaCount => lambda_count(c),
        Experiment::GroupedScan => grouped_scan(c),
        Experiment::Opnorm => opnorm(c),
        Experiment::CriticalTable => critical_table(c),
        Experiment::WeakDemo => weak_demo(c),
        Experiment::RescaleCheck => rescale_check(c),
        Experiment::TheoremSuite => theorem_suite(c),
        Experiment::BenchFastPath => bench_fast_path(c),
    }
}

fn grid(c: &ExperimentConfig) -> Result<Grid, SuiteError> {
    Ok(Grid::new(c.n, c.points, c.period)?)
}

fn target(c: &ExperimentConfig) -> Target {
    c.target.unwrap_or(Target::L2Linf)
}

/// `m` from the config, else the critical order of the target exponents.
fn order(c: &ExperimentConfig) -> Result<f64, SuiteError> {
    match c.m {
        Some(m) => Ok(m),
        None => {
            let (p, q) = target(c).exponents();
            Ok(critical_order(p, q, c.rho, c.n)?)
        }
    }
}

fn exponents(c: &ExperimentConfig, default: (f64, f64)) -> Result<Exponents, SuiteError> {
    let (p, q) = c.exponents.map(|e| (e.p, e.q)).unwrap_or(default);
    Ok(Exponents::new(p, q, c.rho)?)
}

/// Shells `j ≥ 1` whose annulus `2^{j+1}` the grid resolves.
fn resolved_shells(g: &Grid) -> Vec<usize> {
    (1..).take_while(|j| 2f64.powi(*j as i32 + 1) <= g.max_freq()).collect()
}

fn j_range(c: &ExperimentConfig, g: &Grid) -> Result<Vec<usize>, SuiteError> {
    let top = resolved_shells(g);
    let js: Vec<usize> = match c.j_range {
        Some([lo, hi]) => (lo..=hi).collect(),
        None => top.iter().copied().filter(|j| *j >= 2).collect(),
    };
    if let Some(j) = js.iter().find(|j| !top.contains(j)) {
        return Err(SuiteError::Invalid(format!(
            "shell j = {j} is not resolved: 2^(j+1) exceeds the largest grid frequency {:.3}",
            g.max_freq()
        )));
    }
    if js.len() < 3 {
        return Err(SuiteError::Invalid(format!(
            "a slope fit needs three shells; this grid resolves j <= {} (raise N or lower L, e.g. --L 6.283185307179586)",
            top.last().copied().unwrap_or(0)
        )));
    }
    Ok(js)
}

fn k_range(c: &ExperimentConfig) -> Vec<usize> {
    let [lo, hi] = c.k_range.unwrap_or([0, 4]);
    (lo..=hi).collect()
}

fn tol(v: Option<f64>, default: f64) -> f64 {
    v.unwrap_or(default)
}

fn partitions_check(c: &ExperimentConfig) -> Run {
    let jmax = c.jmax.unwrap_or(12);
    let limit = tol(c.tolerance.partition, 1e-12);
    let dy = build_dyadic(c.n, jmax)?;
    let phi = build_uniform(c.n)?;
    let mut out = Outcome::default();
    let top = 2f64.powi(jmax as i32 - 1);
    let samples = 20_000;
    let mut psi_err: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for i in 0..=samples {
        let r = top * i as f64 / samples as f64;
        let s: f64 = (0..=jmax).map(|j| psi(j, r)).sum();
        psi_err = psi_err.max((s - 1.0).abs());
        for j in 0..=jmax {
            let (lo, hi): (f64, f64) = dy.support(j);
            if r < lo || r > hi {
                leak = leak.max(dy.member_radial(j, r).abs());
            }
        }
    }
    let mut phi_err: f64 = 0.0;
    let side = if c.n == 1 { 4000 } else { 200 };
    for i in 0..side {
        let t = -25.0 + 50.0 * i as f64 / side as f64;
        let pts: Vec<[f64; 2]> = if c.n == 1 {
            vec![[t, 0.0]]
        } else {
            (0..side).map(|k| [t, -25.0 + 50.0 * k as f64 / side as f64]).collect()
        };
        for x in pts {
            let (a0, b0) = (x[0].floor() as i64, x[1].floor() as i64);
            let mut s = 0.0;
            for a in a0 - 2..=a0 + 2 {
                if c.n == 1 {
                    s += phi.phi(&[x[0] - a as f64, 0.0]);
                } else {
                    for b in b0 - 2..=b0 + 2 {
                        s += phi.phi(&[x[0] - a as f64, x[1] - b as f64]);
                    }
                }
            }
            phi_err = phi_err.max((s - 1.0).abs());
        }
    }
    out.scalar("dyadic_sum_error", psi_err);
    out.scalar("dyadic_support_leak", leak);
    out.scalar("uniform_sum_error", phi_err);
    out.check("dyadic partition of unity", psi_err <= limit, format!("max |sum - 1| = {}", num(psi_err)));
    out.check("dyadic supports", leak == 0.0, format!("max value outside the support = {}", num(leak)));
    out.check("uniform partition of unity", phi_err <= limit, format!("max |sum - 1| = {}", num(phi_err)));
    Ok(out)
}

fn decay_fit(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let js = j_range(c, &g)?;
    let m = order(c)?;
    let sigma = c.exotic(m);
    let phi = build_uniform(c.n)?;
    let dy = build_dyadic(2 * c.n, js.last().copied().unwrap_or(1) + 2)?;
    let mut out = Outcome::default();
    let mut table = Table::new(&["beta", "gamma", "variable", "point", "log2_value"]);
    for (beta, gamma) in [([0, 0], [0, 0]), ([1, 0], [0, 0]), ([0, 0], [1, 0])] {
        let spec = DecaySpec {
            j_range: js.clone(),
            k_range: k_range(c),
            fixed_j: *js.last().unwrap_or(&1),
            beta,
            gamma,
            n_list: vec![2.0, 4.0],
            rho: c.rho,
            tolerance: tol(c.tolerance.slope, 0.2),
        };
        let r = piece_decay_fit(Source::exotic(&sigma), &g, &spec, &phi, &dy)?;
        for f in std::iter::once(&r.j_fit).chain(r.k_fits.iter().take(1)) {
            for (p, v) in f.points.iter().zip(&f.log2_values) {
                table.push(vec![beta[0].to_string(), gamma[0].to_string(), format!("{:?}", f.variable).to_lowercase(), p.to_string(), num(*v)]);
            }
        }
        out.fit(r.j_fit);
        for f in r.k_fits {
            out.fit(f);
        }
    }
    out.scalar("m", m);
    out.table = Some(table);
    Ok(out)
}

fn lambda_count(c: &ExperimentConfig) -> Run {
    let jmax = c.jmax.unwrap_or(10);
    let n = c.n;
    let rho = c.rho;
    let dy = build_dyadic(n, jmax + 4)?;
    let uni = build_uniform(n)?;
    let line_cap = tol(c.tolerance.count_ratio, 8f64.powi(n as i32));
    // both bounds are products over the axes: 8^n and 16^n by default
    let diag_cap = line_cap * 2f64.powi(n as i32);
    let mut table = Table::new(&["set", "j", "k", "l", "count", "bound", "ratio"]);
    let (mut worst_line, mut worst_diag): (f64, f64) = (0.0, 0.0);
    for j in 1..=jmax {
        let js = j as f64 * rho;
        for l in 0..=j + 3 {
            let base = 1f64.max(2f64.powf((l as f64 - js) * n as f64));
            let count = lambda_line(j, l, rho, &dy, &uni)?.len() as f64;
            worst_line = worst_line.max(count / base);
            table.push(vec!["line".into(), j.to_string(), String::new(), l.to_string(), num(count), num(base), num(count / base)]);
            for k in 0..=(j as f64 * (1.0 - rho)).floor() as usize {
                let bound = base * 2f64.powi((k * n) as i32);
                let count = lambda_diag(j, k, l, rho, &dy)?.len() as f64;
                worst_diag = worst_diag.max(count / bound);
                table.push(vec!["diag".into(), j.to_string(), k.to_string(), l.to_string(), num(count), num(bound), num(count / bound)]);
            }
        }
    }
    let mut out = Outcome::default();
    out.scalar("max_line_ratio", worst_line);
    out.scalar("max_diag_ratio", worst_diag);
    out.check("line counts", worst_line <= line_cap, format!("max ratio {} (bound {})", num(worst_line), num(line_cap)));
    out.check("diagonal counts", worst_diag <= diag_cap, format!("max ratio {} (bound {})", num(worst_diag), num(diag_cap)));
    out.table = Some(table);
    Ok(out)
}

fn grouped_scan(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let js = j_range(c, &g)?;
    let m = order(c)?;
    let crit = critical_order(2.0, f64::INFINITY, c.rho, c.n)?;
    let sigma = c.exotic(m);
    let phi = build_uniform(c.n)?;
    let spec = GroupedSpec {
        j_range: js.clone(),
        k_range: k_range(c),
        fixed_j: *js.last().unwrap_or(&1),
        rho: c.rho,
        iterations: 30,
        rounds: 8,
        seed: c.seed,
        tolerance: tol(c.tolerance.slope, 0.2),
    };
    let src = Source::exotic(&sigma);
    let predicted = m - crit;
    let annulus = grouped_j_fit("annulus", src, &g, &|_| Grouping::Annulus, None, predicted, Claim::Equal, &spec, &phi)?;
    let rho = c.rho;
    let single = grouped_j_fit("single box", src, &g, &|j| Grouping::Single(shell_nu(j, rho)), None, predicted, Claim::AtMost, &spec, &phi)?;
    let mut table = Table::new(&["j", "annulus_log2", "single_log2"]);
    for (i, j) in js.iter().enumerate() {
        table.push(vec![j.to_string(), num(annulus.log2_values[i]), num(single.log2_values[i])]);
    }
    let mut out = Outcome::default();
    out.scalar("m", m);
    out.scalar("critical_m", crit);
    out.fit(annulus);
    out.fit(single);
    out.table = Some(table);
    Ok(out)
}

fn opnorm(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let m = order(c)?;
    let sigma = c.exotic(m);
    let e = exponents(c, (2.0, f64::INFINITY))?;
    let cfg = OpnormConfig { trials: c.trials.unwrap_or(4), rounds: 12, seed: c.seed };
    // the shell-wise expansion is exact and avoids the O(N^3) direct sum
    let op = SeparableOperator::full(Source::exotic(&sigma), &g)?;
    let est = opnorm_lower(&op, &e, &cfg)?;
    let mut out = Outcome::default();
    out.scalar("m", m);
    out.scalar("p", e.p);
    out.scalar("q", e.q);
    out.scalar("r", e.r);
    out.scalar("ratio", est.ratio);
    out.scalar("evaluations", est.evaluations as f64);
    out.check("finite ratio", est.ratio.is_finite() && est.ratio > 0.0, format!("lower bound {}", num(est.ratio)));
    Ok(out)
}

fn rational(v: Rational) -> String {
    num(*v.numer() as f64 / *v.denom() as f64)
}

fn critical_table(c: &ExperimentConfig) -> Run {
    let rho = Rational::approximate_float(c.rho).ok_or_else(|| SuiteError::Invalid("rho has no rational form".into()))?;
    let one = Rational::from_integer(1);
    let mut table = Table::new(&["inv_p", "inv_q", "region", "m0", "m_rho"]);
    let mut mismatches = 0;
    for i in 0..=30 {
        for k in 0..=30 {
            let (a, b) = (Rational::new(i, 20), Rational::new(k, 20));
            let m0 = m0_max(a, b, c.n)?;
            if m0 != m0_piecewise(a, b, c.n)? {
                mismatches += 1;
            }
            table.push(vec![rational(a), rational(b), format!("{:?}", region(&a, &b)), rational(m0), rational((one - rho) * m0)]);
        }
    }
    let mut out = Outcome::default();
    out.scalar("points", 961.0);
    out.check("max form equals piecewise form", mismatches == 0, format!("{mismatches} mismatches over 961 points"));
    out.table = Some(table);
    Ok(out)
}

fn weak_demo(c: &ExperimentConfig) -> Run {
    let w = c.weak;
    let g = grid(c)?;
    let f = SampledFunction::from_real_fn(&g, |x| {
        let norm = (x[0] * x[0] + if c.n == 2 { x[1] * x[1] } else { 0.0 }).sqrt();
        norm.max(0.5 * g.dx()).powf(-(c.n as f64) / w.p)
    });
    let pieces = weak_decompose(&f, 1.0, w.alpha)?;
    let quasi = bilab_core::norms::weak_quasinorm(&f, w.p)?;
    let bound = pieces.bound_check(quasi, w.p, w.r)?;
    let rec = weak_from_pieces(&pieces, bound.b * bound.constant, bound.beta, w.r, w.p)?;
    let mut table = Table::new(&["j", "level", "sup", "lr_norm"]);
    let mut exact_sup = true;
    for j in pieces.indices() {
        exact_sup &= pieces.sup_norm(j) <= pieces.level(j);
        table.push(vec![j.to_string(), num(pieces.level(j)), num(pieces.sup_norm(j)), num(pieces.lr_norm(j, w.r)?)]);
    }
    let exact = pieces.reconstruct().iter().zip(f.values()).all(|(a, b)| *a == b.re);
    let cap = tol(c.tolerance.weak_constant, 8.0);
    let mut out = Outcome::default();
    out.scalar("weak_quasinorm", quasi);
    out.scalar("beta", bound.beta);
    out.scalar("b", bound.b);
    out.scalar("decay_constant", bound.constant);
    out.scalar("j0", rec.j0 as f64);
    out.scalar("c", rec.c);
    out.scalar("measured", rec.measured);
    out.scalar("measured_over_c", rec.ratio);
    out.check("pieces reconstruct", exact, "sum of pieces equals the samples exactly");
    out.check("piece bounds", exact_sup, "sup of each piece at most its level");
    out.check("recombined constant", rec.ratio <= cap, format!("measured / C = {} (bound {})", num(rec.ratio), num(cap)));
    out.table = Some(table);
    Ok(out)
}

fn rescale_check(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let m = order(c)?;
    let sigma = c.exotic(m);
    let shells = resolved_shells(&g);
    let j = match c.j_range {
        Some([lo, _]) => lo,
        None => shells.last().copied().ok_or_else(|| SuiteError::Invalid("grid resolves no shell".into()))?.min(4),
    };
    let e = exponents(c, (2.0, 2.0))?;
    let r = rescale_invariance(&sigma, &g, j, &e, c.trials.unwrap_or(4), c.seed)?;
    let (pw, ra) = (tol(c.tolerance.pointwise, 1e-9), tol(c.tolerance.ratio, 0.05));
    let mut out = Outcome::default();
    out.scalar("j", j as f64);
    out.scalar("requested_scale", r.requested_scale);
    out.scalar("scale", r.scale);
    out.scalar("pointwise_error", r.pointwise_error);
    out.scalar("ratio_before", r.ratio_before);
    out.scalar("ratio_after", r.ratio_after);
    out.check("pointwise identity", r.pointwise_error <= pw, format!("error {} (bound {})", num(r.pointwise_error), num(pw)));
    out.check("norm agreement", r.disagreement() <= ra, format!("disagreement {} (bound {})", num(r.disagreement()), num(ra)));
    Ok(out)
}

fn theorem_suite(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let m = order(c)?;
    let sigma = c.exotic(m);
    let r = theorem_ratio(Source::exotic(&sigma), &g, target(c), c.trials.unwrap_or(50), c.seed)?;
    let mut out = Outcome::default();
    out.scalar("m", r.declared_m);
    out.scalar("critical_m", r.critical_m);
    out.scalar("ratio", r.ratio);
    out.scalar("inputs", r.inputs as f64);
    out.scalar("best_trial", r.best_trial as f64);
    out.check("finite sup ratio", r.ratio.is_finite(), format!("sup ratio {} over {} inputs", num(r.ratio), r.inputs));
    Ok(out)
}

fn bench_fast_path(c: &ExperimentConfig) -> Run {
    let g = grid(c)?;
    let m = order(c)?;
    let mut sigma = c.exotic(m);
    sigma.kappa = 0.0;
    let fast = FastOperator::new(&sigma, &g)?;
    let direct = DirectOperator::new(&sigma, &g)?;
    let (f, h) = (white(&g, c.seed), white(&g, c.seed + 1));
    let reps = c.trials.unwrap_or(3);
    let time = |op: &dyn BilinearOperator<f64>| {
        let mut best = f64::INFINITY;
        let mut last = Vec::new();
        for _ in 0..reps {
            let t = Instant::now();
            last = op.apply(&f, &h);
            best = best.min(t.elapsed().as_secs_f64());
        }
        (best, last)
    };
    let (tf, a) = time(&fast);
    let (td, b) = time(&direct);
    let top = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(&b).map(|(x, y): (&Complex64, &Complex64)| (x - y).norm()).fold(0.0, f64::max) / top.max(1e-300);
    let speedup = td / tf;
    let need = tol(c.tolerance.speedup, 10.0);
    let mut out = Outcome::default();
    out.scalar("relative_difference", diff);
    out.timings.insert("fast_seconds".into(), tf);
    out.timings.insert("direct_seconds".into(), td);
    out.timings.insert("speedup".into(), speedup);
    let mut table = Table::new(&["path", "N", "seconds"]);
    table.push(vec!["fast".into(), c.points.to_string(), num(tf)]);
    table.push(vec!["direct".into(), c.points.to_string(), num(td)]);
    out.check("paths agree", diff <= 1e-9, format!("relative difference {}", num(diff)));
    out.check("speedup", speedup >= need, format!("{speedup:.1}x (needs {need}x)"));
    out.table = Some(table);
    Ok(out)
}
