//! Dyadic and uniform partitions of unity, and the Λ index sets.

use crate::error::{invalid, Result};
use crate::scalar::{from_i64, lit, pow2, pow2i, Real};

/// A point of `Z^n`; the second slot is zero when `n = 1`.
pub type Lattice = [i64; 2];

/// `e^{-1/(1-t²)}` on `(-1, 1)`, zero elsewhere.
pub fn bump<T: Real>(t: T) -> T {
    let s = T::one() - t * t;
    if s <= T::zero() {
        T::zero()
    } else {
        (-T::one() / s).exp()
    }
}

/// Smooth step equal to 1 on `r ≤ 1` and to 0 on `r ≥ 2`.
pub fn smooth_step<T: Real>(r: T) -> T {
    let u = r - T::one();
    if u <= T::zero() {
        return T::one();
    }
    if u >= T::one() {
        return T::zero();
    }
    let a = bump(u);
    let b = bump(T::one() - u);
    a / (a + b)
}

/// `ψ_j` of the dyadic family as a function of the radius.
pub fn psi<T: Real>(j: usize, r: T) -> T {
    if j == 0 {
        smooth_step(r)
    } else {
        smooth_step(r / pow2i::<T>(j as i32)) - smooth_step(r / pow2i::<T>(j as i32 - 1))
    }
}

/// Littlewood–Paley family `ψ_0 = θ`, `ψ_j = θ(2^{-j}·) - θ(2^{-j+1}·)` on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicFamily {
    dim: usize,
    j_max: usize,
}

pub fn build_dyadic(d: usize, j_max: usize) -> Result<DyadicFamily> {
    if d == 0 {
        return invalid("dyadic family needs d >= 1");
    }
    if j_max == 0 {
        return invalid("dyadic family needs j_max >= 1");
    }
    Ok(DyadicFamily { dim: d, j_max })
}

impl DyadicFamily {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn theta<T: Real>(&self, r: T) -> T {
        smooth_step(r)
    }

    /// `ψ_j` as a function of `|ζ|`.
    pub fn member_radial<T: Real>(&self, j: usize, r: T) -> T {
        psi(j, r)
    }

    /// `ψ_j(ζ)`; only the first `d` entries of `zeta` are used.
    pub fn member<T: Real>(&self, j: usize, zeta: &[T]) -> T {
        let r = zeta[..self.dim].iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
        self.member_radial(j, r)
    }

    /// Radii `(inner, outer)` of the closed support of `ψ_j`.
    pub fn support<T: Real>(&self, j: usize) -> (T, T) {
        if j == 0 {
            (T::zero(), lit(2.0))
        } else {
            (pow2i(j as i32 - 1), pow2i(j as i32 + 1))
        }
    }
}

/// Uniform family `φ(ξ) = χ(ξ) / Σ_ν χ(ξ - ν)` with `χ` a tensor product of bumps.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformFamily {
    dim: usize,
}

pub fn build_uniform(n: usize) -> Result<UniformFamily> {
    if n != 1 && n != 2 {
        return invalid(format!("uniform family needs n in {{1,2}}, got {n}"));
    }
    Ok(UniformFamily { dim: n })
}

impl UniformFamily {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One-dimensional factor of `χ`.
    pub fn chi1<T: Real>(&self, t: T) -> T {
        bump(t)
    }

    /// One-dimensional factor of `φ`.
    pub fn phi1<T: Real>(&self, t: T) -> T {
        let num = bump(t);
        if num == T::zero() {
            return T::zero();
        }
        let base = t.floor();
        let mut den = T::zero();
        for d in -1..=2 {
            den = den + bump(t - (base + from_i64::<T>(d)));
        }
        num / den
    }

    /// `φ(ξ)`.
    pub fn phi<T: Real>(&self, xi: &[T]) -> T {
        xi[..self.dim].iter().fold(T::one(), |p, t| p * self.phi1(*t))
    }

    /// One-dimensional factor of the widened bump `φ̃`, equal to 1 on `[-1,1]` and supported in `[-2,2]`.
    pub fn widened1<T: Real>(&self, t: T) -> T {
        smooth_step(t.abs())
    }

    /// `φ̃(ξ)`.
    pub fn widened<T: Real>(&self, xi: &[T]) -> T {
        xi[..self.dim].iter().fold(T::one(), |p, t| p * self.widened1(*t))
    }
}

/// Whether the closed box `[lo, hi]` meets the closed annulus `r_in ≤ |ζ| ≤ r_out`.
pub fn box_meets_annulus<T: Real>(lo: &[T], hi: &[T], r_in: T, r_out: T) -> bool {
    let mut near = T::zero();
    let mut far = T::zero();
    for (a, b) in lo.iter().zip(hi) {
        let gap = if *a > T::zero() {
            *a
        } else if *b < T::zero() {
            -*b
        } else {
            T::zero()
        };
        near = near + gap * gap;
        let m = a.abs().max(b.abs());
        far = far + m * m;
    }
    near <= r_out * r_out && far >= r_in * r_in
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if rho >= T::zero() && rho < T::one() {
        Ok(())
    } else {
        invalid("rho must lie in [0, 1)")
    }
}

fn lattice_range(dim: usize, radius: i64) -> Vec<Lattice> {
    let mut out = Vec::new();
    for a in -radius..=radius {
        if dim == 1 {
            out.push([a, 0]);
        } else {
            for b in -radius..=radius {
                out.push([a, b]);
            }
        }
    }
    out
}

/// `Λ_{j,ℓ} = {ν : supp φ(2^{-jρ}· - ν) ∩ supp ψ_ℓ ≠ ∅}`.
pub fn lambda_line<T: Real>(
    j: usize,
    l: usize,
    rho: T,
    dyadic: &DyadicFamily,
    uniform: &UniformFamily,
) -> Result<Vec<Lattice>> {
    check_rho(rho)?;
    if j == 0 {
        return invalid("lambda_line needs j >= 1");
    }
    if dyadic.dim() != uniform.dim() {
        return invalid("dyadic family must live on R^n");
    }
    let dim = uniform.dim();
    let s = pow2(from_i64::<T>(j as i64) * rho);
    let (r_in, r_out) = dyadic.support::<T>(l);
    let radius = (r_out / s).ceil().to_i64().unwrap_or(i64::MAX) + 1;
    Ok(lattice_range(dim, radius)
        .into_iter()
        .filter(|nu| {
            let lo: Vec<T> = (0..dim).map(|a| s * (from_i64::<T>(nu[a]) - T::one())).collect();
            let hi: Vec<T> = (0..dim).map(|a| s * (from_i64::<T>(nu[a]) + T::one())).collect();
            box_meets_annulus(&lo, &hi, r_in, r_out)
        })
        .collect())
}

/// `Λ_{j,k,ℓ} = {μ : (2^{jρ}μ + 2^{jρ+k+2}Q) ∩ supp ψ_ℓ ≠ ∅}`.
pub fn lambda_diag<T: Real>(j: usize, k: usize, l: usize, rho: T, dyadic: &DyadicFamily) -> Result<Vec<Lattice>> {
    check_rho(rho)?;
    if j == 0 {
        return invalid("lambda_diag needs j >= 1");
    }
    let dim = dyadic.dim();
    if dim > 2 {
        return invalid("lambda_diag supports n <= 2");
    }
    let s = pow2(from_i64::<T>(j as i64) * rho);
    let half = s * pow2i::<T>(k as i32 + 2);
    let (r_in, r_out) = dyadic.support::<T>(l);
    let radius = ((r_out + half) / s).ceil().to_i64().unwrap_or(i64::MAX) + 1;
    Ok(lattice_range(dim, radius)
        .into_iter()
        .filter(|mu| {
            let lo: Vec<T> = (0..dim).map(|a| s * from_i64::<T>(mu[a]) - half).collect();
            let hi: Vec<T> = (0..dim).map(|a| s * from_i64::<T>(mu[a]) + half).collect();
            box_meets_annulus(&lo, &hi, r_in, r_out)
        })
        .collect())
}

/// Entry `1{ℓ ≤ j+1} max{1, 2^{(ℓ-jρ)n/2}} 2^{jm}` of the Schur sums.
pub fn schur_entry<T: Real>(j: usize, l: usize, m: T, rho: T, n: usize) -> T {
    if l > j + 1 {
        return T::zero();
    }
    let jj = from_i64::<T>(j as i64);
    let half_n = from_i64::<T>(n as i64) / lit(2.0);
    let e = (from_i64::<T>(l as i64) - jj * rho) * half_n;
    pow2(e.max(T::zero()) + jj * m)
}

/// `(sup_ℓ Σ_j a_{j,ℓ}, sup_j Σ_ℓ a_{j,ℓ})` over `1 ≤ j ≤ j_max`.
pub fn schur_sum_constants<T: Real>(m: T, rho: T, n: usize, j_max: usize) -> Result<(T, T)> {
    check_rho(rho)?;
    if j_max < 4 {
        return invalid("schur sums need j_max >= 4");
    }
    let mut col = vec![T::zero(); j_max + 2];
    let mut row_sup = T::zero();
    for j in 1..=j_max {
        let mut row = T::zero();
        for (l, c) in col.iter_mut().enumerate().take(j + 2) {
            let a = schur_entry(j, l, m, rho, n);
            row = row + a;
            *c = *c + a;
        }
        row_sup = row_sup.max(row);
    }
    let col_sup = col.into_iter().fold(T::zero(), T::max);
    Ok((col_sup, row_sup))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_profile() {
        assert_eq!(smooth_step(0.5f64), 1.0);
        assert_eq!(smooth_step(1.0f64), 1.0);
        assert_eq!(smooth_step(2.0f64), 0.0);
        assert!((smooth_step(1.5f64) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = smooth_step(1.0 + i as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn dyadic_examples() {
        let fam = build_dyadic(2, 8).unwrap();
        assert_eq!(fam.member(0, &[0.0f64, 0.0]), 1.0);
        assert_eq!(fam.member(3, &[32.0f64, 0.0]), 0.0);
        let s: f64 = (0..=8).map(|j| fam.member(j, &[0.6f64, 0.8])).sum();
        assert_eq!(s, 1.0);
        assert!(build_dyadic(0, 3).is_err());
        assert!(build_dyadic(1, 0).is_err());
    }

    #[test]
    fn uniform_examples() {
        let u = build_uniform(1).unwrap();
        assert_eq!(u.phi(&[1.5f64]), 0.0);
        let s: f64 = (-3..=3).map(|nu| u.phi(&[0.3 - nu as f64])).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(u.chi1(0.75f64) > 0.0);
        assert!(build_uniform(3).is_err());
    }

    #[test]
    fn widened_is_one_on_cube() {
        let u = build_uniform(2).unwrap();
        assert_eq!(u.widened(&[1.0f64, -0.9]), 1.0);
        assert_eq!(u.widened(&[2.0f64, 0.0]), 0.0);
    }

    #[test]
    fn annulus_box_test() {
        assert!(box_meets_annulus(&[1.0f64], &[3.0], 2.0, 4.0));
        assert!(box_meets_annulus(&[4.0f64], &[5.0], 2.0, 4.0));
        assert!(!box_meets_annulus(&[-1.0f64], &[1.0], 2.0, 4.0));
        assert!(box_meets_annulus(&[-1.0f64, 1.9], &[1.0, 2.0], 2.0, 4.0));
    }

    #[test]
    fn rho_validated() {
        let d = build_dyadic(1, 4).unwrap();
        let u = build_uniform(1).unwrap();
        assert!(lambda_line(2, 1, 1.0f64, &d, &u).is_err());
        assert!(lambda_diag(2, 0, 1, -0.1f64, &d).is_err());
    }

    #[test]
    fn schur_divergent_at_zero_order() {
        let (a, _) = schur_sum_constants(0.0f64, 0.0, 1, 8).unwrap();
        let (b, _) = schur_sum_constants(0.0f64, 0.0, 1, 16).unwrap();
        assert!(b > a + 7.0);
        assert!(schur_sum_constants(0.0f64, 0.0, 1, 3).is_err());
    }
}
