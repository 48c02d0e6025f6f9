//! Function-space norms, the critical order and operator-norm lower bounds.

mod opnorm;
mod spaces;
mod weak;

use num_traits::{FromPrimitive, Num};

use crate::error::{contract, invalid, Result};
use crate::scalar::{lit, Real};
use crate::tolerances;

pub use opnorm::{norming_element, opnorm_lower, opnorm_lower_from, OpnormConfig, OpnormEstimate, StartPair};
pub use spaces::{bmo_norm, gaussian_mollifier, hardy_quasinorm, weak_quasinorm};
pub use weak::{weak_decompose, weak_from_pieces, WeakBound, WeakPieces, WeakRecombination};

/// Exponents `p, q, r` with `1/p + 1/q = 1/r`, plus `ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentTriple<T: Real> {
    pub p: T,
    pub q: T,
    pub r: T,
    pub rho: T,
}

fn recip<T: Real>(p: T) -> T {
    if p.is_infinite() {
        T::zero()
    } else {
        p.recip()
    }
}

/// Dual exponent `p'`, with `1' = ∞` and `∞' = 1`.
pub fn dual_exponent<T: Real>(p: T) -> T {
    if p == T::one() {
        T::infinity()
    } else if p.is_infinite() {
        T::one()
    } else {
        p / (p - T::one())
    }
}

impl<T: Real> ExponentTriple<T> {
    /// Builds the triple from `p` and `q`, with `r` from the Hölder relation.
    pub fn new(p: T, q: T, rho: T) -> Result<Self> {
        check_pq(p, q)?;
        check_rho(rho)?;
        let s = recip(p) + recip(q);
        let r = if s == T::zero() { T::infinity() } else { s.recip() };
        Ok(Self { p, q, r, rho })
    }

    /// Checks a fully specified triple.
    pub fn checked(p: T, q: T, r: T, rho: T) -> Result<Self> {
        check_pq(p, q)?;
        check_rho(rho)?;
        if r.is_nan() || r <= T::zero() {
            return invalid("r must be positive");
        }
        let gap = (recip(p) + recip(q) - recip(r)).abs();
        if gap > lit(tolerances::HOLDER) {
            return invalid(format!("1/p + 1/q - 1/r = {gap:e}"));
        }
        Ok(Self { p, q, r, rho })
    }
}

fn check_pq<T: Real>(p: T, q: T) -> Result<()> {
    if p.is_nan() || q.is_nan() || p <= T::zero() || q <= T::zero() {
        return invalid("p and q must lie in (0, ∞]");
    }
    Ok(())
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if !(rho >= T::zero() && rho < T::one()) {
        return invalid("rho must lie in [0, 1)");
    }
    Ok(())
}

/// One of the five regions of the `(1/p, 1/q)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    J0,
    J1,
    J2,
    J3,
    J4,
}

/// Field operations needed by the critical order; implemented by floats and exact rationals.
pub trait OrderField: Num + PartialOrd + Clone + FromPrimitive {}
impl<T: Num + PartialOrd + Clone + FromPrimitive> OrderField for T {}

fn half<F: OrderField>() -> F {
    F::one() / (F::one() + F::one())
}

fn max_of<F: OrderField>(v: [F; 5]) -> F {
    let mut it = v.into_iter();
    let mut m = it.next().unwrap();
    for x in it {
        if x > m {
            m = x;
        }
    }
    m
}

fn check_recip<F: OrderField>(a: &F) -> Result<()> {
    if *a < F::zero() {
        return invalid("reciprocal exponents must be nonnegative");
    }
    Ok(())
}

/// `-n max{1/2, 1/p, 1/q, 1 - 1/r, 1/r - 1/2}` from reciprocals `a = 1/p`, `b = 1/q`.
pub fn m0_max<F: OrderField>(a: F, b: F, n: usize) -> Result<F> {
    check_recip(&a)?;
    check_recip(&b)?;
    let s = a.clone() + b.clone();
    let m = max_of([half(), a, b, F::one() - s.clone(), s - half()]);
    Ok(F::zero() - F::from_usize(n).unwrap() * m)
}

pub fn region<F: OrderField>(a: &F, b: &F) -> Region {
    let h: F = half();
    match (*a <= h, *b <= h) {
        (true, true) if a.clone() + b.clone() <= h => Region::J0,
        (true, true) => Region::J1,
        (true, false) => Region::J2,
        (false, true) => Region::J3,
        (false, false) => Region::J4,
    }
}

/// The piecewise form of `m₀` over the regions `J₀, ..., J₄`.
pub fn m0_piecewise<F: OrderField>(a: F, b: F, n: usize) -> Result<F> {
    check_recip(&a)?;
    check_recip(&b)?;
    let nn = F::from_usize(n).unwrap();
    let s = a.clone() + b.clone();
    let v = match region(&a, &b) {
        Region::J0 => F::one() - s,
        Region::J1 => half(),
        Region::J2 => b,
        Region::J3 => a,
        Region::J4 => s - half(),
    };
    Ok(F::zero() - nn * v)
}

/// `m_ρ = (1-ρ) m₀` from reciprocals; both forms are evaluated and must agree exactly.
pub fn critical_order_recip<F: OrderField>(a: F, b: F, rho: F, n: usize) -> Result<F> {
    if rho < F::zero() || rho >= F::one() {
        return invalid("rho must lie in [0, 1)");
    }
    let m = m0_max(a.clone(), b.clone(), n)?;
    if m != m0_piecewise(a, b, n)? {
        return contract("max and piecewise forms of the critical order disagree");
    }
    Ok((F::one() - rho) * m)
}

/// `m_ρ(p, q)` for `p, q ∈ (0, ∞]`.
pub fn critical_order<T: Real>(p: T, q: T, rho: T, n: usize) -> Result<T> {
    check_pq(p, q)?;
    critical_order_recip(recip(p), recip(q), rho, n)
}
