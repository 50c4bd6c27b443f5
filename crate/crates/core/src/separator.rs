//! Best linear separator of two heteroscedastic Gaussian components.
//!
//! Admissible separators are `bᵀx ≤ c` with
//!
//! ```text
//! b = (t·Σ₁ + (1−t)·Σ₂)⁻¹·(μ₂ − μ₁)
//! c = bᵀμ₁ + t·bᵀΣ₁b = bᵀμ₂ − (1−t)·bᵀΣ₂b
//! ```
//!
//! and the minimax one equalizes the standardized margins
//! `u₁ = (c − bᵀμ₁)/√(bᵀΣ₁b)` and `u₂ = (bᵀμ₂ − c)/√(bᵀΣ₂b)`, which amounts
//! to the root in `t` of `bᵀ[t²Σ₁ − (1−t)²Σ₂]b`. The root is located by the
//! halving-increment search starting at `t = 1/2`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{spd_solve, SymmetricMatrix};
use crate::mixture::GaussianComponent;
use crate::normal::std_normal_sf;

pub const MAX_ITERATIONS: usize = 200;

/// Default precision for the scale-free minimax criterion.
pub const DEFAULT_PRECISION: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SeparatorSolution {
    pub b: DVector<f64>,
    pub c: f64,
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    pub p1: f64,
    pub p2: f64,
    /// `max(p1, p2)`.
    pub p_minmax: f64,
    pub iterations: usize,
}

impl SeparatorSolution {
    /// `1 − p_minmax`.
    pub fn distinctness(&self) -> f64 {
        1.0 - self.p_minmax
    }
}

/// Direction `b` for the admissible separator indexed by `t`, together with
/// the minimax criterion `bᵀ[t²Σ₁ − (1−t)²Σ₂]b`.
pub fn separator_criterion(
    t: f64,
    c1: &GaussianComponent,
    c2: &GaussianComponent,
) -> Result<(f64, DVector<f64>)> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("t must lie in (0, 1), got {t}")));
    }
    check_pair(c1, c2)?;
    let (s1, s2) = (c1.covariance().as_matrix(), c2.covariance().as_matrix());
    let combined = SymmetricMatrix::new(s1 * t + s2 * (1.0 - t))?;
    let delta = c2.mean() - c1.mean();
    let b = spd_solve(&combined, &delta)?;
    let crit = t * t * c1.covariance().quadratic_form(&b)
        - (1.0 - t) * (1.0 - t) * c2.covariance().quadratic_form(&b);
    Ok((crit, b))
}

fn check_pair(c1: &GaussianComponent, c2: &GaussianComponent) -> Result<()> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            found: c2.dim(),
        });
    }
    Ok(())
}

/// Misclassification probabilities `(P₁(bᵀx > c), P₂(bᵀx ≤ c))` of the rule
/// `bᵀx ≤ c → component 1`.
pub fn misclassification_probabilities(
    b: &DVector<f64>,
    c: f64,
    c1: &GaussianComponent,
    c2: &GaussianComponent,
) -> Result<(f64, f64)> {
    let (u1, u2) = margins(b, c, c1, c2)?;
    Ok((std_normal_sf(u1), std_normal_sf(u2)))
}

fn margins(
    b: &DVector<f64>,
    c: f64,
    c1: &GaussianComponent,
    c2: &GaussianComponent,
) -> Result<(f64, f64)> {
    check_pair(c1, c2)?;
    if b.len() != c1.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            found: b.len(),
        });
    }
    let var1 = c1.covariance().quadratic_form(b);
    let var2 = c2.covariance().quadratic_form(b);
    if !(var1 > 0.0 && var2 > 0.0) {
        return Err(Error::ZeroDirection);
    }
    let u1 = (c - b.dot(c1.mean())) / var1.sqrt();
    let u2 = (b.dot(c2.mean()) - c) / var2.sqrt();
    Ok((u1, u2))
}

/// Threshold `c = bᵀμ₁ + t·bᵀΣ₁b` of the admissible separator at `t`.
pub fn admissible_threshold(t: f64, b: &DVector<f64>, c1: &GaussianComponent) -> f64 {
    b.dot(c1.mean()) + t * c1.covariance().quadratic_form(b)
}

/// Minimax linear separator of `c1` and `c2`.
///
/// `prec` bounds the criterion after dividing by `bᵀ(Σ₁+Σ₂)b`, which makes
/// it independent of the scale of the data.
pub fn best_linear_separator(
    c1: &GaussianComponent,
    c2: &GaussianComponent,
    prec: f64,
) -> Result<SeparatorSolution> {
    check_pair(c1, c2)?;
    if !(prec > 0.0) {
        return Err(Error::InvalidArgument(format!("precision must be > 0, got {prec}")));
    }
    if (c2.mean() - c1.mean()).norm() <= 1e-12 {
        return Err(Error::EqualMeans);
    }

    let mut t = 0.5;
    let mut incr = 0.25;
    let mut found = None;
    for iteration in 1..=MAX_ITERATIONS {
        let (crit, b) = separator_criterion(t, c1, c2)?;
        let norm = c1.covariance().quadratic_form(&b) + c2.covariance().quadratic_form(&b);
        let scaled = crit / norm;
        if scaled.abs() <= prec {
            found = Some((b, iteration));
            break;
        }
        if scaled > prec {
            t -= incr;
        } else {
            t += incr;
        }
        incr *= 0.5;
    }
    let (b, iterations) = found.ok_or(Error::NoConvergence(MAX_ITERATIONS))?;

    let c = admissible_threshold(t, &b, c1);
    let c_alt = b.dot(c2.mean()) - (1.0 - t) * c2.covariance().quadratic_form(&b);
    debug_assert!((c - c_alt).abs() <= 1e-8 * c.abs().max(c_alt.abs()).max(1.0));

    let (u1, u2) = margins(&b, c, c1, c2)?;
    let (p1, p2) = (std_normal_sf(u1), std_normal_sf(u2));
    Ok(SeparatorSolution {
        b,
        c,
        t,
        u1,
        u2,
        p1,
        p2,
        p_minmax: p1.max(p2),
        iterations,
    })
}
