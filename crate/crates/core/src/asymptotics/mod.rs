//! Closed-form potential theory and scaling analysis: the sub-Gaussian rate
//! function, the on-diagonal clock integral `f`, Green functions and ball
//! capacities of Brownian motion, recurrence regime classification, and the
//! iterated-logarithm normalizers.
//!
//! Everything here is pure and reentrant.  The heat kernel convention is
//! `p(t,x,y) = (2 pi t)^(-d/2) exp(-|x-y|^2 / 2t)` (generator Laplacian/2);
//! all capacities and growth constants in the crate use it.

pub mod numeric;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::space::ScalingFunction;

use numeric::{adaptive_simpson, golden_section_max};

/// Relative tolerance for the quadrature fallbacks.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Sub-Gaussian rate function `Psi(r, t) = sup_{s>0} (r/s - t/phi(s))`.
///
/// Closed form for a pure power `phi(s) = c s^b` with `b > 1`: the optimum
/// sits at `s* = (b t / (c r))^(1/(b-1))` and the value is
/// `(r / s*) (1 - 1/b)`.  Piecewise-power shapes are maximized per branch
/// (each branch is unimodal) by golden section on `log s`.  Never negative;
/// `+inf` when an exponent is at most 1 and `r > 0`, since the supremum
/// then diverges.
pub fn psi(phi: &ScalingFunction, r: f64, t: f64) -> f64 {
    assert!(t > 0.0, "psi requires t > 0");
    if r <= 0.0 {
        return 0.0;
    }
    match *phi {
        ScalingFunction::PurePower {
            exponent,
            prefactor,
        } => pure_power_psi(r, t, exponent, prefactor, None),
        ScalingFunction::TwoRegime {
            inner_exponent,
            outer_exponent,
            prefactor,
        } => {
            let inner = pure_power_psi(r, t, inner_exponent, prefactor, Some((1e-12, 1.0)));
            let outer = pure_power_psi(r, t, outer_exponent, prefactor, Some((1.0, 1e12)));
            inner.max(outer).max(0.0)
        }
    }
}

/// Supremum of `r/s - t/(c s^b)` over `s` in `range` (whole axis if `None`).
fn pure_power_psi(r: f64, t: f64, b: f64, c: f64, range: Option<(f64, f64)>) -> f64 {
    if b <= 1.0 {
        match range {
            // On a branch bounded away from 0 the sup sits at an endpoint.
            Some((lo, hi)) => {
                let g = |s: f64| r / s - t / (c * s.powf(b));
                return g(lo).max(g(hi)).max(0.0);
            }
            None => return f64::INFINITY,
        }
    }
    let s_star = (b * t / (c * r)).powf(1.0 / (b - 1.0));
    let value_at = |s: f64| r / s - t / (c * s.powf(b));
    match range {
        None => (value_at(s_star)).max(0.0),
        Some((lo, hi)) => {
            let s = s_star.clamp(lo, hi);
            value_at(s).max(0.0)
        }
    }
}

/// Numeric supremum used as the oracle for `psi`; bracketed golden section
/// on `log s`, run on each power branch.
pub fn psi_numeric(phi: &ScalingFunction, r: f64, t: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let objective = |ln_s: f64| {
        let s = ln_s.exp();
        r / s - t / phi.value(s)
    };
    let sup = match *phi {
        ScalingFunction::PurePower { .. } => {
            golden_section_max(&objective, (1e-9f64).ln(), (1e9f64).ln(), 1e-12)
        }
        ScalingFunction::TwoRegime { .. } => {
            let lhs = golden_section_max(&objective, (1e-9f64).ln(), 0.0, 1e-12);
            let rhs = golden_section_max(&objective, 0.0, (1e9f64).ln(), 1e-12);
            lhs.max(rhs)
        }
    };
    sup.max(0.0)
}

/// The clock integral `f(t) = int_1^t ds / V(phi^{-1}(s))`.
///
/// For pure powers the integrand is `s^(-a/b)` up to a constant and the
/// integral is elementary; otherwise adaptive quadrature split at the
/// regime-switch point.
pub fn f_integral(volume: &ScalingFunction, phi: &ScalingFunction, t: f64) -> f64 {
    assert!(t >= 1.0, "f_integral requires t >= 1");
    if t == 1.0 {
        return 0.0;
    }
    match (volume, phi) {
        (
            &ScalingFunction::PurePower {
                exponent: alpha,
                prefactor: cv,
            },
            &ScalingFunction::PurePower {
                exponent: beta,
                prefactor: cp,
            },
        ) => {
            let gamma_exp = alpha / beta;
            let kappa = cv * cp.powf(-gamma_exp);
            let base = if (gamma_exp - 1.0).abs() < 1e-12 {
                t.ln()
            } else {
                (t.powf(1.0 - gamma_exp) - 1.0) / (1.0 - gamma_exp)
            };
            base / kappa
        }
        _ => {
            let integrand = |s: f64| 1.0 / volume.value(phi.inverse(s));
            let kink = phi.value(1.0);
            if kink > 1.0 && kink < t {
                adaptive_simpson(&integrand, 1.0, kink, QUAD_REL_TOL)
                    + adaptive_simpson(&integrand, kink, t, QUAD_REL_TOL)
            } else {
                adaptive_simpson(&integrand, 1.0, t, QUAD_REL_TOL)
            }
        }
    }
}

/// Green function of Brownian motion on R^d (d >= 3) at separation `r`:
/// the time integral of the heat kernel,
/// `Gamma(d/2 - 1) / (2 pi^(d/2)) * r^(2-d)`.
pub fn green_bm(dim: usize, r: f64) -> Result<f64> {
    if dim < 3 {
        return Err(Error::DimensionTooLow { need: 3, got: dim });
    }
    if !(r > 0.0) {
        return Err(Error::invalid("r", "must be strictly positive"));
    }
    let d = dim as f64;
    Ok(gamma(d / 2.0 - 1.0) / (2.0 * std::f64::consts::PI.powf(d / 2.0)) * r.powf(2.0 - d))
}

/// Green function truncated at horizon `T`: `int_0^T p(t,x,y) dt`, exact via
/// the upper regularized incomplete gamma.
pub fn green_bm_truncated(dim: usize, r: f64, horizon: f64) -> Result<f64> {
    let full = green_bm(dim, r)?;
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon", "must be strictly positive"));
    }
    let d = dim as f64;
    let z = r * r / (2.0 * horizon);
    Ok(full * gamma_ur(d / 2.0 - 1.0, z))
}

/// Newtonian capacity of the closed ball of radius `eps` (d >= 3) under the
/// half-Laplacian convention: the reciprocal of the Green function at
/// separation `eps`.
pub fn capacity_ball(dim: usize, eps: f64) -> Result<f64> {
    Ok(1.0 / green_bm(dim, eps)?)
}

/// The dilation ratio `2^((d-2)/2)` between the per-time sausage constants
/// of the factor-4 and factor-1 homogeneous radial spaces.
pub fn scaled_limit_ratio(dim: usize) -> f64 {
    2f64.powf((dim as f64 - 2.0) / 2.0)
}

/// Lebesgue volume of the d-ball of radius `r`.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    let d = dim as f64;
    std::f64::consts::PI.powf(d / 2.0) / gamma(d / 2.0 + 1.0) * r.powf(d)
}

/// Evaluate the two-sided heat-kernel bounds at separation `r`, time `t`
/// and ball measure `mu_ball = mu(B(x, phi^{-1}(t)))`.  The lower bound
/// applies when `r <= c6 phi^{-1}(t)`; `None` outside that range.
pub fn hk_lower_bound(params: &crate::space::HeatKernelParams, mu_ball: f64, r: f64, t: f64) -> Option<f64> {
    let reach = params.c6 * params.time_scale.inverse(t);
    if r <= reach {
        Some(params.c5 / mu_ball)
    } else {
        None
    }
}

/// The sub-Gaussian upper bound `c7 exp(-c8 Psi(r, t)) / mu_ball`.
pub fn hk_upper_bound(params: &crate::space::HeatKernelParams, mu_ball: f64, r: f64, t: f64) -> f64 {
    params.c7 * (-params.c8 * psi(&params.time_scale, r, t)).exp() / mu_ball
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Transient,
    WeaklyRecurrent,
    StronglyRecurrent,
}

/// Symbolic shape of `f(t)` for Ahlfors exponent `alpha` and walk exponent
/// `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FAsymptotic {
    Constant,
    LogT,
    /// `t^(1 - alpha/beta)`.
    Power { exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub f_asymptotic: FAsymptotic,
    pub alpha: f64,
    pub beta: f64,
}

/// Classify recurrence by comparing the mass exponent with the walk
/// exponent.
pub fn classify_regime(alpha: f64, beta: f64) -> RegimeClassification {
    let (regime, f_asymptotic) = if alpha > beta {
        (Regime::Transient, FAsymptotic::Constant)
    } else if alpha == beta {
        (Regime::WeaklyRecurrent, FAsymptotic::LogT)
    } else {
        (
            Regime::StronglyRecurrent,
            FAsymptotic::Power {
                exponent: 1.0 - alpha / beta,
            },
        )
    };
    RegimeClassification {
        regime,
        f_asymptotic,
        alpha,
        beta,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialLimit {
    /// The range of the path is null: the small-time integral diverges.
    Zero,
    /// The range carries positive measure.
    Positive,
}

/// Small-radius limit of the sausage volume at fixed time: `Zero` exactly
/// when `int_0^1 ds / V(phi^{-1}(s))` diverges, i.e. when the inner
/// exponents satisfy `alpha >= beta`.
pub fn radial_limit(volume: &ScalingFunction, phi: &ScalingFunction) -> RadialLimit {
    if volume.inner_exponent() >= phi.inner_exponent() {
        RadialLimit::Zero
    } else {
        RadialLimit::Positive
    }
}

/// Almost-sure normalizers at time `t`: the limsup normalizer
/// `t / f(t / loglog t)` and the liminf normalizer
/// `min(V(phi^{-1}(t / loglog t)), t / f(t / loglog t))`.
pub fn lil_normalizers(
    volume: &ScalingFunction,
    phi: &ScalingFunction,
    t: f64,
) -> Result<(f64, f64)> {
    if t <= std::f64::consts::E {
        return Err(Error::invalid("t", "need t > e so that loglog t > 0"));
    }
    let shrunk = t / t.ln().ln();
    let sup_norm = t / f_integral(volume, phi, shrunk.max(1.0));
    let inf_norm = volume.value(phi.inverse(shrunk)).min(sup_norm);
    Ok((sup_norm, inf_norm))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantOrigin {
    Capacity,
    GreenReciprocal,
    SandwichInterval,
}

/// A growth constant, either pinned (capacity or Green reciprocal) or known
/// only within a sandwich interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitConstant {
    pub origin: ConstantOrigin,
    pub lower: f64,
    pub upper: f64,
}

impl LimitConstant {
    pub fn capacity(value: f64) -> Self {
        LimitConstant {
            origin: ConstantOrigin::Capacity,
            lower: value,
            upper: value,
        }
    }

    pub fn green_reciprocal(value: f64) -> Self {
        LimitConstant {
            origin: ConstantOrigin::GreenReciprocal,
            lower: value,
            upper: value,
        }
    }

    /// Midpoint representative.
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

/// The interval `[c0/c2, c0/c1]` sandwiching the limit of
/// `E[V_eps(t)] / (t / f(t))`.
pub fn sandwich_interval(c0: f64, c1: f64, c2: f64) -> Result<LimitConstant> {
    for (name, v) in [("c0", c0), ("c1", c1), ("c2", c2)] {
        if !(v > 0.0) {
            return Err(Error::invalid(name, "must be strictly positive"));
        }
    }
    if c1 > c2 {
        return Err(Error::invalid("c1", "must not exceed c2"));
    }
    Ok(LimitConstant {
        origin: ConstantOrigin::SandwichInterval,
        lower: c0 / c2,
        upper: c0 / c1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn psi_quadratic_closed_form() {
        // phi(s) = s^2: Psi(r, t) = r^2 / (4t).
        let phi = ScalingFunction::pure(2.0);
        assert_relative_eq!(psi(&phi, 2.0, 1.0), 1.0, max_relative = 1e-12);
        for &(r, t) in &[(0.3, 0.7), (1.0, 1.0), (5.0, 0.2), (2.0, 9.0)] {
            assert_relative_eq!(psi(&phi, r, t), r * r / (4.0 * t), max_relative = 1e-12);
        }
    }

    #[test]
    fn psi_cubic_example_and_zero_radius() {
        let cubic = ScalingFunction::pure(3.0);
        assert_relative_eq!(psi(&cubic, 3.0, 1.0), 2.0, max_relative = 1e-12);
        assert_eq!(psi(&cubic, 0.0, 1.0), 0.0);
    }

    #[test]
    fn psi_grid_cross_check_against_bracketed_supremum() {
        for &beta in &[1.5, 2.0, 2.5, 3.0] {
            let phi = ScalingFunction::pure(beta);
            for &r in &[0.1, 1.0, 10.0] {
                for &t in &[0.1, 1.0, 10.0] {
                    let closed = psi(&phi, r, t);
                    let oracle = psi_numeric(&phi, r, t);
                    assert_relative_eq!(closed, oracle, max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn psi_plain_grid_supremum_on_quadratic() {
        // Coarse independent check on a raw grid over (1e-3, 1e3).
        let phi = ScalingFunction::pure(2.0);
        let mut sup = 0.0f64;
        for i in 0..=60_000 {
            let s = 10f64.powf(-3.0 + i as f64 * 1e-4);
            sup = sup.max(2.0 / s - 1.0 / (s * s));
        }
        assert_relative_eq!(psi(&phi, 2.0, 1.0), sup, max_relative = 1e-6);
    }

    #[test]
    fn psi_two_regime_matches_numeric() {
        let phi = ScalingFunction::two_regime(1.8, 2.6);
        for &r in &[0.05, 0.5, 2.0, 30.0] {
            for &t in &[0.05, 1.0, 12.0] {
                assert_relative_eq!(
                    psi(&phi, r, t),
                    psi_numeric(&phi, r, t),
                    max_relative = 1e-7,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn psi_nonnegative_property() {
        let phi = ScalingFunction::two_regime(2.2, 1.4);
        for i in 0..50 {
            let r = 0.05 * i as f64;
            let v = psi(&phi, r, 0.3);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn f_integral_examples() {
        let v2 = ScalingFunction::pure(2.0);
        let p2 = ScalingFunction::pure(2.0);
        assert_relative_eq!(
            f_integral(&v2, &p2, std::f64::consts::E),
            1.0,
            max_relative = 1e-12
        );
        assert_eq!(f_integral(&v2, &p2, 1.0), 0.0);
        let v1 = ScalingFunction::pure(1.0);
        assert_relative_eq!(f_integral(&v1, &p2, 4.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn f_integral_closed_form_matches_quadrature() {
        let cases = [
            (ScalingFunction::pure(2.0), ScalingFunction::pure(2.0)),
            (ScalingFunction::pure(3.0), ScalingFunction::pure(2.0)),
            (
                ScalingFunction::pure_with_prefactor(1.58496, 2.0),
                ScalingFunction::pure_with_prefactor(2.32193, 0.5),
            ),
        ];
        for (v, p) in &cases {
            for &t in &[1.5, 4.0, 100.0, 1e4] {
                let closed = f_integral(v, p, t);
                let integrand = |s: f64| 1.0 / v.value(p.inverse(s));
                let quad = adaptive_simpson(&integrand, 1.0, t, 1e-10);
                assert_relative_eq!(closed, quad, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn f_integral_two_regime_uses_quadrature() {
        let v = ScalingFunction::two_regime(3.0, 1.7);
        let p = ScalingFunction::two_regime(2.0, 2.4);
        let f = f_integral(&v, &p, 50.0);
        let integrand = |s: f64| 1.0 / v.value(p.inverse(s));
        let split = p.value(1.0);
        let quad = adaptive_simpson(&integrand, 1.0, split, 1e-11)
            + adaptive_simpson(&integrand, split, 50.0, 1e-11);
        assert_relative_eq!(f, quad, max_relative = 1e-7);
    }

    #[test]
    fn green_bm_frozen_values() {
        assert_relative_eq!(green_bm(3, 1.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(green_bm(3, 2.0).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(
            green_bm(5, 1.0).unwrap(),
            1.0 / (4.0 * PI * PI),
            max_relative = 1e-12
        );
        assert!(green_bm(2, 1.0).is_err());
        assert!(green_bm(3, 0.0).is_err());
    }

    #[test]
    fn green_bm_matches_time_quadrature() {
        // Oracle: integrate the heat kernel in time on [0, T] and bound the
        // tail by the two-term expansion of exp(-r^2/2t).
        for &dim in &[3usize, 4, 5, 6] {
            for &r in &[0.5, 1.0, 2.0] {
                let d = dim as f64;
                let p = |t: f64| (2.0 * PI * t).powf(-d / 2.0) * (-r * r / (2.0 * t)).exp();
                // Integrate decade by decade so the adaptive tolerance sees
                // each scale of the bump.
                let t_max = 1e7 * r * r;
                let mut head = 0.0;
                let mut lo = 1e-8 * r * r;
                while lo < t_max {
                    let hi = (lo * 10.0).min(t_max);
                    head += adaptive_simpson(&p, lo, hi, 1e-9);
                    lo = hi;
                }
                // int_T^inf (2 pi t)^(-d/2) (1 - r^2/2t) dt, exact in t.
                let c = (2.0 * PI).powf(-d / 2.0);
                let tail = c
                    * (t_max.powf(1.0 - d / 2.0) / (d / 2.0 - 1.0)
                        - r * r / 2.0 * t_max.powf(-d / 2.0) / (d / 2.0));
                let oracle = head + tail;
                assert_relative_eq!(green_bm(dim, r).unwrap(), oracle, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn green_truncation_converges_to_full() {
        let full = green_bm(3, 1.0).unwrap();
        let t100 = green_bm_truncated(3, 1.0, 100.0).unwrap();
        let t10000 = green_bm_truncated(3, 1.0, 10_000.0).unwrap();
        assert!(t100 < t10000 && t10000 < full);
        assert_relative_eq!(t10000, full, max_relative = 1e-2);
        // Truncated value equals quadrature of the kernel on [0, T].
        let p = |t: f64| (2.0 * PI * t).powf(-1.5) * (-1.0 / (2.0 * t)).exp();
        let quad = adaptive_simpson(&p, 1e-8, 100.0, 1e-10);
        assert_relative_eq!(t100, quad, max_relative = 1e-7);
    }

    #[test]
    fn capacity_is_exact_reciprocal() {
        assert_relative_eq!(capacity_ball(3, 1.0).unwrap(), 2.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(capacity_ball(3, 2.0).unwrap(), 4.0 * PI, max_relative = 1e-12);
        for &dim in &[3usize, 4, 5, 6, 8] {
            for &eps in &[0.25, 1.0, 3.0] {
                let prod = capacity_ball(dim, eps).unwrap() * green_bm(dim, eps).unwrap();
                assert!((prod - 1.0).abs() < 1e-15, "product {prod}");
            }
        }
    }

    #[test]
    fn capacity_scale_law() {
        for &dim in &[3usize, 4, 5, 6] {
            let ratio = capacity_ball(dim, 2.0).unwrap() / capacity_ball(dim, 1.0).unwrap();
            assert_relative_eq!(
                ratio,
                2f64.powi(dim as i32 - 2),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn scaled_limit_ratio_values() {
        assert_relative_eq!(scaled_limit_ratio(3), 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(scaled_limit_ratio(2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(scaled_limit_ratio(4), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn ball_volume_low_dimensions() {
        assert_relative_eq!(ball_volume(1, 1.0), 2.0, max_relative = 1e-12);
        assert_relative_eq!(ball_volume(2, 1.0), PI, max_relative = 1e-12);
        assert_relative_eq!(ball_volume(3, 1.0), 4.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn hk_bounds_bracket_the_gaussian_kernel() {
        // For standard d=3 Brownian motion with V(r) = vol ball, phi(s) =
        // s^2 and suitable constants, the two-sided bounds bracket the
        // explicit kernel on a grid.
        use crate::space::HeatKernelParams;
        let volume = ScalingFunction::pure_with_prefactor(3.0, ball_volume(3, 1.0));
        let phi = ScalingFunction::pure(2.0);
        // p(t,x,x) = (2 pi t)^(-3/2); mu(B(x, sqrt(t))) = c t^(3/2):
        // on-diagonal constants are determined, the off-diagonal Gaussian
        // factor exp(-r^2/2t) = exp(-2 Psi(r,t)) fixes c8 = 2 exactly.
        let c_on = ball_volume(3, 1.0) / (2.0 * PI).powf(1.5);
        let params = HeatKernelParams::new(
            0.5 * c_on,
            1.0,
            2.0 * c_on,
            2.0,
            volume,
            phi,
        )
        .unwrap();
        for &t in &[0.1f64, 1.0, 10.0] {
            let mu_ball = ball_volume(3, t.sqrt());
            for &r in &[0.0, 0.3, 1.0, 3.0] {
                let kernel = (2.0 * PI * t).powf(-1.5) * (-r * r / (2.0 * t)).exp();
                let upper = hk_upper_bound(&params, mu_ball, r, t);
                assert!(kernel <= upper * (1.0 + 1e-12), "upper at r={r}, t={t}");
                if let Some(lower) = hk_lower_bound(&params, mu_ball, r, t) {
                    assert!(lower <= kernel * (1.0 + 1e-12), "lower at r={r}, t={t}");
                }
            }
        }
    }

    #[test]
    fn regime_classification_table() {
        let t = classify_regime(3.0, 2.0);
        assert_eq!(t.regime, Regime::Transient);
        assert_eq!(t.f_asymptotic, FAsymptotic::Constant);

        let w = classify_regime(2.0, 2.0);
        assert_eq!(w.regime, Regime::WeaklyRecurrent);
        assert_eq!(w.f_asymptotic, FAsymptotic::LogT);

        let alpha = crate::space::gasket_exponents::alpha();
        let beta = crate::space::gasket_exponents::beta();
        let s = classify_regime(alpha, beta);
        assert_eq!(s.regime, Regime::StronglyRecurrent);
        match s.f_asymptotic {
            FAsymptotic::Power { exponent } => {
                assert_relative_eq!(exponent, 1.0 - alpha / beta, max_relative = 1e-12);
                assert_relative_eq!(exponent, 0.317_387, max_relative = 1e-4);
            }
            other => panic!("expected power asymptotic, got {other:?}"),
        }
    }

    #[test]
    fn radial_limit_cases() {
        let v3 = ScalingFunction::pure(3.0);
        let p2 = ScalingFunction::pure(2.0);
        assert_eq!(radial_limit(&v3, &p2), RadialLimit::Zero);

        let valpha = ScalingFunction::pure(crate::space::gasket_exponents::alpha());
        let pbeta = ScalingFunction::pure(crate::space::gasket_exponents::beta());
        assert_eq!(radial_limit(&valpha, &pbeta), RadialLimit::Positive);

        let v2 = ScalingFunction::pure(2.0);
        assert_eq!(radial_limit(&v2, &p2), RadialLimit::Zero);
    }

    #[test]
    fn regimes_and_radial_limit_are_consistent() {
        // Transient and weakly recurrent pairs have null ranges; strongly
        // recurrent pairs have ranges of positive measure.
        for &alpha in &[1.2, 1.585, 2.0, 2.5, 3.0, 4.0] {
            for &beta in &[1.5, 2.0, 2.322, 3.0] {
                let v = ScalingFunction::pure(alpha);
                let p = ScalingFunction::pure(beta);
                let cls = classify_regime(alpha, beta);
                let lim = radial_limit(&v, &p);
                match cls.regime {
                    Regime::StronglyRecurrent => assert_eq!(lim, RadialLimit::Positive),
                    _ => assert_eq!(lim, RadialLimit::Zero),
                }
            }
        }
    }

    #[test]
    fn lil_normalizer_examples() {
        // alpha = beta = 2: f(x) = log x, so the limsup normalizer is
        // t / log(t / loglog t).
        let v = ScalingFunction::pure(2.0);
        let p = ScalingFunction::pure(2.0);
        let t = 1e6;
        let (sup_n, inf_n) = lil_normalizers(&v, &p, t).unwrap();
        let shrunk = t / t.ln().ln();
        assert_relative_eq!(sup_n, t / shrunk.ln(), max_relative = 1e-12);
        assert!(inf_n <= sup_n);

        // Gasket exponents: the liminf normalizer follows the pattern
        // (t/loglog t)^(a/b) once t is large enough for the volume branch of
        // the min to win (the clock branch is smaller below t ~ 1e10).
        let va = ScalingFunction::pure(crate::space::gasket_exponents::alpha());
        let pb = ScalingFunction::pure(crate::space::gasket_exponents::beta());
        let big = 1e12;
        let (sup_big, inf_big) = lil_normalizers(&va, &pb, big).unwrap();
        let shrunk_big = big / big.ln().ln();
        let expect = shrunk_big.powf(
            crate::space::gasket_exponents::alpha() / crate::space::gasket_exponents::beta(),
        );
        assert_relative_eq!(inf_big, expect, max_relative = 1e-12);
        assert!(inf_big < sup_big);
        // At moderate t the definition still takes the min of both branches.
        let (sup_mid, inf_mid) = lil_normalizers(&va, &pb, t).unwrap();
        let v_branch = va.value(pb.inverse(shrunk));
        assert_relative_eq!(inf_mid, v_branch.min(sup_mid), max_relative = 1e-12);

        // Transient pair: f is bounded, so the limsup normalizer is order t.
        let v3 = ScalingFunction::pure(3.0);
        let (sup_n, _) = lil_normalizers(&v3, &p, t).unwrap();
        let f_inf = 1.0 / (3.0 / 2.0 - 1.0);
        assert_relative_eq!(sup_n, t / f_inf, max_relative = 0.05);

        assert!(lil_normalizers(&v, &p, 2.0).is_err());
    }

    #[test]
    fn sandwich_interval_cases() {
        let two_pi = 2.0 * PI;
        let degenerate = sandwich_interval(1.0, 1.0 / two_pi, 1.0 / two_pi).unwrap();
        assert_relative_eq!(degenerate.lower, two_pi, max_relative = 1e-12);
        assert!(degenerate.is_degenerate());

        let wide = sandwich_interval(2.0, 1.0, 4.0).unwrap();
        assert_relative_eq!(wide.lower, 0.5, max_relative = 1e-12);
        assert_relative_eq!(wide.upper, 2.0, max_relative = 1e-12);
        assert!(wide.lower <= wide.upper);

        assert!(sandwich_interval(1.0, 4.0, 1.0).is_err());
        assert!(sandwich_interval(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn capacity_interval_for_euclid_sandwich() {
        // d = 3 with f == 1 and the band a = 0.25 around unit separation:
        // the growth constants are the reciprocal Green values at the band
        // edges, bracketing the capacity.
        let a = 0.25;
        let eps = 1.0;
        let c2 = green_bm(3, (1.0 - a) * eps).unwrap();
        let c1 = green_bm(3, (1.0 + a) * eps).unwrap();
        let interval = sandwich_interval(1.0, c1, c2).unwrap();
        let cap = capacity_ball(3, eps).unwrap();
        assert!(interval.lower <= cap && cap <= interval.upper);
    }
}
