// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! `C(k)`, `F(r)` and `D` by nested adaptive quadrature.
//!
//! Energy conservation `omega_q = omega_{q-k}` puts `q` on the plane
//! `q.k = k^2/2`; the delta function contributes `m/k`, and on the plane
//! `|q| = |q - k| = s = (q_perp^2 + k^2/4)^{1/2}`. Hence
//! `C(k) = (2 pi)^{-2} |nu(k)|^2 (m/k) int 2 pi q_perp n(s)(n(s)+1) dq_perp`.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{occupation, GasParams, Potential, PotentialKind, Statistics};
use crate::error::{invalid, Error, Result};
use crate::io;
use crate::par;
use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadConfig};

/// Occupation threshold for [`kernel_low_density`].
pub const LOW_DENSITY_LIMIT: f64 = 0.01;

const COEFFICIENT_TOL: f64 = 1e-8;
const KERNEL_TOL: f64 = 1e-6;

/// Occupation factor in the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// `n (n + 1)`: scattering out of `q` into an occupied bosonic mode.
    Full,
    /// `n`, valid when every occupation is small.
    LowDensity,
}

fn weight(s: f64, gas: &GasParams, w: Weighting) -> f64 {
    // Callers validate the gas first, so this cannot fail.
    let n = occupation(s, gas).unwrap_or(f64::NAN);
    match w {
        Weighting::Full => n * (n + 1.0),
        Weighting::LowDensity => n,
    }
}

fn check_gas(gas: &GasParams) -> Result<()> {
    GasParams::new(gas.m, gas.beta, gas.mu, gas.statistics).map(|_| ())
}

/// Wavenumber scale of `k^2 C(k)`: thermal cutoff `(8m/beta)^{1/2}` or the
/// inverse potential range, whichever is smaller.
fn k_scale(pot: &Potential, gas: &GasParams) -> f64 {
    let thermal = (8.0 * gas.m / gas.beta).sqrt();
    match pot.kind {
        PotentialKind::Contact => thermal,
        _ => thermal.min(1.0 / pot.range),
    }
}

/// `C(k)` with the given occupation factor.
pub fn lindblad_coefficient_with(
    k: f64,
    pot: &Potential,
    gas: &GasParams,
    weighting: Weighting,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return invalid(format!("wavenumber must be positive, got {k}"));
    }
    check_gas(gas)?;
    let nu = pot.fourier(k);
    if nu == 0.0 {
        return Ok(0.0);
    }
    let scale = (2.0 * gas.m / gas.beta).sqrt();
    let quarter = 0.25 * k * k;
    let inner = integrate_to_infinity(
        |q| q * weight((q * q + quarter).sqrt(), gas, weighting),
        0.0,
        scale,
        cfg,
    )?;
    Ok(nu * nu * gas.m / k * 2.0 * PI * inner.value / (4.0 * PI * PI))
}

/// `C(k)` for the full bosonic (or Boltzmann) occupation factor.
pub fn lindblad_coefficient(k: f64, pot: &Potential, gas: &GasParams) -> Result<f64> {
    lindblad_coefficient_with(
        k,
        pot,
        gas,
        Weighting::Full,
        &QuadConfig::with_rel_tol(COEFFICIENT_TOL),
    )
}

/// `1 - sin(x)/x`, accurate near zero.
fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - x.sin() / x
    }
}

/// `int_0^inf g(k) C(k) dk` over the natural break points; `upper` truncates.
fn moment(
    pot: &Potential,
    gas: &GasParams,
    weighting: Weighting,
    upper: Option<f64>,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    check_gas(gas)?;
    let inner_cfg = QuadConfig::with_rel_tol(COEFFICIENT_TOL);
    let outer_cfg = QuadConfig::with_rel_tol(KERNEL_TOL);
    let failure = RefCell::new(None);
    let f = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        match lindblad_coefficient_with(k, pot, gas, weighting, &inner_cfg) {
            Ok(c) => g(k) * c,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let s = k_scale(pot, gas);
    let value = match upper {
        Some(kc) => {
            let breaks: Vec<f64> = std::iter::once(0.0)
                .chain([s, 2.0 * s, 4.0 * s, 8.0 * s].into_iter().filter(|&b| b < kc))
                .chain(std::iter::once(kc))
                .collect();
            integrate_breaks(f, &breaks, &outer_cfg)?.value
        }
        None => {
            let head = integrate_breaks(f, &[0.0, s, 2.0 * s, 4.0 * s, 8.0 * s, 16.0 * s], &outer_cfg)?;
            let tail = integrate_to_infinity(f, 16.0 * s, s, &outer_cfg)?;
            head.value + tail.value
        }
    };
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `F(r) = (2 pi^2)^{-1} int_0^inf k^2 C(k) (1 - sinc(k r)) dk`.
pub fn kernel_with(r: f64, pot: &Potential, gas: &GasParams, weighting: Weighting) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return invalid(format!("separation must be non-negative, got {r}"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let v = moment(pot, gas, weighting, None, |k| k * k * one_minus_sinc(k * r))?;
    Ok(v / (2.0 * PI * PI))
}

/// One-particle kernel `F(r)` through the `C(k)` route.
pub fn kernel_direct(r: f64, pot: &Potential, gas: &GasParams) -> Result<f64> {
    kernel_with(r, pot, gas, Weighting::Full)
}

/// Largest mode occupation (the `q = 0` mode).
pub fn max_occupation(gas: &GasParams) -> Result<f64> {
    occupation(0.0, gas)
}

/// `F(r)` with `n(n+1)` replaced by `n`. Requires every occupation to be
/// below [`LOW_DENSITY_LIMIT`]; the relative deviation from
/// [`kernel_direct`] is then at most the largest occupation.
pub fn kernel_low_density(r: f64, pot: &Potential, gas: &GasParams) -> Result<f64> {
    let n0 = max_occupation(gas)?;
    if n0 >= LOW_DENSITY_LIMIT {
        return Err(Error::DensityTooHigh {
            max_occupation: n0,
            limit: LOW_DENSITY_LIMIT,
        });
    }
    kernel_with(r, pot, gas, Weighting::LowDensity)
}

/// `D = (12 pi^2)^{-1} int_0^inf k^4 C(k) dk`, the `r^2` coefficient of `F`.
/// Contact potentials need [`localization_rate_with_cutoff`].
pub fn localization_rate(pot: &Potential, gas: &GasParams) -> Result<f64> {
    if pot.kind == PotentialKind::Contact {
        return Err(Error::CutoffRequired);
    }
    Ok(moment(pot, gas, Weighting::Full, None, |k| k.powi(4))? / (12.0 * PI * PI))
}

/// [`localization_rate`] with the `k` integral truncated at `k_cut`.
pub fn localization_rate_with_cutoff(pot: &Potential, gas: &GasParams, k_cut: f64) -> Result<f64> {
    if !(k_cut > 0.0 && k_cut.is_finite()) {
        return invalid(format!("cutoff must be positive, got {k_cut}"));
    }
    Ok(moment(pot, gas, Weighting::Full, Some(k_cut), |k| k.powi(4))? / (12.0 * PI * PI))
}

/// Result of fitting `F(r) = D r^2` near the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRoute {
    pub d: f64,
    /// Upper end of the fit window.
    pub r_star: f64,
    /// Estimated relative size of the quartic term at `r_star`.
    pub quartic_correction: f64,
}

const FIT_POINTS: usize = 8;
const QUARTIC_TARGET: f64 = 1e-3;

fn quadratic_fit(pot: &Potential, gas: &GasParams, r_star: f64) -> Result<f64> {
    let rs: Vec<f64> = (1..=FIT_POINTS).map(|i| r_star * i as f64 / FIT_POINTS as f64).collect();
    let fs = par::map_indices(rs.len(), |i| kernel_direct(rs[i], pot, gas));
    let (mut num, mut den) = (0.0, 0.0);
    for (r, f) in rs.iter().zip(fs) {
        num += f? * r * r;
        den += r.powi(4);
    }
    Ok(num / den)
}

/// Localization rate from a least-squares fit of `F(r) = D r^2` on
/// `(0, r*]`. The window is halved until the fit changes by less than
/// `0.75e-3` between `r*` and `r*/2`; since the quartic term scales as
/// `r^2`, that bounds its relative size at `r*` by `1e-3`.
pub fn localization_rate_fit(pot: &Potential, gas: &GasParams) -> Result<FitRoute> {
    check_gas(gas)?;
    let mut r_star = 2.0 / k_scale(pot, gas);
    let mut outer = quadratic_fit(pot, gas, r_star)?;
    for _ in 0..40 {
        let inner = quadratic_fit(pot, gas, 0.5 * r_star)?;
        let correction = 4.0 / 3.0 * ((outer - inner) / inner).abs();
        if correction < QUARTIC_TARGET {
            return Ok(FitRoute {
                d: outer,
                r_star,
                quartic_correction: correction,
            });
        }
        r_star *= 0.5;
        outer = inner;
    }
    Err(Error::QuadratureFailure {
        estimate: outer,
        error: f64::NAN,
        tolerance: QUARTIC_TARGET,
    })
}

/// Polylogarithm `Li_{3/2}(z)` for `0 <= z < 1` by its power series.
fn polylog_3_2(z: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut zj = z;
    let mut j = 1.0f64;
    while zj > 1e-18 * sum.max(f64::MIN_POSITIVE) && j < 1e7 {
        sum += zj / (j * j.sqrt());
        zj *= z;
        j += 1.0;
    }
    sum
}

/// Number density `(2 pi)^{-3} int d^3q n_q` in closed form:
/// `z lambda^{-3}` (Boltzmann) or `Li_{3/2}(z) lambda^{-3}` (Bose), with
/// `z = exp(beta mu)` and `lambda = (2 pi beta / m)^{1/2}`.
pub fn number_density(gas: &GasParams) -> Result<f64> {
    check_gas(gas)?;
    let z = (gas.beta * gas.mu).exp();
    let lambda3 = (2.0 * PI * gas.beta / gas.m).powf(1.5);
    Ok(match gas.statistics {
        Statistics::Boltzmann => z / lambda3,
        Statistics::Bose => polylog_3_2(z) / lambda3,
    })
}

/// `int (1 / 2 pi^2) q^2 n_q dq`: the density counted as the fraction of
/// particles per momentum shell.
pub fn number_density_quadrature(gas: &GasParams) -> Result<f64> {
    check_gas(gas)?;
    let cfg = QuadConfig::with_rel_tol(COEFFICIENT_TOL);
    let v = integrate_to_infinity(
        |q| q * q * weight(q, gas, Weighting::LowDensity),
        0.0,
        gas.thermal_wavenumber(),
        &cfg,
    )?;
    Ok(v.value / (2.0 * PI * PI))
}

/// How `F(r)` was tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Radial integral of `k^2 C(k) (1 - sinc)`.
    ViaCoefficient,
    /// Five-dimensional integral over `k` and the on-shell plane.
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelResult {
    pub r_values: Vec<f64>,
    pub f_values: Vec<f64>,
    pub k_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// `None` for contact potentials, where `D` needs a cutoff.
    pub d: Option<f64>,
    pub route: Route,
}

impl KernelResult {
    /// CSV `r,F`.
    pub fn kernel_csv(&self) -> String {
        io::csv_string(
            &["r", "F"],
            self.r_values.iter().zip(&self.f_values).map(|(&r, &f)| [r, f]),
        )
    }

    /// CSV `k,C`.
    pub fn coefficient_csv(&self) -> String {
        io::csv_string(
            &["k", "C"],
            self.k_values.iter().zip(&self.c_values).map(|(&k, &c)| [k, c]),
        )
    }
}

/// Tabulates `F` and `C`. Entries are computed in parallel but stored in
/// input order.
pub fn tabulate(
    r_values: &[f64],
    k_values: &[f64],
    pot: &Potential,
    gas: &GasParams,
    route: Route,
) -> Result<KernelResult> {
    let f_values = match route {
        Route::ViaCoefficient => par::map_indices(r_values.len(), |i| kernel_direct(r_values[i], pot, gas)),
        Route::BruteForce => {
            let res = super::OracleResolution::for_inputs(pot, gas);
            r_values
                .iter()
                .map(|&r| super::kernel_brute_force(r, pot, gas, &res))
                .collect()
        }
    }
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let c_values = par::map_indices(k_values.len(), |i| lindblad_coefficient(k_values[i], pot, gas))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let d = match localization_rate(pot, gas) {
        Ok(d) => Some(d),
        Err(Error::CutoffRequired) => None,
        Err(e) => return Err(e),
    };
    Ok(KernelResult {
        r_values: r_values.to_vec(),
        f_values,
        k_values: k_values.to_vec(),
        c_values,
        d,
        route,
    })
}

/// Summary record comparing the two localization-rate routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSummary {
    #[serde(rename = "D_moment_route")]
    pub d_moment_route: f64,
    #[serde(rename = "D_fit_route")]
    pub d_fit_route: f64,
    pub relative_gap: f64,
    pub potential: Potential,
    pub gas: GasParams,
}

pub fn summarize(pot: &Potential, gas: &GasParams) -> Result<KernelSummary> {
    let d_moment_route = localization_rate(pot, gas)?;
    let d_fit_route = localization_rate_fit(pot, gas)?.d;
    Ok(KernelSummary {
        d_moment_route,
        d_fit_route,
        relative_gap: (d_fit_route - d_moment_route).abs() / d_moment_route,
        potential: *pot,
        gas: *gas,
    })
}
