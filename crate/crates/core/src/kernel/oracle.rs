// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force evaluation of `F(r)` for validation.
//!
//! Integrates `(2 pi)^{-5} |nu(k)|^2 (m/k) n(|q|)(n(|q-k|)+1) (1 - cos(k.r))`
//! over all of `k` (spherical tensor grid) and over the on-shell plane
//! `q = (k/2) k_hat + q1 e1 + q2 e2` (Cartesian tensor grid). Nothing is
//! assumed about isotropy: `|q|` and `|q - k|` are computed from the vectors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{norm3, occupation, sub3, GasParams, Potential, PotentialKind};
use crate::error::{invalid, Result};
use crate::par;
use crate::quadrature::gauss_legendre_on;

/// Tensor-grid resolution of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResolution {
    /// Gauss-Legendre nodes in `|k|` on `[0, k_max]`.
    pub n_k: usize,
    /// Nodes in `cos(theta)` on `[-1, 1]`.
    pub n_theta: usize,
    /// Nodes in the azimuth on `[0, 2 pi]`.
    pub n_phi: usize,
    /// Nodes per in-plane axis on `[-q_max, q_max]`.
    pub n_q: usize,
    pub k_max: f64,
    pub q_max: f64,
}

impl OracleResolution {
    /// Cutoffs where the integrand has fallen by `e^{-36}`, with 64 radial
    /// and angular nodes, 4 azimuthal nodes and 40 x 40 in-plane nodes.
    pub fn for_inputs(pot: &Potential, gas: &GasParams) -> Self {
        let thermal = (8.0 * gas.m * 36.0 / gas.beta).sqrt();
        let k_max = match pot.kind {
            PotentialKind::Gaussian => thermal.min(6.0 / pot.range),
            _ => thermal,
        };
        Self {
            n_k: 64,
            n_theta: 64,
            n_phi: 4,
            n_q: 40,
            k_max,
            q_max: (2.0 * gas.m * 36.0 / gas.beta).sqrt(),
        }
    }
}

/// Point of the on-shell plane for wavevector `k`: `(k/2) k_hat + q1 e1 +
/// q2 e2`, with `e1, e2` an orthonormal basis of the plane normal to `k`.
pub fn on_shell_point(k: [f64; 3], q1: f64, q2: f64) -> [f64; 3] {
    let kn = norm3(k);
    let khat = [k[0] / kn, k[1] / kn, k[2] / kn];
    // Any vector not parallel to k_hat seeds the basis.
    let seed = if khat[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = seed[0] * khat[0] + seed[1] * khat[1] + seed[2] * khat[2];
    let e1 = sub3(seed, [d * khat[0], d * khat[1], d * khat[2]]);
    let n1 = norm3(e1);
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = [
        khat[1] * e1[2] - khat[2] * e1[1],
        khat[2] * e1[0] - khat[0] * e1[2],
        khat[0] * e1[1] - khat[1] * e1[0],
    ];
    std::array::from_fn(|i| 0.5 * k[i] + q1 * e1[i] + q2 * e2[i])
}

/// `F(r)` for `r` along the z axis, by tensor-product Gauss-Legendre
/// quadrature at resolution `res`.
pub fn kernel_brute_force(r: f64, pot: &Potential, gas: &GasParams, res: &OracleResolution) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return invalid(format!("separation must be non-negative, got {r}"));
    }
    occupation(0.0, gas)?;
    let (kn, kw) = gauss_legendre_on(res.n_k, 0.0, res.k_max);
    let (tn, tw) = gauss_legendre_on(res.n_theta, -1.0, 1.0);
    let (pn, pw) = gauss_legendre_on(res.n_phi, 0.0, 2.0 * PI);
    let (qn, qw) = gauss_legendre_on(res.n_q, -res.q_max, res.q_max);
    let n = |q: f64| occupation(q, gas).unwrap_or(f64::NAN);

    // One task per (|k|, cos theta) pair; partial sums are added in index
    // order so the result is independent of scheduling.
    let partial = par::map_indices(res.n_k * res.n_theta, |idx| {
        let (ik, it) = (idx / res.n_theta, idx % res.n_theta);
        let (k, ct) = (kn[ik], tn[it]);
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        let nu = pot.fourier(k);
        let radial = kw[ik] * tw[it] * k * k * nu * nu * gas.m / k * (1.0 - (k * r * ct).cos());
        let mut sum = 0.0;
        for (phi, wp) in pn.iter().zip(&pw) {
            let kv = [k * st * phi.cos(), k * st * phi.sin(), k * ct];
            for (q1, w1) in qn.iter().zip(&qw) {
                for (q2, w2) in qn.iter().zip(&qw) {
                    let q = on_shell_point(kv, *q1, *q2);
                    sum += wp * w1 * w2 * n(norm3(q)) * (n(norm3(sub3(q, kv))) + 1.0);
                }
            }
        }
        radial * sum
    });
    Ok(partial.iter().sum::<f64>() / (2.0 * PI).powi(5))
}
