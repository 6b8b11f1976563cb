// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! One-dimensional quadrature: adaptive Gauss-Kronrod (21 points) on finite
//! and semi-infinite intervals, plus Golub-Welsch Gauss-Legendre and
//! Gauss-Hermite rules.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

// Kronrod abscissae (descending, last is the centre); odd entries are the
// 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// Single 21-point Kronrod panel with its embedded Gauss error estimate.
pub fn gk21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Estimate {
    panel(f, a, b).0
}

/// Panel estimate plus the integral of `|f|` over it.
#[allow(clippy::needless_range_loop)]
fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (Estimate, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let res_abs = res_abs * half.abs();
    let est = Estimate {
        value: res_k * half,
        error: rescale_error(err, res_abs, res_asc * half.abs()),
    };
    (est, res_abs)
}

/// Globally adaptive bisection: always splits the panel with the largest
/// error estimate until the sum meets the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate> {
    integrate_breaks(f, &[a, b], cfg)
}

/// Like [`integrate`], seeding the panel list with the given break points.
pub fn integrate_breaks(f: impl Fn(f64) -> f64, breaks: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    let mut panels: Vec<(f64, f64, Estimate, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (e, m) = panel(&f, w[0], w[1]);
            (w[0], w[1], e, m)
        })
        .collect();
    loop {
        let value: f64 = panels.iter().map(|p| p.2.value).sum();
        let error: f64 = panels.iter().map(|p| p.2.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance: cfg.rel_tol,
            });
        }
        let magnitude: f64 = panels.iter().map(|p| p.3).sum();
        let tolerance = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        // The second bound accepts integrals that cancel to round-off.
        if error <= tolerance || error <= 100.0 * f64::EPSILON * magnitude {
            return Ok(Estimate { value, error });
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Panel cannot be split further in floating point.
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance,
            });
        }
        for (u, v) in [(lo, mid), (mid, hi)] {
            let (e, m) = panel(&f, u, v);
            panels.push((u, v, e, m));
        }
    }
}

/// `int_a^inf f(x) dx` via `x = a + scale (1 - t)/t`, `t in (0, 1]`.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let g = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = a + scale * (1.0 - t) / t;
        let v = f(x) * scale / (t * t);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, cfg)
}

/// Nodes and weights of a symmetric Jacobi matrix rule (Golub-Welsch).
fn golub_welsch(off_diag: impl Fn(usize) -> f64, n: usize, mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = off_diag(k);
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // The weight functions are even, so symmetrize away round-off.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let k = n - 1 - i;
        nodes[i] = 0.5 * (pairs[i].0 - pairs[k].0);
        weights[i] = 0.5 * (pairs[i].1 + pairs[k].1);
    }
    (nodes, weights)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(
        |k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        },
        n,
        2.0,
    )
}

/// Gauss-Hermite rule for the weight `exp(-x^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(|k| (0.5 * k as f64).sqrt(), n, std::f64::consts::PI.sqrt())
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}
