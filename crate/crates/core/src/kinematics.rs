// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! One-dimensional collision model: elastic kinematics between the system
//! (mass `M`) and environment particles (mass `m`), the decoherence factor
//! `F(x, y)` produced by a thermal gas, and a Monte Carlo ensemble of kicked
//! particles.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{invalid, Error, Result};
use crate::io;
use crate::par;
use crate::params::{PhysicalParams, ThermalEnvironment1D};
use crate::state::DensityMatrix;

/// Coefficients of the linear map `(P, p) -> (aP + bp, cP - ap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionCoefficients {
    a: f64,
    b: f64,
    c: f64,
}

impl CollisionCoefficients {
    pub fn new(system_mass: f64, env_mass: f64) -> Result<Self> {
        if !(system_mass > 0.0 && env_mass > 0.0 && system_mass.is_finite() && env_mass.is_finite()) {
            return invalid("masses must be positive and finite");
        }
        let s = system_mass + env_mass;
        Ok(Self {
            a: (system_mass - env_mass) / s,
            b: 2.0 * system_mass / s,
            c: 2.0 * env_mass / s,
        })
    }

    pub fn from_params(p: &PhysicalParams) -> Self {
        let s = p.system_mass() + p.env_mass();
        Self {
            a: (p.system_mass() - p.env_mass()) / s,
            b: 2.0 * p.system_mass() / s,
            c: 2.0 * p.env_mass() / s,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `a^2 + bc - 1`, zero for an energy-conserving map.
    pub fn identity_residual(&self) -> f64 {
        self.a * self.a + self.b * self.c - 1.0
    }

    pub fn apply(&self, big_p: f64, p: f64) -> (f64, f64) {
        (self.a * big_p + self.b * p, self.c * big_p - self.a * p)
    }
}

/// Final momenta `(P', p')` after a head-on elastic collision.
pub fn elastic_collision(big_p: f64, p: f64, params: &PhysicalParams) -> (f64, f64) {
    CollisionCoefficients::from_params(params).apply(big_p, p)
}

/// Plane-wave position map of a collision with a heavy system: the
/// environment coordinate is reflected through the system position.
pub fn collision_position_map(x: f64, q: f64) -> (f64, f64) {
    (x, 2.0 * x - q)
}

/// `F(x, y) = Gamma (1 - exp(-2 <p^2> (x - y)^2 / hbar^2))` for a thermal
/// Maxwell-Boltzmann gas.
pub fn decoherence_factor(
    x: f64,
    y: f64,
    env: &ThermalEnvironment1D,
    collision_rate: f64,
    hbar: f64,
) -> f64 {
    let u = (x - y) / hbar;
    // -expm1 keeps full relative accuracy for small separations.
    collision_rate * -(-2.0 * env.p2_mean() * u * u).exp_m1()
}

/// Exact one-step collision map `rho(x, y) -> exp(-F(x, y) dt) rho(x, y)`.
pub fn apply_collision_decoherence(
    rho: &DensityMatrix,
    env: &ThermalEnvironment1D,
    collision_rate: f64,
    hbar: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return invalid(format!("time step must be non-negative, got {dt}"));
    }
    if !(collision_rate >= 0.0 && collision_rate.is_finite()) {
        return invalid("collision rate must be non-negative");
    }
    let g = rho.grid();
    let n = g.len();
    let x = g.points();
    let m = rho.matrix();
    let out = Array2::from_shape_fn((n, n), |(i, j)| {
        m[[i, j]] * (-decoherence_factor(x[i], x[j], env, collision_rate, hbar) * dt).exp()
    });
    Ok(DensityMatrix::from_parts(*g, out))
}

/// Independent system particles, each kicked by a Poisson stream of
/// thermal collisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    momenta: Vec<f64>,
    seed: u64,
    params: PhysicalParams,
}

impl Ensemble {
    pub fn new(momenta: Vec<f64>, seed: u64, params: PhysicalParams) -> Result<Self> {
        if momenta.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if momenta.iter().any(|p| !p.is_finite()) {
            return invalid("ensemble momenta must be finite");
        }
        Ok(Self {
            momenta,
            seed,
            params,
        })
    }

    /// `n` particles all starting at momentum `p0`.
    pub fn uniform(n: usize, p0: f64, seed: u64, params: PhysicalParams) -> Result<Self> {
        Self::new(vec![p0; n], seed, params)
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }
}

/// Sampled ensemble moments.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSeries {
    pub t: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub mean_p2: Vec<f64>,
    pub var_p: Vec<f64>,
    pub stderr_p: Vec<f64>,
    pub collisions: u64,
}

impl EnsembleSeries {
    /// CSV with columns `t,mean_P,var_P,stderr_P`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.t.len())
            .map(|k| [self.t[k], self.mean_p[k], self.var_p[k], self.stderr_p[k]]);
        io::csv_string(&["t", "mean_P", "var_P", "stderr_P"], rows)
    }
}

/// Particles per reduction chunk. Fixed so that the summation order, and
/// therefore the output bits, never depend on the worker count.
const CHUNK: usize = 1024;

/// Per-particle RNG: the ensemble seed selects the key, the particle index
/// the stream.
pub fn particle_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates every particle up to `t_max` and records `<P>` and `<P^2>` at
/// `n_steps + 1` equally spaced times.
pub fn run_collision_ensemble(ens: &Ensemble, t_max: f64, n_steps: usize) -> Result<EnsembleSeries> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if !(t_max > 0.0 && t_max.is_finite()) || n_steps == 0 {
        return invalid("need t_max > 0 and n_steps >= 1");
    }
    let params = ens.params;
    let coeff = CollisionCoefficients::from_params(&params);
    let env = ThermalEnvironment1D::from_params(&params);
    let rate = params.collision_rate();
    let kick = Normal::new(0.0, env.p2_mean().sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let waiting = if rate > 0.0 {
        Some(Exp::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let samples = n_steps + 1;
    let dt = t_max / n_steps as f64;
    let n = ens.len();
    let n_chunks = n.div_ceil(CHUNK);

    let chunk_sums = par::map_indices(n_chunks, |c| {
        let mut s1 = vec![0.0; samples];
        let mut s2 = vec![0.0; samples];
        let mut hits = 0u64;
        for idx in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let mut rng = particle_rng(ens.seed, idx as u64);
            let mut big_p = ens.momenta[idx];
            let mut t = 0.0;
            let mut k = 0;
            loop {
                let next = match &waiting {
                    Some(w) => t + w.sample(&mut rng),
                    None => f64::INFINITY,
                };
                while k < samples && (k as f64) * dt < next {
                    s1[k] += big_p;
                    s2[k] += big_p * big_p;
                    k += 1;
                }
                if k == samples {
                    break;
                }
                let p = kick.sample(&mut rng);
                big_p = coeff.apply(big_p, p).0;
                hits += 1;
                t = next;
            }
        }
        (s1, s2, hits)
    });

    let mut s1 = vec![0.0; samples];
    let mut s2 = vec![0.0; samples];
    let mut collisions = 0;
    for (a, b, h) in chunk_sums {
        for k in 0..samples {
            s1[k] += a[k];
            s2[k] += b[k];
        }
        collisions += h;
    }
    let nf = n as f64;
    let mean_p: Vec<f64> = s1.iter().map(|v| v / nf).collect();
    let mean_p2: Vec<f64> = s2.iter().map(|v| v / nf).collect();
    let var_p: Vec<f64> = mean_p
        .iter()
        .zip(&mean_p2)
        .map(|(m, m2)| ((m2 - m * m) * nf / (nf - 1.0).max(1.0)).max(0.0))
        .collect();
    let stderr_p = var_p.iter().map(|v| (v / nf).sqrt()).collect();
    Ok(EnsembleSeries {
        t: (0..samples).map(|k| k as f64 * dt).collect(),
        mean_p,
        mean_p2,
        var_p,
        stderr_p,
        collisions,
    })
}

/// Exponential decay rate of `mean` by least squares on `ln mean`, using the
/// leading window where `mean > 3 * stderr`.
pub fn fit_decay_rate(t: &[f64], mean: &[f64], stderr: &[f64]) -> Result<f64> {
    let window: Vec<(f64, f64)> = t
        .iter()
        .zip(mean)
        .zip(stderr)
        .take_while(|((_, m), s)| **m > 0.0 && **m > 3.0 * **s)
        .map(|((t, m), _)| (*t, m.ln()))
        .collect();
    fit_slope(&window).map(|s| -s)
}

/// Ordinary least-squares slope through `(x, y)` pairs.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return invalid("need at least two points to fit a slope");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return invalid("degenerate abscissae in slope fit");
    }
    Ok(sxy / sxx)
}

/// Draws one collision's environment momentum and returns the momentum
/// change of the system. Handy for checking per-collision averages.
pub fn sample_momentum_change(big_p: f64, params: &PhysicalParams, rng: &mut impl Rng) -> f64 {
    let env = ThermalEnvironment1D::from_params(params);
    let p = rng.sample::<f64, _>(rand_distr::StandardNormal) * env.p2_mean().sqrt();
    elastic_collision(big_p, p, params).0 - big_p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::state::wavefunctions;

    fn params(big_m: f64, m: f64, rate: f64) -> PhysicalParams {
        PhysicalParams::builder()
            .system_mass(big_m)
            .env_mass(m)
            .collision_rate(rate)
            .build()
            .unwrap()
    }

    #[test]
    fn equal_masses_exchange_momentum() {
        let (pp, qq) = elastic_collision(0.0, 1.0, &params(1.0, 1.0, 1.0));
        assert_eq!((pp, qq), (1.0, 0.0));
    }

    #[test]
    fn heavy_system_values() {
        let (pp, qq) = elastic_collision(1.0, 1.0, &params(1000.0, 1.0, 1.0));
        // Momentum conservation fixes P' = 2 - p' = 2999/1001.
        assert!((pp - 2999.0 / 1001.0).abs() < 1e-14);
        assert!((qq + 997.0 / 1001.0).abs() < 1e-14);
    }

    #[test]
    fn position_map_is_an_involution() {
        assert_eq!(collision_position_map(1.0, 3.0), (1.0, -1.0));
        assert_eq!(collision_position_map(0.0, 0.0), (0.0, 0.0));
        let (x, q) = collision_position_map(0.3, -1.7);
        let (x2, q2) = collision_position_map(x, q);
        assert!((x2 - 0.3).abs() < 1e-15 && (q2 + 1.7).abs() < 1e-15);
    }

    #[test]
    fn decoherence_factor_limits() {
        let env = ThermalEnvironment1D::new(0.5, 2.0, 1.0).unwrap();
        assert_eq!(decoherence_factor(1.0, 1.0, &env, 3.0, 1.0), 0.0);
        assert!((decoherence_factor(0.0, 100.0, &env, 3.0, 1.0) - 3.0).abs() < 1e-15);
        let d = 1e-5;
        let f = decoherence_factor(d, 0.0, &env, 3.0, 1.0);
        let expect = 2.0 * 3.0 * env.p2_mean() * d * d;
        assert!((f / expect - 1.0).abs() < 1e-8);
    }

    #[test]
    fn collision_decoherence_keeps_diagonal() {
        let g = Grid1D::centered(10.0, 32).unwrap();
        let psi = wavefunctions::cat(&g, 4.0, 0.8, 1.0);
        let rho = DensityMatrix::pure(g, &psi).unwrap();
        let env = ThermalEnvironment1D::new(1.0, 1.0, 1.0).unwrap();
        let same = apply_collision_decoherence(&rho, &env, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(same, rho);
        let out = apply_collision_decoherence(&rho, &env, 2.0, 1.0, 0.7).unwrap();
        assert_eq!(out.diagonal(), rho.diagonal());
        assert!(out.hermiticity_deviation() < 1e-15);
    }

    #[test]
    fn zero_rate_keeps_momentum() {
        let ens = Ensemble::uniform(100, 2.5, 7, params(100.0, 1.0, 0.0)).unwrap();
        let s = run_collision_ensemble(&ens, 10.0, 5).unwrap();
        assert!(s.mean_p.iter().all(|&m| m == 2.5));
        assert_eq!(s.collisions, 0);
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        assert_eq!(
            Ensemble::new(vec![], 0, params(10.0, 1.0, 1.0)),
            Err(Error::EmptyEnsemble)
        );
    }

    #[test]
    fn same_seed_same_bits() {
        let ens = Ensemble::uniform(3000, 1.0, 42, params(20.0, 1.0, 1.0)).unwrap();
        let a = run_collision_ensemble(&ens, 2.0, 10).unwrap();
        let b = par::with_threads(1, || run_collision_ensemble(&ens, 2.0, 10).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn fit_recovers_exponential() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let m: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let s = vec![0.01; 20];
        assert!((fit_decay_rate(&t, &m, &s).unwrap() - 0.7).abs() < 1e-12);
    }
}
