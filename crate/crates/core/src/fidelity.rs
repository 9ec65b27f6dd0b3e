//! Two-qubit density matrices, memory noise channels and Uhlmann fidelity.
//!
//! Basis order is `|q0 q1>` with qubit 0 as the most significant bit, so
//! index `2 * q0 + q1`.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance for Hermiticity, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Fiber propagation speed used when none is configured.
pub const DEFAULT_PROPAGATION_SPEED_KM_PER_S: f64 = 200_000.0;

/// Link lengths swept when a config does not list its own.
pub const DEFAULT_SWEEP_DISTANCES_KM: [f64; 4] = [1.0, 2.5, 5.0, 7.5];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4<Complex64>);

impl DensityMatrix {
    /// Wraps `m` after checking Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > STATE_TOLERANCE {
                    return Err(Error::InvariantViolation(format!("density matrix not Hermitian at ({i}, {j})")));
                }
            }
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvariantViolation(format!("density matrix trace {tr}")));
        }
        let min_eig = hermitian_eigen(&m).0.min();
        if min_eig < -STATE_TOLERANCE {
            return Err(Error::InvariantViolation(format!("density matrix eigenvalue {min_eig}")));
        }
        Ok(Self(m))
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure(psi: &Vector4<Complex64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        hermitian_eigen(&self.0).0
    }
}

/// Eigen-decomposition of the Hermitian part of `m`.
fn hermitian_eigen(m: &Matrix4<Complex64>) -> (Vector4<f64>, Matrix4<Complex64>) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues, eig.eigenvectors)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in `[-tol, 0)` are clamped to zero, and so is rounding noise
/// on exact zeros, which a square root would otherwise amplify to ~1e-8.
fn psd_sqrt(m: &Matrix4<Complex64>) -> Result<Matrix4<Complex64>> {
    let (vals, vecs) = hermitian_eigen(m);
    let noise = 16.0 * f64::EPSILON * vals.amax().max(1.0);
    let mut root = Vector4::zeros();
    for i in 0..4 {
        if vals[i] < -STATE_TOLERANCE {
            return Err(Error::InvariantViolation(format!("matrix not positive semidefinite (eigenvalue {})", vals[i])));
        }
        let v = if vals[i] <= noise { 0.0 } else { vals[i] };
        root[i] = Complex64::new(v.sqrt(), 0.0);
    }
    Ok(vecs * Matrix4::from_diagonal(&root) * vecs.adjoint())
}

/// `|Phi+> = (|00> + |11>) / sqrt 2` as a density matrix.
pub fn bell_state() -> DensityMatrix {
    let mut m = Matrix4::zeros();
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = Complex64::new(0.5, 0.0);
    }
    DensityMatrix(m)
}

pub fn bell_vector() -> Vector4<Complex64> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Vector4::new(a, Complex64::default(), Complex64::default(), a)
}

fn bit(index: usize, qubit: usize) -> usize {
    (index >> (1 - qubit)) & 1
}

fn check_channel_args(rate_hz: f64, time_s: f64, qubit: usize) -> Result<()> {
    if qubit > 1 {
        return Err(invalid(format!("qubit {qubit}, expected 0 or 1")));
    }
    if !(rate_hz >= 0.0) || !(time_s >= 0.0) {
        return Err(invalid(format!("rate {rate_hz} Hz over {time_s} s")));
    }
    Ok(())
}

/// `1 - exp(-rate * time)`, with zero rate or zero time meaning no decay.
fn decay(rate_hz: f64, time_s: f64) -> f64 {
    if rate_hz == 0.0 || time_s == 0.0 {
        0.0
    } else {
        -(-rate_hz * time_s).exp_m1()
    }
}

/// Phase flip `rho -> (1 - p) rho + p Z rho Z` on one qubit with
/// `p = (1 - exp(-rate t)) / 2`.
pub fn apply_dephasing(rho: &DensityMatrix, rate_hz: f64, time_s: f64, qubit: usize) -> Result<DensityMatrix> {
    check_channel_args(rate_hz, time_s, qubit)?;
    let p = decay(rate_hz, time_s) / 2.0;
    let mut out = rho.0;
    for i in 0..4 {
        for j in 0..4 {
            if bit(i, qubit) != bit(j, qubit) {
                // Z on both sides flips the sign of coherences across the qubit
                out[(i, j)] *= 1.0 - 2.0 * p;
            }
        }
    }
    DensityMatrix::new(out)
}

/// `rho -> (1 - p) rho + p (I/2 on the qubit) (x) Tr_qubit(rho)` with
/// `p = 1 - exp(-rate t)`.
pub fn apply_depolarizing(rho: &DensityMatrix, rate_hz: f64, time_s: f64, qubit: usize) -> Result<DensityMatrix> {
    check_channel_args(rate_hz, time_s, qubit)?;
    let p = decay(rate_hz, time_s);
    let shift = 1 - qubit;
    let with_bit = |i: usize, b: usize| (i & !(1 << shift)) | (b << shift);
    let mut mixed = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if bit(i, qubit) == bit(j, qubit) {
                let reduced = rho.0[(with_bit(i, 0), with_bit(j, 0))] + rho.0[(with_bit(i, 1), with_bit(j, 1))];
                mixed[(i, j)] = reduced * 0.5;
            }
        }
    }
    DensityMatrix::new(rho.0 * Complex64::new(1.0 - p, 0.0) + mixed * Complex64::new(p, 0.0))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, evaluated as
/// the squared trace norm of `sqrt(rho) sqrt(sigma)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let product = psd_sqrt(&rho.0)? * psd_sqrt(&sigma.0)?;
    let norm: f64 = product.singular_values().iter().sum();
    Ok((norm * norm).clamp(0.0, 1.0))
}

/// `<psi| rho |psi>`, the fidelity against a pure state.
pub fn pure_state_fidelity(rho: &DensityMatrix, psi: &Vector4<Complex64>) -> f64 {
    (psi.adjoint() * rho.0 * psi)[(0, 0)].re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Dephasing,
    Depolarizing,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Dephasing => "dephasing",
            Channel::Depolarizing => "depolarizing",
        }
    }

    pub fn apply(self, rho: &DensityMatrix, rate_hz: f64, time_s: f64, qubit: usize) -> Result<DensityMatrix> {
        match self {
            Channel::Dephasing => apply_dephasing(rho, rate_hz, time_s, qubit),
            Channel::Depolarizing => apply_depolarizing(rho, rate_hz, time_s, qubit),
        }
    }
}

/// Noise and link parameters. The optional lists turn a config into a sweep
/// grid; without them the scalar rates form one-point grids and the link
/// lengths default to [`DEFAULT_SWEEP_DISTANCES_KM`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub dephasing_rate_hz: f64,
    #[serde(default)]
    pub depolarization_rate_hz: f64,
    #[serde(default = "default_distance")]
    pub distance_km: f64,
    #[serde(default = "default_speed")]
    pub propagation_speed_km_per_s: f64,
    /// Recorded only; generation timing is not modeled.
    #[serde(default)]
    pub source_frequency_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing_rates_hz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depolarization_rates_hz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances_km: Option<Vec<f64>>,
}

fn default_distance() -> f64 {
    1.0
}

fn default_speed() -> f64 {
    DEFAULT_PROPAGATION_SPEED_KM_PER_S
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            dephasing_rate_hz: 0.0,
            depolarization_rate_hz: 0.0,
            distance_km: default_distance(),
            propagation_speed_km_per_s: default_speed(),
            source_frequency_hz: 0.0,
            dephasing_rates_hz: None,
            depolarization_rates_hz: None,
            distances_km: None,
        }
    }
}

impl NoiseConfig {
    /// t_l = l_d / c
    pub fn propagation_delay_s(&self) -> f64 {
        self.distance_km / self.propagation_speed_km_per_s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.propagation_speed_km_per_s > 0.0) {
            return Err(invalid("propagation speed must be positive"));
        }
        if !(self.distance_km > 0.0) {
            return Err(invalid("link length must be positive"));
        }
        let all_rates = [self.dephasing_rate_hz, self.depolarization_rate_hz, self.source_frequency_hz];
        if all_rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(invalid("rates and frequencies must be non-negative"));
        }
        Ok(())
    }

    pub fn grid(&self) -> FidelityGrid {
        FidelityGrid {
            dephasing_rates_hz: self.dephasing_rates_hz.clone().unwrap_or_else(|| vec![self.dephasing_rate_hz]),
            depolarization_rates_hz: self
                .depolarization_rates_hz
                .clone()
                .unwrap_or_else(|| vec![self.depolarization_rate_hz]),
            distances_km: self.distances_km.clone().unwrap_or_else(|| DEFAULT_SWEEP_DISTANCES_KM.to_vec()),
            propagation_speed_km_per_s: self.propagation_speed_km_per_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityGrid {
    pub dephasing_rates_hz: Vec<f64>,
    pub depolarization_rates_hz: Vec<f64>,
    pub distances_km: Vec<f64>,
    pub propagation_speed_km_per_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRow {
    pub channel: Channel,
    pub rate_hz: f64,
    pub distance_km: f64,
    pub fidelity: f64,
}

/// Bell-pair fidelity after both qubits sit in the channel for the
/// propagation delay of a link of `distance_km`.
pub fn bell_pair_fidelity(channel: Channel, rate_hz: f64, distance_km: f64, speed_km_per_s: f64) -> Result<f64> {
    let t = distance_km / speed_km_per_s;
    let bell = bell_state();
    let noisy = channel.apply(&channel.apply(&bell, rate_hz, t, 0)?, rate_hz, t, 1)?;
    fidelity(&noisy, &bell)
}

/// One row per (channel, rate, distance), sorted in that order. The
/// channels are exact expectations, so each cell is a single evaluation.
pub fn fidelity_sweep(grid: &FidelityGrid) -> Result<Vec<FidelityRow>> {
    if grid.distances_km.is_empty() || (grid.dephasing_rates_hz.is_empty() && grid.depolarization_rates_hz.is_empty()) {
        return Err(invalid("fidelity grid is empty"));
    }
    if !(grid.propagation_speed_km_per_s > 0.0) {
        return Err(invalid("propagation speed must be positive"));
    }
    let sorted = |xs: &[f64]| -> Result<Vec<f64>> {
        if xs.iter().any(|x| !(*x >= 0.0)) {
            return Err(invalid("grid values must be non-negative"));
        }
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        Ok(v)
    };
    let distances = sorted(&grid.distances_km)?;
    let mut rows = Vec::new();
    for (channel, rates) in [
        (Channel::Dephasing, &grid.dephasing_rates_hz),
        (Channel::Depolarizing, &grid.depolarization_rates_hz),
    ] {
        for rate in sorted(rates)? {
            for &d in &distances {
                rows.push(FidelityRow {
                    channel,
                    rate_hz: rate,
                    distance_km: d,
                    fidelity: bell_pair_fidelity(channel, rate, d, grid.propagation_speed_km_per_s)?,
                });
            }
        }
    }
    Ok(rows)
}
