//! Recovery of a spectrum, up to the cyclic-shift ambiguity, from its
//! unitary bispectrum `B(i,j) = V[i] V[j] conj(V[i+j])`.
//!
//! Frequency marching:
//!
//! 1. `B(0,0) = |V[0]|² V[0]`, so `V[0] = B(0,0) / |B(0,0)|^{2/3}`.
//! 2. `B(k,0) = |V[k]|² V[0]` gives every modulus.
//! 3. `arg B(1,k) = φ_1 + φ_k − φ_{k+1}` writes each phase as `k φ_1 + d_k`.
//!    Closing the loop at `φ_N = φ_0` leaves `N` choices for `φ_1`, one per
//!    cyclic shift; the one with `N φ_1 = (φ_0 − d_N) mod 2π` is kept.
//!
//! Only row 1 feeds the recursion; the other entries enter the residual.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{matrix_deviation, unitary_bispectrum, BispectrumMatrix};
use crate::spectral::{idft, ComplexVector, RealVector, ToleranceConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    /// Recovered frequency-domain vector (canonical shift).
    pub spectrum: ComplexVector,
    /// Its inverse transform.
    pub signal: ComplexVector,
    /// Largest relative deviation between the input and the bispectrum of
    /// `spectrum`.
    pub residual: f64,
}

pub fn invert_bispectrum(b: &BispectrumMatrix, tol: &ToleranceConfig) -> Result<InversionResult> {
    let n = b.n();
    let floor = tol.genericity_floor;

    let b00 = b.get(0, 0);
    if !(b00.norm() > floor) {
        return Err(Error::NonGenericInput(format!(
            "|B(0,0)| = {:e} is below the genericity floor",
            b00.norm()
        )));
    }
    let v0 = b00 / b00.norm().powf(2.0 / 3.0);

    let mut moduli = Vec::with_capacity(n);
    for k in 0..n {
        let sq = b.get(k, 0) / v0;
        let scale = sq.norm().max(1.0);
        if !(sq.re > floor) || sq.im.abs() > tol.rel_eq * scale {
            return Err(Error::NonGenericInput(format!(
                "|V[{k}]|² estimate {sq} is not a positive real above the floor"
            )));
        }
        moduli.push(sq.re.sqrt());
    }

    // φ_k = k φ_1 + d_k with d_1 = 0; d_N closes the loop
    let phi0 = v0.arg();
    let mut offsets = vec![0.0; n + 1];
    offsets[0] = phi0;
    for k in 1..n {
        offsets[k + 1] = offsets[k] - b.get(1, k).arg();
    }
    let phi1 = (phi0 - offsets[n]).rem_euclid(TAU) / n as f64;

    let spectrum: Vec<Complex64> = (0..n)
        .map(|k| {
            let phase = if k == 0 { phi0 } else { k as f64 * phi1 + offsets[k] };
            Complex64::from_polar(moduli[k], phase)
        })
        .collect();
    let spectrum = ComplexVector::new(spectrum)?;
    let residual = matrix_deviation(b, &unitary_bispectrum(&spectrum));
    Ok(InversionResult {
        signal: idft(&spectrum),
        spectrum,
        residual,
    })
}

/// As [`invert_bispectrum`], failing with `ResidualTooLarge` past `bound`.
pub fn invert_bispectrum_within(
    b: &BispectrumMatrix,
    tol: &ToleranceConfig,
    bound: f64,
) -> Result<InversionResult> {
    let result = invert_bispectrum(b, tol)?;
    if result.residual > bound {
        return Err(Error::ResidualTooLarge {
            residual: result.residual,
            bound,
        });
    }
    Ok(result)
}

/// Inverts the bispectrum of a real vector, returning a cyclic shift of it.
pub fn invert_real_bispectrum(b: &BispectrumMatrix, tol: &ToleranceConfig) -> Result<RealVector> {
    invert_real_bispectrum_with_residual(b, tol).map(|(v, _)| v)
}

pub(crate) fn invert_real_bispectrum_with_residual(
    b: &BispectrumMatrix,
    tol: &ToleranceConfig,
) -> Result<(RealVector, f64)> {
    let result = invert_bispectrum(b, tol)?;
    let norm = result.signal.norm();
    let imag = result.signal.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if imag > tol.rel_eq * norm {
        return Err(Error::NotRealSignal {
            imag: imag / norm.max(f64::MIN_POSITIVE),
        });
    }
    Ok((result.signal.real_part(), result.residual))
}
