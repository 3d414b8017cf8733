//! Heisenberg bispectrum and the degree-N power invariant.
//!
//! Both bispectra use the unitary form `B(i,j) = V[i] V[j] conj(V[i+j])`.
//! For the spectrum of a real vector this coincides entrywise with
//! `V[i] V[j] V[N-i-j]`. `z` is taken from the unnormalized transform, so
//! `B^FM` entries carry the transform's powers of `N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_order, Error, Result};
use crate::spectral::{dft, dft_real, ComplexVector, RealVector};

/// An `N × N` matrix of third-order invariants, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct BispectrumMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl BispectrumMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        let entries: Vec<_> = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        if entries.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("bispectrum entries must be finite".into()));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i % self.n) * self.n + j % self.n]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let (a, b) = (self.get(i, j), self.get(j, i));
                (a - b).norm() <= tol * a.norm().max(1.0)
            })
        })
    }
}

impl TryFrom<MatrixJson> for BispectrumMatrix {
    type Error = Error;

    fn try_from(raw: MatrixJson) -> Result<Self> {
        let n = raw.re.len();
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !square(&raw.re) || !square(&raw.im) {
            return Err(Error::InvalidInput("bispectrum must be a nonempty square matrix".into()));
        }
        Self::from_fn(n, |i, j| Complex64::new(raw.re[i][j], raw.im[i][j]))
    }
}

impl From<BispectrumMatrix> for MatrixJson {
    fn from(b: BispectrumMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            b.entries
                .chunks(b.n)
                .map(|row| row.iter().map(f).collect())
                .collect()
        };
        Self {
            re: rows(|c| c.re),
            im: rows(|c| c.im),
        }
    }
}

/// The invariant bundle `(B^M, B^FM, I_N)` of one signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InvariantsJson", into = "InvariantsJson")]
pub struct HeisenbergInvariants {
    pub n: usize,
    pub bm: BispectrumMatrix,
    pub bfm: BispectrumMatrix,
    pub i_n: Complex64,
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct InvariantsJson {
    n: usize,
    bm: BispectrumMatrix,
    bfm: BispectrumMatrix,
    #[serde(rename = "iN")]
    i_n: ScalarJson,
}

impl TryFrom<InvariantsJson> for HeisenbergInvariants {
    type Error = Error;

    fn try_from(raw: InvariantsJson) -> Result<Self> {
        if raw.bm.n != raw.n || raw.bfm.n != raw.n {
            return Err(Error::InvalidInput(format!(
                "declared n = {} but bm is {}x{} and bfm is {}x{}",
                raw.n, raw.bm.n, raw.bm.n, raw.bfm.n, raw.bfm.n
            )));
        }
        let i_n = Complex64::new(raw.i_n.re, raw.i_n.im);
        if !i_n.is_finite() {
            return Err(Error::InvalidInput("iN must be finite".into()));
        }
        Ok(Self {
            n: raw.n,
            bm: raw.bm,
            bfm: raw.bfm,
            i_n,
        })
    }
}

impl From<HeisenbergInvariants> for InvariantsJson {
    fn from(v: HeisenbergInvariants) -> Self {
        Self {
            n: v.n,
            bm: v.bm,
            bfm: v.bfm,
            i_n: ScalarJson {
                re: v.i_n.re,
                im: v.i_n.im,
            },
        }
    }
}

/// `y_j = |x_j|²`.
pub fn modulus_vector(x: &ComplexVector) -> RealVector {
    RealVector::from_vec_unchecked(x.iter().map(|c| c.norm_sqr()).collect())
}

/// `z_k = |x̂[k]|²`.
pub fn fourier_modulus_vector(x: &ComplexVector) -> RealVector {
    modulus_vector(&dft(x))
}

pub fn unitary_bispectrum(v: &ComplexVector) -> BispectrumMatrix {
    let n = v.len();
    let s = v.as_slice();
    BispectrumMatrix {
        n,
        entries: (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                s[i] * s[j] * s[(i + j) % n].conj()
            })
            .collect(),
    }
}

pub fn modulus_bispectrum(x: &ComplexVector) -> BispectrumMatrix {
    unitary_bispectrum(&dft_real(&modulus_vector(x)))
}

pub fn fourier_modulus_bispectrum(x: &ComplexVector) -> BispectrumMatrix {
    unitary_bispectrum(&dft_real(&fourier_modulus_vector(x)))
}

/// `I_N(x) = Σ_j x_j^N`.
pub fn power_invariant(x: &ComplexVector) -> Complex64 {
    let n = x.len() as i32;
    x.iter().map(|c| c.powi(n)).sum()
}

pub fn heisenberg_invariants(x: &ComplexVector) -> HeisenbergInvariants {
    HeisenbergInvariants {
        n: x.len(),
        bm: modulus_bispectrum(x),
        bfm: fourier_modulus_bispectrum(x),
        i_n: power_invariant(x),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    /// Indices `k` with `|ŷ[k]| <= floor`.
    pub modulus_failures: Vec<usize>,
    /// Indices `k` with `|ẑ[k]| <= floor`.
    pub fourier_modulus_failures: Vec<usize>,
    pub min_modulus_coefficient: f64,
    pub min_fourier_modulus_coefficient: f64,
}

/// Checks that both `ŷ` and `ẑ` stay above `floor` in magnitude.
pub fn is_generic(x: &ComplexVector, floor: f64) -> GenericityReport {
    let y_hat = dft_real(&modulus_vector(x));
    let z_hat = dft_real(&fourier_modulus_vector(x));
    let failures = |v: &ComplexVector| -> Vec<usize> {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !(c.norm() > floor))
            .map(|(k, _)| k)
            .collect()
    };
    let min_abs = |v: &ComplexVector| v.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
    let modulus_failures = failures(&y_hat);
    let fourier_modulus_failures = failures(&z_hat);
    GenericityReport {
        generic: modulus_failures.is_empty() && fourier_modulus_failures.is_empty(),
        modulus_failures,
        fourier_modulus_failures,
        min_modulus_coefficient: min_abs(&y_hat),
        min_fourier_modulus_coefficient: min_abs(&z_hat),
    }
}

/// Deviation between two complex values, relative to `max(|a|, |b|, 1)`.
pub(crate) fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub(crate) fn matrix_deviation(a: &BispectrumMatrix, b: &BispectrumMatrix) -> f64 {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(&p, &q)| relative_deviation(p, q))
        .fold(0.0, f64::max)
}

/// Largest entrywise relative deviation across `bm`, `bfm` and `i_n`.
pub fn invariant_distance(a: &HeisenbergInvariants, b: &HeisenbergInvariants) -> Result<f64> {
    check_order(a.n, b.n)?;
    Ok(matrix_deviation(&a.bm, &b.bm)
        .max(matrix_deviation(&a.bfm, &b.bfm))
        .max(relative_deviation(a.i_n, b.i_n)))
}
