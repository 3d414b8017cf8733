//! Complex vectors, the discrete Fourier transform and small numeric helpers.
//!
//! The forward transform is unnormalized with kernel `exp(-2πi·jk/N)`; the
//! inverse carries the `1/N`. With this convention a real vector satisfies
//! `x̂[N-k] = conj(x̂[k])` and modulation by `ζ^{nj}` shifts the spectrum,
//! `(M_n x)^[k] = x̂[k-n]`. Every invariant value in the crate depends on it.

use std::f64::consts::TAU;
use std::ops::Index;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `C^N`, in either the time or the frequency domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct ComplexVector(Vec<Complex64>);

/// An element of `R^N`. Serialized with the complex schema and a zero `im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct RealVector(Vec<f64>);

#[derive(Serialize, Deserialize)]
struct VectorJson {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(j) = entries.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {j} is not finite")));
        }
        Ok(Self(entries))
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::InvalidInput(format!(
                "re has {} entries but im has {}",
                re.len(),
                im.len()
            )));
        }
        Self::new(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; a vector has at least one entry.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|&v| v * c).collect())
    }

    /// `⟨self, other⟩ = Σ self_j · conj(other_j)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    /// Euclidean distance; panics on a length mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "distance between vectors of different length");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn real_part(&self) -> RealVector {
        RealVector(self.0.iter().map(|c| c.re).collect())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|c| c.conj()).collect())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        &self.0[j]
    }
}

impl<'a> IntoIterator for &'a ComplexVector {
    type Item = &'a Complex64;
    type IntoIter = std::slice::Iter<'a, Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl TryFrom<VectorJson> for ComplexVector {
    type Error = Error;

    fn try_from(raw: VectorJson) -> Result<Self> {
        if raw.re.len() != raw.n || raw.im.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "declared n = {} but re/im have {}/{} entries",
                raw.n,
                raw.re.len(),
                raw.im.len()
            )));
        }
        Self::from_parts(&raw.re, &raw.im)
    }
}

impl From<ComplexVector> for VectorJson {
    fn from(v: ComplexVector) -> Self {
        Self {
            n: v.len(),
            re: v.0.iter().map(|c| c.re).collect(),
            im: v.0.iter().map(|c| c.im).collect(),
        }
    }
}

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(j) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {j} is not finite")));
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn to_complex(&self) -> ComplexVector {
        ComplexVector(self.0.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl TryFrom<VectorJson> for RealVector {
    type Error = Error;

    fn try_from(raw: VectorJson) -> Result<Self> {
        if raw.re.len() != raw.n || raw.im.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "declared n = {} but re/im have {}/{} entries",
                raw.n,
                raw.re.len(),
                raw.im.len()
            )));
        }
        if raw.im.iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidInput("real vector has a nonzero imaginary part".into()));
        }
        Self::new(raw.re)
    }
}

impl From<RealVector> for VectorJson {
    fn from(v: RealVector) -> Self {
        Self {
            n: v.len(),
            im: vec![0.0; v.len()],
            re: v.0,
        }
    }
}

/// Numerical thresholds shared across the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Relative-equality threshold.
    pub rel_eq: f64,
    /// Smallest coefficient magnitude treated as nonzero.
    pub genericity_floor: f64,
    /// Orbit-distance acceptance, relative.
    pub recovery_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel_eq: 1e-9,
            genericity_floor: 1e-8,
            recovery_tol: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.rel_eq) && ok(self.genericity_floor) && ok(self.recovery_tol) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("tolerances must be positive: {self:?}")))
        }
    }
}

/// `ζ^r` for `r = 0..n` with `ζ = exp(2πi/n)`, each entry computed from its
/// own reduced exponent.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / n as f64))
        .collect()
}

/// Reduces a signed index into `[0, n)`.
pub fn modulo(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

fn transform(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let roots = roots_of_unity(n);
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let w = roots[(j * k) % n];
                    v * if sign < 0.0 { w.conj() } else { w }
                })
                .sum()
        })
        .collect()
}

/// Unnormalized forward transform, `x̂[k] = Σ_j x_j exp(-2πi·jk/N)`.
pub fn dft(x: &ComplexVector) -> ComplexVector {
    ComplexVector(transform(&x.0, -1.0))
}

/// Inverse transform, `x_j = (1/N) Σ_k X_k exp(+2πi·jk/N)`.
pub fn idft(x: &ComplexVector) -> ComplexVector {
    let scale = 1.0 / x.len() as f64;
    ComplexVector(transform(&x.0, 1.0).into_iter().map(|v| v * scale).collect())
}

pub fn dft_real(x: &RealVector) -> ComplexVector {
    dft(&x.to_complex())
}

/// `output[j] = v[(j + k) mod N]`.
pub fn cyclic_shift(v: &ComplexVector, k: i64) -> ComplexVector {
    let n = v.len();
    let k = modulo(k, n);
    ComplexVector((0..n).map(|j| v.0[(j + k) % n]).collect())
}

pub fn cyclic_shift_real(v: &RealVector, k: i64) -> RealVector {
    let n = v.len();
    let k = modulo(k, n);
    RealVector((0..n).map(|j| v.0[(j + k) % n]).collect())
}

/// The N-th root of `c` with argument in `[0, 2π/N)`.
pub fn principal_nth_root(c: Complex64, n: usize, floor: f64) -> Result<Complex64> {
    assert!(n > 0, "root order must be positive");
    let r = c.norm();
    if !(r > floor) {
        return Err(Error::ZeroInput(r));
    }
    let arg = c.arg().rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    let arg = if arg >= TAU { 0.0 } else { arg };
    Ok(Complex64::from_polar(r.powf(1.0 / n as f64), arg / n as f64))
}

/// I.i.d. standard complex Gaussian entries (`E|x_j|² = 1`), reproducible
/// from `seed`.
pub fn sample_random_signal(n: usize, seed: u64) -> ComplexVector {
    assert!(n > 0, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector(
        (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * s, im * s)
            })
            .collect(),
    )
}

/// Real vector with i.i.d. standard normal entries, reproducible from `seed`.
pub fn sample_random_real(n: usize, seed: u64) -> RealVector {
    assert!(n > 0, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealVector((0..n).map(|_| rng.sample(StandardNormal)).collect())
}
