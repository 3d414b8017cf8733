//! Cyclic-group invariants and recovery procedures.
//!
//! * `Z_{3n}` acting on `C_1 ⊕ … ⊕ C_n` by `v_k ↦ ζ_{3n}^k v_k`: the cubic
//!   unitary invariants `|v_1|²`, `v_1² conj(v_2)`, `v_1 v_k conj(v_{k+1})`,
//!   `v_n³` determine a generic orbit.
//! * `S¹` acting with weights 1 and 2: `|x_1|²`, `|x_2|²`, `x_1² conj(x_2)`.
//! * The regular representation of `Z_N` (cyclic shifts), recovered from
//!   the unitary bispectrum of `x̂`.
//! * A count of global-phase-invariant monomials, which vanishes below
//!   degree `N`.
//!
//! Coordinates in the weighted representations are 1-based in the docs
//! (`v_1 … v_n`) and stored 0-based.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::unitary_bispectrum;
use crate::inversion::invert_bispectrum;
use crate::spectral::{dft, principal_nth_root, ComplexVector, ToleranceConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightedJson", into = "WeightedJson")]
pub struct WeightedCyclicInvariants {
    /// The group is `Z_{3n}`.
    pub n: usize,
    /// `|v_1|²`.
    pub r: f64,
    /// Chain values `a_1 … a_{n-1}` followed by `a_n = v_n³`.
    pub a: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct WeightedJson {
    n: usize,
    r: f64,
    a: Vec<ComplexJson>,
}

impl TryFrom<WeightedJson> for WeightedCyclicInvariants {
    type Error = Error;

    fn try_from(raw: WeightedJson) -> Result<Self> {
        if raw.n == 0 || raw.a.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "expected n >= 1 and {} chain values, got {}",
                raw.n,
                raw.a.len()
            )));
        }
        if !(raw.r >= 0.0 && raw.r.is_finite()) {
            return Err(Error::InvalidInput(format!("r = {} must be finite and >= 0", raw.r)));
        }
        let a: Vec<_> = raw.a.iter().map(|c| Complex64::new(c.re, c.im)).collect();
        if a.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("chain values must be finite".into()));
        }
        Ok(Self { n: raw.n, r: raw.r, a })
    }
}

impl From<WeightedCyclicInvariants> for WeightedJson {
    fn from(w: WeightedCyclicInvariants) -> Self {
        Self {
            n: w.n,
            r: w.r,
            a: w.a.iter().map(|c| ComplexJson { re: c.re, im: c.im }).collect(),
        }
    }
}

/// The cubic unitary invariants of `v` under the weighted `Z_{3n}` action,
/// `n = v.len()`.
pub fn weighted_invariants(v: &ComplexVector) -> WeightedCyclicInvariants {
    let s = v.as_slice();
    let n = s.len();
    let mut a = Vec::with_capacity(n);
    if n >= 2 {
        a.push(s[0] * s[0] * s[1].conj());
        for k in 1..n - 1 {
            a.push(s[0] * s[k] * s[k + 1].conj());
        }
    }
    a.push(s[n - 1].powi(3));
    WeightedCyclicInvariants {
        n,
        r: s[0].norm_sqr(),
        a,
    }
}

/// `v_k ↦ ζ_{3n}^{jk} v_k`, the action of the `j`-th power of the generator.
pub fn weighted_action(v: &ComplexVector, j: usize) -> ComplexVector {
    let order = 3 * v.len();
    ComplexVector::from_vec_unchecked(
        v.iter()
            .enumerate()
            .map(|(idx, &c)| {
                let weight = ((idx + 1) * j) % order;
                c * Complex64::from_polar(1.0, std::f64::consts::TAU * weight as f64 / order as f64)
            })
            .collect(),
    )
}

/// Solves the chain forward from `v_1 = √r`, then removes the residual `S¹`
/// freedom with the cube `a_n`.
pub fn recover_weighted(
    inv: &WeightedCyclicInvariants,
    tol: &ToleranceConfig,
) -> Result<ComplexVector> {
    let n = inv.n;
    if n == 0 || inv.a.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} chain values, got {}",
            inv.a.len()
        )));
    }
    let floor = tol.genericity_floor;
    if !(inv.r > floor) {
        return Err(Error::NonGenericInput(format!("r = {:e} is below the floor", inv.r)));
    }
    let v1 = Complex64::new(inv.r.sqrt(), 0.0);
    let mut v = vec![v1];
    if n >= 2 {
        v.push((inv.a[0] / (v1 * v1)).conj());
        for k in 1..n - 1 {
            if !(v[k].norm() > floor) {
                return Err(Error::NonGenericInput(format!(
                    "|v_{}| = {:e} is below the floor",
                    k + 1,
                    v[k].norm()
                )));
            }
            v.push((inv.a[k] / (v1 * v[k])).conj());
        }
    }
    let last = v[n - 1];
    if !(last.norm() > floor) {
        return Err(Error::NonGenericInput(format!("|v_{n}| = {:e} is below the floor", last.norm())));
    }
    let mu = inv.a[n - 1] / last.powi(3);
    if (mu.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::InconsistentInvariants(format!(
            "|a_n / v_n³| = {} is not 1",
            mu.norm()
        )));
    }
    let theta = principal_nth_root(mu, 3 * n, floor)?;
    let mut power = Complex64::new(1.0, 0.0);
    let out = v
        .into_iter()
        .map(|c| {
            power *= theta;
            power * c
        })
        .collect();
    ComplexVector::new(out)
}

/// `S¹` acting on `C²` with weights 1 and 2: recovers `(x_1, x_2)` from
/// `|x_1|² = r1`, `|x_2|² = r2`, `x_1² conj(x_2) = a`, with `x_1` real
/// positive.
pub fn recover_weight12(r1: f64, r2: f64, a: Complex64, tol: &ToleranceConfig) -> Result<ComplexVector> {
    let floor = tol.genericity_floor;
    if !(r1 > floor) || !(r2 > floor) {
        return Err(Error::NonGenericInput(format!(
            "moduli ({r1:e}, {r2:e}) must exceed the floor"
        )));
    }
    let expected = r1 * r1 * r2;
    if (a.norm_sqr() - expected).abs() > 1e-6 * expected {
        return Err(Error::InconsistentInvariants(format!(
            "|a|² = {} but r1²·r2 = {expected}",
            a.norm_sqr()
        )));
    }
    let x1 = Complex64::new(r1.sqrt(), 0.0);
    ComplexVector::new(vec![x1, (a / (x1 * x1)).conj()])
}

/// Recovers the cyclic-shift class of `x` from the unitary bispectrum of its
/// spectrum.
pub fn recover_cyclic_orbit(x: &ComplexVector, tol: &ToleranceConfig) -> Result<ComplexVector> {
    let b = unitary_bispectrum(&dft(x));
    Ok(invert_bispectrum(&b, tol)?.signal)
}

/// Number of exponent vectors `(a_0, …, a_{N-1})` of total degree `d` whose
/// monomial is fixed by every global phase `ζ^m`, i.e. `Σ a_i ≡ 0 (mod N)`.
pub fn degree_audit(n: usize, d: usize) -> u64 {
    assert!(n >= 1, "dimension must be positive");
    let mut exponents = vec![0usize; n];
    count_weight_zero(&mut exponents, 0, d, n)
}

fn count_weight_zero(exponents: &mut [usize], slot: usize, remaining: usize, n: usize) -> u64 {
    if slot + 1 == exponents.len() {
        exponents[slot] = remaining;
        let weight: usize = exponents.iter().sum();
        return u64::from(weight.is_multiple_of(n));
    }
    (0..=remaining)
        .map(|e| {
            exponents[slot] = e;
            count_weight_zero(exponents, slot + 1, remaining - e, n)
        })
        .sum()
}
