//! The finite Heisenberg group `H_N` and its action on `C^N`.
//!
//! Elements are triples `(k, n, m)` over `Z_N` with
//! `(k, n, m)(k', n', m') = (k + k', n + n', m + m' + k n')`. The triple acts
//! as `Z_m ∘ M_n ∘ T_k`, i.e. `(g·x)_j = ζ^{m + n j} x_{j + k}`, which is a
//! homomorphism for that law because `T_k M_{n'} = ζ^{k n'} M_{n'} T_k`.

use serde::{Deserialize, Serialize};

use crate::error::{check_order, Error, Result};
use crate::spectral::{modulo, roots_of_unity, ComplexVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupElementJson", into = "GroupElementJson")]
pub struct GroupElement {
    order: usize,
    k: usize,
    n: usize,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupElementJson {
    #[serde(rename = "N")]
    order: usize,
    k: i64,
    n: i64,
    m: i64,
}

impl GroupElement {
    /// Builds `(k, n, m)` in `H_order`, reducing each coordinate mod `order`.
    pub fn new(order: usize, k: i64, n: i64, m: i64) -> Self {
        assert!(order > 0, "group order must be positive");
        Self {
            order,
            k: modulo(k, order),
            n: modulo(n, order),
            m: modulo(m, order),
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::new(order, 0, 0, 0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Time shift.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Modulation.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Global phase.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.n == 0 && self.m == 0
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}) in H_{}", self.k, self.n, self.m, self.order)
    }
}

impl TryFrom<GroupElementJson> for GroupElement {
    type Error = Error;

    fn try_from(raw: GroupElementJson) -> Result<Self> {
        if raw.order == 0 {
            return Err(Error::InvalidInput("group order must be positive".into()));
        }
        Ok(Self::new(raw.order, raw.k, raw.n, raw.m))
    }
}

impl From<GroupElement> for GroupElementJson {
    fn from(g: GroupElement) -> Self {
        Self {
            order: g.order,
            k: g.k as i64,
            n: g.n as i64,
            m: g.m as i64,
        }
    }
}

pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    check_order(g.order, h.order)?;
    let order = g.order;
    Ok(GroupElement {
        order,
        k: (g.k + h.k) % order,
        n: (g.n + h.n) % order,
        m: (g.m + h.m + g.k * h.n) % order,
    })
}

/// `(-k, -n, -m + k n)`.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let order = g.order as i64;
    let (k, n, m) = (g.k as i64, g.n as i64, g.m as i64);
    GroupElement::new(g.order, -k, -n, -m + k * n % order)
}

pub fn act(g: &GroupElement, x: &ComplexVector) -> Result<ComplexVector> {
    check_order(g.order, x.len())?;
    let roots = roots_of_unity(g.order);
    Ok(act_with_roots(g, x, &roots))
}

fn act_with_roots(
    g: &GroupElement,
    x: &ComplexVector,
    roots: &[num_complex::Complex64],
) -> ComplexVector {
    let n = g.order;
    let v = x.as_slice();
    ComplexVector::from_vec_unchecked(
        (0..n)
            .map(|j| roots[(g.m + g.n * j) % n] * v[(j + g.k) % n])
            .collect(),
    )
}

/// All `N³` elements in lexicographic `(k, n, m)` order.
pub fn enumerate_group(order: usize) -> impl Iterator<Item = GroupElement> {
    assert!(order > 0, "group order must be positive");
    (0..order).flat_map(move |k| {
        (0..order).flat_map(move |n| (0..order).map(move |m| GroupElement { order, k, n, m }))
    })
}

/// Exhaustive `min_g ‖g·x − target‖`, returning the first minimizer in
/// enumeration order.
pub fn orbit_distance(x: &ComplexVector, target: &ComplexVector) -> Result<(f64, GroupElement)> {
    check_order(x.len(), target.len())?;
    let order = x.len();
    let roots = roots_of_unity(order);
    let t = target.as_slice();
    let v = x.as_slice();
    let mut best = (f64::INFINITY, GroupElement::identity(order));
    for g in enumerate_group(order) {
        let d2: f64 = (0..order)
            .map(|j| (roots[(g.m + g.n * j) % order] * v[(j + g.k) % order] - t[j]).norm_sqr())
            .sum();
        if d2 < best.0 {
            best = (d2, g);
        }
    }
    Ok((best.0.sqrt(), best.1))
}

/// True iff the orbit distance is at most `tol · max(‖x‖, 1)`.
pub fn orbit_equivalent(x: &ComplexVector, target: &ComplexVector, tol: f64) -> Result<bool> {
    let (d, _) = orbit_distance(x, target)?;
    Ok(d <= tol * x.norm().max(1.0))
}
