//! The Weyl-Heisenberg group `H(N)` as an exact abstract group.
//!
//! Elements are kept in the normal form `τ^l Q^i P^j` with `τ = -e^{iπ/N}`.
//! For odd `N`, `τ = ω^{(N+1)/2}` already lies in `⟨ω⟩`, so the phase exponent
//! is taken mod `N`; for even `N` it is taken mod `2N`. Either way the group
//! law is `(l, i, j)(l', i', j') = (l + l' + 2 j i', i + i', j + j')`, which
//! is `P^j Q^{i'} = ω^{j i'} Q^{i'} P^j` written with `ω = τ²`.

use crate::dense::DenseUnitary;
use crate::numtheory::{add_mod, mul_mod, neg_mod};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WHContext {
    dim: u64,
    phase_order: u64,
}

impl WHContext {
    pub fn new(dim: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("Weyl-Heisenberg dimension must be >= 2, got {dim}")));
        }
        let phase_order = if dim.is_multiple_of(2) { 2 * dim } else { dim };
        Ok(Self { dim, phase_order })
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Order `L` of `τ_N`: `N` for odd `N`, `2N` for even `N`.
    pub fn phase_order(&self) -> u64 {
        self.phase_order
    }

    /// `τ_N = -e^{iπ/N}`.
    pub fn tau(&self) -> Complex64 {
        -Complex64::from_polar(1.0, PI / self.dim as f64)
    }

    /// `τ_N^k` evaluated as a single exponential so the error does not grow with `k`.
    pub fn tau_pow(&self, k: u64) -> Complex64 {
        let k = k % self.phase_order;
        // τ^k = e^{iπ k (N+1)/N}
        let num = (k as u128 * (self.dim as u128 + 1)) % (2 * self.dim as u128);
        Complex64::from_polar(1.0, PI * num as f64 / self.dim as f64)
    }

    /// `ω_N^k = e^{2πik/N}`.
    pub fn omega_pow(&self, k: u64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * (k % self.dim) as f64 / self.dim as f64)
    }

    pub fn identity(&self) -> WHElement {
        WHElement { ctx: *self, l: 0, i: 0, j: 0 }
    }

    pub fn element(&self, l: u64, i: u64, j: u64) -> WHElement {
        WHElement {
            ctx: *self,
            l: l % self.phase_order,
            i: i % self.dim,
            j: j % self.dim,
        }
    }

    /// `Q_N` as a group element.
    pub fn q(&self) -> WHElement {
        self.element(0, 1, 0)
    }

    /// `P_N` as a group element.
    pub fn p(&self) -> WHElement {
        self.element(0, 0, 1)
    }

    /// All elements, ordered by `(l, i, j)`.
    pub fn elements(&self) -> impl Iterator<Item = WHElement> + '_ {
        let n = self.dim;
        (0..self.phase_order).flat_map(move |l| (0..n).flat_map(move |i| (0..n).map(move |j| self.element(l, i, j))))
    }

    pub fn point(&self, i: u64, j: u64) -> PhasePoint {
        PhasePoint::new(self.dim, i, j)
    }
}

/// `τ^l Q^i P^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WHElement {
    #[serde(skip)]
    pub ctx: WHContext,
    pub l: u64,
    pub i: u64,
    pub j: u64,
}

impl fmt::Display for WHElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ^{} Q^{} P^{}", self.l, self.i, self.j)
    }
}

/// Coset label `(i, j) ∈ Z_N x Z_N` of `Q^i P^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhasePoint {
    pub dim: u64,
    pub i: u64,
    pub j: u64,
}

impl PhasePoint {
    pub fn new(dim: u64, i: u64, j: u64) -> Self {
        Self { dim, i: i % dim, j: j % dim }
    }

    pub fn zero(dim: u64) -> Self {
        Self { dim, i: 0, j: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn add(&self, other: &PhasePoint) -> Result<PhasePoint> {
        if self.dim != other.dim {
            return Err(Error::ModulusMismatch { left: self.dim, right: other.dim });
        }
        Ok(PhasePoint::new(self.dim, self.i + other.i, self.j + other.j))
    }

    pub fn neg(&self) -> PhasePoint {
        PhasePoint::new(self.dim, neg_mod(self.i, self.dim), neg_mod(self.j, self.dim))
    }

    /// All `N²` points.
    pub fn all(dim: u64) -> impl Iterator<Item = PhasePoint> {
        (0..dim).flat_map(move |i| (0..dim).map(move |j| PhasePoint { dim, i, j }))
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

fn check_ctx(a: &WHElement, b: &WHElement) -> Result<()> {
    if a.ctx != b.ctx {
        return Err(Error::ModulusMismatch { left: a.ctx.dim, right: b.ctx.dim });
    }
    Ok(())
}

pub fn wh_mul(a: &WHElement, b: &WHElement) -> Result<WHElement> {
    check_ctx(a, b)?;
    let ctx = a.ctx;
    let big_l = ctx.phase_order;
    let twist = mul_mod(2 * a.j, b.i, big_l);
    Ok(WHElement {
        ctx,
        l: add_mod(add_mod(a.l, b.l, big_l), twist, big_l),
        i: add_mod(a.i, b.i, ctx.dim),
        j: add_mod(a.j, b.j, ctx.dim),
    })
}

pub fn wh_inverse(a: &WHElement) -> WHElement {
    let ctx = a.ctx;
    let big_l = ctx.phase_order;
    // (l, i, j)(l', -i, -j) has phase l + l' - 2ji
    WHElement {
        ctx,
        l: add_mod(neg_mod(a.l, big_l), mul_mod(2 * a.j, a.i, big_l), big_l),
        i: neg_mod(a.i, ctx.dim),
        j: neg_mod(a.j, ctx.dim),
    }
}

/// `N³` for odd `N`, `2N³` for even `N`.
pub fn wh_group_order(ctx: &WHContext) -> u64 {
    ctx.phase_order * ctx.dim * ctx.dim
}

/// The central elements `τ^l`, `l = 0..L`.
pub fn center(ctx: &WHContext) -> Vec<WHElement> {
    (0..ctx.phase_order).map(|l| ctx.element(l, 0, 0)).collect()
}

/// Drops the phase: the quotient map onto `Z_N x Z_N`.
pub fn project(a: &WHElement) -> PhasePoint {
    PhasePoint::new(a.ctx.dim, a.i, a.j)
}

/// `q((i,j),(i',j')) = i'j - ij' mod N`.
pub fn symplectic_form(u: &PhasePoint, v: &PhasePoint) -> Result<u64> {
    if u.dim != v.dim {
        return Err(Error::ModulusMismatch { left: u.dim, right: v.dim });
    }
    let n = u.dim;
    Ok(add_mod(mul_mod(v.i, u.j, n), neg_mod(mul_mod(u.i, v.j, n), n), n))
}

/// Dense `N x N` matrix `Q_N^i P_N^j` (no phase).
pub fn qp_dense(dim: u64, i: u64, j: u64) -> DenseUnitary {
    let ctx = WHContext::new(dim).expect("dim >= 2");
    let n = dim as usize;
    let mut m = DenseUnitary::zeros(n);
    // P^j |c> = |c - j>, then Q^i contributes ω^{i r} on row r.
    for c in 0..n {
        let r = (c + n - (j as usize % n)) % n;
        m.set(r, c, ctx.omega_pow(i * r as u64));
    }
    m
}

/// Dense realization `τ^l Q^i P^j` in the clock-and-shift representation.
pub fn to_dense(a: &WHElement) -> DenseUnitary {
    let mut m = qp_dense(a.ctx.dim, a.i, a.j);
    m.scale(a.ctx.tau_pow(a.l));
    m
}
