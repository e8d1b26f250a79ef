//! Dense complex matrices used as a numerical oracle.
//!
//! Everything the abstract layers claim about conjugation is checked here
//! against explicit unitaries: equality up to a global phase, `Ad`-actions,
//! recognition of (tensor) Weyl-Heisenberg cosets and extraction of the
//! induced `SL(2,Z_N)` matrix.

use crate::clifford1::SL2Mat;
use crate::numtheory::{mul_mod, reduce};
use crate::weylheis::{qp_dense, PhasePoint, WHContext};
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

/// Per-dimension default tolerance: matrices of dimension `N` compare within `1e-9 * N`.
pub const DEFAULT_TOL_PER_DIM: f64 = 1e-9;

static TOL_PER_DIM_BITS: AtomicU64 = AtomicU64::new(0);

/// Overrides the per-dimension tolerance for matrices created afterwards.
pub fn set_tolerance_per_dim(tol: f64) {
    TOL_PER_DIM_BITS.store(tol.to_bits(), Ordering::Relaxed);
}

pub fn tolerance_per_dim() -> f64 {
    match TOL_PER_DIM_BITS.load(Ordering::Relaxed) {
        0 => DEFAULT_TOL_PER_DIM,
        bits => f64::from_bits(bits),
    }
}

/// Square complex matrix with a comparison tolerance.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    dim: usize,
    entries: Vec<Complex64>,
    pub tol: f64,
}

/// Result of [`equal_up_to_phase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatch {
    pub matched: bool,
    pub phase: Option<Complex64>,
}

impl DenseUnitary {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
            tol: tolerance_per_dim() * dim as f64,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (k, &v) in d.iter().enumerate() {
            m.set(k, k, v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn scale(&mut self, s: Complex64) {
        for e in &mut self.entries {
            *e *= s;
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        m.scale(s);
        m
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ModulusMismatch {
                left: self.dim as u64,
                right: other.dim as u64,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        out.tol = self.tol.max(other.tol);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let dst = &mut out.entries[r * n..(r + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        out.tol = self.tol;
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        out.set(r1 * m + r2, c1 * m + c2, a * other.get(r2, c2));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut out = Self::identity(self.dim).with_tol(self.tol);
        for _ in 0..k {
            out = out.mul(self).expect("same dim");
        }
        out
    }

    /// Entrywise comparison within `max(self.tol, other.tol)`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = self.tol.max(other.tol);
        self.dim == other.dim && self.entries.iter().zip(&other.entries).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_unitary(&self) -> bool {
        let prod = self.mul(&self.adjoint()).expect("same dim");
        prod.approx_eq(&Self::identity(self.dim))
    }
}

/// Decides whether `a = phase * b`.
///
/// The phase is read off the first entry of `b` whose magnitude exceeds `1/(2√N)`.
pub fn equal_up_to_phase(a: &DenseUnitary, b: &DenseUnitary) -> Result<PhaseMatch> {
    a.check_dim(b)?;
    let tol = a.tol.max(b.tol);
    let threshold = 0.5 / (a.dim as f64).sqrt();
    let no = PhaseMatch { matched: false, phase: None };
    let Some(k) = b.entries.iter().position(|z| z.norm() > threshold) else {
        return Ok(no);
    };
    let phase = a.entries[k] / b.entries[k];
    if (phase.norm() - 1.0).abs() > tol {
        return Ok(no);
    }
    let matched = a.entries.iter().zip(&b.entries).all(|(x, y)| (x - phase * y).norm() <= tol);
    Ok(if matched { PhaseMatch { matched, phase: Some(phase) } } else { no })
}

/// `X A X†`.
pub fn ad_action(x: &DenseUnitary, a: &DenseUnitary) -> Result<DenseUnitary> {
    x.mul(a)?.mul(&x.adjoint())
}

/// Recognizes `w` as `phase * Q^i P^j` by scanning all `N²` cosets.
pub fn extract_wh_coset(w: &DenseUnitary, ctx: &WHContext) -> Result<PhasePoint> {
    let n = ctx.dim();
    if w.dim() as u64 != n {
        return Err(Error::ModulusMismatch { left: w.dim() as u64, right: n });
    }
    for p in PhasePoint::all(n) {
        let cand = qp_dense(n, p.i, p.j).with_tol(w.tol);
        if equal_up_to_phase(w, &cand)?.matched {
            return Ok(p);
        }
    }
    Err(Error::NotInWeylHeisenberg)
}

/// The `SL(2,Z_N)` matrix `[[a,c],[b,d]]` with `X Q X† ∝ Q^a P^b` and `X P X† ∝ Q^c P^d`.
pub fn phi_of(x: &DenseUnitary, ctx: &WHContext) -> Result<SL2Mat> {
    let n = ctx.dim();
    let q = qp_dense(n, 1, 0).with_tol(x.tol);
    let p = qp_dense(n, 0, 1).with_tol(x.tol);
    let img = |g: &DenseUnitary, which: usize| {
        extract_wh_coset(&ad_action(x, g)?, ctx).map_err(|e| match e {
            Error::NotInWeylHeisenberg => Error::NotInNormalizer { generator: which },
            e => e,
        })
    };
    let ab = img(&q, 1)?;
    let cd = img(&p, 2)?;
    let det = reduce(
        mul_mod(ab.i, cd.j, n) as i128 - mul_mod(ab.j, cd.i, n) as i128,
        n,
    );
    if det != 1 % n {
        return Err(Error::DeterminantViolation { det, modulus: n });
    }
    SL2Mat::new(n, ab.i, ab.j, cd.i, cd.j)
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` on factor `factor` (0-based).
pub fn embed(dims: &[u64], factor: usize, op: &DenseUnitary) -> DenseUnitary {
    let left: u64 = dims[..factor].iter().product();
    let right: u64 = dims[factor + 1..].iter().product();
    DenseUnitary::identity(left as usize)
        .kron(op)
        .kron(&DenseUnitary::identity(right as usize))
}

/// `⊗_i P_{n_i}^{p_i} Q_{n_i}^{q_i}` read from an exponent vector in
/// `(P_1, Q_1, ..., P_k, Q_k)` order. The factor ordering inside each
/// tensor slot only affects the global phase.
pub fn tensor_wh(dims: &[u64], exps: &[u64]) -> DenseUnitary {
    assert_eq!(exps.len(), 2 * dims.len());
    let mut out = DenseUnitary::identity(1);
    for (f, &n) in dims.iter().enumerate() {
        out = out.kron(&qp_dense(n, exps[2 * f + 1], exps[2 * f]));
    }
    out
}

/// The Weyl-Heisenberg generators `A_1..A_2k`: `A_{2i-1}` is `P` on factor
/// `i`, `A_{2i}` is `Q` on factor `i`.
pub fn wh_generators(dims: &[u64]) -> Vec<DenseUnitary> {
    (0..2 * dims.len())
        .map(|m| {
            let mut e = vec![0; 2 * dims.len()];
            e[m] = 1;
            tensor_wh(dims, &e)
        })
        .collect()
}

/// Recognizes `w` as a tensor Weyl-Heisenberg element up to phase and returns
/// its exponent vector in `(P_1, Q_1, ..., P_k, Q_k)` order. Brute force over
/// all `∏ n_i²` cosets.
pub fn extract_tensor_coset(w: &DenseUnitary, dims: &[u64]) -> Result<Vec<u64>> {
    let total: u64 = dims.iter().product();
    if w.dim() as u64 != total {
        return Err(Error::ModulusMismatch { left: w.dim() as u64, right: total });
    }
    let k = dims.len();
    let mut exps = vec![0u64; 2 * k];
    loop {
        let cand = tensor_wh(dims, &exps).with_tol(w.tol);
        if equal_up_to_phase(w, &cand)?.matched {
            return Ok(exps);
        }
        // odometer over coordinates, last coordinate fastest
        let mut pos = 2 * k;
        loop {
            if pos == 0 {
                return Err(Error::NotInWeylHeisenberg);
            }
            pos -= 1;
            exps[pos] += 1;
            if exps[pos] < dims[pos / 2] {
                break;
            }
            exps[pos] = 0;
        }
    }
}

fn quantize(m: &DenseUnitary) -> Vec<(i64, i64)> {
    // grid coarser than any tolerance in use, much finer than the spacing
    // between the algebraic entries that occur
    const GRID: f64 = 1e6;
    m.entries
        .iter()
        .map(|z| ((z.re * GRID).round() as i64, (z.im * GRID).round() as i64))
        .collect()
}

/// Number of pairwise distinct matrices (entrywise, up to a 1e-6 grid).
pub fn count_distinct(ms: &[DenseUnitary]) -> usize {
    ms.iter().map(quantize).collect::<HashSet<_>>().len()
}

/// Hash key for deduplicating matrices in closures.
pub(crate) fn matrix_key(m: &DenseUnitary) -> Vec<(i64, i64)> {
    quantize(m)
}
