//! Symmetry groups of composite systems `H_{n_1} ⊗ ... ⊗ H_{n_k}`.
//!
//! Phase-space coordinates are ordered `(P_1, Q_1, ..., P_k, Q_k)`; both
//! coordinates of factor `i` live in `Z_{n_i}`. A [`BlockMatrix`] is a `k x k`
//! array of `2 x 2` blocks whose block `(i, j)` is `n_i / gcd(n_i, n_j)` times
//! a matrix over `Z_{n_i}`. Products lift every entry to its representative in
//! `[0, n)`, multiply over the integers and reduce by the row modulus; the
//! divisibility constraint makes this independent of the chosen lift.
//!
//! The symmetry group `Sp_[n_1,...,n_k]` is the set of block matrices with
//! `H* J H = J`, `J = diag(J_2, ..., J_2)`, `J_2 = [[0,1],[-1,0]]`.

use crate::clifford1::{build_d, build_s};
use crate::dense::{ad_action, embed, extract_tensor_coset, wh_generators, DenseUnitary};
use crate::exec::Strategy;
use crate::numtheory::{elementary_divisor_blocks, gcd, lcm, mul_mod, neg_mod};
use crate::weylheis::qp_dense;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

/// Largest total dimension for which dense unitaries are built.
pub const DENSE_GUARD: u64 = 36;
/// Default cap on the brute-force search space of [`sp_enumerate`].
pub const DEFAULT_ENUM_GUARD: u128 = 1 << 24;
/// Default cap on the size of [`sp_closure`].
pub const DEFAULT_SP_CLOSURE_GUARD: usize = 1_000_000;

/// Subsystem dimensions `n_1, ..., n_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DimList(Vec<u64>);

impl DimList {
    pub fn new(dims: Vec<u64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("empty dimension list".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidInput(format!("subsystem dimension {d} < 2")));
        }
        Ok(Self(dims))
    }

    pub fn dims(&self) -> &[u64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Total Hilbert-space dimension `∏ n_i`.
    pub fn total(&self) -> u128 {
        self.0.iter().map(|&n| n as u128).product()
    }

    /// Modulus of phase-space coordinate `r` (0-based).
    #[inline]
    pub fn coord_modulus(&self, r: usize) -> u64 {
        self.0[r / 2]
    }

    /// `n_i / gcd(n_i, n_j)`: every entry of block `(i, j)` is a multiple of this.
    #[inline]
    pub fn block_step(&self, i: usize, j: usize) -> u64 {
        self.0[i] / gcd(self.0[i], self.0[j])
    }

    fn lcm(&self) -> u64 {
        self.0.iter().fold(1, |acc, &n| lcm(acc, n))
    }
}

impl fmt::Display for DimList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Element of the monoid `S_[n_1,...,n_k]`, stored as a dense `2k x 2k` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockMatrix {
    dims: DimList,
    pub(crate) data: Vec<u64>,
}

impl Serialize for BlockMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BlockMatrix", 2)?;
        st.serialize_field("dims", &self.dims)?;
        st.serialize_field("rows", &self.rows())?;
        st.end()
    }
}

impl BlockMatrix {
    pub fn zero(dims: &DimList) -> Self {
        let size = 2 * dims.k();
        Self { dims: dims.clone(), data: vec![0; size * size] }
    }

    pub fn identity(dims: &DimList) -> Self {
        let mut m = Self::zero(dims);
        let size = m.size();
        for r in 0..size {
            m.data[r * size + r] = 1 % dims.coord_modulus(r);
        }
        m
    }

    /// `J = diag(J_2, ..., J_2)`.
    pub fn j(dims: &DimList) -> Self {
        let mut m = Self::zero(dims);
        for i in 0..dims.k() {
            let n = dims.0[i];
            m.set_raw(2 * i, 2 * i + 1, 1 % n);
            m.set_raw(2 * i + 1, 2 * i, neg_mod(1, n));
        }
        m
    }

    /// Builds from full rows, reducing each row by its modulus and checking
    /// the block divisibility constraint.
    pub fn from_rows(dims: &DimList, rows: &[Vec<i64>]) -> Result<Self> {
        let size = 2 * dims.k();
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidInput(format!("block matrix for {dims} must be {size}x{size}")));
        }
        let mut m = Self::zero(dims);
        for (r, row) in rows.iter().enumerate() {
            let n = dims.coord_modulus(r);
            for (c, &v) in row.iter().enumerate() {
                m.data[r * size + c] = (v as i128).rem_euclid(n as i128) as u64;
            }
        }
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        for r in 0..self.size() {
            for c in 0..self.size() {
                let step = self.dims.block_step(r / 2, c / 2);
                if !self.get(r, c).is_multiple_of(step) {
                    return Err(Error::InvalidInput(format!(
                        "entry ({},{}) = {} not divisible by {step}",
                        r + 1,
                        c + 1,
                        self.get(r, c)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    /// Side length `2k`.
    pub fn size(&self) -> usize {
        2 * self.dims.k()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.size() + c]
    }

    #[inline]
    pub(crate) fn set_raw(&mut self, r: usize, c: usize, v: u64) {
        let size = self.size();
        self.data[r * size + c] = v;
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.size()).map(|r| r.to_vec()).collect()
    }

    /// Block `(i, j)` as `[[h11, h12], [h21, h22]]`.
    pub fn block(&self, i: usize, j: usize) -> [[u64; 2]; 2] {
        [
            [self.get(2 * i, 2 * j), self.get(2 * i, 2 * j + 1)],
            [self.get(2 * i + 1, 2 * j), self.get(2 * i + 1, 2 * j + 1)],
        ]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.dims)
    }

    /// Column `c` (the image of basis vector `e_c`).
    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.size()).map(|r| self.get(r, c)).collect()
    }

    /// Applies the matrix to a phase-space point.
    pub fn act(&self, v: &MultiPhasePoint) -> Result<MultiPhasePoint> {
        check_dims(&self.dims, &v.dims)?;
        let size = self.size();
        let coords = (0..size)
            .map(|r| {
                let n = self.dims.coord_modulus(r);
                (0..size).fold(0u128, |acc, c| acc + self.get(r, c) as u128 * v.coords[c] as u128) as u64 % n
            })
            .collect();
        Ok(MultiPhasePoint { dims: self.dims.clone(), coords })
    }
}

fn check_dims(a: &DimList, b: &DimList) -> Result<()> {
    if a != b {
        return Err(Error::DimsMismatch { left: a.0.clone(), right: b.0.clone() });
    }
    Ok(())
}

/// `(HG)_{rc} = Σ_l H_{rl} G_{lc}` reduced mod the modulus of row `r`.
pub fn block_mul(h: &BlockMatrix, g: &BlockMatrix) -> Result<BlockMatrix> {
    check_dims(&h.dims, &g.dims)?;
    let size = h.size();
    let mut out = BlockMatrix::zero(&h.dims);
    for r in 0..size {
        let n = h.dims.coord_modulus(r) as u128;
        let hrow = &h.data[r * size..(r + 1) * size];
        for c in 0..size {
            let mut acc: u128 = 0;
            for (l, &hv) in hrow.iter().enumerate() {
                if hv != 0 {
                    acc += hv as u128 * g.data[l * size + c] as u128;
                }
            }
            out.data[r * size + c] = (acc % n) as u64;
        }
    }
    Ok(out)
}

/// `(H*)_{ij} = (n_i / gcd(n_i, n_j)) A_{ji}ᵀ` where `H_{ji} = (n_j / gcd) A_{ji}`.
pub fn adjoint_star(h: &BlockMatrix) -> BlockMatrix {
    let dims = &h.dims;
    let mut out = BlockMatrix::zero(dims);
    for r in 0..h.size() {
        for c in 0..h.size() {
            let (i, j) = (r / 2, c / 2);
            let coeff = h.get(c, r) / dims.block_step(j, i);
            let n_i = dims.0[i];
            out.set_raw(r, c, mul_mod(dims.block_step(i, j), coeff, n_i));
        }
    }
    out
}

/// `H* J H = J`.
pub fn is_symplectic(h: &BlockMatrix) -> bool {
    let j = BlockMatrix::j(&h.dims);
    let lhs = block_mul(&block_mul(&adjoint_star(h), &j).expect("same dims"), h).expect("same dims");
    lhs == j
}

/// `J⁻¹ H* J`, the inverse of a symplectic `H`.
pub fn sp_inverse(h: &BlockMatrix) -> BlockMatrix {
    let j = BlockMatrix::j(&h.dims);
    let jinv = negate(&j);
    block_mul(&block_mul(&jinv, &adjoint_star(h)).expect("same dims"), &j).expect("same dims")
}

fn negate(h: &BlockMatrix) -> BlockMatrix {
    let mut out = h.clone();
    for r in 0..h.size() {
        let n = h.dims.coord_modulus(r);
        for c in 0..h.size() {
            out.set_raw(r, c, neg_mod(h.get(r, c), n));
        }
    }
    out
}

/// Point of the composite phase space, coordinates `(P_1, Q_1, ..., P_k, Q_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiPhasePoint {
    pub dims: DimList,
    pub coords: Vec<u64>,
}

impl MultiPhasePoint {
    pub fn new(dims: &DimList, coords: &[u64]) -> Result<Self> {
        if coords.len() != 2 * dims.k() {
            return Err(Error::InvalidInput(format!("expected {} coordinates", 2 * dims.k())));
        }
        let coords = coords.iter().enumerate().map(|(r, &x)| x % dims.coord_modulus(r)).collect();
        Ok(Self { dims: dims.clone(), coords })
    }

    /// All points of the phase space.
    pub fn all(dims: &DimList) -> Vec<MultiPhasePoint> {
        let mut out = vec![vec![]];
        for r in 0..2 * dims.k() {
            let n = dims.coord_modulus(r);
            out = out
                .into_iter()
                .flat_map(|p: Vec<u64>| (0..n).map(move |x| [p.clone(), vec![x]].concat()))
                .collect();
        }
        out.into_iter().map(|coords| MultiPhasePoint { dims: dims.clone(), coords }).collect()
    }
}

/// `uᵀ J v` with factor `i` weighted by `1/n_i`, returned as a residue mod `lcm(n_i)`.
pub fn multi_symplectic_form(u: &MultiPhasePoint, v: &MultiPhasePoint) -> Result<u64> {
    check_dims(&u.dims, &v.dims)?;
    let big = u.dims.lcm() as i128;
    let mut acc: i128 = 0;
    for (i, &n) in u.dims.0.iter().enumerate() {
        let (up, uq) = (u.coords[2 * i] as i128, u.coords[2 * i + 1] as i128);
        let (vp, vq) = (v.coords[2 * i] as i128, v.coords[2 * i + 1] as i128);
        acc += (big / n as i128) * (up * vq - uq * vp);
    }
    Ok(acc.rem_euclid(big) as u64)
}

/// Brute-force enumeration of `Sp_[dims]` over all matrices of the monoid.
pub fn sp_enumerate(dims: &DimList, guard: u128) -> Result<Vec<BlockMatrix>> {
    sp_enumerate_with(dims, guard, Strategy::default())
}

pub fn sp_enumerate_with(dims: &DimList, guard: u128, strategy: Strategy) -> Result<Vec<BlockMatrix>> {
    let size = 2 * dims.k();
    // number of admissible values of each entry: gcd(n_i, n_j)
    let radix: Vec<u64> = (0..size * size)
        .map(|e| {
            let (i, j) = (e / size / 2, e % size / 2);
            gcd(dims.0[i], dims.0[j])
        })
        .collect();
    let space: u128 = radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128)).unwrap_or(u128::MAX);
    if space > guard {
        return Err(Error::GuardExceeded { what: "Sp enumeration search space", size: space, limit: guard });
    }
    let found = strategy.filter_map_range(space as u64, |mut idx| {
        let mut data = vec![0u64; size * size];
        for e in (0..size * size).rev() {
            let (i, j) = (e / size / 2, e % size / 2);
            let r = radix[e];
            data[e] = (idx % r) * dims.block_step(i, j);
            idx /= r;
        }
        let m = BlockMatrix { dims: dims.clone(), data };
        is_symplectic(&m).then_some(m)
    });
    Ok(found)
}

/// `R_ij` of the coupling generator (0-based `i < j`), built from the tensor formula
/// `I ⊗ diag(I, T, ..., T^{n_i-1}) ⊗ I` with `T = I ⊗ Q_{n_j}^{n_j / gcd(n_i, n_j)}`.
pub fn build_r(dims: &DimList, i: usize, j: usize) -> Result<DenseUnitary> {
    let k = dims.k();
    if i >= j || j >= k {
        return Err(Error::InvalidInput(format!("coupling needs 1 <= i < j <= {k}, got i={}, j={}", i + 1, j + 1)));
    }
    let d = dims.dims();
    let (ni, nj) = (d[i], d[j]);
    let between: u64 = d[i + 1..j].iter().product();
    let t = DenseUnitary::identity(between as usize).kron(&qp_dense(nj, nj / gcd(ni, nj), 0));
    let tdim = t.dim();
    let mut middle = DenseUnitary::zeros(ni as usize * tdim);
    let mut power = DenseUnitary::identity(tdim);
    for x in 0..ni as usize {
        for r in 0..tdim {
            for c in 0..tdim {
                middle.set(x * tdim + r, x * tdim + c, power.get(r, c));
            }
        }
        power = power.mul(&t)?;
    }
    let left: u64 = d[..i].iter().product();
    let right: u64 = d[j + 1..].iter().product();
    Ok(DenseUnitary::identity(left as usize)
        .kron(&middle)
        .kron(&DenseUnitary::identity(right as usize)))
}

/// The `Sp_[dims]` image of a normalizer element: column `m` holds the exponent
/// vector of `X A_m X†`.
pub fn extract_block_matrix(x: &DenseUnitary, dims: &DimList) -> Result<BlockMatrix> {
    let total = dims.total();
    if x.dim() as u128 != total {
        return Err(Error::InvalidInput(format!("unitary of dimension {} does not match {dims}", x.dim())));
    }
    let size = 2 * dims.k();
    let mut out = BlockMatrix::zero(dims);
    for (m, a) in wh_generators(dims.dims()).iter().enumerate() {
        let conj = ad_action(x, a)?;
        let exps = extract_tensor_coset(&conj, dims.dims()).map_err(|e| match e {
            Error::NotInWeylHeisenberg => Error::NotInNormalizer { generator: m + 1 },
            e => e,
        })?;
        for (r, v) in exps.into_iter().enumerate() {
            out.data[r * size + m] = v;
        }
    }
    out.validate()?;
    Ok(out)
}

/// Generators of the normalizer of the composite phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    /// `S_{n_f}` on factor `f`.
    Fourier(usize),
    /// `D_{n_f}` on factor `f`.
    Phase(usize),
    /// `R_ij`, `i < j`.
    Couple(usize, usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Fourier(t) => write!(f, "S on factor {}", t + 1),
            Generator::Phase(t) => write!(f, "D on factor {}", t + 1),
            Generator::Couple(i, j) => write!(f, "R_{}{}", i + 1, j + 1),
        }
    }
}

impl Generator {
    /// Per-factor `S`, `D` for every factor, then every `R_ij`.
    pub fn all(dims: &DimList) -> Vec<Generator> {
        let k = dims.k();
        let mut g: Vec<Generator> = (0..k).flat_map(|t| [Generator::Fourier(t), Generator::Phase(t)]).collect();
        for i in 0..k {
            for j in i + 1..k {
                g.push(Generator::Couple(i, j));
            }
        }
        g
    }

    pub fn dense(&self, dims: &DimList) -> Result<DenseUnitary> {
        let d = dims.dims();
        match *self {
            Generator::Fourier(t) => Ok(embed(d, t, &build_s(d[t]))),
            Generator::Phase(t) => Ok(embed(d, t, &build_d(d[t]))),
            Generator::Couple(i, j) => build_r(dims, i, j),
        }
    }

    /// Closed-form block matrix; agrees with [`extract_block_matrix`] of [`Generator::dense`].
    pub fn analytic(&self, dims: &DimList) -> BlockMatrix {
        match *self {
            Generator::Fourier(t) => fourier_block(dims, t),
            Generator::Phase(t) => phase_block(dims, t),
            Generator::Couple(i, j) => couple_block(dims, i, j, false),
        }
    }
}

/// `S` on factor `t`: `P ↦ Q`, `Q ↦ P⁻¹`, the block `[[0,-1],[1,0]]`.
pub fn fourier_block(dims: &DimList, t: usize) -> BlockMatrix {
    let mut m = BlockMatrix::identity(dims);
    let n = dims.0[t];
    m.set_raw(2 * t, 2 * t, 0);
    m.set_raw(2 * t, 2 * t + 1, neg_mod(1, n));
    m.set_raw(2 * t + 1, 2 * t, 1 % n);
    m.set_raw(2 * t + 1, 2 * t + 1, 0);
    m
}

/// `D` on factor `t`: `P ↦ QP`, `Q ↦ Q`, the block `[[1,0],[1,1]]`.
pub fn phase_block(dims: &DimList, t: usize) -> BlockMatrix {
    let mut m = BlockMatrix::identity(dims);
    m.set_raw(2 * t + 1, 2 * t, 1 % dims.0[t]);
    m
}

/// `R_ij` (or its inverse): `P_i ↦ P_i Q_j^{-n_j/g}`, `P_j ↦ Q_i^{-n_i/g} P_j`.
pub fn couple_block(dims: &DimList, i: usize, j: usize, inverse: bool) -> BlockMatrix {
    let mut m = BlockMatrix::identity(dims);
    let (ni, nj) = (dims.0[i], dims.0[j]);
    let g = gcd(ni, nj);
    let (si, sj) = (ni / g, nj / g);
    let (vi, vj) = if inverse { (si % ni, sj % nj) } else { (neg_mod(si, ni), neg_mod(sj, nj)) };
    m.set_raw(2 * j + 1, 2 * i, vj);
    m.set_raw(2 * i + 1, 2 * j, vi);
    m
}

/// Block matrices of all generators: extracted from dense unitaries when the
/// total dimension is at most [`DENSE_GUARD`], closed form otherwise.
pub fn generator_images(dims: &DimList) -> Result<Vec<(Generator, BlockMatrix)>> {
    let use_dense = dims.total() <= DENSE_GUARD as u128;
    Generator::all(dims)
        .into_iter()
        .map(|g| {
            let m = if use_dense { extract_block_matrix(&g.dense(dims)?, dims)? } else { g.analytic(dims) };
            Ok((g, m))
        })
        .collect()
}

/// Size of the group generated by the generator images.
pub fn sp_closure(dims: &DimList, guard: usize) -> Result<usize> {
    sp_closure_with(dims, guard, Strategy::default())
}

pub fn sp_closure_with(dims: &DimList, guard: usize, strategy: Strategy) -> Result<usize> {
    let gens: Vec<BlockMatrix> = generator_images(dims)?.into_iter().map(|(_, m)| m).collect();
    closure_raw(dims, &gens, guard, strategy, false).map(|(n, _)| n)
}

/// All products of `gens` (a finite group, so this is the generated subgroup).
pub fn closure_of(gens: &[BlockMatrix], guard: usize, strategy: Strategy) -> Result<Vec<BlockMatrix>> {
    let Some(first) = gens.first() else {
        return Ok(vec![]);
    };
    let dims = first.dims.clone();
    let (_, raw) = closure_raw(&dims, gens, guard, strategy, true)?;
    Ok(raw.into_iter().map(|data| BlockMatrix { dims: dims.clone(), data }).collect())
}

fn mul_raw(dims: &DimList, size: usize, h: &[u64], g: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; size * size];
    for r in 0..size {
        let n = dims.coord_modulus(r) as u128;
        let hrow = &h[r * size..(r + 1) * size];
        for c in 0..size {
            let acc: u128 = hrow.iter().enumerate().map(|(l, &hv)| hv as u128 * g[l * size + c] as u128).sum();
            out[r * size + c] = (acc % n) as u64;
        }
    }
    out
}

/// Breadth-first closure on raw entry arrays. Keys are the entries packed in
/// mixed radix when they fit in a `u128`.
fn closure_raw(
    dims: &DimList,
    gens: &[BlockMatrix],
    guard: usize,
    strategy: Strategy,
    keep: bool,
) -> Result<(usize, Vec<Vec<u64>>)> {
    let size = 2 * dims.k();
    let radix: Vec<u128> = (0..size * size).map(|e| dims.coord_modulus(e / size) as u128).collect();
    let fits = radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r)).is_some();
    if fits {
        let pack = |d: &[u64]| d.iter().zip(&radix).fold(0u128, |acc, (&x, &r)| acc * r + x as u128);
        closure_keyed(dims, size, gens, guard, strategy, keep, pack)
    } else {
        closure_keyed(dims, size, gens, guard, strategy, keep, |d: &[u64]| d.to_vec())
    }
}

fn closure_keyed<K, F>(
    dims: &DimList,
    size: usize,
    gens: &[BlockMatrix],
    guard: usize,
    strategy: Strategy,
    keep: bool,
    key: F,
) -> Result<(usize, Vec<Vec<u64>>)>
where
    K: std::hash::Hash + Eq + Send,
    F: Fn(&[u64]) -> K + Sync + Send,
{
    let mut seen: HashSet<K> = HashSet::new();
    let mut elements = Vec::new();
    let mut frontier: Vec<Vec<u64>> = Vec::new();
    let id = BlockMatrix::identity(dims);
    for m in std::iter::once(&id).chain(gens) {
        if seen.insert(key(&m.data)) {
            if keep {
                elements.push(m.data.clone());
            }
            frontier.push(m.data.clone());
        }
    }
    let mut count = seen.len();
    while !frontier.is_empty() {
        let products: Vec<Vec<(K, Vec<u64>)>> = strategy.map_slice(&frontier, |x| {
            gens.iter()
                .map(|g| {
                    let p = mul_raw(dims, size, x, &g.data);
                    (key(&p), p)
                })
                .collect()
        });
        frontier = Vec::new();
        for (k, p) in products.into_iter().flatten() {
            if !seen.contains(&k) {
                if count >= guard {
                    return Err(Error::GuardExceeded {
                        what: "Sp closure size",
                        size: count as u128 + 1,
                        limit: guard as u128,
                    });
                }
                seen.insert(k);
                count += 1;
                if keep {
                    elements.push(p.clone());
                }
                frontier.push(p);
            }
        }
    }
    Ok((count, elements))
}

/// One conjugation check of [`verify_theorem2`].
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationCheck {
    pub generator: String,
    /// 1-based index `m` of `A_m`.
    pub wh_generator: usize,
    /// Exponent vector of the recognized conjugate, if any.
    pub image: Option<Vec<u64>>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub dims: DimList,
    pub checks: Vec<ConjugationCheck>,
}

impl Theorem2Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Conjugates every `A_m` by every generator and recognizes the result as a
/// tensor Weyl-Heisenberg element up to phase.
pub fn verify_theorem2(dims: &DimList) -> Result<Theorem2Report> {
    if dims.total() > DENSE_GUARD as u128 {
        return Err(Error::GuardExceeded {
            what: "total dimension for dense verification",
            size: dims.total(),
            limit: DENSE_GUARD as u128,
        });
    }
    let wh = wh_generators(dims.dims());
    let mut checks = Vec::new();
    for g in Generator::all(dims) {
        let u = g.dense(dims)?;
        for (m, a) in wh.iter().enumerate() {
            let image = extract_tensor_coset(&ad_action(&u, a)?, dims.dims()).ok();
            checks.push(ConjugationCheck {
                generator: g.to_string(),
                wh_generator: m + 1,
                pass: image.is_some(),
                image,
            });
        }
    }
    Ok(Theorem2Report { dims: dims.clone(), checks })
}

/// Standard factor types of a decomposed symmetry group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SymmetryFactor {
    /// `SL(2, Z_n)`.
    SL2 { n: u64 },
    /// `Sp(2k, Z_n)` from `k` equal factors of dimension `n`.
    Sp2k { k: usize, n: u64 },
    /// `Sp_[p^a, p^b, ...]` with at least two distinct powers of one prime.
    SpMixed { prime: u64, powers: Vec<u64> },
}

impl SymmetryFactor {
    /// Subsystem dimensions whose symmetry group this factor is.
    pub fn dims(&self) -> DimList {
        let v = match self {
            SymmetryFactor::SL2 { n } => vec![*n],
            SymmetryFactor::Sp2k { k, n } => vec![*n; *k],
            SymmetryFactor::SpMixed { powers, .. } => powers.clone(),
        };
        DimList(v)
    }
}

impl fmt::Display for SymmetryFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryFactor::SL2 { n } => write!(f, "SL(2,Z_{n})"),
            SymmetryFactor::Sp2k { k, n } => write!(f, "Sp({},Z_{n})", 2 * k),
            SymmetryFactor::SpMixed { powers, .. } => {
                let parts: Vec<_> = powers.iter().map(|p| p.to_string()).collect();
                write!(f, "Sp_[{}]", parts.join(","))
            }
        }
    }
}

/// Splits `Sp_[dims]` along the elementary divisor decomposition.
pub fn decompose_symmetry(dims: &DimList) -> Result<Vec<SymmetryFactor>> {
    Ok(elementary_divisor_blocks(dims.dims())?
        .into_iter()
        .map(|b| {
            let mut powers = b.local_dims;
            powers.sort_unstable();
            if powers.len() == 1 {
                SymmetryFactor::SL2 { n: powers[0] }
            } else if powers.iter().all(|&p| p == powers[0]) {
                SymmetryFactor::Sp2k { k: powers.len(), n: powers[0] }
            } else {
                SymmetryFactor::SpMixed { prime: b.prime, powers }
            }
        })
        .collect())
}

/// `" × "`-joined factor names.
pub fn format_product(factors: &[SymmetryFactor]) -> String {
    factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" × ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford1::{sl2_enumerate, SL2Mat};
    use crate::dense::phi_of;
    use crate::weylheis::WHContext;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dl(v: &[u64]) -> DimList {
        DimList::new(v.to_vec()).unwrap()
    }

    /// Random element of the monoid (not necessarily symplectic).
    fn random_monoid(dims: &DimList, rng: &mut ChaCha8Rng) -> BlockMatrix {
        let mut m = BlockMatrix::zero(dims);
        for r in 0..m.size() {
            for c in 0..m.size() {
                let (i, j) = (r / 2, c / 2);
                let g = gcd(dims.0[i], dims.0[j]);
                m.set_raw(r, c, rng.random_range(0..g) * dims.block_step(i, j));
            }
        }
        m
    }

    #[test]
    fn dimlist_validation() {
        assert!(DimList::new(vec![]).is_err());
        assert!(DimList::new(vec![2, 1]).is_err());
        assert_eq!(dl(&[2, 3, 4]).total(), 24);
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dims = dl(&[2, 3]);
        for _ in 0..100 {
            let h = random_monoid(&dims, &mut rng);
            assert_eq!(block_mul(&BlockMatrix::identity(&dims), &h).unwrap(), h);
            assert_eq!(block_mul(&h, &BlockMatrix::identity(&dims)).unwrap(), h);
        }
        assert!(block_mul(&BlockMatrix::identity(&dims), &BlockMatrix::identity(&dl(&[2, 2]))).is_err());
    }

    #[test]
    fn monoid_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [&[2u64, 4][..], &[4, 6], &[2, 3, 4]] {
            let dims = dl(d);
            for _ in 0..500 {
                let h = random_monoid(&dims, &mut rng);
                let g = random_monoid(&dims, &mut rng);
                assert!(block_mul(&h, &g).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn product_independent_of_lift() {
        // shifting an entry of G by its row modulus changes H_rl * G_lc by a
        // multiple of lcm(n_i, n_l), which vanishes mod n_i
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dims = dl(&[4, 6]);
        let size = 4;
        for _ in 0..500 {
            let h = random_monoid(&dims, &mut rng);
            let g = random_monoid(&dims, &mut rng);
            let base = block_mul(&h, &g).unwrap();
            // direct integer evaluation with randomly shifted lifts
            for r in 0..size {
                let n = dims.coord_modulus(r) as i128;
                for c in 0..size {
                    let acc: i128 = (0..size)
                        .map(|l| {
                            let lift = g.get(l, c) as i128 + dims.coord_modulus(l) as i128 * rng.random_range(-3..=3);
                            h.get(r, l) as i128 * lift
                        })
                        .sum();
                    assert_eq!(acc.rem_euclid(n) as u64, base.get(r, c));
                }
            }
        }
    }

    #[test]
    fn adjoint_properties() {
        let dims = dl(&[2, 4]);
        assert!(adjoint_star(&BlockMatrix::identity(&dims)).is_identity());
        let one = dl(&[5]);
        let h = BlockMatrix::from_rows(&one, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(adjoint_star(&h).rows(), vec![vec![1, 3], vec![2, 4]]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let h = random_monoid(&dims, &mut rng);
            let a = adjoint_star(&h);
            assert!(a.is_valid());
            assert_eq!(adjoint_star(&a), h);
        }
    }

    #[test]
    fn symplectic_examples() {
        let dims = dl(&[2, 2]);
        assert!(is_symplectic(&BlockMatrix::identity(&dims)));
        assert!(is_symplectic(&BlockMatrix::j(&dims)));
        assert!(!is_symplectic(&BlockMatrix::zero(&dims)));
        assert!(BlockMatrix::from_rows(&dl(&[2, 4]), &vec![vec![1, 0, 0, 0]; 4]).is_err());
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(sp_enumerate(&dl(&[2]), DEFAULT_ENUM_GUARD).unwrap().len(), 6);
        assert_eq!(sp_enumerate(&dl(&[2, 2]), DEFAULT_ENUM_GUARD).unwrap().len(), 720);
        assert_eq!(sp_enumerate(&dl(&[2, 3]), DEFAULT_ENUM_GUARD).unwrap().len(), 144);
        assert!(matches!(
            sp_enumerate(&dl(&[3, 3]), DEFAULT_ENUM_GUARD),
            Err(Error::GuardExceeded { .. })
        ));
        let a = sp_enumerate_with(&dl(&[2, 3]), DEFAULT_ENUM_GUARD, Strategy::Sequential).unwrap();
        let b = sp_enumerate_with(&dl(&[2, 3]), DEFAULT_ENUM_GUARD, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symplectic_products_stay_symplectic() {
        let dims = dl(&[2, 2]);
        let all = sp_enumerate(&dims, DEFAULT_ENUM_GUARD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let h = &all[rng.random_range(0..all.len())];
            let g = &all[rng.random_range(0..all.len())];
            assert!(is_symplectic(&block_mul(h, g).unwrap()));
        }
    }

    #[test]
    fn enumerated_groups_have_two_sided_inverses() {
        for d in [&[2u64][..], &[2, 2], &[2, 3]] {
            let dims = dl(d);
            let all = sp_enumerate(&dims, DEFAULT_ENUM_GUARD).unwrap();
            let id = BlockMatrix::identity(&dims);
            for h in &all {
                let inv = sp_inverse(h);
                assert_eq!(block_mul(h, &inv).unwrap(), id);
                assert_eq!(block_mul(&inv, h).unwrap(), id);
            }
        }
    }

    #[test]
    fn form_preserved_on_phase_space() {
        let dims = dl(&[2, 2]);
        let pts = MultiPhasePoint::all(&dims);
        assert_eq!(pts.len(), 16);
        for h in sp_enumerate(&dims, DEFAULT_ENUM_GUARD).unwrap() {
            let imgs: Vec<_> = pts.iter().map(|p| h.act(p).unwrap()).collect();
            for (u, hu) in pts.iter().zip(&imgs) {
                for (v, hv) in pts.iter().zip(&imgs) {
                    assert_eq!(multi_symplectic_form(hu, hv).unwrap(), multi_symplectic_form(u, v).unwrap());
                }
            }
        }
        // mixed moduli, sampled
        let dims = dl(&[2, 4]);
        let pts = MultiPhasePoint::all(&dims);
        for h in sp_enumerate(&dims, DEFAULT_ENUM_GUARD).unwrap().iter().step_by(37) {
            for u in pts.iter().step_by(5) {
                for v in pts.iter().step_by(3) {
                    assert_eq!(
                        multi_symplectic_form(&h.act(u).unwrap(), &h.act(v).unwrap()).unwrap(),
                        multi_symplectic_form(u, v).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn single_factor_matches_sl2() {
        // (P, Q) coordinates swap both rows and columns of [[a,c],[b,d]]
        for n in 2..=6u64 {
            let dims = dl(&[n]);
            let mut sp: Vec<_> = sp_enumerate(&dims, DEFAULT_ENUM_GUARD)
                .unwrap()
                .into_iter()
                .map(|h| SL2Mat::new(n, h.get(1, 1), h.get(0, 1), h.get(1, 0), h.get(0, 0)).unwrap())
                .collect();
            sp.sort();
            assert_eq!(sp, sl2_enumerate(n).unwrap());
        }
    }

    #[test]
    fn coupling_unitaries() {
        let r = build_r(&dl(&[2, 2]), 0, 1).unwrap();
        let o = Complex64::new(1.0, 0.0);
        assert!(r.approx_eq(&DenseUnitary::diag(&[o, o, o, -o])));
        assert!(build_r(&dl(&[2, 3]), 0, 1).unwrap().approx_eq(&DenseUnitary::identity(6)));
        let r24 = build_r(&dl(&[2, 4]), 0, 1).unwrap();
        let q2 = qp_dense(4, 2, 0);
        let expected = DenseUnitary::identity(2)
            .kron(&DenseUnitary::identity(4))
            .mul(&DenseUnitary::diag(
                &[vec![o; 4], (0..4).map(|x| q2.get(x, x)).collect()].concat(),
            ))
            .unwrap();
        assert!(r24.approx_eq(&expected));
        assert!(r24.is_unitary());
        assert!(build_r(&dl(&[2, 2]), 1, 0).is_err());
        assert!(build_r(&dl(&[2, 2]), 0, 2).is_err());
    }

    #[test]
    fn coupling_is_diagonal_controlled_phase() {
        // R_ij |.., x_i, .., x_j, ..> = ω_{n_j}^{x_i x_j n_j/g}, checked digit by digit
        for d in [&[2u64, 3, 4][..], &[4, 2, 6], &[3, 3]] {
            let dims = dl(d);
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    let r = build_r(&dims, i, j).unwrap();
                    let total = dims.total() as usize;
                    for idx in 0..total {
                        let mut digits = vec![0u64; d.len()];
                        let mut rest = idx as u64;
                        for f in (0..d.len()).rev() {
                            digits[f] = rest % d[f];
                            rest /= d[f];
                        }
                        let s = d[j] / gcd(d[i], d[j]);
                        let ctx = WHContext::new(d[j]).unwrap();
                        let want = ctx.omega_pow(mul_mod(digits[i] * digits[j], s, d[j]));
                        assert!((r.get(idx, idx) - want).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn extraction_examples() {
        let dims = dl(&[2, 3]);
        assert!(extract_block_matrix(&DenseUnitary::identity(6), &dims).unwrap().is_identity());
        let s1 = extract_block_matrix(&Generator::Fourier(0).dense(&dims).unwrap(), &dims).unwrap();
        assert_eq!(s1.block(0, 0), [[0, 1], [1, 0]]);
        assert_eq!(s1.block(0, 1), [[0, 0], [0, 0]]);
        assert_eq!(s1.block(1, 0), [[0, 0], [0, 0]]);
        assert_eq!(s1.block(1, 1), [[1, 0], [0, 1]]);
        let s2 = extract_block_matrix(&Generator::Fourier(1).dense(&dims).unwrap(), &dims).unwrap();
        assert_eq!(s2.block(1, 1), [[0, 2], [1, 0]]);
        let d22 = dl(&[2, 2]);
        let r = extract_block_matrix(&build_r(&d22, 0, 1).unwrap(), &d22).unwrap();
        assert!(is_symplectic(&r));
        assert!(!r.is_identity());
        let h = embed(&[2, 2], 0, &build_s(2)).mul(&embed(&[2, 2], 1, &qp_dense(2, 0, 0))).unwrap();
        assert!(extract_block_matrix(&h, &dl(&[2, 3])).is_err());
        let not_normalizer = embed(&[2, 2], 0, &DenseUnitary::diag(&[Complex64::new(1., 0.), Complex64::from_polar(1., 0.2)]));
        assert!(matches!(extract_block_matrix(&not_normalizer, &d22), Err(Error::NotInNormalizer { .. })));
    }

    #[test]
    fn single_factor_extraction_agrees_with_phi() {
        for n in 2..=6u64 {
            let dims = dl(&[n]);
            let ctx = WHContext::new(n).unwrap();
            for u in [build_s(n), build_d(n), build_s(n).mul(&build_d(n)).unwrap()] {
                let h = extract_block_matrix(&u, &dims).unwrap();
                let m = phi_of(&u, &ctx).unwrap();
                assert_eq!(h.rows(), vec![vec![m.d, m.b], vec![m.c, m.a]]);
            }
        }
    }

    #[test]
    fn analytic_reps_match_oracle() {
        for d in [&[2u64][..], &[5], &[2, 2], &[2, 3], &[3, 3], &[2, 4], &[4, 6], &[2, 3, 4], &[2, 2, 3], &[6, 6], &[4, 2, 4]] {
            let dims = dl(d);
            for g in Generator::all(&dims) {
                let oracle = extract_block_matrix(&g.dense(&dims).unwrap(), &dims).unwrap();
                assert_eq!(oracle, g.analytic(&dims), "{dims} {g}");
                assert!(is_symplectic(&oracle));
            }
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    let inv = extract_block_matrix(&build_r(&dims, i, j).unwrap().adjoint(), &dims).unwrap();
                    assert_eq!(inv, couple_block(&dims, i, j, true));
                }
            }
        }
    }

    #[test]
    fn extraction_is_homomorphism_on_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [&[2u64, 2][..], &[2, 3]] {
            let dims = dl(d);
            let gens = Generator::all(&dims);
            let dense: Vec<_> = gens.iter().map(|g| g.dense(&dims).unwrap()).collect();
            for _ in 0..100 {
                let a = {
                    let len = rng.random_range(0..5);
                    (0..len).fold(DenseUnitary::identity(dims.total() as usize), |acc, _| {
                        acc.mul(&dense[rng.random_range(0..dense.len())]).unwrap()
                    })
                };
                let b = dense[rng.random_range(0..dense.len())].mul(&dense[rng.random_range(0..dense.len())]).unwrap();
                let lhs = extract_block_matrix(&a.mul(&b).unwrap(), &dims).unwrap();
                let rhs = block_mul(
                    &extract_block_matrix(&a, &dims).unwrap(),
                    &extract_block_matrix(&b, &dims).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn closure_orders() {
        assert_eq!(sp_closure(&dl(&[2, 2]), DEFAULT_SP_CLOSURE_GUARD).unwrap(), 720);
        assert_eq!(sp_closure(&dl(&[2, 3]), DEFAULT_SP_CLOSURE_GUARD).unwrap(), 144);
        assert_eq!(sp_closure(&dl(&[6]), DEFAULT_SP_CLOSURE_GUARD).unwrap(), 144);
        assert!(matches!(sp_closure(&dl(&[2, 2]), 100), Err(Error::GuardExceeded { .. })));
        assert_eq!(
            sp_closure_with(&dl(&[2, 2]), 1000, Strategy::Sequential).unwrap(),
            sp_closure_with(&dl(&[2, 2]), 1000, Strategy::Parallel).unwrap()
        );
    }

    #[test]
    fn closure_equals_enumeration_for_mixed_powers() {
        // generation of Sp_[2,4] by local S, D and R_12, against brute force
        let dims = dl(&[2, 4]);
        let enumerated: HashSet<_> = sp_enumerate(&dims, DEFAULT_ENUM_GUARD).unwrap().into_iter().collect();
        let gens: Vec<_> = generator_images(&dims).unwrap().into_iter().map(|(_, m)| m).collect();
        let closed: HashSet<_> = closure_of(&gens, DEFAULT_SP_CLOSURE_GUARD, Strategy::default()).unwrap().into_iter().collect();
        assert_eq!(closed, enumerated);
    }

    #[test]
    fn theorem2_reports() {
        for d in [&[2u64, 2][..], &[2, 3], &[2, 4], &[3, 3]] {
            let rep = verify_theorem2(&dl(d)).unwrap();
            assert!(rep.all_pass(), "{d:?}");
            let k = d.len();
            assert_eq!(rep.checks.len(), (2 * k + k * (k - 1) / 2) * 2 * k);
        }
        // R_12 (σ_x ⊗ I) R_12† = σ_x ⊗ Q_2 up to phase
        let rep = verify_theorem2(&dl(&[2, 2])).unwrap();
        let c = rep.checks.iter().find(|c| c.generator == "R_12" && c.wh_generator == 1).unwrap();
        assert_eq!(c.image.as_deref(), Some(&[1, 0, 0, 1][..]));
        assert!(verify_theorem2(&dl(&[6, 7])).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let f = decompose_symmetry(&dl(&[15, 12])).unwrap();
        assert_eq!(
            f,
            vec![SymmetryFactor::SL2 { n: 4 }, SymmetryFactor::Sp2k { k: 2, n: 3 }, SymmetryFactor::SL2 { n: 5 }]
        );
        assert_eq!(format_product(&f), "SL(2,Z_4) × Sp(4,Z_3) × SL(2,Z_5)");
        let f = decompose_symmetry(&dl(&[180, 150])).unwrap();
        assert_eq!(format_product(&f), "Sp_[2,4] × Sp_[3,9] × Sp_[5,25]");
        let f = decompose_symmetry(&dl(&[6])).unwrap();
        assert_eq!(format_product(&f), "SL(2,Z_2) × SL(2,Z_3)");
    }
}
