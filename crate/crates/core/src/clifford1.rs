//! Single-system Clifford structure.
//!
//! `SL(2,Z_N)` is the symmetry group of the phase space `Z_N x Z_N`, and the
//! Clifford quotient group is the semidirect product
//! `(Z_N x Z_N) ⋊ SL(2,Z_N)` with `(t1, M1)(t2, M2) = (t1 + M1 t2, M1 M2)`.
//! The Fourier matrix `S_N` and the phase gate `D_N` realize the generators
//! `[[0,1],[-1,0]]` and `[[1,1],[0,1]]`.

use crate::dense::{matrix_key, DenseUnitary};
use crate::exec::Strategy;
use crate::numtheory::{add_mod, mul_mod, neg_mod, reduce, sl2_order};
use crate::weylheis::{PhasePoint, WHContext};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// Upper bound on `N` for explicit enumeration of `SL(2,Z_N)`.
pub const SL2_ENUM_MAX: u64 = 12;

/// Default cap on the size of [`finite_closure`].
pub const DEFAULT_CLOSURE_GUARD: usize = 10_000;

/// `[[a, c], [b, d]]` over `Z_N` with `ad - bc ≡ 1`.
///
/// Column one is the image of `(1,0)` (the `Q` coset), column two the image
/// of `(0,1)` (the `P` coset).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SL2Mat {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

fn det_mod(n: u64, a: u64, b: u64, c: u64, d: u64) -> u64 {
    reduce(mul_mod(a, d, n) as i128 - mul_mod(b, c, n) as i128, n)
}

impl SL2Mat {
    /// Builds `[[a, c], [b, d]]`, rejecting a determinant other than 1.
    pub fn new(n: u64, a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("modulus must be >= 2, got {n}")));
        }
        let (a, b, c, d) = (a % n, b % n, c % n, d % n);
        let det = det_mod(n, a, b, c, d);
        if det != 1 {
            return Err(Error::DeterminantViolation { det, modulus: n });
        }
        Ok(Self { n, a, b, c, d })
    }

    pub fn identity(n: u64) -> Self {
        Self { n, a: 1, b: 0, c: 0, d: 1 }
    }

    /// Image of the Fourier matrix `S_N`: `[[0,1],[-1,0]]`.
    pub fn fourier(n: u64) -> Self {
        Self { n, a: 0, b: n - 1, c: 1, d: 0 }
    }

    /// Image of the phase gate `D_N`: `[[1,1],[0,1]]`.
    pub fn shear(n: u64) -> Self {
        Self { n, a: 1, b: 0, c: 1, d: 1 }
    }

    pub fn det(&self) -> u64 {
        det_mod(self.n, self.a, self.b, self.c, self.d)
    }

    fn index(&self) -> usize {
        let n = self.n as usize;
        ((self.a as usize * n + self.b as usize) * n + self.c as usize) * n + self.d as usize
    }
}

impl fmt::Display for SL2Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]] mod {}", self.a, self.c, self.b, self.d, self.n)
    }
}

fn check_mod(x: u64, y: u64) -> Result<()> {
    if x != y {
        return Err(Error::ModulusMismatch { left: x, right: y });
    }
    Ok(())
}

pub fn sl2_mul(x: &SL2Mat, y: &SL2Mat) -> Result<SL2Mat> {
    check_mod(x.n, y.n)?;
    let n = x.n;
    let dot = |p: u64, q: u64, r: u64, s: u64| add_mod(mul_mod(p, q, n), mul_mod(r, s, n), n);
    Ok(SL2Mat {
        n,
        a: dot(x.a, y.a, x.c, y.b),
        b: dot(x.b, y.a, x.d, y.b),
        c: dot(x.a, y.c, x.c, y.d),
        d: dot(x.b, y.c, x.d, y.d),
    })
}

/// `[[a,c],[b,d]]⁻¹ = [[d,-c],[-b,a]]`.
pub fn sl2_inverse(m: &SL2Mat) -> SL2Mat {
    let n = m.n;
    SL2Mat { n, a: m.d, b: neg_mod(m.b, n), c: neg_mod(m.c, n), d: m.a }
}

/// Left action on column vectors `(i, j)ᵀ`.
pub fn sl2_act(m: &SL2Mat, p: &PhasePoint) -> Result<PhasePoint> {
    check_mod(m.n, p.dim)?;
    let n = m.n;
    Ok(PhasePoint::new(
        n,
        add_mod(mul_mod(m.a, p.i, n), mul_mod(m.c, p.j, n), n),
        add_mod(mul_mod(m.b, p.i, n), mul_mod(m.d, p.j, n), n),
    ))
}

/// All of `SL(2,Z_N)`, ordered lexicographically by `(a, b, c, d)`.
pub fn sl2_enumerate(n: u64) -> Result<Vec<SL2Mat>> {
    sl2_enumerate_with(n, Strategy::default())
}

pub fn sl2_enumerate_with(n: u64, strategy: Strategy) -> Result<Vec<SL2Mat>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("SL(2,Z_N) needs N >= 2, got {n}")));
    }
    if n > SL2_ENUM_MAX {
        return Err(Error::InvalidInput(format!(
            "SL(2,Z_{n}) enumeration refused: N must be <= {SL2_ENUM_MAX}"
        )));
    }
    Ok(strategy.filter_map_range(n.pow(4), |idx| {
        let (d, rest) = (idx % n, idx / n);
        let (c, rest) = (rest % n, rest / n);
        let (b, a) = (rest % n, rest / n);
        (det_mod(n, a, b, c, d) == 1).then_some(SL2Mat { n, a, b, c, d })
    }))
}

/// Element `(t, M)` of `(Z_N x Z_N) ⋊ SL(2,Z_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CliffordElem {
    pub t: PhasePoint,
    pub m: SL2Mat,
}

impl CliffordElem {
    pub fn new(t: PhasePoint, m: SL2Mat) -> Result<Self> {
        check_mod(t.dim, m.n)?;
        Ok(Self { t, m })
    }

    pub fn identity(n: u64) -> Self {
        Self { t: PhasePoint::zero(n), m: SL2Mat::identity(n) }
    }

    pub fn translation(t: PhasePoint) -> Self {
        Self { t, m: SL2Mat::identity(t.dim) }
    }

    pub fn inverse(&self) -> Self {
        let mi = sl2_inverse(&self.m);
        let t = sl2_act(&mi, &self.t).expect("same modulus").neg();
        Self { t, m: mi }
    }
}

/// `(t_x + M_x t_y, M_x M_y)`.
pub fn clifford_mul(x: &CliffordElem, y: &CliffordElem) -> Result<CliffordElem> {
    check_mod(x.m.n, y.m.n)?;
    Ok(CliffordElem {
        t: x.t.add(&sl2_act(&x.m, &y.t)?)?,
        m: sl2_mul(&x.m, &y.m)?,
    })
}

/// The whole Clifford quotient group, of order `N² |SL(2,Z_N)|`.
pub fn clifford_enumerate(n: u64) -> Result<Vec<CliffordElem>> {
    let sl2 = sl2_enumerate(n)?;
    Ok(PhasePoint::all(n)
        .flat_map(|t| sl2.iter().map(move |&m| CliffordElem { t, m }))
        .collect())
}

/// Fourier matrix `(S_N)_{jk} = ω^{-jk} / √N`.
///
/// This sign makes `S Q S⁻¹ = P⁻¹` and `S P S⁻¹ = Q` hold for the shift
/// `P|j> = |j-1>`; with `ω^{+jk}` both relations come out inverted.
pub fn build_s(n: u64) -> DenseUnitary {
    let ctx = WHContext::new(n).expect("N >= 2");
    let mut s = DenseUnitary::zeros(n as usize);
    let norm = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        for k in 0..n {
            s.set(j as usize, k as usize, ctx.omega_pow(neg_mod(mul_mod(j, k, n), n)) * norm);
        }
    }
    s
}

/// Exponent of `τ_N` in the `j`-th diagonal entry of `D_N`, reduced mod the order of `τ_N`.
pub fn d_exponent(n: u64, j: u64) -> u64 {
    let ctx = WHContext::new(n).expect("N >= 2");
    let (j, nn) = (j as i128, n as i128);
    let e = if n % 2 == 1 { j * (1 - j) } else { j * (nn - j) };
    reduce(e, ctx.phase_order())
}

/// Diagonal phase gate with `d_j = τ^{j(1-j)}` (odd `N`) or `τ^{j(N-j)}` (even `N`).
pub fn build_d(n: u64) -> DenseUnitary {
    let ctx = WHContext::new(n).expect("N >= 2");
    let d: Vec<Complex64> = (0..n).map(|j| ctx.tau_pow(d_exponent(n, j))).collect();
    DenseUnitary::diag(&d)
}

/// Letters of generator words. The derived order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    S,
    SInv,
    D,
    DInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::S, Letter::SInv, Letter::D, Letter::DInv];

    pub fn sl2(self, n: u64) -> SL2Mat {
        match self {
            Letter::S => SL2Mat::fourier(n),
            Letter::SInv => sl2_inverse(&SL2Mat::fourier(n)),
            Letter::D => SL2Mat::shear(n),
            Letter::DInv => sl2_inverse(&SL2Mat::shear(n)),
        }
    }

    pub fn dense(self, n: u64) -> DenseUnitary {
        match self {
            Letter::S => build_s(n),
            Letter::SInv => build_s(n).adjoint(),
            Letter::D => build_d(n),
            Letter::DInv => build_d(n).adjoint(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Letter::S => "S",
            Letter::SInv => "S^-1",
            Letter::D => "D",
            Letter::DInv => "D^-1",
        }
    }
}

/// Word over `{S, S⁻¹, D, D⁻¹}`; evaluates to the left-to-right product.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GeneratorWord {
    pub letters: Vec<Letter>,
}

impl GeneratorWord {
    pub fn eval_sl2(&self, n: u64) -> SL2Mat {
        self.letters
            .iter()
            .fold(SL2Mat::identity(n), |acc, l| sl2_mul(&acc, &l.sl2(n)).expect("same modulus"))
    }

    pub fn eval_dense(&self, n: u64) -> DenseUnitary {
        self.letters
            .iter()
            .fold(DenseUnitary::identity(n as usize), |acc, l| acc.mul(&l.dense(n)).expect("same dim"))
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<_> = self.letters.iter().map(|l| l.symbol()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Breadth-first search tree of `SL(2,Z_N)` over the letters, rooted at the identity.
///
/// Children are generated by appending letters in [`Letter`] order, so the
/// first word reaching a matrix is the shortest one and, among those, the
/// lexicographically smallest.
pub struct Sl2Lifter {
    n: u64,
    parent: Vec<Option<(u32, Letter)>>,
    reached: usize,
}

impl Sl2Lifter {
    pub fn new(n: u64) -> Result<Self> {
        if !(2..=SL2_ENUM_MAX).contains(&n) {
            return Err(Error::InvalidInput(format!("word lifting needs 2 <= N <= {SL2_ENUM_MAX}, got {n}")));
        }
        let size = (n as usize).pow(4);
        let mut parent = vec![None; size];
        let mut seen = vec![false; size];
        let id = SL2Mat::identity(n);
        seen[id.index()] = true;
        let mut queue = VecDeque::from([id]);
        let mut reached = 1;
        let letters: Vec<SL2Mat> = Letter::ALL.iter().map(|l| l.sl2(n)).collect();
        while let Some(m) = queue.pop_front() {
            for (letter, g) in Letter::ALL.iter().zip(&letters) {
                let next = sl2_mul(&m, g)?;
                let k = next.index();
                if !seen[k] {
                    seen[k] = true;
                    parent[k] = Some((m.index() as u32, *letter));
                    reached += 1;
                    queue.push_back(next);
                }
            }
        }
        Ok(Self { n, parent, reached })
    }

    /// Number of matrices reachable from the identity.
    pub fn reached(&self) -> usize {
        self.reached
    }

    pub fn lift(&self, m: &SL2Mat) -> Result<GeneratorWord> {
        check_mod(self.n, m.n)?;
        if m.det() != 1 {
            return Err(Error::DeterminantViolation { det: m.det(), modulus: m.n });
        }
        let id = SL2Mat::identity(self.n).index();
        let mut k = m.index();
        let mut letters = Vec::new();
        while k != id {
            let (prev, letter) = self.parent[k].ok_or_else(|| Error::Unreachable(m.to_string()))?;
            letters.push(letter);
            k = prev as usize;
        }
        letters.reverse();
        Ok(GeneratorWord { letters })
    }
}

/// Shortest (then lexicographically least) word whose image is `m`.
pub fn lift_sl2(m: &SL2Mat) -> Result<GeneratorWord> {
    Sl2Lifter::new(m.n)?.lift(m)
}

type Keyed = (Vec<(i64, i64)>, DenseUnitary);

/// All products of the generators, compared entrywise (no phase quotient).
pub fn finite_closure(generators: &[DenseUnitary], guard: usize) -> Result<Vec<DenseUnitary>> {
    finite_closure_with(generators, guard, Strategy::default())
}

pub fn finite_closure_with(generators: &[DenseUnitary], guard: usize, strategy: Strategy) -> Result<Vec<DenseUnitary>> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidInput("no generators".into()));
    };
    if generators.iter().any(|g| g.dim() != first.dim()) {
        return Err(Error::InvalidInput("generators of different dimension".into()));
    }
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    let mut frontier = Vec::new();
    for g in generators {
        if seen.insert(matrix_key(g)) {
            elements.push(g.clone());
            frontier.push(g.clone());
        }
    }
    while !frontier.is_empty() {
        let products: Vec<Vec<Keyed>> = strategy.map_slice(&frontier, |x| {
            generators
                .iter()
                .map(|g| {
                    let p = x.mul(g).expect("same dim");
                    (matrix_key(&p), p)
                })
                .collect()
        });
        frontier = Vec::new();
        for (key, p) in products.into_iter().flatten() {
            if seen.insert(key) {
                if elements.len() >= guard {
                    return Err(Error::GuardExceeded {
                        what: "finite closure size",
                        size: elements.len() as u128 + 1,
                        limit: guard as u128,
                    });
                }
                elements.push(p.clone());
                frontier.push(p);
            }
        }
    }
    Ok(elements)
}

/// Sanity bound used by callers that want the closed-form order next to an enumeration.
pub fn clifford_order(n: u64) -> Result<u128> {
    Ok((n as u128).pow(2) * sl2_order(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{count_distinct, equal_up_to_phase};
    use crate::weylheis::{qp_dense, symplectic_form};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_counts() {
        let two = sl2_enumerate(2).unwrap();
        let expected: Vec<SL2Mat> = [
            (1, 0, 0, 1),
            (0, 1, 1, 0),
            (1, 1, 0, 1),
            (1, 0, 1, 1),
            (1, 1, 1, 0),
            (0, 1, 1, 1),
        ]
        .iter()
        // listed as rows [[a, c], [b, d]] → (a, c, b, d)
        .map(|&(a, c, b, d)| SL2Mat::new(2, a, b, c, d).unwrap())
        .collect();
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(two, sorted);
        assert_eq!(sl2_enumerate(3).unwrap().len(), 24);
        assert_eq!(sl2_enumerate(5).unwrap().len(), 120);
        for n in 2..=8 {
            assert_eq!(sl2_enumerate(n).unwrap().len() as u128, sl2_order(n).unwrap());
        }
        assert!(sl2_enumerate(13).is_err());
        assert_eq!(
            sl2_enumerate_with(7, Strategy::Sequential).unwrap(),
            sl2_enumerate_with(7, Strategy::Parallel).unwrap()
        );
    }

    #[test]
    fn action_and_inverse() {
        for p in PhasePoint::all(4) {
            assert_eq!(sl2_act(&SL2Mat::identity(4), &p).unwrap(), p);
        }
        let swap = SL2Mat::new(2, 0, 1, 1, 0).unwrap();
        assert_eq!(sl2_act(&swap, &PhasePoint::new(2, 1, 0)).unwrap(), PhasePoint::new(2, 0, 1));
        // the nonzero points of Z_2 x Z_2 form one orbit
        let sl = sl2_enumerate(2).unwrap();
        let orbit: HashSet<_> = sl.iter().map(|m| sl2_act(m, &PhasePoint::new(2, 1, 0)).unwrap()).collect();
        assert_eq!(orbit.len(), 3);
        for m in sl2_enumerate(6).unwrap() {
            assert_eq!(sl2_mul(&m, &sl2_inverse(&m)).unwrap(), SL2Mat::identity(6));
            assert_eq!(sl2_mul(&sl2_inverse(&m), &m).unwrap(), SL2Mat::identity(6));
        }
        assert!(sl2_mul(&SL2Mat::identity(2), &SL2Mat::identity(3)).is_err());
        assert!(SL2Mat::new(3, 1, 0, 0, 2).is_err());
    }

    #[test]
    fn action_preserves_symplectic_form() {
        for n in 2..=4 {
            for m in sl2_enumerate(n).unwrap() {
                for u in PhasePoint::all(n) {
                    for v in PhasePoint::all(n) {
                        let lhs = symplectic_form(&sl2_act(&m, &u).unwrap(), &sl2_act(&m, &v).unwrap()).unwrap();
                        assert_eq!(lhs, symplectic_form(&u, &v).unwrap());
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 5..=8 {
            let sl = sl2_enumerate(n).unwrap();
            for _ in 0..2000 {
                let m = sl[rng.random_range(0..sl.len())];
                let u = PhasePoint::new(n, rng.random_range(0..n), rng.random_range(0..n));
                let v = PhasePoint::new(n, rng.random_range(0..n), rng.random_range(0..n));
                let lhs = symplectic_form(&sl2_act(&m, &u).unwrap(), &sl2_act(&m, &v).unwrap()).unwrap();
                assert_eq!(lhs, symplectic_form(&u, &v).unwrap());
            }
        }
    }

    #[test]
    fn semidirect_product() {
        let id = CliffordElem::identity(3);
        assert_eq!(clifford_mul(&id, &id).unwrap(), id);
        let x = CliffordElem::translation(PhasePoint::new(3, 1, 0));
        let y = CliffordElem::translation(PhasePoint::new(3, 0, 1));
        assert_eq!(clifford_mul(&x, &y).unwrap(), CliffordElem::translation(PhasePoint::new(3, 1, 1)));
        assert_eq!(clifford_enumerate(2).unwrap().len(), 24);
        assert_eq!(clifford_enumerate(3).unwrap().len(), 216);
        assert_eq!(clifford_order(3).unwrap(), 216);
    }

    #[test]
    fn semidirect_axioms_and_normal_translations() {
        for n in 2..=3 {
            let g = clifford_enumerate(n).unwrap();
            let id = CliffordElem::identity(n);
            for x in &g {
                assert_eq!(clifford_mul(x, &x.inverse()).unwrap(), id);
                assert_eq!(clifford_mul(&x.inverse(), x).unwrap(), id);
                for t in PhasePoint::all(n) {
                    let tr = CliffordElem::translation(t);
                    let conj = clifford_mul(&clifford_mul(x, &tr).unwrap(), &x.inverse()).unwrap();
                    assert_eq!(conj.m, SL2Mat::identity(n));
                }
                for y in &g {
                    let xy = clifford_mul(x, y).unwrap();
                    for z in g.iter().step_by(7) {
                        assert_eq!(
                            clifford_mul(&xy, z).unwrap(),
                            clifford_mul(x, &clifford_mul(y, z).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generator_matrices() {
        let r = 1.0 / 2f64.sqrt();
        let s2 = DenseUnitary::from_rows(&[
            vec![Complex64::new(r, 0.), Complex64::new(r, 0.)],
            vec![Complex64::new(r, 0.), Complex64::new(-r, 0.)],
        ]);
        assert!(build_s(2).approx_eq(&s2));
        let d2 = DenseUnitary::diag(&[Complex64::new(1., 0.), Complex64::new(0., -1.)]);
        assert!(build_d(2).approx_eq(&d2));
        // (S₂D₂)³ is the central scalar e^{-iπ/4}, of order 8
        let sd3 = build_s(2).mul(&build_d(2)).unwrap().pow(3);
        let eta_inv = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!(sd3.approx_eq(&DenseUnitary::identity(2).scaled(eta_inv)));
        assert!(sd3.pow(8).approx_eq(&DenseUnitary::identity(2)));
        assert!(!sd3.pow(4).approx_eq(&DenseUnitary::identity(2)));
    }

    #[test]
    fn generator_relations() {
        for n in 2..=8u64 {
            let ctx = WHContext::new(n).unwrap();
            let (s, d) = (build_s(n), build_d(n));
            assert!(s.is_unitary() && d.is_unitary());
            let (q, p) = (qp_dense(n, 1, 0), qp_dense(n, 0, 1));
            let conj = |x: &DenseUnitary, a: &DenseUnitary| crate::dense::ad_action(x, a).unwrap();
            assert!(conj(&s, &q).approx_eq(&qp_dense(n, 0, n - 1)));
            assert!(conj(&s, &p).approx_eq(&q));
            assert!(conj(&d, &q).approx_eq(&q));
            let alpha = if n % 2 == 1 { Complex64::new(1.0, 0.0) } else { ctx.tau_pow(n + 1) };
            assert!(conj(&d, &p).approx_eq(&qp_dense(n, 1, 1).scaled(alpha)), "N={n}");
            assert_eq!(crate::dense::phi_of(&s, &ctx).unwrap(), SL2Mat::fourier(n));
            assert_eq!(crate::dense::phi_of(&d, &ctx).unwrap(), SL2Mat::shear(n));
        }
    }

    #[test]
    fn lifting() {
        assert!(lift_sl2(&SL2Mat::identity(5)).unwrap().letters.is_empty());
        assert_eq!(lift_sl2(&SL2Mat::shear(5)).unwrap().letters, vec![Letter::D]);
        for n in 2..=8 {
            let lifter = Sl2Lifter::new(n).unwrap();
            assert_eq!(lifter.reached() as u128, sl2_order(n).unwrap());
            for m in sl2_enumerate(n).unwrap() {
                let w = lifter.lift(&m).unwrap();
                assert_eq!(w.eval_sl2(n), m);
            }
        }
    }

    #[test]
    fn lifted_words_are_shortest_then_lexicographic() {
        // brute force over all words up to length 4 for N = 3
        let n = 3;
        let lifter = Sl2Lifter::new(n).unwrap();
        let mut best: std::collections::HashMap<SL2Mat, Vec<Letter>> = Default::default();
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..=4 {
            let mut sorted = words.clone();
            sorted.sort();
            for w in &sorted {
                let m = GeneratorWord { letters: w.clone() }.eval_sl2(n);
                best.entry(m).or_insert_with(|| w.clone());
            }
            words = words
                .iter()
                .flat_map(|w| Letter::ALL.iter().map(move |l| [w.clone(), vec![*l]].concat()))
                .collect();
        }
        for (m, w) in best {
            assert_eq!(lifter.lift(&m).unwrap().letters, w, "{m}");
        }
    }

    #[test]
    fn lifted_word_realizes_matrix_densely() {
        let n = 4;
        let ctx = WHContext::new(n).unwrap();
        let lifter = Sl2Lifter::new(n).unwrap();
        for m in sl2_enumerate(n).unwrap().into_iter().step_by(5) {
            let u = lifter.lift(&m).unwrap().eval_dense(n);
            assert_eq!(crate::dense::phi_of(&u, &ctx).unwrap(), m);
        }
    }

    #[test]
    fn closure_n2_has_192_elements() {
        let id = finite_closure(&[DenseUnitary::identity(2)], 10).unwrap();
        assert_eq!(id.len(), 1);
        let g = finite_closure(&[build_s(2), build_d(2)], DEFAULT_CLOSURE_GUARD).unwrap();
        assert_eq!(g.len(), 192);
        assert_eq!(count_distinct(&g), 192);
        let eta = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!(g.iter().any(|x| x.approx_eq(&DenseUnitary::identity(2).scaled(eta))));
        assert!(matches!(
            finite_closure(&[build_s(2), build_d(2)], 100),
            Err(Error::GuardExceeded { .. })
        ));
        let seq = finite_closure_with(&[build_s(2), build_d(2)], 1000, Strategy::Sequential).unwrap();
        assert_eq!(count_distinct(&seq), 192);
    }

    #[test]
    fn closure_n2_matches_parametrized_list() {
        // diag(1,α), [[0,1],[α,0]], [[1,β],[α,-αβ]]/√2 times η^ν
        let g = finite_closure(&[build_s(2), build_d(2)], DEFAULT_CLOSURE_GUARD).unwrap();
        let units = [
            Complex64::new(1., 0.),
            Complex64::new(0., 1.),
            Complex64::new(-1., 0.),
            Complex64::new(0., -1.),
        ];
        let z = Complex64::new(0., 0.);
        let o = Complex64::new(1., 0.);
        let r = 1.0 / 2f64.sqrt();
        let mut listed = Vec::new();
        for nu in 0..8 {
            let eta = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * nu as f64);
            for &a in &units {
                listed.push(DenseUnitary::from_rows(&[vec![o, z], vec![z, a]]).scaled(eta));
                listed.push(DenseUnitary::from_rows(&[vec![z, o], vec![a, z]]).scaled(eta));
                for &b in &units {
                    listed.push(DenseUnitary::from_rows(&[vec![o, b], vec![a, -a * b]]).scaled(eta * r));
                }
            }
        }
        assert_eq!(count_distinct(&listed), 192);
        let mut all = listed.clone();
        all.extend(g.iter().cloned());
        assert_eq!(count_distinct(&all), 192);
    }

    #[test]
    fn odd_n3_closure_contains_paulis() {
        let g = finite_closure(&[build_s(3), build_d(3)], DEFAULT_CLOSURE_GUARD).unwrap();
        for target in [qp_dense(3, 1, 0), qp_dense(3, 0, 1)] {
            assert!(g.iter().any(|x| equal_up_to_phase(x, &target).unwrap().matched));
        }
    }
}
