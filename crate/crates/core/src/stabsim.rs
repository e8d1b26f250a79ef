//! Heisenberg-picture Clifford circuit simulation on the composite phase space.
//!
//! A [`Tableau`] is the accumulated block matrix of a circuit: column `m` is
//! the phase-space label of `U A_m U†`. Global phases are not tracked.

use crate::clifford1::{build_d, build_s};
use crate::dense::{embed, extract_tensor_coset, DenseUnitary};
use crate::exec::Strategy;
use crate::multipartite::{
    block_mul, build_r, couple_block, extract_block_matrix, fourier_block, is_symplectic, phase_block,
    BlockMatrix, DimList, DENSE_GUARD,
};
use crate::numtheory::{add_mod, gcd, mul_mod, neg_mod};
use crate::weylheis::qp_dense;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "FOURIER")]
    Fourier,
    #[serde(rename = "PHASE")]
    Phase,
    #[serde(rename = "X", alias = "PAULI_X")]
    PauliX,
    #[serde(rename = "Z", alias = "PAULI_Z")]
    PauliZ,
    #[serde(rename = "COUPLE")]
    Couple,
    #[serde(rename = "COUPLE_INV")]
    CoupleInv,
}

/// A gate with 0-based factor indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// Control factor of a coupling gate; always smaller than `target`.
    pub control: Option<usize>,
    /// Exponent of a Pauli gate.
    pub power: u64,
}

impl Gate {
    pub fn fourier(target: usize) -> Self {
        Self { kind: GateKind::Fourier, target, control: None, power: 1 }
    }

    pub fn phase(target: usize) -> Self {
        Self { kind: GateKind::Phase, target, control: None, power: 1 }
    }

    pub fn pauli_x(target: usize, power: u64) -> Self {
        Self { kind: GateKind::PauliX, target, control: None, power }
    }

    pub fn pauli_z(target: usize, power: u64) -> Self {
        Self { kind: GateKind::PauliZ, target, control: None, power }
    }

    pub fn couple(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Couple, target, control: Some(control), power: 1 }
    }

    pub fn couple_inv(control: usize, target: usize) -> Self {
        Self { kind: GateKind::CoupleInv, target, control: Some(control), power: 1 }
    }

    fn is_coupling(&self) -> bool {
        matches!(self.kind, GateKind::Couple | GateKind::CoupleInv)
    }

    pub fn validate(&self, dims: &DimList) -> Result<()> {
        let k = dims.k();
        if self.target >= k {
            return Err(Error::InvalidInput(format!("target {} out of range 1..={k}", self.target + 1)));
        }
        match (self.is_coupling(), self.control) {
            (true, Some(c)) if c < self.target => Ok(()),
            (true, Some(c)) => Err(Error::InvalidInput(format!(
                "coupling needs control < target, got control {} target {}",
                c + 1,
                self.target + 1
            ))),
            (true, None) => Err(Error::InvalidInput("coupling gate without control".into())),
            (false, Some(_)) => Err(Error::InvalidInput(format!("{:?} takes no control", self.kind))),
            (false, None) => Ok(()),
        }
    }

    /// The gate as a unitary on the full space.
    pub fn dense(&self, dims: &DimList) -> Result<DenseUnitary> {
        self.validate(dims)?;
        let d = dims.dims();
        let n = d[self.target];
        Ok(match self.kind {
            GateKind::Fourier => embed(d, self.target, &build_s(n)),
            GateKind::Phase => embed(d, self.target, &build_d(n)),
            GateKind::PauliX => embed(d, self.target, &qp_dense(n, 0, self.power % n)),
            GateKind::PauliZ => embed(d, self.target, &qp_dense(n, self.power % n, 0)),
            GateKind::Couple => build_r(dims, self.control.expect("validated"), self.target)?,
            GateKind::CoupleInv => build_r(dims, self.control.expect("validated"), self.target)?.adjoint(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub dims: DimList,
    pub gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateJson {
    kind: GateKind,
    target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    dims: Vec<u64>,
    #[serde(default)]
    gates: Vec<GateJson>,
}

impl Circuit {
    pub fn new(dims: DimList, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(&dims)?;
        }
        Ok(Self { dims, gates })
    }

    pub fn empty(dims: DimList) -> Self {
        Self { dims, gates: vec![] }
    }

    /// Parses the circuit file format; factor indices are 1-based.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CircuitJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let dims = DimList::new(raw.dims)?;
        let one_based = |x: usize, what: &str| {
            x.checked_sub(1)
                .ok_or_else(|| Error::InvalidInput(format!("{what} indices are 1-based, got 0")))
        };
        let gates = raw
            .gates
            .into_iter()
            .map(|g| {
                let pauli = matches!(g.kind, GateKind::PauliX | GateKind::PauliZ);
                if g.power.is_some() && !pauli {
                    return Err(Error::InvalidInput(format!("{:?} takes no power", g.kind)));
                }
                Ok(Gate {
                    kind: g.kind,
                    target: one_based(g.target, "target")?,
                    control: g.control.map(|c| one_based(c, "control")).transpose()?,
                    power: g.power.unwrap_or(1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, gates)
    }

    pub fn to_json(&self) -> String {
        let raw = CircuitJson {
            dims: self.dims.dims().to_vec(),
            gates: self
                .gates
                .iter()
                .map(|g| GateJson {
                    kind: g.kind,
                    target: g.target + 1,
                    control: g.control.map(|c| c + 1),
                    power: matches!(g.kind, GateKind::PauliX | GateKind::PauliZ).then_some(g.power),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain data")
    }

    /// `c1 ++ c2`.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if self.dims != other.dims {
            return Err(Error::DimsMismatch { left: self.dims.dims().to_vec(), right: other.dims.dims().to_vec() });
        }
        Ok(Circuit { dims: self.dims.clone(), gates: [self.gates.clone(), other.gates.clone()].concat() })
    }

    /// `U = G_L ⋯ G_1`.
    pub fn unitary(&self) -> Result<DenseUnitary> {
        guard_dense(&self.dims)?;
        let mut u = DenseUnitary::identity(self.dims.total() as usize);
        for g in &self.gates {
            u = g.dense(&self.dims)?.mul(&u)?;
        }
        Ok(u)
    }
}

fn guard_dense(dims: &DimList) -> Result<()> {
    if dims.total() > DENSE_GUARD as u128 {
        return Err(Error::GuardExceeded {
            what: "total dimension for dense verification",
            size: dims.total(),
            limit: DENSE_GUARD as u128,
        });
    }
    Ok(())
}

type CoupleKey = (DimList, usize, usize);

fn couple_cache() -> &'static Mutex<HashMap<CoupleKey, BlockMatrix>> {
    static CACHE: OnceLock<Mutex<HashMap<CoupleKey, BlockMatrix>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Block matrix of `R_ij`: extracted from the dense unitary once per
/// `(dims, i, j)` when the oracle can run, closed form otherwise.
fn couple_rep(dims: &DimList, i: usize, j: usize) -> Result<BlockMatrix> {
    if dims.total() > DENSE_GUARD as u128 {
        return Ok(couple_block(dims, i, j, false));
    }
    let key = (dims.clone(), i, j);
    if let Some(m) = couple_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(m.clone());
    }
    let m = extract_block_matrix(&build_r(dims, i, j)?, dims)?;
    couple_cache().lock().expect("cache poisoned").insert(key, m.clone());
    Ok(m)
}

pub fn gate_rep(g: &Gate, dims: &DimList) -> Result<BlockMatrix> {
    g.validate(dims)?;
    Ok(match g.kind {
        GateKind::Fourier => fourier_block(dims, g.target),
        GateKind::Phase => phase_block(dims, g.target),
        GateKind::PauliX | GateKind::PauliZ => BlockMatrix::identity(dims),
        GateKind::Couple => couple_rep(dims, g.control.expect("validated"), g.target)?,
        GateKind::CoupleInv => {
            let r = couple_rep(dims, g.control.expect("validated"), g.target)?;
            crate::multipartite::sp_inverse(&r)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tableau {
    pub dims: DimList,
    pub matrix: BlockMatrix,
}

impl Tableau {
    pub fn identity(dims: &DimList) -> Self {
        Self { dims: dims.clone(), matrix: BlockMatrix::identity(dims) }
    }

    /// `T ← G T`, touching only the rows the gate changes.
    pub fn apply(&mut self, g: &Gate) {
        let size = self.matrix.size();
        let dims = self.dims.dims();
        let data = &mut self.matrix.data;
        let t = g.target;
        let n = dims[t];
        let (p, q) = (2 * t, 2 * t + 1);
        match g.kind {
            GateKind::Fourier => {
                for c in 0..size {
                    let (vp, vq) = (data[p * size + c], data[q * size + c]);
                    data[p * size + c] = neg_mod(vq, n);
                    data[q * size + c] = vp;
                }
            }
            GateKind::Phase => {
                for c in 0..size {
                    data[q * size + c] = add_mod(data[q * size + c], data[p * size + c], n);
                }
            }
            GateKind::PauliX | GateKind::PauliZ => {}
            GateKind::Couple | GateKind::CoupleInv => {
                let i = g.control.expect("validated");
                let (ni, nj) = (dims[i], n);
                let gg = gcd(ni, nj);
                let (si, sj) = (ni / gg, nj / gg);
                let (ci, cj) = if g.kind == GateKind::Couple { (neg_mod(si, ni), neg_mod(sj, nj)) } else { (si % ni, sj % nj) };
                let (pi, qi, pj, qj) = (2 * i, 2 * i + 1, p, q);
                for c in 0..size {
                    let (vpi, vpj) = (data[pi * size + c], data[pj * size + c]);
                    data[qj * size + c] = add_mod(data[qj * size + c], mul_mod(cj, vpi, nj), nj);
                    data[qi * size + c] = add_mod(data[qi * size + c], mul_mod(ci, vpj, ni), ni);
                }
            }
        }
    }
}

/// Fast simulation by in-place row updates, `O(k)` per gate.
pub fn simulate(c: &Circuit) -> Tableau {
    let mut t = Tableau::identity(&c.dims);
    for g in &c.gates {
        t.apply(g);
    }
    t
}

/// Simulation by full block-matrix products of [`gate_rep`]s.
pub fn simulate_reference(c: &Circuit) -> Result<Tableau> {
    let mut m = BlockMatrix::identity(&c.dims);
    for g in &c.gates {
        m = block_mul(&gate_rep(g, &c.dims)?, &m)?;
    }
    Ok(Tableau { dims: c.dims.clone(), matrix: m })
}

/// [`simulate`] asserting the symplectic property after every gate.
pub fn simulate_checked(c: &Circuit) -> Result<Tableau> {
    let mut t = Tableau::identity(&c.dims);
    for (idx, g) in c.gates.iter().enumerate() {
        t.apply(g);
        if !is_symplectic(&t.matrix) {
            return Err(Error::SymplecticViolation { gate: idx + 1 });
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub matched: bool,
    /// 1-based block `(i, j)` of the first difference.
    pub first_mismatch: Option<(usize, usize)>,
    pub simulated: BlockMatrix,
    pub extracted: BlockMatrix,
}

/// Compares the simulator with the block matrix extracted from the dense circuit unitary.
pub fn verify_vs_dense(c: &Circuit) -> Result<VerifyReport> {
    guard_dense(&c.dims)?;
    let simulated = simulate(c).matrix;
    let extracted = extract_block_matrix(&c.unitary()?, &c.dims)?;
    let k = c.dims.k();
    let first_mismatch = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .find(|&(i, j)| simulated.block(i, j) != extracted.block(i, j))
        .map(|(i, j)| (i + 1, j + 1));
    Ok(VerifyReport { matched: first_mismatch.is_none(), first_mismatch, simulated, extracted })
}

pub fn verify_batch(circuits: &[Circuit], strategy: Strategy) -> Vec<Result<VerifyReport>> {
    strategy.map_slice(circuits, verify_vs_dense)
}

/// Checks `U A_m U† ∝ tensor_wh(column m)` for every generator `A_m` directly,
/// without going through block-matrix extraction.
pub fn pauli_images_match(c: &Circuit) -> Result<bool> {
    use crate::dense::{ad_action, equal_up_to_phase, tensor_wh, wh_generators};
    guard_dense(&c.dims)?;
    let u = c.unitary()?;
    let t = simulate(c);
    for (m, a) in wh_generators(c.dims.dims()).iter().enumerate() {
        let conj = ad_action(&u, a)?;
        let expected = tensor_wh(c.dims.dims(), &t.matrix.column(m));
        if !equal_up_to_phase(&conj, &expected)?.matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniformly random gates; couplings only when `k ≥ 2`.
pub fn random_circuit<R: Rng>(dims: &DimList, gates: usize, rng: &mut R) -> Circuit {
    let k = dims.k();
    let kinds: &[GateKind] = if k >= 2 {
        &[GateKind::Fourier, GateKind::Phase, GateKind::PauliX, GateKind::PauliZ, GateKind::Couple, GateKind::CoupleInv]
    } else {
        &[GateKind::Fourier, GateKind::Phase, GateKind::PauliX, GateKind::PauliZ]
    };
    let gates = (0..gates)
        .map(|_| {
            let kind = kinds[rng.random_range(0..kinds.len())];
            match kind {
                GateKind::Couple | GateKind::CoupleInv => {
                    let a = rng.random_range(0..k);
                    let mut b = rng.random_range(0..k - 1);
                    if b >= a {
                        b += 1;
                    }
                    Gate { kind, target: a.max(b), control: Some(a.min(b)), power: 1 }
                }
                _ => {
                    let target = rng.random_range(0..k);
                    let power = rng.random_range(0..dims.dims()[target]);
                    let power = if matches!(kind, GateKind::PauliX | GateKind::PauliZ) { power } else { 1 };
                    Gate { kind, target, control: None, power }
                }
            }
        })
        .collect();
    Circuit { dims: dims.clone(), gates }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub dims: DimList,
    pub gates: usize,
    pub seed: u64,
    pub seconds: f64,
    pub ns_per_gate: f64,
    pub tableau: Tableau,
}

/// Times [`simulate`] on a random circuit drawn from `seed` (generation not timed).
pub fn benchmark(dims: &DimList, gate_count: usize, seed: u64) -> BenchReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit = random_circuit(dims, gate_count, &mut rng);
    let start = Instant::now();
    let tableau = simulate(&circuit);
    let seconds = start.elapsed().as_secs_f64();
    BenchReport {
        dims: dims.clone(),
        gates: gate_count,
        seed,
        seconds,
        ns_per_gate: if gate_count == 0 { 0.0 } else { seconds * 1e9 / gate_count as f64 },
        tableau,
    }
}

/// Exponent vectors of `U A_m U†` read from the dense unitary, for debugging.
pub fn dense_images(c: &Circuit) -> Result<Vec<Vec<u64>>> {
    use crate::dense::{ad_action, wh_generators};
    let u = c.unitary()?;
    wh_generators(c.dims.dims())
        .iter()
        .map(|a| extract_tensor_coset(&ad_action(&u, a)?, c.dims.dims()))
        .collect()
}
