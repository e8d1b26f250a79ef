use crate::report::Report;
use anyhow::{bail, Context, Result};
use qudit_clifford::clifford1::{
    build_d, build_s, clifford_enumerate, finite_closure, lift_sl2, sl2_act, sl2_enumerate, GeneratorWord, Letter,
    SL2Mat, Sl2Lifter, DEFAULT_CLOSURE_GUARD, SL2_ENUM_MAX,
};
use qudit_clifford::dense::{ad_action, count_distinct, equal_up_to_phase, phi_of, DenseUnitary};
use qudit_clifford::multipartite::{
    decompose_symmetry, extract_block_matrix, format_product, generator_images, is_symplectic, sp_closure,
    sp_enumerate, verify_theorem2, DimList, Generator, SymmetryFactor, DEFAULT_ENUM_GUARD, DENSE_GUARD,
    DEFAULT_SP_CLOSURE_GUARD,
};
use qudit_clifford::numtheory::{factorize, sl2_order};
use qudit_clifford::stabsim::{benchmark, pauli_images_match, simulate, verify_vs_dense, Circuit, Tableau};
use qudit_clifford::weylheis::{
    center, project, qp_dense, symplectic_form, to_dense, wh_group_order, wh_inverse, wh_mul, PhasePoint, WHContext,
};
use qudit_clifford::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::Path;

/// Guards and seed shared by all commands.
pub struct Opts {
    pub seed: u64,
    pub max_closure: Option<usize>,
    pub max_enum: Option<u128>,
}

/// `(|P_N|, |SL(2,Z_N)|, |P_N ⋊ SL(2,Z_N)|)` for `N = 2..=8`.
const CARDINALITY_TABLE: [(u64, [u128; 3]); 7] = [
    (2, [4, 6, 24]),
    (3, [9, 24, 216]),
    (4, [16, 48, 768]),
    (5, [25, 120, 3000]),
    (6, [36, 144, 5184]),
    (7, [49, 336, 16464]),
    (8, [64, 384, 24576]),
];

pub fn orders(max: u64) -> Result<Report> {
    if !(2..=SL2_ENUM_MAX).contains(&max) {
        bail!("--max must be in 2..={SL2_ENUM_MAX}, got {max}");
    }
    let mut rep = Report::new("orders", json!({ "max": max }));
    rep.line(format!("{:>3} {:>8} {:>14} {:>14} {:>16}", "N", "|P_N|", "|SL2| formula", "|SL2| enum", "|P_N ⋊ SL2|"));
    let mut rows = vec![];
    for n in 2..=max {
        let pn = (n as u128).pow(2);
        let formula = sl2_order(n)?;
        let enumerated = sl2_enumerate(n)?.len() as u128;
        let semi = pn * formula;
        rep.line(format!("{n:>3} {pn:>8} {formula:>14} {enumerated:>14} {semi:>16}"));
        rows.push(json!({ "n": n, "phase_space": pn, "sl2_formula": formula, "sl2_enumerated": enumerated, "semidirect": semi }));
        rep.check(format!("N={n}: |SL(2,Z_N)| enumeration = formula"), formula, enumerated);
        if n <= 6 {
            let pairs = clifford_enumerate(n)?.len() as u128;
            rep.check(format!("N={n}: |P_N ⋊ SL2| enumeration = N²·|SL2|"), semi, pairs);
        }
        if let Some((_, row)) = CARDINALITY_TABLE.iter().find(|(m, _)| *m == n) {
            rep.check(format!("N={n}: tabulated (|P_N|, |SL2|, |P_N ⋊ SL2|)"), row, [pn, formula, semi]);
        }
    }
    rep.results = json!({ "rows": rows });
    Ok(rep)
}

fn scalar_phase(m: &DenseUnitary) -> Option<Complex64> {
    let id = DenseUnitary::identity(m.dim()).with_tol(m.tol);
    let pm = equal_up_to_phase(m, &id).ok()?;
    if pm.matched {
        pm.phase
    } else {
        None
    }
}

fn contains_up_to_phase(set: &[DenseUnitary], x: &DenseUnitary) -> bool {
    set.iter().any(|m| equal_up_to_phase(m, x).map(|p| p.matched).unwrap_or(false))
}

pub fn verify_single(n: u64, opts: &Opts) -> Result<Report> {
    if !(2..=8).contains(&n) {
        bail!("N must be in 2..=8, got {n}");
    }
    let mut rep = Report::new("verify-single", json!({ "n": n, "seed": opts.seed }));
    let ctx = WHContext::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let elements: Vec<_> = ctx.elements().collect();

    let expected_order = if n % 2 == 1 { n.pow(3) } else { 2 * n.pow(3) };
    rep.check("|H(N)| from the group law", expected_order, wh_group_order(&ctx));
    let dense: Vec<_> = elements.iter().map(to_dense).collect();
    rep.check("|H(N)| distinct dense images", expected_order as usize, count_distinct(&dense));

    let id = ctx.identity();
    let inverses_ok = elements.iter().all(|a| {
        let inv = wh_inverse(a);
        wh_mul(a, &inv).unwrap() == id && wh_mul(&inv, a).unwrap() == id && wh_mul(a, &id).unwrap() == *a
    });
    rep.check("H(N): identity and two-sided inverses", true, inverses_ok);
    let samples = 2000;
    let assoc = (0..samples)
        .filter(|_| {
            let pick = |rng: &mut ChaCha8Rng| elements[rng.random_range(0..elements.len())];
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            wh_mul(&wh_mul(&a, &b).unwrap(), &c).unwrap() == wh_mul(&a, &wh_mul(&b, &c).unwrap()).unwrap()
        })
        .count();
    rep.check("H(N): associativity on sampled triples", samples, assoc);
    let z = center(&ctx);
    let central = z.iter().all(|c| elements.iter().all(|a| wh_mul(c, a).unwrap() == wh_mul(a, c).unwrap()));
    rep.check("center is central", true, central);
    let kernel = elements.iter().filter(|a| project(a).is_zero()).count();
    rep.check("center = kernel of the phase-space projection", z.len(), kernel);

    let (s, d) = (build_s(n), build_d(n));
    let (q, p) = (qp_dense(n, 1, 0), qp_dense(n, 0, 1));
    let up_to_phase = |a: &DenseUnitary, b: &DenseUnitary| equal_up_to_phase(a, b).map(|m| m.matched).unwrap_or(false);
    rep.check("S Q S⁻¹ = P⁻¹ up to phase", true, up_to_phase(&ad_action(&s, &q)?, &qp_dense(n, 0, n - 1)));
    rep.check("S P S⁻¹ = Q up to phase", true, up_to_phase(&ad_action(&s, &p)?, &q));
    rep.check("D Q D⁻¹ = Q", true, ad_action(&d, &q)?.approx_eq(&q));
    let alpha = if n % 2 == 1 { Complex64::new(1.0, 0.0) } else { ctx.tau_pow(n + 1) };
    rep.check("D P D⁻¹ = α Q P", true, ad_action(&d, &p)?.approx_eq(&qp_dense(n, 1, 1).scaled(alpha)));
    rep.check("Φ(S)", SL2Mat::fourier(n).to_string(), phi_of(&s, &ctx)?.to_string());
    rep.check("Φ(D)", SL2Mat::shear(n).to_string(), phi_of(&d, &ctx)?.to_string());
    let phased = s.scaled(Complex64::from_polar(1.0, 0.731));
    rep.check("Φ invariant under global phase", phi_of(&s, &ctx)?.to_string(), phi_of(&phased, &ctx)?.to_string());

    let words = 200;
    let hom = (0..words)
        .filter(|_| {
            let len = rng.random_range(0..7);
            let w = GeneratorWord { letters: (0..len).map(|_| Letter::ALL[rng.random_range(0..4)]).collect() };
            phi_of(&w.eval_dense(n), &ctx).ok() == Some(w.eval_sl2(n))
        })
        .count();
    rep.check("Φ homomorphism on random S/D words", words, hom);

    let sl2 = sl2_enumerate(n)?;
    let points: Vec<PhasePoint> = PhasePoint::all(n).collect();
    let preserved = sl2.iter().all(|m| {
        let img: Vec<_> = points.iter().map(|x| sl2_act(m, x).unwrap()).collect();
        points.iter().zip(&img).all(|(u, mu)| {
            points.iter().zip(&img).all(|(v, mv)| symplectic_form(mu, mv).unwrap() == symplectic_form(u, v).unwrap())
        })
    });
    rep.check("SL(2,Z_N) preserves the symplectic form", true, preserved);
    rep.check("BFS over Φ(S)^±1, Φ(D)^±1 reaches |SL(2,Z_N)|", sl2_order(n)? as usize, Sl2Lifter::new(n)?.reached());

    let guard = opts.max_closure.unwrap_or(DEFAULT_CLOSURE_GUARD);
    if n == 2 {
        let sd3 = s.mul(&d)?.pow(3);
        let phase = scalar_phase(&sd3).map(|z| (z.arg() / PI * 4.0).round() as i64);
        rep.check("(S₂D₂)³ = e^{iθ}·I, θ in units of π/4", Some(-1), phase);
        let closure = finite_closure(&[s.clone(), d.clone()], guard)?;
        rep.check("closure(S₂,D₂) has 192 elements", 192, closure.len());
        rep.check("(S₂D₂)³ ∈ closure(S₂,D₂)", true, closure.iter().any(|m| m.approx_eq(&sd3)));
        let e = DenseUnitary::identity(2).scaled(Complex64::from_polar(1.0, PI / 4.0));
        rep.check("e^{iπ/4}·I ∈ closure(S₂,D₂)", true, closure.iter().any(|m| m.approx_eq(&e)));
        rep.results = json!({ "closure_size": closure.len() });
    } else if n % 2 == 1 {
        match finite_closure(&[s.clone(), d.clone()], guard) {
            Ok(closure) => {
                rep.check(
                    format!("Q{n},P{n} ∈ closure(S{n},D{n}) up to phase"),
                    true,
                    contains_up_to_phase(&closure, &q) && contains_up_to_phase(&closure, &p),
                );
                rep.results = json!({ "closure_size": closure.len() });
            }
            Err(Error::GuardExceeded { size, limit, .. }) => {
                rep.note(format!(
                    "closure(S{n},D{n}) skipped: more than {limit} elements (reached {size}); raise --max-closure to run it"
                ));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rep)
}

pub fn parse_dims(spec: &str) -> Result<DimList> {
    let spec = spec.trim();
    let dims = if let Some((n, k)) = spec.split_once(['x', '×', '*']) {
        let n: u64 = n.trim().parse().with_context(|| format!("bad dimension in {spec:?}"))?;
        let k: usize = k.trim().parse().with_context(|| format!("bad factor count in {spec:?}"))?;
        vec![n; k]
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad dimension {s:?}")))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(DimList::new(dims)?)
}

pub fn verify_multi(dims: &DimList, opts: &Opts) -> Result<Report> {
    if dims.total() > DENSE_GUARD as u128 {
        bail!("total dimension {} exceeds the dense guard {DENSE_GUARD}; dense verification refused", dims.total());
    }
    let mut rep = Report::new("verify-multi", json!({ "dims": dims }));
    let report = verify_theorem2(dims)?;
    for g in Generator::all(dims) {
        let name = g.to_string();
        let passed = report.checks.iter().filter(|c| c.generator == name && c.pass).count();
        rep.check(format!("{name}: conjugates of A_1..A_{} are tensor Weyl-Heisenberg elements", 2 * dims.k()), 2 * dims.k(), passed);
        let oracle = extract_block_matrix(&g.dense(dims)?, dims)?;
        rep.check(format!("{name}: oracle block matrix is symplectic"), true, is_symplectic(&oracle));
        rep.check(format!("{name}: closed form = oracle"), &oracle, g.analytic(dims));
        rep.line(format!("{name}: {:?}", oracle.rows()));
    }
    let closure_guard = opts.max_closure.unwrap_or(DEFAULT_SP_CLOSURE_GUARD);
    let enum_guard = opts.max_enum.unwrap_or(DEFAULT_ENUM_GUARD);
    let closure = skip_on_guard(&mut rep, "Sp closure", sp_closure(dims, closure_guard))?;
    let enumerated = skip_on_guard(&mut rep, "Sp enumeration", sp_enumerate(dims, enum_guard).map(|v| v.len()))?;
    if let (Some(c), Some(e)) = (closure, enumerated) {
        rep.check("generated group = brute-force Sp", e, c);
    }
    rep.results = json!({ "theorem2": report, "closure_size": closure, "enumerated_size": enumerated });
    Ok(rep)
}

fn skip_on_guard<T>(rep: &mut Report, what: &str, r: qudit_clifford::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::GuardExceeded { size, limit, .. }) => {
            rep.note(format!("{what} skipped: {size} exceeds the guard {limit}"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

/// `|Sp(2k, Z_{p^e})| = p^{(e-1)k(2k+1)} p^{k²} ∏_{i=1..k} (p^{2i} - 1)`.
fn sp_order_prime_power(k: usize, n: u64) -> Option<u128> {
    let f = factorize(n).ok()?;
    let [(p, e)] = f.factors[..] else { return None };
    let p = p as u128;
    let k = k as u32;
    let mut order = p.checked_pow((e - 1) * k * (2 * k + 1))?.checked_mul(p.checked_pow(k * k)?)?;
    for i in 1..=k {
        order = order.checked_mul(p.checked_pow(2 * i)? - 1)?;
    }
    Some(order)
}

fn closed_form_order(f: &SymmetryFactor) -> Option<u128> {
    match f {
        SymmetryFactor::SL2 { n } => sl2_order(*n).ok(),
        SymmetryFactor::Sp2k { k, n } => sp_order_prime_power(*k, *n),
        SymmetryFactor::SpMixed { .. } => None,
    }
}

/// Default closure budget for factors without a closed-form order.
const MIXED_PROBE: usize = 100_000;

pub fn decompose(dims: &DimList, opts: &Opts) -> Result<Report> {
    let mut rep = Report::new("decompose", json!({ "dims": dims }));
    let factors = decompose_symmetry(dims)?;
    let product = format_product(&factors);
    rep.line(format!("Sp_{dims} ≅ {product}"));
    let guard = opts.max_closure.unwrap_or(DEFAULT_SP_CLOSURE_GUARD);
    let mut sizes = vec![];
    for f in &factors {
        let fd = f.dims();
        let closed_form = closed_form_order(f);
        // orders of mixed prime-power blocks are not known in advance; probe them cheaply
        let budget = if closed_form.is_none() && opts.max_closure.is_none() { MIXED_PROBE } else { guard };
        let fits = closed_form.is_none_or(|o| o <= guard as u128);
        let size = if fits { skip_on_guard(&mut rep, &format!("closure of {f}"), sp_closure(&fd, budget))? } else {
            rep.note(format!("closure of {f} skipped: order {} exceeds the guard {guard}", closed_form.unwrap()));
            None
        };
        if let (Some(c), Some(o)) = (size, closed_form) {
            rep.check(format!("|{f}| closure = closed form"), o, c as u128);
        }
        rep.line(format!(
            "  {f:<14} dims {fd}  closure {}  closed form {}",
            size.map_or("-".into(), |s| s.to_string()),
            closed_form.map_or("-".into(), |s| s.to_string())
        ));
        sizes.push(json!({ "factor": f.to_string(), "structure": f, "closure_size": size, "closed_form": closed_form }));
    }
    let known: Option<u128> = sizes.iter().map(|s| s["closure_size"].as_u64().map(u128::from)).product();
    if factors.len() > 1 {
        if let Some(prod) = known.filter(|&p| p <= guard as u128) {
            if let Some(whole) = skip_on_guard(&mut rep, "closure of the whole group", sp_closure(dims, guard))? {
                rep.check("closure of the whole group = product of factor orders", prod, whole as u128);
            }
        }
    }
    rep.results = json!({ "product": product, "factors": sizes });
    Ok(rep)
}

/// `a b c d` are the rows `[[a, b], [c, d]]`.
pub fn lift(n: u64, a: u64, b: u64, c: u64, d: u64) -> Result<Report> {
    if !(2..=SL2_ENUM_MAX).contains(&n) {
        bail!("N must be in 2..={SL2_ENUM_MAX}, got {n}");
    }
    let m = SL2Mat::new(n, a, c, b, d)?;
    let mut rep = Report::new("lift", json!({ "n": n, "matrix": [[a, b], [c, d]] }));
    let word = lift_sl2(&m)?;
    rep.line(format!("{m} = {word}"));
    rep.check("word evaluates to the matrix", m.to_string(), word.eval_sl2(n).to_string());
    let ctx = WHContext::new(n)?;
    rep.check("Φ(dense word) = matrix", m.to_string(), phi_of(&word.eval_dense(n), &ctx)?.to_string());
    rep.results = json!({ "word": word.to_string(), "length": word.letters.len(), "letters": word.letters });
    Ok(rep)
}

pub fn closure_sp(dims: &DimList, opts: &Opts) -> Result<Report> {
    let mut rep = Report::new("closure", json!({ "dims": dims }));
    let guard = opts.max_closure.unwrap_or(DEFAULT_SP_CLOSURE_GUARD);
    let gens = generator_images(dims)?;
    let size = sp_closure(dims, guard)?;
    rep.line(format!("|<S_i, D_i, R_ij>| on {dims} = {size}"));
    let factors = decompose_symmetry(dims)?;
    let closed: Option<u128> = factors.iter().map(closed_form_order).product();
    if let Some(o) = closed {
        rep.check(format!("closure = |{}|", format_product(&factors)), o, size as u128);
    }
    if let Some(e) = skip_on_guard(
        &mut rep,
        "Sp enumeration",
        sp_enumerate(dims, opts.max_enum.unwrap_or(DEFAULT_ENUM_GUARD)).map(|v| v.len()),
    )? {
        rep.check("closure = brute-force Sp", e, size);
    }
    let names: Vec<_> = gens.iter().map(|(g, _)| g.to_string()).collect();
    rep.results = json!({ "size": size, "generators": names });
    Ok(rep)
}

pub fn closure_finite(n: u64, opts: &Opts) -> Result<Report> {
    if n < 2 {
        bail!("N must be >= 2");
    }
    let mut rep = Report::new("closure", json!({ "finite": n }));
    let guard = opts.max_closure.unwrap_or(DEFAULT_CLOSURE_GUARD);
    let closure = finite_closure(&[build_s(n), build_d(n)], guard)?;
    rep.line(format!("|<S_{n}, D_{n}>| = {}", closure.len()));
    let ctx = WHContext::new(n)?;
    let images: std::collections::HashSet<_> = closure.iter().filter_map(|u| phi_of(u, &ctx).ok()).collect();
    rep.check("image in SL(2,Z_N) is all of SL(2,Z_N)", sl2_order(n)?, images.len() as u128);
    if n == 2 {
        rep.check("closure size", 192, closure.len());
    }
    rep.results = json!({ "size": closure.len() });
    Ok(rep)
}

fn tableau_hash(t: &Tableau) -> String {
    let mut h = Sha256::new();
    for d in t.dims.dims() {
        h.update(d.to_le_bytes());
    }
    for e in t.matrix.entries() {
        h.update(e.to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Circuit::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn sim_run(path: &Path) -> Result<Report> {
    let c = load_circuit(path)?;
    let mut rep = Report::new("sim run", json!({ "circuit": path.display().to_string(), "dims": c.dims, "gates": c.gates.len() }));
    let t = simulate(&c);
    rep.check("tableau is symplectic", true, is_symplectic(&t.matrix));
    for row in t.matrix.rows() {
        rep.line(format!("  {row:?}"));
    }
    rep.results = json!({ "tableau": t.matrix, "hash": tableau_hash(&t) });
    Ok(rep)
}

pub fn sim_verify(path: &Path) -> Result<Report> {
    let c = load_circuit(path)?;
    if c.dims.total() > DENSE_GUARD as u128 {
        bail!("total dimension {} exceeds the dense guard {DENSE_GUARD}; dense verification refused", c.dims.total());
    }
    let mut rep = Report::new("sim verify", json!({ "circuit": path.display().to_string(), "dims": c.dims, "gates": c.gates.len() }));
    let v = verify_vs_dense(&c)?;
    rep.check("tableau = extraction of the dense circuit unitary", &v.extracted, &v.simulated);
    rep.check("U A_m U† ∝ tableau image of A_m for all m", true, pauli_images_match(&c)?);
    if let Some((i, j)) = v.first_mismatch {
        rep.note(format!("first differing block: ({i},{j})"));
    }
    rep.results = json!({ "matched": v.matched, "first_mismatch": v.first_mismatch, "tableau": v.simulated });
    Ok(rep)
}

pub fn sim_bench(dims: &DimList, gates: usize, seed: u64) -> Result<Report> {
    let mut rep = Report::new("sim bench", json!({ "dims": dims, "gates": gates, "seed": seed }));
    let b = benchmark(dims, gates, seed);
    let hash = tableau_hash(&b.tableau);
    rep.check("tableau is symplectic", true, is_symplectic(&b.tableau.matrix));
    rep.line(format!("{} factors, {gates} gates, seed {seed}", dims.k()));
    rep.line(format!("tableau sha256 {hash}"));
    rep.timing = Some(json!({ "seconds": b.seconds, "ns_per_gate": b.ns_per_gate }));
    rep.results = json!({ "hash": hash });
    Ok(rep)
}
