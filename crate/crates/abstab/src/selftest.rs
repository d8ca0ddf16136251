//! Randomized equivalence suites pitting the label-arithmetic implementation
//! against the dense state-vector oracle on small groups. Used by the
//! `selftest` CLI subcommand and by the acceptance tests.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dense;
use crate::gates::{self, GateEncoding};
use crate::group::{Group, GroupElement};
use crate::measure;
use crate::pauli::PauliLabel;
use crate::solver::{self, HomMatrix};
use crate::stabilizer::{initial_state_stabilizer, StabilizerGroup};
use crate::subgroup::{self, SubgroupGens};

/// Outcome of one suite: case count and failure descriptions (possibly
/// truncated to the first few).
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, result: std::result::Result<(), String>) {
        self.cases += 1;
        if let Err(msg) = result {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Random group with order between 2 and `max_order`.
pub fn random_group(rng: &mut ChaCha8Rng, max_order: u64) -> Group {
    loop {
        let m = rng.gen_range(1..=3usize);
        let mut moduli = Vec::with_capacity(m);
        let mut order = 1u64;
        for _ in 0..m {
            let d = rng.gen_range(2..=8u64);
            moduli.push(d);
            order = order.saturating_mul(d);
        }
        if order <= max_order {
            return Group::from_u64(&moduli).unwrap();
        }
    }
}

pub fn random_element(rng: &mut ChaCha8Rng, group: &Group) -> GroupElement {
    let idx = rng.gen_biguint_below(group.order());
    group.element_from_index(&idx)
}

pub fn random_pauli(rng: &mut ChaCha8Rng, group: &Group) -> PauliLabel {
    let phase = rng.gen_biguint_below(group.double_order());
    PauliLabel::new(
        group.phase(BigInt::from(phase)),
        random_element(rng, group),
        random_element(rng, group),
    )
    .unwrap()
}

pub fn random_subgroup(rng: &mut ChaCha8Rng, group: &Group) -> SubgroupGens {
    let count = rng.gen_range(0..=3usize);
    let gens = (0..count).map(|_| random_element(rng, group)).collect();
    SubgroupGens::new(group.clone(), gens).unwrap()
}

/// Random matrix of a homomorphism `domain -> codomain`: entry `(i, j)` is a
/// random multiple of `d_i / gcd(c_j, d_i)`.
pub fn random_hom(rng: &mut ChaCha8Rng, domain: &Group, codomain: &Group) -> HomMatrix {
    let mut rows = vec![vec![BigUint::zero(); domain.rank()]; codomain.rank()];
    for j in 0..domain.rank() {
        let c_j = domain.modulus(j);
        for (i, row) in rows.iter_mut().enumerate() {
            let d_i = codomain.modulus(i);
            let g = c_j.gcd(d_i);
            let step = d_i / &g;
            row[j] = step * rng.gen_biguint_below(&g.max(BigUint::one()));
        }
    }
    HomMatrix::new(domain.clone(), codomain.clone(), &rows).unwrap()
}

/// Random valid quadratic function: bilinear coefficients are random
/// multiples of their periodicity bound, diagonal values solve the
/// wrap-around constraint on each generator.
pub fn random_quadratic(rng: &mut ChaCha8Rng, group: &Group) -> GateEncoding {
    let m = group.rank();
    let two_g = group.double_order();
    let mut beta = vec![vec![BigUint::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let step = (two_g / group.modulus(i)).lcm(&(two_g / group.modulus(j)));
            let bound = two_g / &step;
            let v = &step * rng.gen_biguint_below(&bound.max(BigUint::one()));
            beta[i][j] = v.clone();
            beta[j][i] = v;
        }
    }
    let mut diag = Vec::with_capacity(m);
    for i in 0..m {
        // d_i * n + C(d_i, 2) * beta_ii = 0 (mod 2*order)
        let d_i = group.modulus(i);
        let c2: BigUint = (d_i * (d_i - 1u32)) >> 1u32;
        let rhs = (two_g - (c2 * &beta[i][i]) % two_g) % two_g;
        debug_assert!((&rhs % d_i) == BigUint::zero());
        let base = rhs / d_i; // n mod (2*order / d_i)
        let period = two_g / d_i;
        let n = (&base + &period * rng.gen_biguint_below(d_i)) % two_g;
        diag.push(n);
    }
    let mut double = Vec::with_capacity(m);
    for i in 0..m {
        // value at the group element 2 e_i
        let two_mod = BigUint::from(2u32) % group.modulus(i);
        let v = if two_mod.is_zero() {
            BigUint::zero()
        } else if two_mod.is_one() {
            diag[i].clone()
        } else {
            (&diag[i] * 2u32 + &beta[i][i]) % two_g
        };
        double.push(v);
    }
    let mut pair = std::collections::BTreeMap::new();
    for i in 0..m {
        for j in (i + 1)..m {
            pair.insert(
                (i, j),
                (&diag[i] + &diag[j] + &beta[i][j]) % two_g,
            );
        }
    }
    gates::quadratic_phase(group, diag, double, pair).expect("constructed tables are valid")
}

/// Random automorphism gate: a product of elementary valid operations
/// (transvections where the moduli divide, unit scalings, equal-modulus
/// swaps).
pub fn random_automorphism(rng: &mut ChaCha8Rng, group: &Group) -> GateEncoding {
    let m = group.rank();
    let mut rows: Vec<Vec<BigUint>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        BigUint::one() % group.modulus(i)
                    } else {
                        BigUint::zero()
                    }
                })
                .collect()
        })
        .collect();
    let ops = rng.gen_range(1..=4usize);
    for _ in 0..ops {
        match rng.gen_range(0..3u8) {
             0 if m >= 2 => {
                // row_dst += scale * row_src is valid when d_dst | d_src
                let i = rng.gen_range(0..m);
                let j = rng.gen_range(0..m);
                if i != j && (group.modulus(i) % group.modulus(j)).is_zero() {
                    let scale = rng.gen_biguint_below(group.modulus(j));
                    for col in 0..m {
                        let add = (&rows[i][col] * &scale) % group.modulus(j);
                        rows[j][col] = (&rows[j][col] + add) % group.modulus(j);
                    }
                }
            }
            1 => {
                let i = rng.gen_range(0..m);
                let d = group.modulus(i);
                // random unit multiplier
                let a = loop {
                    let a = rng.gen_biguint_below(d);
                    if a.gcd(d).is_one() {
                        break a;
                    }
                    if d.is_one() {
                        break BigUint::zero();
                    }
                };
                for col in 0..m {
                    rows[i][col] = (&rows[i][col] * &a) % d;
                }
            }
            _ if m >= 2 => {
                let i = rng.gen_range(0..m);
                let j = rng.gen_range(0..m);
                if i != j && group.modulus(i) == group.modulus(j) {
                    rows.swap(i, j);
                }
            }
            _ => {}
        }
    }
    gates::automorphism(group, &rows).expect("products of elementary automorphisms")
}

/// One random gate, cycling through the gate families.
pub fn random_gate(rng: &mut ChaCha8Rng, group: &Group, family: usize) -> GateEncoding {
    let m = group.rank();
    match family % 8 {
        0 => {
            let count = rng.gen_range(1..=m);
            let mut factors: Vec<usize> = (0..m).collect();
            for k in (1..m).rev() {
                let j = rng.gen_range(0..=k);
                factors.swap(k, j);
            }
            factors.truncate(count);
            gates::partial_qft(group, &factors, rng.gen_bool(0.5)).unwrap()
        }
        1 => {
            // SUM gate on a valid (control, target) pair if one exists
            let mut pairs = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    if i != j && (group.modulus(i) % group.modulus(j)).is_zero() {
                        pairs.push((i, j));
                    }
                }
            }
            if pairs.is_empty() {
                gates::fourier_gate(group, rng.gen_range(0..m)).unwrap()
            } else {
                let (i, j) = pairs[rng.gen_range(0..pairs.len())];
                gates::sum_gate(group, i, j).unwrap()
            }
        }
        2 => {
            if m >= 2 {
                let i = rng.gen_range(0..m);
                let j = loop {
                    let j = rng.gen_range(0..m);
                    if j != i {
                        break j;
                    }
                };
                gates::cz_gate(group, i, j).unwrap()
            } else {
                gates::phase_s_gate(group, 0).unwrap()
            }
        }
        3 => gates::phase_s_gate(group, rng.gen_range(0..m)).unwrap(),
        4 => {
            let i = rng.gen_range(0..m);
            let d = group.modulus(i);
            let a = loop {
                let a = rng.gen_biguint_below(d);
                if a.gcd(d).is_one() {
                    break a;
                }
                if d.is_one() {
                    break BigUint::zero();
                }
            };
            gates::mult_gate(group, i, &a).unwrap()
        }
        5 => random_automorphism(rng, group),
        6 => random_quadratic(rng, group),
        _ => gates::pauli_gate(random_pauli(rng, group)),
    }
}

/// Random stabilizer state: a random basis state pushed through a short
/// random normalizer circuit. Always uniquely stabilizing.
pub fn random_stabilizer_state(rng: &mut ChaCha8Rng, group: &Group) -> StabilizerGroup {
    let x = random_element(rng, group);
    let mut s = initial_state_stabilizer(group, &x).unwrap();
    let depth = rng.gen_range(3..=10usize);
    for step in 0..depth {
        let fam = rng.gen_range(0..8usize) + step;
        let gate = random_gate(rng, group, fam);
        s = s.conjugated(&gate).unwrap();
    }
    s
}

/// Random stabilizer group (possibly a code): a state with generators
/// dropped at random.
pub fn random_stabilizer_code(rng: &mut ChaCha8Rng, group: &Group) -> StabilizerGroup {
    let state = random_stabilizer_state(rng, group);
    let mut gens: Vec<PauliLabel> = state.generators().to_vec();
    gens.retain(|_| rng.gen_bool(0.8));
    StabilizerGroup::new(group.clone(), gens).expect("subgroup of a valid stabilizer group")
}


/// Suite: solver equivalence against exhaustive enumeration.
pub fn suite_solver(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("linear-solver-equivalence");
    for _ in 0..cases {
        let domain = random_group(rng, max_order);
        let codomain = random_group(rng, max_order);
        let a = random_hom(rng, &domain, &codomain);
        let b = random_element(rng, &codomain);
        report.record(check_solver_instance(&a, &b));
    }
    report
}

fn check_solver_instance(a: &HomMatrix, b: &GroupElement) -> std::result::Result<(), String> {
    let brute: std::collections::BTreeSet<BigUint> = a
        .domain()
        .iter_elements()
        .filter(|x| &a.apply(x).unwrap() == b)
        .map(|x| a.domain().index_of(&x))
        .collect();
    let count = solver::count_solutions(a, b).map_err(|e| e.to_string())?;
    if count != BigUint::from(brute.len() as u64) {
        return Err(format!("count {count} != enumerated {}", brute.len()));
    }
    match solver::solve(a, b).map_err(|e| e.to_string())? {
        None => {
            if !brute.is_empty() {
                return Err("reported unsolvable but solutions exist".into());
            }
        }
        Some(sol) => {
            if a.apply(&sol.particular).unwrap() != *b {
                return Err("particular solution does not satisfy the system".into());
            }
            let mut span = std::collections::BTreeSet::new();
            let mut frontier = vec![sol.particular.clone()];
            while let Some(x) = frontier.pop() {
                if !span.insert(a.domain().index_of(&x)) {
                    continue;
                }
                for k in sol.kernel.generators() {
                    frontier.push(x.add(k).unwrap());
                }
            }
            if span != brute {
                return Err("general solution spans a different set".into());
            }
        }
    }
    Ok(())
}

/// Suite: orthogonal-subgroup laws on random subgroup pairs.
pub fn suite_orthogonality(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("orthogonal-subgroup-laws");
    for _ in 0..cases {
        let group = random_group(rng, max_order);
        let h = random_subgroup(rng, &group);
        let k = random_subgroup(rng, &group);
        report.record(check_orthogonality_laws(&group, &h, &k));
    }
    report
}

fn check_orthogonality_laws(
    group: &Group,
    h: &SubgroupGens,
    k: &SubgroupGens,
) -> std::result::Result<(), String> {
    let hp = subgroup::orthogonal(h);
    let hpp = subgroup::orthogonal(&hp);
    if !subgroup::subgroup_eq(&hpp, h).unwrap() {
        return Err("(H-perp)-perp != H".into());
    }
    let product = subgroup::subgroup_order(h) * subgroup::subgroup_order(&hp);
    if &product != group.order() {
        return Err(format!("|H| * |H-perp| = {product} != group order"));
    }
    // subset duality: H <= K iff K-perp <= H-perp
    let kp = subgroup::orthogonal(k);
    let h_in_k = h
        .generators()
        .iter()
        .all(|g| subgroup::member_decompose(g, k).unwrap().is_some());
    let kp_in_hp = kp
        .generators()
        .iter()
        .all(|g| subgroup::member_decompose(g, &hp).unwrap().is_some());
    if h_in_k != kp_in_hp {
        return Err("subset duality violated".into());
    }
    // (H intersect K)-perp = <H-perp, K-perp>
    let meet = subgroup::intersect(h, k).unwrap();
    let mut join_gens = hp.generators().to_vec();
    join_gens.extend_from_slice(kp.generators());
    let join = SubgroupGens::new(group.clone(), join_gens).unwrap();
    if !subgroup::subgroup_eq(&subgroup::orthogonal(&meet), &join).unwrap() {
        return Err("(H intersect K)-perp != <H-perp, K-perp>".into());
    }
    Ok(())
}

/// Suite: conjugation against the dense oracle, cycling the gate families.
pub fn suite_conjugation(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("conjugation-oracle");
    for case in 0..cases {
        let group = random_group(rng, max_order);
        let gate = random_gate(rng, &group, case);
        let p = random_pauli(rng, &group);
        report.record(check_conjugation(&gate, &p));
    }
    report
}

fn check_conjugation(gate: &GateEncoding, p: &PauliLabel) -> std::result::Result<(), String> {
    let got = gates::conjugate(gate, p).map_err(|e| e.to_string())?;
    let u = dense::gate_matrix(gate, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let sigma = dense::pauli_matrix(p, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let expect = dense::mat_mul(&dense::mat_mul(&u, &sigma), &dense::mat_adjoint(&u));
    let got_dense = dense::pauli_matrix(&got, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let diff = dense::mat_max_diff(&expect, &got_dense);
    if diff > 1e-9 {
        return Err(format!("dense mismatch {diff} for gate {gate:?}"));
    }
    Ok(())
}

/// Suite: structure test and uniqueness against dense projectors.
pub fn suite_structure(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("structure-uniqueness");
    for _ in 0..cases {
        let group = random_group(rng, max_order);
        let s = random_stabilizer_code(rng, &group);
        report.record(check_structure(&group, &s));
    }
    report
}

fn check_structure(group: &Group, s: &StabilizerGroup) -> std::result::Result<(), String> {
    let info = s.structure_test().map_err(|e| e.to_string())?;
    let proj = dense::stabilizer_projector(s, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let rank = dense::projector_rank(&proj);
    if BigUint::from(rank) != info.dim {
        return Err(format!("dim {} != dense rank {rank}", info.dim));
    }
    // dim * |S| = group order
    let order = s.order();
    if &info.dim * &order != *group.order() {
        return Err("dim * |S| != group order".into());
    }
    // support sets agree
    for (idx, g) in group.iter_elements().enumerate() {
        let exact_in = subgroup::member_decompose(
            &g.sub(&info.representative).unwrap(),
            &info.kernel,
        )
        .unwrap()
        .is_some();
        let dense_in = proj[idx][idx].0 > 1e-9;
        if exact_in != dense_in {
            return Err(format!("support mismatch at index {idx}"));
        }
    }
    // uniqueness test agrees with the rank
    let unique = s.is_unique().map_err(|e| e.to_string())?;
    if unique != (rank == 1) {
        return Err("uniqueness test disagrees with projector rank".into());
    }
    Ok(())
}

/// Suite: measurement distributions and post-states against the dense
/// oracle.
pub fn suite_measurement(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("measurement-oracle");
    for _ in 0..cases {
        let group = random_group(rng, max_order);
        let s = random_stabilizer_state(rng, &group);
        let p = random_pauli(rng, &group);
        report.record(check_measurement(&group, &s, &p));
    }
    report
}

fn check_measurement(
    group: &Group,
    s: &StabilizerGroup,
    p: &PauliLabel,
) -> std::result::Result<(), String> {
    let dist = measure::outcome_distribution(s, p).map_err(|e| e.to_string())?;
    // dense reference state and outcome norms
    let proj = dense::stabilizer_projector(s, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let state = dense::projector_state(&proj, group).ok_or("projector has no range")?;
    let meas = dense::measure_outcomes(&state, p).map_err(|e| e.to_string())?;
    let mut dense_probs: std::collections::BTreeMap<BigUint, f64> =
        std::collections::BTreeMap::new();
    for (k, prob, _) in &meas.outcomes {
        if *prob > 1e-12 {
            dense_probs.insert(k.clone(), *prob);
        }
    }
    for (k, f) in &dist.entries {
        let expect = dense_probs.remove(k).ok_or_else(|| {
            format!("outcome {k} predicted but has zero dense probability")
        })?;
        if (f.to_f64() - expect).abs() > 1e-9 {
            return Err(format!("probability mismatch at outcome {k}"));
        }
    }
    if let Some((k, _)) = dense_probs.into_iter().next() {
        return Err(format!("dense outcome {k} missing from the distribution"));
    }
    // forced post-state matches the dense projection up to global phase
    let outcome = dist.entries.keys().next().unwrap().clone();
    let (_, post) = measure::measure_forced(s, p, &outcome).map_err(|e| e.to_string())?;
    if !post.is_unique().map_err(|e| e.to_string())? {
        return Err("post-measurement stabilizer is not unique".into());
    }
    let nf = post.normal_form().map_err(|e| e.to_string())?;
    let mut rng = rand::rngs::mock::StepRng::new(0, 1);
    let (_, dense_post) =
        dense::measure_dense(&state, p, Some(&outcome), &mut rng).map_err(|e| e.to_string())?;
    if !dense::compare_state(&nf, &dense_post, 1e-8).map_err(|e| e.to_string())? {
        return Err("post-measurement state mismatch".into());
    }
    Ok(())
}

/// Suite: normal-form amplitudes against the dense stabilized state.
pub fn suite_normal_form(rng: &mut ChaCha8Rng, cases: usize, max_order: u64) -> SuiteReport {
    let mut report = SuiteReport::new("normal-form-amplitudes");
    for _ in 0..cases {
        let group = random_group(rng, max_order);
        let s = random_stabilizer_state(rng, &group);
        report.record(check_normal_form(&group, &s));
    }
    report
}

fn check_normal_form(group: &Group, s: &StabilizerGroup) -> std::result::Result<(), String> {
    let nf = s.normal_form().map_err(|e| e.to_string())?;
    let proj = dense::stabilizer_projector(s, dense::DEFAULT_CAP).map_err(|e| e.to_string())?;
    if dense::projector_rank(&proj) != 1 {
        return Err("state suite produced a non-unique stabilizer".into());
    }
    let state = dense::projector_state(&proj, group).ok_or("projector has no range")?;
    if !dense::compare_state(&nf, &state, 1e-8).map_err(|e| e.to_string())? {
        return Err("amplitudes differ from the dense stabilized state".into());
    }
    Ok(())
}

/// Runs every suite with a shared seed; `scale` multiplies the case counts.
pub fn run_all(seed: u64, max_order: u64, scale: usize) -> Vec<SuiteReport> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        suite_solver(&mut rng, 50 * scale, max_order.min(64)),
        suite_orthogonality(&mut rng, 20 * scale, max_order.min(64)),
        suite_conjugation(&mut rng, 50 * scale, max_order),
        suite_structure(&mut rng, 30 * scale, max_order),
        suite_measurement(&mut rng, 30 * scale, max_order),
        suite_normal_form(&mut rng, 30 * scale, max_order),
    ]
}
