//! Brute-force state-vector reference implementation for small groups.
//!
//! The arbiter for every oracle-equivalence test: gates are applied to an
//! explicit complex amplitude vector indexed by group elements in
//! mixed-radix order. Phases inside the oracle are floats, but eigenvalue
//! identification always goes through exact integer exponents computed from
//! labels; float comparisons never decide outcome identity.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::GateEncoding;
use crate::group::{character_exponent, Group, GroupElement};
use crate::pauli::PauliLabel;
use crate::stabilizer::{NormalFormState, StabilizerGroup};

/// Default group-order cap; tests use 64 for exhaustive suites and raise it
/// for spot checks.
pub const DEFAULT_CAP: u64 = 4096;

pub type Complex = (f64, f64);

fn c_add(a: Complex, b: Complex) -> Complex {
    (a.0 + b.0, a.1 + b.1)
}

fn c_mul(a: Complex, b: Complex) -> Complex {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn c_conj(a: Complex) -> Complex {
    (a.0, -a.1)
}

fn c_norm2(a: Complex) -> f64 {
    a.0 * a.0 + a.1 * a.1
}

fn c_scale(s: f64, a: Complex) -> Complex {
    (s * a.0, s * a.1)
}

/// Dense state vector over a small group.
#[derive(Debug, Clone)]
pub struct DenseState {
    group: Group,
    pub amplitudes: Vec<Complex>,
}

fn order_as_usize(group: &Group, cap: u64) -> Result<usize> {
    match group.order().to_u64() {
        Some(n) if n <= cap => Ok(n as usize),
        _ => Err(Error::DenseCapExceeded {
            order: group.order().to_string(),
            cap,
        }),
    }
}

/// `gamma^k` as a complex number, `gamma = exp(i pi / order)`.
fn gamma_power(group: &Group, k: &BigUint) -> Complex {
    let two_g = group.double_order();
    let k = (k % two_g).to_f64().expect("reduced exponent fits");
    let order = group.order().to_f64().expect("small group");
    let theta = std::f64::consts::PI * k / order;
    (theta.cos(), theta.sin())
}

impl DenseState {
    /// Basis state `|g>`.
    pub fn basis_state(g: &GroupElement, cap: u64) -> Result<DenseState> {
        let group = g.group().clone();
        let n = order_as_usize(&group, cap)?;
        let mut amplitudes = vec![(0.0, 0.0); n];
        let idx = group.index_of(g).to_usize().expect("within cap");
        amplitudes[idx] = (1.0, 0.0);
        Ok(DenseState { group, amplitudes })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|&a| c_norm2(a)).sum::<f64>().sqrt()
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a = c_scale(1.0 / n, *a);
            }
        }
    }

    /// Applies a normalizer gate or Pauli gate to the state.
    pub fn apply_gate(&self, gate: &GateEncoding) -> Result<DenseState> {
        if gate.group() != &self.group {
            return Err(Error::GroupMismatch);
        }
        let group = self.group.clone();
        let n = self.amplitudes.len();
        let amplitudes = match gate {
            GateEncoding::PartialQft {
                factors, inverse, ..
            } => {
                let mut amps = self.amplitudes.clone();
                for &f in factors {
                    amps = qft_factor(&group, &amps, f, *inverse);
                }
                amps
            }
            GateEncoding::Automorphism(a) => {
                let mut amps = vec![(0.0, 0.0); n];
                for (idx, g) in group.iter_elements().enumerate() {
                    let image = a.matrix().apply(&g)?;
                    let target = group.index_of(&image).to_usize().expect("cap");
                    amps[target] = self.amplitudes[idx];
                }
                amps
            }
            GateEncoding::QuadraticPhase(qf) => {
                let mut amps = self.amplitudes.clone();
                for (idx, g) in group.iter_elements().enumerate() {
                    let phase = gamma_power(&group, qf.eval(&g)?.value());
                    amps[idx] = c_mul(amps[idx], phase);
                }
                amps
            }
            GateEncoding::Pauli(p) => {
                let mut amps = vec![(0.0, 0.0); n];
                for (idx, g) in group.iter_elements().enumerate() {
                    let (target, phase) = pauli_action(p, &g)?;
                    let t = group.index_of(&target).to_usize().expect("cap");
                    amps[t] = c_mul(self.amplitudes[idx], phase);
                }
                amps
            }
        };
        Ok(DenseState { group, amplitudes })
    }
}

/// `sigma(a,g,h)|x> = gamma^a chi_g(x+h) |x+h>`: the image index and the
/// scalar, with the exponent computed exactly before conversion.
fn pauli_action(p: &PauliLabel, x: &GroupElement) -> Result<(GroupElement, Complex)> {
    let group = p.group();
    let shifted = x.add(p.x_part())?;
    let chi = character_exponent(p.z_part(), &shifted)?;
    let exponent = (p.phase().value() + chi * 2u32) % group.double_order();
    Ok((shifted, gamma_power(group, &exponent)))
}

fn qft_factor(group: &Group, amps: &[Complex], factor: usize, inverse: bool) -> Vec<Complex> {
    let d = group.modulus(factor).to_u64().expect("small group") as usize;
    let n = amps.len();
    // stride of the factor coordinate in mixed-radix order
    let mut stride = 1usize;
    for i in (factor + 1)..group.rank() {
        stride *= group.modulus(i).to_u64().expect("small group") as usize;
    }
    let block = stride * d;
    let scale = 1.0 / (d as f64).sqrt();
    let sign = if inverse { -1.0 } else { 1.0 };
    let mut out = vec![(0.0, 0.0); n];
    for base in (0..n).step_by(block) {
        for offset in 0..stride {
            for xi in 0..d {
                let mut acc = (0.0, 0.0);
                for yi in 0..d {
                    let theta = sign * 2.0 * std::f64::consts::PI * (xi as f64) * (yi as f64)
                        / d as f64;
                    let w = (theta.cos(), theta.sin());
                    acc = c_add(acc, c_mul(w, amps[base + offset + yi * stride]));
                }
                out[base + offset + xi * stride] = c_scale(scale, acc);
            }
        }
    }
    out
}

/// Dense unitary matrix of a gate, built by applying it to each basis state.
pub fn gate_matrix(gate: &GateEncoding, cap: u64) -> Result<Vec<Vec<Complex>>> {
    let group = gate.group().clone();
    let n = order_as_usize(&group, cap)?;
    let mut cols = Vec::with_capacity(n);
    for g in group.iter_elements() {
        let state = DenseState::basis_state(&g, cap)?.apply_gate(gate)?;
        cols.push(state.amplitudes);
    }
    let mut mat = vec![vec![(0.0, 0.0); n]; n];
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            mat[r][c] = v;
        }
    }
    Ok(mat)
}

/// Dense matrix of a Pauli operator from its label.
pub fn pauli_matrix(p: &PauliLabel, cap: u64) -> Result<Vec<Vec<Complex>>> {
    let group = p.group().clone();
    let n = order_as_usize(&group, cap)?;
    let mut mat = vec![vec![(0.0, 0.0); n]; n];
    for (c, g) in group.iter_elements().enumerate() {
        let (target, phase) = pauli_action(p, &g)?;
        let r = group.index_of(&target).to_usize().expect("cap");
        mat[r][c] = phase;
    }
    Ok(mat)
}

pub fn mat_mul(a: &[Vec<Complex>], b: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    let n = a.len();
    let mut out = vec![vec![(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.0 == 0.0 && aik.1 == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = c_add(out[i][j], c_mul(aik, b[k][j]));
            }
        }
    }
    out
}

pub fn mat_adjoint(a: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    let n = a.len();
    let mut out = vec![vec![(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[j][i] = c_conj(a[i][j]);
        }
    }
    out
}

pub fn mat_max_diff(a: &[Vec<Complex>], b: &[Vec<Complex>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (&va, &vb) in ra.iter().zip(rb) {
            let d = ((va.0 - vb.0).powi(2) + (va.1 - vb.1).powi(2)).sqrt();
            worst = worst.max(d);
        }
    }
    worst
}

/// Exact eigenvalue exponents with probabilities and unnormalized projected
/// states, computed orbit by orbit of the shift `x -> x + h` on which the
/// operator acts as a phased cyclic permutation.
pub struct DenseMeasurement {
    pub outcomes: Vec<(BigUint, f64, DenseState)>,
}

pub fn measure_outcomes(state: &DenseState, p: &PauliLabel) -> Result<DenseMeasurement> {
    if p.group() != state.group() {
        return Err(Error::GroupMismatch);
    }
    let group = state.group().clone();
    let n = state.amplitudes.len();
    let two_g = group.double_order();

    // decompose the basis into orbits of x -> x + h
    let mut visited = vec![false; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let elements: Vec<GroupElement> = group.iter_elements().collect();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            orbit.push(cur);
            let next = elements[cur].add(p.x_part())?;
            cur = group.index_of(&next).to_usize().expect("cap");
            if cur == start {
                break;
            }
        }
        orbits.push(orbit);
    }

    // per orbit: sigma maps |x_j> -> gamma^{e_j} |x_{j+1}>; its eigenvalues
    // there are the gamma^k with k*L = sum e_j (mod 2*order)
    let mut accum: std::collections::BTreeMap<BigUint, Vec<Complex>> =
        std::collections::BTreeMap::new();
    for orbit in &orbits {
        let len = orbit.len();
        let exps: Vec<BigUint> = orbit
            .iter()
            .map(|&idx| {
                let x = &elements[idx];
                let shifted = x.add(p.x_part()).expect("same group");
                let chi = character_exponent(p.z_part(), &shifted).expect("same group");
                (p.phase().value() + chi * 2u32) % two_g
            })
            .collect();
        let total: BigUint = exps.iter().fold(BigUint::zero(), |acc, e| (acc + e) % two_g);
        // solve len * k = total (mod 2*order)
        let len_big = BigUint::from(len as u64);
        let g = crate::group::big_gcd(&len_big, two_g);
        if !(&total % &g).is_zero() {
            continue; // cannot happen for unitary operators
        }
        let m = two_g / &g;
        let inv = crate::group::mod_inverse(&((&len_big / &g) % &m), &m).expect("coprime");
        let k0 = ((&total / &g) * inv) % &m;
        for t in 0..g.to_u64().expect("small") {
            let k = (&k0 + &m * BigUint::from(t)) % two_g;
            // eigenvector on the orbit: c_{j+1} = gamma^{e_j - k} c_j
            let mut coeffs = vec![(0.0, 0.0); len];
            let mut cur = (1.0 / (len as f64).sqrt(), 0.0);
            for j in 0..len {
                coeffs[j] = cur;
                let step = (&exps[j] + two_g - &k) % two_g;
                cur = c_mul(cur, gamma_power(&group, &step));
            }
            let mut overlap = (0.0, 0.0);
            for (j, &idx) in orbit.iter().enumerate() {
                overlap = c_add(overlap, c_mul(c_conj(coeffs[j]), state.amplitudes[idx]));
            }
            let entry = accum.entry(k).or_insert_with(|| vec![(0.0, 0.0); n]);
            for (j, &idx) in orbit.iter().enumerate() {
                entry[idx] = c_add(entry[idx], c_mul(overlap, coeffs[j]));
            }
        }
    }

    let mut outcomes = Vec::new();
    for (k, amps) in accum {
        let state_k = DenseState {
            group: group.clone(),
            amplitudes: amps,
        };
        let prob = state_k.norm().powi(2);
        outcomes.push((k, prob, state_k));
    }
    Ok(DenseMeasurement { outcomes })
}

/// Samples or forces one measurement outcome, returning the exponent and the
/// renormalized post-measurement state.
pub fn measure_dense<R: Rng + ?Sized>(
    state: &DenseState,
    p: &PauliLabel,
    forced: Option<&BigUint>,
    rng: &mut R,
) -> Result<(BigUint, DenseState)> {
    let meas = measure_outcomes(state, p)?;
    let pick = match forced {
        Some(k) => {
            let target = k % state.group().double_order();
            meas.outcomes
                .into_iter()
                .find(|(kk, prob, _)| *kk == target && *prob > 1e-12)
                .ok_or(Error::ZeroProbabilityOutcome)?
        }
        None => {
            let mut roll: f64 = rng.gen::<f64>();
            let mut chosen = None;
            for out in meas.outcomes {
                if out.1 <= 1e-12 {
                    continue;
                }
                if roll < out.1 {
                    chosen = Some(out);
                    break;
                }
                roll -= out.1;
                chosen = Some(out); // guards against accumulated float error
            }
            chosen.ok_or(Error::ZeroProbabilityOutcome)?
        }
    };
    let (k, _, mut post) = pick;
    post.renormalize();
    Ok((k, post))
}

/// Enumerates every element of a stabilizer group by closure over products.
/// Small groups only.
pub fn enumerate_stabilizer(s: &StabilizerGroup) -> Vec<PauliLabel> {
    let group = s.group().clone();
    let mut seen = std::collections::BTreeSet::new();
    let mut out: Vec<PauliLabel> = Vec::new();
    let key = |p: &PauliLabel| {
        (
            p.phase().value().clone(),
            group.index_of(p.z_part()),
            group.index_of(p.x_part()),
        )
    };
    let mut frontier = vec![PauliLabel::identity(&group)];
    while let Some(p) = frontier.pop() {
        if !seen.insert(key(&p)) {
            continue;
        }
        for g in s.generators() {
            frontier.push(p.multiply(g).expect("same group"));
        }
        out.push(p);
    }
    out
}

/// The projector `(1/|S|) sum_{sigma in S} sigma` as a dense matrix.
pub fn stabilizer_projector(s: &StabilizerGroup, cap: u64) -> Result<Vec<Vec<Complex>>> {
    let group = s.group().clone();
    let n = order_as_usize(&group, cap)?;
    let elements = enumerate_stabilizer(s);
    let weight = 1.0 / elements.len() as f64;
    let mut mat = vec![vec![(0.0, 0.0); n]; n];
    for p in &elements {
        for (c, g) in group.iter_elements().enumerate() {
            let (target, phase) = pauli_action(p, &g)?;
            let r = group.index_of(&target).to_usize().expect("cap");
            mat[r][c] = c_add(mat[r][c], c_scale(weight, phase));
        }
    }
    Ok(mat)
}

/// Rank of a projector, read off its trace.
pub fn projector_rank(projector: &[Vec<Complex>]) -> u64 {
    let trace: f64 = projector.iter().enumerate().map(|(i, row)| row[i].0).sum();
    trace.round() as u64
}

/// The unique stabilized state of a rank-one projector: the first column
/// with positive norm, renormalized.
pub fn projector_state(projector: &[Vec<Complex>], group: &Group) -> Option<DenseState> {
    let n = projector.len();
    for c in 0..n {
        let col: Vec<Complex> = (0..n).map(|r| projector[r][c]).collect();
        let norm2: f64 = col.iter().map(|&v| c_norm2(v)).sum();
        if norm2 > 1e-9 {
            let scale = 1.0 / norm2.sqrt();
            return Some(DenseState {
                group: group.clone(),
                amplitudes: col.into_iter().map(|v| c_scale(scale, v)).collect(),
            });
        }
    }
    None
}

/// Compares a normal form against a dense state up to one global phase.
pub fn compare_state(nf: &NormalFormState, dense: &DenseState, tol: f64) -> Result<bool> {
    if nf.group() != dense.group() {
        return Err(Error::GroupMismatch);
    }
    let group = dense.group().clone();
    let mut reference: Option<Complex> = None; // dense = alpha * exact
    for (idx, g) in group.iter_elements().enumerate() {
        let exact = match nf.amplitude(&g)? {
            None => (0.0, 0.0),
            Some(amp) => {
                let mag = 1.0 / nf.order().to_f64().expect("small group").sqrt();
                c_scale(mag, gamma_power(&group, amp.value()))
            }
        };
        let got = dense.amplitudes[idx];
        match reference {
            None => {
                let en = c_norm2(exact).sqrt();
                let gn = c_norm2(got).sqrt();
                if (en - gn).abs() > tol {
                    return Ok(false);
                }
                if en > tol {
                    let denom = c_norm2(exact);
                    let alpha = c_scale(1.0 / denom, c_mul(got, c_conj(exact)));
                    reference = Some(alpha);
                }
            }
            Some(alpha) => {
                let expect = c_mul(alpha, exact);
                if ((expect.0 - got.0).powi(2) + (expect.1 - got.1).powi(2)).sqrt() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
