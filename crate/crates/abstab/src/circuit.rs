//! Adaptive normalizer circuit programs: construction, validation,
//! seed-deterministic execution with transcripts, exact conditional
//! distributions, and the deterministic coset-state preparation protocol.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{self, GateEncoding};
use crate::group::{Group, GroupElement};
use crate::measure::{self, Fraction, OutcomeDistribution};
use crate::pauli::PauliLabel;
use crate::solver::{self, HomMatrix};
use crate::stabilizer::{initial_state_stabilizer, NormalFormState, StabilizerGroup};
use crate::subgroup::SubgroupGens;

/// Equality guard on a previously measured outcome exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub register: String,
    pub equals: BigUint,
}

/// One program step.
#[derive(Debug, Clone)]
pub enum Step {
    /// Apply a gate, optionally only when the condition holds.
    Gate {
        gate: GateEncoding,
        condition: Option<Condition>,
    },
    /// Measure a Pauli operator into a named register.
    Measure { pauli: PauliLabel, register: String },
    /// Solve `omega(g') = b` from the standard-basis outcomes recorded in
    /// `registers` (one per row of `omega`) and apply the correcting Pauli
    /// `X(target - g')` on the leading factors. With `reset` set, the
    /// measured ancilla factors are shifted back to zero as well.
    CosetCorrect {
        omega: HomMatrix,
        target: GroupElement,
        registers: Vec<String>,
        reset: bool,
    },
}

/// A program: group, standard-basis input, and steps. Register names must be
/// unique, and conditions and corrections may only reference earlier
/// registers.
#[derive(Debug, Clone)]
pub struct CircuitProgram {
    group: Group,
    input: GroupElement,
    steps: Vec<Step>,
}

impl CircuitProgram {
    pub fn new(group: Group, input: GroupElement, steps: Vec<Step>) -> Result<Self> {
        if input.group() != &group {
            return Err(Error::GroupMismatch);
        }
        let mut seen: Vec<&str> = Vec::new();
        for step in &steps {
            match step {
                Step::Gate { gate, condition } => {
                    if gate.group() != &group {
                        return Err(Error::GroupMismatch);
                    }
                    if let Some(c) = condition {
                        if !seen.contains(&c.register.as_str()) {
                            return Err(Error::UnknownRegister(c.register.clone()));
                        }
                    }
                }
                Step::Measure { pauli, register } => {
                    if pauli.group() != &group {
                        return Err(Error::GroupMismatch);
                    }
                    if seen.contains(&register.as_str()) {
                        return Err(Error::DuplicateRegister(register.clone()));
                    }
                    seen.push(register);
                }
                Step::CosetCorrect {
                    omega,
                    target,
                    registers,
                    ..
                } => {
                    if target.group() != omega.domain() {
                        return Err(Error::GroupMismatch);
                    }
                    if omega.domain().rank() > group.rank()
                        || omega.domain().moduli()
                            != &group.moduli()[..omega.domain().rank()]
                    {
                        return Err(Error::GroupMismatch);
                    }
                    if registers.len() != omega.codomain().rank() {
                        return Err(Error::LengthMismatch(
                            registers.len(),
                            omega.codomain().rank(),
                        ));
                    }
                    for r in registers {
                        if !seen.contains(&r.as_str()) {
                            return Err(Error::UnknownRegister(r.clone()));
                        }
                    }
                }
            }
        }
        Ok(CircuitProgram {
            group,
            input,
            steps,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn input(&self) -> &GroupElement {
        &self.input
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Registers in measurement order.
    pub fn registers(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Measure { register, .. } => Some(register.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// One measurement record of a run.
#[derive(Debug, Clone)]
pub struct TranscriptRecord {
    pub register: String,
    pub exponent: BigUint,
    pub probability: Fraction,
}

/// Everything a run produced: per-measurement records, the final normal
/// form, and the seed that reproduces it.
#[derive(Debug, Clone)]
pub struct RunTranscript {
    pub seed: u64,
    pub records: Vec<TranscriptRecord>,
    pub final_state: NormalFormState,
}

/// The factor index a register's measurement reads out, when that
/// measurement was of the form `Z(e_t)`; used to convert eigenvalue
/// exponents back to standard-basis values.
fn standard_basis_value(
    group: &Group,
    pauli: &PauliLabel,
    exponent: &BigUint,
    register: &str,
) -> Result<BigUint> {
    if !pauli.x_part().is_zero() || !pauli.phase().is_zero() {
        return Err(Error::NotABasisOutcome(register.to_string()));
    }
    // for Z(e_t): eigenvalue gamma^k = chi_{e_t}(x), so
    // x(t) = k * d_t / (2 * order)
    let z = pauli.z_part();
    let mut factor = None;
    for i in 0..group.rank() {
        if z.residue(i).is_zero() {
            continue;
        }
        if factor.is_some() || !z.residue(i).is_one() {
            return Err(Error::NotABasisOutcome(register.to_string()));
        }
        factor = Some(i);
    }
    let Some(t) = factor else {
        return Err(Error::NotABasisOutcome(register.to_string()));
    };
    let num = exponent * group.modulus(t);
    let den = group.double_order();
    if !(&num % den).is_zero() {
        return Err(Error::NotABasisOutcome(register.to_string()));
    }
    Ok((num / den) % group.modulus(t))
}

struct Executor<'p> {
    program: &'p CircuitProgram,
    state: StabilizerGroup,
    outcomes: BTreeMap<String, BigUint>,
    records: Vec<TranscriptRecord>,
}

impl<'p> Executor<'p> {
    fn new(program: &'p CircuitProgram) -> Result<Self> {
        let state = initial_state_stabilizer(program.group(), program.input())?;
        Ok(Executor {
            program,
            state,
            outcomes: BTreeMap::new(),
            records: Vec::new(),
        })
    }

    fn condition_holds(&self, condition: &Option<Condition>) -> Result<bool> {
        match condition {
            None => Ok(true),
            Some(c) => {
                let got = self
                    .outcomes
                    .get(&c.register)
                    .ok_or_else(|| Error::UnknownRegister(c.register.clone()))?;
                Ok(*got == &c.equals % self.program.group().double_order())
            }
        }
    }

    fn apply_gate(&mut self, gate: &GateEncoding) -> Result<()> {
        self.state = self.state.conjugated(gate)?;
        Ok(())
    }

    fn record(&mut self, register: &str, rec: measure::MeasurementRecord) {
        self.outcomes
            .insert(register.to_string(), rec.exponent.clone());
        self.records.push(TranscriptRecord {
            register: register.to_string(),
            exponent: rec.exponent,
            probability: rec.probability,
        });
    }

    fn coset_correct(
        &mut self,
        omega: &HomMatrix,
        target: &GroupElement,
        registers: &[String],
        reset: bool,
    ) -> Result<()> {
        let group = self.program.group();
        // collect the standard-basis outcome vector b
        let mut b = Vec::with_capacity(registers.len());
        let mut measured_factors = Vec::new();
        for (row, reg) in registers.iter().enumerate() {
            let exponent = self
                .outcomes
                .get(reg)
                .ok_or_else(|| Error::UnknownRegister(reg.clone()))?;
            let pauli = self
                .program
                .steps()
                .iter()
                .find_map(|s| match s {
                    Step::Measure { pauli, register } if register == reg => Some(pauli),
                    _ => None,
                })
                .ok_or_else(|| Error::UnknownRegister(reg.clone()))?;
            let value = standard_basis_value(group, pauli, exponent, reg)?;
            // remember which factor the register read out, for the reset
            for i in 0..group.rank() {
                if pauli.z_part().residue(i).is_one() {
                    measured_factors.push((i, value.clone()));
                }
            }
            b.push(&value % omega.codomain().modulus(row));
        }
        let b = omega.codomain().element(&b)?;
        let sol = solver::solve(omega, &b)?.ok_or(Error::CorrectionUnsolvable)?;
        let shift = target.sub(&sol.particular)?;
        // embed the correction X(target - g') into the program group
        let mut residues = shift.residues().to_vec();
        residues.resize(group.rank(), BigUint::zero());
        if reset {
            for (i, value) in &measured_factors {
                if !value.is_zero() {
                    residues[*i] = group.modulus(*i) - value;
                }
            }
        }
        let correction = PauliLabel::x(group.element(&residues)?);
        self.apply_gate(&gates::pauli_gate(correction))
    }
}

/// Runs a program with the given seed, producing a transcript. Identical
/// program and seed give byte-identical transcripts.
pub fn run(program: &CircuitProgram, seed: u64) -> Result<RunTranscript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exec = Executor::new(program)?;
    for step in program.steps() {
        match step {
            Step::Gate { gate, condition } => {
                if exec.condition_holds(condition)? {
                    exec.apply_gate(gate)?;
                }
            }
            Step::Measure { pauli, register } => {
                let (rec, post) = measure::measure_sample(&exec.state, pauli, &mut rng)?;
                exec.state = post;
                exec.record(register, rec);
            }
            Step::CosetCorrect {
                omega,
                target,
                registers,
                reset,
            } => exec.coset_correct(omega, target, registers, *reset)?,
        }
    }
    let final_state = exec.state.normal_form()?;
    Ok(RunTranscript {
        seed,
        records: exec.records,
        final_state,
    })
}

/// Derives the per-shot seed for shot `i` of a batch (splitmix64 step).
pub fn shot_seed(base: u64, shot: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(shot.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Replays the program once per shot with derived seeds, sequentially.
pub fn run_shots_sequential(
    program: &CircuitProgram,
    base_seed: u64,
    shots: u64,
) -> Result<Vec<RunTranscript>> {
    (0..shots)
        .map(|i| run(program, shot_seed(base_seed, i)))
        .collect()
}

/// Replays the program once per shot with derived seeds. Shots are
/// independent, so they run data-parallel when the `parallel` feature is
/// enabled; the transcript order and content match the sequential path
/// exactly.
#[cfg(feature = "parallel")]
pub fn run_shots(
    program: &CircuitProgram,
    base_seed: u64,
    shots: u64,
) -> Result<Vec<RunTranscript>> {
    use rayon::prelude::*;
    (0..shots)
        .into_par_iter()
        .map(|i| run(program, shot_seed(base_seed, i)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_shots(
    program: &CircuitProgram,
    base_seed: u64,
    shots: u64,
) -> Result<Vec<RunTranscript>> {
    run_shots_sequential(program, base_seed, shots)
}

/// Exact conditional distribution of the named register's measurement.
///
/// Steps before it are replayed; measurements with supplied outcomes are
/// forced, and unsupplied ones must be deterministic (point mass), otherwise
/// the prefix is indeterminate.
pub fn exact_distribution(
    program: &CircuitProgram,
    register: &str,
    given: &BTreeMap<String, BigUint>,
) -> Result<OutcomeDistribution> {
    let mut exec = Executor::new(program)?;
    for step in program.steps() {
        match step {
            Step::Gate { gate, condition } => {
                if exec.condition_holds(condition)? {
                    exec.apply_gate(gate)?;
                }
            }
            Step::Measure {
                pauli,
                register: reg,
            } => {
                if reg == register {
                    return measure::outcome_distribution(&exec.state, pauli);
                }
                let (rec, post) = match given.get(reg) {
                    Some(outcome) => measure::measure_forced(&exec.state, pauli, outcome)?,
                    None => {
                        let dist = measure::outcome_distribution(&exec.state, pauli)?;
                        if dist.entries.len() != 1 {
                            return Err(Error::IndeterminatePrefix(reg.clone()));
                        }
                        let outcome = dist.entries.keys().next().unwrap().clone();
                        measure::measure_forced(&exec.state, pauli, &outcome)?
                    }
                };
                exec.state = post;
                exec.record(reg, rec);
            }
            Step::CosetCorrect {
                omega,
                target,
                registers,
                reset,
            } => exec.coset_correct(omega, target, registers, *reset)?,
        }
    }
    Err(Error::UnknownRegister(register.to_string()))
}

/// Builds the adaptive program preparing the coset state `|x + H>` over `G`
/// deterministically: enlarge the group with one `Z_order` ancilla factor
/// per row of the hiding homomorphism, Fourier-transform the `G` factors,
/// entangle via the automorphism `(g, h) -> (g, h + omega(g))`, measure the
/// ancillas in the standard basis, then solve for a preimage and apply the
/// correcting Pauli (resetting the ancillas to zero).
pub fn coset_prepare(
    group: &Group,
    h_gens: &SubgroupGens,
    x: &GroupElement,
) -> Result<CircuitProgram> {
    if h_gens.group() != group || x.group() != group {
        return Err(Error::GroupMismatch);
    }
    let omega = crate::subgroup::hiding_hom(h_gens);
    let s = omega.codomain().rank();
    let m = group.rank();
    let enlarged = group.product(omega.codomain());

    // automorphism matrix [[I, 0], [Omega, I]] over G x Z_order^s
    let mut rows = vec![vec![BigUint::zero(); m + s]; m + s];
    for i in 0..m {
        rows[i][i] = BigUint::one() % enlarged.modulus(i);
    }
    for i in 0..s {
        for j in 0..m {
            rows[m + i][j] = omega.entry(i, j).clone();
        }
        rows[m + i][m + i] = BigUint::one();
    }
    let entangle = gates::automorphism(&enlarged, &rows)?;

    let mut steps = vec![
        Step::Gate {
            gate: gates::partial_qft(&enlarged, &(0..m).collect::<Vec<_>>(), false)?,
            condition: None,
        },
        Step::Gate {
            gate: entangle,
            condition: None,
        },
    ];
    let mut registers = Vec::with_capacity(s);
    for i in 0..s {
        let name = format!("anc{i}");
        steps.push(Step::Measure {
            pauli: PauliLabel::z(enlarged.basis(m + i)),
            register: name.clone(),
        });
        registers.push(name);
    }
    steps.push(Step::CosetCorrect {
        omega,
        target: x.clone(),
        registers,
        reset: true,
    });
    CircuitProgram::new(enlarged.clone(), enlarged.zero(), steps)
}
