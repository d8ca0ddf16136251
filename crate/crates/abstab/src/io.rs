//! JSON encodings: circuit files, linear-system files, outcome records and
//! transcripts. All group-scale integers are decimal strings; factor indices
//! are plain JSON numbers. Parsing is strict: unknown fields are rejected.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitProgram, Condition, RunTranscript, Step};
use crate::error::{Error, Result};
use crate::gates::{self, GateEncoding};
use crate::group::{Group, GroupElement};
use crate::measure::OutcomeDistribution;
use crate::pauli::PauliLabel;
use crate::solver::HomMatrix;
use crate::stabilizer::NormalFormState;

pub const CIRCUIT_FORMAT: &str = "abstab-circuit/1";
pub const SOLVE_FORMAT: &str = "abstab-solve/1";

fn parse_uint(s: &str) -> Result<BigUint> {
    s.parse::<BigUint>()
        .map_err(|_| Error::Parse(format!("not a decimal integer: {s:?}")))
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("not a decimal integer: {s:?}")))
}

fn parse_group(moduli: &[String]) -> Result<Group> {
    let moduli = moduli
        .iter()
        .map(|s| parse_uint(s))
        .collect::<Result<Vec<_>>>()?;
    Group::new(moduli)
}

fn parse_element(group: &Group, residues: &[String]) -> Result<GroupElement> {
    let values = residues
        .iter()
        .map(|s| parse_int(s))
        .collect::<Result<Vec<_>>>()?;
    group.element_from_signed(&values)
}

pub fn element_strings(e: &GroupElement) -> Vec<String> {
    e.residues().iter().map(|r| r.to_string()).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliJson {
    pub a: String,
    pub g: Vec<String>,
    pub h: Vec<String>,
}

impl PauliJson {
    pub fn to_label(&self, group: &Group) -> Result<PauliLabel> {
        PauliLabel::new(
            group.phase(parse_int(&self.a)?),
            parse_element(group, &self.g)?,
            parse_element(group, &self.h)?,
        )
    }

    pub fn from_label(p: &PauliLabel) -> PauliJson {
        PauliJson {
            a: p.phase().value().to_string(),
            g: element_strings(p.z_part()),
            h: element_strings(p.x_part()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionJson {
    pub register: String,
    pub equals: String,
}

/// One step of a circuit file, tagged by `op`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", deny_unknown_fields)]
pub enum StepJson {
    #[serde(rename = "qft")]
    Qft {
        factors: Vec<usize>,
        inverse: bool,
        #[serde(rename = "if", skip_serializing_if = "Option::is_none")]
        condition: Option<ConditionJson>,
    },
    #[serde(rename = "automorphism")]
    Automorphism {
        matrix: Vec<Vec<String>>,
        #[serde(rename = "if", skip_serializing_if = "Option::is_none")]
        condition: Option<ConditionJson>,
    },
    #[serde(rename = "quadratic_phase")]
    QuadraticPhase {
        diag: Vec<String>,
        double: Vec<String>,
        pair: Vec<(usize, usize, String)>,
        #[serde(rename = "if", skip_serializing_if = "Option::is_none")]
        condition: Option<ConditionJson>,
    },
    #[serde(rename = "pauli")]
    Pauli {
        a: String,
        g: Vec<String>,
        h: Vec<String>,
        #[serde(rename = "if", skip_serializing_if = "Option::is_none")]
        condition: Option<ConditionJson>,
    },
    #[serde(rename = "measure")]
    Measure { pauli: PauliJson, register: String },
    #[serde(rename = "coset_correct")]
    CosetCorrect {
        matrix: Vec<Vec<String>>,
        codomain: Vec<String>,
        x: Vec<String>,
        registers: Vec<String>,
        #[serde(default)]
        reset: bool,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub format: String,
    pub group: Vec<String>,
    pub input: Vec<String>,
    pub steps: Vec<StepJson>,
}

fn parse_condition(c: &Option<ConditionJson>, group: &Group) -> Result<Option<Condition>> {
    match c {
        None => Ok(None),
        Some(c) => Ok(Some(Condition {
            register: c.register.clone(),
            equals: parse_uint(&c.equals)? % group.double_order(),
        })),
    }
}

fn parse_matrix(rows: &[Vec<String>]) -> Result<Vec<Vec<BigUint>>> {
    rows.iter()
        .map(|row| row.iter().map(|v| parse_uint(v)).collect())
        .collect()
}

pub fn parse_circuit(text: &str) -> Result<CircuitProgram> {
    let json: CircuitJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if json.format != CIRCUIT_FORMAT {
        return Err(Error::Parse(format!(
            "unsupported format {:?}, expected {CIRCUIT_FORMAT:?}",
            json.format
        )));
    }
    let group = parse_group(&json.group)?;
    let input = parse_element(&group, &json.input)?;
    let mut steps = Vec::with_capacity(json.steps.len());
    for step in &json.steps {
        steps.push(match step {
            StepJson::Qft {
                factors,
                inverse,
                condition,
            } => Step::Gate {
                gate: gates::partial_qft(&group, factors, *inverse)?,
                condition: parse_condition(condition, &group)?,
            },
            StepJson::Automorphism { matrix, condition } => Step::Gate {
                gate: gates::automorphism(&group, &parse_matrix(matrix)?)?,
                condition: parse_condition(condition, &group)?,
            },
            StepJson::QuadraticPhase {
                diag,
                double,
                pair,
                condition,
            } => {
                let diag = diag.iter().map(|v| parse_uint(v)).collect::<Result<_>>()?;
                let double = double
                    .iter()
                    .map(|v| parse_uint(v))
                    .collect::<Result<_>>()?;
                let mut table = BTreeMap::new();
                for (i, j, v) in pair {
                    table.insert((*i, *j), parse_uint(v)?);
                }
                Step::Gate {
                    gate: gates::quadratic_phase(&group, diag, double, table)?,
                    condition: parse_condition(condition, &group)?,
                }
            }
            StepJson::Pauli {
                a,
                g,
                h,
                condition,
            } => Step::Gate {
                gate: gates::pauli_gate(PauliLabel::new(
                    group.phase(parse_int(a)?),
                    parse_element(&group, g)?,
                    parse_element(&group, h)?,
                )?),
                condition: parse_condition(condition, &group)?,
            },
            StepJson::Measure { pauli, register } => Step::Measure {
                pauli: pauli.to_label(&group)?,
                register: register.clone(),
            },
            StepJson::CosetCorrect {
                matrix,
                codomain,
                x,
                registers,
                reset,
            } => {
                let codomain = parse_group(codomain)?;
                let rows = parse_matrix(matrix)?;
                let cols = rows.first().map_or(0, |r| r.len());
                if cols > group.rank() {
                    return Err(Error::Parse(
                        "correction matrix wider than the group".into(),
                    ));
                }
                let domain = Group::new(group.moduli()[..cols].to_vec())?;
                let omega = HomMatrix::new(domain.clone(), codomain, &rows)?;
                Step::CosetCorrect {
                    omega,
                    target: parse_element(&domain, x)?,
                    registers: registers.clone(),
                    reset: *reset,
                }
            }
        });
    }
    CircuitProgram::new(group, input, steps)
}

pub fn circuit_to_json(program: &CircuitProgram) -> CircuitJson {
    let group = program.group();
    let steps = program
        .steps()
        .iter()
        .map(|step| match step {
            Step::Gate { gate, condition } => {
                let condition = condition.as_ref().map(|c| ConditionJson {
                    register: c.register.clone(),
                    equals: c.equals.to_string(),
                });
                match gate {
                    GateEncoding::PartialQft {
                        factors, inverse, ..
                    } => StepJson::Qft {
                        factors: factors.iter().copied().collect(),
                        inverse: *inverse,
                        condition,
                    },
                    GateEncoding::Automorphism(a) => StepJson::Automorphism {
                        matrix: a
                            .matrix()
                            .rows()
                            .iter()
                            .map(|row| row.iter().map(|v| v.to_string()).collect())
                            .collect(),
                        condition,
                    },
                    GateEncoding::QuadraticPhase(qf) => StepJson::QuadraticPhase {
                        diag: qf.diag().iter().map(|v| v.to_string()).collect(),
                        double: qf.double().iter().map(|v| v.to_string()).collect(),
                        pair: qf
                            .pair()
                            .iter()
                            .map(|(&(i, j), v)| (i, j, v.to_string()))
                            .collect(),
                        condition,
                    },
                    GateEncoding::Pauli(p) => StepJson::Pauli {
                        a: p.phase().value().to_string(),
                        g: element_strings(p.z_part()),
                        h: element_strings(p.x_part()),
                        condition,
                    },
                }
            }
            Step::Measure { pauli, register } => StepJson::Measure {
                pauli: PauliJson::from_label(pauli),
                register: register.clone(),
            },
            Step::CosetCorrect {
                omega,
                target,
                registers,
                reset,
            } => StepJson::CosetCorrect {
                matrix: omega
                    .rows()
                    .iter()
                    .map(|row| row.iter().map(|v| v.to_string()).collect())
                    .collect(),
                codomain: omega
                    .codomain()
                    .moduli()
                    .iter()
                    .map(|d| d.to_string())
                    .collect(),
                x: element_strings(target),
                registers: registers.clone(),
                reset: *reset,
            },
        })
        .collect();
    CircuitJson {
        format: CIRCUIT_FORMAT.to_string(),
        group: group.moduli().iter().map(|d| d.to_string()).collect(),
        input: element_strings(program.input()),
        steps,
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveJson {
    pub format: String,
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub b: Vec<String>,
}

/// Parses a linear-system file into `(A, b)`.
pub fn parse_solve(text: &str) -> Result<(HomMatrix, GroupElement)> {
    let json: SolveJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if json.format != SOLVE_FORMAT {
        return Err(Error::Parse(format!(
            "unsupported format {:?}, expected {SOLVE_FORMAT:?}",
            json.format
        )));
    }
    let domain = parse_group(&json.domain)?;
    let codomain = parse_group(&json.codomain)?;
    let a = HomMatrix::new(domain, codomain.clone(), &parse_matrix(&json.matrix)?)?;
    let b = parse_element(&codomain, &json.b)?;
    Ok((a, b))
}

/// Serialized outcome record `{k, prob_num, prob_den}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub k: String,
    pub prob_num: String,
    pub prob_den: String,
}

#[derive(Debug, Serialize)]
pub struct RecordJson {
    pub register: String,
    pub k: String,
    pub prob_num: String,
    pub prob_den: String,
}

#[derive(Debug, Serialize)]
pub struct NormalFormJson {
    pub group: Vec<String>,
    pub offset: Vec<String>,
    pub h_gens: Vec<Vec<String>>,
    pub order: String,
    pub witnesses: Vec<PauliJson>,
}

impl NormalFormJson {
    pub fn from_state(nf: &NormalFormState) -> NormalFormJson {
        NormalFormJson {
            group: nf.group().moduli().iter().map(|d| d.to_string()).collect(),
            offset: element_strings(nf.offset()),
            h_gens: nf
                .h_gens()
                .generators()
                .iter()
                .map(element_strings)
                .collect(),
            order: nf.order().to_string(),
            witnesses: nf.witnesses().iter().map(PauliJson::from_label).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TranscriptJson {
    pub seed: u64,
    pub records: Vec<RecordJson>,
    pub final_state: NormalFormJson,
}

impl TranscriptJson {
    pub fn from_transcript(t: &RunTranscript) -> TranscriptJson {
        TranscriptJson {
            seed: t.seed,
            records: t
                .records
                .iter()
                .map(|r| RecordJson {
                    register: r.register.clone(),
                    k: r.exponent.to_string(),
                    prob_num: r.probability.num.to_string(),
                    prob_den: r.probability.den.to_string(),
                })
                .collect(),
            final_state: NormalFormJson::from_state(&t.final_state),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DistributionJson {
    pub register: String,
    pub omega_modulus: String,
    pub entries: Vec<DistributionEntryJson>,
}

#[derive(Debug, Serialize)]
pub struct DistributionEntryJson {
    pub k: String,
    pub omega: String,
    pub prob_num: String,
    pub prob_den: String,
}

impl DistributionJson {
    pub fn from_distribution(register: &str, dist: &OutcomeDistribution) -> DistributionJson {
        DistributionJson {
            register: register.to_string(),
            omega_modulus: dist.omega_modulus.to_string(),
            entries: dist
                .entries
                .iter()
                .map(|(k, f)| DistributionEntryJson {
                    k: k.to_string(),
                    omega: dist
                        .omega_labels
                        .get(k)
                        .map(|y| y.to_string())
                        .unwrap_or_default(),
                    prob_num: f.num.to_string(),
                    prob_den: f.den.to_string(),
                })
                .collect(),
        }
    }
}
