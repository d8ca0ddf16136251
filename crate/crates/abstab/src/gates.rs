//! Normalizer gate encodings and Pauli conjugation.
//!
//! A gate is one of: a partial quantum Fourier transform (a subset of the
//! cyclic factors, optionally inverted), an automorphism gate `|g> -> |a(g)>`
//! given by an invertible matrix representation, a quadratic phase gate
//! `|g> -> xi(g)|g>`, or a Pauli operator applied as a gate. Conjugation
//! `U sigma U^dagger` is computed exactly on labels in every case.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{character_exponent, Group, GroupElement, PhaseExponent};
use crate::pauli::PauliLabel;
use crate::solver::{self, HomMatrix};
use crate::subgroup;

/// Coefficient tables of a quadratic function `xi` with
/// `xi(g) = gamma^{n(g)}`: the exponents on the generators, on doubled
/// generators, and on generator pairs. Missing pair entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFunction {
    group: Group,
    diag: Vec<BigUint>,            // n(e_i) mod 2*order
    double: Vec<BigUint>,          // n(2*e_i) mod 2*order
    pair: BTreeMap<(usize, usize), BigUint>, // n(e_i + e_j), i < j
}

fn binom2(k: &BigUint) -> BigUint {
    if k.is_zero() {
        return BigUint::zero();
    }
    (k * (k - 1u32)) >> 1
}

impl QuadraticFunction {
    /// Validates raw coefficient tables: the derived exponent of
    /// `xi(d_i * e_i)` must vanish and the bilinear coefficients must be
    /// periodic in both arguments, which together make the quadratic
    /// relation hold on the whole group. The relation is re-checked on all
    /// pairs for small groups and on scaled generator pairs otherwise.
    pub fn new(
        group: Group,
        diag: Vec<BigUint>,
        double: Vec<BigUint>,
        pair: BTreeMap<(usize, usize), BigUint>,
    ) -> Result<Self> {
        let m = group.rank();
        if diag.len() != m || double.len() != m {
            return Err(Error::LengthMismatch(diag.len(), m));
        }
        let two_g = group.double_order().clone();
        for (&(i, j), _) in &pair {
            if i >= j || j >= m {
                return Err(Error::InconsistentQuadratic(format!(
                    "pair index ({i},{j}) out of range"
                )));
            }
        }
        let qf = QuadraticFunction {
            group: group.clone(),
            diag: diag.into_iter().map(|v| v % &two_g).collect(),
            double: double.into_iter().map(|v| v % &two_g).collect(),
            pair: pair
                .into_iter()
                .map(|(k, v)| (k, v % &two_g))
                .collect(),
        };
        // periodicity of the bilinear part: d_i * beta_ij = 0 (mod 2*order)
        for i in 0..m {
            for j in i..m {
                let beta = qf.beta(i, j);
                for idx in [i, j] {
                    if !((&beta * group.modulus(idx)) % &two_g).is_zero() {
                        return Err(Error::InconsistentQuadratic(format!(
                            "pair ({i},{j})"
                        )));
                    }
                }
            }
        }
        // well-definedness on each generator: exponent of xi(d_i * e_i) = 0
        for i in 0..m {
            let d_i = group.modulus(i);
            let total =
                (d_i * &qf.diag[i] + binom2(d_i) * qf.beta(i, i)) % &two_g;
            if !total.is_zero() {
                return Err(Error::InconsistentQuadratic(format!("generator {i}")));
            }
        }
        // quadratic relation xi(g+h) = xi(g) xi(h) B(g,h) on sample pairs
        let check_pair = |g: &GroupElement, h: &GroupElement| -> bool {
            let sum = g.add(h).expect("same group");
            let lhs = qf.eval(&sum).expect("same group");
            let rhs = (qf.eval(g).expect("same group").value()
                + qf.eval(h).expect("same group").value()
                + qf.bilinear_exponent(g, h))
                % &two_g;
            lhs.value() == &rhs
        };
        if group.order() <= &BigUint::from(128u32) {
            for g in group.iter_elements() {
                for h in group.iter_elements() {
                    if !check_pair(&g, &h) {
                        return Err(Error::InconsistentQuadratic(format!(
                            "pair {g:?},{h:?}"
                        )));
                    }
                }
            }
        } else {
            for i in 0..m {
                for j in 0..m {
                    let g = group.basis(i).scalar_mul_uint(&(group.modulus(i) - 1u32));
                    let h = group.basis(j);
                    if !check_pair(&g, &h) {
                        return Err(Error::InconsistentQuadratic(format!(
                            "generators {i},{j}"
                        )));
                    }
                }
            }
        }
        Ok(qf)
    }

    /// Builds the all-zero (constant one) function.
    pub fn constant_one(group: Group) -> Self {
        let m = group.rank();
        QuadraticFunction {
            group,
            diag: vec![BigUint::zero(); m],
            double: vec![BigUint::zero(); m],
            pair: BTreeMap::new(),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn diag(&self) -> &[BigUint] {
        &self.diag
    }

    pub fn double(&self) -> &[BigUint] {
        &self.double
    }

    pub fn pair(&self) -> &BTreeMap<(usize, usize), BigUint> {
        &self.pair
    }

    /// gamma exponent of the bilinear coefficient `B(e_i, e_j)`.
    fn beta(&self, i: usize, j: usize) -> BigUint {
        let two_g = self.group.double_order();
        if i == j {
            // n(2e_i) - 2 n(e_i)
            (&self.double[i] + two_g * 2u32 - &self.diag[i] * 2u32) % two_g
        } else {
            let key = (i.min(j), i.max(j));
            let p = self.pair.get(&key).cloned().unwrap_or_else(BigUint::zero);
            (p + two_g * 2u32 - &self.diag[i] - &self.diag[j]) % two_g
        }
    }

    /// gamma exponent of `B(g, h) = xi(g+h) / (xi(g) xi(h))`.
    pub fn bilinear_exponent(&self, g: &GroupElement, h: &GroupElement) -> BigUint {
        let two_g = self.group.double_order();
        let m = self.group.rank();
        let mut acc = BigUint::zero();
        for i in 0..m {
            for j in 0..m {
                let coeff = self.beta(i, j);
                acc = (acc + g.residue(i) * h.residue(j) % two_g * coeff) % two_g;
            }
        }
        acc
    }

    /// Exponent `n(g)` with `xi(g) = gamma^{n(g)}`, from the generator
    /// decomposition `g = sum g(i) e_i`:
    /// `n(g) = sum_i [g(i) n(e_i) + C(g(i),2) beta_ii]
    ///        + sum_{i<j} g(i) g(j) beta_ij`.
    pub fn eval(&self, g: &GroupElement) -> Result<PhaseExponent> {
        if g.group() != &self.group {
            return Err(Error::GroupMismatch);
        }
        let two_g = self.group.double_order();
        let m = self.group.rank();
        let mut acc = BigUint::zero();
        for i in 0..m {
            acc = (acc + g.residue(i) * &self.diag[i]) % two_g;
            acc = (acc + binom2(g.residue(i)) % two_g * self.beta(i, i)) % two_g;
            for j in (i + 1)..m {
                acc = (acc + g.residue(i) * g.residue(j) % two_g * self.beta(i, j)) % two_g;
            }
        }
        Ok(self.group.phase(BigInt::from(acc)))
    }

    /// Tables of the complex-conjugate function (negated exponents).
    pub fn conjugate(&self) -> QuadraticFunction {
        let two_g = self.group.double_order();
        let neg = |v: &BigUint| {
            if v.is_zero() {
                BigUint::zero()
            } else {
                two_g - v
            }
        };
        QuadraticFunction {
            group: self.group.clone(),
            diag: self.diag.iter().map(&neg).collect(),
            double: self.double.iter().map(&neg).collect(),
            pair: self.pair.iter().map(|(k, v)| (*k, neg(v))).collect(),
        }
    }

    /// The element `f_2(h)` with `chi_g(f_2(h)) = B(g, h)` for every `g`.
    fn pullback(&self, h: &GroupElement) -> GroupElement {
        let m = self.group.rank();
        let two_g = self.group.double_order();
        let basis: Vec<GroupElement> = (0..m).map(|i| self.group.basis(i)).collect();
        let targets: Vec<BigUint> = (0..m)
            .map(|i| {
                let mut acc = BigUint::zero();
                for j in 0..m {
                    acc = (acc + self.beta(i, j) * h.residue(j)) % two_g;
                }
                acc
            })
            .collect();
        subgroup::solve_character_system(&self.group, &basis, &targets)
            .expect("lengths match")
            .expect("bilinear coefficients are always realizable as characters")
            .0
    }
}

/// An automorphism gate: the matrix, its cached inverse, and the dual of the
/// inverse (which transports `Z`-labels under conjugation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismGate {
    forward: HomMatrix,
    inverse: HomMatrix,
    dual_inverse: HomMatrix,
}

impl AutomorphismGate {
    pub fn matrix(&self) -> &HomMatrix {
        &self.forward
    }

    pub fn inverse_matrix(&self) -> &HomMatrix {
        &self.inverse
    }
}

/// The dual (character-transpose) of an endomorphism matrix:
/// `B(i, j) = d_i * M(j, i) / d_j (mod d_i)`. The division is exact by the
/// homomorphism condition on `M`.
fn dual_endo(m: &HomMatrix) -> HomMatrix {
    let g = m.domain().clone();
    let rank = g.rank();
    let mut rows = vec![vec![BigUint::zero(); rank]; rank];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let num = g.modulus(i) * m.entry(j, i);
            debug_assert!((&num % g.modulus(j)).is_zero());
            *slot = (num / g.modulus(j)) % g.modulus(i);
        }
    }
    HomMatrix::new(g.clone(), g, &rows).expect("dual satisfies the homomorphism condition")
}

/// One normalizer gate in its standard encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateEncoding {
    /// Fourier transforms on the chosen cyclic factors.
    PartialQft {
        group: Group,
        factors: BTreeSet<usize>,
        inverse: bool,
    },
    Automorphism(AutomorphismGate),
    QuadraticPhase(QuadraticFunction),
    Pauli(PauliLabel),
}

impl GateEncoding {
    pub fn group(&self) -> &Group {
        match self {
            GateEncoding::PartialQft { group, .. } => group,
            GateEncoding::Automorphism(a) => a.forward.domain(),
            GateEncoding::QuadraticPhase(qf) => qf.group(),
            GateEncoding::Pauli(p) => p.group(),
        }
    }
}

/// Fourier transform on a set of factors.
pub fn partial_qft(group: &Group, factors: &[usize], inverse: bool) -> Result<GateEncoding> {
    let mut set = BTreeSet::new();
    for &f in factors {
        if f >= group.rank() {
            return Err(Error::FactorOutOfRange(f));
        }
        set.insert(f);
    }
    Ok(GateEncoding::PartialQft {
        group: group.clone(),
        factors: set,
        inverse,
    })
}

/// Fourier transform on a single factor.
pub fn fourier_gate(group: &Group, factor: usize) -> Result<GateEncoding> {
    partial_qft(group, &[factor], false)
}

/// Automorphism gate from a raw endomorphism matrix. Invertibility is
/// decided constructively by solving `A x = e_i` for every basis element;
/// a surjective endomorphism of a finite group is automatically bijective.
pub fn automorphism(group: &Group, rows: &[Vec<BigUint>]) -> Result<GateEncoding> {
    let forward = HomMatrix::new(group.clone(), group.clone(), rows)?;
    let mut inv_cols = Vec::with_capacity(group.rank());
    for i in 0..group.rank() {
        let target = group.basis(i);
        match solver::solve(&forward, &target)? {
            None => return Err(Error::NonInvertibleAutomorphism),
            Some(sol) => inv_cols.push(sol.particular),
        }
    }
    let inverse = HomMatrix::from_columns(group.clone(), group.clone(), &inv_cols)
        .map_err(|_| Error::NonInvertibleAutomorphism)?;
    let dual_inverse = dual_endo(&inverse);
    Ok(GateEncoding::Automorphism(AutomorphismGate {
        forward,
        inverse,
        dual_inverse,
    }))
}

/// Quadratic phase gate from validated coefficient tables.
pub fn quadratic_phase(
    group: &Group,
    diag: Vec<BigUint>,
    double: Vec<BigUint>,
    pair: BTreeMap<(usize, usize), BigUint>,
) -> Result<GateEncoding> {
    Ok(GateEncoding::QuadraticPhase(QuadraticFunction::new(
        group.clone(),
        diag,
        double,
        pair,
    )?))
}

pub fn pauli_gate(label: PauliLabel) -> GateEncoding {
    GateEncoding::Pauli(label)
}

/// `SUM` gate: the automorphism `(..., x_i, ..., x_j, ...) ->
/// `(..., x_i, ..., x_j + x_i, ...)` with control `i` and target `j`.
/// Valid exactly when `d_j` divides `d_i`.
pub fn sum_gate(group: &Group, control: usize, target: usize) -> Result<GateEncoding> {
    let m = group.rank();
    if control >= m {
        return Err(Error::FactorOutOfRange(control));
    }
    if target >= m || target == control {
        return Err(Error::FactorOutOfRange(target));
    }
    let mut rows = vec![vec![BigUint::zero(); m]; m];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = BigUint::one() % group.modulus(i);
    }
    rows[target][control] = BigUint::one() % group.modulus(target);
    automorphism(group, &rows)
}

/// Controlled phase: `xi(g) = exp(2 pi i g(i) g(j) / gcd(d_i, d_j))`,
/// the `CZ_d` gate when both moduli equal `d`.
pub fn cz_gate(group: &Group, i: usize, j: usize) -> Result<GateEncoding> {
    let m = group.rank();
    if i >= m {
        return Err(Error::FactorOutOfRange(i));
    }
    if j >= m || i == j {
        return Err(Error::FactorOutOfRange(j));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let g = crate::group::big_gcd(group.modulus(i), group.modulus(j));
    let mut pair = BTreeMap::new();
    pair.insert((lo, hi), group.double_order() / g);
    quadratic_phase(
        group,
        vec![BigUint::zero(); m],
        vec![BigUint::zero(); m],
        pair,
    )
}

/// Phase gate on factor `i`: `xi(z) = exp(i pi z (z + d_i) / d_i)` on the
/// local coordinate.
pub fn phase_s_gate(group: &Group, factor: usize) -> Result<GateEncoding> {
    let m = group.rank();
    if factor >= m {
        return Err(Error::FactorOutOfRange(factor));
    }
    let gate = scaled_phase_gate(group, factor, &BigUint::one());
    Ok(gate)
}

/// Quadratic phase with local exponent `b * z * (z + d_i)` in units of
/// `pi / d_i`; sends `X`-components to `Z`-components scaled by `b` under
/// conjugation. Always a valid quadratic function.
pub fn scaled_phase_gate(group: &Group, factor: usize, b: &BigUint) -> GateEncoding {
    let m = group.rank();
    let two_g = group.double_order();
    let d_i = group.modulus(factor);
    let weight = group.order() / d_i; // gamma units per local pi/d_i unit
    let local = |z: &BigUint| -> BigUint {
        let z = z % d_i;
        (&weight * &z % two_g) * ((&z + d_i) % two_g) % two_g * b % two_g
    };
    let mut diag = vec![BigUint::zero(); m];
    let mut double = vec![BigUint::zero(); m];
    diag[factor] = local(&BigUint::one());
    double[factor] = local(&BigUint::from(2u32));
    GateEncoding::QuadraticPhase(
        QuadraticFunction::new(group.clone(), diag, double, BTreeMap::new())
            .expect("scaled phase tables are consistent"),
    )
}

/// Multiplication gate `|x> -> |a x>` on factor `i`; `a` must be coprime to
/// the factor modulus.
pub fn mult_gate(group: &Group, factor: usize, a: &BigUint) -> Result<GateEncoding> {
    let m = group.rank();
    if factor >= m {
        return Err(Error::FactorOutOfRange(factor));
    }
    if !crate::group::big_gcd(a, group.modulus(factor)).is_one() {
        return Err(Error::NonCoprimeMultiplier);
    }
    let mut rows = vec![vec![BigUint::zero(); m]; m];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = BigUint::one() % group.modulus(i);
    }
    rows[factor][factor] = a % group.modulus(factor);
    automorphism(group, &rows)
}

/// Encoding of the inverse gate.
pub fn invert_gate(gate: &GateEncoding) -> GateEncoding {
    match gate {
        GateEncoding::PartialQft {
            group,
            factors,
            inverse,
        } => GateEncoding::PartialQft {
            group: group.clone(),
            factors: factors.clone(),
            inverse: !inverse,
        },
        GateEncoding::Automorphism(a) => GateEncoding::Automorphism(AutomorphismGate {
            forward: a.inverse.clone(),
            inverse: a.forward.clone(),
            dual_inverse: dual_endo(&a.forward),
        }),
        GateEncoding::QuadraticPhase(qf) => GateEncoding::QuadraticPhase(qf.conjugate()),
        GateEncoding::Pauli(p) => GateEncoding::Pauli(p.inverse()),
    }
}

/// Label of `U sigma U^dagger`.
pub fn conjugate(gate: &GateEncoding, p: &PauliLabel) -> Result<PauliLabel> {
    if gate.group() != p.group() {
        return Err(Error::GroupMismatch);
    }
    let group = p.group().clone();
    match gate {
        GateEncoding::PartialQft {
            factors, inverse, ..
        } => {
            // per factor: forward (z, x) -> (x, -z), inverse (z, x) -> (-x, z),
            // both with the reordering phase 2 * (order/d_i) * z_i * x_i
            let mut z: Vec<BigUint> = p.z_part().residues().to_vec();
            let mut x: Vec<BigUint> = p.x_part().residues().to_vec();
            let mut phase = p.phase().clone();
            for &i in factors {
                let d_i = group.modulus(i);
                let t = group.order() / d_i;
                let cross = BigUint::from(2u32) * &t * &z[i] * &x[i];
                phase = phase.add_uint(&(cross % group.double_order()));
                let neg = |v: &BigUint| if v.is_zero() { BigUint::zero() } else { d_i - v };
                let (new_z, new_x) = if *inverse {
                    (neg(&x[i]), z[i].clone())
                } else {
                    (x[i].clone(), neg(&z[i]))
                };
                z[i] = new_z;
                x[i] = new_x;
            }
            PauliLabel::new(phase, group.element(&z)?, group.element(&x)?)
        }
        GateEncoding::Automorphism(a) => {
            let new_x = a.forward.apply(p.x_part())?;
            let new_z = a.dual_inverse.apply(p.z_part())?;
            PauliLabel::new(p.phase().clone(), new_z, new_x)
        }
        GateEncoding::QuadraticPhase(qf) => {
            // D X(h) D^dagger = xi(h) X(h) Z(f2(h)); reorder to Z-before-X
            let h = p.x_part();
            let f2 = qf.pullback(h);
            let n_h = qf.eval(h)?;
            let cross = character_exponent(&f2, h)?;
            let phase = p
                .phase()
                .add(&n_h)?
                .add_signed(&(BigInt::from(cross) * -2));
            PauliLabel::new(phase, p.z_part().add(&f2)?, h.clone())
        }
        GateEncoding::Pauli(q) => q.multiply(p)?.multiply(&q.inverse()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(moduli: &[u64]) -> Group {
        Group::from_u64(moduli).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn eval_quadratic_examples() {
        // xi(z) = i^(z^2) over Z_4: diag 2, double 0
        let z4 = z(&[4]);
        let qf = QuadraticFunction::new(z4.clone(), vec![big(2)], vec![big(0)], BTreeMap::new())
            .unwrap();
        assert!(qf.eval(&z4.zero()).unwrap().is_zero());
        let three = z4.element_from_u64(&[3]).unwrap();
        assert_eq!(qf.eval(&three).unwrap().value(), &big(2));
        // direct evaluation of omega^(z^2) for every z
        for zq in 0u64..4 {
            let elem = z4.element_from_u64(&[zq]).unwrap();
            let expect = (2 * zq * zq) % 8; // omega = gamma^2
            assert_eq!(qf.eval(&elem).unwrap().value(), &big(expect), "z={zq}");
        }

        // xi(x) = i^x over Z_2: diag 1
        let z2 = z(&[2]);
        let qf = QuadraticFunction::new(z2.clone(), vec![big(1)], vec![big(0)], BTreeMap::new())
            .unwrap();
        assert_eq!(
            qf.eval(&z2.element_from_u64(&[1]).unwrap()).unwrap().value(),
            &big(1)
        );
    }

    #[test]
    fn validate_quadratic_examples() {
        let z2 = z(&[2]);
        // constant one
        assert!(QuadraticFunction::new(
            z2.clone(),
            vec![big(0)],
            vec![big(0)],
            BTreeMap::new()
        )
        .is_ok());
        // xi(x) = i^x is valid
        assert!(QuadraticFunction::new(
            z2.clone(),
            vec![big(1)],
            vec![big(0)],
            BTreeMap::new()
        )
        .is_ok());
        // n(2e) = 1 wraps inconsistently
        assert!(QuadraticFunction::new(
            z2,
            vec![big(1)],
            vec![big(1)],
            BTreeMap::new()
        )
        .is_err());
    }

    #[test]
    fn bilinearity_exhaustive() {
        // xi(g+h) xi(g)^-1 xi(h)^-1 must be bilinear in each argument
        let group = z(&[2, 4]);
        let qf = QuadraticFunction::new(
            group.clone(),
            vec![big(4), big(1)],
            vec![big(0), big(4)],
            [((0usize, 1usize), big(9))].into_iter().collect(),
        )
        .unwrap();
        let two_g = group.double_order();
        for g1 in group.iter_elements() {
            for g2 in group.iter_elements() {
                for h in group.iter_elements() {
                    let lhs = qf.bilinear_exponent(&g1.add(&g2).unwrap(), &h);
                    let rhs =
                        (qf.bilinear_exponent(&g1, &h) + qf.bilinear_exponent(&g2, &h)) % two_g;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn hadamard_conjugation() {
        let z2 = z(&[2]);
        let f = fourier_gate(&z2, 0).unwrap();
        let x1 = PauliLabel::x(z2.element_from_u64(&[1]).unwrap());
        let z1 = PauliLabel::z(z2.element_from_u64(&[1]).unwrap());
        assert_eq!(conjugate(&f, &x1).unwrap(), z1);
        assert_eq!(conjugate(&f, &z1).unwrap(), x1);
        // round trip through the inverse
        let finv = invert_gate(&f);
        assert_eq!(conjugate(&finv, &conjugate(&f, &x1).unwrap()).unwrap(), x1);
        let y = z1.multiply(&x1).unwrap();
        assert_eq!(
            conjugate(&finv, &conjugate(&f, &y).unwrap()).unwrap(),
            y
        );
    }

    #[test]
    fn sum_gate_conjugation() {
        let g = z(&[2, 2]);
        let gate = sum_gate(&g, 0, 1).unwrap();
        if let GateEncoding::Automorphism(a) = &gate {
            assert_eq!(a.matrix().entry(1, 0), &big(1));
        } else {
            panic!("sum gate must be an automorphism");
        }
        let x10 = PauliLabel::x(g.element_from_u64(&[1, 0]).unwrap());
        let expect = PauliLabel::x(g.element_from_u64(&[1, 1]).unwrap());
        assert_eq!(conjugate(&gate, &x10).unwrap(), expect);
    }

    #[test]
    fn cz_gate_conjugation() {
        let g = z(&[2, 2]);
        let gate = cz_gate(&g, 0, 1).unwrap();
        let x10 = PauliLabel::x(g.element_from_u64(&[1, 0]).unwrap());
        let got = conjugate(&gate, &x10).unwrap();
        // X((1,0)) -> X((1,0)) Z((0,1)) with no extra phase
        let expect = PauliLabel::new(
            g.phase_zero(),
            g.element_from_u64(&[0, 1]).unwrap(),
            g.element_from_u64(&[1, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn phase_s_gate_encoding() {
        // over Z_2: xi(1) = i^(1*3) = -i = gamma^3 with gamma = i
        let z2 = z(&[2]);
        let gate = phase_s_gate(&z2, 0).unwrap();
        if let GateEncoding::QuadraticPhase(qf) = &gate {
            assert_eq!(
                qf.eval(&z2.element_from_u64(&[1]).unwrap()).unwrap().value(),
                &big(3)
            );
        } else {
            panic!("phase gate must be a quadratic phase");
        }
    }

    #[test]
    fn mult_gate_rejects_noncoprime() {
        let z4 = z(&[4]);
        assert_eq!(
            mult_gate(&z4, 0, &big(2)).unwrap_err(),
            Error::NonCoprimeMultiplier
        );
        let gate = mult_gate(&z4, 0, &big(3)).unwrap();
        let x1 = PauliLabel::x(z4.element_from_u64(&[1]).unwrap());
        assert_eq!(
            conjugate(&gate, &x1).unwrap(),
            PauliLabel::x(z4.element_from_u64(&[3]).unwrap())
        );
    }

    #[test]
    fn automorphism_rejects_singular() {
        let z4 = z(&[4]);
        assert_eq!(
            automorphism(&z4, &[vec![big(2)]]).unwrap_err(),
            Error::NonInvertibleAutomorphism
        );
    }

    #[test]
    fn invert_gate_involution() {
        let g = z(&[4, 2]);
        let gates = vec![
            fourier_gate(&g, 0).unwrap(),
            sum_gate(&g, 0, 1).unwrap(),
            cz_gate(&g, 0, 1).unwrap(),
            phase_s_gate(&g, 0).unwrap(),
            pauli_gate(PauliLabel::x(g.element_from_u64(&[1, 1]).unwrap())),
        ];
        let p = PauliLabel::new(
            g.phase(BigInt::from(5)),
            g.element_from_u64(&[3, 1]).unwrap(),
            g.element_from_u64(&[2, 1]).unwrap(),
        )
        .unwrap();
        for gate in gates {
            let inv = invert_gate(&gate);
            let roundtrip = conjugate(&inv, &conjugate(&gate, &p).unwrap()).unwrap();
            assert_eq!(roundtrip, p, "gate {gate:?}");
            // quadratic inverse evaluates to the negated exponent
            if let (GateEncoding::QuadraticPhase(qf), GateEncoding::QuadraticPhase(qc)) =
                (&gate, &inv)
            {
                for elem in g.iter_elements() {
                    let sum = (qf.eval(&elem).unwrap().value()
                        + qc.eval(&elem).unwrap().value())
                        % g.double_order();
                    assert!(sum.is_zero());
                }
            }
        }
    }

    #[test]
    fn conjugation_is_multiplicative() {
        let g = z(&[4, 2]);
        let gates = vec![
            fourier_gate(&g, 0).unwrap(),
            partial_qft(&g, &[0, 1], true).unwrap(),
            sum_gate(&g, 0, 1).unwrap(),
            cz_gate(&g, 0, 1).unwrap(),
            phase_s_gate(&g, 1).unwrap(),
            mult_gate(&g, 0, &big(3)).unwrap(),
        ];
        let mut state = 99u64;
        let mut next = |bound: u64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for gate in gates {
            for _ in 0..40 {
                let mut mk = || {
                    PauliLabel::new(
                        g.phase(BigInt::from(next(16))),
                        g.element_from_index(&big(next(8))),
                        g.element_from_index(&big(next(8))),
                    )
                    .unwrap()
                };
                let (p, q) = (mk(), mk());
                let lhs = conjugate(&gate, &p.multiply(&q).unwrap()).unwrap();
                let rhs = conjugate(&gate, &p)
                    .unwrap()
                    .multiply(&conjugate(&gate, &q).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs, "gate {gate:?}");
            }
        }
    }
}
