//! Label arithmetic for generalized Pauli operators
//! `sigma(a, g, h) = gamma^a Z(g) X(h)` over a finite Abelian group.
//!
//! Labels are kept in the canonical order with `Z` left of `X`; every product
//! is renormalized to that order immediately, so structural equality of
//! labels is operator equality.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{character_exponent, Group, GroupElement, PhaseExponent};

/// The label `(a, g, h)` of `gamma^a Z(g) X(h)` with `a` in `Z_{2*order}`.
#[derive(Clone, PartialEq, Eq)]
pub struct PauliLabel {
    phase: PhaseExponent,
    z_part: GroupElement,
    x_part: GroupElement,
}

impl fmt::Debug for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gamma^{} Z{:?} X{:?}",
            self.phase.value(),
            self.z_part,
            self.x_part
        )
    }
}

impl PauliLabel {
    pub fn new(phase: PhaseExponent, z_part: GroupElement, x_part: GroupElement) -> Result<Self> {
        if phase.group() != z_part.group() || z_part.group() != x_part.group() {
            return Err(Error::GroupMismatch);
        }
        Ok(PauliLabel {
            phase,
            z_part,
            x_part,
        })
    }

    pub fn identity(group: &Group) -> Self {
        PauliLabel {
            phase: group.phase_zero(),
            z_part: group.zero(),
            x_part: group.zero(),
        }
    }

    /// `X(g)`: the shift operator, label `(0, 0, g)`.
    pub fn x(g: GroupElement) -> Self {
        let group = g.group().clone();
        PauliLabel {
            phase: group.phase_zero(),
            z_part: group.zero(),
            x_part: g,
        }
    }

    /// `Z(g)`: the character-diagonal operator, label `(0, g, 0)`.
    pub fn z(g: GroupElement) -> Self {
        let group = g.group().clone();
        PauliLabel {
            phase: group.phase_zero(),
            z_part: g,
            x_part: group.zero(),
        }
    }

    /// Copy with the phase exponent shifted by `a`.
    pub fn with_phase(&self, a: &BigUint) -> Self {
        PauliLabel {
            phase: self.phase.add_uint(a),
            z_part: self.z_part.clone(),
            x_part: self.x_part.clone(),
        }
    }

    pub fn group(&self) -> &Group {
        self.z_part.group()
    }

    pub fn phase(&self) -> &PhaseExponent {
        &self.phase
    }

    pub fn z_part(&self) -> &GroupElement {
        &self.z_part
    }

    pub fn x_part(&self) -> &GroupElement {
        &self.x_part
    }

    pub fn is_identity(&self) -> bool {
        self.phase.is_zero() && self.z_part.is_zero() && self.x_part.is_zero()
    }

    /// True when the operator is diagonal, i.e. of the form `gamma^a Z(g)`.
    pub fn is_diagonal(&self) -> bool {
        self.x_part.is_zero()
    }

    /// Label of the operator product, renormalized to `Z`-before-`X` order.
    /// Commuting `X(h_p)` past `Z(g_q)` contributes the phase
    /// `chi_{g_q}(h_p)^(-1)`, i.e. `-2 * character_exponent(g_q, h_p)` in
    /// gamma units.
    pub fn multiply(&self, other: &PauliLabel) -> Result<PauliLabel> {
        if self.group() != other.group() {
            return Err(Error::GroupMismatch);
        }
        let cross = character_exponent(&other.z_part, &self.x_part)?;
        let phase = self
            .phase
            .add(&other.phase)?
            .add_signed(&(BigInt::from(cross) * -2));
        Ok(PauliLabel {
            phase,
            z_part: self.z_part.add(&other.z_part)?,
            x_part: self.x_part.add(&other.x_part)?,
        })
    }

    /// `sigma^n` by square-and-multiply on labels.
    pub fn power(&self, n: &BigUint) -> PauliLabel {
        let mut result = PauliLabel::identity(self.group());
        let mut base = self.clone();
        let mut exp = n % self.group().double_order();
        while !exp.is_zero() {
            if exp.bit(0) {
                result = result.multiply(&base).expect("same group");
            }
            base = base.multiply(&base).expect("same group");
            exp >>= 1;
        }
        result
    }

    /// The adjoint: `sigma^dagger = sigma^(2*order - 1)`.
    pub fn inverse(&self) -> PauliLabel {
        let exp = self.group().double_order() - BigUint::from(1u32);
        self.power(&exp)
    }

    /// Commutation test: `chi_{g_1}(h_2) = chi_{g_2}(h_1)`.
    pub fn commutes(&self, other: &PauliLabel) -> Result<bool> {
        if self.group() != other.group() {
            return Err(Error::GroupMismatch);
        }
        Ok(character_exponent(&self.z_part, &other.x_part)?
            == character_exponent(&other.z_part, &self.x_part)?)
    }
}
