//! Finite Abelian groups `Z_{d_1} x ... x Z_{d_m}` with arbitrary-precision
//! moduli, their elements, and character computations.
//!
//! All values are immutable and canonically reduced: an element always stores
//! residues with `0 <= g(i) < d_i`. Phases are never floating point here; the
//! scalar `gamma^a` (with `gamma = exp(i*pi/order)`) is represented by its
//! exponent `a` modulo twice the group order.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
struct GroupInner {
    moduli: Vec<BigUint>,
    order: BigUint,
    double_order: BigUint,
    lcm_exponent: BigUint,
}

/// A finite Abelian group given as an ordered product of cyclic factors.
///
/// Cheap to clone; the modulus data is shared behind an `Arc`.
#[derive(Clone)]
pub struct Group {
    inner: Arc<GroupInner>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.moduli == other.inner.moduli
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group{:?}", self.inner.moduli)
    }
}

impl Group {
    /// Builds a group from its cyclic moduli. Rejects an empty list and any
    /// modulus below one.
    pub fn new(moduli: Vec<BigUint>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::EmptyModuli);
        }
        for (i, d) in moduli.iter().enumerate() {
            if d.is_zero() {
                return Err(Error::InvalidModulus(i));
            }
        }
        let order = moduli.iter().product::<BigUint>();
        let double_order = &order * 2u32;
        let lcm_exponent = moduli
            .iter()
            .fold(BigUint::one(), |acc, d| acc.lcm(d));
        Ok(Group {
            inner: Arc::new(GroupInner {
                moduli,
                order,
                double_order,
                lcm_exponent,
            }),
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_u64(moduli: &[u64]) -> Result<Self> {
        Self::new(moduli.iter().map(|&d| BigUint::from(d)).collect())
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.inner.moduli.len()
    }

    pub fn moduli(&self) -> &[BigUint] {
        &self.inner.moduli
    }

    pub fn modulus(&self, i: usize) -> &BigUint {
        &self.inner.moduli[i]
    }

    /// Group order, the product of all moduli.
    pub fn order(&self) -> &BigUint {
        &self.inner.order
    }

    /// `2 * order`, the modulus of phase exponents.
    pub fn double_order(&self) -> &BigUint {
        &self.inner.double_order
    }

    /// Least common multiple of the moduli; the coefficient modulus used for
    /// subgroup combinations.
    pub fn lcm_exponent(&self) -> &BigUint {
        &self.inner.lcm_exponent
    }

    /// The identity element.
    pub fn zero(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            residues: vec![BigUint::zero(); self.rank()],
        }
    }

    /// The canonical generator of the `i`-th factor (zero when `d_i = 1`).
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut residues = vec![BigUint::zero(); self.rank()];
        residues[i] = if self.inner.moduli[i].is_one() {
            BigUint::zero()
        } else {
            BigUint::one()
        };
        GroupElement {
            group: self.clone(),
            residues,
        }
    }

    /// Builds an element from signed residues, reducing each one.
    pub fn element_from_signed(&self, residues: &[BigInt]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: residues.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(self.moduli())
            .map(|(r, d)| reduce_signed(r, d))
            .collect();
        Ok(GroupElement {
            group: self.clone(),
            residues,
        })
    }

    /// Builds an element from unsigned residues, reducing each one.
    pub fn element(&self, residues: &[BigUint]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: residues.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(self.moduli())
            .map(|(r, d)| r % d)
            .collect();
        Ok(GroupElement {
            group: self.clone(),
            residues,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn element_from_u64(&self, residues: &[u64]) -> Result<GroupElement> {
        let residues: Vec<BigUint> = residues.iter().map(|&r| BigUint::from(r)).collect();
        self.element(&residues)
    }

    /// Reduces a signed exponent into the phase ring `Z_{2*order}`.
    pub fn phase(&self, value: BigInt) -> PhaseExponent {
        PhaseExponent {
            group: self.clone(),
            value: reduce_signed(&value, self.double_order()),
        }
    }

    pub fn phase_zero(&self) -> PhaseExponent {
        PhaseExponent {
            group: self.clone(),
            value: BigUint::zero(),
        }
    }

    /// Direct product of two groups (concatenated moduli).
    pub fn product(&self, other: &Group) -> Group {
        let mut moduli = self.moduli().to_vec();
        moduli.extend_from_slice(other.moduli());
        Group::new(moduli).expect("product of valid groups is valid")
    }

    /// Iterates over every element in mixed-radix order. Only sensible for
    /// small groups; used by oracles and exhaustive tests.
    pub fn iter_elements(&self) -> GroupIter {
        GroupIter {
            group: self.clone(),
            next: Some(vec![BigUint::zero(); self.rank()]),
        }
    }

    /// Converts a mixed-radix index (row-major, last factor fastest) into an
    /// element. The index must be below the group order.
    pub fn element_from_index(&self, index: &BigUint) -> GroupElement {
        let mut rem = index.clone();
        let mut residues = vec![BigUint::zero(); self.rank()];
        for i in (0..self.rank()).rev() {
            let d = &self.inner.moduli[i];
            residues[i] = &rem % d;
            rem /= d;
        }
        GroupElement {
            group: self.clone(),
            residues,
        }
    }

    /// Mixed-radix index of an element; inverse of [`Group::element_from_index`].
    pub fn index_of(&self, g: &GroupElement) -> BigUint {
        let mut idx = BigUint::zero();
        for i in 0..self.rank() {
            idx = idx * &self.inner.moduli[i] + &g.residues[i];
        }
        idx
    }
}

fn reduce_signed(value: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from(modulus.clone());
    let r = value.mod_floor(&m);
    r.to_biguint().expect("mod_floor of positive modulus is nonnegative")
}

pub struct GroupIter {
    group: Group,
    next: Option<Vec<BigUint>>,
}

impl Iterator for GroupIter {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let current = self.next.take()?;
        let elem = GroupElement {
            group: self.group.clone(),
            residues: current.clone(),
        };
        // increment mixed-radix counter, last factor fastest
        let mut digits = current;
        let mut i = self.group.rank();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            digits[i] += 1u32;
            if digits[i] < *self.group.modulus(i) {
                self.next = Some(digits);
                break;
            }
            digits[i] = BigUint::zero();
        }
        Some(elem)
    }
}

/// An element of a [`Group`], stored in canonical reduced form.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    group: Group,
    residues: Vec<BigUint>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", r)?;
        }
        write!(f, ")")
    }
}

impl GroupElement {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn residue(&self, i: usize) -> &BigUint {
        &self.residues[i]
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|r| r.is_zero())
    }

    fn check_group(&self, other: &GroupElement) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Component-wise modular sum.
    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_group(other)?;
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.group.moduli())
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        Ok(GroupElement {
            group: self.group.clone(),
            residues,
        })
    }

    /// Component-wise difference.
    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_group(other)?;
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.group.moduli())
            .map(|((a, b), d)| (a + d - b) % d)
            .collect();
        Ok(GroupElement {
            group: self.group.clone(),
            residues,
        })
    }

    /// Additive inverse.
    pub fn neg(&self) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(a, d)| if a.is_zero() { BigUint::zero() } else { d - a })
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// `n * g` with any signed integer scalar, reduced per component.
    pub fn scalar_mul(&self, n: &BigInt) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(a, d)| {
                let prod = n * BigInt::from(a.clone());
                reduce_signed(&prod, d)
            })
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// Unsigned scalar multiple.
    pub fn scalar_mul_uint(&self, n: &BigUint) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(a, d)| (a * n) % d)
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// Concatenates two elements into an element of the product group.
    pub fn direct_sum(&self, other: &GroupElement, product: &Group) -> GroupElement {
        let mut residues = self.residues.clone();
        residues.extend_from_slice(&other.residues);
        debug_assert_eq!(residues.len(), product.rank());
        GroupElement {
            group: product.clone(),
            residues,
        }
    }

    /// Splits an element of a product group back into a prefix of rank
    /// `left_rank` and the remaining suffix.
    pub fn split(&self, left: &Group, right: &Group) -> (GroupElement, GroupElement) {
        let l = left.rank();
        (
            GroupElement {
                group: left.clone(),
                residues: self.residues[..l].to_vec(),
            },
            GroupElement {
                group: right.clone(),
                residues: self.residues[l..].to_vec(),
            },
        )
    }
}

/// Exponent `t` of a character value `chi_g(h) = exp(2*pi*i*t/order)`.
///
/// Computed exactly as `sum_i (order/d_i) * g(i) * h(i) mod order`; symmetric
/// in both arguments.
pub fn character_exponent(g: &GroupElement, h: &GroupElement) -> Result<BigUint> {
    if g.group() != h.group() {
        return Err(Error::GroupMismatch);
    }
    let group = g.group();
    let order = group.order();
    let mut acc = BigUint::zero();
    for i in 0..group.rank() {
        let weight = order / group.modulus(i);
        acc = (acc + weight * g.residue(i) * h.residue(i)) % order;
    }
    Ok(acc)
}

/// A scalar `gamma^value` with `gamma = exp(i*pi/order)`, stored as the
/// exponent reduced modulo `2*order`.
#[derive(Clone, PartialEq, Eq)]
pub struct PhaseExponent {
    group: Group,
    value: BigUint,
}

impl fmt::Debug for PhaseExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gamma^{}", self.value)
    }
}

impl PhaseExponent {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &PhaseExponent) -> Result<PhaseExponent> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(PhaseExponent {
            group: self.group.clone(),
            value: (&self.value + &other.value) % self.group.double_order(),
        })
    }

    pub fn add_uint(&self, value: &BigUint) -> PhaseExponent {
        PhaseExponent {
            group: self.group.clone(),
            value: (&self.value + value) % self.group.double_order(),
        }
    }

    pub fn add_signed(&self, value: &BigInt) -> PhaseExponent {
        let sum = BigInt::from(self.value.clone()) + value;
        self.group.phase(sum)
    }

    /// Exponent of the complex conjugate scalar.
    pub fn conjugate(&self) -> PhaseExponent {
        if self.value.is_zero() {
            self.clone()
        } else {
            PhaseExponent {
                group: self.group.clone(),
                value: self.group.double_order() - &self.value,
            }
        }
    }
}

/// Exact gcd helpers shared across the crate.
pub(crate) fn big_gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// Largest divisor of `r` coprime to `a` (removes every prime of `r` that
/// divides `a`). Used to lift residues across moduli without factoring.
pub(crate) fn coprime_part(r: &BigUint, a: &BigUint) -> BigUint {
    if r.is_zero() {
        return BigUint::zero();
    }
    let mut u = r.clone();
    loop {
        let t = u.gcd(a);
        if t.is_one() {
            return u;
        }
        u /= t;
    }
}

/// Finds a unit `v` modulo `d` with `v * w = t (mod d)`; requires
/// `gcd(w, d) = gcd(t, d)`. Returns `None` when the gcds differ.
pub(crate) fn unit_scaling(w: &BigUint, t: &BigUint, d: &BigUint) -> Option<BigUint> {
    let g = w.gcd(d);
    if g != t.gcd(d) {
        return None;
    }
    if &g == d {
        // w = t = 0 (mod d); any unit works.
        return Some(BigUint::one());
    }
    let m = d / &g; // reduced modulus
    let w_red = (w / &g) % &m;
    let t_red = (t / &g) % &m;
    let inv = mod_inverse(&w_red, &m)?;
    let v0 = (t_red * inv) % &m;
    // lift v0 to a unit modulo d: v0 + m * coprime_part(g, v0)
    let v0 = if v0.is_zero() { m.clone() % d } else { v0 };
    let lift = coprime_part(&g, &v0);
    let v = (&v0 + &m * lift) % d;
    debug_assert!(v.gcd(d).is_one());
    Some(v)
}

/// Modular inverse via extended Euclid; `None` when not coprime.
pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % m);
    let m_int = BigInt::from(m.clone());
    let (g, x, _) = extended_gcd(&a, &m_int);
    if !g.is_one() {
        return None;
    }
    Some(reduce_signed(&x, m))
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub(crate) fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a.clone(), BigInt::from(-1), BigInt::zero());
        }
        return (a.clone(), BigInt::one(), BigInt::zero());
    }
    let (q, r) = a.div_rem(b);
    let (g, x, y) = extended_gcd(b, &r);
    (g, y.clone(), x - q * y)
}
