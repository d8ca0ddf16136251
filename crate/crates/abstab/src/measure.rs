//! Pauli measurements on stabilizer states: diagonalization circuits, exact
//! outcome distributions, sampling, forced outcomes and post-measurement
//! stabilizer updates.
//!
//! A measurement of `sigma` is simulated by conjugating the state's
//! stabilizer through a normalizer circuit that turns `sigma` into a
//! diagonal operator `gamma^a Z(g)`, where outcome values are read off the
//! labelling homomorphism `omega(x) = sum (d/d_i) g(i) x(i) mod d` with `d`
//! the lcm of the moduli. On the transformed support coset the outcome is
//! affine, so the distribution is uniform over a coset of the image
//! subgroup of `omega`. The post-measurement stabilizer follows the update
//! rule `S_m = <conj(lambda) sigma, C_S(sigma)>`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{self, GateEncoding};
use crate::group::{big_gcd, unit_scaling, Group, GroupElement};
use crate::pauli::PauliLabel;
use crate::stabilizer::StabilizerGroup;
use crate::subgroup::{self, SubgroupGens};

/// Exact probability as a reduced fraction of big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction {
    pub num: BigUint,
    pub den: BigUint,
}

impl Fraction {
    pub fn new(num: BigUint, den: BigUint) -> Fraction {
        debug_assert!(!den.is_zero());
        let g = num.gcd(&den);
        if g.is_zero() {
            return Fraction {
                num: BigUint::zero(),
                den: BigUint::one(),
            };
        }
        Fraction {
            num: num / &g,
            den: den / g,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::INFINITY) / self.den.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// A normalizer circuit diagonalizing a Pauli operator, together with the
/// resulting diagonal label. Applying the gates in order and conjugating the
/// input through each reproduces `diagonal` exactly.
#[derive(Debug, Clone)]
pub struct DiagonalizationResult {
    pub circuit: Vec<GateEncoding>,
    pub diagonal: PauliLabel,
}

fn balanced_rep(v: &BigUint, d: &BigUint) -> BigInt {
    // representative in (-d/2, d/2]
    let twice = v * 2u32;
    if &twice > d {
        BigInt::from(v.clone()) - BigInt::from(d.clone())
    } else {
        BigInt::from(v.clone())
    }
}

/// Builds a normalizer circuit turning `p` into a diagonal Pauli, factor by
/// factor. Each cyclic factor with local components `(j, k)` is reduced by a
/// gcd recursion with balanced remainders: a scaled phase gate subtracts the
/// quotient times the X-component from the Z-component, a Fourier gate swaps
/// the roles, and the absolute size of the X-component at least halves per
/// round. A final multiplication gate normalizes the local Z-component to
/// exactly `gcd(j, k)`.
pub fn diagonalize_pauli(p: &PauliLabel) -> Result<DiagonalizationResult> {
    let group = p.group().clone();
    let mut circuit: Vec<GateEncoding> = Vec::new();
    let mut current = p.clone();
    for i in 0..group.rank() {
        let d = group.modulus(i).clone();
        if d.is_one() {
            continue;
        }
        let j0 = current.z_part().residue(i).clone();
        let k0 = current.x_part().residue(i).clone();
        if k0.is_zero() {
            continue;
        }
        let target = big_gcd(&j0, &k0); // gcd(j, 0) = j, so k = 0 stays put
        loop {
            let x_i = current.x_part().residue(i).clone();
            if x_i.is_zero() {
                break;
            }
            let z_i = current.z_part().residue(i).clone();
            let zt = balanced_rep(&z_i, &d);
            let xt = balanced_rep(&x_i, &d);
            // nearest-integer quotient: |z - q*x| <= |x| / 2
            let num: BigInt = &zt * BigInt::from(2) + &xt;
            let den: BigInt = &xt * BigInt::from(2);
            let q: BigInt = num.div_floor(&den);
            if !q.is_zero() {
                let b = (-&q).mod_floor(&BigInt::from(d.clone()));
                let b = b.to_biguint().expect("mod_floor nonnegative");
                if !b.is_zero() {
                    let gate = gates::scaled_phase_gate(&group, i, &b);
                    current = gates::conjugate(&gate, &current)?;
                    circuit.push(gate);
                }
            }
            let gate = gates::fourier_gate(&group, i)?;
            current = gates::conjugate(&gate, &current)?;
            circuit.push(gate);
        }
        let w = current.z_part().residue(i).clone();
        let target = &target % &d;
        if w != target {
            // unit v with v * w = target (mod d); the mult gate maps
            // Z(w) -> Z(a^{-1} w), so use a = v^{-1}
            let v = unit_scaling(&w, &target, &d).expect("gcd with d is preserved");
            let a = crate::group::mod_inverse(&v, &d).expect("v is a unit");
            let gate = gates::mult_gate(&group, i, &a)?;
            current = gates::conjugate(&gate, &current)?;
            circuit.push(gate);
        }
    }
    debug_assert!(current.x_part().is_zero());
    Ok(DiagonalizationResult {
        circuit,
        diagonal: current,
    })
}

/// The labelling homomorphism of a diagonal Pauli `Z(g)`:
/// `omega(x) = sum_i (d/d_i) g(i) x(i) mod d`, `d = lcm(d_1, ..., d_m)`,
/// so that `chi_g(x) = exp(2 pi i omega(x) / d)`.
pub fn omega_exponent(g: &GroupElement, x: &GroupElement) -> Result<BigUint> {
    if g.group() != x.group() {
        return Err(Error::GroupMismatch);
    }
    let group = g.group();
    let d = group.lcm_exponent();
    let mut acc = BigUint::zero();
    for i in 0..group.rank() {
        acc = (acc + (d / group.modulus(i)) * g.residue(i) * x.residue(i)) % d;
    }
    Ok(acc)
}

/// Exact outcome distribution of a Pauli measurement: eigenvalue exponents
/// `k` (eigenvalue `gamma^k`) mapped to probabilities, plus the
/// `omega`-labelling of each outcome for diagnostics.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    /// Eigenvalue exponent -> exact probability.
    pub entries: BTreeMap<BigUint, Fraction>,
    /// Eigenvalue exponent -> omega value `y` with eigenvalue
    /// `gamma^a exp(2 pi i y / omega_modulus)`.
    pub omega_labels: BTreeMap<BigUint, BigUint>,
    pub omega_modulus: BigUint,
}

/// Internal data shared by distribution, sampling and forcing.
struct MeasurementContext {
    group: Group,
    /// phase exponent of the diagonalized operator
    a_diag: BigUint,
    /// lcm of the moduli
    d: BigUint,
    /// omega value of the transformed support offset
    omega_s: BigUint,
    /// the image omega(H') is the cyclic group generated by g_w inside Z_d
    g_w: BigUint,
    /// number of attainable outcomes, d / g_w
    count: BigUint,
}

impl MeasurementContext {
    /// Eigenvalue exponent of the outcome with omega value `y`.
    fn exponent_of(&self, y: &BigUint) -> BigUint {
        let step = self.group.double_order() / &self.d;
        (&self.a_diag + step * y) % self.group.double_order()
    }

    /// Omega value of an eigenvalue exponent, when attainable.
    fn omega_of(&self, k: &BigUint) -> Option<BigUint> {
        let two_g = self.group.double_order();
        let k = k % two_g;
        let delta = (&k + two_g - &self.a_diag) % two_g;
        let step = two_g / &self.d;
        if !(&delta % &step).is_zero() {
            return None;
        }
        let y = delta / step;
        // membership of y - omega_s in <g_w>
        let diff = (&y + &self.d - &self.omega_s) % &self.d;
        let gen = big_gcd(&self.g_w, &self.d);
        if gen.is_zero() {
            return if diff.is_zero() { Some(y) } else { None };
        }
        if (&diff % &gen).is_zero() {
            Some(y)
        } else {
            None
        }
    }
}

fn prepare_measurement(
    s: &StabilizerGroup,
    p: &PauliLabel,
) -> Result<MeasurementContext> {
    if s.group() != p.group() {
        return Err(Error::GroupMismatch);
    }
    if !s.is_unique()? {
        return Err(Error::NotAStabilizerState);
    }
    let group = s.group().clone();
    let diag = diagonalize_pauli(p)?;
    let mut transformed = s.clone();
    for gate in &diag.circuit {
        transformed = transformed.conjugated(gate)?;
    }
    let nf = transformed.normal_form()?;
    let g_d = diag.diagonal.z_part().clone();
    let d = group.lcm_exponent().clone();
    let omega_s = omega_exponent(&g_d, nf.offset())?;
    let mut g_w = d.clone();
    for h in nf.h_gens().generators() {
        let w = omega_exponent(&g_d, h)?;
        g_w = big_gcd(&g_w, &w);
    }
    let count = &d / big_gcd(&g_w, &d);
    Ok(MeasurementContext {
        group,
        a_diag: diag.diagonal.phase().value().clone(),
        d,
        omega_s,
        g_w,
        count,
    })
}

/// Exact outcome distribution of measuring `p` on the unique state
/// stabilized by `s`. The distribution is uniform over the attainable
/// outcomes; enumerating them costs one entry per outcome.
pub fn outcome_distribution(s: &StabilizerGroup, p: &PauliLabel) -> Result<OutcomeDistribution> {
    let ctx = prepare_measurement(s, p)?;
    let total = ctx
        .count
        .to_u64()
        .ok_or_else(|| Error::Parse("outcome distribution too large to enumerate".into()))?;
    let prob = Fraction::new(BigUint::one(), ctx.count.clone());
    let mut entries = BTreeMap::new();
    let mut omega_labels = BTreeMap::new();
    let step = big_gcd(&ctx.g_w, &ctx.d);
    for t in 0..total {
        let y = (&ctx.omega_s + &step * BigUint::from(t)) % &ctx.d;
        let k = ctx.exponent_of(&y);
        entries.insert(k.clone(), prob.clone());
        omega_labels.insert(k, y);
    }
    Ok(OutcomeDistribution {
        entries,
        omega_labels,
        omega_modulus: ctx.d,
    })
}

/// One measurement record: the eigenvalue exponent of the outcome and its
/// exact conditional probability.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub exponent: BigUint,
    pub probability: Fraction,
}

/// Samples a measurement outcome and updates the stabilizer group.
pub fn measure_sample<R: Rng + ?Sized>(
    s: &StabilizerGroup,
    p: &PauliLabel,
    rng: &mut R,
) -> Result<(MeasurementRecord, StabilizerGroup)> {
    let ctx = prepare_measurement(s, p)?;
    let t = rng.gen_biguint_below(&ctx.count);
    let step = big_gcd(&ctx.g_w, &ctx.d);
    let y = (&ctx.omega_s + step * t) % &ctx.d;
    let k = ctx.exponent_of(&y);
    let post = post_measurement_state(s, p, &k)?;
    Ok((
        MeasurementRecord {
            exponent: k,
            probability: Fraction::new(BigUint::one(), ctx.count),
        },
        post,
    ))
}

/// Forces a specific outcome (by eigenvalue exponent); errors when the
/// outcome has probability zero.
pub fn measure_forced(
    s: &StabilizerGroup,
    p: &PauliLabel,
    outcome: &BigUint,
) -> Result<(MeasurementRecord, StabilizerGroup)> {
    let ctx = prepare_measurement(s, p)?;
    if ctx.omega_of(outcome).is_none() {
        return Err(Error::ZeroProbabilityOutcome);
    }
    let k = outcome % ctx.group.double_order();
    let post = post_measurement_state(s, p, &k)?;
    Ok((
        MeasurementRecord {
            exponent: k,
            probability: Fraction::new(BigUint::one(), ctx.count),
        },
        post,
    ))
}

/// Post-measurement stabilizer `<conj(lambda) sigma, C_S(sigma)>`, with the
/// generating set compacted.
fn post_measurement_state(
    s: &StabilizerGroup,
    p: &PauliLabel,
    k: &BigUint,
) -> Result<StabilizerGroup> {
    let group = s.group().clone();
    let two_g = group.double_order();
    let neg_k = if (k % two_g).is_zero() {
        BigUint::zero()
    } else {
        two_g - (k % two_g)
    };
    let mut gens = vec![p.with_phase(&neg_k)];
    gens.extend(centralizer(s, p)?);
    let updated = StabilizerGroup::new_unchecked(group, gens).compact();
    debug_assert!(updated.is_unique().unwrap_or(false));
    Ok(updated)
}

/// Generators of the centralizer `C_S(sigma)`: all elements of `S` commuting
/// with `sigma = gamma^a Z(x) X(y)`. Computed in the doubled group `G x G`
/// as `K = <(y, -x)>-perp  intersect  <(g_i, h_i)>`, then pulled back to
/// stabilizer elements by decomposing each generator of `K` over the
/// generator label pairs.
pub fn centralizer(s: &StabilizerGroup, p: &PauliLabel) -> Result<Vec<PauliLabel>> {
    if s.group() != p.group() {
        return Err(Error::GroupMismatch);
    }
    let group = s.group().clone();
    let doubled = group.product(&group);
    let pairs: Vec<GroupElement> = s
        .generators()
        .iter()
        .map(|q| q.z_part().direct_sum(q.x_part(), &doubled))
        .collect();
    let pair_gens = SubgroupGens::new_unchecked(doubled.clone(), pairs.clone());
    let key = p.x_part().direct_sum(&p.z_part().neg(), &doubled);
    let key_gens = SubgroupGens::new_unchecked(doubled.clone(), vec![key]);
    let k_group = subgroup::intersect(&subgroup::orthogonal(&key_gens), &pair_gens)?;

    let mut out = Vec::new();
    for kgen in k_group.generators() {
        let w = subgroup::member_decompose(kgen, &pair_gens)?
            .expect("K lies inside the generator pair subgroup");
        let mut prod = PauliLabel::identity(&group);
        for (i, q) in s.generators().iter().enumerate() {
            prod = prod.multiply(&q.power(&w[i]))?;
        }
        if !prod.is_identity() {
            out.push(prod);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::initial_state_stabilizer;

    fn z(moduli: &[u64]) -> Group {
        Group::from_u64(moduli).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn coset_state_z4() -> (Group, StabilizerGroup) {
        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        (z4, s)
    }

    #[test]
    fn diagonalize_examples() {
        // already diagonal: empty circuit
        let z4 = z(&[4]);
        let p = PauliLabel::z(z4.element_from_u64(&[3]).unwrap());
        let r = diagonalize_pauli(&p).unwrap();
        assert!(r.circuit.is_empty());
        assert_eq!(r.diagonal, p);

        // X(1) over Z_2 becomes Z(1) via one Fourier gate
        let z2 = z(&[2]);
        let p = PauliLabel::x(z2.element_from_u64(&[1]).unwrap());
        let r = diagonalize_pauli(&p).unwrap();
        assert_eq!(r.circuit.len(), 1);
        assert_eq!(r.diagonal, PauliLabel::z(z2.element_from_u64(&[1]).unwrap()));

        // Z(2)X(2) over Z_4: diagonal with z-part gcd(2,2) = 2
        let p = PauliLabel::z(z4.element_from_u64(&[2]).unwrap())
            .multiply(&PauliLabel::x(z4.element_from_u64(&[2]).unwrap()))
            .unwrap();
        let r = diagonalize_pauli(&p).unwrap();
        assert!(r.diagonal.x_part().is_zero());
        assert_eq!(r.diagonal.z_part(), &z4.element_from_u64(&[2]).unwrap());
    }

    #[test]
    fn diagonalize_terminates_on_awkward_components() {
        // pairs that loop under plain Euclid with modular sign flips
        let z12 = z(&[12]);
        for jv in 0..12u64 {
            for kv in 0..12u64 {
                let p = PauliLabel::new(
                    z12.phase(BigInt::from(0)),
                    z12.element_from_u64(&[jv]).unwrap(),
                    z12.element_from_u64(&[kv]).unwrap(),
                )
                .unwrap();
                let r = diagonalize_pauli(&p).unwrap();
                assert!(r.diagonal.x_part().is_zero(), "j={jv} k={kv}");
                let expect = num_integer::gcd(jv, kv) % 12;
                assert_eq!(
                    r.diagonal.z_part(),
                    &z12.element_from_u64(&[expect]).unwrap(),
                    "j={jv} k={kv}"
                );
            }
        }
    }

    #[test]
    fn omega_examples() {
        let z4 = z(&[4]);
        assert!(omega_exponent(&z4.zero(), &z4.element_from_u64(&[3]).unwrap())
            .unwrap()
            .is_zero());
        assert_eq!(
            omega_exponent(
                &z4.element_from_u64(&[1]).unwrap(),
                &z4.element_from_u64(&[2]).unwrap()
            )
            .unwrap(),
            big(2)
        );
        let g = z(&[2, 4]);
        assert_eq!(
            omega_exponent(
                &g.element_from_u64(&[1, 1]).unwrap(),
                &g.element_from_u64(&[1, 0]).unwrap()
            )
            .unwrap(),
            big(2)
        );
    }

    #[test]
    fn distribution_examples() {
        // Z(e_1) on |0>: point mass at exponent 0
        let g = z(&[2, 3]);
        let s = initial_state_stabilizer(&g, &g.zero()).unwrap();
        let dist = outcome_distribution(&s, &PauliLabel::z(g.basis(0))).unwrap();
        assert_eq!(dist.entries.len(), 1);
        assert_eq!(
            dist.entries.get(&BigUint::zero()).unwrap(),
            &Fraction::new(big(1), big(1))
        );

        // coset state (|0>+|2>)/sqrt(2), measure Z(1): outcomes 1 and -1
        let (z4, s) = coset_state_z4();
        let dist =
            outcome_distribution(&s, &PauliLabel::z(z4.element_from_u64(&[1]).unwrap()))
                .unwrap();
        let half = Fraction::new(big(1), big(2));
        assert_eq!(dist.entries.len(), 2);
        assert_eq!(dist.entries.get(&big(0)).unwrap(), &half);
        assert_eq!(dist.entries.get(&big(4)).unwrap(), &half); // gamma^4 = -1

        // X(1) on |0> over Z_2: +/-1 each 1/2
        let z2 = z(&[2]);
        let s = initial_state_stabilizer(&z2, &z2.zero()).unwrap();
        let dist =
            outcome_distribution(&s, &PauliLabel::x(z2.element_from_u64(&[1]).unwrap()))
                .unwrap();
        assert_eq!(dist.entries.len(), 2);
        assert_eq!(dist.entries.get(&big(0)).unwrap(), &half);
        assert_eq!(dist.entries.get(&big(2)).unwrap(), &half);

        // probabilities sum to one exactly
        let mut num_sum = BigUint::zero();
        let den = big(2);
        for f in dist.entries.values() {
            assert_eq!(f.den, den);
            num_sum += &f.num;
        }
        assert_eq!(num_sum, den);
    }

    #[test]
    fn measure_examples() {
        // measure Z(1) on the Z_4 coset state, forced +1: collapses to |0>
        let (z4, s) = coset_state_z4();
        let z1 = PauliLabel::z(z4.element_from_u64(&[1]).unwrap());
        let (rec, post) = measure_forced(&s, &z1, &big(0)).unwrap();
        assert!(rec.exponent.is_zero());
        assert_eq!(rec.probability, Fraction::new(big(1), big(2)));
        let nf = post.normal_form().unwrap();
        assert!(nf.offset().is_zero());
        assert!(nf.order().is_one(), "post-state is |0>");

        // measuring a stabilizer element leaves the state unchanged
        let g = z(&[2, 3]);
        let s0 = initial_state_stabilizer(&g, &g.zero()).unwrap();
        let (rec, post) = measure_forced(&s0, &PauliLabel::z(g.basis(0)), &big(0)).unwrap();
        assert_eq!(rec.probability, Fraction::new(big(1), big(1)));
        let nf = post.normal_form().unwrap();
        assert!(nf.offset().is_zero());
        assert!(nf.order().is_one());

        // measure X(1) on |0> over Z_2 forced -1: the state (|0>-|1>)/sqrt 2
        let z2 = z(&[2]);
        let s0 = initial_state_stabilizer(&z2, &z2.zero()).unwrap();
        let x1 = PauliLabel::x(z2.element_from_u64(&[1]).unwrap());
        let (rec, post) = measure_forced(&s0, &x1, &big(2)).unwrap();
        assert_eq!(rec.exponent, big(2));
        let nf = post.normal_form().unwrap();
        assert_eq!(nf.order(), &big(2));
        let a0 = nf.amplitude(&z2.zero()).unwrap().unwrap();
        let a1 = nf
            .amplitude(&z2.element_from_u64(&[1]).unwrap())
            .unwrap()
            .unwrap();
        let diff = (a1.value() + z2.double_order() - a0.value()) % z2.double_order();
        assert_eq!(diff, big(2), "relative phase -1");

        // forcing an unattainable outcome fails
        assert_eq!(
            measure_forced(&s0, &x1, &big(1)).unwrap_err(),
            Error::ZeroProbabilityOutcome
        );
    }

    #[test]
    fn repeat_measurement_is_idempotent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (z4, s) = coset_state_z4();
        let z1 = PauliLabel::z(z4.element_from_u64(&[1]).unwrap());
        let (rec, post) = measure_sample(&s, &z1, &mut rng).unwrap();
        let dist = outcome_distribution(&post, &z1).unwrap();
        assert_eq!(dist.entries.len(), 1);
        assert!(dist.entries.contains_key(&rec.exponent));
        let (rec2, post2) = measure_sample(&post, &z1, &mut rng).unwrap();
        assert_eq!(rec2.exponent, rec.exponent);
        assert_eq!(rec2.probability, Fraction::new(big(1), big(1)));
        // the stabilizer group is unchanged as a set
        let before: std::collections::BTreeSet<_> = crate::dense::enumerate_stabilizer(&post)
            .iter()
            .map(|p| format!("{p:?}"))
            .collect();
        let after: std::collections::BTreeSet<_> = crate::dense::enumerate_stabilizer(&post2)
            .iter()
            .map(|p| format!("{p:?}"))
            .collect();
        assert_eq!(before, after);
    }

    #[test]
    fn centralizer_examples() {
        // p commutes with everything: centralizer regenerates S
        let g = z(&[2, 3]);
        let s = initial_state_stabilizer(&g, &g.zero()).unwrap();
        let cz = centralizer(&s, &PauliLabel::z(g.basis(0))).unwrap();
        let regen = StabilizerGroup::new_unchecked(g.clone(), cz);
        let before = crate::dense::enumerate_stabilizer(&s).len();
        let after = crate::dense::enumerate_stabilizer(&regen).len();
        assert_eq!(before, after);

        // Z_4, S = <X(2), Z(2)>, p = Z(1): centralizer is <Z(2)>
        let (z4, s) = coset_state_z4();
        let cent = centralizer(&s, &PauliLabel::z(z4.element_from_u64(&[1]).unwrap())).unwrap();
        for c in &cent {
            assert!(c
                .commutes(&PauliLabel::z(z4.element_from_u64(&[1]).unwrap()))
                .unwrap());
        }
        let regen = StabilizerGroup::new_unchecked(z4.clone(), cent);
        let elems = crate::dense::enumerate_stabilizer(&regen);
        assert_eq!(elems.len(), 2); // {I, Z(2)}

        // Z_2, S = <Z(1)>, p = X(1): trivial centralizer
        let z2 = z(&[2]);
        let s = initial_state_stabilizer(&z2, &z2.zero()).unwrap();
        let cent = centralizer(&s, &PauliLabel::x(z2.element_from_u64(&[1]).unwrap())).unwrap();
        assert!(cent.is_empty());
    }
}
