//! Stabilizer groups over a finite Abelian group: validation, label groups,
//! the structure and uniqueness tests, and the normal form of stabilizer
//! states with exact amplitude queries and support sampling.
//!
//! A stabilizer group is handed around as a generating set of Pauli labels.
//! Its label groups are `H` (the X-components of all elements) and `D` (the
//! Z-labels of its diagonal elements); the stabilized subspace has dimension
//! `|D-perp| / |H|`, and is one-dimensional exactly when `H = D-perp`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{self, GateEncoding};
use crate::group::{character_exponent, Group, GroupElement, PhaseExponent};
use crate::pauli::PauliLabel;
use crate::solver::{self, HomMatrix};
use crate::subgroup::{self, SubgroupGens};

/// Generating set of a stabilizer group. Constructing one checks pairwise
/// commutation and runs the structure test, rejecting Abelian Pauli groups
/// with no common +1 eigenstate (such as `{I, -I}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGroup {
    group: Group,
    generators: Vec<PauliLabel>,
}

/// The label groups of a stabilizer group: `H`, `D`, and labels generating
/// the diagonal subgroup itself.
#[derive(Debug, Clone)]
pub struct LabelGroups {
    pub h_gens: SubgroupGens,
    pub d_gens: SubgroupGens,
    pub diag_gens: Vec<PauliLabel>,
}

/// Result of the structure test: a support representative, generators of
/// `D-perp` (the support is `representative + <kernel>`), and the dimension
/// of the stabilized subspace.
#[derive(Debug, Clone)]
pub struct SupportInfo {
    pub representative: GroupElement,
    pub kernel: SubgroupGens,
    pub dim: BigUint,
}

impl StabilizerGroup {
    /// Validates a generating set: pairwise commutation plus a nonempty
    /// common +1 eigenspace.
    pub fn new(group: Group, generators: Vec<PauliLabel>) -> Result<Self> {
        for p in &generators {
            if p.group() != &group {
                return Err(Error::GroupMismatch);
            }
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if !generators[i].commutes(&generators[j])? {
                    return Err(Error::NonCommutingGenerators(i, j));
                }
            }
        }
        let s = StabilizerGroup { group, generators };
        s.structure_test()?; // errors with EmptySupport on invalid groups
        Ok(s)
    }

    pub(crate) fn new_unchecked(group: Group, generators: Vec<PauliLabel>) -> Self {
        StabilizerGroup { group, generators }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generators(&self) -> &[PauliLabel] {
        &self.generators
    }

    /// Conjugates every generator: the stabilizer of `U|psi>`.
    pub fn conjugated(&self, gate: &GateEncoding) -> Result<StabilizerGroup> {
        let generators = self
            .generators
            .iter()
            .map(|p| gates::conjugate(gate, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilizerGroup {
            group: self.group.clone(),
            generators,
        })
    }

    /// Label groups `H`, `D` and generators of the diagonal subgroup.
    ///
    /// `H` is generated by the X-components of the generators. The diagonal
    /// subgroup is the image of the kernel of the exponent map
    /// `Z_{2g}^k -> G, v -> sum v_i h_i` under `v -> prod sigma_i^{v_i}`.
    pub fn label_groups(&self) -> LabelGroups {
        let group = &self.group;
        let h_list: Vec<GroupElement> = self
            .generators
            .iter()
            .map(|p| p.x_part().clone())
            .filter(|h| !h.is_zero())
            .collect();
        let h_gens = SubgroupGens::new_unchecked(group.clone(), h_list);

        let diag_gens: Vec<PauliLabel> = if self.generators.is_empty() {
            Vec::new()
        } else {
            let cols: Vec<GroupElement> = self
                .generators
                .iter()
                .map(|p| p.x_part().clone())
                .collect();
            let domain = Group::new(vec![
                group.double_order().clone();
                self.generators.len()
            ])
            .expect("2*order >= 2");
            let expo = HomMatrix::from_columns(domain, group.clone(), &cols)
                .expect("x-components satisfy the homomorphism condition");
            let sol = solver::solve(&expo, &group.zero())
                .expect("codomain matches")
                .expect("homogeneous system");
            sol.kernel
                .generators()
                .iter()
                .map(|v| {
                    let mut prod = PauliLabel::identity(group);
                    for (i, p) in self.generators.iter().enumerate() {
                        prod = prod
                            .multiply(&p.power(v.residue(i)))
                            .expect("same group");
                    }
                    debug_assert!(prod.x_part().is_zero());
                    prod
                })
                .filter(|p| !p.is_identity())
                .collect()
        };

        let d_list: Vec<GroupElement> = diag_gens
            .iter()
            .map(|p| p.z_part().clone())
            .filter(|g| !g.is_zero())
            .collect();
        let d_gens = SubgroupGens::new_unchecked(group.clone(), d_list);

        LabelGroups {
            h_gens,
            d_gens,
            diag_gens,
        }
    }

    /// Solves the support equations `gamma^{a_i} chi_{g_i}(x) = 1` over the
    /// diagonal generators. Errors with [`Error::EmptySupport`] when they
    /// are inconsistent, which certifies that no common +1 eigenstate
    /// exists.
    pub fn structure_test(&self) -> Result<SupportInfo> {
        let lg = self.label_groups();
        self.structure_test_with(&lg)
    }

    fn structure_test_with(&self, lg: &LabelGroups) -> Result<SupportInfo> {
        let group = &self.group;
        let two_g = group.double_order();
        let g_list: Vec<GroupElement> = lg
            .diag_gens
            .iter()
            .map(|p| p.z_part().clone())
            .collect();
        let a_list: Vec<BigUint> = lg
            .diag_gens
            .iter()
            .map(|p| {
                let a = p.phase().value();
                if a.is_zero() {
                    BigUint::zero()
                } else {
                    two_g - a
                }
            })
            .collect();
        let (representative, kernel) =
            subgroup::solve_character_system(group, &g_list, &a_list)?
                .ok_or(Error::EmptySupport)?;
        let kernel_order = subgroup::subgroup_order(&kernel);
        let h_order = subgroup::subgroup_order(&lg.h_gens);
        debug_assert!((&kernel_order % &h_order).is_zero());
        let dim = kernel_order / h_order;
        Ok(SupportInfo {
            representative,
            kernel,
            dim,
        })
    }

    /// Uniqueness test: the stabilized space is one-dimensional iff
    /// `H = D-perp`.
    pub fn is_unique(&self) -> Result<bool> {
        let lg = self.label_groups();
        let dperp = subgroup::orthogonal(&lg.d_gens);
        subgroup::subgroup_eq(&lg.h_gens, &dperp)
    }

    /// Exact order of the stabilizer group: `|S| = |H| * |D|`.
    pub fn order(&self) -> BigUint {
        let lg = self.label_groups();
        subgroup::subgroup_order(&lg.h_gens) * subgroup::subgroup_order(&lg.d_gens)
    }

    /// Rewrites the generating set with at most `2 * rank` generators: a
    /// witness per reduced `H` generator plus reduced diagonal generators.
    /// The generated group is unchanged.
    pub fn compact(&self) -> StabilizerGroup {
        let group = &self.group;
        let lg = self.label_groups();

        let x_parts = SubgroupGens::new_unchecked(
            group.clone(),
            self.generators.iter().map(|p| p.x_part().clone()).collect(),
        );
        let mut gens: Vec<PauliLabel> = Vec::new();
        if !self.generators.is_empty() {
            for h in subgroup::reduce_generators(&x_parts).generators() {
                let w = subgroup::member_decompose(h, &x_parts)
                    .expect("same group")
                    .expect("reduced generators lie in the subgroup");
                let mut prod = PauliLabel::identity(group);
                for (i, p) in self.generators.iter().enumerate() {
                    prod = prod.multiply(&p.power(&w[i])).expect("same group");
                }
                debug_assert_eq!(prod.x_part(), h);
                gens.push(prod);
            }
        }
        if !lg.diag_gens.is_empty() {
            let z_parts = SubgroupGens::new_unchecked(
                group.clone(),
                lg.diag_gens.iter().map(|p| p.z_part().clone()).collect(),
            );
            for dz in subgroup::reduce_generators(&z_parts).generators() {
                let w = subgroup::member_decompose(dz, &z_parts)
                    .expect("same group")
                    .expect("reduced generators lie in the subgroup");
                let mut prod = PauliLabel::identity(group);
                for (i, p) in lg.diag_gens.iter().enumerate() {
                    prod = prod.multiply(&p.power(&w[i])).expect("same group");
                }
                gens.push(prod);
            }
        }
        gens.retain(|p| !p.is_identity());
        StabilizerGroup {
            group: group.clone(),
            generators: gens,
        }
    }

    /// Normal form of the unique stabilized state. Errors when the code
    /// dimension exceeds one.
    pub fn normal_form(&self) -> Result<NormalFormState> {
        let lg = self.label_groups();
        let support = self.structure_test_with(&lg)?;
        if !support.dim.is_one() {
            return Err(Error::NotAStabilizerState);
        }
        let witnesses: Vec<PauliLabel> = self.generators.clone();
        let h_gens = SubgroupGens::new_unchecked(
            self.group.clone(),
            witnesses.iter().map(|p| p.x_part().clone()).collect(),
        );
        let order = subgroup::subgroup_order(&lg.h_gens);
        Ok(NormalFormState {
            group: self.group.clone(),
            offset: support.representative,
            h_gens,
            witnesses,
            order,
        })
    }
}

/// Normal form of a stabilizer state: support offset `s`, generators of the
/// label group `H` with one witness stabilizer element per generator, and
/// the exact support size `|H|`. The state is
/// `1/sqrt(|H|) * sum_{h in H} xi(h) |s+h>` with `xi` the quadratic function
/// realized by the witnesses, gauge-fixed to `xi(0) = 1`.
#[derive(Debug, Clone)]
pub struct NormalFormState {
    group: Group,
    offset: GroupElement,
    h_gens: SubgroupGens,
    witnesses: Vec<PauliLabel>,
    order: BigUint,
}

impl NormalFormState {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn offset(&self) -> &GroupElement {
        &self.offset
    }

    pub fn h_gens(&self) -> &SubgroupGens {
        &self.h_gens
    }

    pub fn witnesses(&self) -> &[PauliLabel] {
        &self.witnesses
    }

    /// Support size `|H|`; every nonzero amplitude has squared magnitude
    /// `1 / |H|`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Relative phase `xi(h)` for `h` in the support group, or `None`
    /// outside it: find a stabilizer element `sigma(a', g', h)` by
    /// decomposing `h` over the witnesses, then
    /// `xi(h) = gamma^{a'} chi_{s+h}(g')`.
    pub fn relative_phase(&self, h: &GroupElement) -> Result<Option<PhaseExponent>> {
        let Some(w) = subgroup::member_decompose(h, &self.h_gens)? else {
            return Ok(None);
        };
        let mut sigma = PauliLabel::identity(&self.group);
        for (i, p) in self.witnesses.iter().enumerate() {
            sigma = sigma.multiply(&p.power(&w[i]))?;
        }
        debug_assert_eq!(sigma.x_part(), h);
        let target = self.offset.add(h)?;
        let chi = character_exponent(sigma.z_part(), &target)?;
        Ok(Some(sigma.phase().add_signed(&(BigInt::from(chi) * 2))))
    }

    /// Exact amplitude `<g|psi>`: the phase exponent of a scalar with
    /// squared magnitude `1/|H|`, or `None` when `g` lies outside the
    /// support coset.
    pub fn amplitude(&self, g: &GroupElement) -> Result<Option<PhaseExponent>> {
        let h = g.sub(&self.offset)?;
        self.relative_phase(&h)
    }

    /// Draws from the Born distribution: uniform over the support coset.
    pub fn sample_support<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        self.offset
            .add(&subgroup::uniform_sample(&self.h_gens, rng))
            .expect("same group")
    }

    /// The description of `xi` relative to a reduced generating set of `H`:
    /// its values on generators, doubled generators and generator pairs.
    pub fn xi_description(
        &self,
    ) -> Result<(Vec<GroupElement>, Vec<BigUint>, Vec<BigUint>, Vec<BigUint>)> {
        let gens = subgroup::reduce_generators(&self.h_gens);
        let list = gens.generators().to_vec();
        let mut diag = Vec::new();
        let mut double = Vec::new();
        let mut pair = Vec::new();
        let phase_of = |h: &GroupElement| -> Result<BigUint> {
            Ok(self
                .relative_phase(h)?
                .expect("h lies in the support group")
                .value()
                .clone())
        };
        for (i, h) in list.iter().enumerate() {
            diag.push(phase_of(h)?);
            double.push(phase_of(&h.add(h)?)?);
            for hj in list.iter().skip(i + 1) {
                pair.push(phase_of(&h.add(hj)?)?);
            }
        }
        Ok((list, diag, double, pair))
    }
}

/// Stabilizer of the basis state `|x>`: generators
/// `chi_{e_i}(x)^{-1} Z(e_i)`, with labels
/// `(-2 (order/d_i) x(i) mod 2*order, e_i, 0)`.
pub fn initial_state_stabilizer(group: &Group, x: &GroupElement) -> Result<StabilizerGroup> {
    if x.group() != group {
        return Err(Error::GroupMismatch);
    }
    let mut gens = Vec::new();
    for i in 0..group.rank() {
        if group.modulus(i).is_one() {
            continue;
        }
        let e_i = group.basis(i);
        let chi = character_exponent(&e_i, x)?;
        let phase = group.phase(BigInt::from(chi) * -2);
        gens.push(PauliLabel::new(phase, e_i, group.zero())?);
    }
    Ok(StabilizerGroup::new_unchecked(group.clone(), gens))
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

    fn label(group: &Group, a: u64, g: &[u64], h: &[u64]) -> PauliLabel {
        PauliLabel::new(
            group.phase(BigInt::from(a)),
            group.element_from_u64(g).unwrap(),
            group.element_from_u64(h).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let z2 = z(&[2]);
        // {Z(1)} stabilizes |0>
        assert!(StabilizerGroup::new(
            z2.clone(),
            vec![PauliLabel::z(z2.element_from_u64(&[1]).unwrap())]
        )
        .is_ok());
        // {-I} is rejected: no +1 eigenstate
        let minus_i = label(&z2, 2, &[0], &[0]);
        assert_eq!(
            StabilizerGroup::new(z2.clone(), vec![minus_i]).unwrap_err(),
            Error::EmptySupport
        );
        // {Z(1), X(1)} over Z_2 do not commute
        let err = StabilizerGroup::new(
            z2.clone(),
            vec![
                PauliLabel::z(z2.element_from_u64(&[1]).unwrap()),
                PauliLabel::x(z2.element_from_u64(&[1]).unwrap()),
            ],
        )
        .unwrap_err();
        assert_eq!(err, Error::NonCommutingGenerators(0, 1));
    }

    #[test]
    fn label_groups_examples() {
        // all-Z stabilizer: H trivial, D the full group
        let g = z(&[2, 3]);
        let s = initial_state_stabilizer(&g, &g.zero()).unwrap();
        let lg = s.label_groups();
        assert!(subgroup::subgroup_order(&lg.h_gens).is_one());
        assert_eq!(subgroup::subgroup_order(&lg.d_gens), big(6));

        // Z_4, <X(2), Z(2)>: H = <2>, D = <2>
        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        let lg = s.label_groups();
        assert_eq!(subgroup::subgroup_order(&lg.h_gens), big(2));
        assert_eq!(subgroup::subgroup_order(&lg.d_gens), big(2));

        // Z_2, <X(1)>: H = <1>, D trivial
        let z2 = z(&[2]);
        let s = StabilizerGroup::new(
            z2.clone(),
            vec![PauliLabel::x(z2.element_from_u64(&[1]).unwrap())],
        )
        .unwrap();
        let lg = s.label_groups();
        assert_eq!(subgroup::subgroup_order(&lg.h_gens), big(2));
        assert!(subgroup::subgroup_order(&lg.d_gens).is_one());
    }

    #[test]
    fn structure_test_examples() {
        let g = z(&[2, 3]);
        let s = initial_state_stabilizer(&g, &g.zero()).unwrap();
        let info = s.structure_test().unwrap();
        assert!(info.representative.is_zero());
        assert!(info.dim.is_one());
        assert!(subgroup::subgroup_order(&info.kernel).is_one());

        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        let info = s.structure_test().unwrap();
        assert!(info.dim.is_one());
        // support {0, 2}
        let support: Vec<u64> = z4
            .iter_elements()
            .filter(|x| {
                subgroup::member_decompose(&x.sub(&info.representative).unwrap(), &info.kernel)
                    .unwrap()
                    .is_some()
            })
            .map(|x| z4.index_of(&x).to_string().parse().unwrap())
            .collect();
        assert_eq!(support, vec![0, 2]);

        // -Z(1) over Z_2 stabilizes |1>
        let z2 = z(&[2]);
        let s = StabilizerGroup::new(z2.clone(), vec![label(&z2, 2, &[1], &[0])]).unwrap();
        let info = s.structure_test().unwrap();
        assert_eq!(info.representative, z2.element_from_u64(&[1]).unwrap());
        assert!(info.dim.is_one());
    }

    #[test]
    fn uniqueness_and_order_examples() {
        let z2 = z(&[2]);
        let s = StabilizerGroup::new(
            z2.clone(),
            vec![PauliLabel::z(z2.element_from_u64(&[1]).unwrap())],
        )
        .unwrap();
        assert!(s.is_unique().unwrap());
        assert_eq!(s.order(), big(2));

        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![PauliLabel::z(z4.element_from_u64(&[2]).unwrap())],
        )
        .unwrap();
        assert!(!s.is_unique().unwrap());
        assert_eq!(s.structure_test().unwrap().dim, big(2));

        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        assert!(s.is_unique().unwrap());
        assert_eq!(s.order(), big(4));
    }

    #[test]
    fn normal_form_examples() {
        // |00> over Z_2 x Z_2
        let g = z(&[2, 2]);
        let nf = initial_state_stabilizer(&g, &g.zero())
            .unwrap()
            .normal_form()
            .unwrap();
        assert!(nf.offset().is_zero());
        assert!(nf.order().is_one());
        assert_eq!(
            nf.amplitude(&g.zero()).unwrap().unwrap().value(),
            &BigUint::zero()
        );
        assert!(nf
            .amplitude(&g.element_from_u64(&[1, 0]).unwrap())
            .unwrap()
            .is_none());

        // (|0> + |2>)/sqrt(2) over Z_4
        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        let nf = s.normal_form().unwrap();
        assert_eq!(nf.order(), &big(2));
        for target in [0u64, 2] {
            let amp = nf
                .amplitude(&z4.element_from_u64(&[target]).unwrap())
                .unwrap()
                .unwrap();
            assert!(amp.is_zero(), "xi must be identically one");
        }
        assert!(nf
            .amplitude(&z4.element_from_u64(&[1]).unwrap())
            .unwrap()
            .is_none());

        // dim > 1 is rejected
        let code = StabilizerGroup::new(
            z4.clone(),
            vec![PauliLabel::z(z4.element_from_u64(&[2]).unwrap())],
        )
        .unwrap();
        assert_eq!(code.normal_form().unwrap_err(), Error::NotAStabilizerState);
    }

    #[test]
    fn bell_normal_form() {
        let g = z(&[2, 2]);
        let s = StabilizerGroup::new(
            g.clone(),
            vec![
                PauliLabel::x(g.element_from_u64(&[1, 1]).unwrap()),
                PauliLabel::z(g.element_from_u64(&[1, 1]).unwrap()),
            ],
        )
        .unwrap();
        let nf = s.normal_form().unwrap();
        assert_eq!(nf.order(), &big(2));
        let a00 = nf.amplitude(&g.zero()).unwrap().unwrap();
        let a11 = nf
            .amplitude(&g.element_from_u64(&[1, 1]).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(a00.value(), a11.value(), "equal Bell amplitudes");
        assert!(nf
            .amplitude(&g.element_from_u64(&[1, 0]).unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn initial_state_examples() {
        let z2 = z(&[2]);
        let s = initial_state_stabilizer(&z2, &z2.element_from_u64(&[1]).unwrap()).unwrap();
        assert_eq!(s.generators(), &[label(&z2, 2, &[1], &[0])]);

        let z4 = z(&[4]);
        let s = initial_state_stabilizer(&z4, &z4.element_from_u64(&[1]).unwrap()).unwrap();
        assert_eq!(s.generators(), &[label(&z4, 6, &[1], &[0])]);
    }

    #[test]
    fn sample_support_distribution() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let z4 = z(&[4]);
        let s = StabilizerGroup::new(
            z4.clone(),
            vec![
                PauliLabel::x(z4.element_from_u64(&[2]).unwrap()),
                PauliLabel::z(z4.element_from_u64(&[2]).unwrap()),
            ],
        )
        .unwrap();
        let nf = s.normal_form().unwrap();
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let g = nf.sample_support(&mut rng);
            let idx: usize = z4.index_of(&g).to_string().parse().unwrap();
            counts[idx] += 1;
        }
        assert_eq!(counts[1] + counts[3], 0);
        let tv = ((counts[0] as f64 / 10_000.0 - 0.5).abs()
            + (counts[2] as f64 / 10_000.0 - 0.5).abs())
            / 2.0;
        assert!(tv < 0.05, "tv={tv}");
    }

    #[test]
    fn compact_preserves_generated_group() {
        let z4 = z(&[4]);
        // redundant generating set of the coset-state stabilizer
        let x2 = PauliLabel::x(z4.element_from_u64(&[2]).unwrap());
        let z2e = PauliLabel::z(z4.element_from_u64(&[2]).unwrap());
        let extra = x2.multiply(&z2e).unwrap();
        let s = StabilizerGroup::new(z4.clone(), vec![x2, z2e, extra]).unwrap();
        let c = s.compact();
        assert!(c.generators().len() <= 2 * z4.rank());
        let before = crate::dense::enumerate_stabilizer(&s);
        let after = crate::dense::enumerate_stabilizer(&c);
        assert_eq!(before.len(), after.len());
        let key = |p: &PauliLabel| {
            (
                p.phase().value().clone(),
                z4.index_of(p.z_part()),
                z4.index_of(p.x_part()),
            )
        };
        let before: std::collections::BTreeSet<_> = before.iter().map(key).collect();
        let after: std::collections::BTreeSet<_> = after.iter().map(key).collect();
        assert_eq!(before, after);
    }
}
