//! Subgroup algorithms: membership with decomposition, exact order,
//! intersection, orthogonal subgroups, character systems and subgroup
//! hiding. Everything reduces to [`crate::solver`] systems; coefficients for
//! subgroup combinations live in `Z_d` with `d` the lcm of the group moduli.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::solver::{self, HomMatrix, Mat};

/// A subgroup described by a finite generating set. The empty list denotes
/// the trivial subgroup. Generating sets are unordered and non-canonical:
/// set equality of the generated subgroups, not list equality, is the
/// contract everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGens {
    group: Group,
    generators: Vec<GroupElement>,
}

impl SubgroupGens {
    pub fn new(group: Group, generators: Vec<GroupElement>) -> Result<Self> {
        for g in &generators {
            if g.group() != &group {
                return Err(Error::GroupMismatch);
            }
        }
        Ok(SubgroupGens { group, generators })
    }

    pub(crate) fn new_unchecked(group: Group, generators: Vec<GroupElement>) -> Self {
        SubgroupGens { group, generators }
    }

    pub fn trivial(group: Group) -> Self {
        SubgroupGens {
            group,
            generators: Vec::new(),
        }
    }

    /// Generating set of the whole group: the canonical basis elements.
    pub fn full(group: &Group) -> Self {
        let generators = (0..group.rank())
            .map(|i| group.basis(i))
            .filter(|e| !e.is_zero())
            .collect();
        SubgroupGens {
            group: group.clone(),
            generators,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn is_trivial_list(&self) -> bool {
        self.generators.iter().all(|g| g.is_zero())
    }

    /// Matrix whose columns are the generators, as a homomorphism
    /// `Z_d^r -> G` with `d` the lcm of the moduli.
    fn combination_hom(&self) -> HomMatrix {
        let r = self.generators.len();
        debug_assert!(r > 0);
        let d = self.group.lcm_exponent().clone();
        let domain = Group::new(vec![d; r]).expect("lcm >= 1");
        HomMatrix::from_columns(domain, self.group.clone(), &self.generators)
            .expect("generator columns satisfy the homomorphism condition")
    }

    /// Enumerates every element of the subgroup. Small groups only; used by
    /// tests and oracles.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut frontier = vec![self.group.zero()];
        while let Some(x) = frontier.pop() {
            if !seen.insert(self.group.index_of(&x)) {
                continue;
            }
            out.push(x.clone());
            for g in &self.generators {
                frontier.push(x.add(g).expect("same group"));
            }
        }
        out.sort_by_key(|x| self.group.index_of(x));
        out
    }
}

/// Decides membership `b in <H>` and returns combination coefficients
/// `w_i` (in `Z_d`, `d` the lcm of the moduli) with `b = sum w_i h_i`.
pub fn member_decompose(b: &GroupElement, h: &SubgroupGens) -> Result<Option<Vec<BigUint>>> {
    if b.group() != h.group() {
        return Err(Error::GroupMismatch);
    }
    if h.generators().is_empty() {
        return Ok(if b.is_zero() { Some(Vec::new()) } else { None });
    }
    let a = h.combination_hom();
    Ok(solver::solve(&a, b)?.map(|sol| sol.particular.residues().to_vec()))
}

/// Exact order of the generated subgroup, via kernel counting of the
/// combination homomorphism.
pub fn subgroup_order(h: &SubgroupGens) -> BigUint {
    if h.generators().is_empty() {
        return BigUint::one();
    }
    let a = h.combination_hom();
    let kernel = solver::count_solutions(&a, &a.codomain().zero())
        .expect("zero is in the codomain");
    let mut dr = BigUint::one();
    for _ in 0..h.generators().len() {
        dr *= h.group().lcm_exponent();
    }
    debug_assert!((&dr % &kernel).is_zero());
    dr / kernel
}

/// Generating set of the intersection of two subgroups.
pub fn intersect(h: &SubgroupGens, k: &SubgroupGens) -> Result<SubgroupGens> {
    if h.group() != k.group() {
        return Err(Error::GroupMismatch);
    }
    let group = h.group().clone();
    if h.generators().is_empty() || k.generators().is_empty() {
        return Ok(SubgroupGens::trivial(group));
    }
    let mut cols: Vec<GroupElement> = h.generators().to_vec();
    cols.extend_from_slice(k.generators());
    let d = group.lcm_exponent().clone();
    let domain = Group::new(vec![d; cols.len()]).expect("lcm >= 1");
    let joint = HomMatrix::from_columns(domain, group.clone(), &cols)
        .expect("generator columns are homomorphic");
    let sol = solver::solve(&joint, &group.zero())?
        .expect("homogeneous systems are solvable");
    let gens = sol
        .kernel
        .generators()
        .iter()
        .map(|xy| {
            // image of the H-coefficient block of the kernel generator
            let mut acc = group.zero();
            for (i, hg) in h.generators().iter().enumerate() {
                acc = acc
                    .add(&hg.scalar_mul_uint(xy.residue(i)))
                    .expect("same group");
            }
            acc
        })
        .filter(|g| !g.is_zero())
        .collect();
    Ok(SubgroupGens::new_unchecked(group, gens))
}

/// Matrix of the homomorphism `g -> (chi_{h_i}(g))_i`, written additively:
/// `Omega(i, j) = (order/d_j) * h_i(j)`, mapping `G -> Z_order^r`.
fn character_matrix(group: &Group, h_list: &[GroupElement]) -> HomMatrix {
    let order = group.order().clone();
    let rows: Vec<Vec<BigUint>> = h_list
        .iter()
        .map(|h| {
            (0..group.rank())
                .map(|j| ((&order / group.modulus(j)) * h.residue(j)) % &order)
                .collect()
        })
        .collect();
    let codomain = Group::new(vec![order; h_list.len()]).expect("order >= 1");
    HomMatrix::new(group.clone(), codomain, &rows)
        .expect("character matrix satisfies the homomorphism condition")
}

/// Solves the simultaneous character equations `chi_{h_i}(g) = gamma^{a_i}`
/// for `g in G`. Exponents `a_i` are taken modulo `2*order`; any odd `a_i`
/// makes the system unsolvable outright.
pub fn solve_character_system(
    group: &Group,
    h_list: &[GroupElement],
    a_list: &[BigUint],
) -> Result<Option<(GroupElement, SubgroupGens)>> {
    if h_list.len() != a_list.len() {
        return Err(Error::LengthMismatch(h_list.len(), a_list.len()));
    }
    for h in h_list {
        if h.group() != group {
            return Err(Error::GroupMismatch);
        }
    }
    if h_list.is_empty() {
        return Ok(Some((group.zero(), SubgroupGens::full(group))));
    }
    let two = BigUint::from(2u32);
    let mut b = Vec::with_capacity(a_list.len());
    for a in a_list {
        let a = a % group.double_order();
        if (&a % &two).is_one() {
            return Ok(None);
        }
        b.push((a / &two) % group.order());
    }
    let omega = character_matrix(group, h_list);
    let b = omega.codomain().element(&b).expect("b reduced");
    Ok(solver::solve(&omega, &b)?.map(|sol| (sol.particular, sol.kernel)))
}

/// Generating set of the orthogonal subgroup
/// `H-perp = { g : chi_h(g) = 1 for all h in H }`.
pub fn orthogonal(h: &SubgroupGens) -> SubgroupGens {
    let group = h.group();
    if h.generators().is_empty() {
        return SubgroupGens::full(group);
    }
    let zeros = vec![BigUint::zero(); h.generators().len()];
    solve_character_system(group, h.generators(), &zeros)
        .expect("lengths match")
        .expect("homogeneous character systems are solvable")
        .1
}

/// Matrix of a homomorphism `G -> Z_order^s` whose kernel is exactly the
/// subgroup generated by `h` (the hiding homomorphism): the character matrix
/// of a generating set of `H-perp`.
pub fn hiding_hom(h: &SubgroupGens) -> HomMatrix {
    let group = h.group();
    let perp = orthogonal(h);
    if perp.generators().is_empty() {
        // kernel must be the whole group: one row of zeros
        let codomain = Group::new(vec![group.order().clone()]).expect("order >= 1");
        return HomMatrix::new(
            group.clone(),
            codomain,
            &[vec![BigUint::zero(); group.rank()]],
        )
        .expect("zero matrix is a homomorphism");
    }
    character_matrix(group, perp.generators())
}

/// Draws an exactly-uniform element of the generated subgroup: each
/// coefficient `k_i` is uniform in `Z_d`, and the combination map
/// `Z_d^r -> H` is a surjective homomorphism.
pub fn uniform_sample<R: Rng + ?Sized>(h: &SubgroupGens, rng: &mut R) -> GroupElement {
    let mut acc = h.group().zero();
    let d = h.group().lcm_exponent();
    for g in h.generators() {
        let k = rng.gen_biguint_below(d);
        acc = acc.add(&g.scalar_mul_uint(&k)).expect("same group");
    }
    acc
}

/// Rewrites a generating set as at most `rank(G)` generators of the same
/// subgroup, via the image basis of the combination homomorphism.
pub fn reduce_generators(h: &SubgroupGens) -> SubgroupGens {
    let group = h.group().clone();
    let live: Vec<&GroupElement> = h.generators().iter().filter(|g| !g.is_zero()).collect();
    if live.is_empty() {
        return SubgroupGens::trivial(group);
    }
    let m = group.rank();
    let r = live.len();
    let d = group.lcm_exponent().clone();
    // enlarged matrix [A | D] over Z_d; its image projects onto <H>
    let mut mat = Mat::zeros(m, r + m);
    for (j, g) in live.iter().enumerate() {
        for i in 0..m {
            mat[(i, j)] = g.residue(i) % &d;
        }
    }
    for i in 0..m {
        mat[(i, r + i)] = group.modulus(i) % &d;
    }
    let snf = solver::smith_normal_form(&mat, &d);
    let mut gens = Vec::new();
    for t in 0..snf.rank {
        let s_t = snf.s[(t, t)].clone();
        let residues: Vec<BigUint> = (0..m)
            .map(|i| (&snf.u_inv[(i, t)] * &s_t) % group.modulus(i))
            .collect();
        let g = group.element(&residues).expect("reduced");
        if !g.is_zero() {
            gens.push(g);
        }
    }
    SubgroupGens::new_unchecked(group, gens)
}

/// Set equality of two generated subgroups, decided by mutual membership of
/// the generating sets.
pub fn subgroup_eq(h: &SubgroupGens, k: &SubgroupGens) -> Result<bool> {
    for g in h.generators() {
        if member_decompose(g, k)?.is_none() {
            return Ok(false);
        }
    }
    for g in k.generators() {
        if member_decompose(g, h)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(moduli: &[u64]) -> Group {
        Group::from_u64(moduli).unwrap()
    }

    fn gens(group: &Group, elems: &[&[u64]]) -> SubgroupGens {
        let list = elems
            .iter()
            .map(|e| group.element_from_u64(e).unwrap())
            .collect();
        SubgroupGens::new(group.clone(), list).unwrap()
    }

    #[test]
    fn member_decompose_examples() {
        let z4 = z(&[4]);
        let h = gens(&z4, &[&[2]]);
        let b = z4.element_from_u64(&[2]).unwrap();
        let w = member_decompose(&b, &h).unwrap().unwrap();
        // coefficients recombine to b exactly
        let mut acc = z4.zero();
        for (wi, hi) in w.iter().zip(h.generators()) {
            acc = acc.add(&hi.scalar_mul_uint(wi)).unwrap();
        }
        assert_eq!(acc, b);

        let b3 = z4.element_from_u64(&[3]).unwrap();
        assert!(member_decompose(&b3, &h).unwrap().is_none());

        let trivial = SubgroupGens::trivial(z4.clone());
        assert_eq!(
            member_decompose(&z4.zero(), &trivial).unwrap(),
            Some(vec![])
        );
        assert!(member_decompose(&b, &trivial).unwrap().is_none());
    }

    #[test]
    fn subgroup_order_examples() {
        let z4 = z(&[4]);
        assert_eq!(subgroup_order(&gens(&z4, &[&[2]])), BigUint::from(2u32));
        assert_eq!(subgroup_order(&gens(&z4, &[&[1]])), BigUint::from(4u32));
        assert_eq!(
            subgroup_order(&SubgroupGens::trivial(z4)),
            BigUint::one()
        );
    }

    #[test]
    fn intersect_examples() {
        let z4 = z(&[4]);
        let meet = intersect(&gens(&z4, &[&[2]]), &gens(&z4, &[&[1]])).unwrap();
        let elems: Vec<BigUint> = meet.enumerate().iter().map(|e| z4.index_of(e)).collect();
        assert_eq!(elems, vec![BigUint::zero(), BigUint::from(2u32)]);

        let t = intersect(&gens(&z4, &[&[2]]), &SubgroupGens::trivial(z4.clone())).unwrap();
        assert!(t.generators().is_empty());

        let z22 = z(&[2, 2]);
        let t = intersect(&gens(&z22, &[&[1, 0]]), &gens(&z22, &[&[0, 1]])).unwrap();
        assert_eq!(subgroup_order(&t), BigUint::one());
    }

    #[test]
    fn orthogonal_examples() {
        let z4 = z(&[4]);
        let perp = orthogonal(&gens(&z4, &[&[2]]));
        let elems: Vec<BigUint> = perp.enumerate().iter().map(|e| z4.index_of(e)).collect();
        assert_eq!(elems, vec![BigUint::zero(), BigUint::from(2u32)]);

        let full = SubgroupGens::full(&z4);
        assert_eq!(subgroup_order(&orthogonal(&full)), BigUint::one());
        let trivial = SubgroupGens::trivial(z4);
        assert_eq!(subgroup_order(&orthogonal(&trivial)), BigUint::from(4u32));
    }

    #[test]
    fn character_system_examples() {
        let z4 = z(&[4]);
        // chi_2(g) = 1 over Z_4
        let (g0, kernel) = solve_character_system(
            &z4,
            &[z4.element_from_u64(&[2]).unwrap()],
            &[BigUint::zero()],
        )
        .unwrap()
        .unwrap();
        assert!(g0.is_zero());
        assert_eq!(subgroup_order(&kernel), BigUint::from(2u32));

        // odd exponent: no solution
        let z2 = z(&[2]);
        let none = solve_character_system(
            &z2,
            &[z2.element_from_u64(&[1]).unwrap()],
            &[BigUint::one()],
        )
        .unwrap();
        assert!(none.is_none());

        // chi_1(g) = -1 = gamma^4 over Z_4
        let (g0, kernel) = solve_character_system(
            &z4,
            &[z4.element_from_u64(&[1]).unwrap()],
            &[BigUint::from(4u32)],
        )
        .unwrap()
        .unwrap();
        assert_eq!(g0, z4.element_from_u64(&[2]).unwrap());
        assert_eq!(subgroup_order(&kernel), BigUint::one());
    }

    #[test]
    fn hiding_hom_examples() {
        let z4 = z(&[4]);
        let h = gens(&z4, &[&[2]]);
        let omega = hiding_hom(&h);
        // kernel of omega is exactly {0, 2}
        for g in z4.iter_elements() {
            let in_kernel = omega.apply(&g).unwrap().is_zero();
            let in_h = member_decompose(&g, &h).unwrap().is_some();
            assert_eq!(in_kernel, in_h, "g={g:?}");
        }

        let full = SubgroupGens::full(&z4);
        let omega = hiding_hom(&full);
        for g in z4.iter_elements() {
            assert!(omega.apply(&g).unwrap().is_zero());
        }

        let z22 = z(&[2, 2]);
        let h = gens(&z22, &[&[1, 0]]);
        let omega = hiding_hom(&h);
        for g in z22.iter_elements() {
            let in_kernel = omega.apply(&g).unwrap().is_zero();
            let in_h = member_decompose(&g, &h).unwrap().is_some();
            assert_eq!(in_kernel, in_h);
        }
    }

    #[test]
    fn uniform_sample_is_uniform() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let z22 = z(&[2, 2]);
        let h = gens(&z22, &[&[1, 1]]);
        let mut counts = std::collections::BTreeMap::new();
        let shots = 10_000usize;
        for _ in 0..shots {
            let s = uniform_sample(&h, &mut rng);
            *counts.entry(z22.index_of(&s)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 2);
        // total-variation distance from uniform below 5/sqrt(N)
        let tv: f64 = counts
            .values()
            .map(|&c| (c as f64 / shots as f64 - 0.5).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 5.0 / (shots as f64).sqrt(), "tv={tv}");

        let trivial = SubgroupGens::trivial(z22);
        assert!(uniform_sample(&trivial, &mut rng).is_zero());
    }

    #[test]
    fn reduce_generators_preserves_subgroup() {
        let g = z(&[4, 6, 2]);
        let h = gens(&g, &[&[2, 3, 1], &[0, 2, 0], &[2, 1, 1], &[2, 5, 1]]);
        let reduced = reduce_generators(&h);
        assert!(reduced.generators().len() <= g.rank());
        assert!(subgroup_eq(&h, &reduced).unwrap());
        assert_eq!(subgroup_order(&h), subgroup_order(&reduced));
    }

    #[test]
    fn orthogonal_laws_on_small_groups() {
        // (H-perp)-perp = H, |H-perp| * |H| = order, intersection duality
        let shapes: Vec<Vec<u64>> = vec![vec![4], vec![2, 4], vec![6], vec![2, 2, 2], vec![12]];
        let mut state = 0x5eed_1234u64;
        let mut next = |bound: u64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for moduli in shapes {
            let group = z(&moduli);
            let order: u64 = moduli.iter().product();
            for _ in 0..12 {
                let mk = |count: u64, next: &mut dyn FnMut(u64) -> u64| {
                    let gens: Vec<GroupElement> = (0..count)
                        .map(|_| group.element_from_index(&BigUint::from(next(order))))
                        .collect();
                    SubgroupGens::new(group.clone(), gens).unwrap()
                };
                let h = mk(1 + next(3), &mut next);
                let k = mk(1 + next(3), &mut next);

                let hp = orthogonal(&h);
                assert!(subgroup_eq(&orthogonal(&hp), &h).unwrap());
                assert_eq!(
                    subgroup_order(&h) * subgroup_order(&hp),
                    group.order().clone()
                );

                let meet = intersect(&h, &k).unwrap();
                let mut joined = hp.generators().to_vec();
                joined.extend_from_slice(orthogonal(&k).generators());
                let join = SubgroupGens::new(group.clone(), joined).unwrap();
                assert!(subgroup_eq(&orthogonal(&meet), &join).unwrap());
            }
        }
    }
}
