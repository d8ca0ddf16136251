//! Exact solver for linear systems `A x = b (mod G)` where `A` is a
//! homomorphism between finite Abelian groups.
//!
//! The pipeline lifts the domain to `Z_d^n` with `d` the lcm of all moduli,
//! enlarges the system to a congruence system `[A | D] x = b (mod d)` with
//! `D` the diagonal of codomain moduli, solves that via a Smith normal form
//! over the integers modulo `d`, and projects the general solution back into
//! the original domain. Counting works through the kernel-size relations
//! between the enlarged and original systems.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{extended_gcd, mod_inverse, Group, GroupElement};
use crate::subgroup::SubgroupGens;

/// Row-major integer matrix with entries reduced modulo a single modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigUint>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigUint::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigUint>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[BigUint] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix-vector product modulo `d`.
    pub fn mul_vec(&self, v: &[BigUint], d: &BigUint) -> Vec<BigUint> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = BigUint::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc % d
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Mat, d: &BigUint) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigUint::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &other[(k, j)];
                }
                out[(i, j)] = acc % d;
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let ai = a * self.cols + j;
            let bi = b * self.cols + j;
            self.data.swap(ai, bi);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let ai = i * self.cols + a;
            let bi = i * self.cols + b;
            self.data.swap(ai, bi);
        }
    }

    /// Replaces rows (a, b) by the integer combination
    /// `(p*row_a + q*row_b, r*row_a + s*row_b)`, reducing modulo `d`.
    fn combine_rows(&mut self, a: usize, b: usize, t: &Transform2, d: &BigUint) {
        for j in 0..self.cols {
            let va = BigInt::from(self[(a, j)].clone());
            let vb = BigInt::from(self[(b, j)].clone());
            let na = &t.p * &va + &t.q * &vb;
            let nb = &t.r * &va + &t.s * &vb;
            self[(a, j)] = reduce(&na, d);
            self[(b, j)] = reduce(&nb, d);
        }
    }

    /// Column analogue of [`Mat::combine_rows`]:
    /// `(col_a, col_b) <- (p*col_a + r*col_b, q*col_a + s*col_b)`.
    fn combine_cols(&mut self, a: usize, b: usize, t: &Transform2, d: &BigUint) {
        for i in 0..self.rows {
            let va = BigInt::from(self[(i, a)].clone());
            let vb = BigInt::from(self[(i, b)].clone());
            let na = &t.p * &va + &t.r * &vb;
            let nb = &t.q * &va + &t.s * &vb;
            self[(i, a)] = reduce(&na, d);
            self[(i, b)] = reduce(&nb, d);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = BigUint;
    fn index(&self, (i, j): (usize, usize)) -> &BigUint {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigUint {
        &mut self.data[i * self.cols + j]
    }
}

fn reduce(v: &BigInt, d: &BigUint) -> BigUint {
    let m = BigInt::from(d.clone());
    v.mod_floor(&m)
        .to_biguint()
        .expect("mod_floor is nonnegative")
}

/// 2x2 integer matrix `[[p, q], [r, s]]` with determinant 1.
struct Transform2 {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    s: BigInt,
}

impl Transform2 {
    /// Inverse of a determinant-1 matrix (its adjugate).
    fn inverse(&self) -> Transform2 {
        Transform2 {
            p: self.s.clone(),
            q: -self.q.clone(),
            r: -self.r.clone(),
            s: self.p.clone(),
        }
    }

    /// Combination that maps `(a, b)` to `(gcd(a, b), 0)`.
    fn gcd_step(a: &BigUint, b: &BigUint) -> (Transform2, BigUint) {
        let ai = BigInt::from(a.clone());
        let bi = BigInt::from(b.clone());
        let (g, x, y) = extended_gcd(&ai, &bi);
        let gu = g.to_biguint().expect("gcd is nonnegative");
        (
            Transform2 {
                p: x,
                q: y,
                r: -(&bi / &g),
                s: &ai / &g,
            },
            gu,
        )
    }
}

/// Smith-style diagonalization of a matrix over the integers modulo `d`:
/// `u * a * v = s (mod d)` with `s` diagonal, nonzero entries first, and both
/// transforms invertible modulo `d` (their inverses are returned alongside).
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: Mat,
    pub s: Mat,
    pub v: Mat,
    pub u_inv: Mat,
    pub v_inv: Mat,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

/// Computes the Smith normal form of `a` modulo `d`.
///
/// The pivot at each step is the entry whose gcd with `d` is minimal among
/// the nonzero entries of the active submatrix, ties broken by lowest
/// (row, col). Elimination uses determinant-one row/column combinations, so
/// the accumulated transforms are invertible over `Z_d` by construction.
pub fn smith_normal_form(a: &Mat, d: &BigUint) -> Snf {
    assert!(!d.is_zero());
    let m = a.rows;
    let n = a.cols;
    let mut s = a.clone();
    for i in 0..m {
        for j in 0..n {
            s[(i, j)] = &s[(i, j)] % d;
        }
    }
    let mut u = Mat::identity(m);
    let mut u_inv = Mat::identity(m);
    let mut v = Mat::identity(n);
    let mut v_inv = Mat::identity(n);

    let steps = m.min(n);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = choose_pivot(&s, t, d) else {
            break; // remaining submatrix is zero
        };
        if pi != t {
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
        }
        if pj != t {
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);
        }
        loop {
            let mut dirty = false;
            // clear column t below and above the pivot
            for i in 0..m {
                if i == t || s[(i, t)].is_zero() {
                    continue;
                }
                let pivot = s[(t, t)].clone();
                let entry = s[(i, t)].clone();
                if (&entry % &pivot).is_zero() {
                    let q = BigInt::from(entry / &pivot);
                    let tr = Transform2 {
                        p: BigInt::one(),
                        q: BigInt::zero(),
                        r: -q,
                        s: BigInt::one(),
                    };
                    u.combine_rows(t, i, &tr, d);
                    u_inv.combine_cols(t, i, &tr.inverse(), d);
                    s.combine_rows(t, i, &tr, d);
                } else {
                    let (tr, _) = Transform2::gcd_step(&pivot, &entry);
                    u.combine_rows(t, i, &tr, d);
                    u_inv.combine_cols(t, i, &tr.inverse(), d);
                    s.combine_rows(t, i, &tr, d);
                    dirty = true; // pivot row may have changed
                }
                if s[(t, t)].is_zero() {
                    // pivot annihilated mod d; restart with a fresh pivot
                    dirty = true;
                    break;
                }
            }
            // clear row t right and left of the pivot
            for j in 0..n {
                if j == t || s[(t, j)].is_zero() {
                    continue;
                }
                let pivot = s[(t, t)].clone();
                if pivot.is_zero() {
                    dirty = true;
                    break;
                }
                let entry = s[(t, j)].clone();
                if (&entry % &pivot).is_zero() {
                    let q = BigInt::from(entry / &pivot);
                    let tr = Transform2 {
                        p: BigInt::one(),
                        q: BigInt::zero(),
                        r: -q,
                        s: BigInt::one(),
                    };
                    v.combine_cols(t, j, &tr, d);
                    v_inv.combine_rows(t, j, &tr.inverse(), d);
                    s.combine_cols(t, j, &tr, d);
                } else {
                    let (tr, _) = Transform2::gcd_step(&pivot, &entry);
                    v.combine_cols(t, j, &tr, d);
                    v_inv.combine_rows(t, j, &tr.inverse(), d);
                    s.combine_cols(t, j, &tr, d);
                    dirty = true;
                }
            }
            let col_clear = (0..m).all(|i| i == t || s[(i, t)].is_zero());
            let row_clear = (0..n).all(|j| j == t || s[(t, j)].is_zero());
            if s[(t, t)].is_zero() {
                // re-pick a pivot for this position
                match choose_pivot(&s, t, d) {
                    Some((pi, pj)) => {
                        s.swap_rows(t, pi);
                        u.swap_rows(t, pi);
                        u_inv.swap_cols(t, pi);
                        s.swap_cols(t, pj);
                        v.swap_cols(t, pj);
                        v_inv.swap_rows(t, pj);
                        continue;
                    }
                    None => break,
                }
            }
            if !dirty && col_clear && row_clear {
                break;
            }
        }
        t += 1;
    }

    let rank = (0..steps).take_while(|&i| !s[(i, i)].is_zero()).count();
    Snf {
        u,
        s,
        v,
        u_inv,
        v_inv,
        rank,
    }
}

fn choose_pivot(s: &Mat, from: usize, d: &BigUint) -> Option<(usize, usize)> {
    let mut best: Option<(BigUint, usize, usize)> = None;
    for i in from..s.rows {
        for j in from..s.cols {
            let e = &s[(i, j)];
            if e.is_zero() {
                continue;
            }
            let g = e.gcd(d);
            match &best {
                Some((bg, _, _)) if *bg <= g => {}
                _ => best = Some((g, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Kernel of a diagonal homomorphism `S : Z_d^n -> Z_d^m`.
///
/// For each nonzero diagonal entry `s_i` the kernel contributes the cyclic
/// group generated by `(d / gcd(s_i, d)) * e_i`; free coordinates contribute
/// all of `Z_d`. Returns the generators (zero generators omitted) and the
/// exact kernel size `q_1 ... q_r * d^(n-r)` with `q_i = gcd(s_i, d)`.
pub fn diagonal_kernel(s: &Mat, d: &BigUint) -> (Vec<Vec<BigUint>>, BigUint) {
    let n = s.cols;
    let r = (0..s.rows.min(n))
        .take_while(|&i| !s[(i, i)].is_zero())
        .count();
    let mut gens = Vec::new();
    let mut size = BigUint::one();
    for i in 0..n {
        if i < r {
            let q = s[(i, i)].gcd(d);
            let stilde = d / &q;
            size *= &q;
            if !(&stilde % d).is_zero() {
                let mut gen = vec![BigUint::zero(); n];
                gen[i] = &stilde % d;
                gens.push(gen);
            }
        } else {
            size *= d;
            if !d.is_one() {
                let mut gen = vec![BigUint::zero(); n];
                gen[i] = BigUint::one();
                gens.push(gen);
            }
        }
    }
    (gens, size)
}

/// General solution of a congruence system `a x = b (mod d)` over `Z_d^n`:
/// a particular solution plus kernel generators, or `None` when unsolvable.
pub fn congruence_solve(
    a: &Mat,
    b: &[BigUint],
    d: &BigUint,
) -> Option<(Vec<BigUint>, Vec<Vec<BigUint>>, BigUint)> {
    assert_eq!(b.len(), a.rows);
    let snf = smith_normal_form(a, d);
    let c = snf.u.mul_vec(b, d);
    let mut y0 = vec![BigUint::zero(); a.cols];
    for i in 0..a.rows {
        let s_i = if i < a.cols {
            snf.s[(i, i)].clone()
        } else {
            BigUint::zero()
        };
        let c_i = &c[i] % d;
        if s_i.is_zero() {
            if !c_i.is_zero() {
                return None;
            }
            continue;
        }
        // solve s_i * y = c_i (mod d) by extended Euclid
        let g = s_i.gcd(d);
        if !(&c_i % &g).is_zero() {
            return None;
        }
        let m = d / &g;
        let inv = mod_inverse(&((&s_i / &g) % &m), &m)
            .expect("s/g is a unit modulo d/g");
        y0[i] = ((&c_i / &g) * inv) % &m;
    }
    let (kernel_y, kernel_size) = diagonal_kernel(&snf.s, d);
    let x0 = snf.v.mul_vec(&y0, d);
    let kernel: Vec<Vec<BigUint>> = kernel_y
        .iter()
        .map(|k| snf.v.mul_vec(k, d))
        .collect();
    Some((x0, kernel, kernel_size))
}

/// Matrix representation of a group homomorphism `A : H -> G`; columns are
/// elements of the codomain and each column `a_i` satisfies
/// `c_i * a_i = 0 (mod G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomMatrix {
    domain: Group,
    codomain: Group,
    entries: Vec<BigUint>, // row-major, entry (i, j) reduced mod d_i
}

impl HomMatrix {
    /// Validates the shape and the homomorphism condition of a raw matrix.
    pub fn new(domain: Group, codomain: Group, rows: &[Vec<BigUint>]) -> Result<Self> {
        let m = codomain.rank();
        let n = domain.rank();
        if rows.len() != m || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch {
                rows: rows.len(),
                cols: rows.first().map_or(0, |r| r.len()),
                expected_rows: m,
                expected_cols: n,
            });
        }
        let mut entries = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            for e in row {
                entries.push(e % codomain.modulus(i));
            }
        }
        let hom = HomMatrix {
            domain,
            codomain,
            entries,
        };
        for j in 0..n {
            let c_j = hom.domain.modulus(j);
            for i in 0..m {
                if !((&hom.entries[i * n + j] * c_j) % hom.codomain.modulus(i)).is_zero() {
                    return Err(Error::NotAHomomorphism(j));
                }
            }
        }
        Ok(hom)
    }

    /// Builds the matrix whose columns are the given codomain elements.
    pub fn from_columns(domain: Group, codomain: Group, cols: &[GroupElement]) -> Result<Self> {
        let m = codomain.rank();
        let n = domain.rank();
        if cols.len() != n {
            return Err(Error::ShapeMismatch {
                rows: m,
                cols: cols.len(),
                expected_rows: m,
                expected_cols: n,
            });
        }
        let mut rows = vec![vec![BigUint::zero(); n]; m];
        for (j, col) in cols.iter().enumerate() {
            if col.group() != &codomain {
                return Err(Error::GroupMismatch);
            }
            for i in 0..m {
                rows[i][j] = col.residue(i).clone();
            }
        }
        Self::new(domain, codomain, &rows)
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn codomain(&self) -> &Group {
        &self.codomain
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.domain.rank() + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigUint>> {
        let n = self.domain.rank();
        (0..self.codomain.rank())
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> GroupElement {
        let n = self.domain.rank();
        let residues: Vec<BigUint> = (0..self.codomain.rank())
            .map(|i| self.entries[i * n + j].clone())
            .collect();
        self.codomain
            .element(&residues)
            .expect("entries are reduced")
    }

    /// Applies the homomorphism: matrix-vector product reduced mod `G`.
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.group() != &self.domain {
            return Err(Error::GroupMismatch);
        }
        let n = self.domain.rank();
        let residues: Vec<BigUint> = (0..self.codomain.rank())
            .map(|i| {
                let mut acc = BigUint::zero();
                for j in 0..n {
                    acc += &self.entries[i * n + j] * x.residue(j);
                }
                acc % self.codomain.modulus(i)
            })
            .collect();
        self.codomain.element(&residues)
    }

    /// Identity endomorphism of `g`.
    pub fn identity(g: &Group) -> HomMatrix {
        let n = g.rank();
        let mut rows = vec![vec![BigUint::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            // reduce: the identity residue on a Z_1 factor is 0
            row[i] = BigUint::one() % g.modulus(i);
        }
        HomMatrix::new(g.clone(), g.clone(), &rows).expect("identity is a homomorphism")
    }
}

/// Particular solution and kernel generators of a solvable system.
#[derive(Debug, Clone)]
pub struct GeneralSolution {
    pub particular: GroupElement,
    pub kernel: SubgroupGens,
}

/// Solves `A x = b (mod G)` for `x` in the domain of `A`.
///
/// Returns `None` when the system has no solution; otherwise the full
/// solution set is `particular + <kernel>`.
pub fn solve(a: &HomMatrix, b: &GroupElement) -> Result<Option<GeneralSolution>> {
    if b.group() != a.codomain() {
        return Err(Error::GroupMismatch);
    }
    Ok(solve_raw(a, b).map(|(particular, kernel, _)| GeneralSolution {
        particular,
        kernel: SubgroupGens::new_unchecked(a.domain().clone(), kernel),
    }))
}

/// Exact number of solutions of `A x = b (mod G)` within the domain.
pub fn count_solutions(a: &HomMatrix, b: &GroupElement) -> Result<BigUint> {
    if b.group() != a.codomain() {
        return Err(Error::GroupMismatch);
    }
    Ok(match solve_raw(a, b) {
        None => BigUint::zero(),
        Some((_, _, count)) => count,
    })
}

fn solve_raw(
    a: &HomMatrix,
    b: &GroupElement,
) -> Option<(GroupElement, Vec<GroupElement>, BigUint)> {
    let domain = a.domain();
    let codomain = a.codomain();
    let n = domain.rank();
    let m = codomain.rank();

    // d = lcm of every domain and codomain modulus
    let mut d = domain.lcm_exponent().clone();
    d = d.lcm(codomain.lcm_exponent());

    // enlarged system [A | D] over Z_d
    let mut enlarged = Mat::zeros(m, n + m);
    for i in 0..m {
        for j in 0..n {
            enlarged[(i, j)] = a.entry(i, j).clone();
        }
        enlarged[(i, n + i)] = codomain.modulus(i) % &d;
    }
    let b_vec: Vec<BigUint> = b.residues().to_vec();

    let (x0_big, kernel_big, enlarged_kernel_size) = congruence_solve(&enlarged, &b_vec, &d)?;

    // project: truncate to the first n coordinates and reduce mod c_j
    let project = |v: &[BigUint]| -> GroupElement {
        let residues: Vec<BigUint> = (0..n).map(|j| &v[j] % domain.modulus(j)).collect();
        domain.element(&residues).expect("reduced residues")
    };
    let particular = project(&x0_big);
    let kernel: Vec<GroupElement> = kernel_big
        .iter()
        .map(|k| project(k))
        .filter(|g| !g.is_zero())
        .collect();

    // |ker_H A| = |ker enlarged| / (|G| * |ker pi|), |ker pi| = d^n / prod(c_j)
    let mut dn = BigUint::one();
    for _ in 0..n {
        dn *= &d;
    }
    let ker_pi = &dn / domain.order();
    let denom = codomain.order() * &ker_pi;
    debug_assert!((&enlarged_kernel_size % &denom).is_zero());
    let count = enlarged_kernel_size / denom;

    Some((particular, kernel, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn mat(rows: &[&[u64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| big(v)).collect())
                .collect(),
        )
    }

    fn check_snf(a: &Mat, d: &BigUint) -> Snf {
        let snf = smith_normal_form(a, d);
        // S = U * A * V (mod d)
        let uav = snf.u.mul_mat(a, d).mul_mat(&snf.v, d);
        assert_eq!(uav, snf.s, "U*A*V != S");
        // diagonal with nonzero entries first
        for i in 0..snf.s.rows {
            for j in 0..snf.s.cols {
                if i != j {
                    assert!(snf.s[(i, j)].is_zero(), "off-diagonal entry");
                }
            }
        }
        for i in 0..snf.rank {
            assert!(!snf.s[(i, i)].is_zero());
        }
        for i in snf.rank..snf.s.rows.min(snf.s.cols) {
            assert!(snf.s[(i, i)].is_zero());
        }
        // invertibility verified by the accumulated inverses
        assert_eq!(snf.u.mul_mat(&snf.u_inv, d), Mat::identity(a.rows));
        assert_eq!(snf.u_inv.mul_mat(&snf.u, d), Mat::identity(a.rows));
        assert_eq!(snf.v.mul_mat(&snf.v_inv, d), Mat::identity(a.cols));
        assert_eq!(snf.v_inv.mul_mat(&snf.v, d), Mat::identity(a.cols));
        snf
    }

    #[test]
    fn snf_already_diagonal() {
        let a = mat(&[&[2, 0], &[0, 2]]);
        let snf = check_snf(&a, &big(4));
        assert_eq!(snf.s, a);
        assert_eq!(snf.u, Mat::identity(2));
        assert_eq!(snf.v, Mat::identity(2));
    }

    #[test]
    fn snf_zero_matrix() {
        let a = mat(&[&[0]]);
        let snf = check_snf(&a, &big(4));
        assert_eq!(snf.rank, 0);
        assert!(snf.s[(0, 0)].is_zero());
    }

    #[test]
    fn snf_single_row() {
        let a = mat(&[&[2, 2]]);
        let snf = check_snf(&a, &big(4));
        assert_eq!(snf.s[(0, 0)], big(2));
        assert!(snf.s[(0, 1)].is_zero());
    }

    #[test]
    fn snf_random_small() {
        // deterministic sweep over small matrices and moduli
        for d in 2u64..8 {
            for seed in 0u64..40 {
                let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                let mut next = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 33) % d
                };
                let a = mat(&[&[next(), next(), next()], &[next(), next(), next()]]);
                check_snf(&a, &big(d));
            }
        }
    }

    #[test]
    fn diagonal_kernel_examples() {
        let (gens, size) = diagonal_kernel(&mat(&[&[2]]), &big(4));
        assert_eq!(size, big(2));
        assert_eq!(gens, vec![vec![big(2)]]);

        let (gens, size) = diagonal_kernel(&mat(&[&[1]]), &big(4));
        assert_eq!(size, big(1));
        assert!(gens.is_empty());

        let (gens, size) = diagonal_kernel(&mat(&[&[0]]), &big(4));
        assert_eq!(size, big(4));
        assert_eq!(gens, vec![vec![big(1)]]);
    }

    #[test]
    fn diagonal_kernel_matches_enumeration() {
        // kernel size formula vs brute force for all d, s <= 30
        for d in 1u64..=30 {
            for s in 0u64..=30 {
                let (gens, size) = diagonal_kernel(&mat(&[&[s % d]]), &big(d));
                let brute: Vec<u64> = (0..d).filter(|x| (s % d) * x % d == 0).collect();
                assert_eq!(size, big(brute.len() as u64), "d={d} s={s}");
                // generated set equals brute set
                let mut generated = std::collections::BTreeSet::new();
                generated.insert(0u64);
                if let Some(g) = gens.first() {
                    let g0: u64 = g[0].to_string().parse().unwrap();
                    let mut cur = 0;
                    loop {
                        cur = (cur + g0) % d;
                        if !generated.insert(cur) {
                            break;
                        }
                    }
                }
                assert_eq!(generated.into_iter().collect::<Vec<_>>(), brute);
            }
        }
    }

    fn hom(domain: &[u64], codomain: &[u64], rows: &[&[u64]]) -> HomMatrix {
        let d = Group::from_u64(domain).unwrap();
        let c = Group::from_u64(codomain).unwrap();
        let rows: Vec<Vec<BigUint>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| big(v)).collect())
            .collect();
        HomMatrix::new(d, c, &rows).unwrap()
    }

    #[test]
    fn validate_hom_examples() {
        let d = Group::from_u64(&[2]).unwrap();
        let c = Group::from_u64(&[4]).unwrap();
        let err = HomMatrix::new(d.clone(), c.clone(), &[vec![big(1)]]).unwrap_err();
        assert_eq!(err, Error::NotAHomomorphism(0));
        assert!(HomMatrix::new(d, c, &[vec![big(2)]]).is_ok());
        let zn = Group::from_u64(&[5, 5]).unwrap();
        assert!(HomMatrix::identity(&zn).apply(&zn.basis(0)).is_ok());
    }

    #[test]
    fn apply_hom_examples() {
        let a = hom(&[2], &[4], &[&[2]]);
        let x = a.domain().element_from_u64(&[1]).unwrap();
        assert_eq!(a.apply(&x).unwrap(), a.codomain().element_from_u64(&[2]).unwrap());
        assert!(a.apply(&a.domain().zero()).unwrap().is_zero());

        let a = hom(&[4, 4], &[4], &[&[1, 1]]);
        let x = a.domain().element_from_u64(&[3, 3]).unwrap();
        assert_eq!(a.apply(&x).unwrap(), a.codomain().element_from_u64(&[2]).unwrap());
    }

    #[test]
    fn solve_examples() {
        // 2x = 2 (mod 4): solutions {1, 3}
        let a = hom(&[4], &[4], &[&[2]]);
        let b = a.codomain().element_from_u64(&[2]).unwrap();
        let sol = solve(&a, &b).unwrap().unwrap();
        assert_eq!(a.apply(&sol.particular).unwrap(), b);
        let set = enumerate_solutions(&a, &b);
        assert_eq!(set.len(), 2);
        assert_eq!(count_solutions(&a, &b).unwrap(), big(2));

        // 2x = 1 (mod 4): unsolvable
        let b1 = a.codomain().element_from_u64(&[1]).unwrap();
        assert!(solve(&a, &b1).unwrap().is_none());
        assert_eq!(count_solutions(&a, &b1).unwrap(), big(0));

        // homogeneous is always solvable
        let b0 = a.codomain().zero();
        let sol = solve(&a, &b0).unwrap().unwrap();
        assert!(a.apply(&sol.particular).unwrap().is_zero());
    }

    fn enumerate_solutions(a: &HomMatrix, b: &GroupElement) -> Vec<GroupElement> {
        a.domain()
            .iter_elements()
            .filter(|x| &a.apply(x).unwrap() == b)
            .collect()
    }

    /// Exhaustive equivalence on a deterministic family of small systems.
    #[test]
    fn solve_matches_enumeration() {
        let shapes: Vec<(Vec<u64>, Vec<u64>)> = vec![
            (vec![4], vec![4]),
            (vec![2, 4], vec![4]),
            (vec![6], vec![2, 3]),
            (vec![2, 2], vec![2, 2]),
            (vec![3, 4], vec![6, 2]),
            (vec![8], vec![8]),
        ];
        let mut state = 0xfeed_beefu64;
        let mut next = |bound: u64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for (dom_mods, cod_mods) in shapes {
            let domain = Group::from_u64(&dom_mods).unwrap();
            let codomain = Group::from_u64(&cod_mods).unwrap();
            for _trial in 0..30 {
                // random valid columns: multiples of d_i / gcd(c_j, d_i)
                let mut rows =
                    vec![vec![BigUint::zero(); domain.rank()]; codomain.rank()];
                for j in 0..domain.rank() {
                    let c_j = domain.modulus(j);
                    for (i, row) in rows.iter_mut().enumerate() {
                        let d_i = codomain.modulus(i);
                        let g = c_j.gcd(d_i);
                        let step = d_i / &g;
                        let gu64: u64 = g.to_string().parse().unwrap();
                        row[j] = step * big(next(gu64.max(1)));
                    }
                }
                let a = HomMatrix::new(domain.clone(), codomain.clone(), &rows).unwrap();
                let b_index = next(cod_mods.iter().product::<u64>());
                let b = codomain.element_from_index(&big(b_index));

                let brute = enumerate_solutions(&a, &b);
                let solved = solve(&a, &b).unwrap();
                assert_eq!(count_solutions(&a, &b).unwrap(), big(brute.len() as u64));
                match solved {
                    None => assert!(brute.is_empty()),
                    Some(sol) => {
                        assert_eq!(a.apply(&sol.particular).unwrap(), b);
                        for k in sol.kernel.generators() {
                            assert!(a.apply(k).unwrap().is_zero());
                        }
                        // span {x0 + combinations of kernel gens} == brute set
                        let mut span = std::collections::BTreeSet::new();
                        let mut frontier = vec![sol.particular.clone()];
                        while let Some(x) = frontier.pop() {
                            if !span.insert(x.group().index_of(&x)) {
                                continue;
                            }
                            for k in sol.kernel.generators() {
                                frontier.push(x.add(k).unwrap());
                            }
                        }
                        let brute_idx: std::collections::BTreeSet<BigUint> =
                            brute.iter().map(|x| a.domain().index_of(x)).collect();
                        assert_eq!(span, brute_idx);
                    }
                }
            }
        }
    }

    /// Enlarged kernel size = |G| * |ker pi| * original kernel size.
    #[test]
    fn enlarged_count_relation() {
        let a = hom(&[2, 4], &[4], &[&[2, 1]]);
        let domain = a.domain().clone();
        let codomain = a.codomain().clone();
        let d = domain.lcm_exponent().lcm(codomain.lcm_exponent());
        let mut enlarged = Mat::zeros(1, 3);
        enlarged[(0, 0)] = big(2);
        enlarged[(0, 1)] = big(1);
        enlarged[(0, 2)] = big(4) % &d;
        let (_, _, enl_size) =
            congruence_solve(&enlarged, &[BigUint::zero()], &d).unwrap();
        let original = count_solutions(&a, &codomain.zero()).unwrap();
        let mut dn = BigUint::one();
        for _ in 0..domain.rank() {
            dn *= &d;
        }
        let ker_pi = &dn / domain.order();
        assert_eq!(enl_size, codomain.order() * ker_pi * original);
    }
}
