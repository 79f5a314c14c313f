//! Sparse homogeneous linear systems over Q with an exact kernel.
//!
//! The systems met when computing morphism spaces between quiver
//! representations are dominated by rows with one or two terms (a variable is
//! zero, or one variable is a multiple of another). Those rows are absorbed by
//! a weighted union-find, leaving a much smaller dense system on equivalence
//! classes of variables. The dense part is ranked modulo a large prime; the
//! modular rank is promoted to the rational rank either because it reaches the
//! trivial upper bound or because a p-adically lifted kernel basis of the
//! predicted size is verified over Q.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::modular::{self, bigint_from_u64, Echelon, Field, PRIME_OFFSETS};
use super::{Matrix, Rational};

/// Coefficients above this many bits skip the modular route.
const MAX_LIFT_BITS: u64 = 40;

#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    nvars: usize,
    rows: Vec<Vec<(usize, Rational)>>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            rows: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `sum coeff * x_var = 0`. Repeated variables are
    /// merged; a row that cancels completely is dropped.
    pub fn add_row<I>(&mut self, terms: I)
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in terms {
            assert!(v < self.nvars, "variable {v} out of range");
            *acc.entry(v).or_insert_with(Rational::zero) += c;
        }
        let row: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows.len(), self.nvars);
        for (i, row) in self.rows.iter().enumerate() {
            for (v, c) in row {
                m.set(i, *v, c.clone());
            }
        }
        m
    }

    pub fn kernel_dim(&self) -> usize {
        let red = self.reduce();
        dense_kernel(&red.dense, red.nclasses, false).dim
    }

    pub fn rank(&self) -> usize {
        self.nvars - self.kernel_dim()
    }

    /// A basis of the solution space, each vector indexed by variable.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let red = self.reduce();
        let k = dense_kernel(&red.dense, red.nclasses, true);
        k.basis
            .expect("basis requested")
            .into_iter()
            .map(|w| {
                red.var_map
                    .iter()
                    .map(|m| match m {
                        Some((cls, weight)) => weight * &w[*cls],
                        None => Rational::zero(),
                    })
                    .collect()
            })
            .collect()
    }

    fn reduce(&self) -> Reduced {
        let mut uf = WeightedUnionFind::new(self.nvars);
        let mut dense = Vec::new();
        for row in &self.rows {
            if !uf.absorb(row) {
                dense.push(row.clone());
            }
        }
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(dense.len());
            for row in &dense {
                let sub = uf.substitute(row);
                if sub.len() <= 2 {
                    uf.absorb(&sub);
                    changed = true;
                } else {
                    next.push(sub);
                }
            }
            dense = next;
            if !changed {
                break;
            }
        }

        let mut class_of_root = vec![usize::MAX; self.nvars];
        let mut nclasses = 0;
        let mut var_map = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let (root, w) = uf.find(v);
            if uf.zero[root] {
                var_map.push(None);
                continue;
            }
            if class_of_root[root] == usize::MAX {
                class_of_root[root] = nclasses;
                nclasses += 1;
            }
            var_map.push(Some((class_of_root[root], w)));
        }
        // Rows are already expressed on live roots.
        let dense = dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(r, c)| (class_of_root[r], c))
                    .collect()
            })
            .collect();
        Reduced {
            var_map,
            nclasses,
            dense,
        }
    }
}

struct Reduced {
    var_map: Vec<Option<(usize, Rational)>>,
    nclasses: usize,
    dense: Vec<Vec<(usize, Rational)>>,
}

/// `x_v = weight[v] * x_parent[v]`; roots carry a flag forcing them to zero.
struct WeightedUnionFind {
    parent: Vec<usize>,
    weight: Vec<Rational>,
    size: Vec<usize>,
    zero: Vec<bool>,
}

impl WeightedUnionFind {
    fn new(n: usize) -> Self {
        WeightedUnionFind {
            parent: (0..n).collect(),
            weight: vec![Rational::one(); n],
            size: vec![1; n],
            zero: vec![false; n],
        }
    }

    fn find(&mut self, v: usize) -> (usize, Rational) {
        let mut path = Vec::new();
        let mut x = v;
        while self.parent[x] != x {
            path.push(x);
            x = self.parent[x];
        }
        let root = x;
        for &node in path.iter().rev() {
            let par = self.parent[node];
            if par != root {
                let w = &self.weight[node] * &self.weight[par];
                self.weight[node] = w;
                self.parent[node] = root;
            }
        }
        (root, self.weight[v].clone())
    }

    /// Applies a row with at most two terms; returns false for longer rows.
    fn absorb(&mut self, row: &[(usize, Rational)]) -> bool {
        match row {
            [] => true,
            [(x, _)] => {
                let (r, _) = self.find(*x);
                self.zero[r] = true;
                true
            }
            [(x, a), (y, b)] => {
                // a x + b y = 0  =>  x = (-b/a) y
                let k = -(b / a);
                self.relate(*x, *y, k);
                true
            }
            _ => false,
        }
    }

    fn relate(&mut self, x: usize, y: usize, k: Rational) {
        let (rx, wx) = self.find(x);
        let (ry, wy) = self.find(y);
        // wx * rx = k * wy * ry
        let f = k * wy / wx;
        if rx == ry {
            if !f.is_one() {
                self.zero[rx] = true;
            }
            return;
        }
        let z = self.zero[rx] || self.zero[ry];
        if self.size[rx] <= self.size[ry] {
            self.parent[rx] = ry;
            self.weight[rx] = f;
            self.size[ry] += self.size[rx];
            self.zero[ry] = z;
        } else {
            self.parent[ry] = rx;
            self.weight[ry] = f.recip();
            self.size[rx] += self.size[ry];
            self.zero[rx] = z;
        }
    }

    fn substitute(&mut self, row: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in row {
            let (r, w) = self.find(*v);
            if self.zero[r] {
                continue;
            }
            *acc.entry(r).or_insert_with(Rational::zero) += c * w;
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

struct DenseKernel {
    dim: usize,
    basis: Option<Vec<Vec<Rational>>>,
}

enum LiftFailure {
    /// The modular rank was smaller than the rational rank.
    BadPrime,
    /// Coefficients too wide for machine-word residuals.
    TooLarge,
}

/// Scales a rational row to a primitive integer row.
fn integer_row(row: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let ints: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(v, c)| (*v, c.numer() * (&lcm / c.denom())))
        .collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|(v, c)| (v, c / &g)).collect()
    }
}

fn unit_basis(c: usize) -> Vec<Vec<Rational>> {
    (0..c)
        .map(|i| {
            (0..c)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

fn dense_kernel(rows: &[Vec<(usize, Rational)>], c: usize, want_basis: bool) -> DenseKernel {
    if rows.is_empty() || c == 0 {
        return DenseKernel {
            dim: c,
            basis: want_basis.then(|| unit_basis(c)),
        };
    }
    let int_rows: Vec<Vec<(usize, BigInt)>> = rows.iter().map(|r| integer_row(r)).collect();
    let m = int_rows.len();
    let wide = int_rows
        .iter()
        .flatten()
        .any(|(_, v)| v.bits() > MAX_LIFT_BITS);

    if !wide {
        for attempt in 0..PRIME_OFFSETS.len() {
            let field = Field::nth(attempt);
            let dense: Vec<Vec<u64>> = int_rows
                .iter()
                .map(|row| {
                    let mut d = vec![0u64; c];
                    for (v, x) in row {
                        d[*v] = field.from_bigint(x);
                    }
                    d
                })
                .collect();
            let ech = modular::echelon(&field, dense, c);
            if ech.rank == c {
                return DenseKernel {
                    dim: 0,
                    basis: want_basis.then(Vec::new),
                };
            }
            if ech.rank == m && !want_basis {
                return DenseKernel {
                    dim: c - m,
                    basis: None,
                };
            }
            match lift_kernel(&field, &int_rows, &ech, c) {
                Ok(basis) => {
                    return DenseKernel {
                        dim: basis.len(),
                        basis: want_basis.then_some(basis),
                    }
                }
                Err(LiftFailure::BadPrime) => continue,
                Err(LiftFailure::TooLarge) => break,
            }
        }
    }

    let mut mat = Matrix::zeros(m, c);
    for (i, row) in int_rows.iter().enumerate() {
        for (v, x) in row {
            mat.set(i, *v, Rational::from_integer(x.clone()));
        }
    }
    let basis = mat.nullspace_basis();
    DenseKernel {
        dim: basis.len(),
        basis: want_basis.then_some(basis),
    }
}

/// Kernel basis with one vector per non-pivot column, found by p-adic lifting
/// of `A x = -D[., f]` on the pivot block `A` and verified against every row.
fn lift_kernel(
    field: &Field,
    rows: &[Vec<(usize, BigInt)>],
    ech: &Echelon,
    c: usize,
) -> Result<Vec<Vec<Rational>>, LiftFailure> {
    let r = ech.rank;
    let mut col_pos = vec![None; c];
    for (k, &pc) in ech.pivot_cols.iter().enumerate() {
        col_pos[pc] = Some(k);
    }
    let free: Vec<usize> = (0..c).filter(|&j| col_pos[j].is_none()).collect();
    let f = free.len();
    let mut free_pos = vec![None; c];
    for (k, &fc) in free.iter().enumerate() {
        free_pos[fc] = Some(k);
    }

    // Pivot block and right-hand sides as machine integers.
    let mut a = vec![vec![0i64; r]; r];
    let mut residual = vec![vec![0i128; f]; r];
    for (i, &ri) in ech.pivot_rows.iter().enumerate() {
        for (v, x) in &rows[ri] {
            let x = x.to_i64().ok_or(LiftFailure::TooLarge)?;
            if let Some(k) = col_pos[*v] {
                a[i][k] = x;
            } else if let Some(k) = free_pos[*v] {
                residual[i][k] = -(x as i128);
            }
        }
    }
    let a_mod: Vec<Vec<u64>> = a
        .iter()
        .map(|row| row.iter().map(|&x| field.from_i64(x)).collect())
        .collect();
    let a_inv = modular::inverse(field, &a_mod).ok_or(LiftFailure::BadPrime)?;

    // Hadamard bound on Cramer numerators and denominators of the block
    // system decides when lifting must have converged.
    let log_h: f64 = ech
        .pivot_rows
        .iter()
        .map(|&ri| {
            let s: f64 = rows[ri]
                .iter()
                .map(|(_, x)| x.to_f64().unwrap_or(f64::MAX).powi(2))
                .sum();
            0.5 * s.max(1.0).log2()
        })
        .sum();
    let bits_per_step = (field.modulus() as f64).log2();
    let max_steps = ((2.0 * log_h + 4.0) / bits_per_step).ceil() as usize + 2;

    let p_big = bigint_from_u64(field.modulus());
    let p_i128 = field.modulus() as i128;
    let mut acc = vec![vec![BigInt::zero(); f]; r];
    let mut pk = BigInt::one();
    let mut next_check = 1;
    for step in 1..=max_steps {
        let res_mod: Vec<Vec<u64>> = residual
            .iter()
            .map(|row| row.iter().map(|&x| field.from_i128(x)).collect())
            .collect();
        let mut digit = vec![vec![0i64; f]; r];
        for k in 0..r {
            for j in 0..f {
                let mut s = 0u64;
                for l in 0..r {
                    let (x, y) = (a_inv[k][l], res_mod[l][j]);
                    if x != 0 && y != 0 {
                        s = field.add(s, field.mul(x, y));
                    }
                }
                digit[k][j] = field.to_symmetric(s);
            }
        }
        for i in 0..r {
            for j in 0..f {
                let mut s: i128 = residual[i][j];
                for k in 0..r {
                    if a[i][k] != 0 && digit[k][j] != 0 {
                        s -= a[i][k] as i128 * digit[k][j] as i128;
                    }
                }
                debug_assert_eq!(s % p_i128, 0);
                residual[i][j] = s / p_i128;
            }
        }
        for k in 0..r {
            for j in 0..f {
                if digit[k][j] != 0 {
                    acc[k][j] += &pk * digit[k][j];
                }
            }
        }
        pk *= &p_big;

        if step == next_check || step == max_steps {
            next_check *= 2;
            let Some(basis) = reconstruct(&acc, &pk, &ech.pivot_cols, &free, c) else {
                continue;
            };
            let pivot_ok = basis
                .iter()
                .all(|v| ech.pivot_rows.iter().all(|&ri| row_vanishes(&rows[ri], v)));
            if !pivot_ok {
                continue;
            }
            if basis.iter().all(|v| rows.iter().all(|row| row_vanishes(row, v))) {
                return Ok(basis);
            }
            return Err(LiftFailure::BadPrime);
        }
    }
    Err(LiftFailure::BadPrime)
}

fn reconstruct(
    acc: &[Vec<BigInt>],
    modulus: &BigInt,
    pivot_cols: &[usize],
    free: &[usize],
    c: usize,
) -> Option<Vec<Vec<Rational>>> {
    let mut basis = Vec::with_capacity(free.len());
    for (j, &fc) in free.iter().enumerate() {
        let mut v = vec![Rational::zero(); c];
        v[fc] = Rational::one();
        // Common-denominator trick: scale by the denominator found so far so
        // later entries reconstruct with small numbers.
        let mut den = BigInt::one();
        for (k, &pc) in pivot_cols.iter().enumerate() {
            let scaled = (&acc[k][j] * &den).mod_floor(modulus);
            let (n, d) = modular::rational_reconstruct(&scaled, modulus)?;
            v[pc] = Rational::new(n, &d * &den);
            den *= d;
        }
        basis.push(v);
    }
    Some(basis)
}

fn row_vanishes(row: &[(usize, BigInt)], v: &[Rational]) -> bool {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (j, _)| acc.lcm(v[*j].denom()));
    let s: BigInt = row
        .iter()
        .filter(|(j, _)| !v[*j].is_zero())
        .map(|(j, x)| x * v[*j].numer() * (&lcm / v[*j].denom()))
        .sum();
    s.is_zero()
}
