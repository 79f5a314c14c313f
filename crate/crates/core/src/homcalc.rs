//! Euler form, Cartan and Coxeter matrices, and exact Hom/Ext¹ dimensions.
//!
//! Hom spaces are solved directly as intertwiner systems. The path algebra is
//! hereditary, so Ext¹ follows from Hom and the Euler form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactnum::modular::{self, Field};
use crate::exactnum::{rat, LinearSystem, Matrix, Rational};
use crate::quiverrep::{DimVector, Quiver, Representation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("representations live over different quivers")]
    QuiverMismatch,
    #[error("dimension vector of length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("Euler characteristic exceeds Hom dimension ({hom} < {euler}); inconsistent input")]
    NegativeExt { hom: usize, euler: i64 },
}

fn check_len(quiver: &Quiver, x: &[i64]) -> Result<(), HomError> {
    if x.len() == quiver.num_vertices() {
        Ok(())
    } else {
        Err(HomError::Length {
            expected: quiver.num_vertices(),
            found: x.len(),
        })
    }
}

/// `<x,y> = sum_v x_v y_v - sum_{u->v} x_u y_v`.
pub fn euler_form(quiver: &Quiver, x: &[i64], y: &[i64]) -> Result<i64, HomError> {
    check_len(quiver, x)?;
    check_len(quiver, y)?;
    let diag: i64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let off: i64 = quiver.arrows().iter().map(|a| x[a.src] * y[a.dst]).sum();
    Ok(diag - off)
}

pub fn null_root(quiver: &Quiver) -> DimVector {
    vec![1; quiver.num_vertices()]
}

/// `<delta, x>`: negative on preprojective, zero on regular and positive on
/// preinjective indecomposables.
pub fn defect(quiver: &Quiver, x: &[i64]) -> Result<i64, HomError> {
    euler_form(quiver, &null_root(quiver), x)
}

/// Cartan matrix, column `v` = dim P_v (row `w` counts paths `v -> w`).
pub fn cartan(quiver: &Quiver) -> Vec<Vec<i64>> {
    let n = quiver.num_vertices();
    (0..n)
        .map(|w| (0..n).map(|v| quiver.path_count(v, w) as i64).collect())
        .collect()
}

/// Euler matrix `E = I - A`, with `A[u][v]` the number of arrows `u -> v`,
/// so that `<x,y> = x^T E y`.
fn euler_matrix(quiver: &Quiver) -> Vec<Vec<i64>> {
    let n = quiver.num_vertices();
    let mut e = vec![vec![0; n]; n];
    for (v, row) in e.iter_mut().enumerate() {
        row[v] = 1;
    }
    for a in quiver.arrows() {
        e[a.src][a.dst] -= 1;
    }
    e
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Coxeter matrix acting on dimension vectors as τ on modules without
/// projective summands: `Φ = -C^T C^{-1}`. Since `C^{-1} = E^T` this is
/// `-(E C)^T`, an integer matrix.
pub fn coxeter(quiver: &Quiver) -> Vec<Vec<i64>> {
    let ec = mat_mul(&euler_matrix(quiver), &cartan(quiver));
    transpose(&ec)
        .into_iter()
        .map(|r| r.into_iter().map(|x| -x).collect())
        .collect()
}

/// `Φ^{-1} = -C E`, acting as τ⁻ on modules without injective summands.
pub fn coxeter_inverse(quiver: &Quiver) -> Vec<Vec<i64>> {
    mat_mul(&cartan(quiver), &euler_matrix(quiver))
        .into_iter()
        .map(|r| r.into_iter().map(|x| -x).collect())
        .collect()
}

/// `Φ^k x`; negative `k` applies the inverse.
pub fn coxeter_apply(quiver: &Quiver, x: &[i64], k: i64) -> Result<DimVector, HomError> {
    check_len(quiver, x)?;
    let m = if k >= 0 {
        coxeter(quiver)
    } else {
        coxeter_inverse(quiver)
    };
    let mut v = x.to_vec();
    for _ in 0..k.unsigned_abs() {
        v = m
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
    }
    Ok(v)
}

/// Cartan matrix, Coxeter matrix and null root as exact rational data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearFormData {
    pub cartan: Matrix,
    pub coxeter: Matrix,
    pub null_root: DimVector,
}

pub fn bilinear_form_data(quiver: &Quiver) -> BilinearFormData {
    let to_matrix = |m: Vec<Vec<i64>>| {
        let n = m.len();
        Matrix::from_i64(n, n, &m.concat())
    };
    BilinearFormData {
        cartan: to_matrix(cartan(quiver)),
        coxeter: to_matrix(coxeter(quiver)),
        null_root: null_root(quiver),
    }
}

/// Variable layout of the intertwiner system: `f_v` is a `dN_v x dM_v`
/// block stored row-major from `offset[v]`.
struct HomLayout {
    offset: Vec<usize>,
    total: usize,
}

impl HomLayout {
    fn new(m: &Representation, n: &Representation) -> Self {
        let mut offset = Vec::with_capacity(m.dims().len());
        let mut total = 0;
        for (dm, dn) in m.dims().iter().zip(n.dims()) {
            offset.push(total);
            total += dm * dn;
        }
        HomLayout { offset, total }
    }

    fn var(&self, m: &Representation, v: usize, i: usize, j: usize) -> usize {
        self.offset[v] + i * m.dims()[v] + j
    }
}

fn hom_system(m: &Representation, n: &Representation) -> Result<(HomLayout, LinearSystem), HomError> {
    if m.quiver() != n.quiver() {
        return Err(HomError::QuiverMismatch);
    }
    let layout = HomLayout::new(m, n);
    let mut sys = LinearSystem::new(layout.total);
    for (idx, a) in m.quiver().arrows().iter().enumerate() {
        let (u, w) = (a.src, a.dst);
        let ma = m.map(idx);
        let na = n.map(idx);
        // Sparse columns of M_a and sparse rows of N_a.
        let m_cols: Vec<Vec<(usize, &Rational)>> = (0..ma.cols())
            .map(|j| {
                (0..ma.rows())
                    .filter_map(|k| {
                        let e = ma.get(k, j);
                        (!num_traits::Zero::is_zero(e)).then_some((k, e))
                    })
                    .collect()
            })
            .collect();
        let n_rows: Vec<Vec<(usize, &Rational)>> = (0..na.rows())
            .map(|i| {
                (0..na.cols())
                    .filter_map(|k| {
                        let e = na.get(i, k);
                        (!num_traits::Zero::is_zero(e)).then_some((k, e))
                    })
                    .collect()
            })
            .collect();
        // (f_w M_a - N_a f_u)[i][j] = 0
        for i in 0..n.dims()[w] {
            for j in 0..m.dims()[u] {
                let mut terms = Vec::with_capacity(m_cols[j].len() + n_rows[i].len());
                for &(k, e) in &m_cols[j] {
                    terms.push((layout.var(m, w, i, k), e.clone()));
                }
                for &(k, e) in &n_rows[i] {
                    terms.push((layout.var(m, u, k, j), -e.clone()));
                }
                sys.add_row(terms);
            }
        }
    }
    Ok((layout, sys))
}

pub fn hom_dim(m: &Representation, n: &Representation) -> Result<usize, HomError> {
    let (_, sys) = hom_system(m, n)?;
    Ok(sys.kernel_dim())
}

/// A basis of Hom(M, N); each morphism is given by its matrices `f_v`
/// (shape `dN_v x dM_v`), one per vertex.
pub fn hom_basis(m: &Representation, n: &Representation) -> Result<Vec<Vec<Matrix>>, HomError> {
    let (layout, sys) = hom_system(m, n)?;
    Ok(sys
        .kernel_basis()
        .into_iter()
        .map(|vec| {
            (0..m.dims().len())
                .map(|v| {
                    let (r, c) = (n.dims()[v], m.dims()[v]);
                    let start = layout.offset[v];
                    Matrix::from_entries(r, c, vec[start..start + r * c].to_vec())
                        .expect("block shape matches layout")
                })
                .collect()
        })
        .collect())
}

/// `ext1 = hom - <dim M, dim N>`, exact because the algebra is hereditary.
pub fn ext1_from_hom(m: &Representation, n: &Representation, hom: usize) -> Result<usize, HomError> {
    let euler = euler_form(m.quiver(), &m.dim_vector(), &n.dim_vector())?;
    let ext = hom as i64 - euler;
    if ext < 0 {
        return Err(HomError::NegativeExt { hom, euler });
    }
    Ok(ext as usize)
}

pub fn ext1_dim(m: &Representation, n: &Representation) -> Result<usize, HomError> {
    let hom = hom_dim(m, n)?;
    ext1_from_hom(m, n, hom)
}

pub fn end_dim(m: &Representation) -> usize {
    hom_dim(m, m).expect("a representation shares its own quiver")
}

pub fn self_ext(m: &Representation) -> usize {
    ext1_dim(m, m).expect("a representation shares its own quiver")
}

pub fn is_exceptional(m: &Representation) -> bool {
    let e = end_dim(m);
    e == 1 && ext1_from_hom(m, m, e).map(|x| x == 0).unwrap_or(false)
}

/// Number of random Hom combinations tried by [`is_isomorphic`].
pub const ISO_TRIALS: usize = 8;
/// Coefficients of the random combinations lie in `[-ISO_COEFF, ISO_COEFF]`.
pub const ISO_COEFF: i64 = 997;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    pub note: String,
}

/// Decides isomorphism by searching for an intertwiner that is invertible at
/// every vertex among random combinations of a Hom basis. A positive answer
/// is exact; a negative one after all trials is reported with a note.
pub fn is_isomorphic(m: &Representation, n: &Representation, seed: u64) -> Result<IsoVerdict, HomError> {
    if m.quiver() != n.quiver() {
        return Err(HomError::QuiverMismatch);
    }
    if m.dims() != n.dims() {
        return Ok(IsoVerdict {
            isomorphic: false,
            note: "dimension vectors differ".into(),
        });
    }
    if m.is_zero() {
        return Ok(IsoVerdict {
            isomorphic: true,
            note: "both zero".into(),
        });
    }
    let basis = hom_basis(m, n)?;
    if basis.is_empty() {
        return Ok(IsoVerdict {
            isomorphic: false,
            note: "Hom space is zero".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = Field::nth(0);
    for trial in 0..ISO_TRIALS {
        let coeffs: Vec<Rational> = (0..basis.len())
            .map(|_| rat(rng.gen_range(-ISO_COEFF..=ISO_COEFF)))
            .collect();
        let invertible = (0..m.dims().len()).all(|v| {
            let d = m.dims()[v];
            if d == 0 {
                return true;
            }
            let mut block = Matrix::zeros(d, d);
            for (c, f) in coeffs.iter().zip(&basis) {
                for i in 0..d {
                    for j in 0..d {
                        let e = f[v].get(i, j);
                        if !num_traits::Zero::is_zero(e) {
                            let val = block.get(i, j) + c * e;
                            block.set(i, j, val);
                        }
                    }
                }
            }
            block_invertible(&field, &block)
        });
        if invertible {
            return Ok(IsoVerdict {
                isomorphic: true,
                note: format!("invertible intertwiner found on trial {}", trial + 1),
            });
        }
    }
    Ok(IsoVerdict {
        isomorphic: false,
        note: format!("no invertible intertwiner among {ISO_TRIALS} random combinations"),
    })
}

fn block_invertible(field: &Field, block: &Matrix) -> bool {
    let d = block.rows();
    let reduced: Option<Vec<Vec<u64>>> = (0..d)
        .map(|i| (0..d).map(|j| field.from_rational(block.get(i, j))).collect())
        .collect();
    if let Some(rows) = reduced {
        if modular::rank(field, rows, d) == d {
            return true;
        }
    }
    block.rank() == d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q23() -> Quiver {
        Quiver::new(2, 3).unwrap()
    }

    #[test]
    fn euler_form_examples() {
        let q = q23();
        let e = |v: usize| {
            let mut x = vec![0; 5];
            x[v] = 1;
            x
        };
        assert_eq!(euler_form(&q, &e(0), &e(0)).unwrap(), 1);
        assert_eq!(euler_form(&q, &e(1), &e(0)).unwrap(), -1);
        assert_eq!(euler_form(&q, &[1; 5], &[1; 5]).unwrap(), 0);
        assert!(euler_form(&q, &[1; 4], &[1; 5]).is_err());
    }

    #[test]
    fn defect_examples() {
        let q = q23();
        assert_eq!(defect(&q, &[1, 0, 0, 0, 0]).unwrap(), -1);
        assert_eq!(defect(&q, &[1; 5]).unwrap(), 0);
        assert_eq!(defect(&q, &[0, 0, 0, 0, 1]).unwrap(), 1);
    }

    #[test]
    fn coxeter_examples() {
        let q = q23();
        // dim E_2^inf = (1,0,1,1,1) goes to dim S_1.
        assert_eq!(coxeter_apply(&q, &[1, 0, 1, 1, 1], 1).unwrap(), vec![0, 1, 0, 0, 0]);
        assert_eq!(coxeter_apply(&q, &[3, 1, 4, 1, 5], 0).unwrap(), vec![3, 1, 4, 1, 5]);
        assert_eq!(coxeter_apply(&q, &[1; 5], 7).unwrap(), vec![1; 5]);
        let x = vec![2, 0, 1, 3, 1];
        let there = coxeter_apply(&q, &x, 3).unwrap();
        assert_eq!(coxeter_apply(&q, &there, -3).unwrap(), x);
    }

    #[test]
    fn cartan_columns_are_projective_dims() {
        let c = cartan(&q23());
        let col4: Vec<i64> = c.iter().map(|r| r[4]).collect();
        assert_eq!(col4, vec![2, 1, 1, 1, 1]);
        let data = bilinear_form_data(&q23());
        assert!(data.cartan.inverse().unwrap().is_integral());
    }

    #[test]
    fn simple_homs() {
        let q = q23();
        let s0 = Representation::simple(&q, 0).unwrap();
        let s1 = Representation::simple(&q, 1).unwrap();
        assert_eq!(hom_dim(&s0, &s0).unwrap(), 1);
        assert_eq!(hom_dim(&s0, &s1).unwrap(), 0);
        // Ext(S_1, S_0) = 1 via the arrow 1 -> 0.
        assert_eq!(ext1_dim(&s1, &s0).unwrap(), 1);
        assert_eq!(ext1_dim(&s0, &s1).unwrap(), 0);
        let two = Representation::direct_sum(&q, &[&s0, &s0]).unwrap();
        assert_eq!(end_dim(&two), 4);
        assert!(!is_exceptional(&two));
        assert!(is_exceptional(&s1));
    }

    #[test]
    fn isomorphism_of_simples() {
        let q = q23();
        let s1 = Representation::simple(&q, 1).unwrap();
        let s2 = Representation::simple(&q, 2).unwrap();
        assert!(is_isomorphic(&s1, &s1, 0).unwrap().isomorphic);
        assert!(!is_isomorphic(&s1, &s2, 0).unwrap().isomorphic);
    }
}
