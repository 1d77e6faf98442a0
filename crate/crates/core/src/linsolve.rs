//! Dense solvers for the regularized training system and the recursive
//! least-squares state used by the online classifiers.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Condition estimate above which the initial normal matrix of an online
/// model is treated as singular.
pub const RANK_CONDITION_LIMIT: f64 = 1e12;

const REFINEMENT_STEPS: usize = 3;

/// A factorization of a square matrix that can be reused for several
/// right-hand sides.
#[derive(Debug, Clone)]
pub enum Factorization {
    /// Lower Cholesky factor `L` with `A = L·Lᵀ`.
    Cholesky(Matrix),
    /// Packed `L\U` factors with the row permutation.
    Lu { lu: Matrix, perm: Vec<usize> },
}

impl Factorization {
    /// Cholesky first, partial-pivoting LU if the matrix is not numerically
    /// positive definite.
    pub fn new(a: &Matrix) -> Result<Self> {
        match cholesky(a) {
            Some(l) => Ok(Self::Cholesky(l)),
            None => lu(a),
        }
    }

    pub fn solve(&self, b: &Matrix) -> Matrix {
        match self {
            Self::Cholesky(l) => cholesky_solve(l, b),
            Self::Lu { lu, perm } => lu_solve(lu, perm, b),
        }
    }

    /// Cheap condition estimate from the diagonal of the triangular factor.
    pub fn condition_estimate(&self) -> f64 {
        match self {
            Self::Cholesky(l) => {
                let (lo, hi) = diag_range(l);
                let r = hi / lo;
                r * r
            }
            Self::Lu { lu, .. } => {
                let (lo, hi) = diag_range(lu);
                hi / lo
            }
        }
    }
}

fn diag_range(m: &Matrix) -> (f64, f64) {
    (0..m.rows()).fold((f64::INFINITY, 0.0_f64), |(lo, hi), i| {
        let d = m[(i, i)].abs();
        (lo.min(d), hi.max(d))
    })
}

/// Lower Cholesky factor, or `None` when a pivot is not strictly positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j);
        let d = a[(j, j)] - lj[..j].iter().map(|x| x * x).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = djj;
        for i in j + 1..n {
            let s: f64 = {
                let (li, lj) = (l.row(i), l.row(j));
                li[..j].iter().zip(&lj[..j]).map(|(x, y)| x * y).sum()
            };
            l[(i, j)] = (a[(i, j)] - s) / djj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let k = b.cols();
    let mut x = b.clone();
    // L·y = b
    for i in 0..n {
        for c in 0..k {
            let mut s = x[(i, c)];
            for j in 0..i {
                s -= l[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    // Lᵀ·x = y
    for i in (0..n).rev() {
        for c in 0..k {
            let mut s = x[(i, c)];
            for j in i + 1..n {
                s -= l[(j, i)] * x[(j, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

fn lu(a: &Matrix) -> Result<Factorization> {
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.as_slice().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pmax > scale * f64::EPSILON * n as f64) {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
    }
    Ok(Factorization::Lu { lu, perm })
}

fn lu_solve(lu: &Matrix, perm: &[usize], b: &Matrix) -> Matrix {
    let n = lu.rows();
    let k = b.cols();
    let mut x = b.select_rows(perm);
    for i in 0..n {
        for c in 0..k {
            let mut s = x[(i, c)];
            for j in 0..i {
                s -= lu[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s;
        }
    }
    for i in (0..n).rev() {
        for c in 0..k {
            let mut s = x[(i, c)];
            for j in i + 1..n {
                s -= lu[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / lu[(i, i)];
        }
    }
    x
}

/// Solves `(Ω + I/C)·β = T` for symmetric `Ω`.
///
/// The factorization is followed by a few rounds of iterative refinement,
/// which keeps the residual at working precision for large `C`.
pub fn solve_regularized(omega: &Matrix, targets: &Matrix, c: f64) -> Result<Matrix> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter("regularization C must be positive"));
    }
    let n = omega.rows();
    if omega.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: omega.cols(),
        });
    }
    if targets.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: targets.rows(),
        });
    }
    let mut a = omega.clone();
    a.add_diagonal(1.0 / c);
    let fact = Factorization::new(&a)?;
    let mut beta = fact.solve(targets);
    if !beta.is_finite() {
        return Err(Error::SingularSystem {
            condition: fact.condition_estimate(),
        });
    }
    let tol = f64::EPSILON * (1.0 + targets.frobenius_norm());
    for _ in 0..REFINEMENT_STEPS {
        let residual = targets.sub(&a.matmul(&beta)?)?;
        if residual.frobenius_norm() <= tol {
            break;
        }
        let delta = fact.solve(&residual);
        beta = beta.add(&delta)?;
    }
    Ok(beta)
}

/// Recursive least-squares state: `P = (HᵀH)⁻¹` and the output weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    p: Matrix,
    beta: Matrix,
}

impl RlsState {
    /// Initial batch solve `β₀ = P₀·H₀ᵀ·T₀` with `P₀ = (H₀ᵀH₀)⁻¹`.
    pub fn init(h0: &Matrix, t0: &Matrix) -> Result<Self> {
        let (n0, m) = h0.shape();
        if t0.rows() != n0 {
            return Err(Error::DimensionMismatch {
                expected: n0,
                found: t0.rows(),
            });
        }
        if n0 < m {
            return Err(Error::TooFewInitialSamples {
                found: n0,
                hidden: m,
            });
        }
        let gram = h0.t_matmul(h0)?;
        let l = cholesky(&gram).ok_or(Error::RankDeficient {
            condition: f64::INFINITY,
        })?;
        let fact = Factorization::Cholesky(l);
        let condition = fact.condition_estimate();
        if !(condition <= RANK_CONDITION_LIMIT) {
            return Err(Error::RankDeficient { condition });
        }
        let mut p = fact.solve(&Matrix::identity(m));
        p.symmetrize();
        let beta = fact.solve(&h0.t_matmul(t0)?);
        Ok(Self { p, beta })
    }

    /// Absorbs one chunk (any number of rows, one included).
    pub fn update(&mut self, h1: &Matrix, t1: &Matrix) -> Result<()> {
        let m = self.hidden_width();
        if h1.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: h1.cols(),
            });
        }
        if t1.rows() != h1.rows() {
            return Err(Error::DimensionMismatch {
                expected: h1.rows(),
                found: t1.rows(),
            });
        }
        if t1.cols() != self.output_width() {
            return Err(Error::DimensionMismatch {
                expected: self.output_width(),
                found: t1.cols(),
            });
        }
        // P Hᵀ, then S = I + H P Hᵀ
        let pht = self.p.matmul_t(h1)?;
        let mut s = h1.matmul(&pht)?;
        s.add_diagonal(1.0);
        s.symmetrize();
        let fact = Factorization::new(&s)?;
        // S⁻¹ H P, using the symmetry of P
        let s_inv_hp = fact.solve(&pht.transpose());
        self.p = self.p.sub(&pht.matmul(&s_inv_hp)?)?;
        self.p.symmetrize();

        let innovation = t1.sub(&h1.matmul(&self.beta)?)?;
        let gain = self.p.matmul_t(h1)?;
        self.beta = self.beta.add(&gain.matmul(&innovation)?)?;
        Ok(())
    }

    /// Restores a stored state.
    pub fn from_parts(p: Matrix, beta: Matrix) -> Result<Self> {
        if p.rows() != p.cols() || p.rows() != beta.rows() {
            return Err(Error::DimensionMismatch {
                expected: p.rows(),
                found: beta.rows(),
            });
        }
        Ok(Self { p, beta })
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    pub fn hidden_width(&self) -> usize {
        self.p.rows()
    }

    pub fn output_width(&self) -> usize {
        self.beta.cols()
    }
}
