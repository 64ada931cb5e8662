//! Linear systems whose unknown is a tuple of matrices, one per vertex.
//!
//! Constraints have the shape `xi_u * R - L * xi_v = C` where either side
//! may be absent. This covers intertwiner equations `g x_h = x'_h g`
//! (R = x_h, L = x'_h, C = 0) as well as one-sided conditions such as
//! `xi a'' = a` or `b xi = b''`. Solving stacks everything into one exact
//! system; invertible solutions are found by random sampling of the affine
//! solution space, certified by exact determinants.

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational, Scalar};

/// One constraint `xi_u * right - left * xi_v = rhs`; absent sides are zero.
#[derive(Debug, Clone)]
pub struct TupleConstraint {
    pub u: Option<(usize, Matrix)>,
    pub v: Option<(Matrix, usize)>,
    pub rhs: Matrix,
}

impl TupleConstraint {
    /// `xi_u * right - left * xi_v = 0`.
    pub fn homogeneous(u: usize, right: Matrix, left: Matrix, v: usize) -> Self {
        let rhs = Matrix::zeros(crate::scalar::Mode::Exact, left.rows(), right.cols());
        Self { u: Some((u, right)), v: Some((left, v)), rhs }
    }

    /// `xi_u * right = rhs`.
    pub fn right_only(u: usize, right: Matrix, rhs: Matrix) -> Self {
        Self { u: Some((u, right)), v: None, rhs }
    }

    /// `left * xi_v = rhs`.
    pub fn left_only(left: Matrix, v: usize, rhs: Matrix) -> Self {
        Self { u: None, v: Some((left, v)), rhs: rhs.neg() }
    }
}

/// The stacked system for an unknown tuple with prescribed per-vertex shapes.
pub struct TupleSystem {
    pub shapes: Vec<(usize, usize)>,
    pub constraints: Vec<TupleConstraint>,
}

/// Particular tuple plus a basis of the homogeneous solution space.
pub struct TupleSolution {
    pub particular: Vec<Matrix>,
    pub nullspace: Vec<Vec<Matrix>>,
}

impl TupleSystem {
    pub fn new(shapes: Vec<(usize, usize)>) -> Self {
        Self { shapes, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: TupleConstraint) {
        self.constraints.push(c);
    }

    fn unknown_count(&self) -> usize {
        self.shapes.iter().map(|&(r, c)| r * c).sum()
    }

    fn offset(&self, vertex: usize) -> usize {
        self.shapes[..vertex].iter().map(|&(r, c)| r * c).sum()
    }

    fn validate(&self) -> Result<()> {
        for con in &self.constraints {
            con.rhs.require_exact("constraint rhs")?;
            if let Some((u, right)) = &con.u {
                right.require_exact("constraint right factor")?;
                let (ur, uc) = self.shapes[*u];
                if right.rows() != uc || right.cols() != con.rhs.cols() || con.rhs.rows() != ur {
                    return Err(CoreError::ShapeMismatch(format!(
                        "xi_{u} * right: xi is {ur}x{uc}, right is {}x{}, rhs {}x{}",
                        right.rows(), right.cols(), con.rhs.rows(), con.rhs.cols()
                    )));
                }
            }
            if let Some((left, v)) = &con.v {
                left.require_exact("constraint left factor")?;
                let (vr, vc) = self.shapes[*v];
                if left.cols() != vr || left.rows() != con.rhs.rows() || con.rhs.cols() != vc {
                    return Err(CoreError::ShapeMismatch(format!(
                        "left * xi_{v}: xi is {vr}x{vc}, left is {}x{}, rhs {}x{}",
                        left.rows(), left.cols(), con.rhs.rows(), con.rhs.cols()
                    )));
                }
            }
        }
        Ok(())
    }

    fn assemble(&self) -> Result<(Matrix, Matrix)> {
        self.validate()?;
        let n = self.unknown_count();
        let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
        let mut rhs_entries: Vec<GaussianRational> = Vec::new();
        for con in &self.constraints {
            for j in 0..con.rhs.rows() {
                for l in 0..con.rhs.cols() {
                    let mut row = vec![GaussianRational::zero(); n];
                    if let Some((u, right)) = &con.u {
                        let (_, uc) = self.shapes[*u];
                        let off = self.offset(*u);
                        // d/d(xi_u)_{j,k} of (xi_u * right)_{j,l} = right_{k,l}
                        for k in 0..uc {
                            let coef = right.entry_exact(k, l);
                            if !coef.is_zero() {
                                row[off + j * uc + k] = row[off + j * uc + k].add(coef);
                            }
                        }
                    }
                    if let Some((left, v)) = &con.v {
                        let (vr, vc) = self.shapes[*v];
                        let off = self.offset(*v);
                        // d/d(xi_v)_{k,l} of (left * xi_v)_{j,l} = left_{j,k}
                        for k in 0..vr {
                            let coef = left.entry_exact(j, k);
                            if !coef.is_zero() {
                                row[off + k * vc + l] = row[off + k * vc + l].sub(coef);
                            }
                        }
                    }
                    rows.push(row);
                    rhs_entries.push(con.rhs.entry_exact(j, l).clone());
                }
            }
        }
        if rows.is_empty() {
            rows.push(vec![GaussianRational::zero(); n]);
            rhs_entries.push(GaussianRational::zero());
        }
        let coeff = Matrix::from_exact_rows(rows);
        let rhs = Matrix::from_fn_exact(rhs_entries.len(), 1, |r, _| rhs_entries[r].clone());
        Ok((coeff, rhs))
    }

    fn unflatten(&self, flat: &Matrix, col: usize) -> Vec<Matrix> {
        self.shapes
            .iter()
            .enumerate()
            .map(|(v, &(r, c))| {
                let off = self.offset(v);
                Matrix::from_fn_exact(r, c, |i, j| flat.entry_exact(off + i * c + j, col).clone())
            })
            .collect()
    }

    /// Solves the stacked system exactly; `None` means the augmented system
    /// is inconsistent (certified by the same elimination).
    pub fn solve(&self) -> Result<Option<TupleSolution>> {
        let (coeff, rhs) = self.assemble()?;
        let Some(particular) = coeff.solve(&rhs)? else {
            return Ok(None);
        };
        let kernel = coeff.kernel_basis()?;
        let nullspace = (0..kernel.cols()).map(|c| self.unflatten(&kernel, c)).collect();
        Ok(Some(TupleSolution { particular: self.unflatten(&particular, 0), nullspace }))
    }

    /// Searches the affine solution space for a tuple with every component
    /// square and invertible, certifying by exact determinant.
    pub fn solve_invertible<R: Rng>(&self, rng: &mut R, budget: usize) -> Result<Option<Vec<Matrix>>> {
        for (r, c) in &self.shapes {
            if r != c {
                return Err(CoreError::ShapeMismatch(
                    "invertible solutions require square components".into(),
                ));
            }
        }
        let Some(sol) = self.solve()? else {
            return Ok(None);
        };
        let all_invertible = |t: &[Matrix]| -> Result<bool> {
            for m in t {
                if !m.is_invertible()? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        if all_invertible(&sol.particular)? {
            return Ok(Some(sol.particular));
        }
        for _ in 0..budget {
            let mut candidate = sol.particular.clone();
            for basis in &sol.nullspace {
                let coef = GaussianRational::from_ratio(rng.gen_range(-6i64..=6), 1);
                for (acc, b) in candidate.iter_mut().zip(basis) {
                    *acc = acc.add(&b.scale(&Scalar::Exact(coef.clone()))?)?;
                }
            }
            if all_invertible(&candidate)? {
                return Ok(Some(candidate));
            }
        }
        Ok(None)
    }
}
