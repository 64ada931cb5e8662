//! Differential of the multiplicative moment map and the numeric dimension
//! check: at a stable generic solution the kernel of the differential minus
//! the group dimension (less the central torus) equals `2 - (dim V, dim V)`.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::numeric::rank_with_gap;
use crate::quiver::ArrowRef;
use crate::rep::Representation;
use crate::root::bilinear_form;
use crate::scalar::{Mode, Scalar};

fn elementary(mode: Mode, rows: usize, cols: usize, r: usize, c: usize) -> Matrix {
    let mut e = Matrix::zeros(mode, rows, cols);
    e.set(r, c, Scalar::one(mode)).unwrap();
    e
}

/// The exact Jacobian of `Phi` at `rep`: rows run over the entries of all
/// vertex components, columns over the entries of all arrow maps (forward
/// then reversed, per base arrow). Entries are derivatives of ordered
/// products, with inverse factors differentiated through
/// `d(G^{-1}) = -G^{-1} dG G^{-1}`.
pub fn phi_jacobian(rep: &Representation) -> Result<Matrix> {
    if rep.dq.has_loops() {
        return Err(CoreError::Unsupported("jacobian of phi rejects loops".into()));
    }
    let mode = rep.mode();
    let dq = &rep.dq;
    let nv = dq.vertex_count();

    // Parameter layout: per base arrow, forward entries then reversed.
    let mut params: Vec<(ArrowRef, usize, usize)> = Vec::new();
    for k in 0..dq.base.arrows.len() {
        for rev in [false, true] {
            let h = ArrowRef { arrow: k, reversed: rev };
            let (r, c) = (rep.dim_at(dq.head(h)), rep.dim_at(dq.tail(h)));
            for i in 0..r {
                for j in 0..c {
                    params.push((h, i, j));
                }
            }
        }
    }
    let row_count: usize = (0..nv).map(|i| rep.dim_at(i) * rep.dim_at(i)).sum();
    let mut jac = Matrix::zeros(mode, row_count, params.len());

    // Per-vertex factor data.
    struct VertexFactors {
        incoming: Vec<ArrowRef>,
        factors: Vec<Matrix>,  // F_h = G_h or G_h^{-1}
        raw: Vec<Matrix>,      // G_h = 1 + x_h x_hbar
        prefix: Vec<Matrix>,   // products of factors before position j
        suffix: Vec<Matrix>,   // products of factors after position j
    }
    let mut per_vertex = Vec::with_capacity(nv);
    for i in 0..nv {
        let incoming = dq.incoming(i);
        let mut raw = Vec::new();
        let mut factors = Vec::new();
        for &h in &incoming {
            let g = rep.factor(h)?;
            let f = if h.reversed {
                match mode {
                    Mode::Exact => g.inverse()?.ok_or_else(|| CoreError::SingularFactor {
                        arrow: dq.arrow_name(h),
                    })?,
                    Mode::Float => crate::numeric::float_inverse(&g)?,
                }
            } else {
                g.clone()
            };
            raw.push(g);
            factors.push(f);
        }
        let m = factors.len();
        let id = Matrix::identity(mode, rep.dim_at(i));
        let mut prefix = vec![id.clone(); m + 1];
        for j in 0..m {
            prefix[j + 1] = prefix[j].mul(&factors[j])?;
        }
        let mut suffix = vec![id; m + 1];
        for j in (0..m).rev() {
            suffix[j] = factors[j].mul(&suffix[j + 1])?;
        }
        per_vertex.push(VertexFactors { incoming, factors, raw, prefix, suffix });
    }

    let mut row_offsets = vec![0usize; nv];
    {
        let mut acc = 0usize;
        for i in 0..nv {
            row_offsets[i] = acc;
            acc += rep.dim_at(i) * rep.dim_at(i);
        }
    }

    for (col, &(ph, pr, pc)) in params.iter().enumerate() {
        // Only the two vertices incident to the arrow see this parameter.
        for i in 0..nv {
            let vf = &per_vertex[i];
            let di = rep.dim_at(i);
            if di == 0 {
                continue;
            }
            let mut dphi = Matrix::zeros(mode, di, di);
            let mut touched = false;
            for (j, &h) in vf.incoming.iter().enumerate() {
                if h.arrow != ph.arrow {
                    continue;
                }
                // dG_h = (d x_h) x_hbar + x_h (d x_hbar).
                let mut dg = Matrix::zeros(mode, di, di);
                if h == ph {
                    let e = elementary(mode, rep.dim_at(dq.head(h)), rep.dim_at(dq.tail(h)), pr, pc);
                    dg = dg.add(&e.mul(rep.map(h.reverse()))?)?;
                }
                if h.reverse() == ph {
                    let e = elementary(
                        mode,
                        rep.dim_at(dq.tail(h)),
                        rep.dim_at(dq.head(h)),
                        pr,
                        pc,
                    );
                    dg = dg.add(&rep.map(h).mul(&e)?)?;
                }
                if dg.is_zero() {
                    continue;
                }
                let df = if h.reversed {
                    vf.factors[j].mul(&dg)?.mul(&vf.factors[j])?.neg()
                } else {
                    dg
                };
                let term = vf.prefix[j].mul(&df)?.mul(&vf.suffix[j + 1])?;
                dphi = dphi.add(&term)?;
                touched = true;
            }
            let _ = &vf.raw;
            if !touched {
                continue;
            }
            for r in 0..di {
                for c in 0..di {
                    jac.set(row_offsets[i] + r * di + c, col, dphi.get(r, c))?;
                }
            }
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone)]
pub struct JacobianDimensionReport {
    pub rank: usize,
    /// Ratio of the last kept to the first dropped singular value.
    pub gap: f64,
    pub parameter_dim: i64,
    pub group_dim: i64,
    pub kernel_dim: i64,
    /// `kernel - (group_dim - 1)`.
    pub measured_moduli_dim: i64,
    /// `2 - (dim V, dim V)`.
    pub expected_moduli_dim: i64,
}

impl JacobianDimensionReport {
    pub fn matches(&self) -> bool {
        self.measured_moduli_dim == self.expected_moduli_dim
    }
}

/// Computes the Jacobian exactly, estimates its complex rank numerically at
/// the relative tolerance, and compares the rank-nullity count with the
/// expected moduli dimension.
pub fn jacobian_dimension_check(rep: &Representation, tol: f64) -> Result<JacobianDimensionReport> {
    let jac = phi_jacobian(rep)?.to_float();
    let (rank, gap) = rank_with_gap(&jac, tol)?;
    let parameter_dim = jac.cols() as i64;
    let group_dim: i64 = rep.dims.iter().map(|&d| d * d).sum();
    let kernel_dim = parameter_dim - rank as i64;
    let pairing = bilinear_form(&rep.dq, &rep.dims, &rep.dims)?;
    Ok(JacobianDimensionReport {
        rank,
        gap,
        parameter_dim,
        group_dim,
        kernel_dim,
        measured_moduli_dim: kernel_dim - (group_dim - 1),
        expected_moduli_dim: 2 - pairing,
    })
}
