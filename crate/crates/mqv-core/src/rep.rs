//! Representations of a doubled quiver and the relation maps on them:
//! the multiplicative moment map phi with its plus/minus split and the
//! sigma/tau presentation, the additive moment map mu, the loop variant
//! psi, relation residuals, and the first-order comparison probe.

use num::complex::Complex64;

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::numeric::float_inverse;
use crate::quiver::{ArrowRef, DoubledQuiver};
use crate::root::DimVec;
use crate::scalar::{GaussianRational, Mode, Scalar};

/// One matrix per doubled arrow; `map(h)` has shape `dims(head) x dims(tail)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub dq: DoubledQuiver,
    pub dims: DimVec,
    maps: Vec<(Matrix, Matrix)>,
    mode: Mode,
}

impl Representation {
    /// `maps[k] = (x_h, x_hbar)` for the k-th base arrow.
    pub fn new(dq: DoubledQuiver, dims: DimVec, maps: Vec<(Matrix, Matrix)>) -> Result<Self> {
        if dims.len() != dq.vertex_count() {
            return Err(CoreError::ContractViolation("dims length != vertex count".into()));
        }
        if dims.iter().any(|&d| d < 0) {
            return Err(CoreError::ContractViolation("negative dimension".into()));
        }
        if maps.len() != dq.base.arrows.len() {
            return Err(CoreError::ContractViolation("one map pair per base arrow required".into()));
        }
        let mode = maps
            .first()
            .map(|(f, _)| f.mode())
            .unwrap_or(Mode::Exact);
        for (k, (fwd, bwd)) in maps.iter().enumerate() {
            let a = &dq.base.arrows[k];
            let (head, tail) = (a.in_v as usize, a.out_v as usize);
            if fwd.rows() as i64 != dims[head] || fwd.cols() as i64 != dims[tail] {
                return Err(CoreError::ShapeMismatch(format!(
                    "map for arrow `{}` must be {}x{}, got {}x{}",
                    a.id, dims[head], dims[tail], fwd.rows(), fwd.cols()
                )));
            }
            if bwd.rows() as i64 != dims[tail] || bwd.cols() as i64 != dims[head] {
                return Err(CoreError::ShapeMismatch(format!(
                    "map for arrow `{}~` must be {}x{}, got {}x{}",
                    a.id, dims[tail], dims[head], bwd.rows(), bwd.cols()
                )));
            }
            if fwd.mode() != mode || bwd.mode() != mode {
                return Err(CoreError::ModeMismatch("all maps must share one mode".into()));
            }
        }
        Ok(Self { dq, dims, maps, mode })
    }

    /// The zero representation in the given mode.
    pub fn zero(dq: DoubledQuiver, dims: DimVec, mode: Mode) -> Result<Self> {
        let maps = dq
            .base
            .arrows
            .iter()
            .map(|a| {
                (
                    Matrix::zeros(mode, dims[a.in_v] as usize, dims[a.out_v] as usize),
                    Matrix::zeros(mode, dims[a.out_v] as usize, dims[a.in_v] as usize),
                )
            })
            .collect();
        Self::new(dq, dims, maps)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn map(&self, h: ArrowRef) -> &Matrix {
        let (fwd, bwd) = &self.maps[h.arrow];
        if h.reversed { bwd } else { fwd }
    }

    pub fn set_map(&mut self, h: ArrowRef, m: Matrix) -> Result<()> {
        let want_rows = self.dims[self.dq.head(h)] as usize;
        let want_cols = self.dims[self.dq.tail(h)] as usize;
        if m.rows() != want_rows || m.cols() != want_cols {
            return Err(CoreError::ShapeMismatch("set_map".into()));
        }
        if m.mode() != self.mode {
            return Err(CoreError::ModeMismatch("set_map".into()));
        }
        let (fwd, bwd) = &mut self.maps[h.arrow];
        if h.reversed { *bwd = m } else { *fwd = m }
        Ok(())
    }

    pub fn dim_at(&self, vertex: usize) -> usize {
        self.dims[vertex] as usize
    }

    /// `1 + x_h x_hbar`, the factor the multiplicative relation multiplies
    /// at `head(h)` (before taking the epsilon power).
    pub fn factor(&self, h: ArrowRef) -> Result<Matrix> {
        let prod = self.map(h).mul(self.map(h.reverse()))?;
        let id = Matrix::identity(self.mode, prod.rows());
        id.add(&prod)
    }

    fn invert_factor(&self, f: &Matrix, h: ArrowRef) -> Result<Matrix> {
        match self.mode {
            Mode::Exact => f.inverse()?.ok_or_else(|| CoreError::SingularFactor {
                arrow: self.dq.arrow_name(h),
            }),
            Mode::Float => float_inverse(f),
        }
    }

    /// True when `det(1 + x_h x_hbar) != 0` for every non-loop arrow and
    /// both maps of every loop are invertible. Exact mode only.
    pub fn in_invertibility_domain(&self) -> Result<bool> {
        if self.mode != Mode::Exact {
            return Err(CoreError::ExactModeRequired("in_invertibility_domain".into()));
        }
        for k in 0..self.maps.len() {
            let h = ArrowRef::forward(k);
            if self.dq.is_loop(h) {
                if !self.map(h).is_invertible()? || !self.map(h.reverse()).is_invertible()? {
                    return Ok(false);
                }
            } else if !self.factor(h)?.is_invertible()? {
                // det(1 + x_h x_hbar) = det(1 + x_hbar x_h), so one side
                // decides for both orientations of the arrow.
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The multiplicative moment map: at each vertex the ordered product of
    /// `(1 + x_h x_hbar)^{epsilon(h)}` over incoming doubled arrows.
    /// Rejects loops; loop-bearing quivers go through `psi`.
    pub fn phi(&self) -> Result<Vec<Matrix>> {
        if self.dq.has_loops() {
            return Err(CoreError::Unsupported(
                "phi is undefined on quivers with loops; use psi".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.dq.vertex_count());
        for i in 0..self.dq.vertex_count() {
            let mut acc = Matrix::identity(self.mode, self.dim_at(i));
            for h in self.dq.incoming(i) {
                let f = self.factor(h)?;
                let f = if h.reversed { self.invert_factor(&f, h)? } else { f };
                acc = acc.mul(&f)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Splits `phi_i = phi_i^+ (phi_i^-)^{-1}`: the plus part multiplies the
    /// original-arrow factors in increasing order, the minus part multiplies
    /// the reversed-arrow factors in decreasing order. Requires the
    /// originals-first total order.
    pub fn phi_split(&self) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
        if !self.dq.is_omega_first() {
            return Err(CoreError::ContractViolation(
                "phi_split requires the originals-first total order".into(),
            ));
        }
        if self.dq.has_loops() {
            return Err(CoreError::Unsupported("phi_split rejects loops".into()));
        }
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for i in 0..self.dq.vertex_count() {
            let incoming = self.dq.incoming(i);
            let mut p = Matrix::identity(self.mode, self.dim_at(i));
            for &h in incoming.iter().filter(|h| !h.reversed) {
                p = p.mul(&self.factor(h)?)?;
            }
            let mut m = Matrix::identity(self.mode, self.dim_at(i));
            for &h in incoming.iter().filter(|h| h.reversed).rev() {
                m = m.mul(&self.factor(h)?)?;
            }
            plus.push(p);
            minus.push(m);
        }
        Ok((plus, minus))
    }

    /// The additive moment map `mu_i = sum epsilon(h) x_h x_hbar` over
    /// incoming doubled arrows; defined for every representation.
    pub fn mu(&self) -> Result<Vec<Matrix>> {
        let mut out = Vec::with_capacity(self.dq.vertex_count());
        for i in 0..self.dq.vertex_count() {
            let mut acc = Matrix::zeros(self.mode, self.dim_at(i), self.dim_at(i));
            for h in self.dq.incoming(i) {
                let t = self.map(h).mul(self.map(h.reverse()))?;
                acc = if h.reversed { acc.sub(&t)? } else { acc.add(&t)? };
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// The loop-aware moment map: multiplicative commutators
    /// `x_h x_hbar x_h^{-1} x_hbar^{-1}` over base loops first, then the
    /// usual factors over non-loop arrows. Coincides with `phi` when the
    /// quiver has no loops.
    pub fn psi(&self) -> Result<Vec<Matrix>> {
        let mut out = Vec::with_capacity(self.dq.vertex_count());
        for i in 0..self.dq.vertex_count() {
            let mut acc = Matrix::identity(self.mode, self.dim_at(i));
            for h in self.dq.incoming(i) {
                if self.dq.is_loop(h) {
                    if h.reversed {
                        continue; // the base loop contributes one commutator
                    }
                    let x = self.map(h);
                    let y = self.map(h.reverse());
                    let xi = match self.mode {
                        Mode::Exact => x.inverse()?.ok_or_else(|| CoreError::SingularLoop {
                            arrow: self.dq.arrow_name(h),
                        })?,
                        Mode::Float => float_inverse(x)?,
                    };
                    let yi = match self.mode {
                        Mode::Exact => y.inverse()?.ok_or_else(|| CoreError::SingularLoop {
                            arrow: self.dq.arrow_name(h.reverse()),
                        })?,
                        Mode::Float => float_inverse(y)?,
                    };
                    let comm = x.mul(y)?.mul(&xi)?.mul(&yi)?;
                    acc = acc.mul(&comm)?;
                } else {
                    let f = self.factor(h)?;
                    let f = if h.reversed { self.invert_factor(&f, h)? } else { f };
                    acc = acc.mul(&f)?;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Residuals of the relation `Phi(x) = q` (or `Psi(x) = q` when loops
    /// are present), per vertex. Exactness of the zero is meaningful in
    /// exact mode only.
    pub fn check_relation(&self, q: &[GaussianRational]) -> Result<RelationReport> {
        if q.len() != self.dq.vertex_count() {
            return Err(CoreError::ContractViolation("q length != vertex count".into()));
        }
        let value = if self.dq.has_loops() { self.psi()? } else { self.phi()? };
        let mut residuals = Vec::new();
        for (i, phi_i) in value.iter().enumerate() {
            let target = match self.mode {
                Mode::Exact => {
                    Matrix::scalar_matrix(Mode::Exact, self.dim_at(i), Scalar::Exact(q[i].clone()))?
                }
                Mode::Float => Matrix::scalar_matrix(
                    Mode::Float,
                    self.dim_at(i),
                    Scalar::Float(q[i].to_complex()),
                )?,
            };
            let diff = phi_i.sub(&target)?;
            residuals.push(VertexResidual {
                vertex: self.dq.base.vertices[i].clone(),
                exact_zero: diff.is_zero(),
                max_abs: diff.max_abs(),
            });
        }
        Ok(RelationReport { residuals })
    }

    /// Scales every map by `t` (float mode).
    pub fn scaled(&self, t: f64) -> Result<Representation> {
        if self.mode != Mode::Float {
            return Err(CoreError::FloatModeRequired("scaled".into()));
        }
        let s = Scalar::Float(Complex64::new(t, 0.0));
        let maps = self
            .maps
            .iter()
            .map(|(f, b)| Ok((f.scale(&s)?, b.scale(&s)?)))
            .collect::<Result<Vec<_>>>()?;
        Representation::new(self.dq.clone(), self.dims.clone(), maps)
    }

    pub fn to_float(&self) -> Representation {
        let maps = self.maps.iter().map(|(f, b)| (f.to_float(), b.to_float())).collect();
        Representation {
            dq: self.dq.clone(),
            dims: self.dims.clone(),
            maps,
            mode: Mode::Float,
        }
    }

    /// The group action `(g . x)_h = g_{head} x_h g_{tail}^{-1}` for an
    /// invertible tuple `g`, one matrix per vertex.
    pub fn act(&self, g: &[Matrix]) -> Result<Representation> {
        if g.len() != self.dq.vertex_count() {
            return Err(CoreError::ContractViolation("g length != vertex count".into()));
        }
        let mut inverses = Vec::with_capacity(g.len());
        for (i, gi) in g.iter().enumerate() {
            if gi.rows() != self.dim_at(i) || gi.cols() != self.dim_at(i) {
                return Err(CoreError::ShapeMismatch("group element shape".into()));
            }
            let inv = gi
                .inverse()?
                .ok_or_else(|| CoreError::ContractViolation("group element not invertible".into()))?;
            inverses.push(inv);
        }
        let mut maps = Vec::with_capacity(self.maps.len());
        for k in 0..self.maps.len() {
            let h = ArrowRef::forward(k);
            let (head, tail) = (self.dq.head(h), self.dq.tail(h));
            let fwd = g[head].mul(self.map(h))?.mul(&inverses[tail])?;
            let bwd = g[tail].mul(self.map(h.reverse()))?.mul(&inverses[head])?;
            maps.push((fwd, bwd));
        }
        Representation::new(self.dq.clone(), self.dims.clone(), maps)
    }
}

#[derive(Debug, Clone)]
pub struct VertexResidual {
    pub vertex: String,
    pub exact_zero: bool,
    pub max_abs: f64,
}

#[derive(Debug, Clone)]
pub struct RelationReport {
    pub residuals: Vec<VertexResidual>,
}

impl RelationReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.exact_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().map(|r| r.max_abs).fold(0.0, f64::max)
    }
}

/// The sigma/tau presentation of the relation at a loop-free vertex:
/// `sigma: V_i -> Vhat_i`, `tau: Vhat_i -> V_i`, and the relation at `i`
/// is equivalent to `tau sigma = (q_i - 1) 1`.
#[derive(Debug, Clone)]
pub struct SigmaTau {
    pub sigma: Matrix,
    pub tau: Matrix,
    /// Incoming doubled arrows in order, with the row offset of each block
    /// of `Vhat_i`.
    pub blocks: Vec<(ArrowRef, usize)>,
    pub hat_dim: usize,
}

impl SigmaTau {
    pub fn block_offset(&self, h: ArrowRef) -> Option<usize> {
        self.blocks.iter().find(|(b, _)| *b == h).map(|&(_, off)| off)
    }
}

/// Builds sigma and tau at vertex `i` for parameter `q_i`. Requires the
/// originals-first order and no loop at `i`.
pub fn sigma_tau(rep: &Representation, i: usize, q_i: &GaussianRational) -> Result<SigmaTau> {
    let dq = &rep.dq;
    if dq.has_loop_at(i) {
        return Err(CoreError::LoopAtVertex { vertex: dq.base.vertices[i].clone() });
    }
    if !dq.is_omega_first_at(i) {
        return Err(CoreError::ContractViolation(
            "sigma/tau require the originals-first order among the arrows at the vertex".into(),
        ));
    }
    if rep.mode() != Mode::Exact {
        return Err(CoreError::ExactModeRequired("sigma_tau".into()));
    }
    let incoming = dq.incoming(i);
    let vi = rep.dim_at(i);

    let mut blocks = Vec::new();
    let mut offset = 0usize;
    for &h in &incoming {
        blocks.push((h, offset));
        offset += rep.dim_at(dq.tail(h));
    }
    let hat_dim = offset;

    let mut sigma = Matrix::zeros(Mode::Exact, hat_dim, vi);
    let mut tau = Matrix::zeros(Mode::Exact, vi, hat_dim);

    // Running partial products over the two orientation classes.
    let mut plus_prefix = Matrix::identity(Mode::Exact, vi);
    let mut minus_prefix = Matrix::identity(Mode::Exact, vi);
    let neg_q = Scalar::Exact(q_i.neg());

    for &(h, off) in &blocks {
        let tail_dim = rep.dim_at(dq.tail(h));
        if !h.reversed {
            // sigma block: x_hbar; tau block: Phi_h^+ x_h.
            sigma.set_block(off, 0, rep.map(h.reverse()));
            let t = plus_prefix.mul(rep.map(h))?;
            tau.set_block(0, off, &t);
            plus_prefix = plus_prefix.mul(&rep.factor(h)?)?;
        } else {
            // sigma block: x_hbar Phi_h^-; tau block: -q_i x_h.
            let s = rep.map(h.reverse()).mul(&minus_prefix)?;
            sigma.set_block(off, 0, &s);
            let t = rep.map(h).scale(&neg_q)?;
            tau.set_block(0, off, &t);
            // Phi_h^- multiplies earlier reversed factors on the left.
            minus_prefix = rep.factor(h)?.mul(&minus_prefix)?;
        }
        let _ = tail_dim;
    }

    Ok(SigmaTau { sigma, tau, blocks, hat_dim })
}

/// Outcome of the first-order comparison of `Phi` against `1 + mu`.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    /// Least-squares slope of `log err` against `log t`, when defined.
    pub slope: Option<f64>,
    /// All sampled errors vanished identically.
    pub exact_match: bool,
    /// `(t, err)` pairs actually used.
    pub points: Vec<(f64, f64)>,
    /// Grid values skipped because the scaled point left the domain.
    pub skipped: Vec<f64>,
}

/// Measures `err(t) = max_i || Phi_i(t x) - 1 - t^2 mu_i(x) ||` on a grid
/// and fits the log-log slope; the remainder is quartic, so slopes near 4
/// are expected. Float mode.
pub fn quadratic_approx_probe(rep: &Representation, t_grid: &[f64]) -> Result<ProbeResult> {
    if rep.mode() != Mode::Float {
        return Err(CoreError::FloatModeRequired("quadratic_approx_probe".into()));
    }
    let mu = rep.mu()?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &t in t_grid {
        let scaled = rep.scaled(t)?;
        let phi = if rep.dq.has_loops() { scaled.psi() } else { scaled.phi() };
        let phi = match phi {
            Ok(p) => p,
            Err(_) => {
                skipped.push(t);
                continue;
            }
        };
        let mut err: f64 = 0.0;
        for (i, phi_i) in phi.iter().enumerate() {
            let id = Matrix::identity(Mode::Float, rep.dim_at(i));
            let t2mu = mu[i].scale(&Scalar::Float(Complex64::new(t * t, 0.0)))?;
            let diff = phi_i.sub(&id)?.sub(&t2mu)?;
            err = err.max(diff.max_abs());
        }
        points.push((t, err));
    }
    let positive: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, e)| e > 0.0).collect();
    if positive.is_empty() {
        return Ok(ProbeResult { slope: None, exact_match: true, points, skipped });
    }
    if positive.len() == 1 {
        return Ok(ProbeResult { slope: None, exact_match: false, points, skipped });
    }
    let xs: Vec<f64> = positive.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = positive.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(ProbeResult {
        slope: Some(sxy / sxx),
        exact_match: false,
        points,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{double, Quiver};

    pub(crate) fn a2_dq() -> DoubledQuiver {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        double(q, None).unwrap()
    }

    fn gq(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    fn scalar_rep(x_h: i64, x_hb: i64) -> Representation {
        let dq = a2_dq();
        let maps = vec![(
            Matrix::from_int_rows(&[&[x_h]]),
            Matrix::from_int_rows(&[&[x_hb]]),
        )];
        Representation::new(dq, vec![1, 1], maps).unwrap()
    }

    #[test]
    fn invertibility_domain_examples() {
        let dq = a2_dq();
        let zero = Representation::zero(dq, vec![2, 3], Mode::Exact).unwrap();
        assert!(zero.in_invertibility_domain().unwrap());

        let bad = scalar_rep(1, -1); // 1 + (1)(-1) = 0
        assert!(!bad.in_invertibility_domain().unwrap());

        let jordan = {
            let q = Quiver::new(vec!["v".into()], vec![("l".into(), "v".into(), "v".into())]).unwrap();
            double(q, None).unwrap()
        };
        let loop_zero = Representation::zero(jordan, vec![1], Mode::Exact).unwrap();
        assert!(!loop_zero.in_invertibility_domain().unwrap());
    }

    #[test]
    fn phi_worked_example() {
        // A2, dims (1,1), x_h = x_hbar = 1: Phi = (1/2, 2).
        let rep = scalar_rep(1, 1);
        let phi = rep.phi().unwrap();
        assert_eq!(phi[0].entry_exact(0, 0), &gq(1, 2));
        assert_eq!(phi[1].entry_exact(0, 0), &gq(2, 1));
    }

    #[test]
    fn phi_of_zero_is_identity() {
        let dq = a2_dq();
        let zero = Representation::zero(dq, vec![2, 2], Mode::Exact).unwrap();
        for phi_i in zero.phi().unwrap() {
            assert!(phi_i.is_identity());
        }
    }

    #[test]
    fn phi_split_recombines() {
        let dq = a2_dq();
        let maps = vec![(
            Matrix::from_int_rows(&[&[1, 2], &[0, 1]]),
            Matrix::from_int_rows(&[&[1, 0], &[3, 1]]),
        )];
        let rep = Representation::new(dq, vec![2, 2], maps).unwrap();
        let (plus, minus) = rep.phi_split().unwrap();
        let phi = rep.phi().unwrap();
        for i in 0..2 {
            let m_inv = minus[i].inverse().unwrap().unwrap();
            assert_eq!(plus[i].mul(&m_inv).unwrap(), phi[i]);
        }
        // At vertex 2 there is no reversed incoming arrow.
        assert!(minus[1].is_identity());
    }

    #[test]
    fn mu_signs_and_trace() {
        // A2 scalars: mu = (-ba, ab).
        let rep = scalar_rep(2, 3);
        let mu = rep.mu().unwrap();
        assert_eq!(mu[0].entry_exact(0, 0), &gq(-6, 1));
        assert_eq!(mu[1].entry_exact(0, 0), &gq(6, 1));
        let zero = Representation::zero(a2_dq(), vec![2, 2], Mode::Exact).unwrap();
        assert!(zero.mu().unwrap().iter().all(|m| m.is_zero()));
    }

    #[test]
    fn sigma_tau_worked_example() {
        // A2, dims (1,1), x = 1, at vertex 2 with q_2 = 2:
        // sigma = 1, tau = 1, tau sigma = 1 = q_2 - 1.
        let rep = scalar_rep(1, 1);
        let st = sigma_tau(&rep, 1, &gq(2, 1)).unwrap();
        assert!(st.sigma.is_identity());
        assert!(st.tau.is_identity());
        let ts = st.tau.mul(&st.sigma).unwrap();
        assert_eq!(ts.entry_exact(0, 0), &gq(1, 1));
    }

    #[test]
    fn sigma_tau_zero_rep() {
        // Zero representation with q_i = 1: tau sigma = 0 = q_i - 1.
        let zero = Representation::zero(a2_dq(), vec![2, 3], Mode::Exact).unwrap();
        let st = sigma_tau(&zero, 1, &gq(1, 1)).unwrap();
        assert!(st.tau.mul(&st.sigma).unwrap().is_zero());
    }

    #[test]
    fn sigma_tau_relation_contract() {
        // tau sigma = (q_i - 1) 1 exactly at relation solutions, at both
        // vertices of the worked A2 example.
        let rep = scalar_rep(1, 1);
        let q = vec![gq(1, 2), gq(2, 1)];
        assert!(rep.check_relation(&q).unwrap().all_zero());
        for i in 0..2 {
            let st = sigma_tau(&rep, i, &q[i]).unwrap();
            let ts = st.tau.mul(&st.sigma).unwrap();
            let target = Matrix::scalar_matrix(
                Mode::Exact,
                rep.dim_at(i),
                Scalar::Exact(q[i].sub(&gq(1, 1))),
            )
            .unwrap();
            assert_eq!(ts, target);
        }
    }

    #[test]
    fn check_relation_examples() {
        let rep = scalar_rep(1, 1);
        assert!(rep.check_relation(&[gq(1, 2), gq(2, 1)]).unwrap().all_zero());
        let zero = Representation::zero(a2_dq(), vec![1, 1], Mode::Exact).unwrap();
        assert!(zero.check_relation(&[gq(1, 1), gq(1, 1)]).unwrap().all_zero());
        let off = zero.check_relation(&[gq(2, 1), gq(1, 2)]).unwrap();
        assert!(!off.residuals[0].exact_zero);
        assert!(!off.residuals[1].exact_zero);
    }

    #[test]
    fn psi_examples() {
        let jordan = {
            let q = Quiver::new(vec!["v".into()], vec![("l".into(), "v".into(), "v".into())]).unwrap();
            double(q, None).unwrap()
        };
        // Scalars commute: the commutator is 1.
        let maps = vec![(Matrix::from_int_rows(&[&[5]]), Matrix::from_int_rows(&[&[7]]))];
        let rep = Representation::new(jordan.clone(), vec![1], maps).unwrap();
        assert!(rep.psi().unwrap()[0].is_identity());

        // 2-dimensional generic loop: det of the commutator is 1.
        let maps = vec![(
            Matrix::from_int_rows(&[&[1, 2], &[3, 4]]),
            Matrix::from_int_rows(&[&[0, 1], &[1, 1]]),
        )];
        let rep = Representation::new(jordan, vec![2], maps).unwrap();
        let psi = rep.psi().unwrap();
        assert_eq!(psi[0].det().unwrap(), gq(1, 1));

        // No loops: psi equals phi.
        let rep = scalar_rep(1, 1);
        assert_eq!(rep.psi().unwrap(), rep.phi().unwrap());
    }

    #[test]
    fn phi_is_equivariant_and_det_product_is_one() {
        let dq = a2_dq();
        let maps = vec![(
            Matrix::from_int_rows(&[&[1, 2], &[3, 5]]),
            Matrix::from_int_rows(&[&[2, 0], &[1, 1]]),
        )];
        let rep = Representation::new(dq, vec![2, 2], maps).unwrap();
        assert!(rep.in_invertibility_domain().unwrap());
        let phi = rep.phi().unwrap();
        let det_prod = phi[0].det().unwrap().mul(&phi[1].det().unwrap());
        assert!(det_prod.is_one());

        let g = vec![
            Matrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            Matrix::from_int_rows(&[&[2, 1], &[1, 1]]),
        ];
        let moved = rep.act(&g).unwrap();
        let phi_moved = moved.phi().unwrap();
        for i in 0..2 {
            let gi = &g[i];
            let conj = gi.mul(&phi[i]).unwrap().mul(&gi.inverse().unwrap().unwrap()).unwrap();
            assert_eq!(phi_moved[i], conj);
        }
        // mu is equivariant too.
        let mu = rep.mu().unwrap();
        let mu_moved = moved.mu().unwrap();
        for i in 0..2 {
            let gi = &g[i];
            let conj = gi.mul(&mu[i]).unwrap().mul(&gi.inverse().unwrap().unwrap()).unwrap();
            assert_eq!(mu_moved[i], conj);
        }
    }

    #[test]
    fn probe_zero_rep_matches_exactly() {
        let zero = Representation::zero(a2_dq(), vec![1, 1], Mode::Float).unwrap();
        let r = quadratic_approx_probe(&zero, &[0.1, 0.01]).unwrap();
        assert!(r.exact_match);
    }

    #[test]
    fn probe_slope_is_quartic() {
        let dq = a2_dq();
        let maps = vec![(
            Matrix::from_float_rows(vec![vec![Complex64::new(0.7, 0.2)]]),
            Matrix::from_float_rows(vec![vec![Complex64::new(-0.4, 0.5)]]),
        )];
        let rep = Representation::new(dq, vec![1, 1], maps).unwrap();
        let grid: Vec<f64> = (0..7).map(|k| 0.1 * (0.1f64).powf(k as f64 / 3.0)).collect();
        let r = quadratic_approx_probe(&rep, &grid).unwrap();
        let slope = r.slope.unwrap();
        assert!((3.7..=4.3).contains(&slope), "slope {slope}");
    }

    #[test]
    fn probe_single_arrow_plus_side_has_no_higher_terms() {
        // At the head of a single arrow, Phi_2 = 1 + x_h x_hbar exactly, so
        // the vertex-2 component of the error vanishes identically.
        let dq = a2_dq();
        let maps = vec![(
            Matrix::from_float_rows(vec![vec![Complex64::new(0.3, 0.1)]]),
            Matrix::from_float_rows(vec![vec![Complex64::new(0.2, -0.6)]]),
        )];
        let rep = Representation::new(dq, vec![1, 1], maps).unwrap();
        let scaled = rep.scaled(0.1).unwrap();
        let phi = scaled.phi().unwrap();
        let mu = rep.mu().unwrap();
        let t2mu = mu[1].scale(&Scalar::Float(Complex64::new(0.01, 0.0))).unwrap();
        let diff = phi[1]
            .sub(&Matrix::identity(Mode::Float, 1))
            .unwrap()
            .sub(&t2mu)
            .unwrap();
        assert!(diff.max_abs() < 1e-15);
    }
}
