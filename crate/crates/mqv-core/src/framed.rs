//! Framed representations: a base representation extended by framing maps
//! `a_i : W_i -> V_i`, `b_i : V_i -> W_i`, equivalent to a representation of
//! the quiver extended by a one-dimensional vertex at infinity with `w_i`
//! arrows into each `i`. All generic machinery runs on the extension.

use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::quiver::{double, Quiver};
use crate::rep::{sigma_tau, Representation};
use crate::root::{root_datum_from_graph, DimVec};
use crate::scalar::{GaussianRational, Mode};

pub const INFINITY_VERTEX: &str = "inf";

#[derive(Debug, Clone)]
pub struct FramedRepresentation {
    pub base: Representation,
    pub w: DimVec,
    /// `a[i]: W_i -> V_i`, shape `v_i x w_i`.
    pub a: Vec<Matrix>,
    /// `b[i]: V_i -> W_i`, shape `w_i x v_i`.
    pub b: Vec<Matrix>,
}

impl FramedRepresentation {
    pub fn new(base: Representation, w: DimVec, a: Vec<Matrix>, b: Vec<Matrix>) -> Result<Self> {
        let n = base.dq.vertex_count();
        if w.len() != n || a.len() != n || b.len() != n {
            return Err(CoreError::ContractViolation("framing data length != vertex count".into()));
        }
        for i in 0..n {
            let (vi, wi) = (base.dims[i] as usize, w[i] as usize);
            if a[i].rows() != vi || a[i].cols() != wi {
                return Err(CoreError::ShapeMismatch(format!("a[{i}] must be {vi}x{wi}")));
            }
            if b[i].rows() != wi || b[i].cols() != vi {
                return Err(CoreError::ShapeMismatch(format!("b[{i}] must be {wi}x{vi}")));
            }
        }
        Ok(Self { base, w, a, b })
    }
}

/// The extension of a framed representation to the quiver with an infinity
/// vertex, together with the extended parameters
/// `q_inf = prod q_i^{-dim V_i}` and `theta_inf = -theta . dim V`.
pub struct FramedExtension {
    pub rep: Representation,
    pub q: Vec<GaussianRational>,
    pub theta: Vec<BigRational>,
    /// Index of the infinity vertex in the extended quiver.
    pub infinity: usize,
}

/// Builds the extended representation. Framing arrows are ordered before the
/// base arrows, so the relation at `i` reads
/// `(1 + a_{i,1} b_{i,1}) ... (1 + a_{i,w_i} b_{i,w_i}) Phi_i(B) = q_i`.
pub fn frame(
    fr: &FramedRepresentation,
    q: &[GaussianRational],
    theta: &[BigRational],
) -> Result<FramedExtension> {
    let base_dq = &fr.base.dq;
    let n = base_dq.vertex_count();
    if q.len() != n || theta.len() != n {
        return Err(CoreError::ContractViolation("parameter length != vertex count".into()));
    }
    if base_dq.base.vertices.iter().any(|v| v == INFINITY_VERTEX) {
        return Err(CoreError::ContractViolation(format!(
            "vertex name `{INFINITY_VERTEX}` is reserved for the framing vertex"
        )));
    }
    if !base_dq.is_omega_first() {
        return Err(CoreError::ContractViolation(
            "framing requires the originals-first total order".into(),
        ));
    }

    let mut vertices = base_dq.base.vertices.clone();
    vertices.push(INFINITY_VERTEX.to_string());
    let infinity = vertices.len() - 1;

    // Framing arrows come first so their factors multiply ahead of the base
    // factors at each vertex.
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    for i in 0..n {
        for k in 0..fr.w[i] as usize {
            arrows.push((
                format!("f.{}.{}", base_dq.base.vertices[i], k + 1),
                INFINITY_VERTEX.to_string(),
                base_dq.base.vertices[i].clone(),
            ));
        }
    }
    for arr in &base_dq.base.arrows {
        arrows.push((
            arr.id.clone(),
            base_dq.base.vertices[arr.out_v].clone(),
            base_dq.base.vertices[arr.in_v].clone(),
        ));
    }
    let quiver = Quiver::new(vertices, arrows)?;
    let dq = double(quiver, None)?;

    let mut dims = fr.base.dims.clone();
    dims.push(1);

    let mode = fr.base.mode();
    let mut maps: Vec<(Matrix, Matrix)> = Vec::new();
    for i in 0..n {
        for k in 0..fr.w[i] as usize {
            let col = fr.a[i].block(0, k, fr.base.dims[i] as usize, 1);
            let row = fr.b[i].block(k, 0, 1, fr.base.dims[i] as usize);
            maps.push((col, row));
        }
    }
    for k in 0..base_dq.base.arrows.len() {
        let h = crate::quiver::ArrowRef::forward(k);
        maps.push((fr.base.map(h).clone(), fr.base.map(h.reverse()).clone()));
    }
    let rep = Representation::new(dq, dims, maps)?;
    let _ = mode;

    let mut q_ext = q.to_vec();
    let mut q_inf = GaussianRational::one();
    for i in 0..n {
        q_inf = q_inf.mul(&q[i].pow(-fr.base.dims[i])?);
    }
    q_ext.push(q_inf);

    let mut theta_ext = theta.to_vec();
    let mut t_inf = BigRational::zero();
    for i in 0..n {
        t_inf -= &theta[i] * BigRational::from_integer(fr.base.dims[i].into());
    }
    theta_ext.push(t_inf);

    Ok(FramedExtension { rep, q: q_ext, theta: theta_ext, infinity })
}

/// The complex `V_i -> (+)_h V_out(h) (+) W_i -> V_i` at a framed point with
/// `q_i = 1`: verifies it is a complex, measures the corank of tau and the
/// rank of the degree-0 cohomology, and checks the rank formula
/// `rank Q_i = <h_i, w - v> + corank tau_i` against the root datum.
#[derive(Debug, Clone)]
pub struct ArmComplexReport {
    pub sigma: Matrix,
    pub tau: Matrix,
    pub corank_tau: i64,
    pub rank_q: i64,
    /// `<h_i, w - v> = w_i - sum_j c_ij v_j`, computed from the Cartan matrix.
    pub coroot_pairing: i64,
}

pub fn arm_complex(fr: &FramedRepresentation, i: usize) -> Result<ArmComplexReport> {
    if fr.base.mode() != Mode::Exact {
        return Err(CoreError::ExactModeRequired("arm_complex".into()));
    }
    let n = fr.base.dq.vertex_count();
    if i >= n {
        return Err(CoreError::ContractViolation("vertex out of range".into()));
    }
    let ones = vec![GaussianRational::one(); n];
    let zeros = vec![BigRational::zero(); n];
    let ext = frame(fr, &ones, &zeros)?;

    let st = sigma_tau(&ext.rep, i, &GaussianRational::one())?;
    let ts = st.tau.mul(&st.sigma)?;
    if !ts.is_zero() {
        return Err(CoreError::ContractViolation(
            "tau sigma != 0: the framed point does not solve the relation at q = 1".into(),
        ));
    }
    let vi = fr.base.dims[i];
    let rank_sigma = st.sigma.rank()? as i64;
    if rank_sigma != vi {
        return Err(CoreError::StabilityViolation {
            vertex: fr.base.dq.base.vertices[i].clone(),
        });
    }
    let rank_tau = st.tau.rank()? as i64;
    let corank_tau = vi - rank_tau;
    let ker_tau = st.hat_dim as i64 - rank_tau;
    let rank_q = ker_tau - rank_sigma;

    let rd = root_datum_from_graph(&fr.base.dq)?;
    let coroot_pairing = rd.coroot_pairing_weight_minus_root(i, &fr.w, &fr.base.dims);

    if rank_q != coroot_pairing + corank_tau {
        return Err(CoreError::ContractViolation(format!(
            "rank formula violated: rank Q = {rank_q}, pairing + corank = {}",
            coroot_pairing + corank_tau
        )));
    }

    Ok(ArmComplexReport {
        sigma: st.sigma,
        tau: st.tau,
        corank_tau,
        rank_q,
        coroot_pairing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{double, Quiver};
    use crate::scalar::Scalar;

    fn gq(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn single_vertex_framed(v: i64, w: i64, a: Matrix, b: Matrix) -> FramedRepresentation {
        let q = Quiver::new(vec!["x".into()], vec![]).unwrap();
        let dq = double(q, None).unwrap();
        let base = Representation::zero(dq, vec![v], Mode::Exact).unwrap();
        FramedRepresentation::new(base, vec![w], vec![a], vec![b]).unwrap()
    }

    #[test]
    fn zero_framing_extends_with_trivial_relation_at_infinity() {
        let fr = single_vertex_framed(
            1,
            0,
            Matrix::zeros(Mode::Exact, 1, 0),
            Matrix::zeros(Mode::Exact, 0, 1),
        );
        let ext = frame(&fr, &[gq(1, 1)], &[rat(1, 1)]).unwrap();
        let phi = ext.rep.phi().unwrap();
        assert!(phi[ext.infinity].is_identity());
        assert!(ext.q[ext.infinity].is_one());
    }

    #[test]
    fn framing_contributes_its_factor() {
        // dims v = (1), w = (1), a = b = 1: the relation gains (1 + ab) = 2.
        let fr = single_vertex_framed(
            1,
            1,
            Matrix::from_int_rows(&[&[1]]),
            Matrix::from_int_rows(&[&[1]]),
        );
        let ext = frame(&fr, &[gq(2, 1)], &[rat(1, 1)]).unwrap();
        let phi = ext.rep.phi().unwrap();
        assert_eq!(phi[0].entry_exact(0, 0), &gq(2, 1));
        // q_inf = q^{-v} = 1/2; theta_inf = -theta.v = -1.
        assert_eq!(ext.q[ext.infinity], gq(1, 2));
        assert_eq!(ext.theta[ext.infinity], rat(-1, 1));
        // And Phi at infinity is (1 + b a)^{-1} = 1/2.
        assert_eq!(phi[ext.infinity].entry_exact(0, 0), &gq(1, 2));
    }

    #[test]
    fn zero_framing_maps_reduce_to_unframed_phi() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let base = Representation::new(
            dq,
            vec![1, 1],
            vec![(Matrix::from_int_rows(&[&[1]]), Matrix::from_int_rows(&[&[1]]))],
        )
        .unwrap();
        let fr = FramedRepresentation::new(
            base.clone(),
            vec![1, 1],
            vec![Matrix::zeros(Mode::Exact, 1, 1), Matrix::zeros(Mode::Exact, 1, 1)],
            vec![Matrix::zeros(Mode::Exact, 1, 1), Matrix::zeros(Mode::Exact, 1, 1)],
        )
        .unwrap();
        let ext = frame(&fr, &[gq(1, 2), gq(2, 1)], &[rat(0, 1), rat(0, 1)]).unwrap();
        let phi_ext = ext.rep.phi().unwrap();
        let phi_base = base.phi().unwrap();
        assert_eq!(phi_ext[0], phi_base[0]);
        assert_eq!(phi_ext[1], phi_base[1]);
    }

    #[test]
    fn arm_complex_with_zero_dims() {
        // v = 0, any w: sigma and tau are empty; corank 0; rank Q = w_i.
        let fr = single_vertex_framed(
            0,
            2,
            Matrix::zeros(Mode::Exact, 0, 2),
            Matrix::zeros(Mode::Exact, 2, 0),
        );
        let rep = arm_complex(&fr, 0).unwrap();
        assert_eq!(rep.corank_tau, 0);
        assert_eq!(rep.rank_q, 2);
        assert_eq!(rep.coroot_pairing, 2);
    }

    #[test]
    fn arm_complex_rank_formula_on_solved_instance() {
        // v = (1), w = (2), no base arrows, with (1+a1 b1)(1+a2 b2) = 1.
        // Take a1 = 1, b1 = 1 (factor 2) and a2 = 1, b2 = -1/2 (factor 1/2).
        let mut a = Matrix::zeros(Mode::Exact, 1, 2);
        a.set(0, 0, Scalar::Exact(gq(1, 1))).unwrap();
        a.set(0, 1, Scalar::Exact(gq(1, 1))).unwrap();
        let mut b = Matrix::zeros(Mode::Exact, 2, 1);
        b.set(0, 0, Scalar::Exact(gq(1, 1))).unwrap();
        b.set(1, 0, Scalar::Exact(gq(-1, 2))).unwrap();
        let fr = single_vertex_framed(1, 2, a, b);
        let report = arm_complex(&fr, 0).unwrap();
        // <h_i, w - v> = 2 - 2*1 = 0, so rank Q = corank tau.
        assert_eq!(report.coroot_pairing, 0);
        assert_eq!(report.rank_q, report.corank_tau);
    }

    #[test]
    fn arm_complex_detects_noninjective_sigma() {
        // All framing maps zero and v = 1: sigma = 0 is not injective.
        let fr = single_vertex_framed(
            1,
            1,
            Matrix::zeros(Mode::Exact, 1, 1),
            Matrix::zeros(Mode::Exact, 1, 1),
        );
        assert!(matches!(
            arm_complex(&fr, 0),
            Err(CoreError::StabilityViolation { .. })
        ));
    }
}
