//! The middle convolution functor at a loop-free vertex: replace `V_i` by
//! `Ker tau_i`, rewire the arrows at `i` through explicit block maps, and
//! reflect the parameters by `u_i`, `r_i`, `s_i`. Every defining identity is
//! re-verified exactly on each run.
//!
//! The construction assumes the arrows at `i` point into `i`. When they do
//! not, the representation is conjugated arrow by arrow through the
//! invertible substitution `(x_h, x_hbar) -> (x_hbar, -(1+x_h x_hbar)^{-1} x_h)`,
//! which reverses an arrow while preserving every factor of the relation
//! pointwise, and the flip is undone afterwards.

use num::rational::BigRational;
use num::traits::Zero;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::intertwiner::{TupleConstraint, TupleSystem};
use crate::matrix::Matrix;
use crate::quiver::ArrowRef;
use crate::rep::{sigma_tau, Representation, SigmaTau};
use crate::root::{reflect_dim, reflect_q, reflect_theta, DimVec};
use crate::scalar::{GaussianRational, Mode, Scalar};
use crate::stability::{check_general_stability, GeneralStabilityOptions, StabilityStatus};

/// Reverses base arrow `k` in place, preserving the value of the relation
/// at every vertex: the new pair is `(x_hbar, -(1+x_h x_hbar)^{-1} x_h)` and
/// each order slot keeps its head.
pub fn flip_base_arrow(rep: &Representation, k: usize) -> Result<Representation> {
    let h = ArrowRef::forward(k);
    if rep.dq.is_loop(h) {
        return Err(CoreError::ContractViolation("cannot flip a loop".into()));
    }
    let x_e = rep.map(h).clone();
    let x_eb = rep.map(h.reverse()).clone();
    let factor = rep.factor(h)?; // 1 + x_e x_ebar at the head
    let inv = factor.inverse()?.ok_or_else(|| CoreError::SingularFactor {
        arrow: rep.dq.arrow_name(h),
    })?;
    let new_bwd = inv.mul(&x_e)?.neg();

    let mut dq = rep.dq.clone();
    let arrow = &mut dq.base.arrows[k];
    std::mem::swap(&mut arrow.out_v, &mut arrow.in_v);
    for slot in dq.order.iter_mut() {
        if slot.arrow == k {
            slot.reversed = !slot.reversed;
        }
    }

    let mut maps: Vec<(Matrix, Matrix)> = Vec::with_capacity(rep.dq.base.arrows.len());
    for j in 0..rep.dq.base.arrows.len() {
        let hj = ArrowRef::forward(j);
        if j == k {
            maps.push((x_eb.clone(), new_bwd.clone()));
        } else {
            maps.push((rep.map(hj).clone(), rep.map(hj.reverse()).clone()));
        }
    }
    Representation::new(dq, rep.dims.clone(), maps)
}

/// Flips every arrow pointing out of `i` so that the arrows at `i` all point
/// into it. Returns the rewritten representation and the flipped indices.
pub fn normalize_orientation_at(rep: &Representation, i: usize) -> Result<(Representation, Vec<usize>)> {
    let mut flipped = Vec::new();
    let mut current = rep.clone();
    for k in 0..rep.dq.base.arrows.len() {
        let a = &rep.dq.base.arrows[k];
        if a.out_v == i && a.in_v != i {
            current = flip_base_arrow(&current, k)?;
            flipped.push(k);
        }
    }
    Ok((current, flipped))
}

/// Exact checks performed on every convolution; in exact mode all of them
/// must come back true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionReport {
    /// `tau phi_h = 0` for every arrow at the vertex.
    pub tau_phi_zero: bool,
    /// `prod (1 + phi_h pi_h) = 1 - q_i^{-1}(q_i - 1 - sigma tau)`.
    pub product_formula: bool,
    /// `Phi(x') = u_i(q)` at every vertex.
    pub phi_matches_target: bool,
    /// `1 + x'_hbar x'_h = q_i^{-1} (1 + x_hbar x_h)` per arrow at the vertex.
    pub per_arrow_scaling: bool,
}

impl ConvolutionReport {
    pub fn all_hold(&self) -> bool {
        self.tau_phi_zero && self.product_formula && self.phi_matches_target && self.per_arrow_scaling
    }
}

#[derive(Debug, Clone)]
pub struct ConvolutionResult {
    pub rep: Representation,
    pub vertex: usize,
    pub q: Vec<GaussianRational>,
    pub theta: Vec<BigRational>,
    pub dims: DimVec,
    pub report: ConvolutionReport,
}

fn one() -> GaussianRational {
    GaussianRational::one()
}

/// The block map `phi_h : V_tail(h) -> Vhat_i` with blocks
/// `c(h',h) x_hbar' x_h + [h'=h] (1-q_i)/q_i`, where `c = 1` for `h' < h`
/// and `q_i^{-1}` otherwise.
fn phi_block(
    rep: &Representation,
    st: &SigmaTau,
    h_idx: usize,
    q_i: &GaussianRational,
) -> Result<Matrix> {
    let (h, _) = st.blocks[h_idx];
    let tail_dim = rep.dim_at(rep.dq.tail(h));
    let q_inv = q_i.inv()?;
    let shift = one().sub(q_i).div(q_i)?;
    let mut out = Matrix::zeros(Mode::Exact, st.hat_dim, tail_dim);
    for (j, &(hp, off)) in st.blocks.iter().enumerate() {
        let coef = if j < h_idx { one() } else { q_inv.clone() };
        let mut block = rep
            .map(hp.reverse())
            .mul(rep.map(h))?
            .scale(&Scalar::Exact(coef))?;
        if j == h_idx {
            let idm = Matrix::scalar_matrix(Mode::Exact, tail_dim, Scalar::Exact(shift.clone()))?;
            block = block.add(&idm)?;
        }
        out.set_block(off, 0, &block);
    }
    Ok(out)
}

/// Applies the middle convolution at vertex `i` to an exact solution of
/// `Phi(x) = q`. Requires `q_i != 1`, or `q_i = 1` with `theta_i < 0` and
/// `tau_i` surjective. The output lives on the original quiver with its
/// original orientation and satisfies `Phi(x') = u_i(q)` exactly.
pub fn middle_convolve(
    rep: &Representation,
    i: usize,
    q: &[GaussianRational],
    theta: &[BigRational],
) -> Result<ConvolutionResult> {
    if rep.mode() != Mode::Exact {
        return Err(CoreError::ExactModeRequired("middle_convolve".into()));
    }
    let dq = &rep.dq;
    let n = dq.vertex_count();
    if i >= n {
        return Err(CoreError::ContractViolation("vertex out of range".into()));
    }
    if dq.has_loop_at(i) {
        return Err(CoreError::LoopAtVertex { vertex: dq.base.vertices[i].clone() });
    }
    if q.len() != n || theta.len() != n {
        return Err(CoreError::ContractViolation("parameter length != vertex count".into()));
    }
    if !rep.check_relation(q)?.all_zero() {
        return Err(CoreError::ContractViolation(
            "middle convolution needs an exact solution of the relation".into(),
        ));
    }
    let q_is_one = q[i].is_one();
    if q_is_one && theta[i] >= BigRational::zero() {
        return Err(CoreError::ContractViolation(
            "q_i = 1 requires theta_i < 0 (and a surjective tau)".into(),
        ));
    }

    let new_dims = reflect_dim(dq, i, &rep.dims)?;
    if let Some(bad) = new_dims.iter().position(|&d| d < 0) {
        return Err(CoreError::EmptyDimension { vertex: dq.base.vertices[bad].clone() });
    }

    let (norm, flipped) = normalize_orientation_at(rep, i)?;
    debug_assert!(norm.check_relation(q)?.all_zero());

    let st = sigma_tau(&norm, i, &q[i])?;
    let v_i = rep.dim_at(i);
    let rank_tau = st.tau.rank()?;
    if rank_tau != v_i {
        if q_is_one {
            return Err(CoreError::TauNotSurjective { vertex: dq.base.vertices[i].clone() });
        }
        // tau sigma = (q_i - 1) 1 is invertible, so this cannot happen for
        // an exact solution.
        return Err(CoreError::ContractViolation("tau unexpectedly not surjective".into()));
    }

    let kernel = st.tau.kernel_basis()?;
    debug_assert_eq!(kernel.cols() as i64, new_dims[i]);

    // phi_h per arrow, Eq. checks, and the new maps.
    let mut tau_phi_zero = true;
    let mut new_fwd: Vec<Matrix> = Vec::with_capacity(st.blocks.len());
    let mut new_bwd: Vec<Matrix> = Vec::with_capacity(st.blocks.len());
    let mut phis: Vec<Matrix> = Vec::with_capacity(st.blocks.len());
    for h_idx in 0..st.blocks.len() {
        let phi_h = phi_block(&norm, &st, h_idx, &q[i])?;
        if !st.tau.mul(&phi_h)?.is_zero() {
            tau_phi_zero = false;
        }
        let co = kernel.solve(&phi_h)?.ok_or_else(|| {
            CoreError::ContractViolation("phi_h does not land in Ker tau".into())
        })?;
        let (h, off) = st.blocks[h_idx];
        let tail_dim = norm.dim_at(norm.dq.tail(h));
        new_fwd.push(co);
        new_bwd.push(kernel.block(off, 0, tail_dim, kernel.cols()));
        phis.push(phi_h);
    }

    // Product formula: prod (1 + phi_h pi_h) = 1 - q_i^{-1}(q_i - 1 - sigma tau).
    let mut lhs = Matrix::identity(Mode::Exact, st.hat_dim);
    for (h_idx, phi_h) in phis.iter().enumerate() {
        let (_, off) = st.blocks[h_idx];
        let mut embed = Matrix::zeros(Mode::Exact, st.hat_dim, st.hat_dim);
        embed.set_block(0, off, phi_h);
        let factor = Matrix::identity(Mode::Exact, st.hat_dim).add(&embed)?;
        lhs = lhs.mul(&factor)?;
    }
    let sigma_tau_mat = st.sigma.mul(&st.tau)?;
    let q_inv = q[i].inv()?;
    let scalar_part = q[i].sub(&one()); // q_i - 1
    let rhs = Matrix::identity(Mode::Exact, st.hat_dim)
        .sub(
            &Matrix::scalar_matrix(Mode::Exact, st.hat_dim, Scalar::Exact(scalar_part))?
                .sub(&sigma_tau_mat)?
                .scale(&Scalar::Exact(q_inv.clone()))?,
        )?;
    let product_formula = lhs == rhs;

    // Assemble the convolved representation on the normalized quiver.
    let mut maps: Vec<(Matrix, Matrix)> = Vec::with_capacity(norm.dq.base.arrows.len());
    for k in 0..norm.dq.base.arrows.len() {
        let h = ArrowRef::forward(k);
        maps.push((norm.map(h).clone(), norm.map(h.reverse()).clone()));
    }
    for (h_idx, &(h, _)) in st.blocks.iter().enumerate() {
        debug_assert!(!h.reversed);
        maps[h.arrow] = (new_fwd[h_idx].clone(), new_bwd[h_idx].clone());
    }
    let conv_norm = Representation::new(norm.dq.clone(), new_dims.clone(), maps)?;

    let q_new = reflect_q(dq, i, q)?;
    let theta_new = reflect_theta(dq, i, theta)?;
    let phi_matches_target = conv_norm.check_relation(&q_new)?.all_zero();

    // Per-arrow scaling at the vertex, stated on the normalized orientation.
    let mut per_arrow_scaling = true;
    for &(h, _) in &st.blocks {
        let old = norm.factor(h.reverse())?; // 1 + x_hbar x_h at the tail
        let new = conv_norm.factor(h.reverse())?;
        let scaled = old.scale(&Scalar::Exact(q_inv.clone()))?;
        if new != scaled {
            per_arrow_scaling = false;
        }
    }

    // Undo the orientation flips.
    let mut out = conv_norm;
    for &k in flipped.iter().rev() {
        out = flip_base_arrow(&out, k)?;
    }
    debug_assert_eq!(out.dq, rep.dq);
    if !out.check_relation(&q_new)?.all_zero() {
        return Err(CoreError::ContractViolation(
            "internal: convolved point lost the relation after unflipping".into(),
        ));
    }

    Ok(ConvolutionResult {
        rep: out,
        vertex: i,
        q: q_new,
        theta: theta_new,
        dims: new_dims,
        report: ConvolutionReport {
            tau_phi_zero,
            product_formula,
            phi_matches_target,
            per_arrow_scaling,
        },
    })
}

/// Certificate that applying the convolution twice at the same vertex
/// returns an isomorphic representation.
#[derive(Debug, Clone)]
pub struct InvolutionCertificate {
    pub first: ConvolutionResult,
    pub second: ConvolutionResult,
    /// Invertible tuple `g` with `g x_h = x''_h g` for every doubled arrow.
    pub intertwiner: Vec<Matrix>,
}

/// Convolves twice at `i` and solves for an invertible intertwiner between
/// the input and the double convolution.
pub fn verify_involution<R: Rng>(
    rep: &Representation,
    i: usize,
    q: &[GaussianRational],
    theta: &[BigRational],
    rng: &mut R,
    budget: usize,
) -> Result<InvolutionCertificate> {
    let first = middle_convolve(rep, i, q, theta)?;
    let second = middle_convolve(&first.rep, i, &first.q, &first.theta)?;
    if second.dims != rep.dims {
        return Err(CoreError::ContractViolation(
            "double convolution changed the dimension vector".into(),
        ));
    }
    if second.q != *q {
        return Err(CoreError::ContractViolation("double convolution changed q".into()));
    }
    let shapes: Vec<(usize, usize)> =
        rep.dims.iter().map(|&d| (d as usize, d as usize)).collect();
    let mut sys = TupleSystem::new(shapes);
    for &h in &rep.dq.order {
        let (head, tail) = (rep.dq.head(h), rep.dq.tail(h));
        sys.push(TupleConstraint::homogeneous(
            head,
            rep.map(h).clone(),
            second.rep.map(h).clone(),
            tail,
        ));
    }
    let g = sys.solve_invertible(rng, budget)?.ok_or_else(|| {
        CoreError::ContractViolation(
            "no invertible intertwiner found within budget (counterexample candidate)".into(),
        )
    })?;
    for &h in &rep.dq.order {
        let lhs = g[rep.dq.head(h)].mul(rep.map(h))?;
        let rhs = second.rep.map(h).mul(&g[rep.dq.tail(h)])?;
        if lhs != rhs {
            return Err(CoreError::ContractViolation("intertwiner failed re-verification".into()));
        }
    }
    Ok(InvolutionCertificate { first, second, intertwiner: g })
}

/// The pointwise conditions cut out by the convolution correspondence,
/// evaluated on a pair `(x, x')`.
#[derive(Debug, Clone)]
pub struct LusztigReport {
    /// Maps agree off the arrows at the vertex.
    pub r1_equal_off_vertex: bool,
    /// `0 -> V'_i -> Vhat_i -> V_i -> 0` is exact.
    pub r2_exact_sequence: bool,
    /// `sigma tau = q_i sigma' tau' + (q_i - 1)`.
    pub r3_sigma_tau_identity: bool,
    /// Both points lie in the invertibility domain.
    pub r4_domain: bool,
    pub r4p_domain: bool,
    /// Both points solve their relations.
    pub r5_relation: bool,
    pub r5p_relation: bool,
    /// Stability statuses (possibly Unknown).
    pub r6_stability: StabilityStatus,
    pub r6p_stability: StabilityStatus,
}

impl LusztigReport {
    /// R1 through R5' as one flag; stability is reported separately.
    pub fn algebraic_conditions_hold(&self) -> bool {
        self.r1_equal_off_vertex
            && self.r2_exact_sequence
            && self.r3_sigma_tau_identity
            && self.r4_domain
            && self.r4p_domain
            && self.r5_relation
            && self.r5p_relation
    }
}

pub fn check_lusztig_conditions<R: Rng>(
    x: &Representation,
    xp: &Representation,
    i: usize,
    q: &[GaussianRational],
    theta: &[BigRational],
    rng: &mut R,
) -> Result<LusztigReport> {
    if x.dq != xp.dq {
        return Err(CoreError::ContractViolation("the two points must share the quiver".into()));
    }
    let dq = &x.dq;
    let q_new = reflect_q(dq, i, q)?;
    let theta_new = reflect_theta(dq, i, theta)?;

    // R1 off the vertex.
    let mut r1 = true;
    for k in 0..dq.base.arrows.len() {
        let a = &dq.base.arrows[k];
        if a.out_v == i || a.in_v == i {
            continue;
        }
        let h = ArrowRef::forward(k);
        if x.map(h) != xp.map(h) || x.map(h.reverse()) != xp.map(h.reverse()) {
            r1 = false;
        }
    }

    // Normalize both points the same way for the sigma/tau conditions.
    let (xn, _) = normalize_orientation_at(x, i)?;
    let (xpn, _) = normalize_orientation_at(xp, i)?;
    let st = sigma_tau(&xn, i, &q[i])?;
    let stp = sigma_tau(&xpn, i, &q_new[i])?;

    let v_i = x.dim_at(i);
    let vp_i = xp.dim_at(i);
    let rank_sigma_p = stp.sigma.rank()?;
    let rank_tau = st.tau.rank()?;
    let composite_zero = st.tau.mul(&stp.sigma)?.is_zero();
    let r2 = rank_sigma_p == vp_i
        && rank_tau == v_i
        && composite_zero
        && st.hat_dim == vp_i + v_i;

    let lhs = st.sigma.mul(&st.tau)?;
    let rhs = stp
        .sigma
        .mul(&stp.tau)?
        .scale(&Scalar::Exact(q[i].clone()))?
        .add(&Matrix::scalar_matrix(
            Mode::Exact,
            st.hat_dim,
            Scalar::Exact(q[i].sub(&GaussianRational::one())),
        )?)?;
    let r3 = lhs == rhs;

    let r4 = x.in_invertibility_domain()?;
    let r4p = xp.in_invertibility_domain()?;
    let r5 = x.check_relation(q)?.all_zero();
    let r5p = xp.check_relation(&q_new)?.all_zero();

    // Stability needs theta . dim = 0; for pairs outside the correspondence
    // entirely the status is reported as Unknown rather than an error.
    let opts = GeneralStabilityOptions::default();
    let r6 = if crate::root::theta_dot(theta, &x.dims).is_zero() {
        check_general_stability(x, theta, &opts, rng)?.status
    } else {
        StabilityStatus::Unknown
    };
    let r6p = if crate::root::theta_dot(&theta_new, &xp.dims).is_zero() {
        check_general_stability(xp, &theta_new, &opts, rng)?.status
    } else {
        StabilityStatus::Unknown
    };

    Ok(LusztigReport {
        r1_equal_off_vertex: r1,
        r2_exact_sequence: r2,
        r3_sigma_tau_identity: r3,
        r4_domain: r4,
        r4p_domain: r4p,
        r5_relation: r5,
        r5p_relation: r5p,
        r6_stability: r6,
        r6p_stability: r6p,
    })
}

#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub vertex: usize,
    pub dims: DimVec,
    pub q: Vec<GaussianRational>,
    pub theta: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub final_rep: Representation,
    /// Why the reduction stopped.
    pub terminal: String,
}

/// Greedily convolves at vertices where the reflection strictly drops the
/// total dimension, carrying the parameters along, until no admissible
/// vertex remains or the step bound is hit.
pub fn reduce_dimension_vector(
    rep: &Representation,
    q: &[GaussianRational],
    theta: &[BigRational],
    max_steps: usize,
) -> Result<ReductionTrace> {
    let mut current = rep.clone();
    let mut q = q.to_vec();
    let mut theta = theta.to_vec();
    let mut steps = Vec::new();
    for _ in 0..max_steps {
        let dq = current.dq.clone();
        let mut advanced = false;
        for i in 0..dq.vertex_count() {
            if dq.has_loop_at(i) {
                continue;
            }
            let e = crate::root::unit(dq.vertex_count(), i);
            if crate::root::bilinear_form(&dq, &current.dims, &e)? <= 0 {
                continue;
            }
            match middle_convolve(&current, i, &q, &theta) {
                Ok(res) => {
                    q = res.q.clone();
                    theta = res.theta.clone();
                    current = res.rep;
                    steps.push(ReductionStep {
                        vertex: i,
                        dims: res.dims,
                        q: q.clone(),
                        theta: theta.clone(),
                    });
                    advanced = true;
                    break;
                }
                Err(_) => continue, // inadmissible here; try the next vertex
            }
        }
        if !advanced {
            return Ok(ReductionTrace {
                steps,
                final_rep: current,
                terminal: "no admissible reducing vertex".into(),
            });
        }
    }
    Ok(ReductionTrace { steps, final_rep: current, terminal: "step bound reached".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{double, Quiver};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gq(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn a2_dq() -> crate::quiver::DoubledQuiver {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        double(q, None).unwrap()
    }

    fn a2_solution() -> (Representation, Vec<GaussianRational>, Vec<BigRational>) {
        let rep = Representation::new(
            a2_dq(),
            vec![1, 1],
            vec![(Matrix::from_int_rows(&[&[1]]), Matrix::from_int_rows(&[&[1]]))],
        )
        .unwrap();
        (rep, vec![gq(1, 2), gq(2, 1)], vec![rat(1, 1), rat(-1, 1)])
    }

    #[test]
    fn flip_preserves_relation_values() {
        let (rep, q, _) = a2_solution();
        let flipped = flip_base_arrow(&rep, 0).unwrap();
        assert!(flipped.check_relation(&q).unwrap().all_zero());
        // Head per order slot is preserved.
        for (idx, &h) in rep.dq.order.iter().enumerate() {
            assert_eq!(rep.dq.head(h), flipped.dq.head(flipped.dq.order[idx]));
        }
    }

    #[test]
    fn worked_a2_convolution() {
        let (rep, q, theta) = a2_solution();
        let res = middle_convolve(&rep, 1, &q, &theta).unwrap();
        assert_eq!(res.dims, vec![1, 0]);
        assert_eq!(res.q, vec![gq(1, 1), gq(1, 2)]);
        assert!(res.report.all_hold());
    }

    #[test]
    fn convolution_at_empty_vertex_is_trivial() {
        // dims = e_1 on A2 with x = 0: no arrows matter at vertex 1 (dim 0
        // there), convolving at vertex 2 grows the dimension instead.
        let rep = Representation::new(
            a2_dq(),
            vec![1, 0],
            vec![(
                Matrix::zeros(Mode::Exact, 0, 1),
                Matrix::zeros(Mode::Exact, 1, 0),
            )],
        )
        .unwrap();
        let q = vec![gq(1, 1), gq(3, 1)];
        let theta = vec![rat(0, 1), rat(0, 1)];
        let res = middle_convolve(&rep, 1, &q, &theta).unwrap();
        // s_2((1,0)) = (1,1): the convolution grows the zero solution.
        assert_eq!(res.dims, vec![1, 1]);
        assert!(res.report.all_hold());
        assert!(res.rep.check_relation(&res.q).unwrap().all_zero());
    }

    #[test]
    fn emptiness_branch_fires() {
        // dims = (0, 2) on A2: s_1 sends 0 -> 0 - (2*0 - 2) = 2 fine; use
        // vertex 2 with dims (0,2): (v, e_2) = 4, s_2(v)_2 = -2 < 0.
        let rep = Representation::new(
            a2_dq(),
            vec![0, 2],
            vec![(
                Matrix::zeros(Mode::Exact, 2, 0),
                Matrix::zeros(Mode::Exact, 0, 2),
            )],
        )
        .unwrap();
        let q = vec![gq(1, 1), gq(1, 1)];
        let theta = vec![rat(0, 1), rat(-1, 1)];
        let err = middle_convolve(&rep, 1, &q, &theta);
        assert!(matches!(err, Err(CoreError::EmptyDimension { .. })));
    }

    #[test]
    fn involution_on_worked_example() {
        let (rep, q, theta) = a2_solution();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cert = verify_involution(&rep, 1, &q, &theta, &mut rng, 64).unwrap();
        assert_eq!(cert.second.dims, vec![1, 1]);
        for g in &cert.intertwiner {
            assert!(g.is_invertible().unwrap());
        }
    }

    #[test]
    fn involution_with_reversed_orientation() {
        // Same data with the arrow stored in the opposite direction, so the
        // internal flip machinery is exercised end to end.
        let qv = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "2".into(), "1".into())],
        )
        .unwrap();
        let dq = double(qv, None).unwrap();
        let rep = Representation::new(
            dq,
            vec![1, 1],
            vec![(Matrix::from_int_rows(&[&[1]]), Matrix::from_int_rows(&[&[1]]))],
        )
        .unwrap();
        // Now vertex 2 (index 1) has only an outgoing arrow; the relation
        // reads Phi_1 = (1 + x x~), Phi_2 = (1 + x~ x)^{-1}.
        let q = vec![gq(2, 1), gq(1, 2)];
        let theta = vec![rat(-1, 1), rat(1, 1)];
        assert!(rep.check_relation(&q).unwrap().all_zero());
        let res = middle_convolve(&rep, 1, &q, &theta).unwrap();
        assert!(res.report.all_hold());
        assert_eq!(res.dims, vec![1, 0]);
        // The output is back on the original orientation.
        assert_eq!(res.rep.dq, rep.dq);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cert = verify_involution(&rep, 1, &q, &theta, &mut rng, 64).unwrap();
        assert_eq!(cert.second.dims, vec![1, 1]);
    }

    #[test]
    fn lusztig_conditions_on_convolution_output() {
        let (rep, q, theta) = a2_solution();
        let res = middle_convolve(&rep, 1, &q, &theta).unwrap();
        // The convolution output has different dims; R-conditions compare a
        // pair with dims' = s_i(dims). Rebuild x' on the same quiver shape.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let report = check_lusztig_conditions(&rep, &res.rep, 1, &q, &theta, &mut rng).unwrap();
        assert!(report.algebraic_conditions_hold(), "{report:?}");
    }

    #[test]
    fn lusztig_r3_fails_for_identity_pair() {
        // x' = x with q_i != 1 and a nonempty arrow set violates R3.
        let (rep, q, theta) = a2_solution();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let report = check_lusztig_conditions(&rep, &rep, 1, &q, &theta, &mut rng).unwrap();
        assert!(!report.r3_sigma_tau_identity);
    }

    #[test]
    fn reduction_trace_on_worked_example() {
        let (rep, q, theta) = a2_solution();
        let trace = reduce_dimension_vector(&rep, &q, &theta, 10).unwrap();
        // Both vertices drop the total dimension by one; the greedy driver
        // takes the first admissible vertex and then stops.
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].vertex, 0);
        assert_eq!(trace.steps[0].dims, vec![0, 1]);
        // Oracle: the step must match an independent reflection computation.
        let expected = reflect_dim(&rep.dq, trace.steps[0].vertex, &rep.dims).unwrap();
        assert_eq!(trace.steps[0].dims, expected);
        // Parameter coherence along the trace.
        let qs = &trace.steps[0].q;
        assert_eq!(crate::root::q_power(qs, &trace.steps[0].dims).unwrap(), gq(1, 1));
        assert!(crate::root::theta_dot(&trace.steps[0].theta, &trace.steps[0].dims).is_zero());
    }

    #[test]
    fn reduction_stops_at_minimal_dims() {
        let rep = Representation::zero(a2_dq(), vec![1, 0], Mode::Exact).unwrap();
        let q = vec![gq(1, 1), gq(1, 1)];
        let theta = vec![rat(0, 1), rat(0, 1)];
        let trace = reduce_dimension_vector(&rep, &q, &theta, 10).unwrap();
        assert!(trace.steps.is_empty());
    }
}
