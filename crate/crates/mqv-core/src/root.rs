//! The bilinear form on dimension vectors, the three reflections at a
//! loop-free vertex, bounded positive-root enumeration, genericity of
//! parameters, and Kac-Moody root data read off the underlying graph.

use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{CoreError, Result};
use crate::quiver::DoubledQuiver;
use crate::scalar::GaussianRational;

/// Dimension-type vectors are plain integer vectors indexed like the quiver
/// vertices; reflections may produce negative entries and callers check
/// nonnegativity where it matters.
pub type DimVec = Vec<i64>;

pub fn dot(a: &DimVec, b: &DimVec) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn unit(n: usize, i: usize) -> DimVec {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

pub fn is_nonnegative(a: &DimVec) -> bool {
    a.iter().all(|&x| x >= 0)
}

/// `(alpha, beta) = 2 alpha.beta - sum_{h in H} alpha_out(h) beta_in(h)`;
/// symmetric because H contains each arrow with both orientations.
pub fn bilinear_form(dq: &DoubledQuiver, alpha: &DimVec, beta: &DimVec) -> Result<i64> {
    if alpha.len() != dq.vertex_count() || beta.len() != dq.vertex_count() {
        return Err(CoreError::ContractViolation("vector length != vertex count".into()));
    }
    let mut s = 2 * dot(alpha, beta);
    for &h in &dq.order {
        s -= alpha[dq.tail(h)] * beta[dq.head(h)];
    }
    Ok(s)
}

fn require_loop_free(dq: &DoubledQuiver, i: usize) -> Result<()> {
    if dq.has_loop_at(i) {
        return Err(CoreError::LoopAtVertex { vertex: dq.base.vertices[i].clone() });
    }
    Ok(())
}

/// `s_i(alpha) = alpha - (alpha, e_i) e_i`. The result may go negative.
pub fn reflect_dim(dq: &DoubledQuiver, i: usize, alpha: &DimVec) -> Result<DimVec> {
    require_loop_free(dq, i)?;
    let e = unit(dq.vertex_count(), i);
    let c = bilinear_form(dq, alpha, &e)?;
    let mut out = alpha.clone();
    out[i] -= c;
    Ok(out)
}

/// `r_i(theta)_j = theta_j - (e_i, e_j) theta_i`, the reflection dual to s_i.
pub fn reflect_theta(dq: &DoubledQuiver, i: usize, theta: &[BigRational]) -> Result<Vec<BigRational>> {
    require_loop_free(dq, i)?;
    let n = dq.vertex_count();
    if theta.len() != n {
        return Err(CoreError::ContractViolation("theta length != vertex count".into()));
    }
    let ei = unit(n, i);
    let mut out = theta.to_vec();
    for j in 0..n {
        let ej = unit(n, j);
        let c = bilinear_form(dq, &ei, &ej)?;
        out[j] = &theta[j] - BigRational::from_integer(c.into()) * &theta[i];
    }
    Ok(out)
}

/// `u_i(q)_j = q_j q_i^{-(e_i, e_j)}`; in particular `u_i(q)_i = q_i^{-1}`.
pub fn reflect_q(dq: &DoubledQuiver, i: usize, q: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
    require_loop_free(dq, i)?;
    let n = dq.vertex_count();
    if q.len() != n {
        return Err(CoreError::ContractViolation("q length != vertex count".into()));
    }
    if q.iter().any(|x| x.is_zero()) {
        return Err(CoreError::ContractViolation("q entries must be nonzero".into()));
    }
    let ei = unit(n, i);
    let mut out = q.to_vec();
    for j in 0..n {
        let ej = unit(n, j);
        let c = bilinear_form(dq, &ei, &ej)?;
        out[j] = q[j].mul(&q[i].pow(-c)?);
    }
    Ok(out)
}

/// `q^alpha = prod q_i^{alpha_i}`, negative exponents allowed.
pub fn q_power(q: &[GaussianRational], alpha: &DimVec) -> Result<GaussianRational> {
    let mut acc = GaussianRational::one();
    for (qi, &ai) in q.iter().zip(alpha) {
        acc = acc.mul(&qi.pow(ai)?);
    }
    Ok(acc)
}

pub fn theta_dot(theta: &[BigRational], alpha: &DimVec) -> BigRational {
    theta
        .iter()
        .zip(alpha)
        .map(|(t, &a)| t * BigRational::from_integer(a.into()))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

/// All nonzero `alpha <= v` componentwise with `(alpha, alpha) <= 2`,
/// i.e. the positive roots visible below `v`.
pub fn enumerate_rplus_bounded(dq: &DoubledQuiver, v: &DimVec) -> Result<Vec<DimVec>> {
    if v.len() != dq.vertex_count() {
        return Err(CoreError::ContractViolation("vector length != vertex count".into()));
    }
    let n = v.len();
    let mut out = Vec::new();
    let mut alpha = vec![0i64; n];
    loop {
        // Advance odometer.
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            alpha[k] += 1;
            if alpha[k] <= v[k] {
                break;
            }
            alpha[k] = 0;
            k += 1;
        }
        if bilinear_form(dq, &alpha, &alpha)? <= 2 {
            out.push(alpha.clone());
        }
    }
}

/// Outcome of the genericity scan for `(q, theta)` at dimension `v`.
#[derive(Debug, Clone, PartialEq)]
pub enum Genericity {
    Generic,
    /// `q^v != 1`.
    FailsQPower(GaussianRational),
    /// `theta . v != 0`.
    FailsThetaDot(BigRational),
    /// Some proper sub-root alpha lies on a wall: `q^alpha = 1` and
    /// `theta . alpha = 0`.
    Wall(DimVec),
}

impl Genericity {
    pub fn is_generic(&self) -> bool {
        matches!(self, Genericity::Generic)
    }
}

/// Checks `q^v = 1`, `theta . v = 0`, and that no alpha in `R_+(v) - {v}`
/// satisfies both wall equations. Exact only; float q has no exact equality.
pub fn is_generic(
    dq: &DoubledQuiver,
    v: &DimVec,
    q: &[GaussianRational],
    theta: &[BigRational],
) -> Result<Genericity> {
    let qv = q_power(q, v)?;
    if !qv.is_one() {
        return Ok(Genericity::FailsQPower(qv));
    }
    let tv = theta_dot(theta, v);
    if !tv.is_zero() {
        return Ok(Genericity::FailsThetaDot(tv));
    }
    for alpha in enumerate_rplus_bounded(dq, v)? {
        if &alpha == v {
            continue;
        }
        if q_power(q, &alpha)?.is_one() && theta_dot(theta, &alpha).is_zero() {
            return Ok(Genericity::Wall(alpha));
        }
    }
    Ok(Genericity::Generic)
}

/// Root datum attached to a loop-free graph: Cartan matrix `C = 2I - A`,
/// with simple roots, coroots and fundamental weights realized inside
/// `Z^n + Z^n` so that all the defining pairings hold on the nose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDatum {
    pub cartan: Vec<Vec<i64>>,
}

/// A weight-lattice element (x, y) in the concrete realization; the pairing
/// with the i-th coroot reads off `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVec {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
}

impl RootDatum {
    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// `alpha_j = (C e_j, e_j)`.
    pub fn simple_root(&self, j: usize) -> WeightVec {
        let n = self.rank();
        let x = (0..n).map(|i| self.cartan[i][j]).collect();
        let mut y = vec![0; n];
        y[j] = 1;
        WeightVec { x, y }
    }

    /// `Lambda_i = (e_i, 0)`.
    pub fn fundamental_weight(&self, i: usize) -> WeightVec {
        let n = self.rank();
        let mut x = vec![0; n];
        x[i] = 1;
        WeightVec { x, y: vec![0; n] }
    }

    /// `<h_i, (x, y)> = x_i`.
    pub fn pair_coroot(&self, i: usize, w: &WeightVec) -> i64 {
        w.x[i]
    }

    /// Symmetric form with `(alpha_i, alpha_j) = c_ij` and
    /// `(alpha_i, lambda) = <h_i, lambda>`.
    pub fn form(&self, a: &WeightVec, b: &WeightVec) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            s += a.x[i] * b.y[i] + a.y[i] * b.x[i];
            for j in 0..n {
                s -= a.y[i] * self.cartan[i][j] * b.y[j];
            }
        }
        s
    }

    /// `<h_i, w - v>` for `w = sum w_k Lambda_k` and `v = sum v_j alpha_j`:
    /// equals `w_i - sum_j c_ij v_j`.
    pub fn coroot_pairing_weight_minus_root(&self, i: usize, w: &[i64], v: &[i64]) -> i64 {
        let mut s = w[i];
        for j in 0..self.rank() {
            s -= self.cartan[i][j] * v[j];
        }
        s
    }
}

/// Reads the generalized Cartan matrix `2I - A` off the underlying graph.
/// Loops would break `c_ii = 2`, so they are rejected.
pub fn root_datum_from_graph(dq: &DoubledQuiver) -> Result<RootDatum> {
    if dq.has_loops() {
        return Err(CoreError::Unsupported(
            "root data require a loop-free quiver (diagonal Cartan entry would drop below 2)".into(),
        ));
    }
    let n = dq.vertex_count();
    let mut cartan = vec![vec![0i64; n]; n];
    for (i, row) in cartan.iter_mut().enumerate() {
        row[i] = 2;
    }
    for a in &dq.base.arrows {
        cartan[a.out_v][a.in_v] -= 1;
        cartan[a.in_v][a.out_v] -= 1;
    }
    Ok(RootDatum { cartan })
}
