//! The dictionary between star-shaped quiver representations and tuples of
//! invertible matrices with prescribed eigenvalue ladders: parameters from
//! weights, both directions of the correspondence, the slope inequality for
//! filtered subsystems, and trace-of-cycle invariants.

use std::collections::BTreeSet;

use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::quiver::{build_star, double, ArrowRef, StarQuiver};
use crate::rep::Representation;
use crate::root::{q_power, theta_dot, DimVec};
use crate::scalar::{GaussianRational, Mode, Scalar};
use crate::subspace::{intersect_spans, invariant_closure, span_basis, ClosureDirection, Subspace};

/// A monodromy-style tuple: invertible matrices `A_1 .. A_n` with declared
/// eigenvalue ladders, flag dimensions, optional explicit flag bases, and
/// weights. `A_1 ... A_n = 1` is checked where a solution is claimed, never
/// assumed.
#[derive(Debug, Clone)]
pub struct LocalSystemData {
    pub rank: usize,
    pub matrices: Vec<Matrix>,
    /// `ladders[i][j]` is the eigenvalue at depth j, `j = 0 .. l_i`.
    pub ladders: Vec<Vec<GaussianRational>>,
    /// `flag_dims[i][j-1]` is `dim F_i^j` for `j = 1 .. l_i`.
    pub flag_dims: Vec<Vec<i64>>,
    /// Explicit bases of the flags `F_i^j`, `j = 1 .. l_i`.
    pub flags: Option<Vec<Vec<Matrix>>>,
    /// Strictly increasing weights `beta_i^0 .. beta_i^{l_i}`.
    pub beta: Vec<Vec<BigRational>>,
}

impl LocalSystemData {
    pub fn puncture_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn arm_lengths(&self) -> Vec<usize> {
        self.ladders.iter().map(|l| l.len() - 1).collect()
    }

    /// Shape checks, invertibility, ladder annihilation
    /// `(A - xi_0)...(A - xi_l) = 0`, and the rank formula
    /// `v_{i,j} = rank (A - xi_0)...(A - xi_{j-1})`.
    pub fn validate(&self) -> Result<()> {
        let n = self.puncture_count();
        if self.ladders.len() != n || self.flag_dims.len() != n || self.beta.len() != n {
            return Err(CoreError::ContractViolation("per-puncture data lengths differ".into()));
        }
        for (i, a) in self.matrices.iter().enumerate() {
            if a.rows() != self.rank || a.cols() != self.rank {
                return Err(CoreError::ShapeMismatch(format!("A_{} must be {r}x{r}", i + 1, r = self.rank)));
            }
            a.require_exact("local system matrices")?;
            if !a.is_invertible()? {
                return Err(CoreError::ContractViolation(format!("A_{} is singular", i + 1)));
            }
            if self.ladders[i].is_empty() {
                return Err(CoreError::ContractViolation("ladder must have at least one entry".into()));
            }
            if self.ladders[i].iter().any(|x| x.is_zero()) {
                return Err(CoreError::ContractViolation("ladder entries must be nonzero".into()));
            }
            let l = self.ladders[i].len() - 1;
            if self.flag_dims[i].len() != l {
                return Err(CoreError::ContractViolation(format!(
                    "flag dims of puncture {} must list j = 1..{l}",
                    i + 1
                )));
            }
            if self.beta[i].len() != l + 1 {
                return Err(CoreError::ContractViolation("weights must match the ladder length".into()));
            }
            for w in self.beta[i].windows(2) {
                if w[0] >= w[1] {
                    return Err(CoreError::ContractViolation("weights must be strictly increasing".into()));
                }
            }
            // Annihilation and the rank formula for the image ladder.
            let mut prod = Matrix::identity(Mode::Exact, self.rank);
            for (j, xi) in self.ladders[i].iter().enumerate() {
                if j >= 1 {
                    let vj = prod.rank()? as i64;
                    if vj != self.flag_dims[i][j - 1] {
                        return Err(CoreError::ContractViolation(format!(
                            "declared v_{{{},{}}} = {} but rank of the ladder product is {}",
                            i + 1, j, self.flag_dims[i][j - 1], vj
                        )));
                    }
                }
                let shifted = a.sub(&Matrix::scalar_matrix(
                    Mode::Exact,
                    self.rank,
                    Scalar::Exact(xi.clone()),
                )?)?;
                prod = shifted.mul(&prod)?;
            }
            if !prod.is_zero() {
                return Err(CoreError::ContractViolation(format!(
                    "(A - xi_0)...(A - xi_l) != 0 at puncture {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn product_is_one(&self) -> Result<bool> {
        let mut prod = Matrix::identity(Mode::Exact, self.rank);
        for a in &self.matrices {
            prod = prod.mul(a)?;
        }
        Ok(prod.is_identity())
    }
}

/// The canonical image-ladder flags `F^j = Im (A - xi_0)...(A - xi_{j-1})`.
pub fn image_ladder_flags(a: &Matrix, ladder: &[GaussianRational]) -> Result<Vec<Matrix>> {
    let r = a.rows();
    let mut out = Vec::new();
    let mut prod = Matrix::identity(Mode::Exact, r);
    for xi in &ladder[..ladder.len() - 1] {
        let shifted = a.sub(&Matrix::scalar_matrix(Mode::Exact, r, Scalar::Exact(xi.clone()))?)?;
        prod = shifted.mul(&prod)?;
        out.push(span_basis(&prod)?);
    }
    Ok(out)
}

/// A representation of a star quiver, with the arm map accessors
/// `a_{i,j}: V_{i,j+1} -> V_{i,j}` and `b_{i,j}: V_{i,j} -> V_{i,j+1}`.
#[derive(Debug, Clone)]
pub struct StarRepresentation {
    pub star: StarQuiver,
    pub rep: Representation,
}

impl StarRepresentation {
    pub fn arm_map_a(&self, arm: usize, j: usize) -> Result<&Matrix> {
        let k = self.star.arm_arrow(arm, j)?;
        Ok(self.rep.map(ArrowRef::forward(k)))
    }

    pub fn arm_map_b(&self, arm: usize, j: usize) -> Result<&Matrix> {
        let k = self.star.arm_arrow(arm, j)?;
        Ok(self.rep.map(ArrowRef { arrow: k, reversed: true }))
    }

    pub fn center_dim(&self) -> usize {
        self.rep.dim_at(self.star.center())
    }
}

/// Parameters `(q, theta)` a star representation must satisfy so that it
/// matches a tuple with ladder `xi` and weights `beta`:
/// `q_{i,j} = xi^{j-1}/xi^j`, `q_0 = prod (xi_i^0)^{-1}`,
/// `theta_{i,j} = beta^j - beta^{j-1}`, `theta_0 = -(sum theta v)/r`.
/// `theta . dims = 0` holds by construction; `q^dims = 1` is the determinant
/// condition on the input data and is enforced.
pub fn params_from_weights(
    star: &StarQuiver,
    ladders: &[Vec<GaussianRational>],
    beta: &[Vec<BigRational>],
    dims: &DimVec,
) -> Result<(Vec<GaussianRational>, Vec<BigRational>)> {
    let n = star.arm_count();
    if ladders.len() != n || beta.len() != n {
        return Err(CoreError::ContractViolation("one ladder and one weight list per arm".into()));
    }
    let dq = double(star.quiver.clone(), None)?;
    if dims.len() != dq.vertex_count() {
        return Err(CoreError::ContractViolation("dims length != vertex count".into()));
    }
    let r = dims[star.center()];
    if r <= 0 {
        return Err(CoreError::ContractViolation("center dimension must be positive".into()));
    }

    let mut q = vec![GaussianRational::one(); dq.vertex_count()];
    let mut theta = vec![BigRational::zero(); dq.vertex_count()];

    let mut q0 = GaussianRational::one();
    let mut weighted = BigRational::zero();
    for arm in 1..=n {
        let ladder = &ladders[arm - 1];
        let b = &beta[arm - 1];
        let l = star.arm_lengths[arm - 1];
        if ladder.len() != l + 1 || b.len() != l + 1 {
            return Err(CoreError::ContractViolation(format!(
                "arm {arm}: ladder and weights must have length l + 1 = {}",
                l + 1
            )));
        }
        if ladder.iter().any(|x| x.is_zero()) {
            return Err(CoreError::ContractViolation("ladder entries must be nonzero".into()));
        }
        for w in b.windows(2) {
            if w[0] >= w[1] {
                return Err(CoreError::ContractViolation("weights must be strictly increasing".into()));
            }
        }
        q0 = q0.mul(&ladder[0].inv()?);
        for j in 1..=l {
            let v = star.arm_vertex(arm, j)?;
            q[v] = ladder[j - 1].div(&ladder[j])?;
            theta[v] = &b[j] - &b[j - 1];
            weighted += &theta[v] * BigRational::from_integer(dims[v].into());
        }
    }
    q[star.center()] = q0;
    theta[star.center()] = -weighted / BigRational::from_integer(r.into());

    debug_assert!(theta_dot(&theta, dims).is_zero());
    let qd = q_power(&q, dims)?;
    if !qd.is_one() {
        return Err(CoreError::ContractViolation(format!(
            "q^dims = {qd} != 1: the ladder eigenvalues violate the determinant-one condition"
        )));
    }
    Ok((q, theta))
}

/// Extracts the monodromy tuple of a star representation solving the
/// relation for the parameters of `ladders`:
/// `A_i = xi_{i,0} (1 + a_{i,0} b_{i,0})`, with the image flags
/// `F_i^j = Im(a_{i,0} ... a_{i,j-1})`. The ladder containment
/// `(A_i - xi_{i,j}) F^j <= F^{j+1}` is re-verified exactly; the measured
/// flag dimensions equal the arm dimensions exactly at stable points.
pub fn rep_to_tuple(
    x: &StarRepresentation,
    ladders: &[Vec<GaussianRational>],
    beta: &[Vec<BigRational>],
) -> Result<LocalSystemData> {
    let star = &x.star;
    let n = star.arm_count();
    let r = x.center_dim();
    // The relation must hold for the dictionary parameters.
    let (q, _theta) = params_from_weights(star, ladders, beta, &x.rep.dims)?;
    if !x.rep.check_relation(&q)?.all_zero() {
        return Err(CoreError::ContractViolation(
            "the star representation does not solve the relation for the ladder parameters".into(),
        ));
    }

    let mut matrices = Vec::with_capacity(n);
    let mut flags: Vec<Vec<Matrix>> = Vec::with_capacity(n);
    let mut flag_dims: Vec<Vec<i64>> = Vec::with_capacity(n);
    for arm in 1..=n {
        let l = star.arm_lengths[arm - 1];
        let xi0 = &ladders[arm - 1][0];
        let a_mat = if l == 0 {
            Matrix::scalar_matrix(Mode::Exact, r, Scalar::Exact(xi0.clone()))?
        } else {
            let a0 = x.arm_map_a(arm, 0)?;
            let b0 = x.arm_map_b(arm, 0)?;
            let f = Matrix::identity(Mode::Exact, r).add(&a0.mul(b0)?)?;
            f.scale(&Scalar::Exact(xi0.clone()))?
        };

        // Image flags along the arm.
        let mut arm_flags = Vec::new();
        let mut prod = Matrix::identity(Mode::Exact, r);
        for j in 0..l {
            prod = prod.mul(x.arm_map_a(arm, j)?)?;
            arm_flags.push(span_basis(&prod)?);
        }
        // Ladder containments, including (A - xi_l) F^l = 0 at the top.
        for j in 0..=l {
            let outer = if j == 0 {
                Matrix::identity(Mode::Exact, r)
            } else {
                arm_flags[j - 1].clone()
            };
            let inner = if j == l {
                Matrix::zeros(Mode::Exact, r, 0)
            } else {
                arm_flags[j].clone()
            };
            let shifted = a_mat.sub(&Matrix::scalar_matrix(
                Mode::Exact,
                r,
                Scalar::Exact(ladders[arm - 1][j].clone()),
            )?)?;
            let image = shifted.mul(&outer)?;
            if !crate::subspace::span_contained(&image, &inner)? {
                return Err(CoreError::ContractViolation(format!(
                    "ladder containment (A - xi_{{{arm},{j}}}) F^{j} <= F^{} failed",
                    j + 1
                )));
            }
        }
        flag_dims.push(arm_flags.iter().map(|f| f.cols() as i64).collect());
        flags.push(arm_flags);
        matrices.push(a_mat);
    }

    let data = LocalSystemData {
        rank: r,
        matrices,
        ladders: ladders.to_vec(),
        flag_dims,
        flags: Some(flags),
        beta: beta.to_vec(),
    };
    if !data.product_is_one()? {
        return Err(CoreError::ContractViolation(
            "A_1 ... A_n != 1 despite the center relation; ordering data corrupt".into(),
        ));
    }
    Ok(data)
}

/// Builds the star representation of a tuple with explicit flags:
/// `a_{i,j}` are the inclusions in flag coordinates and
/// `b_{i,j} = (xi_{i,j}^{-1} A_i - 1)` co-restricted to the next flag. The
/// output solves the relation for the ladder parameters exactly.
pub fn tuple_to_rep(d: &LocalSystemData) -> Result<StarRepresentation> {
    d.validate()?;
    if !d.product_is_one()? {
        return Err(CoreError::ContractViolation("A_1 ... A_n != 1".into()));
    }
    let flags = d.flags.as_ref().ok_or_else(|| {
        CoreError::ContractViolation(
            "tuple_to_rep needs explicit flags; image_ladder_flags builds the canonical ladder".into(),
        )
    })?;
    let arm_lengths = d.arm_lengths();
    let star = build_star(&arm_lengths)?;
    let dq = double(star.quiver.clone(), None)?;
    let r = d.rank;

    let mut dims = vec![0i64; dq.vertex_count()];
    dims[star.center()] = r as i64;
    for arm in 1..=star.arm_count() {
        for j in 1..=arm_lengths[arm - 1] {
            let v = star.arm_vertex(arm, j)?;
            let basis = &flags[arm - 1][j - 1];
            if basis.rows() != r {
                return Err(CoreError::ShapeMismatch(format!("flag ({arm},{j}) has wrong ambient rank")));
            }
            if basis.rank()? != basis.cols() {
                return Err(CoreError::ContractViolation(format!(
                    "flag basis ({arm},{j}) has dependent columns"
                )));
            }
            if basis.cols() as i64 != d.flag_dims[arm - 1][j - 1] {
                return Err(CoreError::ContractViolation(format!(
                    "flag ({arm},{j}) has dimension {} but v = {}",
                    basis.cols(),
                    d.flag_dims[arm - 1][j - 1]
                )));
            }
            dims[v] = basis.cols() as i64;
        }
    }

    let mut maps: Vec<Option<(Matrix, Matrix)>> = vec![None; dq.base.arrows.len()];
    for arm in 1..=star.arm_count() {
        let l = arm_lengths[arm - 1];
        let a_i = &d.matrices[arm - 1];
        for j in 0..l {
            let outer = if j == 0 {
                Matrix::identity(Mode::Exact, r)
            } else {
                flags[arm - 1][j - 1].clone()
            };
            let inner = &flags[arm - 1][j];
            // a_{i,j}: coordinates of the inner flag inside the outer one.
            let a_map = outer.solve(inner)?.ok_or_else(|| {
                CoreError::ContractViolation(format!("flag ({arm},{}) is not contained in flag ({arm},{j})", j + 1))
            })?;
            // b_{i,j}: (xi_j^{-1} A - 1) restricted to the outer flag, in
            // inner-flag coordinates.
            let xi_inv = d.ladders[arm - 1][j].inv()?;
            let shifted = a_i
                .scale(&Scalar::Exact(xi_inv))?
                .sub(&Matrix::identity(Mode::Exact, r))?;
            let restricted = shifted.mul(&outer)?;
            let b_map = inner.solve(&restricted)?.ok_or_else(|| {
                CoreError::ContractViolation(format!(
                    "flag ({arm},{j}) is not carried into flag ({arm},{}) by A_{arm}: not A-stable",
                    j + 1
                ))
            })?;
            let k = star.arm_arrow(arm, j)?;
            maps[k] = Some((a_map, b_map));
        }
        // Top of the ladder: (A - xi_l) kills F^l.
        let top = if l == 0 {
            Matrix::identity(Mode::Exact, r)
        } else {
            flags[arm - 1][l - 1].clone()
        };
        let shifted = a_i.sub(&Matrix::scalar_matrix(
            Mode::Exact,
            r,
            Scalar::Exact(d.ladders[arm - 1][l].clone()),
        )?)?;
        if !shifted.mul(&top)?.is_zero() {
            return Err(CoreError::ContractViolation(format!(
                "(A - xi_{{{arm},{l}}}) does not kill the deepest flag; ladder and flags disagree"
            )));
        }
    }

    let maps: Vec<(Matrix, Matrix)> = maps.into_iter().map(Option::unwrap).collect();
    let rep = Representation::new(dq, dims, maps)?;
    let x = StarRepresentation { star, rep };

    // The construction solves the relation; verify rather than trust.
    let (q, _theta) = params_from_weights(&x.star, &d.ladders, &d.beta, &x.rep.dims)?;
    if !x.rep.check_relation(&q)?.all_zero() {
        return Err(CoreError::ContractViolation(
            "internal: converse construction failed the relation check".into(),
        ));
    }
    Ok(x)
}

/// One tested subsystem in the slope report.
#[derive(Debug, Clone)]
pub struct BetaSlopeEntry {
    /// Basis of the jointly invariant subspace.
    pub subspace: Matrix,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub violates_semistability: bool,
    pub violates_stability: bool,
}

#[derive(Debug, Clone)]
pub struct BetaStabilityReport {
    pub entries: Vec<BetaSlopeEntry>,
}

impl BetaStabilityReport {
    pub fn semistable_on_tested(&self) -> bool {
        self.entries.iter().all(|e| !e.violates_semistability)
    }
}

/// Evaluates the filtered-subsystem slope inequality on candidate joint
/// invariant subspaces grown from the seeds (plus coordinate seeds) by
/// closure under all of the `A_i`. A violation disproves beta-semistability.
pub fn beta_stability_report(
    d: &LocalSystemData,
    seeds: &[Matrix],
) -> Result<BetaStabilityReport> {
    d.validate()?;
    let r = d.rank;
    let flags: Vec<Vec<Matrix>> = match &d.flags {
        Some(f) => f.clone(),
        None => d
            .matrices
            .iter()
            .zip(&d.ladders)
            .map(|(a, l)| image_ladder_flags(a, l))
            .collect::<Result<Vec<_>>>()?,
    };

    // Representation with one vertex and one loop per puncture; closures
    // under it are exactly the jointly invariant subspaces (A invertible
    // makes forward and backward invariance agree).
    let quiver = crate::quiver::Quiver::new(
        vec!["0".into()],
        (1..=d.puncture_count()).map(|i| (format!("m{i}"), "0".into(), "0".into())).collect(),
    )?;
    let dq = double(quiver, None)?;
    let maps = d
        .matrices
        .iter()
        .map(|a| {
            let inv = a.inverse()?.ok_or_else(|| CoreError::ContractViolation("singular A_i".into()))?;
            Ok((a.clone(), inv))
        })
        .collect::<Result<Vec<_>>>()?;
    let joint = Representation::new(dq, vec![r as i64], maps)?;

    let mut candidate_seeds: Vec<Matrix> = seeds.to_vec();
    for k in 0..r {
        let mut e = Matrix::zeros(Mode::Exact, r, 1);
        e.set(k, 0, Scalar::one(Mode::Exact))?;
        candidate_seeds.push(e);
    }

    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    let rank_r = BigRational::from_integer((r as i64).into());
    // Slope weights theta_{i,j} = beta^j - beta^{j-1}.
    let rhs_value: BigRational = {
        let mut acc = BigRational::zero();
        for (i, arm_flags) in flags.iter().enumerate() {
            for (j, f) in arm_flags.iter().enumerate() {
                let t = &d.beta[i][j + 1] - &d.beta[i][j];
                acc += t * BigRational::from_integer((f.cols() as i64).into());
            }
        }
        acc / &rank_r
    };

    for seed in candidate_seeds {
        let sub = Subspace::from_bases(vec![seed])?;
        let closed = invariant_closure(&joint, &sub, ClosureDirection::SmallestContaining)?;
        let m = closed.basis[0].clone();
        if m.cols() == 0 || m.cols() == r {
            continue; // only proper nonzero subsystems are tested
        }
        let key = closed.canonical_key()?;
        if !seen.insert(key) {
            continue;
        }
        let rank_m = BigRational::from_integer((m.cols() as i64).into());
        let mut lhs = BigRational::zero();
        for (i, arm_flags) in flags.iter().enumerate() {
            for (j, f) in arm_flags.iter().enumerate() {
                let t = &d.beta[i][j + 1] - &d.beta[i][j];
                let cap = intersect_spans(&m, f)?;
                lhs += t * BigRational::from_integer((cap.cols() as i64).into());
            }
        }
        lhs /= &rank_m;
        entries.push(BetaSlopeEntry {
            subspace: m,
            violates_semistability: lhs > rhs_value,
            violates_stability: lhs >= rhs_value,
            lhs,
            rhs: rhs_value.clone(),
        });
    }
    Ok(BetaStabilityReport { entries })
}

/// Trace of the composite along a cycle `(h_1, ..., h_n)` with
/// `tail(h_k) = head(h_{k+1})` cyclically; such traces generate the
/// invariant functions and agree on conjugate representations.
pub fn trace_of_cycle(rep: &Representation, cycle: &[ArrowRef]) -> Result<Scalar> {
    if cycle.is_empty() {
        return Err(CoreError::ContractViolation("empty cycle".into()));
    }
    let dq = &rep.dq;
    for k in 0..cycle.len() {
        let next = cycle[(k + 1) % cycle.len()];
        if dq.tail(cycle[k]) != dq.head(next) {
            return Err(CoreError::ContractViolation(format!(
                "not a cycle: tail of step {k} differs from head of step {}",
                (k + 1) % cycle.len()
            )));
        }
    }
    let mut prod = rep.map(cycle[0]).clone();
    for &h in &cycle[1..] {
        prod = prod.mul(rep.map(h))?;
    }
    let mut tr = Scalar::zero(rep.mode());
    for k in 0..prod.rows() {
        tr = match (tr, prod.get(k, k)) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.add(&b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => unreachable!(),
        };
    }
    Ok(tr)
}

/// Evaluates traces for a list of cycles, keyed by the printed arrow names.
pub fn trace_coordinates(
    rep: &Representation,
    cycles: &[Vec<ArrowRef>],
) -> Result<Vec<(String, Scalar)>> {
    let mut out = Vec::with_capacity(cycles.len());
    for cycle in cycles {
        let name = cycle
            .iter()
            .map(|&h| rep.dq.arrow_name(h))
            .collect::<Vec<_>>()
            .join(".");
        out.push((name, trace_of_cycle(rep, cycle)?));
    }
    Ok(out)
}

/// All cycles of length up to `max_len`, one representative per rotation
/// class.
pub fn enumerate_cycles(dq: &crate::quiver::DoubledQuiver, max_len: usize) -> Vec<Vec<ArrowRef>> {
    let mut out: Vec<Vec<ArrowRef>> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut stack: Vec<ArrowRef> = Vec::new();

    fn canonical_name(dq: &crate::quiver::DoubledQuiver, cycle: &[ArrowRef]) -> String {
        let names: Vec<String> = cycle.iter().map(|&h| dq.arrow_name(h)).collect();
        (0..names.len())
            .map(|s| {
                let mut rot = names[s..].to_vec();
                rot.extend_from_slice(&names[..s]);
                rot.join(".")
            })
            .min()
            .unwrap()
    }

    fn dfs(
        dq: &crate::quiver::DoubledQuiver,
        stack: &mut Vec<ArrowRef>,
        start_head: usize,
        max_len: usize,
        seen: &mut BTreeSet<String>,
        out: &mut Vec<Vec<ArrowRef>>,
    ) {
        let tail = dq.tail(*stack.last().unwrap());
        if tail == start_head && seen.insert(canonical_name(dq, stack)) {
            out.push(stack.clone());
        }
        if stack.len() == max_len {
            return;
        }
        for &h in &dq.order {
            if dq.head(h) == tail {
                stack.push(h);
                dfs(dq, stack, start_head, max_len, seen, out);
                stack.pop();
            }
        }
    }

    for &h in &dq.order {
        stack.push(h);
        dfs(dq, &mut stack, dq.head(h), max_len, &mut seen, &mut out);
        stack.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gq(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn params_trivial_puncture() {
        // n = 1, l = 0, xi^0 = 1: q_0 = 1, theta_0 = 0.
        let star = build_star(&[0]).unwrap();
        let (q, theta) =
            params_from_weights(&star, &[vec![gq(1, 1)]], &[vec![rat(0, 1)]], &vec![1]).unwrap();
        assert!(q[0].is_one());
        assert!(theta[0].is_zero());
    }

    #[test]
    fn params_two_scalar_punctures() {
        // n = 2, r = 1, ladders (2), (1/2): q_0 = (2 * 1/2)^{-1} = 1.
        let star = build_star(&[0, 0]).unwrap();
        let (q, _) = params_from_weights(
            &star,
            &[vec![gq(2, 1)], vec![gq(1, 2)]],
            &[vec![rat(0, 1)], vec![rat(0, 1)]],
            &vec![1],
        )
        .unwrap();
        assert!(q[0].is_one());
    }

    #[test]
    fn params_enforce_determinant_condition() {
        let star = build_star(&[0]).unwrap();
        let r = params_from_weights(&star, &[vec![gq(2, 1)]], &[vec![rat(0, 1)]], &vec![1]);
        assert!(r.is_err());
    }

    #[test]
    fn params_dictionary_consistency() {
        // Nontrivial star: theta . dims = 0 and q^dims = 1 hold exactly.
        let star = build_star(&[1, 1, 1]).unwrap();
        let dims = vec![2, 1, 1, 1];
        // Pick xi with the determinant-one condition:
        // prod_i xi_{i,0}^{m_{i,0}} xi_{i,1}^{m_{i,1}} = 1 with
        // multiplicities m_0 = r - v_1 = 1, m_1 = v_1 = 1.
        let ladders = vec![
            vec![gq(2, 1), gq(3, 1)],
            vec![gq(5, 1), gq(7, 1)],
            vec![gq(1, 2).mul(&gq(1, 5, )), gq(1, 3).mul(&gq(1, 7))],
        ];
        let beta = vec![
            vec![rat(0, 1), rat(1, 2)],
            vec![rat(-1, 3), rat(1, 5)],
            vec![rat(0, 1), rat(2, 1)],
        ];
        let dq = double(star.quiver.clone(), None).unwrap();
        let (q, theta) = params_from_weights(&star, &ladders, &beta, &dims).unwrap();
        assert!(q_power(&q, &dims).unwrap().is_one());
        assert!(theta_dot(&theta, &dims).is_zero());
        let _ = dq;
    }

    fn diagonal_tuple() -> LocalSystemData {
        // r = 2, two punctures, diagonalizable with full eigen-flags.
        // A_1 = diag(2, 3), A_2 = A_1^{-1} = diag(1/2, 1/3).
        let a1 = Matrix::from_exact_rows(vec![
            vec![gq(2, 1), gq(0, 1)],
            vec![gq(0, 1), gq(3, 1)],
        ]);
        let a2 = Matrix::from_exact_rows(vec![
            vec![gq(1, 2), gq(0, 1)],
            vec![gq(0, 1), gq(1, 3)],
        ]);
        // Ladders: spectrum ordered so image flags shrink: (A - 2) has image
        // span(e2), so xi_{1,0} = 2, xi_{1,1} = 3.
        let f1 = Matrix::from_exact_rows(vec![vec![gq(0, 1)], vec![gq(1, 1)]]);
        let f2 = Matrix::from_exact_rows(vec![vec![gq(0, 1)], vec![gq(1, 1)]]);
        LocalSystemData {
            rank: 2,
            matrices: vec![a1, a2],
            ladders: vec![vec![gq(2, 1), gq(3, 1)], vec![gq(1, 2), gq(1, 3)]],
            flag_dims: vec![vec![1], vec![1]],
            flags: Some(vec![vec![f1], vec![f2]]),
            beta: vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]],
        }
    }

    #[test]
    fn tuple_to_rep_diagonal_case() {
        let d = diagonal_tuple();
        d.validate().unwrap();
        assert!(d.product_is_one().unwrap());
        let x = tuple_to_rep(&d).unwrap();
        assert_eq!(x.rep.dims, vec![2, 1, 1]);
        let (q, _) = params_from_weights(&x.star, &d.ladders, &d.beta, &x.rep.dims).unwrap();
        assert!(x.rep.check_relation(&q).unwrap().all_zero());
    }

    #[test]
    fn round_trip_tuple_rep_tuple() {
        let d = diagonal_tuple();
        let x = tuple_to_rep(&d).unwrap();
        let back = rep_to_tuple(&x, &d.ladders, &d.beta).unwrap();
        assert_eq!(back.matrices[0], d.matrices[0]);
        assert_eq!(back.matrices[1], d.matrices[1]);
        assert_eq!(back.flag_dims, d.flag_dims);
    }

    #[test]
    fn identity_tuple_gives_zero_arm_maps() {
        // A_i = 1, xi = 1, trivial flags of full rank... the simplest case:
        // one puncture, l = 0, A = identity.
        let d = LocalSystemData {
            rank: 2,
            matrices: vec![Matrix::identity(Mode::Exact, 2)],
            ladders: vec![vec![gq(1, 1)]],
            flag_dims: vec![vec![]],
            flags: Some(vec![vec![]]),
            beta: vec![vec![rat(0, 1)]],
        };
        d.validate().unwrap();
        let x = tuple_to_rep(&d).unwrap();
        assert_eq!(x.rep.dims, vec![2]);
        assert!(x.rep.dq.base.arrows.is_empty());
    }

    #[test]
    fn rep_to_tuple_scalar_arms() {
        // All arm maps zero, r = 1, n = 2, ladders (c), (1/c): A = (c, 1/c).
        let star = build_star(&[0, 0]).unwrap();
        let dq = double(star.quiver.clone(), None).unwrap();
        let rep = Representation::zero(dq, vec![1], Mode::Exact).unwrap();
        let x = StarRepresentation { star, rep };
        let ladders = vec![vec![gq(5, 1)], vec![gq(1, 5)]];
        let beta = vec![vec![rat(0, 1)], vec![rat(0, 1)]];
        let d = rep_to_tuple(&x, &ladders, &beta).unwrap();
        assert_eq!(d.matrices[0].entry_exact(0, 0), &gq(5, 1));
        assert_eq!(d.matrices[1].entry_exact(0, 0), &gq(1, 5));
        assert!(d.product_is_one().unwrap());
    }

    #[test]
    fn beta_report_flags_unbalanced_block_tuple() {
        // Block-diagonal tuple: the coordinate line e1 is a joint invariant
        // subsystem. Weights are arranged so that e1 has a strictly larger
        // slope than the total space, violating semistability.
        let a1 = Matrix::from_exact_rows(vec![
            vec![gq(2, 1), gq(0, 1)],
            vec![gq(0, 1), gq(3, 1)],
        ]);
        let a2 = Matrix::from_exact_rows(vec![
            vec![gq(1, 2), gq(0, 1)],
            vec![gq(0, 1), gq(1, 3)],
        ]);
        // Flag F^1 = span(e1): satisfied by ladder (3, 2) at puncture 1
        // since (A - 3) has image span(e1).
        let f1 = Matrix::from_exact_rows(vec![vec![gq(1, 1)], vec![gq(0, 1)]]);
        let d = LocalSystemData {
            rank: 2,
            matrices: vec![a1, a2],
            ladders: vec![vec![gq(3, 1), gq(2, 1)], vec![gq(1, 3), gq(1, 2)]],
            flag_dims: vec![vec![1], vec![1]],
            flags: Some(vec![vec![f1.clone()], vec![f1.clone()]]),
            beta: vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]],
        };
        d.validate().unwrap();
        let report = beta_stability_report(&d, &[]).unwrap();
        // e1 meets both flags fully: lhs = 2, rhs = (1 + 1)/2 = 1.
        assert!(!report.semistable_on_tested());
        let bad = report.entries.iter().find(|e| e.violates_semistability).unwrap();
        assert_eq!(bad.lhs, rat(2, 1));
        assert_eq!(bad.rhs, rat(1, 1));
    }

    #[test]
    fn trace_coordinates_worked_example() {
        // A2 with x = 1: Tr(x_hbar x_h) = 1.
        let q = crate::quiver::Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::new(
            dq.clone(),
            vec![1, 1],
            vec![(Matrix::from_int_rows(&[&[1]]), Matrix::from_int_rows(&[&[1]]))],
        )
        .unwrap();
        let cycle = vec![ArrowRef { arrow: 0, reversed: true }, ArrowRef::forward(0)];
        let traces = trace_coordinates(&rep, &[cycle]).unwrap();
        assert_eq!(traces[0].1, Scalar::Exact(gq(1, 1)));
        // Empty cycle list: empty map.
        assert!(trace_coordinates(&rep, &[]).unwrap().is_empty());
        // Non-cycle word errors.
        assert!(trace_of_cycle(&rep, &[ArrowRef::forward(0), ArrowRef::forward(0)]).is_err());
    }

    #[test]
    fn traces_agree_on_conjugates() {
        let q = crate::quiver::Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::new(
            dq.clone(),
            vec![2, 2],
            vec![(
                Matrix::from_int_rows(&[&[1, 2], &[3, 4]]),
                Matrix::from_int_rows(&[&[0, 1], &[1, 1]]),
            )],
        )
        .unwrap();
        let g = vec![
            Matrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            Matrix::from_int_rows(&[&[2, 1], &[1, 1]]),
        ];
        let moved = rep.act(&g).unwrap();
        let cycles = enumerate_cycles(&dq, 4);
        assert!(!cycles.is_empty());
        let t1 = trace_coordinates(&rep, &cycles).unwrap();
        let t2 = trace_coordinates(&moved, &cycles).unwrap();
        for (a, b) in t1.iter().zip(&t2) {
            assert_eq!(a.1, b.1, "trace of {} moved under conjugation", a.0);
        }
    }
}
