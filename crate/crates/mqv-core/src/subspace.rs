//! Graded subspaces, exact span arithmetic, and invariant-closure fixpoints.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::rep::Representation;
use crate::root::DimVec;
use crate::scalar::Mode;

/// A per-vertex column-span subspace; each basis matrix has independent
/// columns (exact mode).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub basis: Vec<Matrix>,
}

/// Direction of the invariant-closure fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureDirection {
    /// Smallest invariant subspace containing the seed.
    SmallestContaining,
    /// Largest invariant subspace inside the seed.
    LargestInside,
}

/// Span of the columns as a basis matrix (independent columns).
pub fn span_basis(m: &Matrix) -> Result<Matrix> {
    m.col_space_basis()
}

/// Canonical basis of the column span (reduced column echelon form), so two
/// equal subspaces produce identical matrices.
pub fn canonical_basis(m: &Matrix) -> Result<Matrix> {
    let r = m.transpose().rref_unique()?;
    let rank = (0..r.rows())
        .take_while(|&row| (0..r.cols()).any(|c| !r.get(row, c).is_zero()))
        .count();
    Ok(r.block(0, 0, rank, r.cols()).transpose())
}

/// Span of `[a | b]`.
pub fn sum_spans(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    span_basis(&Matrix::hstack(&[a, b])?)
}

/// Intersection of two column spans, via the kernel of `[a | -b]`.
pub fn intersect_spans(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() == 0 || b.cols() == 0 {
        return Ok(Matrix::zeros(Mode::Exact, a.rows(), 0));
    }
    let stacked = Matrix::hstack(&[a, &b.neg()])?;
    let k = stacked.kernel_basis()?;
    let top = k.block(0, 0, a.cols(), k.cols());
    span_basis(&a.mul(&top)?)
}

/// Preimage `{ u : m u in span(w) }`, via the kernel of `[m | -w]`.
pub fn preimage_span(m: &Matrix, w: &Matrix) -> Result<Matrix> {
    if w.cols() == 0 {
        return m.kernel_basis();
    }
    let stacked = Matrix::hstack(&[m, &w.neg()])?;
    let k = stacked.kernel_basis()?;
    let top = k.block(0, 0, m.cols(), k.cols());
    span_basis(&top)
}

/// Whether `span(inner)` is contained in `span(outer)`.
pub fn span_contained(inner: &Matrix, outer: &Matrix) -> Result<bool> {
    if inner.cols() == 0 {
        return Ok(true);
    }
    Ok(outer.solve(inner)?.is_some())
}

impl Subspace {
    pub fn zero(dims: &DimVec) -> Self {
        Subspace {
            basis: dims.iter().map(|&d| Matrix::zeros(Mode::Exact, d as usize, 0)).collect(),
        }
    }

    pub fn full(dims: &DimVec) -> Self {
        Subspace {
            basis: dims.iter().map(|&d| Matrix::identity(Mode::Exact, d as usize)).collect(),
        }
    }

    /// Per-vertex coordinate subspace selecting the listed basis columns.
    pub fn coordinate(dims: &DimVec, picks: &[Vec<usize>]) -> Result<Self> {
        if picks.len() != dims.len() {
            return Err(CoreError::ContractViolation("picks length != vertex count".into()));
        }
        let mut basis = Vec::new();
        for (i, sel) in picks.iter().enumerate() {
            let d = dims[i] as usize;
            let mut m = Matrix::zeros(Mode::Exact, d, sel.len());
            for (c, &row) in sel.iter().enumerate() {
                if row >= d {
                    return Err(CoreError::ContractViolation("coordinate index out of range".into()));
                }
                m.set(row, c, crate::scalar::Scalar::one(Mode::Exact))?;
            }
            basis.push(m);
        }
        Ok(Subspace { basis })
    }

    pub fn from_bases(basis: Vec<Matrix>) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(basis.len());
        for b in basis {
            b.require_exact("subspace basis")?;
            cleaned.push(span_basis(&b)?);
        }
        Ok(Subspace { basis: cleaned })
    }

    pub fn dims(&self) -> DimVec {
        self.basis.iter().map(|b| b.cols() as i64).collect()
    }

    pub fn total_dim(&self) -> i64 {
        self.dims().iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.iter().all(|b| b.cols() == 0)
    }

    pub fn is_full(&self) -> bool {
        self.basis.iter().all(|b| b.cols() == b.rows())
    }

    /// Canonicalizes every vertex basis; equal subspaces become identical.
    pub fn canonicalize(&self) -> Result<Subspace> {
        let basis = self.basis.iter().map(canonical_basis).collect::<Result<Vec<_>>>()?;
        Ok(Subspace { basis })
    }

    /// A stable string key for dedup, built from the canonical bases.
    pub fn canonical_key(&self) -> Result<String> {
        let canon = self.canonicalize()?;
        let mut key = String::new();
        for b in &canon.basis {
            key.push('[');
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    key.push_str(&b.entry_exact(r, c).to_string());
                    key.push(',');
                }
            }
            key.push(']');
        }
        Ok(key)
    }

    /// Whether every arrow map sends the subspace into itself.
    pub fn is_invariant(&self, rep: &Representation) -> Result<bool> {
        for &h in &rep.dq.order {
            let img = rep.map(h).mul(&self.basis[rep.dq.tail(h)])?;
            if !span_contained(&img, &self.basis[rep.dq.head(h)])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contained_in(&self, other: &Subspace) -> Result<bool> {
        for (a, b) in self.basis.iter().zip(&other.basis) {
            if !span_contained(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Iterates the invariance conditions to a fixpoint: either grow the seed by
/// arrow images until invariant, or shrink it by arrow preimages until
/// invariant. Reaches the fixpoint in at most total-dimension many sweeps.
pub fn invariant_closure(
    rep: &Representation,
    seed: &Subspace,
    direction: ClosureDirection,
) -> Result<Subspace> {
    if rep.mode() != Mode::Exact {
        return Err(CoreError::ExactModeRequired("invariant_closure".into()));
    }
    if seed.basis.len() != rep.dq.vertex_count() {
        return Err(CoreError::ContractViolation("seed has wrong vertex count".into()));
    }
    let mut current = seed.clone();
    loop {
        let before = current.total_dim();
        let mut next = current.clone();
        match direction {
            ClosureDirection::SmallestContaining => {
                for i in 0..rep.dq.vertex_count() {
                    let mut acc = current.basis[i].clone();
                    for h in rep.dq.incoming(i) {
                        let img = rep.map(h).mul(&current.basis[rep.dq.tail(h)])?;
                        acc = sum_spans(&acc, &img)?;
                    }
                    next.basis[i] = acc;
                }
            }
            ClosureDirection::LargestInside => {
                for i in 0..rep.dq.vertex_count() {
                    let mut acc = current.basis[i].clone();
                    for &h in &rep.dq.order {
                        if rep.dq.tail(h) != i {
                            continue;
                        }
                        let pre = preimage_span(rep.map(h), &current.basis[rep.dq.head(h)])?;
                        acc = intersect_spans(&acc, &pre)?;
                    }
                    next.basis[i] = acc;
                }
            }
        }
        let after = next.total_dim();
        current = next;
        if after == before {
            // One further sweep is a fixpoint; invariance holds now.
            return Ok(current);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{double, Quiver};
    use crate::rep::Representation;

    fn a2_rep(x_h: &[&[i64]], x_hb: &[&[i64]], dims: Vec<i64>) -> Representation {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        Representation::new(
            dq,
            dims,
            vec![(Matrix::from_int_rows(x_h), Matrix::from_int_rows(x_hb))],
        )
        .unwrap()
    }

    #[test]
    fn closure_of_zero_and_full_are_fixed() {
        let rep = a2_rep(&[&[1]], &[&[1]], vec![1, 1]);
        let zero = Subspace::zero(&rep.dims);
        let full = Subspace::full(&rep.dims);
        let z = invariant_closure(&rep, &zero, ClosureDirection::SmallestContaining).unwrap();
        assert!(z.is_zero());
        let f = invariant_closure(&rep, &full, ClosureDirection::LargestInside).unwrap();
        assert!(f.is_full());
    }

    #[test]
    fn smallest_containing_pushes_along_arrows() {
        // x_h = 1, x_hbar = 0, seed = V_1: the arrow pushes V_1 onto V_2.
        let rep = a2_rep(&[&[1]], &[&[0]], vec![1, 1]);
        let seed = Subspace::coordinate(&rep.dims, &[vec![0], vec![]]).unwrap();
        let closed = invariant_closure(&rep, &seed, ClosureDirection::SmallestContaining).unwrap();
        assert!(closed.is_full());
        assert!(closed.is_invariant(&rep).unwrap());
    }

    #[test]
    fn largest_inside_respects_kernels() {
        // Same rep; the largest invariant subspace inside V_1 (zero at vertex
        // 2) must be killed by x_h = 1, so it is zero.
        let rep = a2_rep(&[&[1]], &[&[0]], vec![1, 1]);
        let seed = Subspace::coordinate(&rep.dims, &[vec![0], vec![]]).unwrap();
        let closed = invariant_closure(&rep, &seed, ClosureDirection::LargestInside).unwrap();
        assert!(closed.is_zero());
        // The other coordinate subspace is invariant as is.
        let seed = Subspace::coordinate(&rep.dims, &[vec![], vec![0]]).unwrap();
        let closed = invariant_closure(&rep, &seed, ClosureDirection::LargestInside).unwrap();
        assert_eq!(closed.dims(), vec![0, 1]);
        assert!(closed.is_invariant(&rep).unwrap());
    }

    #[test]
    fn closure_output_is_extremal() {
        let rep = a2_rep(&[&[1, 0], &[0, 1]], &[&[1, 1], &[0, 1]], vec![2, 2]);
        let seed = Subspace::coordinate(&rep.dims, &[vec![0], vec![]]).unwrap();
        let closed = invariant_closure(&rep, &seed, ClosureDirection::SmallestContaining).unwrap();
        assert!(closed.is_invariant(&rep).unwrap());
        // One further iteration does not move it.
        let again = invariant_closure(&rep, &closed, ClosureDirection::SmallestContaining).unwrap();
        assert_eq!(again.dims(), closed.dims());
    }

    #[test]
    fn canonical_key_identifies_equal_spans() {
        let m1 = Matrix::from_int_rows(&[&[1, 0], &[0, 1]]);
        let m2 = Matrix::from_int_rows(&[&[1, 1], &[1, -1]]);
        let s1 = Subspace::from_bases(vec![m1]).unwrap();
        let s2 = Subspace::from_bases(vec![m2]).unwrap();
        assert_eq!(s1.canonical_key().unwrap(), s2.canonical_key().unwrap());
    }

    #[test]
    fn intersect_and_preimage() {
        let a = Matrix::from_int_rows(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = Matrix::from_int_rows(&[&[0, 0], &[1, 0], &[0, 1]]);
        let cap = intersect_spans(&a, &b).unwrap();
        assert_eq!(cap.cols(), 1);
        // Intersection is the middle coordinate line.
        assert!(!cap.get(1, 0).is_zero());
        assert!(cap.get(0, 0).is_zero() && cap.get(2, 0).is_zero());

        let m = Matrix::from_int_rows(&[&[1, 0], &[0, 0]]);
        let w = Matrix::from_int_rows(&[&[1], &[0]]);
        // Preimage of span(e1) under diag(1, 0) is everything.
        assert_eq!(preimage_span(&m, &w).unwrap().cols(), 2);
    }
}
