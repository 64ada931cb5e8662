//! Dense matrices over Q(i) or complex doubles.
//!
//! Exact elimination clears denominators row by row and then runs
//! fraction-free (Bareiss) elimination with pivoting over the whole
//! remaining block, picking the smallest nonzero entry to bound coefficient
//! blowup. Kernels, solves, determinants and inverses all route through the
//! same elimination. 0 x n and n x 0 matrices are legal and represent zero
//! maps.

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::scalar::{GaussianRational, Mode, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Data {
    Exact(Vec<GaussianRational>),
    Float(Vec<Complex64>),
}

/// A rows x cols matrix, homogeneous in mode, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Data,
}

impl Matrix {
    pub fn zeros(mode: Mode, rows: usize, cols: usize) -> Self {
        let data = match mode {
            Mode::Exact => Data::Exact(vec![GaussianRational::zero(); rows * cols]),
            Mode::Float => Data::Float(vec![Complex64::new(0.0, 0.0); rows * cols]),
        };
        Self { rows, cols, data }
    }

    pub fn identity(mode: Mode, n: usize) -> Self {
        let mut m = Self::zeros(mode, n, n);
        for k in 0..n {
            m.set(k, k, Scalar::one(mode)).unwrap();
        }
        m
    }

    /// q times the identity.
    pub fn scalar_matrix(mode: Mode, n: usize, value: Scalar) -> Result<Self> {
        if value.mode() != mode {
            return Err(CoreError::ModeMismatch("scalar_matrix".into()));
        }
        let mut m = Self::zeros(mode, n, n);
        for k in 0..n {
            m.set(k, k, value.clone())?;
        }
        Ok(m)
    }

    pub fn from_exact_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: Data::Exact(rows.into_iter().flatten().collect()),
        }
    }

    pub fn from_float_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: Data::Float(rows.into_iter().flatten().collect()),
        }
    }

    /// Convenience constructor from integer entries, exact mode.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_exact_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| GaussianRational::from_integer(n)).collect())
                .collect(),
        )
    }

    pub fn from_fn_exact(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data: Data::Exact(data) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mode(&self) -> Mode {
        match self.data {
            Data::Exact(_) => Mode::Exact,
            Data::Float(_) => Mode::Float,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        match &self.data {
            Data::Exact(v) => Scalar::Exact(v[r * self.cols + c].clone()),
            Data::Float(v) => Scalar::Float(v[r * self.cols + c]),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) -> Result<()> {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let cols = self.cols;
        match (&mut self.data, value) {
            (Data::Exact(v), Scalar::Exact(q)) => v[r * cols + c] = q,
            (Data::Float(v), Scalar::Float(z)) => v[r * cols + c] = z,
            _ => return Err(CoreError::ModeMismatch("set".into())),
        }
        Ok(())
    }

    /// Borrow an exact entry; panics on float matrices.
    pub fn entry_exact(&self, r: usize, c: usize) -> &GaussianRational {
        match &self.data {
            Data::Exact(v) => &v[r * self.cols + c],
            Data::Float(_) => panic!("entry_exact on float matrix"),
        }
    }

    pub(crate) fn entry_float(&self, r: usize, c: usize) -> Complex64 {
        match &self.data {
            Data::Float(v) => v[r * self.cols + c],
            Data::Exact(_) => panic!("entry_float on exact matrix"),
        }
    }

    pub fn require_exact(&self, what: &str) -> Result<()> {
        if self.mode() != Mode::Exact {
            return Err(CoreError::ExactModeRequired(what.into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Exact(v) => v.iter().all(|q| q.is_zero()),
            Data::Float(v) => v.iter().all(|z| z.re == 0.0 && z.im == 0.0),
        }
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                let want = if r == c { Scalar::one(self.mode()) } else { Scalar::zero(self.mode()) };
                if e != want {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entry magnitude (exact entries measured through f64).
    pub fn max_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                best = best.max(self.get(r, c).abs());
            }
        }
        best
    }

    pub fn to_float(&self) -> Matrix {
        match &self.data {
            Data::Float(_) => self.clone(),
            Data::Exact(v) => Matrix {
                rows: self.rows,
                cols: self.cols,
                data: Data::Float(v.iter().map(|q| q.to_complex()).collect()),
            },
        }
    }

    fn check_same_mode(&self, rhs: &Matrix, what: &str) -> Result<()> {
        if self.mode() != rhs.mode() {
            return Err(CoreError::ModeMismatch(what.into()));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_same_mode(rhs, "add")?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(CoreError::ShapeMismatch(format!(
                "add {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = match (&self.data, &rhs.data) {
            (Data::Exact(a), Data::Exact(b)) => {
                Data::Exact(a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            }
            (Data::Float(a), Data::Float(b)) => {
                Data::Float(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => unreachable!(),
        };
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Matrix {
        let data = match &self.data {
            Data::Exact(v) => Data::Exact(v.iter().map(|q| q.neg()).collect()),
            Data::Float(v) => Data::Float(v.iter().map(|z| -z).collect()),
        };
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Scalar) -> Result<Matrix> {
        if s.mode() != self.mode() {
            return Err(CoreError::ModeMismatch("scale".into()));
        }
        let data = match (&self.data, s) {
            (Data::Exact(v), Scalar::Exact(q)) => Data::Exact(v.iter().map(|x| x.mul(q)).collect()),
            (Data::Float(v), Scalar::Float(z)) => Data::Float(v.iter().map(|x| x * z).collect()),
            _ => unreachable!(),
        };
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_same_mode(rhs, "mul")?;
        if self.cols != rhs.rows {
            return Err(CoreError::ShapeMismatch(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.mode(), self.rows, rhs.cols);
        match (&self.data, &rhs.data, &mut out.data) {
            (Data::Exact(a), Data::Exact(b), Data::Exact(o)) => {
                for r in 0..self.rows {
                    for k in 0..self.cols {
                        let av = &a[r * self.cols + k];
                        if av.is_zero() {
                            continue;
                        }
                        for c in 0..rhs.cols {
                            let t = av.mul(&b[k * rhs.cols + c]);
                            o[r * rhs.cols + c] = o[r * rhs.cols + c].add(&t);
                        }
                    }
                }
            }
            (Data::Float(a), Data::Float(b), Data::Float(o)) => {
                for r in 0..self.rows {
                    for k in 0..self.cols {
                        let av = a[r * self.cols + k];
                        for c in 0..rhs.cols {
                            o[r * rhs.cols + c] += av * b[k * rhs.cols + c];
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.mode(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c)).unwrap();
            }
        }
        out
    }

    /// Horizontal concatenation; all blocks must share the row count.
    pub fn hstack(blocks: &[&Matrix]) -> Result<Matrix> {
        assert!(!blocks.is_empty(), "hstack of nothing");
        let rows = blocks[0].rows;
        let mode = blocks[0].mode();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        for b in blocks {
            if b.rows != rows {
                return Err(CoreError::ShapeMismatch("hstack row mismatch".into()));
            }
            if b.mode() != mode {
                return Err(CoreError::ModeMismatch("hstack".into()));
            }
        }
        let mut out = Matrix::zeros(mode, rows, cols);
        let mut c0 = 0;
        for b in blocks {
            out.set_block(0, c0, b);
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation; all blocks must share the column count.
    pub fn vstack(blocks: &[&Matrix]) -> Result<Matrix> {
        assert!(!blocks.is_empty(), "vstack of nothing");
        let cols = blocks[0].cols;
        let mode = blocks[0].mode();
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        for b in blocks {
            if b.cols != cols {
                return Err(CoreError::ShapeMismatch("vstack col mismatch".into()));
            }
            if b.mode() != mode {
                return Err(CoreError::ModeMismatch("vstack".into()));
            }
        }
        let mut out = Matrix::zeros(mode, rows, cols);
        let mut r0 = 0;
        for b in blocks {
            out.set_block(r0, 0, b);
            r0 += b.rows;
        }
        Ok(out)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c)).unwrap();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Matrix::zeros(self.mode(), rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c)).unwrap();
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Matrix {
        self.block(0, c, self.rows, 1)
    }

    /// If the matrix is q times the identity, returns q.
    pub fn as_scalar_multiple_of_identity(&self) -> Option<Scalar> {
        if self.rows != self.cols {
            return None;
        }
        if self.rows == 0 {
            return Some(Scalar::one(self.mode()));
        }
        let q = self.get(0, 0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let want = if r == c { q.clone() } else { Scalar::zero(self.mode()) };
                if self.get(r, c) != want {
                    return None;
                }
            }
        }
        Some(q)
    }

    // ------------------------------------------------------------------
    // Exact elimination and everything built on it.
    // ------------------------------------------------------------------

    fn exact_rows(&self) -> Vec<Vec<GaussianRational>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.entry_exact(r, c).clone()).collect())
            .collect()
    }

    pub fn rank(&self) -> Result<usize> {
        self.require_exact("rank")?;
        Ok(Elimination::run_with_width(self.exact_rows(), self.cols, self.cols).rank)
    }

    /// Columns form a basis of the kernel; `cols(result) = cols(self) - rank(self)`.
    pub fn kernel_basis(&self) -> Result<Matrix> {
        self.require_exact("kernel_basis (numeric kernels go through rank_numeric only)")?;
        let elim = Elimination::run_with_width(self.exact_rows(), self.cols, self.cols);
        Ok(elim.kernel())
    }

    pub fn det(&self) -> Result<GaussianRational> {
        self.require_exact("det")?;
        if self.rows != self.cols {
            return Err(CoreError::ShapeMismatch("det of non-square".into()));
        }
        if self.rows == 0 {
            return Ok(GaussianRational::one());
        }
        let elim = Elimination::run_with_width(self.exact_rows(), self.cols, self.cols);
        Ok(elim.det())
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(!self.det()?.is_zero())
    }

    pub fn inverse(&self) -> Result<Option<Matrix>> {
        self.require_exact("inverse")?;
        if self.rows != self.cols {
            return Err(CoreError::ShapeMismatch("inverse of non-square".into()));
        }
        self.solve(&Matrix::identity(Mode::Exact, self.rows))
    }

    /// Some X with self * X = rhs, or None if the system is inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Result<Option<Matrix>> {
        self.require_exact("solve")?;
        rhs.require_exact("solve")?;
        if self.rows != rhs.rows {
            return Err(CoreError::ShapeMismatch("solve row mismatch".into()));
        }
        let mut rows = self.exact_rows();
        for (r, row) in rows.iter_mut().enumerate() {
            for c in 0..rhs.cols {
                row.push(rhs.entry_exact(r, c).clone());
            }
        }
        let elim = Elimination::run_with_width(rows, self.cols + rhs.cols, self.cols);
        let mut out = Matrix::zeros(Mode::Exact, self.cols, rhs.cols);
        for c in 0..rhs.cols {
            match elim.back_substitute(c) {
                Some(col) => {
                    for (r, q) in col.into_iter().enumerate() {
                        out.set(r, c, Scalar::Exact(q))?;
                    }
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// The unique reduced row echelon form (plain field elimination, no
    /// column permutation). Used where a canonical representative matters,
    /// e.g. comparing subspaces.
    pub fn rref_unique(&self) -> Result<Matrix> {
        self.require_exact("rref_unique")?;
        let mut rows = self.exact_rows();
        let (nr, nc) = (self.rows, self.cols);
        let mut pivot_row = 0usize;
        for col in 0..nc {
            if pivot_row == nr {
                break;
            }
            let Some(src) = (pivot_row..nr).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, src);
            let inv = rows[pivot_row][col].inv().unwrap();
            for c in col..nc {
                rows[pivot_row][c] = rows[pivot_row][c].mul(&inv);
            }
            for r in 0..nr {
                if r == pivot_row || rows[r][col].is_zero() {
                    continue;
                }
                let f = rows[r][col].clone();
                for c in col..nc {
                    let t = rows[pivot_row][c].mul(&f);
                    rows[r][c] = rows[r][c].sub(&t);
                }
            }
            pivot_row += 1;
        }
        Ok(Matrix::from_exact_rows(rows))
    }

    /// Original columns that form a basis of the column space.
    pub fn col_space_basis(&self) -> Result<Matrix> {
        self.require_exact("col_space_basis")?;
        let elim = Elimination::run_with_width(self.exact_rows(), self.cols, self.cols);
        let mut picked: Vec<usize> = elim.col_pos[..elim.rank].to_vec();
        picked.sort_unstable();
        let mut out = Matrix::zeros(Mode::Exact, self.rows, picked.len());
        for (k, &c) in picked.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, k, self.get(r, c))?;
            }
        }
        Ok(out)
    }
}

/// Fraction-free echelon form with size-based pivoting across the whole
/// eligible block. Only the first `pivot_limit` columns may host pivots, so
/// augmented right-hand sides ride along untouched.
struct Elimination {
    u: Vec<Vec<GaussianRational>>,
    col_pos: Vec<usize>,
    rank: usize,
    nrows: usize,
    ncols: usize,
    pivot_limit: usize,
    det_sign: i64,
    row_clear: BigRational,
}

impl Elimination {
    fn run_with_width(mut rows: Vec<Vec<GaussianRational>>, ncols: usize, pivot_limit: usize) -> Self {
        let nrows = rows.len();
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        // Clear denominators row by row: multiply by the lcm of all entry
        // denominators so Bareiss division stays exact.
        let mut row_clear = BigRational::one();
        for row in rows.iter_mut() {
            let mut l = num::BigInt::one();
            for q in row.iter() {
                l = num::integer::lcm(l, q.re.denom().clone());
                l = num::integer::lcm(l, q.im.denom().clone());
            }
            let f = BigRational::from_integer(l);
            if !f.is_one() {
                let fq = GaussianRational::new(f.clone(), BigRational::zero());
                for q in row.iter_mut() {
                    *q = q.mul(&fq);
                }
                row_clear *= f;
            }
        }

        let mut col_pos: Vec<usize> = (0..ncols).collect();
        let mut det_sign = 1i64;
        let mut prev = GaussianRational::one();
        let mut k = 0usize;

        while k < nrows && k < pivot_limit {
            // Smallest nonzero entry in the remaining eligible block.
            let mut best: Option<(usize, usize, usize)> = None;
            for r in k..nrows {
                for p in k..pivot_limit {
                    let q = &rows[r][p];
                    if q.is_zero() {
                        continue;
                    }
                    let h = q.height();
                    match best {
                        Some((_, _, bh)) if bh <= h => {}
                        _ => best = Some((r, p, h)),
                    }
                }
            }
            let Some((pr, pc, _)) = best else { break };
            if pr != k {
                rows.swap(pr, k);
                det_sign = -det_sign;
            }
            if pc != k {
                for row in rows.iter_mut() {
                    row.swap(pc, k);
                }
                col_pos.swap(pc, k);
                det_sign = -det_sign;
            }
            let pivot = rows[k][k].clone();
            for r in k + 1..nrows {
                if rows[r][k].is_zero() && pivot.is_one() && prev.is_one() {
                    continue;
                }
                let lead = rows[r][k].clone();
                for c in k..ncols {
                    let t = pivot.mul(&rows[r][c]).sub(&lead.mul(&rows[k][c]));
                    rows[r][c] = t.div(&prev).expect("fraction-free division is exact");
                }
            }
            prev = pivot;
            k += 1;
        }

        Self {
            u: rows,
            col_pos,
            rank: k,
            nrows,
            ncols,
            pivot_limit,
            det_sign,
            row_clear,
        }
    }

    fn det(&self) -> GaussianRational {
        if self.rank < self.pivot_limit.min(self.nrows) || self.nrows != self.pivot_limit {
            return GaussianRational::zero();
        }
        if self.rank == 0 {
            return GaussianRational::one();
        }
        let last = self.u[self.rank - 1][self.rank - 1].clone();
        let sign = GaussianRational::from_integer(self.det_sign);
        let scale = GaussianRational::new(self.row_clear.clone(), BigRational::zero());
        last.mul(&sign).div(&scale).unwrap()
    }

    fn kernel(&self) -> Matrix {
        let n = self.pivot_limit;
        let free: Vec<usize> = (self.rank..n).collect();
        let mut out = Matrix::zeros(Mode::Exact, n, free.len());
        for (j, &f) in free.iter().enumerate() {
            let mut y = vec![GaussianRational::zero(); n];
            y[f] = GaussianRational::one();
            for k in (0..self.rank).rev() {
                let mut s = GaussianRational::zero();
                for c in k + 1..n {
                    if !y[c].is_zero() {
                        s = s.add(&self.u[k][c].mul(&y[c]));
                    }
                }
                y[k] = s.neg().div(&self.u[k][k]).unwrap();
            }
            for (pos, q) in y.into_iter().enumerate() {
                out.set(self.col_pos[pos], j, Scalar::Exact(q)).unwrap();
            }
        }
        out
    }

    /// Particular solution for augmented column `c` (free variables zero),
    /// or None if inconsistent.
    fn back_substitute(&self, c: usize) -> Option<Vec<GaussianRational>> {
        let n = self.pivot_limit;
        let rc = n + c;
        assert!(rc < self.ncols, "no such augmented column");
        for r in self.rank..self.nrows {
            if !self.u[r][rc].is_zero() {
                return None;
            }
        }
        let mut y = vec![GaussianRational::zero(); n];
        for k in (0..self.rank).rev() {
            let mut s = self.u[k][rc].clone();
            for j in k + 1..n {
                if !y[j].is_zero() {
                    s = s.sub(&self.u[k][j].mul(&y[j]));
                }
            }
            y[k] = s.div(&self.u[k][k]).unwrap();
        }
        let mut x = vec![GaussianRational::zero(); n];
        for (pos, q) in y.into_iter().enumerate() {
            x[self.col_pos[pos]] = q;
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qi(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let m = Matrix::identity(Mode::Exact, 2);
        let k = m.kernel_basis().unwrap();
        assert_eq!((k.rows(), k.cols()), (2, 0));
    }

    #[test]
    fn kernel_of_row_vector() {
        // x + y = 0 has kernel spanned by (1, -1).
        let m = Matrix::from_int_rows(&[&[1, 1]]);
        let k = m.kernel_basis().unwrap();
        assert_eq!((k.rows(), k.cols()), (2, 1));
        let a = k.entry_exact(0, 0).clone();
        let b = k.entry_exact(1, 0).clone();
        assert!(!a.is_zero());
        assert_eq!(a.neg(), b);
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let m = Matrix::zeros(Mode::Exact, 2, 2);
        let k = m.kernel_basis().unwrap();
        assert_eq!(k.cols(), 2);
        assert_eq!(k.rank().unwrap(), 2);
    }

    #[test]
    fn kernel_refuses_float() {
        let m = Matrix::zeros(Mode::Float, 2, 2);
        assert!(matches!(m.kernel_basis(), Err(CoreError::ExactModeRequired(_))));
    }

    #[test]
    fn empty_shapes() {
        let a = Matrix::zeros(Mode::Exact, 3, 0);
        let b = Matrix::zeros(Mode::Exact, 0, 2);
        let p = a.mul(&b).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert!(p.is_zero());
        assert_eq!(a.rank().unwrap(), 0);
        assert_eq!(b.kernel_basis().unwrap().cols(), 2);
        assert_eq!(Matrix::identity(Mode::Exact, 0).det().unwrap(), GaussianRational::one());
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::from_exact_rows(vec![
            vec![qi(1, 2), qi(1, 3)],
            vec![qi(1, 5), qi(1, 7)],
        ]);
        // det = 1/14 - 1/15 = 1/210
        assert_eq!(m.det().unwrap(), qi(1, 210));
        let inv = m.inverse().unwrap().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.det().unwrap(), GaussianRational::zero());
        assert!(m.inverse().unwrap().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let good = Matrix::from_int_rows(&[&[1], &[2]]);
        let bad = Matrix::from_int_rows(&[&[1], &[3]]);
        let x = a.solve(&good).unwrap().unwrap();
        assert_eq!(a.mul(&x).unwrap(), good);
        assert!(a.solve(&bad).unwrap().is_none());
    }

    #[test]
    fn col_space_basis_spans() {
        let m = Matrix::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]);
        let b = m.col_space_basis().unwrap();
        assert_eq!(b.cols(), 2);
        assert_eq!(b.rank().unwrap(), 2);
    }

    #[test]
    fn complex_entries_work() {
        let i = GaussianRational::i();
        let m = Matrix::from_exact_rows(vec![
            vec![GaussianRational::one(), i.clone()],
            vec![i.neg(), GaussianRational::one()],
        ]);
        // det = 1 - (i)(-i) = 1 - 1 = 0
        assert!(m.det().unwrap().is_zero());
        assert_eq!(m.rank().unwrap(), 1);
        let k = m.kernel_basis().unwrap();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).unwrap().is_zero());
    }

    fn arb_rational() -> impl Strategy<Value = GaussianRational> {
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3)
            .prop_map(|(p, q, r, s)| GaussianRational::from_parts(p, q, r, s))
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            proptest::collection::vec(arb_rational(), r * c).prop_map(move |entries| {
                let mut it = entries.into_iter();
                Matrix::from_fn_exact(r, c, |_, _| it.next().unwrap())
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_nullity_holds(m in arb_matrix(5)) {
            let k = m.kernel_basis().unwrap();
            prop_assert_eq!(k.cols() + m.rank().unwrap(), m.cols());
            prop_assert!(m.mul(&k).unwrap().is_zero());
            // Kernel columns are independent.
            prop_assert_eq!(k.rank().unwrap(), k.cols());
        }

        #[test]
        fn solve_returns_actual_solutions(m in arb_matrix(4), seed in proptest::collection::vec(arb_rational(), 4)) {
            // Build a consistent rhs from a known solution.
            let x = Matrix::from_fn_exact(m.cols(), 1, |r, _| seed[r % seed.len()].clone());
            let rhs = m.mul(&x).unwrap();
            let sol = m.solve(&rhs).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.mul(&sol).unwrap(), rhs);
        }

        #[test]
        fn det_is_multiplicative(
            av in proptest::collection::vec(arb_rational(), 9),
            bv in proptest::collection::vec(arb_rational(), 9),
        ) {
            let a = Matrix::from_fn_exact(3, 3, |r, c| av[3 * r + c].clone());
            let b = Matrix::from_fn_exact(3, 3, |r, c| bv[3 * r + c].clone());
            let lhs = a.mul(&b).unwrap().det().unwrap();
            let rhs = a.det().unwrap().mul(&b.det().unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
