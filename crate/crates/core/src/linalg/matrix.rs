use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::field::{FieldSpec, Scalar};
use super::rational::Rational;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Dense matrix over an exact field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Structured text form: field tag, dims, entries as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRecord {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl From<Matrix> for MatrixRecord {
    fn from(m: Matrix) -> Self {
        MatrixRecord {
            field: m.field,
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TryFrom<MatrixRecord> for Matrix {
    type Error = Error;

    fn try_from(r: MatrixRecord) -> Result<Self> {
        if r.entries.len() != r.rows * r.cols {
            return Err(Error::Parse(format!(
                "matrix record has {} entries, expected {}x{}",
                r.entries.len(),
                r.rows,
                r.cols
            )));
        }
        let data = r
            .entries
            .iter()
            .map(|s| r.field.parse_scalar(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix {
            field: r.field,
            rows: r.rows,
            cols: r.cols,
            data,
        })
    }
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_scalars(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
    ) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| !field.contains(s)) {
            return Err(Error::InvalidField(format!(
                "entry {bad} is not an element of {field}"
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Integer matrix given by rows; panics on ragged input.
    pub fn from_i64_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| field.from_i64(x)));
        }
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn diag_i64(field: FieldSpec, diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = field.from_i64(d);
        }
        m
    }

    /// Permutation matrix sending basis vector `j` to basis vector `perm[j]`.
    pub fn permutation(field: FieldSpec, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.data[i * n + j] = field.one();
        }
        m
    }

    pub fn column(field: FieldSpec, entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        Matrix {
            field,
            rows: n,
            cols: 1,
            data: entries,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert!(self.field.contains(&v));
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|s| !s.is_zero()).count()
    }

    fn check_same_shape(&self, other: &Matrix, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {}x{} over {} vs {}x{} over {}",
                self.rows, self.cols, self.field, other.rows, other.cols, other.field
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other, "add")?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.add(a, b))
            .collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other, "sub")?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.sub(a, b))
            .collect();
        Ok(Matrix { data, ..*self })
    }

    /// Panicking add for internal use where shapes are known to agree.
    pub fn add(&self, other: &Matrix) -> Matrix {
        self.try_add(other).expect("matrix add")
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.try_sub(other).expect("matrix sub")
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix add_assign shape"
        );
        let f = self.field;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a = f.add(a, b);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Matrix { data, ..*self }
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|a| f.neg(a)).collect();
        Matrix { data, ..*self }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field == FieldSpec::Rationals {
            if let Some(m) = self.mul_scaled(other) {
                return Ok(m);
            }
            return Ok(self.mul_scaled_big(other));
        }
        let f = self.field;
        let n = other.cols;
        // Sparse rows of the right factor; permutation and block matrices are common.
        let support: Vec<Vec<usize>> = (0..other.rows)
            .map(|k| (0..n).filter(|&j| !other.get(k, j).is_zero()).collect())
            .collect();
        let mut out = Matrix::zeros(f, self.rows, n);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                if a.is_one() {
                    for &j in &support[k] {
                        out_row[j] = f.add(&out_row[j], &b_row[j]);
                    }
                } else {
                    for &j in &support[k] {
                        f.add_mul_assign(&mut out_row[j], a, &b_row[j]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rational product computed on integer matrices after clearing
    /// denominators: `i64` first, `i128` if that overflows, `None` if even
    /// that does.
    fn mul_scaled(&self, other: &Matrix) -> Option<Matrix> {
        let (da, a) = scaled_integers(&self.data)?;
        let (db, b) = scaled_integers(&other.data)?;
        let (k, n) = (self.cols, other.cols);
        let wide = |v: &[i64]| v.iter().map(|&x| i128::from(x)).collect::<Vec<_>>();
        let acc = match integer_product(&a, &b, self.rows, k, n) {
            Some(narrow) => wide(&narrow),
            None => integer_product(&wide(&a), &wide(&b), self.rows, k, n)?,
        };
        let denom = i128::from(da) * i128::from(db);
        let data = acc
            .into_iter()
            .map(|v| Scalar::Rat(Rational::from_i128(v, denom)))
            .collect();
        Some(Matrix {
            field: self.field,
            rows: self.rows,
            cols: n,
            data,
        })
    }

    /// Rational product for entries too large for `mul_scaled`: rows of
    /// `self` and columns of `other` are cleared of denominators separately,
    /// dot products run on big integers and each entry is reduced once.
    fn mul_scaled_big(&self, other: &Matrix) -> Matrix {
        let big = |s: &Scalar| match s {
            Scalar::Rat(r) => r.to_big(),
            Scalar::Mod(..) => unreachable!("rational matrix holds a residue"),
        };
        let clear = |entries: Vec<BigRational>| {
            let lcm = entries.iter().fold(BigInt::one(), |l, e| l.lcm(e.denom()));
            let ints = entries
                .iter()
                .map(|e| e.numer() * (&lcm / e.denom()))
                .collect::<Vec<_>>();
            (lcm, ints)
        };
        let rows: Vec<(BigInt, Vec<BigInt>)> = (0..self.rows)
            .map(|i| clear(self.row(i).iter().map(big).collect()))
            .collect();
        let cols: Vec<(BigInt, Vec<BigInt>)> = (0..other.cols)
            .map(|j| clear((0..other.rows).map(|k| big(other.get(k, j))).collect()))
            .collect();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for (la, a) in &rows {
            for (lb, b) in &cols {
                let mut acc = BigInt::zero();
                for (x, y) in a.iter().zip(b) {
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                data.push(Scalar::Rat(Rational::from_big(BigRational::new(
                    acc,
                    la * lb,
                ))));
            }
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix mul")
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "mul_vec length");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        f.add_mul_assign(&mut acc, a, b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.field != other.field {
            return Err(Error::DimensionMismatch("hstack".into()));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols || self.field != other.field {
            return Err(Error::DimensionMismatch("vstack".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn vstack_all(field: FieldSpec, cols: usize, parts: &[&Matrix]) -> Result<Matrix> {
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.data.len()).sum());
        for p in parts {
            if p.cols != cols || p.field != field {
                return Err(Error::DimensionMismatch("vstack_all".into()));
            }
            data.extend_from_slice(&p.data);
        }
        Ok(Matrix {
            field,
            rows: parts.iter().map(|p| p.rows).sum(),
            cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            field: self.field,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j).clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + cols]);
        }
        Matrix {
            field: self.field,
            rows,
            cols,
            data,
        }
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        if self.field == FieldSpec::Rationals {
            if let Some(done) = self.rref_integer() {
                return done;
            }
        }
        self.rref_generic()
    }

    /// Fraction-free Gauss–Jordan on integer rows (each scaled by its own
    /// denominators, and divided by its content after every update); `None`
    /// once anything leaves `i128`.
    fn rref_integer(&self) -> Option<(Matrix, Vec<usize>)> {
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<i128> = Vec::with_capacity(m * n);
        for i in 0..m {
            a.extend(scaled_integers(self.row(i))?.1.into_iter().map(i128::from));
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| a[i * n + c] != 0) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    a.swap(p * n + j, r * n + j);
                }
            }
            let pv = a[r * n + c];
            for i in 0..m {
                let x = a[i * n + c];
                if i == r || x == 0 {
                    continue;
                }
                let g = pv.gcd(&x);
                let (s, t) = (pv / g, x / g);
                let mut content = 0i128;
                for j in 0..n {
                    let v = a[i * n + j]
                        .checked_mul(s)?
                        .checked_sub(a[r * n + j].checked_mul(t)?)?;
                    a[i * n + j] = v;
                    content = content.gcd(&v);
                }
                if content > 1 {
                    for v in &mut a[i * n..(i + 1) * n] {
                        *v /= content;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let data = (0..m * n)
            .map(|k| {
                let i = k / n;
                Scalar::Rat(match pivots.get(i) {
                    Some(&c) => Rational::from_i128(a[k], a[i * n + c]),
                    None => Rational::zero(),
                })
            })
            .collect();
        Some((
            Matrix {
                field: self.field,
                rows: m,
                cols: n,
                data,
            },
            pivots,
        ))
    }

    fn rref_generic(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let (m, n) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i * n + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    a.swap(p * n + j, r * n + j);
                }
            }
            let inv = f.inv(&a[r * n + c]).expect("pivot is non-zero");
            for j in c..n {
                if !a[r * n + j].is_zero() {
                    a[r * n + j] = f.mul(&a[r * n + j], &inv);
                }
            }
            let pivot_support: Vec<usize> = (c..n).filter(|&j| !a[r * n + j].is_zero()).collect();
            let pivot_row: Vec<Scalar> = pivot_support
                .iter()
                .map(|&j| a[r * n + j].clone())
                .collect();
            for i in 0..m {
                if i == r || a[i * n + c].is_zero() {
                    continue;
                }
                let factor = f.neg(&a[i * n + c]);
                for (&j, pv) in pivot_support.iter().zip(&pivot_row) {
                    f.add_mul_assign(&mut a[i * n + j], &factor, pv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (
            Matrix {
                field: f,
                rows: m,
                cols: n,
                data: a,
            },
            pivots,
        )
    }

    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_rows(&self.transpose())
    }

    /// Null space `{x : self * x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let n = self.cols;
        let f = self.field;
        let (r, pivots) = self.rref_with_pivots();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![f.zero(); n];
            v[free] = f.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(row, free));
            }
            basis.extend(v);
        }
        let k = basis.len() / n.max(1);
        let spanning = Matrix {
            field: f,
            rows: if n == 0 { 0 } else { k },
            cols: n,
            data: basis,
        };
        Subspace::from_rows(&spanning)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return Err(Error::Singular);
        }
        Ok(r.block(0, n, n, n))
    }

    pub fn is_idempotent(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        Ok(&self.mul(self) == self)
    }

    /// `self * other == other * self`.
    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self.mul(other) == other.mul(self)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}


/// Common denominator and the integer numerators over it, when everything
/// fits in `i64`.
fn scaled_integers(data: &[Scalar]) -> Option<(i64, Vec<i64>)> {
    let mut lcm: i64 = 1;
    for s in data {
        let Scalar::Rat(r) = s else { return None };
        let (_, d) = r.as_small()?;
        if d != 1 {
            lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
        }
    }
    data.iter()
        .map(|s| {
            let Scalar::Rat(r) = s else { return None };
            let (n, d) = r.as_small()?;
            n.checked_mul(lcm / d)
        })
        .collect::<Option<Vec<_>>>()
        .map(|v| (lcm, v))
}

/// Row-major `a (rows × k)` times `b (k × n)` with overflow checks.
fn integer_product<T>(a: &[T], b: &[T], rows: usize, k: usize, n: usize) -> Option<Vec<T>>
where
    T: Copy + Default + PartialEq + num_traits::CheckedMul + num_traits::CheckedAdd,
{
    let zero = T::default();
    let mut acc = vec![zero; rows * n];
    for i in 0..rows {
        let out_row = &mut acc[i * n..(i + 1) * n];
        for t in 0..k {
            let x = a[i * k + t];
            if x == zero {
                continue;
            }
            for (o, y) in out_row.iter_mut().zip(&b[t * n..(t + 1) * n]) {
                if *y != zero {
                    *o = o.checked_add(&x.checked_mul(y)?)?;
                }
            }
        }
    }
    Some(acc)
}
