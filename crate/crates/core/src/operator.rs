//! Dense operators on labeled tensor-product Hilbert spaces.
//!
//! A [`SpaceLayout`] is an ordered list of `(label, dim)` factors. The basis of
//! the full space is the Kronecker basis with the first factor most
//! significant, so an operator `A` on `("atom", 2)` embedded into
//! `[("atom", 2), ("mode", 3)]` becomes `A ⊗ I₃`.
//!
//! [`OpArray`] holds an `rows × cols` array of operators on one layout, stored
//! as a single `(rows·d) × (cols·d)` matrix whose `(j, k)` block is the entry
//! `X_jk`. Products of arrays are then plain matrix products.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for structural predicates and operator equality.
pub const EPS: f64 = 1e-10;

/// Reciprocal 1-norm condition number below which a matrix is treated as singular.
pub const RCOND_MIN: f64 = 1e-12;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry modulus of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(X - X†) / 2i`.
pub fn im_part_matrix(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Inverse with singularity detection.
///
/// A matrix is rejected when LU fails, when it is numerically zero, or when
/// its reciprocal 1-norm condition number falls below [`RCOND_MIN`].
pub fn invert_matrix(m: &CMatrix, context: &str) -> Result<CMatrix> {
    assert!(m.is_square(), "invert of a non-square matrix");
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let singular = || Error::SingularMatrix {
        context: context.to_string(),
    };
    let norm = norm1(m);
    if !(norm > EPS) {
        return Err(singular());
    }
    let inv = m.clone().lu().try_inverse().ok_or_else(singular)?;
    let rcond = 1.0 / (norm * norm1(&inv));
    if !rcond.is_finite() || rcond < RCOND_MIN {
        return Err(singular());
    }
    Ok(inv)
}

pub fn is_unitary_matrix(m: &CMatrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

/// `‖X†X − I‖_max`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

/// `‖X − X†‖_max`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor factorization of a Hilbert space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    /// The one-dimensional space with no factors.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out = Self::empty();
        for (label, dim) in factors {
            out.push(label.into(), dim)?;
        }
        Ok(out)
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    fn push(&mut self, label: String, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "factor `{label}` has dimension 0"
            )));
        }
        if self.position(&label).is_some() {
            return Err(Error::DimensionMismatch(format!(
                "factor `{label}` declared twice"
            )));
        }
        self.factors.push(Factor { label, dim });
        Ok(())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn factor_dim(&self, label: &str) -> Option<usize> {
        self.position(label).map(|p| self.factors[p].dim)
    }

    /// Factors of `self` followed by the factors of `other` not already present.
    pub fn merge(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        let mut out = self.clone();
        for f in &other.factors {
            match out.factor_dim(&f.label) {
                Some(d) if d == f.dim => {}
                Some(d) => {
                    return Err(Error::DimensionMismatch(format!(
                        "factor `{}` has dimension {} and {}",
                        f.label, d, f.dim
                    )))
                }
                None => out.factors.push(f.clone()),
            }
        }
        Ok(out)
    }

    /// Checks that every factor of `sub` appears in `self` with the same dimension.
    pub fn check_contains(&self, sub: &SpaceLayout) -> Result<()> {
        for f in &sub.factors {
            match self.factor_dim(&f.label) {
                None => return Err(Error::UnknownLabel(f.label.clone())),
                Some(d) if d != f.dim => {
                    return Err(Error::DimensionMismatch(format!(
                        "factor `{}`: dimension {} in operator, {} in target",
                        f.label, f.dim, d
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Layout with one factor removed.
    pub fn without(&self, label: &str) -> SpaceLayout {
        SpaceLayout {
            factors: self
                .factors
                .iter()
                .filter(|f| f.label != label)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}[{}]", x.label, x.dim))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

/// For every basis index of `to`, the index into `from` and the index over the
/// remaining factors.
fn split_indices(from: &SpaceLayout, to: &SpaceLayout) -> Result<(Vec<usize>, Vec<usize>)> {
    to.check_contains(from)?;
    let dims: Vec<usize> = to.factors.iter().map(|f| f.dim).collect();
    let n = dims.len();

    // stride of each target factor inside the sub index and the rest index
    let mut sub_stride = vec![0usize; n];
    let mut stride = 1;
    for f in from.factors.iter().rev() {
        let p = to.position(&f.label).expect("checked above");
        sub_stride[p] = stride;
        stride *= f.dim;
    }
    let mut rest_stride = vec![0usize; n];
    let mut stride = 1;
    for p in (0..n).rev() {
        if from.position(&to.factors[p].label).is_none() {
            rest_stride[p] = stride;
            stride *= dims[p];
        }
    }

    let total = to.dim();
    let mut sub = Vec::with_capacity(total);
    let mut rest = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        let (mut s, mut r) = (0, 0);
        for p in 0..n {
            s += digits[p] * sub_stride[p];
            r += digits[p] * rest_stride[p];
        }
        sub.push(s);
        rest.push(r);
        for p in (0..n).rev() {
            digits[p] += 1;
            if digits[p] < dims[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    Ok((sub, rest))
}

/// Tensor `m` (an operator on `from`) with the identity on every factor of `to`
/// missing from `from`.
pub fn embed_matrix(m: &CMatrix, from: &SpaceLayout, to: &SpaceLayout) -> Result<CMatrix> {
    if from == to {
        return Ok(m.clone());
    }
    let (sub, rest) = split_indices(from, to)?;
    let d = to.dim();
    Ok(CMatrix::from_fn(d, d, |r, c| {
        if rest[r] == rest[c] {
            m[(sub[r], sub[c])]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Embed each `d × d` block of a block array.
fn embed_blocks(
    m: &CMatrix,
    rows: usize,
    cols: usize,
    from: &SpaceLayout,
    to: &SpaceLayout,
) -> Result<CMatrix> {
    if from == to {
        return Ok(m.clone());
    }
    let (df, dt) = (from.dim(), to.dim());
    let mut out = CMatrix::zeros(rows * dt, cols * dt);
    for j in 0..rows {
        for k in 0..cols {
            let block = m.view((j * df, k * df), (df, df)).into_owned();
            out.view_mut((j * dt, k * dt), (dt, dt))
                .copy_from(&embed_matrix(&block, from, to)?);
        }
    }
    Ok(out)
}

/// A linear operator on the space described by its layout.
#[derive(Clone, Debug)]
pub struct Operator {
    layout: SpaceLayout,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(layout: SpaceLayout, matrix: CMatrix) -> Result<Self> {
        let d = layout.dim();
        if matrix.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, layout {} has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                layout,
                d
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// Operator on a single factor.
    pub fn on(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        let layout = SpaceLayout::single(label, matrix.nrows())?;
        Self::new(layout, matrix)
    }

    pub fn identity(layout: &SpaceLayout) -> Self {
        let d = layout.dim();
        Self {
            layout: layout.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(layout: &SpaceLayout) -> Self {
        let d = layout.dim();
        Self {
            layout: layout.clone(),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn scalar(layout: &SpaceLayout, c: Complex64) -> Self {
        Self::identity(layout) * c
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `Im X = (X − X†)/2i`, always Hermitian.
    pub fn im_part(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: im_part_matrix(&self.matrix),
        }
    }

    pub fn invert(&self) -> Result<Self> {
        self.invert_with_context("operator")
    }

    /// Inverse; on failure the error carries `context` (e.g. `"I − S_ii"`).
    pub fn invert_with_context(&self, context: &str) -> Result<Self> {
        Ok(Self {
            layout: self.layout.clone(),
            matrix: invert_matrix(&self.matrix, context)?,
        })
    }

    pub fn is_unitary(&self) -> bool {
        is_unitary_matrix(&self.matrix, EPS)
    }

    pub fn is_hermitian(&self) -> bool {
        hermiticity_deviation(&self.matrix) <= EPS
    }

    /// Max-abs entry difference; infinite when the layouts differ.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.layout != other.layout {
            return f64::INFINITY;
        }
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn embed(&self, target: &SpaceLayout) -> Result<Self> {
        Ok(Self {
            layout: target.clone(),
            matrix: embed_matrix(&self.matrix, &self.layout, target)?,
        })
    }

    /// `self ⊗ other` on the concatenated layout. The layouts must be disjoint.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
        let mut layout = self.layout.clone();
        for f in other.layout.factors() {
            layout.push(f.label.clone(), f.dim)?;
        }
        Ok(Self {
            layout,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// The operator `⟨row| X |col⟩` on the remaining factors, where the bra
    /// and ket act on factor `label` only.
    pub fn partial_element(&self, label: &str, row: usize, col: usize) -> Result<Self> {
        let dim = self
            .layout
            .factor_dim(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        if row >= dim || col >= dim {
            return Err(Error::DimensionMismatch(format!(
                "index ({row}, {col}) outside factor `{label}` of dimension {dim}"
            )));
        }
        let single = SpaceLayout::single(label, dim)?;
        let rest_layout = self.layout.without(label);
        let (sub, rest) = split_indices(&single, &self.layout)?;
        let dr = rest_layout.dim();
        let mut out = CMatrix::zeros(dr, dr);
        for r in 0..self.dim() {
            if sub[r] != row {
                continue;
            }
            for c in 0..self.dim() {
                if sub[c] == col {
                    out[(rest[r], rest[c])] = self.matrix[(r, c)];
                }
            }
        }
        Self::new(rest_layout, out)
    }
}

fn assert_same_layout(a: &SpaceLayout, b: &SpaceLayout) {
    assert!(a == b, "operator layouts differ: {a} vs {b}");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_same_layout(&self.layout, &rhs.layout);
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_same_layout(&self.layout, &rhs.layout);
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_same_layout(&self.layout, &rhs.layout);
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Mul<Complex64> for Operator {
    type Output = Operator;
    fn mul(mut self, rhs: Complex64) -> Operator {
        self.matrix *= rhs;
        self
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self * Complex64::new(rhs, 0.0)
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self * -1.0
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Operator {
            type Output = Operator;
            fn $m(self, rhs: Operator) -> Operator {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $m(self, rhs: &Operator) -> Operator {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A `rows × cols` array of operators on one layout.
#[derive(Clone, Debug)]
pub struct OpArray {
    layout: SpaceLayout,
    rows: usize,
    cols: usize,
    data: CMatrix,
}

impl OpArray {
    pub fn new(layout: SpaceLayout, rows: usize, cols: usize, data: CMatrix) -> Result<Self> {
        let d = layout.dim();
        if data.shape() != (rows * d, cols * d) {
            return Err(Error::DimensionMismatch(format!(
                "block data is {}x{}, expected {}x{} blocks of dimension {}",
                data.nrows(),
                data.ncols(),
                rows,
                cols,
                d
            )));
        }
        Ok(Self {
            layout,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(layout: &SpaceLayout, rows: usize, cols: usize) -> Self {
        let d = layout.dim();
        Self {
            layout: layout.clone(),
            rows,
            cols,
            data: CMatrix::zeros(rows * d, cols * d),
        }
    }

    pub fn identity(layout: &SpaceLayout, n: usize) -> Self {
        let d = layout.dim();
        Self {
            layout: layout.clone(),
            rows: n,
            cols: n,
            data: CMatrix::identity(n * d, n * d),
        }
    }

    /// The array whose `(j, k)` entry is `c_jk · I`.
    pub fn from_scalars(layout: &SpaceLayout, c: &CMatrix) -> Self {
        let d = layout.dim();
        Self {
            layout: layout.clone(),
            rows: c.nrows(),
            cols: c.ncols(),
            data: c.kronecker(&CMatrix::identity(d, d)),
        }
    }

    /// Builds an array from entries that all live on `layout`.
    pub fn from_entries(layout: &SpaceLayout, cols: usize, entries: &[Vec<Operator>]) -> Result<Self> {
        let mut out = Self::zeros(layout, entries.len(), cols);
        let d = layout.dim();
        for (j, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {j} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (k, op) in row.iter().enumerate() {
                if op.layout() != layout {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({j}, {k}) lives on {}, expected {layout}",
                        op.layout()
                    )));
                }
                out.data.view_mut((j * d, k * d), (d, d)).copy_from(op.matrix());
            }
        }
        Ok(out)
    }

    /// Column array `[X_1; …; X_n]`.
    pub fn column(layout: &SpaceLayout, entries: &[Operator]) -> Result<Self> {
        let rows: Vec<Vec<Operator>> = entries.iter().map(|e| vec![e.clone()]).collect();
        Self::from_entries(layout, 1, &rows)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The underlying `(rows·d) × (cols·d)` matrix.
    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn entry(&self, j: usize, k: usize) -> Operator {
        assert!(j < self.rows && k < self.cols, "entry out of range");
        let d = self.layout.dim();
        Operator {
            layout: self.layout.clone(),
            matrix: self.data.view((j * d, k * d), (d, d)).into_owned(),
        }
    }

    /// Interprets a `1 × 1` array as an operator.
    pub fn to_operator(&self) -> Operator {
        assert!(self.rows == 1 && self.cols == 1, "not a 1x1 operator array");
        self.entry(0, 0)
    }

    pub fn from_operator(op: &Operator) -> Self {
        Self {
            layout: op.layout.clone(),
            rows: 1,
            cols: 1,
            data: op.matrix.clone(),
        }
    }

    /// Sub-array with the given block rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> OpArray {
        let d = self.layout.dim();
        let mut out = Self::zeros(&self.layout, rows.len(), cols.len());
        for (jo, &j) in rows.iter().enumerate() {
            for (ko, &k) in cols.iter().enumerate() {
                out.data
                    .view_mut((jo * d, ko * d), (d, d))
                    .copy_from(&self.data.view((j * d, k * d), (d, d)));
            }
        }
        out
    }

    pub fn block_diag(parts: &[OpArray]) -> Result<OpArray> {
        let layout = parts
            .first()
            .map(|p| p.layout.clone())
            .unwrap_or_default();
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(&layout, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            if p.layout != layout {
                return Err(Error::DimensionMismatch("block_diag of mixed layouts".into()));
            }
            out.data
                .view_mut((r0, c0), p.data.shape())
                .copy_from(&p.data);
            r0 += p.data.nrows();
            c0 += p.data.ncols();
        }
        Ok(out)
    }

    pub fn vstack(parts: &[OpArray]) -> Result<OpArray> {
        let layout = parts
            .first()
            .map(|p| p.layout.clone())
            .unwrap_or_default();
        let cols = parts.first().map(|p| p.cols).unwrap_or(0);
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(&layout, rows, cols);
        let mut r0 = 0;
        for p in parts {
            if p.layout != layout || p.cols != cols {
                return Err(Error::DimensionMismatch("vstack of incompatible arrays".into()));
            }
            out.data.view_mut((r0, 0), p.data.shape()).copy_from(&p.data);
            r0 += p.data.nrows();
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> OpArray {
        Self {
            layout: self.layout.clone(),
            rows: self.cols,
            cols: self.rows,
            data: self.data.adjoint(),
        }
    }

    pub fn im_part(&self) -> OpArray {
        assert_eq!(self.rows, self.cols, "Im of a non-square array");
        Self {
            layout: self.layout.clone(),
            rows: self.rows,
            cols: self.cols,
            data: im_part_matrix(&self.data),
        }
    }

    /// Inverse as an operator on `h ⊗ C^n`.
    pub fn invert(&self, context: &str) -> Result<OpArray> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square array");
        Ok(Self {
            layout: self.layout.clone(),
            rows: self.rows,
            cols: self.cols,
            data: invert_matrix(&self.data, context)?,
        })
    }

    pub fn scale(&self, c: Complex64) -> OpArray {
        Self {
            layout: self.layout.clone(),
            rows: self.rows,
            cols: self.cols,
            data: &self.data * c,
        }
    }

    pub fn is_unitary(&self) -> bool {
        self.rows == self.cols && is_unitary_matrix(&self.data, EPS)
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && hermiticity_deviation(&self.data) <= EPS
    }

    pub fn max_abs_diff(&self, other: &OpArray) -> f64 {
        if self.layout != other.layout || self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn embed(&self, target: &SpaceLayout) -> Result<OpArray> {
        Ok(Self {
            layout: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: embed_blocks(&self.data, self.rows, self.cols, &self.layout, target)?,
        })
    }

    /// If every entry is a scalar multiple of the identity (within `tol`),
    /// returns the scalar matrix.
    pub fn scalar_part(&self, tol: f64) -> Option<CMatrix> {
        let d = self.layout.dim();
        let c = CMatrix::from_fn(self.rows, self.cols, |j, k| self.data[(j * d, k * d)]);
        (max_abs_diff(&Self::from_scalars(&self.layout, &c).data, &self.data) <= tol).then_some(c)
    }
}

fn assert_compatible(a: &OpArray, b: &OpArray) {
    assert_same_layout(&a.layout, &b.layout);
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "array shapes differ: {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
}

impl Add for &OpArray {
    type Output = OpArray;
    fn add(self, rhs: &OpArray) -> OpArray {
        assert_compatible(self, rhs);
        OpArray {
            data: &self.data + &rhs.data,
            ..self.clone()
        }
    }
}

impl Sub for &OpArray {
    type Output = OpArray;
    fn sub(self, rhs: &OpArray) -> OpArray {
        assert_compatible(self, rhs);
        OpArray {
            data: &self.data - &rhs.data,
            ..self.clone()
        }
    }
}

impl Mul for &OpArray {
    type Output = OpArray;
    fn mul(self, rhs: &OpArray) -> OpArray {
        assert_same_layout(&self.layout, &rhs.layout);
        assert_eq!(self.cols, rhs.rows, "arrays are not composable");
        OpArray {
            layout: self.layout.clone(),
            rows: self.rows,
            cols: rhs.cols,
            data: &self.data * &rhs.data,
        }
    }
}
