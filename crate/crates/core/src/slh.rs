//! SLH models, their Stratonovich (E-matrix) form, and the Cayley transform
//! between the two.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    hermiticity_deviation, unitarity_deviation, OpArray, Operator, SpaceLayout, EPS, I,
};

/// Ordered, unique port labels. Labels are the join keys for composition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PortSet {
    labels: Vec<String>,
}

impl PortSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut out = Self::default();
        for l in labels {
            let l = l.into();
            if out.labels.contains(&l) {
                return Err(Error::DuplicatePortLabel(l));
            }
            out.labels.push(l);
        }
        Ok(out)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `prefix.0`, `prefix.1`, …
    pub fn numbered(prefix: &str, n: usize) -> Self {
        Self {
            labels: (0..n).map(|k| format!("{prefix}.{k}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPort(label.to_string()))
    }

    pub fn subset(&self, idx: &[usize]) -> PortSet {
        Self {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// A Markovian open component `(S, L, H)`. With no ports it is the closed
/// system `(−, −, H)`.
#[derive(Clone, Debug)]
pub struct SLHModel {
    ports: PortSet,
    s: OpArray,
    l: OpArray,
    h: Operator,
}

impl SLHModel {
    /// Checks shapes and layouts only; use [`SLHModel::validate`] for the
    /// unitarity and Hermiticity invariants.
    pub fn new(ports: PortSet, s: OpArray, l: OpArray, h: Operator) -> Result<Self> {
        let n = ports.len();
        if s.rows() != n || s.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "S is {}x{} for {n} ports",
                s.rows(),
                s.cols()
            )));
        }
        if l.rows() != n || l.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "L is {}x{} for {n} ports",
                l.rows(),
                l.cols()
            )));
        }
        if s.layout() != h.layout() || l.layout() != h.layout() {
            return Err(Error::DimensionMismatch(
                "S, L and H must share one layout".into(),
            ));
        }
        Ok(Self { ports, s, l, h })
    }

    /// Model whose scattering entries are scalars times the identity.
    pub fn with_scalar_s(
        ports: PortSet,
        s: &crate::operator::CMatrix,
        l: &[Operator],
        h: Operator,
    ) -> Result<Self> {
        let layout = h.layout().clone();
        let s = OpArray::from_scalars(&layout, s);
        let l = OpArray::column(&layout, l)?;
        Self::new(ports, s, l, h)
    }

    pub fn closed(h: Operator) -> Self {
        let layout = h.layout().clone();
        Self {
            ports: PortSet::empty(),
            s: OpArray::zeros(&layout, 0, 0),
            l: OpArray::zeros(&layout, 0, 1),
            h,
        }
    }

    pub fn ports(&self) -> &PortSet {
        &self.ports
    }

    pub fn n_ports(&self) -> usize {
        self.ports.len()
    }

    pub fn is_closed(&self) -> bool {
        self.ports.is_empty()
    }

    pub fn s(&self) -> &OpArray {
        &self.s
    }

    pub fn l(&self) -> &OpArray {
        &self.l
    }

    pub fn h(&self) -> &Operator {
        &self.h
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.h.layout()
    }

    pub fn embed(&self, target: &SpaceLayout) -> Result<SLHModel> {
        Ok(Self {
            ports: self.ports.clone(),
            s: self.s.embed(target)?,
            l: self.l.embed(target)?,
            h: self.h.embed(target)?,
        })
    }

    pub fn with_ports(mut self, ports: PortSet) -> Result<SLHModel> {
        if ports.len() != self.ports.len() {
            return Err(Error::PortCountMismatch {
                left: ports.len(),
                right: self.ports.len(),
            });
        }
        self.ports = ports;
        Ok(self)
    }

    /// Largest entry deviation across S, L and H; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &SLHModel) -> f64 {
        self.s
            .max_abs_diff(&other.s)
            .max(self.l.max_abs_diff(&other.l))
            .max(self.h.max_abs_diff(&other.h))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let s_dev = unitarity_deviation(self.s.data());
        if s_dev > EPS {
            violations.push(Violation::SNotUnitary(s_dev));
        }
        let h_dev = hermiticity_deviation(self.h.matrix());
        if h_dev > EPS {
            violations.push(Violation::HNotHermitian(h_dev));
        }
        ValidationReport { violations }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `‖S†S − I‖_max`
    SNotUnitary(f64),
    /// `‖H − H†‖_max`
    HNotHermitian(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SNotUnitary(d) => write!(f, "S not unitary, deviation {d:?}"),
            Violation::HNotHermitian(d) => write!(f, "H not Hermitian, deviation {d:?}"),
        }
    }
}

/// Invariant violations of an [`SLHModel`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// The Hermitian block array `E = [[E00, E0k], [Ek0, Ekk]]`, stored as an
/// `(n+1) × (n+1)` operator array whose block row/column 0 is the `0` index.
#[derive(Clone, Debug)]
pub struct StratonovichModel {
    ports: PortSet,
    e: OpArray,
}

impl StratonovichModel {
    pub fn new(ports: PortSet, e: OpArray) -> Result<Self> {
        let n = ports.len() + 1;
        if e.rows() != n || e.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{}, expected {n}x{n}",
                e.rows(),
                e.cols()
            )));
        }
        let dev = hermiticity_deviation(e.data());
        if dev > EPS {
            return Err(Error::InvalidModel(format!(
                "E is not Hermitian, deviation {dev:?}"
            )));
        }
        Ok(Self { ports, e })
    }

    pub fn from_blocks(
        ports: PortSet,
        e00: &Operator,
        ek0: &OpArray,
        ekk: &OpArray,
    ) -> Result<Self> {
        let layout = e00.layout();
        let n = ports.len();
        if ek0.rows() != n || ek0.cols() != 1 || ekk.rows() != n || ekk.cols() != n {
            return Err(Error::DimensionMismatch("E blocks do not match the port count".into()));
        }
        if ek0.layout() != layout || ekk.layout() != layout {
            return Err(Error::DimensionMismatch("E blocks must share one layout".into()));
        }
        let d = layout.dim();
        let mut data = crate::operator::CMatrix::zeros((n + 1) * d, (n + 1) * d);
        data.view_mut((0, 0), (d, d)).copy_from(e00.matrix());
        data.view_mut((d, 0), (n * d, d)).copy_from(ek0.data());
        data.view_mut((0, d), (d, n * d)).copy_from(&ek0.data().adjoint());
        data.view_mut((d, d), (n * d, n * d)).copy_from(ekk.data());
        Self::new(ports, OpArray::new(layout.clone(), n + 1, n + 1, data)?)
    }

    pub fn ports(&self) -> &PortSet {
        &self.ports
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.e.layout()
    }

    /// The whole block array, index 0 first.
    pub fn full(&self) -> &OpArray {
        &self.e
    }

    pub fn e00(&self) -> Operator {
        self.e.entry(0, 0)
    }

    pub fn e0k(&self) -> OpArray {
        self.e.select(&[0], &self.port_rows())
    }

    pub fn ek0(&self) -> OpArray {
        self.e.select(&self.port_rows(), &[0])
    }

    pub fn ekk(&self) -> OpArray {
        let k = self.port_rows();
        self.e.select(&k, &k)
    }

    fn port_rows(&self) -> Vec<usize> {
        (1..=self.ports.len()).collect()
    }

    pub fn max_abs_diff(&self, other: &StratonovichModel) -> f64 {
        self.e.max_abs_diff(&other.e)
    }
}

/// E-matrix to Hudson–Parthasarathy parameters.
///
/// `S = (I − iEkk/2)(I + iEkk/2)⁻¹`, `L = −i(I + iEkk/2)⁻¹Ek0`,
/// `H = E00 + ½E0k·Im{(I + iEkk/2)⁻¹}·Ek0`.
pub fn strat_to_slh(e: &StratonovichModel) -> Result<SLHModel> {
    let n = e.ports.len();
    let layout = e.layout().clone();
    let id = OpArray::identity(&layout, n);
    let ekk = e.ekk();
    let half_i_ekk = ekk.scale(I * 0.5);
    let m_inv = (&id + &half_i_ekk).invert("I + iEkk/2")?;

    let s = &(&id - &half_i_ekk) * &m_inv;
    let l = (&m_inv * &e.ek0()).scale(-I);
    let correction = &(&e.e0k() * &m_inv.im_part()) * &e.ek0();
    let h = e.e00() + correction.to_operator() * 0.5;
    SLHModel::new(e.ports.clone(), s, l, h)
}

/// Inverse Cayley transform; fails with [`Error::NoStratonovichForm`] when
/// `I + S` is singular (e.g. a mirror, `S = −1`).
pub fn slh_to_strat(g: &SLHModel) -> Result<StratonovichModel> {
    let n = g.n_ports();
    let layout = g.layout().clone();
    let id = OpArray::identity(&layout, n);
    let p_inv = (&id + g.s())
        .invert("I + S")
        .map_err(|_| Error::NoStratonovichForm)?;

    // Ekk = (2/i)(I − S)(I + S)⁻¹
    let ekk = (&(&id - g.s()) * &p_inv).scale(Complex64::new(0.0, -2.0));
    // I + iEkk/2 = 2(I + S)⁻¹, so its inverse is (I + S)/2
    let m = &id + &ekk.scale(I * 0.5);
    let m_inv = (&id + g.s()).scale(Complex64::new(0.5, 0.0));
    let ek0 = (&m * g.l()).scale(I);
    let correction = &(&ek0.adjoint() * &m_inv.im_part()) * &ek0;
    let e00 = g.h() - &(correction.to_operator() * 0.5);

    // project onto the Hermitian part to remove rounding asymmetry
    let ekk_data = (ekk.data() + ekk.data().adjoint()) * Complex64::new(0.5, 0.0);
    let ekk = OpArray::new(layout.clone(), n, n, ekk_data)?;
    let e00_data = (e00.matrix() + e00.matrix().adjoint()) * Complex64::new(0.5, 0.0);
    let e00 = Operator::new(layout, e00_data)?;
    StratonovichModel::from_blocks(g.ports.clone(), &e00, &ek0, &ekk)
}
