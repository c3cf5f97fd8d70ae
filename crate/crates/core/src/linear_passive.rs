//! Linear passive networks `H = a†Ωa`, `L = Ca` with static scattering `S`,
//! and the Laplace-domain analysis of a loop closed through a time delay.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::components::annihilation;
use crate::error::{Error, Result};
use crate::operator::{
    hermiticity_deviation, invert_matrix, is_unitary_matrix, max_abs_diff, CMatrix, Operator, SpaceLayout, EPS, I,
};
use crate::slh::{PortSet, SLHModel};

#[derive(Clone, Debug)]
pub struct LinearPassiveModel {
    omega: CMatrix,
    c: CMatrix,
    s: CMatrix,
}

/// `ȧ = A a + B b_in`, `b_out = C a + D b_in`.
#[derive(Clone, Debug)]
pub struct StateSpaceRealization {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl LinearPassiveModel {
    /// `omega` is `m×m` Hermitian, `c` is `n×m`, `s` is `n×n` unitary.
    pub fn new(omega: CMatrix, c: CMatrix, s: CMatrix) -> Result<Self> {
        let m = omega.nrows();
        let n = s.nrows();
        if !omega.is_square() || !s.is_square() || c.shape() != (n, m) {
            return Err(Error::DimensionMismatch(format!(
                "Ω is {:?}, C is {:?}, S is {:?}",
                omega.shape(),
                c.shape(),
                s.shape()
            )));
        }
        let dev = hermiticity_deviation(&omega);
        if dev > EPS {
            return Err(Error::InvalidModel(format!("Ω is not Hermitian, deviation {dev:?}")));
        }
        if !is_unitary_matrix(&s, EPS) {
            return Err(Error::InvalidModel("S is not unitary".into()));
        }
        Ok(Self { omega, c, s })
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn n_modes(&self) -> usize {
        self.omega.nrows()
    }

    pub fn n_ports(&self) -> usize {
        self.s.nrows()
    }

    /// `A = −½C†C − iΩ`, `B = −C†S`, `C`, `D = S`.
    pub fn abcd(&self) -> StateSpaceRealization {
        let c_dag = self.c.adjoint();
        StateSpaceRealization {
            a: (&c_dag * &self.c) * Complex64::new(-0.5, 0.0) - &self.omega * I,
            b: -(&c_dag * &self.s),
            c: self.c.clone(),
            d: self.s.clone(),
        }
    }

    fn delay_resolvent(&self, tau: f64, s: Complex64) -> Result<CMatrix> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::BadParam(format!("delay τ must be finite and ≥ 0, got {tau}")));
        }
        let n = self.n_ports();
        let delay = (-s * tau).exp();
        invert_matrix(&(CMatrix::identity(n, n) * delay - &self.s), "e^{−sτ}I − S")
            .map_err(|_| Error::SingularAtPoint { re: s.re, im: s.im })
    }

    /// `Ω_fb(s) = Ω − iC†(½ + S(e^{−sτ}I − S)⁻¹)C` for the loop closed with
    /// delay `τ`.
    pub fn delay_loop_omega(&self, tau: f64, s: Complex64) -> Result<CMatrix> {
        let n = self.n_ports();
        let r = self.delay_resolvent(tau, s)?;
        let inner = CMatrix::identity(n, n) * Complex64::new(0.5, 0.0) + &self.s * r;
        Ok(&self.omega - (self.c.adjoint() * inner * &self.c) * I)
    }

    /// `A_fb(s) = A + B(e^{−sτ}I − D)⁻¹C`, evaluated from the realization.
    pub fn delay_loop_generator(&self, tau: f64, s: Complex64) -> Result<CMatrix> {
        let ss = self.abcd();
        let r = self.delay_resolvent(tau, s)?;
        Ok(&ss.a + &ss.b * r * &ss.c)
    }

    /// `Ω + (1/2i)C†(I + S)(I − S)⁻¹C`, the zero-delay loop.
    pub fn instantaneous_loop_omega(&self) -> Result<CMatrix> {
        let n = self.n_ports();
        let id = CMatrix::identity(n, n);
        let inv = invert_matrix(&(&id - &self.s), "I − S").map_err(Error::into_ill_posed)?;
        Ok(&self.omega + (self.c.adjoint() * (&id + &self.s) * inv * &self.c) * Complex64::new(0.0, -0.5))
    }

    /// Evaluates `Ω_fb` on a grid; points on a loop resonance are flagged and
    /// the sweep continues.
    pub fn delay_sweep(&self, tau: f64, grid: &[Complex64]) -> Result<Vec<SweepPoint>> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::BadParam(format!("delay τ must be finite and ≥ 0, got {tau}")));
        }
        Ok(grid
            .iter()
            .map(|&s| SweepPoint {
                s,
                omega_fb: self.delay_loop_omega(tau, s).ok(),
            })
            .collect())
    }

    /// Truncated-Fock lift: `H = Σ Ω_jk a_j†a_k`, `L_p = Σ C_pj a_j`, with mode
    /// `j` on factor `mode{j}` of dimension `fock_dims[j]`.
    pub fn to_slh(&self, fock_dims: &[usize]) -> Result<SLHModel> {
        let m = self.n_modes();
        if fock_dims.len() != m {
            return Err(Error::BadParam(format!("{} Fock dimensions for {m} modes", fock_dims.len())));
        }
        if let Some(d) = fock_dims.iter().find(|&&d| d < 2) {
            return Err(Error::BadParam(format!("Fock dimension must be ≥ 2, got {d}")));
        }
        let layout = SpaceLayout::new(fock_dims.iter().enumerate().map(|(j, &d)| (format!("mode{j}"), d)))?;
        let modes = mode_operators(&layout)?;
        let mut h = Operator::zeros(&layout);
        for j in 0..m {
            for k in 0..m {
                if self.omega[(j, k)] != Complex64::new(0.0, 0.0) {
                    h = h + (modes[j].adjoint() * &modes[k]) * self.omega[(j, k)];
                }
            }
        }
        let l: Vec<Operator> = (0..self.n_ports())
            .map(|p| {
                (0..m).fold(Operator::zeros(&layout), |acc, j| acc + modes[j].clone() * self.c[(p, j)])
            })
            .collect();
        SLHModel::with_scalar_s(PortSet::numbered("port", self.n_ports()), &self.s, &l, h)
    }

    /// Recovers `(Ω, C, S)` from a model on Fock factors, treating every
    /// factor as a mode. Fails unless the model is exactly of the linear
    /// passive form on the truncated space.
    pub fn from_slh(g: &SLHModel) -> Result<Self> {
        let layout = g.layout();
        let modes = mode_operators(layout)?;
        let m = modes.len();
        let n = g.n_ports();
        let s = g
            .s()
            .scalar_part(EPS)
            .ok_or_else(|| Error::InvalidModel("scattering entries are not scalars".into()))?;

        let d = layout.dim();
        // basis index of the state with one quantum in mode j
        let mut one_quantum = Vec::with_capacity(m);
        let mut stride = d;
        for f in layout.factors() {
            stride /= f.dim;
            one_quantum.push(stride);
        }
        let c = CMatrix::from_fn(n, m, |p, j| g.l().entry(p, 0).matrix()[(0, one_quantum[j])]);
        let omega = CMatrix::from_fn(m, m, |j, k| g.h().matrix()[(one_quantum[j], one_quantum[k])]);
        let model = Self::new(omega, c, s)?;

        let lifted = model.to_slh(&layout.factors().iter().map(|f| f.dim).collect::<Vec<_>>())?;
        let dev = max_abs_diff(lifted.h().matrix(), g.h().matrix())
            .max(max_abs_diff(lifted.l().data(), g.l().data()));
        if dev > 1e-9 {
            return Err(Error::InvalidModel(format!(
                "model is not linear passive on its Fock factors (deviation {dev:?})"
            )));
        }
        Ok(model)
    }
}

fn mode_operators(layout: &SpaceLayout) -> Result<Vec<Operator>> {
    layout
        .factors()
        .iter()
        .map(|f| Operator::on(f.label.clone(), annihilation(f.dim))?.embed(layout))
        .collect()
}

/// One grid point of a delay sweep; `omega_fb` is `None` at a resonance.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub s: Complex64,
    pub omega_fb: Option<CMatrix>,
}

#[derive(Serialize)]
struct SweepPointJson {
    s: [f64; 2],
    singular: bool,
    omega_fb: Option<Vec<Vec<[f64; 2]>>>,
}

/// JSON array of `{ "s": [re, im], "singular": bool, "omega_fb": matrix | null }`.
pub fn sweep_to_json(points: &[SweepPoint]) -> Vec<impl Serialize> {
    points
        .iter()
        .map(|p| SweepPointJson {
            s: [p.s.re, p.s.im],
            singular: p.omega_fb.is_none(),
            omega_fb: p.omega_fb.as_ref().map(crate::json::matrix_to_rows),
        })
        .collect()
}

/// CSV with columns `re_s, im_s`, then `re_jk, im_jk` for every entry of
/// `Ω_fb` in row-major order, then `singular` (0/1).
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], m: usize, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["re_s".to_string(), "im_s".to_string()];
    for j in 0..m {
        for k in 0..m {
            header.push(format!("re_{j}{k}"));
            header.push(format!("im_{j}{k}"));
        }
    }
    header.push("singular".into());
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![p.s.re.to_string(), p.s.im.to_string()];
        match &p.omega_fb {
            Some(om) => {
                for j in 0..m {
                    for k in 0..m {
                        row.push(om[(j, k)].re.to_string());
                        row.push(om[(j, k)].im.to_string());
                    }
                }
                row.push("0".into());
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 2 * m * m));
                row.push("1".into());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()
}
