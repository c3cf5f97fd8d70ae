//! Standard operators and primitive component models.
//!
//! Two-level systems use the basis `(|e⟩, |g⟩)`, so `σ_z = diag(1, −1)` and
//! `σ₋ = |g⟩⟨e|`. Fock spaces are truncated at `dim` levels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{CMatrix, Operator, SpaceLayout};
use crate::slh::{PortSet, SLHModel};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Truncated annihilation operator, `a|n⟩ = √n|n−1⟩`.
pub fn annihilation(dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            re((c as f64).sqrt())
        } else {
            re(0.0)
        }
    })
}

pub fn creation(dim: usize) -> CMatrix {
    annihilation(dim).adjoint()
}

pub fn number(dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |r, c| if r == c { re(r as f64) } else { re(0.0) })
}

pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(0.0), re(0.0), re(1.0), re(0.0)])
}

pub fn sigma_plus() -> CMatrix {
    sigma_minus().adjoint()
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)])
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParam(format!("{name} must be finite, got {value}")))
    }
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value < 0.0 {
        return Err(Error::BadParam(format!("{name} must be ≥ 0, got {value}")));
    }
    Ok(())
}

/// One-port cavity mode in series with a phase shifter:
/// `(e^{iφ}, √γ a, ω a†a)` on the factor `(label, dim)`.
pub fn make_cavity(label: &str, omega: f64, gamma: f64, phi: f64, dim: usize) -> Result<SLHModel> {
    if dim < 2 {
        return Err(Error::BadParam(format!("cavity dim must be ≥ 2, got {dim}")));
    }
    check_finite("omega", omega)?;
    check_rate("gamma", gamma)?;
    check_finite("phi", phi)?;
    let layout = SpaceLayout::single(label, dim)?;
    let l = Operator::new(layout.clone(), annihilation(dim) * re(gamma.sqrt()))?;
    let h = Operator::new(layout, number(dim) * re(omega))?;
    SLHModel::with_scalar_s(
        PortSet::numbered(label, 1),
        &CMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi)),
        &[l],
        h,
    )
}

fn static_model(label: &str, s: CMatrix) -> Result<SLHModel> {
    let layout = SpaceLayout::empty();
    let n = s.nrows();
    let zeros: Vec<Operator> = (0..n).map(|_| Operator::zeros(&layout)).collect();
    SLHModel::with_scalar_s(PortSet::numbered(label, n), &s, &zeros, Operator::zeros(&layout))
}

/// `(e^{iφ} I_n, 0, 0)`.
pub fn make_phase_shifter(label: &str, phi: f64, n: usize) -> Result<SLHModel> {
    if n == 0 {
        return Err(Error::BadParam("phase shifter needs at least one port".into()));
    }
    check_finite("phi", phi)?;
    static_model(label, CMatrix::identity(n, n) * Complex64::from_polar(1.0, phi))
}

/// `2n`-port beam splitter `S = [[√(1−t²) I, −t I], [t I, √(1−t²) I]]`.
pub fn make_beamsplitter(label: &str, t: f64, n: usize) -> Result<SLHModel> {
    if n == 0 {
        return Err(Error::BadParam("beam splitter needs n ≥ 1".into()));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::BadParam(format!("transmission t must lie in (0, 1], got {t}")));
    }
    let r = (1.0 - t * t).sqrt();
    let s = CMatrix::from_fn(2 * n, 2 * n, |row, col| {
        let (bi, bj) = (row / n, col / n);
        if row % n != col % n {
            return re(0.0);
        }
        match (bi, bj) {
            (0, 0) | (1, 1) => re(r),
            (0, 1) => re(-t),
            _ => re(t),
        }
    });
    static_model(label, s)
}

/// Two-port qubit coupler `(e^{iφ} I₂, [√γ σ₋; √κ σ_z], 0)` on `(label, 2)`.
pub fn make_qubit_coupler(label: &str, gamma: f64, kappa: f64, phi: f64) -> Result<SLHModel> {
    check_rate("gamma", gamma)?;
    check_rate("kappa", kappa)?;
    check_finite("phi", phi)?;
    let layout = SpaceLayout::single(label, 2)?;
    let l = [
        Operator::new(layout.clone(), sigma_minus() * re(gamma.sqrt()))?,
        Operator::new(layout.clone(), sigma_z() * re(kappa.sqrt()))?,
    ];
    SLHModel::with_scalar_s(
        PortSet::numbered(label, 2),
        &(CMatrix::identity(2, 2) * Complex64::from_polar(1.0, phi)),
        &l,
        Operator::zeros(&layout),
    )
}
