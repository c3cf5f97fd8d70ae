//! Composition and reduction of SLH networks.
//!
//! Series product, concatenation, feedback reduction (Itô route on `(S, L, H)`
//! and Schur-complement route on the E-matrix), isolated loops, and the
//! interaction Hamiltonians that isolated loops induce between components.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{hermiticity_deviation, CMatrix, OpArray, Operator, SpaceLayout, EPS, I};
use crate::slh::{PortSet, SLHModel, StratonovichModel};

/// Brings both models onto the merged layout (factors of `first`, then the
/// new factors of `second`).
fn common_layout(first: &SLHModel, second: &SLHModel) -> Result<(SLHModel, SLHModel)> {
    let layout = first.layout().merge(second.layout())?;
    Ok((first.embed(&layout)?, second.embed(&layout)?))
}

/// The series product `G2 ◁ G1`: the output of `g1` drives `g2`.
///
/// `(S₂S₁, L₂ + S₂L₁, H₁ + H₂ + Im{L₂†S₂L₁})`. The result keeps the port
/// labels of `g1`.
pub fn series(g2: &SLHModel, g1: &SLHModel) -> Result<SLHModel> {
    if g1.n_ports() != g2.n_ports() {
        return Err(Error::PortCountMismatch {
            left: g2.n_ports(),
            right: g1.n_ports(),
        });
    }
    let (g1, g2) = common_layout(g1, g2)?;
    let s = g2.s() * g1.s();
    let l = g2.l() + &(g2.s() * g1.l());
    let cross = &(&g2.l().adjoint() * g2.s()) * g1.l();
    let h = &(g1.h() + g2.h()) + &cross.to_operator().im_part();
    SLHModel::new(g1.ports().clone(), s, l, h)
}

/// Parallel assembly: block-diagonal `S`, stacked `L`, summed `H`.
pub fn concat(models: &[SLHModel]) -> Result<SLHModel> {
    let first = models
        .first()
        .ok_or_else(|| Error::BadParam("concat needs at least one model".into()))?;
    let mut layout = first.layout().clone();
    for m in &models[1..] {
        layout = layout.merge(m.layout())?;
    }
    let mut labels: Vec<String> = Vec::new();
    for m in models {
        for p in m.ports().labels() {
            if labels.contains(p) {
                return Err(Error::DuplicatePortLabel(p.clone()));
            }
            labels.push(p.clone());
        }
    }
    let embedded = models
        .iter()
        .map(|m| m.embed(&layout))
        .collect::<Result<Vec<_>>>()?;
    let s_parts: Vec<OpArray> = embedded.iter().map(|m| m.s().clone()).collect();
    let l_parts: Vec<OpArray> = embedded.iter().map(|m| m.l().clone()).collect();
    let s = OpArray::block_diag(&s_parts)?;
    let l = if l_parts.is_empty() {
        OpArray::zeros(&layout, 0, 1)
    } else {
        OpArray::vstack(&l_parts)?
    };
    let mut h = Operator::zeros(&layout);
    for m in &embedded {
        h = h + m.h();
    }
    SLHModel::new(PortSet::new(labels)?, s, l, h)
}

/// Which ports are fed back, and an optional unitary gain `η` on the loop.
///
/// Internal port `i_m` receives `Σ_k η_mk · out(i_k)`; with no gain each
/// output is fed to the same-labeled input.
#[derive(Clone, Debug)]
pub struct FeedbackPlan {
    internal: Vec<String>,
    gain: Option<OpArray>,
}

impl FeedbackPlan {
    pub fn new<S: Into<String>>(internal: impl IntoIterator<Item = S>) -> Result<Self> {
        let internal: Vec<String> = internal.into_iter().map(Into::into).collect();
        if internal.is_empty() {
            return Err(Error::BadParam("feedback needs at least one internal port".into()));
        }
        PortSet::new(internal.iter().cloned())?;
        Ok(Self {
            internal,
            gain: None,
        })
    }

    /// Attaches a gain `η`, an `r × r` unitary operator array (its layout may
    /// be any sub-layout of the model's).
    pub fn with_gain(mut self, eta: OpArray) -> Result<Self> {
        let r = self.internal.len();
        if eta.rows() != r || eta.cols() != r {
            return Err(Error::BadParam(format!(
                "gain is {}x{}, expected {r}x{r}",
                eta.rows(),
                eta.cols()
            )));
        }
        if !eta.is_unitary() {
            return Err(Error::BadParam("gain η must be unitary".into()));
        }
        self.gain = Some(eta);
        Ok(self)
    }

    /// Plan from explicit wiring: each pair `(out, in)` feeds output `out`
    /// into input `in`, optionally through `gain` (indexed by the pairs).
    /// The fed outputs and the driven inputs must be the same port set.
    pub fn from_wiring(pairs: &[(String, String)], gain: Option<OpArray>) -> Result<Self> {
        let sources: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
        let targets: Vec<String> = pairs.iter().map(|p| p.1.clone()).collect();
        let plan = Self::new(sources.clone())?;
        PortSet::new(targets.iter().cloned())?;
        let r = sources.len();
        // perm[m][j] = 1 when source m is the input driven by pair j
        let mut perm = CMatrix::zeros(r, r);
        for (j, t) in targets.iter().enumerate() {
            let m = sources.iter().position(|s| s == t).ok_or_else(|| {
                Error::BadParam(format!(
                    "input `{t}` is driven but output `{t}` is not fed back"
                ))
            })?;
            perm[(m, j)] = Complex64::new(1.0, 0.0);
        }
        let identity_wiring = perm == CMatrix::identity(r, r);
        match gain {
            None if identity_wiring => Ok(plan),
            None => plan.with_gain(OpArray::from_scalars(&SpaceLayout::empty(), &perm)),
            Some(g) => {
                let p = OpArray::from_scalars(g.layout(), &perm);
                plan.with_gain(&p * &g)
            }
        }
    }

    pub fn internal(&self) -> &[String] {
        &self.internal
    }

    pub fn gain(&self) -> Option<&OpArray> {
        self.gain.as_ref()
    }
}

struct Partition {
    external: Vec<usize>,
    internal: Vec<usize>,
}

fn partition(ports: &PortSet, internal: &[String]) -> Result<Partition> {
    let internal = internal
        .iter()
        .map(|p| ports.index_of(p))
        .collect::<Result<Vec<_>>>()?;
    let external = (0..ports.len()).filter(|k| !internal.contains(k)).collect();
    Ok(Partition { external, internal })
}

/// Eliminates the internal ports of `g`.
///
/// Uses the isolated-loop form `H + L_i†Z_iL_i` when there is no gain and the
/// off-diagonal scattering blocks vanish, otherwise
/// [`feedback_reduce_general`].
pub fn feedback_reduce(g: &SLHModel, plan: &FeedbackPlan) -> Result<SLHModel> {
    let part = partition(g.ports(), &plan.internal)?;
    if plan.gain.is_none() {
        let s_ei = g.s().select(&part.external, &part.internal);
        let s_ie = g.s().select(&part.internal, &part.external);
        if s_ei.max_abs() <= EPS && s_ie.max_abs() <= EPS {
            let s_ii = g.s().select(&part.internal, &part.internal);
            let l_i = g.l().select(&part.internal, &[0]);
            let v_loop = isolated_loop_hamiltonian(&s_ii, &l_i)?;
            return SLHModel::new(
                g.ports().subset(&part.external),
                g.s().select(&part.external, &part.external),
                g.l().select(&part.external, &[0]),
                g.h() + &v_loop,
            );
        }
    }
    feedback_reduce_general(g, plan)
}

/// Itô feedback reduction with optional gain `η`:
///
/// ```text
/// S_fb = S_ee + S_ei (η⁻¹ − S_ii)⁻¹ S_ie
/// L_fb = L_e  + S_ei (η⁻¹ − S_ii)⁻¹ L_i
/// H_fb = H + L_i† Im{S_ii (η⁻¹ − S_ii)⁻¹} L_i + Im{L_e† S_ei (η⁻¹ − S_ii)⁻¹ L_i}
/// ```
pub fn feedback_reduce_general(g: &SLHModel, plan: &FeedbackPlan) -> Result<SLHModel> {
    let part = partition(g.ports(), &plan.internal)?;
    let (e, i) = (&part.external, &part.internal);
    let layout = g.layout();
    let s = g.s();
    let (s_ee, s_ei, s_ie, s_ii) = (s.select(e, e), s.select(e, i), s.select(i, e), s.select(i, i));
    let (l_e, l_i) = (g.l().select(e, &[0]), g.l().select(i, &[0]));

    let (eta_inv, context) = match &plan.gain {
        None => (OpArray::identity(layout, i.len()), "I − S_ii"),
        Some(eta) => (eta.embed(layout)?.adjoint(), "η⁻¹ − S_ii"),
    };
    let m = (&eta_inv - &s_ii)
        .invert(context)
        .map_err(Error::into_ill_posed)?;

    let s_ei_m = &s_ei * &m;
    let s_fb = &s_ee + &(&s_ei_m * &s_ie);
    let l_fb = &l_e + &(&s_ei_m * &l_i);
    let loop_term = &(&l_i.adjoint() * &(&s_ii * &m)) * &l_i;
    let cross_term = &(&l_e.adjoint() * &s_ei_m) * &l_i;
    let h_fb = &(g.h() + &loop_term.to_operator().im_part()) + &cross_term.to_operator().im_part();
    SLHModel::new(g.ports().subset(e), s_fb, l_fb, h_fb)
}

/// `X_aa − X_ab X_bb⁻¹ X_ba`, shortening the block indices `eliminate`.
pub fn schur_complement(x: &OpArray, keep: &[usize], eliminate: &[usize], context: &str) -> Result<OpArray> {
    let x_bb_inv = x.select(eliminate, eliminate).invert(context)?;
    let correction = &(&x.select(keep, eliminate) * &x_bb_inv) * &x.select(eliminate, keep);
    Ok(&x.select(keep, keep) - &correction)
}

/// Feedback reduction in Stratonovich form: the Schur complement of `E`
/// over the internal ports.
pub fn feedback_reduce_strat<S: AsRef<str>>(
    e: &StratonovichModel,
    internal: &[S],
) -> Result<StratonovichModel> {
    let internal: Vec<String> = internal.iter().map(|s| s.as_ref().to_string()).collect();
    if internal.is_empty() {
        return Err(Error::BadParam("feedback needs at least one internal port".into()));
    }
    PortSet::new(internal.iter().cloned())?;
    let part = partition(e.ports(), &internal)?;
    let keep: Vec<usize> = std::iter::once(0)
        .chain(part.external.iter().map(|k| k + 1))
        .collect();
    let eliminate: Vec<usize> = part.internal.iter().map(|k| k + 1).collect();
    let reduced = schur_complement(e.full(), &keep, &eliminate, "E_ii").map_err(Error::into_ill_posed)?;
    // restore exact Hermitian symmetry lost to rounding
    let data = (reduced.data() + reduced.data().adjoint()) * Complex64::new(0.5, 0.0);
    let reduced = OpArray::new(reduced.layout().clone(), keep.len(), keep.len(), data)?;
    StratonovichModel::new(e.ports().subset(&part.external), reduced)
}

/// `Z = Im{(I − S)⁻¹}`, Hermitian for any well-posed loop.
pub fn loop_z(s_ii: &OpArray) -> Result<OpArray> {
    let n = s_ii.rows();
    let id = OpArray::identity(s_ii.layout(), n);
    Ok((&id - s_ii)
        .invert("I − S_ii")
        .map_err(Error::into_ill_posed)?
        .im_part())
}

/// `Z = Im{S(I − S)⁻¹}`; equal to [`loop_z`] for any `S`.
pub fn loop_z_scattered(s_ii: &OpArray) -> Result<OpArray> {
    let n = s_ii.rows();
    let id = OpArray::identity(s_ii.layout(), n);
    let inv = (&id - s_ii)
        .invert("I − S_ii")
        .map_err(Error::into_ill_posed)?;
    Ok((s_ii * &inv).im_part())
}

/// `Z = (1/2i)(I + S)(I − S)⁻¹`; equal to [`loop_z`] when `S` is unitary.
pub fn loop_z_cayley(s_ii: &OpArray) -> Result<OpArray> {
    let n = s_ii.rows();
    let id = OpArray::identity(s_ii.layout(), n);
    let inv = (&id - s_ii)
        .invert("I − S_ii")
        .map_err(Error::into_ill_posed)?;
    Ok((&(&id + s_ii) * &inv).scale(Complex64::new(0.0, -0.5)))
}

/// `V_loop = L_i† Z_i L_i`.
pub fn isolated_loop_hamiltonian(s_ii: &OpArray, l_i: &OpArray) -> Result<Operator> {
    let z = loop_z(s_ii)?;
    let v = &(&l_i.adjoint() * &z) * l_i;
    Ok(v.to_operator())
}

/// Feeds every output back to its own input, giving the closed system
/// `(−, −, H + L†ZL)`.
pub fn close_all_loops(g: &SLHModel) -> Result<SLHModel> {
    if g.is_closed() {
        return Ok(g.clone());
    }
    let v = isolated_loop_hamiltonian(g.s(), g.l())?;
    Ok(SLHModel::closed(g.h() + &v))
}

/// A component `(S₀, L₀, H₀)` placed in a loop through a beam splitter of
/// transmission `t`, reduced in closed form. With `r = √(1−t²)`:
///
/// ```text
/// S(t) = r I − t² (S₀⁻¹ − r I)⁻¹
/// L(t) = −t (I − r S₀)⁻¹ L₀
/// H(t) = H₀ + Im{L₀† (I − r S₀)⁻¹ L₀}
/// ```
///
/// At `t = 0` this is `(I, 0, H₀ + Im{L₀†(I − S₀)⁻¹L₀})`, the completely
/// closed loop with the input reflected straight to the output.
pub fn beamsplitter_loop_family(g0: &SLHModel, t: f64) -> Result<SLHModel> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BadParam(format!("transmission t must lie in [0, 1], got {t}")));
    }
    let n = g0.n_ports();
    let layout = g0.layout();
    let id = OpArray::identity(layout, n);
    let r = (1.0 - t * t).sqrt();
    let s0_inv = g0.s().invert("S₀")?;
    let m = (&s0_inv - &id.scale(r.into()))
        .invert("S₀⁻¹ − √(1−t²) I")
        .map_err(Error::into_ill_posed)?;
    // (I − r S₀)⁻¹ = (S₀⁻¹ − r I)⁻¹ S₀⁻¹
    let resolvent = &m * &s0_inv;

    let s = &id.scale(r.into()) - &m.scale((t * t).into());
    let l = (&resolvent * g0.l()).scale((-t).into());
    let correction = &(&g0.l().adjoint() * &resolvent) * g0.l();
    let h = g0.h() + &correction.to_operator().im_part();
    SLHModel::new(g0.ports().clone(), s, l, h)
}

/// Hamiltonian split of two components closed in a series loop.
#[derive(Clone, Debug)]
pub struct LoopDecomposition {
    pub h1_tilde: Operator,
    pub h2_tilde: Operator,
    pub v12: Operator,
}

impl LoopDecomposition {
    pub fn total(&self) -> Operator {
        &(&self.h1_tilde + &self.h2_tilde) + &self.v12
    }
}

/// Splits the loop Hamiltonian of `G1 → G2 → G1` into modified component
/// Hamiltonians and the induced coupling:
///
/// ```text
/// H̃₁  = H₁ + Im{L₁†(I − S₁S₂)⁻¹L₁}
/// H̃₂  = H₂ + Im{L₂†(I − S₂S₁)⁻¹L₂}
/// V₁₂ = Im{L₁†S₁(I − S₂S₁)⁻¹L₂} + Im{L₂†S₂(I − S₁S₂)⁻¹L₁}
/// ```
pub fn series_loop_decompose(g1: &SLHModel, g2: &SLHModel) -> Result<LoopDecomposition> {
    if g1.n_ports() != g2.n_ports() {
        return Err(Error::PortCountMismatch {
            left: g1.n_ports(),
            right: g2.n_ports(),
        });
    }
    let (g1, g2) = common_layout(g1, g2)?;
    let id = OpArray::identity(g1.layout(), g1.n_ports());
    let (s1, s2, l1, l2) = (g1.s(), g2.s(), g1.l(), g2.l());
    let r21 = (&id - &(s2 * s1))
        .invert("I − S₂S₁")
        .map_err(Error::into_ill_posed)?;
    let r12 = (&id - &(s1 * s2))
        .invert("I − S₁S₂")
        .map_err(Error::into_ill_posed)?;

    let sandwich = |a: &OpArray, x: &OpArray, b: &OpArray| (&(&a.adjoint() * x) * b).to_operator().im_part();
    let h1_tilde = g1.h() + &sandwich(l1, &r12, l1);
    let h2_tilde = g2.h() + &sandwich(l2, &r21, l2);
    let v12 = sandwich(l1, &(s1 * &r21), l2) + sandwich(l2, &(s2 * &r12), l1);
    Ok(LoopDecomposition {
        h1_tilde,
        h2_tilde,
        v12,
    })
}

fn check_phase_pair(phi1: f64, phi2: f64) -> Result<f64> {
    let denom = 1.0 - (phi1 + phi2).cos();
    if denom.abs() <= EPS {
        return Err(Error::IllPosedNetwork {
            context: format!("1 − cos(φ₁ + φ₂) at φ₁ = {phi1}, φ₂ = {phi2}"),
        });
    }
    Ok(denom)
}

/// `λ = (sin φ₁ + sin φ₂) / (1 − cos(φ₁ + φ₂))`, the coupling induced by a loop
/// between Hermitian couplings `A` and `B` under phases `e^{iφ₁}`, `e^{iφ₂}`.
pub fn scalar_coupling_lambda(phi1: f64, phi2: f64) -> Result<f64> {
    let denom = check_phase_pair(phi1, phi2)?;
    Ok((phi1.sin() + phi2.sin()) / denom)
}

/// `f(φ₁, φ₂) = (e^{iφ₁} − e^{−iφ₂}) / (1 − cos(φ₁ + φ₂))`.
pub fn coupling_f(phi1: f64, phi2: f64) -> Result<Complex64> {
    let denom = check_phase_pair(phi1, phi2)?;
    Ok((Complex64::from_polar(1.0, phi1) - Complex64::from_polar(1.0, -phi2)) / denom)
}

/// Coupling `V₁₂` induced by one loop per channel: channel `k` carries
/// `L₁ = A_k`, `S₁ = e^{iφ₁ₖ}` on one side and `L₂ = B_k`, `S₂ = e^{iφ₂ₖ}` on the
/// other. For Hermitian `A_k`, `B_k` this is `Σ_k λ_k A_k ⊗ B_k`.
pub fn multi_loop_coupling(a: &[Operator], b: &[Operator], phases: &[(f64, f64)]) -> Result<Operator> {
    if a.len() != b.len() || a.len() != phases.len() {
        return Err(Error::BadParam(format!(
            "channel lists differ in length: {} A, {} B, {} phase pairs",
            a.len(),
            b.len(),
            phases.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::BadParam("at least one channel is required".into()));
    }
    let mut total: Option<Operator> = None;
    for (k, ((ak, bk), &(phi1, phi2))) in a.iter().zip(b).zip(phases).enumerate() {
        check_phase_pair(phi1, phi2)?;
        let g1 = SLHModel::with_scalar_s(
            PortSet::new([format!("loop{k}")])?,
            &CMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi1)),
            std::slice::from_ref(ak),
            Operator::zeros(ak.layout()),
        )?;
        let g2 = SLHModel::with_scalar_s(
            PortSet::new([format!("loop{k}")])?,
            &CMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi2)),
            std::slice::from_ref(bk),
            Operator::zeros(bk.layout()),
        )?;
        let v = series_loop_decompose(&g1, &g2)?.v12;
        total = Some(match total {
            None => v,
            Some(acc) => {
                let layout = acc.layout().merge(v.layout())?;
                acc.embed(&layout)? + v.embed(&layout)?
            }
        });
    }
    Ok(total.expect("non-empty"))
}

/// `V = V₀⊗I + V₊⊗σ₋ + V₋⊗σ₊ + V_z⊗σ_z` with respect to a two-level factor.
#[derive(Clone, Debug)]
pub struct QubitCoupling {
    pub v0: Operator,
    pub v_plus: Operator,
    pub v_minus: Operator,
    pub v_z: Operator,
}

/// Splits `v` along the two-level factor `qubit` (basis `(|e⟩, |g⟩)`).
///
/// For Hermitian `v` the components satisfy `V₋ = V₊†`; a violation beyond
/// [`EPS`] is reported as [`Error::InvalidModel`].
pub fn decompose_qubit_coupling(v: &Operator, qubit: &str) -> Result<QubitCoupling> {
    match v.layout().factor_dim(qubit) {
        Some(2) => {}
        Some(d) => return Err(Error::DimensionMismatch(format!("factor `{qubit}` has dimension {d}, expected 2"))),
        None => return Err(Error::UnknownLabel(qubit.to_string())),
    }
    let herm = hermiticity_deviation(v.matrix());
    if herm > EPS {
        return Err(Error::InvalidModel(format!("interaction is not Hermitian, deviation {herm:?}")));
    }
    let (e, g) = (0, 1);
    let v_ee = v.partial_element(qubit, e, e)?;
    let v_gg = v.partial_element(qubit, g, g)?;
    let v_plus = v.partial_element(qubit, g, e)?;
    let v_minus = v.partial_element(qubit, e, g)?;
    let dev = v_minus.max_abs_diff(&v_plus.adjoint());
    if dev > EPS {
        return Err(Error::InvalidModel(format!(
            "V₋ differs from V₊† by {dev:?}; the interaction is not Hermitian"
        )));
    }
    Ok(QubitCoupling {
        v0: (&v_ee + &v_gg) * 0.5,
        v_z: (&v_ee - &v_gg) * 0.5,
        v_plus,
        v_minus,
    })
}

/// Predicted `(V₊, V_z)` for the qubit–mode loop with mode couplings
/// `L₁ = [X; Y]`, qubit couplings `L₂ = [√γσ₋; √κσ_z]` and phases
/// `S₁ = e^{iφ₁}I₂`, `S₂ = e^{iφ₂}I₂`:
///
/// ```text
/// V₊ = (√γ f / 2i) X†
/// V_z = (√κ / 2i) (f Y† − f* Y)
/// ```
pub fn qubit_loop_terms(
    x: &Operator,
    y: &Operator,
    gamma: f64,
    kappa: f64,
    phi1: f64,
    phi2: f64,
) -> Result<(Operator, Operator)> {
    let f = coupling_f(phi1, phi2)?;
    let half_over_i = Complex64::new(0.0, -0.5);
    let v_plus = x.adjoint() * (f * gamma.sqrt() * half_over_i);
    let v_z = (y.adjoint() * f - y.clone() * f.conj()) * (half_over_i * kappa.sqrt());
    Ok((v_plus, v_z))
}

/// `κ₁₂ = √(γ₁γ₂) f(φ₁, φ₂) / 2i`, the `a₁†a₂` coefficient between two looped cavities.
pub fn cavity_pair_kappa(gamma1: f64, gamma2: f64, phi1: f64, phi2: f64) -> Result<Complex64> {
    Ok(coupling_f(phi1, phi2)? * (gamma1 * gamma2).sqrt() / (2.0 * I))
}
