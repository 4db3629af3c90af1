"""Per-mode photon-condensation criterion and its gauge specialisations.

For each renormalised photon branch tau the verdict compares

    lhs_tau = magnetic_part_tau + electric_part_tau  >  lambda_tau^2 = rhs_tau,

where the parts are the (negated) static responses of the paramagnetic
and electric coupling components of f projected onto the branch mixing
direction u_tau.  Same-field responses pair an operator with its adjoint
(C_{-q} = O_q^dag), which keeps every part non-negative.

Under full rotational invariance about q the projection is immaterial and
the inequality is the scalar transverse criterion; for axis-aligned
anisotropic matter the u_tau projection pairs each response with the
branch whose frequency it actually renormalises, which is what the
brute-force oracle confirms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bogoliubov import (
    BogoliubovBlock,
    adapt_degenerate_branches,
    coupling_g,
    diagonalize_block,
)
from .errors import ArgumentError, SingularConstraintError, UnsupportedError
from .gauge import (
    GaugeSpec,
    ModeSpec,
    coupling_f_electric,
    coupling_f_magnetic,
    diamagnetic_D,
    gauge_spectrum,
)
from .matter import MatterModel, MatterSpectrum
from .operators import Operator
from .response import chi_md_from_model, lehmann_sum, polarizability

CONDENSED_MARGIN = 1e-9
REDUCTION_ATOL = 1e-8


@dataclass(frozen=True)
class CriterionReport:
    """Condensation verdict for one (mode, tau) pair."""

    tau: str
    lhs: float
    rhs: float
    electric_part: float
    magnetic_part: float
    beta0: complex
    margin: float = field(init=False)
    condensed: bool = field(init=False)
    marginal: bool = field(init=False)

    def __post_init__(self):
        margin = self.lhs - self.rhs
        object.__setattr__(self, "margin", margin)
        object.__setattr__(self, "condensed", margin > CONDENSED_MARGIN)
        object.__setattr__(self, "marginal", abs(margin) <= CONDENSED_MARGIN)


@dataclass(frozen=True)
class PhasePoint:
    """One sweep sample: echoed parameters plus per-(mode, tau) reports."""

    param_name: str
    param_value: float
    gauge_label: str
    alpha: float
    reports: tuple  # ((mode_index, CriterionReport), ...)
    oracle: dict | None = None


def _check_volume(model: MatterModel, mode: ModeSpec):
    v = model.params.volume
    if abs(mode.volume - v) > 1e-12 * max(1.0, abs(v)):
        raise ArgumentError(
            f"mode volume {mode.volume} differs from model volume {v}")


def _f_components(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec):
    fm = tuple(coupling_f_magnetic(model, gauge, mode, s) for s in (1, 2))
    fe = tuple(coupling_f_electric(model, gauge, mode, s) for s in (1, 2))
    return fm, fe


def _branch_instability_value(spectrum: MatterSpectrum, g_op: Operator,
                              mode: ModeSpec, lam: float) -> float:
    """Eq.-(22)-normalised instability strength of one branch coupling.

    The matter fluctuation that optimally feeds a displacement couples
    through both <0|G|n> and <n|G|0>; the threshold follows from the pair

        X = sum_n (|<0|G|n>|^2 + |<n|G|0>|^2) / de_n,
        W = 2 sum_n <0|G|n><n|G|0> / de_n,

    as  lhs = lambda (X + |W|) / (2 nu^2 V)  against  rhs = lambda^2.
    For purely Hermitian or purely anti-Hermitian G the pair collapses to
    the transverse response sum of the underlying fields, recovering the
    paramagnetic-plus-electric form exactly.
    """
    de = spectrum.energies - spectrum.energies[0]
    keep = de > 1e-10
    bra = spectrum.couplings_from_ground(g_op)[keep]          # <0|G|n>
    ket = spectrum.couplings_from_ground(g_op.dag())[keep].conj()  # <n|G|0>
    w_de = de[keep]
    x_sum = float(np.sum((np.abs(bra) ** 2 + np.abs(ket) ** 2) / w_de))
    w_sum = complex(2.0 * np.sum(bra * ket / w_de))
    return lam * (x_sum + abs(w_sum)) / (2.0 * mode.nu ** 2 * mode.volume)


def _branch_scalars(spectrum: MatterSpectrum, fm, fe, mode: ModeSpec,
                    block: BogoliubovBlock):
    """Per-branch instability values and branch-decoupling residuals."""
    from .bogoliubov import exact_branch_coupling

    scale = (mode.volume * mode.nu) ** 2
    x_ff = lehmann_sum(spectrum, [Operator(a.entries + b.entries)
                                  for a, b in zip(fm, fe)]) / scale
    block = adapt_degenerate_branches(block, x_ff)
    g_full = exact_branch_coupling(block, tuple(
        Operator(a.entries + b.entries) for a, b in zip(fm, fe)))
    g_mag = exact_branch_coupling(block, fm)
    g_ele = exact_branch_coupling(block, fe)
    lhs = np.zeros(2)
    magnetic = np.zeros(2)
    electric = np.zeros(2)
    for t in range(2):
        lam = float(block.lambdas[t])
        lhs[t] = _branch_instability_value(spectrum, g_full[t], mode, lam)
        magnetic[t] = _branch_instability_value(spectrum, g_mag[t], mode, lam)
        electric[t] = _branch_instability_value(spectrum, g_ele[t], mode, lam)
    u = block.u
    off = float(abs(u[0] @ x_ff @ u[1]))
    return block, lhs, magnetic, electric, off


def evaluate(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
             block: BogoliubovBlock | None = None,
             spectrum: MatterSpectrum | None = None) -> tuple[CriterionReport, CriterionReport]:
    """Both-branch condensation verdicts at one mode."""
    _check_volume(model, mode)
    if block is None:
        block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
    if spectrum is None:
        spectrum = gauge_spectrum(model, gauge, [mode])
    fm, fe = _f_components(model, gauge, mode)
    block, lhs, magnetic, electric, off = _branch_scalars(spectrum, fm, fe, mode, block)
    if off > REDUCTION_ATOL:
        raise UnsupportedError(
            f"branch decoupling fails: |u+ . chi_ff . u-| = {off:.3e} > {REDUCTION_ATOL}; "
            "the per-branch criterion requires rotational symmetry about q or "
            "axis-aligned matter")
    f_tot = tuple(Operator(a.entries + b.entries) for a, b in zip(fm, fe))
    g_ops = coupling_g(block, f_tot)
    psi0 = spectrum.ground_state_vector()
    reports = []
    for t, tau in enumerate(BogoliubovBlock.TAUS):
        beta0 = order_parameter_from_vector(psi0, block, g_ops[t], mode, t)
        reports.append(CriterionReport(
            tau=tau,
            lhs=float(lhs[t]),
            rhs=float(block.lambdas[t] ** 2),
            electric_part=float(electric[t]),
            magnetic_part=float(magnetic[t]),
            beta0=beta0,
        ))
    return tuple(reports)


@dataclass(frozen=True)
class SpecializedReport:
    lhs: float
    rhs: float
    condensed: bool
    cross_check_residual: float


def coulomb_specialized(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
                        spectrum: MatterSpectrum | None = None) -> SpecializedReport:
    """Coulomb-gauge composition -chi^{MM}_Tq > 1.

    chi^{MM} = chi^{MpMp} - chi^{Md}; the residual field reports agreement
    with the general criterion margin, |(-chi^{MM}) - (lhs - rhs + 1)|,
    which is an algebraic identity through lambda^2 = 1 - chi^{Md}.
    """
    from .gauge import GaugePreset
    if gauge.preset is not GaugePreset.COULOMB:
        raise ArgumentError("coulomb_specialized requires the Coulomb gauge")
    if spectrum is None:
        spectrum = gauge_spectrum(model, gauge, [mode])
    reports = evaluate(model, gauge, mode, spectrum=spectrum)
    block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
    chi_d = chi_md_from_model(spectrum, mode.nu)
    # the physically coupled branch is the one whose lambda is renormalised
    idx = int(np.argmax(np.abs(block.lambdas - 1.0)))
    rep = reports[idx]
    lhs = rep.magnetic_part + chi_d
    residual = abs(lhs - (rep.margin + 1.0))
    return SpecializedReport(lhs=float(lhs), rhs=1.0,
                             condensed=bool(lhs - 1.0 > CONDENSED_MARGIN),
                             cross_check_residual=float(residual))


def dipole_specialized(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
                       spectrum: MatterSpectrum | None = None) -> SpecializedReport:
    """Dipole-gauge criterion -chi^{P_T P_T}_Tq > 1 with polarisability check.

    The residual reports max_sigma |(-V chi^{PP}_{sigma sigma}) - eps.alpha(0).eps|,
    an exact identity when both sides use the same spectrum.
    """
    from .gauge import GaugePreset
    if gauge.preset is not GaugePreset.DIPOLE:
        raise ArgumentError("dipole_specialized requires the dipole gauge")
    if spectrum is None:
        spectrum = gauge_spectrum(model, gauge, [mode])
    reports = evaluate(model, gauge, mode, spectrum=spectrum)
    lhs = max(r.electric_part for r in reports)
    fe = tuple(coupling_f_electric(model, gauge, mode, s) for s in (1, 2))
    scale = (mode.volume * mode.nu) ** 2
    x_pp = lehmann_sum(spectrum, fe) / scale
    alpha = polarizability(spectrum, 0.0)
    residual = 0.0
    for s, eps in ((0, mode.eps1), (1, mode.eps2)):
        lhs_id = -mode.volume * x_pp[s, s].real
        rhs_id = float(eps @ alpha @ eps)
        residual = max(residual, abs(lhs_id - rhs_id))
    return SpecializedReport(lhs=float(lhs), rhs=1.0,
                             condensed=bool(lhs - 1.0 > CONDENSED_MARGIN),
                             cross_check_residual=float(residual))


def order_parameter_from_vector(psi: np.ndarray, block: BogoliubovBlock,
                                g_op: Operator, mode: ModeSpec, t: int) -> complex:
    """beta_{q tau} = -(A_q / nu_tau) <psi| g_tau |psi>."""
    g = complex(psi.conj() @ (g_op.entries @ psi))
    return -mode.amplitude / block.nu_tau[t] * g


def order_parameter(spectrum: MatterSpectrum, block: BogoliubovBlock,
                    g_op: Operator, mode: ModeSpec, tau: str = "+") -> complex:
    t = BogoliubovBlock.TAUS.index(tau)
    return order_parameter_from_vector(spectrum.ground_state_vector(), block,
                                       g_op, mode, t)


def displaced_energy(h_m_expectation: float, block_or_nu,
                     betas, occupations) -> float:
    """E = H_m + sum_tau nu_tau (n_tau + 1/2 - |beta_tau|^2).

    ``block_or_nu`` is a BogoliubovBlock (both branches) or an explicit
    array of branch frequencies matching the beta/occupation arrays.
    """
    nu = (block_or_nu.nu_tau if isinstance(block_or_nu, BogoliubovBlock)
          else np.asarray(block_or_nu, dtype=float))
    betas = np.asarray(betas, dtype=complex)
    occ = np.asarray(occupations, dtype=float)
    if not (betas.shape == occ.shape == nu.shape):
        raise ArgumentError("betas and occupations must have one entry per branch")
    if np.any(occ < 0) or np.any(occ != np.round(occ)):
        raise ArgumentError("occupations must be non-negative integers")
    return float(h_m_expectation + np.sum(nu * (occ + 0.5 - np.abs(betas) ** 2)))


@dataclass(frozen=True)
class StiffnessResult:
    energy: float
    energy_increase: float
    lagrange_fields: tuple  # F_{-q tau} diagnostic per branch
    chi_ff_branch: tuple


def stiffness_energy(spectrum: MatterSpectrum, mode: ModeSpec,
                     block: BogoliubovBlock, dbeta, f_ops) -> StiffnessResult:
    """Quadratic constrained-minimum energy for branch displacements dbeta.

    E(dbeta) = E(0) - (V/2) sum_{+/-q, tau} [nu_tau^2 lambda_tau /
    (A_q^2 chi^{ff}_tau)] |dbeta_tau|^2, with chi^{ff}_tau the
    u_tau-projected coupling response (negative), so the energy increase
    is non-negative.  A finite-q mode displaces its Hermitian conjugate
    partner at -q along with it, which doubles the matter cost; a
    self-conjugate mode (uniform field, or the zone-boundary momentum)
    has no partner.
    """
    dbeta = np.asarray(dbeta, dtype=complex)
    if dbeta.shape != (2,):
        raise ArgumentError("dbeta must have one entry per branch")
    chi = lehmann_sum(spectrum, f_ops)
    block = adapt_degenerate_branches(block, chi)
    u = block.u
    e0 = spectrum.ground_energy()
    v = spectrum.model.params.volume
    a2 = mode.amplitude ** 2
    q_mod = abs(mode.q_phase) % (2.0 * np.pi)
    self_conjugate = min(q_mod, abs(q_mod - np.pi), abs(q_mod - 2 * np.pi)) < 1e-12
    pair_weight = 1.0 if self_conjugate else 2.0
    increase = 0.0
    fields = []
    chis = []
    for t in range(2):
        chi_t = float((u[t] @ chi @ u[t]).real)
        chis.append(chi_t)
        if abs(dbeta[t]) == 0:
            fields.append(0.0 + 0.0j)
            continue
        if abs(chi_t) < 1e-30:
            raise SingularConstraintError(
                f"chi^ff for branch {BogoliubovBlock.TAUS[t]} vanishes; "
                "no matter state realises the requested displacement")
        nu_t = block.nu_tau[t]
        lam_t = block.lambdas[t]
        f_field = np.conj(dbeta[t]) * nu_t ** 2 * lam_t / (a2 * chi_t)
        fields.append(complex(f_field))
        increase += -0.5 * pair_weight * v \
            * (nu_t ** 2 * lam_t / (a2 * chi_t)) * abs(dbeta[t]) ** 2
    return StiffnessResult(energy=e0 + increase, energy_increase=increase,
                           lagrange_fields=tuple(fields), chi_ff_branch=tuple(chis))
