"""Gauge presets and per-mode coupling data.

A gauge enters the pipeline through three numbers/objects per mode:
the paramagnetic coupling weight, the electric (polarisation) coupling
weight, and the diamagnetic matrix D with its strength Delta_q.  The
one-parameter family interpolates the transverse gauge freedom linearly
in the long-wavelength limit: polarisation weight alpha, paramagnetic
weight (1 - alpha), diamagnetic (1 - alpha)^2, so alpha = 0 is the
Coulomb gauge and alpha = 1 the dipole gauge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, UnsupportedError
from .matter import MatterModel, MatterSpectrum, ModelKind, matter_spectrum
from .operators import Operator, zero

X_AXIS = np.array([1.0, 0.0, 0.0])
Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])


class GaugePreset(enum.Enum):
    COULOMB = "coulomb"
    DIPOLE = "dipole"
    ALPHA_LWL = "alpha_lwl"
    MULTIPOLAR_RING = "multipolar_ring"


@dataclass(frozen=True)
class GaugeSpec:
    preset: GaugePreset
    lwl: bool = True
    alpha: float = 0.0

    @property
    def paramagnetic_weight(self) -> float:
        if self.preset is GaugePreset.COULOMB:
            return 1.0
        if self.preset is GaugePreset.DIPOLE:
            return 0.0
        if self.preset is GaugePreset.ALPHA_LWL:
            return 1.0 - self.alpha
        return 1.0  # multipolar ring keeps its paramagnetic coupling

    @property
    def electric_weight(self) -> float:
        if self.preset is GaugePreset.COULOMB:
            return 0.0
        if self.preset is GaugePreset.DIPOLE:
            return 1.0
        if self.preset is GaugePreset.ALPHA_LWL:
            return self.alpha
        return 1.0


def make_gauge(preset: GaugePreset | str, lwl: bool = True,
               alpha: float | None = None) -> GaugeSpec:
    if isinstance(preset, str):
        try:
            preset = GaugePreset(preset)
        except ValueError as exc:
            raise ArgumentError(f"unknown gauge preset {preset!r}") from exc
    if preset is GaugePreset.ALPHA_LWL:
        if alpha is None:
            raise ArgumentError("alpha_lwl preset requires alpha")
        if not 0.0 <= alpha <= 1.0:
            raise ArgumentError(f"alpha must lie in [0, 1], got {alpha}")
        return GaugeSpec(preset=preset, lwl=True, alpha=float(alpha))
    if alpha is not None:
        raise ArgumentError("alpha only applies to the alpha_lwl preset")
    if preset is GaugePreset.DIPOLE:
        lwl = True  # the dipole gauge is defined in the long-wavelength limit
    if preset is GaugePreset.MULTIPOLAR_RING:
        lwl = False
    return GaugeSpec(preset=preset, lwl=lwl, alpha=0.0 if preset is not GaugePreset.DIPOLE else 1.0)


def _polarisation_pair(q_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed transverse basis; q || z gives (x, y)."""
    for trial in (X_AXIS, Y_AXIS, Z_AXIS):
        perp = trial - np.dot(trial, q_hat) * q_hat
        if np.linalg.norm(perp) > 1e-8:
            eps1 = perp / np.linalg.norm(perp)
            break
    eps2 = np.cross(q_hat, eps1)
    return eps1, eps2


@dataclass(frozen=True)
class ModeSpec:
    """One field mode: wavevector data, polarisation frame, normalisation."""

    q: np.ndarray          # 3-vector; ring modes use the conventional z direction
    nu: float              # mode frequency |q|
    volume: float
    eps1: np.ndarray
    eps2: np.ndarray
    q_phase: float = 0.0   # scalar quasi-momentum for matter phase factors (0 = LWL)
    ring_index: int | None = None

    def __post_init__(self):
        for name in ("q", "eps1", "eps2"):
            v = np.asarray(getattr(self, name), dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if self.nu <= 0:
            raise ArgumentError(f"mode frequency must be positive, got {self.nu}")
        if self.volume <= 0:
            raise ArgumentError(f"mode volume must be positive, got {self.volume}")
        if abs(np.dot(self.eps1, self.eps2)) > 1e-14 or \
           abs(np.linalg.norm(self.eps1) - 1) > 1e-14 or \
           abs(np.linalg.norm(self.eps2) - 1) > 1e-14:
            raise ArgumentError("polarisation vectors must be orthonormal")
        q_hat = self.q_hat
        if max(abs(np.dot(q_hat, self.eps1)), abs(np.dot(q_hat, self.eps2))) > 1e-14:
            raise ArgumentError("polarisations must be orthogonal to q")

    @property
    def q_hat(self) -> np.ndarray:
        n = np.linalg.norm(self.q)
        return self.q / n if n > 0 else Z_AXIS

    @property
    def amplitude(self) -> float:
        """A_q with A_q^2 = 1 / (2 nu V)."""
        return 1.0 / np.sqrt(2.0 * self.nu * self.volume)

    def eps(self, sigma: int) -> np.ndarray:
        if sigma not in (1, 2):
            raise ArgumentError(f"polarisation index must be 1 or 2, got {sigma}")
        return self.eps1 if sigma == 1 else self.eps2


def mode_from_q(q, volume: float) -> ModeSpec:
    qv = np.asarray(q, dtype=float)
    nu = float(np.linalg.norm(qv))
    if nu == 0:
        raise ArgumentError("q must be nonzero; use lwl_mode for the uniform-field limit")
    eps1, eps2 = _polarisation_pair(qv / nu)
    return ModeSpec(q=qv, nu=nu, volume=float(volume), eps1=eps1, eps2=eps2)


def lwl_mode(nu: float, volume: float) -> ModeSpec:
    """Uniform-field mode: frequency nu, conventional wavevector along z."""
    qv = nu * Z_AXIS
    eps1, eps2 = _polarisation_pair(Z_AXIS)
    return ModeSpec(q=qv, nu=float(nu), volume=float(volume), eps1=eps1, eps2=eps2,
                    q_phase=0.0)


def ring_mode(model: MatterModel, n: int, volume: float | None = None,
              nu: float | None = None) -> ModeSpec:
    """Mode matched to ring quasi-momentum 2 pi n / L.

    The wavevector direction is conventional (z); the scalar quasi-momentum
    drives the matter phase factors.
    """
    if model.kind is not ModelKind.RING_LATTICE:
        raise ArgumentError("ring_mode requires a ring-lattice model")
    L = model.dim
    q_n = 2.0 * np.pi * n / L
    if n % L == 0:
        raise ArgumentError("ring mode index must not be 0 mod L")
    v = float(volume) if volume is not None else model.params.volume
    freq = float(nu) if nu is not None else abs(q_n)
    eps1, eps2 = _polarisation_pair(Z_AXIS)
    return ModeSpec(q=freq * Z_AXIS, nu=freq, volume=v, eps1=eps1, eps2=eps2,
                    q_phase=q_n, ring_index=n)


@dataclass(frozen=True)
class DiamagneticMatrix:
    """2x2 symmetric D_{q sigma sigma'} and the strength Delta_q."""

    d: np.ndarray
    delta_q: float

    def __post_init__(self):
        m = np.asarray(self.d, dtype=float)
        if m.shape != (2, 2):
            raise ArgumentError("D must be 2x2")
        if abs(m[0, 1] - m[1, 0]) > 1e-12:
            raise ArgumentError("D must be symmetric")
        if self.delta_q < 0:
            raise ArgumentError("Delta_q must be non-negative")
        eigs = np.linalg.eigvalsh(0.5 * (m + m.T))
        if eigs[0] < -1e-12:
            raise ArgumentError(f"D has negative eigenvalue {eigs[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "d", m)


def _axis_gram(model: MatterModel, mode: ModeSpec) -> np.ndarray:
    """Polarisation Gram matrix restricted to the model's motion axes.

    Isotropic (3-axis) matter gives the identity; reduced models project
    out polarisations they cannot screen.
    """
    g = np.zeros((2, 2))
    for ax in model.axes:
        pr = np.array([np.dot(mode.eps1, ax), np.dot(mode.eps2, ax)])
        g += np.outer(pr, pr)
    return g


def diamagnetic_delta(model: MatterModel, mode: ModeSpec) -> float:
    """Delta_q = e^2 N A_q^2 / (2 m), from the model's effective e^2 N / m."""
    return model.params.e2n_over_m * mode.amplitude ** 2 / 2.0


def diamagnetic_D(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec) -> DiamagneticMatrix:
    """Assemble D_{q sigma sigma'} and Delta_q for a preset gauge."""
    delta = diamagnetic_delta(model, mode)
    if gauge.preset is GaugePreset.DIPOLE:
        return DiamagneticMatrix(d=np.zeros((2, 2)), delta_q=delta)
    gram = _axis_gram(model, mode)
    if gauge.preset is GaugePreset.COULOMB:
        return DiamagneticMatrix(d=gram, delta_q=delta)
    if gauge.preset is GaugePreset.ALPHA_LWL:
        return DiamagneticMatrix(d=(1.0 - gauge.alpha) ** 2 * gram, delta_q=delta)
    if gauge.preset is GaugePreset.MULTIPOLAR_RING:
        return DiamagneticMatrix(d=_multipolar_ring_D(model, mode), delta_q=delta)
    raise UnsupportedError(f"no diamagnetic matrix for preset {gauge.preset}")


def _multipolar_ring_D(model: MatterModel, mode: ModeSpec) -> np.ndarray:
    """Numeric dressed-profile overlap for the discretised ring gauge.

    On the lattice, the discrete gradient of the bond string cancels the
    bare phase e^{-i q x} on every string-covered bond, and the closing
    bond inherits the full loop sum, which vanishes at commensurate
    quasi-momenta.  The overlap is evaluated on the ring ground state
    with bond occupations averaged from the adjacent sites.
    """
    spec = matter_spectrum(model)
    psi0 = spec.ground_state_vector()
    dens = np.abs(psi0) ** 2
    L = model.dim
    q = mode.q_phase
    bare = np.exp(-1j * q * (np.arange(L) + 0.5))
    grad = bare.copy()
    grad[L - 1] = -np.sum(bare[:L - 1])  # string wraps only at the closing bond
    profile = bare - grad
    bond_occ = 0.5 * (dens + np.roll(dens, -1))
    weight = float(np.real(np.sum(np.abs(profile) ** 2 * bond_occ))) / model.params.n_charges
    return weight * _axis_gram(model, mode)


def coupling_f(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
               sigma: int) -> Operator:
    """eps_sigma . f_q as an operator on the matter space."""
    fm = coupling_f_magnetic(model, gauge, mode, sigma)
    fe = coupling_f_electric(model, gauge, mode, sigma)
    return fm + fe


def coupling_f_magnetic(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
                        sigma: int) -> Operator:
    """Paramagnetic component, magnitude V eps.j^p_q (transverse current).

    The overall sign is fixed so that the assembled interaction expands the
    velocity-gauge kinetic term (p + e A)^2 / 2m with the same photon-phase
    convention the electric component uses; mixed-weight gauges are then
    exactly unitarily equivalent, which the spectra confirm.  Response
    functions are quadratic in this component, so they are unaffected.
    """
    w = gauge.paramagnetic_weight
    if w == 0.0:
        return zero(model.dim)
    q_phase = 0.0 if gauge.lwl else mode.q_phase
    jops = model.para_current(q_phase)
    eps = mode.eps(sigma)
    acc = np.zeros((model.dim, model.dim), dtype=complex)
    for i in range(3):
        if abs(eps[i]) > 1e-15:
            acc = acc + eps[i] * jops[i].entries
    return Operator(-w * mode.volume * acc)


def coupling_f_electric(model: MatterModel, gauge: GaugeSpec, mode: ModeSpec,
                        sigma: int) -> Operator:
    """Electric part: i V nu eps.P_Tq with the multipolar polarisation."""
    w = gauge.electric_weight
    if w == 0.0:
        return zero(model.dim)
    q_phase = 0.0 if gauge.lwl else mode.q_phase
    pops = model.pol_transverse_mult(mode.q_hat, q_phase)
    eps = mode.eps(sigma)
    acc = np.zeros((model.dim, model.dim), dtype=complex)
    for i in range(3):
        if abs(eps[i]) > 1e-15:
            acc = acc + eps[i] * pops[i].entries
    return Operator(1j * mode.volume * mode.nu * w * acc)


def check_wavevector_decoupling(model: MatterModel, gauge: GaugeSpec,
                                mode_a: ModeSpec, mode_b: ModeSpec) -> float:
    """Magnitude of the neglected cross-momentum diamagnetic coupling.

    Returns |<psi0| sum_mu eps'_{q sigma}(r_mu) . eps'_{q' sigma'}(r_mu)
    |psi0>| / N maximised over polarisations, for q' != -q.  Exactly zero
    by construction in the long-wavelength limit.
    """
    if gauge.lwl:
        return 0.0
    qa, qb = mode_a.q_phase, mode_b.q_phase
    if abs(qa + qb) < 1e-12:
        raise ArgumentError("cross check requires q' != -q")
    if model.kind is not ModelKind.RING_LATTICE:
        raise UnsupportedError("finite-q dressed profiles implemented for the ring only")
    spec = matter_spectrum(model)
    psi0 = spec.ground_state_vector()
    L = model.dim
    phases = np.exp(-1j * (qa + qb) * np.arange(L))
    overlap = np.vdot(psi0, phases * psi0)
    gram = _axis_gram(model, mode_a)
    return float(np.max(np.abs(gram)) * abs(overlap) / model.params.n_charges)


def dressed_matter_hamiltonian(model: MatterModel, gauge: GaugeSpec,
                               modes: list[ModeSpec]) -> Operator:
    """Matter Hamiltonian including the retained-mode polarisation self-energy.

    Electric gauges add sum_sigma (eps.P V)^2 / (2 V) per retained mode for
    single-particle models; ensembles of disjoint dipoles absorb their
    self-energy into the model parameters and are returned unchanged.
    """
    w = gauge.electric_weight
    if w == 0.0 or not model.self_energy_in_electric_gauges:
        return model.h_m
    h = model.h_m.entries.copy()
    for mode in modes:
        q_phase = 0.0 if gauge.lwl else mode.q_phase
        pops = model.pol_transverse_mult(mode.q_hat, q_phase)
        for sigma in (1, 2):
            eps = mode.eps(sigma)
            acc = np.zeros_like(h)
            for i in range(3):
                if abs(eps[i]) > 1e-15:
                    acc = acc + eps[i] * pops[i].entries
            # (w V P_sigma)^2 / (2 V) with P already carrying 1/V
            pv = w * mode.volume * acc
            h = h + (pv.conj().T @ pv) / (2.0 * mode.volume)
    return Operator(h, hermitian=True)


def gauge_spectrum(model: MatterModel, gauge: GaugeSpec,
                   modes: list[ModeSpec]) -> MatterSpectrum:
    """Spectrum of the gauge-dressed matter Hamiltonian."""
    return matter_spectrum(model, h_m=dressed_matter_hamiltonian(model, gauge, modes))
