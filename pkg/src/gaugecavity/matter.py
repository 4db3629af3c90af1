"""Catalog of finite matter models and their coupling operators.

Each model owns a bare Hamiltonian ``h_m``, total-dipole operators, and
providers for the Fourier components of the paramagnetic current and the
multipolar transverse polarisation.  Gauge weighting of those operators
is applied elsewhere; models only expose the raw material objects.

Conventions (natural units):
  * electrons have charge -e with e > 0,
  * total dipole  d_i = -e * sum_mu r_mu_i,
  * paramagnetic current at q -> 0 is  j^p = -(e / (m V)) * total momentum,
    realised model-independently as  j^p_i = -i [d_i, h_m] / V,
  * multipolar transverse polarisation in the long-wavelength limit is the
    transverse projection of d / V.

The two-level ensemble works in the symmetric collective-spin sector and
its effective diamagnetic strength e^2 N / m is fixed by the oscillator
strength sum of the truncated dipole (2 |d|^2 omega0 per dipole), so the
Coulomb-gauge sum-rule cancellation is exact for it by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ResourceLimitError, UnsupportedError
from .operators import (
    EigenSystem,
    Operator,
    boson_ladder,
    eigh,
    identity,
    tensor,
    zero,
)

MAX_ENSEMBLE_SIZE = 4000

X_AXIS = np.array([1.0, 0.0, 0.0])
Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])


class ModelKind(enum.Enum):
    TWO_LEVEL_ENSEMBLE = "two_level_ensemble"
    ANHARMONIC_DIPOLE = "anharmonic_dipole"
    RING_LATTICE = "ring_lattice"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters shared by the response and criterion machinery."""

    n_charges: int
    mass: float
    charge: float
    volume: float
    e2n_over_m: float  # diamagnetic strength e^2 N / m
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MatterModel:
    kind: ModelKind
    h_m: Operator
    dipole_ops: tuple[Operator, Operator, Operator]
    params: ModelParams
    # unit vectors along which the model's charges can move; fixes the
    # geometry of the diamagnetic matrix in velocity gauges
    axes: tuple[np.ndarray, ...]
    # canonical momentum components (same order as axes); None when the
    # model has no p^2/2m structure (two-level, ring)
    momentum_ops: tuple[Operator, ...] | None = None
    # single-particle models add the retained-mode polarisation self-energy
    # in electric gauges; ensembles of disjoint dipoles must not
    self_energy_in_electric_gauges: bool = False
    # ring-only operators
    site_density_ops: tuple[Operator, ...] | None = None
    translation_op: Operator | None = None
    site_positions: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.h_m.dim

    # -- coupling-operator providers -------------------------------------

    def para_current(self, q_phase: float = 0.0) -> tuple[Operator, Operator, Operator]:
        """Cartesian components of j^p_q.

        ``q_phase`` is the scalar quasi-momentum entering the phase factors
        e^{-i q x}; 0 selects the long-wavelength limit.  Models without an
        internal coordinate (two-level) only support q_phase = 0.
        """
        if q_phase == 0.0:
            return self._para_current_lwl()
        if self.kind is ModelKind.RING_LATTICE:
            return self._ring_bond_current(q_phase)
        if self.kind is ModelKind.ANHARMONIC_DIPOLE:
            return self._anharmonic_current(q_phase)
        raise UnsupportedError(f"{self.kind.value} supports only long-wavelength currents")

    def _para_current_lwl(self) -> tuple[Operator, Operator, Operator]:
        v = self.params.volume
        h = self.h_m.entries
        ops = []
        for d in self.dipole_ops:
            comm = d.entries @ h - h @ d.entries
            ops.append(Operator(-1j * comm / v))
        return tuple(ops)

    def _anharmonic_current(self, q_phase: float) -> tuple[Operator, Operator, Operator]:
        # j^p_q i = -(e / 2 m V) {p_i, e^{-i q.r}} with q along the mode axis
        e = self.params.charge
        m = self.params.mass
        v = self.params.volume
        phase = self._phase_factor(-q_phase)
        ops = []
        momenta = dict(zip(self._axis_labels(), self.momentum_ops))
        for lab in "xyz":
            if lab in momenta:
                p = momenta[lab].entries
                ops.append(Operator(-(e / (2 * m * v)) * (p @ phase + phase @ p)))
            else:
                ops.append(zero(self.dim))
        return tuple(ops)

    def _phase_factor(self, q_scalar: float) -> np.ndarray:
        """e^{+i q_scalar * (q-axis position)} for the anharmonic model.

        The mode propagates along z by convention; a model with no z axis
        has no spatial variation and the factor degenerates to identity.
        """
        labels = self._axis_labels()
        if "z" not in labels:
            return np.eye(self.dim, dtype=complex)
        r_z = self.position_ops[labels.index("z")]
        es = eigh(Operator(r_z))
        ph = np.exp(1j * q_scalar * es.values)
        return (es.vectors * ph) @ es.vectors.conj().T

    def _axis_labels(self) -> list[str]:
        out = []
        for ax in self.axes:
            out.append("xyz"[int(np.argmax(np.abs(ax)))])
        return out

    @property
    def position_ops(self) -> tuple[np.ndarray, ...]:
        e = self.params.charge
        labels = self._axis_labels()
        return tuple(-self.dipole_ops["xyz".index(lab)].entries / e for lab in labels)

    def pol_transverse_mult(self, q_hat: np.ndarray, q_phase: float = 0.0
                            ) -> tuple[Operator, Operator, Operator]:
        """Multipolar P_Tq: transverse projection of d/V in the LWL, or the
        discretised bond-string polarisation for the ring at finite q."""
        if self.kind is ModelKind.RING_LATTICE and q_phase != 0.0:
            return self._ring_string_polarisation(q_phase)
        v = self.params.volume
        proj = np.eye(3) - np.outer(q_hat, q_hat)
        ops = []
        for i in range(3):
            acc = np.zeros((self.dim, self.dim), dtype=complex)
            for j in range(3):
                if abs(proj[i, j]) > 1e-15:
                    acc = acc + proj[i, j] * self.dipole_ops[j].entries
            ops.append(Operator(acc / v))
        return tuple(ops)

    # -- ring-specific machinery ------------------------------------------

    def _require_ring(self):
        if self.kind is not ModelKind.RING_LATTICE:
            raise ArgumentError(f"operation requires a ring lattice, got {self.kind.value}")

    def _ring_bond_current(self, q_scalar: float) -> tuple[Operator, Operator, Operator]:
        """Lattice paramagnetic current with phase e^{-i q x} on bond centres.

        Bond hoppings are read back from h_m so disordered rings keep a
        continuity-consistent current.  The ring coordinate is abstract;
        the current vector is mapped onto the model's transverse axis.
        """
        self._require_ring()
        e = self.params.charge
        v = self.params.volume
        L = self.dim
        h = self.h_m.entries
        cur = np.zeros((L, L), dtype=complex)
        for j in range(L):
            k = (j + 1) % L
            t_jk = -h[j, k].real
            hop = np.zeros((L, L), dtype=complex)
            hop[k, j] = 1.0
            bond = -e * 1j * t_jk * (hop - hop.conj().T)
            cur += bond * np.exp(-1j * q_scalar * (j + 0.5))
        op = Operator(cur / v)
        out = [zero(self.dim)] * 3
        out["xyz".index(self._axis_labels()[0])] = op
        return tuple(out)

    def _ring_string_polarisation(self, q_scalar: float) -> tuple[Operator, Operator, Operator]:
        """Line-integral polarisation discretised along ring bonds from site 0.

        Each site k is connected to the origin by the forward string over
        bonds 0..k-1; the uniform background enters as a c-number.
        """
        self._require_ring()
        e = self.params.charge
        v = self.params.volume
        L = self.dim
        n = self.params.n_charges
        acc = np.zeros((L, L), dtype=complex)
        for b in range(L - 1):
            string = np.zeros((L, L), dtype=complex)
            for k in range(b + 1, L):
                string[k, k] = 1.0
            p_b = -e * (string - (n / L) * (L - 1 - b) * np.eye(L))
            acc += p_b * np.exp(-1j * q_scalar * (b + 0.5))
        op = Operator(acc / v)
        out = [zero(self.dim)] * 3
        out["xyz".index(self._axis_labels()[0])] = op
        return tuple(out)

    def density_fourier(self, q_scalar: float) -> Operator:
        """Electron-number Fourier component (1/V) sum_j n_j e^{-i q x_j}."""
        self._require_ring()
        v = self.params.volume
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for j, nj in enumerate(self.site_density_ops):
            acc += nj.entries * np.exp(-1j * q_scalar * j)
        return Operator(acc / v)


@dataclass(frozen=True)
class MatterSpectrum:
    """Eigen-data of a matter Hamiltonian plus coupling-operator tables."""

    model: MatterModel
    h_m_used: Operator
    eigensystem: EigenSystem
    ground_degeneracy: int

    @property
    def energies(self) -> np.ndarray:
        return self.eigensystem.values

    @property
    def vectors(self) -> np.ndarray:
        return self.eigensystem.vectors

    @property
    def dim(self) -> int:
        return self.eigensystem.dim

    def table(self, op: Operator) -> np.ndarray:
        """<n|O|n'> in the eigenbasis."""
        u = self.vectors
        return u.conj().T @ op.entries @ u

    def couplings_from_ground(self, op: Operator) -> np.ndarray:
        """<0|O|n> for all n."""
        u = self.vectors
        g = u[:, 0]
        return g.conj() @ (op.entries @ u)

    def ground_energy(self) -> float:
        return float(self.energies[0])

    def ground_state_vector(self) -> np.ndarray:
        return self.vectors[:, 0]


def matter_spectrum(model: MatterModel, h_m: Operator | None = None,
                    degeneracy_atol: float = 1e-10) -> MatterSpectrum:
    """Diagonalise the (possibly gauge-dressed) matter Hamiltonian."""
    h = model.h_m if h_m is None else h_m
    es = eigh(h)
    degeneracy = int(np.sum(es.values - es.values[0] <= degeneracy_atol))
    return MatterSpectrum(model=model, h_m_used=h, eigensystem=es,
                          ground_degeneracy=degeneracy)


# ---------------------------------------------------------------------------
# builders


def _collective_spin(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(S_z, S_x) in the S = N/2 Dicke sector, m ascending."""
    s = n / 2.0
    m = np.arange(n + 1) - s
    sz = np.diag(m).astype(complex)
    sp = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n):
        sp[k + 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sx = 0.5 * (sp + sp.conj().T)
    return sz, sx


def build_two_level_ensemble(count: int, gap: float, dipole_moment,
                             volume: float,
                             diamagnetic_e2n_over_m: float | None = None) -> MatterModel:
    """N identical two-level dipoles in the symmetric collective-spin sector.

    H_m = gap * (S_z + N/2); total dipole d = 2 * dipole_moment * S_x.
    The optional override replaces the sum-rule-derived diamagnetic
    strength 2 N |d|^2 gap, e.g. to probe a bare photon block.
    """
    if count < 1:
        raise ArgumentError(f"ensemble size must be >= 1, got {count}")
    if count > MAX_ENSEMBLE_SIZE:
        raise ResourceLimitError(f"ensemble size {count} exceeds {MAX_ENSEMBLE_SIZE}")
    if gap <= 0:
        raise ArgumentError(f"two-level gap must be positive, got {gap}")
    d = np.asarray(dipole_moment, dtype=float)
    if d.shape != (3,):
        raise ArgumentError("dipole_moment must be a 3-vector")
    sz, sx = _collective_spin(count)
    h_m = Operator(gap * (sz + count / 2.0 * np.eye(count + 1)), hermitian=True)
    dip = tuple(Operator(2.0 * d[i] * sx, hermitian=True) for i in range(3))
    dnorm = float(np.linalg.norm(d))
    e2n_over_m = (2.0 * count * dnorm ** 2 * gap
                  if diamagnetic_e2n_over_m is None else float(diamagnetic_e2n_over_m))
    axis = d / dnorm if dnorm > 0 else X_AXIS
    params = ModelParams(n_charges=count, mass=1.0, charge=1.0, volume=float(volume),
                         e2n_over_m=e2n_over_m,
                         detail={"gap": gap, "dipole_moment": d.tolist()})
    return MatterModel(kind=ModelKind.TWO_LEVEL_ENSEMBLE, h_m=h_m, dipole_ops=dip,
                       params=params, axes=(axis,),
                       self_energy_in_electric_gauges=False)


def _single_axis_oscillator(levels: int, mass: float, omega: float):
    """(x, p, h_harmonic) on a truncated oscillator basis.

    The harmonic part is the exact diagonal omega (n + 1/2): assembling it
    from truncated x, p matrices would corrupt the top level (the a a^dag
    truncation defect) and poison commutator-derived currents.
    """
    a, adag = boson_ladder(levels)
    x = (a.entries + adag.entries) / np.sqrt(2.0 * mass * omega)
    p = 1j * np.sqrt(mass * omega / 2.0) * (adag.entries - a.entries)
    h = omega * np.diag(np.arange(levels) + 0.5).astype(complex)
    return x, p, h


def build_anharmonic_dipole(levels: int, mass: float, frequency: float,
                            quartic: float, charge: float, volume: float,
                            axes: int = 1) -> MatterModel:
    """Single charged particle, H_m = p^2/2m + m w^2 r^2 / 2 + kappa (r.r)^2.

    Represented on `levels` harmonic-oscillator states per Cartesian axis
    (1 axis along x, or 3 axes).  Truncation-converged surrogate whose
    canonical kinetic term keeps the momentum sum rule and gauge
    invariance accessible.
    """
    if levels < 4:
        raise ArgumentError(f"need at least 4 oscillator levels, got {levels}")
    if frequency <= 0 or mass <= 0:
        raise ArgumentError("mass and frequency must be positive")
    if quartic < 0:
        raise ArgumentError("quartic coefficient must be non-negative")
    if axes not in (1, 3):
        raise ArgumentError("axes must be 1 or 3")

    x1, p1, h1 = _single_axis_oscillator(levels, mass, frequency)

    if axes == 1:
        xs = [x1]
        ps = [p1]
        h = h1 + quartic * np.linalg.matrix_power(x1 @ x1, 2)
        axis_vecs = (X_AXIS,)
        dim = levels
    else:
        dim = levels ** 3
        if dim > 20000:
            raise ResourceLimitError(f"3-axis dimension {dim} exceeds 20000")
        eye1 = np.eye(levels, dtype=complex)

        def embed(op, pos):
            mats = [eye1, eye1, eye1]
            mats[pos] = op
            return np.kron(np.kron(mats[0], mats[1]), mats[2])

        xs = [embed(x1, i) for i in range(3)]
        ps = [embed(p1, i) for i in range(3)]
        h = sum(embed(h1, i) for i in range(3))
        r2 = sum(x @ x for x in xs)
        h = h + quartic * (r2 @ r2)
        axis_vecs = (X_AXIS, Y_AXIS, Z_AXIS)

    dip = []
    mom = []
    k = 0
    for lab in "xyz":
        if ("xyz".index(lab) < axes) if axes == 3 else (lab == "x"):
            dip.append(Operator(-charge * xs[k], hermitian=True))
            mom.append(Operator(ps[k], hermitian=True))
            k += 1
        else:
            dip.append(zero(dim))
    # pad momentum tuple to match axes order
    params = ModelParams(n_charges=1, mass=mass, charge=charge, volume=float(volume),
                         e2n_over_m=charge ** 2 / mass,
                         detail={"levels": levels, "frequency": frequency,
                                 "quartic": quartic, "axes": axes})
    return MatterModel(kind=ModelKind.ANHARMONIC_DIPOLE,
                       h_m=Operator(h, hermitian=True),
                       dipole_ops=tuple(dip), params=params, axes=axis_vecs,
                       momentum_ops=tuple(mom),
                       self_energy_in_electric_gauges=True)


def build_ring_lattice(sites: int, hopping: float, charge: float,
                       volume: float | None = None,
                       effective_mass: float | None = None,
                       bond_scale: dict | None = None) -> MatterModel:
    """Single particle on an L-site tight-binding ring (lattice constant 1).

    ``bond_scale`` maps bond index -> multiplicative hopping factor and is
    used by the disorder-sensitivity checks; a clean ring omits it.
    The current direction is mapped onto the x axis, transverse to the
    conventional z-directed mode wavevector.
    """
    if sites < 4:
        raise ArgumentError(f"ring needs at least 4 sites, got {sites}")
    if hopping <= 0:
        raise ArgumentError("hopping must be positive")
    L = sites
    h = np.zeros((L, L), dtype=complex)
    for j in range(L):
        k = (j + 1) % L
        t_jk = hopping * (bond_scale.get(j, 1.0) if bond_scale else 1.0)
        h[j, k] -= t_jk
        h[k, j] -= t_jk
    density = tuple(Operator(np.diag(np.eye(L)[j]).astype(complex), hermitian=True)
                    for j in range(L))
    # dipole along the mapped axis from site positions relative to the
    # ring centroid; only used for LWL bookkeeping on the ring
    pos = np.arange(L, dtype=float)
    xrel = pos - pos.mean()
    dip_x = Operator(-charge * np.diag(xrel).astype(complex), hermitian=True)
    shift = np.roll(np.eye(L), -1, axis=0).astype(complex)  # T|j> = |j-1>
    m_eff = effective_mass if effective_mass is not None else 1.0 / (2.0 * hopping)
    v = float(volume) if volume is not None else float(L)
    params = ModelParams(n_charges=1, mass=m_eff, charge=charge, volume=v,
                         e2n_over_m=charge ** 2 / m_eff,
                         detail={"sites": L, "hopping": hopping,
                                 "disordered": bool(bond_scale)})
    return MatterModel(kind=ModelKind.RING_LATTICE,
                       h_m=Operator(h, hermitian=True),
                       dipole_ops=(dip_x, zero(L), zero(L)),
                       params=params, axes=(X_AXIS,),
                       site_density_ops=density,
                       translation_op=Operator(shift),
                       site_positions=pos)


def ring_quasi_momentum(model: MatterModel, n: int) -> float:
    model._require_ring()
    L = model.dim
    return 2.0 * np.pi * n / L


# ---------------------------------------------------------------------------
# diagnostics


def check_uniform_density(model: MatterModel, eigenstate: int,
                          degeneracy_atol: float = 1e-10) -> float:
    """max_j |<n|n_j|n> - N/L| for the (momentum-symmetrised) eigenstate.

    Members of a degenerate cluster are rotated into translation
    eigenstates before sampling the density, mirroring how uniformity
    follows from translation symmetry.
    """
    model._require_ring()
    spec = matter_spectrum(model)
    L = model.dim
    vals = spec.energies
    lo = eigenstate
    while lo > 0 and abs(vals[lo - 1] - vals[eigenstate]) <= degeneracy_atol:
        lo -= 1
    hi = eigenstate
    while hi + 1 < L and abs(vals[hi + 1] - vals[eigenstate]) <= degeneracy_atol:
        hi += 1
    block = spec.vectors[:, lo:hi + 1]
    if block.shape[1] > 1:
        t_small = block.conj().T @ model.translation_op.entries @ block
        _, w = np.linalg.eig(t_small)
        block = block @ w
        block /= np.linalg.norm(block, axis=0)
    state = block[:, eigenstate - lo]
    dens = np.abs(state) ** 2  # site densities for a single particle
    target = model.params.n_charges / L
    return float(np.max(np.abs(dens - target)))


def trk_sum(spectrum: MatterSpectrum, axis: int, reference_level: int = 0) -> float:
    """sum_{n != n'} |<n|P_i|n'>|^2 / (eps_n - eps_n') for total momentum P.

    Converges to m N / 2 for models with a canonical kinetic term.
    """
    model = spectrum.model
    if model.momentum_ops is None:
        raise UnsupportedError(f"{model.kind.value} has no canonical momentum representation")
    labels = model._axis_labels()
    lab = "xyz"[axis]
    if lab not in labels:
        raise ArgumentError(f"model has no {lab} axis")
    p = spectrum.table(model.momentum_ops[labels.index(lab)])
    e = spectrum.energies
    npr = reference_level
    terms = []
    for n in range(len(e)):
        if n == npr:
            continue
        de = e[n] - e[npr]
        terms.append(abs(p[n, npr]) ** 2 / de)
    return float(np.sum(terms))
