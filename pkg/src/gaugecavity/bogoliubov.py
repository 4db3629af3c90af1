"""Two-polarisation Bogoliubov diagonalisation of the diamagnetic photon block.

The quadratic photon Hamiltonian per mode,

    nu (a1+ a1 + a2+ a2 + 1) + Delta sum_{ss'} D_{ss'} (a_s + a_s+)(a_s' + a_s'+),

is absorbed by new bosons c_tau = w a1 + x a2 + y a1+ + z a2+ with
renormalised frequencies nu_tau = nu * lambda_tau,

    lambda_{+/-} = sqrt(1 + (2 Delta / nu) [D11 + D22 +/- sqrt((D11-D22)^2 + 4 D12^2)]).

The mixing directions are the eigenvectors u_tau of D (u_+ for the larger
eigenvalue), and along each direction the problem is a single-mode
squeeze:

    (w, x) = -u_tau (lambda+1) / (2 sqrt(lambda)),
    (y, z) = -u_tau (lambda-1) / (2 sqrt(lambda)),

which reproduces the closed forms quoted for D12 = 0 limits, stays finite
at lambda = 1, and satisfies the symplectic normalisation
w^2 + x^2 - y^2 - z^2 = 1 identically.  Degenerate D uses the fixed
convention u_tau = (tau, 1)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericError
from .gauge import DiamagneticMatrix
from .operators import Operator

DEGENERATE_ATOL = 1e-13


@dataclass(frozen=True)
class BogoliubovBlock:
    """Per-mode record of the transformation; tau index 0 = '+', 1 = '-'."""

    nu_q: float
    delta_q: float
    d_matrix: np.ndarray
    lambdas: np.ndarray        # (lambda_plus, lambda_minus)
    coeffs: np.ndarray         # rows tau, columns (w, x, y, z)
    u: np.ndarray              # rows tau: mixing direction in polarisation space
    d_q: float                 # (D11 - D22) / (2 D12); inf when singular

    TAUS = ("+", "-")

    @property
    def lambda_plus(self) -> float:
        return float(self.lambdas[0])

    @property
    def lambda_minus(self) -> float:
        return float(self.lambdas[1])

    @property
    def nu_tau(self) -> np.ndarray:
        return self.nu_q * self.lambdas

    @property
    def h(self) -> np.ndarray:
        """h[sigma, tau] with h_{1 tau} = w - y, h_{2 tau} = x - z."""
        w, x, y, z = (self.coeffs[:, k] for k in range(4))
        return np.stack([w - y, x - z], axis=0)

    def mixing_matrix(self) -> np.ndarray:
        """4x4 M with (c+, c-, c+^dag, c-^dag) = M (a1, a2, a1+, a2+)."""
        u = self.coeffs[:, :2]
        v = self.coeffs[:, 2:]
        return np.block([[u, v], [v.conj(), u.conj()]])


def _lambda_closed_form(d: np.ndarray, delta: float, nu: float) -> np.ndarray:
    tr = d[0, 0] + d[1, 1]
    rad = np.sqrt((d[0, 0] - d[1, 1]) ** 2 + 4.0 * d[0, 1] ** 2)
    vals = 1.0 + (2.0 * delta / nu) * np.array([tr + rad, tr - rad])
    if vals.min() <= 0:
        raise ArgumentError(f"unphysical block: lambda^2 = {vals.min():.3e} <= 0")
    return np.sqrt(vals)


def _mixing_directions(d: np.ndarray) -> np.ndarray:
    """Eigenvectors of D as rows (larger eigenvalue first), deterministic signs."""
    if abs(d[0, 0] - d[1, 1]) <= DEGENERATE_ATOL and abs(d[0, 1]) <= DEGENERATE_ATOL:
        return np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    vals, vecs = np.linalg.eigh(0.5 * (d + d.T))
    u = vecs[:, ::-1].T  # descending eigenvalue order
    out = u.copy()
    for k in range(2):
        pivot = out[k, 1] if abs(out[k, 1]) > 1e-12 else out[k, 0]
        if pivot < 0:
            out[k] = -out[k]
    return out


def diagonalize_block(dmat: DiamagneticMatrix, nu_q: float) -> BogoliubovBlock:
    """Closed-form Bogoliubov block for a symmetric PSD diamagnetic matrix."""
    if nu_q <= 0:
        raise ArgumentError(f"mode frequency must be positive, got {nu_q}")
    d = np.asarray(dmat.d, dtype=float)
    lam = _lambda_closed_form(d, dmat.delta_q, nu_q)
    u = _mixing_directions(d)
    coeffs = np.zeros((2, 4))
    for t in range(2):
        lt = lam[t]
        cw = -(lt + 1.0) / (2.0 * np.sqrt(lt))
        cy = -(lt - 1.0) / (2.0 * np.sqrt(lt))
        coeffs[t, 0:2] = cw * u[t]
        coeffs[t, 2:4] = cy * u[t]
    if abs(d[0, 1]) > DEGENERATE_ATOL:
        d_q = (d[0, 0] - d[1, 1]) / (2.0 * d[0, 1])
    elif abs(d[0, 0] - d[1, 1]) <= DEGENERATE_ATOL:
        d_q = 0.0
    else:
        d_q = np.inf
    return BogoliubovBlock(nu_q=float(nu_q), delta_q=float(dmat.delta_q),
                           d_matrix=d, lambdas=lam, coeffs=coeffs, u=u, d_q=float(d_q))


def appendix_coefficients(dmat: DiamagneticMatrix, nu_q: float) -> np.ndarray:
    """Coefficient rows (w, x, y, z) from the Theta/Phi/N parameterisation.

    Only defined away from the removable singularities (lambda = 1, D12 = 0);
    used as an independent cross-check of diagonalize_block.  The branch
    pairing follows the sign of D12 so that each row is an eigenvector of D.
    """
    d = np.asarray(dmat.d, dtype=float)
    if abs(d[0, 1]) <= DEGENERATE_ATOL:
        raise ArgumentError("parameterisation is singular at D12 = 0")
    lam = _lambda_closed_form(d, dmat.delta_q, nu_q)
    if np.any(np.abs(lam - 1.0) < 1e-8):
        raise ArgumentError("parameterisation is singular at lambda = 1")
    s = np.sign(d[0, 1])
    d_q = (d[0, 0] - d[1, 1]) / (2.0 * d[0, 1])
    rows = np.zeros((2, 4))
    for t, tau in enumerate((+1.0, -1.0)):
        lt = lam[t]
        phi = d_q + tau * s * np.sqrt(1.0 + d_q ** 2)
        theta = (1.0 + lt) / (1.0 - lt)
        norm = 8.0 * lt * (1.0 - lt) ** -2 * (1.0 + d_q * phi)
        root = -np.sqrt(norm)  # negative branch matches the fixed sign convention
        y = phi / root
        z = 1.0 / root
        rows[t] = (-y * theta, -z * theta, y, z)
    return rows


def numeric_block_eigen(dmat: DiamagneticMatrix, nu_q: float
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-eigenvalues of the 4x4 block [[zeta, -eta], [eta, -zeta]].

    Returns the positive eigenvalue pair as lambdas (descending) and the
    eigenvector matrix; the spectrum is {+nu_tau/2, -nu_tau/2}.
    """
    d = np.asarray(dmat.d, dtype=float)
    a = 2.0 * dmat.delta_q * d[0, 0]
    b = 2.0 * dmat.delta_q * d[1, 1]
    g = 2.0 * dmat.delta_q * d[0, 1]
    zeta = 0.5 * np.array([[nu_q + a, g], [g, nu_q + b]])
    eta = 0.5 * np.array([[a, g], [g, b]])
    block = np.block([[zeta, -eta], [eta, -zeta]])
    vals, vecs = np.linalg.eig(block)
    if np.max(np.abs(vals.imag)) > 1e-9 * max(nu_q, 1.0):
        raise NumericError("pseudo-eigenproblem returned complex frequencies")
    vals = vals.real
    pos = np.sort(vals[vals > 0])[::-1]
    if pos.shape[0] != 2:
        raise NumericError(f"expected two positive pseudo-eigenvalues, got {pos.shape[0]}")
    lam = 2.0 * pos / nu_q
    return lam, vecs


def adapt_degenerate_branches(block: BogoliubovBlock, x_ff: np.ndarray
                              ) -> BogoliubovBlock:
    """Align branch directions with the coupling response when lambdas coincide.

    Inside a degenerate block every Bogoliubov rotation of the pair is
    equally valid; the displacement optimisation selects the eigenframe of
    the projected response, most unstable direction (most negative chi)
    on the '+' branch.  Non-degenerate blocks are returned unchanged.
    """
    if abs(block.lambdas[0] - block.lambdas[1]) > 1e-12 * max(1.0, block.lambdas[0]):
        return block
    sym = 0.5 * (x_ff + x_ff.conj().T).real
    vals, vecs = np.linalg.eigh(sym)
    u = vecs.T.copy()  # ascending eigenvalue: most unstable first -> '+'
    for k in range(2):
        pivot = u[k, 1] if abs(u[k, 1]) > 1e-12 else u[k, 0]
        if pivot < 0:
            u[k] = -u[k]
    coeffs = np.zeros((2, 4))
    for t in range(2):
        lt = block.lambdas[t]
        coeffs[t, 0:2] = -(lt + 1.0) / (2.0 * np.sqrt(lt)) * u[t]
        coeffs[t, 2:4] = -(lt - 1.0) / (2.0 * np.sqrt(lt)) * u[t]
    return BogoliubovBlock(nu_q=block.nu_q, delta_q=block.delta_q,
                           d_matrix=block.d_matrix, lambdas=block.lambdas,
                           coeffs=coeffs, u=u, d_q=block.d_q)


def verify_symplectic(block: BogoliubovBlock) -> float:
    """max-norm deviation of M K M^dag from K, K = diag(1, 1, -1, -1)."""
    m = block.mixing_matrix()
    k = np.diag([1.0, 1.0, -1.0, -1.0])
    return float(np.max(np.abs(m @ k @ m.conj().T - k)))


def coupling_g(block: BogoliubovBlock, f_sigma: tuple[Operator, Operator]
               ) -> tuple[Operator, Operator]:
    """g_tau = sum_sigma h_{sigma tau} (eps_sigma . f_q) for tau = +, -."""
    if f_sigma[0].dim != f_sigma[1].dim:
        raise ArgumentError("polarisation components act on different spaces")
    h = block.h
    out = []
    for t in range(2):
        acc = h[0, t] * f_sigma[0].entries + h[1, t] * f_sigma[1].entries
        out.append(Operator(acc))
    return tuple(out)


def exact_branch_coupling(block: BogoliubovBlock,
                          f_sigma: tuple[Operator, Operator]
                          ) -> tuple[Operator, Operator]:
    """G_tau = sum_sigma (w_{tau sigma} f_sigma - y_{tau sigma} f_sigma^dag).

    This is the operator multiplying c_tau^dag after substituting the
    inverse Bogoliubov transformation into the bare interaction; it equals
    the h-weighted g_tau for Hermitian f or unsqueezed branches.
    """
    if f_sigma[0].dim != f_sigma[1].dim:
        raise ArgumentError("polarisation components act on different spaces")
    out = []
    for t in range(2):
        acc = np.zeros_like(f_sigma[0].entries)
        for s in range(2):
            acc = acc + block.coeffs[t, s] * f_sigma[s].entries \
                - block.coeffs[t, 2 + s] * f_sigma[s].entries.conj().T
        out.append(Operator(acc))
    return tuple(out)


def lambda_coulomb_identity(block: BogoliubovBlock, chi_md: float) -> float:
    """Residual of lambda^2 = 1 - chi^{M^d} for Coulomb-gauge blocks (D = Gram).

    Valid for the polarisation aligned with a fully screening axis; the
    caller supplies chi^{M^d} computed from the same e, m, N, V, nu.
    """
    return float(abs(block.lambda_plus ** 2 - (1.0 - chi_md)))
