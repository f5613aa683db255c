"""Exact two-party quantum strategies.

States are dense density matrices on H_R (x) H_S.  Each party holds two
binary (+/-1 valued) observables; outcome bit 0 corresponds to eigenvalue +1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from . import rng as _rng
from .errors import StructuralError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
INVOLUTION_TOL = 1e-10
UNITARY_TOL = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Joint outcomes in sampling order; index k encodes (r, s) = (k >> 1, k & 1).
OUTCOME_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


def _as_square(matrix, name):
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def _check_hermitian(m, name, tol=HERMITIAN_TOL):
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise StructuralError(f"{name} is not Hermitian (max deviation {dev:.3e})")


def _readonly(m):
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Density matrix of the shared R-S system.

    ``dims`` is (d_R, d_S); it is (2, 2) for the qubit strategies and grows
    when an ancilla is appended by a gauge transform.
    """

    matrix: np.ndarray
    dims: tuple = (2, 2)

    def __post_init__(self):
        m = _as_square(self.matrix, "state")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or dims[0] * dims[1] != m.shape[0]:
            raise StructuralError(f"state of shape {m.shape} does not match party dims {dims}")
        _check_hermitian(m, "state")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise StructuralError(f"state trace is {tr.real:.15g}, expected 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < -PSD_TOL:
            raise StructuralError(f"state is not positive semidefinite (eigenvalue {lam:.3e})")
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, ket, dims=(2, 2)):
        psi = np.asarray(ket, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    def schmidt_coefficients(self):
        """Schmidt coefficients of a pure state, descending."""
        w, v = np.linalg.eigh(self.matrix)
        if w[-1] < 1 - 1e-9:
            raise StructuralError("Schmidt decomposition requested for a mixed state")
        psi = v[:, -1].reshape(self.dims)
        return np.linalg.svd(psi, compute_uv=False)

    def __eq__(self, other):
        if not isinstance(other, TwoQubitState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BinaryObservable:
    """A +/-1 valued observable O; effects are N_0 = (1+O)/2, N_1 = (1-O)/2."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, "observable")
        _check_hermitian(m, "observable")
        dev = np.max(np.abs(m @ m - np.eye(m.shape[0])))
        if dev > INVOLUTION_TOL:
            raise StructuralError(f"observable does not square to identity (deviation {dev:.3e})")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def effects(self):
        one = np.eye(self.dim)
        return (one + self.matrix) / 2, (one - self.matrix) / 2

    def __eq__(self, other):
        if not isinstance(other, BinaryObservable):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True)
class TwoQubitStrategy:
    state: TwoQubitState
    obs_R: tuple
    obs_S: tuple

    def __post_init__(self):
        obs_R = tuple(o if isinstance(o, BinaryObservable) else BinaryObservable(o) for o in self.obs_R)
        obs_S = tuple(o if isinstance(o, BinaryObservable) else BinaryObservable(o) for o in self.obs_S)
        if len(obs_R) != 2 or len(obs_S) != 2:
            raise StructuralError("each party needs exactly two observables")
        d_R, d_S = self.state.dims
        for name, obs, d in (("R", obs_R, d_R), ("S", obs_S, d_S)):
            for o in obs:
                if o.dim != d:
                    raise StructuralError(
                        f"observable of dimension {o.dim} on party {name} of dimension {d}")
        object.__setattr__(self, "obs_R", obs_R)
        object.__setattr__(self, "obs_S", obs_S)


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """Local unitaries plus an optional ancilla |xi> on R''S''.

    The ancilla is appended first (observables act on it as identity), then
    ``u_R`` and ``u_S`` act on the enlarged local spaces.  ``None`` means
    identity.
    """

    u_R: np.ndarray = None
    u_S: np.ndarray = None
    ancilla: np.ndarray = None
    ancilla_dims: tuple = (1, 1)

    def __post_init__(self):
        for name in ("u_R", "u_S"):
            u = getattr(self, name)
            if u is None:
                continue
            u = _as_square(u, name)
            dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            if dev > UNITARY_TOL:
                raise StructuralError(f"{name} is not unitary (deviation {dev:.3e})")
            object.__setattr__(self, name, _readonly(u))
        if self.ancilla is not None:
            xi = np.asarray(self.ancilla, dtype=complex).ravel()
            dims = tuple(int(d) for d in self.ancilla_dims)
            if dims[0] * dims[1] != xi.size:
                raise StructuralError(f"ancilla of size {xi.size} does not match dims {dims}")
            if abs(np.linalg.norm(xi) - 1) > 1e-12:
                raise StructuralError("ancilla state is not normalised")
            object.__setattr__(self, "ancilla", _readonly(xi))
            object.__setattr__(self, "ancilla_dims", dims)


def phi_plus():
    """|phi+> = (|00> + |11>)/sqrt(2)."""
    return TwoQubitState.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2))


def product_state(bit_R=0, bit_S=0):
    ket = np.zeros(4)
    ket[2 * bit_R + bit_S] = 1
    return TwoQubitState.from_ket(ket)


def canonical_strategy():
    """|phi+> with R: (sigma_z, sigma_x), S: ((sigma_z + sigma_x)/sqrt2, (sigma_z - sigma_x)/sqrt2)."""
    s = 1 / np.sqrt(2)
    return TwoQubitStrategy(
        phi_plus(),
        (PAULI_Z, PAULI_X),
        ((PAULI_Z + PAULI_X) * s, (PAULI_Z - PAULI_X) * s),
    )


def _effects(strategy):
    eR = np.array([strategy.obs_R[x].effects() for x in (0, 1)])  # [x, r, d, d]
    eS = np.array([strategy.obs_S[y].effects() for y in (0, 1)])
    return eR, eS


def born_probability(strategy, x, y, r, s):
    """p(r, s | x, y) = Tr[(N^R_{r|x} (x) N^S_{s|y}) rho]."""
    eR, eS = _effects(strategy)
    d_R, d_S = strategy.state.dims
    rho = strategy.state.matrix.reshape(d_R, d_S, d_R, d_S)
    p = np.einsum("ac,bd,cdab->", eR[x, r], eS[y, s], rho)
    return float(p.real)


def exact_probabilities(strategy):
    """All 16 probabilities as an array indexed [x, y, r, s]."""
    eR, eS = _effects(strategy)
    d_R, d_S = strategy.state.dims
    rho = strategy.state.matrix.reshape(d_R, d_S, d_R, d_S)
    p = np.einsum("xrac,ysbd,cdab->xyrs", eR, eS, rho).real
    # Round-off can leave entries like -1e-17.
    return np.clip(p, 0.0, 1.0)


def exact_correlation_table(strategy):
    from .correlations import CorrelationTable

    return CorrelationTable(exact_probabilities(strategy))


def outcomes_from_uniforms(probs, x, y, u):
    """Map uniforms to outcome pairs by inverting the joint CDF.

    ``probs`` is an [x, y, r, s] array; ``x``, ``y``, ``u`` are equal-length
    arrays.  Outcome k in OUTCOME_ORDER is chosen as the first k with
    u < cdf[k]; the last outcome absorbs any round-off shortfall.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    cdf = np.cumsum(np.asarray(probs).reshape(2, 2, 4), axis=-1)[x, y]
    k = (np.asarray(u)[..., None] >= cdf[..., :3]).sum(axis=-1)
    return (k >> 1).astype(np.int8), (k & 1).astype(np.int8)


def sample_round(strategy, x, y, seed, index):
    """Sample (r, s) for one round from the stream positioned at (seed, index)."""
    u = _rng.uniform(seed, index, _rng.TAG_OUTCOME)
    r, s = outcomes_from_uniforms(exact_probabilities(strategy), [x], [y], [u])
    return int(r[0]), int(s[0])


def sample_rounds(probs, x, y, seed, indices):
    """Vectorised :func:`sample_round` over many rounds sharing one table."""
    u = _rng.uniforms(seed, indices, _rng.TAG_OUTCOME)
    return outcomes_from_uniforms(probs, x, y, u)


def _embed_ancilla(strategy, xi, adims):
    d_R, d_S = strategy.state.dims
    a_R, a_S = adims
    big = np.kron(strategy.state.matrix, np.outer(xi, xi.conj()))
    # Index order R, S, R'', S'' -> R, R'', S, S'' (both ket and bra).
    big = big.reshape(d_R, d_S, a_R, a_S, d_R, d_S, a_R, a_S)
    big = big.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d_R * a_R * d_S * a_S, -1)
    state = TwoQubitState(big, (d_R * a_R, d_S * a_S))
    obs_R = tuple(np.kron(o.matrix, np.eye(a_R)) for o in strategy.obs_R)
    obs_S = tuple(np.kron(o.matrix, np.eye(a_S)) for o in strategy.obs_S)
    return TwoQubitStrategy(state, obs_R, obs_S)


def apply_gauge(strategy, g):
    """Move ``strategy`` along a direction the correlations cannot see."""
    if g.ancilla is not None:
        strategy = _embed_ancilla(strategy, g.ancilla, g.ancilla_dims)
    d_R, d_S = strategy.state.dims
    u_R = np.eye(d_R) if g.u_R is None else g.u_R
    u_S = np.eye(d_S) if g.u_S is None else g.u_S
    if u_R.shape[0] != d_R or u_S.shape[0] != d_S:
        raise StructuralError(
            f"gauge unitaries of dims ({u_R.shape[0]}, {u_S.shape[0]}) on parties ({d_R}, {d_S})")
    if g.u_R is None and g.u_S is None:
        return strategy
    U = np.kron(u_R, u_S)
    rho = U @ strategy.state.matrix @ U.conj().T
    return TwoQubitStrategy(
        TwoQubitState(_hermitize(rho), (d_R, d_S)),
        tuple(_hermitize(u_R @ o.matrix @ u_R.conj().T) for o in strategy.obs_R),
        tuple(_hermitize(u_S @ o.matrix @ u_S.conj().T) for o in strategy.obs_S),
    )


def _hermitize(m):
    # Conjugation preserves Hermiticity only up to round-off.
    return (m + m.conj().T) / 2


def random_unitary(dim, random_state=None):
    """Haar-random unitary."""
    return unitary_group.rvs(dim, random_state=random_state)


def random_gauge(random_state=None, ancilla_dims=None):
    """Haar unitaries on both parties, optionally with a random ancilla."""
    gen = np.random.default_rng(random_state)
    xi = None
    adims = (1, 1)
    if ancilla_dims is not None:
        adims = tuple(ancilla_dims)
        n = adims[0] * adims[1]
        xi = gen.normal(size=n) + 1j * gen.normal(size=n)
        xi /= np.linalg.norm(xi)
    return GaugeTransform(
        u_R=random_unitary(2 * adims[0], gen),
        u_S=random_unitary(2 * adims[1], gen),
        ancilla=xi,
        ancilla_dims=adims,
    )
