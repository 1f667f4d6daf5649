"""
qde_spectra.py - Quaternion QDE Lab
Right eigenvalues, eigenvectors and Jordan chains of quaternion matrices,
all computed on the complex adjoint φ(A).

Pairing rule for the 2n eigenvalues of φ(A):
  * a cluster a+bi with b > 0 of size k gives the standard eigenvalue a+bi, k-fold;
  * a real cluster of size k gives a real eigenvalue, k/2-fold;
  * clusters with b < 0 are the conjugate images and are skipped.

For real λ the generalized eigenspace of φ(A) is closed under the * map
c ↦ (−c̄₂; c̄₁), and φ(v), φ(v)* pull back to right-dependent vectors, so only
one member of each adjoint pair is kept.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from qde_config import CLUSTER_TOL, INDEPENDENCE_TOL, PERMUTATION_CAP, RANK_TOL, RESIDUAL_TOL
from qde_errors import (
    ClusteringError,
    ConvergenceError,
    DimensionError,
    InternalConsistencyError,
    SizeCapError,
)
from qde_linalg import QMatrix, QVector, mat_vec, phi_mat, phi_vec, star, unphi_vec
from qde_pdet import ddet
from qde_quat import ONE, Quaternion, as_quaternion, format_quaternion, q_inv, similar, standardize

logger = logging.getLogger("qde")

# φ(A) of an n ≤ 8 quaternion matrix
MAX_COMPLEX_DIM = 2 * PERMUTATION_CAP

# a candidate adjoint/chain vector whose residual off the current span is below this is dependent
_SPAN_CUT = 1e-6

# budget for how far QR scatters a k-fold defective eigenvalue: ~(eps·‖M‖)^(1/k)
_DEFECT_SPREAD = 100.0


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """v₁ … v_m with A v₁ = v₁ λ and A v_l − v_l λ = v_{l−1}."""

    eigenvalue: Quaternion
    vectors: Tuple[QVector, ...]

    def __len__(self) -> int:
        return len(self.vectors)

    def residuals(self, a: QMatrix) -> List[float]:
        out = []
        prev = None
        for v in self.vectors:
            r = mat_vec(a, v) - v.scale_right(self.eigenvalue)
            if prev is not None:
                r = r - prev
            out.append(r.norm())
            prev = v
        return out


@dataclass(frozen=True)
class SpectrumEntry:
    eigenvalue: Quaternion
    multiplicity: int
    chains: Tuple[Chain, ...]


@dataclass(frozen=True)
class Spectrum:
    entries: Tuple[SpectrumEntry, ...]

    def multiplicities(self) -> List[Tuple[Quaternion, int]]:
        return [(e.eigenvalue, e.multiplicity) for e in self.entries]

    def chains(self) -> List[Chain]:
        return [c for e in self.entries for c in e.chains]

    def chain_matrix(self) -> QMatrix:
        return QMatrix.from_columns([v for c in self.chains() for v in c.vectors])


# ---------------------------------------------------------------------------
# Complex eigenvalues: Hessenberg reduction + shifted QR
# ---------------------------------------------------------------------------


def _hessenberg(m: np.ndarray) -> np.ndarray:
    """Householder similarity to upper Hessenberg form."""
    h = np.array(m, dtype=complex, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0.0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
    return np.triu(h, -1)


def _eig2(b: np.ndarray) -> Tuple[complex, complex]:
    a, bb, c, d = b[0, 0], b[0, 1], b[1, 0], b[1, 1]
    half = (a + d) / 2.0
    disc = np.sqrt(((a - d) / 2.0) ** 2 + bb * c)
    return half + disc, half - disc


def _wilkinson_shift(b: np.ndarray) -> complex:
    mu1, mu2 = _eig2(b)
    d = b[1, 1]
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _shifted_qr(h: np.ndarray, max_sweeps: int) -> Tuple[List[complex], int]:
    h = h.copy()
    n = h.shape[0]
    eps = np.finfo(float).eps
    scale = max(float(np.max(np.abs(h))) if n else 0.0, np.finfo(float).tiny)
    eigs: List[complex] = []
    hi = n - 1
    sweeps = 0
    stall = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(h[0, 0]))
            break
        lo = hi
        while lo > 0:
            ref = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if abs(h[lo, lo - 1]) <= eps * (ref if ref > 0.0 else scale):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            stall = 0
            continue
        if lo == hi - 1:
            eigs.extend(complex(e) for e in _eig2(h[lo : hi + 1, lo : hi + 1]))
            hi -= 2
            stall = 0
            continue
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"shifted QR did not converge in {max_sweeps} sweeps ({len(eigs)}/{n} eigenvalues found)",
                partial=eigs,
            )
        sweeps += 1
        stall += 1
        mu = _wilkinson_shift(h[hi - 1 : hi + 1, hi - 1 : hi + 1])
        if stall % 10 == 0:
            # exceptional shift to break a cycle
            mu = h[hi, hi] + abs(h[hi, hi - 1]) * (0.75 + 0.5j)
        blk = h[lo : hi + 1, lo : hi + 1]
        eye = np.eye(blk.shape[0])
        q, r = np.linalg.qr(blk - mu * eye)
        h[lo : hi + 1, lo : hi + 1] = np.triu(r @ q + mu * eye, -1)
    return eigs, sweeps


def _rank_cut(values: np.ndarray, cut: float) -> int:
    return int(np.sum(values > cut))


def _null_space(m: np.ndarray, cut: float) -> np.ndarray:
    """Orthonormal kernel basis (columns); singular values <= cut count as zero."""
    _, s, vh = np.linalg.svd(m)
    r = _rank_cut(s, cut)
    return vh[r:].conj().T


def _single_linkage(values: Sequence[complex], radius: float) -> List[List[complex]]:
    values = list(values)
    parent = list(range(len(values)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i, v in enumerate(values):
        groups.setdefault(find(i), []).append(v)
    return list(groups.values())


def _accept_group(
    m: np.ndarray, group: List[complex], scale: float, cluster_tol: float, rank_tol: float
) -> bool:
    """
    A loose group is one eigenvalue only if it is a scattered defective cluster:
    as tight as QR can scatter a k-fold eigenvalue, and the kernels of
    (M − μI)^j at the centroid μ grow strictly with j until they reach k
    (a Jordan structure). Close but semisimple eigenvalues stall at j = 1 or 2
    and are split further.
    """
    k = len(group)
    mu = complex(np.mean(group))
    spread = max(abs(g - mu) for g in group)
    if spread <= cluster_tol:
        return True
    if spread > _DEFECT_SPREAD * (np.finfo(float).eps * scale) ** (1.0 / k):
        return False
    dim = m.shape[0]
    nm = m - mu * np.eye(dim)
    power = np.eye(dim, dtype=complex)
    previous = 0
    for j in range(1, k + 1):
        power = power @ nm
        s = np.linalg.svd(power, compute_uv=False)
        nullity = dim - _rank_cut(s, _kernel_cut(nm, j, rank_tol))
        if nullity >= k:
            return True
        if nullity <= previous:
            return False
        previous = nullity
    return False


def _cluster(
    m: np.ndarray, raw: List[complex], cluster_tol: float, rank_tol: float
) -> List[Tuple[complex, int]]:
    scale = max(1.0, float(np.linalg.norm(m, 2)))

    def split(members: List[complex], radius: float) -> List[List[complex]]:
        out = []
        for g in _single_linkage(members, radius):
            if len(g) == 1 or radius <= cluster_tol:
                out.append(g)
            elif _accept_group(m, g, scale, cluster_tol, rank_tol):
                if radius > cluster_tol * 10:
                    logger.info("merged %d eigenvalues within radius %.1e as one defective cluster", len(g), radius)
                out.append(g)
            else:
                out.extend(split(g, max(radius / 10.0, cluster_tol)))
        return out

    groups = split(raw, 0.1 * scale)
    clusters = []
    for g in groups:
        mu = complex(np.mean(g))
        if abs(mu.imag) <= cluster_tol:
            mu = complex(mu.real, 0.0)
        clusters.append((mu, len(g)))
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    return clusters


def complex_eig(
    m: np.ndarray,
    cluster_tol: float = CLUSTER_TOL,
    rank_tol: float = RANK_TOL,
    max_sweeps: Optional[int] = None,
) -> List[Tuple[complex, int]]:
    """Eigenvalues of a complex matrix with algebraic multiplicities (clustered)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"complex_eig needs a square matrix, got {m.shape}")
    n = m.shape[0]
    if n > MAX_COMPLEX_DIM:
        raise SizeCapError(f"complex_eig is capped at dimension {MAX_COMPLEX_DIM}, got {n}")
    if n == 0:
        return []
    raw, sweeps = _shifted_qr(_hessenberg(m), max_sweeps or 30 * n)
    logger.info("shifted QR: %d eigenvalues in %d sweeps", len(raw), sweeps)
    clusters = _cluster(m, raw, cluster_tol, rank_tol)
    if sum(k for _, k in clusters) != n:
        raise InternalConsistencyError("clustered multiplicities do not add up to the dimension")
    return clusters


# ---------------------------------------------------------------------------
# Right eigenvalues
# ---------------------------------------------------------------------------


def _check_square(a: QMatrix):
    if not a.is_square():
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    if a.rows > PERMUTATION_CAP:
        raise SizeCapError(f"spectral routines are capped at n <= {PERMUTATION_CAP}, got {a.rows}")


def right_eigenvalues(a: QMatrix, cluster_tol: float = CLUSTER_TOL) -> List[Tuple[Quaternion, int]]:
    _check_square(a)
    out = []
    for mu, k in complex_eig(phi_mat(a), cluster_tol=cluster_tol):
        if mu.imag > cluster_tol:
            out.append((Quaternion(mu.real, mu.imag, 0.0, 0.0), k))
        elif abs(mu.imag) <= cluster_tol:
            if k % 2:
                raise ClusteringError(
                    f"real eigenvalue {mu.real:.9g} of φ(A) has odd multiplicity {k}; "
                    "the clustering tolerance split an adjoint pair"
                )
            out.append((Quaternion(mu.real, 0.0, 0.0, 0.0), k // 2))
    total = sum(k for _, k in out)
    if total != a.rows:
        raise ClusteringError(f"found {total} right eigenvalues for a {a.rows}x{a.rows} matrix")
    out.sort(key=lambda e: (e[0].w, e[0].x))
    return out


# ---------------------------------------------------------------------------
# Eigenvectors and chains
# ---------------------------------------------------------------------------


def _normalizer(v: QVector, is_real: bool) -> Quaternion:
    """
    Right factor that fixes the scaling freedom: the first component that is not
    negligible becomes 1 when λ is real (any α commutes with it); for non-real λ
    only complex α are allowed, so its complex part becomes 1 (or the
    component becomes j when it has no complex part).
    """
    entries = v.entries()
    biggest = max(abs(q) for q in entries)
    if biggest == 0.0:
        return ONE
    q = next(q for q in entries if abs(q) > 1e-6 * biggest)
    if is_real:
        return q_inv(q)
    c1, c2 = q.pair()
    if abs(c1) > 1e-6 * biggest:
        return Quaternion.from_complex(1.0 / c1)
    return Quaternion.from_complex(np.conj(1.0 / c2))


def _orthonormal(columns: List[np.ndarray], dim: int) -> np.ndarray:
    if not columns:
        return np.zeros((dim, 0), dtype=complex)
    stack = np.column_stack(columns)
    u, s, _ = np.linalg.svd(stack, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((dim, 0), dtype=complex)
    return u[:, s > 1e-10 * s[0]]


def _echelon(basis: np.ndarray) -> np.ndarray:
    """Reduced column-echelon basis of the same subspace, unit columns."""
    m = np.array(basis.T, dtype=complex, copy=True)
    d, dim = m.shape
    if d == 0:
        return basis
    cut = 1e-8 * max(1.0, float(np.max(np.abs(m))))
    row = 0
    for col in range(dim):
        if row == d:
            break
        p = row + int(np.argmax(np.abs(m[row:, col])))
        if abs(m[p, col]) <= cut:
            continue
        m[[row, p]] = m[[p, row]]
        m[row] /= m[row, col]
        for r in range(d):
            if r != row:
                m[r] -= m[r, col] * m[row]
        row += 1
    out = m.T
    return out / np.linalg.norm(out, axis=0)


def _pick_independent(
    candidates: np.ndarray, span: List[np.ndarray], dim: int, is_real: bool
) -> List[np.ndarray]:
    """
    Greedily take candidate directions that leave the current span, largest
    residual first (the choice that grows the spanned volume most); for real λ
    each pick brings its adjoint partner into the span as well. Candidates are
    put in echelon form first so ties resolve toward coordinate vectors.
    """
    candidates = _echelon(candidates)
    picked = []
    span = list(span)
    while True:
        basis = _orthonormal(span, dim)
        resid = candidates - basis @ (basis.conj().T @ candidates)
        if resid.shape[1] == 0:
            break
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.argmax(norms))
        if norms[j] <= _SPAN_CUT:
            break
        w = resid[:, j] / norms[j]
        picked.append(w)
        span.append(w)
        if is_real:
            span.append(star(w))
    return picked


def _lam_complex(lam: Quaternion) -> complex:
    return complex(lam.w, lam.x)


def _kernel_cut(n_mat: np.ndarray, power: int, rank_tol: float) -> float:
    return rank_tol * max(1.0, float(np.linalg.norm(n_mat, 2))) ** power


def eigenvectors(
    a: QMatrix,
    lam: Quaternion,
    cluster_tol: float = CLUSTER_TOL,
    rank_tol: float = RANK_TOL,
) -> List[QVector]:
    """
    A maximal right-independent set of v with A v = v λ.
    For non-standard λ the vectors come from the standard form, right-multiplied
    by the similarity witness.
    """
    _check_square(a)
    lam = as_quaternion(lam)
    s = standardize(lam)
    is_real = s.x <= cluster_tol
    phi = phi_mat(a)
    dim = phi.shape[0]
    nm = phi - _lam_complex(s) * np.eye(dim)
    kernel = _null_space(nm, _kernel_cut(nm, 1, rank_tol))
    if kernel.shape[1] == 0:
        logger.info("no eigenvectors: %s is not a right eigenvalue", format_quaternion(lam))
        return []
    picks = _pick_independent(kernel, [], dim, is_real)
    vectors = []
    for c in picks:
        v = unphi_vec(c)
        vectors.append(v.scale_right(_normalizer(v, is_real)))

    if not s.almost_equal(lam, cluster_tol):
        witness = similar(s, lam, tol=max(cluster_tol, 1e-9)).witness
        vectors = [v.scale_right(witness) for v in vectors]
    return vectors


def chain_extend(
    a: QMatrix,
    lam: Quaternion,
    v: QVector,
    rank_tol: float = RANK_TOL,
    range_tol: float = 1e-7,
) -> Optional[QVector]:
    """
    Solve A u − u λ = v through (φ(A) − λI)φ(u) = φ(v); None when φ(v) is not
    in the range (least-squares residual above range_tol).
    """
    _check_square(a)
    lam = as_quaternion(lam)
    if not lam.is_complex(1e-12):
        raise ValueError(f"chain_extend needs a complex eigenvalue, got {format_quaternion(lam)}")
    phi = phi_mat(a)
    nm = phi - _lam_complex(lam) * np.eye(phi.shape[0])
    rhs = phi_vec(v)
    sol, *_ = np.linalg.lstsq(nm, rhs, rcond=rank_tol)
    residual = float(np.linalg.norm(nm @ sol - rhs))
    if residual > range_tol * max(1.0, float(np.linalg.norm(rhs))):
        return None
    return unphi_vec(sol)


def _chains_for(
    phi: np.ndarray, lam: Quaternion, mult: int, is_real: bool, rank_tol: float
) -> List[Chain]:
    dim = phi.shape[0]
    nm = phi - _lam_complex(lam) * np.eye(dim)
    expected = 2 * mult if is_real else mult

    powers = [np.eye(dim, dtype=complex)]
    kernels = [np.zeros((dim, 0), dtype=complex)]
    while True:
        powers.append(powers[-1] @ nm)
        p = len(powers) - 1
        kernels.append(_null_space(powers[p], _kernel_cut(nm, p, rank_tol)))
        size = kernels[p].shape[1]
        if size >= expected or size == kernels[p - 1].shape[1] or p >= dim:
            break
    index = len(powers) - 1
    if kernels[index].shape[1] != expected:
        raise InternalConsistencyError(
            f"generalized eigenspace of {format_quaternion(lam)} has dimension "
            f"{kernels[index].shape[1]}, expected {expected}"
        )

    # top vectors, longest chains first (rank-sequence construction)
    tops: List[Tuple[np.ndarray, int]] = []
    for level in range(index, 0, -1):
        span = [kernels[level - 1][:, i] for i in range(kernels[level - 1].shape[1])]
        for w, length in tops:
            x = powers[length - level] @ w
            span.append(x)
            if is_real:
                span.append(star(x))
        for w in _pick_independent(kernels[level], span, dim, is_real):
            tops.append((w, level))

    counted = sum(length for _, length in tops) * (2 if is_real else 1)
    if counted != expected:
        raise InternalConsistencyError(
            f"chain construction for {format_quaternion(lam)} produced {counted} vectors, expected {expected}"
        )

    chains = []
    for w, length in tops:
        vecs = [unphi_vec(powers[length - l] @ w) for l in range(1, length + 1)]
        alpha = _normalizer(vecs[0], is_real)
        chains.append(Chain(lam, tuple(v.scale_right(alpha) for v in vecs)))
    logger.info(
        "eigenvalue %s: chain lengths %s",
        format_quaternion(lam),
        [len(c) for c in chains],
    )
    return chains


def full_spectrum(
    a: QMatrix,
    cluster_tol: float = CLUSTER_TOL,
    rank_tol: float = RANK_TOL,
    independence_tol: float = INDEPENDENCE_TOL,
    residual_tol: float = RESIDUAL_TOL,
) -> Spectrum:
    _check_square(a)
    phi = phi_mat(a)
    entries = []
    for lam, mult in right_eigenvalues(a, cluster_tol):
        chains = _chains_for(phi, lam, mult, lam.x <= cluster_tol, rank_tol)
        for chain in chains:
            worst = max(chain.residuals(a))
            if worst > residual_tol:
                raise InternalConsistencyError(
                    f"chain residual {worst:.2e} above {residual_tol:.0e} "
                    f"for eigenvalue {format_quaternion(lam)}"
                )
        entries.append(SpectrumEntry(lam, mult, tuple(chains)))

    spectrum = Spectrum(tuple(entries))
    d = ddet(spectrum.chain_matrix())
    if d <= independence_tol:
        raise InternalConsistencyError(f"chain vectors are right-dependent (ddet = {d:.3e})")
    return spectrum
