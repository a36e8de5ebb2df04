"""Identity and classification checks for generated algebras.

Every check here verifies a statement that holds exactly in exact arithmetic:
the Jacobi identity, bracket closure of the adjoint matrices, commutativity of
the derived subalgebra, vanishing of trace(A_i [A_j, A_k]) (Cartan), the
closed form of the lower central series, and the transfer-matrix product
identities. Residuals are therefore pure rounding noise and are tested
against tau_ver * scale^2 (bilinear identities) or tau_ver * scale^(L+2)
(depth-L series), with scale = max_k ||A_k||_inf.

Full evaluation is quintic or worse in N for some checks, so each has a
dimension cap above which a seeded uniform subsample of index tuples is
checked instead; reports say which mode ran. Sampled index draws come from a
SplitMix64 stream: tuples are drawn componentwise modulo N in blocks and
rejected until the ordering constraint holds, so the checked subset is a pure
function of the seed.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .linalg import commutator, inf_norm
from .rng import SplitMix64
from .sampler import LieAlgebraSample, transfer_matrix

__all__ = [
    "CHECK_NAMES",
    "JacobiReport",
    "BracketFactorization",
    "KillingReport",
    "SeriesReport",
    "CheckResult",
    "VerificationReport",
    "VerifyConfig",
    "bracket_factorization",
    "jacobi_residual",
    "jacobi_residual_at",
    "closure_residual",
    "derived_abelian_residual",
    "cartan_residual",
    "lower_central_series",
    "nilpotency_check",
    "t_product_residual",
    "verify_all",
]

CHECK_NAMES = ("jacobi", "closure", "derived", "killing", "series", "tproduct")

# rescale running series/power iterates outside this window to dodge overflow
_RESCALE_HI = 1e100
_RESCALE_LO = 1e-100


def _matrix_of(p) -> np.ndarray:
    return np.asarray(getattr(p, "matrix", p))


def _vector_of(n) -> np.ndarray:
    return np.asarray(getattr(n, "vector", n))


def _check_cubic(arr: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 3 or len(set(arr.shape)) != 1:
        raise ContractViolation(f"{name} must have shape (N, N, N), got {arr.shape}")
    return arr


def _chunk_rows(dim: int) -> int:
    return int(np.clip(2_000_000 // max(dim, 1), 1024, 65536))


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class JacobiReport:
    """Outcome of a Jacobi-identity scan.

    worst_indices is the zero-based (i, j, k, m) quadruple realizing
    max_residual, or None when no quadruple exists (N < 3 or empty sample
    request). max_residual is recomputed at that quadruple with the scalar
    formula, so ``jacobi_residual_at(f, *worst_indices)`` reproduces it
    exactly.
    """

    max_residual: float
    worst_indices: tuple[int, int, int, int] | None
    checked_count: int
    sampled: bool


@dataclass(frozen=True)
class BracketFactorization:
    """Rank-one factorization of one adjoint bracket.

    For the pair (i, j), m_vector is the column with n{j} at position i and
    -n{i} at position j, and value = P^2 @ m_vector (x) n equals
    commutator(A_i, A_j) up to rounding.
    """

    i: int
    j: int
    m_vector: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class KillingReport:
    """Killing form K{i,j} = trace(A_i A_j) plus the Cartan-criterion residual."""

    matrix: np.ndarray
    max_cartan_residual: float


@dataclass(frozen=True)
class SeriesReport:
    """Lower-central (or derived) series trace along one index path.

    Levels are numbered from 0 (the base bracket [A_j, A_k]); level L applies
    L further brackets. Norm and discrepancy values that overflow float64 are
    reported as inf, with exact natural-log companions in norm_logs and
    discrepancy_logs (-inf marks exact zeros); all pass/fail arithmetic uses
    the log values.
    """

    kind: str
    depth_tested: int
    terminated: bool
    max_norm_per_level: tuple[float, ...]
    discrepancy_per_level: tuple[float, ...]
    norm_logs: tuple[float, ...] = field(repr=False)
    discrepancy_logs: tuple[float, ...] = field(repr=False)
    max_discrepancy: float
    termination_level: int | None
    base_pair: tuple[int, int]
    inner_indices: tuple[int, ...]

    def discrepancies_within(self, tau_ver: float, scale: float) -> bool:
        """True when every level's |direct - closed| fits tau_ver * scale^(L+2)."""
        for level, dlog in enumerate(self.discrepancy_logs):
            if dlog == -math.inf:
                continue
            if scale == 0.0:
                return False
            if dlog > math.log(tau_ver) + (level + 2) * math.log(scale):
                return False
        return True

    def binding_level(self, tau_ver: float, scale: float) -> tuple[int, float, float]:
        """Level with the least margin, as (level, discrepancy, band)."""
        best = (0, 0.0, tau_ver * scale * scale)
        best_margin = -math.inf
        for level, dlog in enumerate(self.discrepancy_logs):
            if dlog == -math.inf:
                continue
            band_log = (
                math.log(tau_ver) + (level + 2) * math.log(scale)
                if scale > 0.0
                else -math.inf
            )
            margin = dlog - band_log
            if margin > best_margin:
                best_margin = margin
                best = (
                    level,
                    self.discrepancy_per_level[level],
                    math.exp(band_log) if band_log < 700 else math.inf,
                )
        return best


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    seconds: float
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """Aggregate of all requested checks on one sample."""

    dim: int
    field: str
    mode: str
    seed: int
    rng_id: str
    scale: float
    tau_ver: float
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        def num(x: float):
            return x if math.isfinite(x) else repr(x)

        return {
            "dim": self.dim,
            "field": self.field,
            "mode": self.mode,
            "seed": self.seed,
            "rng_id": self.rng_id,
            "scale": num(self.scale),
            "tau_ver": self.tau_ver,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "residual": num(c.residual),
                    "tolerance": num(c.tolerance),
                    "passed": c.passed,
                    "seconds": c.seconds,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class VerifyConfig:
    """Knobs for verify_all. Defaults keep N <= 100 interactive.

    tau_ver=None means "use the tolerance stored with the sample". Caps are
    the largest dimension at which a check still enumerates every index
    tuple; above a cap the named sample count is drawn instead. The series
    check runs min(dim, series_max_levels) levels on the canonical path and
    on one seeded random path.
    """

    tau_ver: float | None = None
    seed: int = 0
    checks: tuple[str, ...] = CHECK_NAMES
    jacobi_full_max_dim: int = 30
    jacobi_sample_count: int = 1_000_000
    closure_full_max_dim: int = 60
    closure_sample_pairs: int = 128
    derived_full_max_dim: int = 14
    derived_sample_count: int = 256
    cartan_full_max_dim: int = 60
    cartan_sample_count: int = 128
    tproduct_full_max_dim: int = 64
    tproduct_sample_pairs: int = 128
    series_max_levels: int = 64

    def __post_init__(self):
        unknown = set(self.checks) - set(CHECK_NAMES)
        if unknown:
            raise ContractViolation(
                f"unknown checks {sorted(unknown)}; valid names: {', '.join(CHECK_NAMES)}"
            )


# ---------------------------------------------------------------------------
# jacobi identity


def jacobi_residual_at(f: np.ndarray, i: int, j: int, k: int, m: int) -> float:
    """|J^A + J^B + J^C| at one index quadruple, scalar arithmetic."""
    total = f[i, j, :] @ f[k, :, m] + f[k, i, :] @ f[j, :, m] + f[j, k, :] @ f[i, :, m]
    return float(abs(total))


def _jacobi_chunk(f: np.ndarray, ii, jj, kk, mm) -> np.ndarray:
    dim = f.shape[0]
    cols = np.arange(dim)
    total = np.einsum("ql,ql->q", f[ii, jj], f[kk[:, None], cols[None, :], mm[:, None]])
    total = total + np.einsum(
        "ql,ql->q", f[kk, ii], f[jj[:, None], cols[None, :], mm[:, None]]
    )
    total = total + np.einsum(
        "ql,ql->q", f[jj, kk], f[ii[:, None], cols[None, :], mm[:, None]]
    )
    return np.abs(total)


def _all_quadruples(dim: int) -> np.ndarray:
    triples = np.array(list(itertools.combinations(range(dim), 3)), dtype=np.int64)
    quads = np.empty((triples.shape[0] * dim, 4), dtype=np.int64)
    quads[:, :3] = np.repeat(triples, dim, axis=0)
    quads[:, 3] = np.tile(np.arange(dim, dtype=np.int64), triples.shape[0])
    return quads


def _draw_quadruples(rng: SplitMix64, count: int, dim: int) -> np.ndarray:
    """Uniform (i<j<k, m) quadruples by componentwise draw and rejection."""
    out = np.empty((count, 4), dtype=np.int64)
    have = 0
    while have < count:
        batch = min(2_000_000, 8 * (count - have) + 1024)
        raw = rng.uint64s(4 * batch).reshape(batch, 4) % np.uint64(dim)
        cand = raw.astype(np.int64)
        keep = cand[(cand[:, 0] < cand[:, 1]) & (cand[:, 1] < cand[:, 2])]
        take = min(keep.shape[0], count - have)
        out[have : have + take] = keep[:take]
        have += take
    return out


def jacobi_residual(
    f: np.ndarray, mode: str = "full", count: int = 1_000_000, seed: int = 0
) -> JacobiReport:
    """Scan |J^A + J^B + J^C| over quadruples (i < j < k, m).

    mode="full" enumerates all of them (O(N^5) work); mode="sampled" draws
    `count` uniformly with the given seed. The reported maximum is recomputed
    at the winning quadruple with scalar dot products; ties go to the
    lexicographically smallest quadruple in full mode (enumeration order) and
    to the earliest draw in sampled mode.
    """
    f = _check_cubic(f, "structure tensor")
    if mode not in ("full", "sampled"):
        raise ContractViolation(f"mode must be 'full' or 'sampled', got {mode!r}")
    dim = f.shape[0]
    if dim < 3 or (mode == "sampled" and count == 0):
        return JacobiReport(0.0, None, 0, mode == "sampled")
    if mode == "full":
        quads = _all_quadruples(dim)
    else:
        quads = _draw_quadruples(SplitMix64(seed), count, dim)

    best_val = -1.0
    best_quad: tuple[int, int, int, int] | None = None
    step = _chunk_rows(dim)
    for start in range(0, quads.shape[0], step):
        part = quads[start : start + step]
        vals = _jacobi_chunk(f, part[:, 0], part[:, 1], part[:, 2], part[:, 3])
        pos = int(np.argmax(vals))
        if vals[pos] > best_val:
            best_val = float(vals[pos])
            best_quad = tuple(int(x) for x in part[pos])
    return JacobiReport(
        max_residual=jacobi_residual_at(f, *best_quad),
        worst_indices=best_quad,
        checked_count=quads.shape[0],
        sampled=(mode == "sampled"),
    )


# ---------------------------------------------------------------------------
# closure


def _draw_ordered_pairs(rng: SplitMix64, count: int, dim: int) -> np.ndarray:
    out = np.empty((count, 2), dtype=np.int64)
    have = 0
    while have < count:
        batch = min(2_000_000, 4 * (count - have) + 1024)
        raw = (rng.uint64s(2 * batch).reshape(batch, 2) % np.uint64(dim)).astype(np.int64)
        keep = raw[raw[:, 0] < raw[:, 1]]
        take = min(keep.shape[0], count - have)
        out[have : have + take] = keep[:take]
        have += take
    return out


def closure_residual(
    adj: np.ndarray,
    full_max_dim: int = 60,
    sample_pairs: int = 128,
    seed: int = 0,
) -> float:
    """max over pairs i < j of ||[A_i, A_j] - sum_k A_i{k,j} A_k||_inf.

    Every pair is checked up to full_max_dim; beyond that, sample_pairs
    seeded uniform pairs.
    """
    adj = _check_cubic(adj, "adjoint stack")
    dim = adj.shape[0]
    if dim < 2:
        return 0.0
    flat = adj.reshape(dim, dim * dim)
    worst = 0.0
    if dim <= full_max_dim:
        for i in range(dim - 1):
            rest = adj[i + 1 :]
            direct = adj[i] @ rest - rest @ adj[i]
            recon = np.tensordot(adj[i][:, i + 1 :], adj, axes=(0, 0))
            worst = max(worst, inf_norm(direct - recon))
        return worst
    pairs = _draw_ordered_pairs(SplitMix64(seed), sample_pairs, dim)
    cols = np.arange(dim)
    for start in range(0, pairs.shape[0], 8):
        ii = pairs[start : start + 8, 0]
        jj = pairs[start : start + 8, 1]
        a_i, a_j = adj[ii], adj[jj]
        direct = a_i @ a_j - a_j @ a_i
        coeff = adj[ii[:, None], cols[None, :], jj[:, None]]  # A_i{:, j}
        recon = (coeff @ flat).reshape(-1, dim, dim)
        worst = max(worst, inf_norm(direct - recon))
    return worst


# ---------------------------------------------------------------------------
# derived subalgebra


def _bracket_stack(adj: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    a, b = adj[left], adj[right]
    return a @ b - b @ a


def derived_abelian_residual(
    adj: np.ndarray,
    full_max_dim: int = 14,
    sample_count: int = 256,
    seed: int = 0,
) -> float:
    """max over pair-pairs of ||[[A_i,A_j],[A_k,A_l]]||_inf.

    All ((i<j),(k<l)) combinations up to full_max_dim, else sample_count
    seeded draws of pair-pair indices.
    """
    adj = _check_cubic(adj, "adjoint stack")
    dim = adj.shape[0]
    if dim < 2:
        return 0.0
    pairs = np.array(list(itertools.combinations(range(dim), 2)), dtype=np.int64)
    total = pairs.shape[0]
    worst = 0.0
    if dim <= full_max_dim:
        brackets = _bracket_stack(adj, pairs[:, 0], pairs[:, 1])
        step = max(1, 4_000_000 // (total * dim * dim) + 1)
        for start in range(0, total, step):
            chunk = brackets[start : start + step]
            cross = chunk[:, None] @ brackets[None, :] - brackets[None, :] @ chunk[:, None]
            worst = max(worst, inf_norm(cross))
        return worst
    rng = SplitMix64(seed)
    pp = rng.integers(sample_count, total)
    qq = rng.integers(sample_count, total)
    for start in range(0, sample_count, 8):
        lp, lq = pp[start : start + 8], qq[start : start + 8]
        b_p = _bracket_stack(adj, pairs[lp, 0], pairs[lp, 1])
        b_q = _bracket_stack(adj, pairs[lq, 0], pairs[lq, 1])
        worst = max(worst, inf_norm(b_p @ b_q - b_q @ b_p))
    return worst


# ---------------------------------------------------------------------------
# Killing form / Cartan criterion


def cartan_residual(
    adj: np.ndarray,
    full_max_dim: int = 60,
    sample_count: int = 128,
    seed: int = 0,
) -> KillingReport:
    """Killing form and max |trace(A_i [A_j, A_k])| (zero for solvable algebras)."""
    adj = _check_cubic(adj, "adjoint stack")
    dim = adj.shape[0]
    flat = adj.reshape(dim, dim * dim)
    flat_t = adj.transpose(0, 2, 1).reshape(dim, dim * dim)
    killing = flat @ flat_t.T
    killing.setflags(write=False)

    worst = 0.0
    if dim >= 2:
        if dim <= full_max_dim:
            pairs = np.array(list(itertools.combinations(range(dim), 2)), dtype=np.int64)
            step = max(1, 2_000_000 // (dim * dim))
            for start in range(0, pairs.shape[0], step):
                part = pairs[start : start + step]
                brackets = _bracket_stack(adj, part[:, 0], part[:, 1])
                traces = flat @ brackets.transpose(0, 2, 1).reshape(part.shape[0], -1).T
                worst = max(worst, inf_norm(traces))
        else:
            rng = SplitMix64(seed)
            ii = rng.integers(sample_count, dim)
            pairs = _draw_ordered_pairs(rng, sample_count, dim)
            for start in range(0, sample_count, 8):
                sl = slice(start, start + 8)
                brackets = _bracket_stack(adj, pairs[sl, 0], pairs[sl, 1])
                traces = np.einsum("cab,cba->c", adj[ii[sl]], brackets)
                worst = max(worst, float(np.abs(traces).max()))
    return KillingReport(matrix=killing, max_cartan_residual=worst)


# ---------------------------------------------------------------------------
# series


def bracket_factorization(p, null, i: int, j: int) -> BracketFactorization:
    """Closed form of [A_i, A_j] as P^2 @ m (x) n, indices zero-based."""
    pm = _matrix_of(p)
    n = _vector_of(null)
    dim = pm.shape[0]
    if not (0 <= i < dim and 0 <= j < dim):
        raise ContractViolation(f"pair ({i}, {j}) out of range for dimension {dim}")
    m_vector = np.zeros(dim, dtype=n.dtype)
    m_vector[i] = n[j]
    m_vector[j] = m_vector[j] - n[i]  # j == i leaves an exact zero
    value = (pm @ pm) @ np.outer(m_vector, n)
    return BracketFactorization(i=i, j=j, m_vector=m_vector, value=value)


def canonical_series_path(dim: int, depth: int) -> tuple[tuple[int, int], tuple[int, ...]]:
    """Fixed path: base pair (2,3) (or (1,2) at N=2), every inner index 1, one-based."""
    base = (1, 2) if dim >= 3 else (0, 1)
    return base, (0,) * depth


def lower_central_series(
    adj: np.ndarray,
    p,
    null,
    depth: int | None = None,
    base_pair: tuple[int, int] | None = None,
    inner_indices: tuple[int, ...] | None = None,
) -> SeriesReport:
    """Cross-check nested brackets against their closed form, level by level.

    Level 0 is D_0 = [A_j, A_k] for the base pair; level L is
    D_L = [A_{i_L}, D_{L-1}] along the inner index path. The closed form is
    C_0 = P^2 @ m_{k,j} (x) n and C_L = n{i_L} * (P @ C_{L-1}). Both
    recursions are linear, so a shared running rescale (applied identically
    to D and C once their magnitude leaves [1e-100, 1e100]) keeps the
    comparison meaningful far beyond float64 range; true norms and
    discrepancies are recovered through an accumulated log factor.

    The default path is the canonical one. Termination is decided on the
    closed-form iterate, which is free of the direct path's cancellation
    noise: a level terminates the series iff its closed form is exactly
    zero. Strictly upper-triangular P reaches an exact zero (triangular
    zero patterns are exact under floating-point products) by level N - 2
    at the latest, while a generic sample's closed form decays smoothly
    but never vanishes, however far below tau_ver * scale its direct-path
    norm sinks into rounding noise.
    """
    adj = _check_cubic(adj, "adjoint stack")
    pm = _matrix_of(p)
    n = _vector_of(null)
    dim = adj.shape[0]
    if depth is None:
        depth = dim
    if depth < 0:
        raise ContractViolation("depth must be nonnegative")
    if base_pair is None or inner_indices is None:
        canon_pair, canon_inner = canonical_series_path(dim, depth)
        base_pair = base_pair if base_pair is not None else canon_pair
        inner_indices = inner_indices if inner_indices is not None else canon_inner
    if len(inner_indices) != depth:
        raise ContractViolation("inner_indices length must equal depth")
    j, k = base_pair
    if not (0 <= j < dim and 0 <= k < dim):
        raise ContractViolation(f"base pair {base_pair} out of range")

    direct = commutator(adj[j], adj[k])
    closed = bracket_factorization(pm, n, j, k).value
    log_factor = 0.0

    norms: list[float] = []
    norm_logs: list[float] = []
    discs: list[float] = []
    disc_logs: list[float] = []
    termination_level: int | None = None

    def record(level: int) -> bool:
        """Log current level; True when both iterates are exactly zero."""
        nonlocal termination_level
        nd = inf_norm(direct)
        dd = inf_norm(direct - closed)
        nlog = math.log(nd) + log_factor if nd > 0.0 else -math.inf
        dlog = math.log(dd) + log_factor if dd > 0.0 else -math.inf
        norm_logs.append(nlog)
        disc_logs.append(dlog)
        norms.append(math.exp(nlog) if nlog < 700 else math.inf)
        discs.append(math.exp(dlog) if dlog < 700 else math.inf)
        if termination_level is None and inf_norm(closed) == 0.0:
            termination_level = level
        return nd == 0.0 and inf_norm(closed) == 0.0

    dead = record(0)
    for level in range(1, depth + 1):
        if dead:
            # exact zero propagates; later levels are identically zero
            norms.append(0.0)
            discs.append(0.0)
            norm_logs.append(-math.inf)
            disc_logs.append(-math.inf)
            continue
        idx = inner_indices[level - 1]
        if not 0 <= idx < dim:
            raise ContractViolation(f"inner index {idx} out of range")
        direct = commutator(adj[idx], direct)
        closed = n[idx] * (pm @ closed)
        peak = max(inf_norm(direct), inf_norm(closed))
        if peak > _RESCALE_HI or (0.0 < peak < _RESCALE_LO):
            direct = direct / peak
            closed = closed / peak
            log_factor += math.log(peak)
        dead = record(level)

    finite_discs = [d for d in discs if math.isfinite(d)]
    return SeriesReport(
        kind="lower_central",
        depth_tested=depth,
        terminated=termination_level is not None,
        max_norm_per_level=tuple(norms),
        discrepancy_per_level=tuple(discs),
        norm_logs=tuple(norm_logs),
        discrepancy_logs=tuple(disc_logs),
        max_discrepancy=max(finite_discs) if finite_discs else 0.0,
        termination_level=termination_level,
        base_pair=(int(j), int(k)),
        inner_indices=tuple(int(x) for x in inner_indices),
    )


def nilpotency_check(p, tau_ver: float = 1e-9) -> bool:
    """True iff ||P^N||_inf <= tau_ver * ||P||_inf^N, by repeated squaring.

    Computed on P/||P||_inf with per-step renormalization and an accumulated
    log factor, so the answer is meaningful at dimensions where ||P||^N
    overflows float64.
    """
    pm = _matrix_of(p)
    dim = pm.shape[0]
    base_norm = inf_norm(pm)
    if base_norm == 0.0:
        return True
    base = pm / base_norm
    base_log = 0.0
    result: np.ndarray | None = None
    result_log = 0.0
    exponent = dim
    while exponent:
        if exponent & 1:
            result = base.copy() if result is None else result @ base
            result_log += base_log
            norm = inf_norm(result)
            if norm == 0.0:
                return True
            if norm > _RESCALE_HI or norm < _RESCALE_LO:
                result = result / norm
                result_log += math.log(norm)
        exponent >>= 1
        if exponent:
            base = base @ base
            base_log *= 2
            norm = inf_norm(base)
            if norm == 0.0:
                # the leading bit still multiplies this zero into the result
                return True
            if norm > _RESCALE_HI or norm < _RESCALE_LO:
                base = base / norm
                base_log += math.log(norm)
    assert result is not None
    return math.log(inf_norm(result)) + result_log <= math.log(tau_ver)


# ---------------------------------------------------------------------------
# transfer-matrix products


def t_product_residual(
    p,
    null,
    adj: np.ndarray,
    full_max_dim: int = 64,
    sample_pairs: int = 128,
    seed: int = 0,
) -> float:
    """max over (j,k) of ||T_j T_k - n{j} T_k||_inf and ||A_j T_k - n{j} A_k||_inf."""
    adj = _check_cubic(adj, "adjoint stack")
    n = _vector_of(null)
    dim = adj.shape[0]
    if n.shape != (dim,):
        raise ContractViolation("null vector length must match adjoint dimension")
    worst = 0.0
    if dim <= full_max_dim:
        tmats = np.stack([transfer_matrix(n, k) for k in range(dim)])
        right = tmats.transpose(1, 0, 2).reshape(dim, dim * dim)  # (b; k,c)
        step = max(1, 4_000_000 // dim**3)
        for family in (tmats, adj):
            for start in range(0, dim, step):
                sl = slice(start, min(start + step, dim))
                rows = family[sl]
                prod = (rows.reshape(-1, dim) @ right).reshape(
                    rows.shape[0], dim, dim, dim
                )  # (j, a, k, c)
                expect = n[sl, None, None, None] * family.transpose(1, 0, 2)[None]
                worst = max(worst, inf_norm(prod - expect))
        return worst
    rng = SplitMix64(seed)
    jj = rng.integers(sample_pairs, dim)
    kk = rng.integers(sample_pairs, dim)
    for j, k in zip(jj, kk):
        t_j = transfer_matrix(n, int(j))
        t_k = transfer_matrix(n, int(k))
        worst = max(worst, inf_norm(t_j @ t_k - n[j] * t_k))
        worst = max(worst, inf_norm(adj[j] @ t_k - n[j] * adj[k]))
    return worst


# ---------------------------------------------------------------------------
# aggregate runner


def _random_series_path(
    rng: SplitMix64, dim: int, depth: int
) -> tuple[tuple[int, int], tuple[int, ...]]:
    if dim >= 3:
        while True:
            j, k = (int(x) for x in rng.integers(2, dim))
            if j < k:
                break
    else:
        j, k = 0, 1
    inner = tuple(int(x) for x in rng.integers(depth, dim))
    return (j, k), inner


def verify_all(sample: LieAlgebraSample, config: VerifyConfig | None = None) -> VerificationReport:
    """Run the configured checks and collect residual/tolerance/time per check.

    Check failures become report entries; nothing raises. The bilinear checks
    (jacobi, closure, derived, killing, tproduct) pass at tau_ver * scale^2;
    the series check requires per-level closed-form agreement on the
    canonical path and one seeded random path, plus the mode-appropriate
    termination behavior (generic: none within the tested depth; nilpotent:
    termination and ||P^N||_inf <= tau_ver * ||P||_inf^N).
    """
    cfg = config or VerifyConfig()
    tau = cfg.tau_ver if cfg.tau_ver is not None else sample.tolerances.tau_ver
    scale = sample.scale
    band2 = tau * scale * scale
    dim = sample.dim
    results: list[CheckResult] = []

    def run(name: str, fn) -> None:
        if name not in cfg.checks:
            return
        begin = time.perf_counter()
        residual, tolerance, passed, detail = fn()
        results.append(
            CheckResult(
                name=name,
                residual=residual,
                tolerance=tolerance,
                passed=passed,
                seconds=time.perf_counter() - begin,
                detail=detail,
            )
        )

    def check_jacobi():
        mode = "full" if dim <= cfg.jacobi_full_max_dim else "sampled"
        rep = jacobi_residual(
            sample.structure, mode=mode, count=cfg.jacobi_sample_count, seed=cfg.seed
        )
        detail = f"{mode}, {rep.checked_count} quadruples"
        if rep.worst_indices is not None:
            detail += f", worst at {rep.worst_indices}"
        return rep.max_residual, band2, rep.max_residual <= band2, detail

    def check_closure():
        res = closure_residual(
            sample.adjoint,
            full_max_dim=cfg.closure_full_max_dim,
            sample_pairs=cfg.closure_sample_pairs,
            seed=cfg.seed,
        )
        mode = (
            f"full, {dim * (dim - 1) // 2} pairs"
            if dim <= cfg.closure_full_max_dim
            else f"sampled, {cfg.closure_sample_pairs} pairs"
        )
        return res, band2, res <= band2, mode

    def check_derived():
        res = derived_abelian_residual(
            sample.adjoint,
            full_max_dim=cfg.derived_full_max_dim,
            sample_count=cfg.derived_sample_count,
            seed=cfg.seed,
        )
        pairs = dim * (dim - 1) // 2
        mode = (
            f"full, {pairs * pairs} pair-pairs"
            if dim <= cfg.derived_full_max_dim
            else f"sampled, {cfg.derived_sample_count} pair-pairs"
        )
        return res, band2, res <= band2, mode

    def check_killing():
        rep = cartan_residual(
            sample.adjoint,
            full_max_dim=cfg.cartan_full_max_dim,
            sample_count=cfg.cartan_sample_count,
            seed=cfg.seed,
        )
        asym = inf_norm(rep.matrix - rep.matrix.T)
        residual = max(rep.max_cartan_residual, asym)
        mode = "full" if dim <= cfg.cartan_full_max_dim else f"sampled, {cfg.cartan_sample_count} triples"
        detail = f"{mode}; cartan {rep.max_cartan_residual:.3e}, asymmetry {asym:.3e}"
        return residual, band2, residual <= band2, detail

    def check_series():
        depth = min(dim, cfg.series_max_levels)
        canonical = lower_central_series(sample.adjoint, sample.p, sample.null, depth=depth)
        pair, inner = _random_series_path(SplitMix64(cfg.seed), dim, depth)
        random_path = lower_central_series(
            sample.adjoint,
            sample.p,
            sample.null,
            depth=depth,
            base_pair=pair,
            inner_indices=inner,
        )
        ok = True
        notes = []
        for label, rep in (("canonical", canonical), ("random", random_path)):
            ok &= rep.discrepancies_within(tau, scale)
            notes.append(f"{label}: terminated={rep.terminated}")
        if sample.mode == "generic":
            termination_ok = not canonical.terminated and not random_path.terminated
        else:
            nil = nilpotency_check(sample.p, tau_ver=tau)
            termination_ok = canonical.terminated and random_path.terminated and nil
            notes.append(f"nilpotency_check={nil}")
        ok &= termination_ok
        level, disc, band = max(
            (rep.binding_level(tau, scale) for rep in (canonical, random_path)),
            key=lambda t: (t[1] / t[2]) if t[2] > 0 else (0.0 if t[1] == 0.0 else math.inf),
        )
        detail = f"depth {depth}, binding level {level}; " + "; ".join(notes)
        return disc, band, bool(ok), detail

    def check_tproduct():
        res = t_product_residual(
            sample.p,
            sample.null,
            sample.adjoint,
            full_max_dim=cfg.tproduct_full_max_dim,
            sample_pairs=cfg.tproduct_sample_pairs,
            seed=cfg.seed,
        )
        mode = (
            f"full, {dim * dim} pairs"
            if dim <= cfg.tproduct_full_max_dim
            else f"sampled, {cfg.tproduct_sample_pairs} pairs"
        )
        return res, band2, res <= band2, mode

    run("jacobi", check_jacobi)
    run("closure", check_closure)
    run("derived", check_derived)
    run("killing", check_killing)
    run("series", check_series)
    run("tproduct", check_tproduct)

    return VerificationReport(
        dim=dim,
        field=sample.field,
        mode=sample.mode,
        seed=sample.seed,
        rng_id=sample.rng_id,
        scale=scale,
        tau_ver=tau,
        checks=tuple(results),
    )
