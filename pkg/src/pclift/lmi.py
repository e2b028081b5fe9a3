"""Quadratic certificate machinery: per-edge matrix inequalities, a
semidefinite feasibility oracle, and a certified bisection for joint
spectral radius upper bounds.

An edge (a, b, i) of a graph paired with maps x -> r^-1 A_i x induces the
constraint gamma * A_i^T P_b A_i <= r^2 * P_a on symmetric unknowns P_s,
normalized by I <= P_s <= beta I. The feasibility oracle maximizes the
common margin of all blocks with a damped-Newton log-barrier method; it is
a heuristic on the infeasible side, and every certificate it returns is
re-checked eigenvalue by eigenvalue before anyone trusts it.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import BudgetError, GraphError
from .graphs import (
    Alphabet,
    Base,
    LabeledDigraph,
    LabeledEdge,
    NodeId,
    Word,
    is_path_complete,
    node_key,
    parse_node,
    render_node,
)
from .numerics import as_square, operator_norm, spectral_radius, sym_eigvals

try:  # pragma: no cover - exercised implicitly by which path runs
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)

except ImportError:  # pragma: no cover
    def _jit(fn):
        return fn


DEFAULT_BETA = 1e6
DEFAULT_SWEEPS = 400
_STALL_WINDOW = 50
_STALL_RTOL = 1e-3
_PRODUCT_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class MatrixSet:
    """Alphabet-indexed family of square matrices of a common dimension."""

    alphabet: Alphabet
    mats: tuple

    def __post_init__(self):
        mats = tuple(as_square(m) for m in self.mats)
        object.__setattr__(self, "mats", mats)
        if len(mats) != len(self.alphabet):
            raise GraphError("need exactly one matrix per alphabet label")
        if len({m.shape[0] for m in mats}) != 1:
            raise GraphError("all matrices must share one dimension")

    @classmethod
    def from_mapping(cls, mapping: dict, alphabet: Optional[Alphabet] = None) -> "MatrixSet":
        if alphabet is None:
            alphabet = Alphabet(tuple(sorted(mapping)))
        if set(mapping) != set(alphabet):
            raise GraphError(
                f"matrix labels {sorted(mapping)} do not match alphabet {list(alphabet)}"
            )
        return cls(alphabet, tuple(mapping[lab] for lab in alphabet))

    @property
    def n(self) -> int:
        return self.mats[0].shape[0]

    def matrix(self, label: str) -> np.ndarray:
        return self.mats[self.alphabet.index(label)]

    def items(self):
        return zip(self.alphabet.labels, self.mats)


def load_matrix_set(path: str) -> MatrixSet:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    mats = {lab: np.asarray(rows, dtype=float) for lab, rows in doc["matrices"].items()}
    ms = MatrixSet.from_mapping(mats)
    if "n" in doc and ms.n != int(doc["n"]):
        raise GraphError(f"{path}: declared dimension {doc['n']} but matrices are {ms.n}x{ms.n}")
    return ms


def save_matrix_set(ms: MatrixSet, path: str) -> None:
    doc = {"n": ms.n, "matrices": {lab: m.tolist() for lab, m in ms.items()}}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


@dataclass(frozen=True, eq=False)
class LmiProblem:
    """Graph + matrix family + scaling r (+ slope gamma, default 1)."""

    graph: LabeledDigraph
    matrices: MatrixSet
    r: float
    gamma: float = 1.0

    def __post_init__(self):
        if self.graph.alphabet != self.matrices.alphabet:
            raise GraphError("graph and matrix set use different alphabets")
        if not self.r > 0:
            raise GraphError("scaling r must be positive")
        if not self.gamma > 0:
            raise GraphError("gamma must be positive")


@dataclass(frozen=True, eq=False)
class EdgeConstraint:
    """gamma * A^T P_dst A <= r^2 * P_src, affine in the unknowns."""

    src: NodeId
    dst: NodeId
    label: str
    a_mat: np.ndarray
    r: float
    gamma: float


@dataclass(frozen=True, eq=False)
class NodeBound:
    """floor * I <= P_node <= cap * I."""

    node: NodeId
    floor: float
    cap: float


Constraint = Union[EdgeConstraint, NodeBound]


def assemble_lmi(p: LmiProblem, floor: float = 1.0, cap: float = DEFAULT_BETA) -> list:
    """One edge constraint per graph edge plus one bound per node, in
    deterministic sorted order."""
    out: list = [
        EdgeConstraint(e.src, e.dst, e.label, p.matrices.matrix(e.label), p.r, p.gamma)
        for e in p.graph.sorted_edges()
    ]
    out += [NodeBound(n, floor, cap) for n in p.graph.sorted_nodes()]
    return out


@dataclass(frozen=True, eq=False)
class QuadCertificate:
    """One symmetric matrix per node; eigenvalue floor checked on build."""

    entries: tuple  # ((node, matrix), ...) sorted by node render
    floor: float = 1.0

    def __post_init__(self):
        entries = tuple(
            (node, (as_square(m) + as_square(m).T) / 2.0)
            for node, m in sorted(self.entries, key=lambda kv: node_key(kv[0]))
        )
        object.__setattr__(self, "entries", entries)
        for node, m in entries:
            if sym_eigvals(m)[0] < self.floor - 1e-7 * max(1.0, abs(self.floor)):
                raise GraphError(
                    f"certificate entry {render_node(node)} violates the "
                    f"eigenvalue floor {self.floor}"
                )

    @classmethod
    def from_dict(cls, by_node: dict, floor: float = 1.0) -> "QuadCertificate":
        return cls(tuple(by_node.items()), floor)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def matrix(self, node: NodeId) -> np.ndarray:
        return self.as_dict()[node]

    def max_eig(self) -> float:
        return max(float(sym_eigvals(m)[-1]) for _, m in self.entries)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    worst_margin: float
    worst_constraint: str


def verify_certificate(
    p: LmiProblem, cert: QuadCertificate, tol: float, floor: float = 1.0
) -> VerifyResult:
    """Direct eigenvalue check of every inequality; trusts nothing upstream."""
    pm = cert.as_dict()
    worst = np.inf
    worst_name = "none"
    for node in p.graph.sorted_nodes():
        margin = float(sym_eigvals(pm[node])[0]) - floor
        if margin < worst:
            worst, worst_name = margin, f"bound@{render_node(node)}"
    rr = p.r * p.r
    for e in p.graph.sorted_edges():
        a = p.matrices.matrix(e.label)
        lhs = rr * pm[e.src] - p.gamma * (a.T @ pm[e.dst] @ a)
        margin = float(sym_eigvals(lhs)[0])
        if margin < worst:
            worst = margin
            worst_name = f"edge@{render_node(e.src)}->{render_node(e.dst)}:{e.label}"
    return VerifyResult(worst >= -tol, float(worst), worst_name)


# ---------------------------------------------------------------------------
# Feasibility oracle: log-barrier Newton on the margin-maximization program
#   maximize t  s.t.  r^2 P_a - gamma A^T P_b A >= t I  (per edge),
#                     floor I <= P_s <= cap I,  t <= tcap.
# Near-critical scalings this decides in a bounded number of Newton steps,
# which first-order projection schemes cannot (their linear rate collapses
# exactly where the bisection needs sharp answers). Everything runs in
# orthonormal svec coordinates so the kernels stay jittable.


def _svec_py(m, n, d):
    v = np.empty(d)
    k = 0
    s2 = np.sqrt(2.0)
    for i in range(n):
        v[k] = m[i, i]
        k += 1
        for j in range(i + 1, n):
            v[k] = s2 * m[i, j]
            k += 1
    return v


def _unsvec_py(v, n):
    m = np.zeros((n, n))
    k = 0
    inv = 1.0 / np.sqrt(2.0)
    for i in range(n):
        m[i, i] = v[k]
        k += 1
        for j in range(i + 1, n):
            m[i, j] = v[k] * inv
            m[j, i] = v[k] * inv
            k += 1
    return m


def _logdets_py(x, ea, eb, ka, sivec, r2, gamma, floor, cap, tcap, n, d):
    """(all blocks PD?, sum of log-dets). The strict-feasibility oracle for
    the line search."""
    npos = (x.shape[0] - 1) // d
    t = x[x.shape[0] - 1]
    total = 0.0
    tau = tcap - t
    if tau <= 0.0:
        return 0, 0.0
    total += np.log(tau)
    for k in range(ea.shape[0]):
        pa = ea[k] * d
        pb = eb[k] * d
        bvec = r2 * x[pa:pa + d] - gamma * (ka[k] @ x[pb:pb + d]) - t * sivec
        lam = np.linalg.eigvalsh(_unsvec_py(bvec, n))
        if lam[0] <= 0.0:
            return 0, 0.0
        for i in range(n):
            total += np.log(lam[i])
    for s in range(npos):
        ps = s * d
        lam = np.linalg.eigvalsh(_unsvec_py(x[ps:ps + d] - floor * sivec, n))
        if lam[0] <= 0.0:
            return 0, 0.0
        for i in range(n):
            total += np.log(lam[i])
        lam = np.linalg.eigvalsh(_unsvec_py(cap * sivec - x[ps:ps + d], n))
        if lam[0] <= 0.0:
            return 0, 0.0
        for i in range(n):
            total += np.log(lam[i])
    return 1, total


def _assemble_py(x, ea, eb, ka, basis, sivec, r2, gamma, floor, cap, tcap, mu, n, d, g, hess):
    """Gradient and Hessian of -t/mu + barrier at x (must be strictly
    feasible). For a block B(x) the barrier contributes -J^T svec(B^-1) to g
    and J^T SK(B^-1) J to H, with SK the symmetric Kronecker square."""
    nvar = x.shape[0]
    npos = (nvar - 1) // d
    t = x[nvar - 1]
    for i in range(nvar):
        g[i] = 0.0
        for j in range(nvar):
            hess[i, j] = 0.0
    sk = np.empty((d, d))
    for k in range(ea.shape[0]):
        pa = ea[k] * d
        pb = eb[k] * d
        bvec = r2 * x[pa:pa + d] - gamma * (ka[k] @ x[pb:pb + d]) - t * sivec
        gmat = np.linalg.inv(_unsvec_py(bvec, n))
        svg = _svec_py(gmat, n, d)
        for i in range(d):
            mi = gmat @ basis[i] @ gmat
            sk[:, i] = _svec_py(mi, n, d)
        sk = (sk + sk.T) * 0.5
        v = sk @ sivec
        if ea[k] == eb[k]:
            jl = r2 * np.eye(d) - gamma * ka[k]
            g[pa:pa + d] += -(jl.T @ svg)
            hess[pa:pa + d, pa:pa + d] += jl.T @ sk @ jl
            w = jl.T @ v
            hess[pa:pa + d, nvar - 1] += -w
            hess[nvar - 1, pa:pa + d] += -w
        else:
            kat = ka[k].T
            g[pa:pa + d] += -r2 * svg
            g[pb:pb + d] += gamma * (kat @ svg)
            hess[pa:pa + d, pa:pa + d] += (r2 * r2) * sk
            cross = (-r2 * gamma) * (sk @ ka[k])
            hess[pa:pa + d, pb:pb + d] += cross
            hess[pb:pb + d, pa:pa + d] += cross.T
            hess[pb:pb + d, pb:pb + d] += (gamma * gamma) * (kat @ sk @ ka[k])
            wa = -r2 * v
            wb = gamma * (kat @ v)
            hess[pa:pa + d, nvar - 1] += wa
            hess[nvar - 1, pa:pa + d] += wa
            hess[pb:pb + d, nvar - 1] += wb
            hess[nvar - 1, pb:pb + d] += wb
        g[nvar - 1] += sivec @ svg
        hess[nvar - 1, nvar - 1] += sivec @ v
    for s in range(npos):
        ps = s * d
        gmat = np.linalg.inv(_unsvec_py(x[ps:ps + d] - floor * sivec, n))
        g[ps:ps + d] += -_svec_py(gmat, n, d)
        for i in range(d):
            mi = gmat @ basis[i] @ gmat
            sk[:, i] = _svec_py(mi, n, d)
        hess[ps:ps + d, ps:ps + d] += (sk + sk.T) * 0.5
        gmat = np.linalg.inv(_unsvec_py(cap * sivec - x[ps:ps + d], n))
        g[ps:ps + d] += _svec_py(gmat, n, d)
        for i in range(d):
            mi = gmat @ basis[i] @ gmat
            sk[:, i] = _svec_py(mi, n, d)
        hess[ps:ps + d, ps:ps + d] += (sk + sk.T) * 0.5
    tau = tcap - t
    g[nvar - 1] += 1.0 / tau
    hess[nvar - 1, nvar - 1] += 1.0 / (tau * tau)
    g[nvar - 1] += -1.0 / mu


def _newton_py(x, ea, eb, ka, basis, sivec, r2, gamma, floor, cap, tcap,
               eps, mu0, nu, max_iters, n, d):
    """Damped-Newton path following. Returns (status, iters, t) with status
    0 = margin eps reached (x strictly feasible), 1 = iteration budget,
    2 = infeasibility verdict (max margin provably-ish below eps)."""
    nvar = x.shape[0]
    g = np.empty(nvar)
    hess = np.empty((nvar, nvar))
    mu = mu0
    mu_min = eps / (8.0 * nu)
    ok, ld = _logdets_py(x, ea, eb, ka, sivec, r2, gamma, floor, cap, tcap, n, d)
    if ok == 0:
        return 1, 0, x[nvar - 1]
    f = -x[nvar - 1] / mu - ld
    iters = 0
    while iters < max_iters:
        _assemble_py(x, ea, eb, ka, basis, sivec, r2, gamma, floor, cap, tcap,
                     mu, n, d, g, hess)
        ridge = 0.0
        for i in range(nvar):
            ridge += hess[i, i]
        ridge = 1e-13 * (ridge / nvar + 1.0)
        for i in range(nvar):
            hess[i, i] += ridge
        dx = np.linalg.solve(hess, -g)
        lam2 = -(g @ dx)
        iters += 1
        if lam2 < 0.01:
            t = x[nvar - 1]
            if t + 2.0 * mu * nu < eps:
                return 2, iters, t
            if mu <= mu_min:
                return 2, iters, t
            mu = max(mu * 0.2, mu_min)
            f = -x[nvar - 1] / mu - ld
            continue
        alpha = 1.0
        accepted = False
        slope = g @ dx
        for _ in range(60):
            xt = x + alpha * dx
            okt, ldt = _logdets_py(xt, ea, eb, ka, sivec, r2, gamma, floor, cap, tcap, n, d)
            if okt == 1:
                ft = -xt[nvar - 1] / mu - ldt
                if ft <= f + 1e-4 * alpha * slope:
                    for i in range(nvar):
                        x[i] = xt[i]
                    f = ft
                    ld = ldt
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            if mu <= mu_min:
                return 1, iters, x[nvar - 1]
            mu = max(mu * 0.2, mu_min)
            f = -x[nvar - 1] / mu - ld
            continue
        if x[nvar - 1] >= eps:
            return 0, iters, x[nvar - 1]
    return 1, max_iters, x[nvar - 1]


# Jit the helpers in place first so the Newton kernel resolves the jitted
# versions through module globals; without numba these rebinds are no-ops.
_svec_py = _jit(_svec_py)
_unsvec_py = _jit(_unsvec_py)
_logdets_py = _jit(_logdets_py)
_assemble_py = _jit(_assemble_py)
_newton = _jit(_newton_py)


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    feasible: bool
    certificate: Optional[QuadCertificate]
    reason: str  # "converged" | "stalled" | "budget"
    sweeps: int
    worst_margin: float


def _split_constraints(constraints: list):
    edges = [c for c in constraints if isinstance(c, EdgeConstraint)]
    bounds = [c for c in constraints if isinstance(c, NodeBound)]
    if len(edges) + len(bounds) != len(constraints):
        raise GraphError("unknown constraint type in list")
    if not bounds:
        raise GraphError("constraint list has no node bounds")
    rs = {c.r for c in edges}
    gammas = {c.gamma for c in edges}
    if len(rs) > 1 or len(gammas) > 1:
        raise GraphError("mixed r or gamma values in one constraint list")
    floors = {c.floor for c in bounds}
    caps = {c.cap for c in bounds}
    if len(floors) != 1 or len(caps) != 1:
        raise GraphError("node bounds must share floor and cap")
    return edges, bounds, floors.pop(), caps.pop()


def _svec_basis(n: int) -> np.ndarray:
    d = (n * (n + 1)) // 2
    basis = np.zeros((d, n, n))
    k = 0
    for i in range(n):
        basis[k, i, i] = 1.0
        k += 1
        for j in range(i + 1, n):
            basis[k, i, j] = basis[k, j, i] = 1.0 / np.sqrt(2.0)
            k += 1
    return basis


def sdp_feasible(
    constraints: list,
    max_iters: int = DEFAULT_SWEEPS,
    eps: Optional[float] = None,
    start: Optional[dict] = None,
) -> FeasibilityResult:
    """Search for symmetric matrices satisfying every constraint.

    An infeasible verdict is heuristic (absence of success), while a
    returned certificate has strictly positive measured margins; callers
    are still expected to re-verify it independently.
    """
    edges, bounds, floor, cap = _split_constraints(constraints)
    nodes = [b.node for b in bounds]
    index = {node: i for i, node in enumerate(nodes)}
    if edges:
        n = edges[0].a_mat.shape[0]
    elif start:
        n = np.asarray(next(iter(start.values()))).shape[0]
    else:
        n = 1
    d = (n * (n + 1)) // 2
    r = edges[0].r if edges else 1.0
    gamma = edges[0].gamma if edges else 1.0
    r2 = r * r
    max_a2 = max((operator_norm(e.a_mat) ** 2 for e in edges), default=1.0)
    scale = max(1.0, r2, gamma * max_a2)
    margin_req = eps if eps is not None else 1e-7 * scale

    basis = _svec_basis(n)
    sivec = _svec_py(np.eye(n), n, d)

    # Strictly feasible start: clip eigenvalues into the node box.
    pstack = np.empty((len(nodes), n, n))
    pad = 1e-9 * max(1.0, floor)
    for node, i in index.items():
        p0 = np.eye(n) * (floor + 1.0) if start is None or node not in start else np.asarray(
            start[node], float
        )
        p0 = (p0 + p0.T) / 2.0
        lam, q = np.linalg.eigh(p0)
        lam = np.clip(lam, floor + pad, cap * (1.0 - 1e-9))
        pstack[i] = (q * lam) @ q.T

    x = np.empty(len(nodes) * d + 1)
    for i in range(len(nodes)):
        x[i * d:(i + 1) * d] = _svec_py(pstack[i], n, d)

    ka_cache: dict = {}
    m = len(edges)
    ea = np.empty(m, dtype=np.int64)
    eb = np.empty(m, dtype=np.int64)
    ka = np.empty((max(m, 1), d, d))
    for k, e in enumerate(edges):
        ea[k] = index[e.src]
        eb[k] = index[e.dst]
        if e.label not in ka_cache:
            a = e.a_mat
            ka_cache[e.label] = np.stack(
                [_svec_py(a.T @ basis[j] @ a, n, d) for j in range(d)], axis=1
            )
        ka[k] = ka_cache[e.label]

    def margins_now() -> float:
        worst = np.inf
        for k in range(m):
            bvec = r2 * x[ea[k] * d:ea[k] * d + d] - gamma * (ka[k] @ x[eb[k] * d:eb[k] * d + d])
            lam0 = float(np.linalg.eigvalsh(_unsvec_py(bvec, n))[0])
            worst = min(worst, lam0)
        return worst

    def cert_from_x() -> QuadCertificate:
        by_node = {}
        for node, i in index.items():
            by_node[node] = _unsvec_py(x[i * d:(i + 1) * d], n)
        return QuadCertificate.from_dict(by_node, floor=floor)

    if m == 0:
        return FeasibilityResult(True, cert_from_x(), "converged", 0, np.inf)

    worst0 = margins_now()
    if worst0 >= margin_req:
        return FeasibilityResult(True, cert_from_x(), "converged", 0, float(worst0))

    tcap = max(1.0, r2 * cap)
    t0 = worst0 - max(0.05 * scale, 0.05 * abs(worst0))
    x[-1] = t0
    nu = float(n * m + 2 * n * len(nodes) + 1)
    mu0 = max(abs(t0) / nu, 10.0 * margin_req, 1e-3 * scale)
    try:
        status, iters, t = _newton(
            x, ea, eb, ka, basis, sivec, r2, gamma, floor, cap, tcap,
            margin_req, mu0, nu, max_iters, n, d,
        )
    except np.linalg.LinAlgError:  # pragma: no cover - ridge makes this rare
        return FeasibilityResult(False, None, "stalled", 0, float(worst0))
    if status == 0:
        return FeasibilityResult(True, cert_from_x(), "converged", int(iters), float(t))
    reason = "budget" if status == 1 else "converged"
    return FeasibilityResult(False, None, reason, int(iters), float(t))


# ---------------------------------------------------------------------------
# Certified bisection for the JSR upper bound.


@dataclass(frozen=True, eq=False)
class JsrResult:
    r_upper: float
    r_lower: float
    certificate: QuadCertificate
    bisection_iters: int
    tol: float
    verify_margin: float
    beta_active: bool


def rho_upper(
    graph: LabeledDigraph,
    matrices: MatrixSet,
    tol: float = 1e-4,
    gamma: float = 1.0,
    max_bisect: int = 60,
    sweeps: int = DEFAULT_SWEEPS,
    beta: float = DEFAULT_BETA,
    warn_not_path_complete: bool = True,
) -> JsrResult:
    """Bisection on the scaling r over [max rho(A_i), max ||A_i||].

    The upper end always holds an independently verified certificate
    (identity matrices work at the operator-norm endpoint), so the returned
    bound is sound no matter what the feasibility heuristic did.
    """
    if warn_not_path_complete and not is_path_complete(graph):
        warnings.warn("graph is not path-complete; the result does not bound the JSR")
    lo = max(spectral_radius(a) for _, a in matrices.items())
    hi = max(operator_norm(a) for _, a in matrices.items())
    nodes = graph.sorted_nodes()
    n = matrices.n
    identity_cert = QuadCertificate.from_dict({s: np.eye(n) for s in nodes})
    if hi <= 0.0:
        return JsrResult(0.0, lo, identity_cert, 0, tol, 0.0, False)

    def vtol(r: float) -> float:
        scale = max(1.0, r * r, max(operator_norm(a) ** 2 for _, a in matrices.items()))
        return 1e-9 * scale

    cert_hi = identity_cert
    check = verify_certificate(LmiProblem(graph, matrices, hi, gamma), cert_hi, vtol(hi))
    if not check.ok:  # numerically impossible, but never trust without looking
        hi = hi * (1.0 + 1e-12) + 1e-300
        check = verify_certificate(LmiProblem(graph, matrices, hi, gamma), cert_hi, vtol(hi))
    margin_hi = check.worst_margin
    iters = 0
    while hi - lo > tol and iters < max_bisect:
        mid = 0.5 * (lo + hi)
        problem = LmiProblem(graph, matrices, mid, gamma)
        res = sdp_feasible(
            assemble_lmi(problem, cap=beta),
            max_iters=sweeps,
            start={node: m.copy() for node, m in cert_hi.entries},
        )
        moved = False
        if res.feasible:
            vr = verify_certificate(problem, res.certificate, vtol(mid))
            if vr.ok:
                hi, cert_hi, margin_hi = mid, res.certificate, vr.worst_margin
                moved = True
        if not moved:
            lo = mid
        iters += 1
    beta_active = cert_hi.max_eig() >= beta * (1.0 - 1e-9)
    return JsrResult(hi, max(spectral_radius(a) for _, a in matrices.items()),
                     cert_hi, iters, tol, float(margin_hi), beta_active)


def save_certificate(result: JsrResult, path: str) -> None:
    doc = {
        "r_upper": result.r_upper,
        "r_lower": result.r_lower,
        "iterations": result.bisection_iters,
        "tol": result.tol,
        "verify_margin": result.verify_margin,
        "beta_active": result.beta_active,
        "certificate": {
            render_node(node): m.tolist() for node, m in result.certificate.entries
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Contraction horizons and the word graph they certify.


def contraction_horizon(matrices: MatrixSet, kmax: int, norm_slack: float = 1e-12) -> Optional[int]:
    """Smallest K <= kmax with every length-K product a strict contraction
    in operator norm, or None. Enumerates all |alphabet|^K products."""
    if kmax < 1:
        raise GraphError("kmax must be at least 1")
    width = len(matrices.alphabet)
    total = sum(width**k for k in range(1, kmax + 1))
    if total > _PRODUCT_BUDGET:
        raise BudgetError(f"would enumerate {total} matrix products (cap {_PRODUCT_BUDGET})")
    mats = [m for _, m in matrices.items()]
    level = [np.eye(matrices.n)]
    for k in range(1, kmax + 1):
        level = [p @ a for p in level for a in mats]
        if all(operator_norm(p) < 1.0 - norm_slack for p in level):
            return k
    return None


def horizon_graph(alphabet: Alphabet, horizon: int, root_name: str = "q") -> LabeledDigraph:
    """Words of length < K over the alphabet, with descent edges
    (u.i -> u, label i) and top edges (root -> u, any label) for |u| = K-1.
    K = 1 degenerates to the single-node all-loops graph."""
    if horizon < 1:
        raise GraphError("horizon must be at least 1")
    if len(alphabet) ** horizon > _PRODUCT_BUDGET:
        raise BudgetError("horizon graph would be too large")
    root = Base(root_name)

    def node_for(word: tuple) -> NodeId:
        return root if not word else Word(root, word)

    nodes = {root}
    edges = set()
    for length in range(1, horizon):
        for word in itertools.product(alphabet, repeat=length):
            nodes.add(node_for(word))
            edges.add(LabeledEdge(node_for(word), node_for(word[:-1]), word[-1]))
    for word in itertools.product(alphabet, repeat=horizon - 1):
        for lab in alphabet:
            edges.add(LabeledEdge(root, node_for(word), lab))
    return LabeledDigraph(alphabet, frozenset(nodes), frozenset(edges))


def word_product_certificate(
    matrices: MatrixSet, horizon: int, root_name: str = "q"
) -> QuadCertificate:
    """Explicit certificate P_w = A_w^T A_w on the horizon graph (root gets
    the identity). Valid at r = 1 with the floor relaxed to 0 whenever every
    length-K product contracts."""
    root = Base(root_name)
    prods: dict = {(): np.eye(matrices.n)}
    for length in range(1, horizon):
        for word in itertools.product(matrices.alphabet, repeat=length):
            prods[word] = prods[word[:-1]] @ matrices.matrix(word[-1])
    by_node = {
        (root if not w else Word(root, w)): p.T @ p for w, p in prods.items()
    }
    return QuadCertificate.from_dict(by_node, floor=0.0)


def load_certificate(path: str, alphabet: Alphabet) -> tuple:
    """Read back a saved JSR result as (r_upper, QuadCertificate)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    by_node = {
        parse_node(text, alphabet): np.asarray(rows, dtype=float)
        for text, rows in doc["certificate"].items()
    }
    return float(doc["r_upper"]), QuadCertificate.from_dict(by_node, floor=0.0)
