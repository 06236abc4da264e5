"""A small geometric-programming engine.

Posynomial modeling, monomial condensation of posynomial-vs-posynomial
constraints, and a log-space barrier solver.  Signomial programs are solved
by repeatedly condensing the right-hand sides at the current iterate and
solving the resulting GP; every condensed GP is an inner approximation of
the original feasible set, so iterates stay feasible and the objective never
increases.
"""

from __future__ import annotations

import enum
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize, nnls

from . import kernels
from .errors import Infeasible, NonPositiveAnchor

log = logging.getLogger(__name__)

Number = Union[int, float]


class Monomial:
    """``coeff * prod_i x_i ** a_i`` with ``coeff > 0``."""

    __slots__ = ("coeff", "exponents")

    def __init__(self, coeff: float = 1.0, exponents: Optional[Mapping[str, float]] = None):
        coeff = float(coeff)
        if not coeff > 0 or not math.isfinite(coeff):
            raise ValueError(f"monomial coefficient must be positive, got {coeff}")
        self.coeff = coeff
        self.exponents = {k: float(v) for k, v in (exponents or {}).items() if v != 0}

    def __call__(self, x: Mapping[str, float]) -> float:
        val = self.coeff
        for k, a in self.exponents.items():
            val *= x[k] ** a
        return val

    def __mul__(self, other):
        if isinstance(other, Monomial):
            ex = dict(self.exponents)
            for k, a in other.exponents.items():
                ex[k] = ex.get(k, 0.0) + a
            return Monomial(self.coeff * other.coeff, ex)
        if isinstance(other, Posynomial):
            return other * self
        return Monomial(self.coeff * float(other), self.exponents)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Monomial):
            return self * other ** -1
        return Monomial(self.coeff / float(other), self.exponents)

    def __rtruediv__(self, other):
        return Monomial(float(other), {}) * self ** -1

    def __pow__(self, a: float):
        return Monomial(self.coeff ** a, {k: v * a for k, v in self.exponents.items()})

    def __add__(self, other):
        return Posynomial([self]) + other

    __radd__ = __add__

    def __repr__(self):
        ex = " ".join(f"{k}^{v:g}" for k, v in sorted(self.exponents.items()))
        return f"Monomial({self.coeff:g} {ex})"

    def log_gradient(self) -> dict:
        return dict(self.exponents)

    @property
    def variables(self) -> set:
        return set(self.exponents)


class Posynomial:
    """A nonempty sum of monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial]):
        terms = tuple(terms)
        if not terms:
            raise ValueError("a posynomial needs at least one term")
        self.terms = terms

    def __call__(self, x: Mapping[str, float]) -> float:
        return sum(m(x) for m in self.terms)

    def __add__(self, other):
        if isinstance(other, Posynomial):
            return Posynomial(self.terms + other.terms)
        if isinstance(other, Monomial):
            return Posynomial(self.terms + (other,))
        if other == 0:
            return self
        return Posynomial(self.terms + (Monomial(float(other)),))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Posynomial):
            return Posynomial(a * b for a in self.terms for b in other.terms)
        return Posynomial(t * other for t in self.terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Posynomial):
            raise TypeError("cannot divide by a posynomial")
        return Posynomial(t / other for t in self.terms)

    def __len__(self):
        return len(self.terms)

    def simplify(self) -> "Posynomial":
        """Merge terms with identical exponents."""
        merged = {}
        for t in self.terms:
            key = tuple(sorted(t.exponents.items()))
            merged[key] = merged.get(key, 0.0) + t.coeff
        return Posynomial(Monomial(c, dict(k)) for k, c in merged.items())

    def __repr__(self):
        return " + ".join(repr(t) for t in self.terms)

    @property
    def variables(self) -> set:
        out = set()
        for t in self.terms:
            out |= t.variables
        return out


def as_posynomial(p) -> Posynomial:
    if isinstance(p, Posynomial):
        return p
    if isinstance(p, Monomial):
        return Posynomial([p])
    return Posynomial([Monomial(float(p))])


def variables(names: str):
    """``variables("x y")`` -> monomials ``x``, ``y``."""
    out = tuple(Monomial(1.0, {n: 1.0}) for n in names.split())
    return out[0] if len(out) == 1 else out


class ConstraintKind(str, enum.Enum):
    POSY_LEQ_ONE = "posy<=1"
    POSY_LEQ_POSY = "posy<=posy"


@dataclass
class SignomialConstraint:
    """``lhs <= rhs_monomial * prod_k factor_k ** power_k``.

    Without factors this is an ordinary GP constraint ``lhs / rhs_monomial <= 1``.
    Factor powers must lie in ``[0, 1]``.
    """

    lhs: Posynomial
    rhs_monomial: Monomial = field(default_factory=Monomial)
    factors: tuple = ()
    name: str = ""

    def __post_init__(self):
        self.lhs = as_posynomial(self.lhs)
        fac = []
        for f, a in self.factors:
            a = float(a)
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"fractional power must lie in [0, 1], got {a}")
            if a > 0.0:
                fac.append((as_posynomial(f), a))
        self.factors = tuple(fac)

    @property
    def kind(self) -> ConstraintKind:
        return ConstraintKind.POSY_LEQ_POSY if self.factors else ConstraintKind.POSY_LEQ_ONE

    def rhs(self, x) -> float:
        val = self.rhs_monomial(x)
        for f, a in self.factors:
            val *= f(x) ** a
        return val

    def ratio(self, x) -> float:
        """``lhs / rhs``; feasible iff ``<= 1`` (infinite once the rhs underflows)."""
        rhs = self.rhs(x)
        return self.lhs(x) / rhs if rhs > 0.0 else math.inf

    def condensed(self, anchor: Mapping[str, float]) -> Posynomial:
        """GP form ``lhs / monomial(rhs) <= 1`` with the rhs condensed at ``anchor``."""
        m = self.rhs_monomial
        for f, a in self.factors:
            m = m * condense_posynomial(f, anchor) ** a
        return self.lhs / m

    @property
    def variables(self) -> set:
        out = self.lhs.variables | self.rhs_monomial.variables
        for f, _ in self.factors:
            out |= f.variables
        return out


def leq(lhs, rhs=1.0, name: str = "") -> SignomialConstraint:
    """Build ``lhs <= rhs``.

    ``rhs`` may be a number, monomial, posynomial, or a sequence of
    ``(posynomial_or_monomial, power)`` pairs whose product forms the rhs.
    """
    if isinstance(rhs, (int, float)):
        return SignomialConstraint(as_posynomial(lhs), Monomial(float(rhs)), (), name)
    if isinstance(rhs, Monomial):
        return SignomialConstraint(as_posynomial(lhs), rhs, (), name)
    if isinstance(rhs, Posynomial):
        if len(rhs) == 1:
            return SignomialConstraint(as_posynomial(lhs), rhs.terms[0], (), name)
        return SignomialConstraint(as_posynomial(lhs), Monomial(), ((rhs, 1.0),), name)
    mono = Monomial()
    fac = []
    for f, a in rhs:
        if isinstance(f, Monomial) or (isinstance(f, Posynomial) and len(f) == 1):
            f = f if isinstance(f, Monomial) else f.terms[0]
            mono = mono * f ** a
        elif isinstance(f, (int, float)):
            mono = mono * float(f) ** a
        else:
            fac.append((f, a))
    return SignomialConstraint(as_posynomial(lhs), mono, tuple(fac), name)


@dataclass
class GpProblem:
    """Minimize a posynomial over positive variables subject to constraints."""

    objective: Posynomial
    constraints: list
    variables: tuple = ()
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        self.objective = as_posynomial(self.objective)
        used = set(self.objective.variables)
        for c in self.constraints:
            used |= c.variables
        if not self.variables:
            self.variables = tuple(sorted(used))
        missing = used - set(self.variables)
        if missing:
            raise ValueError(f"undeclared variables: {sorted(missing)}")

    @property
    def is_gp(self) -> bool:
        return all(c.kind is ConstraintKind.POSY_LEQ_ONE for c in self.constraints)

    def max_ratio(self, x) -> float:
        vals = [c.ratio(x) for c in self.constraints]
        for k, (lo, hi) in self.bounds.items():
            if lo is not None:
                vals.append(lo / x[k])
            if hi is not None:
                vals.append(x[k] / hi)
        return max(vals) if vals else 0.0


class SolveStatus(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"


@dataclass
class SolveReport:
    x_star: dict
    objective_value: float
    kkt_residual: float
    outer_iterations: int
    inner_iterations: int
    status: SolveStatus
    history: list = field(default_factory=list)
    duals: Optional[np.ndarray] = None
    stop_reason: str = ""

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


# ---------------------------------------------------------------------------
# condensation

def condense_posynomial(p, anchor: Mapping[str, float]) -> Monomial:
    """Best local monomial under-estimator of ``p`` at ``anchor``.

    Weighted AM-GM with weights ``beta_k = u_k(anchor) / p(anchor)``; the
    result matches ``p`` in value and log-gradient at the anchor and lies
    below ``p`` everywhere else.
    """
    p = as_posynomial(p)
    for k in p.variables:
        v = anchor.get(k)
        if v is None or not v > 0:
            raise NonPositiveAnchor(f"anchor value for {k!r} must be positive, got {v}")
    if len(p) == 1:
        return p.terms[0]
    vals = np.array([m(anchor) for m in p.terms])
    total = vals.sum()
    beta = vals / total
    log_c = 0.0
    ex: dict = {}
    for m, b in zip(p.terms, beta):
        if b <= 0.0:
            continue
        log_c += b * (math.log(m.coeff) - math.log(b))
        for k, a in m.exponents.items():
            ex[k] = ex.get(k, 0.0) + b * a
    mono = Monomial(math.exp(log_c), ex)
    # remove the rounding drift so the under-estimator is exact at the anchor
    return Monomial(mono.coeff * total / mono(anchor), mono.exponents)


# ---------------------------------------------------------------------------
# compiled log-space GP

@dataclass
class _Compiled:
    A: np.ndarray
    logc: np.ndarray
    starts: np.ndarray
    names: tuple

    @property
    def m(self) -> int:
        return len(self.starts) - 2

    def F(self, u: np.ndarray) -> np.ndarray:
        y = self.A @ u + self.logc
        heads = self.starts[:-1]
        gmax = np.maximum.reduceat(y, heads)
        return gmax + np.log(np.add.reduceat(np.exp(y - np.repeat(gmax, np.diff(self.starts))),
                                             heads))


def _compile(objective: Posynomial, posys: Sequence[Posynomial], names: Sequence[str]) -> _Compiled:
    idx = {n: i for i, n in enumerate(names)}
    rows, logc, starts = [], [], [0]
    for p in (objective, *posys):
        for m in p.terms:
            row = np.zeros(len(names))
            for k, a in m.exponents.items():
                row[idx[k]] = a
            rows.append(row)
            logc.append(math.log(m.coeff))
        starts.append(len(rows))
    return _Compiled(np.ascontiguousarray(np.array(rows, dtype=float)),
                     np.array(logc, dtype=float), np.array(starts, dtype=np.intp), tuple(names))


def _gp_posys(problem: GpProblem) -> list:
    posys = [c.lhs / c.rhs_monomial for c in problem.constraints]
    for k, (lo, hi) in problem.bounds.items():
        x = Monomial(1.0, {k: 1.0})
        if lo is not None:
            posys.append(as_posynomial(lo / x))
        if hi is not None:
            posys.append(as_posynomial(x / hi))
    return posys


NEWTON_EPS = 1e-8
MAX_CENTER_STEPS = 60
BARRIER_MU = 10.0
STALL_PATIENCE = 5
TINY = 1e-300
#: constraint values (log scale) closer to 0 than this count as on the boundary
INTERIOR_MARGIN = 1e-12
#: constraint violation (as ``lhs/rhs - 1``) accepted from the local polish
POLISH_FEAS_TOL = 1e-9


def _newton_center(cp: _Compiled, u: np.ndarray, t: float, max_steps: int):
    """Damped Newton centering; returns ``(u, steps, grad)``."""
    return kernels.newton_center(cp.A, cp.logc, cp.starts, u, t, NEWTON_EPS,
                                 int(min(max_steps, MAX_CENTER_STEPS)))


def _polish(cp: _Compiled, u: np.ndarray, t: float, grad, steps: int = 4):
    """Full Newton steps that shrink the stationarity residual.

    At large ``t`` the barrier value is too coarse for a line search to
    resolve, but the gradient still converges quadratically.
    """
    k = 0
    gnorm = float(np.max(np.abs(grad))) if grad is not None else math.inf
    for _ in range(steps):
        phi, g, H, _ = kernels.barrier_eval(cp.A, cp.logc, cp.starts, u, t)
        if g is None:
            break
        try:
            du = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            break
        un = u + du
        _, gn, _, _ = kernels.barrier_eval(cp.A, cp.logc, cp.starts, un, t)
        k += 1
        if gn is None:
            break
        gn_norm = float(np.max(np.abs(gn)))
        if not gn_norm < 0.5 * gnorm:
            break
        u, grad, gnorm = un, gn, gn_norm
    return u, grad, k


def _barrier(cp: _Compiled, u0: np.ndarray, gap_tol: float, t0: float = 1.0,
             max_newton: int = 2000):
    """Barrier method from a strictly feasible ``u0``.  Returns ``(u, t, newton, ok, grad)``."""
    m = max(cp.m, 1)
    u = np.array(u0, dtype=float)
    t = t0
    total = 0
    while True:
        u, k, grad = _newton_center(cp, u, t, max_newton - total)
        total += k
        if m / t < gap_tol:
            u, grad, k = _polish(cp, u, t, grad)
            return u, t, total + k, True, grad
        if total >= max_newton:
            return u, t, total, False, grad
        t *= BARRIER_MU


def _phase1(cp: _Compiled, u0: np.ndarray, box: float = 30.0, floor: float = 1.0):
    """Minimize ``s`` subject to ``F_i(u) <= s``; returns ``(u, s)``.

    The search is boxed to ``|u - u0| <= box`` and ``s >= -floor`` so the
    auxiliary problem is bounded.
    """
    n = cp.A.shape[1]
    counts = np.diff(cp.starts)
    A = np.zeros((cp.A.shape[0], n + 1))
    A[:, :n] = cp.A
    A[cp.starts[1]:, n] = -1.0
    # objective: s alone
    obj_row = np.zeros((1, n + 1))
    obj_row[0, n] = 1.0
    rows = [obj_row, A[cp.starts[1]:]]
    logc = [np.zeros(1), cp.logc[cp.starts[1]:]]
    extra = []
    extra_c = []
    floor_row = np.zeros(n + 1)
    floor_row[n] = -1.0
    extra.append(floor_row)
    extra_c.append(-floor)
    for k in range(n):
        up = np.zeros(n + 1)
        up[k] = 1.0
        extra.append(up)
        extra_c.append(-u0[k] - box)
        dn = np.zeros(n + 1)
        dn[k] = -1.0
        extra.append(dn)
        extra_c.append(u0[k] - box)
    A1 = np.ascontiguousarray(np.vstack(rows + [np.array(extra)]))
    logc1 = np.concatenate(logc + [np.array(extra_c)])
    starts1 = [0, 1]
    for c in counts[1:]:
        starts1.append(starts1[-1] + c)
    for _ in extra:
        starts1.append(starts1[-1] + 1)
    cp1 = _Compiled(A1, logc1, np.array(starts1, dtype=np.intp), cp.names + ("__s",))
    F0 = cp.F(u0)[1:]
    s0 = max(float(np.max(F0)) if len(F0) else 0.0, -floor + 0.5) + 1.0
    v0 = np.append(u0, s0)
    v, _, _, _, _ = _barrier(cp1, v0, gap_tol=1e-6)
    u = v[:n]
    return u, float(np.max(cp.F(u)[1:])) if cp.m else -math.inf


def _group_gradients(cp: _Compiled, u: np.ndarray) -> np.ndarray:
    """Rows: gradient of each log-sum-exp group (objective first)."""
    y = cp.A @ u + cp.logc
    heads = cp.starts[:-1]
    counts = np.diff(cp.starts)
    gmax = np.repeat(np.maximum.reduceat(y, heads), counts)
    e = np.exp(y - gmax)
    w = e / np.repeat(np.add.reduceat(e, heads), counts)
    return np.add.reduceat(w[:, None] * cp.A, heads, axis=0)


def kkt_residual(cp: _Compiled, u: np.ndarray, duals: np.ndarray) -> float:
    """``max(|grad F0 + sum lam_i grad F_i|) + max(lam_i |F_i|)`` in log space."""
    G = _group_gradients(cp, u)
    F = cp.F(u)
    stat = G[0] + duals @ G[1:] if cp.m else G[0]
    comp = float(np.max(duals * np.abs(F[1:]))) if cp.m else 0.0
    return float(np.max(np.abs(stat))) + comp


def _report(cp: _Compiled, objective: Posynomial, u: np.ndarray, t: float, newton: int,
            ok: bool, grad, outer: int = 1) -> SolveReport:
    x = {n: math.exp(min(float(v), 709.0)) for n, v in zip(cp.names, u)}
    F = cp.F(u)
    # a centred iterate has F < 0; the floor only guards round-off at the boundary
    duals = 1.0 / (t * np.maximum(-F[1:], 1e-300)) if cp.m else np.zeros(0)
    kkt = kkt_residual(cp, u, duals)
    if cp.m:
        # the barrier duals carry the centering error; refit them by NNLS
        G = _group_gradients(cp, u)
        active = -F[1:] < 1e3 * max(cp.m / t, 1e-12)
        if np.any(active):
            lam = np.zeros(cp.m)
            lam[active] = nnls(G[1:][active].T, -G[0])[0]
            kkt_fit = kkt_residual(cp, u, lam)
            if kkt_fit < kkt:
                duals, kkt = lam, kkt_fit
    return SolveReport(x_star=x, objective_value=objective(x), kkt_residual=kkt,
                       outer_iterations=outer, inner_iterations=newton,
                       status=SolveStatus.CONVERGED if ok else SolveStatus.MAX_ITER,
                       duals=duals)


def _solve_posys(objective: Posynomial, posys: list, names: tuple, init: Mapping[str, float],
                 tol: float, t0: float = 1.0) -> SolveReport:
    cp = _compile(objective, posys, names)
    u0 = np.array([math.log(init.get(n, 1.0)) for n in names])
    F = cp.F(u0)[1:]
    if cp.m and np.max(F) >= -1e-12:
        u0, s = _phase1(cp, u0)
        if not s < 0.0:
            raise Infeasible(f"phase 1 could not find a strictly feasible point (max F = {s:.3g})")
    u, t, newton, ok, grad = _barrier(cp, u0, tol, t0=t0)
    return _report(cp, objective, u, t, newton, ok, grad)


def solve_gp(problem: GpProblem, init: Optional[Mapping[str, float]] = None,
             tol: float = 1e-9) -> SolveReport:
    """Solve a pure GP with the log-barrier method.

    ``tol`` bounds the duality gap of the log-objective, i.e. the relative
    suboptimality.  A phase-1 problem supplies a strictly feasible start when
    ``init`` is missing or infeasible; :class:`Infeasible` is raised when it
    fails.
    """
    if not problem.is_gp:
        raise ValueError("solve_gp needs posynomial <= 1 constraints only; use solve_signomial")
    init = dict(init or {})
    return _solve_posys(problem.objective, _gp_posys(problem), problem.variables, init, tol)


def condensed_gp(problem: GpProblem, anchor: Mapping[str, float]) -> GpProblem:
    cons = [SignomialConstraint(c.condensed(anchor), Monomial(), (), c.name)
            for c in problem.constraints]
    return GpProblem(problem.objective, cons, problem.variables, dict(problem.bounds))


def format_gp(problem: GpProblem) -> str:
    """Plain-text dump: one monomial per line as ``coeff var:exp ...``."""
    buf = io.StringIO()

    def dump(p):
        for m in as_posynomial(p).terms:
            ex = " ".join(f"{k}:{v:.12g}" for k, v in sorted(m.exponents.items()))
            buf.write(f"{m.coeff:.12g} {ex}".rstrip() + "\n")

    buf.write("# objective\n")
    dump(problem.objective)
    for i, c in enumerate(problem.constraints):
        buf.write(f"# constraint {c.name or i} <= 1\n")
        dump(c.lhs / c.rhs_monomial)
    for k, (lo, hi) in problem.bounds.items():
        buf.write(f"# bounds {k} {lo} {hi}\n")
    return buf.getvalue()


def _sp_phase1(problem: GpProblem, x: dict, max_rounds: int = 50) -> dict:
    """Drive ``x`` into the strict interior of the signomial feasible set."""
    names = problem.variables
    best = problem.max_ratio(x)
    for _ in range(max_rounds):
        if best < 1.0:
            return x
        gp = condensed_gp(problem, x)
        cp = _compile(gp.objective, _gp_posys(gp), names)
        u0 = np.array([math.log(x[n]) for n in names])
        u, _ = _phase1(cp, u0)
        xn = {n: float(math.exp(v)) for n, v in zip(names, u)}
        val = problem.max_ratio(xn)
        if val >= best * (1.0 - 1e-9):
            break
        x, best = xn, val
    if best < 1.0:
        return x
    raise Infeasible(f"could not find a feasible starting point (max ratio {best:.6g})")


def polish_signomial(problem: GpProblem, x: Mapping[str, float], tol: float = 1e-12):
    """Local SQP refinement of a near-optimal point in log variables.

    Returns ``(x, objective)`` of the refined point, or ``None`` when the
    refinement fails, is not better, or violates a constraint by more than
    ``POLISH_FEAS_TOL``.
    """
    names = problem.variables
    cons = problem.constraints

    def unpack(u):
        # SLSQP line searches may probe far outside the useful range
        return dict(zip(names, np.exp(np.clip(u, -690.0, 690.0))))

    def fun(u):
        with np.errstate(all="ignore"):
            val = np.log(problem.objective(unpack(u)))
        return float(val) if np.isfinite(val) else 1e300

    def slack(u):
        xx = unpack(u)
        with np.errstate(all="ignore"):
            out = np.array([np.log(c.rhs(xx)) - np.log(c.lhs(xx)) for c in cons], dtype=float)
        return np.where(np.isfinite(out), out, -1e6)

    u0 = np.log([max(x[n], TINY) for n in names])
    try:
        res = minimize(fun, u0, method="SLSQP", constraints=[{"type": "ineq", "fun": slack}],
                       options={"ftol": tol, "maxiter": 500})
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        log.debug("polish failed: %s", exc)
        return None
    if not res.success or not np.all(np.isfinite(res.x)):
        return None
    xn = unpack(res.x)
    fn = problem.objective(xn)
    if problem.max_ratio(xn) > 1.0 + POLISH_FEAS_TOL or not fn < problem.objective(x):
        return None
    return xn, fn


def _interior(cp: _Compiled, u0: np.ndarray) -> np.ndarray:
    u, s = _phase1(cp, u0)
    if not s < 0.0:
        raise Infeasible("condensed problem lost strict feasibility")
    return u


def solve_signomial(problem: GpProblem, init: Mapping[str, float], tol: float = 1e-6,
                    max_outer: int = 100, inner_tol: float = 1e-10,
                    dump: Optional[io.TextIOBase] = None,
                    patience: int = STALL_PATIENCE, polish: bool = True) -> SolveReport:
    """Successive condensation for posynomial-vs-posynomial constraints.

    Each outer iteration condenses every rhs (fractional-power factors are
    condensed first, then raised to their power) at the current iterate and
    solves the GP.  An iterate is only accepted if it does not raise the
    objective.  Stops when both the relative objective change and the
    log-space anchor movement fall below ``tol`` (``stop_reason`` "anchor"),
    or when the objective change alone stays below ``tol`` for ``patience``
    consecutive iterations ("objective").  The second rule covers optima on
    the boundary of the positive orthant, where a variable keeps shrinking
    geometrically without affecting the objective.  Condensation converges
    linearly, slowly so near such boundaries; with ``polish`` the result is
    finished by :func:`polish_signomial` (``stop_reason`` gains "+polish"
    when that improves it).
    """
    names = problem.variables
    x = {n: float(init.get(n, 1.0)) for n in names}
    if problem.max_ratio(x) >= 1.0:
        x = _sp_phase1(problem, x)
    f = problem.objective(x)
    history = [f]
    newton = 0
    status = SolveStatus.MAX_ITER
    kkt = math.inf
    duals = None
    outer = 0
    last_rel = 1.0
    stalled = 0
    reason = ""
    while outer < max_outer:
        outer += 1
        gp = condensed_gp(problem, x)
        if dump is not None:
            dump.write(f"## outer iteration {outer}\n")
            dump.write(format_gp(gp))
        cp = _compile(gp.objective, _gp_posys(gp), names)
        u0 = np.array([math.log(x[n]) for n in names])
        if cp.m and np.max(cp.F(u0)[1:]) >= -INTERIOR_MARGIN:
            # anchor sits on the boundary of its own condensation; step inside first
            u0 = _interior(cp, u0)
        # early condensations need not be solved to full accuracy
        gap = min(max(inner_tol, 1e-2 * last_rel), 1e-3)
        try:
            u, t, k, ok, grad = _barrier(cp, u0, gap)
        except ArithmeticError:
            # rounding put the start outside the barrier's own domain
            u, t, k, ok, grad = _barrier(cp, _interior(cp, u0), gap)
        newton += k
        rep = _report(cp, gp.objective, u, t, k, ok, grad)
        # variables heading to the orthant boundary must stay representable
        xn = {n: max(v, TINY) for n, v in rep.x_star.items()}
        fn = problem.objective(xn)
        if fn > f or problem.max_ratio(xn) > 1.0:
            if gap > inner_tol:
                # inexact inner solve could not certify progress; redo it exactly
                last_rel = 0.0
                history.append(f)
                continue
            xn, fn = x, f
        move = max(abs(math.log(xn[n]) - math.log(x[n])) for n in names)
        rel = (f - fn) / abs(f) if f != 0 else abs(f - fn)
        x, f = xn, fn
        history.append(f)
        last_rel = rel
        kkt, duals = rep.kkt_residual, rep.duals
        log.debug("outer %d: objective %.12g (rel change %.3g, move %.3g)", outer, f, rel, move)
        tight = gap <= max(inner_tol, 1e-2 * tol)
        stalled = stalled + 1 if (rel < tol and tight) else 0
        if rel < tol and move < tol and tight:
            status, reason = SolveStatus.CONVERGED, "anchor"
            break
        if stalled >= patience:
            status, reason = SolveStatus.CONVERGED, "objective"
            break
    if polish:
        refined = polish_signomial(problem, x)
        if refined is not None:
            x, fn = refined
            if (f - fn) / abs(f) > tol or status is not SolveStatus.CONVERGED:
                status = SolveStatus.CONVERGED
            f = fn
            history.append(f)
            reason = (reason or "max_iter") + "+polish"
    return SolveReport(x_star=x, objective_value=f, kkt_residual=kkt, outer_iterations=outer,
                       inner_iterations=newton, status=status, history=history, duals=duals,
                       stop_reason=reason)
