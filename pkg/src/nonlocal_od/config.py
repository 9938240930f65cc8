"""JSON problem configuration.

Example::

    {
      "dimension": 2,
      "radius": 1.0,
      "center": [0.0, 0.0],
      "A": "exp(n1)",
      "B": "n1^2",
      "A_norms": [{"kind": "u", "exponent": 1}],
      "B_norms": [{"kind": "grad", "exponent": 2}],
      "solver": {"s_min": 1e-8, "grid_points": 2048}
    }

``center``, ``solver`` and ``lambda`` are optional.  Variables ``n1..nk``
in A refer to the entries of ``A_norms``, likewise for B.
"""

import json
import math
from dataclasses import dataclass, field

from .ballnorms import BallDomain, NormSpec
from .exprdsl import ExpressionError, parse_expression
from .reduction import NonlocalProblem, SolverOptions

__all__ = ["ConfigError", "ProblemConfig", "load_config", "parse_config"]

SOLVER_KEYS = ("s_min", "s_max", "s_max_cap", "grid_points", "rtol", "tangency_tol")
TOP_KEYS = ("dimension", "radius", "center", "A", "B", "A_norms", "B_norms", "solver", "lambda")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class ProblemConfig:
    dimension: int
    radius: float
    A: str
    B: str
    A_norms: tuple
    B_norms: tuple
    center: tuple = None
    solver: dict = field(default_factory=dict)
    lam: float = None

    def problem(self, lam=None):
        lam = self.lam if lam is None else lam
        if lam is None:
            raise ConfigError("lambda: not given in the config or on the command line")
        try:
            return NonlocalProblem(
                BallDomain(self.dimension, self.radius, self.center),
                parse_expression(self.A, len(self.A_norms)),
                parse_expression(self.B, len(self.B_norms)),
                self.A_norms,
                self.B_norms,
                lam,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def solver_options(self):
        return SolverOptions(**self.solver)

    def to_dict(self):
        out = {
            "dimension": self.dimension,
            "radius": self.radius,
            "A": self.A,
            "B": self.B,
            "A_norms": [{"kind": n.kind, "exponent": n.exponent} for n in self.A_norms],
            "B_norms": [{"kind": n.kind, "exponent": n.exponent} for n in self.B_norms],
        }
        if self.center is not None:
            out["center"] = list(self.center)
        if self.solver:
            out["solver"] = dict(self.solver)
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def _number(data, key, where, positive=False):
    if key not in data:
        raise ConfigError(f"{where}{key}: missing")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}{key}: expected a number, got {value!r}")
    if not math.isfinite(value) or (positive and not value > 0):
        raise ConfigError(f"{where}{key}: must be positive and finite, got {value!r}")
    return value


def _norm_list(data, key):
    items = data.get(key)
    if not isinstance(items, list) or not items:
        raise ConfigError(f"{key}: expected a non-empty list of norm specs")
    out = []
    for i, item in enumerate(items):
        where = f"{key}[{i}]."
        if not isinstance(item, dict):
            raise ConfigError(f"{key}[{i}]: expected an object with 'kind' and 'exponent'")
        kind = item.get("kind")
        if kind not in ("u", "grad"):
            raise ConfigError(f"{where}kind: must be 'u' or 'grad', got {kind!r}")
        out.append(NormSpec(kind, _number(item, "exponent", where, positive=True)))
    return tuple(out)


def _expression(data, key, arg_count):
    text = data.get(key)
    if not isinstance(text, str):
        raise ConfigError(f"{key}: expected an expression string")
    try:
        parse_expression(text, arg_count)
    except ExpressionError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    return text


def parse_config(data):
    """Validate a decoded JSON object and return a :class:`ProblemConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(TOP_KEYS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    dim = _number(data, "dimension", "")
    if int(dim) != dim or dim < 1:
        raise ConfigError("dimension: dimension must be ≥ 1")
    dim = int(dim)
    radius = float(_number(data, "radius", "", positive=True))
    center = data.get("center")
    if center is not None:
        if not isinstance(center, list) or len(center) != dim:
            raise ConfigError(f"center: expected a list of {dim} numbers")
        for i, c in enumerate(center):
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise ConfigError(f"center[{i}]: expected a number, got {c!r}")
        center = tuple(float(c) for c in center)
    A_norms = _norm_list(data, "A_norms")
    if A_norms[0].kind != "u":
        raise ConfigError("A_norms[0].kind: the reference norm must be 'u'")
    B_norms = _norm_list(data, "B_norms")
    A = _expression(data, "A", len(A_norms))
    B = _expression(data, "B", len(B_norms))
    solver = data.get("solver") or {}
    if not isinstance(solver, dict):
        raise ConfigError("solver: expected an object")
    for key, value in solver.items():
        if key not in SOLVER_KEYS:
            raise ConfigError(f"solver.{key}: unknown key")
        _number(solver, key, "solver.", positive=True)
    try:
        SolverOptions(**solver)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from None
    lam = data.get("lambda")
    if lam is not None:
        lam = float(_number(data, "lambda", "", positive=True))
    return ProblemConfig(dim, radius, A, B, A_norms, B_norms, center, dict(solver), lam)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data)
