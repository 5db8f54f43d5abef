"""Python front end for the snt library.

Commands take and return plain dicts; JSON scalars follow the CLI format
(field "Q" or "GF(p)", entries as strings).
"""

import json
from fractions import Fraction

from . import _snt
from ._snt import Error, GuardExceeded, InvalidInput, TruncationError

__all__ = [
    "Error",
    "GuardExceeded",
    "InvalidInput",
    "TruncationError",
    "Result",
    "decompose",
    "orbit",
    "census",
    "verify_sw",
    "fixtures",
    "e8_gram",
    "weyl_group_order_e8",
    "precision_floor",
    "theta_q_coefficients",
    "eisenstein_q_coefficients",
]


class Result:
    """A command report: `checks`, `result`, `config` and the text rendering."""

    def __init__(self, raw):
        self.report = json.loads(raw["report"])
        self.text = raw["text"]
        self.ok = raw["ok"]

    @property
    def checks(self):
        return {c["name"]: c["status"] == "ok" for c in self.report["checks"]}

    @property
    def result(self):
        return self.report["result"]

    def __repr__(self):
        return f"Result(command={self.report.get('command')!r}, ok={self.ok})"


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def decompose(module):
    return Result(_snt.decompose(_dump(module)))


def orbit(x, y=None):
    return Result(_snt.orbit(_dump(x), None if y is None else _dump(y)))


def census(q, k=0, partition=(), v_diag=(), v_hyperbolic=0, dim_v=0, limit=0, transport_samples=0, seed=1729):
    return Result(_snt.census(q, k, list(partition), list(v_diag), v_hyperbolic, dim_v, limit, transport_samples, seed))


def verify_sw(lattices=(), tau11="2i", tau12="0.5i", tau22="2i", rank=8, tol=1e-8, direct=False, mass=""):
    return Result(_snt.verify_sw([_dump(l) for l in lattices], tau11, tau12, tau22, rank, tol, direct, mass))


def fixtures(seed=1729):
    """Fixture set as {relative path: decoded JSON}."""
    return {path: json.loads(text) for path, text in _snt.fixtures(seed).items()}


def e8_gram():
    return _snt.e8_gram()


def weyl_group_order_e8():
    return int(_snt.weyl_group_order_e8())


def precision_floor():
    return _snt.precision_floor()


def theta_q_coefficients(gram, n_max):
    return _snt.theta_q_coefficients(gram, n_max)


def eisenstein_q_coefficients(w, n):
    return [Fraction(a) for a in _snt.eisenstein_q_coefficients(w, n)]
