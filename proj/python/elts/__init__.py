"""Effect-labelled transition systems.

A thin wrapper over the compiled core: systems whose transitions carry
weights from an effect algebra (probabilities, quantum effects, finite
tables), with kernel/AM bisimilarity checking, Born-rule instantiation and
compositional operators.
"""

import json as _json

from elts._core import (  # noqa: F401
    GradeClashError,
    KindMismatchError,
    ParseError,
    System,
    ValidationError,
    dumps,
    load,
    loads,
    parallel,
    validate,
)
from elts import _core


def kernel_check(a, b, x, y):
    """Kernel bisimilarity verdict for states x (in a) and y (in b)."""
    return _json.loads(_core.kernel_check(a, b, x, y))


def am_check(a, b, x, y, feas_tol=1e-6, max_iters=20000):
    """Aczel-Mendler bisimilarity verdict (coupling-based)."""
    return _json.loads(_core.am_check(a, b, x, y, feas_tol, max_iters))


def desiderata1(a, b, x, y, n_random=10, seed=0):
    return _json.loads(_core.desiderata1(a, b, x, y, n_random, seed))


def instantiate(system, rho):
    """Born-rule instantiation; rho is a named constructor or a density dict."""
    if isinstance(rho, dict):
        rho = _json.dumps(rho)
    return _core.instantiate(system, rho)


def partial_eval(system, rho):
    if isinstance(rho, dict):
        rho = _json.dumps(rho)
    return _core.partial_eval(system, rho)


def remap(system, morphism):
    if isinstance(morphism, dict):
        morphism = _json.dumps(morphism)
    return _core.remap(system, morphism)


def born(effect, rho):
    """tr(L rho) as an exact rational string."""
    if isinstance(effect, (list, dict)):
        effect = _json.dumps(effect)
    if isinstance(rho, (list, dict)):
        rho = _json.dumps(rho)
    return _core.born(effect, rho)


def distinguishing_density(effects, seed=0, max_attempts=64):
    if isinstance(effects, dict):
        effects = _json.dumps(effects)
    return _json.loads(_core.distinguishing_density(effects, seed, max_attempts))


def run_laws(scope="all", seed=0, samples=50):
    return _json.loads(_core.run_laws(scope, seed, samples))


def to_dict(system):
    """The canonical JSON form of a system as a dict."""
    return _json.loads(dumps(system))
