from __future__ import annotations

from functools import lru_cache

from .diagnostics import tent_transform
from .lattice import LatticeRule, cbc_construct, random_shift, shifted_lattice
from .mc import mc_points
from .pointset import PointSet
from .sobol import scramble_linear

SAMPLERS = ("mc", "sobol", "lattice")


@lru_cache(maxsize=64)
def cached_rule(n: int, d: int, power: float = 3.0) -> LatticeRule:
    from .lattice import product_weights
    return cbc_construct(n, d, product_weights(d, power))


def generate_points(kind: str, n: int, d: int, seed: int, tent: bool = False) -> PointSet:
    """Randomized point set of the given kind.

    ``sobol`` is linearly scrambled; ``lattice`` is a CBC rule with weights
    j^-3 and a uniform random shift drawn from ``seed``.
    """
    if kind == "mc":
        ps = mc_points(n, d, seed)
    elif kind == "sobol":
        ps = scramble_linear(n, d, seed=seed)
    elif kind == "lattice":
        ps = shifted_lattice(cached_rule(n, d), random_shift(d, seed))
        ps = PointSet(ps.points, ps.kind, seed, ps.meta)
    else:
        raise ValueError(f"unknown sampler {kind!r}; expected one of {SAMPLERS}")
    return tent_transform(ps) if tent else ps
