"""Uniformly sampled functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .evaluate import SymbolTable, evaluate
from .expr import Expr, as_expr
from .taylor import Taylor

MIN_NODES = 5


@dataclass(frozen=True)
class GridFn:
    """Samples of a function and optionally of its derivatives.

    ``derivs[k]`` holds the k-th derivative at the nodes
    ``start + i*step``; ``derivs[0]`` are the values.
    """

    start: float
    step: float
    derivs: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        derivs = tuple(np.asarray(d, dtype=float) for d in self.derivs)
        if not derivs:
            raise ValueError("a GridFn needs value samples")
        n = len(derivs[0])
        if n < MIN_NODES:
            raise ValueError(f"a GridFn needs at least {MIN_NODES} nodes, got {n}")
        for d in derivs:
            if d.shape != (n,):
                raise ValueError("derivative samples must match the value samples")
            if not np.all(np.isfinite(d)):
                raise ValueError("GridFn samples must be finite")
        object.__setattr__(self, "derivs", derivs)

    @classmethod
    def from_values(cls, start: float, step: float, values: Sequence[float]) -> GridFn:
        return cls(start, step, (np.asarray(values, dtype=float),))

    @classmethod
    def sample(
        cls,
        f: Expr | str,
        start: float,
        stop: float,
        step: float,
        table: SymbolTable | None = None,
        derivatives: int = 0,
    ) -> GridFn:
        """Sample a closed-form expression, with exact derivatives up to ``derivatives``."""
        n = int(round((stop - start) / step))
        xs = start + step * np.arange(n + 1)
        jet = evaluate(as_expr(f), Taylor.variable(xs, derivatives), table)
        if not isinstance(jet, Taylor):
            jet = Taylor.constant(jet, derivatives)
        ds = [np.broadcast_to(d, xs.shape).copy() for d in jet.derivatives()]
        return cls(start, step, tuple(ds))

    @property
    def values(self) -> np.ndarray:
        return self.derivs[0]

    @property
    def size(self) -> int:
        return len(self.derivs[0])

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.size - 1)

    @property
    def x(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.size)

    def derivative_samples(self, k: int) -> np.ndarray | None:
        return self.derivs[k] if k < len(self.derivs) else None

    def prefix(self, count: int) -> GridFn:
        return GridFn(self.start, self.step, tuple(d[:count] for d in self.derivs))

    def map_values(self, fn) -> GridFn:
        """Apply ``fn`` to the order-k jets at every node, keeping all sampled orders."""
        out = fn(Taylor.from_derivatives(self.derivs))
        return GridFn(self.start, self.step, tuple(out.derivatives()))

    def jets(self, order: int = 3, at=None) -> Taylor:
        """Taylor jets of the sampled function.

        Sampled derivatives are used as they are; orders beyond the highest
        sampled one come from differentiating a cubic spline through it.
        ``at`` defaults to the grid nodes.
        """
        xs = self.x if at is None else np.asarray(at, dtype=float)
        top = len(self.derivs) - 1
        ds: list = []
        spline = None
        for k in range(order + 1):
            if k <= top and at is None:
                ds.append(self.derivs[k])
                continue
            if k <= top:
                # off-node: interpolate each sampled order with its own spline
                ds.append(CubicSpline(self.x, self.derivs[k])(xs))
                continue
            if spline is None:
                spline = CubicSpline(self.x, self.derivs[top])
            extra = k - top
            ds.append(spline(xs, extra) if extra <= 3 else np.zeros_like(xs))
        return Taylor.from_derivatives(ds)
