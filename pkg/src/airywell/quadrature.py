"""Cumulative integrals F(t) = int_0^t y dtau on knot-aligned Simpson grids.

The derived time functions of the model are nested integrals of the mass
and coupling histories (one integrand is itself a prior integral), so
everything is computed on one shared grid per profile:

  * the window [0, T] is split into segments at the supplied knots
    (sample points of tabulated inputs; [0, T] itself when smooth), so
    integrands are smooth inside every panel;
  * each segment carries an even number of uniform panels and a composite
    Simpson prefix table, fourth order in the panel width, using the
    half-panel closure
        F[2i+1] = F[2i] + h/12 (5 y[2i] + 8 y[2i+1] - y[2i+2]);
  * off-node queries interpolate the prefix table with a cubic Hermite
    whose end slopes are the exactly known integrand values, which keeps
    the interpolation error at the same fourth order as the table itself.

Convergence is controlled by the caller: rebuild with doubled panel
counts and compare tables at shared nodes (Richardson style) until the
difference passes the tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SimpsonGrid", "CumulativeTable"]


@dataclass(frozen=True)
class SimpsonGrid:
    """Knot-aligned node set on [0, T] with per-segment uniform panels."""

    nodes: np.ndarray           # strictly increasing, nodes[0] = 0
    segment_starts: np.ndarray  # indices of the first node of each segment
    panels_per_segment: int

    @staticmethod
    def build(span: float, knots=None, panels_per_segment: int = 16) -> "SimpsonGrid":
        if span <= 0:
            raise ValueError("integration window must have positive length")
        if panels_per_segment < 2 or panels_per_segment % 2:
            raise ValueError("panel count per segment must be even and >= 2")
        if knots is None:
            edges = np.array([0.0, span])
        else:
            k = np.asarray(knots, dtype=float)
            k = k[(k > 0.0) & (k < span)]
            edges = np.unique(np.concatenate(([0.0, span], k)))
        pieces = []
        starts = []
        pos = 0
        for a, b in zip(edges[:-1], edges[1:]):
            seg = np.linspace(a, b, panels_per_segment + 1)
            starts.append(pos)
            pieces.append(seg if pos == 0 else seg[1:])
            pos += panels_per_segment
        nodes = np.concatenate(pieces)
        return SimpsonGrid(
            nodes=nodes,
            segment_starts=np.asarray(starts, dtype=int),
            panels_per_segment=panels_per_segment,
        )

    def refined(self) -> "SimpsonGrid":
        edges = np.concatenate((self.nodes[self.segment_starts], [self.nodes[-1]]))
        return SimpsonGrid.build(
            span=float(self.nodes[-1]),
            knots=edges[1:-1],
            panels_per_segment=2 * self.panels_per_segment,
        )

    def cumulative(self, y: np.ndarray) -> "CumulativeTable":
        """Prefix integrals of nodewise samples y, fourth order."""
        y = np.asarray(y, dtype=float)
        if y.shape != self.nodes.shape:
            raise ValueError("integrand samples must align with the grid nodes")
        out = np.zeros_like(y)
        m = self.panels_per_segment
        for s in self.segment_starts:
            h = self.nodes[s + 1] - self.nodes[s]
            sl = slice(s, s + m + 1)
            out[sl] = out[s] + _cumulative_simpson_uniform(y[sl], h)
        return CumulativeTable(grid=self, integrand=y, values=out)


def _cumulative_simpson_uniform(y: np.ndarray, h: float) -> np.ndarray:
    """Prefix Simpson sums over one uniform segment; y has odd length."""
    n = y.shape[0]
    out = np.zeros(n)
    panel = (h / 3.0) * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(panel)
    out[1::2] = out[0:-2:2] + (h / 12.0) * (5.0 * y[0:-2:2] + 8.0 * y[1:-1:2] - y[2::2])
    return out


@dataclass(frozen=True)
class CumulativeTable:
    """F on grid nodes plus its exact slopes (the integrand samples)."""

    grid: SimpsonGrid
    integrand: np.ndarray
    values: np.ndarray

    def value(self, t):
        """Cubic Hermite read of F at scalar or array t inside the window."""
        nodes = self.grid.nodes
        tq = np.asarray(t, dtype=float)
        scalar = tq.ndim == 0
        tq = np.atleast_1d(tq)
        if tq.size and (tq.min() < nodes[0] - 1e-12 or tq.max() > nodes[-1] + 1e-12):
            raise ValueError("query time outside the configured window")
        tq = np.clip(tq, nodes[0], nodes[-1])
        i = np.clip(np.searchsorted(nodes, tq, side="right") - 1, 0, nodes.size - 2)
        h = nodes[i + 1] - nodes[i]
        u = (tq - nodes[i]) / h
        u2 = u * u
        u3 = u2 * u
        h00 = 2 * u3 - 3 * u2 + 1
        h10 = u3 - 2 * u2 + u
        h01 = -2 * u3 + 3 * u2
        h11 = u3 - u2
        out = (
            h00 * self.values[i]
            + h01 * self.values[i + 1]
            + h * (h10 * self.integrand[i] + h11 * self.integrand[i + 1])
        )
        return float(out[0]) if scalar else out

    def max_node_difference(self, coarse: "CumulativeTable") -> float:
        """Largest |F_fine - F_coarse| over the coarse node set."""
        return float(np.max(np.abs(self.value(coarse.grid.nodes) - coarse.values)))
