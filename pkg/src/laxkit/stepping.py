"""Shared fixed-step time stepping."""

from __future__ import annotations


def rk4_step(rhs, y, dt):
    """One classic fourth-order step for a state given as a tuple of arrays."""
    k1 = rhs(y)
    k2 = rhs(tuple(a + 0.5 * dt * b for a, b in zip(y, k1)))
    k3 = rhs(tuple(a + 0.5 * dt * b for a, b in zip(y, k2)))
    k4 = rhs(tuple(a + dt * b for a, b in zip(y, k3)))
    return tuple(
        a + (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )
