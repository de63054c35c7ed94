"""Shared helpers for the demo scripts."""

import os

import numpy as np

import coarselab as cl


def cycle_space(n):
    idx = np.arange(n)
    diff = np.abs(idx[:, None] - idx[None, :])
    return cl.FiniteSpace(
        list(range(n)), np.minimum(diff, n - diff), 0, n // 2, validate=False
    )


def rng():
    """Seeded generator; COARSELAB_SEED fixes the sampling."""
    return np.random.default_rng(int(os.environ.get("COARSELAB_SEED", "0")))
