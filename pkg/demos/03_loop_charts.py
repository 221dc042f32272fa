"""
Charts on the loop space
========================

A chart at a center loop alpha identifies nearby loops with loops of tangent
vectors along alpha, by applying the local addition node by node.  Because
everything is pointwise in the circle parameter, transitions between charts
are loops of finite-dimensional fiber maps, and their derivatives commute
with multiplication by scalar loops.
"""

import numpy as np

from loopspace_lab import (
    Chart, LocalAdditionSpec, SampledLoop, Sphere2, chart_forward,
    chart_inverse, chart_membership, loop_map, random_section, transition,
    vertical_derivative,
)
from loopspace_lab.loops import random_bandlimited_loop
from loopspace_lab.manifolds import Flat

sphere = Sphere2()
rng = np.random.default_rng(0)

t = np.arange(128) / 128
equator = SampledLoop(np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t),
                                np.zeros(128)], axis=-1))
chart = Chart(equator, LocalAdditionSpec(sphere))

# any section maps into the chart, and the inverse recovers it
beta = random_section(rng, sphere, equator, scale=1.2)
gamma = chart_forward(chart, beta)
print("image is in U_alpha:", chart_membership(chart, gamma))
back = chart_inverse(chart, gamma)
print("chart roundtrip residual:", np.max(np.abs(back.vectors - beta.vectors)))

# a second chart at a shifted center: transition and its inverse
shift = random_section(rng, sphere, equator, scale=0.05)
chart2 = Chart(SampledLoop(sphere.exp(equator.samples, shift.vectors)),
               LocalAdditionSpec(sphere, np.pi / 3))
small = random_section(rng, sphere, equator, scale=0.15)
there = transition(chart, chart2, small)
home = transition(chart2, chart, there)
print("transition roundtrip residual:",
      np.max(np.abs(home.vectors - small.vectors)))

# looping a pointwise map: the antipodal map sends a loop to its negative
print("antipodal loop residual:",
      np.max(np.abs(loop_map(lambda p: -p, equator).samples + equator.samples)))

# the vertical-derivative law on a nonlinear fiber map over flat loops
flat = Flat(1)
alpha = random_bandlimited_loop(rng, 1, 128)
b = random_section(rng, flat, alpha)
vd = vertical_derivative(lambda tt, v: v + v ** 2, alpha, b)
exact = b.vectors + 2 * alpha.samples * b.vectors
print("d(psi^L) vs (d_v psi)^L residual:", np.max(np.abs(vd.vectors - exact)))
