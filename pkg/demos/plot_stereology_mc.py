"""
Estimating a pairing from random lines
======================================

The pairing is an integral over the space of lines, so it can be estimated
stereologically: draw lines uniformly in ``(omega, p)``, measure the
attenuated line integral of ``f`` on each, weight it by the probe kernel,
and average.  The error bar shrinks like ``1 / sqrt(N)``.

Here the "measurement" is interpolated from a stored sinogram; any callable
``(omega, p) -> R_a f`` works, for example
:func:`attradon.plancherel.direct_evaluator`, which integrates each line
exactly.

Run with ``python3 demos/plot_stereology_mc.py``.
"""

# %%
# Setup
# -----
import numpy as np

from attradon import (SinogramGrid, SinogramInterpolator, forward_sinogram, integrate_2d,
                      make_phantom, pair_monte_carlo, pair_quadrature, pairing_kernel)

grid = SinogramGrid(n_angles=180, n_p=512, p_max=8.0)
f = make_phantom("gaussian")
g = make_phantom("gaussian", dict(cx=0.5))
a = make_phantom("gaussian", dict(A=0.3, sigma=1.5))
sino = forward_sinogram(f, a, grid)
kernel = pairing_kernel(g, a, grid)
measure = SinogramInterpolator(sino)

truth = integrate_2d(f.product(g), 6.0, 1024)
quad_value = pair_quadrature(sino, g, a, kernel=kernel).value
print(f"direct integral : {truth:.6f}")
print(f"quadrature      : {quad_value:.6f}")

# %%
# Monte Carlo at increasing sample sizes
# --------------------------------------
# Each run is reproducible from its seed, whatever the number of workers.
# With one seed the blocks are spawned identically, so the larger runs
# extend the smaller ones: this is one growing sample, not five independent
# estimates.
sizes = [250, 1000, 4000, 16000, 64000]
results = [pair_monte_carlo(measure, g, a, n, seed=1, p_max=grid.p_max, kernel=kernel)
           for n in sizes]
for n, r in zip(sizes, results):
    print(f"N = {n:6d}: {r.value:.5f} +- {r.stderr:.5f}   "
          f"({(r.value - quad_value) / r.stderr:+.2f} stderr from quadrature)")

# %%
# Coverage over seeds
# -------------------
runs = [pair_monte_carlo(measure, g, a, 10_000, seed=s, p_max=grid.p_max, kernel=kernel)
        for s in range(20)]
inside = sum(abs(r.value - quad_value) < 3 * r.stderr for r in runs)
print(f"{inside}/20 runs within 3 stderr")

# %%
# Pictures
# --------
from _plotting import plt, save  # noqa: E402

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(sizes, [r.stderr for r in results], "o-", label="stderr")
    ax.loglog(sizes, results[0].stderr * np.sqrt(sizes[0] / np.array(sizes)), "k--",
              label="1 / sqrt(N)")
    ax.set_xlabel("lines sampled")
    ax.legend()
    save(fig, "stereology_mc.png")
