"""
The attenuated Radon transform and its orientation
==================================================

Without attenuation a line integral does not care which way the line is
run: ``(R f)(omega, p) = (R f)(omega + pi, -p)``.  With attenuation the
weight at each point is ``exp(-(integral of a ahead of the point))``, and
"ahead" flips with the orientation, so the sinogram loses this symmetry.

Run with ``python3 demos/plot_attenuated_sinogram.py``.
"""

# %%
# A Gaussian source and an off-center attenuating bump
# ----------------------------------------------------
import math

import numpy as np

from attradon import (LineCoord, SinogramGrid, classical_sinogram, forward_sinogram,
                      make_phantom, radon_attenuated)

f = make_phantom("gaussian")
a = make_phantom("gaussian", dict(A=0.5, sigma=1.0, cx=1.0))
grid = SinogramGrid(n_angles=180, n_p=257, p_max=6.0)

plain = classical_sinogram(f, grid)
attenuated = forward_sinogram(f, a, grid)
print(f"peak of R f   : {plain.values.max():.5f}  (sqrt(pi) = {math.sqrt(math.pi):.5f})")
print(f"peak of R_a f : {attenuated.values.max():.5f}")

# %%
# One line, both directions
# -------------------------
# The vertical line through the origin runs along -x at omega = pi/2 and
# along +x at omega = 3 pi/2.  The bump at (1, 0) is then behind the source
# in one direction and in front of it in the other.
forward_dir = radon_attenuated(f, a, LineCoord(math.pi / 2, 0.0))
backward_dir = radon_attenuated(f, a, LineCoord(3 * math.pi / 2, 0.0))
print(f"omega = pi/2  : {forward_dir:.6f}")
print(f"omega = 3pi/2 : {backward_dir:.6f}")
print(f"difference    : {forward_dir - backward_dir:+.3e}")

# %%
# The whole sinogram against its reversed copy
# --------------------------------------------
half = grid.n_angles // 2


def reversal_gap(values):
    return np.max(np.abs(values - np.roll(values, half, axis=0)[:, ::-1]))


print(f"max reversal gap, a = 0 : {reversal_gap(plain.values):.1e}")
print(f"max reversal gap, a     : {reversal_gap(attenuated.values):.3f}")

# %%
# Pictures
# --------
from _plotting import plt, save  # noqa: E402

if plt is not None:
    extent = [-grid.p_max, grid.p_max, 360, 0]
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    for ax, values, title in ((axes[0], plain.values, "R f"),
                              (axes[1], attenuated.values, "R_a f"),
                              (axes[2], attenuated.values
                               - np.roll(attenuated.values, half, axis=0)[:, ::-1],
                               "R_a f(w, p) - R_a f(w + pi, -p)")):
        im = ax.imshow(values, aspect="auto", extent=extent, cmap="viridis")
        ax.set_title(title)
        ax.set_xlabel("p")
        fig.colorbar(im, ax=ax)
    axes[0].set_ylabel("omega [deg]")
    save(fig, "attenuated_sinogram.png")
