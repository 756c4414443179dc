"""
Explicit inversion with a known attenuation
===========================================

Given ``R_a f`` on a full sinogram and the attenuation ``a``, the source is
recovered by one Hilbert transform per angle row, weighted by ``exp(+-h)``
with ``h = (R a + i H R a) / 2``, followed by a weighted back-projection and
a derivative.  No iteration is involved.

Run with ``python3 demos/plot_novikov_reconstruction.py``.
"""

# %%
# Data
# ----
import time

from attradon import (ReconstructionConfig, SinogramGrid, forward_sinogram, make_phantom,
                      reconstruct, zero_field)
from attradon.novikov import relative_l2_error

f = make_phantom("shifted_gaussian_mixture")
a = make_phantom("gaussian", dict(A=0.3, sigma=1.5, cx=0.4, cy=-0.2))
grid = SinogramGrid(n_angles=180, n_p=256, p_max=6.0)
cfg = ReconstructionConfig(n_x=96, n_y=96, L=3.0)
sino = forward_sinogram(f, a, grid)

# %%
# Inversion, with and without knowing the attenuation
# ---------------------------------------------------
# Inverting attenuated data as if ``a`` were zero (plain filtered
# back-projection) leaves a visible, smooth error; the attenuation-aware
# inversion removes it down to discretization level.
t0 = time.perf_counter()
recon = reconstruct(sino, a, cfg)
print(f"reconstruction in {time.perf_counter() - t0:.1f}s")
naive = reconstruct(sino, zero_field(), cfg)
print(f"relative L2 error, known a    : {relative_l2_error(recon, f):.2e}")
print(f"relative L2 error, a ignored  : {relative_l2_error(naive, f):.2e}")

# %%
# Refinement
# ----------
# Halving both the angle and the offset step cuts the error roughly by four.
for n_angles, n_p in ((45, 64), (90, 128), (180, 256)):
    g = SinogramGrid(n_angles, n_p, 6.0)
    err = relative_l2_error(reconstruct(forward_sinogram(f, a, g), a, cfg), f)
    print(f"{n_angles:4d} x {n_p:4d}: {err:.2e}")

# %%
# Pictures
# --------
from _plotting import plt, save  # noqa: E402

if plt is not None:
    import numpy as np

    X, Y = np.meshgrid(recon.xs, recon.ys)
    truth = f(X, Y)
    extent = [-cfg.L, cfg.L, -cfg.L, cfg.L]
    fig, axes = plt.subplots(1, 4, figsize=(16, 4))
    panels = ((truth, "f"), (recon.values, "reconstruction"),
              (recon.values - truth, "error, known a"), (naive.values - truth, "error, a ignored"))
    for ax, (values, title) in zip(axes, panels):
        im = ax.imshow(values, origin="lower", extent=extent, cmap="magma")
        ax.set_title(title)
        fig.colorbar(im, ax=ax)
    save(fig, "novikov_reconstruction.png")
