"""Optional matplotlib support shared by the demos.

Figures are written next to the demos under ``demos/output/``; without
matplotlib the demos still run and print their numbers.
"""

from pathlib import Path

OUTPUT = Path(__file__).resolve().parent / "output"

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # pragma: no cover - depends on the environment
    plt = None


def save(fig, name):
    OUTPUT.mkdir(exist_ok=True)
    path = OUTPUT / name
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    print(f"wrote {path}")
