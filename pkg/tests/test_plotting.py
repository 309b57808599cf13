import numpy as np
import pytest

pytest.importorskip("matplotlib")

from qshutter.diagnostics import DensityTimeSeries, ResonancePeak  # noqa: E402
from qshutter.plotting import plot_density, plot_panels  # noqa: E402


def _series():
    t = np.linspace(0.1, 30, 100)
    psi = np.exp(-((t - 5) / 3) ** 2) * np.exp(-0.4j * t)
    return DensityTimeSeries(4.0, t, 17.5, psi, "packet")


def test_plot_density_writes_file(tmp_path):
    s = _series()
    peak = ResonancePeak(5.0, 5 / 17.5, 1.0, 1e-3, (4.99, 5.01))
    out = tmp_path / "d.svg"
    plot_density(s, out, peak=peak, asymptote=0.1, title="test")
    assert out.stat().st_size > 1000


def test_plot_panels(tmp_path):
    s = _series()
    out = tmp_path / "p.pdf"
    plot_panels([("a", s, None), ("b", s, None)], out)
    assert out.read_bytes()[:4] == b"%PDF"
