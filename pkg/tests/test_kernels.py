import os
import subprocess
import sys

import pytest

from floerloops import _kernels


def brute_count(ax, ay, bx, by, cx, cy, nx, ny):
    """Reference loop implementing the same grid rule."""
    orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if orient == 0.0:
        return 0
    xmin, xmax = min(ax, bx, cx), max(ax, bx, cx)
    ymin, ymax = min(ay, by, cy), max(ay, by, cy)
    dx = (xmax - xmin) / nx
    dy = (ymax - ymin) / ny
    count = 0
    for i in range(nx):
        px = xmin + (i + 0.5) * dx
        for j in range(ny):
            py = ymin + (j + 0.5) * dy
            s1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            s2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
            s3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
            if orient > 0:
                count += s1 > 0 and s2 > 0 and s3 > 0
            else:
                count += s1 < 0 and s2 < 0 and s3 < 0
    return count


TRIANGLES = [
    (0.0, 0.0, 1.0, 0.0, 0.0, 1.0),
    (0.0, 0.0, 2.0, 0.5, -1.0, 1.5),
    (0.0, 0.0, 1.0, 1.0, 2.0, 2.0),  # degenerate: collinear
    (3.0, -1.0, 3.0, 2.0, -2.0, 0.0),
]


@pytest.mark.parametrize("tri", TRIANGLES)
def test_numpy_matches_reference(tri):
    for n in (7, 16):
        assert _kernels.numpy_triangle_grid_count(*tri, n, n) == brute_count(*tri, n, n)


@pytest.mark.parametrize("tri", TRIANGLES)
def test_selected_backend_matches_numpy(tri):
    got = _kernels.triangle_grid_count(*tri, 33, 33)
    assert got == _kernels.numpy_triangle_grid_count(*tri, 33, 33)


def test_degenerate_triangle_has_no_interior():
    assert _kernels.triangle_grid_count(0, 0, 1, 1, 2, 2, 64, 64) == 0
    assert _kernels.triangle_grid_count(1, 1, 1, 1, 1, 1, 64, 64) == 0


def test_interior_fraction_approaches_half():
    # the unit right triangle fills half of its bounding box
    n = 200
    count = _kernels.triangle_grid_count(0, 0, 1, 0, 0, 1, n, n)
    assert abs(count / (n * n) - 0.5) < 0.01


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("FLOERLOOPS_BACKEND", None)
    else:
        env["FLOERLOOPS_BACKEND"] = env_value
    out = subprocess.run(
        [sys.executable, "-c",
         "from floerloops import _kernels; print(_kernels.backend_name())"],
        capture_output=True, text=True, env=env,
    )
    return out.returncode, out.stdout.strip(), out.stderr


def test_env_flag_selects_numpy():
    code, name, _ = _backend_in_subprocess("numpy")
    assert code == 0 and name == "numpy"


def test_env_flag_rejects_unknown():
    code, _, err = _backend_in_subprocess("cuda")
    assert code != 0
    assert "FLOERLOOPS_BACKEND" in err


def test_default_backend_reports():
    assert _kernels.backend_name() in ("numba", "numpy")
