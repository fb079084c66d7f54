"""OBJ mesh and CSV table writers."""

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def check_writable(path: str | Path) -> Path:
    """Fail early with OSError when the parent directory of path is missing or not writable."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory {parent} does not exist")
    marker = parent / f".{path.name}.check"
    try:
        marker.touch()
    finally:
        if marker.exists():
            marker.unlink()
    return path


def _column_format(cells: Sequence) -> str:
    if any(isinstance(cell, (bool, np.bool_, str)) for cell in cells):
        return "%s"
    if all(isinstance(cell, (int, np.integer)) for cell in cells):
        return "%d"
    if all(isinstance(cell, (int, float, np.integer, np.floating)) for cell in cells):
        return "%.17g"
    return "%s"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-separated with a header row; real columns in 17 significant digits, booleans as true/false."""
    rows = [list(row) for row in rows]
    fmt = [_column_format(column) for column in zip(*rows)] or "%s"
    table = np.array(
        [[str(cell).lower() if isinstance(cell, (bool, np.bool_)) else cell for cell in row] for row in rows],
        dtype=object,
    ).reshape(len(rows), len(header))
    np.savetxt(path, table, fmt=fmt, delimiter=",", header=",".join(header), comments="")
    logger.info("wrote %d rows to %s", len(rows), path)


def write_obj(path: str | Path, vertices: np.ndarray) -> None:
    """
    Vertices of shape (nx, ny, 3) as "v x y z" lines, then quads "f i j k l".

    Indices are 1-based and wrap across both seams.
    """
    nx, ny, _ = vertices.shape
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in vertices.reshape(-1, 3)]
    index = lambda i, j: (i % nx) * ny + (j % ny) + 1
    for i in range(nx):
        for j in range(ny):
            lines.append(f"f {index(i, j)} {index(i + 1, j)} {index(i + 1, j + 1)} {index(i, j + 1)}")
    Path(path).write_text("\n".join(lines) + "\n")
    logger.info("wrote %d vertices and %d faces to %s", nx * ny, nx * ny, path)


def read_profile_csv(path: str | Path) -> np.ndarray:
    """Samples from the last column of a CSV file with an optional header row."""
    lines = Path(path).read_text().splitlines()
    first = next((index for index, line in enumerate(lines) if line.strip()), 0)
    try:
        float(lines[first].split(",")[-1])
        skip = first
    except (IndexError, ValueError):
        skip = first + 1
    return np.loadtxt(path, delimiter=",", skiprows=skip, usecols=-1, ndmin=1)
