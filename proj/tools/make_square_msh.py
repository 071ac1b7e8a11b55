#!/usr/bin/env python3
"""Write a Delaunay triangulation of the unit square as an ASCII MSH 2.2 file.

Boundary lines carry the physical groups left, right, bottom and top.
"""

import argparse

import numpy as np
from scipy.spatial import Delaunay

SIDES = {"left": 1, "right": 2, "bottom": 3, "top": 4}


def square_points(n, rng, jitter):
    t = np.linspace(0.0, 1.0, n + 1)
    boundary = np.concatenate(
        [
            np.column_stack([t, np.zeros_like(t)]),
            np.column_stack([t, np.ones_like(t)]),
            np.column_stack([np.zeros_like(t[1:-1]), t[1:-1]]),
            np.column_stack([np.ones_like(t[1:-1]), t[1:-1]]),
        ]
    )
    h = 1.0 / n
    g = t[1:-1]
    xx, yy = np.meshgrid(g, g)
    interior = np.column_stack([xx.ravel(), yy.ravel()])
    interior += rng.uniform(-jitter * h, jitter * h, size=interior.shape)
    return np.vstack([boundary, interior])


def boundary_lines(points):
    lines = []
    for name, axis, value in (("left", 0, 0.0), ("right", 0, 1.0), ("bottom", 1, 0.0), ("top", 1, 1.0)):
        ids = np.flatnonzero(np.isclose(points[:, axis], value))
        ids = ids[np.argsort(points[ids, 1 - axis])]
        lines += [(SIDES[name], a, b) for a, b in zip(ids[:-1], ids[1:])]
    return lines


def write_msh(path, points, triangles, lines):
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$PhysicalNames\n{len(SIDES) + 1}\n")
        for name, tag in SIDES.items():
            f.write(f'1 {tag} "{name}"\n')
        f.write('2 10 "domain"\n$EndPhysicalNames\n')
        f.write(f"$Nodes\n{len(points)}\n")
        for i, (x, y) in enumerate(points, start=1):
            f.write(f"{i} {x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(lines) + len(triangles)}\n")
        k = 1
        for tag, a, b in lines:
            f.write(f"{k} 1 2 {tag} {tag} {a + 1} {b + 1}\n")
            k += 1
        for tri in triangles:
            f.write(f"{k} 2 2 10 1 {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}\n")
            k += 1
        f.write("$EndElements\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output")
    parser.add_argument("--cells", type=int, default=10, help="boundary segments per side")
    parser.add_argument("--jitter", type=float, default=0.25)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    points = square_points(args.cells, rng, args.jitter)
    tri = Delaunay(points).simplices
    write_msh(args.output, points, tri, boundary_lines(points))


if __name__ == "__main__":
    main()
