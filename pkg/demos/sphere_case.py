"""One wall, sessile-drop geometry.

With a single face the surface is a piece of the sphere of radius 1/H cut by
the container plane.  The script solves the embedded ``sphere-m1`` config at
level 5 and compares the result with the closed form: radius 2, plane at
distance 1 from the centre, wetted disk of area 3 pi.
"""
import math
import sys

import numpy as np

from capillary import demo_config, run


def main(level=5):
    out = run(demo_config("sphere-m1"), level)
    X = out.sigma.vertices
    # least-squares sphere |x|^2 = 2 c.x + k
    A = np.hstack([2 * X, np.ones((len(X), 1))])
    sol, *_ = np.linalg.lstsq(A, np.sum(X * X, axis=1), rcond=None)
    c = sol[:3]
    d = np.linalg.norm(X - c, axis=1)
    disk = out.disks[0]
    plane = out.planes[0]
    print(f"level {level}: {len(X)} vertices, {out.timings['total']:.2f}s")
    print(f"radius about fitted centre  [{d.min():.6f}, {d.max():.6f}]  (exact 2)")
    print(f"plane distance from centre  {plane.support - c @ plane.normal:.6f}  (exact 1)")
    print(f"wetted disk area            {disk.area:.6f}  (exact {3 * math.pi:.6f})")
    print(f"wetted disk perimeter       {disk.perimeter:.6f}  "
          f"(exact {2 * math.pi * math.sqrt(3):.6f})")
    print(f"energy                      {out.report.energy:.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
