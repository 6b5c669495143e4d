"""Two points braiding in a 3-cube: from a concordance to a link homotopy.

The input arcs wander up and down in height, so F is a concordance but
not level-preserving.  We run the full pipeline and look at Phi.
"""
from fractions import Fraction

from linkhomotopy import fixtures
from linkhomotopy.exact import fmt_point
from linkhomotopy.homotopy import RunConfig, pipeline

c = fixtures.two_points_3cube(seed=42)
print("levels of X x I:", [str(t) for t in c.Xp.levels])
for v in range(2):
    heights = [c.F.height(c.Xp.vertex(v, j)) for j in range(len(c.Xp.levels))]
    print(f"component {v + 1} heights along its arc:", [str(h) for h in heights])

res = pipeline(c.F, c.Xp, None, c.part, RunConfig(mode="link", seed=42))
print("\nsunny groups:", list(zip(res.sunny.names, res.sunny.groups)))
print("stable groups:", list(zip(res.stable.names, res.stable.groups)))
print("deformation stages:", len(res.deformation.stages))

# Phi is level-preserving and runs from f_0 to f_1
for x in c.X.vertices:
    print(f"\nPhi({fmt_point(x)}, t):")
    for k in range(5):
        t = Fraction(k, 4)
        print(f"  t = {str(t):>3}  ->  {fmt_point(res.Phi(x, t))}")

r = res.report
print("\nreport ok:", r.ok, "| exact:", r.exact, "| tuples checked:", r.checked_tuples)
