"""Where the lagging derivation points land, and what they do to membership.

On a single edge whose center has height 1/2, the derivation point between
the barycenter a and an endpoint u sits at a + s (u - a), s = 51/151.  The
derived neighborhood of u ends exactly there.
"""
from fractions import Fraction

from linkhomotopy.complex import build_complex
from linkhomotopy.maps import SimplicialMap
from linkhomotopy.subdivide import classify_point, derived_neighborhood, lagging_second_derived

K = build_complex([(0,), (1,)], [(0, 1)])
for h in (Fraction(0), Fraction(1, 2), Fraction(1)):
    F = SimplicialMap.from_images(K, [(h,), (h,)])
    Kpp = lagging_second_derived(K, F)
    pts = sorted(v[0] for v in Kpp.result.vertices)
    print(f"height {str(h):>3}: vertices of K'' =", [str(p) for p in pts])

F = SimplicialMap.from_images(K, [(Fraction(1, 2),)] * 2)
Kpp = lagging_second_derived(K, F)
N = derived_neighborhood(Kpp, {(0,)})
print("\nN((0,)) spans", sorted(str(Kpp.result.vertices[w][0]) for w in N.vertices))
for x in (Fraction(1, 5), Fraction(50, 151), Fraction(2, 5), Fraction(1)):
    print(f"x = {str(x):>6}: {classify_point((x,), {(0,)}, Kpp).value}")
