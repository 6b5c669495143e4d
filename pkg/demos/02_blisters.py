"""Two circles in a 4-cube with one vertical double point.

The singular set of P F is the pair {w1, w2}; w1 sits above w2.  A blister
is cut around each, collapsed in overshadowing order, and the lagging
second derived subdivision turns the sunny collapse into a stable one.
"""
from linkhomotopy import fixtures
from linkhomotopy.collapse import certify_sequence, stabilize, sunny_collapse
from linkhomotopy.exact import fmt_point
from linkhomotopy.maps import gp_report
from linkhomotopy.shadow import LINK

c = fixtures.two_circles_4cube(seed=42)
w1, w2 = c.meta["w1"], c.meta["w2"]
rep = gp_report(c.Xp.total, c.F.images, 1, 4)
print("singular set:", sorted(rep.singular_set.simplexes), "| general position:", rep.ok)
print("F(w1) =", fmt_point(c.F.images[w1]))
print("F(w2) =", fmt_point(c.F.images[w2]))

seq = sunny_collapse(c.F, c.Xp, c.part)
bs = seq.meta["blisters"]
print(f"\nhost after corner cutting: {len(c.Xp.total.vertices)} -> {len(bs.host.vertices)} vertices")
for b in bs.blisters:
    print(f"blister over {b.A}: up {b.a_up}, down {b.a_down}, to {b.a_to}; {len(b.J)} simplexes")
print("groups:", list(zip(seq.names, seq.groups)))
print("sunny certificates:", [cert.verdict for cert in seq.certificates])

# the same collapse is not stable sunny: its shadows touch the boundary of what is left
print("\nstable check before stabilizing:", [cert.verdict for cert in certify_sequence(seq, LINK, stable=True)])
st = stabilize(None, seq)
print("stable groups:", list(zip(st.names, st.groups)))
print("stable check after stabilizing:", [cert.verdict for cert in st.certificates])
