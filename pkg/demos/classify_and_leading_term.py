# Walk through the pipeline on a few integrals of the form
#   I(t) = int_a^b exp(t*h(x)) g(x) dx
# and compare the leading term with the oracle as t grows.
import math

from laplace_asym import Problem, adaptive_quad, classify, evaluate_approx, leading_term

problems = [
    ("x^2", "-x^2", -1, 1),         # interior max, g vanishes to order 2
    ("x", "-x^2", 0, 1),            # flat left endpoint, odd order
    ("1", "-x", 0, 1),              # sloped endpoint
]

for g, h, a, b in problems:
    p = Problem(g, h, a, b)
    cl = classify(p)
    ap = leading_term(cl)
    print(f"g={g!r} h={h!r} on [{a}, {b}]")
    print(f"  case={cl.case_tag.value} side={cl.side.value} k={cl.k} c={cl.c:g}")
    print(f"  I(t) ~ exp({ap.hc:g} t) * {ap.amplitude:.12g} * t^{ap.power:g}")
    for t in (5.0, 20.0, 80.0):
        exact = adaptive_quad(p, t, 1e-13).value
        approx = evaluate_approx(ap, t).value
        print(f"  t={t:5g}  oracle={exact:.12e}  approx={approx:.12e}  rel={abs(exact - approx) / abs(exact):.1e}")
    print()

# a phase with a shifted maximum and a nonzero value there
p = Problem("1+x^2", "0.5 - (x-0.3)^2 - (x-0.3)^4", -1, 2)
cl = classify(p)
print("shifted phase:", cl.as_dict())
ap = leading_term(cl)
for t in (10.0, 100.0):
    print(f"  t={t:g}  ratio oracle/approx = {adaptive_quad(p, t, 1e-13).value / ap(t):.8f}")

# odd order at an interior maximum is refused; the next term would be needed
try:
    classify(Problem("x", "-x^2", -1, 1))
except Exception as exc:
    print(type(exc).__name__ + ":", exc)

print("sqrt(pi)/2 =", math.sqrt(math.pi) / 2)
