# How fast does the leading term's error shrink?  Sweep t on a log grid,
# scale out exp(t*h(c)) and fit the slope of log|residual| against log t.
from laplace_asym import Problem, fit_remainder_exponent, sweep

cases = {
    # endpoint: the x term leaves a 1/(2t) residual, exactly the predicted order
    "1+x on [0,1]": Problem("1+x", "-x^2", 0, 1),
    # interior: odd Gaussian moments vanish, so the residual beats the bound by t^(-1/2)
    "cos(x) on [-1,1]": Problem("cos(x)", "-x^2", -1, 1),
    # interior with a cubic phase term
    "1 with h=-x^2+x^3": Problem("1", "-x^2+x^3", -0.5, 0.5),
    # sloped endpoint: residual is -exp(-t)/t, faster than any power
    "1 with h=-x on [0,1]": Problem("1", "-x", 0, 1),
}

for name, p in cases.items():
    s = sweep(p, 5, 500, 20)
    fit = fit_remainder_exponent(s)
    mode = "one-sided" if fit.one_sided else "two-sided"
    print(f"{name:22s} predicted {fit.theoretical_exponent:5.2f}  fitted {fit.slope:7.3f}  "
          f"r2={fit.r_squared:.4f}  points={fit.points_used:2d}  pass={fit.passed} ({mode})")

# the raw table for one case
s = sweep(cases["1+x on [0,1]"], 5, 500, 8)
print()
print(f"{'t':>10s} {'scaled residual':>16s} {'t*residual':>12s}")
for row in s.rows():
    print(f"{row['t']:10.3f} {row['scaled_residual']:16.6e} {row['t'] * row['scaled_residual']:12.8f}")
