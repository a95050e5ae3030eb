# Composite Simpson against the asymptotic formula.  Both error models grow
# like exp(t*max|h|); Simpson's carries t^4 / n^4 and the asymptotic one t^r,
# so beyond some T the formula wins for a fixed panel count n.
import numpy as np

from laplace_asym import Problem, crossover_time, estimate_constants, simpson, simpson_error_bound, sweep

p = Problem("1+x", "-x^2", 0, 1)

# convergence order of the composite rule at t = 1
ns = np.array([8, 16, 32, 64, 128])
ref = simpson(p, 1.0, 4096).value
errs = np.array([abs(simpson(p, 1.0, int(n)).value - ref) for n in ns])
print("errors:", " ".join(f"{e:.2e}" for e in errs))
print("order:", -np.polyfit(np.log(ns), np.log(errs), 1)[0])
print("bound at n=16:", simpson_error_bound(p, 1.0, 16), "actual:", errs[1])

# constants and crossover times from a sweep
n_list = (8, 16, 32, 64)
s = sweep(p, 2, 200, 20, n_list=n_list)
C0, c0 = estimate_constants(s)
r = s.approximation.remainder_exponent
print(f"\nC0={C0:.4e}  c0={c0:.4e}  r={r}")
for n in n_list:
    T = crossover_time(C0, c0, n, s.approximation.k, remainder_exponent=r)
    j = n_list.index(n)
    beyond = s.t_values > T
    wins = np.abs(s.residuals[beyond]) < s.simpson_errors[beyond, j]
    print(f"n={n:3d}  T={T:8.3f}  asymptotic error below Simpson at {wins.sum()}/{beyond.sum()} points past T")

# T comes from the two error *models*, which are worst-case.  Once exp(-t x^2)
# is negligible at the far end, Simpson's measured error falls much faster
# than t^4/n^4, so the measured comparison rarely follows the model past T.
