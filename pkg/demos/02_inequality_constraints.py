"""
Inequality constraints without auxiliary variables
==================================================

The same solver handles 'sum_i A_i x_i >= b' directly: the multiplier
update simply projects onto the nonnegative orthant, and no slack
reformulation (which would add a third block) is needed.  We check the
full KKT conditions at the returned point and finish with a tiny
soft-margin classifier.
"""

import numpy as np

import pcadmm as pc

# ----------------------------------------------------------------------------
# A random inequality-constrained QP.  The reference comes from
# enumerating every active set, the most trustworthy oracle at this
# scale.

problem, reference = pc.gen_ineq_qp(p=2, block_dims=[6, 6], m=3, seed=11)
result = pc.run(problem, pc.SolverConfig(variant="dp"), reference=reference)
sol = result.solution

r = sum(sol.a_tilde) - problem.b
lam = sol.lambda_tilde
print(f"{result.reason} after {len(result.log)} iterations")
print(f"constraint values  Ax - b = {np.round(r, 8)}")
print(f"multiplier         lam    = {np.round(lam, 8)}")
print(f"complementarity |lam'(Ax-b)| = {abs(lam @ r):.2e}")
print(f"multiplier nonnegative: {bool(np.all(lam >= 0))}")
print(f"worst violation: {min(float(np.min(r)), 0.0):.2e}")

# ----------------------------------------------------------------------------
# Soft-margin linear classifier: two points, one per class.  The margin
# constraints are active at the optimum and no slack is used.

svm = pc.gen_toy_svm([(np.array([1.0]), +1), (np.array([-1.0]), -1)])
ref = pc.active_set_oracle(svm)
res = pc.run(svm, pc.SolverConfig())
print(f"\ntoy classifier: weight {res.solution.x_tilde[0]} (oracle {ref.x[0]})")
print(f"slacks {np.round(res.solution.x_tilde[1], 9)} (expected zero)")
