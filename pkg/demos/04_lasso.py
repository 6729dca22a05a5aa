"""
l1-regularized least squares
============================

The classic sparse-regression benchmark, split as

    min 0.5||Dx - d||^2 + tau||y||_1   s.t.  x - y = 0.

Block one is a quadratic data-fit solved by dense linear algebra; block
two is a soft-threshold in closed form.  An independent
proximal-gradient oracle provides the target objective.
"""

import numpy as np

import pcadmm as pc

problem, reference = pc.gen_lasso(n=20, samples=40, tau=0.5, seed=0)
nnz = int(np.sum(np.abs(reference.x[0]) > 1e-10))
print(f"oracle solution: {nnz}/20 nonzero coefficients, objective {reference.objective:.8f}")

for variant in ("pd", "dp"):
    result = pc.run(problem, pc.SolverConfig(variant=variant, tol=1e-8), reference=reference)
    err = abs(result.log.objective[-1] - reference.objective)
    match = int(np.sum(np.abs(result.solution.x_tilde[0]) > 1e-10))
    print(
        f"variant={variant}: {result.reason.kind} in {len(result.log)} iterations, "
        f"objective error {err:.2e}, support size {match}"
    )

# ----------------------------------------------------------------------------
# Sweeping the regularization weight traces the usual sparsity path;
# above the critical weight the solution collapses to zero.

print("\n   tau   nonzeros")
for tau in (0.1, 0.5, 2.0, 10.0, 1e3):
    _, ref = pc.gen_lasso(n=20, samples=40, tau=tau, seed=0)
    print(f"{tau:6.1f}   {int(np.sum(np.abs(ref.x[0]) > 1e-10)):3d}")
