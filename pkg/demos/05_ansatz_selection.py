"""Screen random ansatz candidates by gradient signal before optimizing.

Random brickwork circuits differ wildly in how much first-order signal they
see at the Clifford point; picking the candidate with the largest sum of
absolute gradient entries is cheap (one stabilizer sweep each) and avoids
starting the optimizer on a flat direction.
"""

import numpy as np

from cliffgrad import Observable, select_ansatz

n = 6
terms = {f"Z{q} Z{q+1}": -1.0 for q in range(n - 1)}
terms |= {f"X{q}": -0.9 for q in range(n)}
obs = Observable.from_strings(n, terms)

best, sums = select_ansatz(
    count=40, n_qubits=n, depth=1, observable=obs, reference="0" * n, seed=11
)

sums = np.asarray(sums)
print(f"candidates screened : {sums.size}")
print(f"sum|g| range        : {sums.min():.4f} .. {sums.max():.4f}")
print(f"median sum|g|       : {np.median(sums):.4f}")
print(f"winner              : candidate {best.metadata['candidate_index']} "
      f"with sum|g| = {sums.max():.4f}")
print(f"winner parameters   : {best.n_params}")
