# %% [markdown]
# # Chain integrals on the curve
#
# In the chart z = 1 the curve is a 3:1 cover of the x-line, branched over
# six points.  We track sheets along paths and integrate psi dx / f_y.

# %%
import numpy as np

from hessegkz import curves

psi = 0.3
xb = curves.branch_points(psi)
print(np.round(xb, 6))
print(curves.galois_residual(psi))

# %% [markdown]
# Each small loop round a branch point swaps two sheets.

# %%
for z, _, perm in curves.transposition_loops(psi):
    print(np.round(z, 4), perm)

# %% [markdown]
# ## The chain K
#
# Start above x = -1 at y = (3 psi x)^(1/2), run to the branch point and come
# back on the sheet y = 0.  The value does not depend on the path drawn.

# %%
K = [curves.chain_integral_K(psi, curves.standard_chain(psi)),
     curves.chain_integral_K(psi, curves.standard_chain(psi, detour=0.3)),
     curves.chain_integral_K(psi, curves.arc_chain(psi))]
K

# %% [markdown]
# Applying psi^-3 L_PF to K does not give a constant: the start point moves
# with psi, and the result scales like psi^(-3/2).

# %%
for p in (0.25, 0.3):
    h = curves.inhomogeneity_of_K(p)
    print(p, h.value, h.primitive_value, h.diagnostic)

# %% [markdown]
# A chain between two 3-torsion points, by contrast, is a combination of periods.

# %%
ps = [0.3 + 0.03 * np.exp(2j * np.pi * j / 6) for j in range(6)]
fit = curves.fit_to_periods(ps, [curves.torsion_chain_integral(p, 3, 1) for p in ps])
fit.residual / fit.scale
