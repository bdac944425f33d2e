# %% [markdown]
# # A two-parameter threefold
#
# The fundamental period is sum_k c_k b^(-6k) U_k(a), with U_k a polynomial
# killed by L_k.  Near a = 0 the U_nu for non-integer nu come from a Gamma
# series; near b = 0 only the layers nu = -n/6 with n = 1, 5 mod 6 occur.

# %%
from fractions import Fraction

from hessegkz import cy3, opalg

print([cy3.c_k(k) for k in range(5)])
print(cy3.u_k_coefficients(6))

# %%
print(opalg.format_operator(opalg.d1()))
[r.status for r in cy3.annihilation_check(10, 30)]

# %% [markdown]
# ## U_nu away from the integers

# %%
a = 1.6 + 0.7j
nu = Fraction(1, 2)
print(cy3.u_nu(a, nu, "barnes", 150), cy3.u_nu(a, nu, "pfq"))
cy3.barnes_annihilation(nu, 100).status

# %% [markdown]
# ## The b = 0 expansion

# %%
e = cy3.orbifold_expansion_b0(K=12, order=40)
for n, d in enumerate(e.d):
    print(n, d)

# %%
for r in e.reports:
    print(r.status, r.check, r.note)
