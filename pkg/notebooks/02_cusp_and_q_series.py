# %% [markdown]
# # The cusp alpha = 0
#
# Near alpha = 0 the periods have logarithms.  The mirror map turns alpha into
# q = exp(2 pi i tau) and everything becomes a q-series built from the
# character chi(n) of Z/3.

# %%
from hessegkz import frobenius, modular, opalg

basis = frobenius.frobenius_solve(opalg.d_gkz_alpha(), 20)
[s.depth for s in basis]

# %% [markdown]
# ## B^3 two ways

# %%
print(list(modular.eta_quotient_B(12).coeffs))
print(list(modular.lambert_B3(12).coeffs))
modular.lambert_B3(100) == modular.eta_quotient_B(100) ** 3

# %% [markdown]
# D t = B^3 and D^2 of the dilogarithm part is 1 - B^3, so the extra solution
# is a second integral of a weight three form.

# %%
print(modular.mirror_map_D(100) == modular.lambert_B3(100))
print(modular.li2_chi_part(100).D().D() == modular.QSeries.one(100) - modular.lambert_B3(100))

# %% [markdown]
# ## From alpha to q numerically

# %%
r = modular.hauptmodul_bridge((0.01, 0.05, 0.1))
print(r.taus)
print(r.ratios)

# %% [markdown]
# ## Wronskian at the orbifold point

# %%
print(modular.wronskian_constant(100))
modular.wronskian_solution_fit(60)
