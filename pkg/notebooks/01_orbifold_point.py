# %% [markdown]
# # The Hesse pencil near the orbifold point
#
# The cubic x^3 + y^3 + z^3 - 3 psi x y z.  Its reduced GKZ operator has three
# solutions at psi = 0, but only two of them are periods.  We build all three as
# exact series, check which operator kills which, and compare with the
# oscillating integral over the positive octant.

# %%
from fractions import Fraction

from hessegkz import frobenius, opalg, oscint

print(opalg.format_operator(opalg.d_gkz()))
print(opalg.format_operator(opalg.l_pf()))

# %% [markdown]
# The GKZ operator is the Picard-Fuchs operator with one extra theta on the left
# (after a chart change), so its solution space is one larger.

# %%
left = opalg.compose(opalg.theta("alpha"), opalg.l_pf_alpha())
opalg.normal_form_equal(opalg.d_gkz_alpha(), left, up_to_constant=True)

# %% [markdown]
# ## Series solutions
#
# pi1 and pi2 start at psi and psi^2; J3 starts at psi^3.

# %%
p1, p2, j3 = frobenius.orbifold_basis(30)
for s in (p1, p2, j3):
    print([str(s.coefficient(0, s.rho + 3 * k)) for k in range(5)])

# %%
[frobenius.annihilates(opalg.l_pf(), s) for s in (p1, p2, j3)]

# %% [markdown]
# J3 is not killed by L_PF; what is left is a constant.

# %%
frobenius.psi_chart_inhomogeneity(200)

# %% [markdown]
# ## The oscillating integral
#
# Its Gamma series splits by residue class mod 3 into J1 + J2 + J3.

# %%
psi = 0.25 + 0.1j
I = oscint.oscillating_series(psi)
J = oscint.j_decomposition(psi)
print(I.value, sum(J), abs(I.value - sum(J)))

# %%
q = oscint.quadrature_3d(oscint.OscillatingSetup(-0.3))
print(q.value, oscint.oscillating_series(-0.3).value, q.meta["tail_bound"])

# %% [markdown]
# Rotating psi by rho permutes the pieces with phases; J3 is the invariant one.

# %%
r = oscint.functional_relations(0.3)
r.rho, r.rho2, r.difference

# %%
frobenius.monodromy_at("orbifold").round(12)
