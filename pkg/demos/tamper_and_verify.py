"""Certify a planar construction, then show that each single-field edit is caught.

    python3 demos/tamper_and_verify.py
"""
from distavoid import FSpec, NormSpec, build, certify
from distavoid.oracle import brute_pair_check
from distavoid.tamper import mutation_corpus

m = build(2, NormSpec.l2(2), FSpec.parse("inv_poly:1"), 3)
s1 = m.stage(1)
print(f"R_1 = {s1.R}, witness {s1.gap.witnesses}, eps_1 = {s1.eps}")
print("untouched manifest:", certify(m, deep=True).status)

for name, bad in mutation_corpus(m, 1):
    rep = certify(bad)
    names = ", ".join(sorted({f"{r.name}@{r.stage}" for r in rep.failures()}))
    print(f"{name:<18} -> {rep.status}: {names}")

# the exhaustive falsifier only sees edits that create a real collision; block 1 spans
# differences up to 64*sqrt(2), far below sqrt(65537), so it cannot see this one
bad = dict(mutation_corpus(m, 1))["R_onto_lattice"]
print("brute force on R_onto_lattice:", brute_pair_check(bad, 1))
