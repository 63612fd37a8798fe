"""Regenerate the FCIDUMP and 1-RDM fixtures under crates/qchem/fixtures.

Requires pyscf. Integrals are spatial RHF molecular-orbital integrals in
chemists' notation; 1-RDMs are spin-summed CISD densities in the same basis.
"""
import json
import os

import numpy as np
from pyscf import ci, fci, gto, scf
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "qchem", "fixtures")


def system(name, atom, basis, rdm=False):
    mol = gto.M(atom=atom, basis=basis, verbose=0)
    mf = scf.RHF(mol).run()
    fcidump.from_scf(mf, os.path.join(OUT, name + ".fcidump"))
    e_fci = fci.FCI(mf).kernel()[0]
    if rdm:
        d = ci.CISD(mf).run().make_rdm1()
        np.savetxt(os.path.join(OUT, name + ".rdm1"), d, fmt="%.12e")
    return {"name": name, "basis": basis, "e_hf": mf.e_tot, "e_fci": e_fci}


def main():
    os.makedirs(OUT, exist_ok=True)
    refs = []
    for r in [0.5, 0.6, 0.7414, 0.75, 0.9, 1.2, 1.6, 2.2]:
        refs.append(system(f"h2_sto3g_{r:.4f}", f"H 0 0 0; H 0 0 {r}", "sto-3g"))
        refs[-1]["bond"] = r
    refs.append(system("h2_631g_0.7414", "H 0 0 0; H 0 0 0.7414", "6-31g"))
    refs.append(system("h2_ccpvdz_0.7500", "H 0 0 0; H 0 0 0.75", "cc-pvdz", rdm=True))
    refs.append(system("lih_sto3g_1.4500", "Li 0 0 0; H 0 0 1.45", "sto-3g", rdm=True))
    with open(os.path.join(OUT, "reference.json"), "w") as f:
        json.dump(refs, f, indent=2)


if __name__ == "__main__":
    main()
