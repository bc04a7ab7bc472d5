"""Regenerate the checked-in fixture Hamiltonians.

Requires pyscf and openfermion. Spin orbitals are interleaved (even = alpha,
odd = beta), Jordan-Wigner with occupied = |1>, qubit 0 is the leftmost letter.
The nuclear repulsion is stored separately and is not part of [terms].
"""
import sys

import numpy as np
import openfermion as of
from pyscf import ao2mo, fci, gto, scf


def build(label, atoms, path):
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    norb = mf.mo_coeff.shape[1]
    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mf.mo_coeff), norb)
    # chemist (pq|rs) -> openfermion physicist ordering <pq|sr> convention
    two = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    one_so, two_so = of.chem.molecular_data.spinorb_from_spatial(h1, two)
    iop = of.InteractionOperator(0.0, one_so, 0.5 * two_so)
    qop = of.jordan_wigner(of.get_fermion_operator(iop))
    qop.compress(1e-12)
    n = 2 * norb
    ecore = mol.energy_nuc()

    # FCI cross-check in the full Fock space (particle number unrestricted).
    sparse = of.get_sparse_operator(qop, n_qubits=n).toarray()
    e_all = np.linalg.eigvalsh(sparse)[0] + ecore
    e_fci = fci.FCI(mf).kernel()[0]
    print(label, "fci", e_fci, "full-space", e_all, "hf", mf.e_tot, file=sys.stderr)

    with open(path, "w") as f:
        f.write(f"# {label}: STO-3G, Jordan-Wigner, interleaved spin orbitals\n")
        f.write("[hamiltonian]\n")
        f.write(f"n_qubits = {n}\n\n[molecule]\n")
        f.write(f"label = {label}\n")
        f.write(f"n_electrons = {mol.nelectron}\n")
        f.write(f"nuclear_repulsion = {float(ecore)!r}\n")
        f.write(f"e_fci = {float(e_all)!r}\n\n[terms]\n")
        rows = []
        for term, c in qop.terms.items():
            letters = ["I"] * n
            for q, p in term:
                letters[q] = p
            assert abs(c.imag) < 1e-12
            rows.append(("".join(letters), c.real))
        rows.sort()
        for s, c in rows:
            f.write(f"{float(c)!r} {s}\n")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    build("h2_sto3g_0p74", "H 0 0 0; H 0 0 0.74", f"{out}/h2_sto3g_0p74.ham")
    h4 = "; ".join(f"H 0 0 {1.0 * i}" for i in range(4))
    build("h4_sto3g_1p00", h4, f"{out}/h4_sto3g_1p00.ham")
