"""Residue-free double-pole differentials on a torus.

Building surfaces over a torus C/(Z + tau Z) needs meromorphic 1-forms with
a double pole at a marked point, zero residue, and prescribed leading
coefficient.  torus_eta produces a certified pair: eta1 with its double pole
at the origin (the Weierstrass p-function itself), and eta2 with its double
pole at a second marked point p2.  The shape of eta2 depends on where p2
sits: at a half period a single translated p-function works, while a
generic p2 needs a correction term built from p' to cancel the residue.

Every returned form carries a numeric certificate: contour integrals around
the pole on two radii (the residues, which must vanish) and the measured
leading coefficient of the double pole.  A failed certificate raises
PoleError instead of returning a bad form.

Run it with:  python3 demos/demo_torus_eta.py
"""

from planarends import TorusLattice, torus_eta


def show(lattice, p2):
    eta1, eta2 = torus_eta(lattice, p2)
    print(f"p2 = {p2}: eta2 case = {eta2.case}")
    for name, form in (("eta1", eta1), ("eta2", eta2)):
        loops = {k: abs(v) for k, v in form.certificate.items() if k.startswith("loop_r=")}
        worst = max(loops.values())
        lead = form.certificate["lead"]
        expected = form.certificate["expected_lead"]
        print(
            f"  {name} [{form.case}]: pole at {form.certificate['pole']}, "
            f"max |residue loop| = {worst:.2e}, "
            f"leading coefficient {lead:.6g} (expected {expected})"
        )


def main():
    lattice = TorusLattice(1j)
    print("lattice: Z + i Z")
    print(f"half-period values e1, e2, e3 = "
          f"{lattice.e1:.6g}, {lattice.e2:.6g}, {lattice.e3:.6g}")
    print(f"invariants g2, g3 = {lattice.g2:.6g}, {lattice.g3:.6g}")

    # p2 on a half period: a translate of the p-function already works
    show(lattice, 0.5)

    # generic p2: the correction term kicks in
    show(lattice, 0.3 + 0.4j)

    # a skew lattice, same machinery
    skew = TorusLattice((1 + 3j) / 2)
    print("lattice: Z + (1+3i)/2 Z")
    show(skew, 0.25 + 0.5j)


if __name__ == "__main__":
    main()
