"""A genus-0 surface with three embedded planar ends.

The data lives on the plane punctured at z1, z2, and infinity.  Two rows of
coefficients (a1, a2, a3) and (b1, b2, b3) define the pair of 1-forms

    phi_a = (a1/(z - z1)^2 + a2/(z - z2)^2 + a3) dz,
    phi_b = the same with the b row,

and the immersion uses (phi_a, -i phi_a, phi_b, -i phi_b).  The constructor
checks the algebra that makes this work: proportional first columns keep the
map conformal, a rank-2 coefficient matrix keeps it an immersion, and double
poles with zero residue at the three punctures make every end embedded
planar.  Residues vanish here for free (derivatives of 1/(z - zk) have
none), which is why all real periods are certified zero symbolically.

Run it with:  python3 demos/demo_three_ended_sphere.py
"""

from planarends import end_reports, three_end_genus0
from planarends.weierstrass import real_periods_zero


def main():
    # first two columns proportional (1*2 - 2*1 = 0), third breaks the rank
    data = three_end_genus0(1, 1, 1, 2, 2, 3, 1, -1)
    print("surface: genus 0, punctures at 1, -1, and infinity")

    for rep in end_reports(data):
        print(
            f"  end at {rep.puncture}: min order {rep.min_order}, "
            f"embedded planar: {rep.is_embedded_planar}, "
            f"image {rep.gauss_image_str()}"
        )
        assert rep.is_embedded_planar

    ok, table = real_periods_zero(data)
    methods = ", ".join(sorted({r.method for r in table}))
    worst = max(abs(r.real_part) for r in table)
    print(f"all real periods vanish: {ok} "
          f"({len(table)} records, method {methods}, max |Re| = {worst:g})")

    # the same constructor rejects data that only looks plausible:
    # a rank-1 coefficient matrix folds the surface onto a plane
    try:
        three_end_genus0(1, 2, 0, 2, 4, 0, 1, -1)
    except Exception as exc:
        print(f"rank-1 rows are rejected: {exc}")


if __name__ == "__main__":
    main()
