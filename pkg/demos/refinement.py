"""Residuals of every embedded demo over refinement levels 3 to 5."""
from capillary import demo_config
from capillary.demos import DEMOS
from capillary.diagnostics import refinement_table


def main(levels=(3, 4, 5)):
    head = f"{'demo':16s}{'level':>6s}{'vertices':>10s}{'area id':>11s}" \
           f"{'angle dev':>11s}{'moment err':>12s}{'energy':>12s}"
    print(head)
    for name in DEMOS:
        for row in refinement_table(demo_config(name), levels):
            print(f"{name:16s}{row['level']:6d}{row['vertices']:10d}"
                  f"{row['area_identity_max']:11.2e}"
                  f"{row['contact_angle_max_deviation_deg']:11.2e}"
                  f"{row['quadrature_moment_error']:12.2e}{row['energy']:12.6f}")


if __name__ == "__main__":
    main()
