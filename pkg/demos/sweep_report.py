"""Drive the batch CLI over an acceleration sweep and tabulate the CSV.

Shows the intended round trip: config file in, versioned CSV out, rows
read back with the same module the driver writes with.
"""

import argparse
import os

from sgqei.cli import main as cli_main
from sgqei.csvio import read_csv

CONFIG = os.path.join(os.path.dirname(__file__), "configs",
                      "sweep_acceleration.cfg")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="sweep_out")
    args = ap.parse_args()

    rc = cli_main(["sweep", "--config", CONFIG, "--out", args.out])
    if rc != 0:
        raise SystemExit(rc)

    header, rows = read_csv(os.path.join(args.out, "sweep.csv"))
    print()
    print(f"schema {rows[0]['schema_version']}, "
          f"config hash {rows[0]['config_hash']}")
    print(f"{'a':>6}  {'K0':>12}  {'KV':>12}  {'KH':>12}  {'K total':>12}")
    for row in rows:
        k0_total = float(row["K0_straight"]) + float(row["K0_accel"])
        print(f"{float(row['value']):6.2f}  {k0_total:12.6g}  "
              f"{float(row['KV']):12.6g}  {float(row['KH']):12.6g}  "
              f"{float(row['K_total']):12.6g}")


if __name__ == "__main__":
    main()
