#!/usr/bin/env python3
"""Scripted docking executable for backend tests.

Reads {"protein_pdb", "ligand_sdf", "seed"} JSON on stdin; shifts every
ligand x coordinate by 0.1 * (seed + 1) and answers
{"ligand_sdf_posed": <sdf>}. Pure stdlib so the wire contract is exercised
without importing the package under test.
"""

import json
import sys


def shift_sdf(text: str, dx: float) -> str:
    lines = text.splitlines()
    n_atoms = int(lines[3][0:3])
    out = list(lines)
    for i in range(4, 4 + n_atoms):
        x = float(lines[i][0:10])
        out[i] = f"{x + dx:>10.4f}" + lines[i][10:]
    return "\n".join(out) + "\n"


def main():
    request = json.load(sys.stdin)
    posed = shift_sdf(request["ligand_sdf"], 0.1 * (request["seed"] + 1))
    json.dump({"ligand_sdf_posed": posed}, sys.stdout)


if __name__ == "__main__":
    main()
