#!/usr/bin/env python3
"""Solve an SDPA sparse file (as written by `mposos --export-sdpa`) with cvxpy.

Reads min c.x s.t. sum_i x_i F_i - F0 >= 0 and prints the optimal value plus
the objective constant from the header comment.
"""
import argparse
import re
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    constant = 0.0
    body = []
    for line in lines:
        if line.startswith('"') or line.startswith("*"):
            m = re.search(r"objective constant (\S+)", line)
            if m:
                constant = float(m.group(1))
            continue
        if line.strip():
            body.append(line)
    nvars = int(body[0].split()[0])
    nblocks = int(body[1].split()[0])
    sizes = [int(v) for v in body[2].replace(",", " ").replace("{", " ").replace("}", " ").split()[:nblocks]]
    c = np.array([float(v) for v in body[3].replace(",", " ").split()[:nvars]])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(nvars + 1)]
    for line in body[4:]:
        k, b, i, j, v = line.split()
        k, b, i, j, v = int(k), int(b) - 1, int(i) - 1, int(j) - 1, float(v)
        mats[k][b][i, j] = v
        mats[k][b][j, i] = v
    return c, sizes, mats, constant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("path")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()
    c, sizes, mats, constant = read_sdpa(args.path)
    x = cp.Variable(len(c))
    cons = []
    for b, s in enumerate(sizes):
        expr = -mats[0][b] + sum(x[k] * mats[k + 1][b] for k in range(len(c)) if np.any(mats[k + 1][b]))
        if s < 0:
            cons.append(cp.diag(expr) >= 0)
        else:
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=args.solver)
    print(prob.status, "%.10g" % ((prob.value if prob.value is not None else float("nan")) + constant))
    return 0


if __name__ == "__main__":
    sys.exit(main())
