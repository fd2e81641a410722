#!/usr/bin/env python3
"""Solve an LP-format model with the HiGHS build bundled in SciPy.

usage: highs_lp.py MODEL.lp SOLUTION.sol [TIME_LIMIT_SECONDS]

The solution file starts with a `# HiGHS <status>` comment, then lists
`=obj= <value>` and one `<name> <value>` line per column. A run stopped by
the time limit still writes its best solution, under a `# HiGHS Time limit
reached` comment. An infeasible model gives the single word `infeasible`.
"""

import sys

from scipy.optimize._highspy import _core


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    lp_path, sol_path = argv[1], argv[2]
    h = _core._Highs()
    h.setOptionValue("output_flag", False)
    if len(argv) > 3:
        h.setOptionValue("time_limit", float(argv[3]))
    if h.readModel(lp_path) != _core.HighsStatus.kOk:
        print(f"could not read {lp_path}", file=sys.stderr)
        return 1
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    with open(sol_path, "w") as out:
        if status == "Infeasible":
            out.write("infeasible\n")
            return 0
        has_primal = h.getInfo().primal_solution_status == 2
        if status != "Optimal" and not (status == "Time limit reached" and has_primal):
            print(f"HiGHS status: {status}", file=sys.stderr)
            return 1
        out.write(f"# HiGHS {status}\n")
        out.write(f"=obj= {h.getInfo().objective_function_value!r}\n")
        names = h.getLp().col_names_
        for name, value in zip(names, h.getSolution().col_value):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
