"""Stand-in flow solver for exercising the external-evaluator protocol.

Usage::

    python3 -m bladeopt.stub_solver [--mode MODE] [options] WORKDIR

Modes:

``isentropic``
    total-temperature ratio equal to the isentropic one, so eta = 1.
``ratio``
    fixed pressure ratio ``--pressure-ratio`` and temperature ratio
    ``--temperature-ratio`` (defaults 2 and 1.25).
``fail``
    exit with status 1 without writing a result.
``garbage``
    write an unparseable result file and exit 0.
``sleep``
    sleep ``--seconds`` and then behave like ``isentropic``.

The command checks that the protocol inputs exist before writing
``WORKDIR/result``.
"""

import argparse
import sys
import time
from pathlib import Path

P_IN = 101325.0
T_IN = 288.15


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("workdir", type=Path)
    ap.add_argument("--mode", default="isentropic",
                    choices=["isentropic", "ratio", "fail", "garbage", "sleep"])
    ap.add_argument("--pressure-ratio", type=float, default=2.0)
    ap.add_argument("--temperature-ratio", type=float, default=1.25)
    ap.add_argument("--gamma", type=float, default=1.4)
    ap.add_argument("--iterations", type=int, default=50)
    ap.add_argument("--seconds", type=float, default=1.0)
    args = ap.parse_args(argv)

    for name in ("blade.sec", "params"):
        if not (args.workdir / name).is_file():
            print(f"missing protocol input {name}", file=sys.stderr)
            return 2
    if args.mode == "fail":
        print("stub solver: diverged", file=sys.stderr)
        return 1
    if args.mode == "garbage":
        (args.workdir / "result").write_text("not a number\n")
        return 0
    if args.mode == "sleep":
        time.sleep(args.seconds)

    pr = args.pressure_ratio
    if args.mode == "ratio":
        tr = args.temperature_ratio
    else:
        tr = pr ** ((args.gamma - 1.0) / args.gamma)
    row = f"{P_IN!r} {P_IN * pr!r} {T_IN!r} {T_IN * tr!r}\n"
    (args.workdir / "result").write_text(
        "# p_total_in p_total_out t_total_in t_total_out\n" + row * args.iterations
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
