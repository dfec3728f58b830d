"""Regenerate the frozen regression values used by the CLI tests.

    python scripts/freeze_golden.py

Only rerun after an intentional change to the numerics.
"""

import contextlib
import io
import json
from pathlib import Path

from catability.cli import main

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"
CASES = {
    "squeezed_fock_db-5_eta0.9.json": ["catability", "squeezed-fock", "--db", "-5", "--loss-eta", "0.9"],
}


def run():
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(argv)
        if code != 0:
            raise SystemExit(f"{argv} exited with {code}")
        payload = json.loads(buf.getvalue())
        doc = {"argv": argv, "xi": payload["xi"]["value"], "zeta": payload["zeta"]["value"],
               "alpha_xi": payload["xi"]["optimal_alpha_re"], "sign_xi": payload["xi"]["sign"]}
        (GOLDEN / name).write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {GOLDEN / name}: xi={doc['xi']:.8f} zeta={doc['zeta']:.8f}")


if __name__ == "__main__":
    run()
