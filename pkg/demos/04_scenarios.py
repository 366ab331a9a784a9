"""
Scenario files
==============

The shipped scenarios run through the same path as the command line;
outputs land in a temporary directory.
"""

import tempfile
from pathlib import Path

from vsmetric import cli

out = Path(tempfile.mkdtemp())
for name, text in sorted(cli.shipped_scenarios().items()):
    res = cli.run(cli.parse_scenario(text, name), out)
    print(f"{name:>24}: {res.verdict:<10} exit {res.exit_code}  limit {res.limit}")

# bad input is reported by field
for text in ("", "[scenario]\nmode = solve_two_map\n[maps]\npreset = example_4_2\n[coefficients]\nh = 0.5,0,0,0,0\n"):
    try:
        cli.parse_scenario(text)
    except cli.ScenarioError as exc:
        print("rejected:", exc)

print(sorted(p.name for p in out.iterdir()))
print((out / "example_4_2.trace.csv").read_text().splitlines()[0])
