"""Show how far each negative control lands from its tolerance.

Every bundled check marked ``"expect": "fail"`` feeds an identity an input it should
reject (a non-holomorphic F, a misprinted constant, swapped jump sides, ...).  The
ratio printed here is residual / tolerance; the verdict needs it above 100.

Run with ``python3 demos/negative_controls.py``; takes about two minutes on one core.
"""
from cliffcauchy.scenarios import bundled_scenario, bundled_scenarios, run_check

for name in bundled_scenarios():
    scn = bundled_scenario(name)
    for i, entry in enumerate(scn["checks"]):
        if entry.get("expect") != "fail":
            continue
        rep = run_check(scn, i)
        key, ratio = max(((k, rep.residuals[k] / t) for k, t in rep.tolerances.items() if t > 0),
                         key=lambda kv: kv[1])
        print(f"{name:22s} {rep.check:20s} {entry.get('label', ''):40s} {key:12s} x{ratio:9.2e}")
