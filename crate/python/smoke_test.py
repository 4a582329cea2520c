#!/usr/bin/env python3
"""Smoke test for the doeblin_py extension module.

Builds nothing itself: expects `cargo build -p doeblin-py` (or --release)
to have produced libdoeblin_py.so, which is linked into a temp directory
under the importable name doeblin_py.so.
"""

import json
import math
import os
import shutil
import sys
import tempfile


def locate_library():
    here = os.path.dirname(os.path.abspath(__file__))
    root = os.path.dirname(here)
    candidates = [
        os.path.join(root, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("libdoeblin_py.so", "libdoeblin_py.dylib", "doeblin_py.dll")
    ]
    for path in candidates:
        if os.path.exists(path):
            return path
    raise SystemExit(
        "libdoeblin_py not found; run `cargo build -p doeblin-py` first"
    )


def import_module():
    lib = locate_library()
    tmp = tempfile.mkdtemp(prefix="doeblin_py_")
    suffix = ".so" if not lib.endswith(".dll") else ".pyd"
    shutil.copy(lib, os.path.join(tmp, "doeblin_py" + suffix))
    sys.path.insert(0, tmp)
    import doeblin_py

    return doeblin_py


def approx(a, b, tol=1e-6):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    dp = import_module()

    # GAD closed form: alpha = (1 - sqrt(eta))^2, reverse = 1 - eta.
    gad = dp.Channel.gad(0.3, 0.25)
    approx(gad.alpha(), 0.25)
    approx(gad.alpha_wang(), 0.25)
    approx(gad.reverse(), 0.75)
    approx(gad.alpha_cone("ppt"), 0.5)
    assert gad.alpha_analytic() is not None
    approx(gad.alpha_analytic(), 0.25, 1e-12)

    # Stokes parameters of GAD.
    t, T = gad.stokes()
    approx(t[2], (2 * 0.3 - 1) * (1 - 0.25), 1e-10)
    approx(T[0][0], math.sqrt(0.25), 1e-10)

    # PBR channel: alpha = 1 - 1/sqrt(2); its square has alpha 0.
    zero = [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
    plus = [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]
    pbr = dp.Channel.cq([zero, plus])
    approx(pbr.alpha(), 1 - 1 / math.sqrt(2))
    approx(pbr.tensor(pbr).alpha(), 0.0)

    # Divergences.
    one = [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
    approx(dp.trace_distance(zero, plus), 1 / math.sqrt(2), 1e-9)
    approx(dp.fidelity(zero, one), 0.0, 1e-10)
    approx(dp.hellinger_half(zero, one), 2.0, 1e-7)

    # Exclusion oracle on the PBR pair.
    approx(dp.exclusion_error([0.5, 0.5], [zero, plus]), (1 - 1 / math.sqrt(2)) / 2)

    # Application calculators.
    approx(dp.barren_plateau_bound([0.1] * 20, 1), 0.5105, 5e-5)
    approx(dp.error_mitigation_min_samples([0.25] * 10, 0.1), 14.206, 1e-2)
    approx(dp.fairness_beta(0.1, 0.25), 0.075, 1e-12)
    assert dp.convergence_time_bound(0.25, 0.01) == 17
    assert dp.convergence_time_bound(0.0, 0.01) is None

    # Heuristic oracles stay on the sound side.
    eta_hat = dp.eta_tr_estimate(gad, 20, 7)
    assert eta_hat <= 0.5 + 1e-9
    assert eta_hat >= 0.5 - 1e-3
    seesaw = dp.alpha_i_seesaw(gad, 3, 7)
    approx(seesaw, 0.5, 1e-4)

    # Convergence simulator against the bound.
    gad1 = dp.Channel.gad(1.0, 0.25)
    measured, bound, respected = dp.simulate_convergence(gad1, 0.01, "mixing", 0, 7)
    assert measured == 4.0 and bound == 17.0 and respected

    # JSON report and schema interop.
    report = json.loads(gad.alpha_report())
    assert report["status"] == "optimal"
    approx(report["value"], 0.25)
    ch = dp.Channel.from_json(json.dumps({"kind": "gad", "p": 1.0, "eta": 0.25}))
    fp, unique = ch.fixed_point()
    assert unique
    approx(fp[0][0][0], 1.0, 1e-8)

    print("doeblin_py smoke test: PASS")


if __name__ == "__main__":
    main()
