"""Smoke test for the pyinfospace extension module."""

import json
import math
from pathlib import Path

import pyinfospace as pi

ROOT = Path(__file__).resolve().parent.parent


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def check_constants():
    k = pi.constants("natural")
    assert k.lambda_c == 1.0 and k.nu_c == 1.0
    assert close(k.hbar_c, 1.0 / (2.0 * math.pi), 1e-15)
    si = pi.Constants("si")
    assert close(si.nu_c, 1.6637 * 2.0**143, 5e-3)
    assert si.unit_mode == "SI"


def check_kinematics():
    x = pi.FourVector(2.0, 0.3, -0.4, 1.1)
    boost = pi.LorentzMap.boost([0.3, -0.2, 0.5])
    y = boost.apply(x)
    assert close(y.interval(), x.interval(), 1e-12)
    assert boost.metric_deviation() < 1e-12
    assert close(pi.lorentz_factor([0.6, 0.0, 0.0]), 1.25, 1e-15)
    try:
        pi.LorentzMap.boost([1.0, 0.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("superluminal boost accepted")


def check_emotion():
    lat = pi.Lattice([4, 4, 4, 4], [1.0, 1.0, 1.0, 1.0])
    text = pi.TensorField.constant(lat, 1, [0.3, 0.1, -0.2, 0.05])
    perception = pi.TensorField.constant(lat, 1, [0.4, -0.1, 0.2, 0.3])
    fields, violations = pi.emotion_breakdown(text, perception)
    assert not violations
    for a, b in zip(fields["q"], fields["mu"]):
        assert close(a, b, 1e-12)


def check_minimize():
    a = pi.FourVector(0.0, 0.0, 0.0, 0.0)
    b = pi.FourVector(4.0, 1.0, 0.5, 0.0)
    action, iters, grad, nodes = pi.minimize_free(a, b, 1.0, 8, perturbation=0.3)
    assert grad <= 1e-8 and iters > 0 and len(nodes) == 9
    straight = -(b - a).interval() ** 0.5
    assert close(action, straight, 1e-8)


def check_transfer():
    lat = pi.Lattice([8, 8, 8, 8], [0.2] * 4, [-0.5] * 4)
    r = pi.free_transfer(
        pi.FourVector(0.0, 0.0, 0.0, 0.0),
        pi.FourVector(0.3, 0.1, 0.0, 0.0),
        [1.0] * 4,
        [32] * 4,
        lat,
        [0.2, 0.0, 0.0],
    )
    assert close(r["total_probability"][0], 1.0, 1e-9)
    assert r["phase_step"][0] <= math.pi


def check_scenario():
    text, passed = pi.run_scenario(str(ROOT / "scenarios" / "kinematics.json"), seed=3)
    report = json.loads(text)
    assert passed and report["passed"] and report["results"]["seed"] == 3


def main():
    for check in [check_constants, check_kinematics, check_emotion, check_minimize, check_transfer, check_scenario]:
        check()
        print(f"{check.__name__}: ok")


if __name__ == "__main__":
    main()
