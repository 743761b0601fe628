"""Acceptance gate: eleven numbered criteria, one pass/fail line each.

Every criterion runs the corresponding verification suite at its stated
grid sizes and tolerances and prints a single summary line; the assert
makes pytest fail the criterion if any contained check fails.
"""

import numpy as np
import pytest

from pathtrans import verify


def _report(num, title, checks):
    ok = verify.checks_pass(checks)
    worst = max(checks, key=lambda c: (not c.passed, c.value))
    print("criterion %02d [%s]: %s (worst %s=%.3e)"
          % (num, title, "PASS" if ok else "FAIL", worst.name, worst.value))
    for c in checks:
        assert c.passed, "%s: value=%.6e tol=%.6e %s" % (c.name, c.value,
                                                         c.tol, c.info)


class TestAcceptance:
    def test_criterion_01_crossed_module_axioms(self):
        checks = verify.suite_lie(samples=100)
        _report(1, "crossed-module axioms + broken control", checks)

    def test_criterion_02_omega_axioms(self):
        checks = verify.suite_omega(n=201, n_scen=20)
        _report(2, "omega vertical/equivariance on 20 scenarios", checks)

    def test_criterion_03_Omega_axioms(self):
        checks = verify.suite_Omega(n_scen=20)
        _report(3, "decorated Omega axioms and splitting", checks)

    def test_criterion_04_flat_collapse(self):
        checks = verify.suite_flat()
        _report(4, "flat collapse to identity at 1e-12", checks)

    def test_criterion_05_abelian_oracles(self):
        checks = verify.suite_abelian(n=201, refinements=(51, 101, 201))
        _report(5, "abelian closed-form oracles + order >= 2", checks)

    def test_criterion_06_nonabelian_stokes(self):
        checks = verify.suite_stokes(n=201, refinements=(51, 101, 201))
        _report(6, "non-abelian Stokes residual + slope 2", checks)

    def test_criterion_07_endpoint_shift(self):
        checks = verify.suite_endpoint(n=401, refinements=(101, 201, 401))
        _report(7, "decorated endpoint shift + slope 4", checks)

    def test_criterion_08_reduction(self):
        checks = verify.suite_reduction(n=401,
                                        refinements=(101, 201, 401))
        _report(8, "holonomy-bundle reduction + sign-flip control", checks)

    def test_criterion_09_small_loop_holonomy(self):
        checks = verify.suite_holonomy(eps_list=(0.1, 0.05, 0.025))
        _report(9, "small-loop holonomy vs curvature", checks)

    def test_criterion_10_categorical_layer(self):
        checks = verify.suite_categorical(count=100)
        _report(10, "exchange/associativity/target coherence", checks)

    def test_criterion_11_round_trips(self):
        checks = verify.suite_roundtrip()
        _report(11, "trivialization and lift round trips", checks)
