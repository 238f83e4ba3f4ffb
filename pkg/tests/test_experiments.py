import math

import numpy as np
import pytest

from spectral_dumbbell.errors import DomainError
from spectral_dumbbell.experiments import (run_dumbbell_convergence, run_weyl_experiment,
                                           two_sphere_limit_iso)

LIMIT_RATIO = 6.09294778537955560  # 8 pi / (8 pi / 3)^(2/3), 30-digit evaluation


def test_limit_ratio():
    assert two_sphere_limit_iso().ratio == pytest.approx(LIMIT_RATIO, rel=1e-15)


def test_dumbbell_table_shape(dumbbell_table):
    t = dumbbell_table
    assert not t.failed
    recs = t.records()
    assert len(recs) == 6
    assert [r[0] for r in recs] == ["dumbbell"] * 3 + ["limit_two_spheres", "limit_with_segment",
                                                       "segment_dirichlet"]
    assert all(len(r) == len(t.header()) for r in recs)
    assert t.two_spheres.values[:8].tolist() == [0, 0, 2, 2, 2, 2, 2, 2]
    assert t.segment.values[0] == pytest.approx(math.pi**2, rel=1e-15)


def test_dumbbell_trends(dumbbell_table):
    rows = dumbbell_table.rows
    lam1 = [r.values[1] for r in rows]
    assert lam1[0] > lam1[1] > lam1[2] > 0
    assert all(r.values[0] == 0.0 for r in rows)
    ratios = [r.iso.ratio for r in rows]
    assert ratios[0] > ratios[1] > ratios[2] > LIMIT_RATIO
    assert all(r.iso_bound_max_ratio < 1 for r in rows)


def test_dumbbell_argument_errors():
    with pytest.raises(DomainError):
        run_dumbbell_convergence(0.5, [])
    with pytest.raises(DomainError):
        run_dumbbell_convergence(0.5, [0.1, 0.2])
    with pytest.raises(DomainError):
        run_dumbbell_convergence(0.0, [0.1])


def test_failed_point_is_recorded():
    t = run_dumbbell_convergence(0.5, [0.5, 0.2], level=3, m=4, threads=1)
    assert len(t.failed) == 1
    bad = t.failed[0]
    assert bad.delta == 0.5 and bad.error_kind == "mesh"
    assert t.rows[1].ok
    assert t.records()[0][-1].startswith("mesh:")


def test_weyl_experiment():
    t = run_weyl_experiment(2, 100)
    assert t.k1 == 5
    recs = list(t.records())
    assert len(recs) == 100
    assert [r[0] for r in recs if r[3]] == [5]
    assert recs[3][2] == 0.5
    with pytest.raises(DomainError):
        run_weyl_experiment(0, 10)
