import numpy as np
import pytest

from dessins.autgroup import automorphism_arrays
from dessins.bicyclic import BicyclicPair, exact_pair_keys
from dessins.classify import (
    FalsificationError,
    is_isobicyclic,
    nu_formula,
    nu_of_group,
    orbit_partition,
    spec_row,
    theorem_formula,
    verify,
)
from dessins.group_core import Family, GroupSpec, enumerate_specs

from .conftest import sweep_grid


@pytest.mark.parametrize("p,d,e,value", [
    (3, 0, 0, 1), (3, 0, 4, 1), (3, 1, 1, 1), (3, 1, 2, 3), (3, 2, 2, 6),
    (3, 2, 3, 27), (3, 2, 4, 27), (5, 1, 2, 5), (5, 1, 1, 1), (5, 3, 3, 325),
])
def test_theorem_formula(p, d, e, value):
    assert theorem_formula(p, d, e) == value


def test_theorem_formula_domain():
    with pytest.raises(ValueError):
        theorem_formula(3, 2, 1)


def test_nu_formula_examples():
    assert [nu_formula(s) for s in enumerate_specs(3, 2, 4)] == [6, 2, 1, 6, 12]
    assert [nu_formula(s) for s in enumerate_specs(3, 2, 2)] == [8, 1]


@pytest.mark.parametrize("p,d,e", [g for g in sweep_grid() if g[0] ** (g[1] + g[2]) <= 3**6])
def test_orbits_partition_pairs_freely(p, d, e):
    for spec in enumerate_specs(p, d, e):
        keys, auts = exact_pair_keys(spec), automorphism_arrays(spec)
        orbits = orbit_partition(spec, pair_keys=keys, auts=auts)
        assert all(o.size == len(auts[0]) for o in orbits)
        assert np.array_equal(np.sort(np.concatenate([o.keys for o in orbits])), keys)
        assert all(o.representative == o.keys[0] for o in orbits)
        assert len(orbits) == nu_of_group(spec) == nu_formula(spec)


def test_orbit_partition_oracle_path():
    spec = GroupSpec(Family.M1, 3, 1, 2, 1)
    assert len(orbit_partition(spec, oracle=True)) == 2


def test_orbit_partition_detects_missing_pairs():
    spec = GroupSpec(Family.M1, 3, 1, 2, 1)
    keys = exact_pair_keys(spec)
    with pytest.raises(FalsificationError):
        orbit_partition(spec, pair_keys=keys[1:])


def test_orbit_partition_detects_nonfree_action():
    spec = GroupSpec(Family.M1, 3, 1, 2, 1)
    r, s, t, u = automorphism_arrays(spec)
    doubled = tuple(np.concatenate([x, x]) for x in (r, s, t, u))
    with pytest.raises(FalsificationError):
        orbit_partition(spec, auts=doubled)


def test_nu_of_group_detects_non_integral_ratio(monkeypatch):
    import dessins.classify as classify
    spec = GroupSpec(Family.M1, 3, 1, 2, 1)
    r, s, t, u = automorphism_arrays(spec)
    monkeypatch.setattr(classify, "automorphism_arrays", lambda sp, oracle=False: (r[:5], s[:5], t[:5], u[:5]))
    with pytest.raises(FalsificationError):
        nu_of_group(spec)


def test_isobicyclic():
    spec = GroupSpec(Family.M1, 3, 1, 1, 1)
    assert is_isobicyclic(spec, BicyclicPair(spec.a, spec.b))
    with pytest.raises(ValueError):
        other = GroupSpec(Family.M1, 3, 1, 2, 1)
        is_isobicyclic(other, BicyclicPair(other.b, other.a))


def test_verify_square_case():
    report = verify(3, 2, 2)
    assert report.match
    assert (report.total_dessins, report.symmetric_total, report.reciprocal_pair_classes) == (9, 3, 6)
    assert report.to_dict()["flags"] == {"rows": True, "theorem": True,
                                         "total_dessins": True, "symmetric": True}


def test_verify_deep_case():
    report = verify(3, 2, 4, geometry=False)
    assert [r.nu for r in report.rows] == [6, 2, 1, 6, 12]
    assert report.nu_total == 27 and report.match


def test_verify_parallel_matches_serial():
    a = verify(3, 2, 3, geometry=True)
    b = verify(3, 2, 3, geometry=True, workers=3)
    assert a.to_dict() == b.to_dict()


def test_spec_row_reports_diagnostics():
    row = spec_row(GroupSpec(Family.M1, 3, 1, 2, 1))
    assert row.match and row.nu == 2 and len(row.geometry) == 2
    data = row.to_dict()
    assert data["spec"] == "M1(1,2,1)" and data["errors"] == []


@pytest.mark.parametrize("p,e", [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_symmetric_classes_contain_their_reciprocal(p, e):
    symmetric = 0
    for spec in enumerate_specs(p, e, e):
        auts = automorphism_arrays(spec)
        for orbit in orbit_partition(spec, auts=auts):
            swapped_key = orbit.pair.swapped().key
            in_orbit = bool(np.isin(swapped_key, orbit.keys))
            assert in_orbit == is_isobicyclic(spec, orbit.pair, auts)
            symmetric += in_orbit
    assert symmetric == p ** (e - 1)
