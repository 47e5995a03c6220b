import math

import mpmath
import numpy as np
import pytest

from borelcalc import contours, symbols, zerofinder
from borelcalc.errors import (CertificationFailure, IncompleteCatalog, NoConvergence,
                              StaleCatalog)

FIRST_ORDINATES = [14.134725141734693, 21.022039638771555, 25.010857580145688,
                   30.424876125859513, 32.935061587739189]


def test_newton_simple_and_double_roots():
    assert abs(zerofinder.newton(lambda s: s**2 - 2, 1.0) - math.sqrt(2)) < 1e-14
    r = zerofinder.newton(lambda s: (s - 0.5j) ** 2 * (s + 3), 0.4j + 0.1, multiplicity=2)
    assert abs(r - 0.5j) < 1e-7
    with pytest.raises(NoConvergence):
        zerofinder.newton(lambda s: np.exp(s), 0.0, max_iter=5)


def test_scan_polynomial_with_double_root():
    f = lambda s: (s - 0.3 - 0.2j) ** 2 * (s + 0.7) * (s - 1.1j)
    recs = zerofinder.scan_zeros(f, contours.rectangle(-2 - 2j, 2 + 2j))
    locs = sorted(((round(r.location.real, 6), round(r.location.imag, 6)), r.multiplicity) for r in recs)
    assert locs == [((-0.7, 0.0), 1), ((0.0, 1.1), 1), ((0.3, 0.2), 2)]
    assert all(r.certified for r in recs)


def test_catalog_matches_mpmath(catalog):
    assert len(catalog.zeros) == 30
    for k, z in enumerate(catalog.zeros[:12], start=1):
        ref = mpmath.zetazero(k)
        assert abs(z - complex(ref)) < 1e-9
    assert catalog.height > catalog.zeros[-1].imag
    assert all(r <= 1e-10 for r in catalog.residuals)


def test_catalog_persistence(catalog, tmp_path):
    path = tmp_path / "cat.json"
    catalog.save(path)
    back = zerofinder.ZetaZeroCatalog.load(path)
    assert back.zeros == catalog.zeros and back.height == catalog.height
    data = path.read_text().replace('"671/128"', '"7"')
    path.write_text(data)
    with pytest.raises(StaleCatalog):
        zerofinder.ZetaZeroCatalog.load(path)


def test_catalog_certify_rejects_tampered_zero(catalog):
    bad = zerofinder.ZetaZeroCatalog([catalog.zeros[0] + 1e-3], [catalog.boxes[0]],
                                     [0.0], catalog.height)
    with pytest.raises(CertificationFailure):
        bad.certify()


def test_trivial_pullbacks_h3(catalog):
    recs = zerofinder.zeros_of_zeta_shifted(3.0, 3.0, catalog)
    assert [r.location for r in recs] == pytest.approx([-1j * math.sqrt(5), 1j * math.sqrt(5),
                                                        -1j * math.sqrt(7), 1j * math.sqrt(7)])
    assert all(r.multiplicity == 1 and r.residual <= 1e-8 for r in recs)


def test_empty_disc():
    assert zerofinder.zeros_of_zeta_shifted(10.0, 1.0, None) == []


def test_nontrivial_pullbacks_h2(catalog):
    recs = zerofinder.zeros_of_zeta_shifted(2.0, 4.0, catalog)
    w = complex(0.5, FIRST_ORDINATES[0])
    s = np.sqrt(w - 2)
    expected = {s, -s, s.conjugate(), -s.conjugate()}
    for e in expected:
        assert min(abs(r.location - e) for r in recs) < 1e-9
    for r in recs:
        assert abs(symbols.zeta_shifted(r.location, 2.0)) <= 1e-8
        assert abs(r.location) < 4.0


def test_incomplete_catalog_raises(catalog):
    with pytest.raises(IncompleteCatalog):
        zerofinder.zeros_of_zeta_shifted(2.0, 20.0, catalog)
    with pytest.raises(IncompleteCatalog):
        zerofinder.zeros_of_zeta_shifted(2.0, 4.0, None)


def test_required_height():
    assert zerofinder.required_height(2.0, 4.0) == pytest.approx(math.sqrt(255))
    assert zerofinder.required_height(10.0, 1.0) == 0.0


def test_find_zeros_dispatch():
    recs = zerofinder.find_zeros(symbols.poly_symbol([0, 0, -1, 1]), 2.0)
    got = sorted((round(r.location.real, 8), r.multiplicity) for r in recs)
    assert got == [(0.0, 2), (1.0, 1)]


def test_zero_record_json():
    r = zerofinder.ZeroRecord(1 + 2j, 1, 1e-15, "scan", 3j)
    assert zerofinder.ZeroRecord.from_json(r.to_json()) == r
