"""Charts, metrics, and component-basis conversions."""

import pytest

from curvmax import symexpr as sx
from curvmax.chart import (Chart, ChartError, ComponentVector, builtin_chart,
                           convert_basis, jacobian, lame_coefficients,
                           lower_index, metric_from_chart, parse_chart_file,
                           raise_index)
from curvmax.symexpr import FieldAtom, equivalent, parse_expr, simplify


def _lit(text):
    return simplify(parse_expr(text))


def test_cylindrical_metric_literals():
    m = metric_from_chart(builtin_chart("cylindrical"))
    expected = ("1", "r^2", "1")
    for i in range(3):
        assert m.g_lo[i][i] == _lit(expected[i])
        for j in range(3):
            if i != j:
                assert m.g_lo[i][j] == sx.ZERO
    assert m.sqrt_abs_g == _lit("r")
    assert tuple(lame_coefficients(m)) == (_lit("1"), _lit("r"), _lit("1"))


def test_spherical_metric_literals():
    m = metric_from_chart(builtin_chart("spherical"))
    expected = ("1", "r^2", "r^2*sin(theta)^2")
    for i in range(3):
        assert m.g_lo[i][i] == _lit(expected[i])
    assert m.sqrt_abs_g == _lit("r^2*sin(theta)")
    assert tuple(lame_coefficients(m)) == (_lit("1"), _lit("r"), _lit("r*sin(theta)"))


def test_inverse_metric_contracts_to_identity():
    for name in ("cylindrical", "spherical"):
        m = metric_from_chart(builtin_chart(name))
        dom = m.domains()
        for i in range(3):
            for j in range(3):
                entry = sx.add(*(m.g_lo[i][k] * m.g_hi[k][j] for k in range(3)))
                target = sx.ONE if i == j else sx.ZERO
                assert equivalent(entry, target, dom, seed=3)


def test_jacobian_shape_and_cartesian_identity():
    j = jacobian(builtin_chart("cartesian"))
    for a in range(3):
        for i in range(3):
            assert j.matrix[a][i] == (sx.ONE if a == i else sx.ZERO)


def test_raise_lower_roundtrip():
    m = metric_from_chart(builtin_chart("spherical"))
    v = ComponentVector(tuple(FieldAtom(f"v_{i}", m.chart.coords) for i in range(3)),
                        "covariant", "holonomic")
    back = lower_index(raise_index(v, m), m)
    dom = m.domains()
    assert all(equivalent(a, b, dom, seed=4) for a, b in zip(back, v))


def test_basis_conversion_scales_by_lame():
    m = metric_from_chart(builtin_chart("cylindrical"))
    v = ComponentVector((sx.ONE, sx.ONE, sx.ONE), "contravariant", "holonomic")
    nh = convert_basis(v, m, "nonholonomic")
    # physical azimuthal component picks up the r factor
    assert nh[1] == _lit("r")
    assert convert_basis(nh, m, "holonomic")[1] == sx.ONE


def test_chart_file_parsing():
    text = """
    # comment
    [chart]
    name = parabolic
    coords = u, v, z
    embedding = (u^2 - v^2)/2, u*v, z
    domain = u:(0.1,2.0), v:(0.1,2.0), z:(-1.0,1.0)
    """
    (ch,) = parse_chart_file(text)
    assert ch.name == "parabolic"
    assert ch.coords == ("u", "v", "z")
    m = metric_from_chart(ch)
    # parabolic cylinder chart: h_u = h_v = sqrt(u^2 + v^2)
    assert equivalent(m.g_lo[0][0], parse_expr("u^2 + v^2"), ch.domains(), seed=2)


def test_chart_file_errors():
    with pytest.raises(ChartError):
        parse_chart_file("name = missing_section")
    with pytest.raises(ChartError):
        parse_chart_file("[chart]\nname = x\ncoords = a, b, c\n")
    with pytest.raises(ChartError):
        parse_chart_file("[chart]\nname = x\ncoords = a, b, c\n"
                         "embedding = a, b, q\n")


def test_unknown_builtin_chart():
    with pytest.raises(ChartError):
        builtin_chart("toroidal")


def test_chart_dimension_validation():
    with pytest.raises(ChartError):
        Chart("bad", ("a",), (sx.var("a"),))
