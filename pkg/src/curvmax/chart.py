"""Holonomic coordinate charts and their metric data.

A chart is an embedding of n curvilinear coordinates (n in {2, 3}) into
Euclidean space.  The metric is always derived from that embedding as
g = J^T J, so the cylindrical/spherical reference results are
self-verifying.  The nonholonomic (physical) reference basis is
orthonormal: g_{i'i'} = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import symexpr as sx
from .symexpr import Expr, diff, equivalent, parse_expr, simplify

__all__ = [
    "Chart", "MetricData", "Jacobian", "ComponentVector", "ChartError",
    "builtin_chart", "BUILTIN_CHARTS", "parse_chart_file", "jacobian",
    "metric_from_chart", "lame_coefficients", "convert_basis",
    "raise_index", "lower_index",
]


class ChartError(Exception):
    pass


@dataclass(frozen=True)
class Chart:
    """Named coordinate system with a Cartesian embedding."""

    name: str
    coords: tuple[str, ...]
    embedding: tuple[Expr, ...]
    domain: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.coords)
        if n not in (2, 3):
            raise ChartError(f"chart dimension must be 2 or 3, got {n}")
        if len(self.embedding) != n:
            raise ChartError("embedding arity must match coordinate count")
        allowed = set(self.coords)
        for e in self.embedding:
            extra = sx.free_vars(e) - allowed
            if extra:
                raise ChartError(f"embedding uses non-coordinate variables {sorted(extra)}")

    @property
    def dim(self):
        return len(self.coords)

    def domains(self):
        """Sampling domains for `equivalent`, defaulted where undeclared."""
        return {c: self.domain.get(c, sx.DEFAULT_DOMAIN) for c in self.coords}


@dataclass(frozen=True)
class Jacobian:
    """d(Cartesian)/d(coords), entry (a, i) = d x_a / d u^i."""

    matrix: tuple[tuple[Expr, ...], ...]

    @property
    def dim(self):
        return len(self.matrix)


@dataclass(frozen=True)
class MetricData:
    """Symbolic metric of a chart: g_ij, g^ij, det g, sqrt|g|, Lame h_i."""

    chart: Chart
    g_lo: tuple[tuple[Expr, ...], ...]
    g_hi: tuple[tuple[Expr, ...], ...]
    det_g: Expr
    sqrt_abs_g: Expr
    lame: tuple[Expr, ...] | None

    @property
    def dim(self):
        return len(self.g_lo)

    @property
    def is_orthogonal(self):
        return self.lame is not None

    def domains(self):
        return self.chart.domains()


@dataclass(frozen=True)
class ComponentVector:
    """Vector/covector components with variance and basis tags."""

    components: tuple
    variance: str  # "contravariant" | "covariant"
    basis: str = "holonomic"  # "holonomic" | "nonholonomic"

    def __post_init__(self):
        if self.variance not in ("contravariant", "covariant"):
            raise ValueError(f"bad variance {self.variance!r}")
        if self.basis not in ("holonomic", "nonholonomic"):
            raise ValueError(f"bad basis {self.basis!r}")

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


# ---------------------------------------------------------------------------
# Built-in charts
# ---------------------------------------------------------------------------

def _chart_cartesian():
    x, y, z = sx.var("x"), sx.var("y"), sx.var("z")
    return Chart("cartesian", ("x", "y", "z"), (x, y, z),
                 {"x": (-1.0, 1.0), "y": (-1.0, 1.0), "z": (-1.0, 1.0)})


def _chart_cylindrical():
    r, phi, z = sx.var("r"), sx.var("phi"), sx.var("z")
    return Chart("cylindrical", ("r", "phi", "z"),
                 (r * sx.cos(phi), r * sx.sin(phi), z),
                 {"r": (0.1, 2.0), "phi": (0.1, 2.0), "z": (-1.0, 1.0)})


def _chart_spherical():
    r, th, phi = sx.var("r"), sx.var("theta"), sx.var("phi")
    return Chart("spherical", ("r", "theta", "phi"),
                 (r * sx.sin(th) * sx.cos(phi), r * sx.sin(th) * sx.sin(phi),
                  r * sx.cos(th)),
                 {"r": (0.1, 2.0), "theta": (0.1, 2.0), "phi": (0.1, 2.0)})


BUILTIN_CHARTS = ("cartesian", "cylindrical", "spherical")


def builtin_chart(name):
    try:
        return {"cartesian": _chart_cartesian,
                "cylindrical": _chart_cylindrical,
                "spherical": _chart_spherical}[name]()
    except KeyError:
        raise ChartError(f"unknown built-in chart {name!r}") from None


def parse_chart_file(text):
    """Parse the key-value chart definition format; returns list of Charts.

    Format, one ``[chart]`` section per chart::

        [chart]
        name = cylindrical
        coords = r, phi, z
        embedding = r*cos(phi), r*sin(phi), z
        domain = r:(0.1,2.0), phi:(0.0,6.28), z:(-1.0,1.0)
    """
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line == "[chart]":
            current = {}
            sections.append(current)
            continue
        if line.startswith("["):
            raise ChartError(f"line {lineno}: unknown section {line}")
        if current is None:
            raise ChartError(f"line {lineno}: key outside a [chart] section")
        if "=" not in line:
            raise ChartError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()

    charts = []
    for sec in sections:
        for req in ("name", "coords", "embedding"):
            if req not in sec:
                raise ChartError(f"chart section missing {req!r}")
        coords = tuple(c.strip() for c in sec["coords"].split(","))
        embedding = tuple(parse_expr(e) for e in _split_top(sec["embedding"]))
        domain = {}
        if "domain" in sec:
            for part in _split_top(sec["domain"]):
                cname, _, rng = part.partition(":")
                rng = rng.strip()
                if not (rng.startswith("(") and rng.endswith(")")):
                    raise ChartError(f"bad domain spec {part!r}")
                lo, hi = rng[1:-1].split(",")
                domain[cname.strip()] = (float(lo), float(hi))
        charts.append(Chart(sec["name"], coords, embedding, domain))
    return charts


def _split_top(text):
    """Split on commas not nested in parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


# ---------------------------------------------------------------------------
# Metric machinery
# ---------------------------------------------------------------------------

def jacobian(chart):
    n = chart.dim
    rows = tuple(
        tuple(diff(chart.embedding[a], chart.coords[i]) for i in range(n))
        for a in range(n))
    return Jacobian(rows)


def _mat_det(m):
    n = len(m)
    if n == 2:
        return simplify(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    return simplify(
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _mat_inverse(m, det):
    """Adjugate / det; exact symbolic inversion for n <= 3."""
    n = len(m)
    inv_det = sx.pow_(det, -1)
    if n == 2:
        adj = ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))
    else:
        def cof(i, j):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = (m[rows[0]][cols[0]] * m[rows[1]][cols[1]]
                     - m[rows[0]][cols[1]] * m[rows[1]][cols[0]])
            return minor if (i + j) % 2 == 0 else -minor
        # adjugate = transpose of cofactor matrix
        adj = tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))
    return tuple(tuple(simplify(adj[i][j] * inv_det) for j in range(n))
                 for i in range(n))


def metric_from_chart(chart):
    """MetricData with g_lo = J^T J, exact inverse, sqrt|g| and Lame
    coefficients when the metric is diagonal."""
    n = chart.dim
    jac = jacobian(chart).matrix
    g_lo = tuple(
        tuple(simplify(sx.add(*(jac[a][i] * jac[a][j] for a in range(n))))
              for j in range(n))
        for i in range(n))
    det = _mat_det(g_lo)
    if det == sx.ZERO:
        raise ChartError(f"chart {chart.name!r} has a singular metric")
    g_hi = _mat_inverse(g_lo, det)
    sqrt_abs_g = simplify(sx.sqrt(det))
    diagonal = all(g_lo[i][j] == sx.ZERO for i in range(n) for j in range(n) if i != j)
    lame = None
    if diagonal:
        lame = tuple(simplify(sx.sqrt(g_lo[i][i])) for i in range(n))
    return MetricData(chart, g_lo, g_hi, det, sqrt_abs_g, lame)


def lame_coefficients(m):
    """Physical scale factors h_i = sqrt(g_ii) for orthogonal charts."""
    if m.lame is None:
        raise ChartError("Lame coefficients defined only for orthogonal systems")
    return m.lame


def convert_basis(v, m, target):
    """Holonomic <-> nonholonomic (physical) component conversion.

    Contravariant: f^{i'} = h_i f^i; covariant: f_{i'} = f_i / h_i.
    """
    if target not in ("holonomic", "nonholonomic"):
        raise ValueError(f"bad basis {target!r}")
    if v.basis == target:
        return v
    h = lame_coefficients(m)
    if v.variance == "contravariant":
        scale = h if target == "nonholonomic" else tuple(sx.pow_(x, -1) for x in h)
    else:
        scale = tuple(sx.pow_(x, -1) for x in h) if target == "nonholonomic" else h
    comps = tuple(simplify(scale[i] * v.components[i]) for i in range(len(v)))
    return ComponentVector(comps, v.variance, target)


def raise_index(v, m):
    """f^i = g^ij f_j (holonomic components)."""
    if v.basis != "holonomic":
        raise ChartError("index raising acts on holonomic components")
    if v.variance != "covariant":
        raise ChartError("raise_index expects covariant components")
    n = m.dim
    comps = tuple(
        simplify(sx.add(*(m.g_hi[i][j] * v.components[j] for j in range(n))))
        for i in range(n))
    return ComponentVector(comps, "contravariant", "holonomic")


def lower_index(v, m):
    """f_i = g_ij f^j (holonomic components)."""
    if v.basis != "holonomic":
        raise ChartError("index lowering acts on holonomic components")
    if v.variance != "contravariant":
        raise ChartError("lower_index expects contravariant components")
    n = m.dim
    comps = tuple(
        simplify(sx.add(*(m.g_lo[i][j] * v.components[j] for j in range(n))))
        for i in range(n))
    return ComponentVector(comps, "covariant", "holonomic")
