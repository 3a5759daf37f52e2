"""Problem-file parsing and serialization.

A problem file is INI-structured text with JSON-encoded values for vectors and
matrices; rational entries are strings like "3/4" (or bare integers).  Parsing
re-checks every structural invariant of the decision engine and reports the
offending section and field.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .criterion import ConfigError, GroupConfig
from .linalg import Mat, Subspace, Vec
from .rootdata import CartanSpace, GroupSpec, LieElement
from .weyl import InvalidCentralizerWeyl, centralizer_weyl_validate, identity_centralizer_element

DEFAULT_PROBE_N_VALUES = (0, 2, 4, 6)
DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class ProbeSettings:
    d: int
    grid_radius: float
    grid_points: int
    n_values: tuple[int, ...]
    seed: int


@dataclass(frozen=True)
class ProblemFile:
    spec: GroupSpec
    m_generators: tuple[LieElement, ...]
    d_vectors: tuple[Vec, ...]
    a_vectors: tuple[Vec, ...]
    centralizer_mode: str
    centralizer_elements: tuple[tuple[Mat, ...], ...]
    probe: Optional[ProbeSettings]


def _rational(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise ConfigError(f"{where}: invalid rational {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except ZeroDivisionError:
            raise ConfigError(f"{where}: invalid rational {raw!r}: zero denominator")
        except ValueError:
            raise ConfigError(f"{where}: invalid rational {raw!r}")
    raise ConfigError(f"{where}: invalid rational {raw!r}")


def _json_value(section: str, key: str, text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"[{section}] {key}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}")


def _vector(raw, where: str, length: int) -> Vec:
    if not isinstance(raw, list) or len(raw) != length:
        raise ConfigError(f"{where}: expected a vector of length {length}")
    return tuple(_rational(e, where) for e in raw)


def _matrix(raw, where: str, n: int) -> Mat:
    if not isinstance(raw, list) or len(raw) != n:
        raise ConfigError(f"{where}: expected an {n} x {n} matrix")
    rows = []
    for ri, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise ConfigError(f"{where}: row {ri + 1} is not a list of {n} entries")
        rows.append(tuple(_rational(e, f"{where} row {ri + 1}") for e in row))
    return tuple(rows)


def _factor_tuple(raw, where: str, spec: GroupSpec) -> tuple[Mat, ...]:
    if not isinstance(raw, list) or len(raw) != spec.m:
        raise ConfigError(f"{where}: expected a list of {spec.m} factor matrices")
    return tuple(_matrix(f, f"{where} factor {k + 1}", spec.n)
                 for k, f in enumerate(raw))


def parse_problem(text: str, name: str = "<config>") -> ProblemFile:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}")

    def need(section: str, key: str) -> str:
        if not parser.has_section(section):
            raise ConfigError(f"missing section [{section}]")
        if not parser.has_option(section, key):
            raise ConfigError(f"[{section}]: missing key {key!r}")
        return parser.get(section, key)

    family = need("group", "family").strip()
    try:
        n = int(need("group", "n"))
        m = int(need("group", "m"))
    except ValueError as exc:
        raise ConfigError(f"[group]: {exc}")
    try:
        spec = GroupSpec(n, m, family)
    except ValueError as exc:
        raise ConfigError(f"[group]: {exc}")
    ambient = spec.ambient_dim

    gens_raw = need("subgroup-m", "generators").strip()
    if gens_raw == "trivial":
        gens: tuple[LieElement, ...] = ()
    else:
        data = _json_value("subgroup-m", "generators", gens_raw)
        if not isinstance(data, list):
            raise ConfigError("[subgroup-m] generators: expected a list")
        out = []
        for gi, g in enumerate(data):
            where = f"[subgroup-m] generators #{gi + 1}"
            factors = _factor_tuple(g, where, spec)
            try:
                out.append(LieElement(factors))
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}")
        gens = tuple(out)

    def basis_vectors(section: str) -> tuple[Vec, ...]:
        data = _json_value(section, "basis", need(section, "basis"))
        if not isinstance(data, list):
            raise ConfigError(f"[{section}] basis: expected a list of vectors")
        return tuple(_vector(v, f"[{section}] basis vector #{i + 1}", ambient)
                     for i, v in enumerate(data))

    d_vectors = basis_vectors("torus-d")
    a_vectors = basis_vectors("torus-a")

    mode = need("centralizer-weyl", "mode").strip()
    elements: tuple[tuple[Mat, ...], ...] = ()
    if mode == "auto-trivial-m":
        if gens:
            raise ConfigError(
                "[centralizer-weyl]: mode auto-trivial-m requires trivial M")
    elif mode == "explicit":
        data = _json_value("centralizer-weyl", "elements",
                           need("centralizer-weyl", "elements"))
        if not isinstance(data, list):
            raise ConfigError("[centralizer-weyl] elements: expected a list")
        elements = tuple(
            _factor_tuple(e, f"[centralizer-weyl] elements #{i + 1}", spec)
            for i, e in enumerate(data))
    else:
        raise ConfigError(f"[centralizer-weyl]: unknown mode {mode!r}")

    probe = None
    if parser.has_section("probe"):
        sec = parser["probe"]
        try:
            d = int(sec.get("d", "2"))
            radius = float(Fraction(sec.get("grid-radius", "5")))
            points = int(sec.get("grid-points", "21"))
            seed = int(sec.get("seed", str(DEFAULT_SEED)), 0)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"[probe]: {exc}")
        nv_raw = sec.get("n-values", None)
        if nv_raw is None:
            n_values = DEFAULT_PROBE_N_VALUES
        else:
            data = _json_value("probe", "n-values", nv_raw)
            if (not isinstance(data, list) or not data
                    or any(not isinstance(x, int) or x < 0 for x in data)):
                raise ConfigError("[probe] n-values: expected nonempty list of "
                                  "nonnegative integers")
            n_values = tuple(data)
        if points < 2:
            raise ConfigError("[probe] grid-points: need at least 2")
        if radius <= 0:
            raise ConfigError("[probe] grid-radius: must be positive")
        probe = ProbeSettings(d, radius, points, n_values, seed)

    return ProblemFile(spec, gens, d_vectors, a_vectors, mode, elements, probe)


def build_config(problem: ProblemFile) -> GroupConfig:
    """Instantiate and fully validate the decision-engine configuration."""
    spec = problem.spec
    ambient = spec.ambient_dim
    space = CartanSpace(spec)
    for section, vectors in (("torus-d", problem.d_vectors),
                             ("torus-a", problem.a_vectors)):
        for i, v in enumerate(vectors):
            if not space.contains(v):
                raise ConfigError(
                    f"[{section}] basis vector #{i + 1} is not trace zero per factor")
    try:
        d = Subspace.from_independent(ambient, problem.d_vectors)
    except ValueError as exc:
        raise ConfigError(f"[torus-d] basis: {exc}")
    try:
        a = Subspace.from_independent(ambient, problem.a_vectors)
    except ValueError as exc:
        raise ConfigError(f"[torus-a] basis: {exc}")
    if problem.centralizer_mode == "auto-trivial-m":
        cw = (identity_centralizer_element(spec),)
    else:
        try:
            cw = tuple(centralizer_weyl_validate(spec, problem.m_generators, d,
                                                 problem.centralizer_elements))
        except InvalidCentralizerWeyl as exc:
            raise ConfigError(f"[centralizer-weyl]: {exc}")
    config = GroupConfig(spec, problem.m_generators, d, a, cw)
    config.validate()
    return config


def _frac_str(x: Fraction) -> str:
    return str(x)


def _vec_json(v) -> str:
    return json.dumps([_frac_str(e) for e in v])


def _mat_json_obj(m) -> list:
    return [[_frac_str(e) for e in row] for row in m]


def serialize_problem(problem: ProblemFile) -> str:
    """Deterministic round-trip serialization of a problem file."""
    lines = []
    lines.append("[group]")
    lines.append(f"family = {problem.spec.family}")
    lines.append(f"n = {problem.spec.n}")
    lines.append(f"m = {problem.spec.m}")
    lines.append("")
    lines.append("[subgroup-m]")
    if not problem.m_generators:
        lines.append("generators = trivial")
    else:
        gens = [[_mat_json_obj(f) for f in g.factors] for g in problem.m_generators]
        lines.append(f"generators = {json.dumps(gens)}")
    lines.append("")
    lines.append("[torus-d]")
    lines.append("basis = " + json.dumps([[_frac_str(e) for e in v]
                                          for v in problem.d_vectors]))
    lines.append("")
    lines.append("[torus-a]")
    lines.append("basis = " + json.dumps([[_frac_str(e) for e in v]
                                          for v in problem.a_vectors]))
    lines.append("")
    lines.append("[centralizer-weyl]")
    lines.append(f"mode = {problem.centralizer_mode}")
    if problem.centralizer_mode == "explicit":
        elems = [[_mat_json_obj(f) for f in e] for e in problem.centralizer_elements]
        lines.append(f"elements = {json.dumps(elems)}")
    if problem.probe is not None:
        p = problem.probe
        lines.append("")
        lines.append("[probe]")
        lines.append(f"d = {p.d}")
        radius = p.grid_radius
        lines.append(f"grid-radius = {int(radius) if radius == int(radius) else radius}")
        lines.append(f"grid-points = {p.grid_points}")
        lines.append(f"n-values = {json.dumps(list(p.n_values))}")
        lines.append(f"seed = {p.seed}")
    return "\n".join(lines) + "\n"
