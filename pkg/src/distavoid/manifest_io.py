"""Manifest documents: JSON with every number written as an exact string.

Integers are decimal strings, rationals ``"p/q"`` and square roots
``"sqrt:p/q"``.  Bare JSON numbers are rejected on input so a float can
never slip into a certified field.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .decay import FSpec
from .errors import ConfigError, ManifestError
from .model import CertSummary, ConstructionManifest, Stage
from .norms import EquivalenceConstants, NormSpec
from .scale import Scale, format_rational, parse_rational, unlimited_int_digits
from .spectrum import GapCertificate

VERSION = "1"


def _scale(s: Scale | None):
    return None if s is None else str(s)


def _gap_doc(g: GapCertificate) -> dict:
    return {
        "R": str(g.R),
        "eps": format_rational(g.eps),
        "kind": g.kind,
        "below": _scale(g.below),
        "above": _scale(g.above),
        "witnesses": [[str(k), w] for k, w in g.witnesses],
        "denominator": None if g.denominator is None else str(g.denominator),
    }


def _stage_doc(st: Stage) -> dict:
    return {
        "n": str(st.n),
        "R": str(st.R),
        "eps": format_rational(st.eps),
        "eps_prev": format_rational(st.eps_prev),
        "anchor": [str(a) for a in st.anchor],
        "side": str(st.side),
        "ball_radius": format_rational(st.ball_radius),
        "ball_count": str(st.ball_count),
        "shrunk": st.shrunk,
        "escalations": str(st.escalations),
        "gap": _gap_doc(st.gap),
    }


def to_document(m: ConstructionManifest) -> dict:
    cert = None
    if m.certification is not None:
        cert = {
            "status": m.certification.status,
            "checks": [{"stage": str(s), "check": c, "passed": p, "detail": d}
                       for s, c, p, d in m.certification.checks],
        }
    return {
        "version": VERSION,
        "dim": str(m.dim),
        "norm": m.norm.text,
        "f": m.f.text,
        "eps0": format_rational(m.eps0),
        "constants": {"c_lo": format_rational(m.equivalence.c_lo), "C_hi": format_rational(m.equivalence.C_hi)},
        "s_min": str(m.s_min),
        "stages": [_stage_doc(st) for st in m.stages],
        "certification": cert,
    }


def dumps(m: ConstructionManifest) -> str:
    with unlimited_int_digits():
        return json.dumps(to_document(m), indent=2, ensure_ascii=False) + "\n"


# -- parsing ---------------------------------------------------------------

def _no_numbers(text):
    raise ManifestError(f"bare JSON number {text!r}: numbers must be written as exact strings")


class _Reader:
    """Field access with path-qualified diagnostics."""

    def __init__(self, doc, path="$"):
        self.doc, self.path = doc, path

    def _get(self, key):
        if not isinstance(self.doc, dict):
            raise ManifestError(f"{self.path}: expected an object")
        if key not in self.doc:
            raise ManifestError(f"{self.path}: missing field {key!r}")
        return self.doc[key]

    def sub(self, key) -> "_Reader":
        return _Reader(self._get(key), f"{self.path}.{key}")

    def _conv(self, key, fn, what):
        val = self._get(key)
        if not isinstance(val, str):
            raise ManifestError(f"{self.path}.{key}: expected {what} as a string, got {type(val).__name__}")
        try:
            return fn(val)
        except (ValueError, ConfigError) as exc:
            raise ManifestError(f"{self.path}.{key}: {exc}") from None

    def int(self, key) -> int:
        return self._conv(key, _parse_int, "an integer")

    def rat(self, key) -> Fraction:
        return self._conv(key, parse_rational, "a rational")

    def scale(self, key) -> Scale:
        return self._conv(key, Scale.parse, "a scale")

    def opt_scale(self, key):
        return None if self._get(key) is None else self.scale(key)

    def str(self, key) -> str:
        val = self._get(key)
        if not isinstance(val, str):
            raise ManifestError(f"{self.path}.{key}: expected a string")
        return val

    def bool(self, key) -> bool:
        val = self._get(key)
        if not isinstance(val, bool):
            raise ManifestError(f"{self.path}.{key}: expected true/false")
        return val

    def list(self, key) -> list:
        val = self._get(key)
        if not isinstance(val, list):
            raise ManifestError(f"{self.path}.{key}: expected a list")
        return val


def _parse_int(s: str) -> int:
    t = s.strip()
    if not (t.lstrip("+-").isdigit()):
        raise ValueError(f"not an integer: {s!r}")
    return int(t)


def _int_list(r: _Reader, key) -> tuple[int, ...]:
    out = []
    for i, v in enumerate(r.list(key)):
        if not isinstance(v, str):
            raise ManifestError(f"{r.path}.{key}[{i}]: expected an integer string")
        try:
            out.append(_parse_int(v))
        except ValueError as exc:
            raise ManifestError(f"{r.path}.{key}[{i}]: {exc}") from None
    return tuple(out)


def _gap(r: _Reader) -> GapCertificate:
    ws = []
    for i, item in enumerate(r.list("witnesses")):
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise ManifestError(f"{r.path}.witnesses[{i}]: expected [\"k\", \"witness\"]")
        ws.append((_parse_int(item[0]), item[1]))
    den = None if r._get("denominator") is None else r.int("denominator")
    return GapCertificate(r.scale("R"), r.rat("eps"), r.str("kind"), r.opt_scale("below"),
                          r.opt_scale("above"), tuple(ws), den)


def _stage(r: _Reader) -> Stage:
    return Stage(n=r.int("n"), R=r.scale("R"), eps=r.rat("eps"), eps_prev=r.rat("eps_prev"),
                 anchor=_int_list(r, "anchor"), side=r.int("side"), ball_radius=r.rat("ball_radius"),
                 ball_count=r.int("ball_count"), gap=_gap(r.sub("gap")), shrunk=r.bool("shrunk"),
                 escalations=r.int("escalations"))


def from_document(doc) -> ConstructionManifest:
    r = _Reader(doc)
    version = r.str("version")
    if version != VERSION:
        raise ManifestError(f"$.version: unsupported manifest version {version!r} (expected {VERSION!r})")
    dim = r.int("dim")
    try:
        norm = NormSpec.parse(r.str("norm"), dim)
        f = FSpec.parse(r.str("f"))
    except (ConfigError, ValueError) as exc:
        raise ManifestError(f"$: {exc}") from None
    c = r.sub("constants")
    try:
        consts = EquivalenceConstants(c.rat("c_lo"), c.rat("C_hi"))
    except ValueError as exc:
        raise ManifestError(f"$.constants: {exc}") from None
    stages = tuple(_stage(_Reader(s, f"$.stages[{i}]")) for i, s in enumerate(r.list("stages")))
    cert = None
    if r._get("certification") is not None:
        cr = r.sub("certification")
        checks = []
        for i, item in enumerate(cr.list("checks")):
            ir = _Reader(item, f"{cr.path}.checks[{i}]")
            checks.append((ir.int("stage"), ir.str("check"), ir.bool("passed"), ir.str("detail")))
        cert = CertSummary(cr.str("status"), tuple(checks))
    return ConstructionManifest(dim, norm, f, r.rat("eps0"), consts, r.scale("s_min"), stages, cert)


def loads(text: str) -> ConstructionManifest:
    try:
        doc = json.loads(text, parse_float=_no_numbers, parse_int=_no_numbers,
                         parse_constant=_no_numbers)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    with unlimited_int_digits():
        return from_document(doc)


def read_manifest(path) -> ConstructionManifest:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_text_atomic(path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(m: ConstructionManifest, path) -> None:
    write_text_atomic(path, dumps(m))
