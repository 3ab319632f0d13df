"""JSON coefficient files and report serialization (exact fractions only)."""

import json
import warnings
from math import gcd

from gmpy2 import mpq

from .hypersurface import CONVENTIONS, Hypersurface
from .series_core import GaussRat, TruncSeries, qstr, taylor_factor


class FileFormatError(ValueError):
    pass


def _fraction(text, where):
    text = str(text).strip()
    try:
        q = mpq(text)
    except ValueError as exc:
        raise FileFormatError("bad fraction %r in %s" % (text, where)) from exc
    if "/" in text:
        num, den = (int(x) for x in text.split("/"))
        if den < 0 or gcd(num, den) != 1:
            warnings.warn("non-reduced fraction %r in %s canonicalized to %s" % (text, where, qstr(q)))
    return q


def parse_document(doc):
    """Hypersurface from a decoded coefficient document.

    The stored convention is kept on the result; internally coefficients are monomial.
    """
    try:
        dim = int(doc["ambient_dim"])
        degree = int(doc["degree"])
        conv = doc.get("convention", "monomial")
        rows = doc["coefficients"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError("missing or malformed field: %s" % exc) from exc
    if dim not in (2, 3):
        raise FileFormatError("ambient_dim must be 2 or 3")
    if conv not in CONVENTIONS:
        raise FileFormatError("unknown convention %r" % conv)
    if degree < 0:
        raise FileFormatError("degree must be nonnegative")
    coeffs = {}
    for i, row in enumerate(rows):
        where = "coefficient #%d" % i
        try:
            e = tuple(int(x) for x in row["exp"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError("bad exponent in %s" % where) from exc
        if len(e) != 4 or min(e) < 0:
            raise FileFormatError("exponent in %s must be four nonnegative integers" % where)
        if sum(e) > degree:
            raise FileFormatError("exponent %r in %s exceeds the degree" % (e, where))
        if e in coeffs:
            raise FileFormatError("duplicate exponent %r" % (e,))
        c = GaussRat(_fraction(row.get("re", "0"), where), _fraction(row.get("im", "0"), where))
        if c:
            coeffs[e] = c
    try:
        return Hypersurface.from_coefficients(coeffs, degree, conv, dim)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc


def load(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError("%s: %s" % (path, exc)) from exc
    return parse_document(doc)


def gauss_json(c):
    c = GaussRat(c) if not isinstance(c, GaussRat) else c
    return {"re": qstr(c.re), "im": qstr(c.im)}


def coefficient_rows(F, convention="monomial"):
    rows = []
    for e in sorted(F.coeffs, key=lambda x: (sum(x), x)):
        c = F.coeffs[e]
        if convention == "taylor":
            c = c * taylor_factor(e)
        row = {"exp": list(e)}
        row.update(gauss_json(c))
        rows.append(row)
    return rows


def document(H, convention=None):
    conv = convention or H.convention
    return {
        "ambient_dim": H.ambient_dim,
        "degree": H.degree,
        "convention": conv,
        "coefficients": coefficient_rows(H.F, conv),
    }


def dumps(doc):
    return json.dumps(to_jsonable(doc), indent=2)


def to_jsonable(x, decimals=False):
    """Exact fractions as strings; Gaussian rationals as {re, im}."""
    if isinstance(x, GaussRat):
        out = gauss_json(x)
        if decimals:
            out["approx"] = "%.12g%+.12gi" % (float(x.re), float(x.im))
        return out
    if isinstance(x, type(mpq(0))):
        return qstr(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else str(k)): to_jsonable(v, decimals) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v, decimals) for v in x]
    if isinstance(x, TruncSeries):
        return coefficient_rows(x)
    return str(x)
