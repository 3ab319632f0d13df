"""Exact Gaussian-rational scalars and truncated power series in four variables.

A series lives in the commuting variables (z, zeta, zbar, zetabar).  Exponents
are 4-tuples (a, b, c, d) for z^a zeta^b zbar^c zetabar^d.  Every series
carries ``valid_order``: all coefficients of total degree <= valid_order are
exact, nothing above it is stored.  Exact polynomials use ``EXACT``.
"""

from fractions import Fraction
from itertools import product

from gmpy2 import mpq

EXACT = 1 << 30

VARS = ("z", "zeta", "zbar", "zetabar")
_VAR_INDEX = {name: i for i, name in enumerate(VARS)}
_VAR_ALIASES = {"w": 1, "zb": 2, "wb": 3, "ζ": 1, "z̄": 2, "ζ̄": 3}


class SeriesError(ValueError):
    """Raised when a series operation's precondition fails."""


def to_q(x):
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            p, q = x.split("/")
            return mpq(int(p), int(q))
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class GaussRat:
    """Exact complex number p/q + i r/s with gmpy2 rationals as parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussRat):
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, complex):
            raise TypeError("floating complex values are not exact")
        self.re = to_q(re)
        self.im = to_q(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def parse(cls, text):
        """Parse '3/4', '-1/2+3i', 'i', '2-i/3' style strings."""
        s = text.replace(" ", "")
        if not s.endswith("i"):
            return cls(to_q(s))
        body = s[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut <= 0:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        if im_part.startswith("+"):
            im_part = im_part[1:]
        im_part = im_part.replace("*", "")
        return cls(to_q(re_part), to_q(im_part))

    def conj(self):
        return GaussRat._raw(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def is_zero(self):
        return not self.re and not self.im

    def is_real(self):
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, o):
        if not isinstance(o, GaussRat):
            o = _coerce(o)
            if o is NotImplemented:
                return o
        return GaussRat._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, GaussRat):
            o = _coerce(o)
            if o is NotImplemented:
                return o
        return GaussRat._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return GaussRat._raw(-self.re, -self.im)

    def __mul__(self, o):
        if not isinstance(o, GaussRat):
            o = _coerce(o)
            if o is NotImplemented:
                return o
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussRat._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self):
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("GaussRat division by zero")
        return GaussRat._raw(self.re / n, -self.im / n)

    def __truediv__(self, o):
        if not isinstance(o, GaussRat):
            o = _coerce(o)
            if o is NotImplemented:
                return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = GaussRat._raw(mpq(1), mpq(0))
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, o):
        if not isinstance(o, GaussRat):
            o = _coerce(o)
            if o is NotImplemented:
                return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return "GaussRat(%s)" % self

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return "%si" % self.im
        sign = "+" if self.im > 0 else "-"
        return "%s%s%si" % (self.re, sign, abs(self.im))

    def parts(self):
        """(re, im) as canonical 'p/q' strings."""
        return qstr(self.re), qstr(self.im)


def qstr(q):
    q = mpq(q)
    return "%d/%d" % (q.numerator, q.denominator)


def _coerce(x):
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, (int, Fraction)) or type(x).__name__ == "mpq" or type(x).__name__ == "mpz":
        return GaussRat._raw(to_q(x), mpq(0))
    return NotImplemented


def gr(x, im=0):
    """Coerce to GaussRat."""
    if isinstance(x, GaussRat) and not im:
        return x
    if isinstance(x, str) and not im:
        return GaussRat.parse(x)
    return GaussRat(x, im)


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


def sqrt_q(q):
    """Exact rational square root of a nonnegative rational, or None."""
    q = mpq(q)
    if q < 0:
        return None
    import gmpy2
    p, r = q.numerator, q.denominator
    if not gmpy2.is_square(p) or not gmpy2.is_square(r):
        return None
    return mpq(gmpy2.isqrt(p), gmpy2.isqrt(r))


def sqrt_gauss(x):
    """A Gaussian-rational square root of x, or None when none exists."""
    x = gr(x)
    if x.is_zero():
        return ZERO
    n = sqrt_q(x.abs2())
    if n is None:
        return None
    a2 = (n + x.re) / 2
    b2 = (n - x.re) / 2
    a, b = sqrt_q(a2), sqrt_q(b2)
    if a is None or b is None:
        return None
    if x.im < 0:
        b = -b
    root = GaussRat._raw(a, b)
    return root if root * root == x else None


# --- exponents -------------------------------------------------------------

def deg(e):
    return e[0] + e[1] + e[2] + e[3]


def conj_exp(e):
    return (e[2], e[3], e[0], e[1])


def var_index(var):
    if isinstance(var, int):
        return var
    if var in _VAR_INDEX:
        return _VAR_INDEX[var]
    return _VAR_ALIASES[var]


def exponents_upto(n, nvars=4):
    """All exponents of total degree <= n, ordered by degree then lexicographically."""
    out = []
    for total in range(n + 1):
        for e in product(range(total + 1), repeat=nvars):
            if sum(e) == total:
                out.append(tuple(e) + (0,) * (4 - nvars))
    return out


def _dec(vo, k=1):
    return vo if vo >= EXACT else vo - k


class TruncSeries:
    """Sparse truncated series with a valid-order certificate.

    Treat instances as immutable; every operation returns a new series.
    """

    __slots__ = ("coeffs", "valid_order")

    def __init__(self, coeffs=None, valid_order=EXACT, _trusted=False):
        if valid_order < 0:
            raise SeriesError("valid_order must be nonnegative")
        self.valid_order = valid_order
        if _trusted:
            self.coeffs = coeffs
            return
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                e = tuple(e)
                if len(e) != 4 or min(e) < 0:
                    raise SeriesError("bad exponent %r" % (e,))
                if deg(e) > valid_order:
                    continue
                c = gr(c)
                if c:
                    clean[e] = c
        self.coeffs = clean

    # constructors
    @classmethod
    def zero(cls, valid_order=EXACT):
        return cls({}, valid_order, _trusted=True)

    @classmethod
    def const(cls, c, valid_order=EXACT):
        return cls({(0, 0, 0, 0): c}, valid_order)

    @classmethod
    def var(cls, name, valid_order=EXACT):
        e = [0, 0, 0, 0]
        e[var_index(name)] = 1
        return cls({tuple(e): ONE}, valid_order)

    @classmethod
    def monomial(cls, e, c=ONE, valid_order=EXACT):
        return cls({tuple(e): c}, valid_order)

    # access
    def __getitem__(self, e):
        return self.coeffs.get(tuple(e), ZERO)

    def coeff(self, a, b=0, c=0, d=0):
        return self.coeffs.get((a, b, c, d), ZERO)

    def items(self):
        return self.coeffs.items()

    def __len__(self):
        return len(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return max((deg(e) for e in self.coeffs), default=-1)

    def low_degree(self):
        return min((deg(e) for e in self.coeffs), default=None)

    def constant(self):
        return self.coeffs.get((0, 0, 0, 0), ZERO)

    def with_order(self, n):
        """Truncate to total degree n (never raises the certificate)."""
        n = min(n, self.valid_order)
        if n >= EXACT:
            return self
        return TruncSeries({e: c for e, c in self.coeffs.items() if deg(e) <= n}, n, _trusted=True)

    truncate = with_order

    def filter(self, pred):
        return TruncSeries({e: c for e, c in self.coeffs.items() if pred(e)}, self.valid_order, _trusted=True)

    def agrees(self, other, order=None):
        """Coefficientwise equality up to the common (or given) order."""
        n = min(self.valid_order, other.valid_order)
        if order is not None:
            n = min(n, order)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self[e] == other[e] for e in keys if deg(e) <= n)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.valid_order == other.valid_order and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        vo = "exact" if self.valid_order >= EXACT else str(self.valid_order)
        return "TruncSeries(%s; valid_order=%s)" % (format_series(self), vo)

    # ring operations
    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.const(gr(other))
        n = min(self.valid_order, other.valid_order)
        out = {e: c for e, c in self.coeffs.items() if deg(e) <= n}
        for e, c in other.coeffs.items():
            if deg(e) > n:
                continue
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return TruncSeries(out, n, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries({e: -c for e, c in self.coeffs.items()}, self.valid_order, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.const(gr(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = gr(c)
        if not c:
            return TruncSeries.zero(self.valid_order)
        return TruncSeries({e: x * c for e, x in self.coeffs.items()}, self.valid_order, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return divide_by_unit(self, other)
        return self.scale(gr(other).inverse())

    def __pow__(self, n):
        result = TruncSeries.const(ONE, self.valid_order)
        for _ in range(n):
            result = result * self
        return result

    def derive(self, var, times=1):
        return derive(self, var, times)

    def conj(self):
        return conj_series(self)

    def __call__(self, *subs):
        return substitute(self, *subs)


def mul(S, T, order=None):
    """Cauchy product truncated at min valid order (and optional cap)."""
    n = min(S.valid_order, T.valid_order)
    if order is not None:
        n = min(n, order)
    if not S.coeffs or not T.coeffs:
        return TruncSeries.zero(n)
    A, B = S.coeffs, T.coeffs
    if len(A) > len(B):
        A, B = B, A
    Bl = sorted(((deg(e), e, c.re, c.im) for e, c in B.items()), key=lambda t: t[0])
    acc = {}
    for (a, b, c, d), x in A.items():
        da = a + b + c + d
        room = n - da
        if room < 0:
            continue
        xr, xi = x.re, x.im
        for db, (a2, b2, c2, d2), yr, yi in Bl:
            if db > room:
                break
            key = (a + a2, b + b2, c + c2, d + d2)
            r = xr * yr - xi * yi
            i = xr * yi + xi * yr
            slot = acc.get(key)
            if slot is None:
                acc[key] = [r, i]
            else:
                slot[0] += r
                slot[1] += i
    out = {}
    for e, (r, i) in acc.items():
        if r or i:
            out[e] = GaussRat._raw(r, i)
    return TruncSeries(out, n, _trusted=True)


def linear_combination(terms, valid_order):
    """Sum of c_i * S_i, truncated at valid_order."""
    acc = {}
    n = valid_order
    for c, S in terms:
        n = min(n, S.valid_order)
    for c, S in terms:
        cr, ci = c.re, c.im
        for e, x in S.coeffs.items():
            if deg(e) > n:
                continue
            r = cr * x.re - ci * x.im
            i = cr * x.im + ci * x.re
            slot = acc.get(e)
            if slot is None:
                acc[e] = [r, i]
            else:
                slot[0] += r
                slot[1] += i
    out = {e: GaussRat._raw(r, i) for e, (r, i) in acc.items() if r or i}
    return TruncSeries(out, n, _trusted=True)


def inverse_unit(U, order=None):
    """1/U for a series with nonzero constant term."""
    n = U.valid_order if order is None else min(order, U.valid_order)
    if n >= EXACT:
        raise SeriesError("inverse of an exact polynomial needs an explicit order")
    u0 = U.constant()
    if not u0:
        raise SeriesError("unit precondition failed: constant term is zero")
    inv0 = u0.inverse()
    V = (U - TruncSeries.const(u0)).scale(-inv0).with_order(n)
    # 1/U = inv0 * sum_k V^k, V has order >= 1
    term = TruncSeries.const(ONE, n)
    total = TruncSeries.const(ONE, n)
    for _ in range(n):
        term = mul(term, V, n)
        if term.is_zero():
            break
        total = total + term
    return total.scale(inv0)


def divide_by_unit(S, U, order=None):
    """Q with Q*U = S up to min valid order."""
    n = min(S.valid_order, U.valid_order)
    if order is not None:
        n = min(n, order)
    if not U.constant():
        raise SeriesError("unit precondition failed: constant term is zero")
    if n >= EXACT:
        raise SeriesError("division of exact polynomials needs an explicit order")
    return mul(S, inverse_unit(U, n), n)


def derive(S, var, times=1):
    """Formal partial derivative; valid order drops by one per derivative."""
    i = var_index(var)
    if times == 0:
        return S
    if S.valid_order < times:
        raise SeriesError("valid_order too small to differentiate")
    out = {}
    for e, c in S.coeffs.items():
        p = e[i]
        if p < times:
            continue
        f = 1
        for j in range(times):
            f *= p - j
        ne = list(e)
        ne[i] = p - times
        out[tuple(ne)] = GaussRat._raw(c.re * f, c.im * f)
    return TruncSeries(out, _dec(S.valid_order, times), _trusted=True).with_order(_dec(S.valid_order, times))


def conj_series(S):
    """Conjugate coefficients and swap (z, zeta) with (zbar, zetabar)."""
    return TruncSeries({conj_exp(e): c.conj() for e, c in S.coeffs.items()}, S.valid_order, _trusted=True)


def _powers(sig, top, n):
    pw = [TruncSeries.const(ONE, n)]
    for _ in range(top):
        pw.append(mul(pw[-1], sig, n))
    return pw


def substitute(S, sz, szeta, szbar, szetabar, order=None):
    """Composition S(sz, szeta, szbar, szetabar); each substitute must vanish at 0."""
    sigmas = (sz, szeta, szbar, szetabar)
    used = [any(e[i] for e in S.coeffs) for i in range(4)]
    n = S.valid_order
    for i, sig in enumerate(sigmas):
        if sig is None:
            if used[i]:
                raise SeriesError("missing substitution for %s" % VARS[i])
            continue
        if sig.constant():
            raise SeriesError("substituted series must have zero constant term")
        if used[i]:
            n = min(n, sig.valid_order)
    if order is not None:
        n = min(n, order)
    if n >= EXACT:
        top = S.degree() * max((s.degree() for s in sigmas if s is not None), default=1)
        n = max(top, 0)
        exact = True
    else:
        exact = False
    tops = [max((e[i] for e in S.coeffs), default=0) for i in range(4)]
    pw = [_powers(sigmas[i], tops[i], n) if tops[i] else [TruncSeries.const(ONE, n)] for i in range(4)]
    # group monomials by their (a, b) part
    groups = {}
    for e, c in S.coeffs.items():
        if deg(e) > n:
            continue
        groups.setdefault((e[0], e[1]), []).append((e[2], e[3], c))
    anti_cache = {}

    def anti(c_, d_):
        key = (c_, d_)
        if key not in anti_cache:
            anti_cache[key] = mul(pw[2][c_], pw[3][d_], n)
        return anti_cache[key]

    pieces = []
    for (a, b), rest in groups.items():
        hol = mul(pw[0][a], pw[1][b], n)
        inner = linear_combination([(c, anti(c_, d_)) for c_, d_, c in rest], n)
        pieces.append((ONE, mul(hol, inner, n)))
    result = linear_combination(pieces, n) if pieces else TruncSeries.zero(n)
    if exact:
        return TruncSeries(result.coeffs, EXACT, _trusted=True)
    return result


def invert_pair(f, g, delta):
    """Inverse of the holomorphic map (f, g) up to total degree delta.

    Solves A*phi = Z - N(phi) one degree at a time, where A is the Jacobian
    at the origin and N the nonlinear part.
    """
    for s in (f, g):
        if s.constant():
            raise SeriesError("map must fix the origin")
        if any(e[2] or e[3] for e in s.coeffs):
            raise SeriesError("map components must be holomorphic")
    a11, a12 = f.coeff(1, 0), f.coeff(0, 1)
    a21, a22 = g.coeff(1, 0), g.coeff(0, 1)
    det = a11 * a22 - a12 * a21
    if not det:
        raise SeriesError("singular Jacobian at the origin")
    n = min(delta, f.valid_order, g.valid_order)
    b11, b12, b21, b22 = a22 / det, -a12 / det, -a21 / det, a11 / det
    z = TruncSeries.var("z", n)
    w = TruncSeries.var("zeta", n)
    Nf = f.filter(lambda e: deg(e) >= 2).with_order(n)
    Ng = g.filter(lambda e: deg(e) >= 2).with_order(n)
    phi = linear_combination([(b11, z), (b12, w)], n)
    psi = linear_combination([(b21, z), (b22, w)], n)
    for step in range(2, n + 1):
        # phi is exact through degree step-1 and N has no linear part, so
        # N(phi) is exact through degree step
        nf = substitute(Nf, phi, psi, None, None, order=step)
        ng = substitute(Ng, phi, psi, None, None, order=step)
        rf = z.with_order(step) - nf
        rg = w.with_order(step) - ng
        phi = TruncSeries(linear_combination([(b11, rf), (b12, rg)], step).coeffs, n, _trusted=True)
        psi = TruncSeries(linear_combination([(b21, rf), (b22, rg)], step).coeffs, n, _trusted=True)
    return phi, psi


def weighted_component(S, nu):
    """Part of S of weight a + c = nu."""
    return S.filter(lambda e: e[0] + e[2] == nu)


def homogeneous_component(S, k):
    return S.filter(lambda e: deg(e) == k)


def eval_at(S, p):
    """Exact value of the stored polynomial at p = (z, zeta, zbar, zetabar)."""
    p = [gr(x) for x in p]
    pw = [{0: ONE} for _ in range(4)]

    def power(i, k):
        cache = pw[i]
        if k not in cache:
            cache[k] = power(i, k - 1) * p[i]
        return cache[k]

    total = ZERO
    for e, c in S.coeffs.items():
        term = c
        for i in range(4):
            if e[i]:
                term = term * power(i, e[i])
        total = total + term
    return total


def point4(z0, zeta0):
    """Point (z, zeta, zbar, zetabar) from holomorphic coordinates."""
    z0, zeta0 = gr(z0), gr(zeta0)
    return (z0, zeta0, z0.conj(), zeta0.conj())


def translate(S, p, order=None):
    """S(Z + p) for an exact polynomial S and point p (four coordinates)."""
    if S.valid_order < EXACT:
        raise SeriesError("translating a truncated series loses exactness")
    p = [gr(x) for x in p]
    from math import comb
    acc = {}
    for e, c in S.coeffs.items():
        ranges = [range(k + 1) for k in e]
        for sub in product(*ranges):
            coef = c
            for i in range(4):
                k, j = e[i], sub[i]
                if k != j:
                    coef = coef * (p[i] ** (k - j)) * comb(k, j)
            if not coef:
                continue
            key = tuple(sub)
            acc[key] = acc.get(key, ZERO) + coef
    out = TruncSeries(acc, EXACT)
    return out if order is None else out.with_order(order)


def taylor_factor(e):
    from math import factorial
    return factorial(e[0]) * factorial(e[1]) * factorial(e[2]) * factorial(e[3])


def to_taylor(S):
    return TruncSeries({e: c * taylor_factor(e) for e, c in S.coeffs.items()}, S.valid_order, _trusted=True)


def from_taylor(S):
    return TruncSeries({e: c / taylor_factor(e) for e, c in S.coeffs.items()}, S.valid_order, _trusted=True)


def format_series(S, limit=12):
    if not S.coeffs:
        return "0"
    names = ("z", "ζ", "z̄", "ζ̄")
    parts = []
    for e in sorted(S.coeffs, key=lambda e: (deg(e), e))[:limit]:
        mono = "".join(names[i] + ("^%d" % e[i] if e[i] > 1 else "") for i in range(4) if e[i])
        parts.append("(%s)%s" % (S.coeffs[e], mono))
    if len(S.coeffs) > limit:
        parts.append("...")
    return " + ".join(parts)
