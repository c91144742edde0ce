"""Bounds, product-space solving, certificates, cusp expansions and ranks.

Products of level-L Eisenstein series are modular for Gamma(L), so a
certificate is checked against the target through the Gamma(L) Sturm
threshold ceil((k+l)/12 [SL2(Z):Gamma(L)]) + 1 (units of q^(1/L)).

Column reduction.  If the target is invariant under T^w it equals its own
projection onto exponents in (1/w)Z, and the projection of a product is the
average of its T^(w j) translates, again a sum of products.  So the solve
runs on projected columns and the answer is unfolded into honest products.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .eisenstein import EisensteinFamily, EisensteinSymbol, eisenstein_family, slash_index
from .errors import NeedMoreCoefficients, NotCovered, RankUnstable, RefusedUnverified
from .exactmath import CyclotomicNumber, lcm, prime_factors
from .modgroup import (
    Gamma0, Gamma1, GammaN, GroupElement, I, IndexVector, T, enumerate_indices, index_act, lift_sl2, sl2_mod,
)
from .qseries import QExpansion, kronecker_product_rows
from .span import SeriesSpan
from .linalg import exact_column_profile

__all__ = [
    "sturm_bound", "BoundRequest", "theorem_bounds", "NOT_EXPLICIT", "gamma_sturm_units",
    "ExpressionCertificate", "NoSolution", "ResidualReport", "express", "express_escalating",
    "verify_certificate", "cusp_expansion", "span_rank", "constant_term_rank", "constant_term_span_check",
    "raise_level",
]

FORMAT_VERSION = 1


# ----------------------------------------------------------------------------
# bounds

def sturm_bound(k, N: int) -> int:
    """B(k, N) = ceil(k/12 * N * prod_{p | N} (1 + 1/p)) for rational k > 0."""
    k = Fraction(k)
    if k <= 0 or N < 1:
        raise ValueError("need k > 0 and N >= 1")
    val = k / 12 * N
    for p in prime_factors(N):
        val *= Fraction(p + 1, p)
    return math.ceil(val)


class _NotExplicit:
    def __repr__(self):
        return "NotExplicit"

    def __str__(self):
        return "NotExplicit"


NOT_EXPLICIT = _NotExplicit()


@dataclass(frozen=True)
class BoundRequest:
    k: int
    l: int
    N: int
    generated_by_T_fixed: bool = True

    def __post_init__(self):
        if min(self.k, self.l, self.N) < 1:
            raise ValueError("k, l and N must be positive")


@dataclass
class Bounds:
    k: int
    l: int
    N: int
    N0: object
    N1: object
    N0_flags: list = field(default_factory=list)
    N1_adjusted: object = None
    N1_flags: list = field(default_factory=list)
    sturm: dict = field(default_factory=dict)

    def to_json(self):
        def enc(x):
            return x if isinstance(x, int) else str(x)
        return {
            "k": self.k, "l": self.l, "N": self.N,
            "N0": enc(self.N0), "N0_flags": self.N0_flags,
            "N1": enc(self.N1), "N1_adjusted": enc(self.N1_adjusted), "N1_flags": self.N1_flags,
            "B": {k: v for k, v in self.sturm.items()},
        }


def _smallest_coprime_at_least(lo: int, N: int) -> int:
    x = lo
    while math.gcd(x, N) != 1:
        x += 1
    return x


def theorem_bounds(req: BoundRequest) -> Bounds:
    """N0 for cusp forms and N1 for Eisenstein series in products of Eisenstein series."""
    k, l = sorted((req.k, req.l))
    N = req.N
    extra = 1 if req.generated_by_T_fixed else N
    sturm = {f"B({k + l},{N})": sturm_bound(k + l, N)}
    flags = []
    if k != l and k % 2 == 0:
        N0 = extra * N * sturm_bound(k + l, N)
    elif k != l:
        b = sturm_bound(k + l, 16 * N)
        sturm[f"B({k + l},{16 * N})"] = b
        N0 = extra * 16 * N * b
    elif k >= 2:
        bh = sturm_bound(Fraction(2 * k + 1, 2), N)
        sturm[f"B({k}+1/2,{N})"] = bh
        base = (16 * bh) ** 4
        b = sturm_bound(k + l, base)
        sturm[f"B({k + l},{base})"] = b
        N0 = extra * N * base * b
        flags.append("formula-extrapolated")
    else:
        N0 = NOT_EXPLICIT
    # N1: the table is stated for k >= 2; k = 1 <= l is handled by symmetry
    kk, ll = req.k, req.l
    if kk == 1 and ll >= 2:
        kk, ll = ll, kk
    n1_flags = []
    if kk == 1 and ll == 1:
        N1 = NotCovered("k = l = 1 is not covered by the N1 table")
        N1_adj = N1
    else:
        if kk > 2 and ll % 2 == 0:
            lo = 1
        elif kk > 2 and ll > 1:
            lo = 2
        elif kk == 2 and ll > 1:
            lo = 2
        else:  # ll == 1
            lo = 3
        N1 = _smallest_coprime_at_least(lo, N)
        N1_adj = N1
        if ll == 2 and N1 < 2:
            # weight-2 Eisenstein series of level 1 vanish, so level N1 = 1 cannot carry the l = 2 factor
            N1_adj = _smallest_coprime_at_least(2, N)
            n1_flags.append("adjusted: l = 2 needs N1 >= 2 because the level-1 weight-2 space is zero")
    return Bounds(req.k, req.l, N, N0, N1, flags, N1_adj, n1_flags, sturm)


def gamma_sturm_units(weight, L: int) -> int:
    """ceil(weight/12 [SL2(Z):Gamma(L)]) + 1, in units of q^(1/L)."""
    return math.ceil(Fraction(weight) / 12 * GammaN(L).index()) + 1


# ----------------------------------------------------------------------------
# certificates

def _num_to_json(x: CyclotomicNumber) -> dict:
    return {"conductor": x.conductor, "coords": [f"{c.numerator}/{c.denominator}" for c in x.coords]}


def _num_from_json(d) -> CyclotomicNumber:
    if isinstance(d, (str, int)):
        return CyclotomicNumber.from_rational(Fraction(d))
    return CyclotomicNumber(int(d["conductor"]), [Fraction(c) for c in d["coords"]])


@dataclass
class ExpressionCertificate:
    target: QExpansion
    k: int
    l: int
    levels: dict
    product_terms: list                      # [(sym, sym, coeff)]
    eisenstein_terms: list = field(default_factory=list)  # [(sym, coeff)]
    target_meta: dict = field(default_factory=dict)
    verified_truncation: int | None = None
    verified: bool = False

    @property
    def weight(self) -> int:
        return self.k + self.l

    @property
    def width(self) -> int:
        ws = [s.level for a, b, _ in self.product_terms for s in (a, b)] + \
             [s.level for s, _ in self.eisenstein_terms] + [1]
        return lcm(*ws)

    @property
    def target_level(self) -> int:
        return int(self.target_meta.get("level", 1))

    @property
    def check_level(self) -> int:
        return lcm(self.width, self.target_level)

    def expansion(self, prec: int, gamma: GroupElement = I) -> QExpansion:
        """sum of the terms slashed by gamma, truncated at prec units of q^(1/width)."""
        return _certificate_series(self, prec, gamma)

    def to_json(self) -> dict:
        meta = dict(self.target_meta)
        meta["expansion"] = self.target.to_json()
        out = {
            "format_version": FORMAT_VERSION,
            "target_meta": meta,
            "k": self.k,
            "l": self.l,
            "levels": self.levels,
            "product_terms": [[a.to_json(), b.to_json(), _num_to_json(c)] for a, b, c in self.product_terms],
            "eisenstein_terms": [[s.to_json(), _num_to_json(c)] for s, c in self.eisenstein_terms],
            "verified_truncation": self.verified_truncation,
        }
        classical = _classical_level_one(self)
        if classical is not None:
            out["classical_terms"] = classical
        return out

    @classmethod
    def from_json(cls, data) -> "ExpressionCertificate":
        for key in ("target_meta", "k", "l", "levels", "product_terms"):
            if key not in data:
                raise ValueError(f"missing field '{key}'")
        meta = dict(data["target_meta"])
        if "expansion" not in meta:
            raise ValueError("missing field 'target_meta.expansion'")
        target = QExpansion.from_json(meta.pop("expansion"))
        pt = [(EisensteinSymbol.from_json(a), EisensteinSymbol.from_json(b), _num_from_json(c))
              for a, b, c in data["product_terms"]]
        et = [(EisensteinSymbol.from_json(s), _num_from_json(c)) for s, c in data.get("eisenstein_terms", [])]
        return cls(target, int(data["k"]), int(data["l"]), dict(data["levels"]), pt, et, meta,
                   data.get("verified_truncation"), False)


def _classical_level_one(cert):
    """Coefficients against E_k normalized to constant term 1, when every symbol has level 1."""
    syms = [s for a, b, _ in cert.product_terms for s in (a, b)] + [s for s, _ in cert.eisenstein_terms]
    if not syms or any(s.level != 1 for s in syms) or any(s.weight < 3 or s.weight % 2 for s in syms):
        return None
    from .eisenstein import constant_term

    def c0(s):
        return constant_term(s.weight, 1, s.index).to_fraction()

    out = []
    for a, b, c in cert.product_terms:
        if not c.is_rational():
            return None
        val = c.to_fraction() * c0(a) * c0(b)
        out.append([[f"E{a.weight}", f"E{b.weight}"], f"{val.numerator}/{val.denominator}"])
    for s, c in cert.eisenstein_terms:
        if not c.is_rational():
            return None
        val = c.to_fraction() * c0(s)
        out.append([[f"E{s.weight}"], f"{val.numerator}/{val.denominator}"])
    return out


@dataclass
class NoSolution:
    k: int
    l: int
    levels: dict
    rank: int
    rank_with_target: int
    rows: int

    @property
    def defect(self) -> int:
        return self.rank_with_target - self.rank


@dataclass
class ResidualReport:
    first_mismatch: Fraction | None
    mismatch: CyclotomicNumber | None
    truncation_checked: int
    sturm_threshold: int
    holomorphy_ok: bool = True
    message: str = ""

    @property
    def verified(self) -> bool:
        return self.holomorphy_ok and self.first_mismatch is None and self.truncation_checked >= self.sturm_threshold


# ----------------------------------------------------------------------------

def _family_at(k, N, prec, cache=None) -> EisensteinFamily:
    return eisenstein_family(k, N, prec, cache=cache, validate=cache is not None)


def _factor_basis(k, N, prec, cache=None):
    """[(combination {IndexVector: Fraction}, expansion)] spanning the holomorphic level-N span."""
    fam = _family_at(k, N, prec, cache)
    return fam.holomorphic_basis()


def _canon(sym: EisensteinSymbol):
    """(canonical symbol, sign) with G(-v) = (-1)^k G(v)."""
    neg = -sym
    if neg < sym:
        return neg, (-1) ** sym.weight
    return sym, 1


def _holomorphy_gate(cert: ExpressionCertificate) -> tuple[bool, str]:
    """Sufficient per-symbol conditions for the weight-2 parts to cancel."""
    msgs = []
    zero = CyclotomicNumber.from_rational(0)
    if cert.k == cert.l == 2:
        # (h_a + c)(h_b + c): the c-linear part pairs each symbol with both slots
        sums, total = {}, zero
        for a, b, c in cert.product_terms:
            total = total + c
            for s in (a, b):
                sym, sgn = _canon(s)
                sums[sym] = sums.get(sym, zero) + c * sgn
        bad = [s for s, v in sums.items() if v]
        if bad:
            msgs.append(f"weight-2 factors have non-zero coefficient sum against {bad[0]}")
        if total:
            msgs.append("weight-2 products have non-zero total coefficient")
    for slot, wt in ((0, cert.k), (1, cert.l)):
        if cert.k == cert.l == 2:
            break
        if wt != 2:
            continue
        sums = {}
        for a, b, c in cert.product_terms:
            other = b if slot == 0 else a
            osym, sgn = _canon(other)
            sums[osym] = sums.get(osym, CyclotomicNumber.from_rational(0)) + c * sgn
        bad = [s for s, v in sums.items() if v]
        if bad:
            msgs.append(f"weight-2 factor in slot {slot} has non-zero coefficient sum against {bad[0]}")
    if cert.weight == 2 and cert.eisenstein_terms:
        total = sum((c for _, c in cert.eisenstein_terms), CyclotomicNumber.from_rational(0))
        if total:
            msgs.append("weight-2 Eisenstein terms do not sum to zero")
    return (not msgs, "; ".join(msgs))


def _certificate_series(cert: ExpressionCertificate, prec: int, gamma: GroupElement = I, cache=None) -> QExpansion:
    W = cert.width
    # group product terms by second factor
    fams = {}

    def member(sym: EisensteinSymbol) -> QExpansion:
        key = (sym.weight, sym.level)
        if key not in fams:
            T = -(-prec * sym.level // W) + 1
            fams[key] = _family_at(sym.weight, sym.level, T, cache)
        s = slash_index(sym, gamma)
        return fams[key][s.index].lift_width(W).truncate(prec).lift_conductor(W)

    total = QExpansion.zero(W, W, prec)
    groups = {}
    for a, b, c in cert.product_terms:
        groups.setdefault(b, []).append((a, c))
    for b, items in groups.items():
        inner = None
        for a, c in items:
            t = member(a).scale(c)
            inner = t if inner is None else inner + t
        total = total + inner * member(b)
    for s, c in cert.eisenstein_terms:
        total = total + member(s).scale(c)
    return total


def verify_certificate(cert: ExpressionCertificate, extra_prec: int = 0, cache=None) -> ResidualReport:
    """Compare the certificate with its target through the Gamma(L) Sturm threshold."""
    L = cert.check_level
    threshold = gamma_sturm_units(cert.weight, L)
    ok, msg = _holomorphy_gate(cert)
    if not ok:
        cert.verified = False
        return ResidualReport(None, None, 0, threshold, False, msg)
    W = cert.width
    units = max(threshold, extra_prec)  # units of q^(1/L)
    # express in units of the certificate width W (W | L)
    prec_w = -(-units * W // L)
    target = cert.target
    needed = Fraction(prec_w, W)
    if target.precision < needed:
        return ResidualReport(None, None, 0, threshold, True,
                              f"target known only below q^{target.precision}, need q^{needed}")
    series = _certificate_series(cert, prec_w, I, cache)
    tw = lcm(W, target.width)
    diff = series.lift_width(tw) - target.lift_width(tw).truncate_exponent(needed)
    diff = diff.truncate_exponent(needed)
    checked = prec_w * L // W
    if diff.is_zero():
        cert.verified = True
        cert.verified_truncation = checked
        return ResidualReport(None, None, checked, threshold, True, "verified")
    m = min(diff._rows)
    cert.verified = False
    return ResidualReport(Fraction(m, tw), diff[m], checked, threshold, True, "mismatch")


# ----------------------------------------------------------------------------

def raise_level(sym: EisensteinSymbol, L: int) -> dict[EisensteinSymbol, Fraction]:
    """G_{k,N,v} = (N/L)^k sum_{u = v mod N} G_{k,L,u} for N | L."""
    N = sym.level
    if L % N:
        raise ValueError(f"level {N} does not divide {L}")
    f = Fraction(N, L) ** sym.weight
    out = {}
    for c in range(sym.index.c, L, N):
        for d in range(sym.index.d, L, N):
            out[EisensteinSymbol.make(sym.weight, L, c, d)] = f
    return out


def _orbit_T(sym: EisensteinSymbol, w: int, r: int):
    out = []
    g = T ** w
    cur = sym
    for _ in range(r):
        out.append(cur)
        cur = slash_index(cur, g)
    return out


def _levels_pair(level_products):
    if isinstance(level_products, (tuple, list)):
        a, b = level_products
        return int(a), int(b)
    return int(level_products), int(level_products)


def express(target: QExpansion, k: int, l: int, level_products, level_eisenstein: int | None = None,
            prec: int | str = "auto", target_meta: dict | None = None, cache=None, verify_factor: int = 1):
    """Write ``target`` as sum c G_{k,Lk,x} G_{l,Ll,y} (+ sum e G_{k+l,L2,u}).

    Returns a verified ExpressionCertificate or a NoSolution record.
    """
    target_meta = dict(target_meta or {})
    target_meta.setdefault("level", 1)
    Lk, Ll = _levels_pair(level_products)
    L = lcm(Lk, Ll, level_eisenstein or 1)
    target_level = int(target_meta["level"])
    check_L = lcm(L, target_level)
    threshold = gamma_sturm_units(k + l, check_L)           # units of q^(1/check_L)
    units = threshold + 5 * check_L if prec == "auto" else max(int(prec), 1)
    # rows in units of q^(1/L)
    R = -(-units * L // check_L)
    if target.precision < Fraction(R, L):
        raise NeedMoreCoefficients(math.ceil(Fraction(R, L) * target.width), target.truncation)
    w_t = _support_width(target)
    step = L // math.gcd(L, w_t)     # only exponents m with m = 0 mod step survive projection
    rows = list(range(0, R, step))
    keep = set(rows)
    basis_k = _factor_basis(k, Lk, -(-R * Lk // L) + 1, cache)
    basis_l = _factor_basis(l, Ll, -(-R * Ll // L) + 1, cache) if (l, Ll) != (k, Lk) else basis_k
    cols = []
    col_terms = []   # list of [(combo_x, combo_y)] or ('E', combo)
    n = L

    def prepped(expn, lev):
        return expn.lift_width(L).lift_conductor(n).truncate(R)

    pk = [(cx, prepped(e, Lk)) for cx, e in basis_k]
    pl = [(cy, prepped(e, Ll)) for cy, e in basis_l] if basis_l is not basis_k else pk
    for i, (cx, ex) in enumerate(pk):
        start = i if (basis_l is basis_k) else 0
        for j in range(start, len(pl)):
            cy, ey = pl[j]
            rws = kronecker_product_rows(ex._rows, ey._rows, R, n, keep)
            col = QExpansion._make(L, n, R, rws, ex._den * ey._den)
            cols.append(col)
            col_terms.append(("P", cx, cy))
    if level_eisenstein:
        basis_e = _factor_basis(k + l, level_eisenstein, -(-R * level_eisenstein // L) + 1, cache)
        for ce, e in basis_e:
            col = prepped(e, level_eisenstein).project(w_t)
            cols.append(col)
            col_terms.append(("E", ce, None))
    tgt = _target_at_width(target, L).truncate(R)
    tgt = tgt.lift_conductor(lcm(n, tgt.conductor))
    levels = {"products": [Lk, Ll], "eisenstein": level_eisenstein}
    if not cols:
        zero_ok = all(tgt[m].is_zero() for m in rows)
        if not zero_ok:
            return NoSolution(k, l, levels, 0, 1, len(rows))
        cert = ExpressionCertificate(target, k, l, levels, [], [], target_meta)
        rep = verify_certificate(cert, threshold * verify_factor, cache)
        return cert if rep.verified else NoSolution(k, l, levels, 0, 1, len(rows))
    span = SeriesSpan(cols, rows, lcm(n, tgt.conductor))
    sol = span.express(tgt)
    if sol is None:
        r = span.rank()
        return NoSolution(k, l, levels, r, r + 1, len(rows))
    cert = _unfold(sol, col_terms, k, l, Lk, Ll, level_eisenstein, w_t, target, levels, target_meta)
    rep = verify_certificate(cert, threshold * verify_factor, cache)
    if not rep.verified:
        raise ArithmeticError(f"solver produced a certificate that failed verification: {rep}")
    return cert


def _support_width(f: QExpansion) -> int:
    """Least w with every exponent of f in (1/w)Z."""
    return f.width // math.gcd(f.width, *f._rows) if f._rows else 1


def _target_at_width(target: QExpansion, L: int) -> QExpansion:
    w = _support_width(target)
    if L % w:
        raise ValueError(f"target exponents need width {w}, which does not divide the product level {L}")
    g = target.width // w
    # rewrite at width w exactly, truncation rounded down
    t = QExpansion._make(w, target.conductor, target.truncation // g,
                         {m // g: r for m, r in target._rows.items() if m // g < target.truncation // g},
                         target._den)
    return t.lift_width(L)


def _unfold(sol, col_terms, k, l, Lk, Ll, Le, w_t, target, levels, meta) -> ExpressionCertificate:
    prod = {}
    eis = {}
    sym_k = lambda v: EisensteinSymbol(k, Lk, v)
    sym_l = lambda v: EisensteinSymbol(l, Ll, v)
    L = lcm(Lk, Ll)
    r = L // math.gcd(L, w_t)
    g = T ** w_t
    for j, coeff in sol.items():
        kind, cx, cy = col_terms[j]
        if kind == "P":
            for i in range(r):
                gi = g ** i
                share = coeff * Fraction(1, r)
                for vx, ax in cx.items():
                    for vy, ay in cy.items():
                        a = slash_index(sym_k(vx), gi)
                        b = slash_index(sym_l(vy), gi)
                        if k == l and Lk == Ll and b < a:
                            a, b = b, a
                        key = (a, b)
                        prod[key] = prod.get(key, CyclotomicNumber.from_rational(0)) + share * (ax * ay)
        else:
            re = Le // math.gcd(Le, w_t)
            for i in range(re):
                gi = g ** i
                for vu, au in cx.items():
                    s = slash_index(EisensteinSymbol(k + l, Le, vu), gi)
                    eis[s] = eis.get(s, CyclotomicNumber.from_rational(0)) + coeff * Fraction(au, re)
    pt = [(a, b, c) for (a, b), c in sorted(prod.items()) if c]
    et = [(s, c) for s, c in sorted(eis.items()) if c]
    return ExpressionCertificate(target, k, l, levels, pt, et, meta)


def express_escalating(target, k, l, level_products, level_eisenstein=None, max_level=None, **kw):
    """Retry at multiples of the given levels until a certificate is found or max_level is passed."""
    Lk, Ll = _levels_pair(level_products)
    base = lcm(Lk, Ll)
    if max_level is None or max_level is NOT_EXPLICIT:
        max_level = base * 4
    j = 1
    last = None
    while base * j <= max_level:
        res = express(target, k, l, (Lk * j, Ll * j), level_eisenstein and level_eisenstein * j, **kw)
        if isinstance(res, ExpressionCertificate):
            return res
        last = res
        j += 1
    return last


# ----------------------------------------------------------------------------

def cusp_expansion(cert: ExpressionCertificate, gamma: GroupElement, prec: int | None = None, cache=None) -> QExpansion:
    """(target |_{k+l} gamma) at infinity, in q^(1/width) with ``prec`` coefficients."""
    if not cert.verified:
        raise RefusedUnverified("certificate has not been verified")
    W = cert.width
    if prec is None:
        prec = gamma_sturm_units(cert.weight, W)
    return _certificate_series(cert, prec, gamma, cache)


def group_from_meta(meta: dict):
    g = meta.get("group", "Gamma")
    N = int(meta.get("level", 1))
    return {"Gamma0": Gamma0, "Gamma1": Gamma1, "Gamma": GammaN}[g](N)


# ----------------------------------------------------------------------------
# ranks

def span_rank(source, prec: int | None = None, step: int | None = None, budget: int = 8, cache=None) -> int:
    """Exact rank of a family's holomorphic span, reported once two successive precisions agree.

    ``source`` is an EisensteinFamily, a (k, N) pair, or a callable prec -> list of QExpansion
    (all of one width).
    """
    if isinstance(source, EisensteinFamily):
        source = (source.weight, source.level)
    if isinstance(source, tuple):
        k, N = source

        def gen(P):
            return [e for _, e in _factor_basis(k, N, P, cache)]

        width = N
        default = gamma_sturm_units(k, N)
    else:
        gen = source
        width = None
        default = 10
    P = prec or default
    step = step or (width or 1)
    prev = None
    for _ in range(budget):
        cols = gen(P)
        if not cols:
            r = 0
        else:
            span = SeriesSpan(cols, list(range(P)))
            r = span.rank()
        if prev is not None and r == prev:
            return r
        prev = r
        P += step
    raise RankUnstable(budget)


def _sl2_lifts(N: int) -> list[GroupElement]:
    return [lift_sl2(*m, N) for m in sl2_mod(N)]


def constant_term_rank(k: int, N: int) -> int:
    """Rank of the constant-term vectors (c_k(v gamma))_{gamma in SL2(Z/N)} over the holomorphic span."""
    from .eisenstein import constant_term

    lifts = _sl2_lifts(N)
    fam = _family_at(k, N, gamma_sturm_units(k, N))
    vecs = []
    for combo, _ in fam.holomorphic_basis():
        vec = []
        for g in lifts:
            acc = CyclotomicNumber.from_rational(0)
            for v, a in combo.items():
                acc = acc + constant_term(k, N, index_act(v, g)) * a
            vec.append(acc)
        vecs.append(vec)
    if not vecs:
        return 0
    return len(exact_column_profile(vecs, len(lifts))[0])


def constant_term_span_check(k: int, l: int, N: int, N1: int | None = None) -> dict:
    """Compare constant-term spaces for rho = Ind from Gamma(N) of the trivial representation.

    Left: c(E_{k+l}(rho), 0), spanned by the vectors (c_{k+l}(u gamma))_gamma.
    Right: Gamma(N)-invariant parts of E_k(N N1) E_l(N1), obtained as Reynolds
    sums over Gamma(N)/Gamma(N N1) of products, evaluated on constant terms.
    """
    from .eisenstein import constant_term

    if N1 is None:
        b = theorem_bounds(BoundRequest(k, l, N))
        N1 = b.N1_adjusted
        if not isinstance(N1, int):
            raise NotCovered(str(N1))
    A, B = N * N1, N1
    L = lcm(A, B)
    lifts = _sl2_lifts(N)
    # kernel of SL2(Z/L) -> SL2(Z/N)
    kernel = [lift_sl2(*m, L) for m in sl2_mod(L)
              if (m[0] - 1) % N == 0 and m[1] % N == 0 and m[2] % N == 0 and (m[3] - 1) % N == 0]

    def combos(wt, lev):
        fam = _family_at(wt, lev, gamma_sturm_units(wt, lev))
        return [c for c, _ in fam.holomorphic_basis()]

    cache_c = {}

    def cval(wt, lev, v):
        key = (wt, lev, v)
        if key not in cache_c:
            cache_c[key] = constant_term(wt, lev, v)
        return cache_c[key]

    def comb_const(wt, lev, combo, g):
        acc = CyclotomicNumber.from_rational(0)
        for v, a in combo.items():
            acc = acc + cval(wt, lev, index_act(v, g)) * a
        return acc

    lhs = []
    for combo in combos(k + l, N):
        lhs.append([comb_const(k + l, N, combo, g) for g in lifts])
    rhs = []
    ck, cl = combos(k, A), combos(l, B)
    for cx in ck:
        for cy in cl:
            vec = []
            for gam in lifts:
                acc = CyclotomicNumber.from_rational(0)
                for h in kernel:
                    g = h * gam
                    x = comb_const(k, A, cx, g)
                    if x:
                        y = comb_const(l, B, cy, g)
                        if y:
                            acc = acc + x * y
                vec.append(acc)
            rhs.append(vec)
    n = len(lifts)
    r_l = len(exact_column_profile(lhs, n)[0]) if lhs else 0
    r_r = len(exact_column_profile(rhs, n)[0]) if rhs else 0
    r_j = len(exact_column_profile(lhs + rhs, n)[0]) if lhs or rhs else 0
    return {"k": k, "l": l, "N": N, "N1": N1, "levels": (A, B), "lhs_rank": r_l, "rhs_rank": r_r,
            "joint_rank": r_j, "equal": r_l == r_r == r_j}
