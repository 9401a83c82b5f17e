"""Halting sets, m-reductions, and the diagonal refuters.

Everything here works over a :class:`~pcalab.kernel.StdLib`, so the same
code runs in K1, in an oracle extension, or in any other model with ``k``,
``s`` and a diverger.  Refuters take a concrete candidate and return a
:class:`~pcalab.witness.Witness` recording the applications that show it is
wrong.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, List, Optional, Tuple

from .fuel import Defined, FuelExhausted, ProvenDivergent
from .kernel import StdLib
from .terms import Const, Var, app, lam
from .witness import Witness

REFUTE_FUEL = 200_000


class InvalidCandidate(ValueError):
    def __init__(self, witness: Witness):
        super().__init__(witness.clause)
        self.witness = witness


class PreconditionError(ValueError):
    pass


def _c(x):
    return Const(x)


def _apply_step(lib: StdLib, w: Witness, label: str, f, a, fuel: int):
    model = lib.model
    return w.record(label, fuel, lambda: model.apply(f, a, fuel))


# -- sets ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CeSet:
    """``{a : e a defined}``."""

    lib: StdLib
    e: Any

    def probe(self, a, fuel: int):
        """True / False when settled within fuel, None when fuel ran out."""
        out = self.lib.model.apply(self.e, a, fuel)
        if isinstance(out, FuelExhausted):
            return None
        return isinstance(out, Defined)


@dataclass(frozen=True)
class DecidableSet:
    """``{a : c a = 1̄}`` for a total 0̄/1̄-valued ``c``."""

    lib: StdLib
    c: Any

    def contains(self, a, fuel: int) -> Optional[bool]:
        out = self.lib.model.apply(self.c, a, fuel)
        if not isinstance(out, Defined):
            return None
        return _numeral_bit(self.lib, out.value)


def _numeral_bit(lib: StdLib, v) -> Optional[bool]:
    if lib.model.same(v, lib.numeral(1)):
        return True
    if lib.model.same(v, lib.numeral(0)):
        return False
    return None


def _truth(lib: StdLib, v) -> Optional[bool]:
    if lib.model.same(v, lib.true):
        return True
    if lib.model.same(v, lib.false):
        return False
    return None


# -- H and K ------------------------------------------------------------------------


def halting_ce_element(lib: StdLib):
    """``e x = (x U²₁)(x U²₂)``, so ``e⟨a,b⟩ ≃ ab``."""
    u1, u2 = _c(lib.proj(2, 1)), _c(lib.proj(2, 2))
    x = Var("x")
    return lib.build(lam("x", app(app(x, u1), app(x, u2))), "halting e")


def ce_from_decider(lib: StdLib, c, probes: Iterable = (), fuel: int = REFUTE_FUEL):
    """``e a = if d(c a) then 0̄ else h a``; its domain is ``{a : c a = 1̄}``.

    Probes are checked first: any probe where ``c`` does not return a
    numeral 0̄ or 1̄ raises :class:`InvalidCandidate`.
    """
    if lib.h is None:
        raise PreconditionError("model has no diverger")
    for a in probes:
        w = Witness("invalid-candidate", elements={"c": c, "probe": a})
        out = _apply_step(lib, w, "c a", c, a, fuel)
        if not (isinstance(out, Defined) and _numeral_bit(lib, out.value) is not None):
            w.clause = "c a is not 0̄ or 1̄"
            raise InvalidCandidate(w)
    a = Var("a")
    test = app(_c(lib.to_bool), app(_c(c), a))
    body = lib.cond(test, _c(lib.numeral(0)), app(_c(lib.h), a))
    return lib.build(lam("a", body), "ce from decider")


def m_reduce_to_H(lib: StdLib, e):
    """``f a = ⟨e, a⟩``: total, and ``a ∈ dom(e)`` iff ``f a ∈ H``."""
    return lib.build(lam("a", app(_c(lib.pair_maker(2)), _c(e), Var("a"))), "m-reduction")


def k_h_equivalence(lib: StdLib) -> Tuple[Any, Any]:
    """Reductions ``K ≤ H`` (``a ↦ ⟨a,a⟩``) and ``H ≤ K``
    (``x ↦ λ*z.(xU²₁)(xU²₂)``)."""
    f_kh = lib.build(lam("a", app(_c(lib.pair_maker(2)), Var("a"), Var("a"))), "K to H")
    u1, u2 = _c(lib.proj(2, 1)), _c(lib.proj(2, 2))
    x = Var("x")
    f_hk = lib.build(lam("x z", app(app(x, u1), app(x, u2))), "H to K")
    return f_kh, f_hk


def in_H(lib: StdLib, x, fuel: int):
    return lib.model.apply(halting_ce_element(lib), x, fuel)


# -- refuters -----------------------------------------------------------------------


def refute_halting_decider(lib: StdLib, f, fuel: int = REFUTE_FUEL) -> Witness:
    """Diagonalise against a claimed decider ``f`` of ``H``.

    ``g a = if not(f⟨a,a⟩) then 0̄ else h a``; then ``f⟨g,g⟩`` is wrong
    about ``g g`` either way.
    """
    if lib.h is None:
        raise PreconditionError("model has no diverger")
    a = Var("a")
    claim = app(_c(lib.not_), app(_c(f), app(_c(lib.pair_maker(2)), a, a)))
    g = lib.build(lam("a", lib.cond(claim, _c(lib.numeral(0)), app(_c(lib.h), a))), "g")
    gg = lib.tuple(g, g)
    w = Witness("halting-decider", elements={"f": f, "g": g})
    verdict = _apply_step(lib, w, "f ⟨g,g⟩", f, gg, fuel)
    if not isinstance(verdict, Defined) or _truth(lib, verdict.value) is None:
        w.kind = "invalid-candidate"
        w.clause = "f ⟨g,g⟩ is not a truth value"
        return w
    says_halts = _truth(lib, verdict.value)
    actual = _apply_step(lib, w, "g g", g, g, fuel)
    w.notes["f_says"] = "halts" if says_halts else "diverges"
    if says_halts and isinstance(actual, ProvenDivergent):
        w.clause = "f says g g halts, but g g diverges"
    elif not says_halts and isinstance(actual, Defined):
        w.clause = "f says g g diverges, but g g = 0̄"
    else:
        w.conclusive = False
        w.clause = "g g not settled within fuel"
    return w


def refute_separator(lib: StdLib, c, fuel: int = REFUTE_FUEL) -> Witness:
    """``c`` claims to decide some ``C`` with ``A ⊆ C ⊆ ¬B``; look at ``c c``."""
    w = Witness("separator", elements={"c": c})
    out = _apply_step(lib, w, "c c", c, c, fuel)
    bit = _numeral_bit(lib, out.value) if isinstance(out, Defined) else None
    if bit is None:
        w.kind = "invalid-candidate"
        w.clause = "c c is not 0̄ or 1̄" if isinstance(out, Defined) else "c is not total at c"
        return w
    if bit:
        w.clause = "c c = 1̄ puts c in B, so c must be outside C, yet c includes it"
        w.notes["branch"] = "in B"
    else:
        w.clause = "c c = 0̄ puts c in A, so c must be inside C, yet c excludes it"
        w.notes["branch"] = "in A"
    return w


def flip_element(lib: StdLib):
    """``λ*n. c(not(d n))``: swaps 0̄ and 1̄."""
    return lib.build(
        lam("n", app(_c(lib.to_num), app(_c(lib.not_), app(_c(lib.to_bool), Var("n"))))), "flip"
    )


def diagonal_element(lib: StdLib):
    """``b a = a a``."""
    return lib.build(lam("a", app(Var("a"), Var("a"))), "diagonal b")


def refute_total_extension(lib: StdLib, f, c01, fuel: int = REFUTE_FUEL) -> Witness:
    """``f`` claims to be a total extension of ``b a = a a``.

    With ``f̂ a = c01(f a)`` and ``g a = flip(f̂ a)``, ``g g`` is defined
    and 0̄/1̄-valued, so an extension must have ``f g = g g``; but then
    ``g g = flip(c01(g g))``, which a valid separator ``c01`` rules out.
    The witness names the link that broke.
    """
    model = lib.model
    flip = flip_element(lib)
    fhat = lib.build(lam("a", app(_c(c01), app(_c(f), Var("a")))), "f-hat")
    g = lib.build(lam("a", app(_c(flip), app(_c(fhat), Var("a")))), "g")
    w = Witness("total-extension", elements={"f": f, "c01": c01, "g": g})

    probe = lib.i  # i i = 0̄, so any extension must send i to 0̄
    first = _apply_step(lib, w, "f i", f, probe, fuel)
    if not isinstance(first, Defined):
        w.clause = "f is not total: f i undefined"
        w.conclusive = isinstance(first, ProvenDivergent)
        return w

    fg = _apply_step(lib, w, "f g", f, g, fuel)
    if not isinstance(fg, Defined):
        w.clause = "f is not total: f g undefined"
        w.conclusive = isinstance(fg, ProvenDivergent)
        return w
    gg = _apply_step(lib, w, "g g", g, g, fuel)
    if not isinstance(gg, Defined):
        w.kind = "invalid-candidate"
        w.clause = "c01 is not total on f g"
        w.conclusive = isinstance(gg, ProvenDivergent)
        return w
    if not model.same(fg.value, gg.value):
        w.clause = "extension violated: g g is defined but f g differs from it"
        w.notes["a"] = "g"
        w.notes["aa_bit"] = _numeral_bit(lib, gg.value)
        return w
    # f g = g g = v, so g g = flip(c01 v): c01 must have mapped v to the other numeral
    cv = _apply_step(lib, w, "c01 (g g)", c01, gg.value, fuel)
    w.kind = "invalid-candidate"
    w.clause = "c01 does not separate 0̄ and 1̄"
    w.notes["c01_value"] = cv
    return w


def extension_transfer(lib: StdLib, f):
    """``x ↦ f(g x)`` with ``g⟨a,b⟩ z ≃ ab``.

    If ``f`` extends ``b a = a a`` then ``f(g⟨a,b⟩) = ab`` whenever ``ab`` is
    defined, so the result extends the universal ``d⟨a,b⟩ = ab``.
    """
    _, g = k_h_equivalence(lib)
    return lib.build(lam("x", app(_c(f), app(_c(g), Var("x")))), "extension transfer")


def refute_precomplete_injective(lib: StdLib, totalizer, kernel, c01,
                                 fuel: int = REFUTE_FUEL) -> Witness:
    """Under a 1-1 numbering, totalizing ``b`` modulo the kernel means being
    a literal total extension of ``b``; refute that."""
    if not kernel.is_identity:
        raise PreconditionError(f"kernel {kernel.name!r} is not claimed 1-1")
    w = refute_total_extension(lib, totalizer, c01, fuel)
    if w.kind == "total-extension":
        w.kind = "precomplete-1-1"
    w.notes["kernel"] = kernel.name
    return w


# -- K1 candidate families ------------------------------------------------------------


def k1_separator01(lib: StdLib):
    """The code-inspection separator: 1̄ on the numeral-1̄ code, else 0̄."""
    from .k1 import equality_decider

    one, nought = lib.numeral(1), lib.numeral(0)
    return equality_decider(one, one, nought)


def k1_halting_candidates(lib: StdLib) -> List[Tuple[str, Any]]:
    from .k1 import K_CODE, equality_decider

    t, f = lib.true, lib.false
    first = lib.proj(2, 1)

    def first_is(target):
        dec = equality_decider(target, t, f)
        return lib.build(lam("x", app(_c(dec), app(Var("x"), _c(first)))), "first-is")

    return [
        ("const-false", lib.ap(lib.k, f)),
        ("const-true", lib.ap(lib.k, t)),
        ("first-is-k", first_is(K_CODE)),
        ("first-is-diverger", first_is(lib.h)),
        ("first-is-i", first_is(lib.i)),
    ]


def k1_separator_candidates(lib: StdLib) -> List[Tuple[str, Any]]:
    from .k1 import K_CODE, equality_decider

    one, nought = lib.numeral(1), lib.numeral(0)
    return [
        ("const-0", lib.ap(lib.k, nought)),
        ("const-1", lib.ap(lib.k, one)),
        ("identity", lib.i),
        ("is-k", equality_decider(K_CODE, one, nought)),
        ("is-numeral-1", equality_decider(one, one, nought)),
    ]


def k1_extension_candidates(lib: StdLib) -> List[Tuple[str, Any]]:
    from .k1 import K_CODE, equality_decider

    one, nought = lib.numeral(1), lib.numeral(0)
    return [
        ("const-0", lib.ap(lib.k, nought)),
        ("const-1", lib.ap(lib.k, one)),
        ("identity", lib.i),
        ("is-k", equality_decider(K_CODE, one, nought)),
        ("diverger", lib.h),
    ]
