"""The applicative-structure contract and the standard library every pca carries.

Booleans, definition by cases, tuples, projections, numerals and the
numeral/boolean converters are all obtained by compiling λ*-terms with
:mod:`pcalab.terms` and evaluating them in the model at hand, so the same
code serves K1, the one-point table pca, or any other model with ``k`` and
``s``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

from .fuel import (
    Budget,
    Defined,
    EvalOutcome,
    FuelExhausted,
    ProvenDivergent,
    run_budgeted,
    same_outcome,
)
from .terms import App, Const, K, Lam, S, Term, Var, app, eval_closed, lam

DEFAULT_FUEL = 100_000


class Model:
    """A partial applicative structure with fueled application.

    Subclasses implement :meth:`apply_raw`, which either returns an element
    or raises :class:`~pcalab.fuel.Diverged` / :class:`~pcalab.fuel.OutOfFuel`.
    Application must be deterministic.
    """

    name = "model"

    def __init__(self):
        self.constants: Dict[str, Any] = {}

    def apply_raw(self, a, b, budget: Budget):
        raise NotImplementedError

    def apply(self, a, b, fuel: int) -> EvalOutcome:
        return run_budgeted(lambda bud: self.apply_raw(a, b, bud), fuel)

    def constant(self, name: str):
        try:
            return self.constants[name]
        except KeyError:
            raise KeyError(f"{self.name}: unknown constant {name!r}") from None

    def same(self, a, b) -> bool:
        return a == b

    def describe(self, a):
        return a

    def divergent_pair(self):
        """Elements ``(f, g)`` with ``fg`` provably undefined, or None."""
        return None

    def eval(self, t: Term, fuel: int = DEFAULT_FUEL, env=None) -> EvalOutcome:
        return eval_closed(self, t, fuel, env)


class StdLibError(RuntimeError):
    pass


_THUNK = "_thunk"


@dataclass
class StdLib:
    model: Model
    fuel: int
    k: Any = None
    s: Any = None
    i: Any = None
    true: Any = None
    false: Any = None
    ifthenelse: Any = None
    not_: Any = None
    and_: Any = None
    zero: Any = None
    to_num: Any = None  # true -> 1̄, false -> 0̄
    to_bool: Any = None  # 1̄ -> true, 0̄ -> false
    h: Any = None
    _numerals: List[Any] = field(default_factory=list)
    _pairs: Dict[int, Any] = field(default_factory=dict)
    _projs: Dict[tuple, Any] = field(default_factory=dict)

    # construction helpers -----------------------------------------------------

    def build(self, t: Term, what: str = "term"):
        out = eval_closed(self.model, t, self.fuel, self.env())
        if not isinstance(out, Defined):
            raise StdLibError(f"{self.model.name}: building {what} gave {out}")
        return out.value

    def ap(self, f, *args):
        """Apply elements left to right; raises StdLibError unless defined."""
        for a in args:
            out = self.model.apply(f, a, self.fuel)
            if not isinstance(out, Defined):
                raise StdLibError(f"{self.model.name}: application gave {out}")
            f = out.value
        return f

    def env(self) -> Dict[str, Any]:
        names = {"k": self.k, "s": self.s}
        for key in ("i", "true", "false", "ifthenelse", "zero", "h"):
            if getattr(self, key) is not None:
                names[key] = getattr(self, key)
        if self.not_ is not None:
            names["not"] = self.not_
        if self.and_ is not None:
            names["and"] = self.and_
        if self.to_num is not None:
            names["c"] = self.to_num
            names["d"] = self.to_bool
        for n, v in enumerate(self._numerals):
            names[f"num{n}"] = v
        return names

    # derived elements -----------------------------------------------------------

    def numeral(self, n: int):
        while len(self._numerals) <= n:
            m = len(self._numerals)
            if m == 0:
                self._numerals.append(self.i)
            else:
                self._numerals.append(self.tuple(self.false, self._numerals[m - 1]))
        return self._numerals[n]

    def numeral_index(self, a) -> Optional[int]:
        for n, v in enumerate(self._numerals):
            if self.model.same(v, a):
                return n
        return None

    def pair_maker(self, n: int):
        if n not in self._pairs:
            xs = [f"x{j}" for j in range(1, n + 1)]
            body = app(Var("z"), *[Var(x) for x in xs])
            self._pairs[n] = self.build(lam(" ".join(xs + ["z"]), body), f"pair maker {n}")
        return self._pairs[n]

    def tuple(self, *elems):
        return self.ap(self.pair_maker(len(elems)), *elems)

    def proj(self, n: int, i: int):
        """U^n_i, 1-based like the usual notation."""
        if not 1 <= i <= n:
            raise ValueError("projection index out of range")
        if (n, i) not in self._projs:
            us = [f"u{j}" for j in range(1, n + 1)]
            self._projs[(n, i)] = self.build(lam(" ".join(us), Var(us[i - 1])), f"U{n}{i}")
        return self._projs[(n, i)]

    def cond(self, test: Term, then: Term, other: Term) -> Term:
        """Definition by cases with delayed branches.

        Application is strict, so ``ifthenelse c a b`` would evaluate both
        branches; wrapping each in a dummy abstraction and applying the
        chosen one to ``i`` evaluates only the selected branch.
        """
        return app(
            Const(self.ifthenelse), test, Lam(_THUNK, then), Lam(_THUNK, other), Const(self.i)
        )

    def name_of(self, a) -> Optional[str]:
        for key, v in self.env().items():
            if v is not None and self.model.same(v, a):
                return key
        return None


def stdlib(model: Model, fuel: int = DEFAULT_FUEL, smoke: Iterable = ()) -> StdLib:
    lib = StdLib(model=model, fuel=fuel)
    lib.k = model.constant("k")
    lib.s = model.constant("s")
    _smoke_test(lib, list(smoke))
    lib.i = lib.build(app(S, K, K), "i")
    lib.true = lib.k
    lib.false = lib.build(App(K, Const(lib.i)), "false")
    lib.ifthenelse = lib.i
    T, F, IF = Const(lib.true), Const(lib.false), Const(lib.ifthenelse)
    lib.not_ = lib.build(lam("a", app(IF, Var("a"), F, T)), "not")
    lib.and_ = lib.build(lam("a b", app(IF, Var("a"), app(IF, Var("b"), T, F), F)), "and")
    lib.zero = lib.build(lam("x", app(Var("x"), T)), "zero")
    one, nought = Const(lib.numeral(1)), Const(lib.numeral(0))
    lib.to_num = lib.build(lam("z", app(IF, Var("z"), one, nought)), "c")
    lib.to_bool = lib.build(
        lam("x", app(Const(lib.not_), app(Const(lib.zero), Var("x")))), "d"
    )
    pair = model.divergent_pair()
    if pair is not None:
        lib.h = diverger(lib, *pair)
    return lib


def _smoke_test(lib: StdLib, extra: List[Any]) -> None:
    m = lib.model
    probes = [lib.k, lib.s] + extra
    for a, b in itertools.product(probes, repeat=2):
        ka = m.apply(lib.k, a, lib.fuel)
        if not isinstance(ka, Defined):
            raise StdLibError(f"{m.name}: k a undefined for a={m.describe(a)}")
        kab = m.apply(ka.value, b, lib.fuel)
        if not (isinstance(kab, Defined) and m.same(kab.value, a)):
            raise StdLibError(f"{m.name}: k a b != a for a={m.describe(a)}")
        sab = m.apply(lib.s, a, lib.fuel)
        if isinstance(sab, Defined):
            sab = m.apply(sab.value, b, lib.fuel)
        if not isinstance(sab, Defined):
            raise StdLibError(f"{m.name}: s a b undefined")


class DivergerError(ValueError):
    pass


def diverger(lib: StdLib, f, g, probes: Iterable = ()):
    """``h = s(kf)(kg)``: total on construction, undefined on every argument."""
    fg = lib.model.apply(f, g, lib.fuel)
    if not isinstance(fg, ProvenDivergent):
        raise DivergerError(f"f g is not provably divergent: {fg}")
    h = lib.build(app(S, App(K, Const(f)), App(K, Const(g))), "diverger")
    for a in probes:
        out = lib.model.apply(h, a, lib.fuel)
        if not isinstance(out, ProvenDivergent):
            raise DivergerError(f"h a gave {out}")
    return h


class ConverterError(AssertionError):
    pass


def converters_roundtrip(lib: StdLib, fuel: Optional[int] = None):
    """Check c true = 1̄, c false = 0̄, d 1̄ = true, d 0̄ = false; return (c, d)."""
    fuel = fuel or lib.fuel
    m = lib.model
    checks = [
        ("c true = 1", lib.to_num, lib.true, lib.numeral(1)),
        ("c false = 0", lib.to_num, lib.false, lib.numeral(0)),
        ("d 1 = true", lib.to_bool, lib.numeral(1), lib.true),
        ("d 0 = false", lib.to_bool, lib.numeral(0), lib.false),
    ]
    failed = []
    for label, f, a, want in checks:
        out = m.apply(f, a, fuel)
        if not (isinstance(out, Defined) and m.same(out.value, want)):
            failed.append(label)
    if failed:
        raise ConverterError("converter identities failed: " + ", ".join(failed))
    return lib.to_num, lib.to_bool


def fixpoint(lib: StdLib, f, fuel: Optional[int] = None):
    """Return ``e = ww`` with ``w = λ*xy.f(xx)y``, so that ``e y ≃ f e y``."""
    w = lib.build(lam("x y", app(Const(f), app(Var("x"), Var("x")), Var("y"))), "w")
    out = lib.model.apply(w, w, fuel or lib.fuel)
    if isinstance(out, Defined):
        return out.value
    if isinstance(out, FuelExhausted):
        raise StdLibError(f"fixpoint: w w ran out of fuel ({out.spent})")
    raise StdLibError("fixpoint: w w diverged")


def observational_eq(model: Model, a, b, probes: Iterable, fuel: int) -> str:
    """Compare ``a x`` and ``b x`` on probes.  Never claims equality."""
    for x in probes:
        ox, oy = model.apply(a, x, fuel), model.apply(b, x, fuel)
        if isinstance(ox, FuelExhausted) or isinstance(oy, FuelExhausted):
            return f"inconclusive({model.describe(x)})"
        if not same_outcome(ox, oy, model.same):
            return f"distinguished({model.describe(x)})"
    return "agree-on-probes"
