"""Terms over a pca, bracket abstraction, and strict closed-term evaluation.

A term is built from constants (element handles or names resolved by the
model), variables, applications and ``Lam`` binders.  ``Lam`` is surface
sugar: :func:`compile_term` removes every binder, innermost first, using
:func:`lambda_star`.

Abstraction rules, in this order::

    λ*x.x          = s k k
    λ*x.t          = k t              if x is not free in t and t is a value
    λ*x.(t1 t2)    = s (λ*x.t1) (λ*x.t2)

A *value* is an atom or a partial application of ``k`` (at most one
argument) or ``s`` (at most two) to values.  Those are defined in every pca,
so ``k t`` never forces an undefined computation.  Any other application
goes through the ``s`` rule even when ``x`` does not occur, which delays it
until the abstraction is applied: ``λ*x.fg`` becomes ``s(kf)(kg)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from . import sexpr
from .fuel import Budget, EvalOutcome, run_budgeted


class Term:
    __slots__ = ()

    def __call__(self, *args: "Term") -> "Term":
        return app(self, *args)


@dataclass(frozen=True)
class Const(Term):
    value: Any

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term


S = Const("s")
K = Const("k")
I = App(App(S, K), K)


def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def lam(names: str, body: Term) -> Term:
    """``lam("x y", t)`` is ``Lam("x", Lam("y", t))``."""
    for name in reversed(names.split()):
        body = Lam(name, body)
    return body


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    return frozenset()


def has_binder(t: Term) -> bool:
    if isinstance(t, Lam):
        return True
    if isinstance(t, App):
        return has_binder(t.fn) or has_binder(t.arg)
    return False


def spine(t: Term):
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


def is_value(t: Term) -> bool:
    if isinstance(t, (Const, Var)):
        return True
    if isinstance(t, Lam):
        return False
    head, args = spine(t)
    if head == K:
        return len(args) <= 1 and all(is_value(a) for a in args)
    if head == S:
        return len(args) <= 2 and all(is_value(a) for a in args)
    return False


def lambda_star(x: str, t: Term) -> Term:
    if has_binder(t):
        raise ValueError("lambda_star expects a binder-free body; compile inner binders first")
    return _abstract(x, t)


def _abstract(x: str, t: Term) -> Term:
    if t == Var(x):
        return I
    if x not in free_vars(t) and is_value(t):
        return App(K, t)
    return App(App(S, _abstract(x, t.fn)), _abstract(x, t.arg))


def compile_term(t: Term) -> Term:
    """Eliminate every ``Lam`` node, innermost binders first."""
    if isinstance(t, Lam):
        return lambda_star(t.var, compile_term(t.body))
    if isinstance(t, App):
        return App(compile_term(t.fn), compile_term(t.arg))
    return t


def substitute(t: Term, name: str, value: Term) -> Term:
    """Replace free occurrences of ``name``; ``value`` must be closed."""
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, App):
        return App(substitute(t.fn, name, value), substitute(t.arg, name, value))
    if isinstance(t, Lam):
        if t.var == name:
            return t
        return Lam(t.var, substitute(t.body, name, value))
    return t


# -- evaluation --------------------------------------------------------------


def evaluate(model, t: Term, budget: Budget, env=None):
    """Strict, leftmost-innermost evaluation.  Raises fuel/divergence signals.

    One unit of fuel is charged per model application; the model charges its
    own internal work against the same budget.
    """
    if isinstance(t, Const):
        if isinstance(t.value, str):
            if env and t.value in env:
                return env[t.value]
            return model.constant(t.value)
        return t.value
    if isinstance(t, App):
        f = evaluate(model, t.fn, budget, env)
        a = evaluate(model, t.arg, budget, env)
        budget.charge()
        return model.apply_raw(f, a, budget)
    if isinstance(t, Var):
        raise ValueError(f"free variable {t.name!r} in closed evaluation")
    return evaluate(model, compile_term(t), budget, env)


def eval_closed(model, t: Term, fuel: int, env=None) -> EvalOutcome:
    if free_vars(t):
        raise ValueError(f"term is not closed: free {sorted(free_vars(t))}")
    t = compile_term(t)
    return run_budgeted(lambda b: evaluate(model, t, b, env), fuel)


# -- surface syntax ------------------------------------------------------------


def parse_term(text: str) -> Term:
    return _from_sexpr(sexpr.read(text))


def _from_sexpr(node) -> Term:
    if not isinstance(node, list) or not node:
        raise sexpr.SexprError(f"expected a term form, got {node!r}")
    head = node[0]
    if head == "app" and len(node) >= 3:
        return app(*[_from_sexpr(n) for n in node[1:]])
    if head == "lam" and len(node) == 3 and isinstance(node[1], str):
        return Lam(node[1], _from_sexpr(node[2]))
    if head == "const" and len(node) == 2 and not isinstance(node[1], list):
        return Const(node[1])
    if head == "var" and len(node) == 2 and isinstance(node[1], str):
        return Var(node[1])
    raise sexpr.SexprError(f"unknown term form {sexpr.write(node)}")


def format_term(t: Term) -> str:
    if isinstance(t, Const):
        return f"(const {t.value})"
    if isinstance(t, Var):
        return f"(var {t.name})"
    if isinstance(t, App):
        return f"(app {format_term(t.fn)} {format_term(t.arg)})"
    return f"(lam {t.var} {format_term(t.body)})"


def combinator_str(t: Term, abbreviate_i: bool = True) -> str:
    """Compact rendering, e.g. ``s(ki)i``; multi-letter atoms are spaced."""
    atoms = []

    def collect(u):
        if isinstance(u, App):
            collect(u.fn)
            collect(u.arg)
        elif isinstance(u, Const):
            atoms.append(str(u.value))
        elif isinstance(u, Var):
            atoms.append(u.name)
        else:
            raise ValueError("combinator_str needs a binder-free term")

    collect(t)
    sep = "" if all(len(a) == 1 for a in atoms) else " "

    def render(u):
        if abbreviate_i and u == I:
            return "i"
        if isinstance(u, Const):
            return str(u.value)
        if isinstance(u, Var):
            return u.name
        head, args = spine(u)
        parts = [render(head)]
        for a in args:
            r = render(a)
            parts.append(r if isinstance(a, (Const, Var)) or (abbreviate_i and a == I) else f"({r})")
        return sep.join(parts)

    return render(t)


def size(t: Term) -> int:
    if isinstance(t, App):
        return size(t.fn) + size(t.arg)
    if isinstance(t, Lam):
        return 1 + size(t.body)
    return 1


def closed_constants(t: Term) -> Iterable[Any]:
    if isinstance(t, Const):
        yield t.value
    elif isinstance(t, App):
        yield from closed_constants(t.fn)
        yield from closed_constants(t.arg)
    elif isinstance(t, Lam):
        yield from closed_constants(t.body)
