"""End-to-end runs: algebra window -> model -> fiber -> connection -> holonomy.

The worked geometries are the translation actions of Z on R and Z^2 on
R^2 (invariant-form windows) and the three-dimensional nilpotent algebra
window with its non-vanishing triple products.  Each run produces the
minimal model, the fiber quotient dimensions, the formality verdict and,
when a geometric realization is declared, the flat connection with its
certificate and a holonomy table for the declared loops.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .connection import (AutomorphyFactor, ConnectionForm, GaugeElement,
                         flatness_check, form_dvar, gauge_between, holonomy,
                         parse_loop, restrict_connection)
from .convolution import degree_zero_restrict
from .forms import PolyForm
from .freelie import EnvelopingQuotient, bracket_label
from .graded import GradedVectorSpace
from .minimal import (check_comparison, compare_models, formality_check,
                      massey_report, model_fiber_data, model_mc,
                      one_minimal_model, positive_part)
from .scalars import rat_str
from .structures import FiniteAlgebra


# ---------------------------------------------------------------------
# preset algebra windows
# ---------------------------------------------------------------------

def exterior_cdga(gen_names, rel_diff=None, arity_cap=4) -> FiniteAlgebra:
    """Exterior algebra on degree-1 generators with an optional d-table.

    ``rel_diff`` maps a generator name to a sorted-index word naming its
    differential (e.g. {"e3": "e1e2"}).
    """
    gens = list(gen_names)
    idx = {g: i for i, g in enumerate(gens)}
    words = []
    for r in range(len(gens) + 1):
        for combo in itertools.combinations(range(len(gens)), r):
            words.append(combo)

    def name_of(combo):
        if not combo:
            return "1"
        return "".join(gens[i][0] + gens[i][1:] for i in combo) if False else \
            "".join(gens[i] for i in combo)

    degrees = {}
    for combo in words:
        degrees.setdefault(len(combo), []).append(name_of(combo))
    space = GradedVectorSpace(degrees)
    unit = (0, "1")

    def key_of(combo):
        return (len(combo), name_of(combo))

    def mult(ca, cb):
        if set(ca) & set(cb):
            return None, 0
        sign = 1
        for a in ca:
            for b in cb:
                if a > b:
                    sign = -sign
        return tuple(sorted(ca + cb)), sign

    prod = {}
    for ca in words:
        for cb in words:
            merged, sign = mult(ca, cb)
            if sign:
                prod[(key_of(ca), key_of(cb))] = {key_of(merged): Fraction(sign)}
    diff = {}
    if rel_diff:
        base = {}
        for g, target in rel_diff.items():
            combo = tuple(sorted(idx[t] for t in _split_word(target, gens)))
            base[idx[g]] = combo
        # extend by the graded Leibniz rule
        for combo in words:
            acc = {}
            for pos, i in enumerate(combo):
                if i not in base:
                    continue
                rest = combo[:pos] + combo[pos + 1:]
                merged, sign = mult(base[i], rest)
                if not sign:
                    continue
                if pos % 2:
                    sign = -sign
                key = key_of(merged)
                acc[key] = acc.get(key, Fraction(0)) + sign
            acc = {k: c for k, c in acc.items() if c}
            if acc:
                diff[key_of(combo)] = acc
    return FiniteAlgebra.from_dga(space, diff, prod, kind="Cinf",
                                  arity_cap=arity_cap, unit_key=unit)


def _split_word(word, gens):
    out = []
    rest = word
    while rest:
        for g in sorted(gens, key=len, reverse=True):
            if rest.startswith(g):
                out.append(g)
                rest = rest[len(g):]
                break
        else:
            raise ValueError("cannot parse generator word %r" % (word,))
    return out


def circle_window(arity_cap=4):
    return exterior_cdga(["dx"], arity_cap=arity_cap)


def torus_window(arity_cap=4):
    return exterior_cdga(["dx", "dy"], arity_cap=arity_cap)


def heisenberg_window(arity_cap=4):
    return exterior_cdga(["e1", "e2", "e3"], rel_diff={"e3": "e1e2"},
                         arity_cap=arity_cap)


PRESETS = {
    "circle": {
        "window": circle_window,
        "ambient_dim": 1,
        "realize": {"dx": lambda m: form_dvar(m, 0)},
        "loops": ["a", "a a", "a a a"],
    },
    "torus": {
        "window": torus_window,
        "ambient_dim": 2,
        "realize": {"dx": lambda m: form_dvar(m, 0),
                    "dy": lambda m: form_dvar(m, 1)},
        "loops": ["a", "b", "a b", "a b a- b-"],
    },
    "heisenberg": {
        "window": heisenberg_window,
        "ambient_dim": None,
        "realize": None,
        "loops": [],
    },
}


def _realizer(preset, m):
    table = {name: fn(m) for name, fn in preset["realize"].items()}

    def realize(val):
        if not isinstance(val, dict):
            return None
        out = None
        for (d, name), c in val.items():
            form = table.get(name)
            if form is None:
                continue
            piece = form.scale(c)
            out = piece if out is None else out + piece
        if out is None or out.is_zero():
            return None
        if out.homogeneous_degree() != 1:
            return None
        return out
    return realize


class PipelineResult:
    def __init__(self, name, model, free, ideal, fib, verdict, meta,
                 connection=None, certificate=None, theta=None, env=None,
                 dims_per_k=None):
        self.name = name
        self.model = model
        self.free = free
        self.ideal = ideal
        self.fib = fib
        self.verdict = verdict
        self.meta = meta
        self.connection = connection
        self.certificate = certificate
        self.theta = theta
        self.env = env
        self.dims_per_k = dims_per_k or {}

    def to_json(self):
        out = {
            "name": self.name,
            "model": self.model.algebra.to_json(),
            "massey": _massey_json(self.model),
            "fiber": {
                "graded_dims": {str(k): v for k, v in
                                sorted(self.fib.graded_dims().items())},
                "dims_per_k": {str(k): v for k, v in sorted(self.dims_per_k.items())},
                "basis": [bracket_label(w, self.free.gen_names)
                          for w in self.fib.basis],
            },
            "formality": {"verdict": self.verdict,
                          "generator_lengths": self.meta["generator_lengths"],
                          "sufficient_condition": self.meta["sufficient_condition"]},
        }
        if self.connection is not None:
            out["connection"] = {
                "coefficients": {bracket_label(w, self.free.gen_names):
                                 f.to_json()
                                 for w, f in sorted(self.connection.coeffs.items())},
                "flat": bool(self.certificate and self.certificate.flat),
            }
        if self.theta is not None:
            out["holonomy"] = {
                loop: {("1" if not w else ".".join(self.free.gen_names[i]
                                                   for i in w)): rat_str(c)
                       for w, c in sorted(val.items())}
                for loop, val in sorted(self.theta.items())
            }
        return out


def _massey_json(model):
    rep = massey_report(model)
    return {str(n): {"|".join(wrd): {name: rat_str(c) for name, c in val.items()}
                     for wrd, val in sorted(table.items())}
            for n, table in rep.items()}


def run_pipeline(name, trunc=4, arity_cap=4, pivot="lex", k=None) -> PipelineResult:
    """Full run for a preset name or a FiniteAlgebra window."""
    gauge_h = None
    if isinstance(name, str):
        if name not in PRESETS:
            raise ValueError("unknown preset %r" % (name,))
        preset = PRESETS[name]
        B = preset["window"](arity_cap)
        label = name
    else:
        preset = {"ambient_dim": None, "realize": None, "loops": []}
        B = name
        label = "custom"
    k = k or trunc
    model = one_minimal_model(B, arity_cap=arity_cap, pivot=pivot)
    free, ideal, fib = model_fiber_data(model, trunc=trunc, k=k)
    dims = {}
    for kk in range(2, k + 1):
        dims[kk] = model_fiber_data(model, trunc=trunc, k=kk)[2].dim()
    verdict, meta = formality_check(model, trunc=trunc)
    result = PipelineResult(label, model, free, ideal, fib, verdict, meta,
                            dims_per_k=dims)
    if preset["realize"] is not None:
        m = preset["ambient_dim"]
        gens, alpha = model_mc(model, trunc=trunc)
        pi_alpha = degree_zero_restrict(alpha)
        gen_of_index = {}
        for i, key in enumerate(gens.keys):
            if key[0] == 1:
                gen_of_index[i] = free.gen_names.index(key[1])
        realize = _realizer(preset, m)
        conn = restrict_connection(pi_alpha, positive_part(model.algebra),
                                   fib, gen_of_index, realize=realize,
                                   ambient_dim=m)
        cert = flatness_check(conn)
        env = EnvelopingQuotient(free, ideal, k)
        F = AutomorphyFactor(GaugeElement(m, fib, {}), env)
        theta = {}
        for loop_text in preset["loops"]:
            loop = parse_loop(loop_text, m)
            value = holonomy(conn, F, loop, (0,) * m, env)
            if not env.is_grouplike(value):
                raise RuntimeError("holonomy value is not grouplike: %r"
                                   % (loop_text,))
            theta[loop_text] = value
        result.connection = conn
        result.certificate = cert
        result.theta = theta
        result.env = env
    return result


def compare_pipeline_models(name, trunc=4, k=4, pivots=("lex", "revlex"),
                            arity_cap=4):
    """Two independently built models of one input, with the comparison,
    the connecting gauge and the holonomy conjugation identity."""
    r1 = run_pipeline(name, trunc=trunc, arity_cap=arity_cap, pivot=pivots[0], k=k)
    r2 = run_pipeline(name, trunc=trunc, arity_cap=arity_cap, pivot=pivots[1], k=k)
    comp = compare_models(r1.model, r2.model, arity_cap=min(arity_cap, 4))
    comp_failures = check_comparison(comp, trunc=trunc, k=k)
    report = {
        "dims_match": r1.fib.dim() == r2.fib.dim(),
        "dims_per_k_match": r1.dims_per_k == r2.dims_per_k,
        "comparison_failures": comp_failures,
    }
    if r1.connection is not None and r2.connection is not None:
        # transport the first connection through the dual comparison and
        # find the connecting gauge on the second fiber
        def dual_map(series):
            out = {}
            for w, c in series.items():
                img = comp.dual_on_word(w, r1.free, r2.free)
                for w2, c2 in img.items():
                    out[w2] = out.get(w2, Fraction(0)) + c * c2
            return {w: c for w, c in out.items() if c}

        mapped = _map_connection(r1.connection, dual_map, r2.fib)
        h = gauge_between(mapped, r2.connection)
        p = (0,) * r1.connection.m
        h_at_p = h.at_point(p)
        from .connection import conjugation_compatibility
        mapped_theta = {loop: r2.env.reduce(dual_map(val))
                        for loop, val in r1.theta.items()}
        fails = conjugation_compatibility(mapped_theta, r2.theta,
                                          lambda t: dict(t), h_at_p, r2.env)
        report["holonomy_conjugation_failures"] = fails
        report["gauge_nonzero"] = not h.is_zero()
    return r1, r2, comp, report


def _map_connection(conn: ConnectionForm, dual_map, fib2) -> ConnectionForm:
    from .freelie import lyndon_bracket
    m = conn.m
    monomials = {}
    for w, form in conn.coeffs.items():
        expanded = lyndon_bracket(tuple(w), conn.fib.free.order)
        mapped = dual_map(expanded)
        for key, c in form.terms.items():
            acc = monomials.setdefault(key, {})
            for ww, c2 in mapped.items():
                acc[ww] = acc.get(ww, Fraction(0)) + c * c2
    coeffs = {}
    for key, vec in monomials.items():
        coords = fib2.normal_form({w: c for w, c in vec.items() if c})
        for w, c in coords.items():
            cur = coeffs.get(w, PolyForm.zero(m, varname="x", ndiff=m))
            coeffs[w] = cur + PolyForm(m, {key: c}, varname="x", ndiff=m)
    return ConnectionForm(m, fib2, coeffs)
