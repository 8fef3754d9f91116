"""Compare mechanically derived forms with their printed transcriptions."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import published
from .canon import from_poly, normalize, same, to_poly
from .chain import build_chain, linearize, to_text_ode
from .evaluate import equals
from .expr import Const, Expr, alpha, as_expr, substitute, to_text
from .jet import ChainParams, JetPoly, _jet_var_text
from .reduce import depress


@dataclass
class AuditResult:
    name: str
    derived: str
    printed: str
    matches: bool
    diff: list[dict] = field(default_factory=list)
    reading: dict | None = None
    matches_after_reading: bool | None = None
    notes: list[str] = field(default_factory=list)
    undocumented: bool = False

    @property
    def passed(self) -> bool:
        """Derived and printed agree, after the recorded reading or up to recorded misprints."""
        if self.reading is not None:
            return bool(self.matches_after_reading)
        return not self.undocumented

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "derived": self.derived,
            "printed": self.printed,
            "matches": self.matches,
            "reading": self.reading,
            "matches_after_reading": self.matches_after_reading,
            "passed": self.passed,
            "undocumented_difference": self.undocumented,
            "diff": self.diff,
            "notes": self.notes,
        }


def _jet_monomial_text(m) -> str:
    parts = [_jet_var_text(k) + (f"^{p}" if p > 1 else "") for k, p in enumerate(m) if p]
    return "*".join(parts) or "1"


def jet_diff(derived: JetPoly, printed: JetPoly) -> list[dict]:
    """Jet monomials whose coefficients disagree, in the derived term order."""
    d, p = derived.terms, printed.terms
    order = [m for m, _ in derived.sorted_terms()] + [m for m, _ in printed.sorted_terms() if m not in d]
    out = []
    for m in order:
        a, b = d.get(m, Const(0)), p.get(m, Const(0))
        if not same(a, b):
            out.append({"term": _jet_monomial_text(m), "derived": to_text(a), "printed": to_text(b)})
    return out


def expr_diff(derived: Expr, printed: Expr) -> list[dict]:
    """Monomials (over canonical atoms) whose coefficients disagree."""
    a, b = to_poly(derived), to_poly(printed)
    out = []
    for m in list(a) + [m for m in b if m not in a]:
        ca, cb = a.get(m, 0), b.get(m, 0)
        if ca != cb:
            out.append({"term": to_text(from_poly({m: 1})), "derived": str(ca), "printed": str(cb)})
    return out


def _jets_agree(a: JetPoly, b: JetPoly) -> bool:
    return a == b and equals(a.to_expr(), b.to_expr())


def chain_params_for(n: int) -> ChainParams:
    """The parameters each printed chain equation is stated for."""
    if n == 1:
        return ChainParams(1, 1, (alpha(0), alpha(1)))
    return ChainParams.opaque(n)


def chain_audit(n: int) -> AuditResult:
    printed_text = {1: published.RICCATI_ORDER1, 2: published.RICCATI_ORDER2, 3: published.RICCATI_ORDER3}
    if n not in printed_text:
        raise ValueError("printed chain equations exist for n = 1, 2, 3")
    derived = build_chain(chain_params_for(n)).lhs
    printed = JetPoly.from_expr(printed_text[n])
    matches = _jets_agree(derived, printed)
    result = AuditResult(
        name=f"chain.n{n}",
        derived=str(derived),
        printed=str(printed),
        matches=matches,
        diff=jet_diff(derived, printed),
        undocumented=not matches and n != 2,
    )
    if n == 2:
        reading = published.RICCATI_ORDER2_READING
        reread = JetPoly.from_expr(
            substitute(as_expr(printed_text[n]), {k: as_expr(v) for k, v in reading.items()})
        )
        result.reading = dict(reading)
        result.matches_after_reading = _jets_agree(derived, reread)
        result.notes.append(
            "printed form contains "
            + " and ".join(f"{k}(x) where {v} is meant" for k, v in reading.items())
        )
    if n == 1:
        result.notes.append("stated for c = 1")
    return result


def linear_audit(n: int) -> AuditResult:
    printed = {1: published.LINEAR_ORDER2, 2: published.LINEAR_ORDER3, 3: published.LINEAR_ORDER4}[n]
    ode = linearize(chain_params_for(n))
    diff = []
    for i, (a, b) in enumerate(zip(ode.coeffs, printed)):
        b = normalize(as_expr(b))
        if not same(a, b):
            diff.append({"term": f"phi{chr(39) * i}(x)", "derived": to_text(a), "printed": to_text(b)})
    result = AuditResult(
        name=f"linearize.n{n}",
        derived=str(ode),
        printed=to_text_ode([normalize(as_expr(b)) for b in printed], "phi"),
        matches=not diff and len(printed) == ode.order,
        diff=diff,
    )
    result.undocumented = not result.matches
    if n == 3 and published.LINEAR_ORDER4_MISSING_PHI:
        result.notes.append("printed constant term lacks its phi(x) factor")
    return result


def depress_audit(order: int) -> AuditResult:
    """Depressed coefficients of the opaque order-``order`` linearization (3 or 4)."""
    printed = {3: published.DEPRESSED_ORDER3, 4: published.DEPRESSED_ORDER4}[order]
    known = published.DEPRESSED_ORDER3_MISPRINTED if order == 3 else ()
    red = depress(linearize(ChainParams.opaque(order - 1)))
    diff = []
    undocumented = False
    for k in sorted(printed, reverse=True):
        ours, theirs = red.coeffs[k], normalize(as_expr(printed[k]))
        if not same(ours, theirs):
            undocumented = undocumented or k not in known
            for d in expr_diff(ours, theirs):
                diff.append({"coefficient": f"v{chr(39) * k}(x)", **d})
    result = AuditResult(
        name=f"depress.order{order}",
        derived="; ".join(f"v{chr(39) * k}(x): {to_text(red.coeffs[k])}" for k in sorted(printed, reverse=True)),
        printed="; ".join(f"v{chr(39) * k}(x): {printed[k]}" for k in sorted(printed, reverse=True)),
        matches=not diff,
        diff=diff,
        undocumented=undocumented,
    )
    if order == 3:
        gauge = normalize(as_expr(published.GAUGE_ORDER3))
        if not same(red.gauge.factor, gauge):
            result.notes.append(f"gauge differs: derived {red.gauge}, printed {to_text(gauge)}")
        bad = sorted({d["coefficient"] for d in diff})
        if bad:
            result.notes.append("printed coefficient of " + ", ".join(bad) + " disagrees with the derivation")
    return result


def audit_suite() -> list[AuditResult]:
    return (
        [chain_audit(n) for n in (1, 2, 3)]
        + [linear_audit(n) for n in (1, 2, 3)]
        + [depress_audit(m) for m in (3, 4)]
    )
