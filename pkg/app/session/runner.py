"""
Command dispatch and report building for parsed sessions.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Callable, Dict, Optional

from app.algebra import derham, lattices, modules
from app.algebra.groebner import Side, collect_stats, left_normal_form, transpose_vector
from app.algebra.lattices import IntegralPresentation, Lattice
from app.algebra.modules import CharCycle, PresentedModule
from app.algebra.scalars import RingTag
from app.errors import InternalInvariant, ParseError, UnsupportedAmbient, WeylFiberError
from app.schemas import (
    CharCycleRead,
    CohomologyRead,
    CycleComponentRead,
    EngineStatsRead,
    ErrorRecord,
    ModuleSummaryRead,
    Report,
    exact,
)
from app.session.parser import Command, SessionInput, parse
from app.settings import get_settings

logger = logging.getLogger(__name__)

Verdicts = Dict[str, Any]


# -- serialisation helpers --------------------------------------------------------


def cycle_read(cycle: Optional[CharCycle]) -> Optional[dict]:
    if cycle is None:
        return None
    comps = [CycleComponentRead(generators=list(c.generators), multiplicity=c.multiplicity) for c in cycle.components]
    return CharCycleRead(components=comps, total_multiplicity=modules.multiplicity(cycle)).model_dump()


def module_read(M: PresentedModule) -> dict:
    return ModuleSummaryRead(
        ring=M.ring_tag.value,
        side=M.side.value,
        ambient_n=M.ambient_n,
        rank=M.rank,
        relations=M.matrix(),
    ).model_dump()


def cohomology_read(report: derham.CohomologyReport) -> dict:
    dims = list(report.dims) if report.dims is not None else None
    return CohomologyRead(dims=dims, chi=report.chi, provenance=report.provenance.value).model_dump()


# -- target resolution ---------------------------------------------------------------


class SessionContext:
    """Resolves declared names into the objects a handler needs."""

    def __init__(self, session: SessionInput) -> None:
        self.session = session

    def module(self, name: str) -> PresentedModule:
        if name in self.session.modules:
            return self.session.modules[name]
        if name in self.session.lattices:
            return self.integral(name).as_module()
        raise UnsupportedAmbient(f"{name!r} is not a module")

    def integral(self, name: str) -> IntegralPresentation:
        """Saturated lattice for a lattice name, or the avatar of a module name."""
        if name in self.session.lattices:
            return self.lattice(name).presentation()
        M = self.module(name)
        if M.ring_tag is RingTag.RATIONAL_FIELD:
            raise UnsupportedAmbient("integral commands need a module declared over QZ")
        return lattices.integral_presentation(M)

    def lattice(self, name: str) -> Lattice:
        decl = self.session.lattices.get(name)
        if decl is None:
            return Lattice.default(self.integral(name))
        ambient = lattices.make_lattice(lattices.integral_presentation(self.session.modules[decl.module_name]))
        if decl.generators is None:
            return Lattice.default(ambient)
        return Lattice(ambient, decl.generators)

    def complex(self, name: str) -> derham.PerfectComplexOverDVR:
        if name not in self.session.complexes:
            raise UnsupportedAmbient(f"{name!r} is not a complex")
        return self.session.complexes[name]


# -- handlers ---------------------------------------------------------------------------


def _gb(ctx: SessionContext, cmd: Command) -> Verdicts:
    M = ctx.module(cmd.target)
    G = modules.relation_basis(M)
    gens = [transpose_vector(g) for g in G.generators] if M.side is Side.RIGHT else list(G.generators)
    return {
        "size": len(G),
        "generators": [[str(e) for e in g.entries] for g in gens],
        "is_full_module": G.is_full_module(),
    }


def _nf(ctx: SessionContext, cmd: Command) -> Verdicts:
    M = ctx.module(cmd.target)
    v = cmd.args[0]
    G = modules.relation_basis(M)
    if M.side is Side.RIGHT:
        nf = transpose_vector(left_normal_form(transpose_vector(v), G))
    else:
        nf = left_normal_form(v, G)
    return {"normal_form": [str(e) for e in nf.entries], "is_member": nf.is_zero()}


def _dim(ctx: SessionContext, cmd: Command) -> Verdicts:
    M = ctx.module(cmd.target)
    return {"dimension": modules.hilbert_dimension(M), "ambient_dimension": 2 * M.ambient_n}


def _grade(ctx: SessionContext, cmd: Command) -> Verdicts:
    return {"grade": modules.grade(ctx.module(cmd.target))}


def _holonomic(ctx: SessionContext, cmd: Command) -> Verdicts:
    M = ctx.module(cmd.target)
    return {"minimal_dimension": modules.is_minimal_dimension(M), "grade": modules.grade(M)}


def _ext(ctx: SessionContext, cmd: Command) -> Verdicts:
    i = cmd.args[0]
    E = modules.ext(i, ctx.module(cmd.target))
    return {"index": i, "is_zero": modules.is_zero_module(E), "module": module_read(E)}


def _charcycle(ctx: SessionContext, cmd: Command) -> Verdicts:
    M = ctx.module(cmd.target)
    if modules.is_zero_module(M):
        return {"is_zero": True, "char_cycle": cycle_read(CharCycle())}
    return {"is_zero": False, "char_cycle": cycle_read(modules.char_cycle(M))}


def _dual(ctx: SessionContext, cmd: Command) -> Verdicts:
    D = modules.dual_star(ctx.module(cmd.target))
    return {"module": module_read(D), "grade": modules.grade(D)}


def _reduce(ctx: SessionContext, cmd: Command) -> Verdicts:
    report = lattices.reduce_mod_z(lattices.make_lattice(ctx.integral(cmd.target)))
    return {
        "is_zero": report.is_zero,
        "completed_module_zero": report.completed_module_zero,
        "minimal_dimension": report.minimal_dimension,
        "char_cycle": cycle_read(report.char_cycle),
        "reduction": module_read(report.reduced_module),
    }


def _holonomic_hat(ctx: SessionContext, cmd: Command) -> Verdicts:
    P = lattices.make_lattice(ctx.integral(cmd.target))
    report = lattices.reduce_mod_z(P)
    return {
        "minimal_dimension": lattices.minimal_dimension_via_reduction(P),
        "completed_module_zero": report.completed_module_zero,
    }


def _good_lattice(ctx: SessionContext, cmd: Command) -> Verdicts:
    L = lattices.good_lattice(ctx.integral(cmd.target))
    report = lattices.reduce_mod_z(L)
    return {
        "lattice": module_read(L.as_module()),
        "reduction_zero": report.is_zero,
        "char_cycle": cycle_read(report.char_cycle if not report.is_zero else CharCycle()),
    }


def _compare(ctx: SessionContext, cmd: Command) -> Verdicts:
    result = lattices.compare_lattices(
        ctx.lattice(cmd.target), ctx.lattice(cmd.args[0]), zpower=cmd.flags.get("zpower")
    )
    return {
        "equal": result.equal,
        "cycle_first": cycle_read(result.cycle_p),
        "cycle_second": cycle_read(result.cycle_q),
        "multiplicity_first": result.multiplicity_p,
        "multiplicity_second": result.multiplicity_q,
        "zpower_first_in_second": result.zpower_a,
        "zpower_second_in_first": result.zpower_b,
        "finite_length": result.finite_length,
    }


def _kunneth_term(term: lattices.KunnethTerm) -> dict:
    return {
        "is_zero": term.is_zero,
        "minimal_dimension": term.minimal_dimension,
        "char_cycle": cycle_read(term.char_cycle),
    }


def _kunneth(ctx: SessionContext, cmd: Command) -> Verdicts:
    report = lattices.kunneth_check(lattices.make_lattice(ctx.integral(cmd.target)), cmd.args[0])
    return {
        "index": report.index,
        "integral_ext_reduced": _kunneth_term(report.integral_ext_reduced),
        "ext_of_reduction": _kunneth_term(report.ext_of_reduction),
        "tor_term": _kunneth_term(report.tor_term),
        "zero_pattern_holds": report.zero_pattern_holds,
        "additivity_applicable": report.additivity_applicable,
        "additivity_holds": report.additivity_holds,
        "torsion_matches": report.torsion_matches,
    }


def _derham(ctx: SessionContext, cmd: Command) -> Verdicts:
    name = cmd.target
    if name in ctx.session.modules and ctx.session.modules[name].ring_tag is RingTag.RATIONAL_FIELD:
        M = ctx.session.modules[name]
        oracle = derham.chi_by_stabilization(M, cmd.flags.get("max_degree"), cmd.flags.get("window"))
        return {
            "cohomology": cohomology_read(derham.h_dr_n1(M)),
            "oracle_chi": oracle.chi,
            "oracle_stable": oracle.stable,
        }
    return {"cohomology": cohomology_read(derham.dims_of_reduction(ctx.integral(name)))}


def _chi(ctx: SessionContext, cmd: Command) -> Verdicts:
    return {"cohomology": cohomology_read(derham.chi_via_reduction(ctx.integral(cmd.target)))}


def _euler(ctx: SessionContext, cmd: Command) -> Verdicts:
    report = derham.euler_check_perfect(ctx.complex(cmd.target))
    return {
        "generic_dims": list(report.generic_dims),
        "special_dims": list(report.special_dims),
        "chi_generic": report.chi_generic,
        "chi_special": report.chi_special,
        "equal": report.equal,
        "alternating_rank_sum": report.alternating_rank_sum,
    }


def _bfunction(ctx: SessionContext, cmd: Command) -> Verdicts:
    b = derham.b_function_along_x(ctx.module(cmd.target))
    return {"b_function": str(b), "integer_roots": list(b.integer_roots)}


def _generic(ctx: SessionContext, cmd: Command) -> Verdicts:
    report = lattices.generic_fiber_diagnostic(ctx.integral(cmd.target))
    return {"label": report.label, "is_zero": report.is_zero, "grade": report.grade}


HANDLERS: Dict[str, Callable[[SessionContext, Command], Verdicts]] = {
    "gb": _gb,
    "nf": _nf,
    "dim": _dim,
    "grade": _grade,
    "holonomic": _holonomic,
    "ext": _ext,
    "charcycle": _charcycle,
    "dual": _dual,
    "reduce": _reduce,
    "holonomic-hat": _holonomic_hat,
    "good-lattice": _good_lattice,
    "compare-lattices": _compare,
    "kunneth": _kunneth,
    "derham": _derham,
    "chi": _chi,
    "euler-check": _euler,
    "bfunction": _bfunction,
    "generic": _generic,
}


def _summary(session: SessionInput) -> Verdicts:
    return {
        "ring": f"W({session.ambient_n}) over {session.ring_name}",
        "modules": {name: module_read(M) for name, M in session.modules.items()},
        "lattices": sorted(session.lattices),
        "complexes": {name: list(C.ranks) for name, C in session.complexes.items()},
    }


def _error_record(exc: WeylFiberError) -> ErrorRecord:
    return ErrorRecord(**exc.to_dict())


def run(session: SessionInput, stats: Optional[bool] = None) -> Report:
    """
    Execute the session's command.

    Returns
    -------
    Report
        ``exit_code`` 0 when a verdict was computed (false verdicts included),
        1 when an operation refused its input, 3 when the engine failed
        unexpectedly (logged with its traceback).
    """
    command = session.command
    echo = command.echo() if command else "summary"
    want_stats = get_settings().stats if stats is None else stats
    started = time.perf_counter()
    with collect_stats() as collected:
        try:
            if command is None:
                verdicts = _summary(session)
            else:
                verdicts = HANDLERS[command.subcommand](SessionContext(session), command)
            report = Report(command=echo, verdicts=exact(verdicts))
        except WeylFiberError as exc:
            logger.info("%s failed: %s", echo, exc)
            report = Report(command=echo, status="error", exit_code=exc.exit_code, error=_error_record(exc))
        except Exception as exc:
            logger.exception("%s crashed", echo)
            internal = InternalInvariant(f"{exc.__class__.__name__}: {exc}")
            report = Report(command=echo, status="error", exit_code=internal.exit_code, error=_error_record(internal))
    report.timing_ms = round((time.perf_counter() - started) * 1000.0, 3)
    if want_stats:
        report.stats = EngineStatsRead(**collected.as_dict())
    return report


def run_source(source: str, stats: Optional[bool] = None) -> Report:
    """Parse and run; parse failures become a report with exit code 2."""
    try:
        session = parse(source)
    except ParseError as exc:
        return Report(command="parse", status="error", exit_code=exc.exit_code, error=_error_record(exc))
    return run(session, stats=stats)
