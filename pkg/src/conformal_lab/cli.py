"""Command line front end: ``conformal-lab <command> FILE [options]``.

Exit status is 0 when every requested predicate holds, 1 when one fails and 2
for unreadable input or unmet preconditions.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .algebra import (
    adjoint_module,
    alpha_power_adjoint,
    center,
    check_algebra,
    check_module,
    semidirect_sum,
)
from .cohomology import (
    cochain_space_basis,
    cohomology_dims,
    differential,
    is_cochain,
    partial_action,
    random_cochain,
)
from .deformation import (
    check_deformation,
    d_minus1_of_endo,
    deform,
    find_nijenhuis,
    is_nijenhuis,
    is_trivial_deformation,
    nijenhuis_bracket,
    nijenhuis_residuals,
)
from .derivations import commutator, in_span, is_alpha_k_derivation, solve_derivations
from .errors import ConformalLabError
from .fileformat import DefinitionFile, parse_definition, parse_endo, print_definition
from .generalized import (
    SPACES,
    _predicate,
    bracket_closure_checks,
    breve_extension,
    centroid_qc_center_check,
    compute_complement,
    decompose_gder,
    is_quasicentroid,
    is_quasiderivation,
    phi_embedding,
    qc_bracket_vanishing,
    solve_space,
    tower_report,
)

THREADS_ENV = "CONFORMAL_LAB_THREADS"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report assembly


class Report:
    def __init__(self, command: str, args):
        self.data: dict = {"command": command, "degree_bound": args.degree_bound, "seed": args.seed}
        self.checks: dict = {}
        self.failures: dict = {}
        self.requested: list = []

    def add(self, name: str, ok: bool, requested: bool = True) -> None:
        self.checks[name] = bool(ok)
        if requested and name not in self.requested:
            self.requested.append(name)

    def merge(self, rep, names, prefix: str = "", requested: bool = True) -> None:
        for n in names:
            self.add(prefix + n, rep.results[n], requested)
            if n in rep.failures:
                self.failures[prefix + n] = rep.failures[n]

    @property
    def ok(self) -> bool:
        return all(self.checks[n] for n in self.requested)

    def as_dict(self) -> dict:
        out = dict(self.data)
        out["checks"] = self.checks
        out["requested"] = sorted(self.requested)
        out["failures"] = self.failures
        out["ok"] = self.ok
        return out


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _render_text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines += _render_text(v, indent + 1)
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def emit(report: Report, fmt: str) -> int:
    payload = report.as_dict()
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False))
    else:
        print("\n".join(_render_text(payload)))
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_definition(args) -> DefinitionFile:
    path = args.algebra_opt or args.algebra
    if not path:
        raise UsageError("an algebra file is required (positional or --algebra)")
    return parse_definition(_read(path))


def load_endo(path: str, A):
    return parse_endo(_read(path), A)


_ALPHA_POWER = re.compile(r"^alpha\^(-?\d+)$")


def resolve_module(defn: DefinitionFile, spec: str):
    A = defn.algebra
    if spec == "adjoint":
        return adjoint_module(A)
    m = _ALPHA_POWER.match(spec)
    if m:
        return alpha_power_adjoint(A, int(m.group(1)))
    if spec in defn.modules:
        return defn.modules[spec]
    known = ", ".join(["adjoint", "alpha^s", *sorted(defn.modules)])
    raise UsageError(f"unknown module {spec!r} (known: {known})")


def _maps(maps, A) -> list:
    return [m.describe(A.names) for m in maps]


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, report: Report) -> None:
    A = load_definition(args).algebra
    rep = check_algebra(A)
    names = ["skew", "hom_jacobi", "multiplicative"]
    report.merge(rep, names)
    report.add("regular", rep.results["regular"], requested=args.regular)
    report.data["algebra"] = {"name": A.name, "rank": A.rank, "basis": list(A.names)}


def _module_checks(defn, spec, report: Report, prefix: str = ""):
    M = resolve_module(defn, spec)
    rep = check_module(defn.algebra, M)
    report.merge(rep, ["action_jacobi", "sesquilinearity", "twist_compatibility"], prefix)
    report.data["module"] = spec
    return M


def cmd_check_module(args, report: Report) -> None:
    _module_checks(load_definition(args), args.module, report)


def cmd_semidirect(args, report: Report) -> None:
    defn = load_definition(args)
    M = _module_checks(defn, args.module, report, "module.")
    S = semidirect_sum(defn.algebra, M)
    report.merge(check_algebra(S), ["skew", "hom_jacobi", "multiplicative"], "sum.")
    report.data["definition"] = print_definition(DefinitionFile(S))


def cmd_cohomology(args, report: Report) -> None:
    defn = load_definition(args)
    A = defn.algebra
    M = _module_checks(defn, args.module, report, "module.")
    n, bound = args.n, args.degree_bound
    dims = cohomology_dims(A, M, n, bound, reduced=args.reduced)
    report.data["dims"] = dims.as_dict()
    samples = list(cochain_space_basis(A, M, n, bound))
    samples.append(random_cochain(A, M, n, bound, args.seed))
    d_sq = d_partial = d_cochain = True
    for g in samples:
        dg = differential(g)
        d_sq &= differential(dg).table == {}
        d_partial &= differential(partial_action(g)) == partial_action(dg)
        d_cochain &= is_cochain(dg)
    report.add("d_squared_zero", d_sq)
    report.add("d_commutes_with_partial", d_partial)
    report.add("d_image_is_cochain", d_cochain)


def cmd_derive(args, report: Report) -> None:
    A = load_definition(args).algebra
    k, bound = args.k, args.degree_bound
    basis = solve_derivations(A, k, bound)
    report.data["level"] = k
    report.data["dimension"] = len(basis)
    report.data["basis"] = _maps(basis, A)
    if args.check_closure:
        ok = all(is_alpha_k_derivation(A, commutator(a, b), 2 * k) for a in basis for b in basis)
        report.add("commutator_closure", ok)
    if args.endo:
        D_ = load_endo(args.endo, A).map
        report.add("endo_is_derivation", is_alpha_k_derivation(A, D_, k))
        report.add("endo_in_solved_span", in_span(D_, basis), requested=False)


def cmd_nijenhuis(args, report: Report) -> None:
    A = load_definition(args).algebra
    if args.endo:
        f = load_endo(args.endo, A).map.images
        report.add("nijenhuis", is_nijenhuis(A, f))
        report.data["n_bracket"] = {
            f"{A.names[i]} {A.names[j]}": A.fmt(nijenhuis_bracket(A, f, i, j))
            for i in range(A.rank) for j in range(A.rank)
        }
        report.data["residuals"] = {
            f"{A.names[i]} {A.names[j]}": A.fmt(v)
            for (i, j), v in sorted(nijenhuis_residuals(A, f).items())
        }
    else:
        found = find_nijenhuis(A, args.degree_bound, seed=args.seed)
        report.data["found"] = [c.describe() for c in found]


def cmd_deform(args, report: Report) -> None:
    A = load_definition(args).algebra
    if args.endo:
        f = load_endo(args.endo, A).map.images
        report.add("nijenhuis", is_nijenhuis(A, f))
        cob = d_minus1_of_endo(A, f)
        report.add("coboundary_matches_n_bracket", cob.matches_nijenhuis_bracket)
        psi = cob.psi
        rep = check_deformation(A, psi)
        report.merge(rep, ["cocycle", "quadratic", "jacobi_per_t"])
        report.add("trivial", is_trivial_deformation(A, f))
    else:
        psi = random_cochain(A, alpha_power_adjoint(A, -1), 2, args.degree_bound, args.seed)
        rep = check_deformation(A, psi)
        report.merge(rep, ["cocycle", "quadratic", "jacobi_per_t"], requested=False)
    report.merge(
        rep, ["t1_equals_first_order_defect", "t1_equals_specialized_coboundary", "t2_equals_quadratic_defect"]
    )
    report.data["psi"] = psi.describe()
    At = deform(A, psi)
    report.data["deformed_bracket"] = {
        f"{A.names[i]} {A.names[j]}": A.fmt(At.table[i][j]) for i in range(A.rank) for j in range(A.rank)
    }


def cmd_gder(args, report: Report) -> None:
    A = load_definition(args).algebra
    k, bound = args.k, args.degree_bound
    s = k if args.s is None else args.s
    tower = tower_report(A, k, bound)
    report.data["dims"] = tower.results["dims"]
    report.data["level"] = k
    report.merge(tower, [n for n in tower.results if n != "dims"])
    if args.decompose:
        ok = True
        for e in solve_space(A, "GDer", k, bound).elements:
            dec = decompose_gder(A, (e.map,) + tuple(e.witnesses), k)
            ok &= is_quasiderivation(A, dec.quasi, dec.quasi_witness, k)
            ok &= is_quasicentroid(A, dec.qc, k)
        report.add("decomposition", ok)
    if args.closures:
        rep = bracket_closure_checks(A, k, s, bound)
        report.merge(rep, list(rep.results))
    if args.center_checks:
        rep = centroid_qc_center_check(A, k, s, bound)
        report.merge(rep, ["values_central", "zero_when_center_trivial"])
        report.data["center_dim"] = rep.results["center_dim"]
        report.data["centroid_qc_pairs"] = rep.results["pairs"]
        if not center(A, bound):
            rep = qc_bracket_vanishing(A, k, s, bound)
            report.merge(rep, ["implication"], "qc_commutators.")
            report.merge(rep, ["closure", "all_commutators_zero"], "qc_commutators.", requested=False)
    if args.endo:
        spec = load_endo(args.endo, A)
        which = args.expect or "GDer"
        need = {"GDer": 2, "QDer": 1}.get(which, 0)
        if len(spec.witnesses) < need:
            raise UsageError(f"{which} membership needs {need} witness map(s) in the endo file")
        report.add(f"endo_in_{which}", _predicate(A, which, spec.map, spec.witnesses[:need], k))


def cmd_breve(args, report: Report) -> None:
    A = load_definition(args).algebra
    B = breve_extension(A)
    report.merge(check_algebra(B), ["skew", "hom_jacobi", "multiplicative"])
    report.data["definition"] = print_definition(DefinitionFile(B))
    if args.phi:
        spec = load_endo(args.phi, A)
        if spec.witness is None:
            raise UsageError("--phi needs an endo file with an [endo witness] section")
        comp = compute_complement(A, args.degree_bound)
        phi = phi_embedding(A, spec.map, spec.witness, comp)
        report.add("phi_is_derivation", is_alpha_k_derivation(B, phi, spec.map.level))
        report.data["phi"] = phi.describe(B.names)


COMMANDS = {
    "validate": (cmd_validate, "check skew-symmetry, Hom-Jacobi and multiplicativity"),
    "check-module": (cmd_check_module, "check the module axioms"),
    "semidirect": (cmd_semidirect, "build and check the semidirect sum with a module"),
    "cohomology": (cmd_cohomology, "truncated cohomology dimensions"),
    "derive": (cmd_derive, "solve for alpha^k-derivations"),
    "nijenhuis": (cmd_nijenhuis, "test or search for Nijenhuis operators"),
    "deform": (cmd_deform, "first-order deformation checks"),
    "gder": (cmd_gder, "generalized derivation tower"),
    "breve": (cmd_breve, "the t/t^2 extension and the phi embedding"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("algebra", nargs="?", help="algebra definition file")
    common.add_argument("--algebra", dest="algebra_opt", metavar="FILE", help="algebra definition file")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--degree-bound", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="conformal-lab", description="Exact checks for Hom-Lie conformal algebras.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, h) in COMMANDS.items()}

    p["validate"].add_argument("--regular", action="store_true", help="also require alpha to be invertible")
    for name in ("check-module", "semidirect", "cohomology"):
        p[name].add_argument("--module", default="adjoint", help="adjoint, alpha^s or a module section name")
    p["cohomology"].add_argument("--n", type=int, default=1)
    p["cohomology"].add_argument("--reduced", action="store_true")
    for name in ("derive", "gder"):
        p[name].add_argument("--k", type=int, default=0)
    p["derive"].add_argument("--check-closure", action="store_true")
    for name in ("derive", "nijenhuis", "deform", "gder"):
        p[name].add_argument("--endo", metavar="FILE")
    p["gder"].add_argument("--s", type=int, default=None, help="level of the second factor (default: k)")
    p["gder"].add_argument("--decompose", action="store_true")
    p["gder"].add_argument("--closures", action="store_true")
    p["gder"].add_argument("--center-checks", action="store_true")
    p["gder"].add_argument("--expect", choices=SPACES, help="space the --endo map should belong to")
    p["breve"].add_argument("--phi", metavar="ENDO_FILE")
    return parser


def check_threads_env() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    if not re.fullmatch(r"\s*\d+\s*", raw) or int(raw) < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return int(raw)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        check_threads_env()
        if args.degree_bound < 0:
            raise UsageError("--degree-bound must be nonnegative")
        report = Report(args.command, args)
        COMMANDS[args.command][0](args, report)
    except (UsageError, ConformalLabError, OSError, ValueError) as exc:
        print(f"conformal-lab: error: {exc}", file=sys.stderr)
        return 2
    return emit(report, args.format)


if __name__ == "__main__":
    sys.exit(main())
