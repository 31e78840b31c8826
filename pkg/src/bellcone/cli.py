"""Command-line driver.

Every subcommand prints its result in the v1 text formats (or one JSON
document with ``--json``).  Exit codes: 0 ok, 1 a precondition or
membership violation (with a certificate), 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import cone as cone_mod
from . import lifting, scenario, symmetry
from .tensor import (CorrelationTensor, DimensionMismatch, FormatError,
                     FunctionalTensor, dumps_tensor, format_rational,
                     format_word, loads_tensor, pair)

EXIT = {"ok": 0, "violation": 1, "error": 2}


@dataclass
class CommandResult:
    status: str
    text: str = ""
    payload: dict = field(default_factory=dict)
    timing: float = 0.0  # milliseconds
    note: str | None = None  # one-line summary for stderr
    output_path: str | None = None
    as_json: bool = False

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# JSON helpers

def _q(v) -> str:
    return format_rational(Fraction(v))


def tensor_json(t) -> dict:
    return {"variance": t.variance, "n": t.n,
            "entries": {format_word(w): _q(v) for w, v in t.items() if v}}


def cone_json(c) -> dict:
    vecs = c.generators if isinstance(c, cone_mod.ConeVRep) else c.facet_functionals
    out = {"rep": "V" if isinstance(c, cone_mod.ConeVRep) else "H",
           "dim": c.ambient_dim, "vectors": [[_q(v) for v in vec] for vec in vecs]}
    if isinstance(c, cone_mod.ConeVRep) and c.lineality:
        out["lineality"] = [[_q(v) for v in vec] for vec in c.lineality]
    return out


# ---------------------------------------------------------------------------
# input

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _tensor(path: str, kind=None):
    t = loads_tensor(_read(path))
    if kind is not None and not isinstance(t, kind):
        want = "upper (a box)" if kind is CorrelationTensor else "lower (an inequality)"
        raise UsageError(f"{path}: expected variance {want}")
    return t


def _cone(path: str):
    return cone_mod.loads_cone(_read(path))


def _involution(text: str | None, n: int):
    if text is None:
        return None
    try:
        return symmetry.Involution(symmetry.parse_spec(text, n))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands

def cmd_scenario(a) -> CommandResult:
    n = a.n
    info = {"n": n, "dim": 3**n, "deterministic_boxes": 4**n, "positivity_constraints": 4**n,
            "group_order": symmetry.group_order(n)}
    text = "\n".join(f"{k}={v}" for k, v in info.items()) + "\n"
    return CommandResult("ok", text, info)


def cmd_dualize(a) -> CommandResult:
    t = _tensor(a.file)
    out = scenario.dualize(t)
    return CommandResult("ok", dumps_tensor(out), {"tensor": tensor_json(out)})


def cmd_pair(a) -> CommandResult:
    f = _tensor(a.functional, FunctionalTensor)
    x = _tensor(a.box, CorrelationTensor)
    v = pair(f, x)
    status = "ok" if v >= 0 else "violation"
    return CommandResult(status, f"value={_q(v)}\n", {"value": _q(v)})


def cmd_probabilities(a) -> CommandResult:
    x = _tensor(a.file, CorrelationTensor)
    table = scenario.probabilities(x)
    lines, rows = [], []
    for (s, t), p in table.items():
        lines.append(f"s={format_word(s)} t={format_word(t)} p={_q(p)}")
        rows.append({"s": format_word(s), "t": format_word(t), "p": _q(p)})
    status = "ok" if all(p >= 0 for p in table.values()) else "violation"
    return CommandResult(status, "\n".join(lines) + "\n", {"probabilities": rows})


def _scenario_cone(kind: str, n: int):
    return scenario.bell_cone(n) if kind == "bell" else scenario.ns_cone(n)


def cmd_membership(a) -> CommandResult:
    x = _tensor(a.file, CorrelationTensor)
    m = cone_mod.membership(_scenario_cone(a.scenario, x.n), x.entries)
    payload = {"member": m.member, "scenario": a.scenario}
    text = f"member={'true' if m.member else 'false'}\n"
    if not m.member:
        cert = FunctionalTensor(x.n, m.certificate)
        payload["certificate"] = tensor_json(cert)
        payload["value"] = _q(pair(cert, x))
        text += f"certificate value={_q(pair(cert, x))}\n" + dumps_tensor(cert)
    return CommandResult("ok" if m.member else "violation", text, payload)


def cmd_extreme(a) -> CommandResult:
    t = _tensor(a.file)
    if isinstance(t, CorrelationTensor):
        c, what = scenario.ns_cone(t.n), "extreme ray of NS"
    else:
        c, what = cone_mod.dual_vrep_to_hrep(scenario.bell_cone(t.n)), "facet of B"
    if not cone_mod.membership(c, t.entries):
        return CommandResult("violation", f"{what}: not in the cone\n",
                             {"extreme": False, "member": False})
    ok = cone_mod.is_extreme_ray(c, t.entries)
    r = cone_mod.tight_rank(c, t.entries)
    text = f"extreme={'true' if ok else 'false'} tight_rank={r} dim={3**t.n}\n"
    return CommandResult("ok" if ok else "violation", text,
                         {"extreme": ok, "tight_rank": r, "dim": 3**t.n})


def _guard_long(a, n):
    if n >= 3 and not a.allow_long:
        raise UsageError(f"n={n} enumeration takes minutes; pass --allow-long")


def _orbit_summary(c, n):
    orbits = symmetry.classify_orbits(c, n)
    return [o.size for o in orbits]


def cmd_enumerate(a) -> CommandResult:
    n = a.n
    _guard_long(a, n)
    if a.scenario == "ns":
        c = cone_mod.enumerate_rays(scenario.ns_cone(n), progress=a.allow_long)
        label = "rays"
    else:
        c = cone_mod.enumerate_rays(cone_mod.dual_vrep_to_hrep(scenario.bell_cone(n)),
                                    progress=a.allow_long)
        label = "facets"
    sizes = _orbit_summary(c, n)
    summary = f"{label}={len(c)} orbits={len(sizes)} sizes={','.join(map(str, sizes))}"
    return CommandResult("ok", cone_mod.dumps_cone(c),
                         {"cone": cone_json(c), "count": len(c), "orbit_sizes": sizes,
                          "summary": summary}, note=summary)


def cmd_dual(a) -> CommandResult:
    c = _cone(a.file)
    if isinstance(c, cone_mod.ConeVRep):
        if c.ambient_dim >= 27 and not a.allow_long:
            raise UsageError("dual of a 27-dimensional cone takes minutes; pass --allow-long")
        out = cone_mod.enumerate_rays(cone_mod.dual_vrep_to_hrep(c), progress=a.allow_long)
    else:
        out = cone_mod.hrep_as_vrep(cone_mod.remove_redundant(c))
    return CommandResult("ok", cone_mod.dumps_cone(out), {"cone": cone_json(out)})


def cmd_classify(a) -> CommandResult:
    c = _cone(a.file)
    if c.ambient_dim != 3**a.n:
        raise UsageError(f"cone dimension {c.ambient_dim} does not match n={a.n}")
    vecs = c.generators if isinstance(c, cone_mod.ConeVRep) else c.facet_functionals
    orbits = symmetry.classify_orbits(vecs, a.n)
    cls = CorrelationTensor if a.variance == "upper" else FunctionalTensor
    lines, rows = [], []
    out_dir = Path(a.output) if a.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for k, o in enumerate(orbits, 1):
        rep = " ".join(str(v) for v in o.representative)
        lines.append(f"orbit {k} size={o.size} rep={rep}")
        rows.append({"orbit": k, "size": o.size,
                     "representative": [str(v) for v in o.representative]})
        if out_dir:
            (out_dir / f"orbit-{k:03d}.tensor").write_text(dumps_tensor(cls(a.n, o.representative)))
    lines.append(f"total={sum(o.size for o in orbits)} orbits={len(orbits)}")
    return CommandResult("ok", "\n".join(lines) + "\n", {"orbits": rows})


def cmd_lift(a) -> CommandResult:
    try:
        if a.kind == "box":
            if a.kappa is None:
                if len(a.files) != 2:
                    raise UsageError("lift box without --kappa needs two files: x y")
                x = _tensor(a.files[0], CorrelationTensor)
                y = _tensor(a.files[1], CorrelationTensor)
                z = lifting.extend_box(x, y, _involution(a.iota, x.n))
            else:
                if len(a.files) != 1:
                    raise UsageError("lift box with --kappa needs one file: w")
                w = _tensor(a.files[0], CorrelationTensor)
                z = lifting.extend_box2(w, _involution(a.iota, w.n), _involution(a.kappa, w.n))
        else:
            if a.kappa is None or len(a.files) != 1:
                raise UsageError("lift ineq needs --iota, --kappa and one file")
            f = _tensor(a.files[0], FunctionalTensor)
            z = lifting.extend_inequality(f, _involution(a.iota, f.n), _involution(a.kappa, f.n))
    except lifting.ExtensionError as exc:
        payload = {"condition": exc.condition, "message": str(exc)}
        text = f"failed: {exc}\n"
        extra = None
        if exc.certificate is not None:
            extra = FunctionalTensor(_n_of(exc.certificate), exc.certificate)
            payload["certificate"] = tensor_json(extra)
        elif exc.residual is not None:
            extra = exc.residual
            payload["residual"] = tensor_json(extra)
        if extra is not None:
            text += dumps_tensor(extra)
        return CommandResult("violation", text, payload)
    return CommandResult("ok", dumps_tensor(z), {"tensor": tensor_json(z)})


def _n_of(vec) -> int:
    n, size = 0, 1
    while size < len(vec):
        size *= 3
        n += 1
    return n


def cmd_mk(a) -> CommandResult:
    f = lifting.mermin_klyshko(a.n)
    return CommandResult("ok", dumps_tensor(f), {"tensor": tensor_json(f)})


def cmd_ww(a) -> CommandResult:
    x = _tensor(a.file, CorrelationTensor)
    r = lifting.ww_zb_local_test(x)
    text = (f"local={'true' if r.local else 'false'} value={_q(r.value)} bound={_q(r.bound)}\n"
            + dumps_tensor(r.facet))
    return CommandResult("ok" if r.local else "violation", text,
                         {"local": r.local, "value": _q(r.value), "bound": _q(r.bound),
                          "facet": tensor_json(r.facet)})


def _fixture(name: str):
    base, _, arg = name.partition(":")
    simple = {
        "gyni": lifting.gyni_box, "pr": scenario.pr_box, "chsh": scenario.chsh_functional,
        "box40": scenario.box40, "ineq17": scenario.ineq17_functional,
    }
    if base in simple and not arg:
        return simple[base]()
    try:
        if base == "isotropic":
            return lifting.isotropic_box(Fraction(arg))
        if base == "all-ones":
            return scenario.all_ones_box(int(arg))
        if base == "noise":
            return scenario.noise_box(int(arg))
        if base == "mk":
            return lifting.mermin_klyshko(int(arg))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad fixture argument in {name!r}") from exc
    raise UsageError(f"unknown fixture {name!r}; choose from gyni, pr, chsh, box40, ineq17, "
                     "isotropic:<c>, all-ones:<n>, noise:<n>, mk:<n>")


def cmd_fixtures(a) -> CommandResult:
    t = _fixture(a.name)
    return CommandResult("ok", dumps_tensor(t), {"tensor": tensor_json(t)})


def cmd_counts(a) -> CommandResult:
    v, f, eq = scenario.duality_count_obstruction(a.n, a.k, a.l)
    text = f"vertices={v} facets={f} duality={'true' if eq else 'false'}\n"
    return CommandResult("ok", text, {"vertices": v, "facets": f, "duality": eq})


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellcone",
                                description="Exact Bell / no-signaling cone tools for (n,2,2) scenarios.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("scenario", cmd_scenario, "dimensions and counts of an (n,2,2) scenario")
    sp.add_argument("-n", type=int, required=True)
    sp = add("dualize", cmd_dualize, "lower a box to an inequality or raise an inequality to a box")
    sp.add_argument("file")
    sp = add("pair", cmd_pair, "evaluate an inequality on a box")
    sp.add_argument("functional")
    sp.add_argument("box")
    sp = add("probabilities", cmd_probabilities, "outcome probabilities P(t|s) of a box")
    sp.add_argument("file")
    sp = add("membership", cmd_membership, "exact membership of a box in B_n or NS_n")
    sp.add_argument("file")
    sp.add_argument("--scenario", choices=("bell", "ns"), default="bell")
    sp = add("extreme", cmd_extreme, "extremality of a box in NS_n or an inequality in (B_n)*")
    sp.add_argument("file")
    sp = add("enumerate", cmd_enumerate, "extreme rays of NS_n or facets of B_n")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--scenario", choices=("bell", "ns"), default="ns")
    sp.add_argument("--allow-long", action="store_true")
    sp = add("dual", cmd_dual, "dual cone of a cone file, as generators")
    sp.add_argument("file")
    sp.add_argument("--allow-long", action="store_true")
    sp = add("classify", cmd_classify, "symmetry orbits of the vectors in a cone file")
    sp.add_argument("file")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--variance", choices=("upper", "lower"), default="upper",
                    help="variance of representatives written with -o DIR")
    sp = add("lift", cmd_lift, "extend a box or an inequality by one party")
    sp.add_argument("kind", choices=("box", "ineq"))
    sp.add_argument("files", nargs="+")
    sp.add_argument("--iota", required=True, help="e.g. 'swap(1),flip(2,-1)'")
    sp.add_argument("--kappa")
    sp = add("mk", cmd_mk, "Mermin-Klyshko functional")
    sp.add_argument("-n", type=int, required=True)
    sp = add("ww-test", cmd_ww, "full-correlation locality test")
    sp.add_argument("file")
    sp = add("fixtures", cmd_fixtures, "print a named box or inequality")
    sp.add_argument("name")
    sp = add("counts", cmd_counts, "deterministic points vs positivity facets in (n,k,l)")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-k", type=int, default=2)
    sp.add_argument("-l", type=int, default=2)
    return p


def run(argv=None) -> CommandResult:
    parser = build_parser()
    a = parser.parse_args(argv)
    # for classify, -o names the directory of representative files
    out_target = None if a.command == "classify" else a.output
    start = time.perf_counter()
    try:
        res = a.func(a)
    except (UsageError, FormatError, DimensionMismatch, ValueError) as exc:
        res = CommandResult("error", f"error: {exc}\n", {"error": str(exc)})
    res.timing = (time.perf_counter() - start) * 1000
    res.output_path = out_target if res.status != "error" else None
    res.as_json = a.json
    return res


def main(argv=None) -> int:
    res = run(argv)
    if res.as_json:
        body = json.dumps({"status": res.status, **res.payload}, sort_keys=True, indent=1) + "\n"
    else:
        body = res.text
    if res.status == "error":
        sys.stderr.write(res.text)
        if res.as_json:
            sys.stdout.write(body)
        return res.exit_code
    if res.note:
        sys.stderr.write(res.note + "\n")
    if res.output_path:
        Path(res.output_path).write_text(body)
    else:
        sys.stdout.write(body)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
