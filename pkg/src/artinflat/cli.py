"""Command-line front end: run instance files and emit deterministic reports.

Instance file grammar (one statement per line, ``#`` starts a comment)::

    field 2
    ring A vars s : s^2
    ring B vars x : x^4
    map f A -> B : s -> x^2
    module M over B : free 1
    module N over B : coker [[x, 0], [x^2, x]]
    module K over B : actions [[[0,0],[1,0]]]
    check theorem1 f M

Exit codes: 0 all checks passed, 1 a check was falsified or a required
hypothesis failed, 2 input, parse or validation error.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .algebra import AlgebraMorphism, Element, FiniteLocalAlgebra
from .errors import ArtinflatError, HypothesisTwoViolated, ParseError, PreconditionFailed
from .invariants import edim, invariant_report, is_complete_intersection, wiebe_matrix
from .lemma import LemmaInstance, certificate_from_text, certificate_to_text, membership_certificate
from .linalg import FieldConfig
from .modules import FiniteModule, is_flat, is_weakly_torsion_free, restrict_scalars
from .presentation import Presentation, compile_presentation, parse_poly_list, parse_variables
from .report import Report, render
from .verifier import KINDS, check_desmit, check_theorem1, check_wtf_equiv_flat, sweep

MAX_P, MAX_DIM, MAX_N = 97, 256, 8

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """An error in the instance file, reported with its position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}" + (f", column {column}" if column else "") + ": " if line else ""
        super().__init__(where + message)


@dataclass
class Caps:
    p: int = MAX_P
    dim: int = MAX_DIM
    n: int = MAX_N

    @classmethod
    def from_flag(cls, unsafe: bool) -> Caps:
        return cls(p=2**31 - 1, dim=1 << 14, n=16) if unsafe else cls()


@dataclass
class Options:
    seed: int = 0
    trials: int = 1000
    mode: str = "exhaustive"
    timing: bool = False
    caps: Caps = field(default_factory=Caps)
    base_dir: Path = Path(".")


@dataclass
class Command:
    line: int
    name: str
    args: list[str]


@dataclass
class Session:
    options: Options
    prime_field: FieldConfig | None = None
    rings: dict[str, FiniteLocalAlgebra] = field(default_factory=dict)
    maps: dict[str, AlgebraMorphism] = field(default_factory=dict)
    modules: dict[str, tuple[FiniteModule, str]] = field(default_factory=dict)
    commands: list[Command] = field(default_factory=list)

    def _fresh(self, name: str, line: int):
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
            raise InputError(f"invalid name {name!r}", line)
        if name in self.rings or name in self.maps or name in self.modules:
            raise InputError(f"name {name!r} is already declared", line)

    def ring(self, name: str, line: int) -> FiniteLocalAlgebra:
        if name not in self.rings:
            raise InputError(f"unknown ring {name!r}", line)
        return self.rings[name]

    def module(self, name: str, line: int) -> tuple[FiniteModule, str]:
        if name not in self.modules:
            raise InputError(f"unknown module {name!r}", line)
        return self.modules[name]

    def morphism(self, name: str, line: int) -> AlgebraMorphism:
        if name not in self.maps:
            raise InputError(f"unknown morphism {name!r}", line)
        return self.maps[name]


# -- bracket helpers -----------------------------------------------------------

def split_top(text: str, sep: str = ",") -> list[str]:
    """Split at ``sep`` outside brackets and parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced brackets")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError("unbalanced brackets")
    out.append("".join(cur))
    return [s.strip() for s in out]


def split_args(text: str) -> list[str]:
    """Whitespace split that keeps bracketed groups together."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError("unbalanced brackets")
    if cur:
        out.append("".join(cur))
    return out


def parse_list(text: str) -> list[str]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"expected a bracketed list, got {text!r}")
    inner = text[1:-1].strip()
    return split_top(inner) if inner else []


def parse_matrix(text: str) -> list[list[str]]:
    return [parse_list(row) for row in parse_list(text)]


# -- file parsing ------------------------------------------------------------------

_RING_DECL = re.compile(r"^ring\s+(?P<name>\S+)\s+vars\s+(?P<vars>[^:]*?)\s*(?::(?P<rels>.*))?$")
_MAP_DECL = re.compile(r"^map\s+(?P<name>\S+)\s+(?P<src>\S+)\s*->\s*(?P<dst>\S+)\s*:(?P<images>.*)$")
_MODULE_DECL = re.compile(r"^module\s+(?P<name>\S+)\s+over\s+(?P<ring>\S+)\s*:\s*(?P<kind>\w+)\s*(?P<body>.*)$")


def load(text: str, options: Options) -> Session:
    s = Session(options)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            _statement(s, line, lineno, raw)
        except InputError:
            raise
        except ParseError as exc:
            raise InputError(exc.message, lineno, exc.column or None) from None
        except (ArtinflatError, ValueError) as exc:
            raise InputError(f"{type(exc).__name__}: {exc}", lineno) from None
    return s


def _statement(s: Session, line: str, lineno: int, raw: str):
    head = line.split(None, 1)[0]
    col = raw.find(line) + 1
    if head == "field":
        parts = line.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise InputError("expected 'field <p>'", lineno)
        if s.prime_field is not None:
            raise InputError("field declared twice", lineno)
        p = int(parts[1])
        if p > s.options.caps.p:
            raise InputError(f"p = {p} exceeds cap {s.options.caps.p} (use --unsafe-raise-caps)", lineno)
        s.prime_field = FieldConfig(p)
        return
    if head in ("ring", "map", "module") and s.prime_field is None:
        raise InputError("declare 'field <p>' before rings, maps and modules", lineno)
    if head == "ring":
        m = _RING_DECL.match(line)
        if not m:
            raise InputError("expected 'ring <Name> vars <v1,..,vn> : <rel1, ...>'", lineno)
        name = m.group("name")
        s._fresh(name, lineno)
        variables = parse_variables(m.group("vars"), lineno)
        if len(variables) > s.options.caps.n:
            raise InputError(f"{len(variables)} variables exceed cap {s.options.caps.n}", lineno)
        rels_text = m.group("rels") or ""
        rel_col = col - 1 + (m.start("rels") if m.group("rels") is not None else 0)
        rels = parse_poly_list(rels_text, variables, s.prime_field.p, line=lineno, column=rel_col)
        s.rings[name] = compile_presentation(Presentation(s.prime_field, variables, tuple(rels)), dim_cap=s.options.caps.dim)
        return
    if head == "map":
        m = _MAP_DECL.match(line)
        if not m:
            raise InputError("expected 'map <f> <A> -> <B> : <v1> -> <expr>, ...'", lineno)
        name = m.group("name")
        s._fresh(name, lineno)
        A, B = s.ring(m.group("src"), lineno), s.ring(m.group("dst"), lineno)
        images: dict[str, Element] = {}
        for item in split_top(m.group("images")):
            if not item:
                continue
            var, arrow, expr = item.partition("->")
            var = var.strip()
            if not arrow or var not in A.variables:
                raise InputError(f"expected '<variable of {m.group('src')}> -> <expr>', got {item!r}", lineno)
            if var in images:
                raise InputError(f"image of {var} given twice", lineno)
            images[var] = B.element(expr.strip())
        missing = [v for v in A.variables if v not in images]
        if missing:
            raise InputError(f"no image given for {', '.join(missing)}", lineno)
        s.maps[name] = AlgebraMorphism.from_images(A, B, [images[v] for v in A.variables])
        return
    if head == "module":
        m = _MODULE_DECL.match(line)
        if not m:
            raise InputError("expected 'module <M> over <R> : free <k> | coker [[...]] | actions [...]'", lineno)
        name = m.group("name")
        s._fresh(name, lineno)
        R = s.ring(m.group("ring"), lineno)
        kind, body = m.group("kind"), m.group("body").strip()
        if kind == "free":
            if not body.isdigit():
                raise InputError("expected 'free <rank>'", lineno)
            M = FiniteModule.free(R, int(body))
        elif kind == "coker":
            rows = parse_matrix(body)
            if not rows or any(len(r) != len(rows[0]) for r in rows):
                raise InputError("coker matrix must be a nonempty rectangular [[...], ...]", lineno)
            M = FiniteModule.cokernel(R, [[R.element(e) for e in row] for row in rows])
        elif kind == "actions":
            mats = [np.array([[int(c) for c in parse_list(r)] for r in parse_list(mat)], dtype=np.int64) for mat in parse_list(body)]
            M = FiniteModule.from_generator_actions(R, mats)
        else:
            raise InputError(f"unknown module kind {kind!r}", lineno)
        if M.dim > s.options.caps.dim:
            raise InputError(f"module dimension {M.dim} exceeds cap {s.options.caps.dim}", lineno)
        s.modules[name] = (M, m.group("ring"))
        return
    if head == "check":
        rest = line[len("check"):].strip()
        if not rest:
            raise InputError("expected 'check <subcommand> ...'", lineno)
        args = split_args(rest)
        s.commands.append(Command(lineno, args[0], args[1:]))
        _validate_command(s, s.commands[-1])
        return
    raise InputError(f"unknown statement {head!r}", lineno, col)


def _validate_command(s: Session, cmd: Command):
    arity = {
        "invariants": 1, "ci": 1, "wiebe": 1, "flat": 3, "wtf": 1, "theorem1": 2,
        "lemma-cert": 6, "verify-cert": 1, "sweep": 0, "desmit": 1, "wtf-equiv": 1,
    }
    if cmd.name not in arity:
        raise InputError(f"unknown subcommand {cmd.name!r}", cmd.line)
    pos = _positional(cmd)
    if len(pos) != arity[cmd.name]:
        raise InputError(f"{cmd.name} takes {arity[cmd.name]} arguments, got {len(pos)}", cmd.line)
    # resolve references now so that a bad name fails before any command runs
    kinds = {
        "invariants": "r", "ci": "r", "wiebe": "r", "wtf-equiv": "r", "wtf": "M",
        "theorem1": "fM", "desmit": "f", "flat": "M?*", "lemma-cert": "r???M?",
    }.get(cmd.name, "")
    for k, name in zip(kinds, pos):
        if k == "r":
            s.ring(name, cmd.line)
        elif k == "M":
            s.module(name, cmd.line)
        elif k == "f":
            s.morphism(name, cmd.line)
        elif k == "*" and name not in s.maps:
            s.ring(name, cmd.line)


def _flags(cmd: Command) -> dict[str, str | None]:
    out: dict[str, str | None] = {}
    args = cmd.args
    i = 0
    while i < len(args):
        a = args[i]
        if a.startswith("--"):
            if i + 1 < len(args) and not args[i + 1].startswith("--") and a not in ("--timing",):
                out[a[2:]] = args[i + 1]
                i += 2
                continue
            out[a[2:]] = None
        i += 1
    return out


def _positional(cmd: Command) -> list[str]:
    out, args, i = [], cmd.args, 0
    while i < len(args):
        if args[i].startswith("--"):
            i += 1 if args[i] == "--timing" or i + 1 >= len(args) or args[i + 1].startswith("--") else 2
            continue
        out.append(args[i])
        i += 1
    return out


# -- execution ---------------------------------------------------------------------

def execute(s: Session, out) -> int:
    status = EXIT_OK
    for cmd in s.commands:
        t0 = time.perf_counter()
        try:
            reports, ok = _run_command(s, cmd)
        except InputError:
            raise
        except (ArtinflatError, ValueError) as exc:
            raise InputError(f"{type(exc).__name__}: {exc}", cmd.line) from None
        if s.options.timing:
            reports[-1].add("elapsed_seconds", f"{time.perf_counter() - t0:.3f}")
        out.write(render(reports) + "\n")
        if not ok:
            status = EXIT_FALSIFIED
    return status


def _header(cmd: Command) -> list[tuple[str, str]]:
    return [("line", cmd.line), ("command", " ".join([cmd.name] + cmd.args))]


def _run_command(s: Session, cmd: Command) -> tuple[list[Report], bool]:
    pos, flags, line = _positional(cmd), _flags(cmd), cmd.line
    opts = s.options
    if cmd.name == "invariants":
        R = s.ring(pos[0], line)
        inv = invariant_report(R)
        r = Report("invariants").extend(_header(cmd)).extend([
            ("dim", inv.dim), ("edim", inv.edim), ("socle_dim", inv.socle_dim),
            ("nilpotency_index", inv.nilpotency_index), ("gorenstein", inv.is_gorenstein),
            ("ci", inv.is_ci), ("mu", inv.mu),
        ])
        return [r], True
    if cmd.name == "ci":
        R = s.ring(pos[0], line)
        ci, mu = is_complete_intersection(R)
        return [Report("ci").extend(_header(cmd)).extend([("ci", ci), ("mu", mu), ("edim", edim(R))])], True
    if cmd.name == "wiebe":
        R = s.ring(pos[0], line)
        W = wiebe_matrix(R)
        r = Report("wiebe").extend(_header(cmd))
        if W is None:
            r.add("matrix", None)
        else:
            r.add("u", [R.format(a) for a in W.u])
            r.add("matrix", "[" + ", ".join("[" + ", ".join(R.format(a) for a in row) + "]" for row in W.entries) + "]")
            r.add("det", R.format(W.det))
            r.add("verified", W.verify())
        return [r], True
    if cmd.name == "flat":
        M, ring_name = s.module(pos[0], line)
        if pos[1] != "over":
            raise InputError("expected 'flat <module> over <ring|morphism>'", line)
        target = pos[2]
        if target in s.maps:
            phi = s.maps[target]
            if phi.target is not M.parent:
                raise InputError(f"module {pos[0]} is not over the target of {target}", line)
            M = restrict_scalars(M, phi)
        elif s.ring(target, line) is not M.parent:
            raise InputError(f"module {pos[0]} is declared over {ring_name}, not {target}", line)
        v = is_flat(M)
        return [Report("flat").extend(_header(cmd)).extend([
            ("flat", v.is_flat), ("rank", v.rank), ("generators", v.generator_count), ("dim", v.dim),
        ])], True
    if cmd.name == "wtf":
        M, _ = s.module(pos[0], line)
        mode = flags.get("mode") or opts.mode
        trials = int(flags.get("trials") or opts.trials)
        seed = int(flags.get("seed") or opts.seed)
        v = is_weakly_torsion_free(M, mode, trials=trials, seed=seed)
        R = M.parent
        r = Report("wtf").extend(_header(cmd)).extend([("mode", v.mode), ("weakly_torsion_free", v.holds), ("certified", v.certified)])
        if v.mode == "sampled":
            r.extend([("trials", v.trials), ("seed", v.seed)])
        r.add("witness.lambda", R.format(v.witness[0]) if v.witness else None)
        r.add("witness.m", v.witness[1] if v.witness else None)
        return [r], True
    if cmd.name == "theorem1":
        phi = s.morphism(pos[0], line)
        M, _ = s.module(pos[1], line)
        if M.parent is not phi.target:
            raise InputError(f"module {pos[1]} is not over the target of {pos[0]}", line)
        rep = check_theorem1(phi, M)
        return [rep.to_report(**dict(_header(cmd)))], rep.verdict == "Pass"
    if cmd.name == "desmit":
        phi = s.morphism(pos[0], line)
        budget = int(flags.get("count") or 200)
        rep = check_desmit(phi, budget, seed=int(flags.get("seed") or opts.seed))
        return [rep.to_report(**dict(_header(cmd)))], not rep.violations
    if cmd.name == "wtf-equiv":
        R = s.ring(pos[0], line)
        mode = flags.get("mode") or "equivalence"
        rep = check_wtf_equiv_flat(R, int(flags.get("count") or 20), seed=int(flags.get("seed") or opts.seed), mode=mode)
        return [rep.to_report(**dict(_header(cmd)))], not rep.disagreements
    if cmd.name == "lemma-cert":
        return _lemma_cert(s, cmd, pos, flags)
    if cmd.name == "verify-cert":
        path = Path(pos[0])
        if not path.is_absolute():
            path = opts.base_dir / path
        r, ok = verify_cert_report(path, _header(cmd))
        return [r], ok
    if cmd.name == "sweep":
        return _sweep_reports(flags, opts, _header(cmd))
    raise InputError(f"unknown subcommand {cmd.name!r}", line)


def _lemma_cert(s: Session, cmd: Command, pos, flags):
    line = cmd.line
    B = s.ring(pos[0], line)
    try:
        x = [B.element(e) for e in parse_list(pos[1])]
        u = [B.element(e) for e in parse_list(pos[2])]
        W = [[B.element(e) for e in row] for row in parse_matrix(pos[3])]
        m_coords = [int(c) for c in parse_list(pos[5])]
    except ValueError as exc:
        raise InputError(str(exc), line) from None
    M, _ = s.module(pos[4], line)
    if M.parent is not B:
        raise InputError(f"module {pos[4]} is not over {pos[0]}", line)
    if len(x) > s.options.caps.n:
        raise InputError(f"n = {len(x)} exceeds cap {s.options.caps.n} (use --unsafe-raise-caps)", line)
    if len(m_coords) != M.dim:
        raise InputError(f"module vector has {len(m_coords)} coordinates, module dimension is {M.dim}", line)
    inst = LemmaInstance(B, x, u, W, M)
    r = Report("lemma_cert").extend(_header(cmd)).extend([("n", inst.n), ("delta", B.format(inst.delta))])
    try:
        cert = membership_certificate(inst, np.array(m_coords))
    except PreconditionFailed as exc:
        r.extend([("status", "PreconditionFailed"), ("detail", str(exc))])
        return [r], False
    except HypothesisTwoViolated as exc:
        r.extend([("status", "HypothesisTwoViolated"), ("level", exc.level), ("subset", list(exc.subset)),
                  ("relation", [list(map(int, c)) for c in exc.relation])])
        return [r], False
    r.add("status", "certified")
    r.add("b", [list(map(int, v)) for v in cert.b])
    r.add("verified", cert.verify())
    out = flags.get("out")
    if out:
        path = Path(out)
        if not path.is_absolute():
            path = s.options.base_dir / path
        path.write_text(certificate_to_text(cert))
        r.add("certificate", out)
    return [r], cert.verify()


def verify_cert_report(path: Path, header) -> tuple[Report, bool]:
    cert = certificate_from_text(path.read_text())
    ok = cert.verify()
    r = Report("verify_cert").extend(header).extend([("n", cert.instance.n), ("trace_entries", len(cert.trace)), ("valid", ok)])
    return r, ok


def _sweep_reports(flags, opts: Options, header):
    kind = flags.get("kind")
    if kind is None:
        raise ValueError("sweep needs --kind")
    if kind not in KINDS or kind == "user_file":
        raise ValueError(f"sweep kind must be one of {', '.join(KINDS[:-1])}")
    seed = int(flags.get("seed") if flags.get("seed") is not None else opts.seed)
    count = int(flags.get("count") or 100)
    res = sweep(kind, seed, count)
    summary = res.summary(timing=False)
    summary.items[:0] = [(k, str(v)) for k, v in header]
    return res.reports + [summary], res.violations == 0


# -- argparse entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled modes and sweeps")
    common.add_argument("--trials", type=int, default=1000, help="trials for sampled weak torsion-freeness")
    common.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive", help="weak torsion-freeness search mode")
    common.add_argument("--timing", action="store_true", help="add elapsed times to reports")
    common.add_argument("--unsafe-raise-caps", action="store_true", help="lift the p, dimension and matrix-size caps")

    ap = argparse.ArgumentParser(prog="artinflat", description="Exact checks for finite local algebras, flatness and complete intersections.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run an instance file")
    run.add_argument("file")
    vc = sub.add_parser("verify-cert", parents=[common], help="verify a membership certificate file")
    vc.add_argument("file")
    sw = sub.add_parser("sweep", parents=[common], help="run a seeded theorem sweep")
    sw.add_argument("--kind", required=True, choices=KINDS[:-1])
    sw.add_argument("--count", type=int, default=100)
    return ap


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    opts = Options(seed=args.seed, trials=args.trials, mode=args.mode, timing=args.timing,
                   caps=Caps.from_flag(args.unsafe_raise_caps))
    try:
        if args.command == "run":
            path = Path(args.file)
            try:
                text = path.read_text()
            except OSError as exc:
                raise InputError(f"cannot read {path}: {exc.strerror}") from None
            opts.base_dir = path.parent
            try:
                session = load(text, opts)
                return execute(session, out)
            except InputError as exc:
                raise InputError(f"{path}: {exc}") from None
        if args.command == "verify-cert":
            try:
                r, ok = verify_cert_report(Path(args.file), [("file", args.file)])
            except OSError as exc:
                raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
            except (ArtinflatError, ValueError) as exc:
                raise InputError(f"{args.file}: {type(exc).__name__}: {exc}") from None
            out.write(render([r]) + "\n")
            return EXIT_OK if ok else EXIT_FALSIFIED
        if args.command == "sweep":
            res = sweep(args.kind, args.seed, args.count)
            out.write(render(res.reports + [res.summary(timing=args.timing)]) + "\n")
            return EXIT_OK if res.violations == 0 else EXIT_FALSIFIED
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
