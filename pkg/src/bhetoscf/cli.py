"""Command-line entry point.

Subcommands: ``scf``, ``optimize``, ``reproduce-table {1|2|3}`` and
``integrals``.  Settings come from built-in defaults, then an optional flat
``key = value`` file (``--config`` or the ``BHETOSCF_CONFIG`` environment
variable), then command-line flags, later sources winning.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from dataclasses import dataclass, fields
from importlib import resources

import numpy as np

from .basis import BasisSpec, basis_functions
from .errors import ConvergenceError, DegenerateBasisError, DomainError
from .integrals import tables_for
from .optimize import optimize_double_zeta, optimize_single_zeta
from .scf import AtomSystem, ScfSettings, scf_solve

CONFIG_ENV = "BHETOSCF_CONFIG"

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

ELEMENTS = ("H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar")

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁺⁻", "0123456789+-")


class UsageError(Exception):
    """Bad command line or configuration; maps to exit status 2."""


def atom_to_Z(symbol: str) -> int:
    """Nuclear charge for 'He', 'Li+', 'C4+', 'Ne⁸⁺' and the like.

    A charge suffix, when present, must describe a two-electron ion.
    """
    text = symbol.strip().translate(_SUPERSCRIPTS)
    m = re.fullmatch(r"([A-Z][a-z]?)(\d*)([+-]?)", text)
    if not m or m.group(1) not in ELEMENTS:
        raise UsageError(f"unknown atom symbol {symbol!r}")
    Z = ELEMENTS.index(m.group(1)) + 1
    if m.group(3):
        charge = int(m.group(2) or 1) * (1 if m.group(3) == "+" else -1)
        if charge != Z - 2:
            raise UsageError(f"{symbol!r} is not a two-electron ion (charge should be {Z - 2:+d})")
    elif m.group(2):
        raise UsageError(f"malformed atom symbol {symbol!r}")
    return Z


def ion_label(Z: float) -> str:
    if float(Z).is_integer() and 1 <= Z <= len(ELEMENTS):
        sym = ELEMENTS[int(Z) - 1]
        charge = int(Z) - 2
        return sym if charge == 0 else f"{sym}{'' if charge == 1 else charge}{'+' if charge > 0 else '-'}"
    return f"Z={Z:g}"


def parse_dz(text: str) -> tuple:
    """'n1:z1,n2:z2' -> ((n1, z1), (n2, z2))."""
    pairs = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 2:
            raise UsageError(f"--dz expects n1:z1,n2:z2, got {text!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"--dz expects numbers, got {item!r}") from None
    return tuple(pairs)


def format_dz(pairs) -> str:
    return ",".join(f"{n!r}:{z!r}" for n, z in pairs)


@dataclass(frozen=True)
class RunConfig:
    command: str = "scf"
    Z: float | None = None
    atom: str | None = None
    q: int = 1
    nu: float = 1.0
    zeta: float | None = None
    alpha: float = 0.0
    dz: tuple | None = None
    mode: str = "free"
    out: str = "pretty"
    verify: bool = False
    grouped: bool = False
    table: int | None = None
    extended: bool = False
    max_iter: int = 200
    tol_energy: float = 1e-13
    tol_density: float = 1e-12
    damping: float = 0.0
    lindep_threshold: float = 1e-10

    def scf_settings(self) -> ScfSettings:
        return ScfSettings(self.max_iter, self.tol_energy, self.tol_density, self.damping, self.lindep_threshold)

    def resolved_Z(self) -> float:
        z_atom = atom_to_Z(self.atom) if self.atom else None
        if self.Z is None and z_atom is None:
            raise UsageError("give the nuclear charge with --Z or --atom")
        if self.Z is not None and z_atom is not None and float(z_atom) != self.Z:
            raise UsageError(f"--Z {self.Z:g} contradicts --atom {self.atom}")
        Z = float(self.Z if self.Z is not None else z_atom)
        if not 1 <= Z <= 120:
            raise UsageError("nuclear charge must lie in [1, 120]")
        return Z

    def basis_spec(self) -> BasisSpec:
        try:
            if self.dz is not None:
                return BasisSpec.double_zeta(self.dz)
            if self.zeta is None:
                raise UsageError("single-zeta runs need --zeta (or give --dz)")
            return BasisSpec.single_zeta(self.q, self.nu, self.zeta, self.alpha)
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def dump(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "dz":
                v = format_dz(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {
    "command": str,
    "Z": float,
    "atom": str,
    "q": int,
    "nu": float,
    "zeta": float,
    "alpha": float,
    "dz": "dz",
    "mode": str,
    "out": str,
    "verify": bool,
    "grouped": bool,
    "table": int,
    "extended": bool,
    "max_iter": int,
    "tol_energy": float,
    "tol_density": float,
    "damping": float,
    "lindep_threshold": float,
}

_CHOICES = {
    "command": ("scf", "optimize", "reproduce-table", "integrals"),
    "mode": ("free", "integer"),
    "out": ("pretty", "csv"),
    "table": (1, 2, 3),
}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "dz":
        return parse_dz(raw)
    if kind is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    value = kind(raw)
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ValueError(f"expected one of {_CHOICES[key]}, got {raw!r}")
    return value


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; '#' starts a comment.  Returns a field dict."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise UsageError(f"{source}:{lineno}: unknown field {key!r}")
        try:
            values[key] = _convert(key, raw)
        except (ValueError, UsageError) as exc:
            raise UsageError(f"{source}:{lineno}: field {key!r}: {exc}") from None
    return values


def config_from_text(text: str, source: str = "<config>") -> RunConfig:
    return RunConfig(**parse_config_text(text, source))


# ---------------------------------------------------------------- formatting


def format_energy(x: float, grouped: bool = False, digits: int = 17) -> str:
    """Fixed notation with ``digits`` significant digits; optionally 5-digit groups after the point."""
    if not math.isfinite(x):
        return str(x)
    text = np.format_float_positional(x, precision=digits, unique=False, fractional=False, trim="k")
    return _group(text) if grouped else text


def _group(text: str) -> str:
    head, _, tail = text.partition(".")
    return head + "." + " ".join(tail[i : i + 5] for i in range(0, len(tail), 5)) if tail else head


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_energy(float(x))


def _write_csv(header, rows, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)


def _basis_label(spec: BasisSpec) -> str:
    k = spec.kind
    if hasattr(k, "q"):
        return f"single-zeta BH-ETO, q = {k.q}, nu = {k.nu!r}, zeta = {k.zeta!r}, alpha = {k.alpha!r}"
    return "NSTO " + ", ".join(f"(n* = {n!r}, zeta = {z!r})" for n, z in k.pairs)


_SCF_HEADER = ["Z", "e_total", "e_one", "e_coulomb", "t_kin", "v_ne", "v_ee", "virial_ratio", "orbital_energy", "iterations", "converged"]


def _scf_row(Z, res):
    return [f"{Z:g}", _num(res.e_total), _num(res.e_one), _num(res.e_coulomb), _num(res.t_kin), _num(res.v_ne),
            _num(res.v_ee), _num(res.virial_ratio), _num(res.orbital_energy), _num(res.iterations), _num(res.converged)]


def _print_scf(Z, spec, res, cfg, out):
    g = cfg.grouped
    out.write(f"system          {ion_label(Z)} (Z = {Z:g})\n")
    out.write(f"basis           {_basis_label(spec)}\n")
    out.write(f"E_total         {format_energy(res.e_total, g)}\n")
    out.write(f"  one-electron  {format_energy(res.e_one, g)}\n")
    out.write(f"  Coulomb       {format_energy(res.e_coulomb, g)}\n")
    out.write(f"  kinetic       {format_energy(res.t_kin, g)}\n")
    out.write(f"  nuclear       {format_energy(res.v_ne, g)}\n")
    out.write(f"  repulsion     {format_energy(res.v_ee, g)}\n")
    out.write(f"virial ratio    {format_energy(res.virial_ratio, g)}\n")
    out.write(f"orbital energy  {format_energy(res.orbital_energy, g)}\n")
    out.write(f"iterations      {res.iterations} ({'converged' if res.converged else 'NOT converged'})\n")


# ---------------------------------------------------------------- commands


def cmd_scf(cfg: RunConfig, out=sys.stdout) -> int:
    Z = cfg.resolved_Z()
    spec = cfg.basis_spec()
    res = scf_solve(AtomSystem(Z), tables_for(spec, Z), cfg.scf_settings())
    if cfg.out == "csv":
        _write_csv(_SCF_HEADER, [_scf_row(Z, res)], out)
    else:
        _print_scf(Z, spec, res, cfg, out)
    return EXIT_OK if res.converged else EXIT_NUMERICAL


def cmd_optimize(cfg: RunConfig, out=sys.stdout) -> int:
    Z = cfg.resolved_Z()
    settings = cfg.scf_settings()
    if cfg.dz is not None:
        start = tuple(v for pair in cfg.dz for v in pair)
        if len(start) != 4:
            raise UsageError("double-zeta optimization needs exactly two n*:zeta pairs")
        n1, z1, n2, z2 = start
        res = optimize_double_zeta(Z, starts=[(n1, n2, z1, z2)], settings=settings)
        p = res.params()
        spec = BasisSpec.double_zeta([(p["n1"], p["zeta1"]), (p["n2"], p["zeta2"])])
    else:
        res = optimize_single_zeta(Z, cfg.q, cfg.alpha, cfg.mode, settings)
        p = res.params()
        spec = BasisSpec.single_zeta(cfg.q, p.get("nu", 1.0), p["zeta"], cfg.alpha)
    if cfg.out == "csv":
        header = ["Z", *res.names, "evaluations", "opt_converged", *_SCF_HEADER[1:]]
        row = [f"{Z:g}", *(_num(v) for v in res.best_params), _num(res.evaluations), _num(res.converged), *_scf_row(Z, res.scf)[1:]]
        _write_csv(header, [row], out)
    else:
        out.write("optimum         " + ", ".join(f"{k} = {format_energy(v)}" for k, v in p.items()) + "\n")
        out.write(f"evaluations     {res.evaluations} ({'converged' if res.converged else 'NOT converged'})\n")
        _print_scf(Z, spec, res.scf, cfg, out)
    return EXIT_OK if (res.converged and res.scf.converged) else EXIT_NUMERICAL


def load_table_rows() -> list[dict]:
    """The bundled benchmark records (digit groups joined, empty fields kept as '')."""
    text = resources.files("bhetoscf").joinpath("data/reference_energies.csv").read_text(encoding="utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        for k, v in r.items():
            r[k] = v.replace(" ", "") if v else ""
    return rows


def evaluate_table_row(row: dict, settings: ScfSettings = ScfSettings()):
    """ScfResult at a record's tabulated parameters."""
    Z = float(row["Z"])
    if row["mode"] == "dz":
        spec = BasisSpec.double_zeta([(float(row["n1"]), float(row["zeta1"])), (float(row["n2"]), float(row["zeta2"]))])
    else:
        spec = BasisSpec.single_zeta(int(row["q"]), float(row["n1"]), float(row["zeta1"]))
    return scf_solve(AtomSystem(Z), tables_for(spec, Z), settings)


REPRODUCE_HEADER = ["table", "row_id", "q_or_atom", "mode", "E_paper", "E_computed", "abs_diff", "pass"]


def cmd_reproduce_table(cfg: RunConfig, out=sys.stdout) -> int:
    if cfg.table not in (1, 2, 3):
        raise UsageError("reproduce-table needs a table number 1, 2 or 3")
    rows = [r for r in load_table_rows() if r["table"] == str(cfg.table) and r["mode"] != "limit"]
    if not cfg.extended:
        rows = [r for r in rows if r["scope"] == "core"]
    records = []
    for r in rows:
        e_ref = float(r["e_ref"])
        try:
            res = evaluate_table_row(r, cfg.scf_settings())
            e, virial = res.e_total, res.virial_ratio
            ok = res.converged and abs(e - e_ref) <= float(r["tol"])
        except (DomainError, ConvergenceError, DegenerateBasisError):
            e, virial, ok = math.nan, math.nan, False
        label = r["system"] if r["mode"] == "dz" else f"{r['system']} q={r['q']}" if cfg.table == 2 else r["q"]
        records.append((r, label, e_ref, e, virial, ok))
    if cfg.out == "csv":
        _write_csv(
            REPRODUCE_HEADER,
            [[r["table"], r["row_id"], label, r["mode"], r["e_ref"], _num(e), f"{abs(e - e_ref):.3e}", _num(ok)]
             for r, label, e_ref, e, virial, ok in records],
            out,
        )
    else:
        g = cfg.grouped
        out.write(f"table {cfg.table}: energies at the tabulated parameters\n")
        for r, label, e_ref, e, virial, ok in records:
            ref_text = _group(r["e_ref"]) if g else r["e_ref"]
            line = f"{r['row_id']:>9} {label:>10} {r['mode']:>8}  ref {ref_text:>26}  got {format_energy(e, g):>26}  |d| {abs(e - e_ref):.2e}"
            if r["virial_ref"]:
                line += f"  virial {format_energy(virial, g, 12)} (ref {r['virial_ref']})"
            out.write(line + ("" if ok else "  <-- outside tolerance") + "\n")
        n_bad = sum(not rec[-1] for rec in records)
        out.write(f"{len(records) - n_bad}/{len(records)} rows within tolerance\n")
    return EXIT_OK


INTEGRALS_HEADER = ["kind", "i", "j", "k", "l", "value"]
VERIFY_HEADER = INTEGRALS_HEADER + ["oracle", "rel_diff"]
VERIFY_TOL = 1e-9


def _unique_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1)]


def cmd_integrals(cfg: RunConfig, out=sys.stdout) -> int:
    """Dump S, T, Vne and the unique (ij|kl); with --verify add oracle values.

    The relative difference is taken against the Cauchy-Schwarz scale
    sqrt(|M_ii M_jj|) (sqrt((ij|ij)(kl|kl)) for repulsion integrals) so
    entries that vanish by orthogonality are judged sensibly.
    """
    from . import oracle

    Z = cfg.resolved_Z()
    spec = cfg.basis_spec()
    tab = tables_for(spec, Z)
    funcs = basis_functions(spec)
    n = tab.n
    rows, worst = [], 0.0
    mats = (("S", tab.S), ("T", tab.T), ("V", tab.Vne))
    refs = {
        "S": lambda i, j: oracle.overlap_quadrature(funcs[i], funcs[j]),
        "T": lambda i, j: oracle.kinetic_quadrature(funcs[i], funcs[j]),
        "V": lambda i, j: oracle.nuclear_quadrature(funcs[i], funcs[j], Z),
    }
    for kind, M in mats:
        for i, j in _unique_pairs(n):
            row = [kind, str(i), str(j), "", "", _num(M[i, j])]
            if cfg.verify:
                ref = refs[kind](i, j)
                rel = abs(M[i, j] - ref) / math.sqrt(abs(M[i, i] * M[j, j]))
                worst = max(worst, rel)
                row += [_num(ref), f"{rel:.3e}"]
            rows.append(row)
    pairs = _unique_pairs(n)
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs[: a + 1]:
            row = ["eri", str(i), str(j), str(k), str(l), _num(tab.eri[i, j, k, l])]
            if cfg.verify:
                ref = oracle.eri_quadrature(funcs[i], funcs[j], funcs[k], funcs[l])
                rel = abs(tab.eri[i, j, k, l] - ref) / math.sqrt(tab.eri[i, j, i, j] * tab.eri[k, l, k, l])
                worst = max(worst, rel)
                row += [_num(ref), f"{rel:.3e}"]
            rows.append(row)
    if cfg.out == "csv" or cfg.verify:
        _write_csv(VERIFY_HEADER if cfg.verify else INTEGRALS_HEADER, rows, out)
    else:
        for row in rows:
            idx = ",".join(x for x in row[1:5] if x)
            out.write(f"{row[0]:>3}[{idx}] = {row[5]}\n")
    if cfg.verify and worst > VERIFY_TOL:
        sys.stderr.write(f"oracle disagreement {worst:.2e} exceeds {VERIFY_TOL:g}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {
    "scf": cmd_scf,
    "optimize": cmd_optimize,
    "reproduce-table": cmd_reproduce_table,
    "integrals": cmd_integrals,
}


# ---------------------------------------------------------------- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help=f"key=value settings file (default: ${CONFIG_ENV})")
    p.add_argument("--Z", type=float, help="nuclear charge")
    p.add_argument("--atom", help="ion symbol such as He, Li+, C4+")
    p.add_argument("--q", type=int, help="number of BH-ETOs in the single-zeta family")
    p.add_argument("--nu", type=float, help="fractional quantum number nu")
    p.add_argument("--zeta", type=float, help="orbital exponent")
    p.add_argument("--alpha", type=float, help="weight parameter alpha")
    p.add_argument("--dz", help="two NSTOs as n1:z1,n2:z2")
    p.add_argument("--mode", choices=_CHOICES["mode"], help="free or integer nu when optimizing")
    p.add_argument("--out", choices=_CHOICES["out"], help="output format")
    p.add_argument("--grouped", action="store_const", const=True, help="group decimals in fives")
    p.add_argument("--verify", action="store_const", const=True, help="compare integrals against quadrature")
    p.add_argument("--extended", action="store_const", const=True, help="include table rows beyond q = 13")
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--tol-energy", dest="tol_energy", type=float)
    p.add_argument("--tol-density", dest="tol_density", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--dump-config", action="store_true", help="print the merged configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bhetoscf", description="Hartree-Fock-Roothaan energies of two-electron ions over BH-ETO and NSTO bases.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("scf", "single SCF calculation"),
        ("optimize", "optimize the nonlinear basis parameters"),
        ("reproduce-table", "recompute a benchmark table"),
        ("integrals", "dump (and optionally verify) integral tables"),
    ):
        p = sub.add_parser(name, help=help_text)
        if name == "reproduce-table":
            p.add_argument("table", type=int, choices=_CHOICES["table"])
        _add_common(p)
    return parser


def resolve_config(argv) -> tuple[RunConfig, bool]:
    args = build_parser().parse_args(argv)
    values = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
        values.update(parse_config_text(text, path))
    flags = vars(args)
    for key in _FIELD_TYPES:
        if key in ("command", "dz"):
            continue
        if flags.get(key) is not None:
            values[key] = flags[key]
    if args.dz is not None:
        values["dz"] = parse_dz(args.dz)
    values["command"] = args.command
    if args.command == "reproduce-table":
        values["table"] = args.table
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return cfg, args.dump_config


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg, dump = resolve_config(argv)
        if dump:
            out.write(cfg.dump())
            return EXIT_OK
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        sys.stderr.write(f"bhetoscf: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ConvergenceError, DegenerateBasisError, FloatingPointError) as exc:
        sys.stderr.write(f"bhetoscf: numerical failure: {exc}\n")
        return EXIT_NUMERICAL


__all__ = [
    "RunConfig",
    "UsageError",
    "atom_to_Z",
    "parse_dz",
    "parse_config_text",
    "config_from_text",
    "format_energy",
    "load_table_rows",
    "evaluate_table_row",
    "cmd_scf",
    "cmd_optimize",
    "cmd_reproduce_table",
    "cmd_integrals",
    "build_parser",
    "resolve_config",
    "main",
]
