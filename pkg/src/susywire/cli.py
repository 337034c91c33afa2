"""Command-line front end.

Commands: ``spectrum``, ``multiplet``, ``verify``, ``fd`` and ``transform``.
Exit codes: 0 all checks pass, 1 a verification gate failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fdsolver import Grid, assemble_H, convergence_study, eigen_all, exact_sector_levels, physical_levels
from .multiplets import (
    ConstructionError,
    broken_susy_report,
    build_multiplet,
    ladder_coefficient_check,
    spectrum_table,
    state_checks,
    uniqueness_check,
)
from .operators import SectorParams, hamiltonian_composed, hamiltonian_direct, susy_A_apply, susy_Adag_apply
from .trigring import HalfInt, TrigPoly
from .transforms import RadialFunction, coupled_residual, hankel_roundtrip_error, hankel_values, momentum_spinor

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_rational(r: Fraction):
    return r.numerator if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def _halfint(text: str) -> HalfInt:
    try:
        return HalfInt.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a half-integer of the form p/2") from None


def _half_odd(text: str) -> HalfInt:
    value = _halfint(text)
    if not value.is_half_odd:
        raise argparse.ArgumentTypeError(f"{text!r} must be half-odd (1/2, 3/2, ...)")
    return value


def _positive_half_odd(text: str) -> HalfInt:
    value = _half_odd(text)
    if value.twice < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def _n_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None
    if any(v < 2 for v in values):
        raise argparse.ArgumentTypeError("grid sizes must be at least 2")
    return values


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} must be positive and finite")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return value


@dataclass(frozen=True)
class RunConfig:
    command: str
    j: HalfInt | None = None
    jz: HalfInt | None = None
    jmax: HalfInt | None = None
    sign: str | None = None
    G: float = 1.0
    k: int = 0
    L: float = 1.0
    n: tuple[int, ...] | None = None
    levels: int | None = None
    format: str = "csv"
    out: str | None = None
    tol: float = 1e-10

    @property
    def sign_symbol(self) -> str:
        return "+" if self.sign == "plus" else "-"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="susywire", description="Neutron bound to a current-carrying wire: exact and numeric spectra.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--tol", type=_positive_float, default=1e-10)
    common.add_argument("--G", type=_positive_float, default=1.0, help="coupling constant")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="energy levels up to --jmax")
    p.add_argument("--jmax", type=_positive_half_odd, required=True)
    p.add_argument("--k", type=int, default=0, help="longitudinal wave number index")
    p.add_argument("--L", type=_positive_float, default=1.0, help="wire period length")

    p = sub.add_parser("multiplet", parents=[common], help="exact states of one multiplet")
    p.add_argument("--j", type=_positive_half_odd, required=True)

    p = sub.add_parser("verify", parents=[common], help="run the verification suites")
    p.add_argument("--jmax", type=_positive_half_odd, default=HalfInt(5))
    p.add_argument("--n", type=_n_list, default=None, help="grid size for the isospectrality check")

    p = sub.add_parser("fd", parents=[common], help="finite-difference convergence table")
    p.add_argument("--jz", type=_half_odd, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--levels", type=_positive_int, default=3)
    p.add_argument("--n", type=_n_list, default=[512, 1024, 2048, 4096])

    p = sub.add_parser("transform", parents=[common], help="momentum-space residuals of one state")
    p.add_argument("--j", type=_positive_half_odd, required=True)
    p.add_argument("--jz", type=_half_odd, required=True)
    return parser


def parse_config(argv: Sequence[str] | None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if isinstance(fields.get("n"), list):
        fields["n"] = tuple(fields["n"])
    cfg = RunConfig(**fields)
    if cfg.command == "transform" and abs(cfg.jz) > cfg.j:
        parser.error(f"--jz {cfg.jz} lies outside multiplet j={cfg.j}")
    return cfg


# output helpers


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(payload) -> str:
    return json.dumps(payload, indent=None, separators=(",", ":")) + "\n"


# commands


def cmd_spectrum(cfg: RunConfig) -> tuple[int, str]:
    rows = spectrum_table(cfg.jmax, cfg.G, cfg.k, cfg.L)
    if cfg.format == "json":
        payload = [
            {"j": str(r.j), "epsilon": fmt_rational(r.epsilon), "E_tilde": r.E_tilde, "E_total": r.E_total, "degeneracy": r.degeneracy}
            for r in rows
        ]
        return EXIT_OK, _json_text(payload)
    body = [[str(r.j), str(fmt_rational(r.epsilon)), fmt_float(r.E_tilde), fmt_float(r.E_total), r.degeneracy] for r in rows]
    return EXIT_OK, _csv_text(["j", "epsilon", "E_tilde", "E_total", "degeneracy"], body)


def _serialize_poly(p: TrigPoly) -> list[dict]:
    return [{"num": str(c.numerator), "den": str(c.denominator), "a2": a2, "b2": b2} for a2, b2, c in p.raw_terms]


def cmd_multiplet(cfg: RunConfig) -> tuple[int, str]:
    try:
        m = build_multiplet(cfg.j)
    except ConstructionError as exc:
        return EXIT_FAIL, f"construction failed: {exc}\n"
    states = []
    all_pass = m.degeneracy == cfg.j.twice + 1
    for jz in sorted(m.states, reverse=True):
        Z = m.states[jz]
        checks = state_checks(Z, m.j, m.epsilon)
        all_pass &= all(checks.values())
        states.append(
            {
                "jz": str(jz),
                "upper": _serialize_poly(Z.upper),
                "lower": _serialize_poly(Z.lower),
                "checks": {name: "pass" if ok else "fail" for name, ok in checks.items()},
            }
        )
    if cfg.format == "json":
        text = _json_text({"j": str(m.j), "epsilon": fmt_rational(m.epsilon), "degeneracy": m.degeneracy, "states": states})
    else:
        rows = [
            [s["jz"], comp, t["num"], t["den"], t["a2"], t["b2"]]
            for s in states
            for comp in ("upper", "lower")
            for t in s[comp]
        ]
        text = _csv_text(["jz", "component", "num", "den", "a2", "b2"], rows)
    return (EXIT_OK if all_pass else EXIT_FAIL), text


def _random_poly(rng: random.Random) -> TrigPoly:
    terms = {}
    for _ in range(rng.randint(1, 3)):
        a2 = rng.randrange(-1, 9, 2) if rng.random() < 0.5 else rng.randrange(0, 9, 2)
        b2 = rng.randrange(-1, 9, 2) if rng.random() < 0.5 else rng.randrange(0, 9, 2)
        terms[(a2, b2)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 7))
    return TrigPoly(terms)


def _verify_lines(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    out: list[tuple[str, bool, str]] = []
    tol = cfg.tol
    tol_text = format(tol, "g")

    def gate(dev: float) -> tuple[bool, str]:
        ok = dev < tol
        return ok, f"dev<{tol_text}" if ok else f"dev={dev:.3e}"

    for twice in range(1, cfg.jmax.twice + 1, 2):
        j = HalfInt(twice)
        try:
            m = build_multiplet(j)
        except ConstructionError as exc:
            out.append((f"multiplet[j={j}]", False, str(exc)))
            continue
        checks = {jz: state_checks(Z, j, m.epsilon) for jz, Z in m.states.items()}
        eigen_names = ("H_eigen", "casimir", "jz_eigen", "H_is_casimir_plus_quarter")
        ok = m.degeneracy == twice + 1 and all(all(c[k] for k in eigen_names) for c in checks.values())
        out.append((f"multiplet[j={j}]", ok, f"states={m.degeneracy}"))
        comm = ("comm_plus_minus", "comm_z_plus", "comm_z_minus")
        out.append((f"commutators[j={j}]", all(all(c[k] for k in comm) for c in checks.values()), ""))
        prods = ("prod_minus_plus", "prod_plus_minus")
        out.append((f"products[j={j}]", all(all(c[k] for k in prods) for c in checks.values()), ""))
        uniq = uniqueness_check(m)
        out.append((f"uniqueness[j={j}]", all(uniq.values()), f"sectors={len(uniq)}"))
        for lc in ladder_coefficient_check(m):
            ok, detail = gate(lc.deviation)
            out.append((f"ladder_coeff[{j},{lc.jz}]", ok, detail))
        for jz in sorted(m.states, reverse=True):
            r1, r2 = coupled_residual(momentum_spinor(m.states[jz], j, cfg.G), cfg.G)
            ok, detail = gate(max(r1, r2))
            out.append((f"transform_residual[{j},{jz}]", ok, detail))

    rng = random.Random(20240611)
    for twice in (1, -1, 3, -3, 5, -5):
        jz = HalfInt(twice)
        ok = True
        for _ in range(20):
            p = _random_poly(rng)
            for sign in ("+", "-"):
                params = SectorParams(jz, sign)
                ok &= hamiltonian_composed(params, p) == hamiltonian_direct(params, p)
            ok &= susy_A_apply(jz, susy_Adag_apply(jz, p)) - susy_Adag_apply(jz, susy_A_apply(jz, p)) == hamiltonian_direct(
                SectorParams(jz, "+"), p
            ) - hamiltonian_direct(SectorParams(jz, "-"), p)
        out.append((f"factorization[jz={jz}]", ok, "samples=20"))

    for G in (0.5, 1.0, 2.0):
        rows = spectrum_table(cfg.jmax, G)
        dev = max(abs(r.E_tilde / (-(G * G) / (2 * float(r.epsilon))) - 1) for r in rows)
        ok = all(r.epsilon == (r.j.value + Fraction(1, 2)) ** 2 and r.degeneracy == r.j.twice + 1 for r in rows) and dev <= 1e-15
        out.append((f"spectrum[G={fmt_float(G)}]", ok, f"rows={len(rows)}"))

    for twice in range(-cfg.jmax.twice, cfg.jmax.twice + 1, 2):
        rep = broken_susy_report(HalfInt(twice))
        out.append((f"broken_susy[jz={HalfInt(twice)}]", rep.broken, ""))

    n = (cfg.n or (1024,))[0]
    for twice in (1, 3):
        jz = HalfInt(twice)
        grid = Grid(n)
        lo = eigen_all(assemble_H(jz, "-", grid))
        hi = eigen_all(assemble_H(jz, "+", grid))
        dev = float(np.max(np.abs(hi[1:] - lo) / np.abs(lo)))
        ok = dev <= max(tol, 1e-10)
        out.append((f"fd_isospectral[jz={jz},n={n}]", ok, f"dev<{format(max(tol, 1e-10), 'g')}" if ok else f"dev={dev:.3e}"))

    for twice, levels in ((1, 3), (3, 1)):
        jz = HalfInt(twice)
        study = convergence_study(jz, "-", levels, [512, 1024, 2048, 4096])
        exact = exact_sector_levels(jz, "-", levels)
        dev = float(np.max(np.abs(study.extrapolated - exact)))
        out.append((f"fd_extrapolated[jz={jz}]", dev <= 1e-2, f"dev={dev:.3e}"))

    p = np.array([0.0, 0.5, 1.0, 2.0, 5.0])
    g = hankel_values(lambda r: np.exp(-r), 0, p)
    dev = float(np.max(np.abs(g / (1 + p * p) ** -1.5 - 1)))
    out.append(("hankel_closed_form[nu=0]", dev <= 1e-6, f"dev={dev:.3e}"))
    f = RadialFunction.from_callable(lambda r: r * np.exp(-r * r), np.logspace(-1, math.log10(4), 16), 1)
    dev = hankel_roundtrip_error(f)
    out.append(("hankel_roundtrip[nu=1]", dev <= 1e-6, f"dev={dev:.3e}"))
    return out


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    lines = _verify_lines(cfg)
    text = "".join(f"CHECK {name} {'PASS' if ok else 'FAIL'}{' ' + detail if detail else ''}\n" for name, ok, detail in lines)
    return (EXIT_OK if all(ok for _, ok, _ in lines) else EXIT_FAIL), text


def cmd_fd(cfg: RunConfig) -> tuple[int, str]:
    n_list = list(cfg.n)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise _UsageError("--n must be strictly ascending")
    exact = exact_sector_levels(cfg.jz, cfg.sign_symbol, cfg.levels)
    eig = np.array([physical_levels(cfg.jz, cfg.sign_symbol, Grid(n), cfg.levels) for n in n_list])
    rows = []
    ok = True
    for lev in range(cfg.levels):
        prev = None
        for idx, n in enumerate(n_list):
            err = abs(float(eig[idx, lev]) - exact[lev])
            order = ""
            if prev is not None:
                p_n, p_err = prev
                if err > 0 and p_err > 0:
                    order = fmt_float(math.log(p_err / err) / math.log(n / p_n))
                ok &= err < p_err
            rows.append({"n": n, "level": lev, "eigenvalue": float(eig[idx, lev]), "error": err, "order": order})
            prev = (n, err)
    if cfg.format == "json":
        payload = [{**r, "order": float(r["order"]) if r["order"] else None} for r in rows]
        text = _json_text(payload)
    else:
        body = [[r["n"], r["level"], fmt_float(r["eigenvalue"]), fmt_float(r["error"]), r["order"]] for r in rows]
        text = _csv_text(["n", "level", "eigenvalue", "error", "order"], body)
    return (EXIT_OK if ok else EXIT_FAIL), text


def cmd_transform(cfg: RunConfig) -> tuple[int, str]:
    m = build_multiplet(cfg.j)
    r1, r2 = coupled_residual(momentum_spinor(m.states[cfg.jz], cfg.j, cfg.G), cfg.G)
    ok = max(r1, r2) <= cfg.tol
    if cfg.format == "json":
        text = _json_text([{"jz": str(cfg.jz), "j": str(cfg.j), "r1": r1, "r2": r2}])
    else:
        text = _csv_text(["jz", "j", "r1", "r2"], [[str(cfg.jz), str(cfg.j), fmt_float(r1), fmt_float(r2)]])
    return (EXIT_OK if ok else EXIT_FAIL), text


class _UsageError(Exception):
    pass


COMMANDS: dict[str, Callable[[RunConfig], tuple[int, str]]] = {
    "spectrum": cmd_spectrum,
    "multiplet": cmd_multiplet,
    "verify": cmd_verify,
    "fd": cmd_fd,
    "transform": cmd_transform,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        code, text = COMMANDS[cfg.command](cfg)
    except _UsageError as exc:
        print(f"susywire {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
