"""``lp``: command-line driver for the L-function pipelines.

Exit codes: 0 when every asserted residual is within precision, 1 when a
check fails, 2 for invalid configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import asdict, dataclass

from . import report
from .cyclo import enumerate_chars, parse_char

CURVES = {
    "11a": (0, -1, 1, -10, -20),
    "14a": (1, 0, 1, 4, -6),
    "15a": (1, 1, 1, -10, -10),
    "17a": (1, -1, 1, -1, -14),
    "19a": (0, 1, 1, -9, -15),
    "37a": (0, 0, 1, -1, 0),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    prime: int
    curve: str | None = None
    level: int | None = None
    weight: int = 2
    form: int = 0
    moments: int = 10
    n_max: int = 1
    chars: str = "conductor<=1"
    fmt: str = "text"
    seed: int = 0
    min_digits: int = 4
    e: int = 1
    sign: int = 1
    seeds: int = 10
    degree: int | None = None

    def items(self) -> list[tuple[str, object]]:
        return [(f"config.{k}", "-" if v is None else v) for k, v in asdict(self).items()]


def parse_curve(spec: str) -> tuple[int, ...]:
    key = spec.strip().lower()
    if key.endswith("-coeffs"):
        key = key[: -len("-coeffs")]
    if key in CURVES:
        return CURVES[key]
    parts = [t for t in spec.replace("[", "").replace("]", "").split(",") if t.strip()]
    try:
        ainvs = tuple(int(t) for t in parts)
    except ValueError:
        raise ConfigError(f"curve {spec!r}: expected an alias ({', '.join(CURVES)}) or five comma-separated integers")
    if len(ainvs) != 5:
        raise ConfigError(f"curve {spec!r}: got {len(ainvs)} a-invariants, need 5")
    return ainvs


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def validate(cfg: RunConfig) -> None:
    if cfg.command != "taylor":
        if not _is_prime(cfg.prime) or cfg.prime == 2:
            raise ConfigError(f"--prime {cfg.prime}: need an odd prime")
        if cfg.curve is None and cfg.level is None:
            raise ConfigError("give --curve or --level")
        if cfg.curve is not None:
            parse_curve(cfg.curve)
        if cfg.weight < 2 or cfg.weight % 2:
            raise ConfigError(f"--weight {cfg.weight}: need an even weight ≥ 2")
        if cfg.moments < cfg.weight:
            raise ConfigError(f"--moments {cfg.moments}: need at least the weight")
    else:
        if not 1 <= cfg.e <= 6:
            raise ConfigError("--e must be between 1 and 6")
        if cfg.sign not in (1, -1):
            raise ConfigError("--sign must be +1 or -1")
        if cfg.degree is not None and cfg.degree < cfg.e + 2:
            raise ConfigError(f"--degree {cfg.degree}: need at least e + 2 = {cfg.e + 2}")
    if cfg.fmt not in ("text", "table"):
        raise ConfigError("--format must be text or table")


# inputs -----------------------------------------------------------------------

def load_form(cfg: RunConfig):
    from .lfunc import make_eigenform
    from .linv import EllipticCurveData
    from .modsym import rational_newforms

    p = cfg.prime
    if cfg.curve is not None:
        E = EllipticCurveData.from_ainvs(parse_curve(cfg.curve))
        rec = E.record()
        if E.N % p == 0:
            rec[p] = E.a_p(p)
        return make_eigenform(E.N, 2, p, rec, label=cfg.curve)
    forms = rational_newforms(cfg.level, cfg.weight)
    if cfg.form >= len(forms):
        raise ConfigError(f"level {cfg.level} weight {cfg.weight} has {len(forms)} rational newform(s)")
    return make_eigenform(cfg.level, cfg.weight, p, forms[cfg.form], label=f"{cfg.level}.{cfg.weight}.{cfg.form}")


def load_chars(cfg: RunConfig):
    p = cfg.prime
    spec = cfg.chars.strip()
    if spec.startswith("conductor<="):
        c = int(spec.split("=")[1])
        return enumerate_chars(p, c)
    if spec.startswith("first"):
        # firstK[:c]: the first K characters of conductor exponent ≤ c
        head, _, c = spec[5:].partition(":")
        return enumerate_chars(p, int(c or 2))[: int(head)]
    try:
        return [parse_char(t, p) for t in spec.split(";")]
    except ValueError as exc:
        raise ConfigError(f"--chars: {exc}")


# commands --------------------------------------------------------------------

Result = tuple[bool, list[tuple[str, object]], list[str] | None, list[list[object]] | None, dict]


def cmd_compute(cfg: RunConfig) -> Result:
    from .lfunc import eigen_lift, ev_from_symbol, lp_value
    from .ocsym import admissibility_profile

    form = load_form(cfg)
    phi = eigen_lift(form, cfg.moments, choice=cfg.seed)
    chars = load_chars(cfg)
    n_max = max([cfg.n_max] + [max(c.conductor_exponent, 1) for c in chars])
    ev = ev_from_symbol(phi, n_max)
    rows = []
    for chi in chars:
        for s in (0, 1, 2):
            v = lp_value(ev, chi, s)
            rows.append([chi.label(), s, v.precision, report.format_cyclo(v)])
    prof = admissibility_profile(phi, min(4, max(1, cfg.moments - phi.shift - 1)))
    block = [("form", form.label), ("level", form.N), ("alpha", phi.alpha), ("slope", phi.alpha.v),
             ("coherence", phi.coherence), ("iterations", phi.iterations),
             ("admissibility_exponent", f"{prof['exponent']:.3f}")]
    ok = phi.coherence >= min(cfg.min_digits, cfg.moments)
    return ok, block, ["char", "s", "precision", "value"], rows, {"admissibility": prof}


def cmd_interp(cfg: RunConfig) -> Result:
    from .lfunc import interpolation_check

    form = load_form(cfg)
    chars = load_chars(cfg)
    r_values = list(range(1, form.k)) if form.k > 2 else [1]
    pairs = [(chi, r) for chi in chars for r in r_values]
    res = interpolation_check(form, pairs, cfg.moments)
    rows = [[lab, r, report.format_cyclo(L), report.format_cyclo(R)] for lab, r, L, R in res.values]
    block = [("form", form.label), ("cross_digits", res.cross_digits), ("direct_digits", res.direct_digits)]
    return res.cross_digits >= cfg.min_digits, block, ["char", "r", "L_p", "predicted"], rows, {}


def fe_grid(p: int, M: int) -> list:
    from .padic import padic_from_rational

    return [1, 0, 2, 4, padic_from_rational(1, 2, p, M + 4)]


def cmd_fe(cfg: RunConfig) -> Result:
    from .lfunc import functional_equation_check

    form = load_form(cfg)
    chars = load_chars(cfg)
    res = functional_equation_check(form, chars, fe_grid(cfg.prime, cfg.moments), cfg.moments)
    block = [("form", form.label), ("eps_fit", res.eps_fit), ("eps_expected", res.eps_expected),
             ("min_digits", res.min_digits)]
    rows = [list(r) for r in res.table]
    ok = res.eps_fit == res.eps_expected and res.min_digits >= cfg.min_digits
    return ok, block, ["char", "s", "digits_plus", "digits_minus"], rows, {}


def cmd_tz(cfg: RunConfig) -> Result:
    from .lfunc import epsilon_tilde, trivial_zero_report

    form = load_form(cfg)
    rep = trivial_zero_report(form, cfg.moments)
    val = rep.value
    zero_digits = val.precision if val.is_zero() else val.valuation()
    block = [(k, v) for k, v in report.parse_block(rep.to_text())]
    block += [("eps_tilde", epsilon_tilde(form)), ("value_zero_digits", zero_digits)]
    ok = (not rep.e) or zero_digits >= cfg.min_digits
    return ok, block, None, None, {}


def cmd_mtt(cfg: RunConfig) -> Result:
    from .linv import EllipticCurveData, mtt_check

    if cfg.curve is None:
        raise ConfigError("mtt needs --curve")
    E = EllipticCurveData.from_ainvs(parse_curve(cfg.curve))
    res = mtt_check(E, cfg.prime, cfg.moments)
    block = [("curve", cfg.curve), ("conductor", E.N), ("ord_q", res.ord_q), ("L_invariant", res.l_invariant),
             ("l_alg", res.l_alg), ("derivative", res.derivative), ("value_at_center", res.value_at_center),
             ("residual_digits", res.residual_digits), ("precision", res.precision)]
    return res.residual_digits >= cfg.min_digits, block, None, None, {}


def _taylor_one(args: tuple[int, int, int | None, int]) -> tuple[int, int, int, bool, int]:
    from .taylor import diagonal_derivative, synthesize_scenario, verify_vanishing

    e, sign, D, seed = args
    sc = synthesize_scenario(e, sign, D, seed)
    rep = verify_vanishing(sc)
    d = diagonal_derivative(sc)
    return seed, len(rep.hypothesis_violations), len(rep.conclusion_violations), d.equal, d.order


def cmd_taylor(cfg: RunConfig) -> Result:
    jobs = [(cfg.e, cfg.sign, cfg.degree, s) for s in range(cfg.seed, cfg.seed + cfg.seeds)]
    rows = [list(_taylor_one(j)) for j in jobs]
    bad = [r for r in rows if r[1] or r[2] or not r[3] or r[4] < cfg.e]
    block = [("e", cfg.e), ("sign", cfg.sign), ("scenarios", len(rows)), ("failures", len(bad))]
    return not bad, block, ["seed", "hypothesis_violations", "conclusion_violations", "diagonal_equal", "u_order"], rows, {}


COMMANDS = {"compute": cmd_compute, "interp": cmd_interp, "fe": cmd_fe, "tz": cmd_tz, "mtt": cmd_mtt,
            "taylor": cmd_taylor}


# plots -----------------------------------------------------------------------

def render_plot(cfg: RunConfig, header, rows, extra: dict, plot_dir: str) -> str | None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(plot_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    if cfg.command == "compute" and "admissibility" in extra:
        prof = extra["admissibility"]
        vals = prof["valuations"]
        ns = [n + 1 for n, v in enumerate(vals) if v is not None]
        ax.plot(ns, [-v for v in vals if v is not None], "o-", label="log_p norm")
        ax.plot(ns, [prof["h"] * n for n in ns], "--", label="h·n")
        ax.set_xlabel("level n")
        ax.legend()
    elif cfg.command == "fe" and rows:
        ax.bar(range(len(rows)), [r[2] for r in rows])
        ax.set_ylabel("agreeing digits")
        ax.set_xlabel("(character, s) pair")
    elif cfg.command == "taylor" and rows:
        ax.bar([r[0] for r in rows], [r[4] for r in rows])
        ax.axhline(cfg.e, color="k", ls="--")
        ax.set_xlabel("seed")
        ax.set_ylabel("u-order of the diagonal")
    elif cfg.command == "interp" and rows:
        ax.text(0.1, 0.5, f"{len(rows)} interpolation values", transform=ax.transAxes)
    else:
        plt.close(fig)
        return None
    ax.set_title(f"lp {cfg.command}")
    path = os.path.join(plot_dir, f"{cfg.command}.png")
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


# entry point -------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lp", description="p-adic L-functions via overconvergent modular symbols")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--prime", type=int, default=3)
        sp.add_argument("--curve")
        sp.add_argument("--level", type=int)
        sp.add_argument("--weight", type=int, default=2)
        sp.add_argument("--form", type=int, default=0)
        sp.add_argument("--moments", type=int, default=10)
        sp.add_argument("--n-max", type=int, default=1)
        sp.add_argument("--chars", default="conductor<=1")
        sp.add_argument("--format", dest="fmt", default="text")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--min-digits", type=int, default=4)
        sp.add_argument("--e", type=int, default=1)
        sp.add_argument("--sign", type=int, default=1)
        sp.add_argument("--seeds", type=int, default=10)
        sp.add_argument("--degree", type=int)
        sp.add_argument("--plot-dir")
        sp.add_argument("--snapshot")
    return ap


def run(argv: list[str] | None = None) -> tuple[int, str]:
    ns = _build_parser().parse_args(argv)
    opts = vars(ns)
    plot_dir, snap = opts.pop("plot_dir"), opts.pop("snapshot")
    cfg = RunConfig(**opts)
    validate(cfg)
    ok, block, header, rows, extra = COMMANDS[cfg.command](cfg)
    block = cfg.items() + block + [("status", "PASS" if ok else "FAIL")]
    if cfg.fmt == "table" and header is not None:
        text = report.format_table(header, rows)
    else:
        text = report.format_report(block, header, rows)
    if plot_dir:
        render_plot(cfg, header, rows, extra, plot_dir)
    if snap:
        ok = _snapshot(snap, cfg, text) and ok
    from .dist import save_cache

    save_cache()
    return (0 if ok else 1), text


def _snapshot(directory: str, cfg: RunConfig, text: str) -> bool:
    key = hashlib.sha256(repr(sorted(asdict(cfg).items())).encode()).hexdigest()[:12]
    path = os.path.join(directory, f"{cfg.command}-{key}.txt")
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            if fh.read() != text:
                print(f"snapshot mismatch: {path}", file=sys.stderr)
                return False
        return True
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return True


def main(argv: list[str] | None = None) -> int:
    try:
        code, text = run(argv)
    except ConfigError as exc:
        print(f"lp: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"lp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
