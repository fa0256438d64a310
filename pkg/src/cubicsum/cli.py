"""Command-line front end.

Every command prints one table to stdout. Complex values take two columns (re, im)
and every value has an uncertainty column. Exit status is 0 on success, 2 when a
row is flagged ``no-convergence`` and 1 on any error.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import mpmath

from .contfrac import calibrate_gamma, write_cf
from .odm import InversionError, RhoMode, get_mapping, invert_mapping, saddle_constants, select_rho
from .perturbation import Convention, _cache_path, read_weak_cache, weak_coefficients
from .pipeline import DEFAULT_PMAX, Workspace, default_cache_dir
from .precision import MIN_DIGITS, digits_for_order
from .strong import write_strong

EXIT_NO_CONVERGENCE = 2


class Table:
    def __init__(self, columns: list[str], units: dict | None = None):
        self.columns = columns
        self.units = units or {}
        self.rows: list[list[str]] = []
        self.flagged = False

    def add(self, *cells):
        self.rows.append([_fmt(c) for c in cells])

    def render(self, out: str) -> str:
        if out == "json":
            return json.dumps([dict(zip(self.columns, r)) for r in self.rows], indent=1) + "\n"
        if out == "plot-data":
            head = " ".join(f"{c}[{self.units[c]}]" if c in self.units else c for c in self.columns)
            return f"# columns: {head}\n" + "".join(" ".join(r) + "\n" for r in self.rows)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()


_PRINT_DIGITS = 40


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return mpmath.nstr(x, _PRINT_DIGITS, strip_zeros=False, min_fixed=-4, max_fixed=6)


def _split(z):
    z = mpmath.mpc(z)
    return mpmath.re(z), mpmath.im(z)


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) == 1:
        return mpmath.mpf(parts[0])
    if len(parts) == 2:
        re, im = (mpmath.mpf(p) for p in parts)
        return mpmath.mpc(re, im) if im != 0 or re < 0 else re
    raise click.BadParameter(f"expected 're' or 're,im', got {text!r}")


class Config:
    def __init__(self, digits, out, cache_dir, print_digits):
        self.digits = digits
        self.out = out
        self.cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
        self.print_digits = print_digits

    def workspace(self, K: int) -> Workspace:
        return Workspace(self.cache_dir, K=K)

    def emit(self, table: Table):
        click.echo(table.render(self.out), nl=False)
        if table.flagged:
            raise SystemExit(EXIT_NO_CONVERGENCE)


@click.group()
@click.option("--digits", type=int, default=None, help="Working precision in decimal digits (default max(64, 4K)).")
@click.option("--print-digits", type=int, default=30, show_default=True, help="Significant digits in the output.")
@click.option("--out", type=click.Choice(["csv", "json", "plot-data"]), default="csv", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None, help="Coefficient cache (default $CUBICSUM_CACHE or ~/.cache/cubicsum).")
@click.pass_context
def cli(ctx, digits, print_digits, out, cache_dir):
    """Resummation of the imaginary cubic oscillator: weak series, ODM sums, strong coupling."""
    global _PRINT_DIGITS
    if digits is not None and digits < MIN_DIGITS:
        raise click.BadParameter(f"must be at least {MIN_DIGITS}", param_hint="--digits")
    _PRINT_DIGITS = print_digits
    mpmath.mp.dps = max(digits or 0, print_digits + 10)
    ctx.obj = Config(digits, out, cache_dir, print_digits)


def _precision(cfg: Config, K: int) -> int:
    return cfg.digits or digits_for_order(K)


@cli.command()
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--order", type=int, required=True)
@click.option("--convention", type=click.Choice([c.value for c in Convention]), default=Convention.CUBIC_OVER_SIX.value)
@click.option("--force", is_flag=True, help="Overwrite a cache file whose header does not match.")
@click.pass_obj
def coeffs(cfg: Config, level, order, convention, force):
    """Exact weak-coupling coefficients E_0..E_order, written to the cache."""
    convention = Convention(convention)
    path = _cache_path(cfg.cache_dir, level, convention)
    if path.exists():
        try:
            cached = read_weak_cache(path)
            problem = None if (cached.level, cached.convention) == (level, convention) else "level/convention mismatch"
        except (ValueError, KeyError) as exc:
            problem = f"unreadable cache ({exc})"
        if problem:
            if not force:
                raise click.ClickException(f"{path}: {problem}; use --force to overwrite")
            path.unlink()
    series = weak_coefficients(level, order, convention, cache_dir=cfg.cache_dir)
    table = Table(["L", "numerator", "denominator", "value", "uncertainty"])
    for L, c in enumerate(series.coefficients):
        table.add(L, str(c.numerator), str(c.denominator), mpmath.mpf(c.numerator) / c.denominator, "0")
    cfg.emit(table)


@cli.command("sum")
@click.option("--method", type=click.Choice(["a", "b", "c", "cf"]), multiple=True, default=("a",), show_default=True)
@click.option("--order", type=int, default=150, show_default=True)
@click.option("--rho", type=click.Choice(["roots", "fitted"]), default=None, help="rho_K choice (default: fitted for a, b; roots for c).")
@click.option("--g", "points", multiple=True, required=True, help="Coupling as 're' or 're,im'; a negative real g means g + i0.")
@click.option("--pmax", type=int, default=DEFAULT_PMAX, show_default=True, help="Tail depth for --method cf.")
@click.pass_obj
def sum_cmd(cfg: Config, method, order, rho, points, pmax):
    """Ground-state energy E(g) by ODM or by the strong-coupling continued fraction."""
    if order < 16:
        raise click.BadParameter("order must be at least 16", param_hint="--order")
    ws = cfg.workspace(order)
    table = Table(["g_re", "g_im", "method", "order", "value_re", "value_im", "uncertainty", "flags"])
    with mpmath.workdps(_precision(cfg, order)):
        for text in points:
            g = _parse_point(text)
            for m in method:
                if m == "cf":
                    res = ws.cf_energy(g, pmax)
                else:
                    mode = rho or ("roots" if m == "c" else "fitted")
                    res = ws.weak_sum(g, m, order, mode)
                re, im = _split(res.value)
                if "no-convergence" in res.flags:
                    table.flagged = True
                gr, gi = _split(g)
                table.add(gr, gi, m, res.K, re, im, res.uncertainty, ";".join(res.flags))
    cfg.emit(table)


@cli.command()
@click.option("--level", type=click.Choice(["0", "1"]), default="0", show_default=True)
@click.option("--order", type=int, default=150, show_default=True)
@click.option("--route", type=click.Choice(["symmetric", "direct"]), default="symmetric", show_default=True,
              help="Ground level: rebuilt from S01 and D01, or read off mapping (a) directly.")
@click.option("--write", "write_path", type=click.Path(dir_okay=False), default=None, help="Also write the series file.")
@click.pass_obj
def strong(cfg: Config, level, order, route, write_path):
    """Strong-coupling coefficients E^qqc_n with uncertainties."""
    ws = cfg.workspace(order)
    if level == "1":
        series = ws.excited_direct()
    else:
        series = ws.ground_symmetric() if route == "symmetric" else ws.ground_direct()
    if write_path:
        write_strong(write_path, series)
    table = Table(["n", "value", "uncertainty"])
    for n, (c, u) in enumerate(zip(series.coefficients, series.uncertainties)):
        table.add(n, c, u)
    cfg.emit(table)


@cli.command()
@click.option("--order", type=int, default=150, show_default=True)
@click.option("--pmax", type=int, default=DEFAULT_PMAX, show_default=True)
@click.option("--chi", "chis", multiple=True, help="Evaluate E^qqc at chi ('re' or 're,im'); negative real chi means chi + i0.")
@click.option("--g", "points", multiple=True, help="Evaluate E(g) through chi = g^(-4/5).")
@click.option("--write", "write_path", type=click.Path(dir_okay=False), default=None, help="Also write the fraction file.")
@click.pass_obj
def cf(cfg: Config, order, pmax, chis, points, write_path):
    """Strong-coupling continued fraction: coefficients a_p and gamma, or values."""
    ws = cfg.workspace(order)
    frac = ws.strong_cf()
    if write_path:
        write_cf(write_path, frac, calibrate_gamma(frac, pmax))
    if not chis and not points:
        table = Table(["p", "a_p", "uncertainty", "gamma_p"])
        for p, (a, u) in enumerate(zip(frac.coefficients, frac.uncertainties), start=1):
            try:
                gamma = calibrate_gamma(frac, p).gamma if p >= 9 else ""
            except ArithmeticError:
                gamma = "none"
            table.add(p, a, u, gamma)
        cfg.emit(table)
        return
    table = Table(["variable", "x_re", "x_im", "value_re", "value_im", "uncertainty"])
    for text in chis:
        x = _parse_point(text)
        res = ws.cf_value(x if not (isinstance(x, mpmath.mpf) and x < 0) else mpmath.mpc(x), pmax)
        table.add("chi", *_split(x), *_split(res.value), res.uncertainty)
    for text in points:
        g = _parse_point(text)
        res = ws.cf_energy(g, pmax)
        table.add("g", *_split(g), *_split(res.value), res.uncertainty)
    cfg.emit(table)


@cli.command()
@click.option("--order", type=int, default=150, show_default=True)
@click.option("--points", "n_points", type=int, default=101, show_default=True, help="Grid size for --out plot-data.")
@click.pass_obj
def merge(cfg: Config, order, n_points):
    """Merging point of the two lowest levels; plot-data gives D01 and S01 on [-1.85, -0.85]."""
    ws = cfg.workspace(order)
    pair = ws.merge
    if not pair.found:
        raise click.ClickException("no zero of D01 in the search window")
    if cfg.out == "plot-data":
        from .strong import _pade, _pade_orders

        n = min(pair.delta.n_max, pair.half_sum.n_max)
        L, M = _pade_orders(n)
        d, s = _pade(pair.delta.coefficients, L, M), _pade(pair.half_sum.coefficients, L, M)
        table = Table(["chi", "D01", "S01"], {"chi": "1", "D01": "energy^2", "S01": "energy"})
        lo, hi = mpmath.mpf("-1.85"), mpmath.mpf("-0.85")
        for i in range(n_points):
            x = lo + (hi - lo) * i / (n_points - 1)
            table.add(x, d(x), s(x))
        cfg.emit(table)
        return
    table = Table(["quantity", "value", "uncertainty"])
    table.add("chi_c", pair.chi_c, pair.chi_c_uncertainty)
    table.add("energy_at_merge", pair.energy_at_merge, pair.energy_uncertainty)
    table.add("slope_D01", pair.slope, "0")
    table.add("local_exponent", pair.local_exponent, "0")
    table.add("S01_0", pair.half_sum.coefficients[0], pair.half_sum.uncertainties[0])
    table.add("D01_0", pair.delta.coefficients[0], pair.delta.uncertainties[0])
    cfg.emit(table)


@cli.command()
@click.option("--method", type=click.Choice(["a", "b", "c"]), multiple=True, default=("a", "b", "c"))
@click.pass_obj
def saddle(cfg: Config, method):
    """Saddle-point constants mu_c, lambda_c and C2 of each mapping."""
    table = Table(["mapping", "mu_c", "lambda_c", "C2", "uncertainty"])
    with mpmath.workdps(cfg.digits or 50):
        for m in method:
            c = saddle_constants(m)
            table.add(m, c.mu_c, c.lambda_c, c.C2, c.residual)
    cfg.emit(table)


@cli.command("map-image")
@click.option("--method", type=click.Choice(["a", "b", "c"]), default="a", show_default=True)
@click.option("--order", type=int, default=55, show_default=True)
@click.option("--points", "n_points", type=int, default=60, show_default=True)
@click.option("--max-g", type=float, default=100.0, show_default=True)
@click.pass_obj
def map_image(cfg: Config, method, order, n_points, max_g):
    """Image (Re lambda, Im lambda) of the negative g axis, g + i0, under a mapping."""
    mapping = get_mapping(method)
    table = Table(["g", "lambda_re", "lambda_im", "uncertainty"], {"g": "1", "lambda_re": "1", "lambda_im": "1"})
    with mpmath.workdps(cfg.digits or 40):
        ws = cfg.workspace(order)
        if mapping.tag == "c":
            rho = select_rho(ws.polys("c", order), order, mapping, RhoMode.DERIVATIVE_ROOTS).rho
        else:
            rho = select_rho(None, order, mapping, RhoMode.FITTED).rho
        for i in range(n_points):
            g = -mpmath.mpf(10) ** (-2 + (mpmath.log10(max_g) + 2) * mpmath.mpf(i) / (n_points - 1))
            try:
                lam = invert_mapping(mpmath.mpc(g), rho, mapping)
            except InversionError:
                continue
            table.add(g, *_split(lam), "0")
    cfg.emit(table)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="cubicsum", standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except Exception as exc:  # noqa: BLE001 - every failure maps to exit status 1
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
