#!/usr/bin/env python3
"""
SmoothForge - Main Application
Smooth numbers, smooth ideals and Diophantine equations with many solutions
"""

import io
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from sympy import prime

from smoothforge.bounds.evaluators import (
    BoundQuery,
    BoundValue,
    cep_bound,
    lemma8_choose_X,
    rho_style_bound,
    thm1_bound,
    thm2_bound,
    thm2_t,
    thm3_bound,
    thm4_bound,
)
from smoothforge.config.settings import Config, load_config
from smoothforge.dickman_xi.rho_table import RhoTable, build_rho_table
from smoothforge.dickman_xi.xi import XiEvaluator, xi
from smoothforge.errors import CacheFormatError, DomainError, SmoothForgeError
from smoothforge.normpoly.elements import QuadElement, norm_form
from smoothforge.normpoly.ramanujan_nagell import construct_thm3, count_rn_solutions, thm4_degree
from smoothforge.quad_ideals.counting import (
    count_ideals,
    delta_lower,
    delta_profile,
    density_estimate,
    functional_equation_terms,
    mertens_sum,
    psi_KT,
    theorem5_exponent,
)
from smoothforge.quad_ideals.fields import EMPTY, ExcludedSet, Field, QuadField, RationalField, field_for
from smoothforge.rationals import format_tuple, parse_fraction, parse_fraction_list
from smoothforge.smooth_q.sieve import (
    SmoothSieve,
    build_sieve,
    hildebrand_estimate,
    psi,
    psi_enumerate,
    smoothness_exponent,
)
from smoothforge.storage.cache import CacheStore, write_rho_csv
from smoothforge.sunit.construction import construct_thm1, construct_thm2
from smoothforge.sunit.degree import lemma6_fuzz, min_vanishing_degree

logger = logging.getLogger("smoothforge")

BOUND_CHOICES = ["thm1", "thm2", "thm3", "thm4", "thm5", "cep", "ms"]
COMPARE_COLUMNS = ["X", "Y", "u", "exact", "main_term", "cep", "thm5"]


class SmoothForge:
    """Main SmoothForge application: configuration, caches and the computations behind each command"""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or load_config()
        self.store = CacheStore(self.config.cache_dir)
        self.evaluator = XiEvaluator(self.config.xi_tolerance)
        self._table: Optional[RhoTable] = None
        self._sieves: Dict[int, SmoothSieve] = {}

    # Shared resources

    @property
    def table(self) -> RhoTable:
        """rho table for the configured step and range, from the cache when possible"""
        if self._table is None:
            step, u_max = self.config.rho_step, self.config.rho_umax
            try:
                table = self.store.load_rho_table(step, u_max)
            except CacheFormatError as exc:
                logger.warning("ignoring unreadable rho cache: %s", exc)
                table = None
            if table is None:
                table = build_rho_table(step, u_max)
                self.store.save_rho_table(table, u_max)
            self._table = table
        return self._table

    def sieve(self, limit: int) -> SmoothSieve:
        """Sieve covering at least 1..limit, capped by sieve_limit"""
        limit = max(2, int(limit))
        for size in sorted(self._sieves):
            if size >= limit:
                return self._sieves[size]
        try:
            spf = self.store.load_spf(limit)
        except CacheFormatError as exc:
            logger.warning("ignoring unreadable sieve cache: %s", exc)
            spf = None
        if spf is not None:
            sieve = SmoothSieve(limit, spf)
        else:
            sieve = build_sieve(limit, cap=self.config.sieve_limit)
            self.store.save_spf(limit, sieve.spf)
        self._sieves[limit] = sieve
        return sieve

    @staticmethod
    def excluded(field: Field, labels: Optional[str]) -> ExcludedSet:
        if not labels:
            return EMPTY
        return ExcludedSet.from_labels(field, labels.split(","))

    # dickman_xi

    def rho(self, u: float) -> Dict[str, Any]:
        return {"u": u, "rho": self.table(u)}

    def xi(self, u: float) -> Dict[str, Any]:
        value = xi(self.evaluator, u)
        return {"u": u, "xi": value, "residual": self.evaluator.residual(u, value)}

    @staticmethod
    def rho_table_csv(step: Fraction, u_max: float) -> str:
        buffer = io.StringIO()
        write_rho_csv(build_rho_table(step, u_max), buffer)
        return buffer.getvalue()

    # smooth_q

    def psi(self, X: float, Y: float) -> Dict[str, Any]:
        return psi(self.sieve(math.floor(X)), X, Y).model_dump()

    def psi_values(self, X: float, Y: float) -> np.ndarray:
        return psi_enumerate(self.sieve(math.floor(X)), X, Y, self.config.enumeration_cap)

    # quad_ideals

    def ideals(self, d: int, X: float, Y: Optional[float], labels: Optional[str]) -> Dict[str, Any]:
        field = field_for(d)
        T = self.excluded(field, labels)
        if Y is None:
            count = count_ideals(field, X, T, self.config.enumeration_cap)
        else:
            count = psi_KT(field, X, Y, T)
        return {"d": d, "field": field.name, "X": X, "Y": Y, "T": T.labels, "count": count}

    def funceq(self, d: int, X: float, Y: float, labels: Optional[str]) -> Dict[str, Any]:
        field = field_for(d)
        T = self.excluded(field, labels)
        terms = functional_equation_terms(field, X, Y, T, self.config.enumeration_cap)
        return {
            "d": d, "field": field.name, "X": X, "Y": Y, "T": T.labels, "count": terms.count,
            "lhs": terms.lhs, "integral": terms.integral, "rhs": terms.rhs,
            "residual": terms.residual, "tolerance": self.config.funceq_tolerance,
        }

    def mertens(self, d: int, Y: float, labels: Optional[str]) -> Dict[str, Any]:
        field = field_for(d)
        T = self.excluded(field, labels)
        total, drift = mertens_sum(field, Y, T)
        return {"d": d, "field": field.name, "Y": Y, "T": T.labels, "sum": total, "drift": drift}

    def delta(self, d: int, Y: float, u_max: float, labels: Optional[str],
              lower_y: Optional[float]) -> Dict[str, Any]:
        field = field_for(d)
        T = self.excluded(field, labels)
        cap = self.config.enumeration_cap
        profile = delta_profile(field, T, Y, u_max, self.table,
                                grid_step=float(self.config.delta_grid), cap=cap)
        lower = delta_lower(field, T, Y if lower_y is None else lower_y, cap)
        return {
            "d": d, "field": field.name, "Y": Y, "u_max": u_max, "T": T.labels,
            "grid": str(self.config.delta_grid), "delta_lower": lower,
            "delta": float(profile.running_inf[-1]),
            "profile": [{"v": float(v), "ratio": float(r), "running_inf": float(m)}
                        for v, r, m in zip(profile.v, profile.ratio, profile.running_inf)],
        }

    # bounds

    def bound(self, which: str, n: int = 2, m: int = 1, s: Optional[float] = None,
              epsilon: float = 0.5, c_K: str = "2", X: Optional[float] = None,
              Y: Optional[float] = None, C: Optional[float] = None) -> Dict[str, Any]:
        if which in ("thm1", "thm2", "thm3", "thm4"):
            if s is None:
                raise DomainError(f"--s is required for {which}")
            if which == "thm2":
                result = thm2_bound(s, epsilon)
            else:
                try:
                    query = BoundQuery(n=n, m=m, s=s, epsilon=epsilon, c_K=c_K)
                except (ValidationError, ValueError) as exc:
                    raise DomainError(str(exc)) from exc
                evaluator = {"thm1": thm1_bound, "thm3": thm3_bound, "thm4": thm4_bound}[which]
                result = evaluator(query)
        else:
            if X is None or Y is None:
                raise DomainError(f"--x and --y are required for {which}")
            if which == "thm5":
                constant = self.config.constant("C_thm5") if C is None else C
                result = BoundValue.of(theorem5_exponent(X, Y, constant))
            else:
                constant = self.config.constant("C_cep") if C is None else C
                result = cep_bound(X, Y, constant)
        return {"which": which, "exponent": result.exponent, "value": result.value}

    # sunit

    def construction_sieve(self, n: int, s: int, epsilon: float) -> SmoothSieve:
        """Sieve reaching the X that construct_thm1 asks for, capped by sieve_limit"""
        limit = self.config.sieve_limit
        t = math.floor((1 - epsilon / 2) * s)
        if n >= 2 and 0 < epsilon < 1 and t >= 2:
            choice = lemma8_choose_X(int(prime(t)), 1 / n)
            if math.isfinite(choice.X):
                limit = min(math.ceil(choice.X), limit)
        return self.sieve(limit)

    def thm1(self, a: Sequence[Fraction], s: int, epsilon: float) -> Dict[str, Any]:
        report, solutions = construct_thm1(a, s, epsilon, self.construction_sieve(len(a), s, epsilon),
                                           self.config.enumeration_cap, self.config.bucket_cap)
        payload = json.loads(report.model_dump_json())
        payload["solutions"] = [list(format_tuple(sol.x)) for sol in solutions]
        return payload

    def thm2(self, a: Sequence[Fraction], s: int, epsilon: float) -> Dict[str, Any]:
        t = thm2_t(s, epsilon)
        report, solutions = construct_thm2(a, s, epsilon, self.construction_sieve(2, t, epsilon),
                                           self.config.enumeration_cap, self.config.bucket_cap)
        payload = json.loads(report.model_dump_json())
        payload["solutions"] = [list(format_tuple(sol.x)) for sol in solutions]
        return payload

    def gdeg(self, points: List[List[Fraction]]) -> Dict[str, Any]:
        g = min_vanishing_degree(points, self.config.enumeration_cap)
        dimension = len(points[0]) if points else 0
        return {"points": len(set(tuple(point) for point in points)), "dimension": dimension, "g": g}

    def lemma6_fuzz(self, trials: int, seed: Optional[int], degree: int, m: int) -> Dict[str, Any]:
        seed = self.config.seed if seed is None else seed
        box = self.config.lemma6_box
        report = lemma6_fuzz(trials, seed, degree=degree, m=m, box=box)
        return {**report._asdict(), "degree": degree, "m": m, "box": list(box)}

    # normpoly

    def normpoly_count(self, d: int, alpha0: str, alpha1: str, primes: Sequence[int],
                       x_bound: int) -> Dict[str, Any]:
        field = field_for(d)
        if not isinstance(field, QuadField):
            raise DomainError("norm polynomials need a quadratic field, d != 1")
        a0, a1 = QuadElement.parse(field, alpha0), QuadElement.parse(field, alpha1)
        form = norm_form(a0, a1)
        ceiling = abs(form.A) * x_bound * x_bound + abs(form.B) * x_bound + abs(form.C)
        sieve = self.sieve(ceiling)
        found = count_rn_solutions(a0, a1, primes, x_bound, sieve)
        return {
            "d": d, "field": field.name, "alpha0": a0.as_text(), "alpha1": a1.as_text(),
            "form": list(form), "S": sorted(set(primes)), "xbound": x_bound, "count": found.count,
            "degree": thm4_degree(a0, a1, primes, x_bound, sieve),
            "solutions": [{"x": sol.x, "value": sol.value, "exponents": list(sol.exponents)}
                          for sol in found.solutions],
        }

    def thm3(self, d: int, s: int, X: float, alpha1: str, C2: Optional[float],
             epsilon: float) -> Dict[str, Any]:
        field = field_for(d)
        if not isinstance(field, QuadField):
            raise DomainError("the norm construction needs a quadratic field, d != 1")
        C2 = self.config.constant("C2_lemma7") if C2 is None else C2
        a1 = QuadElement.parse(field, alpha1)
        sieve = self.sieve(math.floor(C2 * C2 * X))
        alpha0, report = construct_thm3(field, a1, s, X, sieve, C2=C2, epsilon=epsilon,
                                        enumeration_cap=self.config.enumeration_cap)
        payload = json.loads(report.model_dump_json())
        payload.update(alpha0=alpha0.as_text(), alpha1=a1.as_text(),
                       kappa=f"{report.kappa[0]},{report.kappa[1]}")
        return payload

    # compare

    def compare_row(self, X: float, Y: float, field: Field, T: ExcludedSet) -> Dict[str, Any]:
        u = smoothness_exponent(X, Y)
        if isinstance(field, RationalField) and not len(T):
            exact = psi(self.sieve(math.floor(X)), X, Y).count
            main = hildebrand_estimate(self.table, X, Y)
        else:
            exact = psi_KT(field, X, Y, T)
            main = density_estimate(field, X, T, self.config.enumeration_cap) * X * self.table(u)
        row = {"X": X, "Y": Y, "u": u, "exact": exact, "main_term": main}
        for column, name in (("cep", "C_cep"), ("thm5", "C_thm5")):
            try:
                row[column] = rho_style_bound(X, Y, self.config.constant(name)).value
            except DomainError:
                row[column] = math.nan
        return row

    def compare(self, xs: Sequence[float], ys: Sequence[float], d: Optional[int],
                labels: Optional[str]) -> pd.DataFrame:
        field = field_for(1 if d is None else d)
        T = self.excluded(field, labels)
        rows = [self.compare_row(X, Y, field, T) for X in xs for Y in ys]
        return pd.DataFrame(rows, columns=COMPARE_COLUMNS)


def configure_logging(verbose: bool) -> None:
    """Rich log records on stderr; stdout stays reserved for results"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _emit(payload: Dict[str, Any], out: Optional[Path]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)


def _emit_csv(frame: pd.DataFrame, out: Optional[Path]) -> None:
    text = frame.to_csv(index=False, float_format="%.12g", lineterminator="\n")
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma separated numbers, got {text!r}") from exc


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma separated integers, got {text!r}") from exc


def _read_points(path: Path) -> List[List[Fraction]]:
    frame = pd.read_csv(path, header=None, dtype=str, comment="#", skip_blank_lines=True)
    return [[parse_fraction(cell) for cell in row] for row in frame.itertuples(index=False)]


class ForgeGroup(click.Group):
    """Maps SmoothForge errors to exit codes"""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except SmoothForgeError as exc:
            logger.error("%s: %s", type(exc).__name__, exc)
            ctx.exit(exc.exit_code)


output_option = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                             help="Write to this file instead of standard output")
exclude_option = click.option("--exclude", default=None, help="Excluded prime ideals as p:index,...")


@click.group(cls=ForgeGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="key=value configuration file")
@click.option("--verbose", is_flag=True, help="Debug logging on stderr")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--sieve-limit", type=int, default=None)
@click.option("--enumeration-cap", type=int, default=None)
@click.pass_context
def cli(ctx, config_path, verbose, cache_dir, sieve_limit, enumeration_cap):
    """SmoothForge - smooth numbers, smooth ideals and S-unit constructions"""
    configure_logging(verbose)
    config = load_config(config_path, cache_dir=cache_dir, sieve_limit=sieve_limit,
                         enumeration_cap=enumeration_cap)
    ctx.obj = SmoothForge(config)


@cli.command()
@click.option("--u", "u", type=float, required=True)
@click.pass_obj
def rho(forge: SmoothForge, u):
    """Dickman rho(u) from the cached table"""
    _emit(forge.rho(u), None)


@cli.command(name="xi")
@click.option("--u", "u", type=float, required=True)
@click.pass_obj
def xi_command(forge: SmoothForge, u):
    """xi(u), the positive root of e^xi = 1 + u*xi"""
    _emit(forge.xi(u), None)


@cli.command(name="rho-table")
@click.option("--step", default=None, help="Grid step 1/N, N >= 64")
@click.option("--umax", type=float, default=None)
@output_option
@click.pass_obj
def rho_table(forge: SmoothForge, step, umax, out):
    """Tabulate rho as CSV"""
    step = forge.config.rho_step if step is None else parse_fraction(step)
    umax = forge.config.rho_umax if umax is None else umax
    text = forge.rho_table_csv(step, umax)
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)


@cli.command(name="psi")
@click.option("--x", "X", type=float, required=True)
@click.option("--y", "Y", type=float, required=True)
@click.option("--enumerate", "enumerate_", is_flag=True, help="List the smooth numbers as CSV")
@output_option
@click.pass_obj
def psi_command(forge: SmoothForge, X, Y, enumerate_, out):
    """Exact count of Y-smooth integers up to X"""
    if enumerate_:
        _emit_csv(pd.DataFrame({"n": forge.psi_values(X, Y)}), out)
    else:
        _emit(forge.psi(X, Y), out)


@cli.command()
@click.option("--d", "d", type=int, required=True, help="Squarefree d of Q(sqrt(d)); 1 means Q")
@click.option("--x", "X", type=float, required=True)
@click.option("--y", "Y", type=float, default=None)
@exclude_option
@click.pass_obj
def ideals(forge: SmoothForge, d, X, Y, exclude):
    """Count ideals of norm <= X coprime to T, optionally Y-smooth"""
    _emit(forge.ideals(d, X, Y, exclude), None)


@cli.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--x", "X", type=float, required=True)
@click.option("--y", "Y", type=float, required=True)
@exclude_option
@click.pass_obj
@click.pass_context
def funceq(ctx, forge: SmoothForge, d, X, Y, exclude):
    """Residual of the psi log X functional equation; exit 1 above tolerance"""
    payload = forge.funceq(d, X, Y, exclude)
    _emit(payload, None)
    if payload["residual"] > payload["tolerance"]:
        logger.error("residual %.3g above tolerance %.3g", payload["residual"], payload["tolerance"])
        ctx.exit(1)


@cli.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--y", "Y", type=float, required=True)
@exclude_option
@click.pass_obj
def mertens(forge: SmoothForge, d, Y, exclude):
    """Sum of Lambda(a)/N(a) over N(a) <= Y"""
    _emit(forge.mertens(d, Y, exclude), None)


@cli.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--y", "Y", type=float, required=True)
@click.option("--umax", "u_max", type=float, default=2.0, help="Largest v of the grid")
@click.option("--lower-y", "lower_y", type=float, default=None, help="Range of the lower estimate; defaults to Y")
@exclude_option
@output_option
@click.pass_obj
def delta(forge: SmoothForge, d, Y, u_max, lower_y, exclude, out):
    """Running infimum of psi_{K,T}(Y^v, Y)/(Y^v rho(v)) on the configured v grid"""
    _emit(forge.delta(d, Y, u_max, exclude, lower_y), out)


@cli.command()
@click.option("--which", type=click.Choice(BOUND_CHOICES), required=True)
@click.option("--n", "n", type=int, default=2)
@click.option("--m", "m", type=int, default=1)
@click.option("--s", "s", type=float, default=None)
@click.option("--eps", "epsilon", type=float, default=0.5)
@click.option("--ck", "c_K", default="2", help="Chebotarev constant as p/q")
@click.option("--x", "X", type=float, default=None)
@click.option("--y", "Y", type=float, default=None)
@click.option("--c", "C", type=float, default=None, help="Constant for thm5, cep and ms")
@click.pass_obj
def bound(forge: SmoothForge, which, n, m, s, epsilon, c_K, X, Y, C):
    """Evaluate a lower-bound formula as exponent and value"""
    _emit(forge.bound(which, n=n, m=m, s=s, epsilon=epsilon, c_K=c_K, X=X, Y=Y, C=C), None)


@cli.command()
@click.option("--a", "a", default="1,1", help="Coefficients as p/q,...")
@click.option("--s", "s", type=int, required=True)
@click.option("--eps", "epsilon", type=float, default=0.5)
@output_option
@click.pass_obj
def thm1(forge: SmoothForge, a, s, epsilon, out):
    """Build an S-unit equation with many verified solutions"""
    _emit(forge.thm1(parse_fraction_list(a), s, epsilon), out)


@cli.command()
@click.option("--a", "a", default="1,1,1", help="Coefficients as p/q,...")
@click.option("--s", "s", type=int, required=True)
@click.option("--eps", "epsilon", type=float, default=0.5)
@output_option
@click.pass_obj
def thm2(forge: SmoothForge, a, s, epsilon, out):
    """Lift two-variable solutions to n variables and report the vanishing degree g"""
    _emit(forge.thm2(parse_fraction_list(a), s, epsilon), out)


@cli.command()
@click.option("--points", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.pass_obj
def gdeg(forge: SmoothForge, points):
    """Smallest degree of a nonzero polynomial vanishing on the points"""
    _emit(forge.gdeg(_read_points(points)), None)


@cli.command(name="lemma6-fuzz")
@click.option("--trials", type=int, default=100)
@click.option("--seed", type=int, default=None)
@click.option("--degree", type=int, default=4)
@click.option("--m", "m", type=int, default=2)
@click.pass_obj
@click.pass_context
def lemma6_fuzz_command(ctx, forge: SmoothForge, trials, seed, degree, m):
    """Zero counts of random polynomials in a box; exit 1 on any violation"""
    payload = forge.lemma6_fuzz(trials, seed, degree, m)
    _emit(payload, None)
    if payload["violations"]:
        ctx.exit(1)


@cli.command(name="normpoly-count")
@click.option("--d", "d", type=int, required=True)
@click.option("--alpha0", required=True, help="a,b coordinates")
@click.option("--alpha1", required=True, help="a,b coordinates")
@click.option("--primes", required=True, help="Comma separated primes of S")
@click.option("--xbound", type=int, required=True)
@click.pass_obj
def normpoly_count(forge: SmoothForge, d, alpha0, alpha1, primes, xbound):
    """Solutions of |N(alpha0 + x alpha1)| supported on S with |x| <= xbound"""
    _emit(forge.normpoly_count(d, alpha0, alpha1, _int_list(primes), xbound), None)


@cli.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--s", "s", type=int, required=True)
@click.option("--x", "X", type=float, required=True)
@click.option("--alpha1", default="1,0", help="a,b coordinates")
@click.option("--c2", "C2", type=float, default=None)
@click.option("--eps", "epsilon", type=float, default=0.5)
@output_option
@click.pass_obj
def thm3(forge: SmoothForge, d, s, X, alpha1, C2, epsilon, out):
    """Choose alpha0 so the norm polynomial is S-supported for many x"""
    _emit(forge.thm3(d, s, X, alpha1, C2, epsilon), out)


@cli.command()
@click.option("--x", "xs", required=True, help="Comma separated X values")
@click.option("--y", "ys", required=True, help="Comma separated Y values")
@click.option("--d", "d", type=int, default=None)
@exclude_option
@output_option
@click.pass_obj
def compare(forge: SmoothForge, xs, ys, d, exclude, out):
    """Exact count, main term and the explicit lower bounds side by side"""
    _emit_csv(forge.compare(_float_list(xs), _float_list(ys), d, exclude), out)


if __name__ == "__main__":
    cli()
