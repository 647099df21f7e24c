"""Command-line front end: configuration, dispatch, and report emission.

Subcommands map one-to-one onto the library modules:

* ``census``     enumeration, proportion, histogram export, exponent fit
* ``dimension``  pressure brackets, single depth or converging schedule
* ``admissible`` residue closures and admissibility verdicts
* ``sigma``      Dirichlet cells and exponential sums over a saved census
* ``ensemble``   factor construction, independence, window diagnostics
* ``rq``         congruence pair counts, direct against character sums

Machine-readable output (JSON by default, CSV where tabular) goes to
--output when given, otherwise to standard output; progress and the
human summary go to standard error whenever standard output carries the
report.  Reports embed the resolved configuration and tool version and
contain no timestamps, so identical configuration and seed give
byte-identical output.  Exit codes: 0 success, 1 domain error, 2
resource limit, 3 internal consistency failure.

Environment overrides: ``ZAREMBA_THREADS`` and ``ZAREMBA_OUTPUT`` supply
defaults for --threads and --output.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import random
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .cf import Alphabet
from .census import (CensusConfig, enumerate_denominators, export_histogram_csv,
                     load_census, multiplicity_exponent, proportion, save_census)
from .congruence import VectorSet, rq_charsum, rq_direct
from .dimension import convergence_table, dimension_bracket, estimate_dimension
from .ensemble import (EnsembleParams, build_fixed_length_ensemble, ensemble_report,
                       FactoredEnsemble, split_by_norm)
from .errors import (CensusFileError, DomainError, InternalConsistencyError,
                     ResourceLimitError)
from .freq import (CellIndex, ScaleSequence, bound_diagnostic, cell_report,
                   sigma_nz)
from .modular import first_obstruction, residue_profile


@dataclass
class RunConfig:
    """Resolved parameters for one invocation.

    Common fields apply to every command; the rest are command-specific
    and keep their defaults elsewhere.  Validation happens inside the
    dispatched operation, so a bad combination surfaces as a domain
    error with exit code 1.
    """

    command: str
    alphabet: Optional[Alphabet] = None
    n_limit: Optional[int] = None
    q1: int = 4
    epsilon0: float = 0.0002
    threads: int = 1
    output_path: Optional[str] = None
    output_format: str = "json"
    seed: int = 0
    # census
    histogram_window: Optional[Tuple[int, int]] = None
    even_lengths_only: bool = False
    save_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    fit_limits: Optional[Tuple[int, ...]] = None
    # dimension
    width: Optional[float] = None
    depth: Optional[int] = None
    n_max: int = 32
    # admissible
    q_max: int = 360
    values: Optional[Tuple[int, ...]] = None
    # sigma
    census_path: Optional[str] = None
    z_size: int = 100
    c_exponent: float = 0.0
    # ensemble
    lengths: Optional[Tuple[int, ...]] = None
    m1: Optional[float] = None
    m2: float = 1.0
    m4: float = 1.0
    delta_hat: Optional[float] = None
    # rq
    set_size: int = 20
    modulus: int = 30


def _config_echo(config: RunConfig) -> dict:
    echo = {
        "command": config.command,
        "alphabet": list(config.alphabet.digits) if config.alphabet else None,
        "q1": config.q1,
        "epsilon0": config.epsilon0,
        "threads": config.threads,
        "output_format": config.output_format,
        "seed": config.seed,
    }
    extras = {
        "census": ["n_limit", "histogram_window", "even_lengths_only",
                   "save_path", "checkpoint_path", "fit_limits"],
        "dimension": ["width", "depth", "n_max"],
        "admissible": ["q_max", "values"],
        "sigma": ["census_path", "n_limit", "z_size", "c_exponent"],
        "ensemble": ["lengths", "m1", "m2", "m4", "n_limit", "delta_hat"],
        "rq": ["set_size", "modulus"],
    }
    for name in extras.get(config.command, []):
        value = getattr(config, name)
        if isinstance(value, tuple):
            value = list(value)
        echo[name] = value
    return echo


# ---------------------------------------------------------------------------
# command handlers: each returns (result dict, summary line, csv table or None)

def _cmd_census(config: RunConfig):
    if config.alphabet is None or config.n_limit is None:
        raise DomainError("census needs --alphabet and --n")

    if config.fit_limits:
        results = []
        for n in config.fit_limits:
            print("census: alphabet {%s} N=%d" % (config.alphabet.label(), n),
                  file=sys.stderr)
            results.append(enumerate_denominators(CensusConfig(
                alphabet=config.alphabet, n_limit=n, thread_count=config.threads)))
        fit = multiplicity_exponent(results)
        result = {
            "fit_limits": list(fit.n_values),
            "mean_multiplicities": list(fit.means),
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residuals": list(fit.residuals),
            "proportions": [proportion(r) for r in results],
        }
        summary = "multiplicity exponent %.4f over N=%s" % (
            fit.slope, list(fit.n_values))
        csv_rows = (["n_limit", "mean_multiplicity", "proportion"],
                    [[r.n_limit, "%.6f" % m, "%.6f" % proportion(r)]
                     for r, m in zip(results, fit.means)])
        return result, summary, csv_rows

    census = enumerate_denominators(CensusConfig(
        alphabet=config.alphabet,
        n_limit=config.n_limit,
        thread_count=config.threads,
        histogram_window=config.histogram_window,
        even_lengths_only=config.even_lengths_only,
        checkpoint_path=config.checkpoint_path,
    ))
    if config.save_path:
        save_census(census, config.save_path)
    window = census.multiplicity
    members = census.member_count()
    result = {
        "n_limit": census.n_limit,
        "member_count": members,
        "proportion": proportion(census),
        "word_count": census.word_count,
        "histogram_window": [window.lo, window.hi],
        "histogram_total": window.total(),
        "histogram_support": window.support_count(),
        "even_lengths_only": census.even_lengths_only,
        "saved_to": config.save_path,
    }
    summary = "census {%s} N=%d: |D(N)|=%d (proportion %.6f), %d words" % (
        config.alphabet.label(), census.n_limit, members,
        proportion(census), census.word_count)
    csv_rows = (["value", "count"], [[d, r] for d, r in window.items()])
    return result, summary, csv_rows


def _cmd_dimension(config: RunConfig):
    if config.alphabet is None:
        raise DomainError("dimension needs --alphabet")
    if config.depth is not None:
        bracket = dimension_bracket(config.alphabet, config.depth)
        rows = [(bracket.n, bracket.s_lower, bracket.s_upper, bracket.width)]
    else:
        width = config.width if config.width is not None else 0.02
        bracket = estimate_dimension(config.alphabet, width, config.n_max)
        rows = [(n, sl, su, w) for n, sl, su, w, _ in
                convergence_table(config.alphabet, width, config.n_max)]
    result = {
        "n": bracket.n,
        "s_lower": bracket.s_lower,
        "s_upper": bracket.s_upper,
        "width": bracket.width,
        "midpoint": 0.5 * (bracket.s_lower + bracket.s_upper),
        "evaluations": bracket.evaluations,
        "clamped": bracket.clamped,
        "converged": bracket.converged,
    }
    summary = "dimension {%s}: [%.7f, %.7f] width %.7f at n=%d%s" % (
        config.alphabet.label(), bracket.s_lower, bracket.s_upper,
        bracket.width, bracket.n, "" if bracket.converged else " (unconverged)")
    csv_rows = (["n", "s_lower", "s_upper", "width"],
                [[n, "%.10f" % sl, "%.10f" % su, "%.10f" % w]
                 for n, sl, su, w in rows])
    return result, summary, csv_rows


def _cmd_admissible(config: RunConfig):
    if config.alphabet is None or not config.values:
        raise DomainError("admissible needs --alphabet and --d or --d-range")
    verdicts = []
    for d in config.values:
        q = first_obstruction(d, config.alphabet, config.q_max)
        verdicts.append({"value": d, "admissible": q is None, "obstruction_q": q})
    profile = residue_profile(config.alphabet, min(config.q_max, 64))
    admissible_count = sum(1 for v in verdicts if v["admissible"])
    result = {
        "q_max": config.q_max,
        "verdicts": verdicts,
        "admissible_count": admissible_count,
        "residue_profile_prefix": [
            {"q": q, "residue_count": c, "full": f} for q, c, f in profile],
    }
    summary = "admissible {%s} q_max=%d: %d/%d admissible" % (
        config.alphabet.label(), config.q_max, admissible_count, len(verdicts))
    csv_rows = (["value", "admissible", "obstruction_q"],
                [[v["value"], int(v["admissible"]),
                  "" if v["obstruction_q"] is None else v["obstruction_q"]]
                 for v in verdicts])
    return result, summary, csv_rows


def _cmd_sigma(config: RunConfig):
    if not config.census_path:
        raise DomainError("sigma needs --census (a saved census file)")
    census = load_census(config.census_path)
    n_limit = config.n_limit if config.n_limit is not None else census.n_limit
    scale = ScaleSequence(config.q1)
    rng = random.Random(config.seed)
    thetas = [rng.random() for _ in range(config.z_size)]

    hist = census.multiplicity
    omega_size = hist.total()
    sigma = sigma_nz(thetas, hist)
    rows = cell_report(thetas, hist, n_limit, scale)
    diagnostics = []
    for row in rows:
        ratio = bound_diagnostic(row.sigma_part, omega_size, row.count,
                                 CellIndex(row.alpha, row.beta),
                                 config.c_exponent, scale)
        diagnostics.append({"alpha": row.alpha, "beta": row.beta,
                            "count": row.count, "sigma_part": row.sigma_part,
                            "ratio": ratio})
    result = {
        "census": config.census_path,
        "n_limit": n_limit,
        "z_size": config.z_size,
        "omega_size": omega_size,
        "sigma": sigma,
        "triangle_bound": config.z_size * omega_size,
        "c_exponent": config.c_exponent,
        "cells": diagnostics,
    }
    summary = "sigma over %d frequencies: %.6g (triangle bound %.6g), %d cells" % (
        config.z_size, sigma, float(config.z_size * omega_size), len(rows))
    csv_rows = (["alpha", "beta", "count", "sigma_part"],
                [[r.alpha, r.beta, r.count, "%.12g" % r.sigma_part] for r in rows])
    return result, summary, csv_rows


def _cmd_ensemble(config: RunConfig):
    if config.alphabet is None:
        raise DomainError("ensemble needs --alphabet")
    params = EnsembleParams(
        m1=config.m1 if config.m1 is not None else 1.0,
        m2=config.m2, m4=config.m4,
        epsilon0=config.epsilon0, n_limit=config.n_limit)

    split_info = None
    if config.lengths:
        ens = build_fixed_length_ensemble(config.alphabet, list(config.lengths))
    elif config.m1 is not None:
        if config.n_limit is None:
            raise DomainError("prefix-cut ensemble needs --n alongside --m1")
        words, split = split_by_norm(config.alphabet, config.n_limit, config.m1)
        ens = FactoredEnsemble(factors=(words,))
        split_info = {
            "size": split.size,
            "min_continuant": split.min_continuant,
            "max_continuant": split.max_continuant,
            "growth_bound": split.growth_bound,
            "growth_bound_ok": split.growth_bound_ok,
            "odd_length_count": split.odd_length_count,
            "max_length": split.max_length,
        }
    else:
        raise DomainError("ensemble needs --lengths or --m1")

    result = ensemble_report(ens, params, config.alphabet, config.delta_hat)
    if split_info:
        result["prefix_cut"] = split_info
    independent = result.get("independent")
    summary = "ensemble with %d factor(s), product size %d: %s" % (
        len(ens.factors), ens.product_size,
        {True: "independent", False: "DEPENDENT", None: "independence unchecked"}[independent])
    csv_rows = (["index", "size", "min_continuant", "max_continuant",
                 "odd_length_count", "inside_window"],
                [[f["index"], f["size"], f["min_continuant"], f["max_continuant"],
                  f["odd_length_count"],
                  "" if f["inside_window"] is None else int(f["inside_window"])]
                 for f in result["factors"]])
    return result, summary, csv_rows


def _random_vector_set(rng: random.Random, size: int) -> VectorSet:
    pairs = []
    while len(pairs) < size:
        u = rng.randint(1, 60)
        v = rng.randint(1, 60)
        if math.gcd(u, v) == 1:
            pairs.append((u, v))
    return VectorSet(pairs)


def _cmd_rq(config: RunConfig):
    rng = random.Random(config.seed)
    xi = _random_vector_set(rng, config.set_size)
    direct = rq_direct(xi, config.modulus)
    charsum = rq_charsum(xi, config.modulus)
    result = {
        "set_size": len(xi),
        "q": config.modulus,
        "rq_direct": direct,
        "rq_charsum": charsum,
        "equal": direct == charsum,
        "pairs": [list(p) for p in xi.pairs],
    }
    summary = "rq at q=%d over %d vectors: direct=%d charsum=%d -> %s" % (
        config.modulus, len(xi), direct, charsum,
        "direct == charsum" if direct == charsum else "MISMATCH")
    csv_rows = (["q", "rq_direct", "rq_charsum", "equal"],
                [[config.modulus, direct, charsum, int(direct == charsum)]])
    return result, summary, csv_rows


_HANDLERS = {
    "census": _cmd_census,
    "dimension": _cmd_dimension,
    "admissible": _cmd_admissible,
    "sigma": _cmd_sigma,
    "ensemble": _cmd_ensemble,
    "rq": _cmd_rq,
}


def _format_csv(table) -> str:
    header, rows = table
    out = io.StringIO()
    out.write(",".join(str(h) for h in header) + "\n")
    for row in rows:
        out.write(",".join(str(x) for x in row) + "\n")
    return out.getvalue()


def run(config: RunConfig) -> int:
    """Dispatch a validated configuration; never raises toolkit errors.

    Returns the process exit code and writes the report to the configured
    destination.  The report embeds the resolved config and tool version;
    identical config and seed reproduce it byte for byte.
    """
    handler = _HANDLERS.get(config.command)
    if handler is None:
        print("error: unknown command %r" % (config.command,), file=sys.stderr)
        return 1
    try:
        result, summary, csv_table = handler(config)
    except (DomainError, CensusFileError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 1
    except ResourceLimitError as err:
        print("resource limit: %s" % err, file=sys.stderr)
        return 2
    except InternalConsistencyError as err:
        print("internal consistency failure: %s" % err, file=sys.stderr)
        return 3

    if config.output_format == "csv":
        if csv_table is None:
            print("error: command %r has no CSV form" % (config.command,),
                  file=sys.stderr)
            return 1
        text = _format_csv(csv_table)
    else:
        report = {
            "tool": "zaremba",
            "version": __version__,
            "config": _config_echo(config),
            "result": result,
        }
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"

    if config.output_path:
        try:
            with open(config.output_path, "w") as fh:
                fh.write(text)
        except OSError as err:
            print("error: cannot write report: %s" % err, file=sys.stderr)
            return 1
        print(summary)
        print("report written to %s" % config.output_path, file=sys.stderr)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _parse_int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.replace(":", ",").split(",") if p.strip())
    except ValueError:
        raise DomainError("bad integer list %r" % (text,)) from None


def _add_common(parser, *, with_alphabet=True):
    if with_alphabet:
        parser.add_argument("--alphabet", type=str, help="comma-separated digits, e.g. 1,2,3,4")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--output", "-o", type=str, default=None)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zaremba",
        description="Continued fractions with bounded partial quotients: "
                    "censuses, dimension brackets, admissibility, cells, "
                    "exponential sums, congruence counts.")
    parser.add_argument("--version", action="version", version="zaremba " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="enumerate denominators up to N")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--window", type=str, default=None, help="histogram window LO,HI")
    p.add_argument("--even-only", action="store_true")
    p.add_argument("--save", type=str, default=None, help="write binary census file")
    p.add_argument("--checkpoint", type=str, default=None)
    p.add_argument("--fit", type=str, default=None,
                   help="comma-separated N values: run censuses and fit the "
                        "multiplicity exponent")

    p = sub.add_parser("dimension", help="bracket the Hausdorff dimension")
    _add_common(p)
    p.add_argument("--width", type=float, default=None, help="target bracket width")
    p.add_argument("--n", type=int, default=None, help="single bracket at this depth")
    p.add_argument("--n-max", type=int, default=32)

    p = sub.add_parser("admissible", help="admissibility by residue closures")
    _add_common(p)
    p.add_argument("--d", type=str, default=None, help="value or comma list")
    p.add_argument("--d-range", type=str, default=None, help="inclusive LO,HI")
    p.add_argument("--q-max", type=int, default=360)

    p = sub.add_parser("sigma", help="exponential sum over random frequencies")
    _add_common(p, with_alphabet=False)
    p.add_argument("--census", type=str, required=True, help="saved census file")
    p.add_argument("--n", type=int, default=None, help="override decomposition bound")
    p.add_argument("--q1", type=int, default=4)
    p.add_argument("--z-size", type=int, default=100)
    p.add_argument("--c", type=float, default=0.0, help="damping exponent")

    p = sub.add_parser("ensemble", help="build and verify factored ensembles")
    _add_common(p)
    p.add_argument("--lengths", type=str, default=None, help="factor lengths, e.g. 2,3")
    p.add_argument("--m1", type=float, default=None, help="prefix-cut threshold")
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--m4", type=float, default=1.0)
    p.add_argument("--epsilon0", type=float, default=0.0002)
    p.add_argument("--n", type=int, default=None, help="ambient bound for the cut")
    p.add_argument("--delta-hat", type=float, default=None)

    p = sub.add_parser("rq", help="congruence count two ways on a random set")
    _add_common(p, with_alphabet=False)
    p.add_argument("--size", type=int, default=20)
    p.add_argument("--q", type=int, default=30)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ZAREMBA_THREADS", "1"))
    output = args.output
    if output is None:
        output = os.environ.get("ZAREMBA_OUTPUT") or None

    config = RunConfig(
        command=args.command,
        threads=max(1, threads),
        output_path=output,
        output_format=args.format,
        seed=args.seed,
    )
    if getattr(args, "alphabet", None):
        config.alphabet = Alphabet.parse(args.alphabet)

    if args.command == "census":
        config.n_limit = args.n
        if args.window:
            window = _parse_int_list(args.window)
            if len(window) != 2:
                raise DomainError("--window takes LO,HI")
            config.histogram_window = (window[0], window[1])
        config.even_lengths_only = args.even_only
        config.save_path = args.save
        config.checkpoint_path = args.checkpoint
        if args.fit:
            config.fit_limits = _parse_int_list(args.fit)
    elif args.command == "dimension":
        config.width = args.width
        config.depth = args.n
        config.n_max = args.n_max
    elif args.command == "admissible":
        values: List[int] = []
        if args.d:
            values.extend(_parse_int_list(args.d))
        if args.d_range:
            bounds = _parse_int_list(args.d_range)
            if len(bounds) != 2 or bounds[0] > bounds[1]:
                raise DomainError("--d-range takes LO,HI with LO <= HI")
            values.extend(range(bounds[0], bounds[1] + 1))
        config.values = tuple(values)
        config.q_max = args.q_max
    elif args.command == "sigma":
        config.census_path = args.census
        config.n_limit = args.n
        config.q1 = args.q1
        config.z_size = args.z_size
        config.c_exponent = args.c
    elif args.command == "ensemble":
        if args.lengths:
            config.lengths = _parse_int_list(args.lengths)
        config.m1 = args.m1
        config.m2 = args.m2
        config.m4 = args.m4
        config.epsilon0 = args.epsilon0
        config.n_limit = args.n
        config.delta_hat = args.delta_hat
    elif args.command == "rq":
        config.set_size = args.size
        config.modulus = args.q

    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except DomainError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
