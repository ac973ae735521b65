"""
multi-brjuno command line

Every subcommand is a thin adapter over BrjunoToolkit. On success one JSON object
with the keys command, inputs, result, enclosures, warnings and timing_ms (or a
CSV table with --csv) goes to standard output, or to the file named by --out.

Exit codes: 0 success, 2 precision exhausted or undecidable, 3 invalid input or
configuration, 4 domain error (exact tie, failed selector, non-commuting germs).
"""
import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from multibrjuno import __version__
from multibrjuno.config import ConstantsConfig, RunConfig
from multibrjuno.exceptions import (
    ConfigurationError,
    DomainError,
    InvalidInputError,
    MultiBrjunoError,
    PrecisionError,
)
from multibrjuno.germs import (
    PowerSeriesGerm,
    germ_from_json,
    germ_to_json,
    series_from_json,
    series_to_json,
)
from multibrjuno.numeric import RealScalar
from multibrjuno.series import from_terms
from multibrjuno.toolkit import BrjunoToolkit, parse_real, parse_word

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PRECISION = 2
EXIT_INPUT = 3
EXIT_DOMAIN = 4


class _Parser(argparse.ArgumentParser):
    """Grammar errors become InvalidInputError (exit 3) instead of SystemExit(2)"""

    def error(self, message):
        raise InvalidInputError(message)


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record):
        self.messages.append(record.getMessage())


class Report:
    """Accumulates the result of one subcommand"""

    def __init__(self, command: str, inputs: Dict[str, Any]):
        self.command = command
        self.inputs = inputs
        self.result: Dict[str, Any] = {}
        self.enclosures: Dict[str, Dict[str, Any]] = {}
        self.rows: List[Dict[str, Any]] = []

    def real(self, name: str, value: RealScalar) -> float:
        """Record the enclosure of value under name and return its midpoint"""
        lo, hi = value.decimal_bounds(25)
        width = value.width
        self.enclosures[name] = {
            "lo": lo,
            "hi": hi,
            "width": float(width) if value.is_bounded else "inf",
        }
        return float(value)


def plain(value: Any) -> Any:
    """JSON-compatible form of library values"""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else float(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, RealScalar):
        return float(value)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return str(value)


def parse_terms(text: str) -> Dict[int, complex]:
    """ "2:1,3:0.5:-0.25" -> {2: 1+0j, 3: 0.5-0.25j}"""
    terms: Dict[int, complex] = {}
    for token in filter(None, (t.strip() for t in text.split(","))):
        parts = token.split(":")
        if len(parts) not in (2, 3):
            raise InvalidInputError(f"cannot parse coefficient {token!r}; expected n:re or n:re:im")
        try:
            n = int(parts[0])
            terms[n] = complex(float(parts[1]), float(parts[2]) if len(parts) == 3 else 0.0)
        except ValueError as e:
            raise InvalidInputError(f"cannot parse coefficient {token!r}") from e
    return terms


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read {path}: {e}") from e


# ----------------------------------------------------------------------
# Subcommand handlers
# ----------------------------------------------------------------------

def _cmd_gauss_orbit(tk: BrjunoToolkit, args, report: Report) -> None:
    steps = tk.gauss_orbit(args.alphas, parse_word(args.word))
    rows = []
    for n, step in enumerate(steps):
        tilde = [report.real(f"steps[{n}].alpha_tilde[{i}]", x) for i, x in enumerate(step.image)]
        rows.append({"depth": n, "w": step.w, "a": list(step.a), "eps": list(step.eps), "alpha_tilde": tilde})
    report.result = {"steps": rows}
    report.rows = rows


def _cmd_brjuno(tk: BrjunoToolkit, args, report: Report) -> None:
    if args.classical:
        total = tk.brjuno_classical(args.alphas, args.depth, args.variant)
    else:
        policy = args.word if args.word is not None else args.word_policy
        total = tk.brjuno(args.alphas, policy, args.depth, args.variant)
    rows = [
        {"depth": t.depth, "w": t.w, "weight": float(t.weight), "increment": float(t.value)}
        for t in total.terms
    ]
    report.result = {
        "value": report.real("value", total.value),
        "variant": total.variant,
        "word": list(total.word),
        "depth": total.depth,
        "classical": bool(args.classical),
        "terms": rows,
    }
    report.rows = rows


def _cmd_brjuno_min(tk: BrjunoToolkit, args, report: Report) -> None:
    found = tk.brjuno_min(args.alphas, args.depth, args.variant)
    report.result = {
        "best_word": list(found.best_word),
        "best_value": report.real("best_value", found.best_value),
        "infimum": found.infimum_statement,
        "nodes_expanded": found.nodes_expanded,
        "nodes_pruned": found.nodes_pruned,
        "proof": found.proof,
        "excluded": [{"word": list(w), "reason": r} for w, r in found.excluded],
    }


def _cmd_height_bound(tk: BrjunoToolkit, args, report: Report) -> None:
    policy = args.word if args.word is not None else args.word_policy
    value, density, word = tk.height_bound(args.alphas, policy, args.depth, args.regime)
    report.result = {
        "height_bound": report.real("height_bound", value),
        "rotation_density": report.real("rotation_density", density),
        "regime": args.regime,
        "word": list(word),
        "c_univ": tk.config.constants.c_univ,
        "c_prime": tk.config.constants.c_prime,
    }


def _b_value(tk: BrjunoToolkit, args) -> RealScalar:
    if args.b is not None:
        return RealScalar.exact(parse_real(args.b), tk.config.precision_bits)
    if args.alphas is None:
        raise InvalidInputError("give --b or --alphas to compute the Brjuno value")
    policy = args.word if args.word is not None else args.word_policy
    return tk.brjuno(args.alphas, policy, args.depth, args.variant).value


def _cmd_radius_bound(tk: BrjunoToolkit, args, report: Report) -> None:
    b = _b_value(tk, args)
    report.result = {
        "b_value": report.real("b_value", b),
        "r_bound": report.real("r_bound", tk.radius_bound(b)),
        "c_radius": tk.config.constants.c_radius,
    }


def _cmd_dc_check(tk: BrjunoToolkit, args, report: Report) -> None:
    found = tk.dc_check(args.alphas, parse_real(args.C), parse_real(args.tau), args.Q)
    report.result = {
        "holds": found.holds,
        "q": found.q,
        "p": list(found.p),
        "margin": report.real("margin", found.margin),
        "failures": found.failures,
    }


def _cmd_dc_estimate(tk: BrjunoToolkit, args, report: Report) -> None:
    found = tk.dc_estimate(args.alphas, parse_real(args.tau), args.Q)
    report.result = {
        "estimate": report.real("estimate", found.margin),
        "q": found.q,
        "p": list(found.p),
    }


def _cmd_dual_check(tk: BrjunoToolkit, args, report: Report) -> None:
    found = tk.dual_check(args.alphas, parse_real(args.C_prime), parse_real(args.tau_prime), args.K)
    report.result = {
        "holds": found.holds,
        "p": list(found.p),
        "q": found.q,
        "value": report.real("value", found.value),
        "margin": report.real("margin", found.margin),
        "vectors_scanned": found.vectors_scanned,
    }


def _cmd_transference(tk: BrjunoToolkit, args, report: Report) -> None:
    tau = parse_real(args.tau)
    if args.inverse:
        report.result = {"tau": tk.transference(args.n, tau, "inverse")}
    else:
        report.result = {"tau_prime": tk.transference(args.n, tau, "forward")}


def _cmd_word_appendix(tk: BrjunoToolkit, args, report: Report) -> None:
    tau = parse_real(args.tau)
    if args.C is not None:
        C = parse_real(args.C)
    else:
        # scanned-in constant, kept strictly below the observed minimum
        C = tk.dc_estimate(args.alphas, tau, args.Q).margin.lo / 2
    trace = tk.word_appendix(args.alphas, C, tau, args.depth, args.mode, args.start, parse_real(args.k_step))
    steps = [
        {
            "depth": s.depth, "w": s.w, "q": s.q, "beta": float(s.beta), "j": s.j,
            "test": s.test, "tested_index": s.tested_index, "C_n": float(s.C_n),
        }
        for s in trace.steps
    ]
    envelope = [
        {
            "depth": r.depth, "weight": float(r.weight), "increment": float(r.increment),
            "envelope": float(r.envelope), "within": r.within,
        }
        for r in trace.envelope
    ]
    report.result = {
        "word": list(trace.word),
        "mode": trace.mode,
        "C": C,
        "tau": tau,
        "tau_prime": trace.tau_prime,
        "kappa": report.real("kappa", trace.kappa) if trace.kappa is not None else None,
        "k_fit": report.real("k_fit", trace.k_fit) if trace.k_fit is not None else None,
        "within_envelope": trace.within_envelope,
        "steps": steps,
        "envelope": envelope,
    }
    report.rows = steps


def _germ_from_args(tk: BrjunoToolkit, args) -> PowerSeriesGerm:
    if args.series is not None:
        data = _load_json(args.series)
        if "alpha" in data:
            return germ_from_json(data, tk.config.precision_bits)
        coeffs = series_from_json(data)
        higher = {n: coeffs[n] for n in range(2, len(coeffs)) if coeffs[n] != 0}
        return tk.make_germ(args.alpha, higher, args.order or len(coeffs) - 1)
    return tk.make_germ(args.alpha, parse_terms(args.coeffs or ""), args.order)


def _cmd_linearize(tk: BrjunoToolkit, args, report: Report) -> None:
    result = tk.linearize(_germ_from_args(tk, args), args.order)
    report.result = {
        "order": result.order,
        "min_divisor": result.min_divisor,
        "radius_estimate": result.radius_estimate,
        "residual": result.residual,
        "within_tolerance": result.within_tolerance,
        "h": series_to_json(result.h),
    }
    report.rows = [{"n": r["n"], "re": r["c"][0], "im": r["c"][1]} for r in report.result["h"]["coefficients"]]


def _h0_from_args(args, order: int):
    terms = parse_terms(args.h0 or "")
    if any(n < 2 for n in terms):
        raise InvalidInputError("--h0 lists the coefficients n >= 2; the linear one is 1")
    return from_terms([(1, 1.0)] + list(terms.items()), order)


def _perturb(family: List[PowerSeriesGerm], text: str) -> List[PowerSeriesGerm]:
    """Add delta to coefficient n of germ k, given as k:n:delta"""
    try:
        k, n, delta = text.split(":")
        k, n, delta = int(k), int(n), float(delta)
        germ = family[k - 1]
        coeffs = germ.coeffs.copy()
        coeffs[n] += delta
    except (ValueError, IndexError) as e:
        raise InvalidInputError(f"cannot apply perturbation {text!r}: {e}") from e
    family = list(family)
    family[k - 1] = PowerSeriesGerm(germ.alpha, coeffs, germ.precision_bits)
    return family


def _cmd_synth(tk: BrjunoToolkit, args, report: Report) -> None:
    if args.alphas is None:
        raise InvalidInputError("synth needs --alphas")
    order = args.order or tk.config.series_order
    family = tk.synth(_h0_from_args(args, order), args.alphas, order)
    report.result = {"order": order, "germs": [germ_to_json(g) for g in family]}


def _cmd_simul_check(tk: BrjunoToolkit, args, report: Report) -> None:
    if args.germs is not None:
        data = _load_json(args.germs)
        # a full synth report nests the family under "result"
        data = data.get("result", data) if isinstance(data, dict) else data
        entries = data.get("germs", []) if isinstance(data, dict) else data
        family = [germ_from_json(g, tk.config.precision_bits) for g in entries]
    else:
        if args.alphas is None:
            raise InvalidInputError("give --germs FILE or --alphas with --h0")
        order = args.order or tk.config.series_order
        family = tk.synth(_h0_from_args(args, order), args.alphas, order)
    if args.perturb:
        family = _perturb(family, args.perturb)
    result = tk.simul_check(family, args.order)
    report.result = {
        "linearizable": result.linearizable,
        "residuals": result.residuals,
        "commutators": {f"{i}-{j}": r for (i, j), r in result.commutators.items()},
        "h": series_to_json(result.h),
    }


def _cmd_radius_compare(tk: BrjunoToolkit, args, report: Report) -> None:
    germ = _germ_from_args(tk, args)
    b = RealScalar.exact(parse_real(args.b), tk.config.precision_bits) if args.b else None
    result, radius = tk.radius_compare(germ, b, args.depth, args.variant)
    report.result = {
        "b_value": report.real("b_value", radius.b_value),
        "r_est": radius.r_est,
        "r_bound": report.real("r_bound", radius.r_bound),
        "ratio": radius.ratio,
        "implied_constant": radius.implied_constant,
        "min_divisor": result.min_divisor,
        "residual": result.residual,
    }


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision-bits", type=int, dest="precision_bits",
                        help="Starting interval precision in bits (default: 128).")
    common.add_argument("--max-precision-bits", type=int, dest="max_precision_bits",
                        help="Cap for precision doubling (default: 4096).")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_const", const="json", dest="output", help="JSON report (default).")
    fmt.add_argument("--csv", action="store_const", const="csv", dest="output", help="CSV table.")
    common.add_argument("--threads", type=int, help="Worker threads for scans and searches.")
    common.add_argument("--tol", type=float, dest="tolerance", help="Linearization / commutation tolerance.")
    common.add_argument("--c-univ", type=float, dest="c_univ", help="Universal constant C of t(alpha).")
    common.add_argument("--c-prime", type=float, dest="c_prime", help="Additive constant C' of the height bound.")
    common.add_argument("--c-radius", type=float, dest="c_radius", help="Prefactor of the radius bound.")
    common.add_argument("--out", help="Write the report to this file instead of standard output.")
    common.add_argument("--log-level", default="WARNING", dest="log_level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Diagnostics on stderr.")
    return common


def _word_flags(p: argparse.ArgumentParser, default_policy: str = "constant:1") -> None:
    p.add_argument("--word", help="Explicit word, e.g. 1,2,1 (overrides --word-policy).")
    p.add_argument("--word-policy", dest="word_policy", default=default_policy,
                   help="constant:j, greedy, appendix:C,tau, min, or an explicit list.")
    p.add_argument("--depth", type=int, default=0, help="Word length for generated words.")


def _germ_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", default="golden", help="Rotation number (default: golden).")
    p.add_argument("--coeffs", help="Coefficients a_n, n >= 2, as n:re[:im],...")
    p.add_argument("--series", help="JSON file with a series or a germ.")
    p.add_argument("--order", type=int, help="Truncation order M.")


COMMANDS: Dict[str, Tuple[Callable, str]] = {
    "gauss-orbit": (_cmd_gauss_orbit, "Orbit of the Gauss map along a word."),
    "brjuno": (_cmd_brjuno, "Partial Brjuno sum along a word."),
    "brjuno-min": (_cmd_brjuno_min, "Minimum Brjuno sum over all words of a depth."),
    "height-bound": (_cmd_height_bound, "Arithmetic height bound and rotation density."),
    "radius-bound": (_cmd_radius_bound, "Siegel radius bound C exp(-2 pi B)."),
    "dc-check": (_cmd_dc_check, "Check the Diophantine condition up to Q."),
    "dc-estimate": (_cmd_dc_estimate, "Best Diophantine constant up to Q."),
    "dual-check": (_cmd_dual_check, "Check the dual linear form up to K."),
    "transference": (_cmd_transference, "Transference exponent arithmetic."),
    "word-appendix": (_cmd_word_appendix, "Constructive word selector with fitted constants."),
    "linearize": (_cmd_linearize, "Linearize a truncated germ."),
    "synth": (_cmd_synth, "Synthesize a commuting family h0 R h0^-1."),
    "simul-check": (_cmd_simul_check, "Test simultaneous linearization of a family."),
    "radius-compare": (_cmd_radius_compare, "Empirical radius against the bound."),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multi-brjuno", description="Multidimensional Brjuno toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    p = {name: sub.add_parser(name, parents=[common], help=text) for name, (_, text) in COMMANDS.items()}

    p["gauss-orbit"].add_argument("--alphas", required=True)
    p["gauss-orbit"].add_argument("--word", required=True)

    for name in ("brjuno", "height-bound", "radius-bound"):
        _word_flags(p[name])
    for name in ("brjuno", "brjuno-min", "radius-bound", "radius-compare"):
        p[name].add_argument("--variant", choices=["B", "Bprime"], default="B")
    p["brjuno"].add_argument("--alphas", required=True)
    p["brjuno"].add_argument("--classical", action="store_true",
                             help="One-variable sum along the regular continued fraction.")
    p["brjuno-min"].add_argument("--alphas", required=True)
    p["brjuno-min"].add_argument("--depth", type=int, required=True)
    p["height-bound"].add_argument("--alphas", required=True)
    p["height-bound"].add_argument("--regime", choices=["log", "loglog"], default="log")
    p["radius-bound"].add_argument("--alphas")
    p["radius-bound"].add_argument("--b", help="Brjuno value (otherwise computed from --alphas).")

    p["dc-check"].add_argument("--alphas", required=True)
    p["dc-check"].add_argument("--C", required=True)
    p["dc-check"].add_argument("--tau", required=True)
    p["dc-check"].add_argument("--Q", type=int, required=True)
    p["dc-estimate"].add_argument("--alphas", required=True)
    p["dc-estimate"].add_argument("--tau", required=True)
    p["dc-estimate"].add_argument("--Q", type=int, required=True)
    p["dual-check"].add_argument("--alphas", required=True)
    p["dual-check"].add_argument("--C-prime", dest="C_prime", required=True)
    p["dual-check"].add_argument("--tau-prime", dest="tau_prime", required=True)
    p["dual-check"].add_argument("--K", type=int, required=True)
    p["transference"].add_argument("--n", type=int, required=True)
    p["transference"].add_argument("--tau", required=True, help="tau, or tau' with --inverse.")
    p["transference"].add_argument("--inverse", action="store_true")

    wa = p["word-appendix"]
    wa.add_argument("--alphas", required=True)
    wa.add_argument("--C", help="Class constant (default: half the scanned estimate).")
    wa.add_argument("--tau", required=True)
    wa.add_argument("--Q", type=int, default=1000, help="Scan range for the default C.")
    wa.add_argument("--depth", type=int, required=True)
    wa.add_argument("--mode", choices=["proof", "greedy"], default="proof")
    wa.add_argument("--start", type=int, default=1)
    wa.add_argument("--k-step", dest="k_step", default="1")

    _germ_flags(p["linearize"])
    _germ_flags(p["radius-compare"])
    p["radius-compare"].add_argument("--b", help="Brjuno value (otherwise the sum along (1)^depth).")
    p["radius-compare"].add_argument("--depth", type=int, default=60)
    for name in ("synth", "simul-check"):
        p[name].add_argument("--h0", help="Coefficients h0_n, n >= 2, as n:re[:im],...")
        p[name].add_argument("--alphas")
        p[name].add_argument("--order", type=int)
    p["simul-check"].add_argument("--germs", help="JSON file written by synth.")
    p["simul-check"].add_argument("--perturb", help="k:n:delta, add delta to a_n of germ k.")
    return parser


def _config_from_args(args) -> RunConfig:
    try:
        base = RunConfig.from_env().to_dict()
        constants = base.pop("constants")
        for key in ("precision_bits", "max_precision_bits", "output", "threads", "tolerance"):
            value = getattr(args, key, None)
            if value is not None:
                base[key] = value
        c_univ = args.c_univ if args.c_univ is not None else constants["c_univ"]
        c_prime = args.c_prime
        # C' follows a command-line C unless the environment pins it
        if c_prime is None and (args.c_univ is None or os.getenv("MULTIBRJUNO_C_PRIME")):
            c_prime = constants["c_prime"]
        c_radius = args.c_radius if args.c_radius is not None else constants["c_radius"]
        return RunConfig(
            constants=ConstantsConfig(c_univ=c_univ, c_prime=c_prime, c_radius=c_radius), **base
        )
    except ValueError as e:
        raise ConfigurationError(str(e)) from e


def _render(report: Report, output: str, elapsed_ms: float, warnings: Sequence[str]) -> str:
    if output == "csv":
        rows = report.rows or [{k: v for k, v in report.result.items() if not isinstance(v, (list, dict))}]
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(plain(v)) if isinstance(v, (list, dict)) else plain(v) for k, v in row.items()})
        return buffer.getvalue()
    payload = {
        "command": report.command,
        "inputs": plain(report.inputs),
        "result": plain(report.result),
        "enclosures": report.enclosures,
        "warnings": list(warnings),
        "timing_ms": round(elapsed_ms, 3),
    }
    return json.dumps(payload, ensure_ascii=False) + "\n"


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """
    Execute one subcommand and write its report

    Returns:
        Exit code (0, 2, 3 or 4)
    """
    stdout = stdout or sys.stdout
    package_logger = logging.getLogger("multibrjuno")
    collector = _WarningCollector()
    previous_level = package_logger.level
    package_logger.addHandler(collector)
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        package_logger.setLevel(getattr(logging, args.log_level))
        config = _config_from_args(args)
        toolkit = BrjunoToolkit(config)
        inputs = {k: v for k, v in vars(args).items() if v is not None and k not in ("log_level", "out")}
        report = Report(args.command, inputs)
        COMMANDS[args.command][0](toolkit, args, report)
        text = _render(report, config.output, (time.perf_counter() - started) * 1000, collector.messages)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            stdout.write(text)
        return EXIT_OK
    except PrecisionError as e:
        logger.error(f"Precision: {e}")
        return EXIT_PRECISION
    except (InvalidInputError, ConfigurationError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except DomainError as e:
        logger.error(f"Domain error: {e}")
        return EXIT_DOMAIN
    except MultiBrjunoError as e:
        logger.error(f"Failed: {e}")
        return EXIT_INPUT
    finally:
        package_logger.removeHandler(collector)
        package_logger.setLevel(previous_level)


def main() -> None:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
