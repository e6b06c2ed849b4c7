"""Command-line front end: declarative configs in, CSV and reports out.

Subcommands
    bands       band scan (layer / transverse / effective / iwatsuka fibers)
                with flat-band detection and optional asymptote matching
    bottom      spectral bottom mu(B0, 1) of the field-parallel layer
    degeneracy  exact coincidences / near-degenerate pairs of the double ladder
    thin        thin-layer model error against the effective operator
    iwatsuka    assumption validation + bands + non-constancy certificate
    check       geometric admissibility report for a layer

Scan ranges use start:stop:count (inclusive linspace).  CSV files carry
'#' provenance comments (command, config hash, grid, tolerances) before
the header row; identical config and version give byte-identical CSV.
Exit codes: 0 ok, 2 validation, 3 solver, 4 certificate failed.
"""

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import closedform, geometry
from . import iwatsuka as iw
from .assembly import Grid
from .bands import (asymptote_match, band_scan, flat_band_detect,
                    suff_condition_check, thin_limit_study)
from .errors import (AssumptionError, ConfinementError, InvalidParameterError,
                     SolverError)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_CERTIFICATE = 4


# --- plumbing -------------------------------------------------------------------

def parse_grid(value):
    """A scan grid: start:stop:count, a single number, or a list."""
    if isinstance(value, (list, tuple, np.ndarray)):
        return np.asarray(value, dtype=float)
    text = str(value).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(
                f"range {text!r} must look like start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise InvalidParameterError("range count must be >= 1")
        return np.linspace(start, stop, count)
    return np.array([float(text)])


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _load_config(path):
    with open(path) as fh:
        return json.load(fh)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, comments, header, rows):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    return repr(obj)


def emit_report(args, report):
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
        print(f"report written to {args.report}")
    else:
        print(text)


def _report_skeleton(command, cfg, t0):
    return {"command": command, "config": cfg, "config_sha256": config_hash(cfg),
            "runtime_seconds": round(time.perf_counter() - t0, 3)}


# --- config -> domain objects ------------------------------------------------------

_FIELD_FAMILIES = {"step": iw.StepField, "bump": iw.BumpField,
                   "expdecay": iw.ExpDecayField, "gauss": iw.GaussField}


def _profile_from(cfg):
    cfg = dict(cfg)
    family = cfg.pop("family")
    return geometry.build_profile(family, **cfg)


def _field_from(cfg):
    if not cfg:
        return None
    cfg = dict(cfg)
    family = cfg.pop("family")
    if family not in _FIELD_FAMILIES:
        raise InvalidParameterError(
            f"unknown field family {family!r}; "
            f"expected one of {sorted(_FIELD_FAMILIES)}")
    return _FIELD_FAMILIES[family](**cfg)


def _well_from(cfg):
    if not cfg:
        return None
    cfg = dict(cfg)
    family = cfg.pop("family")
    if family != "polyexp":
        raise InvalidParameterError(
            f"unknown well family {family!r}; expected 'polyexp'")
    return iw.PolyExpWell(**cfg)


def _spec_from(cfg):
    return iw.IwatsukaSpec(b0=float(cfg["b0"]),
                           fld=_field_from(cfg.get("field")),
                           well=_well_from(cfg.get("well")),
                           alpha=float(cfg.get("alpha", -0.5)),
                           x1=float(cfg.get("x1", 0.0)))


def _band_csv(args, cfg, bands, extra_comments=()):
    if not args.out:
        return
    header = ["xi"] + [f"lambda_{m}" for m in range(1, bands.k + 1)]
    comments = [f"magbands bands kind={bands.kind}",
                f"config sha256: {config_hash(cfg)}",
                *extra_comments]
    rows = [(bands.xi[i], *bands.branches[i]) for i in range(bands.xi.size)]
    write_csv(args.out, comments, header, rows)
    print(f"wrote {args.out} ({bands.xi.size} rows, k={bands.k})")


# --- subcommands ----------------------------------------------------------------

def cmd_bands(args):
    t0 = time.perf_counter()
    cfg = _load_config(args.config)
    kind = cfg.get("kind", "layer")
    xi = parse_grid(cfg["xi"])
    k = int(cfg.get("k", 6))
    gcfg = cfg.get("grid", {})
    flat_tol = float(cfg.get("flat_tol", 1e-6))

    profile = None
    if kind == "layer":
        profile = _profile_from(cfg["profile"])
        layer = geometry.LayerConfig(profile, float(cfg["a"]), float(cfg["b0"]))
        grid = Grid.box(float(gcfg["half_length"]), int(gcfg["n_s"]),
                        int(gcfg["n_u"]))
        bands = band_scan("layer", xi, k, layer=layer, grid=grid,
                          e_max=cfg.get("e_max"), workers=args.workers)
    elif kind == "transverse":
        grid = Grid.interval(int(gcfg.get("n_u", 512)))
        bands = band_scan("transverse", xi, k, b0=float(cfg["b0"]),
                          a=float(cfg["a"]), grid=grid, workers=args.workers)
    elif kind == "effective":
        profile = _profile_from(cfg["profile"])
        grid = Grid.line(float(gcfg["half_length"]), int(gcfg["n_s"]))
        bands = band_scan("effective", xi, k, profile=profile,
                          b0=float(cfg["b0"]), grid=grid,
                          e_max=cfg.get("e_max"), workers=args.workers)
    elif kind == "iwatsuka":
        spec = _spec_from(cfg["spec"])
        if gcfg:
            grid = Grid.line(float(gcfg["half_length"]), int(gcfg["n_s"]))
        else:
            grid = iw.default_grid(spec, float(np.max(np.abs(xi))), k)
        bands = iw.iwatsuka_bands(spec, xi, k, grid=grid, workers=args.workers)
    else:
        raise InvalidParameterError(f"unknown band kind {kind!r}")

    flat = flat_band_detect(bands, flat_tol) if xi.size >= 5 else []
    match = None
    if cfg.get("asymptote_match") and kind == "layer":
        tail_minus, tail_plus = profile.tangent_tails()
        match = asymptote_match(bands, tail_plus[0], tail_minus[0],
                                layer.b0, layer.a)

    _band_csv(args, cfg, bands,
              [f"flat tolerance (relative oscillation): {flat_tol!r}"])
    report = _report_skeleton("bands", cfg, t0)
    report["outputs"] = {
        "kind": kind, "k": bands.k,
        "xi_window": [float(xi[0]), float(xi[-1])], "points": int(xi.size),
        "flat_branches": flat,
        "all_flat": bool(flat) and all(f["flat"] for f in flat),
        "asymptote_match": match,
    }
    emit_report(args, report)
    return EXIT_OK


def cmd_bottom(args):
    t0 = time.perf_counter()
    cfg = {"command": "bottom", "b0": args.b0}
    grid = parse_grid(args.b0)
    curve = closedform.bottom_curve(grid, workers=args.workers)
    if args.out:
        comments = ["magbands bottom: parallel-layer spectral bottom at a=1",
                    f"config sha256: {config_hash(cfg)}",
                    f"b0 grid: {args.b0} ({grid.size} points)",
                    "root solve: bracketing walk + brentq, rtol 8.9e-16"]
        write_csv(args.out, comments,
                  ["B0", "mu", "weak_asy", "strong_asy", "lower_bound"],
                  curve.rows())
        print(f"wrote {args.out} ({grid.size} rows)")
    report = _report_skeleton("bottom", cfg, t0)
    report["outputs"] = {
        "points": int(grid.size),
        "mu_min": float(curve.mu.min()), "mu_max": float(curve.mu.max()),
        "lower_bound_ok": bool(np.all(curve.mu > curve.lower_bound)),
    }
    emit_report(args, report)
    return EXIT_OK


def cmd_degeneracy(args):
    t0 = time.perf_counter()
    if args.theta is not None:
        cfg = {"command": "degeneracy", "theta": args.theta,
               "count": args.count}
        rep = closedform.degeneracy_enumerate(args.count,
                                              theta=Fraction(args.theta))
    elif args.theta_float is not None:
        cfg = {"command": "degeneracy", "theta_float": args.theta_float,
               "eps": args.eps}
        rep = closedform.degeneracy_enumerate(theta=args.theta_float,
                                              assume_irrational=True,
                                              eps=args.eps)
    elif args.b0 is not None and args.a is not None:
        if not args.assume_irrational:
            raise InvalidParameterError(
                "theta from (b0, a) is a float and cannot witness "
                "rationality; pass --assume-irrational or give --theta p/q")
        cfg = {"command": "degeneracy", "b0": args.b0, "a": args.a,
               "eps": args.eps}
        rep = closedform.degeneracy_enumerate(theta=None, b0=args.b0, a=args.a,
                                              assume_irrational=True,
                                              eps=args.eps)
    else:
        raise InvalidParameterError(
            "give --theta p/q, --theta-float x, or both --b0 and --a")

    theta_value = float(Fraction(rep.theta)) if rep.rationality.startswith(
        "rational") else float(rep.theta)
    rows = []
    for m, n, mt, nt in rep.exact_coincidences:
        level = theta_value * m + n * n
        rows.append(("exact", m, n, mt, nt, level, 0.0, 0.0))
    for pair in rep.near_pairs:
        m, n = pair.pair
        mt, nt = pair.pair_tilde
        level = theta_value * m + n * n
        rows.append(("near", m, n, mt, nt, level, pair.gap, pair.bound))

    if args.out:
        comments = ["magbands degeneracy: double-ladder coincidence table",
                    f"config sha256: {config_hash(cfg)}",
                    f"theta: {rep.theta} ({rep.rationality})",
                    "identity: theta*m + n^2 = theta*m~ + n~^2 (gap = difference)"]
        write_csv(args.out, comments,
                  ["kind", "m", "n", "m_tilde", "n_tilde", "level", "gap",
                   "bound"], rows)
        print(f"wrote {args.out} ({len(rows)} rows)")

    report = _report_skeleton("degeneracy", cfg, t0)
    report["outputs"] = {"rationality": rep.rationality,
                         "exact_count": len(rep.exact_coincidences),
                         "near_pairs": rep.near_pairs}
    emit_report(args, report)
    return EXIT_OK


def cmd_thin(args):
    t0 = time.perf_counter()
    cfg = _load_config(args.config)
    profile = _profile_from(cfg["profile"])
    rep = thin_limit_study(profile, float(cfg["b0"]),
                           float(cfg.get("xi", 0.0)), cfg["a_list"],
                           n_s=int(cfg.get("n_s", 2047)),
                           n_u=int(cfg.get("n_u", 64)),
                           half=cfg.get("half"))
    if args.out:
        comments = ["magbands thin: effective-model error vs half-width",
                    f"config sha256: {config_hash(cfg)}",
                    f"grid: n_s={rep.details['n_s']} n_u={rep.details['n_u']} "
                    f"half={rep.details['half']!r}",
                    f"fitted log-log slope: {rep.slope!r}"]
        write_csv(args.out, comments, ["a", "delta"],
                  list(zip(rep.a_values, rep.deltas)))
        print(f"wrote {args.out} ({rep.a_values.size} rows)")
    report = _report_skeleton("thin", cfg, t0)
    report["outputs"] = rep
    emit_report(args, report)
    return EXIT_OK


def cmd_iwatsuka(args):
    t0 = time.perf_counter()
    cfg = _load_config(args.config)
    spec = _spec_from(cfg["spec"] if "spec" in cfg else cfg)
    validation = iw.validate_field(spec)

    xi = parse_grid(cfg["xi"])
    k = int(cfg.get("k", 3))
    gcfg = cfg.get("grid", {})
    if gcfg:
        grid = Grid.line(float(gcfg["half_length"]), int(gcfg["n_s"]))
    else:
        grid = iw.default_grid(spec, float(np.max(np.abs(xi))), k)
    bands = iw.iwatsuka_bands(spec, xi, k, grid=grid, workers=args.workers)
    _band_csv(args, cfg, bands,
              [f"fiber grid: half={grid.half_length!r} n_s={grid.n_s}"])

    m = int(cfg.get("m", 1))
    cert = iw.nonconstancy_certificate(spec, m, xi_large=cfg.get("xi_large"),
                                       drop_tol=float(cfg.get("drop_tol",
                                                              iw.DROP_TOL)),
                                       band_tol=float(cfg.get("band_tol",
                                                              iw.BAND_TOL)))

    report = _report_skeleton("iwatsuka", cfg, t0)
    validation.pop("x_samples", None)
    validation.pop("r_samples", None)
    report["outputs"] = {"validation": validation, "certificate": cert,
                         "certificate_holds": cert.holds}
    emit_report(args, report)
    if not cert.holds:
        print("non-constancy certificate FAILED", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_check(args):
    t0 = time.perf_counter()
    cfg = _load_config(args.config)
    profile = _profile_from(cfg["profile"])
    layer = geometry.LayerConfig(profile, float(cfg["a"]), float(cfg["b0"]))
    assumptions = geometry.check_assumptions(layer)
    conditions = suff_condition_check(profile, layer.b0)

    if args.out:
        lo, hi = profile.support
        pad = max(2.0, 0.2 * (hi - lo))
        ss = np.linspace(lo - pad, hi + pad, int(cfg.get("n_points", 401)))
        xs, zs = geometry.curve_points(profile, ss)
        kap = profile.kappa(ss)
        comments = ["magbands check: sampled generating curve",
                    f"config sha256: {config_hash(cfg)}"]
        write_csv(args.out, comments, ["s", "x", "z", "kappa"],
                  list(zip(ss, xs, zs, kap)))
        print(f"wrote {args.out} ({ss.size} rows)")

    report = _report_skeleton("check", cfg, t0)
    report["outputs"] = {"assumptions": assumptions,
                         "sufficient_conditions": conditions,
                         "ok": assumptions.ok}
    emit_report(args, report)
    return EXIT_OK if assumptions.ok else EXIT_VALIDATION


# --- parser ---------------------------------------------------------------------

def _parser():
    from . import __version__

    top = argparse.ArgumentParser(
        prog="magbands",
        description="Band structures of magnetic Dirichlet layers and "
                    "Iwatsuka strips.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True,
                           help="JSON config file")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--report", help="JSON run-report path "
                                        "(default: print to stdout)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers for scans")

    p = sub.add_parser("bands", help="band scan over a momentum grid")
    common(p)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("bottom", help="parallel-layer spectral bottom curve")
    common(p, config=False)
    p.add_argument("--b0", default="0.05:6:60",
                   help="field grid start:stop:count (default 0.05:6:60)")
    p.set_defaults(func=cmd_bottom)

    p = sub.add_parser("degeneracy", help="double-ladder coincidence report")
    common(p, config=False)
    p.add_argument("--theta", help="exact rational theta, e.g. 1 or 3/2")
    p.add_argument("--theta-float", type=float,
                   help="irrational theta as a float (near-pair branch)")
    p.add_argument("--b0", type=float, help="field strength (with --a)")
    p.add_argument("--a", type=float, help="half-width (with --b0)")
    p.add_argument("--assume-irrational", action="store_true",
                   help="treat float theta as irrational")
    p.add_argument("--eps", type=float, default=0.1,
                   help="near-pair gap target (default 0.1)")
    p.add_argument("--count", type=int, default=10,
                   help="exact coincidences to emit (default 10)")
    p.set_defaults(func=cmd_degeneracy)

    p = sub.add_parser("thin", help="thin-layer effective-model error study")
    common(p)
    p.set_defaults(func=cmd_thin)

    p = sub.add_parser("iwatsuka",
                       help="validate, scan bands, certify non-constancy")
    common(p)
    p.set_defaults(func=cmd_iwatsuka)

    p = sub.add_parser("check", help="geometric admissibility report")
    common(p)
    p.set_defaults(func=cmd_check)

    return top


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfinementError, SolverError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "suggested_half_length", None) is not None:
            record["suggested_half_length"] = exc.suggested_half_length
        print(json.dumps(record), file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidParameterError, AssumptionError, KeyError, TypeError,
            ValueError, OSError, json.JSONDecodeError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
