"""Command-line interface.

Subcommands: ``spectrum`` (one experiment, table to stdout), ``sweep``
(grid to CSV), ``figure`` (bundled reference data sets), ``bounds``
(bound values next to measured quantities).  Exit codes: 0 success,
1 configuration error, 2 numerical failure, 3 sweep finished with failed
cells.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from .bench import (
    FIGURE_NAMES,
    config_float,
    config_int_list,
    figure_recipe,
    fourier_radius_study,
    parse_config,
    map_from_config,
    run_sweep,
    sweep_config_from_file,
    write_radius_records,
)
from .edmd import build_finite, nodes_equidistant
from .errors import ConfigError, EdmdMapError
from .observables import gram_infinite, monomial_basis
from .spectral import GAMMA, eigenvalues, pseudoinverse, schur_bound, spectral_norm
from .transfer import (
    derivative_sum_estimate,
    projection_error_bound,
    schedule_regime,
    transfer_matrix_affine,
    transfer_matrix_analytic,
)


def _apply_overrides(config, args):
    if getattr(args, "eps", None) is not None:
        config = replace(config, eps_pinv=args.eps)
    if getattr(args, "quad_order", None) is not None:
        config = replace(config, quad_order=args.quad_order)
    return config


def _cmd_spectrum(args) -> int:
    raw = parse_config(Path(args.config).read_text())
    config = _apply_overrides(sweep_config_from_file(args.config), args)
    n = config.n_values[0]
    m = config.m_values[0] if config.m_values else config.cells()[0][1]
    config = replace(
        config, n_values=(n,), m_values=(m,), schedule=None, eigen_indices=None, out_path=None
    )
    records = run_sweep(config)
    failed = [rec for rec in records if rec.status != "ok"]
    if failed:
        print(f"cell N={n}, M={'inf' if m is None else m} failed: {failed[0].status}")
        return 2
    print(f"map spectrum, N={n}, M={'inf' if m is None else m} "
          f"(eps-truncation rank {records[0].eps_rank})")
    print(f"{'n':>3} {'re(approx)':>22} {'im(approx)':>22} {'re(exact)':>22} {'delta':>12}")
    for rec in records:
        print(
            f"{rec.index:>3} {rec.approx.real:>22.15e} {rec.approx.imag:>22.15e} "
            f"{rec.exact.real:>22.15e} {rec.delta:>12.3e}"
        )
    if "L_method" in raw:
        _print_transfer_spectrum(raw, config.imap, n)
    return 0


def _print_transfer_spectrum(raw, imap, n) -> None:
    """Companion table: eigenvalues of the truncated transfer matrix."""
    method = raw["L_method"]
    rho = config_float(raw, "rho", 1.0)
    affine = all(branch.affine is not None for branch in imap.branches)
    if method == "auto":
        method = "affine" if affine else "cauchy"
    if method == "affine":
        tm = transfer_matrix_affine(imap, n, rho=rho)
    elif method == "cauchy":
        tm = transfer_matrix_analytic(
            imap,
            n,
            rho=rho,
            sample_radius=config_float(raw, "sample_radius", 1.1),
            samples=int(config_float(raw, "samples", 4096)),
        )
    else:
        raise ConfigError(f"unknown L_method {raw['L_method']!r}; use auto, affine or cauchy")
    values = eigenvalues(tm.l).values
    print(f"transfer matrix L_N spectrum ({tm.method}, rho={tm.rho}):")
    for i, value in enumerate(values):
        print(f"{i:>3} {value.real:>22.15e} {value.imag:>22.15e}")


def _cmd_sweep(args) -> int:
    config = _apply_overrides(sweep_config_from_file(args.config), args)
    config = replace(config, out_path=args.out)
    records = run_sweep(config, threads=args.threads)
    failed = sum(1 for rec in records if rec.status != "ok")
    print(f"wrote {len(records)} rows to {args.out}" + (f" ({failed} failed)" if failed else ""))
    return 3 if failed else 0


def _cmd_figure(args) -> int:
    recipe = figure_recipe(args.name)
    if recipe[0] == "radius":
        _, a_values, n_values = recipe
        write_radius_records(fourier_radius_study(a_values, n_values), args.out)
        print(f"wrote radius study ({args.name}) to {args.out}")
        return 0
    config = _apply_overrides(recipe[1], args)
    records = run_sweep(replace(config, out_path=args.out), threads=args.threads)
    failed = sum(1 for rec in records if rec.status != "ok")
    print(f"wrote {len(records)} rows ({args.name}) to {args.out}"
          + (f" ({failed} failed)" if failed else ""))
    return 3 if failed else 0


def _cmd_bounds(args) -> int:
    raw = parse_config(Path(args.config).read_text())
    imap = map_from_config(raw)
    n_values = config_int_list(raw.get("N", "10"), "N")
    m_values = [
        m for m in (None if p.strip() == "inf" else p for p in raw.get("M", "1000").split(","))
        if m is not None
    ]
    m_values = config_int_list(",".join(m_values), "M") if m_values else ()
    d = imap.n_branches
    g_factor = max(imap.deriv_sup, 2.0 * (d - 1))

    print(f"map: {imap.spectrum_kind or 'custom'}, branches d = {d}, "
          f"||T'|| = {imap.deriv_sup:.6g}")

    if imap.expansion_params is not None:
        r, big_r = imap.expansion_params
        rho = config_float(raw, "rho", math.sqrt(r * big_r))
        sup = derivative_sum_estimate(imap, big_r)
        flag = schedule_regime(r, big_r)
        print(f"expansion params (uncertified): r = {r}, R = {big_r}; "
              f"schedule regime r/R < 1/gamma: {flag}")
        print(f"projection bound, rho = {rho:.6g}, est. sup sum|phi'| = {sup:.6g}:")
        for n in n_values:
            line = (f"  N={n:3d}  C((rho/R)^N + (r/rho)^N) = "
                    f"{projection_error_bound(r, big_r, rho, n, sup):.6e}")
            if flag:
                # schedule-regime decay factor, up to an unspecified constant
                line += f"   (gamma r/R)^(N/2) = {(GAMMA * r / big_r) ** (n / 2):.3e}"
            print(line)
    else:
        print("no (r, R) expansion parameters in config; projection bound skipped")

    print("collocation bounds (monomials) vs measured spectral norms:")
    for n in n_values:
        h_exact = gram_infinite(monomial_basis(n))
        for m in m_values:
            pair = build_finite(imap, monomial_basis(n), nodes_equidistant(m))
            dh = spectral_norm(h_exact - pair.h)
            bound_h = 1.5 * n * n / m
            print(f"  N={n:3d} M={m:7d}  ||H-H^(M)||_2 = {dh:.3e} <= {bound_h:.3e}"
                  f"  schur(H^(M)) = {schur_bound(pair.h):.4f} >= "
                  f"||H^(M)||_2 = {spectral_norm(pair.h):.4f}"
                  f"  G-bound = {1.5 * g_factor * n * n / m:.3e}")

    print("pseudoinverse growth diagnostic (never asserted):")
    ref = 2.0 * math.log(1.0 + math.sqrt(2.0))
    for n in n_values:
        h = gram_infinite(monomial_basis(n))
        log_norm = math.log(spectral_norm(pseudoinverse(h, 0.0)))
        print(f"  N={n:3d}  log||pinv(H_N)|| = {log_norm:8.3f}"
              f"  (reference slope 2 log(1+sqrt 2) = {ref:.4f}, slope*N = {ref * n:.3f})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="edmdmap",
        description="EDMD spectra of transfer/Koopman operators for interval maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_threads=True):
        p.add_argument("--eps", type=float, default=None, help="pseudoinverse threshold override")
        p.add_argument("--quad-order", dest="quad_order", type=int, default=None,
                       help="Gauss-Legendre order override")
        if needs_threads:
            p.add_argument("--threads", type=int, default=1, help="worker threads (speed only)")

    p_spec = sub.add_parser("spectrum", help="print one EDMD spectrum with exact values")
    p_spec.add_argument("--config", required=True)
    add_common(p_spec, needs_threads=False)

    p_sweep = sub.add_parser("sweep", help="run a (N, M) grid and write CSV")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    add_common(p_sweep)

    p_fig = sub.add_parser("figure", help="write one of the bundled reference data sets")
    p_fig.add_argument("--name", required=True, choices=FIGURE_NAMES)
    p_fig.add_argument("--out", required=True)
    add_common(p_fig)

    p_bounds = sub.add_parser("bounds", help="print bound values next to measurements")
    p_bounds.add_argument("--config", required=True)

    args = parser.parse_args(argv)
    handlers = {
        "spectrum": _cmd_spectrum,
        "sweep": _cmd_sweep,
        "figure": _cmd_figure,
        "bounds": _cmd_bounds,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except EdmdMapError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
