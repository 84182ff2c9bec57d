"""``magic-lab`` command line.

Exit codes: 0 success, 1 a proven inequality was violated, 2 usage error,
3 memory budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from magic_lab import repro
from magic_lab.errors import ResourceError, SizeLimitError

DEFAULT_SEED = 12345
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _profile(args) -> repro.Profile:
    return repro.PROFILES[args.profile]


def _pick(value, default):
    return default if value is None else value


def cmd_fig1(args) -> int:
    grid = repro.parse_grid(args.n_grid or "0:15:0.05")
    rows = repro.fig1_rows(grid)
    path = _out(args, "fig1_deltam.csv")
    repro.write_csv(path, "fig1_deltam", ("n", "delta_m"), rows)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def cmd_fig2(args) -> int:
    prof = _profile(args)
    n = _pick(args.n_qubits, prof.n_qubits)
    if n % 2:
        raise UsageError("fig2 needs an even number of qubits")
    deltas = repro.parse_grid(args.delta) if args.delta else list(repro.FIG2_DELTAS)
    rows = []
    for d in deltas:
        row, _ = repro.xxz_point(n, d, _pick(args.chi, prof.chi), _pick(args.samples, prof.samples),
                                 _pick(args.chi_m2, prof.chi_m2), args.seed)
        rows.append(row)
        print(f"delta={d:+.4f} m1={row.m1_hat:.6f}+-{row.m1_stderr:.6f} m2={row.m2:.6f} [{row.status}]")
    path = _out(args, "fig2_xxz.csv")
    repro.write_csv(path, "fig2_xxz", repro.FIG2_COLUMNS, [r.as_tuple() for r in rows])
    print(f"wrote {path}")
    return EXIT_OK


def cmd_fig3(args) -> int:
    from magic_lab.symmetric import bound_c, m_n_psi_eps

    eps = 0.5 if args.eps is None else args.eps
    n = _pick(args.renyi, 2.0)
    if n <= 1:
        raise UsageError("fig3 needs a Renyi index n > 1")
    nmax = _pick(args.nmax, 60)
    c = bound_c(n, eps)
    rows = [(N, m_n_psi_eps(N, eps, n), c) for N in range(1, nmax + 1)]
    path = _out(args, "fig3_bound.csv")
    repro.write_csv(path, "fig3_bound", ("N", "m_n", "bound_c"), rows)
    worst = max(r[1] for r in rows)
    print(f"max M_n = {worst:.6f}, bound_c = {c:.6f}; wrote {path}")
    return EXIT_OK


def cmd_fig4(args) -> int:
    prof = _profile(args)
    table = repro.fig4_table(
        _pick(args.n_qubits, prof.n_qubits),
        0.95 if args.delta is None else float(args.delta),
        _pick(args.chi, prof.chi),
        repro.parse_int_list(args.samples_list) if args.samples_list else prof.sample_list,
        _pick(args.instances, prof.instances),
        _pick(args.samples, prof.ref_samples),
        args.seed,
    )
    path = _out(args, "fig4_sampling_error.csv")
    repro.write_csv(path, "fig4_sampling_error", ("S", "mean_abs_error"),
                    zip(table.sample_sizes, table.mean_abs_error))
    print(f"log-log slope {table.slope:.4f}; wrote {path}")
    return EXIT_OK


def cmd_fig6(args) -> int:
    prof = _profile(args)
    chi_list = repro.parse_int_list(args.chi_list) if args.chi_list else list(prof.chi_list)
    rows, ref = repro.fig6_rows(
        _pick(args.n_qubits, prof.n_qubits),
        0.95 if args.delta is None else float(args.delta),
        chi_list,
        _pick(args.chi_ref, prof.chi_ref),
        _pick(args.samples, prof.samples),
        _pick(args.chi_m2, max(prof.chi_m2, prof.chi_ref if args.profile == "desk" else prof.chi_m2)),
        args.seed,
    )
    path = _out(args, "fig6_bond.csv")
    data = [(r.chi, r.m1_hat, r.m2, r.fidelity_to_ref, r.m2_bond) for r in rows + [ref]]
    repro.write_csv(path, "fig6_bond", ("chi", "m1_hat", "m2", "fidelity_to_ref", "m2_bond"), data)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_check_inequalities(args) -> int:
    from magic_lab.monotones import inequality_fuzz

    qubits = repro.parse_int_list(args.n_qubits_list or "1,2,3")
    if max(qubits) > 3:
        raise UsageError("inequality checks need N <= 3")
    n_list = repro.parse_grid(args.n_grid or "0.5,2,3")
    rows = inequality_fuzz(qubits, n_list, _pick(args.num_states, 500), seed=args.seed)
    violations = [r for r in rows if min(r.slacks) < -1e-8]
    csv_path = _out(args, "inequality_fuzz.csv")
    repro.write_csv(csv_path, "inequality_fuzz",
                    ("state_seed", "n_qubits", "n", "slack_dmin_le_lr", "slack_mn_le_2lr", "slack_mn_le_dmin"),
                    [r.as_tuple() for r in rows])
    report = {
        "checked": len(rows),
        "violations": len(violations),
        "min_slack": {
            "dmin_le_lr": min(r.slack_dmin_le_lr for r in rows),
            "mn_le_2lr": min((r.slack_mn_le_2lr for r in rows if r.slack_mn_le_2lr is not None),
                             default=None),
            "mn_le_dmin": min((r.slack_mn_le_dmin for r in rows if r.slack_mn_le_dmin is not None),
                              default=None),
        },
        "pass": not violations,
    }
    path = _out(args, "inequalities.json")
    path.write_text(json.dumps(report, indent=2))
    print(json.dumps(report))
    return EXIT_OK if not violations else EXIT_VIOLATION


def cmd_search_violation(args) -> int:
    from magic_lab.protocols import gradient_search, rounding_hints

    n_qubits = _pick(args.n_qubits, 4)
    if not 1 <= n_qubits <= 5:
        raise UsageError("search needs 1 <= N <= 5")
    res = gradient_search(n_qubits, _pick(args.renyi, 1.0), _pick(args.restarts, 50),
                          max_iters=args.max_iters, step_size=args.step_size, rng=args.seed)
    payload = json.loads(res.to_json())
    payload["rounding_hints"] = [
        {"amplitude": [a.real, a.imag], "nearest": [g.real, g.imag], "distance": d}
        for a, g, d in rounding_hints(res.state.amplitudes)
    ]
    path = _out(args, f"violation_N{n_qubits}.json")
    path.write_text(json.dumps(payload, indent=2))
    print(json.dumps({"n_qubits": n_qubits, "n": res.n, "delta_n": res.delta_n,
                      "violation_found": res.delta_n < 0, "restarts_used": res.restarts_used}))
    return EXIT_OK


def _load_state(path):
    from magic_lab.states import DenseState

    return DenseState.from_json(Path(path).read_text())


def cmd_se(args) -> int:
    from magic_lab.entropy import se_curve

    state = _load_state(args.state)
    grid = repro.parse_grid(args.n_grid or "0,0.5,1,2,3")
    vals = se_curve(state, grid)
    path = _out(args, "se_curve.csv")
    repro.write_csv(path, "se_curve", ("n", "m_n"), [(v.renyi_index, v.value) for v in vals])
    for v in vals:
        print(f"{v.renyi_index:g},{v.value:.12g}")
    return EXIT_OK


def cmd_xi(args) -> int:
    from magic_lab.pauli import xi_distribution

    dist = xi_distribution(_load_state(args.state))
    path = _out(args, "xi_distribution.csv")
    dist.to_csv(path)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_mps_se(args) -> int:
    from magic_lab.mps import MPS, replica_m_n
    from magic_lab.mps.sampling import estimate_m1

    mps = MPS.load(args.mps)
    m2 = replica_m_n(mps, 2)
    m1, se = estimate_m1(mps, _pick(args.samples, 10_000), args.seed)
    print(json.dumps({"n_qubits": mps.n_qubits, "m2": m2, "m1_hat": m1, "m1_stderr": se}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"root seed (default {DEFAULT_SEED})")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--profile", choices=sorted(repro.PROFILES), default="desk")
    common.add_argument("--n-grid", help="Renyi indices: start:stop:step or a comma list")
    common.add_argument("--eps", type=float)
    common.add_argument("--delta", help="anisotropy value(s): comma list or start:stop:step")
    common.add_argument("--chi", type=int, help="DMRG bond dimension")
    common.add_argument("--samples", type=int, help="Pauli samples per estimate")
    common.add_argument("--restarts", type=int)
    common.add_argument("--nmax", type=int)
    common.add_argument("--n-qubits", type=int)
    common.add_argument("--renyi", type=float, help="Renyi index n")
    common.add_argument("--chi-m2", type=int, help="bond dimension used by the replica M_2 contraction")

    p = argparse.ArgumentParser(prog="magic-lab", description="Stabilizer entropy and magic-monotone toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("fig1", parents=[common], help="SE change of the counterexample protocol").set_defaults(fn=cmd_fig1)
    sub.add_parser("fig2", parents=[common], help="XXZ chain m1 and m2 against anisotropy").set_defaults(fn=cmd_fig2)
    sub.add_parser("fig3", parents=[common], help="symmetric family against its large-N bound").set_defaults(fn=cmd_fig3)
    f4 = sub.add_parser("fig4", parents=[common], help="sampling error against sample count")
    f4.add_argument("--samples-list")
    f4.add_argument("--instances", type=int)
    f4.set_defaults(fn=cmd_fig4)
    f6 = sub.add_parser("fig6", parents=[common], help="convergence in the bond dimension")
    f6.add_argument("--chi-list")
    f6.add_argument("--chi-ref", type=int)
    f6.set_defaults(fn=cmd_fig6)
    ci = sub.add_parser("check-inequalities", parents=[common], help="fuzz the monotone inequalities")
    ci.add_argument("--n-qubits-list")
    ci.add_argument("--num-states", type=int)
    ci.set_defaults(fn=cmd_check_inequalities)
    sv = sub.add_parser("search-violation", parents=[common], help="gradient search for strong-monotonicity violations")
    sv.add_argument("--max-iters", type=int, default=2000)
    sv.add_argument("--step-size", type=float, default=0.05)
    sv.set_defaults(fn=cmd_search_violation)
    se = sub.add_parser("se", parents=[common], help="SE curve of a JSON state")
    se.add_argument("state")
    se.set_defaults(fn=cmd_se)
    xi = sub.add_parser("xi", parents=[common], help="export the Pauli distribution of a JSON state")
    xi.add_argument("state")
    xi.set_defaults(fn=cmd_xi)
    ms = sub.add_parser("mps-se", parents=[common], help="M2 (replica) and sampled M1 of an MPS file")
    ms.add_argument("mps")
    ms.set_defaults(fn=cmd_mps_se)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, SizeLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
