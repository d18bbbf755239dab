"""Command line front end.

Three command families: ``rates`` writes sweep tables as CSV (with ``#``
metadata comment lines before the header), ``net`` answers one-off
questions about a network file, and ``sim`` runs coding experiments.
Randomized commands require an explicit ``--seed`` and produce
byte-identical output when rerun with the same arguments.

Exit codes: 0 on success, 2 for configuration or usage errors, 3 when a
size guard refuses an enumeration.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import sys
from typing import Optional, Sequence

import numpy as np

from . import netgraph, rates, transform
from .compcode import end_to_end_experiment
from .errors import ConfigError, GuardExceeded
from .rng import substream
from .shannon import db_to_linear
from .sources import IIDSource, TypeFunction, build_source, unit_sum
from .transform import draw_identity_channel


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.10g}"


def _write_csv(out: Optional[str], meta: list[str], header: list[str], rows: list[list]):
    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        for line in meta:
            handle.write(f"# {line}\r\n")
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if out:
            handle.close()


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like start:stop:step, got {text!r}")
    start, stop, step = (float(x) for x in parts)
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    values = []
    x = start
    while x <= stop + 1e-9:
        values.append(round(x, 9))
        x += step
    return values


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_nodes(text: str) -> list:
    # Node ids may be ints or strings depending on the network file.
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(int(tok) if tok.lstrip("-").isdigit() else tok)
    return out


# ---------------------------------------------------------------------------
# rates family
# ---------------------------------------------------------------------------


def _cmd_mac_sum(args) -> int:
    P = db_to_linear(args.power_db)
    rows = rates.mac_sum_sweep(P, args.k_max)
    meta = ["command=rates mac-sum", f"power_db={_fmt(args.power_db)}", f"k_max={args.k_max}"]
    _write_csv(args.out, meta, ["K", "computation", "separation", "cutset"],
               [[r["K"], r["computation"], r["separation"], r["cutset"]] for r in rows])
    return 0


def _cmd_dsbs(args) -> int:
    P = db_to_linear(args.power_db)
    alphas = _parse_grid(args.alpha_grid)
    betas = _parse_grid(args.beta_grid) if args.beta_grid else None
    rows = rates.dsbs_orthogonal_sweep(P, alphas, betas)
    meta = ["command=rates dsbs-orthogonal", f"power_db={_fmt(args.power_db)}",
            f"alpha_grid={args.alpha_grid}"]
    if args.beta_grid:
        meta.append(f"beta_grid={args.beta_grid}")
    _write_csv(args.out, meta, ["alpha", "hybrid", "separation", "linear", "cutset"],
               [[r["alpha"], r["hybrid"], r["separation"], r["linear"], r["cutset"]] for r in rows])
    return 0


def _cmd_superposition(args) -> int:
    P = db_to_linear(args.power_db)
    if args.h2 is not None:
        h2_values = [args.h2]
        grid_echo = f"h2={_fmt(args.h2)}"
    else:
        h2_values = _parse_grid(args.h2_grid)
        grid_echo = f"h2_grid={args.h2_grid}"
    rows = rates.superposition_sweep(P, h2_values)
    meta = ["command=rates superposition", f"power_db={_fmt(args.power_db)}", grid_echo]
    _write_csv(args.out, meta, ["h2", "superposition", "equal_layer", "cutset"],
               [[r["h2"], r["superposition"], r["equal_layer"], r["cutset"]] for r in rows])
    return 0


def _cmd_fading(args) -> int:
    powers_db = _parse_floats(args.power_db)
    if not powers_db:
        raise ConfigError("at least one power is required")
    powers = [db_to_linear(x) for x in powers_db]
    src = IIDSource(2, args.k_users)
    report = rates.fading_report(args.k_users, powers, src, unit_sum(2, args.k_users),
                                 args.trials, substream(args.seed))
    meta = ["command=rates fading", f"k_users={args.k_users}", f"power_db={args.power_db}",
            f"trials={args.trials}", f"seed={args.seed}"]
    rows = [[db, rate, err, report.gap_bound]
            for db, rate, err in zip(powers_db, report.rates, report.stderrs)]
    _write_csv(args.out, meta, ["power_db", "rate", "stderr", "gap_bound"], rows)
    return 0


# ---------------------------------------------------------------------------
# net family
# ---------------------------------------------------------------------------


def _load_net(path: str) -> netgraph.NetworkSpec:
    try:
        with open(path) as handle:
            return netgraph.load_network(handle.read())
    except OSError as exc:
        raise ConfigError(f"cannot read network file: {exc}") from exc


_MINCUT_SUBSET_GUARD = 16


def _sender_indices(net: netgraph.NetworkSpec, text: str) -> tuple[int, ...]:
    # Accept sender node ids or 0-based positions in the sender list.
    by_name = {str(s): i for i, s in enumerate(net.senders)}
    out = []
    for tok in _parse_nodes(text):
        if str(tok) in by_name:
            out.append(by_name[str(tok)])
        elif isinstance(tok, int) and 0 <= tok < len(net.senders):
            out.append(tok)
        else:
            raise ConfigError(f"unknown sender {tok!r}; senders are {list(net.senders)}")
    return tuple(out)


def _cmd_mincut(args) -> int:
    net = _load_net(args.net_file)
    P = db_to_linear(args.power_db)
    if args.sigma:
        subsets = [_sender_indices(net, args.sigma)]
    else:
        if len(net.senders) > _MINCUT_SUBSET_GUARD:
            raise GuardExceeded(
                f"{len(net.senders)} senders means {2 ** len(net.senders) - 1} subsets; "
                f"pass --sigma to query one")
        subsets = []
        for size in range(1, len(net.senders) + 1):
            subsets.extend(itertools.combinations(range(len(net.senders)), size))
    rows = [["+".join(str(net.senders[i]) for i in sigma),
             netgraph.min_cut(net, sigma, args.mode, P)]
            for sigma in subsets]
    meta = ["command=net mincut", f"net_file={args.net_file}", f"mode={args.mode}",
            f"power_db={_fmt(args.power_db)}"]
    if args.mode != "capacity":
        # Summary rates for i.i.d. uniform bits per sender and the mod-2 sum
        # of all of them, the reference workload for these networks.
        rate_mode = "mac" if args.mode.startswith("mac") else "ptp"
        src = IIDSource(2, len(net.senders))
        report = rates.net_achievable_rate(net, src, unit_sum(2, len(net.senders)),
                                           P, mode=rate_mode)
        meta.append(f"rate_mode={rate_mode}")
        meta.append(f"achievable={_fmt(report.achievable)}")
        meta.append(f"cutset={_fmt(report.cutset)}")
        if report.separation is not None:
            meta.append(f"separation={_fmt(report.separation)}")
    _write_csv(args.out, meta, ["sigma", "cut"], rows)
    return 0


def _lift_for_cli(args, field) -> netgraph.FiniteFieldNet:
    if args.lift == "diamond":
        return netgraph.diamond_field_net(field)
    if args.net_file is None:
        raise ConfigError("--net-file is required unless --lift diamond")
    net = _load_net(args.net_file)
    return (netgraph.lift_ptp if args.lift == "ptp" else netgraph.lift_mac)(net, field)


def _cmd_transform_test(args) -> int:
    from .gf import PrimeField

    field = PrimeField(args.q)
    lifted = _lift_for_cli(args, field)
    if args.unfold_T:
        lifted = netgraph.unfold(lifted, args.unfold_T).net
    full_rank = 0
    identity_checks = 0
    identity_failures = 0
    for index in range(args.seeds):
        rng = substream(args.seed, index)
        code = transform.assign_random_code(lifted, args.n, args.tau, rng)
        chan = transform.end_to_end_matrices(code)
        if not chan.all_full_rank:
            continue
        full_rank += 1
        adapter = transform.precode_and_channel(code, chan)
        payload = rng.integers(0, args.q, size=(lifted.K, adapter.width, args.payloads),
                               dtype=np.int64)
        got = adapter.transmit(payload)
        want = payload.sum(axis=0) % args.q
        bad = int(np.count_nonzero(np.any(got != want, axis=0)))
        identity_checks += args.payloads
        identity_failures += bad
    print(f"q={args.q}")
    print(f"n={args.n}")
    print(f"tau={args.tau}")
    print(f"seeds={args.seeds}")
    print(f"full_rank={full_rank}")
    print(f"full_rank_fraction={_fmt(full_rank / args.seeds)}")
    print(f"identity_checks={identity_checks}")
    print(f"identity_failures={identity_failures}")
    return 0 if identity_failures == 0 else 1


# ---------------------------------------------------------------------------
# sim family
# ---------------------------------------------------------------------------


def _cmd_end_to_end(args) -> int:
    if args.alpha is not None:
        if args.k_users != 2 or args.p != 2:
            raise ConfigError("--alpha describes a two-user binary source")
        src = build_source("dsbs", alpha=args.alpha)
    else:
        src = IIDSource(args.p, args.k_users)
    func = unit_sum(args.p, args.k_users) if args.func == "sum" else TypeFunction(args.p)
    channel = None
    if args.net_file or args.lift == "diamond":
        if args.q is None or args.tau is None:
            raise ConfigError("a network channel needs --q and --tau")
        from .gf import PrimeField

        lifted = _lift_for_cli(args, PrimeField(args.q))
        channel, _ = draw_identity_channel(lifted, args.n, args.tau, substream(args.seed, 2))
    margins = _parse_floats(args.margin)
    if not margins:
        raise ConfigError("at least one margin is required")
    if args.trials <= 0:
        raise ConfigError("--trials must be positive")
    results = [end_to_end_experiment(channel, src, func, args.block_k, margin,
                                     args.trials, args.seed, q=args.q)
               for margin in margins]
    meta = ["command=sim end-to-end", f"p={args.p}", f"k_users={args.k_users}",
            f"func={args.func}", f"q={results[0].q}", f"block_k={args.block_k}",
            f"margin={args.margin}", f"trials={args.trials}", f"seed={args.seed}"]
    if args.alpha is not None:
        meta.append(f"alpha={_fmt(args.alpha)}")
    if channel is not None:
        meta.append(f"net_file={args.net_file or 'builtin'}")
        meta.append(f"lift={args.lift}")
        meta.append(f"tau={args.tau}")
        meta.append(f"n={args.n}")
    rows = []
    for margin, res in zip(margins, results):
        total = sum(res.n_values)
        rate = res.k / total if total else float("inf")
        rows.append([margin, rate, res.error_rate, res.trials, args.seed])
    _write_csv(args.out, meta, ["margin", "rate", "error_rate", "trials", "seed"], rows)
    return 0


# ---------------------------------------------------------------------------
# dispatchers and parser
# ---------------------------------------------------------------------------


_RATES_DISPATCH = {
    "mac-sum": _cmd_mac_sum,
    "dsbs-orthogonal": _cmd_dsbs,
    "superposition": _cmd_superposition,
    "fading": _cmd_fading,
}

_NET_DISPATCH = {
    "mincut": _cmd_mincut,
    "transform-test": _cmd_transform_test,
}

_SIM_DISPATCH = {
    "end-to-end": _cmd_end_to_end,
}


def cmd_rates(args) -> int:
    """Run one of the rate sweep scenarios and write its CSV table."""
    return _RATES_DISPATCH[args.scenario](args)


def cmd_net(args) -> int:
    """Answer a one-off question about a network file."""
    return _NET_DISPATCH[args.question](args)


def cmd_sim(args) -> int:
    """Run a coding experiment and write its CSV table."""
    return _SIM_DISPATCH[args.experiment](args)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compnet",
        description="Computation rates, network tools, and coding experiments "
                    "for in-network function computation.")
    sub = parser.add_subparsers(dest="command", required=True)

    rates_p = sub.add_parser("rates", help="rate sweeps written as CSV")
    rates_p.set_defaults(handler=cmd_rates)
    rsub = rates_p.add_subparsers(dest="scenario", required=True)

    mac = rsub.add_parser("mac-sum", help="sum of K uniform bits over an equal-gain adder")
    mac.add_argument("--power-db", type=float, default=15.0)
    mac.add_argument("--k-max", type=int, default=30)
    mac.add_argument("--out")

    dsbs = rsub.add_parser("dsbs-orthogonal",
                           help="correlated binary pair over orthogonal links")
    dsbs.add_argument("--power-db", type=float, default=15.0)
    dsbs.add_argument("--alpha-grid", default="0:0.5:0.025")
    dsbs.add_argument("--beta-grid", default=None,
                      help="auxiliary flip grid for the hybrid column (default 0:0.5:0.025)")
    dsbs.add_argument("--out")

    sup = rsub.add_parser("superposition", help="two-user adder with unequal gains")
    sup.add_argument("--power-db", type=float, default=15.0)
    sup.add_argument("--h2", type=float, default=None,
                     help="single strong-user gain; overrides --h2-grid")
    sup.add_argument("--h2-grid", default="1:2:0.05")
    sup.add_argument("--out")

    fad = rsub.add_parser("fading", help="Monte Carlo rate under power fading")
    fad.add_argument("--k-users", type=int, default=2)
    fad.add_argument("--power-db", default="0,5,10,15,20",
                     help="comma-separated powers in dB")
    fad.add_argument("--trials", type=int, default=10000)
    fad.add_argument("--seed", type=int, required=True)
    fad.add_argument("--out")

    net_p = sub.add_parser("net", help="questions about one network file")
    net_p.set_defaults(handler=cmd_net)
    nsub = net_p.add_subparsers(dest="question", required=True)

    cut = nsub.add_parser("mincut", help="cut values toward the receiver, per sender subset")
    cut.add_argument("--net-file", required=True)
    cut.add_argument("--mode", default="ptp",
                     choices=["ptp", "mac", "mac_forwarding", "capacity"])
    cut.add_argument("--power-db", type=float, default=15.0)
    cut.add_argument("--sigma", default=None,
                     help="comma-separated sender ids; default enumerates all subsets")
    cut.add_argument("--out")

    tt = nsub.add_parser("transform-test",
                         help="lift to a finite field and verify the adder reduction")
    tt.add_argument("--net-file", default=None,
                    help="network file; not needed with --lift diamond")
    tt.add_argument("--lift", default="ptp", choices=["ptp", "mac", "diamond"],
                    help="ptp/mac lift the file; diamond uses the built-in example")
    tt.add_argument("--q", type=int, required=True)
    tt.add_argument("--n", type=int, default=1)
    tt.add_argument("--tau", type=int, required=True)
    tt.add_argument("--unfold-T", type=int, default=None)
    tt.add_argument("--seeds", type=int, default=200,
                    help="number of independent code draws")
    tt.add_argument("--payloads", type=int, default=100,
                    help="random payload blocks checked per full-rank draw")
    tt.add_argument("--seed", type=int, required=True)

    sim_p = sub.add_parser("sim", help="coding experiments")
    sim_p.set_defaults(handler=cmd_sim)
    ssub = sim_p.add_subparsers(dest="experiment", required=True)

    e2e = ssub.add_parser("end-to-end", help="block error rate of the full pipeline")
    e2e.add_argument("--p", type=int, default=2)
    e2e.add_argument("--k-users", type=int, default=2)
    e2e.add_argument("--alpha", type=float, default=None,
                     help="correlation parameter for the two-user binary source")
    e2e.add_argument("--func", default="sum", choices=["sum", "type"])
    e2e.add_argument("--q", type=int, default=None)
    e2e.add_argument("--block-k", type=int, default=8)
    e2e.add_argument("--margin", default="0.1", help="comma-separated margins")
    e2e.add_argument("--trials", type=int, default=200)
    e2e.add_argument("--seed", type=int, required=True)
    e2e.add_argument("--lift", default="ptp", choices=["ptp", "mac", "diamond"],
                    help="ptp/mac lift the file; diamond uses the built-in example")
    e2e.add_argument("--net-file", default=None,
                     help="run over a lifted network instead of the ideal adder")
    e2e.add_argument("--tau", type=int, default=None)
    e2e.add_argument("--n", type=int, default=1)
    e2e.add_argument("--out")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
