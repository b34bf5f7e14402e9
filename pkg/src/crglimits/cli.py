"""Command-line surface: samplers, urns, finite-graph pipeline, and the
verification suite, all seeded explicitly.

Exit codes: 0 success, 1 parameter/usage error, 2 at least one failed
verification gate, 3 harvest hit its graph budget (partial rows are
still written).  Same argv and seed give byte-identical primary output;
trial i always runs on the child stream "trial-i" (graphs on "graph-i",
urns on "urn-i"/"polya-i"), so --jobs never changes the bytes, only the
wall-clock.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Dict, List, Optional, Sequence, Tuple

from . import backend, verify
from .dist import ParameterError
from .finite_graph import (ComponentSummary, HarvestShortfall, critical_p,
                           decompose, harvest_batch, sample_gnp_components)
from .kernel import Multigraph, enumerate_kernels, kernel_class_index
from .limit_sampler import (sample_component_p1, sample_component_p2,
                            sample_core_lengths)
from .metric_tree import LocationError
from .process import stick_break
from .rng import RngStream
from .stats import reports_to_json
from .urn import polya_run, urn_init, urn_run

TRIAL_BATCH = 1024  # fixed so --jobs never shifts batch boundaries
GRAPH_BATCH = 256


def _fmt(x: float) -> str:
    return "%.12g" % float(x)


def _join(values) -> str:
    return ";".join(_fmt(v) for v in values)


@contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _parse_checkpoints(text: Optional[str], n_steps: int) -> Tuple[int, ...]:
    if text is None:
        return (n_steps,)
    try:
        pts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParameterError(f"bad checkpoint list: {text!r}")
    return pts


def _class_id(kern: Optional[Multigraph]) -> str:
    """Index into the enumerated kernel classes; -1 when outside them."""
    if kern is None:
        return ""
    k = kern.n_vertices // 2 + 1
    if not kern.is_three_regular() or k > 4:
        return "-1"
    return str(kernel_class_index(kern, k))


def _batched(total: int, size: int) -> List[Tuple[int, int]]:
    return [(a, min(a + size, total)) for a in range(0, total, size)]


def _run_batches(worker, ranges, jobs: int) -> List[list]:
    """Evaluate worker over ranges, results in range order regardless of
    completion order."""
    if jobs <= 1 or len(ranges) <= 1:
        return [worker(r) for r in ranges]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(worker, ranges))


class _TrialWorker:
    """Picklable per-trial-range row producer for --jobs."""

    def __init__(self, fn, seed: int):
        self.fn = fn
        self.seed = seed

    def __call__(self, rng: Tuple[int, int]) -> List[tuple]:
        rows = []
        for i in range(rng[0], rng[1]):
            stream = RngStream(self.seed).child(f"trial-{i}")
            rows.append(self.fn(i, stream))
        return rows


def _trial_rows(fn, seed: int, trials: int, jobs: int) -> List[tuple]:
    worker = _TrialWorker(fn, seed)
    out: List[tuple] = []
    for chunk in _run_batches(worker, _batched(trials, TRIAL_BATCH), jobs):
        out.extend(chunk)
    return out


# row producers are classes, not closures, so ProcessPoolExecutor can
# pickle them

class _CrtRow:
    def __init__(self, segments: int):
        self.segments = segments

    def __call__(self, i, stream):
        t = stick_break(stream, None, self.segments)
        d = t.distance(t.location_of_vertex(0), t.marks["leaf1"])
        return (i, _fmt(t.total_length), _fmt(d))


class _ComponentRow:
    def __init__(self, procedure: int, k: int, segments: int):
        self.procedure = procedure
        self.k = k
        self.segments = segments

    def __call__(self, i, stream):
        sampler = sample_component_p1 if self.procedure == 1 else \
            sample_component_p2
        comp = sampler(stream, self.k, self.segments)
        prov = comp.provenance
        if self.k == 0:
            return (i, _fmt(comp.space.skeleton.total_length))
        if self.k == 1:
            return (i, _fmt(prov["cycle_length"]))
        key = "kernel_path_lengths" if self.procedure == 1 else \
            "core_lengths"
        lens = prov[key]
        return (i, _class_id(comp.kernel), _fmt(math.fsum(lens)),
                _join(lens))


class _KernelRow:
    def __init__(self, k: int):
        self.k = k

    def __call__(self, i, stream):
        from .kernel import sample_kernel
        return (i, _class_id(sample_kernel(stream, self.k)))


class _CoreRow:
    def __init__(self, k: int):
        self.k = k

    def __call__(self, i, stream):
        core = sample_core_lengths(stream, self.k)
        return (i, _fmt(core.total)) + tuple(_fmt(x) for x in core.lengths)


def cmd_crt(args) -> int:
    if args.format == "text":
        if args.trials != 1:
            raise ParameterError("--format text requires --trials 1")
        t = stick_break(RngStream(args.seed).child("trial-0"), None,
                        args.segments)
        with _open_out(args.out) as fh:
            fh.write(t.to_text())
        return 0
    rows = _trial_rows(_CrtRow(args.segments), args.seed, args.trials,
                       args.jobs)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(("trial", "total_length", "root_to_first_leaf"))
        w.writerows(rows)
    return 0


def cmd_component(args) -> int:
    if args.procedure == 1 and args.segments < 1:
        raise ParameterError("procedure 1 needs --segments >= 1")
    if args.format == "text":
        if args.trials != 1:
            raise ParameterError("--format text requires --trials 1")
        sampler = sample_component_p1 if args.procedure == 1 else \
            sample_component_p2
        comp = sampler(RngStream(args.seed).child("trial-0"), args.k,
                       args.segments)
        with _open_out(args.out) as fh:
            fh.write(comp.space.to_text())
        return 0
    rows = _trial_rows(_ComponentRow(args.procedure, args.k, args.segments),
                       args.seed, args.trials, args.jobs)
    if args.k == 0:
        header: tuple = ("trial", "total_length")
    elif args.k == 1:
        header = ("trial", "cycle_length")
    else:
        header = ("trial", "kernel_class", "core_total", "path_lengths")
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return 0


def cmd_kernels(args) -> int:
    if args.action == "enumerate":
        classes = enumerate_kernels(args.k)
        with _open_out(args.out) as fh:
            w = _writer(fh)
            w.writerow(("class", "probability", "weight", "labeled_count",
                        "edges"))
            for i, cls in enumerate(classes):
                edges = ";".join(
                    f"{u}-{v}x{m}"
                    for (u, v), m in sorted(cls.rep.multiplicities().items()))
                w.writerow((i, _fmt(cls.probability), _fmt(cls.weight),
                            cls.labeled_count, edges))
        return 0
    rows = _trial_rows(_KernelRow(args.k), args.seed, args.trials, args.jobs)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(("trial", "class"))
        w.writerows(rows)
    return 0


def cmd_core_lengths(args) -> int:
    m = 1 if args.k == 1 else 3 * args.k - 3
    rows = _trial_rows(_CoreRow(args.k), args.seed, args.trials, args.jobs)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(("trial", "total") + tuple(f"l_{j+1}" for j in range(m)))
        w.writerows(rows)
    return 0


def cmd_urn(args) -> int:
    pts = _parse_checkpoints(args.checkpoints, args.steps)
    rows = []
    if args.mode == "continuous":
        if args.m < 3 or args.m % 3 != 0:
            raise ParameterError(
                "continuous urn starts from a surplus-k core, so --m must "
                "be 3(k-1) for some k >= 2 (3, 6, 9, ...)")
        k = args.m // 3 + 1
        for i in range(args.trials):
            stream = RngStream(args.seed).child(f"urn-{i}")
            s0 = urn_init(sample_core_lengths(stream, k))
            traj = urn_run(stream, s0, args.steps, checkpoints=pts)
            for cp, st in zip(traj.checkpoints, traj.states):
                rows.append((i, cp)
                            + tuple(_fmt(x) for x in st.lengths)
                            + tuple(st.counts)
                            + (_fmt(st.total),))
        m = args.m
        header = (("trial", "n")
                  + tuple(f"L_{j+1}" for j in range(m))
                  + tuple(f"N_{j+1}" for j in range(m))
                  + ("C",))
    else:
        for i in range(args.trials):
            stream = RngStream(args.seed).child(f"polya-{i}")
            traj = polya_run(stream, args.m, args.steps, checkpoints=pts)
            for cp, counts in zip(traj.checkpoints, traj.counts):
                rows.append((i, cp) + tuple(int(c) for c in counts))
        header = (("trial", "n")
                  + tuple(f"N_{j+1}" for j in range(args.m)))
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return 0


def _resolve_p(args) -> float:
    if args.p is not None:
        if args.lam is not None:
            raise ParameterError("give either --p or --lambda, not both")
        if not (0.0 < args.p < 1.0):
            raise ParameterError("--p must be in (0, 1)")
        return args.p
    return critical_p(args.n, 0.0 if args.lam is None else args.lam)


def cmd_gnp_sample(args) -> int:
    p = _resolve_p(args)
    comps = sample_gnp_components(RngStream(args.seed).child("graph-0"),
                                  args.n, p, min_size=args.min_size)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(("component", "size", "surplus", "core_edges", "lengths",
                    "kernel_class"))
        for idx, comp in enumerate(comps):
            s = decompose(comp, args.n)
            if s.surplus == 1:
                lens = _fmt(s.cycle_length)
            else:
                lens = _join(s.core_path_lengths)
            w.writerow((idx, s.size, s.surplus, s.core_edge_count, lens,
                        _class_id(s.kernel)))
    return 0


class _HarvestWorker:
    def __init__(self, seed: int, n: int, lam: float,
                 surpluses: Tuple[int, ...], window: Tuple[float, float]):
        self.seed = seed
        self.n = n
        self.lam = lam
        self.surpluses = surpluses
        self.window = window

    def __call__(self, rng: Tuple[int, int]):
        return harvest_batch(RngStream(self.seed), self.n, self.lam,
                             self.surpluses, self.window, rng)


def _harvest(seed: int, n: int, lam: float, targets: Dict[int, int],
             window: Tuple[float, float], max_graphs: int,
             jobs: int) -> Tuple[Dict[int, List[ComponentSummary]], bool]:
    """Fill targets scanning graphs in index order; deterministic for any
    jobs value.  Returns (collected, complete)."""
    got: Dict[int, List[ComponentSummary]] = {k: [] for k in targets}
    worker = _HarvestWorker(seed, n, lam, tuple(sorted(targets)), window)
    ranges = _batched(max_graphs, GRAPH_BATCH)
    pos = 0
    while pos < len(ranges):
        chunk = ranges[pos:pos + max(1, jobs)]
        for found in _run_batches(worker, chunk, jobs):
            for _, summary in found:
                bucket = got.get(summary.surplus)
                if bucket is not None and len(bucket) < targets[
                        summary.surplus]:
                    bucket.append(summary)
        pos += len(chunk)
        if all(len(got[k]) >= targets[k] for k in targets):
            return got, True
    return got, False


def cmd_gnp_harvest(args) -> int:
    lam = 0.0 if args.lam is None else args.lam
    if args.p is not None:
        raise ParameterError("harvest is parameterized by --lambda, not --p")
    window = (args.window[0], args.window[1])
    targets = {k: args.count for k in sorted(set(args.k))}
    max_graphs = args.max_graphs
    if max_graphs is None:
        max_graphs = max(20000, 400 * args.count)
    got, complete = _harvest(args.seed, args.n, lam, targets, window,
                             max_graphs, args.jobs)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(("n", "lambda", "size", "surplus", "sigma_hat", "lengths",
                    "kernel_class"))
        for k in sorted(targets):
            for s in got[k]:
                w.writerow((args.n, _fmt(lam), s.size, s.surplus,
                            _fmt(s.sigma_hat), _join(s.normalized_lengths),
                            _class_id(s.kernel)))
    if not complete:
        missing = {k: targets[k] - len(got[k]) for k in sorted(targets)
                   if len(got[k]) < targets[k]}
        print(f"harvest incomplete after {max_graphs} graphs; "
              f"missing {missing}", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args) -> int:
    names: List[str] = []
    for item in args.suite:
        names.extend(x for x in item.split(",") if x)
    if not names:
        names = ["all"]
    reports = verify.run_gates(names, args.seed)
    with _open_out(args.out) as fh:
        fh.write(reports_to_json(reports))
        fh.write("\n")
    return 0 if all(r.passed for r in reports) else 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 by default; 2 is reserved for failed gates
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="crglimits",
                  description="Samplers and checks for scaling limits of "
                              "critical random graph components.")
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    def add_common(p, trials_default=1000):
        p.add_argument("--seed", type=int, required=True,
                       help="master seed (required; no wall-clock default)")
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--out", default=None, help="output path (default "
                       "stdout)")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes; batches of fixed size keep "
                            "output independent of this")

    p = sub.add_parser("crt", help="stick-breaking tree approximations")
    add_common(p)
    p.add_argument("--segments", type=int, default=1)
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(fn=cmd_crt)

    p = sub.add_parser("component", help="limit component samplers")
    add_common(p)
    p.add_argument("--procedure", type=int, choices=(1, 2), required=True)
    p.add_argument("--k", type=int, required=True, help="surplus")
    p.add_argument("--segments", type=int, default=0,
                   help="per-tree for procedure 1, continuation count for "
                        "procedure 2")
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(fn=cmd_component)

    p = sub.add_parser("kernels", help="3-regular kernel classes")
    ksub = p.add_subparsers(dest="action", required=True,
                            parser_class=_Parser)
    pe = ksub.add_parser("enumerate")
    pe.add_argument("--k", type=int, required=True)
    pe.add_argument("--out", default=None)
    pe.set_defaults(fn=cmd_kernels, action="enumerate")
    ps = ksub.add_parser("sample")
    add_common(ps)
    ps.add_argument("--k", type=int, required=True)
    ps.set_defaults(fn=cmd_kernels, action="sample")

    p = sub.add_parser("core-lengths", help="core edge length laws")
    add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_core_lengths)

    p = sub.add_parser("urn", help="length/count urns")
    usub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in ("continuous", "polya"):
        pu = usub.add_parser(mode)
        add_common(pu, trials_default=100)
        pu.add_argument("--m", type=int, required=True,
                        help="number of colors")
        pu.add_argument("--steps", type=int, required=True)
        pu.add_argument("--checkpoints", default=None,
                        help="comma-separated step counts (default: final "
                             "step only)")
        pu.set_defaults(fn=cmd_urn, mode=mode)

    p = sub.add_parser("gnp", help="finite G(n,p) pipeline")
    gsub = p.add_subparsers(dest="action", required=True,
                            parser_class=_Parser)
    pg = gsub.add_parser("sample")
    pg.add_argument("--seed", type=int, required=True)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--p", type=float, default=None)
    pg.add_argument("--lambda", dest="lam", type=float, default=None)
    pg.add_argument("--min-size", type=int, default=1)
    pg.add_argument("--out", default=None)
    pg.set_defaults(fn=cmd_gnp_sample)
    ph = gsub.add_parser("harvest")
    ph.add_argument("--seed", type=int, required=True)
    ph.add_argument("--n", type=int, required=True)
    ph.add_argument("--p", type=float, default=None, help=argparse.SUPPRESS)
    ph.add_argument("--lambda", dest="lam", type=float, default=None)
    ph.add_argument("--k", type=int, nargs="+", required=True,
                    help="surplus values to collect")
    ph.add_argument("--window", type=float, nargs=2, default=(0.9, 1.1),
                    metavar=("LO", "HI"),
                    help="size window in multiples of n^(2/3)")
    ph.add_argument("--count", type=int, required=True,
                    help="components per surplus value")
    ph.add_argument("--max-graphs", type=int, default=None)
    ph.add_argument("--jobs", type=int, default=1)
    ph.add_argument("--out", default=None)
    ph.set_defaults(fn=cmd_gnp_harvest)

    p = sub.add_parser("verify", help="run verification gates")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--suite", action="append", default=[],
                   help="gate or suite name; repeatable or comma-separated "
                        "(default: all)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)
    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (ParameterError, LocationError, ValueError) as e:
        print(f"crglimits: error: {e}", file=sys.stderr)
        return 1
    except HarvestShortfall as e:
        print(f"crglimits: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
