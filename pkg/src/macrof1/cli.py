"""``mf1`` command line.

    mf1 matrix <n> <cells...>          row-major, rows = predicted class
    mf1 eval --gold F --pred F [--json]
    mf1 eval --tsv F [--json]          two columns: gold<TAB>predicted
    mf1 bound <n>
    mf1 extremal <n> <z>
    mf1 simulate fig1|sweep-labels|sweep-errors [--n --size --trials --seed --dist --grid --out --workers]

Exit status is 0 on success, 2 on usage errors and 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import simulation as sim
from .confusion import ConfusionMatrix, from_pairs, per_class_metrics
from .macro import MacroReport, extremal_matrix, macro_report, supremum_bound

REPORT_LABELS = (
    ("macroF1 benevolent", "f1_of_averages"),
    ("macroF1 non-benevolent", "averaged_f1"),
    ("delta", "delta_direct"),
    ("delta calculated", "delta_closed_form"),
)


class InputError(Exception):
    pass


def render_report(rep: MacroReport) -> str:
    # repr() is the shortest decimal that round-trips the double
    return "\n".join(f"{label}\t{getattr(rep, attr)!r}" for label, attr in REPORT_LABELS)


def _emit(text: str, payload: dict, as_json: bool) -> None:
    print(json.dumps(payload, indent=2) if as_json else text)


def cmd_matrix(args) -> int:
    n = args.n
    if n < 1:
        raise InputError("class count must be at least 1")
    if len(args.cells) != n * n:
        args.parser.print_usage(sys.stderr)
        print(f"mf1 matrix: expected {n * n} cells for n={n}, got {len(args.cells)}", file=sys.stderr)
        return 2
    if any(c < 0 for c in args.cells):
        bad = next(k for k, c in enumerate(args.cells) if c < 0)
        raise InputError(f"cell #{bad} is negative ({args.cells[bad]})")
    cm = ConfusionMatrix([args.cells[i * n:(i + 1) * n] for i in range(n)])
    rep = macro_report(cm)
    _emit(render_report(rep), {"matrix": cm.tolist(), **rep.as_dict()}, args.json)
    return 0


def _read_lines(path: str) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return text.splitlines()


def _read_labels(path: str) -> list[str]:
    labels = []
    for lineno, line in enumerate(_read_lines(path), 1):
        lab = line.strip()
        if not lab:
            raise InputError(f"{path}:{lineno}: empty label")
        labels.append(lab)
    return labels


def _read_tsv(path: str) -> tuple[list[str], list[str]]:
    gold, pred = [], []
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise InputError(f"{path}:{lineno}: expected 'gold<TAB>predicted', got {line!r}")
        gold.append(parts[0].strip())
        pred.append(parts[1].strip())
    return gold, pred


def evaluate_labels(gold: list[str], pred: list[str], vocabulary: list[str] | None = None):
    """Return (matrix, labels in index order, labels in first-seen order)."""
    if len(gold) != len(pred):
        raise InputError(f"gold has {len(gold)} labels but predictions have {len(pred)}")
    seen = list(dict.fromkeys(g for pair in zip(gold, pred) for g in pair))
    if vocabulary is not None:
        allowed = set(vocabulary)
        for lineno, (g, p) in enumerate(zip(gold, pred), 1):
            for lab in (g, p):
                if lab not in allowed:
                    raise InputError(f"line {lineno}: unknown label {lab!r}")
        labels = sorted(allowed)
        seen += [lab for lab in vocabulary if lab not in seen]
    else:
        labels = sorted(seen)
    index = {lab: k for k, lab in enumerate(labels)}
    cm = from_pairs(((index[p], index[g]) for g, p in zip(gold, pred)), max(len(labels), 1))
    return cm, labels, seen


def cmd_eval(args) -> int:
    if args.tsv:
        if args.gold or args.pred:
            raise InputError("use either --tsv or --gold/--pred, not both")
        gold, pred = _read_tsv(args.tsv)
    else:
        if not (args.gold and args.pred):
            args.parser.print_usage(sys.stderr)
            print("mf1 eval: need --gold and --pred, or --tsv", file=sys.stderr)
            return 2
        gold, pred = _read_labels(args.gold), _read_labels(args.pred)
    vocab = args.labels.split(",") if args.labels else None
    cm, labels, seen = evaluate_labels(gold, pred, vocab)
    if not gold:
        print("mf1 eval: warning: no samples, all scores are 0", file=sys.stderr)
    rep = macro_report(cm)
    per_class = {labels[m.class_index]: m for m in per_class_metrics(cm)} if labels else {}

    rows = [f"{'label':<16}\t{'precision':<20}\t{'recall':<20}\tf1"]
    for lab in seen:
        m = per_class[lab]
        rows.append(f"{lab:<16}\t{m.precision!r:<20}\t{m.recall!r:<20}\t{m.f1!r}")
    text = "\n".join(rows) + "\n\n" + render_report(rep)
    payload = {
        "labels": labels,
        "matrix": cm.tolist() if labels else [],
        "per_class": [
            {"label": lab, "precision": per_class[lab].precision, "recall": per_class[lab].recall, "f1": per_class[lab].f1}
            for lab in seen
        ],
        **rep.as_dict(),
    }
    _emit(text, payload, args.json)
    return 0


def cmd_bound(args) -> int:
    value = supremum_bound(args.n)
    _emit(repr(value), {"n": args.n, "supremum": value}, args.json)
    return 0


def cmd_extremal(args) -> int:
    cm = extremal_matrix(args.n, args.z)
    rep = macro_report(cm)
    width = len(str(args.z))
    body = "\n".join(" ".join(f"{v:>{width}}" for v in row) for row in cm.tolist())
    text = f"{body}\n\n{render_report(rep)}\nsupremum\t{supremum_bound(args.n)!r}"
    _emit(text, {"matrix": cm.tolist(), **rep.as_dict(), "supremum": supremum_bound(args.n)}, args.json)
    return 0


def _parse_dist(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"--dist must be comma-separated numbers, got {text!r}") from exc


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        gx, gy = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise InputError(f"--grid must look like 21x21, got {text!r}") from exc
    if gx < 1 or gy < 1:
        raise InputError("--grid sizes must be positive")
    return gx, gy


def _default(value, fallback):
    return fallback if value is None else value


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_simulate(args) -> int:
    # summary goes to stderr when the CSV itself is on stdout
    summary_fh = sys.stderr if args.out in (None, "-") else sys.stdout
    if args.experiment == "fig1":
        n = _default(args.n, 2)
        if n < 1:
            raise InputError("--n must be at least 1")
        dist = _parse_dist(args.dist) if args.dist else ((0.95, 0.05) if n == 2 else tuple([1.0 / n] * n))
        cfg = sim.ExperimentConfig(
            n=n,
            dataset_size=_default(args.size, 1000),
            trials=_default(args.trials, 1000),
            class_distribution=dist,
            classifier=sim.UniformRandom(),
            seed=args.seed,
        )
        stats = sim.run_trials(cfg, workers=args.workers)
        fh, close = _open_out(args.out)
        try:
            sim.write_trials_csv(stats, fh)
        finally:
            if close:
                fh.close()
        print(
            f"trials={cfg.trials} rmsd={stats.rmsd!r} pearson={stats.pearson!r} "
            f"spearman={stats.spearman!r} max_f1_of_averages={float(stats.f1_of_averages.max())!r} "
            f"max_averaged_f1={float(stats.averaged_f1.max())!r} mean_delta={float(stats.deltas.mean())!r}",
            file=summary_fh,
        )
        return 0

    if args.dist:
        raise InputError("--dist only applies to fig1")
    n = _default(args.n, 4)
    gx, gy = _parse_grid(args.grid) if args.grid else (21, 21)
    xs = np.linspace(1.0 / n, 1.0, gx) if gx > 1 else np.array([1.0])
    ys = np.linspace(0.0, 1.0, gy) if gy > 1 else np.array([0.0])
    mode = sim.LABEL_SKEW if args.experiment == "sweep-labels" else sim.ERROR_SKEW
    result = sim.sweep_grid(n, _default(args.size, 2000), xs, ys, mode, _default(args.trials, 5), args.seed, workers=args.workers)
    fh, close = _open_out(args.out)
    try:
        sim.write_sweep_csv(result, fh)
    finally:
        if close:
            fh.close()
    print(
        f"mode={mode} n={n} grid={gx}x{gy} max_mean_delta={float(result.mean_delta.max())!r} "
        f"max_mean_delta_below_x1={result.max_delta_off_perfect()!r}",
        file=summary_fh,
    )
    return 0


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mf1", description="Compare the two macro F1 formulas.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn, parser=p)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("matrix", cmd_matrix, "scores for a confusion matrix given row-major (rows = predicted)")
    p.add_argument("n", type=_int)
    p.add_argument("cells", nargs="*", type=_int)

    p = add("eval", cmd_eval, "scores for gold/predicted label files")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--tsv")
    p.add_argument("--labels", help="comma-separated closed label vocabulary")

    p = add("bound", cmd_bound, "supremum of the gap for n classes")
    p.add_argument("n", type=int)

    p = add("extremal", cmd_extremal, "matrix approaching the supremum")
    p.add_argument("n", type=int)
    p.add_argument("z", type=int)

    p = add("simulate", cmd_simulate, "random-classifier experiments, CSV output")
    p.add_argument("experiment", choices=("fig1", "sweep-labels", "sweep-errors"))
    p.add_argument("--n", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--trials", type=int, help="trials (fig1) or trials per grid cell (sweeps)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", help="class distribution for fig1, e.g. 0.95,0.05")
    p.add_argument("--grid", help="sweep resolution, e.g. 21x21")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, TypeError) as exc:
        print(f"mf1 {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
