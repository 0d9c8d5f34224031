"""Command line entry point: ``isofno {generate,train,eval,params,predict,check}``."""

import argparse
import csv
import logging
import sys

from . import checks, darcy, io
from .grid import GroupElement
from .metrics import dataset_report
from .model import ModelConfig, count_parameters, forward, spectral_parameter_count
from .training import METRIC_COLUMNS, TrainConfig, train

TRANSFORMS = ("none", "flip-x", "flip-y", "transpose", "rot90")

# Zero padding (grid points per side) used when training on Darcy data. The
# solution vanishes on the boundary, which a circular operator cannot see
# without a margin; the padding is symmetric so D4 equivariance survives.
DARCY_PADDING = 8


def _fmt(x):
    return repr(float(x))


def cmd_generate(args):
    samples = darcy.generate_dataset(args.count, args.seed, args.resolution)
    io.write_dataset(args.out, samples)
    print(f"wrote {len(samples)} samples at {args.resolution}x{args.resolution} to {args.out}")
    return 0


def cmd_train(args):
    train_set = io.read_dataset(args.data)
    test_set = io.read_dataset(args.test)
    mcfg = ModelConfig(args.variant, args.width, args.modes, args.layers, padding=args.padding)
    tcfg = TrainConfig(epochs=args.epochs, batch_size=args.batch, lr0=args.lr, seed=args.seed)
    params, history = train(tcfg, mcfg, train_set, test_set)
    io.write_checkpoint(args.out, mcfg, params)
    if args.metrics_csv:
        with open(args.metrics_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("epoch",) + METRIC_COLUMNS)
            for epoch, row in enumerate(history, start=1):
                w.writerow([epoch] + [_fmt(v) for v in row])
    last = history[-1]
    print(f"final train_l2 {last[0]:.5f} test_l2 {last[1]:.5f}; checkpoint {args.out}")
    return 0


def cmd_eval(args):
    cfg, params = io.read_checkpoint(args.model)
    samples = [(s.a, s.u) for s in io.read_dataset(args.data)]
    report = dataset_report(cfg, params, samples, GroupElement.parse(args.transform))
    with open(args.out_csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("sample", "l2", "h2"))
        for i, (l2, h2) in enumerate(zip(report.l2, report.h2)):
            w.writerow((i, _fmt(l2), _fmt(h2)))
        w.writerow(("mean", _fmt(report.mean_l2), _fmt(report.mean_h2)))
    print(f"transform {args.transform}: mean l2 {report.mean_l2:.6g} mean h2 {report.mean_h2:.6g}")
    return 0


def cmd_params(args):
    cfg = ModelConfig(args.variant, args.width, args.modes, args.layers)
    print(count_parameters(cfg))
    print(f"spectral {spectral_parameter_count(cfg)}", file=sys.stderr)
    return 0


def cmd_predict(args):
    cfg, params = io.read_checkpoint(args.model)
    samples = io.read_dataset(args.data)
    if not 0 <= args.index < len(samples):
        print(f"index {args.index} out of range for {len(samples)} samples", file=sys.stderr)
        return 2
    s = samples[args.index]
    a, u = s.a, s.u
    pred = forward(cfg, params, a)
    with open(args.out_csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("i", "j", "a", "truth", "prediction"))
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                w.writerow((i, j, _fmt(a[i, j]), _fmt(u[i, j]), _fmt(pred[i, j])))
    return 0


def cmd_check(args):
    results = checks.run_suite(args.suite)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="isofno", description="Isotropic Fourier neural operators on Darcy flow.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a Darcy flow dataset")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--data", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--variant", choices=("standard", "iso"), default="iso")
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--layers", type=int, default=4)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-csv")
    p.add_argument("--padding", type=int, default=DARCY_PADDING, help="zero padding per side (0 disables)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--transform", choices=TRANSFORMS, default="none")
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("params", help="print the exact parameter count")
    p.add_argument("--variant", choices=("standard", "iso"), required=True)
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--layers", type=int, default=4)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("predict", help="export input, truth and prediction of one sample")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("--suite", choices=tuple(checks.SUITES), required=True)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
