"""Command-line surface.

Verbs: halftone, noise, transmit, metric, entropy-curve, sweep, compare,
screens.  Exit codes are a stable scripting contract: 0 success, 2 usage or
config error, 3 I/O error.  Every randomized command requires an explicit
--seed; nothing is drawn from system entropy.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import channel, imagery, metrics, robustness
from .halftone import ALGORITHMS, HalftoneSpec, halftone, screen_catalog

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_SWEEP_SMOOTHING = 1e-9  # harness default keeps sweep curves finite


class UsageError(ValueError):
    pass


class ConfigError(ValueError):
    pass


def format_scalar(v: float) -> str:
    """Scalar print format: 'inf', bare integers, else 12 significant digits."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    mant, exp_text = f"{v:.11e}".split("e")
    sign = "-" if mant.startswith("-") else ""
    digits = mant.replace(".", "").lstrip("-")
    exp = int(exp_text)
    if exp >= 0:
        if exp + 1 >= len(digits):
            return sign + digits + "0" * (exp + 1 - len(digits))
        return f"{sign}{digits[: exp + 1]}.{digits[exp + 1 :]}"
    return sign + "0." + "0" * (-exp - 1) + digits


# ---------------------------------------------------------------------------
# shared flag parsing
# ---------------------------------------------------------------------------

def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{what}: empty list")
    return values


def _parse_hist(hist: str, lam: float | None) -> metrics.HistogramSpec:
    if hist == "binary":
        return metrics.HistogramSpec(mode="binary", smoothing=lam)
    if hist.startswith("block:"):
        body = hist[len("block:"):]
        parts = body.split("x")
        if len(parts) == 2:
            try:
                block, bins = int(parts[0]), int(parts[1])
            except ValueError:
                raise UsageError(f"--hist: bad block spec {hist!r} (want block:<size>x<bins>)") from None
            try:
                return metrics.HistogramSpec(mode="block", block=block, bins=bins, smoothing=lam)
            except ValueError as exc:
                raise UsageError(f"--hist: {exc}") from None
        raise UsageError(f"--hist: bad block spec {hist!r} (want block:<size>x<bins>)")
    raise UsageError(f"--hist: unknown mode {hist!r} (want 'binary' or 'block:<size>x<bins>')")


def _parse_smoothing(text: str) -> float | None:
    if text == "none":
        return None
    if text.startswith("additive:"):
        try:
            lam = float(text[len("additive:"):])
        except ValueError:
            raise UsageError(f"--smoothing: bad constant in {text!r}") from None
        if not lam > 0:
            raise UsageError(f"--smoothing: additive constant must be > 0, got {lam}")
        return lam
    raise UsageError(f"--smoothing: expected 'none' or 'additive:<lambda>', got {text!r}")


def _parse_algorithm_token(token: str) -> HalftoneSpec:
    parts = token.strip().split(":")
    name = parts[0].strip()
    kwargs: dict = {}
    for part in parts[1:]:
        if "=" not in part:
            raise UsageError(f"algorithm {token!r}: parameter {part!r} is not key=value")
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        fields = {"h": ("h", int), "level": ("level", float), "seed": ("seed", int), "order": ("matrix_order", int)}
        if key not in fields:
            raise UsageError(f"algorithm {token!r}: unknown parameter {key!r}")
        field, convert = fields[key]
        try:
            kwargs[field] = convert(value)
        except ValueError:
            raise UsageError(f"algorithm {token!r}: bad value for {key!r}") from None
    try:
        return HalftoneSpec(algorithm=name, **kwargs)
    except ValueError as exc:
        raise UsageError(f"algorithm {token!r}: {exc}") from None


def _load_auto(path: str):
    """Read a PGM or PBM by magic number."""
    magic = Path(path).read_bytes()[:2]
    if magic in (b"P2", b"P5"):
        return imagery.read_gray(path)
    if magic in (b"P1", b"P4"):
        return imagery.read_binary(path)
    raise imagery.NetpbmError(f"{path}: not a PGM/PBM file (magic {magic!r})")


def _load_binary(path: str, flag: str) -> imagery.BinaryImage:
    img = _load_auto(path)
    if not isinstance(img, imagery.BinaryImage):
        raise UsageError(f"{flag}: {path} is not a PBM binary image")
    return img


# ---------------------------------------------------------------------------
# sweep config file
# ---------------------------------------------------------------------------

_SWEEP_KEYS = ("algorithms", "kind", "block", "t_grid", "reps", "hist", "smoothing", "seed", "corpus")


def parse_sweep_config(path) -> robustness.SweepSpec:
    """Parse the flat key = value sweep config; see sweep.example.cfg."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SWEEP_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} (expected one of {_SWEEP_KEYS})")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        raw[key] = (lineno, value)

    def need(key: str) -> tuple[int, str]:
        if key not in raw:
            raise ConfigError(f"{path}: missing required key {key!r}")
        return raw[key]

    def fail(key: str, exc) -> ConfigError:
        return ConfigError(f"{path}:{raw[key][0]}: {exc}")

    try:
        algorithms = tuple(_parse_algorithm_token(tok) for tok in need("algorithms")[1].split(",") if tok.strip())
        if not algorithms:
            raise UsageError("no algorithms listed")
    except UsageError as exc:
        raise fail("algorithms", exc) from None

    kind = need("kind")[1]
    if kind not in channel.CHANNEL_KINDS:
        raise fail("kind", f"unknown channel kind {kind!r} (expected one of {channel.CHANNEL_KINDS})")

    block = None
    if "block" in raw:
        try:
            block = channel.BlockSpec(int(raw["block"][1]))
        except ValueError as exc:
            raise fail("block", exc) from None
    if (block is not None) != (kind == "block-erase"):
        key = "block" if "block" in raw else "kind"
        raise fail(key, "block is required for kind block-erase and forbidden otherwise")

    try:
        t_grid = tuple(_parse_float_list(need("t_grid")[1], "t_grid"))
    except UsageError as exc:
        raise fail("t_grid", exc) from None

    try:
        reps = int(need("reps")[1])
    except ValueError:
        raise fail("reps", f"bad integer {raw['reps'][1]!r}") from None

    try:
        lam = _parse_smoothing(raw["smoothing"][1]) if "smoothing" in raw else DEFAULT_SWEEP_SMOOTHING
    except UsageError as exc:
        raise fail("smoothing", exc) from None
    try:
        histogram = _parse_hist(raw["hist"][1] if "hist" in raw else "binary", lam)
    except UsageError as exc:
        raise fail("hist", exc) from None

    try:
        seed = int(need("seed")[1])
    except ValueError:
        raise fail("seed", f"bad integer {raw['seed'][1]!r}") from None

    corpus_value = need("corpus")[1]
    corpus: list[str] = []
    for tok in corpus_value.split(","):
        tok = tok.strip()
        if not tok:
            continue
        p = Path(tok)
        if p.is_dir():
            found = sorted(str(f) for f in p.glob("*.pgm"))
            if not found:
                raise fail("corpus", f"directory {tok!r} contains no .pgm files")
            corpus.extend(found)
        else:
            corpus.append(tok)
    if not corpus:
        raise fail("corpus", "no corpus images")

    try:
        return robustness.SweepSpec(
            algorithms=algorithms,
            channel_kind=kind,
            t_grid=t_grid,
            reps=reps,
            histogram=histogram,
            master_seed=seed,
            corpus=tuple(corpus),
            block=block,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_halftone(args) -> int:
    if args.algo == "blockd" and args.h is None:
        raise UsageError("--h is required for --algo blockd")
    if args.algo == "random" and args.seed is None:
        raise UsageError("--seed is required for --algo random")
    try:
        spec = HalftoneSpec(
            algorithm=args.algo, h=args.h, level=args.level, seed=args.seed, matrix_order=args.order
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    img = imagery.read_gray(args.input)
    out = halftone(img, spec)
    imagery.write_binary(out, args.output)
    print(format_scalar(out.ink_fraction()))
    return EXIT_OK


def cmd_noise(args) -> int:
    power = _noise_power(args.power)
    field = channel.gen_noise(args.width, args.height, power, args.seed)
    imagery.write_binary(field, args.output)
    print(
        f"t={format_scalar(power.t)} "
        f"target_density={format_scalar(channel.noise_density(power))} "
        f"realized={format_scalar(field.ink_fraction())}"
    )
    return EXIT_OK


def _noise_power(value: float) -> channel.NoisePower:
    try:
        return channel.NoisePower(value)
    except ValueError as exc:
        raise UsageError(f"--power: {exc}") from None


def cmd_transmit(args) -> int:
    if (args.block is not None) != (args.kind == "block-erase"):
        raise UsageError("--block is required for --kind block-erase and forbidden otherwise")
    power = _noise_power(args.power)
    block = None
    if args.block is not None:
        try:
            block = channel.BlockSpec(args.block)
        except ValueError as exc:
            raise UsageError(f"--block: {exc}") from None
    cfg = channel.ChannelConfig(kind=args.kind, power=power, seed=args.seed, block=block)
    g = _load_binary(args.input, "--input")
    gp = channel.transmit(g, cfg)
    imagery.write_binary(gp, args.output)
    print(f"f_in={format_scalar(g.ink_fraction())}")
    print(f"f_out={format_scalar(gp.ink_fraction())}")
    return EXIT_OK


def cmd_metric(args) -> int:
    if args.name == "entropy":
        if args.b is not None:
            raise UsageError("--b is not used with --name entropy")
        img = _load_binary(args.a, "--a")
        print(format_scalar(metrics.binary_entropy(img)))
        return EXIT_OK
    if args.b is None:
        raise UsageError(f"--b is required for --name {args.name}")
    if args.name == "euclid":
        a, b = _load_auto(args.a), _load_auto(args.b)
        try:
            value = metrics.euclidean_distance(a, b)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(format_scalar(value))
        return EXIT_OK
    # kl
    spec = _parse_hist(args.hist, _parse_smoothing(args.smoothing))
    a = _load_binary(args.a, "--a")
    b = _load_binary(args.b, "--b")
    print(format_scalar(metrics.image_relative_entropy(a, b, spec)))
    return EXIT_OK


def cmd_entropy_curve(args) -> int:
    t_grid = _parse_float_list(args.t_grid, "--t-grid")
    rows = metrics.noise_entropy_curve(args.width, args.height, t_grid, args.reps, args.seed)
    with open(args.out, "w", newline="") as fh:
        fh.write("t,mean,std,reps\n")
        for t, mean, std in rows:
            fh.write(f"{t!r},{mean!r},{std!r},{args.reps}\n")
    for t, mean, std in rows:
        print(f"t={format_scalar(t)} mean={format_scalar(mean)} std={format_scalar(std)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = parse_sweep_config(args.spec)
    records = robustness.run_sweep(spec, jobs=args.jobs)
    robustness.write_records_csv(records, args.out)
    agg_path = args.agg_out if args.agg_out else str(Path(args.out).with_suffix(".agg.csv"))
    aggregates = robustness.corpus_average(records)
    robustness.write_aggregates_csv(aggregates, agg_path)
    meta_path = str(Path(args.out).with_suffix(".meta.json"))
    _write_sweep_meta(spec, meta_path)

    print(f"records: {args.out} ({len(records)} rows)")
    print(f"aggregates: {agg_path}")
    print(f"metadata: {meta_path}")
    print(f"{'algo':<16} {'kind':<12} {'t':>6} {'h':>4} {'mean_q':>14} {'stderr_q':>14} {'n':>4}")
    for row in aggregates:
        h = "" if row.h is None else row.h
        print(
            f"{row.algo:<16} {row.noise_kind:<12} {row.t:>6} {h!s:>4} "
            f"{format_scalar(row.mean_q):>14} {format_scalar(row.stderr_q):>14} {row.n:>4}"
        )

    families = list(dict.fromkeys((r.algo, r.h) for r in records))  # config order
    if len(families) == 2:
        by_family = {fam: [r for r in records if (r.algo, r.h) == fam] for fam in families}
        verdicts = robustness.compare(by_family[families[0]], by_family[families[1]])
        for v in verdicts:
            print(
                f"compare {v.algo_k} vs {v.algo_t} at t={format_scalar(v.t)}: {v.verdict} "
                f"(diff={format_scalar(v.diff)})"
            )
    return EXIT_OK


def _write_sweep_meta(spec: robustness.SweepSpec, path: str) -> None:
    meta = {
        "algorithms": [a.label() for a in spec.algorithms],
        "blockd_h": sorted({a.h for a in spec.algorithms if a.algorithm == "blockd"}),
        "channel_kind": spec.channel_kind,
        "block": None if spec.block is None else spec.block.size,
        "t_grid": list(spec.t_grid),
        "achieved_noise_density": [channel.noise_density(channel.NoisePower(t)) for t in spec.t_grid],
        "reps": spec.reps,
        "histogram": {
            "mode": spec.histogram.mode,
            "block": spec.histogram.block,
            "bins": spec.histogram.bins,
            "smoothing": spec.histogram.smoothing,
        },
        "master_seed": spec.master_seed,
        "corpus": list(spec.corpus),
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def cmd_compare(args) -> int:
    records = robustness.read_records_csv(args.records)
    side_a = _select_family(records, args.a, args.h_a, "--a")
    side_b = _select_family(records, args.b, args.h_b, "--b")
    try:
        verdicts = robustness.compare(side_a, side_b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for v in verdicts:
        print(
            f"t={format_scalar(v.t)}: {v.algo_k} mean_q={format_scalar(v.mean_k)}  "
            f"{v.algo_t} mean_q={format_scalar(v.mean_t)}  -> {v.verdict}"
        )
    return EXIT_OK


def _select_family(records, label: str, h: int | None, flag: str):
    selected = [r for r in records if r.algo == label and (h is None or r.h == h)]
    if not selected:
        raise UsageError(f"{flag}: no records for algorithm {label!r}" + (f" with h={h}" if h is not None else ""))
    if h is None and len({r.h for r in selected}) > 1:
        raise UsageError(f"{flag}: algorithm {label!r} has several h values; pick one with {flag.replace('--', '--h-')}")
    return selected


def cmd_screens(args) -> int:
    for name, matrix in screen_catalog().items():
        print(name)
        width = len(str(matrix.max()))
        for row in matrix:
            print(" ".join(f"{v:>{width}}" for v in row))
        print()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inkchannel", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("halftone", help="halftone a PGM into a PBM")
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--h", type=int, default=None, help="blockd tile size")
    p.add_argument("--level", type=float, default=None, help="threshold level in [0,1]")
    p.add_argument("--order", type=int, default=None, help="bayer/cdot matrix order")
    p.add_argument("--seed", type=int, default=None, help="seed (required for random)")
    p.set_defaults(func=cmd_halftone)

    p = sub.add_parser("noise", help="generate a raw noise field as PBM")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("transmit", help="send a PBM through the noisy channel")
    p.add_argument("--kind", required=True, choices=channel.CHANNEL_KINDS)
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--block", type=int, default=None, help="block size (block-erase only)")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("metric", help="print a distortion/information measure")
    p.add_argument("--name", required=True, choices=("euclid", "kl", "entropy"))
    p.add_argument("--a", required=True)
    p.add_argument("--b", default=None)
    p.add_argument("--hist", default="binary", help="binary | block:<size>x<bins>")
    p.add_argument("--smoothing", default="none", help="none | additive:<lambda>")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("entropy-curve", help="mean noise entropy over a power grid")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--t-grid", required=True, help="comma-separated powers")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_entropy_curve)

    p = sub.add_parser("sweep", help="run a robustness sweep from a config file")
    p.add_argument("--spec", required=True, help="sweep config file")
    p.add_argument("--out", required=True, help="record CSV output path")
    p.add_argument("--agg-out", default=None, help="aggregate CSV path (default: <out>.agg.csv)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (result is jobs-invariant)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="pairwise robustness verdicts from a record CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--a", required=True, help="first algorithm label")
    p.add_argument("--b", required=True, help="second algorithm label")
    p.add_argument("--h-a", type=int, default=None, help="h for the first side (blockd)")
    p.add_argument("--h-b", type=int, default=None, help="h for the second side (blockd)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("screens", help="print all compiled-in screen/class matrices")
    p.set_defaults(func=cmd_screens)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, imagery.NetpbmError, robustness.SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
