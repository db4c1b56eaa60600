"""Command-line interface.

Exit codes: 0 success, 1 graph failed validation, 2 bad arguments or input
data, 3 I/O error, 4 incompatible graphs, 5 corrupt file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import tempfile
from pathlib import Path

from . import boss, formats
from .alphabet import AlphabetError, alphabet_for_sigma, parse_alphabet, read_sequences
from .errors import FormatError, IncompatibleGraphsError, MalformedGraphError
from .merge import merge
from .pipeline import BudgetTooSmallError, build_pipeline
from .reference import StringCollection, build_boss, build_colored, build_lcs
from .streams import DEFAULT_BUFFER, stream_merge, workdir_default

EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INCOMPATIBLE = 4
EXIT_CORRUPT = 5

log = logging.getLogger("bossmerge")


def _side(path: Path, suffix: str) -> Path:
    return path.with_suffix(suffix)


def _read_collections(paths, alphabet) -> list[StringCollection]:
    out = []
    for p in paths:
        strings = tuple(read_sequences(p, alphabet))
        if not strings:
            raise ValueError(f"{p}: no sequences")
        out.append(StringCollection(strings, name=str(p)))
    return out


def cmd_build(args) -> int:
    alphabet = parse_alphabet(args.alphabet)
    cols = _read_collections(args.inputs, alphabet)
    out = Path(args.output)
    if args.colored:
        g, M = build_colored(cols, args.k, alphabet.sigma)
        formats.save_colors(M, _side(out, ".colors"))
    else:
        union = StringCollection(tuple(s for S in cols for s in S))
        g = build_boss(union, args.k, alphabet.sigma)
    boss.save(g, out)
    if args.lcs:
        union = StringCollection(tuple(s for S in cols for s in S))
        formats.save_lcs(build_lcs(union, args.k), _side(out, ".lcs"))
    return 0


def cmd_merge(args) -> int:
    a, b, out = Path(args.a), Path(args.b), Path(args.output)
    color_in = None
    if args.colored:
        color_in = tuple(Path(p) for p in args.colors) if args.colors else (_side(a, ".colors"), _side(b, ".colors"))
    if args.external:
        st = stream_merge(
            a, b, out, "full" if args.lcs else "compact", args.buffer_bytes,
            colors=color_in,
            colors_out=_side(out, ".colors") if args.colored else None,
            lcs_out=_side(out, ".lcs") if args.lcs else None,
            workdir=args.workdir or workdir_default(),
        )
        if args.stats:
            print(st.to_json())
        return 0
    g0, g1 = boss.load(a), boss.load(b)
    colors = None
    if color_in is not None:
        colors = (formats.load_colors(color_in[0]), formats.load_colors(color_in[1]))
    res = merge(g0, g1, colors=colors, lcs=args.lcs)
    boss.save(res.graph, out)
    if res.colors is not None:
        formats.save_colors(res.colors, _side(out, ".colors"))
    if res.lcs is not None:
        formats.save_lcs(res.lcs, _side(out, ".lcs"))
    if args.stats:
        s = res.stats
        print(json.dumps({"iterations": s.iterations, "steps": s.steps, "edge_reads": s.edge_reads,
                          "aux_bits": s.aux_bits, "aux_words": s.aux_words}, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    g = boss.load(args.path, check=False)
    problems = boss.validate(g, deep=True)
    if not problems:
        print(f"{args.path}: valid (k={g.k}, sigma={g.sigma}, n={g.n}, m={g.m})")
        return 0
    for p in problems:
        print(f"{args.path}: {p}")
    return EXIT_INVALID


def graph_stats(g: boss.BossGraph) -> dict:
    return {"k": g.k, "sigma": g.sigma, "n": g.n, "m": g.m, "placeholders": g.placeholders}


def cmd_stats(args) -> int:
    print(json.dumps(graph_stats(boss.load(args.path)), sort_keys=True))
    return 0


def dump_lines(g: boss.BossGraph, alphabet) -> list[str]:
    labels = boss.node_labels(g)
    width = max(g.k, 5)
    lines = [f"{'rank':>6}  {'label':<{width}}  {'edges':<12}  Wminus"]
    for j, (s, e) in enumerate(g.groups()):
        edges = ",".join(alphabet.decode([c]) for c in g.W[s:e])
        flags = "".join(str(int(b)) for b in g.wminus[s:e])
        lines.append(f"{j:>6}  {alphabet.decode(labels[j]):<{width}}  {edges:<12}  {flags}")
    return lines


def cmd_dump(args) -> int:
    g = boss.load(args.path)
    alphabet = parse_alphabet(args.alphabet) if args.alphabet else alphabet_for_sigma(g.sigma)
    print("\n".join(dump_lines(g, alphabet)))
    return 0


def cmd_pipeline(args) -> int:
    alphabet = parse_alphabet(args.alphabet)
    workdir = args.workdir or workdir_default()
    tmp = None
    if workdir is None:
        tmp = tempfile.TemporaryDirectory(prefix="bossmerge-pipeline-")
        workdir = tmp.name
    try:
        res = build_pipeline(
            args.inputs, args.k, args.mem_budget, workdir,
            output=args.output, alphabet=alphabet, colored=args.colored, lcs=args.lcs,
            keep_intermediates=args.keep_intermediates, buffer_bytes=args.buffer_bytes, jobs=args.jobs,
        )
    finally:
        if tmp is not None:
            tmp.cleanup()
    print(json.dumps({"leaves": res.leaves, "rounds": res.rounds, "output": str(res.graph_path)}, sort_keys=True))
    return 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bossmerge", description="Build and merge succinct de Bruijn graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a graph from FASTA or one-string-per-line files")
    b.add_argument("inputs", nargs="+")
    b.add_argument("--k", type=_positive, required=True)
    b.add_argument("--alphabet", default="dna", help="dna, byte:N or chars:XYZ")
    b.add_argument("--colored", action="store_true", help="one color per input file")
    b.add_argument("--lcs", action="store_true", help="also write the LCS array")
    b.add_argument("-o", "--output", default="out.boss")
    b.set_defaults(func=cmd_build)

    m = sub.add_parser("merge", help="merge two .boss files")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("-o", "--output", default="merged.boss")
    m.add_argument("--colored", action="store_true")
    m.add_argument("--colors", nargs=2, metavar=("A_COLORS", "B_COLORS"))
    m.add_argument("--lcs", action="store_true")
    m.add_argument("--external", action="store_true", help="stream all arrays through files")
    m.add_argument("--buffer-bytes", type=_positive, default=DEFAULT_BUFFER)
    m.add_argument("--workdir")
    m.add_argument("--stats", action="store_true", help="print merge statistics as JSON")
    m.set_defaults(func=cmd_merge)

    for name, fn, text in (("validate", cmd_validate, "check every invariant"),
                           ("stats", cmd_stats, "print k, sigma, n, m as JSON"),
                           ("dump", cmd_dump, "print the node table")):
        s = sub.add_parser(name, help=text)
        s.add_argument("path")
        if name == "dump":
            s.add_argument("--alphabet")
        s.set_defaults(func=fn)

    pl = sub.add_parser("pipeline", help="build through leaves and a merge tree")
    pl.add_argument("inputs", nargs="+")
    pl.add_argument("--k", type=_positive, required=True)
    pl.add_argument("--mem-budget", type=_positive, required=True, help="bytes")
    pl.add_argument("--alphabet", default="dna")
    pl.add_argument("--workdir")
    pl.add_argument("-o", "--output", default="out.boss")
    pl.add_argument("--colored", action="store_true")
    pl.add_argument("--lcs", action="store_true")
    pl.add_argument("--keep-intermediates", action="store_true")
    pl.add_argument("--buffer-bytes", type=_positive, default=DEFAULT_BUFFER)
    pl.add_argument("--jobs", type=_positive, default=1)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IncompatibleGraphsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except (FormatError, MalformedGraphError) as exc:
        print(f"error: corrupt file: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (AlphabetError, BudgetTooSmallError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
