"""Command-line interface.

Subcommands: build-pack, match, eval, significance, impact, walks.
Options for `match` can come from an INI-style config file ([section]
key=value); every key has a flag override. Diagnostics go to stderr,
data to files or stdout. Exit codes: 0 success, 1 configuration error,
2 malformed data.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from bkmatch.alignio import AlignmentFormat, ReadIssue, read_alignment, write_alignment
from bkmatch.embeddings import EmbeddingStore, WalkConfig, WalkStats, generate_walks, load_vectors, write_walks
from bkmatch.errors import ConfigurationError, DataError
from bkmatch.evaluation import (
    AggregateMode,
    aggregate,
    confusion,
    impact,
    mcnemar_counts,
    mcnemar_test,
    prf,
    significance_matrix,
)
from bkmatch.ingest import BUILTIN_PROFILES, IngestStats, PredicateProfile, build_pack, extract_ontology, get_profile
from bkmatch.matcher import MatchStats, run_match
from bkmatch.model import Alignment, MatcherConfig, Strategy
from bkmatch.ntriples import ParseIssue, parse_ntriples
from bkmatch.pack import load_pack, save_pack
from bkmatch.text import DEFAULT_STOPWORDS

PACK_DIR_ENV = "BKMATCH_PACK_DIR"


def _fail(message: str) -> ConfigurationError:
    return ConfigurationError(message)


def _require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise _fail(f"{what} not found: {path}")
    return path


def _parse_strict_lenient(mode: str) -> bool:
    return mode == "strict"


def _parse_ontology(path: Path, strict: bool, ontology_id: str, stats: IngestStats | None = None):
    issues: list[ParseIssue] = []
    profile = PredicateProfile(
        name="labels", label_predicates=frozenset({"http://www.w3.org/2000/01/rdf-schema#label"})
    )
    triples = parse_ntriples(path, strict=strict, issues=issues)
    ontology = extract_ontology(triples, profile, ontology_id, stats)
    if issues:
        print(f"note: skipped {len(issues)} malformed line(s) in {path}", file=sys.stderr)
    return ontology


# ---------------------------------------------------------------- build-pack


def cmd_build_pack(args: argparse.Namespace) -> int:
    triples_path = _require_file(Path(args.triples), "triple file")
    if args.profile:
        profile = get_profile(args.profile)
        if args.label_predicate or args.synonym_predicate or args.hypernym_predicate:
            raise _fail("use either --profile or explicit predicate flags, not both")
    else:
        if not args.label_predicate:
            raise _fail("custom profiles need at least one --label-predicate")
        profile = PredicateProfile(
            name=args.name or triples_path.stem,
            label_predicates=frozenset(args.label_predicate),
            synonym_predicates=frozenset(args.synonym_predicate or ()),
            hypernym_predicates=frozenset(args.hypernym_predicate or ()),
        )
    mutual = None
    if args.mutual_hypernymy_synonymy is not None:
        mutual = args.mutual_hypernymy_synonymy == "true"
    issues: list[ParseIssue] = []
    stats = IngestStats()
    stream = parse_ntriples(triples_path, strict=_parse_strict_lenient(args.mode), issues=issues)
    pack = build_pack(
        stream,
        profile,
        name=args.name or None,
        mutual_hypernymy_synonymy=mutual,
        stats=stats,
    )
    save_pack(pack, args.out)
    if issues:
        print(f"note: skipped {len(issues)} malformed line(s)", file=sys.stderr)
    print(
        f"pack {pack.name}: {len(pack.surface_index)} surface forms, "
        f"{stats.labels_kept} labels kept, {stats.labels_filtered} filtered, "
        f"{len(pack.orphan_concepts)} orphan concepts",
        file=sys.stderr,
    )
    return 0


# --------------------------------------------------------------------- match


@dataclass
class RunSettings:
    source: Path | None = None
    target: Path | None = None
    packs: list[Path] = field(default_factory=list)
    vectors: dict[str, Path] = field(default_factory=dict)
    strategy: Strategy = Strategy.SYNONYMY
    threshold: float = 0.7
    combination: tuple[Strategy, ...] = (Strategy.SYNONYMY,)
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    output: Path | None = None
    output_format: AlignmentFormat | None = None
    strict: bool = False
    threads: int = 0


def _parse_strategy(value: str) -> Strategy:
    try:
        return Strategy(value)
    except ValueError:
        options = ", ".join(s.value for s in Strategy)
        raise _fail(f"unknown strategy {value!r} (options: {options})") from None


def _parse_combination(value: str) -> tuple[Strategy, ...]:
    members = tuple(_parse_strategy(part.strip()) for part in value.split(",") if part.strip())
    if not members:
        raise _fail("combination list must not be empty")
    return members


def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _load_run_settings(args: argparse.Namespace) -> RunSettings:
    settings = RunSettings()
    base = Path.cwd()
    if args.config:
        config_path = _require_file(Path(args.config), "config file")
        base = config_path.parent
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read(config_path, encoding="utf-8")
        except configparser.Error as exc:
            raise _fail(f"cannot parse config {config_path}: {exc}") from None
        if parser.has_option("ontologies", "source"):
            settings.source = _resolve(base, parser.get("ontologies", "source"))
        if parser.has_option("ontologies", "target"):
            settings.target = _resolve(base, parser.get("ontologies", "target"))
        if parser.has_option("packs", "dirs"):
            settings.packs = [
                _resolve_pack_dir(raw, base) for raw in _split_list(parser.get("packs", "dirs"))
            ]
        if parser.has_section("vectors"):
            for name, value in parser.items("vectors"):
                settings.vectors[name] = _resolve(base, value)
        if parser.has_option("match", "strategy"):
            settings.strategy = _parse_strategy(parser.get("match", "strategy"))
        if parser.has_option("match", "threshold"):
            settings.threshold = parser.getfloat("match", "threshold")
        if parser.has_option("match", "combination"):
            settings.combination = _parse_combination(parser.get("match", "combination"))
        if parser.has_option("match", "stopwords"):
            settings.stopwords = frozenset(_split_list(parser.get("match", "stopwords")))
        if parser.has_option("output", "path"):
            settings.output = _resolve(base, parser.get("output", "path"))
        if parser.has_option("output", "format"):
            settings.output_format = _parse_output_format(parser.get("output", "format"))
        if parser.has_option("run", "mode"):
            settings.strict = _parse_mode(parser.get("run", "mode"))
        if parser.has_option("run", "threads"):
            settings.threads = parser.getint("run", "threads")

    if args.source:
        settings.source = Path(args.source)
    if args.target:
        settings.target = Path(args.target)
    if args.pack:
        settings.packs = [_resolve_pack_dir(raw, Path.cwd()) for raw in args.pack]
    for item in args.vectors or ():
        if "=" not in item:
            raise _fail(f"--vectors expects NAME=PATH, got {item!r}")
        name, _, path = item.partition("=")
        settings.vectors[name] = Path(path)
    if args.strategy:
        settings.strategy = _parse_strategy(args.strategy)
    if args.threshold is not None:
        settings.threshold = args.threshold
    if args.combination:
        settings.combination = _parse_combination(args.combination)
    if args.stopwords is not None:
        settings.stopwords = frozenset(_split_list(args.stopwords))
    if args.output:
        settings.output = Path(args.output)
    if args.output_format:
        settings.output_format = _parse_output_format(args.output_format)
    if args.mode:
        settings.strict = _parse_mode(args.mode)
    if args.threads is not None:
        settings.threads = args.threads
    return settings


def _parse_mode(value: str) -> bool:
    if value not in ("strict", "lenient"):
        raise _fail(f"mode must be strict or lenient, got {value!r}")
    return value == "strict"


def _parse_output_format(value: str) -> AlignmentFormat:
    try:
        return AlignmentFormat(value)
    except ValueError:
        options = ", ".join(f.value for f in AlignmentFormat)
        raise _fail(f"unknown output format {value!r} (options: {options})") from None


def _resolve(base: Path, raw: str) -> Path:
    path = Path(raw)
    return path if path.is_absolute() else base / path


def _resolve_pack_dir(raw: str, base: Path) -> Path:
    path = Path(raw)
    if path.is_absolute():
        return path
    local = base / path
    if local.is_dir():
        return local
    env = os.environ.get(PACK_DIR_ENV)
    if env:
        shared = Path(env) / path
        if shared.is_dir():
            return shared
    return local


def cmd_match(args: argparse.Namespace) -> int:
    settings = _load_run_settings(args)
    if settings.source is None or settings.target is None:
        raise _fail("both a source and a target ontology are required")
    if not settings.packs:
        raise _fail("at least one pack directory is required")
    if settings.output is None:
        raise _fail("an output path is required")
    _require_file(settings.source, "source ontology")
    _require_file(settings.target, "target ontology")
    for pack_dir in settings.packs:
        if not pack_dir.is_dir():
            raise _fail(f"pack directory not found: {pack_dir}")

    source = _parse_ontology(settings.source, settings.strict, settings.source.stem)
    target = _parse_ontology(settings.target, settings.strict, settings.target.stem)
    packs = [load_pack(pack_dir) for pack_dir in settings.packs]

    stores: list[EmbeddingStore | None] = []
    for pack in packs:
        vector_path = settings.vectors.get(pack.name)
        if vector_path is None:
            stores.append(None)
        else:
            stores.append(load_vectors(_require_file(vector_path, "vector file")))
    unknown = set(settings.vectors) - {pack.name for pack in packs}
    if unknown:
        raise _fail(f"vectors given for unknown pack name(s): {', '.join(sorted(unknown))}")

    config = MatcherConfig(
        strategy=settings.strategy,
        embedding_threshold=settings.threshold,
        stopwords=settings.stopwords,
        combination_strategies=settings.combination,
    )
    threads = settings.threads if settings.threads > 0 else (os.cpu_count() or 1)
    stats = MatchStats()
    alignment = run_match(source, target, packs, stores, config, threads=threads, stats=stats)
    write_alignment(alignment, settings.output, settings.output_format)

    tiers = stats.link_stats.values()
    print(
        f"source entities: {len(source)}, target entities: {len(target)}\n"
        f"string matches: {stats.string_matches} (from {stats.string_pairs} raw pairs)\n"
        f"pairs scanned: {stats.pairs_scanned}\n"
        f"labels linked: full-label {sum(t.full_label_links for t in tiers)}, "
        f"longest-token {sum(t.longest_token_links for t in tiers)}, "
        f"token {sum(t.token_links for t in tiers)}, "
        f"unlinked {sum(t.unlinked_labels for t in tiers)}\n"
        f"candidates: {stats.candidate_pairs}\n"
        f"extracted: {stats.extracted}\n"
        f"total cells: {len(alignment)}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------- eval


def _read_alignment_checked(raw: str, lenient: bool) -> Alignment:
    path = _require_file(Path(raw), "alignment file")
    issues: list[ReadIssue] = []
    alignment = read_alignment(path, lenient=lenient, issues=issues)
    if issues:
        print(f"note: skipped {len(issues)} bad cell(s) in {path}", file=sys.stderr)
    return alignment


def cmd_eval(args: argparse.Namespace) -> int:
    if len(args.system) != len(args.reference):
        raise _fail("--system and --reference must be given the same number of times")
    names = args.testcase or [f"tc{i + 1}" for i in range(len(args.system))]
    if len(names) != len(args.system):
        raise _fail("--testcase count must match --system count")
    lenient = not _parse_mode(args.mode) if args.mode else True
    rows = []
    counts = []
    for name, system_path, reference_path in zip(names, args.system, args.reference):
        system = _read_alignment_checked(system_path, lenient)
        reference = _read_alignment_checked(reference_path, lenient)
        c = confusion(system, reference)
        counts.append(c)
        precision, recall, f1 = prf(c)
        rows.append([args.config_name, name, c.tp, c.fp, c.fn, precision, recall, f1])

    modes = {
        "micro": (AggregateMode.MICRO,),
        "macro": (AggregateMode.MACRO,),
        "both": (AggregateMode.MICRO, AggregateMode.MACRO),
    }[args.aggregate]
    total = counts[0]
    for c in counts[1:]:
        total = total + c
    for mode in modes:
        precision, recall, f1 = aggregate(counts, mode)
        rows.append([args.config_name, mode.value, total.tp, total.fp, total.fn, precision, recall, f1])

    with _open_out(args.out) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["config", "testcase", "tp", "fp", "fn", "precision", "recall", "f1"])
        for row in rows:
            writer.writerow(row[:5] + [f"{v:.6f}" for v in row[5:]])
    return 0


def _open_out(raw: str | None):
    if raw is None or raw == "-":
        return _StdoutGuard()
    return open(raw, "w", encoding="utf-8", newline="")


class _StdoutGuard:
    """Context manager handing out stdout without closing it."""

    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        return False


# -------------------------------------------------------------- significance


def _read_manifest(path: Path, columns: int, what: str) -> list[list[str]]:
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != columns:
                raise DataError(
                    f"{path}, line {lineno}: {what} rows need {columns} tab-separated fields"
                )
            rows.append(parts)
    return rows


def _load_references(raw: str) -> dict[str, Alignment]:
    path = _require_file(Path(raw), "reference manifest")
    references: dict[str, Alignment] = {}
    for testcase, alignment_path in _read_manifest(path, 2, "reference manifest"):
        if testcase in references:
            raise DataError(f"{path}: duplicate test case {testcase!r}")
        references[testcase] = _read_alignment_checked(alignment_path, lenient=True)
    if not references:
        raise _fail(f"reference manifest {path} is empty")
    return references


def cmd_significance(args: argparse.Namespace) -> int:
    references = _load_references(args.references)
    manifest_path = _require_file(Path(args.manifest), "run manifest")
    runs: dict[str, dict[str, Alignment]] = {}
    for config_name, testcase, alignment_path in _read_manifest(manifest_path, 3, "run manifest"):
        if testcase not in references:
            raise _fail(f"run manifest names unknown test case {testcase!r}")
        per_config = runs.setdefault(config_name, {})
        if testcase in per_config:
            raise DataError(f"{manifest_path}: duplicate ({config_name}, {testcase})")
        per_config[testcase] = _read_alignment_checked(alignment_path, lenient=True)
    if len(runs) < 2:
        raise _fail("significance needs at least two configurations")
    testcases = sorted(references)
    for config_name, per_config in runs.items():
        missing = set(testcases) - set(per_config)
        if missing:
            raise _fail(f"configuration {config_name!r} lacks test case(s): {', '.join(sorted(missing))}")

    matrix = significance_matrix(
        {name: [runs[name][tc] for tc in testcases] for name in sorted(runs)},
        [references[tc] for tc in testcases],
        args.alpha,
    )
    with _open_out(args.out) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["config", *matrix.names])
        for name, row in zip(matrix.names, matrix.counts):
            writer.writerow([name, *row])
    return 0


# -------------------------------------------------------------------- impact


def cmd_impact(args: argparse.Namespace) -> int:
    references = _load_references(args.references)
    manifest_path = _require_file(Path(args.manifest), "run manifest")
    runs: dict[tuple[str, str], dict[str, Alignment]] = {}
    strategies: list[str] = []
    sources: list[str] = []
    for strategy, source, testcase, alignment_path in _read_manifest(
        manifest_path, 4, "run manifest"
    ):
        if testcase not in references:
            raise _fail(f"run manifest names unknown test case {testcase!r}")
        key = (source, strategy)
        per_config = runs.setdefault(key, {})
        if testcase in per_config:
            raise DataError(f"{manifest_path}: duplicate row for {key} / {testcase}")
        per_config[testcase] = _read_alignment_checked(alignment_path, lenient=True)
        if strategy not in strategies:
            strategies.append(strategy)
        if source not in sources:
            sources.append(source)
    if len(strategies) < 2 or len(sources) < 2:
        raise _fail("impact needs at least two strategies and two sources in the manifest")
    testcases = sorted(references)
    for source in sources:
        for strategy in strategies:
            have = runs.get((source, strategy), {})
            missing = set(testcases) - set(have)
            if missing:
                raise _fail(
                    f"run manifest lacks ({source}, {strategy}) on: {', '.join(sorted(missing))}"
                )

    cache: dict[tuple[tuple[str, str], tuple[str, str], str], bool] = {}

    def sig_lookup(cfg1: tuple[str, str], cfg2: tuple[str, str], testcase: str) -> bool:
        first, second = sorted((cfg1, cfg2))
        key = (first, second, testcase)
        if key not in cache:
            counts = mcnemar_counts(
                runs[first][testcase], runs[second][testcase], references[testcase]
            )
            cache[key] = mcnemar_test(counts, args.alpha).significant
        return cache[key]

    report = impact(
        sig_lookup,
        sorted(strategies),
        sorted(sources),
        testcases,
        verbatim_source_denominator=args.verbatim_source_denominator,
    )
    with _open_out(args.out) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "value", "std"])
        writer.writerow(["impact_strategy", f"{report.impact_strategy:.6f}", f"{report.std_strategy:.6f}"])
        writer.writerow(["impact_source", f"{report.impact_source:.6f}", f"{report.std_source:.6f}"])
    return 0


# --------------------------------------------------------------------- walks


def cmd_walks(args: argparse.Namespace) -> int:
    graph_path = _require_file(Path(args.graph), "graph file")
    nodes_path = _require_file(Path(args.nodes), "nodes file")
    nodes = [
        line.strip()
        for line in nodes_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not nodes:
        raise _fail(f"nodes file {nodes_path} is empty")
    issues: list[ParseIssue] = []
    triples = parse_ntriples(graph_path, strict=_parse_strict_lenient(args.mode), issues=issues)
    config = WalkConfig(walks_per_node=args.walks_per_node, depth=args.depth, seed=args.seed)
    stats = WalkStats()
    count = write_walks(generate_walks(triples, nodes, config, stats), args.out)
    if issues:
        print(f"note: skipped {len(issues)} malformed line(s) in {graph_path}", file=sys.stderr)
    print(
        f"walked {stats.nodes_walked} node(s), {stats.nodes_without_edges} had no outgoing "
        f"edges, wrote {count} walk(s)",
        file=sys.stderr,
    )
    return 0


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bkmatch",
        description="Match schemas/ontologies against background-knowledge packs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("build-pack", help="distil a triple dump into a pack directory")
    p.add_argument("triples", help="N-Triples input file")
    p.add_argument("--profile", choices=sorted(BUILTIN_PROFILES), help="built-in predicate profile")
    p.add_argument("--label-predicate", action="append", help="label predicate IRI (repeatable)")
    p.add_argument("--synonym-predicate", action="append", help="synonym predicate IRI (repeatable)")
    p.add_argument("--hypernym-predicate", action="append", help="hypernym predicate IRI (repeatable)")
    p.add_argument("--name", help="pack name (default: profile or input stem)")
    p.add_argument(
        "--mutual-hypernymy-synonymy",
        choices=("true", "false"),
        help="treat mutual hypernyms as synonyms (default: profile setting)",
    )
    p.add_argument("--out", required=True, help="pack directory to write")
    p.add_argument("--mode", choices=("strict", "lenient"), default="lenient", help="parse mode")
    p.set_defaults(func=cmd_build_pack)

    p = commands.add_parser("match", help="align two ontologies")
    p.add_argument("--config", help="INI config file; flags override its keys")
    p.add_argument("--source", help="source ontology (N-Triples)")
    p.add_argument("--target", help="target ontology (N-Triples)")
    p.add_argument("--pack", action="append", help="pack directory (repeatable)")
    p.add_argument("--vectors", action="append", metavar="NAME=PATH", help="vector file for a pack")
    p.add_argument("--strategy", help="synonymy | synonymy-hypernymy | embedding | combination")
    p.add_argument("--threshold", type=float, help="embedding similarity threshold")
    p.add_argument("--combination", help="comma list of strategies unioned by combination")
    p.add_argument("--stopwords", help="comma list replacing the default stopword set")
    p.add_argument("--output", help="alignment file to write")
    p.add_argument("--output-format", help="tsv | align-xml")
    p.add_argument("--mode", choices=("strict", "lenient"), help="parse mode (default lenient)")
    p.add_argument("--threads", type=int, help="worker threads (default: available cores)")
    p.set_defaults(func=cmd_match)

    p = commands.add_parser("eval", help="score alignments against references")
    p.add_argument("--system", action="append", required=True, help="system alignment (repeatable)")
    p.add_argument("--reference", action="append", required=True, help="reference alignment (repeatable)")
    p.add_argument("--testcase", action="append", help="test case name (repeatable)")
    p.add_argument("--config-name", default="system", help="label for the config column")
    p.add_argument("--aggregate", choices=("micro", "macro", "both"), default="both")
    p.add_argument("--mode", choices=("strict", "lenient"), help="alignment parse mode")
    p.add_argument("--out", help="CSV report path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = commands.add_parser("significance", help="pairwise significant-difference counts")
    p.add_argument("--manifest", required=True, help="TSV: config, testcase, alignment path")
    p.add_argument("--references", required=True, help="TSV: testcase, reference path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="CSV matrix path (default stdout)")
    p.set_defaults(func=cmd_significance)

    p = commands.add_parser("impact", help="factor impact over a run manifest")
    p.add_argument("--manifest", required=True, help="TSV: strategy, source, testcase, alignment path")
    p.add_argument("--references", required=True, help="TSV: testcase, reference path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument(
        "--verbatim-source-denominator",
        action="store_true",
        help="use the legacy asymmetric source denominator",
    )
    p.add_argument("--out", help="CSV report path (default stdout)")
    p.set_defaults(func=cmd_impact)

    p = commands.add_parser("walks", help="generate a random-walk corpus")
    p.add_argument("graph", help="N-Triples graph file")
    p.add_argument("--nodes", required=True, help="file with one node IRI per line")
    p.add_argument("--walks-per-node", type=int, default=500)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="corpus file to write")
    p.add_argument("--mode", choices=("strict", "lenient"), default="lenient", help="parse mode")
    p.set_defaults(func=cmd_walks)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
