"""Command-line driver for the rendering / embedding / analysis pipeline.

Subcommands: render, embed, calibrate, detect, classify, evaluate. Every
command prints a JSON run report to stdout (and to ``--report`` when
given). Exit code is 0 only when there were no per-item failures and no
configuration errors.
"""

from __future__ import annotations

import csv
import io
import json
import random
import sys
import time
from pathlib import Path

import click

from . import analysis, cache, corpus, model, pipeline, pngio, report
from .errors import CodeGlyphError
from .raster import RenderConfig, Variant, render
from .tokens import builtin_profiles, load_profile

_VARIANTS = {
    "plain": Variant.PLAIN,
    "keyword": Variant.KEYWORD,
    "syntax": Variant.SYNTAX,
}

DEFAULT_SEED = 42


def _profiles(extra: tuple[str, ...]) -> dict:
    registry = builtin_profiles()
    for path in extra:
        profile = load_profile(path)
        registry[profile.name] = profile
    return registry


def _emit(rep: dict, report_path: str | None, started: float) -> None:
    rep["wall_time_s"] = round(time.monotonic() - started, 6)
    text = report.render_report(rep)
    click.echo(text, nl=False)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")


def _load_cache_map(path: str) -> dict:
    return {v.id: v.values for v in cache.read_cache(path)}


def _require_embeddings(ids: set[str], vectors: dict, cache_path: str) -> None:
    missing = sorted(ids - set(vectors))
    if missing:
        raise click.ClickException(
            f"cache {cache_path} has no embedding for: {', '.join(missing)}")


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _fail_on(failures: dict) -> None:
    if failures:
        sys.exit(1)


class _CatchErrors(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except FileNotFoundError as exc:
            raise click.ClickException(str(exc))
        except (CodeGlyphError, ValueError) as exc:
            raise click.ClickException(str(exc))


@click.group(cls=_CatchErrors)
@click.version_option(package_name="codeglyph")
def main() -> None:
    """Deterministic code visualization and embedding toolkit."""


# shared option builders

_opt_manifest = click.option("--manifest", required=True,
                             type=click.Path(exists=True, dir_okay=False),
                             help="Snippet manifest (JSONL).")
_opt_profile = click.option("--profile", multiple=True,
                            type=click.Path(exists=True, dir_okay=False),
                            help="Extra language profile JSON (repeatable).")
_opt_variant = click.option("--variant", default="syntax",
                            type=click.Choice(sorted(_VARIANTS)),
                            help="Visualization variant.")
_opt_report = click.option("--report", "report_path", default=None,
                           type=click.Path(dir_okay=False),
                           help="Also write the run report to this file.")
_opt_pairs = click.option("--pairs", required=True,
                          type=click.Path(exists=True, dir_okay=False),
                          help="Labeled pair list (CSV).")
_opt_cache = click.option("--cache", "cache_path", required=True,
                          type=click.Path(exists=True, dir_okay=False),
                          help="Embedding cache file.")
_opt_seed = click.option("--seed", default=DEFAULT_SEED, show_default=True,
                         help="Seed for any randomized step.")


def _render_config(variant: str, width: int, height: int, tab_width: int) -> RenderConfig:
    return RenderConfig(width=width, height=height, tab_width=tab_width,
                        variant=_VARIANTS[variant])


@main.command("render")
@_opt_manifest
@_opt_profile
@_opt_variant
@click.option("--width", default=224, show_default=True)
@click.option("--height", default=224, show_default=True)
@click.option("--tab-width", default=4, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the rendered PNGs.")
@_opt_seed
@_opt_report
def cmd_render(manifest: str, profile: tuple[str, ...], variant: str, width: int,
               height: int, tab_width: int, out_dir: str, seed: int,
               report_path: str | None) -> None:
    """Render every manifest snippet to <id>.png."""
    started = time.monotonic()
    profiles = _profiles(profile)
    entries = corpus.load_manifest(manifest, profiles.keys())
    config = _render_config(variant, width, height, tab_width)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rendered: list[str] = []
    failures: dict[str, str] = {}
    for entry in entries:
        try:
            source = entry.path.read_bytes()
        except OSError as exc:
            failures[entry.id] = f"cannot read snippet: {exc}"
            continue
        image = render(source, profiles[entry.language], config)
        pngio.write_image(image, out / f"{entry.id}.png")
        rendered.append(entry.id)

    rep = report.build_report(
        "render",
        inputs={"manifest": manifest},
        parameters={"variant": variant, "width": width, "height": height,
                    "tab_width": tab_width, "out": str(out), "seed": seed},
        outputs={"rendered": rendered},
        failures=failures,
    )
    _emit(rep, report_path, started)
    _fail_on(failures)


@main.command("embed")
@_opt_manifest
@_opt_profile
@_opt_variant
@click.option("--model-descriptor", "descriptor_path", required=True,
              type=click.Path(dir_okay=False),
              help="Model descriptor JSON.")
@click.option("--width", default=224, show_default=True)
@click.option("--height", default=224, show_default=True)
@click.option("--tab-width", default=4, show_default=True)
@click.option("--workers", default=1, show_default=True,
              help="Render/preprocess worker threads.")
@click.option("--out", "out_cache", required=True, type=click.Path(dir_okay=False),
              help="Embedding cache to write.")
@_opt_seed
@_opt_report
def cmd_embed(manifest: str, profile: tuple[str, ...], variant: str,
              descriptor_path: str, width: int, height: int, tab_width: int,
              workers: int, out_cache: str, seed: int,
              report_path: str | None) -> None:
    """Embed every manifest snippet into a binary cache."""
    started = time.monotonic()
    profiles = _profiles(profile)
    entries = corpus.load_manifest(manifest, profiles.keys())
    extractor = model.load_model(descriptor_path)
    config = _render_config(variant, width, height, tab_width)

    result = pipeline.embed_corpus(extractor, entries, profiles,
                                   config=config, workers=workers)
    cache.write_cache(result.vectors, out_cache)

    rep = report.build_report(
        "embed",
        inputs={"manifest": manifest, "model_descriptor": descriptor_path},
        parameters={"variant": variant, "width": width, "height": height,
                    "tab_width": tab_width, "workers": workers,
                    "out": out_cache, "seed": seed},
        outputs={"embedded": sorted(v.id for v in result.vectors),
                 "dim": extractor.descriptor.embedding_dim},
        failures=result.failures,
    )
    _emit(rep, report_path, started)
    _fail_on(result.failures)


@main.command("calibrate")
@_opt_cache
@_opt_pairs
@_opt_manifest
@_opt_profile
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Threshold JSON to write.")
@_opt_seed
@_opt_report
def cmd_calibrate(cache_path: str, pairs: str, manifest: str,
                  profile: tuple[str, ...], out_path: str, seed: int,
                  report_path: str | None) -> None:
    """Pick the F1-maximizing clone threshold on labeled pairs."""
    started = time.monotonic()
    entries = corpus.load_manifest(manifest, _profiles(profile).keys())
    pair_list = corpus.load_pairs(pairs, entries)
    vectors = _load_cache_map(cache_path)
    _require_embeddings({i for p in pair_list for i in (p.id_a, p.id_b)},
                        vectors, cache_path)

    scored = [(analysis.cosine_similarity(vectors[p.id_a], vectors[p.id_b]), p.label)
              for p in pair_list]
    threshold, f1 = analysis.calibrate_threshold(scored)
    Path(out_path).write_text(
        json.dumps({"f1": f1, "threshold": threshold}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")

    rep = report.build_report(
        "calibrate",
        inputs={"cache": cache_path, "pairs": pairs, "manifest": manifest},
        parameters={"out": out_path, "seed": seed},
        outputs={"threshold": threshold, "f1": f1, "pairs_scored": len(scored)},
        failures={},
    )
    _emit(rep, report_path, started)


@main.command("detect")
@_opt_cache
@_opt_pairs
@_opt_manifest
@_opt_profile
@click.option("--threshold", type=float, default=None,
              help="Clone decision threshold (inclusive).")
@click.option("--threshold-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Threshold JSON written by calibrate.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Per-pair decisions CSV to write.")
@_opt_seed
@_opt_report
def cmd_detect(cache_path: str, pairs: str, manifest: str,
               profile: tuple[str, ...], threshold: float | None,
               threshold_file: str | None, out_path: str, seed: int,
               report_path: str | None) -> None:
    """Score labeled pairs and decide clones at a threshold."""
    started = time.monotonic()
    if (threshold is None) == (threshold_file is None):
        raise click.UsageError("give exactly one of --threshold / --threshold-file")
    if threshold_file is not None:
        threshold = float(json.loads(Path(threshold_file).read_text())["threshold"])

    entries = corpus.load_manifest(manifest, _profiles(profile).keys())
    pair_list = corpus.load_pairs(pairs, entries)
    vectors = _load_cache_map(cache_path)
    _require_embeddings({i for p in pair_list for i in (p.id_a, p.id_b)},
                        vectors, cache_path)

    rows = []
    scores: dict[frozenset[str], float] = {}
    for p in pair_list:
        score, is_clone = analysis.detect_clone(vectors[p.id_a], vectors[p.id_b],
                                                threshold)
        scores[p.key] = score
        rows.append([p.id_a, p.id_b, repr(score), "1" if is_clone else "0"])
    _write_csv(out_path, ["id_a", "id_b", "score", "decision"], rows)

    metrics = analysis.evaluate_pairs(pair_list, scores, threshold)
    rep = report.build_report(
        "detect",
        inputs={"cache": cache_path, "pairs": pairs, "manifest": manifest},
        parameters={"threshold": threshold, "out": out_path, "seed": seed},
        metrics=metrics.as_dict(),
        outputs={"decisions": len(rows)},
        failures={},
    )
    _emit(rep, report_path, started)


@main.command("classify")
@click.option("--train-cache", type=click.Path(exists=True, dir_okay=False))
@click.option("--test-cache", type=click.Path(exists=True, dir_okay=False))
@click.option("--train-manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--test-manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--cache", "cache_path", type=click.Path(exists=True, dir_okay=False),
              help="Single cache to split (with --manifest and --split-ratio).")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False),
              help="Single labeled manifest to split.")
@_opt_profile
@click.option("--split-ratio", type=float, default=0.5, show_default=True,
              help="Train fraction when splitting a single corpus.")
@click.option("--k", default=1, show_default=True, help="Neighbor count.")
@click.option("--metric", default="cosine",
              type=click.Choice(["cosine", "euclidean"]), show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Predictions CSV to write.")
@_opt_seed
@_opt_report
def cmd_classify(train_cache: str | None, test_cache: str | None,
                 train_manifest: str | None, test_manifest: str | None,
                 cache_path: str | None, manifest: str | None,
                 profile: tuple[str, ...], split_ratio: float,
                 k: int, metric: str, out_path: str, seed: int,
                 report_path: str | None) -> None:
    """kNN-classify test snippets against labeled training embeddings."""
    started = time.monotonic()
    metric_name = (analysis.METRIC_COSINE if metric == "cosine"
                   else analysis.METRIC_EUCLIDEAN)
    languages = _profiles(profile).keys()
    inputs: dict[str, str] = {}
    split_used = False

    if cache_path and manifest:
        split_used = True
        inputs.update({"cache": cache_path, "manifest": manifest})
        entries = corpus.load_manifest(manifest, languages)
        labels = entries.labels()
        unlabeled = [e.id for e in entries if e.label is None]
        if unlabeled:
            raise click.ClickException(
                f"--split-ratio needs labels for every entry; missing: {unlabeled}")
        if not 0.0 < split_ratio < 1.0:
            raise click.UsageError("--split-ratio must be in (0, 1)")
        vectors = _load_cache_map(cache_path)
        _require_embeddings(set(entries.ids), vectors, cache_path)
        ids = sorted(entries.ids)
        random.Random(seed).shuffle(ids)
        cut = round(len(ids) * split_ratio)
        if cut == 0 or cut == len(ids):
            raise click.ClickException(
                f"split of {len(ids)} ids at ratio {split_ratio} leaves one side empty")
        train_ids, test_ids = ids[:cut], ids[cut:]
        train_vec = test_vec = vectors
        train_labels = labels
        truth = {i: labels[i] for i in test_ids}
    elif train_cache and test_cache and train_manifest:
        inputs.update({"train_cache": train_cache, "test_cache": test_cache,
                       "train_manifest": train_manifest})
        train_entries = corpus.load_manifest(train_manifest, languages)
        train_labels = train_entries.labels()
        unlabeled = [e.id for e in train_entries if e.label is None]
        if unlabeled:
            raise click.ClickException(
                f"training entries need labels; missing: {unlabeled}")
        train_vec = _load_cache_map(train_cache)
        _require_embeddings(set(train_entries.ids), train_vec, train_cache)
        train_ids = list(train_entries.ids)
        test_vec = _load_cache_map(test_cache)
        test_ids = sorted(test_vec)
        truth = {}
        if test_manifest:
            inputs["test_manifest"] = test_manifest
            test_entries = corpus.load_manifest(test_manifest, languages)
            test_ids = list(test_entries.ids)
            _require_embeddings(set(test_ids), test_vec, test_cache)
            truth = test_entries.labels()
    else:
        raise click.UsageError(
            "give either --cache/--manifest (split mode) or "
            "--train-cache/--test-cache/--train-manifest")

    index = analysis.NeighborIndex.build(
        [(i, train_labels[i], train_vec[i]) for i in train_ids], metric=metric_name)
    predictions = {i: analysis.knn_classify(index, test_vec[i], k) for i in test_ids}
    _write_csv(out_path, ["id", "label"],
               [[i, predictions[i]] for i in sorted(predictions)])

    outputs: dict = {"predicted": len(predictions), "train_size": len(train_ids)}
    if truth and set(truth) == set(predictions):
        outputs["accuracy"] = analysis.evaluate_classification(predictions, truth).accuracy

    rep = report.build_report(
        "classify",
        inputs=inputs,
        parameters={"k": k, "metric": metric, "out": out_path, "seed": seed,
                    "split_ratio": split_ratio if split_used else None},
        outputs=outputs,
        failures={},
    )
    _emit(rep, report_path, started)


@main.command("evaluate")
@click.option("--decisions", type=click.Path(exists=True, dir_okay=False),
              help="Decisions CSV from detect (pair mode).")
@click.option("--pairs", type=click.Path(exists=True, dir_okay=False),
              help="Labeled truth pairs (pair mode).")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False),
              help="Manifest: pair validation, or truth labels in "
                   "classification mode.")
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False),
              help="Predictions CSV from classify (classification mode).")
@_opt_profile
@_opt_seed
@_opt_report
def cmd_evaluate(decisions: str | None, pairs: str | None, manifest: str | None,
                 predictions: str | None, profile: tuple[str, ...], seed: int,
                 report_path: str | None) -> None:
    """Score decisions against labeled pairs, or predictions against labels."""
    started = time.monotonic()
    languages = _profiles(profile).keys()
    if decisions and pairs and manifest:
        entries = corpus.load_manifest(manifest, languages)
        pair_list = corpus.load_pairs(pairs, entries)
        decided = _read_decisions(decisions)
        tp = fp = tn = fn = 0
        for p in pair_list:
            if p.key not in decided:
                raise click.ClickException(
                    f"{decisions}: no decision for pair ({p.id_a!r}, {p.id_b!r})")
            if decided[p.key]:
                tp, fp = tp + (1 if p.label else 0), fp + (0 if p.label else 1)
            else:
                fn, tn = fn + (1 if p.label else 0), tn + (0 if p.label else 1)
        metrics = analysis.Metrics(tp=tp, fp=fp, tn=tn, fn=fn)
        rep = report.build_report(
            "evaluate",
            inputs={"decisions": decisions, "pairs": pairs, "manifest": manifest},
            parameters={"mode": "pairs", "seed": seed},
            metrics=metrics.as_dict(),
            failures={},
        )
    elif predictions and manifest:
        entries = corpus.load_manifest(manifest, languages)
        truth = entries.labels()
        predicted = _read_predictions(predictions)
        result = analysis.evaluate_classification(predicted, truth)
        rep = report.build_report(
            "evaluate",
            inputs={"predictions": predictions, "manifest": manifest},
            parameters={"mode": "classification", "seed": seed},
            metrics=result.as_dict(),
            failures={},
        )
    else:
        raise click.UsageError(
            "give --decisions/--pairs/--manifest or --predictions/--manifest")
    _emit(rep, report_path, started)


def _read_decisions(path: str) -> dict[frozenset[str], bool]:
    rows = list(csv.reader(Path(path).read_text(encoding="utf-8").splitlines()))
    if not rows or rows[0] != ["id_a", "id_b", "score", "decision"]:
        raise click.ClickException(f"{path}: not a decisions CSV")
    return {frozenset((row[0], row[1])): row[3] == "1"
            for row in rows[1:] if row}


def _read_predictions(path: str) -> dict[str, str]:
    rows = list(csv.reader(Path(path).read_text(encoding="utf-8").splitlines()))
    if not rows or rows[0] != ["id", "label"]:
        raise click.ClickException(f"{path}: not a predictions CSV")
    return {row[0]: row[1] for row in rows[1:] if row}


if __name__ == "__main__":
    main()
