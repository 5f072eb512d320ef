"""End-to-end pipeline driver.

Subcommands: ingest, abstract, build-dataset, split, train-ngram, suggest,
evaluate, buckets, compare-stats. Exit codes: 0 success, 1 usage error,
2 data error. Option values resolve as flags > WFC_* environment variables >
--config file (TOML or JSON) > defaults.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import yaml

from . import abstraction, dataset, metrics, ngram, stats
from .errors import DataError, IdMismatch, MissingRoot, NotAWorkflow, ParseError
from .io import read_json, read_jsonl, write_json, write_jsonl
from .workflow import canonical_text, canonicalize, parse_workflow, tokenize_texts

WORKFLOW_SUFFIXES = (".yml", ".yaml")


def _load_config_file(ctx: click.Context, param: click.Parameter, value):
    if not value:
        return None
    path = Path(value)
    if path.suffix == ".toml":
        import tomllib

        config = tomllib.loads(path.read_text())
    else:
        config = json.loads(path.read_text())
    ctx.default_map = {**config, **{k: config for k in _SUBCOMMANDS}}
    return value


_SUBCOMMANDS = (
    "ingest",
    "abstract",
    "build-dataset",
    "split",
    "train-ngram",
    "predict",
    "suggest",
    "evaluate",
    "buckets",
    "compare-stats",
)


@click.group(context_settings={"auto_envvar_prefix": "WFC"})
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config_file,
    expose_value=False,
    is_eager=True,
    help="TOML or JSON file with default option values.",
)
def cli() -> None:
    """Workflow completion toolkit pipeline."""


def _is_workflow_path(rel: Path) -> bool:
    parts = rel.parts
    return (
        rel.suffix in WORKFLOW_SUFFIXES
        and ".github" in parts
        and parts[min(parts.index(".github") + 1, len(parts) - 1)] == "workflows"
    )


@cli.command()
@click.option("--corpus-root", required=True, type=click.Path(file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def ingest(corpus_root: str, out_path: str) -> None:
    """Walk a directory of repositories and write a corpus manifest."""
    root = Path(corpus_root)
    if not root.is_dir():
        raise MissingRoot(f"corpus root does not exist: {corpus_root}")
    workflows, general, errors = [], [], []
    for repo_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        repo_id = repo_dir.name
        for file_path in sorted(repo_dir.rglob("*")):
            if not file_path.is_file() or file_path.suffix not in WORKFLOW_SUFFIXES:
                continue
            rel = file_path.relative_to(repo_dir)
            entry = {"repo": repo_id, "path": rel.as_posix()}
            if _is_workflow_path(rel):
                try:
                    parse_workflow(
                        file_path.read_text(encoding="utf-8"), repo_id, rel.as_posix()
                    )
                except DataError as exc:
                    errors.append({**entry, "error": str(exc)})
                else:
                    workflows.append(entry)
            else:
                general.append(entry)
    manifest = {
        "root": str(root),
        "counts": {
            "workflows": len(workflows),
            "general": len(general),
            "errors": len(errors),
        },
        "workflows": workflows,
        "general": general,
        "errors": errors,
    }
    write_json(out_path, manifest)
    click.echo(
        f"ingested {len(workflows)} workflows, {len(general)} general YAML files, "
        f"{len(errors)} unparseable"
    )


def _parse_manifest_docs(manifest: dict):
    root = Path(manifest["root"])
    for entry in manifest["workflows"]:
        file_path = root / entry["repo"] / entry["path"]
        yield parse_workflow(
            file_path.read_text(encoding="utf-8"), entry["repo"], entry["path"]
        )


@cli.command("abstract")
@click.option("--canonical", "canonical_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--stats", "stats_path", type=click.Path(dir_okay=False))
@click.option("--extensions", "extensions_path", type=click.Path(exists=True, dir_okay=False))
def abstract_cmd(canonical_path, out_path, stats_path, extensions_path) -> None:
    """Abstract a canonical JSONL dump; optionally write a coverage report."""
    extensions = (
        abstraction.load_extensions(extensions_path) if extensions_path else None
    )
    rows = list(read_jsonl(canonical_path))
    out_rows = []
    streams = []
    from .workflow import tokenize

    for row in rows:
        stream = tokenize(row["canonical"])
        streams.append(stream)
        abstracted = abstraction.abstract_stream(stream, extensions)
        out_rows.append({**row, "canonical": " ".join(abstracted.texts())})
    write_jsonl(out_path, out_rows)
    if stats_path:
        report = abstraction.abstraction_stats(streams, extensions)
        write_json(stats_path, report.to_dict())
    click.echo(f"abstracted {len(out_rows)} documents")


@cli.command("build-dataset")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--representation", type=click.Choice(["raw", "abstracted", "both"]), default="both", show_default=True)
@click.option("--mask-rate", type=float, default=0.15, show_default=True)
@click.option("--token-cap", type=int, default=1024, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def build_dataset(manifest_path, out_dir, representation, mask_rate, token_cap, seed) -> None:
    """Canonical dump, pre-training masks, and NS/JC instance files."""
    manifest = read_json(manifest_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    docs = list(_parse_manifest_docs(manifest))
    canonical_rows = [
        {"repo": d.repo_id, "path": d.path, "canonical": canonicalize(d)} for d in docs
    ]
    write_jsonl(out / "canonical.jsonl", canonical_rows)

    pretrain_corpus = [(r["path"], r["canonical"]) for r in canonical_rows]
    root = Path(manifest["root"])
    for entry in manifest.get("general", []):
        file_path = root / entry["repo"] / entry["path"]
        try:
            loaded = yaml.safe_load(file_path.read_text(encoding="utf-8"))
        except yaml.YAMLError:
            continue
        if loaded is not None:
            from .workflow import _norm_value

            pretrain_corpus.append((entry["path"], canonical_text(_norm_value(loaded))))
    masked = dataset.build_pretrain_instances(pretrain_corpus, mask_rate, seed)
    write_jsonl(out / "pretrain.jsonl", (m.to_dict() for m in masked))

    reps = ["raw", "abstracted"] if representation == "both" else [representation]
    summary = {"workflows": len(docs), "pretrain": len(masked), "files": {}}
    all_instances = dataset.build_all_instances(docs, reps)
    drops = []
    for (mode, rep), instances in all_instances.items():
        kept, dropped = dataset.filter_corpus(instances, token_cap)
        name = f"{mode.lower()}_{rep}.jsonl"
        write_jsonl(out / name, (inst.to_dict() for inst in kept))
        drops.extend(
            {"file": name, "id": inst.id, "reason": reason} for inst, reason in dropped
        )
        summary["files"][name] = {"kept": len(kept), "dropped": len(dropped)}
    write_jsonl(out / "drops.jsonl", drops)
    write_json(out / "dataset_summary.json", summary)
    click.echo(f"built datasets for {len(docs)} workflows in {out}")


@cli.command("split")
@click.option("--canonical", "canonical_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--apply", "apply_files", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Instance JSONL files to partition into <stem>.<partition>.jsonl")
def split_cmd(canonical_path, ratios, seed, out_path, apply_files) -> None:
    """Assign whole projects to train/eval/test partitions."""
    ratio_tuple = tuple(float(x) for x in ratios.split(","))
    if len(ratio_tuple) != 3:
        raise click.UsageError("--ratios needs three comma-separated values")
    sizes: dict[str, int] = {}
    for row in read_jsonl(canonical_path):
        sizes[row["repo"]] = sizes.get(row["repo"], 0) + 1
    assignment = dataset.split_by_project(sizes, ratio_tuple, seed)
    write_json(out_path, assignment.to_dict())
    for file_path in apply_files:
        path = Path(file_path)
        parts = {p: [] for p in dataset.PARTITIONS}
        for row in read_jsonl(path):
            parts[assignment.partition_of(row["repo"])].append(row)
        for partition, rows in parts.items():
            write_jsonl(path.with_suffix(f".{partition}.jsonl"), rows)
    click.echo(
        "split: "
        + ", ".join(f"{p}={assignment.counts.get(p, 0)}" for p in dataset.PARTITIONS)
    )


@cli.command("train-ngram")
@click.option("--canonical", "canonical_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--partition", default="train", show_default=True)
@click.option("--order", "-n", type=int, default=3, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def train_ngram(canonical_path, split_path, partition, order, out_path) -> None:
    """Train the n-gram baseline on canonical workflow texts."""
    assignment = read_json(split_path)["assignment"] if split_path else None
    sequences = []
    for row in read_jsonl(canonical_path):
        if assignment is not None and assignment.get(row["repo"]) != partition:
            continue
        sequences.append(tokenize_texts(row["canonical"]))
    model = ngram.train(sequences, order)
    model.save(out_path)
    click.echo(f"trained {order}-gram on {len(sequences)} documents -> {out_path}")


@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def predict_cmd(model_path, instances_path, out_path) -> None:
    """Batch n-gram completion of an instance file into predictions JSONL."""
    model = ngram.NgramModel.load(model_path)
    records = ngram.predict_instances(model, read_jsonl(instances_path))
    write_jsonl(out_path, (r.to_dict() for r in records))
    click.echo(f"predicted {len(records)} instances -> {out_path}")


@cli.command("suggest")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@click.option("--workflow", "workflow_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--job", "job_id", default=None, help="Job to complete (default: first job).")
@click.option("--step", "step_index", type=int, default=None,
              help="1-based step position to predict (default: append after the last step).")
def suggest(model_path, workflow_path, job_id, step_index) -> None:
    """Suggest the next step of a workflow at the given cursor."""
    model = ngram.NgramModel.load(model_path)
    text = Path(workflow_path).read_text(encoding="utf-8")
    doc = parse_workflow(text, "", Path(workflow_path).name)
    job = doc.jobs[0] if job_id is None else next(
        (j for j in doc.jobs if j.job_id == job_id), None
    )
    if job is None:
        raise DataError(f"no job named {job_id!r}")
    k = len(job.steps)
    idx = k + 1 if step_index is None else step_index
    if idx <= k:
        from .dataset import _render_with_step_marker

        marked = _render_with_step_marker(doc, job.job_id, idx - 1)
        prefix_text = marked[: marked.index(json.dumps(dataset._MARK_STEP))].rstrip()
    else:
        prefix_text = canonicalize(doc)
    result = ngram.complete(model, tokenize_texts(prefix_text))
    click.echo(result.text)
    click.echo(f"confidence: {result.confidence:.6f}  stop: {result.stop_reason}", err=True)


def _load_prediction_pairs(predictions_path, instances_path):
    instances = {row["id"]: row for row in read_jsonl(instances_path)}
    records = [metrics.PredictionRecord.from_dict(r) for r in read_jsonl(predictions_path)]
    pred_ids = {r.id for r in records}
    missing = set(instances) - pred_ids
    extra = pred_ids - set(instances)
    if missing or extra:
        raise IdMismatch(missing, extra)
    return instances, records


@cli.command("evaluate")
@click.option("--predictions", "predictions_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def evaluate(predictions_path, instances_path, out_dir) -> None:
    """Score predictions against instance targets; write report files."""
    instances, records = _load_prediction_pairs(predictions_path, instances_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pairs = [(r.prediction, instances[r.id]["target"]) for r in records]
    report = metrics.score_pairs(pairs)
    targets = {rid: row["target"] for rid, row in instances.items()}
    buckets = metrics.bucket_by_confidence(records, targets)
    write_json(out / "report.json", {**report.to_dict(), **buckets.to_dict()})
    write_json(out / "buckets.json", buckets.to_dict())
    with open(out / "per_instance.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "correct", "bleu4", "rouge_l_f", "confidence"])
        for rec, sentence_bleu, rouge_f in zip(
            records, report.bleu4_sentence, report.rouge_l_sentence_f
        ):
            writer.writerow(
                [
                    rec.id,
                    int(metrics.exact_match(rec.prediction, targets[rec.id])),
                    f"{sentence_bleu:.10f}",
                    f"{rouge_f:.10f}",
                    f"{rec.confidence:.10f}",
                ]
            )
    click.echo(
        f"correct={report.correct_fraction:.4f} bleu4={report.bleu4_corpus:.4f} "
        f"rouge_l_f={report.rouge_l_f:.4f}"
    )


@cli.command("buckets")
@click.option("--predictions", "predictions_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def buckets_cmd(predictions_path, instances_path, out_path) -> None:
    """Confidence-bucket table for a prediction file."""
    instances, records = _load_prediction_pairs(predictions_path, instances_path)
    targets = {rid: row["target"] for rid, row in instances.items()}
    report = metrics.bucket_by_confidence(records, targets)
    write_json(out_path, report.to_dict())
    for bucket in report.buckets:
        click.echo(
            f"[{bucket.lo:.1f},{bucket.hi:.1f}) total={bucket.total} "
            f"correct={bucket.correct} wrong={bucket.wrong}"
        )


def _read_per_instance_csv(path) -> dict[str, dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["id"]: row for row in csv.DictReader(fh)}


@cli.command("compare-stats")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def compare_stats(a_path, b_path, out_path) -> None:
    """Statistical comparison of two per-instance score CSVs."""
    rows_a = _read_per_instance_csv(a_path)
    rows_b = _read_per_instance_csv(b_path)
    common = sorted(set(rows_a) & set(rows_b))
    if not common:
        raise DataError("no common instance ids between the two CSV files")
    correct_pairs = [
        (rows_a[i]["correct"] == "1", rows_b[i]["correct"] == "1") for i in common
    ]
    bleu_a = [float(rows_a[i]["bleu4"]) for i in common]
    bleu_b = [float(rows_b[i]["bleu4"]) for i in common]
    rouge_a = [float(rows_a[i]["rouge_l_f"]) for i in common]
    rouge_b = [float(rows_b[i]["rouge_l_f"]) for i in common]

    mc = stats.mcnemar(correct_pairs)
    wil_bleu = stats.wilcoxon_signed_rank(list(zip(bleu_a, bleu_b)))
    wil_rouge = stats.wilcoxon_signed_rank(list(zip(rouge_a, rouge_b)))
    adjusted = stats.holm_adjust(
        [mc.p_value_raw, wil_bleu.p_value_raw, wil_rouge.p_value_raw]
    )
    mc.p_value_adjusted, wil_bleu.p_value_adjusted, wil_rouge.p_value_adjusted = adjusted
    d_bleu = stats.cliffs_delta(bleu_a, bleu_b)
    d_rouge = stats.cliffs_delta(rouge_a, rouge_b)
    result = {
        "n": len(common),
        "correct_predictions": mc.to_dict(),
        "bleu4": {**wil_bleu.to_dict(), "effect": d_bleu.to_dict()["effect"]},
        "rouge_l": {**wil_rouge.to_dict(), "effect": d_rouge.to_dict()["effect"]},
    }
    write_json(out_path, result)
    click.echo(json.dumps(result["correct_predictions"]))


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        if isinstance(exc, IdMismatch):
            for rid in exc.missing[:20]:
                click.echo(f"missing prediction for id {rid}", err=True)
            for rid in exc.extra[:20]:
                click.echo(f"prediction for unknown id {rid}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
