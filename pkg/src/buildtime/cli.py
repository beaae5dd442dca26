"""Command-line pipeline: prepare, benchmark, select, train, evaluate,
predict, serve."""

import hashlib
import json
from pathlib import Path

import click

from . import dataset, report, selection
from .config import PipelineConfig
from .container import FittedPipeline, render_duration
from .dataset import FeatureMatrix, RawTable
from .errors import SchemaError
from .evaluate import CvSpec, benchmark as run_benchmark, test_evaluate
from .models import data_fingerprint, fit_spec, schema_hash
from .preprocess import apply_plan, fit_plan


def _load_config(path):
    if path is None:
        return PipelineConfig()
    return PipelineConfig.load(path)


def _cache_dir(cfg):
    return Path(cfg.out_dir) / "cache"


def _require_cache(cfg):
    cache = _cache_dir(cfg)
    train = cache / "train.npz"
    test = cache / "test.npz"
    if not train.exists() or not test.exists():
        raise click.ClickException(
            f"no prepared cache under {cache}; run `buildtime prepare` first"
        )
    return FeatureMatrix.load(train), FeatureMatrix.load(test)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML pipeline config; defaults apply when omitted.")
@click.option("--out", "out_dir", default=None, help="Override the output directory.")
@click.pass_context
def main(ctx, config_path, out_dir):
    """CI build-duration prediction toolkit."""
    cfg = _load_config(config_path)
    if out_dir:
        cfg.out_dir = out_dir
    ctx.obj = cfg


@main.command()
@click.pass_obj
def prepare(cfg):
    """Ingest the CSV, clean, shuffle, split, encode, and cache matrices."""
    try:
        table = dataset.load_csv(cfg.data_path)
        cleaned = dataset.clean(table)
    except SchemaError as exc:
        raise click.ClickException(str(exc))
    shuffled = dataset.shuffle(cleaned, cfg.seeds["shuffle"])
    indices = dataset.split(shuffled, cfg.split_fraction, cfg.seeds["split"])

    def take(rows):
        return RawTable(shuffled.frame.iloc[rows].reset_index(drop=True))

    try:
        train = dataset.encode(take(indices.train_rows))
        test = dataset.encode(take(indices.test_rows), imputation=train.imputation)
    except SchemaError as exc:
        raise click.ClickException(str(exc))

    cache = _cache_dir(cfg)
    cache.mkdir(parents=True, exist_ok=True)
    train.save(cache / "train.npz")
    test.save(cache / "test.npz")

    manifest = {
        "rows_loaded": table.n_rows,
        "rows_cleaned": cleaned.n_rows,
        "dropped_na": cleaned.dropped_na_count,
        "dropped_invalid": cleaned.dropped_invalid_count,
        "train_rows": len(indices.train_rows),
        "test_rows": len(indices.test_rows),
        "split_fraction": cfg.split_fraction,
        "seeds": dict(cfg.seeds),
        "schema_hash": schema_hash(train.column_names),
        "missing_columns": list(table.missing_columns),
    }
    digest = hashlib.sha256(
        json.dumps(manifest, sort_keys=True).encode()
    ).hexdigest()
    manifest["manifest_hash"] = digest
    with open(cache / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    click.echo(
        f"prepared {manifest['train_rows']} train / {manifest['test_rows']} test rows "
        f"(dropped {manifest['dropped_na']} NA, {manifest['dropped_invalid']} invalid)"
    )
    click.echo(f"manifest hash {digest}")


@main.command("benchmark")
@click.option("--plots", is_flag=True, help="Also emit per-fold dotplot data files.")
@click.pass_obj
def cmd_benchmark(cfg, plots):
    """Cross-validated roster comparison on a shared training subsample."""
    train, _ = _require_cache(cfg)
    cv = CvSpec(cfg.cv_k, cfg.cv_repeats, cfg.seeds["cv"])
    reports = run_benchmark(
        cfg.roster_specs(), train, cv,
        subsample_n=cfg.subsample_n,
        subsample_seed=cfg.seeds["subsample"],
        recipe=cfg.recipe(),
        refit_preprocess=cfg.refit_preprocess_per_fold,
    )
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = report.render_benchmark_text(reports)
    (out / "benchmark.txt").write_text(text, encoding="utf-8")
    report.write_benchmark_csv(reports, out / "benchmark.csv")
    with open(out / "benchmark.json", "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2)
    if plots:
        report.write_dotplot_data(reports, out / "benchmark_rmse_dots.csv", "rmse")
        report.write_dotplot_data(reports, out / "benchmark_r2_dots.csv", "r_squared")
    click.echo(text)


@main.command()
@click.argument("method", type=click.Choice(["rfe", "boruta"]))
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--max-iter", default=50, show_default=True)
@click.pass_obj
def select(cfg, method, alpha, max_iter):
    """Wrapper feature selection (rfe or boruta) on the training subsample."""
    train, _ = _require_cache(cfg)
    sample = dataset.subsample(
        train, min(cfg.subsample_n, train.n_rows), cfg.seeds["subsample"]
    )
    rf_spec = cfg.spec("RF")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if method == "rfe":
        sizes = sorted({max(1, sample.n_columns - 5 * i) for i in range(6)})
        profile = selection.rfe(
            sample, sizes, CvSpec(cfg.cv_k, 1, cfg.seeds["cv"]), rf_spec
        )
        result = profile.to_dict()
        click.echo(
            f"best size {profile.best_size}: {', '.join(profile.best_features)}"
        )
    else:
        verdict = selection.boruta(sample, alpha, max_iter, rf_spec)
        result = verdict.to_dict()
        click.echo(f"confirmed: {', '.join(verdict.features('confirmed')) or '(none)'}")
        click.echo(f"tentative: {', '.join(verdict.features('tentative')) or '(none)'}")
    with open(out / f"select_{method}.json", "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2)


def _train_pipeline(cfg, family, train):
    plan = fit_plan(train, cfg.recipe())
    prepared = apply_plan(plan, train)
    model = fit_spec(
        cfg.spec(family), prepared.values, prepared.response, prepared.column_names
    )
    means = {
        name: float(train.values[:, j].mean())
        for j, name in enumerate(train.column_names)
    }
    return FittedPipeline(
        plan=plan,
        model=model,
        feature_columns=list(train.column_names),
        feature_means=means,
        metadata={
            "family": family,
            "seed": cfg.seeds["model"],
            "n_rows": train.n_rows,
            "data_fingerprint": data_fingerprint(train.values, train.response),
        },
    )


@main.command()
@click.option("--family", default=None, help="Model family; defaults to serve_family.")
@click.pass_obj
def train(cfg, family):
    """Fit the preprocess plan and one model on the full training cache."""
    train_matrix, _ = _require_cache(cfg)
    family = family or cfg.serve_family
    pipeline = _train_pipeline(cfg, family, train_matrix)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"model_{family.lower()}.json"
    pipeline.save(path)
    click.echo(f"saved {family} container to {path} (schema {pipeline.schema_hash})")


@main.command()
@click.option("--model", "model_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.pass_obj
def evaluate(cfg, model_paths):
    """Score saved models on a seeded test-set subsample."""
    _, test = _require_cache(cfg)
    pipelines = [FittedPipeline.load(p) for p in model_paths]
    pairs = test_evaluate(
        pipelines, test, subsample_n=cfg.subsample_n, seed=cfg.seeds["subsample"]
    )
    names = [p.model.family for p in pipelines]
    text = report.render_test_text(names, pairs)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "test_set.txt").write_text(text, encoding="utf-8")
    report.write_test_csv(names, pairs, out / "test_set.csv")
    click.echo(text)


def _parse_feature_args(pairs):
    supplied = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.ClickException(f"expected name=value, got {pair!r}")
        name, raw = pair.split("=", 1)
        try:
            supplied[name.strip()] = float(raw)
        except ValueError:
            raise click.ClickException(f"non-numeric value for {name!r}: {raw!r}")
    return supplied


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--set", "-s", "features", multiple=True,
              help="Feature assignment name=value; repeatable. Unset features "
                   "use stored training means.")
def predict(model_path, features):
    """Predict a build duration from a partial feature map."""
    pipeline = FittedPipeline.load(model_path)
    supplied = _parse_feature_args(features)
    try:
        seconds = pipeline.predict_request(supplied)
    except SchemaError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"predicted {seconds:.1f} seconds ({render_duration(seconds)})")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(model_path, host, port):
    """Serve predictions over HTTP (health, schema, predict)."""
    import uvicorn

    from .server import create_app

    pipeline = FittedPipeline.load(model_path)
    click.echo(f"serving {pipeline.model.family} model on {host}:{port}")
    uvicorn.run(create_app(pipeline), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
