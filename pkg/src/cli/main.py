import math
from functools import wraps
from pathlib import Path
from typing import List, Optional

import torch
import typer
from pydantic import ValidationError
from typing_extensions import Annotated

from augment import ALL_KINDS, AugmentError, TransformKind
from config.logger import get_logger, setup_logging
from config.settings import settings
from evalharness import (
    DEFAULT_ATTACKS,
    AttackSpec,
    EvaluationError,
    ManifestError,
    ReportWriteError,
    evaluate_multi_bit,
    evaluate_zero_bit,
    fpr_sweep,
    load_corpus,
    mark_corpus,
    mark_corpus_multi_bit,
    monte_carlo_fpr,
    noise_false_positives,
    parallel_map,
    plot_tpr_curves,
    psnr_sweep,
    write_corpus,
    write_report,
)
from features import (
    ContainerFormatError,
    ExtractorSpec,
    FeatureError,
    FeatureSpace,
    build_extractor,
    create_extractor,
    fit_whitening,
    load_whitening,
    save_weights,
    save_whitening,
)
from imaging import (
    ImageReadError,
    ImageWriteError,
    ImagingError,
    load_image,
    save_grayscale,
    save_image,
)
from keys import (
    KeyFileError,
    KeyMaterialError,
    Message,
    MultiBitKey,
    ZeroBitKey,
    gen_multi_bit_key,
    gen_zero_bit_key,
    load_key,
    make_rng,
    save_key,
)
from perceptual import ssim_heatmap
from stats import StatsError, angle_of_fpr, fpr_of_angle
from watermark import EmbedConfig, WatermarkError, decode, detect, embed
from .errors import CliError, ConfigFileError
from .run_config import RunConfig, resolve_run_config

setup_logging(console=True)

logger = get_logger("cli")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_IO = 3

IO_ERRORS = (
    ImageReadError,
    ImageWriteError,
    KeyFileError,
    ContainerFormatError,
    ManifestError,
    ReportWriteError,
    ConfigFileError,
    OSError,
)
USAGE_ERRORS = (
    ValidationError,
    ImagingError,
    AugmentError,
    FeatureError,
    StatsError,
    KeyMaterialError,
    WatermarkError,
    EvaluationError,
    CliError,
    ValueError,
)

app = typer.Typer(
    help="Latent-space image watermarking: keys, marking, detection and evaluation."
)


def handle_errors(func):
    """Maps domain errors to exit codes: usage 2, I/O 3."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (typer.Exit, typer.BadParameter):
            raise
        except IO_ERRORS as e:
            logger.error(f"I/O error: {e}")
            typer.echo(f"Error: {e}", err=True)
            raise typer.Exit(code=EXIT_IO)
        except USAGE_ERRORS as e:
            logger.error(f"Invalid input: {e}")
            typer.echo(f"Error: {e}", err=True)
            raise typer.Exit(code=EXIT_USAGE)
        except Exception as e:
            logger.critical(f"Command failed: {e}", exc_info=True)
            typer.echo(
                f"Error: a critical error occurred. Check logs/app.log. Details: {e}",
                err=True,
            )
            raise typer.Exit(code=EXIT_IO)

    return wrapper


def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise typer.BadParameter(f"{flag} is required")
    return value


def _space(run: RunConfig) -> FeatureSpace:
    extractor = create_extractor(weights_path=run.weights)
    whitening = load_whitening(_require(run.whitening, "--whitening"))
    return FeatureSpace(extractor, whitening)


def _augmentations(text: Optional[str]) -> tuple:
    if not text:
        return ALL_KINDS
    try:
        return tuple(TransformKind(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise typer.BadParameter(f"Unknown augmentation in '{text}'") from e


def _floats(text: Optional[str], flag: str) -> List[float]:
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise typer.BadParameter(f"{flag} expects comma-separated numbers") from e


def _embed_config(run: RunConfig, **fields) -> EmbedConfig:
    return EmbedConfig(
        target_psnr=run.psnr,
        lambda_w=run.lambda_w,
        margin=run.margin,
        iterations=run.iters,
        learning_rate=run.lr,
        seed=run.seed,
        augmentations=_augmentations(run.augment),
        **fields,
    )


ConfigOption = Annotated[
    Optional[str], typer.Option("--config", help="Flat key=value file; flags win.")
]
KeyOption = Annotated[Optional[str], typer.Option("--key", help="Secret key file.")]
WeightsOption = Annotated[
    Optional[str], typer.Option("--weights", help="Extractor weights file (default: seeded).")
]
WhiteningOption = Annotated[
    Optional[str], typer.Option("--whitening", help="Whitening file.")
]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Random seed.")]
JobsOption = Annotated[Optional[int], typer.Option("--jobs", help="Worker threads.")]


@app.command(name="keygen", help="Generate a zero-bit or multi-bit secret key.")
@handle_errors
def keygen_command(
    kind: Annotated[str, typer.Option("--kind", help="zero or multi.")] = "zero",
    d: Annotated[
        Optional[int], typer.Option("--d", help="Feature dimension.")
    ] = None,
    k: Annotated[int, typer.Option("--k", help="Number of bits (multi).")] = 30,
    seed: SeedOption = None,
    out: Annotated[Optional[str], typer.Option("--out", help="Key file.")] = None,
    config: ConfigOption = None,
):
    run = resolve_run_config("keygen", config, seed=seed, out=out)
    d = settings.extractor.whitened_dim if d is None else d
    path = _require(run.out, "--out")
    if kind == "zero":
        key = gen_zero_bit_key(run.seed, d)
    elif kind == "multi":
        key = gen_multi_bit_key(run.seed, k, d)
    else:
        raise typer.BadParameter(f"--kind must be 'zero' or 'multi', got '{kind}'")
    save_key(key, path)
    typer.echo(f"Wrote {kind}-bit key (d={d}, seed={run.seed}) to {path}")


@app.command(name="init-extractor", help="Write seeded extractor weights to a file.")
@handle_errors
def init_extractor_command(
    seed: Annotated[Optional[int], typer.Option("--seed", help="Weight seed.")] = None,
    out: Annotated[str, typer.Option("--out", help="Weights file.")] = "extractor.lmwt",
):
    ext = settings.extractor
    seed = ext.seed if seed is None else seed
    resolve_run_config("init-extractor", seed=seed, out=out)
    extractor = build_extractor(ExtractorSpec.desk(ext.widths, ext.kernel_size, ext.stride), seed)
    save_weights(extractor, out)
    typer.echo(
        f"Wrote extractor weights (D_raw={extractor.get_raw_dimension()}, seed={seed}) to {out}"
    )


@app.command(name="synth", help="Write a seeded synthetic corpus and its manifest.")
@handle_errors
def synth_command(
    out: Annotated[str, typer.Option("--out", help="Output directory.")] = "corpus",
    n: Annotated[int, typer.Option("--n", help="Number of images.")] = 32,
    size: Annotated[int, typer.Option("--size", help="Image side in pixels.")] = 128,
    seed: Annotated[int, typer.Option("--seed", help="Corpus seed.")] = 0,
):
    resolve_run_config("synth", seed=seed, out=out)
    manifest = write_corpus(out, n, size, seed)
    typer.echo(f"Wrote {n} images; manifest {manifest}")


@app.command(name="whiten", help="Fit PCA whitening on a corpus of images.")
@handle_errors
def whiten_command(
    manifest: Annotated[str, typer.Option("--manifest", help="Corpus manifest.")],
    weights: WeightsOption = None,
    d: Annotated[Optional[int], typer.Option("--d", help="Whitened dimension.")] = None,
    eps: Annotated[
        Optional[float], typer.Option("--eps", help="Eigenvalue floor.")
    ] = None,
    out: Annotated[Optional[str], typer.Option("--out", help="Whitening file.")] = None,
    jobs: JobsOption = None,
    config: ConfigOption = None,
):
    run = resolve_run_config("whiten", config, weights=weights, out=out, jobs=jobs)
    d = settings.extractor.whitened_dim if d is None else d
    eps = settings.extractor.whitening_eps if eps is None else eps
    path = _require(run.out, "--out")
    extractor = create_extractor(weights_path=run.weights)
    images = load_corpus(manifest)
    logger.info(f"Extracting raw features from {len(images)} images")
    rows = parallel_map(lambda img: extractor.forward(img.pixels).detach(), images, run.jobs)
    whitening = fit_whitening(torch.stack(rows), d, eps)
    save_whitening(whitening, path)
    typer.echo(f"Fitted whitening {whitening.raw_dim} -> {d} on {len(images)} images; wrote {path}")


@app.command(name="embed", help="Mark an image (zero-bit with --fpr, multi-bit with --message).")
@handle_errors
def embed_command(
    image: Annotated[str, typer.Argument(help="Image to mark (PNG or PPM).")],
    key: KeyOption = None,
    weights: WeightsOption = None,
    whitening: WhiteningOption = None,
    psnr: Annotated[Optional[float], typer.Option("--psnr", help="Target PSNR in dB.")] = None,
    fpr: Annotated[Optional[float], typer.Option("--fpr", help="Target FPR (zero-bit).")] = None,
    message: Annotated[
        Optional[str], typer.Option("--message", help="Bits or 0x-hex (multi-bit).")
    ] = None,
    iters: Annotated[Optional[int], typer.Option("--iters", help="Iterations.")] = None,
    lr: Annotated[Optional[float], typer.Option("--lr", help="Adam learning rate.")] = None,
    lambda_w: Annotated[
        Optional[float], typer.Option("--lambda", help="Watermark loss weight.")
    ] = None,
    margin: Annotated[Optional[float], typer.Option("--margin", help="Hinge margin.")] = None,
    seed: SeedOption = None,
    augment: Annotated[
        Optional[str],
        typer.Option("--augment", help="Comma-separated augmentation kinds."),
    ] = None,
    out: Annotated[Optional[str], typer.Option("--out", help="Output image.")] = None,
    report: Annotated[
        Optional[str], typer.Option("--report", help="Write the JSON report here.")
    ] = None,
    heatmap: Annotated[
        Optional[str], typer.Option("--heatmap", help="Write the SSIM heatmap here.")
    ] = None,
    config: ConfigOption = None,
):
    run = resolve_run_config(
        "embed", config, key=key, weights=weights, whitening=whitening, psnr=psnr,
        fpr=fpr, message=message, iters=iters, lr=lr, lambda_w=lambda_w,
        margin=margin, seed=seed, augment=augment, out=out, report=report,
    )
    if (run.fpr is None) == (run.message is None):
        raise typer.BadParameter(
            "Give exactly one of --fpr (zero-bit) or --message (multi-bit)"
        )
    secret = load_key(_require(run.key, "--key"))
    space = _space(run)
    original = load_image(image)

    if run.message is not None:
        if not isinstance(secret, MultiBitKey):
            raise typer.BadParameter("--message needs a multi-bit key")
        cfg = _embed_config(run, message=Message.parse(run.message, secret.k))
    else:
        if not isinstance(secret, ZeroBitKey):
            raise typer.BadParameter("--fpr needs a zero-bit key")
        cfg = _embed_config(run, target_fpr=run.fpr)

    marked, result = embed(original, secret, cfg, space)
    out_path = run.out or str(Path(image).with_name(f"{Path(image).stem}_marked.png"))
    save_image(marked, out_path)
    if run.report:
        Path(run.report).write_text(result.model_dump_json(indent=2), encoding="utf-8")
    if heatmap:
        save_grayscale(ssim_heatmap(marked.pixels, original.pixels).numpy(), heatmap)

    typer.echo(
        f"Wrote {out_path}: psnr={result.final_psnr:.3f} dB in_region={str(result.in_region).lower()}"
    )
    if result.decoded is not None:
        typer.echo(f"decoded={result.decoded} bit_errors={result.bit_errors}")
    elif result.p_value is not None:
        typer.echo(f"score={result.score:.6g} p_value={result.p_value:.6g}")


@app.command(name="detect", help="Zero-bit detection; exit 0 if marked, 1 otherwise.")
@handle_errors
def detect_command(
    image: Annotated[str, typer.Argument(help="Image to test.")],
    key: KeyOption = None,
    weights: WeightsOption = None,
    whitening: WhiteningOption = None,
    fpr: Annotated[Optional[float], typer.Option("--fpr", help="Detection FPR.")] = None,
    config: ConfigOption = None,
):
    run = resolve_run_config(
        "detect", config, key=key, weights=weights, whitening=whitening, fpr=fpr
    )
    secret = load_key(_require(run.key, "--key"))
    if not isinstance(secret, ZeroBitKey):
        raise typer.BadParameter("detect needs a zero-bit key; use decode for multi-bit")
    space = _space(run)
    target = settings.marking.target_fpr if run.fpr is None else run.fpr
    theta = angle_of_fpr(target, space.dim)
    result = detect(load_image(image), secret, theta, space)
    typer.echo(
        f"detected={str(result.detected).lower()} score={result.score:.6g} "
        f"p_value={result.p_value:.6g}"
    )
    raise typer.Exit(code=EXIT_OK if result.detected else EXIT_NEGATIVE)


@app.command(name="decode", help="Multi-bit decoding; prints the bit string.")
@handle_errors
def decode_command(
    image: Annotated[str, typer.Argument(help="Image to decode.")],
    key: KeyOption = None,
    weights: WeightsOption = None,
    whitening: WhiteningOption = None,
    expect: Annotated[
        Optional[str],
        typer.Option("--expect", help="Expected message; exit 1 when it differs."),
    ] = None,
    config: ConfigOption = None,
):
    run = resolve_run_config(
        "decode", config, key=key, weights=weights, whitening=whitening
    )
    secret = load_key(_require(run.key, "--key"))
    if not isinstance(secret, MultiBitKey):
        raise typer.BadParameter("decode needs a multi-bit key; use detect for zero-bit")
    space = _space(run)
    decoded = decode(load_image(image), secret, space)
    typer.echo(f"{decoded.to_bitstring()} {decoded.to_hex()}")
    if expect is not None and Message.parse(expect, secret.k) != decoded:
        raise typer.Exit(code=EXIT_NEGATIVE)


@app.command(name="eval", help="Mark a corpus, attack it and write a CSV report.")
@handle_errors
def eval_command(
    manifest: Annotated[str, typer.Option("--manifest", help="Corpus manifest.")],
    key: KeyOption = None,
    weights: WeightsOption = None,
    whitening: WhiteningOption = None,
    psnr: Annotated[Optional[float], typer.Option("--psnr", help="Target PSNR in dB.")] = None,
    fpr: Annotated[Optional[float], typer.Option("--fpr", help="Target FPR (zero-bit).")] = None,
    iters: Annotated[Optional[int], typer.Option("--iters", help="Iterations.")] = None,
    lr: Annotated[Optional[float], typer.Option("--lr", help="Adam learning rate.")] = None,
    lambda_w: Annotated[
        Optional[float], typer.Option("--lambda", help="Watermark loss weight.")
    ] = None,
    margin: Annotated[Optional[float], typer.Option("--margin", help="Hinge margin.")] = None,
    seed: SeedOption = None,
    jobs: JobsOption = None,
    augment: Annotated[
        Optional[str],
        typer.Option("--augment", help="Comma-separated augmentation kinds."),
    ] = None,
    attacks: Annotated[
        Optional[str],
        typer.Option("--attacks", help="Comma-separated kind[:param] list."),
    ] = None,
    fprs: Annotated[
        Optional[str], typer.Option("--fprs", help="FPR sweep, comma-separated.")
    ] = None,
    psnrs: Annotated[
        Optional[str], typer.Option("--psnrs", help="PSNR sweep, comma-separated.")
    ] = None,
    noise_images: Annotated[
        int, typer.Option("--noise-images", help="Unmarked noise images to test.")
    ] = 0,
    out: Annotated[Optional[str], typer.Option("--out", help="CSV report.")] = None,
    plot: Annotated[
        Optional[str], typer.Option("--plot", help="SVG of TPR curves.")
    ] = None,
    config: ConfigOption = None,
):
    run = resolve_run_config(
        "eval", config, key=key, weights=weights, whitening=whitening, psnr=psnr,
        fpr=fpr, iters=iters, lr=lr, lambda_w=lambda_w, margin=margin, seed=seed,
        jobs=jobs, augment=augment, out=out,
    )
    grid = (
        [AttackSpec.parse(a) for a in attacks.split(",") if a.strip()]
        if attacks
        else list(DEFAULT_ATTACKS)
    )
    images = load_corpus(manifest)
    secret = load_key(_require(run.key, "--key"))
    space = _space(run)

    if isinstance(secret, ZeroBitKey):
        target = settings.marking.target_fpr if run.fpr is None else run.fpr
        cfg = _embed_config(run, target_fpr=target)
        fpr_values, psnr_values = _floats(fprs, "--fprs"), _floats(psnrs, "--psnrs")
        if fpr_values or psnr_values:
            rows = fpr_sweep(images, secret, cfg, fpr_values, grid, space, run.jobs)
            rows += psnr_sweep(images, secret, cfg, psnr_values, grid, space, run.jobs)
        else:
            samples = mark_corpus(images, secret, cfg, space, run.jobs)
            rows = evaluate_zero_bit(
                [s.marked for s in samples], secret, cfg.theta(space.dim), grid, space, run.jobs
            )
        if noise_images > 0:
            sweep = noise_false_positives(
                space, secret, cfg.theta(space.dim), noise_images, run.seed
            )
            typer.echo(f"noise false positives: {sweep.positives}/{sweep.n}")
    else:
        rng = make_rng(run.seed)
        messages = [Message.random(secret.k, rng) for _ in images]
        cfg = _embed_config(run, message=messages[0])
        samples = mark_corpus_multi_bit(images, secret, messages, cfg, space, run.jobs)
        rows = evaluate_multi_bit(
            [s.marked for s in samples], secret, messages, grid, space, run.jobs
        )

    report_path = run.out or "report.csv"
    write_report(rows, report_path)
    if plot:
        plot_tpr_curves(rows, plot)
    for row in rows:
        values = " ".join(f"{name}={value:.4f}" for name, value in row.metrics())
        typer.echo(f"{row.attack} {values}")
    typer.echo(f"Wrote {report_path}")


@app.command(name="mcfpr", help="Monte-Carlo check of the hypercone false positive rate.")
@handle_errors
def mcfpr_command(
    d: Annotated[int, typer.Option("--d", help="Feature dimension.")] = 64,
    fpr: Annotated[float, typer.Option("--fpr", help="Target FPR.")] = 1e-2,
    n: Annotated[int, typer.Option("--n", help="Number of samples.")] = 1_000_000,
    seed: Annotated[int, typer.Option("--seed", help="Sampling seed.")] = 0,
):
    resolve_run_config("mcfpr", seed=seed, fpr=fpr)
    theta = angle_of_fpr(fpr, d)
    expected = fpr_of_angle(theta, d)
    empirical = monte_carlo_fpr(d, theta, n, seed)
    sigma = math.sqrt(expected * (1.0 - expected) / n)
    within = abs(empirical - expected) <= 3.0 * sigma
    typer.echo(
        f"d={d} theta={theta:.6f} expected={expected:.6g} empirical={empirical:.6g} "
        f"3sigma={3.0 * sigma:.3g} within={str(within).lower()}"
    )
    raise typer.Exit(code=EXIT_OK if within else EXIT_NEGATIVE)
