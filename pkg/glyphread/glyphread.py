import glyphread
from glyphread.options import Option
from glyphread.option_parses import OptionParse, get_option_parses
from glyphread.config.config import ImmutableConfig, get_config, get_cmd_args
from glyphread.config import settings
from glyphread.errors import GlyphReadException, InputError
from glyphread.alphabet import normalize_word
from glyphread.bundle import ModelBundle, load_bundle, save_bundle
from glyphread.evaluation import PREDICTIONS_HEADER, evaluate, filter_protocol
from glyphread.experiments import ABLATION_HEADER, CURVE_HEADER, learning_curve, run_ablation
from glyphread.inference.beamsearch import DecodeResult, beam_decode
from glyphread.inference.ngram import NgramModel
from glyphread.model.recognizer import Recognizer
from glyphread.synth.dataset import (
    generate_dataset,
    generate_split,
    load_dataset,
    load_image,
    load_word_list,
    save_dataset,
    save_image,
    split_words,
    usable_words,
)
from glyphread.synth.render import render_word
from glyphread.training.gradcheck import gradient_check
from glyphread.training.trainer import train
from typing import Dict, List, Optional, Sequence, Tuple
from pathlib import Path
import argparse
import csv
import json
import sys

import numpy as np
from loguru import logger

BUNDLED = ""
HEATMAP_SCALE = 8


def setup_logger(verbosity: int = 0) -> None:
    logger.remove()
    logger.add(
        sys.stderr,
        level="WARNING" if verbosity == 0 else "INFO" if verbosity == 1 else "DEBUG",
        format="<level>{name}</level>: {message}",
        diagnose=False,
        backtrace=False,
        catch=False,
    )


def format_options_help(option_parses: Dict[Option, OptionParse]) -> str:
    def extract_line(words: List[str], max_len: int, start_i: int) -> Tuple[str, int]:
        result = [words[start_i]]
        current_len = len(words[start_i])
        for i in range(start_i + 1, len(words)):
            next_len = current_len + 1 + len(words[i])
            if next_len > max_len:
                return " ".join(result), i
            result.append(words[i])
            current_len += 1 + len(words[i])
        return " ".join(result), len(words)

    result = []
    for op in option_parses.values():
        words = (op.help_).split(" ")
        i = 0
        while i < len(words):
            if i == 0:
                start = op.option.to_name() + "  "
            else:
                start = " " * 4
            line, i = extract_line(words, 80 - 25 - len(start), i)
            result.append(start + line)
    return "\n".join(result) + "\n"


def setup_argparse(option_parses: Dict[Option, OptionParse]) -> argparse.Namespace:
    main_parser = argparse.ArgumentParser(prog="glyphread")

    shared_options_parser = argparse.ArgumentParser(add_help=False)
    shared_options_parser.add_argument(
        "--json", action="store_true", help="print results in json format"
    )
    shared_options_parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log progress (-vv for debug output)"
    )
    shared_options_parser.add_argument("--seed", type=int, help="shortcut for -o seed=SEED")
    shared_options_parser.add_argument(
        "--jobs", type=int, default=1, help="worker threads for training and decoding"
    )
    shared_options_parser.add_argument(
        "-o",
        "--option",
        metavar="OPTION",
        dest="options",
        default=[],
        action="append",
        help=format_options_help(option_parses),
    )

    model_parser = argparse.ArgumentParser(add_help=False)
    model_parser.add_argument("--model", required=True, help="model bundle written by train")

    decoding_parser = argparse.ArgumentParser(add_help=False)
    decoding_parser.add_argument(
        "--lm",
        nargs="?",
        const=BUNDLED,
        metavar="WORD-LIST",
        help="fuse a character language model: the bundled one, or one fitted on WORD-LIST",
    )
    decoding_parser.add_argument("--alpha", type=float, help="language model weight")
    decoding_parser.add_argument(
        "--lexicon",
        nargs="?",
        const=BUNDLED,
        metavar="WORD-LIST",
        help="restrict output to a lexicon: the bundled one, or the words in WORD-LIST",
    )
    decoding_parser.add_argument("--lexicon-mode", choices=["prune", "edit"])
    decoding_parser.add_argument("--beam", type=int, help="beam width")

    subparsers = main_parser.add_subparsers(dest="command")
    subparsers.required = True
    formatter = argparse.RawTextHelpFormatter

    train_parser = subparsers.add_parser(
        "train", description="Trains a recognizer on synthetic renders.",
        formatter_class=formatter, parents=[shared_options_parser],
    )
    train_parser.add_argument("--corpus", help="word list to render (default: packaged list)")
    train_parser.add_argument("--data", help="dataset directory written by gen-data, used instead of renders")
    train_parser.add_argument("--out", required=True, help="path of the model bundle to write")
    train_parser.add_argument("--log", help="path of the training log (default: next to the bundle)")
    train_parser.add_argument("--epochs", type=int, help="shortcut for -o epochs=EPOCHS")

    decode_parser = subparsers.add_parser(
        "decode", description="Reads the word in each image.",
        formatter_class=formatter, parents=[shared_options_parser, model_parser, decoding_parser],
    )
    decode_parser.add_argument("images", metavar="IMAGE", nargs="+", help="grayscale PGM image(s)")
    decode_parser.add_argument("--top", type=int, default=1, help="number of results per image")
    decode_parser.add_argument(
        "--dump-attention", metavar="DIR", help="write one heat map per decoding step and steps.csv"
    )

    eval_parser = subparsers.add_parser(
        "eval", description="Measures word accuracy on a dataset directory.",
        formatter_class=formatter, parents=[shared_options_parser, model_parser, decoding_parser],
    )
    eval_parser.add_argument("data", metavar="DIR", help="dataset directory with labels.tsv")
    eval_parser.add_argument("--lexicon-size", type=int, help="per-image lexicons of this many words")
    eval_parser.add_argument("--min-length", type=int, help="shortcut for -o min-length=N")
    eval_parser.add_argument("--predictions", metavar="FILE", help="write per-sample predictions as TSV")

    gradcheck_parser = subparsers.add_parser(
        "gradcheck", description="Compares analytic gradients with central differences.",
        formatter_class=formatter, parents=[shared_options_parser],
    )
    gradcheck_parser.add_argument("--model", help="model bundle (default: a fresh model from the toy config)")
    gradcheck_parser.add_argument("--word", default="ab", help="target word")
    gradcheck_parser.add_argument("--eps", type=float, default=1e-5)
    gradcheck_parser.add_argument("--tol", type=float, default=1e-4)
    gradcheck_parser.add_argument("--samples", type=int, help="coordinates checked per group (default: all)")

    gen_parser = subparsers.add_parser(
        "gen-data", description="Renders train and test datasets.",
        formatter_class=formatter, parents=[shared_options_parser],
    )
    gen_parser.add_argument("out", metavar="DIR", help="output directory, gets train/ and test/")
    gen_parser.add_argument("--corpus", help="word list to render (default: packaged list)")
    gen_parser.add_argument(
        "--holdout", type=float, default=0.0,
        help="fraction of words kept out of training (out-of-vocabulary test set)",
    )

    ablate_parser = subparsers.add_parser(
        "ablate", description="Trains and scores baseline, attention, +LM and +LM+lexicon.",
        formatter_class=formatter, parents=[shared_options_parser],
    )
    ablate_parser.add_argument("--corpus", help="word list to render (default: packaged list)")

    curve_parser = subparsers.add_parser(
        "curve", description="Accuracy against training renders per word.",
        formatter_class=formatter, parents=[shared_options_parser],
    )
    curve_parser.add_argument("--corpus", help="word list to render (default: packaged list)")
    curve_parser.add_argument("--sizes", default="1,2,5,10", help="comma-separated renders per word")

    _version_parser = subparsers.add_parser("version", description="Shows installed glyphread version")

    return main_parser.parse_args()


def command_options(args: argparse.Namespace) -> List[str]:
    """Option overrides given as dedicated flags, appended after -o options."""
    result = get_cmd_args(args)
    shortcuts = [
        ("seed", Option.SEED), ("epochs", Option.EPOCHS), ("alpha", Option.LM_WEIGHT),
        ("beam", Option.BEAM_WIDTH), ("lexicon_mode", Option.LEXICON_MODE),
        ("lexicon_size", Option.LEXICON_SIZE), ("min_length", Option.MIN_LENGTH),
    ]
    for attr, option in shortcuts:
        val = getattr(args, attr, None)
        if val is not None:
            result.append(f"{option.to_name()}={val}")
    return result


def load_config(args: argparse.Namespace, base: Optional[str] = None) -> ImmutableConfig:
    cmd_args = command_options(args)
    if base is not None:
        cmd_args = [f"{Option.CONFIG_FILE.to_name()}={base}"] + cmd_args
    config = get_config(cmd_args, get_option_parses())
    if config is None:
        raise InputError("could not load the configuration")
    logger.debug("{config}", config=config)
    return config


def resolve_lm(args: argparse.Namespace, config: ImmutableConfig, bundle: ModelBundle) -> Optional[NgramModel]:
    if args.lm is None:
        return None
    if args.lm == BUNDLED:
        if bundle.lm is None:
            raise InputError("the model bundle has no language model, pass a word list to --lm")
        return bundle.lm
    words = usable_words(load_word_list(args.lm), bundle.model.alphabet)
    return settings.fit_lm(config, words, bundle.model.config.symbols)


def resolve_lexicon(args: argparse.Namespace, bundle: ModelBundle) -> Optional[List[str]]:
    if args.lexicon is None:
        return None
    if args.lexicon == BUNDLED:
        if bundle.lexicon is None:
            raise InputError("the model bundle has no lexicon, pass a word list to --lexicon")
        return list(bundle.lexicon)
    return usable_words(load_word_list(args.lexicon), bundle.model.alphabet)


def training_corpus(args: argparse.Namespace, config: ImmutableConfig) -> List[str]:
    return settings.corpus_words(config, args.corpus)


def train_model(args: argparse.Namespace) -> int:
    config = load_config(args)
    model_config = settings.model_config(config)
    if args.data is not None:
        samples = load_dataset(args.data)
        corpus = sorted({s.word for s in samples})
    else:
        corpus = training_corpus(args, config)
        samples = generate_dataset(
            corpus, int(config[Option.TRAIN_RENDERS]), settings.render_config(config),  # type: ignore
            progress=args.verbose > 0,
        )
    logger.info("training on {n} samples of {words} words", n=len(samples), words=len(corpus))

    report = None if args.json else lambda record: print(record.progress_line(), flush=True)
    model, log = train(
        model_config, settings.train_config(config, args.jobs), samples, report, progress=args.verbose > 0
    )
    lm = settings.fit_lm(config, corpus, model_config.symbols)
    save_bundle(args.out, ModelBundle(model, lm, corpus))

    log_path = Path(args.log) if args.log is not None else Path(args.out).with_suffix(".log.tsv")
    log_path.write_text(log.to_tsv(), encoding="utf8")
    if args.json:
        print(log.to_json(indent=2))
    return 0


def heatmap(weights: np.ndarray, rows: int, cols: int) -> np.ndarray:
    grid = weights.reshape(rows, cols)
    peak = grid.max()
    grid = grid / peak if peak > 0 else grid
    return np.kron(grid, np.ones((HEATMAP_SCALE, HEATMAP_SCALE)))


def dump_attention(model: Recognizer, image: np.ndarray, result: DecodeResult, directory: Path) -> int:
    """Writes step_<t>.pgm per decoding step and steps.csv; returns the number of steps."""
    directory.mkdir(parents=True, exist_ok=True)
    # the decoded word, not its lexicon snap
    word = result.raw if result.raw is not None else result.word
    features, trace = model.attention_trace(image, word, end=result.complete)
    with open(directory / "steps.csv", "w", encoding="utf8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        for t, (symbol, weights) in enumerate(trace):
            save_image(directory / f"step_{t}.pgm", heatmap(weights, features.rows, features.cols))
            writer.writerow([t, symbol] + [repr(float(w)) for w in weights])
    return len(trace)


def decode_images(args: argparse.Namespace) -> int:
    config = load_config(args)
    bundle = load_bundle(args.model)
    model = bundle.model
    decode_config = settings.decode_config(
        config, resolve_lm(args, config, bundle), resolve_lexicon(args, bundle),
        model.config.symbols, args.top,
    )

    outputs = []
    for path in args.images:
        image = load_image(path)
        results = beam_decode(model, image, decode_config)
        if results and not results[0].complete:
            logger.warning("no hypothesis for {path} reached END, showing the best unfinished one", path=path)
        outputs.append((path, results))

        if args.dump_attention is not None and results:
            directory = Path(args.dump_attention)
            if len(args.images) > 1:
                directory = directory / Path(path).stem
            steps = dump_attention(model, image, results[0], directory)
            logger.info("wrote {steps} attention maps to {dir}", steps=steps, dir=directory)

    if args.json:
        print(json.dumps(
            [{"image": path, "results": [r.to_dict() for r in results]} for path, results in outputs],
            indent=2,
        ))
        return 0

    for path, results in outputs:
        if len(args.images) > 1:
            print(f"****************** {Path(path).name}")
        for result in results:
            print(format_result(result))
    return 0


def format_result(result: DecodeResult) -> str:
    return f"{result.word}\t{result.score:.6f}"


def evaluate_model(args: argparse.Namespace) -> int:
    config = load_config(args)
    bundle = load_bundle(args.model)
    samples = filter_protocol(load_dataset(args.data), int(config[Option.MIN_LENGTH]))  # type: ignore
    lexicon_size = int(config[Option.LEXICON_SIZE])  # type: ignore
    lexicon = resolve_lexicon(args, bundle)

    if lexicon_size:
        vocabulary: Optional[Sequence[str]] = lexicon or bundle.lexicon or sorted({s.word for s in samples})
        lexicon = None
    else:
        vocabulary = None
    decode_config = settings.decode_config(
        config, resolve_lm(args, config, bundle), lexicon, bundle.model.config.symbols
    )

    predictions, summary = evaluate(
        bundle.model, samples, decode_config, args.jobs, lexicon_size, vocabulary,
        int(config[Option.SEED]), progress=args.verbose > 0,  # type: ignore
    )
    if args.predictions is not None:
        Path(args.predictions).write_text(
            "\n".join([PREDICTIONS_HEADER] + [p.to_tsv() for p in predictions]) + "\n", encoding="utf8"
        )

    if args.json:
        print(summary.to_json(indent=2))
    else:
        print("\n".join(summary.lines()))
    return 0


def check_gradients(args: argparse.Namespace) -> int:
    config = load_config(args, base=None if args.model is not None else "toy")
    if args.model is not None:
        model = load_bundle(args.model).model
    else:
        model = Recognizer.create(settings.model_config(config), int(config[Option.SEED]))  # type: ignore
    word = normalize_word(args.word)
    image = render_word(word, settings.render_config(config))

    report = gradient_check(model, image, word, args.eps, args.tol, args.samples, int(config[Option.SEED]))  # type: ignore
    if args.json:
        print(report.to_json(indent=2))
    else:
        print("\n".join(report.lines()))
    return 0 if report.passed else 1


def generate_data(args: argparse.Namespace) -> int:
    config = load_config(args)
    render_config = settings.render_config(config)
    corpus = training_corpus(args, config)
    train_renders, test_renders = int(config[Option.TRAIN_RENDERS]), int(config[Option.TEST_RENDERS])  # type: ignore
    progress = args.verbose > 0

    if args.holdout > 0:
        kept, held_out = split_words(corpus, args.holdout, int(config[Option.SEED]))  # type: ignore
        train_set = generate_dataset(kept, train_renders, render_config, progress=progress)
        first = render_config.seed * 1_000_000 + len(kept) * train_renders
        test_set = generate_dataset(held_out, test_renders, render_config, first, progress)
    else:
        train_set, test_set = generate_split(corpus, train_renders, test_renders, render_config, progress)

    out = Path(args.out)
    save_dataset(out / "train", train_set)
    save_dataset(out / "test", test_set)
    print(f"train\t{len(train_set)}")
    print(f"test\t{len(test_set)}")
    return 0


def ablate(args: argparse.Namespace) -> int:
    config = load_config(args)
    model_config = settings.model_config(config)
    corpus = training_corpus(args, config)
    rows = run_ablation(
        model_config,
        settings.train_config(config, args.jobs),
        settings.render_config(config),
        corpus,
        int(config[Option.TRAIN_RENDERS]),  # type: ignore
        int(config[Option.TEST_RENDERS]),  # type: ignore
        settings.decode_config(config, symbols=model_config.symbols),
        settings.fit_lm(config, corpus, model_config.symbols),
        lexicon_size=int(config[Option.LEXICON_SIZE]),  # type: ignore
        progress=args.verbose > 0,
    )
    if args.json:
        print(json.dumps([row.to_dict() for row in rows], indent=2))
    else:
        print("\n".join([ABLATION_HEADER] + [row.to_tsv() for row in rows]))
    return 0


def curve(args: argparse.Namespace) -> int:
    config = load_config(args)
    try:
        sizes = [int(size) for size in args.sizes.split(",")]
    except ValueError as e:
        raise InputError(f"invalid --sizes '{args.sizes}'") from e
    model_config = settings.model_config(config)
    corpus = training_corpus(args, config)
    points = learning_curve(
        sizes,
        model_config,
        settings.train_config(config, args.jobs),
        settings.render_config(config),
        corpus,
        int(config[Option.TEST_RENDERS]),  # type: ignore
        settings.decode_config(config, symbols=model_config.symbols),
        settings.fit_lm(config, corpus, model_config.symbols),
        progress=args.verbose > 0,
    )
    if args.json:
        print(json.dumps([point.to_dict() for point in points], indent=2))
    else:
        print("\n".join([CURVE_HEADER] + [point.to_tsv() for point in points]))
    return 0


COMMANDS = {
    "train": train_model,
    "decode": decode_images,
    "eval": evaluate_model,
    "gradcheck": check_gradients,
    "gen-data": generate_data,
    "ablate": ablate,
    "curve": curve,
}


@logger.catch
def main() -> int:
    option_parses = get_option_parses()
    args = setup_argparse(option_parses)
    setup_logger(getattr(args, "verbose", 0))

    if args.command == "version":
        print(f"glyphread version {glyphread.__version__}")
        return 0
    command = COMMANDS.get(args.command)
    assert command is not None, "unreachable, but " + args.command

    try:
        return command(args)
    except (GlyphReadException, OSError) as e:
        logger.error("{e}", e=e)
        return 2
