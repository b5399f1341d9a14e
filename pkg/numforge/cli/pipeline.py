"""The stages of the dataset pipeline, each reading its inputs from files,
writing its outputs to files and recording both in a run manifest."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterable, Iterator, TypeVar

from tqdm import tqdm

from numforge.adapter.algebra import (AdapterDelta, MixMethod, factorize,
                                      load_delta, merge, mix, save_adapter,
                                      save_delta)
from numforge.adapter.tensorfile import read_tensors, write_tensors
from numforge.cli.config import ForgeConfig
from numforge.cli.manifest import RunManifest
from numforge.common.errors import (ConfigError, DocumentEmptied, ForgeError,
                                    InputError)
from numforge.common.io import read_json, read_jsonl, write_json, write_jsonl
from numforge.common.rng import derive_rng
from numforge.corpus.document import CleanDocument, CorpusStats, RawDocument
from numforge.corpus.loader import (CLEAN_CORPUS_FILE, STATS_FILE,
                                    load_corpus, read_clean_corpus,
                                    write_clean_corpus)
from numforge.corpus.preprocess import preprocess
from numforge.corpus.rules import load_rules
from numforge.corpus.stats import corpus_stats
from numforge.evaluation.questions import (DEFAULT_BLOCK, EvalQuestion,
                                           assemble_few_shot, load_questions,
                                           split_questions)
from numforge.evaluation.scoring import (ScoreReport, aggregate_reports,
                                         load_predictions, score)
from numforge.numct.config import PipelineConfig
from numforge.numct.extractor import (Instance, extract_instances,
                                      relevance_probability, select_instances)
from numforge.numct.instructions import (Instruction, PromptTemplate,
                                         build_dataset)
from numforge.numct.training import (make_training_example,
                                     pretraining_blocks)

log = logging.getLogger(__name__)

CLEAN_DIR: str = 'clean'
INSTANCES_FILE: str = 'instances.jsonl'
DATASET_FILE: str = 'numct.jsonl'
TRAINING_FILE: str = 'train.jsonl'
RUN_MANIFEST_FILE: str = 'run.manifest.json'

# key of the random stream of the instance selection pass
SELECT_STREAM: str = 'select-instances'

T = TypeVar('T')
R = TypeVar('R')


def _map(function: Callable[[T], R], items: Iterable[T], jobs: int,
         desc: str) -> list[R]:
    progress = tqdm(items, desc=desc, disable=None)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(function, progress))

    return [function(item) for item in progress]


def preprocess_stage(config: ForgeConfig, manifest_file: str | Path,
                     out_dir: str | Path,
                     record: RunManifest) -> list[CleanDocument]:
    """
    Loads the raw corpus, filters, refines, calibrates and segments every
    document, then writes the clean corpus and its statistics.

    :param config: The run configuration
    :param manifest_file: The corpus manifest
    :param out_dir: The directory receiving corpus.jsonl and stats.json
    :param record: The manifest of the run
    :return: The clean documents
    """
    manifest_file, out_dir = Path(manifest_file), Path(out_dir)
    docs = load_corpus(manifest_file)
    record.add_input(manifest_file)
    for entry in read_json(manifest_file)['documents']:
        record.add_input(manifest_file.parent / entry['file'])

    rules_file = config['corpus']['rules']
    filter_rules, refine_rules = load_rules(rules_file)
    if rules_file is not None:
        record.add_input(rules_file)

    rejoin_breaks: bool = bool(config['corpus']['rejoin_breaks'])

    def clean_document(doc: RawDocument) -> CleanDocument | None:
        try:
            return preprocess(doc, filter_rules, refine_rules, rejoin_breaks)
        except DocumentEmptied as error:
            log.warning('skipping %s', error)
            return None

    clean: list[CleanDocument] = [
        doc for doc in _map(clean_document, docs, config.jobs, 'preprocess')
        if doc is not None]
    if not clean:
        raise InputError(f'{manifest_file}: every document is empty after '
                         'preprocessing')

    paragraphs: int = write_clean_corpus(out_dir / CLEAN_CORPUS_FILE, clean)
    stats: CorpusStats = corpus_stats(clean, config.tokenizer())
    write_json(out_dir / STATS_FILE, stats.to_dict())
    record.add_output(out_dir / CLEAN_CORPUS_FILE)
    record.add_output(out_dir / STATS_FILE)
    log.info('kept %d paragraphs in %d documents, %d tokens', paragraphs,
             stats.num_documents, stats.num_tokens)
    return clean


def stats_stage(config: ForgeConfig, corpus: str | Path,
                out_file: str | Path, record: RunManifest) -> CorpusStats:
    """Recomputes the statistics of a clean corpus with the configured
    tokenizer."""
    docs = read_clean_corpus(corpus)
    record.add_input(corpus)
    stats: CorpusStats = corpus_stats(docs, config.tokenizer())
    write_json(out_file, stats.to_dict())
    record.add_output(out_file)
    return stats


def extract_stage(config: ForgeConfig, corpus: str | Path,
                  out_file: str | Path, record: RunManifest,
                  assume_irrelevant: int | None = None) -> list[Instance]:
    """
    Extracts the instances of every document, in corpus order, then keeps a
    seeded random ``r_ins`` share of them.

    :param config: The run configuration
    :param corpus: The clean corpus file or directory
    :param out_file: The JSON Lines file receiving the selected instances
    :param record: The manifest of the run
    :param assume_irrelevant: A number of irrelevant instances for which to
        report the probability that none is selected
    :return: The selected instances
    """
    cfg: PipelineConfig = config.pipeline()
    lexer = config.lexer()
    docs = read_clean_corpus(corpus)
    record.add_input(Path(corpus) / CLEAN_CORPUS_FILE
                     if Path(corpus).is_dir() else corpus)

    per_doc: list[list[Instance]] = _map(
        lambda doc: extract_instances(doc, cfg, lexer), docs, config.jobs,
        'extract')
    instances: list[Instance] = [inst for batch in per_doc for inst in batch]
    if not instances:
        log.warning('no document yields an instance with n_min=%d',
                    cfg.n_min)

    selected = select_instances(instances, cfg,
                                derive_rng(cfg.seed, SELECT_STREAM))
    log.info('extracted %d instances, selected %d', len(instances),
             len(selected))

    if assume_irrelevant is not None:
        p = relevance_probability(len(instances), assume_irrelevant,
                                  len(selected))
        log.info('probability that no irrelevant instance of %d is selected:'
                 ' %s (%.6f)', assume_irrelevant, p, float(p))

    write_jsonl(out_file, (inst.to_dict() for inst in selected))
    record.add_output(out_file)
    return selected


def build_stage(config: ForgeConfig, instances_file: str | Path,
                out_file: str | Path, record: RunManifest,
                training_file: str | Path | None = None) -> list[Instruction]:
    """
    Builds the masked choice instructions of the selected instances and,
    when asked, their tokenized training examples.

    :param config: The run configuration
    :param instances_file: The selected instances
    :param out_file: The JSON Lines file receiving the instruction pairs
    :param record: The manifest of the run
    :param training_file: The JSON Lines file receiving training examples
    :return: The instructions
    """
    cfg: PipelineConfig = config.pipeline()
    build = config['build']
    instances: list[Instance] = [Instance.from_dict(item)
                                 for item in read_jsonl(instances_file)]
    record.add_input(instances_file)

    dataset = build_dataset(instances, cfg, config.template(),
                            with_choices=bool(build['with_choices']),
                            jobs=config.jobs)
    write_jsonl(out_file, (instruction.to_dict() for instruction in dataset))
    record.add_output(out_file)

    if training_file is not None:
        tokenizer = config.tokenizer()
        write_jsonl(training_file,
                    (make_training_example(instruction.pair, tokenizer,
                                           build['window_k']).to_dict()
                     for instruction in dataset))
        record.add_output(training_file)

    return dataset


def cp_data_stage(config: ForgeConfig, corpus: str | Path,
                  out_file: str | Path, record: RunManifest,
                  block_size: int) -> int:
    """Writes the next-token prediction blocks of a clean corpus and returns
    their number."""
    docs = read_clean_corpus(corpus)
    record.add_input(corpus)
    blocks = pretraining_blocks(docs, config.tokenizer(), block_size)
    write_jsonl(out_file, (block.to_dict() for block in blocks))
    record.add_output(out_file)
    log.info('wrote %d blocks of up to %d tokens', len(blocks), block_size)
    return len(blocks)


@contextmanager
def _stage(name: str) -> Iterator[None]:
    log.info('stage %s', name)
    try:
        yield
    except ForgeError as error:
        error.stage = error.stage or name
        raise


def run_all(config: ForgeConfig, record: RunManifest) -> Path:
    """
    Runs preprocess, extract and build into the configured output directory.

    :param config: The run configuration, naming the corpus manifest
    :param record: The manifest of the run
    :return: The instruction dataset file
    """
    manifest_file = config['corpus']['manifest']
    if manifest_file is None:
        raise ConfigError('corpus.manifest must name the corpus manifest')

    out: Path = config.output
    clean_dir: Path = out / CLEAN_DIR
    with _stage('preprocess'):
        preprocess_stage(config, manifest_file, clean_dir, record)
    with _stage('extract'):
        extract_stage(config, clean_dir, out / INSTANCES_FILE, record)
    training_file = out / TRAINING_FILE \
        if config['build']['emit_training'] else None
    with _stage('build'):
        build_stage(config, out / INSTANCES_FILE, out / DATASET_FILE, record,
                    training_file)
    return out / DATASET_FILE


def mix_stage(a: str | Path, b: str | Path, method: MixMethod,
              out_file: str | Path, record: RunManifest,
              rank_a: int | None = None, rank_b: int | None = None,
              factors: bool = False) -> AdapterDelta:
    """
    Mixes two adapter files and writes the result as a full delta or, with
    ``factors``, as a low-rank module of the mixed rank.

    :param a: The first adapter or delta file
    :param b: The second adapter or delta file
    :param method: The mixing method
    :param out_file: The file receiving the mixed adapter
    :param record: The manifest of the run
    :param rank_a: The declared rank of the first file
    :param rank_b: The declared rank of the second file
    :param factors: Whether to write Up/Down factors instead of the delta
    :return: The mixed delta
    """
    d1, d2 = load_delta(a, rank_a), load_delta(b, rank_b)
    record.add_input(a)
    record.add_input(b)
    mixed: AdapterDelta = mix(d1, d2, method)
    if factors:
        save_adapter(out_file, factorize(mixed))
    else:
        save_delta(out_file, mixed)
    record.add_output(out_file)
    log.info('mixed %d layers by %s, rank %d', len(mixed.layers),
             method.value, mixed.effective_rank)
    return mixed


def merge_stage(base: str | Path, delta: str | Path, out_file: str | Path,
                record: RunManifest):
    """Adds a delta or adapter file to foundation weights."""
    weights = read_tensors(base)
    mixed = load_delta(delta)
    record.add_input(base)
    record.add_input(delta)
    write_tensors(out_file, merge(weights, mixed))
    record.add_output(out_file)
    log.info('merged %d layers', len(mixed.layers))


def eval_split_stage(config: ForgeConfig, questions_file: str | Path,
                     out_file: str | Path, record: RunManifest) -> int:
    """Tags every question numeric or non-numeric and returns the number of
    numeric ones."""
    questions = load_questions(questions_file)
    record.add_input(questions_file)
    records = split_questions(questions, config.lexer())
    write_jsonl(out_file, records)
    record.add_output(out_file)
    numeric: int = sum(item['category'] == 'numeric' for item in records)
    log.info('%d of %d questions are numeric', numeric, len(records))
    return numeric


def score_stage(config: ForgeConfig, questions_file: str | Path,
                predictions_files: list[Path], out_file: str | Path,
                record: RunManifest) -> str:
    """
    Scores one or more prediction files. One file gives a report; several
    give the mean and standard deviation of their reports.

    :param config: The run configuration
    :param questions_file: The questions
    :param predictions_files: The prediction or score files of each run
    :param out_file: The JSON file receiving the report; the table goes to
        the same path with a .txt suffix
    :param record: The manifest of the run
    :return: The report as an aligned table
    """
    if not predictions_files:
        raise InputError('at least one prediction file is needed')

    questions = load_questions(questions_file)
    record.add_input(questions_file)
    lexer = config.lexer()
    reports: list[ScoreReport] = []
    for predictions_file in predictions_files:
        reports.append(score(questions,
                             load_predictions(predictions_file, questions),
                             lexer))
        record.add_input(predictions_file)

    if len(reports) == 1:
        write_json(out_file, reports[0].to_dict())
        table: str = reports[0].render_table()
    else:
        aggregate = aggregate_reports(reports)
        write_json(out_file, aggregate.to_dict())
        table = aggregate.render_table()

    table_file = Path(out_file).with_suffix('.txt')
    table_file.write_text(table + '\n', encoding='utf-8')
    record.add_output(out_file)
    record.add_output(table_file)
    return table


def prompts_stage(config: ForgeConfig, questions_file: str | Path | None,
                  exemplars_file: str | Path, out_file: str | Path,
                  record: RunManifest) -> int:
    """
    Writes the few-shot prompt of every question, one ``{qid, prompt}``
    record each. The exemplars of a question are the first ``k_shots``
    exemplars of its subject.

    :param config: The run configuration
    :param questions_file: The questions, ``evaluate.questions`` when None
    :param exemplars_file: The answered exemplar questions
    :param out_file: The JSON Lines file receiving the prompts
    :param record: The manifest of the run
    :return: The number of prompts written
    """
    questions_file = questions_file or config['evaluate']['questions']
    if questions_file is None:
        raise ConfigError('--questions or evaluate.questions is needed')

    questions = load_questions(questions_file)
    exemplars = load_questions(exemplars_file)
    record.add_input(questions_file)
    record.add_input(exemplars_file)

    k_shots: int = config['evaluate']['k_shots']
    template = PromptTemplate(text=DEFAULT_BLOCK)
    by_subject: dict[str, list[EvalQuestion]] = {}
    for exemplar in exemplars:
        by_subject.setdefault(exemplar.subject, []).append(exemplar)

    count: int = write_jsonl(out_file, (
        {'qid': question.qid,
         'prompt': assemble_few_shot(question,
                                     by_subject.get(question.subject, []),
                                     k_shots, template)}
        for question in questions))
    record.add_output(out_file)
    log.info('wrote %d prompts with %d shots', count, k_shots)
    return count
