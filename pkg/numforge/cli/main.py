"""The ``forge`` command: one sub-command per pipeline stage."""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click

from numforge import __version__
from numforge.adapter.algebra import MixMethod
from numforge.cli import pipeline
from numforge.cli.config import ForgeConfig, load_config
from numforge.cli.manifest import RunManifest, manifest_path
from numforge.common.errors import ForgeError
from numforge.numct.training import DEFAULT_BLOCK_SIZE

log = logging.getLogger(__name__)

_FILE = click.Path(dir_okay=False, path_type=Path)
_DIR = click.Path(file_okay=False, path_type=Path)
_ANY = click.Path(path_type=Path)


def _overrides(**sections: dict[str, Any]) -> dict[str, Any]:
    """Returns the settings given on the command line, dropping unset
    flags and empty sections."""
    result: dict[str, Any] = {}
    for section, values in sections.items():
        if isinstance(values, dict):
            values = {key: value for key, value in values.items()
                      if value is not None}
            if values:
                result[section] = values
        elif values is not None:
            result[section] = values

    return result


_SEED_OPTION = click.option(
    '--seed', type=click.IntRange(0, (1 << 64) - 1), envvar='FORGE_SEED',
    default=None, help='Seed of every random draw (env FORGE_SEED).')
_JOBS_OPTION = click.option('--jobs', type=click.IntRange(min=1), default=None,
                            help='Maximum number of worker threads.')


def run_options(function: Callable) -> Callable:
    """Adds the options shared by every stage: config file, seed and
    workers."""
    function = _JOBS_OPTION(function)
    function = _SEED_OPTION(function)
    return click.option('--config', 'config_path', type=_FILE, default=None,
                        help='YAML run configuration.')(function)


def _execute(stage: str, output: Path | None,
             action: Callable[..., Any],
             config: Callable[[], ForgeConfig] | None = None) -> Any:
    """
    Runs a stage, writes its manifest beside its output and turns toolkit
    errors into an ERROR line and the exit code of their family.

    :param stage: The name of the stage, used in diagnostics
    :param output: The main output of the stage, None when the stage
        writes its own manifest
    :param action: The stage, called with the run manifest and the
        configuration when there is one
    :param config: Loads the run configuration, when the stage needs one
    :return: The result of the stage
    """
    try:
        settings: ForgeConfig | None = config() if config else None
        record = RunManifest(stage, settings.to_dict() if settings else {},
                             settings.seed if settings else 0)
        result = action(record) if settings is None \
            else action(record, settings)
        if output is not None:
            record.finish(manifest_path(output))
        return result
    except ForgeError as error:
        log.error('%s: %s', f'{stage}/{error.stage}' if error.stage else stage,
                  error)
        click.get_current_context().exit(error.exit_code)


@click.group()
@click.version_option(__version__, prog_name='forge')
@click.option('--verbose', '-v', is_flag=True, help='Log debug messages.')
def forge(verbose: bool):
    """Builds numeric-masked choice instruction datasets, mixes low-rank
    adapters and scores multiple-choice benchmarks."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format='%(levelname)s: %(message)s',
                        stream=sys.stderr, force=True)


@forge.command('preprocess')
@click.option('--manifest', 'manifest_file', type=_FILE, default=None,
              help='JSON manifest listing the raw documents.')
@click.option('--rules', type=_FILE, default=None,
              help='YAML filter/refine rule file.')
@click.option('--rejoin-breaks/--no-rejoin-breaks', default=None,
              help='Rejoin numbers split by a paragraph break.')
@click.option('--out', type=_DIR, required=True,
              help='Directory receiving corpus.jsonl and stats.json.')
@run_options
def preprocess_command(manifest_file, rules, rejoin_breaks, out, config_path,
                       seed, jobs):
    """Filters, refines, calibrates and segments a raw corpus."""
    def load() -> ForgeConfig:
        return load_config(config_path, _overrides(
            seed=seed, jobs=jobs,
            corpus={'manifest': manifest_file, 'rules': rules,
                    'rejoin_breaks': rejoin_breaks}))

    def action(record: RunManifest, config: ForgeConfig):
        source = config['corpus']['manifest']
        if source is None:
            raise click.UsageError('--manifest or corpus.manifest is needed')
        pipeline.preprocess_stage(config, source, out, record)

    _execute('preprocess', out, action, load)


@forge.command('stats')
@click.option('--corpus', type=_ANY, required=True,
              help='Clean corpus file or directory.')
@click.option('--out', type=_FILE, required=True, help='Statistics JSON.')
@click.option('--tokenizer', type=click.Choice(['default', 'whitespace']),
              default=None, help='What counts as a token.')
@run_options
def stats_command(corpus, out, tokenizer, config_path, seed, jobs):
    """Counts the subjects, documents and tokens of a clean corpus."""
    _execute('stats', out,
             lambda record, config: pipeline.stats_stage(config, corpus, out,
                                                         record),
             lambda: load_config(config_path, _overrides(
                 seed=seed, jobs=jobs, tokenizer=tokenizer)))


@forge.command('extract')
@click.option('--corpus', type=_ANY, required=True,
              help='Clean corpus file or directory.')
@click.option('--out', type=_FILE, required=True,
              help='JSON Lines file receiving the selected instances.')
@click.option('--n-min', type=int, default=None,
              help='Fewest paragraphs per instance.')
@click.option('--n-max', type=int, default=None,
              help='Most paragraphs per instance.')
@click.option('--r-ins', type=float, default=None,
              help='Share of instances kept.')
@click.option('--assume-irrelevant', type=click.IntRange(min=0),
              default=None,
              help='Log the probability that none of this many irrelevant '
                   'instances is selected.')
@run_options
def extract_command(corpus, out, n_min, n_max, r_ins, assume_irrelevant,
                    config_path, seed, jobs):
    """Extracts numeric-bearing instances and selects a random share."""
    _execute('extract', out,
             lambda record, config: pipeline.extract_stage(
                 config, corpus, out, record, assume_irrelevant),
             lambda: load_config(config_path, _overrides(
                 seed=seed, jobs=jobs,
                 extract={'n_min': n_min, 'n_max': n_max, 'r_ins': r_ins})))


@forge.command('build')
@click.option('--instances', type=_FILE, required=True,
              help='Selected instances from extract.')
@click.option('--out', type=_FILE, required=True,
              help='JSON Lines file receiving the instruction pairs.')
@click.option('--training', type=_FILE, default=None,
              help='Also write tokenized training examples here.')
@click.option('--no-choices', is_flag=True,
              help='Ask for the masked value without offering choices.')
@click.option('--r-nv', type=float, default=None,
              help='Share of numeric variables masked per instance.')
@click.option('--n-cho', type=int, default=None,
              help='Number of choices per question.')
@click.option('--s', 'scaler', type=float, default=None,
              help='Scaler of the integer distractor interval.')
@run_options
def build_command(instances, out, training, no_choices, r_nv, n_cho, scaler,
                  config_path, seed, jobs):
    """Masks numeric variables and builds choice instructions."""
    _execute('build', out,
             lambda record, config: pipeline.build_stage(
                 config, instances, out, record, training),
             lambda: load_config(config_path, _overrides(
                 seed=seed, jobs=jobs,
                 build={'r_nv': r_nv, 'n_cho': n_cho, 's': scaler,
                        'with_choices': False if no_choices else None})))


@forge.command('cp-data')
@click.option('--corpus', type=_ANY, required=True,
              help='Clean corpus file or directory.')
@click.option('--out', type=_FILE, required=True,
              help='JSON Lines file receiving the blocks.')
@click.option('--block-size', type=click.IntRange(min=1),
              default=DEFAULT_BLOCK_SIZE, show_default=True,
              help='Tokens per block.')
@run_options
def cp_data_command(corpus, out, block_size, config_path, seed, jobs):
    """Cuts a clean corpus into next-token prediction blocks."""
    _execute('cp-data', out,
             lambda record, config: pipeline.cp_data_stage(
                 config, corpus, out, record, block_size),
             lambda: load_config(config_path,
                                 _overrides(seed=seed, jobs=jobs)))


@forge.command('mix')
@click.option('--a', 'first', type=_FILE, required=True,
              help='First adapter or delta file.')
@click.option('--b', 'second', type=_FILE, required=True,
              help='Second adapter or delta file.')
@click.option('--method', type=click.Choice([m.value for m in MixMethod]),
              default=MixMethod.SVD.value, show_default=True)
@click.option('--rank-a', type=click.IntRange(min=1), default=None,
              help='Declared rank of the first file.')
@click.option('--rank-b', type=click.IntRange(min=1), default=None,
              help='Declared rank of the second file.')
@click.option('--factors', is_flag=True,
              help='Write the mixed module as up/down factors.')
@click.option('--out', type=_FILE, required=True)
def mix_command(first, second, method, rank_a, rank_b, factors, out):
    """Mixes two low-rank adapters."""
    _execute('mix', out,
             lambda record: pipeline.mix_stage(
                 first, second, MixMethod(method), out, record, rank_a,
                 rank_b, factors))


@forge.command('merge')
@click.option('--base', type=_FILE, required=True,
              help='Foundation weights.')
@click.option('--delta', type=_FILE, required=True,
              help='Mixed delta or adapter file.')
@click.option('--out', type=_FILE, required=True)
def merge_command(base, delta, out):
    """Adds a mixed adapter to foundation weights."""
    _execute('merge', out,
             lambda record: pipeline.merge_stage(base, delta, out, record))


@forge.command('eval-split')
@click.option('--in', 'questions', type=_FILE, required=True,
              help='Questions, JSON Lines or CSV.')
@click.option('--out', type=_FILE, required=True,
              help='Questions tagged numeric or non-numeric.')
@run_options
def eval_split_command(questions, out, config_path, seed, jobs):
    """Splits benchmark questions into numeric and non-numeric ones."""
    _execute('eval-split', out,
             lambda record, config: pipeline.eval_split_stage(
                 config, questions, out, record),
             lambda: load_config(config_path,
                                 _overrides(seed=seed, jobs=jobs)))


@forge.command('prompts')
@click.option('--questions', type=_FILE, default=None,
              help='Questions, JSON Lines or CSV; evaluate.questions by '
                   'default.')
@click.option('--exemplars', type=_FILE, required=True,
              help='Answered questions used as shots.')
@click.option('--k-shots', type=click.IntRange(min=0), default=None,
              help='Exemplars per prompt.')
@click.option('--out', type=_FILE, required=True,
              help='JSON Lines file receiving one prompt per question.')
@run_options
def prompts_command(questions, exemplars, k_shots, out, config_path, seed,
                    jobs):
    """Assembles few-shot prompts for benchmark questions."""
    _execute('prompts', out,
             lambda record, config: pipeline.prompts_stage(
                 config, questions, exemplars, out, record),
             lambda: load_config(config_path, _overrides(
                 seed=seed, jobs=jobs, evaluate={'k_shots': k_shots})))


@forge.command('score')
@click.option('--questions', type=_FILE, required=True,
              help='Questions, JSON Lines or CSV.')
@click.option('--predictions', type=_FILE, multiple=True, required=True,
              help='Predictions or scores of one run; repeat for several '
                   'runs.')
@click.option('--out', type=_FILE, required=True, help='Report JSON.')
@run_options
def score_command(questions, predictions, out, config_path, seed, jobs):
    """Reports accuracy per sub-domain on numeric and non-numeric
    questions."""
    table = _execute('score', out,
                     lambda record, config: pipeline.score_stage(
                         config, questions, list(predictions), out, record),
                     lambda: load_config(config_path,
                                         _overrides(seed=seed, jobs=jobs)))
    log.info('accuracy (%%):\n%s', table)


@forge.command('run-all')
@click.option('--config', 'config_path', type=_FILE, required=True,
              help='YAML run configuration.')
@_SEED_OPTION
@_JOBS_OPTION
@click.option('--out', type=_DIR, default=None,
              help='Output directory, overrides the configured one.')
def run_all_command(config_path, seed, jobs, out):
    """Runs preprocess, extract and build."""
    def load() -> ForgeConfig:
        return load_config(config_path,
                           _overrides(seed=seed, jobs=jobs, output=out))

    def action(record: RunManifest, config: ForgeConfig):
        record.add_input(config_path)
        dataset = pipeline.run_all(config, record)
        record.finish(config.output / pipeline.RUN_MANIFEST_FILE)
        log.info('wrote %s', dataset)

    _execute('run-all', None, action, load)


if __name__ == '__main__':
    forge()
