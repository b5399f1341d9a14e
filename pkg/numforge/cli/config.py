"""Loads the YAML run configuration: shipped defaults, overridden by the
configuration file, overridden by command-line flags."""
from __future__ import annotations

import copy
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from numforge.common.errors import ConfigError
from numforge.common.tokenizer import Tokenizer, get_tokenizer
from numforge.numct.config import PipelineConfig
from numforge.numct.instructions import (DEFAULT_TEMPLATE,
                                         DEFAULT_TEMPLATE_WITHOUT_CHOICES,
                                         PromptTemplate)
from numforge.numeric.lexer import NumericLexer

log = logging.getLogger(__name__)

DEFAULT_CONFIG_RESOURCE: str = 'default_config.yaml'

# settings holding file system paths, resolved against the config directory
PATH_KEYS: tuple[tuple[str, ...], ...] = (
    ('output',), ('corpus', 'manifest'), ('corpus', 'rules'),
    ('evaluate', 'questions'))


def default_settings() -> dict[str, Any]:
    """Returns the shipped default settings."""
    text: str = resources.files('numforge.resources') \
        .joinpath(DEFAULT_CONFIG_RESOURCE).read_text(encoding='utf-8')
    return yaml.safe_load(text)


def merge_settings(base: dict[str, Any], override: dict[str, Any],
                   where: str = '') -> dict[str, Any]:
    """
    Returns a copy of ``base`` with the values of ``override``. Every key of
    ``override`` must exist in ``base``; sections merge key by key.

    :param base: The settings to override
    :param override: The overriding settings
    :param where: The section path used in error messages
    :return: The merged settings
    """
    merged: dict[str, Any] = copy.deepcopy(base)
    for key, value in override.items():
        name: str = f'{where}{key}'
        if key not in base:
            raise ConfigError(f'unknown config key {name!r}')

        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f'config key {name!r} must be a section')
            merged[key] = merge_settings(base[key], value, f'{name}.')
        elif isinstance(value, dict):
            raise ConfigError(f'config key {name!r} is not a section')
        else:
            merged[key] = value

    return merged


def _resolve_paths(settings: dict[str, Any], root: Path):
    for keys in PATH_KEYS:
        section = settings
        for key in keys[:-1]:
            section = section[key]
        value = section[keys[-1]]
        if value is not None:
            path = Path(value)
            section[keys[-1]] = path if path.is_absolute() else root / path


@dataclass(frozen=True)
class ForgeConfig:
    """The effective settings of a run and the views the stages need."""

    settings: dict[str, Any]

    def __getitem__(self, section: str) -> Any:
        return self.settings[section]

    @property
    def seed(self) -> int:
        """Returns the run seed."""
        return self.settings['seed']

    @property
    def jobs(self) -> int:
        """Returns the maximum number of workers."""
        return max(1, int(self.settings['jobs']))

    @property
    def output(self) -> Path:
        """Returns the output directory."""
        return Path(self.settings['output'])

    def pipeline(self) -> PipelineConfig:
        """Returns the validated pipeline hyperparameters."""
        extract, build = self.settings['extract'], self.settings['build']
        return PipelineConfig(n_min=extract['n_min'], n_max=extract['n_max'],
                              r_ins=extract['r_ins'], r_nv=build['r_nv'],
                              n_cho=build['n_cho'], s=build['s'],
                              seed=self.seed)

    def lexer(self) -> NumericLexer:
        """Returns the lexer with the configured structural vocabulary."""
        extract = self.settings['extract']
        kwargs: dict[str, Any] = {}
        if extract['structural_keywords'] is not None:
            kwargs['keywords'] = extract['structural_keywords']
        if extract['structural_suffixes'] is not None:
            kwargs['suffixes'] = extract['structural_suffixes']
        return NumericLexer(**kwargs)

    def template(self) -> PromptTemplate:
        """Returns the configured prompt template."""
        build = self.settings['build']
        return PromptTemplate(
            text=build['template'] or DEFAULT_TEMPLATE,
            without_choices=build['template_without_choices']
            or DEFAULT_TEMPLATE_WITHOUT_CHOICES,
            identifiers=tuple(str(identifier)
                              for identifier in build['identifiers']))

    def tokenizer(self) -> Tokenizer:
        """Returns the configured tokenizer."""
        return get_tokenizer(self.settings['tokenizer'])

    def to_dict(self) -> dict[str, Any]:
        """Returns the settings with paths as strings, as echoed in
        manifests."""
        def plain(value: Any) -> Any:
            if isinstance(value, dict):
                return {key: plain(item) for key, item in value.items()}
            if isinstance(value, Path):
                return value.as_posix()
            return value

        return plain(self.settings)


def load_config(path: str | Path | None = None,
                overrides: dict[str, Any] | None = None) -> ForgeConfig:
    """
    Reads the run configuration.

    :param path: The YAML configuration file, None for the defaults only
    :param overrides: Settings given on the command line, by section
    :return: The configuration, validated
    """
    settings: dict[str, Any] = default_settings()
    root: Path = Path.cwd()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f'config file not found: {path}')

        try:
            raw = yaml.safe_load(path.read_text(encoding='utf-8')) or {}
        except yaml.YAMLError as error:
            raise ConfigError(f'{path}: {error}') from error

        if not isinstance(raw, dict):
            raise ConfigError(f'{path}: expected a mapping of settings')

        settings = merge_settings(settings, raw)
        root = path.parent
        log.debug('read config %s', path)

    _resolve_paths(settings, root)
    if overrides:
        settings = merge_settings(settings, overrides)

    for name, value in (('jobs', settings['jobs']),
                        ('build.window_k', settings['build']['window_k']),
                        ('evaluate.k_shots', settings['evaluate']['k_shots'])):
        if isinstance(value, bool) or not isinstance(value, int) \
                or value < (0 if name == 'evaluate.k_shots' else 1):
            raise ConfigError(f'{name} must be a positive integer, '
                              f'got {value!r}')

    config = ForgeConfig(settings)
    config.pipeline()
    config.template()
    config.tokenizer()
    return config
