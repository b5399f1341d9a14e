"""Defines the declarative paragraph rules used by filtering and refinement."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from numforge.common.errors import ConfigError

DEFAULT_RULES_RESOURCE: str = 'rules.yaml'


@dataclass(frozen=True)
class RuleSet:
    """
    A named list of regular expressions. A paragraph matches the rule set when
    any pattern is found in its trimmed text.
    """

    name: str
    patterns: tuple[re.Pattern, ...]

    @classmethod
    def compile(cls, name: str, patterns: list[str]) -> RuleSet:
        """
        Returns a rule set from pattern strings.

        :param name: The name used in diagnostics, e.g. 'filter'
        :param patterns: The regular expressions
        :return: The compiled rule set
        """
        compiled: list[re.Pattern] = []
        for pattern in patterns:
            if not isinstance(pattern, str):
                raise ConfigError(f'{name} rule {pattern!r} is not a string')
            try:
                compiled.append(re.compile(pattern))
            except re.error as error:
                raise ConfigError(f'{name} rule {pattern!r}: {error}') \
                    from error

        return cls(name, tuple(compiled))

    def matches(self, paragraph: str) -> bool:
        """Returns true if any rule is found in the trimmed paragraph."""
        text: str = paragraph.strip()
        return any(pattern.search(text) for pattern in self.patterns)


def load_rules(path: str | Path | None = None) -> tuple[RuleSet, RuleSet]:
    """
    Reads a YAML rule file with the keys ``filter`` and ``refine``, each a
    list of regular expressions.

    :param path: The rule file, or None for the shipped defaults
    :return: The filter rule set and the refine rule set
    """
    if path is None:
        text: str = resources.files('numforge.resources') \
            .joinpath(DEFAULT_RULES_RESOURCE).read_text(encoding='utf-8')
        source: str = DEFAULT_RULES_RESOURCE
    else:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f'rule file not found: {path}')
        text = path.read_text(encoding='utf-8')
        source = str(path)

    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as error:
        raise ConfigError(f'{source}: {error}') from error

    if not isinstance(raw, dict) or set(raw) - {'filter', 'refine'}:
        raise ConfigError(f'{source}: expected only the keys filter and '
                          'refine')

    return (RuleSet.compile('filter', raw.get('filter') or []),
            RuleSet.compile('refine', raw.get('refine') or []))
