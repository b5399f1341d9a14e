"""Builds numeric-masked choice instructions: the chosen variable is replaced
by a four-token blank, the correct value is shuffled into a random identifier
slot and the prompt template turns the result into an instruction-output
pair."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable

from tqdm import tqdm

from numforge.common.errors import ConfigError, StaleSpan
from numforge.common.rng import SeededRng, derive_rng
from numforge.numct.choicegen import (ChoiceSet, format_like,
                                      make_choice_set, select_variables)
from numforge.numct.config import PipelineConfig
from numforge.numct.extractor import Instance
from numforge.numeric.lexer import NumericVariable

log = logging.getLogger(__name__)

BLANK: str = '____'

DEFAULT_IDENTIFIERS: tuple[str, ...] = ('A', 'B', 'C', 'D')

DEFAULT_TEMPLATE: str = (
    '以下是关于金融知识的单项选择题，请选出其中的正确答案。\n'
    '{question}\n'
    '{choices}\n'
    '答案：')

DEFAULT_TEMPLATE_WITHOUT_CHOICES: str = (
    '以下是一段金融文本，请写出横线处的数值。\n'
    '{question}\n'
    '答案：')


@dataclass(frozen=True)
class PromptTemplate:
    """
    The prompt constituents around a question. ``text`` is a format string
    with the placeholders ``{question}``, ``{choices}`` (all choice lines) and
    ``{F_1}`` ... ``{F_n}`` (one choice line each); ``without_choices`` is
    used when no choices are offered and only knows ``{question}``.
    """

    text: str = DEFAULT_TEMPLATE
    without_choices: str = DEFAULT_TEMPLATE_WITHOUT_CHOICES
    identifiers: tuple[str, ...] = DEFAULT_IDENTIFIERS

    def __post_init__(self):
        if '{question}' not in self.text \
                or '{question}' not in self.without_choices:
            raise ConfigError('prompt templates need a {question} placeholder')

        if len(set(self.identifiers)) != len(self.identifiers):
            raise ConfigError(f'identifiers {self.identifiers} are not '
                              'distinct')

    def identifiers_for(self, n_cho: int) -> tuple[str, ...]:
        """
        Returns the first ``n_cho`` identifiers.

        :param n_cho: The number of choices
        :return: The identifiers
        """
        if n_cho > len(self.identifiers):
            raise ConfigError(f'{n_cho} choices need more than the '
                              f'{len(self.identifiers)} identifiers '
                              f'{self.identifiers}')

        return self.identifiers[:n_cho]

    def render(self, question: str, identifiers: Iterable[str],
               choices: Iterable[str]) -> str:
        """
        Renders a question with its choices, one ``ID. choice`` line each.

        :param question: The question text
        :param identifiers: The identifiers in slot order
        :param choices: The choice texts aligned with the identifiers
        :return: The instruction text
        """
        lines: list[str] = [f'{identifier}. {choice}'
                            for identifier, choice in zip(identifiers, choices)]
        slots: dict[str, str] = {f'F_{k}': line
                                 for k, line in enumerate(lines, start=1)}
        try:
            return self.text.format(question=question,
                                    choices='\n'.join(lines), **slots)
        except (KeyError, IndexError) as error:
            raise ConfigError(f'prompt template placeholder {error} is '
                              'unknown') from error

    def render_without_choices(self, question: str) -> str:
        """Renders a question that offers no choices."""
        try:
            return self.without_choices.format(question=question)
        except (KeyError, IndexError) as error:
            raise ConfigError(f'prompt template placeholder {error} is '
                              'unknown') from error


@dataclass(frozen=True)
class InstructionPair:
    """The text the model reads and the text it is trained to produce."""

    instruction: str
    output: str


@dataclass(frozen=True)
class Instruction:
    """
    One masked question with its choices. ``choices`` are the rendered choice
    texts aligned with ``identifiers``; the correct one is the masked surface
    form and sits at the slot of ``answer_identifier``. Without choices both
    tuples are empty and the answer is the surface form itself.
    """

    pair_id: str
    question: str
    identifiers: tuple[str, ...]
    choices: tuple[str, ...]
    answer_identifier: str
    pair: InstructionPair
    provenance: dict[str, Any] = field(default_factory=dict)

    def answer_text(self) -> str:
        """Returns the text that fills the blank."""
        if not self.choices:
            return self.pair.output

        return self.choices[self.identifiers.index(self.answer_identifier)]

    def restore(self) -> str:
        """Returns the question with the correct answer written into the
        blank, i.e. the source instance text."""
        offset: int = self.provenance['blank_offset']
        return (self.question[:offset] + self.answer_text()
                + self.question[offset + len(BLANK):])

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON Lines record of the pair."""
        return {'pair_id': self.pair_id,
                'instruction': self.pair.instruction,
                'output': self.pair.output,
                'answer_identifier': self.answer_identifier,
                'identifiers': list(self.identifiers),
                'choices': list(self.choices),
                'provenance': self.provenance}


def mask_variable(inst: Instance, nv: NumericVariable) -> str:
    """
    Returns the instance text with the variable's span replaced by the blank
    marker; every other character is kept.

    :param inst: The instance
    :param nv: One of the instance's variables
    :return: The question text
    """
    if inst.text[nv.start:nv.end] != nv.surface:
        raise StaleSpan(f'{inst.instance_id}: span {nv.span} does not hold '
                        f'{nv.surface!r}')

    return inst.text[:nv.start] + BLANK + inst.text[nv.end:]


def build_instruction(inst: Instance, nv: NumericVariable,
                      choice_set: ChoiceSet | None, cfg: PipelineConfig,
                      rng: SeededRng,
                      template: PromptTemplate = PromptTemplate()) \
        -> Instruction:
    """
    Builds the instruction of one masked variable. The correct answer goes to
    a slot drawn uniformly over the ``n_cho`` identifiers and the distractors
    fill the other slots in generation order. Without a choice set the
    instruction offers no choices and the output is the surface form.

    :param inst: The instance
    :param nv: The masked variable
    :param choice_set: The choice set of the variable, or None
    :param cfg: The pipeline configuration
    :param rng: The random generator of the instance
    :param template: The prompt template
    :return: The instruction
    """
    question: str = mask_variable(inst, nv)
    provenance: dict[str, Any] = {'instance_id': inst.instance_id,
                                  'nv_id': nv.nv_id, 'seed': cfg.seed,
                                  'blank_offset': nv.start}
    pair_id: str = f'{inst.instance_id}/{nv.nv_id}'

    if choice_set is None:
        return Instruction(pair_id, question, (), (), nv.surface,
                           InstructionPair(
                               template.render_without_choices(question),
                               nv.surface),
                           provenance)

    if choice_set.nv_ref != nv.nv_id:
        raise ValueError(f'choice set of {choice_set.nv_ref} does not belong '
                         f'to {nv.nv_id}')

    identifiers: tuple[str, ...] = template.identifiers_for(cfg.n_cho)
    answer_slot: int = int(rng.integers(cfg.n_cho))
    distractors = iter(choice_set.distractors)
    choices: tuple[str, ...] = tuple(
        nv.surface if slot == answer_slot
        else format_like(next(distractors), nv.surface)
        for slot in range(cfg.n_cho))
    provenance.update(choice_set.metadata())

    instruction: str = template.render(question, identifiers, choices)
    answer: str = identifiers[answer_slot]
    return Instruction(pair_id, question, identifiers, choices, answer,
                       InstructionPair(instruction, answer), provenance)


def build_instance_instructions(inst: Instance, cfg: PipelineConfig,
                                template: PromptTemplate = PromptTemplate(),
                                with_choices: bool = True) \
        -> list[Instruction]:
    """
    Builds the instructions of every selected variable of one instance, with
    the instance's own random stream derived from the seed and its id.

    :param inst: The instance
    :param cfg: The pipeline configuration
    :param template: The prompt template
    :param with_choices: Whether numeric choices are generated
    :return: The instructions ordered by variable position
    """
    rng: SeededRng = derive_rng(cfg.seed, inst.instance_id)
    instructions: list[Instruction] = []
    for nv in select_variables(inst, cfg, rng):
        choice_set: ChoiceSet | None = make_choice_set(nv, cfg, rng) \
            if with_choices else None
        instructions.append(build_instruction(inst, nv, choice_set, cfg, rng,
                                              template))

    return instructions


def build_dataset(instances: list[Instance], cfg: PipelineConfig,
                  template: PromptTemplate = PromptTemplate(),
                  with_choices: bool = True,
                  jobs: int = 1) -> list[Instruction]:
    """
    Builds the instructions of all selected variables of all instances. The
    result has exactly ``sum(ceil(r_nv * M_t))`` pairs and keeps instance
    order whatever the number of workers.

    :param instances: The selected instances
    :param cfg: The pipeline configuration
    :param template: The prompt template
    :param with_choices: Whether numeric choices are generated
    :param jobs: The number of worker threads
    :return: The instructions
    """
    def build(inst: Instance) -> list[Instruction]:
        return build_instance_instructions(inst, cfg, template, with_choices)

    progress = tqdm(instances, desc='build', unit='instance', disable=None)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            batches = list(executor.map(build, progress))
    else:
        batches = [build(inst) for inst in progress]

    dataset: list[Instruction] = [instruction for batch in batches
                                  for instruction in batch]
    log.info('built %d instruction pairs from %d instances', len(dataset),
             len(instances))
    return dataset
