"""Prepares token and label sequences for instruction fine-tuning and for
continual pre-training."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from numforge.common.tokenizer import Tokenizer
from numforge.corpus.document import CleanDocument
from numforge.numct.instructions import InstructionPair

# label of a position that takes no part in the loss; token ids are >= 0
IGNORE_INDEX: int = -100

DEFAULT_BLOCK_SIZE: int = 512


@dataclass(frozen=True)
class TrainingExample:
    """
    A token sequence with its aligned labels. The first
    ``instruction_length`` positions hold the instruction and are labelled
    :data:`IGNORE_INDEX`; the rest hold the output and are labelled with
    their own token ids. ``window`` is the context window size k.
    """

    tokens: tuple[int, ...]
    labels: tuple[int, ...]
    window: int
    instruction_length: int = 0

    @property
    def output_length(self) -> int:
        """Returns the number of supervised positions."""
        return len(self.tokens) - self.instruction_length

    def conditioning_window(self, i: int) -> tuple[int, ...]:
        """
        Returns the tokens the i-th output token (1-based) is predicted from.
        While ``i <= k`` the window reaches back into the instruction tail and
        covers the earlier outputs; beyond that it covers the k previous
        outputs only. A window larger than the prefix is the whole prefix.

        :param i: The 1-based output position
        :return: The conditioning token ids in order
        """
        if not 1 <= i <= self.output_length:
            raise ValueError(f'output position {i} is outside '
                             f'[1, {self.output_length}]')

        position: int = self.instruction_length + i - 1
        return self.tokens[max(0, position - self.window):position]

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON Lines record of the example."""
        return {'tokens': list(self.tokens), 'labels': list(self.labels),
                'window_k': self.window}


def make_training_example(pair: InstructionPair, tokenizer: Tokenizer,
                          window_k: int) -> TrainingExample:
    """
    Tokenizes the instruction, then the output, and masks the loss on every
    instruction token.

    :param pair: The instruction-output pair
    :param tokenizer: The tokenizer
    :param window_k: The context window size, at least one
    :return: The training example
    """
    if window_k < 1:
        raise ValueError('the context window must be at least one token')

    instruction: list[int] = tokenizer.encode(pair.instruction)
    output: list[int] = tokenizer.encode(pair.output)
    return TrainingExample(tokens=tuple(instruction + output),
                           labels=tuple([IGNORE_INDEX] * len(instruction)
                                        + output),
                           window=window_k,
                           instruction_length=len(instruction))


def pretraining_blocks(docs: list[CleanDocument], tokenizer: Tokenizer,
                       block_size: int = DEFAULT_BLOCK_SIZE) \
        -> list[TrainingExample]:
    """
    Cuts the corpus into consecutive next-token prediction blocks. Documents
    are taken in order with their paragraphs joined by newlines; every
    position is supervised and the last block may be shorter.

    :param docs: The clean documents
    :param tokenizer: The tokenizer
    :param block_size: The number of tokens per block
    :return: The training blocks
    """
    if block_size < 1:
        raise ValueError('the block size must be at least one token')

    stream: list[int] = []
    for doc in docs:
        stream += tokenizer.encode('\n'.join(paragraph.text
                                             for paragraph in doc.paragraphs))

    return [TrainingExample(tokens=tuple(stream[i:i + block_size]),
                            labels=tuple(stream[i:i + block_size]),
                            window=block_size)
            for i in range(0, len(stream), block_size)]
