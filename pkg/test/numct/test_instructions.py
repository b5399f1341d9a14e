import re
import unittest
from decimal import Decimal

import numpy as np
from parameterized import parameterized

from numforge.common.errors import ConfigError, StaleSpan
from numforge.common.rng import derive_rng
from numforge.corpus.document import CleanDocument, Paragraph
from numforge.numct.choicegen import ChoiceSet, make_choice_set
from numforge.numct.config import PipelineConfig, ceil_ratio
from numforge.numct.extractor import (Instance, extract_instances,
                                      select_instances)
from numforge.numct.instructions import (BLANK, Instruction, PromptTemplate,
                                         build_dataset,
                                         build_instance_instructions,
                                         build_instruction, mask_variable)
from numforge.numeric.lexer import NumericKind, NumericVariable, lex_numerics

_SENTENCES = ('利率为3.5%。', '本金为10000元。', '余额为0元。', '见图3。',
              '同比增长10.1%', '负债减少了-25万元；', '货币是一般等价物。',
              '2020年末广义货币余额为218.68万亿元。')


def _instance(text: str) -> Instance:
    return Instance('doc:0-0', 'doc', (0, 0), text,
                    tuple(nv for nv in lex_numerics(text)
                          if not nv.structural))


def _random_instances(rng: np.random.Generator, cfg: PipelineConfig) \
        -> list[Instance]:
    instances: list[Instance] = []
    for d in range(int(rng.integers(1, 4))):
        texts = [_SENTENCES[int(rng.integers(len(_SENTENCES)))]
                 for _ in range(int(rng.integers(0, 12)))]
        doc = CleanDocument(f'doc{d}', '金融学', tuple(
            Paragraph(index, text) for index, text in enumerate(texts)))
        instances += extract_instances(doc, cfg)

    return instances


class TestMaskVariable(unittest.TestCase):

    """Unit test for the mask_variable function"""

    def test_mask(self):
        inst = _instance('利率为3.5%，本金为100元。')

        actual_result: str = mask_variable(inst, inst.numerics[1])

        self.assertEqual(f'利率为3.5%，本金为{BLANK}元。', actual_result)

    def test_stale_span(self):
        inst = _instance('利率为3.5%。')
        stale = NumericVariable('nv-0', 0, 3, '3.5', NumericKind.FLOAT,
                                Decimal('3.5'))

        self.assertRaises(StaleSpan, mask_variable, inst, stale)


class TestPromptTemplate(unittest.TestCase):

    """Unit test for the PromptTemplate class"""

    def test_render_default(self):
        actual_result: str = PromptTemplate().render(
            f'利率为{BLANK}%。', ('A', 'B'), ('3.5', '3.1'))

        self.assertIn(f'利率为{BLANK}%。\nA. 3.5\nB. 3.1\n答案：',
                      actual_result)

    def test_render_choice_slots(self):
        template = PromptTemplate(text='{question}|{F_2}|{F_1}')

        actual_result: str = template.render('q', ('A', 'B'), ('1', '2'))

        self.assertEqual('q|B. 2|A. 1', actual_result)

    @parameterized.expand([
        ('missing question', {'text': '{choices}'}),
        ('duplicate identifiers', {'identifiers': ('A', 'A')}),
    ])
    def test_invalid(self, _, fields):
        self.assertRaises(ConfigError, PromptTemplate, **fields)

    def test_unknown_placeholder(self):
        template = PromptTemplate(text='{question} {answer}')

        self.assertRaises(ConfigError, template.render, 'q', ('A',), ('1',))

    def test_too_few_identifiers(self):
        self.assertRaises(ConfigError, PromptTemplate().identifiers_for, 5)


class TestBuildInstruction(unittest.TestCase):

    """Unit test for the build_instruction function"""

    _TEXT = '年利率为3.5%，则利息为350元。'

    def _choice_set(self, inst: Instance) -> ChoiceSet:
        return ChoiceSet(inst.numerics[1].nv_id, Decimal(350),
                         (Decimal(120), Decimal(-80), Decimal(999)),
                         NumericKind.INTEGER)

    def test_choices(self):
        inst = _instance(self._TEXT)
        nv = inst.numerics[1]

        actual_result: Instruction = build_instruction(
            inst, nv, self._choice_set(inst), PipelineConfig(),
            derive_rng(0, 'choices'))

        self.assertEqual(('A', 'B', 'C', 'D'), actual_result.identifiers)
        self.assertEqual('350', actual_result.answer_text())
        self.assertEqual(actual_result.answer_identifier,
                         actual_result.pair.output)
        self.assertEqual(['-80', '120', '350', '999'],
                         sorted(actual_result.choices, key=int))
        self.assertIn(f'{actual_result.answer_identifier}. 350',
                      actual_result.pair.instruction)

    def test_distractors_keep_generation_order(self):
        inst = _instance(self._TEXT)

        actual_result: Instruction = build_instruction(
            inst, inst.numerics[1], self._choice_set(inst), PipelineConfig(),
            derive_rng(0, 'order'))

        self.assertEqual(('120', '-80', '999'),
                         tuple(choice for choice in actual_result.choices
                               if choice != '350'))

    def test_without_choices(self):
        inst = _instance(self._TEXT)

        actual_result: Instruction = build_instruction(
            inst, inst.numerics[0], None, PipelineConfig(),
            derive_rng(0, 'plain'))

        self.assertEqual((), actual_result.choices)
        self.assertEqual('3.5', actual_result.pair.output)
        self.assertNotIn('A. ', actual_result.pair.instruction)
        self.assertEqual(self._TEXT, actual_result.restore())

    @parameterized.expand([
        ('zero padded month', 1, r'-?[0-9]{2}'),
        ('zero padded day', 2, r'-?[0-9]{2}'),
        ('explicit sign', 3, r'[+-][0-9]+'),
    ])
    def test_choices_share_surface_style(self, _, index, pattern):
        inst = _instance('该债券于2020-05-01发行，'
                         '票面利率为+5%。')
        nv = inst.numerics[index]
        cfg = PipelineConfig(n_cho=3, s=2)

        for seed in range(50):
            rng = derive_rng(seed, 'surface-style')
            actual_result: Instruction = build_instruction(
                inst, nv, make_choice_set(nv, cfg, rng), cfg, rng)

            self.assertIn(nv.surface, actual_result.choices)
            self.assertTrue(all(re.fullmatch(pattern, choice)
                                for choice in actual_result.choices))

    def test_foreign_choice_set(self):
        inst = _instance(self._TEXT)

        self.assertRaises(ValueError, build_instruction, inst,
                          inst.numerics[0], self._choice_set(inst),
                          PipelineConfig(), derive_rng(0))

    def test_answer_slot_uniform(self):
        inst = _instance(self._TEXT)
        choice_set = self._choice_set(inst)
        rng = derive_rng(9, 'answer-slots')
        counts = dict.fromkeys('ABCD', 0)

        for _ in range(10000):
            instruction = build_instruction(inst, inst.numerics[1],
                                            choice_set, PipelineConfig(), rng)
            counts[instruction.answer_identifier] += 1

        shares = [count / 10000 for count in counts.values()]
        actual_result: float = sum((count - 2500) ** 2 / 2500
                                   for count in counts.values())
        self.assertTrue(all(abs(share - 0.25) <= 0.02 for share in shares))
        self.assertLess(actual_result, 16.27)


class TestBuildDataset(unittest.TestCase):

    """Unit test for the build_dataset function"""

    def test_restores_source_text(self):
        cfg = PipelineConfig(n_min=1, n_max=3, r_nv=1.0)
        rng = derive_rng(4, 'restore')
        checked = 0

        while checked < 1000:
            for inst in _random_instances(rng, cfg):
                for instruction in build_instance_instructions(inst, cfg):
                    actual_result: str = instruction.restore()

                    self.assertEqual(1, instruction.question.count(BLANK))
                    self.assertEqual(inst.text, actual_result)
                    checked += 1

    def test_restore_matches_instance(self):
        cfg = PipelineConfig(n_min=1, n_max=3, r_nv=1.0)
        inst = _instance('利率为3.5%，本金为10000元；'
                         '余额为0元。')

        actual_result = [instruction.restore() for instruction
                         in build_instance_instructions(inst, cfg)]

        self.assertEqual([inst.text] * 3, actual_result)

    def test_cardinality(self):
        cfg = PipelineConfig(n_min=1, n_max=3, r_ins=0.5, r_nv=0.3)
        rng = derive_rng(8, 'cardinality')

        for _ in range(1000):
            instances = _random_instances(rng, cfg)
            selected = select_instances(instances, cfg, rng)

            actual_result = build_dataset(selected, cfg)

            self.assertEqual(ceil_ratio(cfg.r_ins, len(instances)),
                             len(selected))
            self.assertEqual(sum(ceil_ratio(cfg.r_nv, len(inst.numerics))
                                 for inst in selected),
                             len(actual_result))

    def test_same_for_any_number_of_workers(self):
        cfg = PipelineConfig(n_min=1, n_max=3, r_nv=0.5)
        instances = _random_instances(derive_rng(6, 'workers'), cfg) \
            + _random_instances(derive_rng(7, 'workers'), cfg)
        expected = [instruction.to_dict()
                    for instruction in build_dataset(instances, cfg, jobs=1)]

        actual_result = [instruction.to_dict() for instruction
                         in build_dataset(instances, cfg, jobs=4)]

        self.assertEqual(expected, actual_result)

    def test_seed_changes_dataset(self):
        inst = _instance('本金为10000元，余额为2500元。')
        expected = [instruction.to_dict() for instruction in build_dataset(
            [inst], PipelineConfig(r_nv=1.0, seed=1))]

        actual_result = [instruction.to_dict() for instruction in
                         build_dataset([inst],
                                       PipelineConfig(r_nv=1.0, seed=2))]

        self.assertNotEqual(expected, actual_result)

    def test_without_choices(self):
        inst = _instance('本金为10000元，余额为2500元。')

        actual_result = build_dataset([inst], PipelineConfig(r_nv=1.0),
                                      with_choices=False)

        self.assertEqual(['10000', '2500'],
                         [instruction.pair.output
                          for instruction in actual_result])
