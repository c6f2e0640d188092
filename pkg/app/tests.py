import logging
import pickle
from io import StringIO

import torch
from django.core import mail
from django.core.management.base import BaseCommand, CommandError
from django.test import SimpleTestCase, override_settings

from app.exceptions import LengthMismatch, TrainingDivergence
from app.log import ExperimentFailureEmailHandler
from app.mixins import RDSACommandMixin
from app.utils import get_device, get_dtype, seed_everything
from clustering.exceptions import DegenerateColumn
from graphs.exceptions import MalformedLine, SelfLoop


class Command(RDSACommandMixin, BaseCommand):
    pass


class CommandMixinTests(SimpleTestCase):
    def run_failing(self, exc):
        with self.assertRaises(CommandError) as ctx:
            with Command().reporting_errors():
                raise exc
        return ctx.exception.returncode

    def test_exit_codes(self):
        self.assertEqual(self.run_failing(LengthMismatch('3 vs 2')), 2)
        self.assertEqual(self.run_failing(TrainingDivergence('nan')), 3)
        self.assertEqual(self.run_failing(ValueError('bad range')), 2)
        self.assertEqual(self.run_failing(FileNotFoundError(2, 'No such file', 'report.json')), 2)

    def test_write_json_to_stdout(self):
        out = StringIO()
        Command(stdout=out).write_json({'acc': 1.0})
        self.assertIn('"acc": 1.0', out.getvalue())


class ErrorPicklingTests(SimpleTestCase):
    def test_errors_with_fields_survive_pickling(self):
        errors = [
            MalformedLine('bad row', line_no=3, path='edges.tsv'),
            SelfLoop('self-loop on node 1'),
            DegenerateColumn([2, 0]),
        ]
        for error in errors:
            copy = pickle.loads(pickle.dumps(error))
            self.assertIs(type(copy), type(error))
            self.assertEqual(str(copy), str(error))
            self.assertEqual(copy.__dict__, error.__dict__)
        self.assertEqual(str(errors[0]), 'edges.tsv:3: bad row')


@override_settings(EMAIL_BACKEND='django.core.mail.backends.locmem.EmailBackend')
class ExperimentFailureEmailHandlerTests(SimpleTestCase):
    def record(self, **extra):
        record = logging.LogRecord('training.services', logging.ERROR, __file__, 1, 'Training of %s diverged',
                                   ('cora',), None)
        record.__dict__.update(extra)
        return record

    @override_settings(RDSA_DEV_EMAILS=['dev@example.com'])
    def test_sends_error_with_diagnostics(self):
        ExperimentFailureEmailHandler().emit(self.record(diagnostics='{"epoch": 4}'))
        self.assertEqual(len(mail.outbox), 1)
        self.assertEqual(mail.outbox[0].subject, 'ERROR: Training of cora diverged')
        self.assertIn('"epoch": 4', mail.outbox[0].body)
        self.assertEqual(mail.outbox[0].to, ['dev@example.com'])

    @override_settings(RDSA_DEV_EMAILS=[])
    def test_silent_without_recipients(self):
        ExperimentFailureEmailHandler().emit(self.record())
        self.assertEqual(len(mail.outbox), 0)


class UtilsTests(SimpleTestCase):
    def test_seed_everything_is_repeatable(self):
        first = (seed_everything(3).random(), torch.rand(1).item())
        second = (seed_everything(3).random(), torch.rand(1).item())
        self.assertEqual(first, second)

    @override_settings(RDSA_DTYPE='float64')
    def test_dtype_from_settings(self):
        self.assertEqual(get_dtype(), torch.float64)
        self.assertEqual(get_dtype('float32'), torch.float32)

    @override_settings(RDSA_DEVICE='cpu')
    def test_device(self):
        self.assertEqual(get_device().type, 'cpu')
