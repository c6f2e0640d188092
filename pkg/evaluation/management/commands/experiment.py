import json
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from app.mixins import RDSACommandMixin
from evaluation.experiments import run_experiment, store_report
from graphs.exceptions import MissingFile
from graphs.structures import NoiseLevel
from training.cli import add_train_arguments, config_from_options


class Command(RDSACommandMixin, BaseCommand):
    help = 'Train over several seeds, optionally on a noisy copy of the graph, and write an aggregated report.'

    def add_arguments(self, parser):
        add_train_arguments(parser)
        parser.add_argument('--noise', default='clean', help='Noise level: clean, 1, 2 or 3.')
        parser.add_argument('--seeds', type=int, default=10, help='Number of seeds (0..N-1).')
        parser.add_argument('--out', required=True, help='Report JSON file.')
        parser.add_argument('--baseline', help='Clean-run report used to compute the degradation.')
        parser.add_argument('--workers', type=int, default=1, help='Worker processes, one seed each.')
        parser.add_argument('--runs-dir', help='Keep per-seed training outputs under this directory.')
        parser.add_argument('--no-store', action='store_true', help='Do not save the report in the database.')

    def handle(self, *args, **options):
        with self.reporting_errors():
            config = config_from_options(options)
            level = NoiseLevel.parse(options['noise'])
            if options['seeds'] < 1:
                raise ValueError('--seeds must be at least 1')
            baseline = None
            if options.get('baseline'):
                path = Path(options['baseline'])
                if not path.is_file():
                    raise MissingFile('Baseline report %s does not exist' % path)
                baseline = json.loads(path.read_text())
            report = run_experiment(options['dataset'], config, level, options['seeds'], baseline=baseline,
                                    workers=options['workers'], out_dir=options.get('runs_dir'))
            self.write_json(report.as_dict(), options['out'])

        for name, values in report.metrics.items():
            drop = (report.degradation or {}).get(name)
            suffix = ' (%+.1f%%)' % -drop if drop is not None else ''
            self.stdout.write('%-4s %6.2f ± %.2f%s' % (name.upper(), values['mean'], values['std'], suffix))

        if getattr(settings, 'RDSA_STORE_EXPERIMENTS', True) and not options['no_store']:
            experiment = store_report(report)
            self.stdout.write('Stored as experiment #%d' % experiment.pk)
