from django.conf import settings
from django.core.management.base import BaseCommand

from app.mixins import RDSACommandMixin
from evaluation.experiments import parse_range, run_sweep, store_report, sweep_as_dict, sweep_table
from graphs.structures import NoiseLevel
from training.cli import add_train_arguments, config_from_options


class Command(RDSACommandMixin, BaseCommand):
    help = 'Train over a range of fusion weights and report the metrics of every value.'

    def add_arguments(self, parser):
        add_train_arguments(parser, sigma=False)
        parser.add_argument('--sigma', default='0.1:0.9:0.1', help='START:STOP:STEP (inclusive) or a list.')
        parser.add_argument('--noise', default='clean', help='Noise level: clean, 1, 2 or 3.')
        parser.add_argument('--seeds', type=int, default=1)
        parser.add_argument('--workers', type=int, default=1)
        parser.add_argument('--out', required=True, help='Sweep JSON file.')
        parser.add_argument('--csv', help='Also export a table of the sweep to this CSV file.')
        parser.add_argument('--no-store', action='store_true', help='Do not save the reports in the database.')

    def handle(self, *args, **options):
        with self.reporting_errors():
            sigmas = parse_range(options['sigma'])
            config = config_from_options(options, sigma=None)
            level = NoiseLevel.parse(options['noise'])
            sweep = run_sweep(options['dataset'], config, sigmas, level, options['seeds'], workers=options['workers'])
            self.write_json(sweep_as_dict(sweep), options['out'])
            table = sweep_table(sweep)
            if options.get('csv'):
                with open(options['csv'], 'w', newline='') as fh:
                    fh.write(table.export('csv'))
                self.stdout.write(self.style.SUCCESS('Wrote %s' % options['csv']))

        for row in table.dict:
            self.stdout.write('sigma %.2f  ACC %s  NMI %s' % (row['sigma'], row['acc_mean'], row['nmi_mean']))

        if getattr(settings, 'RDSA_STORE_EXPERIMENTS', True) and not options['no_store']:
            for point in sweep['points']:
                store_report(point['report'])
