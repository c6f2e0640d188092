from django.core.management.base import BaseCommand

from app.mixins import RDSACommandMixin
from graphs.loaders import load_graph, statistics_table


class Command(RDSACommandMixin, BaseCommand):
    help = 'Print nodes, edges, features and clusters of one or more dataset directories.'

    def add_arguments(self, parser):
        parser.add_argument('datasets', nargs='+', help='Dataset directories.')
        parser.add_argument('--csv', help='Also export the table to this CSV file.')

    def handle(self, *args, **options):
        with self.reporting_errors():
            table = statistics_table(load_graph(path) for path in options['datasets'])

        widths = [max(len(str(value)) for value in [header] + list(table.get_col(index)))
                  for index, header in enumerate(table.headers)]
        self.stdout.write('  '.join(header.ljust(width) for header, width in zip(table.headers, widths)))
        for row in table:
            self.stdout.write('  '.join(str(value).ljust(width) for value, width in zip(row, widths)))

        if options.get('csv'):
            with self.reporting_errors(), open(options['csv'], 'w', newline='') as fh:
                fh.write(table.export('csv'))
            self.stdout.write(self.style.SUCCESS('Wrote %s' % options['csv']))
