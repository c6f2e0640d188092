from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from app.mixins import RDSACommandMixin
from graphs.converters import READERS
from graphs.loaders import save_graph


class Command(RDSACommandMixin, BaseCommand):
    help = 'Convert a locally downloaded raw dataset (LINQS, npz bundle or OGB raw dir) into a dataset directory.'

    def add_arguments(self, parser):
        parser.add_argument('source', nargs='+',
                            help='linqs: CONTENT CITES; npz: FILE.npz; ogb: dataset root holding raw/.')
        parser.add_argument('destination', help='Dataset directory to write.')
        parser.add_argument('--format', choices=sorted(READERS), required=True)
        parser.add_argument('--name', default='', help='Dataset name stored in meta.json.')
        parser.add_argument('--num-clusters', type=int,
                            help='Override the cluster count inferred from the labels.')
        parser.add_argument('--strict', action='store_true',
                            help='Reject directed input and self-loops instead of symmetrising.')

    def handle(self, *args, **options):
        reader = READERS[options['format']]
        sources = options['source']
        expected = 2 if options['format'] == 'linqs' else 1
        if len(sources) != expected:
            raise CommandError('--format %s expects %d source path(s), got %d' % (
                options['format'], expected, len(sources)), returncode=2)

        name = options['name'] or Path(options['destination']).name
        with self.reporting_errors():
            graph = reader(*sources, name=name, symmetrize=not options['strict'])
            if options.get('num_clusters'):
                graph = type(graph)(
                    num_nodes=graph.num_nodes, edges=graph.edges, features=graph.features,
                    num_clusters=options['num_clusters'], labels=graph.labels, name=graph.name,
                )
            save_graph(graph, options['destination'])

        self.stdout.write(self.style.SUCCESS(
            'Wrote %s: %d nodes, %d edges, %d features, %d clusters' % (
                options['destination'], graph.num_nodes, graph.num_edges, graph.num_features, graph.num_clusters)))
