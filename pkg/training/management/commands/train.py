from django.core.management.base import BaseCommand

from app.mixins import RDSACommandMixin
from evaluation.metrics import score_clustering
from graphs.loaders import load_graph
from training.cli import add_train_arguments, config_from_options
from training.services import train


class Command(RDSACommandMixin, BaseCommand):
    help = 'Train the clustering model on one dataset and write history, checkpoint and predictions.'

    def add_arguments(self, parser):
        add_train_arguments(parser)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help='Output directory.')

    def handle(self, *args, **options):
        with self.reporting_errors():
            config = config_from_options(options)
            graph = load_graph(options['dataset'])
            result = train(graph, config, out_dir=options['out'])

        last = result.history[-1]
        self.stdout.write('%d epochs in %.1fs, final loss %.4f (res %.4f, struct %.4f, attr %.4f)' % (
            len(result.history), result.runtime, last.total, last.res, last.struct, last.attr))
        if graph.labels is not None:
            scores = score_clustering(graph.labels, result.labels)
            self.stdout.write('  '.join('%s %.2f' % (name.upper(), 100 * value) for name, value in scores.items()))
        self.stdout.write(self.style.SUCCESS('Wrote %s' % options['out']))
