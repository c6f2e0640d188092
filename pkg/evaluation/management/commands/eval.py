from django.core.management.base import BaseCommand

from app.mixins import RDSACommandMixin
from evaluation.metrics import score_clustering
from graphs.loaders import load_labels


class Command(RDSACommandMixin, BaseCommand):
    help = 'Score predicted cluster labels against ground truth and print ACC, NMI, ARI and F1 as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('--pred', required=True, help='Predicted labels, one integer per line.')
        parser.add_argument('--truth', required=True, help='Ground-truth labels, one integer per line.')

    def handle(self, *args, **options):
        with self.reporting_errors():
            scores = score_clustering(load_labels(options['truth']), load_labels(options['pred']))
        self.write_json(scores)
