"""Command line options shared by the train, experiment and sweep commands."""
from django.conf import settings

from training.config import FEATURE_NORMS, VARIANTS, AuxMode, TrainConfig


def add_train_arguments(parser, *, sigma=True):
    parser.add_argument('--dataset', required=True, help='Dataset directory (edges.tsv, features.csv, meta.json).')
    if sigma:
        parser.add_argument('--sigma', type=float,
                            help='Fusion weight in [0, 1]. Defaults to the per-dataset value, else %s.'
                                 % getattr(settings, 'RDSA_SIGMA', 0.5))
    parser.add_argument('--alpha', type=float, default=getattr(settings, 'RDSA_ALPHA', 0.2),
                        help='Weight of the auxiliary membership loss.')
    parser.add_argument('--nu', type=float, default=getattr(settings, 'RDSA_NU', 1.0),
                        help='Degrees of freedom of the Student t kernel.')
    parser.add_argument('--epochs', type=int, default=getattr(settings, 'RDSA_EPOCHS', 300))
    parser.add_argument('--lr', type=float, default=getattr(settings, 'RDSA_LEARNING_RATE', 0.001),
                        help='Adam learning rate.')
    parser.add_argument('--batch-size', type=int, help='Nodes per mini-batch; full batch when omitted.')
    parser.add_argument('--aux', default=getattr(settings, 'RDSA_AUX_MODE', 'labels:0.1'),
                        help='Auxiliary subset: labels:F, central[:F] or none.')
    parser.add_argument('--variant', choices=VARIANTS, default='full')
    parser.add_argument('--graph-layer', choices=('sage', 'gcn'), default=getattr(settings, 'RDSA_GRAPH_LAYER', 'sage'))
    hidden_dims = getattr(settings, 'RDSA_HIDDEN_DIMS', (256, 128, 64))
    parser.add_argument('--hidden-dims', default=','.join(map(str, hidden_dims)),
                        help='Comma separated layer widths.')
    parser.add_argument('--feature-norm', choices=FEATURE_NORMS, default=getattr(settings, 'RDSA_FEATURE_NORM', 'l2'))
    parser.add_argument('--dtype', choices=('float32', 'float64'))
    parser.add_argument('--log-metrics', action='store_true', help='Score the clustering after every epoch.')


def config_from_options(options, **overrides) -> TrainConfig:
    values = dict(
        epochs=options['epochs'],
        learning_rate=options['lr'],
        sigma=options.get('sigma'),
        alpha=options['alpha'],
        nu=options['nu'],
        seed=options.get('seed') or 0,
        batch_size=options.get('batch_size'),
        aux_mode=AuxMode.parse(options['aux']),
        hidden_dims=tuple(int(d) for d in str(options['hidden_dims']).split(',') if d.strip()),
        graph_layer=options['graph_layer'],
        variant=options['variant'],
        feature_norm=options['feature_norm'],
        log_metrics=options.get('log_metrics', False),
        dtype=options.get('dtype'),
    )
    values.update(overrides)
    return TrainConfig(**values)
