from __future__ import annotations

import logging
import multiprocessing
import os
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
import tablib
from django.db import transaction

from evaluation.metrics import METRICS, score_clustering
from graphs.loaders import load_graph
from graphs.noise import inject_noise
from graphs.structures import Graph, NoiseLevel, NoiseSpec
from training.config import TrainConfig
from training.services import train

logger = logging.getLogger(__name__)


@dataclass
class MetricsReport:
    dataset: str
    config: dict
    noise: dict
    # {metric: {'mean': ..., 'std': ...}} in percent, two decimals
    metrics: dict
    # the same aggregates as unrounded fractions
    raw: dict
    per_seed: List[dict] = field(default_factory=list)
    degradation: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            'dataset': self.dataset,
            'config': self.config,
            'noise': self.noise,
            'metrics': self.metrics,
            'raw': self.raw,
            'degradation': self.degradation,
            'per_seed': self.per_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'MetricsReport':
        return cls(
            dataset=data.get('dataset', ''),
            config=data.get('config', {}),
            noise=data.get('noise', {}),
            metrics=data['metrics'],
            raw=data.get('raw', {}),
            per_seed=data.get('per_seed', []),
            degradation=data.get('degradation'),
        )


def _init_worker():
    # spawned workers start without a configured Django
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'app.settings')
    import django
    django.setup()


def run_seed(graph: Graph, config: TrainConfig, level: NoiseLevel, seed: int, out_dir=None) -> dict:
    """One run: perturb the graph with this seed's noise sample, train and score."""
    noisy = inject_noise(graph, NoiseSpec(level=level, seed=seed))
    result = train(noisy, replace(config, seed=seed), out_dir=out_dir)
    row = {'seed': seed, 'epochs': len(result.history), 'runtime': round(result.runtime, 3),
           'final_loss': result.history[-1].total if result.history else None}
    if graph.labels is not None:
        row.update(score_clustering(graph.labels, result.labels))
    return row


def _run_seed_args(args):
    return run_seed(*args)


def aggregate(per_seed: List[dict]):
    raw, metrics = {}, {}
    for name in METRICS:
        values = np.array([row[name] for row in per_seed if name in row], dtype=np.float64)
        if not values.size:
            continue
        mean, std = float(values.mean()), float(values.std())
        raw[name] = {'mean': mean, 'std': std}
        metrics[name] = {'mean': round(100 * mean, 2), 'std': round(100 * std, 2)}
    return metrics, raw


def degradation(report, baseline) -> dict:
    """Relative drop of every mean metric against ``baseline``, in percent to one decimal."""
    if isinstance(baseline, dict):
        baseline = MetricsReport.from_dict(baseline)
    drops = {}
    for name, values in report.metrics.items():
        reference = baseline.metrics.get(name, {}).get('mean')
        if reference in (None, 0):
            drops[name] = None
            continue
        drops[name] = round(100.0 * (reference - values['mean']) / abs(reference), 1)
    return drops


def _load(dataset) -> Graph:
    return dataset if isinstance(dataset, Graph) else load_graph(dataset)


def run_experiment(dataset, config: TrainConfig, noise=NoiseLevel.CLEAN, n_seeds: int = 10, *,
                   baseline=None, workers: int = 1, out_dir=None) -> MetricsReport:
    graph = _load(dataset)
    level = NoiseLevel.parse(noise.level if isinstance(noise, NoiseSpec) else noise)
    config = config.for_dataset(graph.name)
    seeds = list(range(n_seeds))
    out_dirs = [Path(out_dir) / ('seed-%d' % seed) if out_dir else None for seed in seeds]
    jobs = [(graph, config, level, seed, path) for seed, path in zip(seeds, out_dirs)]

    logger.info('Experiment on %s: noise %s, %d seed(s), %d worker(s)', graph.name or 'graph', level.value,
                n_seeds, workers)
    if workers > 1 and n_seeds > 1:
        with multiprocessing.Pool(min(workers, n_seeds), initializer=_init_worker) as pool:
            # map keeps seed order, so aggregation does not depend on scheduling
            per_seed = pool.map(_run_seed_args, jobs)
    else:
        per_seed = [_run_seed_args(job) for job in jobs]

    metrics, raw = aggregate(per_seed)
    report = MetricsReport(
        dataset=graph.name,
        config=config.as_dict(),
        noise={'level': level.value, 'ratio': float(level.ratio), 'seeds': seeds},
        metrics=metrics,
        raw=raw,
        per_seed=per_seed,
    )
    if baseline is not None:
        report.degradation = degradation(report, baseline)
    logger.info('Experiment on %s finished: %s', graph.name or 'graph',
                ', '.join('%s %.2f±%.2f' % (name, m['mean'], m['std']) for name, m in metrics.items()))
    return report


def parse_range(text: str) -> List[float]:
    """``start:stop:step`` inclusive of ``stop``, or a comma separated list of values."""
    try:
        if ':' not in text:
            return [float(Decimal(part)) for part in text.split(',') if part.strip()]
        start, stop, step = (Decimal(part) for part in text.split(':'))
    except (InvalidOperation, ValueError):
        raise ValueError('Expected START:STOP:STEP or a list of numbers, got %r' % text) from None
    if step <= 0 or stop < start:
        raise ValueError('Empty range %r' % text)
    values = []
    current = start
    while current <= stop:
        values.append(float(current))
        current += step
    return values


def run_sweep(dataset, config: TrainConfig, sigmas: Iterable[float], noise=NoiseLevel.CLEAN, n_seeds: int = 1,
              *, workers: int = 1) -> dict:
    graph = _load(dataset)
    points = []
    for sigma in sigmas:
        report = run_experiment(graph, replace(config, sigma=sigma), noise, n_seeds, workers=workers)
        points.append({'sigma': sigma, 'metrics': report.metrics, 'raw': report.raw, 'report': report})
    return {
        'dataset': graph.name,
        'noise': NoiseLevel.parse(noise).value,
        'seeds': n_seeds,
        'config': replace(config, sigma=None).as_dict(),
        'points': points,
    }


def sweep_as_dict(sweep: dict) -> dict:
    data = dict(sweep)
    data['points'] = [{key: value for key, value in point.items() if key != 'report'} for point in sweep['points']]
    return data


def sweep_table(sweep: dict) -> tablib.Dataset:
    headers = ['sigma'] + ['%s_%s' % (name, stat) for name in METRICS for stat in ('mean', 'std')]
    table = tablib.Dataset(headers=headers, title='sigma sweep')
    for point in sweep['points']:
        row = [point['sigma']]
        for name in METRICS:
            values = point['metrics'].get(name, {})
            row.extend([values.get('mean'), values.get('std')])
        table.append(row)
    return table


@transaction.atomic
def store_report(report: MetricsReport, variant: str = None):
    from evaluation.models import Experiment, SeedRun

    experiment = Experiment.objects.create(
        dataset=report.dataset,
        noise_level=report.noise.get('level', NoiseLevel.CLEAN.value),
        variant=variant or report.config.get('variant', 'full'),
        sigma=report.config.get('sigma'),
        seeds=len(report.per_seed),
        config=report.config,
        metrics=report.metrics,
        degradation=report.degradation,
    )
    SeedRun.objects.bulk_create([
        SeedRun(
            experiment=experiment,
            seed=row['seed'],
            acc=row.get('acc'),
            nmi=row.get('nmi'),
            ari=row.get('ari'),
            f1=row.get('f1'),
            epochs=row.get('epochs', 0),
            runtime=row.get('runtime', 0.0),
            final_loss=row.get('final_loss'),
        )
        for row in report.per_seed
    ])
    logger.info('Stored experiment %d (%s, noise %s)', experiment.pk, experiment.dataset, experiment.noise_level)
    return experiment
