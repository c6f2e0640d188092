from django.db import models

from graphs.structures import NoiseLevel


class Experiment(models.Model):
    NOISE_LEVELS = [(level.value, level.value) for level in NoiseLevel]

    dataset = models.CharField(max_length=100)
    noise_level = models.CharField(max_length=10, choices=NOISE_LEVELS, default=NoiseLevel.CLEAN.value)
    variant = models.CharField(max_length=30, default='full')
    sigma = models.FloatField(null=True, blank=True)
    seeds = models.PositiveIntegerField(default=0)
    config = models.JSONField(default=dict)
    metrics = models.JSONField(default=dict)
    degradation = models.JSONField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return '%s / %s / %s' % (self.dataset, self.noise_level, self.variant)

    def metric_mean(self, name):
        return (self.metrics.get(name) or {}).get('mean')


class SeedRun(models.Model):
    experiment = models.ForeignKey(Experiment, on_delete=models.CASCADE, related_name='runs')
    seed = models.PositiveIntegerField()
    acc = models.FloatField(null=True, blank=True)
    nmi = models.FloatField(null=True, blank=True)
    ari = models.FloatField(null=True, blank=True)
    f1 = models.FloatField(null=True, blank=True)
    epochs = models.PositiveIntegerField(default=0)
    runtime = models.FloatField(default=0.0)
    final_loss = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['experiment', 'seed']
        unique_together = [('experiment', 'seed')]

    def __str__(self):
        return '%s seed %d' % (self.experiment, self.seed)
