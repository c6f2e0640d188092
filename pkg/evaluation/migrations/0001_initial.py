# Generated by Django 4.2.3 on 2026-10-17 10:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Experiment',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('dataset', models.CharField(max_length=100)),
                ('noise_level', models.CharField(choices=[('clean', 'clean'), ('I', 'I'), ('II', 'II'), ('III', 'III')], default='clean', max_length=10)),
                ('variant', models.CharField(default='full', max_length=30)),
                ('sigma', models.FloatField(blank=True, null=True)),
                ('seeds', models.PositiveIntegerField(default=0)),
                ('config', models.JSONField(default=dict)),
                ('metrics', models.JSONField(default=dict)),
                ('degradation', models.JSONField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SeedRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('seed', models.PositiveIntegerField()),
                ('acc', models.FloatField(blank=True, null=True)),
                ('nmi', models.FloatField(blank=True, null=True)),
                ('ari', models.FloatField(blank=True, null=True)),
                ('f1', models.FloatField(blank=True, null=True)),
                ('epochs', models.PositiveIntegerField(default=0)),
                ('runtime', models.FloatField(default=0.0)),
                ('final_loss', models.FloatField(blank=True, null=True)),
                ('experiment', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='runs', to='evaluation.experiment')),
            ],
            options={
                'ordering': ['experiment', 'seed'],
                'unique_together': {('experiment', 'seed')},
            },
        ),
    ]
