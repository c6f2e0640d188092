from django.contrib import admin

from evaluation.models import Experiment, SeedRun


class SeedRunInline(admin.TabularInline):
    model = SeedRun
    extra = 0
    readonly_fields = ('seed', 'acc', 'nmi', 'ari', 'f1', 'epochs', 'runtime', 'final_loss')
    can_delete = False


@admin.register(Experiment)
class ExperimentAdmin(admin.ModelAdmin):
    list_display = ('dataset', 'noise_level', 'variant', 'sigma', 'seeds', 'acc', 'nmi', 'ari', 'f1', 'created_at')
    list_filter = ('dataset', 'noise_level', 'variant')
    search_fields = ('dataset',)
    readonly_fields = ('created_at',)
    inlines = [SeedRunInline]

    @admin.display(description='ACC')
    def acc(self, obj):
        return obj.metric_mean('acc')

    @admin.display(description='NMI')
    def nmi(self, obj):
        return obj.metric_mean('nmi')

    @admin.display(description='ARI')
    def ari(self, obj):
        return obj.metric_mean('ari')

    @admin.display(description='F1')
    def f1(self, obj):
        return obj.metric_mean('f1')
