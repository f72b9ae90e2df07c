try:
    from prometheus_client import Counter, Histogram

    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False

    class MetricMock:
        def labels(self, *args, **kwargs):
            return self

        def inc(self, amount=1):
            pass

        def observe(self, amount):
            pass

    Counter = Histogram = lambda *args, **kwargs: MetricMock()  # noqa: E731


class MetricsRegistry:
    cells_completed_total = Counter(
        "lsro_cells_completed_total", "Experiment cells finished", ["strategy", "status"]
    )
    cell_duration_seconds = Histogram(
        "lsro_cell_duration_seconds", "Wall time per experiment cell", ["strategy"]
    )
    train_epochs_total = Counter(
        "lsro_train_epochs_total", "Epochs run by the embedder and GAN loops", ["loop"]
    )


metrics = MetricsRegistry()
