"""
Solver metrics.

Counts LP solves and simplex pivots and records solve durations. Uses a
private prometheus-client registry when the package is installed; the
in-memory counters are always kept so tests and the CLI can read them back.
"""

import logging
import time
from collections import defaultdict, deque
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Deque, Dict, Iterator, Optional, Union

try:
    from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile
    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False

logger = logging.getLogger(__name__)


class MetricsCollector:
    """Collects solver metrics for one process."""

    def __init__(self, enabled: bool = True, history: int = 1000):
        self.enabled = enabled
        self.counters: Dict[str, float] = defaultdict(float)
        # recent solve durations only; counters keep the totals
        self.durations: Dict[str, Deque[float]] = defaultdict(lambda: deque(maxlen=history))
        self.registry = None

        if PROMETHEUS_AVAILABLE and enabled:
            self.registry = CollectorRegistry()
            self._init_prometheus_metrics()

    def _init_prometheus_metrics(self) -> None:
        self.prom_lp_solves = Counter(
            "ergopt_lp_solves_total",
            "Total LP solves",
            ["mode", "status"],
            registry=self.registry,
        )
        self.prom_pivots = Counter(
            "ergopt_simplex_pivots_total",
            "Total simplex pivots",
            registry=self.registry,
        )
        self.prom_duration = Histogram(
            "ergopt_lp_solve_duration_seconds",
            "LP solve duration in seconds",
            ["mode"],
            registry=self.registry,
        )

    def record_solve(self, mode: str, status: str, duration: float, pivots: int = 0) -> None:
        if not self.enabled:
            return
        self.counters[f"lp_solves:mode={mode},status={status}"] += 1
        self.counters["simplex_pivots"] += pivots
        self.durations[f"lp_solve:mode={mode}"].append(duration)

        if self.registry is not None:
            self.prom_lp_solves.labels(mode=mode, status=status).inc()
            self.prom_pivots.inc(pivots)
            self.prom_duration.labels(mode=mode).observe(duration)

    @contextmanager
    def time_solve(self, mode: str) -> Iterator[Dict[str, Any]]:
        """Time a solve; the caller fills in "status" and "pivots"."""
        outcome: Dict[str, Any] = {"status": "error", "pivots": 0}
        start = time.perf_counter()
        try:
            yield outcome
        finally:
            self.record_solve(mode, outcome["status"], time.perf_counter() - start, outcome["pivots"])

    def total_solves(self) -> int:
        return int(sum(v for k, v in self.counters.items() if k.startswith("lp_solves:")))

    def get_metrics_summary(self) -> Dict[str, Any]:
        summary: Dict[str, Any] = {"counters": dict(sorted(self.counters.items()))}
        for name, values in sorted(self.durations.items()):
            summary[name] = {
                "count": len(values),
                "sum": sum(values),
                "max": max(values),
            }
        return summary

    def export_prometheus(self, path: Union[str, Path]) -> bool:
        """Write the text exposition to path; False without prometheus-client."""
        if self.registry is None:
            logger.warning("prometheus-client not installed; metrics file not written")
            return False
        write_to_textfile(str(path), self.registry)
        return True

    def reset_metrics(self) -> None:
        self.counters.clear()
        self.durations.clear()
        if self.registry is not None:
            self.registry = CollectorRegistry()
            self._init_prometheus_metrics()


_collector: Optional[MetricsCollector] = None


def get_collector() -> MetricsCollector:
    global _collector
    if _collector is None:
        _collector = MetricsCollector()
    return _collector
