import time
from datetime import timedelta
from typing import Dict, Optional


class Timer(object):
    def __init__(self, start=False, timer=time):
        """
        Creates a timer for timing verification pipelines.

        :param start: (optional) starts the timer right away.
        :param timer: (optional) an object with a time() method, replaceable
          in tests.
        """
        self.started = None
        self.elapsed_at_stop = None
        self.timer = timer

        if start:
            self.start()

    @property
    def running(self):
        return self.started is not None

    @property
    def elapsed(self) -> Optional[timedelta]:
        """Time between start and stop, or between start and now while the
        timer is still running.
        """
        if self.running:
            return timedelta(seconds=self.timer.time() - self.started)
        else:
            return self.elapsed_at_stop

    @property
    def seconds(self) -> float:
        elapsed = self.elapsed
        return elapsed.total_seconds() if elapsed is not None else 0.0

    def start(self):
        if not self.running:
            self.started = self.timer.time()
        else:
            raise ValueError("Must stop timer before starting.")

    def stop(self):
        if self.running:
            self.elapsed_at_stop = self.elapsed
            self.started = None
        else:
            raise ValueError("Must start timer before stopping.")

        return self.elapsed

    def tic(self):
        self.start()

    def toc(self):
        return self.stop()

    def __enter__(self):
        if not self.running:
            self.start()
        return self

    def __exit__(self, type, value, traceback):
        if self.running:
            self.stop()


class SectionTimes(object):
    """
    Collects named durations for the timing block of a report.

    >>> times = SectionTimes()
    >>> with times.section("verify"):
    ...     pass
    """

    def __init__(self, timer=time):
        self.timer = timer
        self.durations: Dict[str, float] = {}

    def section(self, name: str) -> "_Section":
        return _Section(self, name)

    def as_dict(self) -> Dict[str, float]:
        return {name: round(value, 6) for name, value in sorted(self.durations.items())}


class _Section(object):
    def __init__(self, times: SectionTimes, name: str):
        self.times = times
        self.name = name
        self.inner = Timer(timer=times.timer)

    def __enter__(self):
        self.inner.start()
        return self.inner

    def __exit__(self, type, value, traceback):
        self.inner.stop()
        previous = self.times.durations.get(self.name, 0.0)
        self.times.durations[self.name] = previous + self.inner.seconds
