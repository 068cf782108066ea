import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor

from django.conf import settings


def should_propagate_exceptions():
    """Whether detector and backend failures should be re-raised instead of logged.

    :rtype: bool
    """
    return getattr(settings, "CHANNELNET_PROPAGATE_EXCEPTIONS", False)


def snr_reference():
    """Which signal power the SNR is calibrated against: "ensemble" or "realization"."""
    return getattr(settings, "CHANNELNET_SNR_REFERENCE", "ensemble")


def default_threads():
    threads = getattr(settings, "CHANNELNET_THREADS", None)
    if threads is None:
        threads = os.environ.get("CHANNELNET_THREADS", "1")
    return max(1, int(threads))


def ordered_map(function, items, threads=1):
    """Lazily map ``function`` over ``items`` on a thread pool, yielding in input order.

    At most ``2 * threads`` results are in flight, so callers can stream long sequences.
    """
    if threads <= 1:
        yield from map(function, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        for item in items:
            pending.append(pool.submit(function, item))
            if len(pending) >= 2 * threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
