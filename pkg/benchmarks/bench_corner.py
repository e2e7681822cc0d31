"""Timing comparison of the corner-search backends.

Runs the O(F²) exhaustive split search on synthetic banded energy
profiles of increasing axis length, once per backend, and then times
the full ra_transform on a 256x256 spectrogram. Invoke directly:

    python3 benchmarks/bench_corner.py
"""

import time

import numpy as np

from radoppler.linspec import Spectrogram
from radoppler.ra_core import EnergyProfile, corner_backends, find_corners, ra_transform


def banded_profile(length, rng):
    zero = length // 2
    e = rng.uniform(0.1, 10.0, size=length)
    lo = zero - max(2, length // 5)
    hi = zero + max(2, length // 4)
    e[lo : hi + 1] += 50.0
    return EnergyProfile(e=e, zero_index=zero)


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(7)
    backends = corner_backends()
    print(f"backends available: {', '.join(backends)}")
    print()
    header = "axis bins | " + " | ".join(f"{b:>12}" for b in backends)
    print(header)
    print("-" * len(header))
    for length in (128, 256, 512, 1024, 2048):
        profile = banded_profile(length, rng)
        cells = []
        results = {}
        for backend in backends:
            elapsed = time_call(lambda: find_corners(profile, backend=backend))
            results[backend] = find_corners(profile, backend=backend)
            cells.append(f"{elapsed * 1e3:9.2f} ms")
        first = next(iter(results.values()))
        for result in results.values():
            assert (result.f_nc, result.f_pc) == (first.f_nc, first.f_pc)
        print(f"{length:9d} | " + " | ".join(f"{c:>12}" for c in cells))

    print()
    power = rng.uniform(0.5, 1.0, size=(256, 256))
    power[:, 88:169] += 100.0
    spec = Spectrogram(power=power,
                       freq_axis=(np.arange(256) - 128) * (2000.0 / 256),
                       time_axis=np.arange(256) * 0.016,
                       f_max=1000.0)
    for backend in backends:
        elapsed = time_call(lambda: ra_transform(spec, num_filters=64, backend=backend))
        print(f"ra_transform 256x256 M=64 [{backend:>8}]: {elapsed * 1e3:7.2f} ms")


if __name__ == "__main__":
    main()
