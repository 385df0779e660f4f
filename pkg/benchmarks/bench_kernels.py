"""Benchmark the compiled kernels against the numpy fallback.

Times the fused gradient kernel, the Adam update, and a full training run
at a full-scale shape and a desk-scale shape.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from assort import fnn
from assort.kernels import numpy_backend

try:
    from assort.kernels import _ckernels
except ImportError:
    _ckernels = None

SHAPES = {
    "full-scale": dict(n=512, d=796, h=256),
    "desk-scale": dict(n=360, d=92, h=64),
}


def problem(n, d, h, seed=0):
    rng = np.random.default_rng(seed)
    X = np.ascontiguousarray(rng.normal(size=(n, d)))
    y = (rng.random(n) > 0.5).astype(float)
    w = np.ones(n)
    W1 = np.ascontiguousarray(rng.normal(size=(h, d)) * 0.05)
    b1 = np.zeros(h)
    W2 = rng.normal(size=h) * 0.05
    return X, y, w, W1, b1, W2, 0.0


def best_of(repeats, fn):
    times = []
    fn()  # warmup
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_gradients(backend, args_tuple, repeats):
    X, y, w, W1, b1, W2, b2 = args_tuple
    return best_of(repeats, lambda: backend.batch_gradients(X, y, w, W1, b1, W2, b2))


def bench_adam(backend, size, repeats):
    rng = np.random.default_rng(1)
    p = rng.normal(size=size)
    g = rng.normal(size=size)
    m = np.zeros(size)
    v = np.zeros(size)
    return best_of(repeats, lambda: backend.adam_step(p, g, m, v, 3, 1e-3, 0.9, 0.999, 1e-8))


def bench_train(backend_module, n, d, h, repeats):
    rng = np.random.default_rng(2)
    X = rng.normal(size=(n, d))
    y = (X[:, 0] > 0).astype(float)
    dataset = list(zip(X, y))
    config = fnn.TrainConfig(learning_rate=1e-3, epochs=20, hidden_width=h,
                             batch_size=min(512, n), seed=0)
    model = fnn.init_fnn(0, d, h)
    original = fnn.kernels
    fnn.kernels = backend_module
    try:
        return best_of(repeats, lambda: fnn.train(model, dataset, config))
    finally:
        fnn.kernels = original


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return

    print(f"{'benchmark':<34} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    print("-" * 66)
    for shape_name, shape in SHAPES.items():
        args_tuple = problem(**shape)
        t_np = bench_gradients(numpy_backend, args_tuple, args.repeats)
        t_c = bench_gradients(_ckernels, args_tuple, args.repeats)
        label = f"batch_gradients {shape_name} {tuple(shape.values())}"
        print(f"{label:<34} {t_np * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_np / t_c:>7.2f}x")

    size = 796 * 256
    t_np = bench_adam(numpy_backend, size, args.repeats)
    t_c = bench_adam(_ckernels, size, args.repeats)
    label = f"adam_step ({size} params)"
    print(f"{label:<34} {t_np * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_np / t_c:>7.2f}x")

    for shape_name, shape in SHAPES.items():
        t_np = bench_train(numpy_backend, repeats=max(1, args.repeats // 2), **shape)
        t_c = bench_train(_ckernels, repeats=max(1, args.repeats // 2), **shape)
        label = f"train 20 epochs {shape_name}"
        print(f"{label:<34} {t_np * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_np / t_c:>7.2f}x")


if __name__ == "__main__":
    main()
