"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Kernel timings run both implementations in one process. The end-to-end
row trains the default model in a subprocess per backend, because the
backend is fixed at import time by ANPSO_FIS_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from anpso_fis import _kernels as K
from anpso_fis import tuner
from anpso_fis.data import load_bupa, normalize

TRAIN_SNIPPET = """
import time
from anpso_fis import anfis, tuner, data, _kernels
ds = data.normalize(data.load_bupa())
g = tuner.default_genome()
anfis.train(tuner.init_consequents(tuner.decode(g), ds.targets), ds, anfis.TrainConfig(epochs=2))
t = time.perf_counter()
for _ in range({n}):
    anfis.train(tuner.init_consequents(tuner.decode(g), ds.targets), ds, anfis.TrainConfig(epochs=100))
print(_kernels.BACKEND, (time.perf_counter() - t) / {n})
"""


def random_model(rng):
    return tuner.decode(rng.random(tuner.GENOME_LENGTH))


def kernel_rows(repeat):
    rng = np.random.default_rng(0)
    X = normalize(load_bupa()).features
    model = random_model(rng)
    while model.n_rules < 8:
        model = random_model(rng)
    args = (X, model.kinds, model.params, model.n_mf)
    mu, dmu = K.membership_grad_numpy(*args)
    w = K.firing_numpy(mu, model.antecedents)
    g_w = rng.standard_normal(w.shape)
    cases = {
        "membership": (K.membership_numpy, K.membership_numba, args),
        "membership_grad": (K.membership_grad_numpy, K.membership_grad_numba, args),
        "firing": (K.firing_numpy, K.firing_numba, (mu, model.antecedents)),
        "premise_grad": (K.premise_grad_numpy, K.premise_grad_numba, (mu, dmu, model.antecedents, g_w)),
    }
    rows = []
    for name, (f_np, f_nb, a) in cases.items():
        f_nb(*a)  # compile
        t_np = min(timeit.repeat(lambda: f_np(*a), number=repeat, repeat=3)) / repeat
        t_nb = min(timeit.repeat(lambda: f_nb(*a), number=repeat, repeat=3)) / repeat
        rows.append((name, t_np, t_nb))
    return rows


def train_time(flag, n):
    env = dict(os.environ, ANPSO_FIS_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", TRAIN_SNIPPET.format(n=n)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.split()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--train-runs", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    print(f"{'kernel':<18}{'numpy (us)':>12}{'numba (us)':>12}{'speedup':>9}")
    for name, t_np, t_nb in kernel_rows(args.repeat):
        print(f"{name:<18}{t_np * 1e6:>12.1f}{t_nb * 1e6:>12.1f}{t_np / t_nb:>8.1f}x")
    t_np = train_time("0", args.train_runs)
    t_nb = train_time("1", args.train_runs)
    print(f"{'train 100 epochs':<18}{t_np * 1e6:>12.0f}{t_nb * 1e6:>12.0f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
