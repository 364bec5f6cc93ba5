"""Seeded multi-trial training, hidden-unit sweeps, and result emission.

A trial is one full pipeline run: draw a fresh hidden layer from the
trial seed, build the design matrix on the training split, solve for the
output weights, report accuracy on the test split.  A sweep crosses a
hidden-unit grid with one or more activation sets and averages each cell
over n_trials trials seeded base_seed + 0 .. base_seed + n_trials - 1.

Benchmark protocols differ per dataset: satimage and mnist use their
official train/test files (satimage min-max normalized, mnist already
scaled by 1/255 at load), while letter draws a fresh random 13,333/6,667
split per trial, re-normalizing with each trial's training statistics.

Trials may run in parallel; every trial owns its seed, results are
aggregated by trial index, and rows are sorted by configuration before
emission, so reported numbers do not depend on scheduling.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .data import Dataset, SplitSpec, normalize, one_hot, random_split
from .errors import ConfigError
from .network import (ActivationSet, InitScheme, Network, NetworkConfig, OutputWeights,
                      initialize_hidden, mac_count, predict_batch)
from .solver import build_design_matrix, pinv_solve, ridge_solve

CSV_HEADER = "dataset,M,n_activations,activations,solver,lambda,trials,mean_acc,std_acc,macs"

LETTER_TRAIN_COUNT = 13333
LETTER_TEST_COUNT = 6667

# Default hidden-unit grids covering the benchmark operating points.
DEFAULT_GRIDS = {
    "satimage": tuple(range(100, 1001, 100)),
    "letter": tuple(range(200, 3001, 200)),
    "mnist": tuple(range(500, 7001, 500)),
}


@dataclass(frozen=True)
class BenchmarkProtocol:
    """Per-dataset experimental conventions."""

    name: str
    minmax_normalize: bool
    resplit: Optional[Tuple[int, int]]  # per-trial (train, test) counts, or None
    image_shape: Optional[Tuple[int, int]]
    default_init: InitScheme


PROTOCOLS = {
    "satimage": BenchmarkProtocol("satimage", True, None, None, InitScheme.UNIFORM),
    "letter": BenchmarkProtocol("letter", True, (LETTER_TRAIN_COUNT, LETTER_TEST_COUNT),
                                None, InitScheme.UNIFORM),
    "mnist": BenchmarkProtocol("mnist", False, None, (28, 28), InitScheme.SHAPED),
}


@dataclass(frozen=True)
class TrialResult:
    seed: int
    n_hidden: int
    activations: str
    solver: str
    accuracy: float
    train_time_ms: float
    solve_time_ms: float
    mac_count: int


@dataclass(frozen=True)
class SweepRow:
    dataset: str
    n_hidden: int
    n_activations: int
    activations: str
    solver: str
    ridge_lambda: float
    n_trials: int
    mean_accuracy: float
    std_accuracy: float
    mac_count: int


@dataclass(frozen=True)
class SweepResult:
    rows: List[SweepRow]
    trials: List[List[TrialResult]]  # trials[i] backs rows[i], ordered by trial index

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append("%s,%d,%d,%s,%s,%s,%d,%s,%s,%d" % (
                r.dataset, r.n_hidden, r.n_activations, r.activations, r.solver,
                repr(r.ridge_lambda), r.n_trials,
                repr(r.mean_accuracy), repr(r.std_accuracy), r.mac_count))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = []
        for row, trials in zip(self.rows, self.trials):
            entry = asdict(row)
            entry["trials"] = [asdict(t) for t in trials]
            doc.append(entry)
        return json.dumps(doc, indent=2) + "\n"

    def best_row(self) -> SweepRow:
        return max(self.rows, key=lambda r: r.mean_accuracy)


def accuracy(predictions, labels) -> float:
    """Fraction of exact matches."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ConfigError("predictions and labels have different shapes")
    if predictions.size == 0:
        raise ConfigError("cannot compute accuracy of empty inputs")
    return float(np.mean(predictions == labels))


def train_network(config: NetworkConfig, train: Dataset, solver: str = "ridge",
                  target_coding: Tuple[float, float] = (1.0, 0.0)) -> Tuple[Network, float]:
    """Fit output weights on `train`; returns the network and solve time in ms."""
    hidden = initialize_hidden(config)
    H = build_design_matrix(hidden, config.activations, train.X)
    T = one_hot(train.y, train.n_classes, pos=target_coding[0], neg=target_coding[1])
    t0 = time.perf_counter()
    if solver == "ridge":
        output = ridge_solve(H, T, config.ridge_lambda)
    elif solver == "pinv":
        output = pinv_solve(H, T)
    else:
        raise ConfigError("unknown solver %r (expected 'ridge' or 'pinv')" % solver)
    solve_ms = (time.perf_counter() - t0) * 1e3
    return Network(config=config, hidden=hidden, output=output), solve_ms


def run_trial(config: NetworkConfig, train: Dataset, test: Dataset,
              solver: str = "ridge",
              target_coding: Tuple[float, float] = (1.0, 0.0)) -> TrialResult:
    """One train/evaluate cycle; deterministic for a fixed config and seed."""
    if train.n_features != config.n_inputs or test.n_features != config.n_inputs:
        raise ConfigError("dataset has %d features but config expects %d"
                          % (train.n_features, config.n_inputs))
    t0 = time.perf_counter()
    net, solve_ms = train_network(config, train, solver, target_coding)
    train_ms = (time.perf_counter() - t0) * 1e3
    acc = accuracy(predict_batch(net, test.X), test.y)
    return TrialResult(
        seed=config.seed,
        n_hidden=config.n_hidden,
        activations=config.activations.name,
        solver=solver,
        accuracy=acc,
        train_time_ms=train_ms,
        solve_time_ms=solve_ms,
        mac_count=net.mac_count,
    )


def _letter_trial_data(pool: Dataset, split_seed: int) -> Tuple[Dataset, Dataset]:
    spec = SplitSpec(LETTER_TRAIN_COUNT, LETTER_TEST_COUNT, split_seed)
    return normalize(*random_split(pool, spec))


def run_sweep(dataset_name: str,
              train: Optional[Dataset],
              test: Optional[Dataset],
              hidden_grid: Sequence[int],
              activation_sets: Sequence[ActivationSet],
              n_trials: int,
              base_seed: int = 0,
              ridge_lambda: float = 0.01,
              solver: str = "ridge",
              init_scheme: Optional[InitScheme] = None,
              pool: Optional[Dataset] = None,
              threads: int = 1,
              target_coding: Tuple[float, float] = (1.0, 0.0)) -> SweepResult:
    """Cross hidden_grid x activation_sets, n_trials seeded runs per cell.

    For resplitting protocols (letter) pass the full dataset as `pool`;
    otherwise pass fixed `train`/`test` splits, already normalized as the
    protocol requires.  Trial t uses seed base_seed + t for the hidden
    layer and, when resplitting, for the data partition.
    """
    if not hidden_grid:
        raise ConfigError("hidden-unit grid is empty")
    if n_trials < 1:
        raise ConfigError("n_trials must be positive, got %d" % n_trials)
    protocol = PROTOCOLS.get(dataset_name)
    resplit = protocol.resplit if protocol else None
    if resplit and pool is None:
        raise ConfigError("dataset %s needs the full dataset for per-trial splits"
                          % dataset_name)
    if init_scheme is None:
        init_scheme = protocol.default_init if protocol else InitScheme.UNIFORM
    image_shape = protocol.image_shape if protocol else None
    if resplit:
        n_inputs = pool.n_features
        n_classes = pool.n_classes
    else:
        if train is None or test is None:
            raise ConfigError("fixed-split sweep needs train and test datasets")
        n_inputs = train.n_features
        n_classes = train.n_classes

    configs = []
    for acts in activation_sets:
        for m in hidden_grid:
            configs.append((acts, int(m)))

    # plan: one task per (config row, trial index)
    results: List[List[Optional[TrialResult]]] = [[None] * n_trials for _ in configs]

    def run_cell(row: int, trial_idx: int) -> None:
        acts, m = configs[row]
        seed = base_seed + trial_idx
        config = NetworkConfig(
            n_inputs=n_inputs, n_hidden=m, activations=acts,
            ridge_lambda=ridge_lambda, init_scheme=init_scheme,
            image_shape=image_shape, seed=seed)
        if resplit:
            trial_train, trial_test = _letter_trial_data(pool, seed)
        else:
            trial_train, trial_test = train, test
        results[row][trial_idx] = run_trial(config, trial_train, trial_test,
                                            solver, target_coding)

    tasks = [(row, t) for row in range(len(configs)) for t in range(n_trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool_exec:
            futures = [pool_exec.submit(run_cell, row, t) for row, t in tasks]
            for fut in futures:
                fut.result()  # re-raise the first failure
    else:
        for row, t in tasks:
            run_cell(row, t)

    order = sorted(range(len(configs)), key=lambda i: (configs[i][0].name, configs[i][1]))
    rows = []
    trials_out = []
    for i in order:
        acts, m = configs[i]
        cell = results[i]
        accs = np.asarray([t.accuracy for t in cell])
        rows.append(SweepRow(
            dataset=dataset_name,
            n_hidden=m,
            n_activations=len(acts),
            activations=acts.name,
            solver=solver,
            ridge_lambda=ridge_lambda,
            n_trials=n_trials,
            mean_accuracy=float(accs.mean()),
            std_accuracy=float(accs.std()),  # population std
            mac_count=mac_count(n_inputs, m, len(acts), n_classes),
        ))
        trials_out.append(list(cell))
    return SweepResult(rows=rows, trials=trials_out)
