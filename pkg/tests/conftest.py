"""Shared fixtures: corpora, trained models, and real-data discovery.

The public KDD99 10% file is used when it can be found (KDD99_DATA
environment variable, or data/kddcup.data_10_percent[.gz] under the repo
root); tests that need it skip with a pointer otherwise. A deterministic
surrogate corpus in the same wire format backs the always-on tests.
"""

import os
import time
from dataclasses import dataclass

import numpy as np
import pytest

from idpskit.ingest import Dataset, load_dataset
from idpskit.metrics import evaluate
from idpskit.mlp import (
    NetworkLayout,
    TrainConfig,
    init_network,
    train,
)
from idpskit.preprocessing import SplitSpec, fit_scaler, split_dataset
from idpskit.schema import N_CLASSES, default_schema, default_taxonomy
from idpskit.simulate import write_corpus

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

_KDD99_CANDIDATES = (
    os.path.join(REPO_ROOT, "data", "kddcup.data_10_percent"),
    os.path.join(REPO_ROOT, "data", "kddcup.data_10_percent.gz"),
    os.path.join(REPO_ROOT, "data", "kddcup.data_10_percent_corrected"),
)

DESK_SAMPLE_SIZE = 50_000
DESK_SEED = 42


def find_kdd99_file():
    env = os.environ.get("KDD99_DATA")
    if env:
        return env
    for path in _KDD99_CANDIDATES:
        if os.path.exists(path):
            return path
    return None


def require_kdd99_file():
    path = find_kdd99_file()
    if path is None:
        pytest.skip(
            "public KDD99 10% file not found; set KDD99_DATA or place "
            "kddcup.data_10_percent under data/"
        )
    return path


def stratified_sample(dataset: Dataset, n: int, seed: int) -> Dataset:
    """Class-proportional subsample by largest remainder, deterministic."""
    rng = np.random.default_rng(seed)
    counts = dataset.class_counts(N_CLASSES)
    total = len(dataset)
    exact = counts * n / total
    take = np.floor(exact).astype(np.int64)
    remainder = exact - take
    short = n - int(take.sum())
    for c in np.argsort(-remainder)[:short]:
        take[c] += 1
    picks = []
    for c in range(N_CLASSES):
        if take[c] == 0:
            continue
        members = np.flatnonzero(dataset.y == c)
        take_c = min(int(take[c]), len(members))
        picks.append(rng.choice(members, size=take_c, replace=False))
    idx = np.sort(np.concatenate(picks))
    return Dataset(X=dataset.X[idx], y=dataset.y[idx])


@dataclass
class DeskRun:
    """A full desk-scale pipeline result shared across acceptance tests."""

    scaler: object
    network: object
    history: object
    train_scaled: Dataset
    val_scaled: Dataset
    test_scaled: Dataset
    test_report: object
    train_seconds: float


def _desk_pipeline(dataset: Dataset) -> DeskRun:
    spec = SplitSpec(0.70, 0.15, 0.15, seed=DESK_SEED)
    train_p, val_p, test_p = split_dataset(dataset, spec)
    scaler = fit_scaler(train_p)
    train_s = Dataset(scaler.transform(train_p.X), train_p.y)
    val_s = Dataset(scaler.transform(val_p.X), val_p.y)
    test_s = Dataset(scaler.transform(test_p.X), test_p.y)
    net0 = init_network(NetworkLayout(41, (20,), N_CLASSES), seed=DESK_SEED)
    start = time.time()
    net, history = train(net0, train_s, val_s, TrainConfig(seed=DESK_SEED))
    train_seconds = time.time() - start
    report = evaluate(net, test_s, N_CLASSES)
    return DeskRun(
        scaler=scaler, network=net, history=history,
        train_scaled=train_s, val_scaled=val_s, test_scaled=test_s,
        test_report=report, train_seconds=train_seconds,
    )


@pytest.fixture(scope="session")
def surrogate_corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "surrogate_desk.txt"
    write_corpus(path, DESK_SAMPLE_SIZE, seed=7)
    return str(path)


@pytest.fixture(scope="session")
def surrogate_desk_run(surrogate_corpus_path):
    """Desk-scale run at spec-default training config on the surrogate."""
    schema, taxonomy = default_schema(), default_taxonomy()
    dataset = load_dataset(surrogate_corpus_path, schema, taxonomy)
    return _desk_pipeline(dataset)


@pytest.fixture(scope="session")
def kdd_desk_run():
    """Desk-scale run on a stratified 50k sample of the public 10% file."""
    path = require_kdd99_file()
    schema, taxonomy = default_schema(), default_taxonomy()
    dataset = load_dataset(path, schema, taxonomy)
    sample = stratified_sample(dataset, DESK_SAMPLE_SIZE, seed=DESK_SEED)
    return _desk_pipeline(sample)


@pytest.fixture()
def tiny_corpus(tmp_path):
    path = tmp_path / "tiny.txt"
    write_corpus(path, 400, seed=5)
    return str(path)
