"""Deterministic k-fold partitioning of sample ids."""

import logging
from typing import List, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold

from ..errors import UsageError

logger = logging.getLogger(__name__)

Split = Tuple[List[str], List[str]]


def kfold_split(sample_ids: Sequence[str], k: int, seed: int = 0) -> List[Split]:
    """Shuffle ``sample_ids`` with ``seed`` and cut them into ``k`` validation folds.

    Returns:
        One (train_ids, val_ids) pair per fold; validation sets are disjoint, cover every
        id and differ in size by at most one

    Raises:
        UsageError: If k < 2 or k exceeds the number of samples
    """
    ids = list(sample_ids)
    if len(set(ids)) != len(ids):
        raise UsageError("sample ids must be unique for k-fold splitting")
    if k < 2:
        raise UsageError(f"k-fold needs k >= 2, got {k}")
    if k > len(ids):
        raise UsageError(f"cannot split {len(ids)} samples into {k} folds")

    splitter = KFold(n_splits=k, shuffle=True, random_state=seed % 2**32)
    splits = []
    for fold, (train_idx, val_idx) in enumerate(splitter.split(np.arange(len(ids)))):
        train_ids = [ids[i] for i in train_idx]
        val_ids = [ids[i] for i in val_idx]
        logger.debug("fold %d: %d train / %d val", fold, len(train_ids), len(val_ids))
        splits.append((train_ids, val_ids))
    return splits
