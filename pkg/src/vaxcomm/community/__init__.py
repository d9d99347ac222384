"""Community detection: Louvain plus size-constrained refinement."""

from .louvain import louvain
from .metrics import modularity, nmi
from .partition import Partition, read_partition_csv, write_partition_csv
from .refine import (
    RefinementConfig,
    RefinementResult,
    community_weights,
    merge_small,
    refine,
    split_large,
)

__all__ = [
    "Partition",
    "RefinementConfig",
    "RefinementResult",
    "community_weights",
    "louvain",
    "merge_small",
    "modularity",
    "nmi",
    "read_partition_csv",
    "refine",
    "split_large",
    "write_partition_csv",
]
