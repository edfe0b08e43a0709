import random
from typing import Callable, Dict, List, Optional, Tuple

import pytest

from py_causal_paths.model import TemporalLinkSequence

# two instances of a->b->c, one of b->c->d
TOY_RECORDS: List[Tuple[str, str, int]] = [
    ("a", "b", 1),
    ("a", "b", 2),
    ("b", "a", 3),
    ("b", "c", 3),
    ("d", "c", 3),
    ("d", "c", 4),
    ("c", "d", 5),
    ("c", "b", 6),
    ("b", "c", 7),
]

# delta=2, K=2
TOY_COUNTS: Dict[Tuple[str, ...], int] = {
    ("a", "b"): 2,
    ("b", "a"): 1,
    ("b", "c"): 2,
    ("d", "c"): 2,
    ("c", "d"): 1,
    ("c", "b"): 1,
    ("a", "b", "a"): 2,
    ("a", "b", "c"): 2,
    ("b", "c", "d"): 1,
    ("d", "c", "d"): 2,
    ("d", "c", "b"): 1,
    ("c", "b", "c"): 1,
}


def toy_text(sep: str = "\t") -> str:
    return "".join(f"{s}{sep}{d}{sep}{t}\n" for s, d, t in TOY_RECORDS)


def random_records(seed: int, n_nodes: int = 6, n_links: int = 50, horizon: Optional[int] = None) -> List[Tuple[str, str, int]]:
    rng = random.Random(seed)
    horizon = horizon if horizon is not None else max(1, n_links // 2)
    records = [
        (f"n{rng.randrange(n_nodes)}", f"n{rng.randrange(n_nodes)}", rng.randrange(horizon + 1))
        for _ in range(n_links)
    ]
    return sorted(records, key=lambda x: x[2])


@pytest.fixture
def toy() -> TemporalLinkSequence:
    return TemporalLinkSequence.from_tuples(TOY_RECORDS)


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy.tsv"
    path.write_text(toy_text(), encoding="utf-8")
    return path


@pytest.fixture
def make_sequence() -> Callable[..., TemporalLinkSequence]:
    def make(seed: int, n_nodes: int = 6, n_links: int = 50, horizon: Optional[int] = None) -> TemporalLinkSequence:
        return TemporalLinkSequence.from_tuples(random_records(seed, n_nodes, n_links, horizon))
    return make
