import enum
import typing

ET = typing.TypeVar("ET", bound=enum.Enum)
def parse_enum(enum_cls: typing.Type[ET], value: str) -> typing.Optional[ET]:
    allowed_values = {v.value: v for v in enum_cls._member_map_.values()}
    if value and value in allowed_values:
        return allowed_values[value]  # type: ignore
    return None


class SortMode(str, enum.Enum):
    REQUIRE_SORTED = "require_sorted"
    SORT = "sort"


class Engine(str, enum.Enum):
    BRUTE = "brute"
    BASELINE = "baseline"


class Multiplicity(str, enum.Enum):
    DISTINCT = "distinct"
    PER_MAXIMAL_PATH = "per_maximal_path"


class Algorithm(str, enum.Enum):
    STREAMING = "streaming"
    BASELINE = "baseline"


class SweepVariable(str, enum.Enum):
    N = "N"
    DELTA = "delta"
    K = "K"


class RunStatus(str, enum.Enum):
    OK = "ok"
    TIMEOUT = "timeout"
    REFUSED = "refused"


class FitModel(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    EXPONENTIAL = "exponential"
    POWER = "power"
