from typing import Dict, Callable, Any, List


class DataModelBase:
    """
    CUSTOM_LOAD: {field_name: loading_function, ...} where loading_function receives OUTER value for the field
    OMIT_IN_REPRESENTATION: list of fields that shouldn't be represented by represent()
    CUSTOM_REPRESENTATION: {field_name: representing_function, ...}
    FORCE_NONE: Forces None as value for None fields while representing
    """
    CUSTOM_LOAD: Dict[str, Callable[[Any], Any]] = {}
    OMIT_IN_REPRESENTATION: List[str] = []
    CUSTOM_REPRESENTATION: Dict[str, Callable[[Any], Any]] = {}
    FORCE_NONE: List[str] = []

    @classmethod
    def load_from_dict(cls, value: dict) -> "DataModelBase": ...

    def represent(self) -> dict: ...
