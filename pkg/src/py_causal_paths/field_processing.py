import abc
import enum
import inspect
import typing

import attr

from . import types
from .base import DataModelBase
from .enums import parse_enum


class Dummy:
    pass


class DataField:
    class NoDefaultValue(Exception):
        pass

    field: types.FieldDefinition
    classes_tree: typing.List[str]

    @staticmethod
    @abc.abstractmethod
    def check(field: types.FieldDefinition) -> bool: ...

    @abc.abstractmethod
    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]): ...

    def __init__(self, field: types.FieldDefinition, classes_tree: typing.List[str]):
        self.field = field
        self.classes_tree = classes_tree

    def where(self, class_tree: typing.List[str]) -> str:
        return " -> ".join(class_tree + [self.field.name])

    def load(self, input_value: typing.Any, class_tree: typing.List[str]):
        """Raises NoDefaultValue when a required value is missing."""
        if input_value is None:
            return self.missing(class_tree)
        return self.load_value(input_value, class_tree)

    def missing(self, class_tree: typing.List[str]):
        if self.field.default_value is not attr.NOTHING:
            if isinstance(self.field.default_value, attr.Factory):  # type: ignore[arg-type]
                return self.field.default_value.factory()
            return self.field.default_value
        raise self.NoDefaultValue(class_tree, self.field.name)

    def represent(self, cls_exemplar):
        return getattr(cls_exemplar, self.field.name, None)

    @classmethod
    def processor(cls, field: types.FieldDefinition, classes_tree: typing.List[str]) -> "DataField":
        for subclass in cls.__subclasses__():
            if subclass.check(field):
                return subclass(field, classes_tree)
        raise types.UnknownFieldType(f"Unknown field type: {' -> '.join(classes_tree)} -> {field.name}: {field.type}")

    def sub_processor(self, name: str, field_type: typing.Type) -> "DataField":
        return DataField.processor(types.FieldDefinition.create(name, field_type, attr.NOTHING), self.classes_tree)

    def represent_value(self, field_type: typing.Type, value: typing.Any):
        dummy = Dummy()
        setattr(dummy, self.field.name, value)
        return DataField.processor(types.FieldDefinition.create(self.field.name, field_type), []).represent(dummy)


class OptionalDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return field.origin == typing.Union

    def _inner_type(self) -> typing.Type:
        assert self.field.args is not None
        inner = [t for t in self.field.args if t is not type(None)]
        if len(inner) != 1 or len(inner) == len(self.field.args):
            raise types.UnknownFieldType(f"{self.where(self.classes_tree)}: only Optional[X] unions are loadable, use CUSTOM_LOAD")
        return inner[0]

    def missing(self, class_tree: typing.List[str]):
        # null and absent both mean None unless a default says otherwise
        try:
            return super().missing(class_tree)
        except self.NoDefaultValue:
            return None

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        return self.sub_processor(self.field.name, self._inner_type()).load(input_value, class_tree)

    def represent(self, cls_exemplar):
        ret = getattr(cls_exemplar, self.field.name, None)
        if ret is None:
            return None
        return self.represent_value(self._inner_type(), ret)


class ListDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return field.origin in (typing.List, list)

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        if not isinstance(input_value, list):
            raise types.LoadError(f"Type Mismatch: {self.where(class_tree)}: {type(input_value).__name__} is not a list!")
        assert self.field.args is not None
        ret = []
        for i, x in enumerate(input_value):
            item = self.sub_processor(f"{self.field.name}[{i}]", self.field.args[0])
            try:
                ret.append(item.load(x, class_tree))
            except self.NoDefaultValue:
                raise types.LoadError(f"Type Mismatch: {item.where(class_tree)}: null is not allowed in a list!")
        return ret

    def represent(self, cls_exemplar):
        ret = getattr(cls_exemplar, self.field.name, None)
        if ret is None:
            return None
        assert self.field.args is not None
        return [self.represent_value(self.field.args[0], value) for value in ret]


class StrDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return field.type == str

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        if not isinstance(input_value, str):
            raise types.LoadError(f"Type Mismatch: {self.where(class_tree)}: {type(input_value).__name__} is not a string!")
        return input_value


class NumberDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return field.type in (int, float)

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        if isinstance(input_value, bool) or not isinstance(input_value, (int, float)):
            raise types.LoadError(f"Type Mismatch: {self.where(class_tree)}: {type(input_value).__name__} is not a {self.field.type.__name__}!")
        if self.field.type == float:
            return float(input_value)
        if isinstance(input_value, float):
            if not input_value.is_integer():
                raise types.LoadError(f"Value Error: {self.where(class_tree)}: {input_value} is not an integer!")
            return int(input_value)
        return input_value


class BoolDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return field.type == bool

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        if not isinstance(input_value, bool):
            raise types.LoadError(f"Type Mismatch: {self.where(class_tree)}: {type(input_value).__name__} is not a boolean!")
        return input_value


class EnumDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return inspect.isclass(field.type) and issubclass(field.type, enum.Enum) and issubclass(field.type, str)

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        if isinstance(input_value, self.field.type):
            return input_value
        if not isinstance(input_value, str):
            raise types.LoadError(f"Type Mismatch: {self.where(class_tree)}: {type(input_value).__name__} is not a string!")
        actual_value = parse_enum(self.field.type, input_value)
        if actual_value is None:
            allowed = ", ".join(v.value for v in self.field.type)
            raise types.LoadError(f"Value Error: {self.where(class_tree)}: {input_value!r} is not one of {allowed}")
        return actual_value

    def represent(self, cls_exemplar):
        ret = getattr(cls_exemplar, self.field.name, None)
        return ret.value if ret is not None else None


class SubclassDataField(DataField):
    @staticmethod
    def check(field: types.FieldDefinition) -> bool:
        return inspect.isclass(field.type) and issubclass(field.type, DataModelBase)

    def load_value(self, input_value: typing.Any, class_tree: typing.List[str]):
        return self.field.type.rec_load(input_value, self.field.type, class_tree + [self.field.name])

    def represent(self, cls_exemplar):
        ret = getattr(cls_exemplar, self.field.name, None)
        return ret.represent() if ret is not None else None
