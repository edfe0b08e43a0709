import attr
import typing

from .types import LoadError
from .base import DataModelBase
from .field_processing import DataField
from .types import FieldDefinition

T = typing.TypeVar("T", bound=DataModelBase)


class DataModel(DataModelBase):
    """Base for attrs records that load from and represent as plain dicts (TOML plans, JSON snapshots and reports)."""

    @classmethod
    def rec_load(cls, input_data: typing.Any, input_cls: typing.Type[T], field_tree: typing.List[str]) -> T:
        if not isinstance(input_data, dict):
            raise LoadError(" -> ".join(field_tree) + ": Not a Dict while Loadable")
        input_fields = [x for x in attr.fields(input_cls) if x.init]
        known = {x.name for x in input_fields}
        unknown = sorted(set(input_data) - known)
        if unknown:
            raise LoadError(" -> ".join(field_tree) + ": unknown field(s) " + ", ".join(unknown))
        ret_kwargs = {}

        for input_field in input_fields:
            field_name = input_field.name
            if field_name in input_cls.CUSTOM_LOAD:
                ret_kwargs[field_name] = input_cls.CUSTOM_LOAD[field_name](input_data)
                continue
            field_value = input_data.get(field_name, None)
            processor = DataField.processor(FieldDefinition.create(
                field_name,
                input_field.type,
                default_value=input_field.default
            ), field_tree)
            try:
                ret_kwargs[field_name] = processor.load(field_value, field_tree)
            except DataField.NoDefaultValue:
                raise LoadError(" -> ".join(field_tree + [field_name]) + ": required field is missing")
        try:
            # noinspection PyArgumentList
            return input_cls(**ret_kwargs)
        except (TypeError, ValueError) as e:
            raise LoadError(" -> ".join(field_tree) + f": {e}") from e

    @classmethod
    def load_from_dict(cls, value: dict):
        return cls.rec_load(value, cls, [cls.__name__])

    def __iter__(self):
        for field in attr.fields(self.__class__):
            value = getattr(self, field.name, None)
            if (value is not None or field.name in self.FORCE_NONE) and field.name not in self.OMIT_IN_REPRESENTATION:
                if field.name in self.CUSTOM_REPRESENTATION:
                    yield field.name, self.CUSTOM_REPRESENTATION[field.name](value)
                else:
                    processor = DataField.processor(FieldDefinition.create(
                        name=field.name,
                        field_type=field.type,
                        default_value=field.default
                    ), [])
                    yield field.name, processor.represent(self)

    def represent(self) -> dict:
        return dict(self)
