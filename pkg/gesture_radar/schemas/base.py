from typing import Type, TypeVar
import json

from pydantic import BaseModel as PydanticBaseModel, ConfigDict, ValidationError

from gesture_radar.exceptions import SchemaError

ModelType = TypeVar("ModelType", bound=PydanticBaseModel)


class BaseModel(PydanticBaseModel):
    model_config = ConfigDict(from_attributes=True, extra="forbid", use_enum_values=False)


class FrozenModel(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra="forbid", frozen=True)


def format_validation_errors(error: ValidationError) -> list[str]:
    """One 'field.path: message' line per pydantic error"""
    lines = []
    for err in error.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return lines


def parse_json_model(model: Type[ModelType], text: str, source: str) -> ModelType:
    """Validate a JSON document, reporting line/column or field paths as SchemaError"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{source}: invalid JSON",
            [f"line {e.lineno}, column {e.colno}: {e.msg}"],
        )
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise SchemaError(f"{source}: does not match the {model.__name__} schema", format_validation_errors(e))
