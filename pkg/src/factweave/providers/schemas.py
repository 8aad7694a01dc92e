"""Registered output schemas for every structured LLM task.

A deliberately small JSON-schema subset (object/array/scalar types, required
keys, enums, nullable unions) — enough to reject malformed model output and
drive the retry loop without pulling in a full validator dependency.
"""

from __future__ import annotations

from typing import Any

_STR = {"type": "string"}
_NUM_STR = {"type": "string"}  # decimals travel as strings
_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}


def _arr(items: dict) -> dict:
    return {"type": "array", "items": items}


def _obj(required: dict[str, dict], optional: dict[str, dict] | None = None) -> dict:
    props = dict(required)
    props.update(optional or {})
    return {"type": "object", "required": list(required), "properties": props}


_POINT = _obj(
    {"label": _STR, "value": _NUM_STR, "unit": _STR},
    {"series_key": {"type": ["string", "null"]}},
)

SCHEMAS: dict[str, dict] = {
    "query_variants": _obj({"variants": _arr(_STR)}),
    "paragraph_filter": _obj({"keep_indices": _arr(_INT)}),
    "fact_identification": _obj({"facts": _arr(_obj({"content": _STR}))}),
    "data_points": _obj({"data_points": _arr(_POINT)}),
    "validation_issues": _obj(
        {
            "issues": _arr(
                _obj(
                    {
                        "fact_id": _STR,
                        "kind": {
                            "enum": [
                                "content_mismatch",
                                "wrong_value",
                                "missing_data_point",
                                "unit_inconsistency",
                                "ambiguous_reference",
                            ]
                        },
                        "detail": _STR,
                        "suggested_fix": _STR,
                    }
                )
            )
        }
    ),
    "refined_facts": _obj(
        {"facts": _arr(_obj({"id": _STR, "content": _STR, "data_points": _arr(_POINT)}))}
    ),
    "cluster_topic": _obj({"topic": _STR}),
    "cluster_summary": _obj({"summary": _STR}),
    "refined_topics": _obj({"topics": _arr(_obj({"cluster_id": _STR, "topic": _STR}))}),
    "fact_set_grouping": _obj(
        {"sets": _arr(_obj({"fact_ids": _arr(_STR)}, {"conflicting": _BOOL}))}
    ),
    "merge_groups": _obj({"groups": _arr(_arr(_STR))}),
    "entity_fill": _obj({"filled_content": {"type": ["string", "null"]}}),
    "narrative": _obj({"title": _STR, "caption_html": _STR}),
    "chart_recommendation": _obj(
        {"kind": {"enum": ["bar", "pie", "line", "isotype", "range", "text"]}}
    ),
    "unit_order": _obj({"order": _arr(_STR)}),
    "entity_detection": _obj(
        {
            "entities": _arr(
                _obj(
                    {
                        "text": _STR,
                        "kind": {
                            "enum": [
                                "GPE",
                                "DATE",
                                "ORG",
                                "PERSON",
                                "PERCENT",
                                "MONEY",
                                "QUANTITY",
                                "CARDINAL",
                                "OTHER",
                            ]
                        },
                        "start": _INT,
                        "end": _INT,
                    }
                )
            )
        }
    ),
}


def schema_errors(value: Any, schema: dict, path: str = "$") -> list[str]:
    """Validation errors for value against the schema subset; empty means valid."""
    errors: list[str] = []
    if "enum" in schema:
        if value not in schema["enum"]:
            errors.append(f"{path}: {value!r} not one of {schema['enum']}")
        return errors

    expected = schema.get("type")
    types = expected if isinstance(expected, list) else [expected]

    def matches(t: str) -> bool:
        if t == "object":
            return isinstance(value, dict)
        if t == "array":
            return isinstance(value, list)
        if t == "string":
            return isinstance(value, str)
        if t == "integer":
            return isinstance(value, int) and not isinstance(value, bool)
        if t == "number":
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        if t == "boolean":
            return isinstance(value, bool)
        if t == "null":
            return value is None
        return True

    if not any(matches(t) for t in types):
        errors.append(f"{path}: expected {expected}, got {type(value).__name__}")
        return errors

    if isinstance(value, dict) and "object" in types:
        for key in schema.get("required", []):
            if key not in value:
                errors.append(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                errors.extend(schema_errors(value[key], sub, f"{path}.{key}"))
    elif isinstance(value, list) and "array" in types and "items" in schema:
        for i, item in enumerate(value):
            errors.extend(schema_errors(item, schema["items"], f"{path}[{i}]"))
    return errors


def get_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unregistered schema: {name!r}")
    return SCHEMAS[name]
