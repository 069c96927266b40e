"""DRF building blocks shared by every JSON input and report format."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Type

from rest_framework import serializers

from core.exact import RationalFormatError, format_rational, parse_rational
from core.exceptions import InputFormatError


class RationalField(serializers.Field):
    """Exact rational written as ``"p/q"`` (or an integer); decimals are refused."""

    default_error_messages = {
        'invalid': 'not a rational: {value!r} (expected "p/q")',
    }

    def to_internal_value(self, data: Any) -> Fraction:
        try:
            return parse_rational(data)
        except RationalFormatError:
            self.fail('invalid', value=data)

    def to_representation(self, value: Fraction) -> str:
        return format_rational(value)


class RationalVectorField(serializers.ListField):
    child = RationalField()


class MonomialValueSerializer(serializers.Serializer):
    """One stored entry of a symmetric multilinear form."""

    monomial = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=True)
    value = RationalField()


def flatten_errors(detail: Any, prefix: str = '') -> list[str]:
    """Turn nested DRF error detail into ``form[2].value: message`` lines."""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            if isinstance(key, int):
                path = f'{prefix}[{key}]'
            else:
                path = f'{prefix}.{key}' if prefix else str(key)
            if key == 'non_field_errors':
                path = prefix or '<root>'
            lines.extend(flatten_errors(value, path))
        return lines
    if isinstance(detail, list):
        if all(isinstance(item, str) for item in detail):
            return [f'{prefix or "<root>"}: {item}' for item in detail]
        lines = []
        for index, item in enumerate(detail):
            if item in ({}, [], None, ''):
                continue
            lines.extend(flatten_errors(item, f'{prefix}[{index}]'))
        return lines
    return [f'{prefix or "<root>"}: {detail}']


def monomial_key(monomial: list[int]) -> tuple[int, ...]:
    return tuple(sorted(monomial))


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        with path.open(encoding='utf-8') as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise InputFormatError(str(path), ['file not found'])
    except json.JSONDecodeError as exc:
        raise InputFormatError(str(path), [f'line {exc.lineno}: {exc.msg}'])


def validated(serializer_class: Type[serializers.Serializer], payload: Any, source: str, **context: Any) -> Any:
    """Run a serializer and raise :class:`InputFormatError` with flattened paths."""
    serializer = serializer_class(data=payload, context=context)
    if not serializer.is_valid():
        raise InputFormatError(source, flatten_errors(serializer.errors))
    return serializer.validated_data


def dump_json(payload: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + '\n'
