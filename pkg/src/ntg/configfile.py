"""Flat key=value config files. Unknown keys are rejected, not ignored."""

from __future__ import annotations


class ConfigFileError(ValueError):
    pass


def parse_kv(text: str, schema: dict[str, type]) -> dict:
    """Parse `key=value` lines into typed values per schema.

    Blank lines and lines starting with '#' are skipped. Booleans accept
    true/false/1/0/yes/no.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigFileError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in schema:
            raise ConfigFileError(f"line {lineno}: unknown key {key!r}")
        kind = schema[key]
        try:
            if kind is bool:
                lowered = value.lower()
                if lowered in ("true", "1", "yes"):
                    out[key] = True
                elif lowered in ("false", "0", "no"):
                    out[key] = False
                else:
                    raise ValueError(value)
            else:
                out[key] = kind(value)
        except ValueError as exc:
            raise ConfigFileError(
                f"line {lineno}: cannot parse {value!r} as {kind.__name__}"
            ) from exc
    return out
