"""Key-value config files, project configuration, and builtin tables.

All config formats here are one ``key = value`` pair per line, with ``#``
comments and blank lines ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .model import NormalizationProfile

# Names resolvable without a binding anywhere in the project.  A curated,
# frozen set (rather than dir(builtins)) keeps output identical across
# interpreter versions.
BUILTIN_NAMES: frozenset[str] = frozenset(
    """
    abs aiter all any anext ascii bin bool breakpoint bytearray bytes callable
    chr classmethod compile complex delattr dict dir divmod enumerate eval exec
    filter float format frozenset getattr globals hasattr hash help hex id
    input int isinstance issubclass iter len list locals map max memoryview
    min next object oct open ord pow print property range repr reversed round
    set setattr slice sorted staticmethod str sum super tuple type vars zip
    ArithmeticError AssertionError AttributeError BaseException BlockingIOError
    BrokenPipeError BufferError BytesWarning ChildProcessError ConnectionError
    DeprecationWarning EOFError Exception FileExistsError FileNotFoundError
    FloatingPointError GeneratorExit ImportError IndentationError IndexError
    InterruptedError IsADirectoryError KeyError KeyboardInterrupt LookupError
    MemoryError ModuleNotFoundError NameError NotADirectoryError
    NotImplementedError OSError OverflowError PermissionError RecursionError
    ReferenceError RuntimeError RuntimeWarning StopAsyncIteration StopIteration
    SyntaxError SystemError SystemExit TabError TimeoutError TypeError
    UnboundLocalError UnicodeDecodeError UnicodeEncodeError UnicodeError
    UserWarning ValueError Warning ZeroDivisionError
    """.split()
)

# Module-level dunders behave like opaque constants, not references.
MODULE_DUNDERS: frozenset[str] = frozenset(
    {"__name__", "__file__", "__doc__", "__package__", "__spec__", "__loader__", "__path__"}
)

# Builtin higher-order callables: which arguments they invoke.  Entries are
# positional indices or keyword names.
DEFAULT_HIGHER_ORDER: dict[str, tuple[int | str, ...]] = {
    "map": (0,),
    "filter": (0,),
    "sorted": ("key",),
    "min": ("key",),
    "max": ("key",),
    "functools.reduce": (0,),
}


def parse_key_values(text: str, origin: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; later duplicates override earlier ones."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _parse_bool(value: str, key: str, origin: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{origin}: {key} must be boolean, got {value!r}")


def load_profile(path: str | Path) -> NormalizationProfile:
    """Load a NormalizationProfile from a key-value file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    return profile_from_mapping(parse_key_values(text, str(path)), str(path))


def profile_from_mapping(values: dict[str, str], origin: str = "<profile>") -> NormalizationProfile:
    profile = NormalizationProfile()
    known = {f.name for f in fields(NormalizationProfile)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"{origin}: unknown profile key {key!r}")
        if key == "inner_class_separator":
            profile = replace(profile, inner_class_separator=value)
        else:
            profile = replace(profile, **{key: _parse_bool(value, key, origin)})
    return profile


@dataclass(frozen=True)
class ProjectConfig:
    """Extraction settings for one source tree."""

    extension: str = ".py"
    exclude: tuple[str, ...] = ()
    builtins_file: str | None = None


def load_project_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_key_values(text, str(path))
    known = {"extension", "exclude", "builtins_file"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    exclude = tuple(
        glob.strip() for glob in values.get("exclude", "").split(",") if glob.strip()
    )
    return ProjectConfig(
        extension=values.get("extension", ".py"),
        exclude=exclude,
        builtins_file=values.get("builtins_file") or None,
    )


def load_higher_order_table(path: str | Path | None) -> dict[str, tuple[int | str, ...]]:
    """Default higher-order table, optionally extended from a config file.

    File lines look like ``sorted = key`` or ``functools.reduce = 0`` with
    comma-separated positions; integers are positional indices, identifiers
    are keyword argument names.
    """
    table = dict(DEFAULT_HIGHER_ORDER)
    if path is None:
        return table
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read builtins file {path}: {exc}") from exc
    for name, spec in parse_key_values(text, str(path)).items():
        positions: list[int | str] = []
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            positions.append(int(item) if item.lstrip("-").isdigit() else item)
        if not positions:
            raise ConfigError(f"{path}: {name} lists no argument positions")
        table[name] = tuple(positions)
    return table
