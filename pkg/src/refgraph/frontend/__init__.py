"""Source discovery, parsing, lexical scope analysis, and import resolution."""

from .discovery import discover_modules
from .imports import ImportBinding, ImportTable, resolve_imports
from .parsing import Opaque, SourceModule, module_name_for_path, parse_module
from .scopes import Binding, BindingKind, Scope, ScopeKind, ScopeTree, build_scope_tree

__all__ = [
    "Binding",
    "BindingKind",
    "ImportBinding",
    "ImportTable",
    "Opaque",
    "Scope",
    "ScopeKind",
    "ScopeTree",
    "SourceModule",
    "build_scope_tree",
    "discover_modules",
    "module_name_for_path",
    "parse_module",
    "resolve_imports",
]
