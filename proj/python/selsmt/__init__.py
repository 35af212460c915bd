"""SELinux RBAC policy verification via SMT."""

from ._selsmt import (
    ElementKind,
    PolicyDb,
    generate_benchmark,
    parse_policy,
    prelude,
    render_smt,
    verify,
)

__all__ = [
    "ElementKind",
    "PolicyDb",
    "generate_benchmark",
    "parse_policy",
    "prelude",
    "render_smt",
    "verify",
]
