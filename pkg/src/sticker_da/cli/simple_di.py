from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from sticker_da.core import ConfigError


@dataclass(frozen=True)
class Provider:
    """How to build one registered type: the types its builder takes, in order."""

    build: Callable[..., Any]
    deps: tuple[type, ...] = ()


@dataclass
class DiContainer:
    """
    Per-command object graph. Each registered type is built once, on first resolve,
    from its already-resolved dependencies; `instance` registers a ready-made value.
    """

    providers: dict[type, Provider] = field(default_factory=dict)
    built: dict[type, Any] = field(default_factory=dict)

    def register(
        self,
        key: type,
        *,
        build: Callable[..., Any] | None = None,
        deps: list[type] | None = None,
        instance: Any = None,
    ):
        if instance is not None:
            self.built[key] = instance
            return
        self.providers[key] = Provider(build=build or key, deps=tuple(deps or ()))

    def resolve[T](self, key: type[T]) -> T:
        return self._resolve(key, ())

    def _resolve(self, key: type, chain: tuple[type, ...]) -> Any:
        if key in self.built:
            return self.built[key]
        if key in chain:
            cycle = " -> ".join(t.__name__ for t in (*chain, key))
            raise ConfigError(f"dependency cycle: {cycle}")
        provider = self.providers.get(key)
        if provider is None:
            raise ConfigError(f"nothing registered for {key.__name__}")

        args = [self._resolve(dep, (*chain, key)) for dep in provider.deps]
        self.built[key] = provider.build(*args)
        return self.built[key]
