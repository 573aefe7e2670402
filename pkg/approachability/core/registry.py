"""Name registries for problems, algorithms, target sets and opponents.

Scenario files refer to each of these by a kind tag. The decorators below
bind tags to classes; lookups fail with the list of available tags.
"""

from typing import Callable, Dict, Type, TypeVar

T = TypeVar("T")

# Global registries mapping kind tags to their classes
_REGISTRIES: Dict[str, Dict[str, type]] = {
    "problem": {},
    "algorithm": {},
    "target": {},
    "opponent": {},
}


def _register(category: str, name: str) -> Callable[[Type[T]], Type[T]]:
    registry = _REGISTRIES[category]

    def decorator(cls: Type[T]) -> Type[T]:
        if name in registry:
            raise ValueError(
                f"{category.capitalize()} kind '{name}' is already registered "
                f"to {registry[name].__name__}"
            )
        registry[name] = cls
        setattr(cls, "kind", name)
        return cls

    return decorator


def register_problem(name: str) -> Callable[[Type[T]], Type[T]]:
    """
    Decorator to register a problem construction under a kind tag.

    Args:
        name: Kind tag used in scenario files (e.g., 'external', 'ratio')

    Returns:
        Decorator function

    Example:
        @register_problem("external")
        class ExternalRegretProblem(Problem):
            ...
    """
    return _register("problem", name)


def register_algorithm(name: str) -> Callable[[Type[T]], Type[T]]:
    """Decorator to register an approaching algorithm under a kind tag."""
    return _register("algorithm", name)


def register_target(name: str) -> Callable[[Type[T]], Type[T]]:
    """Decorator to register a target-set kind under a kind tag."""
    return _register("target", name)


def register_opponent(name: str) -> Callable[[Type[T]], Type[T]]:
    """Decorator to register an opponent strategy under a kind tag."""
    return _register("opponent", name)


def get_class(category: str, name: str) -> type:
    """
    Get a registered class by category and kind tag.

    Args:
        category: One of 'problem', 'algorithm', 'target', 'opponent'
        name: The registered kind tag

    Returns:
        The registered class

    Raises:
        KeyError: If nothing is registered under that tag
    """
    registry = _REGISTRIES[category]
    if name not in registry:
        available = sorted(registry.keys())
        raise KeyError(
            f"No {category} registered with name '{name}'. "
            f"Available {category} kinds: {available}"
        )
    return registry[name]


def list_registered(category: str) -> Dict[str, type]:
    """
    Get all registered kinds of a category.

    Returns:
        Dict mapping kind tags to their classes
    """
    return _REGISTRIES[category].copy()
