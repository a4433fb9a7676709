"""
Registry of presentations, plus the space-level operations.

Spaces are looked up by SpaceKind or by their CLI name. The three built-ins
are always registered; further presentations can be added at runtime.
"""
from typing import Dict, List, Union

from loguru import logger

from modules.cantor_spaces import CantorDigits, CantorPrefix
from modules.error_handler import GeneratorMismatchError
from modules.interval_space import UnitInterval
from modules.machines import FormalMachine, FormalMeet
from modules.semidecider import GeneralizedPoint
from modules.space_interface import Presentation, SpaceKind

SpaceRef = Union[SpaceKind, str, Presentation]


class SpaceRegistry:
    """
    Unified registry for built-in and user-registered presentations.
    """

    def __init__(self):
        self._spaces: Dict[str, Presentation] = {}
        for space in (CantorDigits(), CantorPrefix(), UnitInterval()):
            self.register(space)

    def register(self, space: Presentation, replace: bool = False) -> None:
        """
        Register a presentation under its name.

        Args:
            space: The presentation instance
            replace: Allow replacing an already registered name
        """
        if space.name in self._spaces and not replace:
            raise ValueError(f"space '{space.name}' is already registered")
        self._spaces[space.name] = space
        logger.debug(f"Registered space: {space.name} ({space.description})")

    def get(self, ref: SpaceRef) -> Presentation:
        """
        Resolve a space reference.

        Raises:
            GeneratorMismatchError: If no space has that name
        """
        if isinstance(ref, Presentation):
            return ref
        name = ref.value if isinstance(ref, SpaceKind) else ref
        space = self._spaces.get(name)
        if space is None:
            raise GeneratorMismatchError(
                f"unknown space '{name}' (known: {', '.join(self.get_space_names())})")
        return space

    def get_space_names(self) -> List[str]:
        return list(self._spaces)

    def has_space(self, name: str) -> bool:
        return name in self._spaces


# Global registry instance
_space_registry = None


def get_space_registry() -> SpaceRegistry:
    """Get the global space registry (singleton)"""
    global _space_registry
    if _space_registry is None:
        _space_registry = SpaceRegistry()
    return _space_registry


def get_space(ref: SpaceRef) -> Presentation:
    return get_space_registry().get(ref)


def covers(space: SpaceRef, m: FormalMachine) -> bool:
    """Exact decision of whether m denotes top in the presented frame"""
    return get_space(space).covers(m)


def positive(space: SpaceRef, b: FormalMeet) -> bool:
    """Exact decision of whether the meet b is not bottom"""
    return get_space(space).positive(b)


def point_embed(space: SpaceRef, x) -> GeneralizedPoint:
    """i_X(x): halts on exactly the generators x lies in"""
    return get_space(space).embed(x)
