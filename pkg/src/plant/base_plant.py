"""
Base Plant Module
=================

Abstract base class for machine models driven by the operator model.

A plant is a black box: it accepts ControlSignals and answers with a
FeedbackFrame. Its state type is private to the implementation, so any
model honouring this contract can replace another without touching the
operator.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional
import logging

from ..geom.pose import Pose
from ..interface.channels import ControlSignals, FeedbackFrame


logger = logging.getLogger(__name__)


class PlantRegistryError(ValueError):
    """Unknown plant implementation requested"""
    pass


class BasePlant(ABC):
    """
    Abstract base class for machine models.

    All plants must implement:
    - initial_state(): State at rest at a given pose and bucket position
    - step(): Advance the state by one time step under given controls
    - observe(): Project the state onto the feedback channels
    """

    def __init__(self, params: Any):
        """
        Initialize the plant.

        Args:
            params: Implementation-specific parameter set
        """
        self.params = params
        logger.debug(f"Initialized {self.__class__.__name__}")

    @abstractmethod
    def initial_state(self, pose: Pose, h0: float, phi0: float) -> Any:
        """State at rest at the given pose"""
        pass

    @abstractmethod
    def step(self, state: Any, u: ControlSignals, dt: float) -> Any:
        """Successor state after dt under controls u"""
        pass

    @abstractmethod
    def observe(self, state: Any) -> FeedbackFrame:
        """Feedback channels visible to the operator"""
        pass

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(params={self.params!r})"


class PlantRegistry:
    """Registry for managing plant implementations"""

    _plants: Dict[str, type] = {}

    @classmethod
    def register(cls, name: str) -> Callable[[type], type]:
        """Decorator to register a plant class"""
        def decorator(plant_class: type) -> type:
            cls._plants[name] = plant_class
            return plant_class
        return decorator

    @classmethod
    def get(cls, name: str) -> Optional[type]:
        """Get a plant class by name"""
        return cls._plants.get(name)

    @classmethod
    def create(cls, name: str, params: Any) -> BasePlant:
        """Create a plant instance"""
        plant_class = cls.get(name)
        if plant_class is None:
            raise PlantRegistryError(
                f"Unknown plant '{name}', registered: {', '.join(cls.list_plants())}"
            )
        return plant_class(params)

    @classmethod
    def list_plants(cls) -> List[str]:
        """List all registered plant names"""
        return sorted(cls._plants.keys())
