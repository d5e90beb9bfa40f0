"""Community-aware cache-seed selection and content spreading over D2D networks."""
from .config import ScenarioConfig
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "ScenarioConfig", "__version__"]
