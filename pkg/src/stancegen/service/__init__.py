from .app import create_app
from .state import CurationState, StateError

__all__ = ["CurationState", "StateError", "create_app"]
