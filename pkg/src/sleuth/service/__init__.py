from .app import create_app, dataset_payload
from .state import EngineState

__all__ = ["create_app", "dataset_payload", "EngineState"]
