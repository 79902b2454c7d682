"""gencanvas: a canvas runtime where generative-AI prompts live as
direct-manipulation instruments (fragment cards, lenses, containers,
brushes, palettes) over deterministic mock or remote model adapters."""

from .assets import ImageAsset, Provenance, make_asset
from .brushes import Stroke
from .config import RuntimeConfig
from .controls import GenerationControls, GenerationRequest
from .document import CanvasDocument, Grounding
from .fragments import Fragment, FragmentEdit, FragmentRow
from .geometry import Rect
from .masks import Mask
from .runtime import CanvasRuntime
from .scheduler import Scheduler, SystemClock, VirtualClock
from .session import Session, Transcript, run_script

__all__ = [
    "CanvasDocument",
    "CanvasRuntime",
    "Fragment",
    "FragmentEdit",
    "FragmentRow",
    "GenerationControls",
    "GenerationRequest",
    "Grounding",
    "ImageAsset",
    "Mask",
    "Provenance",
    "Rect",
    "RuntimeConfig",
    "Scheduler",
    "Session",
    "Stroke",
    "SystemClock",
    "Transcript",
    "VirtualClock",
    "make_asset",
    "run_script",
]

__version__ = "0.1.0"
