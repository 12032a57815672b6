"""Template-based machining feature recognition on analytic B-rep solids."""

from __future__ import annotations

from .brep import FaceType, LoopKind, Model, SchemaError, TopologyError, UnknownFace, load_model, save_model
from .descriptor import (
    Descriptor,
    Feature,
    FeatureTemplate,
    ItemValue,
    ItemValueSet,
    MachiningConditions,
    TemplateLibrary,
    extract_descriptor,
    load_templates,
)
from .geom import Convexity, Tolerances

__all__ = [
    "Convexity",
    "Descriptor",
    "FaceType",
    "Feature",
    "FeatureTemplate",
    "ItemValue",
    "ItemValueSet",
    "LoopKind",
    "MachiningConditions",
    "Model",
    "SchemaError",
    "TemplateLibrary",
    "Tolerances",
    "TopologyError",
    "UnknownFace",
    "extract_descriptor",
    "load_model",
    "load_templates",
    "save_model",
]

__version__ = "0.1.0"
