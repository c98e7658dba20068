from .types import Dataset, Sample
from .generate import GeneratorSpec, device_curves, generate, scene_templates
from .subsets import ALLOWED_FRACTIONS, subset
from .io import DatasetFormatError, load_dataset, save_dataset

__all__ = [
    "Dataset",
    "Sample",
    "GeneratorSpec",
    "generate",
    "scene_templates",
    "device_curves",
    "ALLOWED_FRACTIONS",
    "subset",
    "DatasetFormatError",
    "save_dataset",
    "load_dataset",
]
