"""Convert the upstream citation-dataset distribution (the eight
ind.<name>.* files) into NDGG1 containers with the standard
train/val/test split."""

from .bundle import Bundle, load_bundle
from .convert import ConvertError, convert
from .writer import write_ndgg1

__all__ = ["Bundle", "ConvertError", "convert", "load_bundle", "write_ndgg1"]
