"""Text formats: element expressions, spec files and suite reports."""

from .expr import ParseError, format_element, parse_element
from .specfile import SpecFile, load_spec, parse_spec, serialize

__all__ = ["ParseError", "SpecFile", "format_element", "load_spec", "parse_element", "parse_spec", "serialize"]
