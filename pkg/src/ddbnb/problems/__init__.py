"""Bundled problem models, instance parsers and the PSP generator."""

from .io import (
    BkpInstance,
    FORMATTERS,
    Instance,
    InstanceFormatError,
    InstanceValidationError,
    PROBLEM_NAMES,
    PspInstance,
    SrflpInstance,
    TsptwInstance,
    format_bkp,
    format_psp,
    format_srflp,
    format_tsptw,
    load_instance,
    parse_instance,
)
from . import bkp, psp, srflp, tsptw
from .generate import generate_psp

BUILDERS = {
    "bkp": bkp.build,
    "psp": psp.build,
    "srflp": srflp.build,
    "tsptw": tsptw.build,
}


def build_model(problem: str, instance):
    """(Problem, Relaxation) pair for a parsed instance."""
    try:
        builder = BUILDERS[problem]
    except KeyError:
        raise ValueError(f"unknown problem {problem!r}") from None
    return builder(instance)


__all__ = [
    "BUILDERS",
    "BkpInstance",
    "FORMATTERS",
    "Instance",
    "InstanceFormatError",
    "InstanceValidationError",
    "PROBLEM_NAMES",
    "PspInstance",
    "SrflpInstance",
    "TsptwInstance",
    "build_model",
    "format_bkp",
    "format_psp",
    "format_srflp",
    "format_tsptw",
    "generate_psp",
    "load_instance",
    "parse_instance",
]
