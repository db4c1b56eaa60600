"""Build, validate and merge succinct (BOSS) de Bruijn graphs."""

from __future__ import annotations

from .alphabet import DNA, Alphabet, ByteAlphabet, LetterAlphabet, parse_alphabet
from .boss import BossGraph, compute_C, deserialize, load, lf, node_label, save, serialize, validate
from .errors import (
    BossError,
    FormatError,
    IncompatibleGraphsError,
    InvalidGraphFileError,
    MalformedGraphError,
)
from .merge import MergeResult, Mode, emit_lcs, emit_union, merge, merge_colored, merge_many, run_merge
from .pipeline import build_pipeline
from .reference import ColorMatrix, StringCollection, build_boss, build_colored, build_lcs
from .streams import stream_merge

__version__ = "0.1.0"

__all__ = [
    "DNA", "Alphabet", "ByteAlphabet", "LetterAlphabet", "parse_alphabet",
    "BossGraph", "compute_C", "deserialize", "load", "lf", "node_label", "save", "serialize", "validate",
    "BossError", "FormatError", "IncompatibleGraphsError", "InvalidGraphFileError", "MalformedGraphError",
    "MergeResult", "Mode", "emit_lcs", "emit_union", "merge", "merge_colored", "merge_many", "run_merge",
    "build_pipeline", "ColorMatrix", "StringCollection", "build_boss", "build_colored", "build_lcs",
    "stream_merge",
]
