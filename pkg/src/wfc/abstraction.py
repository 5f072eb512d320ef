"""Placeholder abstraction of context-specific tokens.

Five categories of tokens that are too project-specific to predict verbatim
(action versions, URLs, file names, version numbers, bare paths) are replaced
by fixed placeholder tokens. Classification is regex/heuristic based and
evaluated in a fixed priority order so overlaps resolve deterministically
(e.g. a URL ending in ``.sh`` is a URL, not a file).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, Optional

from .errors import EmptyCorpus
from .workflow import Token, TokenStream


class PlaceholderCategory(Enum):
    ACTION_VERSION = "<PLH>"
    URL = "<URL>"
    FILE = "<FILE>"
    VERSION_NUMBER = "<VERSION>"
    PATH = "<PATH>"

    @property
    def placeholder(self) -> str:
        return self.value


_PLACEHOLDER_TEXTS = tuple(c.value for c in PlaceholderCategory) + (
    "<TO_BE_PREDICTED>",
    "<FOR-LATER-USE>",
)

# owner/name@ref action reference; the ref must not itself be a placeholder
_ACTION_VERSION_RE = re.compile(
    r"^[A-Za-z0-9_.\-]+/[A-Za-z0-9_.\-/]+@(?!<)[^@\s]+$"
)
_URL_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://\S+$")
_URL_WWW_RE = re.compile(r"^www\.\S+$")
_URL_IP_RE = re.compile(r"^\d{1,3}(\.\d{1,3}){3}(:\d+)?(/\S*)?$")
_VERSION_RE = re.compile(r"^v\d+(\.\d+)*$|^\d+(\.\d+)+$")
_PATH_PREFIX_RE = re.compile(r"^(\./|~/|/)")


def load_extensions(path: Optional[str] = None) -> frozenset[str]:
    """Load the file-extension list (one lowercase extension per line)."""
    if path is None:
        text = resources.files("wfc.data").joinpath("extensions.txt").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip()
    )


_DEFAULT_EXTENSIONS: Optional[frozenset[str]] = None


def default_extensions() -> frozenset[str]:
    global _DEFAULT_EXTENSIONS
    if _DEFAULT_EXTENSIONS is None:
        _DEFAULT_EXTENSIONS = load_extensions()
    return _DEFAULT_EXTENSIONS


def _has_known_extension(token: str, extensions: frozenset[str]) -> bool:
    basename = token.rsplit("/", 1)[-1]
    if "." not in basename:
        return False
    ext = basename.rsplit(".", 1)[-1].lower()
    return ext in extensions


def classify_token(
    token: str, extensions: Optional[frozenset[str]] = None
) -> Optional[PlaceholderCategory]:
    """Classify one token, or return None for ordinary tokens.

    Priority: action version > url > file > version number > path.
    """
    if not token or any(p in token for p in _PLACEHOLDER_TEXTS):
        return None
    if extensions is None:
        extensions = default_extensions()
    if _ACTION_VERSION_RE.match(token):
        return PlaceholderCategory.ACTION_VERSION
    if (
        _URL_SCHEME_RE.match(token)
        or _URL_WWW_RE.match(token)
        or _URL_IP_RE.match(token)
    ):
        return PlaceholderCategory.URL
    if _has_known_extension(token, extensions):
        return PlaceholderCategory.FILE
    if _VERSION_RE.match(token):
        return PlaceholderCategory.VERSION_NUMBER
    if "/" in token or _PATH_PREFIX_RE.match(token):
        return PlaceholderCategory.PATH
    return None


def abstract_token_text(token: str, extensions: Optional[frozenset[str]] = None) -> str:
    """Abstracted rendering of one token (unchanged when unclassified)."""
    category = classify_token(token, extensions)
    if category is None:
        return token
    if category is PlaceholderCategory.ACTION_VERSION:
        # only the version suffix is abstracted: actions/checkout@v2 -> actions/checkout@<PLH>
        return token.rsplit("@", 1)[0] + "@" + category.placeholder
    return category.placeholder


def abstract_stream(
    stream: TokenStream, extensions: Optional[frozenset[str]] = None
) -> TokenStream:
    """Replace classifiable tokens with their placeholders, length preserved."""
    out = []
    for tok in stream.tokens:
        category = classify_token(tok.text, extensions)
        if category is None:
            out.append(tok)
        else:
            out.append(Token(abstract_token_text(tok.text, extensions), category))
    return TokenStream(out, source=stream.source)


def abstract_text(text: str, extensions: Optional[frozenset[str]] = None) -> str:
    """Tokenize, abstract, and re-join with single spaces."""
    from .workflow import tokenize_texts

    return " ".join(abstract_token_text(t, extensions) for t in tokenize_texts(text))


@dataclass
class CoverageReport:
    """Census of single-occurring tokens and how many the rules abstract."""

    total_single_occurrence: int
    per_category_counts: dict[str, int]
    abstracted_fraction: float

    def to_dict(self) -> dict:
        return {
            "total_single_occurrence": self.total_single_occurrence,
            "per_category_counts": dict(self.per_category_counts),
            "abstracted_fraction": self.abstracted_fraction,
        }


def abstraction_stats(
    corpus: Iterable[TokenStream], extensions: Optional[frozenset[str]] = None
) -> CoverageReport:
    """Count corpus-wide singleton tokens and the fraction the rules cover."""
    counts: Counter[str] = Counter()
    n_streams = 0
    for stream in corpus:
        n_streams += 1
        counts.update(t.text for t in stream.tokens)
    if n_streams == 0:
        raise EmptyCorpus("abstraction_stats needs at least one token stream")
    singletons = [text for text, c in counts.items() if c == 1]
    per_category: Counter[str] = Counter()
    for text in singletons:
        category = classify_token(text, extensions)
        if category is not None:
            per_category[category.name] += 1
    total = len(singletons)
    covered = sum(per_category.values())
    fraction = 1.0 if total == 0 else covered / total
    return CoverageReport(
        total_single_occurrence=total,
        per_category_counts=dict(per_category),
        abstracted_fraction=fraction,
    )


def rules_report() -> list[dict]:
    """Machine-readable dump of the rule set for auditability."""
    return [
        {
            "priority": 1,
            "category": "ACTION_VERSION",
            "placeholder": "<PLH>",
            "pattern": _ACTION_VERSION_RE.pattern,
            "note": "only the @suffix is replaced",
        },
        {
            "priority": 2,
            "category": "URL",
            "placeholder": "<URL>",
            "pattern": "|".join(
                (_URL_SCHEME_RE.pattern, _URL_WWW_RE.pattern, _URL_IP_RE.pattern)
            ),
        },
        {
            "priority": 3,
            "category": "FILE",
            "placeholder": "<FILE>",
            "pattern": "basename extension in the configured extension list",
        },
        {
            "priority": 4,
            "category": "VERSION_NUMBER",
            "placeholder": "<VERSION>",
            "pattern": _VERSION_RE.pattern,
        },
        {
            "priority": 5,
            "category": "PATH",
            "placeholder": "<PATH>",
            "pattern": "contains '/' or starts with ./ ~/ / and has no known extension",
        },
    ]
