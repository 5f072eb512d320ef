"""Workflow parsing, canonical single-line rendering, and tokenization.

A workflow file is parsed into :class:`WorkflowDoc`, rendered to a
deterministic JSON-like single line (keys kept in authoring order), and
tokenized with a fixed whitespace + structural-character rule. The canonical
line is itself parseable (JSON is valid YAML), so canonicalize/parse
round-trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import yaml

from .errors import NotAWorkflow, ParseError

#: characters that always form their own token outside of quoted strings
STRUCTURAL_CHARS = frozenset('{}[]:,')


def _norm_key(key: Any) -> str:
    # YAML 1.1 reads the bare `on:` / `off:` keys as booleans; undo that.
    if key is True:
        return "on"
    if key is False:
        return "off"
    if key is None:
        return "null"
    return str(key)


def _norm_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {_norm_key(k): _norm_value(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_norm_value(v) for v in value]
    if isinstance(value, (str, bool, int, float)) or value is None:
        return value
    return str(value)


@dataclass
class Step:
    """One item of a job's ``steps`` list: an action call or a shell command."""

    name: Optional[str]
    uses: Optional[str]
    run: Optional[str]
    with_args: dict
    raw_block: str

    @property
    def is_uses(self) -> bool:
        return self.uses is not None


@dataclass
class Job:
    job_id: str
    runs_on: Optional[str]
    container_image: Optional[str]
    steps: list[Step]


@dataclass
class WorkflowDoc:
    """A parsed workflow plus its order-preserving normalized mapping."""

    repo_id: str
    path: str
    triggers: list[str]
    jobs: list[Job]
    raw_text: str
    mapping: dict = field(repr=False, default_factory=dict)

    def structure_equal(self, other: "WorkflowDoc") -> bool:
        return self.mapping == other.mapping


def _extract_triggers(on_value: Any) -> list[str]:
    if on_value is None:
        return []
    if isinstance(on_value, str):
        return [on_value]
    if isinstance(on_value, list):
        return [str(v) for v in on_value]
    if isinstance(on_value, dict):
        return [str(k) for k in on_value]
    return [str(on_value)]


def _container_image(container: Any) -> Optional[str]:
    if container is None:
        return None
    if isinstance(container, str):
        return container
    if isinstance(container, dict):
        image = container.get("image")
        return None if image is None else str(image)
    return None


def _step_source_blocks(text: str) -> dict[str, list[str]]:
    """Slice the original source text of each step via YAML node marks.

    Returns job_id -> list of source snippets; falls back to empty lists when
    the node tree does not line up (the caller then re-dumps the step dict).
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(root, yaml.MappingNode):
        return {}
    blocks: dict[str, list[str]] = {}
    for key_node, value_node in root.value:
        if str(key_node.value) != "jobs":
            continue
        if not isinstance(value_node, yaml.MappingNode):
            return {}
        for job_key, job_node in value_node.value:
            job_id = str(job_key.value)
            snippets: list[str] = []
            if isinstance(job_node, yaml.MappingNode):
                for jk, jv in job_node.value:
                    if str(jk.value) == "steps" and isinstance(jv, yaml.SequenceNode):
                        for item in jv.value:
                            snippets.append(
                                text[item.start_mark.index:item.end_mark.index].rstrip()
                            )
            blocks[job_id] = snippets
    return blocks


def _parse_step(step_map: Any, raw_block: str) -> Step:
    if not isinstance(step_map, dict):
        raise NotAWorkflow(f"step is not a mapping: {step_map!r}")
    uses = step_map.get("uses")
    run = step_map.get("run")
    if uses is None and run is None:
        raise NotAWorkflow(f"step has neither 'uses' nor 'run': {step_map!r}")
    if uses is not None and run is not None:
        raise NotAWorkflow(f"step has both 'uses' and 'run': {step_map!r}")
    if uses is not None and not str(uses):
        raise NotAWorkflow("empty 'uses' reference")
    name = step_map.get("name")
    with_args = step_map.get("with") or {}
    if not isinstance(with_args, dict):
        with_args = {"value": with_args}
    return Step(
        name=None if name is None else str(name),
        uses=None if uses is None else str(uses),
        run=None if run is None else str(run),
        with_args=with_args,
        raw_block=raw_block,
    )


def parse_workflow(text: str, repo_id: str = "", path: str = "") -> WorkflowDoc:
    """Parse workflow YAML text, preserving job/step order and unknown keys.

    Raises :class:`ParseError` for invalid YAML and :class:`NotAWorkflow`
    when there is no non-empty top-level ``jobs`` mapping.
    """
    try:
        loaded = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML in {path or '<text>'}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise NotAWorkflow(f"{path or '<text>'}: top level is not a mapping")
    mapping = _norm_value(loaded)
    jobs_map = mapping.get("jobs")
    if not isinstance(jobs_map, dict) or not jobs_map:
        raise NotAWorkflow(f"{path or '<text>'}: no non-empty 'jobs' mapping")

    source_blocks = _step_source_blocks(text)
    jobs: list[Job] = []
    for job_id, job_map in jobs_map.items():
        if not isinstance(job_map, dict):
            raise NotAWorkflow(f"job {job_id!r} is not a mapping")
        raw_steps = job_map.get("steps") or []
        if not isinstance(raw_steps, list):
            raise NotAWorkflow(f"job {job_id!r}: 'steps' is not a list")
        snippets = source_blocks.get(job_id, [])
        steps = []
        for i, step_map in enumerate(raw_steps):
            raw = snippets[i] if i < len(snippets) else json.dumps(step_map)
            steps.append(_parse_step(step_map, raw))
        runs_on = job_map.get("runs-on")
        jobs.append(
            Job(
                job_id=str(job_id),
                runs_on=None if runs_on is None else str(runs_on),
                container_image=_container_image(job_map.get("container")),
                steps=steps,
            )
        )
    return WorkflowDoc(
        repo_id=repo_id,
        path=path,
        triggers=_extract_triggers(mapping.get("on")),
        jobs=jobs,
        raw_text=text,
        mapping=mapping,
    )


def canonical_text(value: Any) -> str:
    """Render any normalized mapping/list/scalar as deterministic JSON."""
    return json.dumps(value, ensure_ascii=False, default=str)


def canonicalize(doc: WorkflowDoc) -> str:
    """Single-line JSON-like rendering of the workflow, keys in source order."""
    return canonical_text(doc.mapping)


@dataclass(frozen=True)
class Token:
    text: str
    category: Optional[object] = None


@dataclass
class TokenStream:
    tokens: list[Token]
    source: Optional[WorkflowDoc] = None

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)


def tokenize_texts(text: str) -> list[str]:
    """Split canonical text into tokens.

    Outside quoted strings the characters ``{ } [ ] : ,`` and ``"`` are
    individual tokens and whitespace separates the rest. Inside quoted
    strings only whitespace splits (so command options like ``-v`` survive as
    tokens), with the two-character escape ``\\n`` kept as its own token to
    preserve line boundaries of multi-line ``run`` scripts.
    """
    tokens: list[str] = []
    buf: list[str] = []

    def flush() -> None:
        if buf:
            tokens.append("".join(buf))
            buf.clear()

    in_string = False
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if in_string:
            if ch == "\\" and i + 1 < n:
                nxt = text[i + 1]
                if nxt == "n":
                    flush()
                    tokens.append("\\n")
                else:
                    buf.append(ch)
                    buf.append(nxt)
                i += 2
                continue
            if ch == '"':
                flush()
                tokens.append('"')
                in_string = False
            elif ch.isspace():
                flush()
            else:
                buf.append(ch)
            i += 1
        else:
            if ch == '"':
                flush()
                tokens.append('"')
                in_string = True
            elif ch in STRUCTURAL_CHARS:
                flush()
                tokens.append(ch)
            elif ch.isspace():
                flush()
            else:
                buf.append(ch)
            i += 1
    flush()
    return tokens


def tokenize(canonical: str, source: Optional[WorkflowDoc] = None) -> TokenStream:
    """Tokenize canonical text into an (untagged) :class:`TokenStream`."""
    return TokenStream([Token(t) for t in tokenize_texts(canonical)], source=source)
