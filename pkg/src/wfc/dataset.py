"""Training/evaluation instance generation, filtering, and project splits.

Three instance kinds are produced:

* masked pre-training instances (sentinel span masking of canonical text),
* "next step" (NS) instances: predict step i from everything written before it,
* "job completion" (JC) instances: predict step i given the full previous
  steps, a ``<TO_BE_PREDICTED>`` marker in its place, and name-only skeletons
  (``<FOR-LATER-USE>``) for the steps after it.

Splitting assigns whole projects to train/eval/test so no project spans
partitions.
"""

from __future__ import annotations

import copy
import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .abstraction import abstract_text
from .workflow import WorkflowDoc, canonical_text, canonicalize, tokenize_texts

SENTINEL_FORMAT = "<extra_id_{}>"
TO_BE_PREDICTED = "<TO_BE_PREDICTED>"
FOR_LATER_USE = "<FOR-LATER-USE>"

PARTITIONS = ("train", "eval", "test")

_MARK_PREDICT = "\x00PREDICT\x00"
_MARK_LATER = "\x00LATER\x00"
_MARK_STEP = "\x00STEP\x00"


@dataclass
class MaskedInstance:
    input: str
    target: str
    source_path: str = ""

    def to_dict(self) -> dict:
        return {"input": self.input, "target": self.target, "path": self.source_path}


@dataclass
class Instance:
    id: str
    mode: str  # "NS" | "JC"
    representation: str  # "raw" | "abstracted"
    input: str
    target: str
    repo: str
    path: str
    job: str
    step: int  # 1-based step index

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "mode": self.mode,
            "repr": self.representation,
            "input": self.input,
            "target": self.target,
            "repo": self.repo,
            "path": self.path,
            "job": self.job,
            "step": self.step,
        }

    @classmethod
    def from_dict(cls, row: Mapping) -> "Instance":
        return cls(
            id=row["id"],
            mode=row["mode"],
            representation=row["repr"],
            input=row["input"],
            target=row["target"],
            repo=row["repo"],
            path=row["path"],
            job=row["job"],
            step=row["step"],
        )


def _instance_id(mode: str, representation: str, repo: str, path: str, job: str, step: int) -> str:
    key = "|".join((mode, representation, repo, path, job, str(step)))
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


def build_pretrain_instances(
    corpus: Sequence[str] | Sequence[tuple[str, str]],
    mask_rate: float = 0.15,
    seed: int = 0,
) -> list[MaskedInstance]:
    """Mask ``round(mask_rate * #tokens)`` token positions of each text.

    Each corpus entry is either a canonical text or a ``(path, text)`` pair.
    Masked positions get numbered sentinels in position order; the target
    lists each sentinel followed by the original token. Texts where the
    rounded mask count is zero are skipped. Deterministic in ``seed``.
    """
    if not 0 < mask_rate < 1:
        raise ValueError(f"mask_rate must be in (0, 1), got {mask_rate}")
    out: list[MaskedInstance] = []
    for index, entry in enumerate(corpus):
        path, text = entry if isinstance(entry, tuple) else ("", entry)
        tokens = tokenize_texts(text)
        k = round(mask_rate * len(tokens))
        if k == 0:
            continue
        rng = random.Random(f"{seed}:{index}")
        positions = sorted(rng.sample(range(len(tokens)), k))
        masked = list(tokens)
        target_parts = []
        for sentinel_idx, pos in enumerate(positions):
            sentinel = SENTINEL_FORMAT.format(sentinel_idx)
            target_parts.append(f"{sentinel} {tokens[pos]}")
            masked[pos] = sentinel
        out.append(
            MaskedInstance(
                input=" ".join(masked),
                target=" ".join(target_parts),
                source_path=path,
            )
        )
    return out


def _render_with_step_marker(doc: WorkflowDoc, job_id: str, step_idx: int) -> str:
    """Canonical text with step ``step_idx`` of ``job_id`` replaced by a marker."""
    mapping = copy.deepcopy(doc.mapping)
    mapping["jobs"][job_id]["steps"][step_idx] = _MARK_STEP
    return canonical_text(mapping)


def _step_canonical(doc: WorkflowDoc, job_id: str, step_idx: int) -> str:
    return canonical_text(doc.mapping["jobs"][job_id]["steps"][step_idx])


def _maybe_abstract(text: str, representation: str) -> str:
    if representation == "abstracted":
        return abstract_text(text)
    return text


def build_ns_instances(doc: WorkflowDoc, representation: str = "raw") -> list[Instance]:
    """One instance per step: input is everything preceding the step."""
    instances = []
    for job in doc.jobs:
        for i in range(len(job.steps)):
            marked = _render_with_step_marker(doc, job.job_id, i)
            cut = marked.index(json.dumps(_MARK_STEP))
            prefix = marked[:cut].rstrip()
            target = _step_canonical(doc, job.job_id, i)
            instances.append(
                Instance(
                    id=_instance_id("NS", representation, doc.repo_id, doc.path, job.job_id, i + 1),
                    mode="NS",
                    representation=representation,
                    input=_maybe_abstract(prefix, representation),
                    target=_maybe_abstract(target, representation),
                    repo=doc.repo_id,
                    path=doc.path,
                    job=job.job_id,
                    step=i + 1,
                )
            )
    return instances


def _jc_entry(step_map, marker: str):
    """Skeleton entry for a step: keep the name (when present) plus a marker."""
    if isinstance(step_map, Mapping) and step_map.get("name") is not None:
        return {"name": step_map["name"], "body": marker}
    return marker


def _render_jc_input(doc: WorkflowDoc, job_id: str, step_idx: int) -> str:
    mapping = copy.deepcopy(doc.mapping)
    steps = mapping["jobs"][job_id]["steps"]
    steps[step_idx] = _jc_entry(steps[step_idx], _MARK_PREDICT)
    for j in range(step_idx + 1, len(steps)):
        steps[j] = _jc_entry(steps[j], _MARK_LATER)
    text = canonical_text(mapping)
    for marker, tag in ((_MARK_PREDICT, TO_BE_PREDICTED), (_MARK_LATER, FOR_LATER_USE)):
        text = text.replace(json.dumps(marker), tag)
        text = text.replace('"body": ' + tag, tag)
    return text


def build_jc_instances(doc: WorkflowDoc, representation: str = "raw") -> list[Instance]:
    """One instance per step: prior steps full, this step marked, later steps
    reduced to their names."""
    instances = []
    for job in doc.jobs:
        for i in range(len(job.steps)):
            text = _render_jc_input(doc, job.job_id, i)
            target = _step_canonical(doc, job.job_id, i)
            instances.append(
                Instance(
                    id=_instance_id("JC", representation, doc.repo_id, doc.path, job.job_id, i + 1),
                    mode="JC",
                    representation=representation,
                    input=_maybe_abstract(text, representation),
                    target=_maybe_abstract(target, representation),
                    repo=doc.repo_id,
                    path=doc.path,
                    job=job.job_id,
                    step=i + 1,
                )
            )
    return instances


def filter_corpus(
    instances: Iterable[Instance], token_cap: int = 1024
) -> tuple[list[Instance], list[tuple[Instance, str]]]:
    """Drop non-ASCII, over-length, and duplicate instances, with reasons."""
    kept: list[Instance] = []
    dropped: list[tuple[Instance, str]] = []
    seen: set[str] = set()
    for inst in instances:
        combined = inst.input + "\n" + inst.target
        if any(ord(ch) > 127 for ch in combined):
            dropped.append((inst, "non-ascii"))
            continue
        if len(tokenize_texts(inst.input)) >= token_cap:
            dropped.append((inst, "too-long"))
            continue
        key = hashlib.sha1(combined.encode("utf-8")).hexdigest()
        if key in seen:
            dropped.append((inst, "duplicate"))
            continue
        seen.add(key)
        kept.append(inst)
    return kept, dropped


@dataclass
class SplitAssignment:
    assignment: dict[str, str]  # project -> partition
    ratios: tuple[float, float, float]
    counts: dict[str, int] = field(default_factory=dict)  # partition -> workflow count

    def partition_of(self, project: str) -> str:
        return self.assignment[project]

    def realized_ratios(self) -> dict[str, float]:
        total = sum(self.counts.values()) or 1
        return {p: self.counts.get(p, 0) / total for p in PARTITIONS}

    def max_deviation(self) -> float:
        realized = self.realized_ratios()
        return max(abs(realized[p] - r) for p, r in zip(PARTITIONS, self.ratios))

    def to_dict(self) -> dict:
        return {
            "assignment": dict(sorted(self.assignment.items())),
            "ratios": list(self.ratios),
            "counts": dict(self.counts),
        }


def split_by_project(
    project_sizes: Mapping[str, int],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> SplitAssignment:
    """Greedy leakage-free split: whole projects, largest first, each placed
    where the remaining deficit is biggest. Ties break in partition order
    after a seeded shuffle of equal-size projects."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    total = sum(project_sizes.values())
    targets = {p: r * total for p, r in zip(PARTITIONS, ratios)}
    assigned = {p: 0 for p in PARTITIONS}
    projects = list(project_sizes)
    random.Random(seed).shuffle(projects)
    projects.sort(key=lambda proj: -project_sizes[proj])  # stable: keeps shuffle order within size ties
    assignment: dict[str, str] = {}
    for proj in projects:
        part = max(PARTITIONS, key=lambda p: (targets[p] - assigned[p], -PARTITIONS.index(p)))
        assignment[proj] = part
        assigned[part] += project_sizes[proj]
    return SplitAssignment(assignment=assignment, ratios=tuple(ratios), counts=assigned)


def build_all_instances(
    docs: Iterable[WorkflowDoc],
    representations: Sequence[str] = ("raw", "abstracted"),
) -> dict[tuple[str, str], list[Instance]]:
    """NS and JC instances for every doc, keyed by (mode, representation)."""
    out: dict[tuple[str, str], list[Instance]] = {
        (mode, rep): [] for mode in ("NS", "JC") for rep in representations
    }
    for doc in docs:
        for rep in representations:
            out[("NS", rep)].extend(build_ns_instances(doc, rep))
            out[("JC", rep)].extend(build_jc_instances(doc, rep))
    return out


def canonical_corpus(docs: Iterable[WorkflowDoc]) -> list[tuple[str, str]]:
    """(path, canonical text) pairs for a parsed corpus."""
    return [(doc.path, canonicalize(doc)) for doc in docs]
