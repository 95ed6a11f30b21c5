"""Dataset manifests and reach-exclusive train/val/test splits.

A manifest row describes one co-registered scene: imagery paths, the
reaches it covers, and per-node reference widths from other sensors. The
split logic guarantees that a river reach never contributes scenes to more
than one of train/val/test, so no river leaks across splits.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field

from .errors import ValidationError
from .rng import SplitMix64

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
UNASSIGNED = "unassigned"


@dataclass
class SceneRecord:
    scene_id: str
    acquisition_time: str
    planetscope_path: str
    label_path: str
    sentinel_path: str = None
    reach_ids: list[str] = field(default_factory=list)
    node_refs: list[tuple[str, dict[str, float]]] = field(default_factory=list)
    split: str = UNASSIGNED

    def __post_init__(self):
        if not self.reach_ids:
            raise ValidationError(f"scene {self.scene_id} references no reaches")
        if self.split not in SPLITS + (UNASSIGNED,):
            raise ValidationError(f"scene {self.scene_id}: unknown split '{self.split}'")
        for node_id, widths in self.node_refs:
            for source, value in widths.items():
                if value <= 0:
                    raise ValidationError(
                        f"scene {self.scene_id}, node {node_id}: "
                        f"{source} width must be > 0, got {value}"
                    )


@dataclass
class SplitAssignment:
    """reach_id -> split name; a partition of the manifest's reaches."""

    by_reach: dict[str, str]

    def of(self, reach_id: str) -> str:
        return self.by_reach[reach_id]

    def counts(self) -> dict[str, int]:
        out = {name: 0 for name in SPLITS}
        for split in self.by_reach.values():
            out[split] += 1
        return out


@dataclass
class ExclusivityReport:
    violations: list[tuple[str, list[str]]]

    @property
    def ok(self) -> bool:
        return not self.violations


def _record_from_dict(raw: dict, where: str) -> SceneRecord:
    try:
        node_refs = []
        for entry in raw.get("node_refs", []):
            if isinstance(entry, dict):
                node_id = str(entry["node_id"])
                widths = {
                    k: float(v)
                    for k, v in entry.items()
                    if k != "node_id" and v is not None
                }
            else:
                node_id, widths = entry
                widths = {k: float(v) for k, v in dict(widths).items()}
            node_refs.append((node_id, widths))
        return SceneRecord(
            scene_id=str(raw["scene_id"]),
            acquisition_time=str(raw.get("acquisition_time", "")),
            planetscope_path=str(raw.get("planetscope_path", "")),
            label_path=str(raw.get("label_path", "")),
            sentinel_path=raw.get("sentinel_path"),
            reach_ids=[str(r) for r in raw.get("reach_ids", [])],
            node_refs=node_refs,
            split=str(raw.get("split") or UNASSIGNED),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed manifest row in {where}: {exc}") from exc


def load_manifest(path: str) -> list[SceneRecord]:
    """Read scene records from a JSON or CSV manifest.

    JSON holds the full schema (a list of records or ``{"scenes": [...]}``);
    CSV carries the scalar columns with reach ids ';'-joined. Paths that do
    not exist on disk are logged, not fatal.
    """
    if path.endswith(".csv"):
        records = []
        with open(path, newline="") as fh:
            for i, row in enumerate(csv.DictReader(fh)):
                row = dict(row)
                row["reach_ids"] = [r for r in (row.get("reach_ids") or "").split(";") if r]
                row.pop("node_refs", None)
                records.append(_record_from_dict(row, f"{path}:{i + 2}"))
    else:
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
        rows = doc["scenes"] if isinstance(doc, dict) else doc
        records = [_record_from_dict(raw, path) for raw in rows]

    seen = set()
    for record in records:
        if record.scene_id in seen:
            raise ValidationError(f"duplicate scene_id '{record.scene_id}' in {path}")
        seen.add(record.scene_id)
        for label, p in (
            ("planetscope", record.planetscope_path),
            ("sentinel", record.sentinel_path),
            ("label", record.label_path),
        ):
            if p and not os.path.exists(p):
                log.warning("scene %s: %s path does not exist: %s", record.scene_id, label, p)
    return records


def _reach_components(records: list[SceneRecord]) -> list[list[str]]:
    """Group reaches that share a scene; such reaches must split together."""
    parent: dict[str, str] = {}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for record in records:
        for reach in record.reach_ids:
            parent.setdefault(reach, reach)
        head = find(record.reach_ids[0])
        for reach in record.reach_ids[1:]:
            parent[find(reach)] = head

    groups: dict[str, list[str]] = {}
    for reach in sorted(parent):
        groups.setdefault(find(reach), []).append(reach)
    return sorted(groups.values(), key=lambda g: g[0])


def split_by_reach(records: list[SceneRecord], fractions=(0.7, 0.15, 0.15), seed: int = 0) -> SplitAssignment:
    """Assign every reach to train/val/test, meeting fractions by scene count.

    Reaches connected through shared scenes are grouped and assigned as a
    unit, so scene-level exclusivity holds by construction. Groups are
    shuffled with a seeded generator (after sorting by id, so manifest row
    order never matters) and greedily placed into the split furthest below
    its scene-count target.
    """
    if len(fractions) != len(SPLITS):
        raise ValidationError(f"need {len(SPLITS)} fractions, got {len(fractions)}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions must sum to 1, got {sum(fractions)}")
    components = _reach_components(records)
    n_reaches = sum(len(c) for c in components)
    if n_reaches < len(SPLITS):
        raise ValidationError(
            f"cannot split {n_reaches} reaches into {len(SPLITS)} parts"
        )

    scene_count: dict[str, int] = {}
    for record in records:
        head = record.reach_ids[0]
        scene_count[head] = scene_count.get(head, 0) + 1
    comp_scenes = []
    reach_to_comp = {}
    for i, comp in enumerate(components):
        comp_scenes.append(sum(scene_count.get(reach, 0) for reach in comp))
        for reach in comp:
            reach_to_comp[reach] = i

    order = list(range(len(components)))
    SplitMix64(seed).spawn("split").shuffle(order)

    total = max(sum(comp_scenes), 1)
    targets = [f * total for f in fractions]
    assigned = [0.0, 0.0, 0.0]
    by_reach: dict[str, str] = {}
    for comp_idx in order:
        deficits = [targets[i] - assigned[i] for i in range(len(SPLITS))]
        best = max(range(len(SPLITS)), key=lambda i: (deficits[i], -i))
        assigned[best] += comp_scenes[comp_idx]
        for reach in components[comp_idx]:
            by_reach[reach] = SPLITS[best]
    return SplitAssignment(by_reach)


def assign_scene_splits(records: list[SceneRecord], assignment: SplitAssignment) -> list[str]:
    """Stamp each scene with its split; returns warnings for conflicted scenes.

    A scene whose reaches landed in different splits goes to its first
    reach's split (reach exclusivity is the hard constraint, so such a
    manifest/assignment pair is already suspect).
    """
    warnings = []
    for record in records:
        splits = {assignment.of(r) for r in record.reach_ids if r in assignment.by_reach}
        target = assignment.of(record.reach_ids[0])
        if len(splits) > 1:
            message = (
                f"scene {record.scene_id} references reaches in splits "
                f"{sorted(splits)}; assigned to '{target}' from its first reach"
            )
            log.warning("%s", message)
            warnings.append(message)
        record.split = target
    return warnings


def validate_exclusivity(records: list[SceneRecord], assignment: SplitAssignment) -> ExclusivityReport:
    """Check that no reach receives scenes from more than one split."""
    reach_splits: dict[str, set] = {}
    for record in records:
        split = (
            record.split
            if record.split != UNASSIGNED
            else assignment.of(record.reach_ids[0])
        )
        for reach in record.reach_ids:
            reach_splits.setdefault(reach, set()).add(split)
    violations = [
        (reach, sorted(splits))
        for reach, splits in sorted(reach_splits.items())
        if len(splits) > 1
    ]
    return ExclusivityReport(violations)
