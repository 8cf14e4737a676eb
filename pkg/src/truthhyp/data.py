"""Claim data model: datasets of (source, object, value) triples and truth sets.

Identifiers are compared as exact strings after trimming surrounding
whitespace.  Every iteration order (sources, objects, values) is ascending
lexicographic, so all downstream numerics are deterministic.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

from .exceptions import ClaimsParseError, ConsistencyError, ModeError

logger = logging.getLogger(__name__)

#: Separator used to build joint values; forbidden inside ingested values.
DELIMITER = "|"

CLAIMS_HEADER = ("source", "object", "value")
TRUTH_HEADER = ("object", "value")


class Mode(str, Enum):
    SINGLE = "single"
    MULTI = "multi"


def _frozen(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


class ClaimDataset:
    """Immutable collection of claims with per-source/object/value indexes.

    Parameters
    ----------
    claims : iterable of (source, object, value)
        Raw triples.  Fields are stripped; duplicates are collapsed.
    mode : Mode or str
        ``"single"`` requires exactly one value per (source, object) pair.

    Attributes
    ----------
    n_rows : int
        Number of triples supplied, before de-duplication.
    duplicates : int
        Number of triples dropped as exact duplicates.
    """

    def __init__(self, claims: Iterable[tuple[str, str, str]], mode: Mode | str = Mode.SINGLE):
        self.mode = Mode(mode)
        unique = set()
        n_rows = 0
        for row in claims:
            if len(row) != 3:
                raise ClaimsParseError(f"expected 3 fields, got {len(row)}")
            s, o, v = (str(x).strip() for x in row)
            if not (s and o and v):
                raise ClaimsParseError(f"empty field in claim {row!r}")
            unique.add((s, o, v))
            n_rows += 1
        self.n_rows = n_rows
        self.duplicates = n_rows - len(unique)

        ordered = sorted(unique)
        self.claims: tuple[tuple[str, str, str], ...] = tuple(ordered)
        self.sources: tuple[str, ...] = tuple(sorted({c[0] for c in ordered}))
        self.objects: tuple[str, ...] = tuple(sorted({c[1] for c in ordered}))
        self.facts: tuple[tuple[str, str], ...] = tuple(sorted({(c[1], c[2]) for c in ordered}))

        self._source_index = {s: i for i, s in enumerate(self.sources)}
        self._object_index = {o: i for i, o in enumerate(self.objects)}
        self._fact_index = {f: i for i, f in enumerate(self.facts)}

        self.fact_object = _frozen(
            np.array([self._object_index[o] for o, _ in self.facts], dtype=np.int64))
        self.claim_source = _frozen(
            np.array([self._source_index[s] for s, _, _ in ordered], dtype=np.int64))
        self.claim_fact = _frozen(
            np.array([self._fact_index[(o, v)] for _, o, v in ordered], dtype=np.int64))
        self.claim_object = _frozen(self.fact_object[self.claim_fact])

        if self.mode is Mode.SINGLE:
            seen = set()
            for s, o, _ in ordered:
                if (s, o) in seen:
                    raise ModeError(
                        f"single-valued mode violated: source {s!r} claims several values on object {o!r}")
                seen.add((s, o))

    # -- sizes -------------------------------------------------------------

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_facts(self) -> int:
        return len(self.facts)

    @property
    def n_claims(self) -> int:
        return len(self.claims)

    def __len__(self):
        return self.n_claims

    def __iter__(self) -> Iterator[tuple[str, str, str]]:
        return iter(self.claims)

    def __repr__(self):
        return (f"ClaimDataset(mode={self.mode.value}, sources={self.n_sources}, "
                f"objects={self.n_objects}, values={self.n_facts}, claims={self.n_claims})")

    def stats(self) -> dict:
        return {
            "mode": self.mode.value,
            "sources": self.n_sources,
            "objects": self.n_objects,
            "values": self.n_facts,
            "claims": self.n_claims,
            "rows": self.n_rows,
            "duplicates": self.duplicates,
        }

    # -- integer lookups ---------------------------------------------------

    def source_index(self, source: str) -> int:
        return self._source_index[source]

    def object_index(self, obj: str) -> int:
        return self._object_index[obj]

    def fact_index(self, obj: str, value: str) -> int:
        return self._fact_index[(obj, value)]

    def has_object(self, obj: str) -> bool:
        return obj in self._object_index

    def has_fact(self, obj: str, value: str) -> bool:
        return (obj, value) in self._fact_index

    # -- named indexes -----------------------------------------------------

    @cached_property
    def _indexes(self):
        values = defaultdict(list)
        object_sources = defaultdict(set)
        claimants = defaultdict(list)
        source_values = defaultdict(list)
        source_objects = defaultdict(set)
        claimed = defaultdict(set)
        for s, o, v in self.claims:
            object_sources[o].add(s)
            claimants[(o, v)].append(s)
            source_values[s].append((o, v))
            source_objects[s].add(o)
            claimed[(s, o)].add(v)
        for o, v in self.facts:
            values[o].append(v)
        return {
            "V_o": {o: tuple(vs) for o, vs in values.items()},
            "S_o": {o: tuple(sorted(ss)) for o, ss in object_sources.items()},
            "S_v": {k: tuple(ss) for k, ss in claimants.items()},
            "V_s": {s: tuple(vs) for s, vs in source_values.items()},
            "O_s": {s: tuple(sorted(os_)) for s, os_ in source_objects.items()},
            "V_so": {k: frozenset(vs) for k, vs in claimed.items()},
        }

    def values(self, obj: str) -> tuple[str, ...]:
        """Distinct values claimed on ``obj`` (V_o)."""
        return self._indexes["V_o"][obj]

    def sources_of(self, obj: str) -> tuple[str, ...]:
        """Sources with at least one claim on ``obj`` (S_o)."""
        return self._indexes["S_o"][obj]

    def claimants(self, obj: str, value: str) -> tuple[str, ...]:
        """Sources claiming ``value`` on ``obj`` (S_v)."""
        return self._indexes["S_v"].get((obj, value), ())

    def values_of(self, source: str) -> tuple[tuple[str, str], ...]:
        """(object, value) pairs claimed by ``source`` (V_s)."""
        return self._indexes["V_s"][source]

    def objects_of(self, source: str) -> tuple[str, ...]:
        """Objects covered by ``source`` (O_s)."""
        return self._indexes["O_s"][source]

    def claimed(self, source: str, obj: str) -> frozenset[str]:
        """Value set claimed by ``source`` on ``obj`` (V_{s,o}); empty if none."""
        return self._indexes["V_so"].get((source, obj), frozenset())


class TruthAssignment(Mapping):
    """Mapping ``object -> frozenset of values`` labelled true."""

    def __init__(self, truths: Mapping | Iterable = ()):
        items = truths.items() if isinstance(truths, Mapping) else truths
        data = {}
        for obj, values in items:
            if isinstance(values, str):
                values = (values,)
            data[str(obj)] = frozenset(str(v) for v in values)
        self._data = dict(sorted(data.items()))

    def __getitem__(self, obj):
        return self._data[obj]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __eq__(self, other):
        if isinstance(other, TruthAssignment):
            return self._data == other._data
        return NotImplemented

    def __repr__(self):
        return f"TruthAssignment({len(self)} objects)"

    def single(self, obj: str) -> str:
        """The one value of a single-valued object."""
        (value,) = self._data[obj]
        return value

    def restrict(self, objects: Iterable[str]) -> TruthAssignment:
        return TruthAssignment({o: self._data[o] for o in objects})

    def validate(self, dataset: ClaimDataset) -> TruthAssignment:
        """Check every object exists in ``dataset`` and respects its mode."""
        for obj, values in self._data.items():
            if not dataset.has_object(obj):
                raise ConsistencyError(f"object {obj!r} is not present in the claims")
            if not values:
                raise ConsistencyError(f"object {obj!r} has an empty truth set")
            if dataset.mode is Mode.SINGLE and len(values) != 1:
                raise ModeError(f"object {obj!r} has {len(values)} true values in single-valued mode")
        return self

    def to_rows(self) -> list[tuple[str, str]]:
        return [(o, v) for o, vs in self._data.items() for v in sorted(vs)]


class JointValueView:
    """Canonical joint value per (source, object) and the inverse member map."""

    def __init__(self, joint: Mapping[tuple[str, str], str], members: Mapping[tuple[str, str], frozenset]):
        self.joint = dict(joint)
        self.members = dict(members)

    def joint_value(self, source: str, obj: str) -> str:
        return self.joint[(source, obj)]

    def explode(self, obj: str, joint_value: str) -> frozenset[str]:
        try:
            return self.members[(obj, joint_value)]
        except KeyError:
            raise ConsistencyError(
                f"joint value {joint_value!r} on object {obj!r} is not part of the view") from None


def canonical_joint(values: Iterable[str]) -> str:
    """Order-insensitive joint value: sorted members joined by ``DELIMITER``."""
    return DELIMITER.join(sorted(set(values)))


def split_joint(joint_value: str) -> frozenset[str]:
    return frozenset(joint_value.split(DELIMITER))


def to_joint_view(dataset: ClaimDataset) -> tuple[ClaimDataset, JointValueView]:
    """Collapse each source's value set on an object into one joint value."""
    if dataset.mode is not Mode.MULTI:
        raise ModeError("joint view requires a multi-valued dataset")
    grouped = defaultdict(set)
    for s, o, v in dataset.claims:
        if DELIMITER in v:
            raise ConsistencyError(f"value {v!r} contains the joint delimiter {DELIMITER!r}")
        grouped[(s, o)].add(v)
    joint = {}
    members = {}
    for (s, o), vs in grouped.items():
        jv = canonical_joint(vs)
        joint[(s, o)] = jv
        members[(o, jv)] = frozenset(vs)
    joint_ds = ClaimDataset(((s, o, jv) for (s, o), jv in joint.items()), Mode.SINGLE)
    return joint_ds, JointValueView(joint, members)


def explode_truths(joint_truths: Mapping[str, Iterable[str]], view: JointValueView) -> TruthAssignment:
    """Replace each object's winning joint value(s) by the member values."""
    out = {}
    for obj, joints in joint_truths.items():
        if isinstance(joints, str):
            joints = (joints,)
        values = set()
        for jv in joints:
            values |= view.explode(obj, jv)
        out[obj] = values
    return TruthAssignment(out)


# -- file formats ----------------------------------------------------------

def _read_rows(path, header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        first = next(reader, None)
        if first is None or tuple(f.strip() for f in first) != header:
            raise ClaimsParseError(f"expected header {','.join(header)}", line=1)
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ClaimsParseError(
                    f"expected {len(header)} columns, got {len(row)}", line=reader.line_num)
            fields = tuple(f.strip() for f in row)
            if not all(fields):
                raise ClaimsParseError("empty field", line=reader.line_num)
            yield reader.line_num, fields


def load_claims(path, mode: Mode | str = Mode.SINGLE) -> ClaimDataset:
    """Read a ``source,object,value`` CSV file into a validated dataset."""
    rows = []
    for line, (s, o, v) in _read_rows(path, CLAIMS_HEADER):
        if DELIMITER in v:
            raise ClaimsParseError(f"value contains reserved character {DELIMITER!r}", line=line)
        rows.append((s, o, v))
    dataset = ClaimDataset(rows, mode)
    logger.info("loaded %d rows from %s (%d duplicates collapsed)", dataset.n_rows, path, dataset.duplicates)
    return dataset


def load_truth(path, mode: Mode | str = Mode.SINGLE) -> TruthAssignment:
    """Read an ``object,value`` CSV file; several rows per object in multi mode."""
    mode = Mode(mode)
    grouped = defaultdict(set)
    for line, (o, v) in _read_rows(path, TRUTH_HEADER):
        grouped[o].add(v)
        if mode is Mode.SINGLE and len(grouped[o]) > 1:
            raise ModeError(f"line {line}: object {o!r} has several true values in single-valued mode")
    return TruthAssignment(grouped)


def write_claims(dataset: ClaimDataset, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CLAIMS_HEADER)
        writer.writerows(dataset.claims)
    return path


def write_truth(truth: TruthAssignment, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRUTH_HEADER)
        writer.writerows(truth.to_rows())
    return path
