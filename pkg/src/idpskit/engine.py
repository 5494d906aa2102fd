"""Streaming detection and prevention: classify records, apply policy.

Records arrive as KDD-format lines, with (42 fields) or without (41
fields) labels; labels never influence decisions, only the optional live
accuracy tallies. Malformed lines degrade to an alert verdict — the
engine fails safe and loud, and neighboring records are unaffected.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import IdpsError
from .ingest import RawRecord, encode_record, map_attack
from .metrics import alarm_outcome
from .mlp import forward
from .schema import N_CLASSES, N_FEATURES

ALLOW = "allow"
ALERT = "alert"
BLOCK = "block"

_ACTIONS = (ALLOW, ALERT, BLOCK)


@dataclass(frozen=True)
class Policy:
    """Class id -> action table; must cover all classes 0..5."""

    action_of: dict

    def __post_init__(self):
        for cid in range(N_CLASSES):
            if self.action_of.get(cid) not in _ACTIONS:
                raise ValueError(f"policy must map class {cid} to one of {_ACTIONS}")


def default_policy() -> Policy:
    """Allow normal, block the four attack categories, alert on other."""
    return Policy(action_of={0: ALLOW, 1: BLOCK, 2: BLOCK, 3: BLOCK,
                             4: BLOCK, 5: ALERT})


def decide(predicted: int, policy: Policy) -> str:
    """Pure policy lookup."""
    return policy.action_of[predicted]


@dataclass(frozen=True)
class Verdict:
    """One decision: record index, predicted class, action, class scores.

    predicted is -1 for malformed input (action alert, scores zero);
    actual carries the stream label when one was present. timestamp is a
    monotonic sequence number in emission order.
    """

    record_index: int
    predicted: int
    action: str
    scores: tuple
    timestamp: int
    actual: int | None = None
    error: str | None = None


@dataclass
class StreamSummary:
    """Running totals over one stream."""

    n_records: int = 0
    n_errors: int = 0
    action_counts: dict = field(default_factory=lambda: {a: 0 for a in _ACTIONS})
    alarm_counts: dict = field(default_factory=dict)

    def update(self, verdict: Verdict) -> None:
        self.n_records += 1
        self.action_counts[verdict.action] += 1
        if verdict.error is not None:
            self.n_errors += 1
        elif verdict.actual is not None:
            kind = alarm_outcome(verdict.predicted, verdict.actual)
            self.alarm_counts[kind] = self.alarm_counts.get(kind, 0) + 1

    def render(self) -> str:
        lines = [f"records {self.n_records}", f"errors {self.n_errors}"]
        for action in _ACTIONS:
            lines.append(f"{action} {self.action_counts[action]}")
        for kind in ("true_positive", "false_positive",
                     "false_negative", "true_negative"):
            if kind in self.alarm_counts:
                lines.append(f"{kind} {self.alarm_counts[kind]}")
        return "\n".join(lines)


def _parse_stream_line(line, schema, taxonomy):
    """Accept 41 (unlabeled) or 42 (labeled) fields; return (record, actual)."""
    fields = [f.strip() for f in line.split(",")]
    if len(fields) == N_FEATURES:
        return RawRecord(features=fields, label="unlabeled"), None
    if len(fields) == N_FEATURES + 1:
        label = fields[-1]
        if label.endswith("."):
            label = label[:-1]
        if not label:
            raise IdpsError("empty label")
        return RawRecord(features=fields[:-1], label=label), \
            map_attack(label, taxonomy)
    raise IdpsError(
        f"expected {N_FEATURES} or {N_FEATURES + 1} fields, got {len(fields)}"
    )


def process_stream(lines, bundle, schema, policy: Policy | None = None):
    """Yield one Verdict per input line, in arrival order.

    bundle is a loaded ModelBundle; its scaler and taxonomy are applied to
    every record. Encoding is strict: symbols unknown to the schema are
    treated as malformed input (alert), never silently coded.
    """
    if policy is None:
        policy = default_policy()
    zeros = tuple(0.0 for _ in range(bundle.network.layout.output_size))
    index = -1
    for line in lines:
        line = line.strip()
        if not line:
            continue
        index += 1
        try:
            raw, actual = _parse_stream_line(line, schema, bundle.taxonomy)
            vec, _ = encode_record(raw, schema, bundle.taxonomy, strict=True)
            scaled = bundle.scaler.transform(vec.reshape(1, -1))[0]
            scores = forward(bundle.network, scaled)
            predicted = int(np.argmax(scores))
            yield Verdict(
                record_index=index,
                predicted=predicted,
                action=decide(predicted, policy),
                scores=tuple(float(s) for s in scores),
                timestamp=index,
                actual=actual,
            )
        except (IdpsError, ValueError) as exc:
            yield Verdict(
                record_index=index,
                predicted=-1,
                action=ALERT,
                scores=zeros,
                timestamp=index,
                actual=None,
                error=str(exc),
            )
