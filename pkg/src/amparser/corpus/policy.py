"""Edge ownership and source naming for blob decomposition.

Every AMR edge belongs to the blob of exactly one of its endpoints.  Argument
edges go with the node they start at; modifier-like edges go with their
target.  Edges between fragments turn into placeholder sources whose names
come from the edge labels.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple

from ..amtypes import check_source_name

ARG_RE = re.compile(r"^ARG(\d+)$")


def _default_target_owned() -> FrozenSet[str]:
    return frozenset({"manner", "mod", "time", "location", "poss", "degree", "quant"})


@dataclass
class BlobPolicy:
    target_owned: FrozenSet[str] = field(default_factory=_default_target_owned)
    # fixed source names for labels not covered by argument promotion
    names: Dict[str, str] = field(default_factory=lambda: {"domain": "dom"})
    modify_name: str = "m"
    # object names after the subject, in promotion order
    object_names: Tuple[str, ...] = ("o", "o2", "o3", "o4", "o5", "o6")

    def owned_by_target(self, label: str) -> bool:
        return label in self.target_owned

    def arg_names(self, labels: Sequence[str]) -> Dict[str, str]:
        """Source names for the ARG edges leaving one node.

        Arguments are named s, o, o2, ... in numeric order.  A missing ARG1
        therefore shifts higher arguments down, and without ARG0 the lowest
        argument becomes the subject (unaccusative).
        """
        args = sorted({lab for lab in labels if ARG_RE.match(lab)}, key=lambda lab: int(lab[3:]))
        out = {}
        names = ("s",) + self.object_names
        for lab, name in zip(args, names):
            out[lab] = name
        if len(args) > len(names):
            for lab in args[len(names) :]:
                out[lab] = "o" + lab[3:]
        return out

    def label_name(self, label: str) -> str:
        if label in self.names:
            return self.names[label]
        name = re.sub(r"[^a-z0-9]", "", label.lower()) or "x"
        if name == "root" or name == "s" or name in self.object_names or name == self.modify_name:
            name = name + "x"
        return check_source_name(name)

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["target_owned"] = sorted(self.target_owned)
        doc["object_names"] = list(self.object_names)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> "BlobPolicy":
        doc = dict(doc)
        if "target_owned" in doc:
            doc["target_owned"] = frozenset(doc["target_owned"])
        if "object_names" in doc:
            doc["object_names"] = tuple(doc["object_names"])
        return cls(**doc)


def edge_names(policy: BlobPolicy, out_labels: List[str]) -> Dict[str, str]:
    """Names for the source-owned labels leaving a node."""
    names = policy.arg_names(out_labels)
    for lab in out_labels:
        if lab not in names:
            names[lab] = policy.label_name(lab)
    return names
