"""Certificate records, run configuration and the JSON report document."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = "vdpkit-report/1"


class BudgetExceeded(RuntimeError):
    """A Gröbner computation ran past its configured step budget."""


@dataclass
class Certificate:
    module: str
    operation: str
    inputs: dict
    verdict: bool
    payload: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.module, self.operation, json.dumps(self.inputs, sort_keys=True, default=str))

    def to_dict(self) -> dict:
        return {
            "module": self.module,
            "operation": self.operation,
            "inputs": jsonable(self.inputs),
            "verdict": "pass" if self.verdict else "fail",
            "payload": jsonable(self.payload),
        }

    def __bool__(self):
        return bool(self.verdict)


def jsonable(obj: Any):
    """Convert certificate payloads to JSON-safe values (polynomials become text)."""
    from vdpkit.poly import MonomialOrder, Polynomial

    if isinstance(obj, Polynomial):
        return str(obj)
    if isinstance(obj, MonomialOrder):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    return str(obj)


DEFAULT_BUDGET = 10**6


@dataclass
class Config:
    n_max_family: int = 7
    n_max_recursion: int = 10
    n_max_homology: int = 20
    n_max_forms: int = 4
    budget: int = DEFAULT_BUDGET
    tol_on: float = 1e-12
    tol_drift: float = 1e-9
    tol_distortion: float = 1e-6
    order: str = "degrevlex"
    degree_bound: int = 2
    seed: int = 0
    flow_steps: int = 1000
    flow_t: float = 1.0
    flow_samples: int = 5

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name in ("order", "seed"):
                continue
            if name == "flow_t":
                if value < 0:
                    raise ValueError("flow_t must be nonnegative")
                continue
            if value <= 0:
                raise ValueError(f"config field {name} must be positive, got {value}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.order not in ("degrevlex", "lex", "deglex"):
            raise ValueError(f"unknown monomial order {self.order!r}")

    @classmethod
    def from_env(cls, **overrides) -> "Config":
        env = os.environ.get("VDPKIT_BUDGET")
        if env and "budget" not in overrides:
            overrides["budget"] = int(env)
        return cls(**overrides)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Report:
    version: str
    config: Config
    records: list[Certificate] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    run: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(r.verdict for r in self.records)

    def add(self, cert: Certificate):
        self.records.append(cert)

    def to_dict(self) -> dict:
        recs = sorted(self.records, key=Certificate.sort_key)
        return {
            "schema": SCHEMA_VERSION,
            "version": self.version,
            "config": self.config.to_dict(),
            "run": dict(self.run),
            "notes": list(self.notes),
            "records": [r.to_dict() for r in recs],
            "summary": {
                "total": len(recs),
                "passed": sum(1 for r in recs if r.verdict),
                "failed": sum(1 for r in recs if not r.verdict),
            },
            "verdict": "pass" if self.verdict else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def summary_lines(self) -> list[str]:
        """Human summary derived from the serialized document."""
        doc = self.to_dict()
        lines = []
        for r in doc["records"]:
            mark = "PASS" if r["verdict"] == "pass" else "FAIL"
            inputs = ", ".join(f"{k}={v}" for k, v in r["inputs"].items())
            lines.append(f"[{mark}] {r['module']}.{r['operation']}({inputs})")
        s = doc["summary"]
        lines.append(f"{s['passed']}/{s['total']} certificates passed; overall {doc['verdict'].upper()}")
        return lines


def load_report(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
    return doc
