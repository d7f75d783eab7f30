import hashlib
import json
from typing import Any, Dict, List

from pydantic import BaseModel


class Verdict(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class Report(BaseModel):
    """
    Output of every command. `timing_ms` is the only field that may differ
    between two runs on the same input and configuration.
    """

    command: str
    etd: str
    input_fingerprint: str
    arguments: Dict[str, Any] = {}
    verdicts: List[Verdict] = []
    witnesses: List[Dict[str, Any]] = []
    dims: Dict[str, Any] = {}
    timing_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def digest(self) -> str:
        payload = self.model_dump(mode="json", exclude={"timing_ms"})
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode()
        ).hexdigest()
