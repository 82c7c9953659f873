"""Hard-decision black-box targets.

Every oracle answers ``benign`` or ``malware`` for an itemset and counts its
queries.  Wire protocols:

* subprocess: the child reads FIMI lines on stdin and answers each with one
  line that is exactly ``benign`` or ``malware``.
* http: ``POST <url>`` with ``{"items": [...]}``; the reply is
  ``{"label": "benign" | "malware"}``.  A bearer token is taken from the
  ``MDLATTACK_ORACLE_TOKEN`` environment variable when set.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Sequence

from .classify import BENIGN, MALWARE, ClassifierModel, classify
from .codetable import load_code_table
from .core import Dataset, Itemset, make_itemset

LABELS = (BENIGN, MALWARE)
TOKEN_ENV = "MDLATTACK_ORACLE_TOKEN"


class OracleError(RuntimeError):
    pass


class TransportError(OracleError):
    pass


class ProtocolError(OracleError):
    pass


class BudgetExhausted(OracleError):
    pass


class EmptyBenignPool(OracleError):
    pass


class Oracle:
    """Base class: subclasses implement ``_predict``."""

    kind = "abstract"

    def __init__(self, query_budget: int | None = None, memoize: bool = False):
        self.query_budget = query_budget
        self.query_count = 0
        self.memoize = memoize
        self._cache: dict[Itemset, str] = {}

    def _predict(self, t: Itemset) -> str:
        raise NotImplementedError

    def _reserve(self, k: int = 1) -> None:
        if self.query_budget is not None and self.query_count + k > self.query_budget:
            raise BudgetExhausted(f"query budget of {self.query_budget} exhausted")
        self.query_count += k

    def query(self, t: Iterable[int]) -> str:
        t = make_itemset(t)
        if self.memoize and t in self._cache:
            return self._cache[t]
        self._reserve()
        label = self._predict(t)
        if label not in LABELS:
            raise ProtocolError(f"oracle answered {label!r}")
        if self.memoize:
            self._cache[t] = label
        return label

    def query_many(self, samples: Iterable[Itemset]) -> list[str]:
        return [self.query(t) for t in samples]

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class FixedOracle(Oracle):
    kind = "fixed"

    def __init__(self, label: str, **kw):
        if label not in LABELS:
            raise ValueError(f"fixed oracle label must be one of {LABELS}")
        super().__init__(**kw)
        self.label = label

    def _predict(self, t: Itemset) -> str:
        return self.label


class MDLOracle(Oracle):
    """Wraps a ``ClassifierModel`` whose labels are benign/malware."""

    kind = "builtin-mdl"

    def __init__(self, model: ClassifierModel, **kw):
        super().__init__(**kw)
        self.model = model

    def _predict(self, t: Itemset) -> str:
        return classify(self.model, t)


class SubprocessOracle(Oracle):
    """Long-lived child process spoken to over a line protocol."""

    kind = "subprocess"

    def __init__(self, command: str | Sequence[str], timeout: float | None = 30.0, **kw):
        super().__init__(**kw)
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        try:
            self._proc = subprocess.Popen(self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                          text=True, bufsize=1)
        except OSError as e:
            raise TransportError(f"cannot start {self.command}: {e}") from e

    def _predict(self, t: Itemset) -> str:
        proc = self._proc
        try:
            proc.stdin.write(" ".join(map(str, t)) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as e:
            raise TransportError(f"oracle process failed: {e}") from e
        if not line:
            raise TransportError(f"oracle process closed its output (exit code {proc.poll()})")
        answer = line.rstrip("\n")
        if answer not in LABELS:
            raise ProtocolError(f"expected 'benign' or 'malware', got {answer!r}")
        return answer

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
        if self._proc.stdout:
            self._proc.stdout.close()


class HttpOracle(Oracle):
    kind = "http"

    def __init__(self, url: str, timeout: float = 30.0, max_in_flight: int = 1, **kw):
        super().__init__(**kw)
        self.url = url
        self.timeout = timeout
        self.max_in_flight = max(1, max_in_flight)

    def _predict(self, t: Itemset) -> str:
        body = json.dumps({"items": list(t)}).encode()
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        req = urllib.request.Request(self.url, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                status, raw = resp.status, resp.read()
        except urllib.error.HTTPError as e:
            raise ProtocolError(f"HTTP {e.code} from {self.url}") from e
        except (urllib.error.URLError, OSError) as e:
            raise TransportError(f"cannot reach {self.url}: {e}") from e
        if status != 200:
            raise ProtocolError(f"HTTP {status} from {self.url}")
        try:
            label = json.loads(raw)["label"]
        except (ValueError, KeyError, TypeError) as e:
            raise ProtocolError(f"malformed response {raw[:200]!r}") from e
        if label not in LABELS:
            raise ProtocolError(f"unknown label {label!r}")
        return label

    def query_many(self, samples: Iterable[Itemset]) -> list[str]:
        samples = list(samples)
        if self.max_in_flight == 1 or self.memoize:
            return super().query_many(samples)
        self._reserve(len(samples))
        with ThreadPoolExecutor(self.max_in_flight) as pool:
            return list(pool.map(lambda t: self._predict(make_itemset(t)), samples))


def make_oracle(kind: str, config: str = "", *, query_budget: int | None = None, memoize: bool = False) -> Oracle:
    """Build an oracle from a kind and a config string.

    fixed: ``benign`` or ``malware``; builtin-mdl: ``<benign ct>,<malware ct>``;
    subprocess: a shell-style command line; http: the endpoint URL.
    """
    kw = {"query_budget": query_budget, "memoize": memoize}
    if kind == "fixed":
        return FixedOracle(config or BENIGN, **kw)
    if kind == "builtin-mdl":
        try:
            ct_b, ct_m = config.split(",")
        except ValueError:
            raise ValueError("builtin-mdl config must be '<benign ct>,<malware ct>'") from None
        return MDLOracle(ClassifierModel(load_code_table(ct_b), load_code_table(ct_m)), **kw)
    if kind == "subprocess":
        return SubprocessOracle(config, **kw)
    if kind == "http":
        return HttpOracle(config, **kw)
    raise ValueError(f"unknown oracle kind {kind!r}")


def query(o: Oracle, t: Iterable[int]) -> str:
    return o.query(t)


def build_benign_pool(o: Oracle, pool: Dataset) -> Dataset:
    """Keep the pool samples the target calls benign (one query each)."""
    if pool.n == 0:
        raise ValueError("the candidate pool is empty")
    verdicts = o.query_many(pool.transactions)
    keep = [j for j, v in enumerate(verdicts) if v == BENIGN]
    if not keep:
        raise EmptyBenignPool("the target labels every pool sample as malware")
    return pool.subset(keep)


def evasion_rate(o: Oracle, samples: Iterable[Itemset]) -> float:
    samples = list(samples)
    if not samples:
        return 0.0
    verdicts = o.query_many(samples)
    return sum(v == BENIGN for v in verdicts) / len(samples)
