"""Provider-agnostic LLM access with a deterministic mock backend.

All pipeline calls go through Gateway.run(template, bindings): the
template is rendered, the model tag resolved from the routing table, the
request retried on transient failures, and whitespace-token counts are
recorded in the cost ledger. The mock backend replays canned completions
keyed by (template name, digest of the bindings), which keeps tests and
offline runs fully deterministic.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import BackendError, DataError, TransportError
from .prompts import get_template
from .textutil import count_ws_tokens

log = logging.getLogger(__name__)

# Decomposition and merging are easy enough for a cheaper model; document
# generation and entailment checks go to the stronger tier.
DEFAULT_ROUTING = {
    "decompose": "gpt-3.5-turbo",
    "merge-facts": "gpt-3.5-turbo",
    "default": "gpt-4",
}

# Prices per 1K whitespace tokens (prompt, completion). These are config,
# not constants baked into the ledger; override via GatewayConfig.prices.
DEFAULT_PRICES = {
    "gpt-3.5-turbo": (0.0005, 0.0015),
    "gpt-4": (0.03, 0.06),
}

MAX_ATTEMPTS = 3
BACKOFF_BASE = 0.5  # seconds; doubles per retry


@dataclass
class GatewayConfig:
    base_url: str = "https://api.openai.com/v1"
    api_key: str = ""
    routing: dict = field(default_factory=lambda: dict(DEFAULT_ROUTING))
    prices: dict = field(default_factory=lambda: dict(DEFAULT_PRICES))
    max_in_flight: int = 8
    timeout: float = 60.0

    @classmethod
    def load(cls, path: str | Path) -> "GatewayConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid config JSON: {exc}")
        cfg = cls()
        for key in ("base_url", "api_key", "max_in_flight", "timeout"):
            if key in obj:
                setattr(cfg, key, obj[key])
        if "routing" in obj:
            cfg.routing.update(obj["routing"])
        if "prices" in obj:
            for tag, pair in obj["prices"].items():
                cfg.prices[tag] = (float(pair[0]), float(pair[1]))
        return cfg

    def model_for(self, template_name: str) -> str:
        tag = self.routing.get(template_name) or self.routing.get("default")
        if not tag:
            raise DataError(
                f"no model route for template {template_name!r} and no default"
            )
        return tag


class CostLedger:
    """Accumulates whitespace-token counts per model tag.

    Whitespace tokens are an estimate of billable tokens; good enough for
    relative cost tracking and documented as such in reports.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_model: dict[str, dict[str, int]] = {}

    def record(self, model_tag: str, prompt_tokens: int, completion_tokens: int) -> None:
        with self._lock:
            row = self._by_model.setdefault(
                model_tag, {"calls": 0, "prompt_tokens": 0, "completion_tokens": 0}
            )
            row["calls"] += 1
            row["prompt_tokens"] += prompt_tokens
            row["completion_tokens"] += completion_tokens

    def totals(self) -> dict[str, dict[str, int]]:
        with self._lock:
            return {tag: dict(row) for tag, row in self._by_model.items()}

    def snapshot(self, prices: dict | None = None) -> dict:
        """Ledger contents plus estimated dollar cost (whitespace-token based)."""
        out: dict = {"unit": "whitespace-token estimate", "models": self.totals()}
        if prices is not None:
            out["estimated_cost_usd"] = round(estimate_cost(self, prices), 6)
        return out


def estimate_cost(ledger: CostLedger, prices: dict) -> float:
    """Total estimated cost across the ledger; unknown model tags error."""
    total = 0.0
    for tag, row in ledger.totals().items():
        if tag not in prices:
            raise DataError(f"no price configured for model tag {tag!r}")
        p_in, p_out = prices[tag]
        total += row["prompt_tokens"] / 1000 * p_in
        total += row["completion_tokens"] / 1000 * p_out
    return total


def binding_digest(bindings: dict) -> str:
    """Stable digest of a template's bindings, for mock fixture keys."""
    canon = json.dumps(bindings, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


class MockBackend:
    """Replays canned completions keyed by (template, binding digest).

    Fixture values are either a string (returned on every call) or a list
    consumed one item per call (the last item repeats once exhausted).
    List items may also be {"error": "transport"} or
    {"error": "status", "code": 500} to script failures for retry tests.
    """

    name = "mock"

    def __init__(self, fixtures: dict | None = None):
        self._fixtures: dict[tuple[str, str], object] = {}
        self._cursor: dict[tuple[str, str], int] = {}
        self._lock = threading.Lock()
        if fixtures:
            for template_name, by_digest in fixtures.items():
                for digest, value in by_digest.items():
                    self._fixtures[(template_name, digest)] = value

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        if not Path(path).is_file():
            raise DataError(f"no such fixture file: {path}")
        with open(path, encoding="utf-8") as fh:
            try:
                return cls(json.load(fh))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid fixture JSON: {exc}")

    def script(self, template_name: str, bindings: dict, value) -> None:
        """Register a canned completion for one (template, bindings) call."""
        self._fixtures[(template_name, binding_digest(bindings))] = value

    def to_fixtures(self) -> dict:
        out: dict = {}
        for (template_name, digest), value in self._fixtures.items():
            out.setdefault(template_name, {})[digest] = value
        return out

    def complete(self, template_name: str, bindings: dict, prompt: str,
                 model_tag: str, temperature: float) -> str:
        key = (template_name, binding_digest(bindings))
        try:
            value = self._fixtures[key]
        except KeyError:
            raise DataError(
                f"mock backend has no fixture for template {template_name!r} "
                f"with binding digest {key[1]} "
                f"(bindings: {json.dumps(bindings, ensure_ascii=False)[:200]})"
            )
        if isinstance(value, list):
            with self._lock:
                i = self._cursor.get(key, 0)
                self._cursor[key] = i + 1
            value = value[min(i, len(value) - 1)]
        if isinstance(value, dict) and "error" in value:
            if value["error"] == "transport":
                raise TransportError(f"scripted transport failure for {key}")
            code = int(value.get("code", 500))
            raise _status_error(code, f"scripted status {code} for {key}")
        if not isinstance(value, str):
            raise DataError(f"mock fixture for {key} must be a string")
        return value


def _status_error(code: int, detail: str) -> BackendError:
    if code >= 500:
        return TransportError(f"server error {code}: {detail}")
    return BackendError(f"request rejected with status {code}: {detail}")


class HttpBackend:
    """Chat-completions client for any OpenAI-compatible endpoint."""

    def __init__(self, base_url: str, api_key: str = "", timeout: float = 60.0,
                 client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self.name = self.base_url
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def complete(self, template_name: str, bindings: dict, prompt: str,
                 model_tag: str, temperature: float) -> str:
        payload = {
            "model": model_tag,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        try:
            resp = self._client.post(f"{self.base_url}/chat/completions", json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(f"request to {self.base_url} failed: {exc}")
        if resp.status_code != 200:
            raise _status_error(
                resp.status_code, resp.text[:300] if resp.text else "<empty body>"
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError):
            raise BackendError(
                f"malformed completion response from {self.base_url}: "
                f"{resp.text[:200]!r}"
            )


class Gateway:
    """Renders templates, routes models, retries, and meters cost.

    Retry policy: up to MAX_ATTEMPTS attempts with exponential backoff on
    transport errors and 5xx; 4xx responses are never retried. Concurrent
    in-flight requests are capped by a semaphore (config.max_in_flight).
    """

    def __init__(self, backend, config: GatewayConfig | None = None,
                 ledger: CostLedger | None = None, sleep=time.sleep):
        self.backend = backend
        self.config = config or GatewayConfig()
        self.ledger = ledger or CostLedger()
        self._sleep = sleep
        self._sem = threading.Semaphore(max(1, self.config.max_in_flight))
        self._stats_lock = threading.Lock()
        self.stats = {"calls": 0, "attempts": 0}

    def run(self, template_name: str, bindings: dict,
            temperature: float = 0.0, model_tag: str | None = None) -> str:
        """Send one templated request and return the completion text."""
        template = get_template(template_name)
        prompt = template.render(bindings)
        tag = model_tag or self.config.model_for(template_name)
        attempts = 0
        try:
            with self._sem:
                while True:
                    attempts += 1
                    try:
                        text = self.backend.complete(
                            template_name, bindings, prompt, tag, temperature
                        )
                        break
                    except TransportError as exc:
                        if attempts >= MAX_ATTEMPTS:
                            raise BackendError(
                                f"backend failed after {attempts} attempts: {exc}"
                            )
                        delay = BACKOFF_BASE * (2 ** (attempts - 1))
                        log.warning(
                            "attempt %d/%d for %s failed (%s); retrying in %.1fs",
                            attempts, MAX_ATTEMPTS, template_name, exc, delay,
                        )
                        if self._sleep is not None:
                            self._sleep(delay)
        finally:
            self._count(attempts)
        self.ledger.record(tag, count_ws_tokens(prompt), count_ws_tokens(text))
        return text

    def _count(self, attempts: int) -> None:
        with self._stats_lock:
            self.stats["calls"] += 1
            self.stats["attempts"] += attempts

    def backend_identity(self) -> str:
        return getattr(self.backend, "name", type(self.backend).__name__)
