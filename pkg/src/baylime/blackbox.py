"""Black-box predictor probing.

A predictor is anything that maps a batch of original-feature-space rows to
one numeric output per row. Two transports are provided:

* in-process: any Python callable taking an (n, m) array and returning n
  numbers (or an (n, c) matrix of per-class probabilities, to be narrowed
  with :func:`select_class`);
* subprocess: a long-lived child process speaking JSON Lines over
  stdin/stdout. Each request is one line ``{"inputs": [[f64, ...], ...]}``,
  each response one line ``{"outputs": [f64, ...]}`` with exactly one output
  per input row, UTF-8 encoded and LF-terminated. A response must be fully
  written before the next request is sent.

:func:`probe` splits large batches into chunks of ``batch_limit`` rows, so
one probe call may translate into several requests on the same transport.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ContractViolationError, ProbeError

PREDICTOR_CMD_ENV = "BAYLIME_PREDICTOR_CMD"

IN_PROCESS = "in_process"
SUBPROCESS = "subprocess"


@dataclass
class PredictorHandle:
    """Handle on a black-box model plus its probing policy.

    A handle is used by one explanation run at a time; concurrent runs must
    use separate handles. ``close()`` shuts down the transport if it owns
    one (subprocess handles do, in-process handles do not).
    """

    predict_fn: Callable[[np.ndarray], np.ndarray]
    kind: str = IN_PROCESS
    batch_limit: int = 1024
    timeout: float = 60.0

    def __post_init__(self):
        if self.batch_limit < 1:
            raise ConfigError("batch_limit must be at least 1")
        if not self.timeout > 0:
            raise ConfigError("timeout must be positive")
        if self.kind not in (IN_PROCESS, SUBPROCESS):
            raise ConfigError(f"unknown predictor kind {self.kind!r}")

    @classmethod
    def in_process(cls, fn: Callable[[np.ndarray], np.ndarray], *,
                   batch_limit: int = 1024, timeout: float = 60.0) -> "PredictorHandle":
        return cls(fn, kind=IN_PROCESS, batch_limit=batch_limit, timeout=timeout)

    @classmethod
    def spawn(cls, command: str | list[str], *, batch_limit: int = 1024,
              timeout: float = 60.0) -> "PredictorHandle":
        """Start a JSON-lines predictor subprocess and wrap it in a handle."""
        transport = SubprocessPredictor(command, timeout=timeout)
        return cls(transport, kind=SUBPROCESS, batch_limit=batch_limit,
                   timeout=timeout)

    def close(self) -> None:
        closer = getattr(self.predict_fn, "close", None)
        if closer is not None:
            closer()

    def __enter__(self) -> "PredictorHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def probe(handle: PredictorHandle, rows: np.ndarray) -> np.ndarray:
    """Query the model with perturbed rows and return one output per row.

    Rows are submitted in input order, split transparently into chunks of at
    most ``handle.batch_limit`` rows, so the model sees exactly
    ceil(n / batch_limit) calls.

    Raises:
        ProbeError: the transport failed (exit, malformed response, timeout).
        ContractViolationError: the model returned the wrong number of
            outputs, a shape that cannot be narrowed to one value per row,
            or a non-finite prediction (the offending row index is named).
    """
    matrix = np.asarray(rows, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ConfigError("probe needs a non-empty n-by-m matrix")
    if not np.all(np.isfinite(matrix)):
        raise ConfigError("probe rows must be finite")
    outputs = []
    for start in range(0, matrix.shape[0], handle.batch_limit):
        chunk = matrix[start:start + handle.batch_limit]
        raw = handle.predict_fn(chunk)
        out = np.asarray(raw, dtype=float)
        if out.ndim == 2 and out.shape[1] == 1:
            out = out[:, 0]
        if out.ndim != 1:
            raise ContractViolationError(
                f"predictor returned shape {out.shape}; expected one value "
                f"per row (use select_class for per-class matrices)",
                payload=raw,
            )
        if out.shape[0] != chunk.shape[0]:
            raise ContractViolationError(
                f"predictor returned {out.shape[0]} outputs for "
                f"{chunk.shape[0]} rows",
                payload=raw,
            )
        outputs.append(out)
    result = np.concatenate(outputs)
    bad = np.flatnonzero(~np.isfinite(result))
    if bad.size:
        raise ContractViolationError(
            f"non-finite prediction at row {int(bad[0])}", payload=result
        )
    return result


def select_class(fn: Callable[[np.ndarray], np.ndarray],
                 class_index: int) -> Callable[[np.ndarray], np.ndarray]:
    """Narrow a matrix-valued predictor to the probability of one class."""

    def narrowed(rows: np.ndarray) -> np.ndarray:
        out = np.asarray(fn(rows), dtype=float)
        if out.ndim != 2:
            raise ContractViolationError(
                f"class selection needs an (n, c) prediction matrix, got "
                f"shape {out.shape}",
                payload=out,
            )
        if not 0 <= class_index < out.shape[1]:
            raise ConfigError(
                f"target class {class_index} out of range for "
                f"{out.shape[1]} predictor outputs"
            )
        return out[:, class_index]

    return narrowed


def with_class(handle: PredictorHandle, class_index: int) -> PredictorHandle:
    """Derive a handle that extracts one class column from each prediction."""
    return PredictorHandle(select_class(handle.predict_fn, class_index),
                           kind=handle.kind, batch_limit=handle.batch_limit,
                           timeout=handle.timeout)


class SubprocessPredictor:
    """JSON-lines transport to a long-lived predictor child process.

    The process is spawned once and reused for every chunk of an
    explanation run, which amortizes model-load cost. Not thread-safe: one
    request must complete before the next is sent.
    """

    def __init__(self, command: str | list[str], *, timeout: float = 60.0):
        if isinstance(command, str):
            command = shlex.split(command)
        if not command:
            raise ConfigError("empty predictor command")
        self.command = list(command)
        self.timeout = float(timeout)
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ProbeError(f"could not start predictor command "
                             f"{self.command}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._stderr_tail: list[str] = []
        self._reader = threading.Thread(target=self._drain_stdout, daemon=True)
        self._reader.start()
        self._err_reader = threading.Thread(target=self._drain_stderr, daemon=True)
        self._err_reader.start()

    def _drain_stdout(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _drain_stderr(self) -> None:
        assert self._proc.stderr is not None
        for line in self._proc.stderr:
            self._stderr_tail.append(line)
            del self._stderr_tail[:-20]

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        request = json.dumps({"inputs": np.asarray(rows, dtype=float).tolist()})
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(request + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise ProbeError(
                f"predictor process rejected request: {exc}",
                payload="".join(self._stderr_tail),
            ) from exc
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ProbeError(
                f"predictor response timed out after {self.timeout} s"
            ) from None
        if line is None:
            raise ProbeError(
                f"predictor process exited with code {self._proc.poll()}",
                payload="".join(self._stderr_tail),
            )
        try:
            message = json.loads(line)
            outputs = message["outputs"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise ProbeError(f"malformed predictor response: {exc}",
                             payload=line) from exc
        return np.asarray(outputs, dtype=float)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()
        self._reader.join(timeout=1)
        self._err_reader.join(timeout=1)

    def __enter__(self) -> "SubprocessPredictor":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
