"""Pluggable text-recognition backends.

Recognition itself is always external: the default backend shells out
to an OCR engine binary (tesseract unless overridden), writing the
corner region to a temp PNG and reading text from standard output.
A deterministic scripted backend, keyed on region fingerprints, stands
in for the engine in tests.

Engine instances are single-owner: one per worker, never shared. The
external backend is a fresh subprocess per call, so a failed region
can never poison later ones.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import BackendUnavailable, EngineFailure, Timeout
from .imageprep import PageImage

#: --psm 6 asks for a single uniform text block: stamps are one short
#: line, occasionally two stacked ones.
DEFAULT_COMMAND_TEMPLATE = "tesseract {input} stdout --psm 6"


@dataclass(frozen=True)
class OcrResult:
    raw_text: str
    engine_id: str
    duration_ms: int


@dataclass(frozen=True)
class OcrBackendConfig:
    kind: str = "external_command"
    command_template: str = DEFAULT_COMMAND_TEMPLATE
    script: Mapping[str, str] | None = None
    timeout_ms: int = 30_000
    #: Environment variable names forwarded to the engine process
    #: (e.g. TESSDATA_PREFIX). None inherits the full environment.
    env_passthrough: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("external_command", "scripted"):
            raise ValueError(f"kind must be external_command or scripted, got {self.kind!r}")
        if self.kind == "external_command" and "{input}" not in self.command_template:
            raise ValueError("command_template must contain the {input} placeholder")
        if self.kind == "scripted" and self.script is None:
            raise ValueError("scripted backend requires a script map")
        if self.timeout_ms < 1:
            raise ValueError("timeout_ms must be >= 1")


def region_fingerprint(region: PageImage) -> str:
    """Human-writable key for the scripted backend.

    Uses the image file name (not the full path) so scripts survive a
    corpus directory being moved.
    """
    name = Path(region.source_path).name if region.source_path else ""
    return f"{name}:{region.page_index}:{region.band or ''}:{region.corner or ''}"


class ScriptedEngine:
    """Pure map lookup from region fingerprint to text.

    Fingerprints absent from the script read as blank regions ("").
    """

    engine_id = "scripted"

    def __init__(self, script: Mapping[str, str]):
        self._script = dict(script)

    def recognize(self, region: PageImage) -> OcrResult:
        return OcrResult(
            raw_text=self._script.get(region_fingerprint(region), ""),
            engine_id=self.engine_id,
            duration_ms=0,
        )


class ExternalCommandEngine:
    """Runs one engine subprocess per region.

    The region is written to a private temp PNG, {input} in the command
    template expands to that path, and whatever the engine prints to
    stdout is returned byte-exact (decoded, untrimmed).
    """

    def __init__(self, command_template: str, timeout_ms: int,
                 env_passthrough: tuple[str, ...] | None = None):
        self._argv_template = shlex.split(command_template)
        if not self._argv_template:
            raise BackendUnavailable("empty command template")
        self._timeout_s = timeout_ms / 1000.0
        self._env = _build_env(env_passthrough)
        self.engine_id = f"external:{Path(self._argv_template[0]).name}"

    def recognize(self, region: PageImage) -> OcrResult:
        started = time.perf_counter()
        fd, tmp_path = tempfile.mkstemp(prefix="batesqc_region_", suffix=".png")
        os.close(fd)
        try:
            region.image.save(tmp_path, format="PNG")
            argv = [arg.replace("{input}", tmp_path) for arg in self._argv_template]
            try:
                proc = subprocess.run(
                    argv,
                    capture_output=True,
                    timeout=self._timeout_s,
                    env=self._env,
                )
            except subprocess.TimeoutExpired:
                raise Timeout(f"{argv[0]} exceeded {self._timeout_s:.1f}s on {region_fingerprint(region)}")
            except OSError as exc:
                raise EngineFailure(f"could not launch {argv[0]}: {exc}")
            if proc.returncode != 0:
                stderr = proc.stderr.decode("utf-8", errors="replace")
                raise EngineFailure(
                    f"{argv[0]} exited {proc.returncode}",
                    stderr=stderr,
                    exit_code=proc.returncode,
                )
            text = proc.stdout.decode("utf-8", errors="replace")
        finally:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
        elapsed_ms = int((time.perf_counter() - started) * 1000)
        return OcrResult(raw_text=text, engine_id=self.engine_id, duration_ms=elapsed_ms)


def _build_env(passthrough: tuple[str, ...] | None) -> dict[str, str] | None:
    if passthrough is None:
        return None
    env = {name: os.environ[name] for name in passthrough if name in os.environ}
    env.setdefault("PATH", os.environ.get("PATH", ""))
    return env


def make_engine(cfg: OcrBackendConfig):
    """Construct an engine instance for exactly one worker.

    Raises BackendUnavailable if the external binary cannot be found.
    Instances share no mutable state; creating many concurrently is
    safe.
    """
    if cfg.kind == "scripted":
        return ScriptedEngine(cfg.script or {})
    binary = shlex.split(cfg.command_template)[0]
    if shutil.which(binary) is None:
        raise BackendUnavailable(f"OCR engine binary {binary!r} not found on PATH")
    return ExternalCommandEngine(cfg.command_template, cfg.timeout_ms, cfg.env_passthrough)
