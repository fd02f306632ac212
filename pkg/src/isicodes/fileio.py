"""Text file formats.

Every file starts with ``# manifest: {json}``; other ``#`` lines are
comments.

Code set::

    M_t nu T R prim_poly_hex eval_mode
    <hex of C_f, row-major, row 0 column 0 most significant>   (one per line)

Codebook: one ``[layer l]`` section per layer in the code-set format, then
``[complex N L constellation translate]`` followed by one block per joint
codeword: a ``[codeword k m_1 .. m_L]`` line and M_t lines of ``re im``
pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .binmat import BinaryMatrix
from .errors import ParseError
from .rankcodes import CodeParams, CodeSet, EvalMode

MANIFEST_PREFIX = "# manifest: "


def manifest_line(manifest: dict) -> str:
    return MANIFEST_PREFIX + json.dumps(manifest, sort_keys=True) + "\n"


def read_manifest(text: str) -> Optional[dict]:
    for line in text.splitlines():
        if line.startswith(MANIFEST_PREFIX):
            try:
                return json.loads(line[len(MANIFEST_PREFIX):])
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad manifest: {exc}") from exc
    return None


def _content_lines(text: str) -> List[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def format_header(params: CodeParams, prim_poly: int) -> str:
    return f"{params.M_t} {params.nu} {params.T} {params.R} {prim_poly:#x} {params.eval_mode.value}"


def parse_header(line: str) -> Tuple[CodeParams, int]:
    parts = line.split()
    if len(parts) != 6:
        raise ParseError(f"header needs 6 fields 'M_t nu T R prim_poly_hex eval_mode', got {line!r}")
    try:
        M_t, nu, T, R = (int(x) for x in parts[:4])
        poly = int(parts[4], 16)
        mode = EvalMode(parts[5].upper())
        return CodeParams(M_t, nu, T, R, eval_mode=mode), poly
    except ValueError as exc:
        raise ParseError(f"bad header {line!r}: {exc}") from exc


def code_set_lines(code: CodeSet) -> List[str]:
    out = [format_header(code.params, code.ctx.primitive_polynomial)]
    it, _ = code.indices()
    out += [code.codeword(k).to_hex() for k in it]
    return out


def format_code_set(code: CodeSet, manifest: dict) -> str:
    return manifest_line(manifest) + "\n".join(code_set_lines(code)) + "\n"


@dataclass
class CodeSetFile:
    params: CodeParams
    prim_poly: int
    codewords: List[BinaryMatrix]
    manifest: Optional[dict] = None


def _parse_code_lines(lines: Sequence[str]) -> Tuple[CodeParams, int, List[BinaryMatrix]]:
    if not lines:
        raise ParseError("missing header line")
    params, poly = parse_header(lines[0])
    width = max(1, (params.M_t * params.T + 3) // 4)
    mats = []
    for ln in lines[1:]:
        if len(ln) != width:
            raise ParseError(f"codeword {ln!r} should have {width} hex digits")
        try:
            mats.append(BinaryMatrix.from_hex(ln, params.M_t, params.T))
        except ValueError as exc:
            raise ParseError(f"bad codeword {ln!r}: {exc}") from exc
    return params, poly, mats


def parse_code_set(text: str) -> CodeSetFile:
    params, poly, mats = _parse_code_lines(_content_lines(text))
    return CodeSetFile(params, poly, mats, read_manifest(text))


def format_codebook(codes: Sequence[CodeSet], X: np.ndarray, messages: np.ndarray,
                    constellation: str, translate: bool, manifest: dict) -> str:
    out = [manifest_line(manifest).rstrip("\n")]
    for l, code in enumerate(codes, start=1):
        out.append(f"[layer {l}]")
        out += code_set_lines(code)
    N, M_t, T = X.shape
    out.append(f"[complex {N} {len(codes)} {constellation} {int(translate)}]")
    for k in range(N):
        out.append(f"[codeword {k} " + " ".join(str(int(m)) for m in messages[k]) + "]")
        for row in X[k]:
            out.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(out) + "\n"


@dataclass
class CodebookFile:
    layers: List[CodeSetFile]
    X: np.ndarray
    messages: np.ndarray
    constellation: str
    translate: bool
    manifest: Optional[dict] = None

    @property
    def nu(self) -> int:
        return self.layers[0].params.nu


def parse_codebook(text: str) -> CodebookFile:
    lines = _content_lines(text)
    layers: List[CodeSetFile] = []
    i = 0
    try:
        while i < len(lines) and lines[i].startswith("[layer"):
            j = i + 1
            while j < len(lines) and not lines[j].startswith("["):
                j += 1
            params, poly, mats = _parse_code_lines(lines[i + 1:j])
            layers.append(CodeSetFile(params, poly, mats))
            i = j
        if not layers:
            raise ParseError("codebook has no [layer] section")
        head = lines[i].strip("[]").split()
        if head[0] != "complex" or len(head) != 5:
            raise ParseError(f"expected [complex N L constellation translate], got {lines[i]!r}")
        N, L = int(head[1]), int(head[2])
        M_t, T = layers[0].params.M_t, layers[0].params.T
        X = np.zeros((N, M_t, T), dtype=complex)
        msgs = np.zeros((N, L), dtype=np.int64)
        i += 1
        for k in range(N):
            tag = lines[i].strip("[]").split()
            if tag[0] != "codeword" or int(tag[1]) != k or len(tag) != 2 + L:
                raise ParseError(f"bad codeword tag {lines[i]!r}")
            msgs[k] = [int(x) for x in tag[2:]]
            for r in range(M_t):
                vals = [float(x) for x in lines[i + 1 + r].split()]
                if len(vals) != 2 * T:
                    raise ParseError(f"row has {len(vals)} numbers, expected {2 * T}")
                X[k, r] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
            i += 1 + M_t
        if i != len(lines):
            raise ParseError("trailing content after the last codeword")
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed codebook: {exc}") from exc
    return CodebookFile(layers, X, msgs, head[3], bool(int(head[4])), read_manifest(text))
