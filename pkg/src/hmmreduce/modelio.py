"""Plain-text model files.

Format (keys are case-sensitive; `#` starts a comment; symbols are 0-based):

    m: 2
    N: 4
    A:
    0.3 0.15 0.1 0.45
    ...
    B:
    0.3 0.7
    ...

A model is given either by the pair A (N x N transition matrix) and B
(N x m read-out matrix), or by explicit parameter matrices under keys
M[0] ... M[m-1].  An optional single-line `pi:` row overrides the computed
stationary vector.  Negative or non-finite entries are rejected.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .errors import ModelParseError
from .hmm import AbSpec, HmmModel, model_from_ab

_SCALAR_KEYS = ("m", "N")


def _parse_row(line: str, lineno: int) -> list:
    values = []
    for tok in line.replace(",", " ").split():
        try:
            x = float(tok)
        except ValueError:
            raise ModelParseError(f"line {lineno}: {tok!r} is not a number")
        if not np.isfinite(x):
            raise ModelParseError(f"line {lineno}: non-finite entry {tok}")
        if x < 0:
            raise ModelParseError(f"line {lineno}: negative entry {tok}")
        values.append(x)
    return values


def parse_model(text: str) -> HmmModel:
    scalars = {}
    matrices = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, _, rest = line.partition(":")
            key = key.strip()
            rest = rest.strip()
            if key in _SCALAR_KEYS:
                try:
                    scalars[key] = int(rest)
                except ValueError:
                    raise ModelParseError(f"line {lineno}: {key} must be an integer")
                current = None
            else:
                matrices[key] = []
                current = key
                if rest:
                    matrices[key].append(_parse_row(rest, lineno))
        else:
            if current is None:
                raise ModelParseError(f"line {lineno}: row outside any matrix block")
            matrices[current].append(_parse_row(line, lineno))

    for key in _SCALAR_KEYS:
        if key not in scalars:
            raise ModelParseError(f"missing required field {key!r}")
    m, N = scalars["m"], scalars["N"]

    def as_matrix(key, rows, cols):
        data = matrices[key]
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ModelParseError(f"{key} must be a {rows}x{cols} matrix")
        return np.array(data)

    pi = None
    if "pi" in matrices:
        pi = np.asarray(as_matrix("pi", 1, N))[0]

    if "A" in matrices and "B" in matrices:
        model = model_from_ab(AbSpec(A=as_matrix("A", N, N),
                                     B=as_matrix("B", N, m)))
        if pi is not None:
            model = HmmModel(m=m, N=N, M=model.M, pi=pi)
        return model
    keys = [f"M[{y}]" for y in range(m)]
    if all(k in matrices for k in keys):
        Ms = tuple(as_matrix(k, N, N) for k in keys)
        return HmmModel.from_matrices(Ms, pi=pi)
    raise ModelParseError(
        "model must provide either A and B, or all of " + ", ".join(keys)
    )


def load_model(path) -> HmmModel:
    with open(path) as fh:
        return parse_model(fh.read())


def dump_model(model: HmmModel) -> str:
    lines = [f"m: {model.m}", f"N: {model.N}"]
    for y in range(model.m):
        lines.append(f"M[{y}]:")
        for row in np.asarray(model.M[y]):
            lines.append(" ".join(repr(float(x)) for x in row))
    lines.append("pi:")
    lines.append(" ".join(repr(float(x)) for x in model.pi))
    return "\n".join(lines) + "\n"


def save_model(model: HmmModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_model(model))


def example_model(which: int) -> HmmModel:
    """Bundled 4-state binary-output benchmark model 1 or 2."""
    if which not in (1, 2):
        raise ModelParseError("bundled examples are numbered 1 and 2")
    text = (resources.files("hmmreduce.data")
            .joinpath(f"example{which}.hmm").read_text())
    return parse_model(text)
