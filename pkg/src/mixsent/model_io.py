"""Versioned text serialization of fitted models.

File schema (UTF-8, one record per line, space-separated fields; floats
are written with 17 significant digits so they round-trip exactly):

    mixsent-model <version>            header, version currently 1
    created <iso-8601-utc>             timestamp, excluded from the checksum
    param <name> <value>               one line per hyperparameter
    threshold <int>                    difficult-word syllable threshold
    resource <name> <size> <sha256>    fingerprint of each resource file
    tfidf <n_docs> <vocab_size>
    term <word> <index> <idf>          one line per vocabulary word
    dims <n_tfidf> <embed_dim> <aux_dim>
    bias <float>
    converged <0|1>
    iterations <int>
    objective <float>
    n_sv <count>
    sv <k> <index> <coef>              per support vector, then its blocks:
    sv_tfidf <k> [<i>:<v> ...]
    sv_embed <k> [<v> ...]
    sv_aux <k> [<v> ...]
    checksum <sha256>                  over every line after `created`

A bad header version raises ModelVersionError; a missing or mismatched
checksum line raises ModelChecksumError; any other malformed or truncated
content raises ModelFormatError.
"""

from __future__ import annotations

import hashlib
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ModelChecksumError, ModelFormatError, ModelVersionError
from .features import FeatureVector, TfidfModel
from .pipeline import ResourceFingerprint
from .svr import SvrHyperParams, SvrModel

__all__ = ["FORMAT_VERSION", "PersistedFeatureState", "save_model", "load_model"]

FORMAT_VERSION = 1
_HEADER = "mixsent-model"

_PARAM_FIELDS = (
    "c",
    "epsilon",
    "gamma",
    "kernel",
    "tol",
    "cache_size_mb",
    "coef0",
    "max_iter",
    "shrinking",
    "probability",
    "decision_function_shape",
    "class_weight",
    "degree",
)


class PersistedFeatureState:
    """Feature state recoverable from a model file alone.

    Embedding vectors and lexicon contents are not stored, only their
    fingerprints; use pipeline.bind_resources to reload and verify them.
    """

    def __init__(
        self,
        tfidf: TfidfModel,
        fingerprints: tuple[ResourceFingerprint, ...],
        difficult_syllable_threshold: int,
    ):
        self.tfidf = tfidf
        self.fingerprints = fingerprints
        self.difficult_syllable_threshold = difficult_syllable_threshold


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _param_value(params: SvrHyperParams, name: str) -> str:
    value = getattr(params, name)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _payload_lines(
    model: SvrModel, tfidf: TfidfModel, fingerprints, threshold: int
) -> list[str]:
    lines = []
    for name in _PARAM_FIELDS:
        lines.append(f"param {name} {_param_value(model.params, name)}")
    lines.append(f"threshold {threshold}")
    for fp in fingerprints:
        lines.append(f"resource {fp.name} {fp.size} {fp.sha256}")
    lines.append(f"tfidf {tfidf.n_docs} {len(tfidf.vocabulary)}")
    for word, idx in sorted(tfidf.vocabulary.items(), key=lambda kv: kv[1]):
        lines.append(f"term {word} {idx} {_fmt(tfidf.idf[idx])}")
    if model.support_vectors:
        dims = model.support_vectors[0].block_dims
    else:
        dims = (len(tfidf.vocabulary), 0, 0)
    lines.append(f"dims {dims[0]} {dims[1]} {dims[2]}")
    lines.append(f"bias {_fmt(model.bias)}")
    lines.append(f"converged {1 if model.converged else 0}")
    lines.append(f"iterations {model.n_iterations}")
    lines.append(f"objective {_fmt(model.dual_objective)}")
    lines.append(f"n_sv {len(model.support_vectors)}")
    for k, (sv, coef, idx) in enumerate(
        zip(model.support_vectors, model.dual_coef, model.support_indices)
    ):
        lines.append(f"sv {k} {idx} {_fmt(coef)}")
        sparse = " ".join(f"{i}:{_fmt(v)}" for i, v in sorted(sv.tfidf.items()))
        lines.append(f"sv_tfidf {k} {sparse}".rstrip())
        lines.append(f"sv_embed {k} " + " ".join(_fmt(v) for v in sv.embedding))
        lines.append(f"sv_aux {k} " + " ".join(_fmt(v) for v in sv.aux))
    return lines


def save_model(
    path: str | Path,
    model: SvrModel,
    tfidf: TfidfModel,
    fingerprints: tuple[ResourceFingerprint, ...],
    difficult_syllable_threshold: int = 3,
) -> None:
    """Write the model and its fitted feature state; see the module docstring."""
    payload = _payload_lines(model, tfidf, fingerprints, difficult_syllable_threshold)
    digest = hashlib.sha256(("\n".join(payload) + "\n").encode("utf-8")).hexdigest()
    created = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    lines = [f"{_HEADER} {FORMAT_VERSION}", f"created {created}", *payload, f"checksum {digest}"]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class _Reader:
    def __init__(self, lines: list[str]):
        self._lines = lines
        self._pos = 0

    def next(self, expected_key: str) -> list[str]:
        if self._pos >= len(self._lines):
            raise ModelFormatError(f"truncated model file: expected {expected_key!r} record")
        line = self._lines[self._pos]
        self._pos += 1
        fields = line.split(" ")
        if fields[0] != expected_key:
            raise ModelFormatError(f"expected {expected_key!r} record, found {fields[0]!r}")
        return fields[1:]


def _parse_float(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ModelFormatError(f"bad float {text!r} in {context}") from None


def _parse_int(text: str, context: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ModelFormatError(f"bad integer {text!r} in {context}") from None


def load_model(path: str | Path) -> tuple[SvrModel, PersistedFeatureState]:
    """Read a model file back; inverse of save_model."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("empty model file")

    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != _HEADER:
        raise ModelFormatError(f"not a model file: bad header {lines[0]!r}")
    version = _parse_int(header[1], "header")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model format version {version}, expected {FORMAT_VERSION}"
        )
    if len(lines) < 3 or not lines[1].startswith("created "):
        raise ModelFormatError("truncated model file: missing created/checksum records")
    last = lines[-1].split(" ")
    if last[0] != "checksum" or len(last) != 2:
        raise ModelFormatError("truncated model file: missing checksum record")
    payload = lines[2:-1]
    digest = hashlib.sha256(("\n".join(payload) + "\n").encode("utf-8")).hexdigest()
    if digest != last[1]:
        raise ModelChecksumError("model file checksum mismatch")

    reader = _Reader(payload)
    raw_params: dict[str, str] = {}
    for name in _PARAM_FIELDS:
        fields = reader.next("param")
        if len(fields) != 2 or fields[0] != name:
            raise ModelFormatError(f"bad param record for {name!r}")
        raw_params[name] = fields[1]
    params = SvrHyperParams(
        c=_parse_float(raw_params["c"], "param c"),
        epsilon=_parse_float(raw_params["epsilon"], "param epsilon"),
        gamma=_parse_float(raw_params["gamma"], "param gamma"),
        kernel=raw_params["kernel"],
        tol=_parse_float(raw_params["tol"], "param tol"),
        cache_size_mb=_parse_int(raw_params["cache_size_mb"], "param cache_size_mb"),
        coef0=_parse_float(raw_params["coef0"], "param coef0"),
        max_iter=_parse_int(raw_params["max_iter"], "param max_iter"),
        shrinking=raw_params["shrinking"] == "true",
        probability=raw_params["probability"] == "true",
        decision_function_shape=raw_params["decision_function_shape"],
        class_weight=None if raw_params["class_weight"] == "none" else raw_params["class_weight"],
        degree=_parse_int(raw_params["degree"], "param degree"),
    )

    fields = reader.next("threshold")
    threshold = _parse_int(fields[0], "threshold")

    fingerprints = []
    while reader._pos < len(payload) and payload[reader._pos].startswith("resource "):
        fields = reader.next("resource")
        if len(fields) != 3:
            raise ModelFormatError("bad resource record")
        fingerprints.append(
            ResourceFingerprint(
                name=fields[0], size=_parse_int(fields[1], "resource size"), sha256=fields[2]
            )
        )

    fields = reader.next("tfidf")
    if len(fields) != 2:
        raise ModelFormatError("bad tfidf record")
    n_docs = _parse_int(fields[0], "tfidf n_docs")
    vocab_size = _parse_int(fields[1], "tfidf vocab size")
    vocabulary: dict[str, int] = {}
    idf = np.zeros(vocab_size)
    for _ in range(vocab_size):
        fields = reader.next("term")
        if len(fields) != 3:
            raise ModelFormatError("bad term record")
        word, idx = fields[0], _parse_int(fields[1], "term index")
        if not 0 <= idx < vocab_size or word in vocabulary:
            raise ModelFormatError(f"bad term index or duplicate word {word!r}")
        vocabulary[word] = idx
        idf[idx] = _parse_float(fields[2], "term idf")
    tfidf = TfidfModel(vocabulary=vocabulary, idf=idf, n_docs=n_docs)

    fields = reader.next("dims")
    if len(fields) != 3:
        raise ModelFormatError("bad dims record")
    n_tfidf, embed_dim, aux_dim = (_parse_int(f, "dims") for f in fields)

    bias = _parse_float(reader.next("bias")[0], "bias")
    converged = reader.next("converged")[0] == "1"
    iterations = _parse_int(reader.next("iterations")[0], "iterations")
    objective = _parse_float(reader.next("objective")[0], "objective")
    n_sv = _parse_int(reader.next("n_sv")[0], "n_sv")

    support_vectors = []
    dual_coef = []
    support_indices = []
    for k in range(n_sv):
        fields = reader.next("sv")
        if len(fields) != 3 or _parse_int(fields[0], "sv ordinal") != k:
            raise ModelFormatError(f"bad sv record for support vector {k}")
        support_indices.append(_parse_int(fields[1], "sv index"))
        dual_coef.append(_parse_float(fields[2], "sv coef"))

        fields = reader.next("sv_tfidf")
        if not fields or _parse_int(fields[0], "sv_tfidf ordinal") != k:
            raise ModelFormatError(f"bad sv_tfidf record for support vector {k}")
        sparse = {}
        for pair in fields[1:]:
            if ":" not in pair:
                raise ModelFormatError(f"bad sparse entry {pair!r}")
            i_text, v_text = pair.split(":", 1)
            sparse[_parse_int(i_text, "sparse index")] = _parse_float(v_text, "sparse value")

        fields = reader.next("sv_embed")
        if not fields or _parse_int(fields[0], "sv_embed ordinal") != k:
            raise ModelFormatError(f"bad sv_embed record for support vector {k}")
        embedding = np.array([_parse_float(v, "sv_embed value") for v in fields[1:]])
        if len(embedding) != embed_dim:
            raise ModelFormatError(f"sv_embed length {len(embedding)} != dims {embed_dim}")

        fields = reader.next("sv_aux")
        if not fields or _parse_int(fields[0], "sv_aux ordinal") != k:
            raise ModelFormatError(f"bad sv_aux record for support vector {k}")
        aux = np.array([_parse_float(v, "sv_aux value") for v in fields[1:]])
        if len(aux) != aux_dim:
            raise ModelFormatError(f"sv_aux length {len(aux)} != dims {aux_dim}")

        support_vectors.append(
            FeatureVector(tfidf=sparse, n_tfidf=n_tfidf, embedding=embedding, aux=aux)
        )

    if reader._pos != len(payload):
        raise ModelFormatError("unexpected trailing records in model file")

    model = SvrModel(
        params=params,
        support_vectors=tuple(support_vectors),
        dual_coef=tuple(dual_coef),
        bias=bias,
        n_iterations=iterations,
        converged=converged,
        support_indices=tuple(support_indices),
        dual_objective=objective,
    )
    state = PersistedFeatureState(
        tfidf=tfidf,
        fingerprints=tuple(fingerprints),
        difficult_syllable_threshold=threshold,
    )
    return model, state
