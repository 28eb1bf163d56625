import numpy as np
import pytest

from mixsent.errors import (
    FingerprintMismatchError,
    ModelChecksumError,
    ModelFormatError,
    ModelVersionError,
)
from mixsent.features import FeatureVector, TfidfModel
from mixsent.model_io import load_model, save_model
from mixsent.pipeline import ResourceFingerprint, bind_resources, fingerprint_file
from mixsent.svr import SvrHyperParams, fit, predict


def fitted_model():
    rng = np.random.Generator(np.random.Philox(17))
    pts = rng.uniform(-1, 1, size=(6, 2))
    y = rng.uniform(-1, 1, size=6)
    X = [
        FeatureVector(
            tfidf={0: 0.6, 2: 0.8} if k % 2 else {1: 1.0},
            n_tfidf=3,
            embedding=row,
            aux=np.arange(12.0) / 12.0,
        )
        for k, row in enumerate(pts)
    ]
    params = SvrHyperParams(c=4.0, epsilon=0.05, gamma=0.9, kernel="rbf")
    return fit(params, X, y), X


def tfidf_state():
    return TfidfModel(
        vocabulary={"aam": 0, "baat": 1, "chai": 2},
        idf=np.array([1.0, 1.6931471805599454, 1.2876820724517809]),
        n_docs=4,
    )


FINGERPRINTS = (
    ResourceFingerprint(name="embeddings", size=123, sha256="ab" * 32),
    ResourceFingerprint(name="lexicon:humor", size=5, sha256="cd" * 32),
)


class TestRoundTrip:
    def test_predictions_identical_on_random_inputs(self, tmp_path):
        model, X = fitted_model()
        path = tmp_path / "m.model"
        save_model(path, model, tfidf_state(), FINGERPRINTS)
        loaded, state = load_model(path)

        rng = np.random.Generator(np.random.Philox(2))
        for _ in range(100):
            probe = FeatureVector(
                tfidf={int(rng.integers(0, 3)): float(rng.uniform(-1, 1))},
                n_tfidf=3,
                embedding=rng.uniform(-2, 2, size=2),
                aux=rng.uniform(-1, 1, size=12),
            )
            assert predict(loaded, probe) == predict(model, probe)

    def test_all_fields_survive(self, tmp_path):
        model, _ = fitted_model()
        path = tmp_path / "m.model"
        save_model(path, model, tfidf_state(), FINGERPRINTS, difficult_syllable_threshold=4)
        loaded, state = load_model(path)
        assert loaded.params == model.params
        assert loaded.dual_coef == model.dual_coef
        assert loaded.bias == model.bias
        assert loaded.support_indices == model.support_indices
        assert loaded.converged == model.converged
        assert loaded.n_iterations == model.n_iterations
        assert loaded.dual_objective == model.dual_objective
        assert state.tfidf.vocabulary == tfidf_state().vocabulary
        assert np.array_equal(state.tfidf.idf, tfidf_state().idf)
        assert state.tfidf.n_docs == 4
        assert state.fingerprints == FINGERPRINTS
        assert state.difficult_syllable_threshold == 4

    def test_rerun_identical_except_timestamp(self, tmp_path):
        model, _ = fitted_model()
        a, b = tmp_path / "a.model", tmp_path / "b.model"
        save_model(a, model, tfidf_state(), FINGERPRINTS)
        save_model(b, model, tfidf_state(), FINGERPRINTS)
        la = [l for l in a.read_text().splitlines() if not l.startswith("created ")]
        lb = [l for l in b.read_text().splitlines() if not l.startswith("created ")]
        assert la == lb


class TestCorruption:
    def test_version_bump_is_a_version_error(self, tmp_path):
        model, _ = fitted_model()
        path = tmp_path / "m.model"
        save_model(path, model, tfidf_state(), FINGERPRINTS)
        lines = path.read_text().splitlines()
        lines[0] = "mixsent-model 2"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ModelVersionError):
            load_model(path)

    def test_truncation_at_every_line_boundary(self, tmp_path):
        model, _ = fitted_model()
        path = tmp_path / "m.model"
        save_model(path, model, tfidf_state(), FINGERPRINTS)
        lines = path.read_text().splitlines()
        truncated = tmp_path / "t.model"
        for keep in range(len(lines)):
            truncated.write_text("\n".join(lines[:keep]) + ("\n" if keep else ""))
            with pytest.raises(ModelFormatError):
                load_model(truncated)

    def test_flipped_payload_fails_checksum(self, tmp_path):
        model, _ = fitted_model()
        path = tmp_path / "m.model"
        save_model(path, model, tfidf_state(), FINGERPRINTS)
        lines = path.read_text().splitlines()
        assert lines[2].startswith("param c ")
        lines[2] = "param c 999.0"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ModelChecksumError):
            load_model(path)

    def test_not_a_model_file(self, tmp_path):
        path = tmp_path / "m.model"
        path.write_text("hello world\n")
        with pytest.raises(ModelFormatError):
            load_model(path)


class TestFingerprints:
    def test_fingerprint_file(self, tmp_path):
        path = tmp_path / "r.txt"
        path.write_text("content", encoding="utf-8")
        fp = fingerprint_file(path, "r")
        assert fp.size == 7
        assert len(fp.sha256) == 64

    def test_bind_resources_rejects_modified_file(self, tmp_path, resources):
        fingerprints = (
            fingerprint_file(resources["embeddings"], "embeddings"),
            fingerprint_file(resources["lexicon_dir"] / "hate.tsv", "lexicon:hate"),
            fingerprint_file(resources["lexicon_dir"] / "humor.tsv", "lexicon:humor"),
            fingerprint_file(resources["lexicon_dir"] / "offense.tsv", "lexicon:offense"),
            fingerprint_file(resources["lexicon_dir"] / "sentiment.tsv", "lexicon:sentiment"),
            fingerprint_file(resources["easy_words"], "easy_words"),
        )
        state = bind_resources(
            tfidf=tfidf_state(),
            fingerprints=fingerprints,
            difficult_syllable_threshold=3,
            embeddings_path=resources["embeddings"],
            lexicon_dir=resources["lexicon_dir"],
            easy_words_path=resources["easy_words"],
        )
        assert state.embeddings.dim == 3

        resources["embeddings"].write_text("tampered 1.0 2.0 3.0\n", encoding="utf-8")
        with pytest.raises(FingerprintMismatchError):
            bind_resources(
                tfidf=tfidf_state(),
                fingerprints=fingerprints,
                difficult_syllable_threshold=3,
                embeddings_path=resources["embeddings"],
                lexicon_dir=resources["lexicon_dir"],
                easy_words_path=resources["easy_words"],
            )
