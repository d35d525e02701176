"""Tests for Procrustes, dictionary expansion, hubness filtering and the refinement loop."""

import json
from types import SimpleNamespace

import numpy as np
import pytest

from lexalign.alignment import MappingMatrix, unsupervised_criterion
from lexalign.embeddings import EmbeddingTable, NormState
from lexalign.errors import ConfigError, DataError
from lexalign.evaluation import precision_at_k, retrieve_for_lexicon
from lexalign.metric import NeighborIndex, hubness_counts
from lexalign.refinement import (
    ExpansionDictionary,
    RefineConfig,
    expand_dictionary,
    hubness_filter,
    iterative_refine,
    procrustes_solve,
)


def _unit(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _orthogonality_error(W) -> float:
    W = getattr(W, "weight", W)
    return float(np.linalg.norm(W.T @ W - np.eye(W.shape[0])))


@pytest.fixture
def hub_pair(overdetermined_pair):
    """
    ``overdetermined_pair`` plus 30 near-duplicate source words and one
    target placed on their image, so that target is the rank-1 neighbor
    of all 30.
    """
    pair = overdetermined_pair
    rng = np.random.default_rng(13)
    center = _unit(rng.standard_normal((1, 8)))
    cluster = _unit(center + 1e-3 * rng.standard_normal((30, 8)))
    src = EmbeddingTable(
        pair.src.words + tuple(f"c{i}" for i in range(30)),
        np.vstack([pair.src.vectors, cluster]),
        NormState.UNIT,
    )
    hub = center @ pair.rotation.T
    tgt = EmbeddingTable(pair.tgt.words + ("hub",), np.vstack([pair.tgt.vectors, hub]), NormState.UNIT)
    return SimpleNamespace(src=src, tgt=tgt, rotation=pair.rotation, gold=pair.gold, hub=len(pair.tgt))


class TestProcrustes:
    """W = U Vᵀ from the SVD of tgtᵀ src."""

    def test_identity(self):
        src = np.random.default_rng(0).standard_normal((20, 5))
        np.testing.assert_allclose(procrustes_solve(src, src).weight, np.eye(5), atol=1e-10)

    def test_planted_rotation(self, orthogonal):
        src = np.random.default_rng(1).standard_normal((50, 6))
        R = orthogonal(6, seed=2)
        W = procrustes_solve(src, src @ R.T)
        np.testing.assert_allclose(W.weight, R, atol=1e-8)
        assert W.provenance["rank_deficient"] is False
        assert W.provenance["n_pairs"] == 50

    def test_beats_random_orthogonal_maps(self, orthogonal):
        baselines = np.stack([orthogonal(4, seed=100 + seed) for seed in range(1000)])
        for instance in range(100):
            rng = np.random.default_rng(instance)
            src = rng.standard_normal((200, 4))
            tgt = src @ orthogonal(4, seed=5000 + instance).T + 0.3 * rng.standard_normal((200, 4))
            W = procrustes_solve(src, tgt).weight
            assert _orthogonality_error(W) < 1e-8, instance

            best = np.linalg.norm(src @ W.T - tgt)
            mapped = np.einsum("nd,qed->qne", src, baselines)
            others = np.linalg.norm(mapped - tgt[None], axis=(1, 2))
            assert np.all(best <= others + 1e-9), instance

    def test_rank_deficient_is_still_orthogonal(self):
        src = np.random.default_rng(5).standard_normal((10, 4))
        src[:, 2:] = 0.0
        W = procrustes_solve(src, src)
        assert W.provenance["rank_deficient"] is True
        assert _orthogonality_error(W) < 1e-8

    def test_left_rotation_equivariance(self, orthogonal):
        rng = np.random.default_rng(6)
        src, tgt = rng.standard_normal((30, 5)), rng.standard_normal((30, 5))
        R = orthogonal(5, seed=7)
        W = procrustes_solve(src, tgt).weight
        np.testing.assert_allclose(procrustes_solve(src, tgt @ R.T).weight, R @ W, atol=1e-8)

    def test_bad_shapes(self):
        with pytest.raises(DataError):
            procrustes_solve(np.ones((3, 2)), np.ones((4, 2)))
        with pytest.raises(DataError):
            procrustes_solve(np.zeros((0, 2)), np.zeros((0, 2)))


class TestExpandDictionary:
    """Mutual CSLS rank-1 matches."""

    def test_recovers_permutation(self, permuted_pair):
        induced = expand_dictionary(permuted_pair.rotation, permuted_pair.src, permuted_pair.tgt)
        expected = np.column_stack([np.arange(30), permuted_pair.perm])
        np.testing.assert_array_equal(induced.pairs, expected)
        assert induced.index.rank1.tolist() == permuted_pair.perm.tolist()

    def test_matches_brute_force(self, make_table):
        rng = np.random.default_rng(8)
        src = make_table(_unit(rng.standard_normal((20, 5))), "s")
        tgt = make_table(_unit(rng.standard_normal((24, 5))), "t")
        W = rng.standard_normal((5, 5))
        k = 3

        mapped = _unit(src.vectors @ W.T)
        sims = mapped @ tgt.vectors.T
        gamma_src = np.sort(sims, axis=1)[:, -k:].mean(axis=1)
        gamma_tgt = np.sort(sims.T, axis=1)[:, -k:].mean(axis=1)
        scores = 2 * sims - gamma_src[:, None] - gamma_tgt[None, :]
        forward = np.argmax(scores, axis=1)
        backward = np.argmax(scores, axis=0)
        expected = [(s, forward[s]) for s in range(20) if backward[forward[s]] == s]

        induced = expand_dictionary(W, src, tgt, k=k, round=2)
        assert [tuple(p) for p in induced.pairs.tolist()] == expected
        np.testing.assert_allclose(induced.scores, [scores[s, t] for s, t in expected], atol=1e-10)
        assert induced.round == 2

    def test_expansion_vocab_limits_candidates(self, permuted_pair):
        cfg = RefineConfig(expansion_vocab=10)
        induced = expand_dictionary(permuted_pair.rotation, permuted_pair.src, permuted_pair.tgt, cfg)
        assert np.all(induced.pairs[:, 0] < 10)
        assert np.all(induced.pairs[:, 1] < 10)

    def test_save(self, permuted_pair, tmp_path):
        induced = expand_dictionary(permuted_pair.rotation, permuted_pair.src, permuted_pair.tgt)
        path = tmp_path / "dict.txt"
        induced.save(path, permuted_pair.src, permuted_pair.tgt)
        first = path.read_text(encoding="utf-8").splitlines()[0].split()
        assert first[:2] == ["s0", f"t{permuted_pair.perm[0]}"]
        assert len(first) == 3


class TestHubnessFilter:
    """Drop pairs whose target is too many queries' rank-1 neighbor."""

    @staticmethod
    def _index(rank1):
        rank1 = np.asarray(rank1)
        return NeighborIndex(query_ids=np.arange(len(rank1)), ids=rank1[:, None], scores=np.zeros((len(rank1), 1)))

    def test_unchanged_below_threshold(self):
        dictionary = ExpansionDictionary(pairs=[(0, 0), (1, 1)], scores=[0.9, 0.8])
        kept = hubness_filter(dictionary, self._index([0] * 20 + [1] * 5), threshold=20)
        np.testing.assert_array_equal(kept.pairs, dictionary.pairs)

    def test_removes_hub(self):
        dictionary = ExpansionDictionary(pairs=[(0, 5), (30, 7)], scores=[0.9, 0.8], round=3)
        kept = hubness_filter(dictionary, self._index([5] * 21 + [7] * 2), threshold=20)
        np.testing.assert_array_equal(kept.pairs, [[30, 7]])
        np.testing.assert_array_equal(kept.scores, [0.8])
        assert kept.round == 3

    def test_zero_threshold(self):
        dictionary = ExpansionDictionary(pairs=[(0, 0), (1, 1)], scores=[0.9, 0.8])
        kept = hubness_filter(dictionary, self._index([0, 1, 1]), threshold=0)
        assert len(kept) == 0

    def test_output_respects_threshold(self):
        rng = np.random.default_rng(9)
        rank1 = rng.integers(0, 6, size=60)
        dictionary = ExpansionDictionary(pairs=np.column_stack([np.arange(6), np.arange(6)]), scores=np.ones(6))
        counts = np.bincount(rank1, minlength=6)
        kept = hubness_filter(dictionary, self._index(rank1), threshold=10)
        assert all(counts[t] <= 10 for t in kept.pairs[:, 1])
        assert len(kept) == int(np.sum(counts <= 10))

    def test_negative_threshold(self):
        dictionary = ExpansionDictionary(pairs=[(0, 0)], scores=[1.0])
        with pytest.raises(ConfigError):
            hubness_filter(dictionary, self._index([0]), threshold=-1)


class TestIterativeRefine:
    """Expand, filter, solve; keep the best criterion."""

    def test_aligned_start_is_a_fixed_point(self, overdetermined_pair):
        pair = overdetermined_pair
        result = iterative_refine(MappingMatrix(pair.rotation), pair.src, pair.tgt, RefineConfig(rounds=3, csls_k=1))
        assert np.linalg.norm(result.mapping.weight - pair.rotation) < 1e-6
        assert result.best_criterion >= result.history[0].criterion
        assert result.best_criterion == pytest.approx(1.0, abs=1e-9)

    def test_noisy_start_recovers_rotation(self, overdetermined_pair):
        pair = overdetermined_pair
        noise = 0.01 * np.random.default_rng(10).standard_normal(pair.rotation.shape)
        W0 = MappingMatrix(pair.rotation + noise)
        result = iterative_refine(W0, pair.src, pair.tgt, RefineConfig(rounds=5, csls_k=1))

        assert result.best_round >= 1
        assert np.linalg.norm(result.mapping.weight - pair.rotation) < 1e-6
        before = precision_at_k(retrieve_for_lexicon(W0, pair.src, pair.tgt, pair.gold, topn=1), pair.gold, 1)
        after = precision_at_k(
            retrieve_for_lexicon(result.mapping, pair.src, pair.tgt, pair.gold, k=1, topn=1), pair.gold, 1
        )
        assert after >= before
        assert after == 1.0

    def test_hub_target_is_filtered(self, hub_pair):
        pair = hub_pair
        noise = 0.01 * np.random.default_rng(14).standard_normal(pair.rotation.shape)
        W0 = MappingMatrix(pair.rotation + noise)
        filtered = iterative_refine(W0, pair.src, pair.tgt, RefineConfig(rounds=3, csls_k=1, hubness_threshold=20))
        unfiltered = iterative_refine(W0, pair.src, pair.tgt, RefineConfig(rounds=3, csls_k=1, hubness_filter=False))

        counts = hubness_counts(unfiltered.dictionaries[0].index)
        assert counts[pair.hub] > 20
        assert pair.hub in unfiltered.dictionaries[0].pairs[:, 1]
        for kept in filtered.dictionaries:
            counts = hubness_counts(kept.index)
            assert max(counts[int(t)] for t in kept.pairs[:, 1]) <= 20
            assert pair.hub not in kept.pairs[:, 1]

        def p_at_1(result):
            index = retrieve_for_lexicon(result.mapping, pair.src, pair.tgt, pair.gold, k=1, topn=1)
            return precision_at_k(index, pair.gold, 1)

        assert p_at_1(filtered) >= p_at_1(unfiltered)

    def test_never_worse_than_start(self, permuted_pair, orthogonal):
        W0 = orthogonal(32, seed=12)
        result = iterative_refine(W0, permuted_pair.src, permuted_pair.tgt, RefineConfig(rounds=2))
        start = unsupervised_criterion(W0, permuted_pair.src, permuted_pair.tgt, RefineConfig())
        assert result.best_criterion >= start
        assert result.history[0].round == 0

    def test_history_and_report(self, overdetermined_pair, tmp_path):
        pair = overdetermined_pair
        cfg = RefineConfig(rounds=2, early_stop=False, hubness_filter=False, csls_k=1)
        result = iterative_refine(pair.rotation, pair.src, pair.tgt, cfg)
        assert [r.round for r in result.history] == [0, 1, 2]
        assert len(result.dictionaries) == 2
        assert all(r.kept == r.candidates == 200 for r in result.history[1:])

        path = tmp_path / "refinement.json"
        result.write_json(path)
        data = json.loads(path.read_text())
        assert data["best_round"] == result.best_round
        assert len(data["history"]) == 3

    def test_rounds_override(self, overdetermined_pair):
        pair = overdetermined_pair
        result = iterative_refine(pair.rotation, pair.src, pair.tgt, RefineConfig(rounds=5, early_stop=False), rounds=1)
        assert len(result.history) == 2
        with pytest.raises(ConfigError):
            iterative_refine(pair.rotation, pair.src, pair.tgt, rounds=0)


class TestRefineConfig:
    """Validation."""

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            RefineConfig.from_dict({"rounds": 2, "nope": True})

    def test_invalid(self):
        with pytest.raises(ConfigError):
            RefineConfig(rounds=0)
        with pytest.raises(ConfigError):
            RefineConfig(hubness_threshold=-1)

    def test_round_trip(self):
        cfg = RefineConfig(rounds=3, hubness_filter=False)
        assert RefineConfig.from_dict(cfg.to_dict()) == cfg
