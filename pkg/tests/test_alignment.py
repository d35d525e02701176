"""Tests for the discriminator, loss terms, projection, criterion and trainer."""

import json
import math

import numpy as np
import pytest
import torch

from lexalign.alignment import (
    CSLSNeighborhoods,
    Discriminator,
    LossWeights,
    MappingMatrix,
    TrainConfig,
    TrainingLog,
    TrainMode,
    beta_projection_step,
    build_discriminator,
    discriminator_forward,
    loss_discriminator,
    loss_generator_adv,
    loss_orthogonality,
    loss_supervised,
    total_map_loss,
    train,
    unsupervised_criterion,
)
from lexalign.embeddings import AlignedLexicon, EmbeddingTable, NormState
from lexalign.errors import ConfigError, DataError
from lexalign.logging import FileLogger

LOG2 = math.log(2.0)


def _half_discriminator(dim: int = 4) -> Discriminator:
    """D ≡ 0.5: zero output layer."""
    torch.manual_seed(0)
    disc = Discriminator(dim, hidden=(8, 8), input_dropout=0.0).double()
    with torch.no_grad():
        disc.output_layer.weight.zero_()
        disc.output_layer.bias.zero_()
    return disc.eval()


def _random_discriminator(dim: int = 4) -> Discriminator:
    torch.manual_seed(1)
    return Discriminator(dim, hidden=(6, 6), input_dropout=0.0).double().eval()


def _rows(seed: int, n: int, d: int) -> torch.Tensor:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    return torch.as_tensor(x / np.linalg.norm(x, axis=1, keepdims=True))


def _unit(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _rotation_about_diagonal(angle: float) -> np.ndarray:
    """Rotation of R^3 about (1, 1, 1) by ``angle`` radians."""
    k = np.ones(3) / np.sqrt(3)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


class TestDiscriminator:
    """Forward pass of D."""

    def test_zero_output_layer_gives_half(self):
        disc = _half_discriminator()
        for v in np.random.default_rng(0).standard_normal((5, 4)):
            assert discriminator_forward(disc, v) == pytest.approx(0.5)

    def test_eval_mode_is_deterministic(self):
        torch.manual_seed(0)
        disc = Discriminator(3, hidden=(4,), input_dropout=0.5).double()
        v = np.array([0.3, -1.0, 2.0])
        assert discriminator_forward(disc, v) == discriminator_forward(disc, v)

    def test_hand_computed_network(self):
        disc = Discriminator(2, hidden=(2,), input_dropout=0.0, leaky_slope=0.2).double()
        with torch.no_grad():
            disc.net[0].weight.copy_(torch.tensor([[1.0, -1.0], [0.5, 2.0]]))
            disc.net[0].bias.copy_(torch.tensor([0.0, -1.0]))
            disc.output_layer.weight.copy_(torch.tensor([[1.0, -2.0]]))
            disc.output_layer.bias.copy_(torch.tensor([0.5]))
        # hidden pre-activations (-1, 3.5) -> (-0.2, 3.5); logit -0.2 - 7 + 0.5
        expected = 1.0 / (1.0 + math.exp(6.7))
        assert discriminator_forward(disc, np.array([1.0, 2.0])) == pytest.approx(expected, abs=1e-10)

    def test_dropout_only_in_train_mode(self):
        generator = torch.Generator().manual_seed(0)
        disc = Discriminator(4, hidden=(4,), input_dropout=0.5, generator=generator).double()
        x = torch.ones(1, 4, dtype=torch.float64)
        assert torch.equal(disc.eval().drop_input(x), x)
        dropped = disc.train().drop_input(torch.ones(200, 4, dtype=torch.float64))
        assert set(dropped.unique().tolist()) <= {0.0, 2.0}

    def test_built_from_config(self):
        cfg = TrainConfig(hidden_dim=16, hidden_layers=2)
        disc = build_discriminator(cfg, 5)
        linears = [m for m in disc.net if isinstance(m, torch.nn.Linear)]
        assert [(m.in_features, m.out_features) for m in linears] == [(5, 16), (16, 16), (16, 1)]
        assert next(disc.parameters()).dtype == torch.float32


class TestAdversarialLosses:
    """Discriminator and mapping sides of the adversarial game."""

    def test_discriminator_loss_at_half(self):
        disc = _half_discriminator()
        W = torch.eye(4, dtype=torch.float64)
        xs, ys = _rows(0, 5, 4), _rows(1, 5, 4)
        assert float(loss_discriminator(disc, W, xs, ys)) == pytest.approx(2 * LOG2)
        assert float(loss_discriminator(disc, W, xs, ys, smoothing=0.1)) == pytest.approx(2 * LOG2)

    def test_discriminator_loss_perfect_separation(self):
        disc = Discriminator(2, hidden=(2,), input_dropout=0.0).double().eval()
        with torch.no_grad():
            disc.net[0].weight.copy_(torch.eye(2, dtype=torch.float64))
            disc.net[0].bias.zero_()
            disc.output_layer.weight.copy_(torch.tensor([[10.0, 0.0]]))
            disc.output_layer.bias.zero_()
        mapped = torch.tensor([[-10.0, 0.0]] * 3, dtype=torch.float64)
        genuine = torch.tensor([[10.0, 0.0]] * 3, dtype=torch.float64)
        loss = float(loss_discriminator(disc, torch.eye(2, dtype=torch.float64), mapped, genuine))
        assert 0 < loss < 1e-5

    def test_discriminator_loss_decreases_on_separable_batch(self):
        torch.manual_seed(0)
        disc = Discriminator(2, hidden=(8, 8), input_dropout=0.0).double()
        W = torch.eye(2, dtype=torch.float64)
        rng = np.random.default_rng(0)
        mapped = torch.as_tensor(rng.normal([-1.0, 0.0], 0.1, size=(16, 2)))
        genuine = torch.as_tensor(rng.normal([1.0, 0.0], 0.1, size=(16, 2)))
        optimizer = torch.optim.SGD(disc.parameters(), lr=0.05)
        losses = []
        for _ in range(100):
            loss = loss_discriminator(disc, W, mapped, genuine)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            losses.append(float(loss))
        assert np.all(np.diff(losses) < 0)

    def test_empty_batch(self):
        disc = _half_discriminator()
        W = torch.eye(4, dtype=torch.float64)
        with pytest.raises(DataError):
            loss_discriminator(disc, W, torch.zeros(0, 4, dtype=torch.float64), _rows(0, 3, 4))
        with pytest.raises(DataError):
            loss_generator_adv(disc, W, torch.zeros(0, 4, dtype=torch.float64))

    def test_generator_loss_at_half(self):
        disc = _half_discriminator()
        loss = loss_generator_adv(disc, torch.eye(4, dtype=torch.float64), _rows(0, 5, 4))
        assert float(loss) == pytest.approx(LOG2)

    def test_generator_loss_vanishes_when_fooled(self):
        disc = _half_discriminator()
        with torch.no_grad():
            disc.output_layer.bias.fill_(40.0)
        loss = loss_generator_adv(disc, torch.eye(4, dtype=torch.float64), _rows(0, 5, 4))
        assert 0 < float(loss) < 1e-6

    def test_generator_gradient(self):
        disc = _random_discriminator()
        batch = _rows(2, 5, 4)
        W = torch.as_tensor(np.random.default_rng(3).standard_normal((4, 4))).requires_grad_()
        assert torch.autograd.gradcheck(lambda w: loss_generator_adv(disc, w, batch), (W,))


class TestSupervisedLoss:
    """Dictionary term with cosine and CSLS pair similarity."""

    def test_cosine_identical_pairs(self):
        x = _rows(0, 4, 3)
        assert float(loss_supervised(torch.eye(3, dtype=torch.float64), x, x)) == pytest.approx(-1.0)

    def test_cosine_orthogonal_pairs(self):
        x = torch.tensor([[1.0, 0.0], [0.0, 1.0]], dtype=torch.float64)
        y = torch.tensor([[0.0, 1.0], [1.0, 0.0]], dtype=torch.float64)
        assert float(loss_supervised(torch.eye(2, dtype=torch.float64), x, y)) == pytest.approx(0.0)

    def test_csls_matches_brute_force(self):
        src, tgt = _rows(4, 6, 3), _rows(5, 6, 3)
        W = torch.as_tensor(np.random.default_rng(6).standard_normal((3, 3)))
        pairs = np.array([[0, 1], [2, 3], [4, 5]])
        context = CSLSNeighborhoods.build(W, src, tgt, pairs[:, 0], pairs[:, 1], k=1)
        loss = loss_supervised(W, src[pairs[:, 0]], tgt[pairs[:, 1]], "csls", context, pairs)

        mapped = _unit(src.numpy() @ W.numpy().T)
        targets = _unit(tgt.numpy())
        sims = mapped @ targets.T
        gamma_src = sims.max(axis=1)
        gamma_tgt = sims.max(axis=0)
        scores = [2 * sims[s, t] - gamma_src[s] - gamma_tgt[t] for s, t in pairs]
        assert float(loss) == pytest.approx(-np.mean(scores), abs=1e-10)

    def test_csls_gradient_with_frozen_neighborhoods(self):
        src, tgt = _rows(7, 8, 3), _rows(8, 8, 3)
        pairs = np.array([[0, 0], [1, 2], [3, 5]])
        W0 = torch.as_tensor(np.random.default_rng(9).standard_normal((3, 3)))
        context = CSLSNeighborhoods.build(W0, src, tgt, pairs[:, 0], pairs[:, 1], k=2)
        W = W0.clone().requires_grad_()

        def loss(w):
            return loss_supervised(w, src[pairs[:, 0]], tgt[pairs[:, 1]], "csls", context, pairs)

        assert torch.autograd.gradcheck(loss, (W,))

    def test_csls_needs_context(self):
        x = _rows(0, 2, 3)
        with pytest.raises(DataError):
            loss_supervised(torch.eye(3, dtype=torch.float64), x, x, "csls")

    def test_empty_batch(self):
        empty = torch.zeros(0, 3, dtype=torch.float64)
        with pytest.raises(DataError):
            loss_supervised(torch.eye(3, dtype=torch.float64), empty, empty)


class TestOrthogonalityLoss:
    """-mean cos(x, WᵀW x)."""

    def test_orthogonal_minimum(self, orthogonal):
        Q = torch.as_tensor(orthogonal(5))
        batch = _rows(0, 10, 5)
        assert float(loss_orthogonality(Q, batch)) == pytest.approx(-1.0, abs=1e-12)
        assert float(loss_orthogonality(3.0 * Q, batch)) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_example(self):
        W = torch.diag(torch.tensor([1.0, 3.0], dtype=torch.float64))
        x = torch.tensor([[1.0, 1.0]], dtype=torch.float64) / math.sqrt(2)
        expected = -10 / (math.sqrt(2) * math.sqrt(82))
        assert float(loss_orthogonality(W, x)) == pytest.approx(expected, abs=1e-12)

    def test_non_conformal_perturbation_increases_loss(self):
        W = torch.diag(torch.tensor([1.1, 0.9], dtype=torch.float64))
        batch = torch.tensor([[1.0, 1.0], [1.0, -1.0], [1.0, 0.0]], dtype=torch.float64)
        assert float(loss_orthogonality(W, batch)) > -1.0 + 1e-6

    def test_gradient(self):
        batch = _rows(10, 6, 4)
        W = torch.as_tensor(np.random.default_rng(11).standard_normal((4, 4))).requires_grad_()
        assert torch.autograd.gradcheck(lambda w: loss_orthogonality(w, batch), (W,))


class TestTotalMapLoss:
    """Weighted sum of the terms."""

    def test_adversarial_only(self):
        assert total_map_loss(0.7, -1.0, -1.0, LossWeights(1, 0, 0)) == pytest.approx(0.7)

    def test_sum(self):
        assert total_map_loss(0.5, -1.0, -1.0, LossWeights(1, 1, 1)) == pytest.approx(-1.5)

    def test_unused_terms_are_dropped(self):
        assert total_map_loss(None, float("nan"), 2.0, LossWeights(1, 0, 0.5)) == pytest.approx(1.0)

    def test_gradient_of_sum_is_sum_of_gradients(self):
        disc = _random_discriminator()
        xs, pairs_x, pairs_y = _rows(12, 5, 4), _rows(13, 4, 4), _rows(14, 4, 4)
        W0 = np.random.default_rng(15).standard_normal((4, 4))
        weights = LossWeights(1.0, 0.5, 2.0)

        def terms(W):
            return (
                loss_generator_adv(disc, W, xs),
                loss_supervised(W, pairs_x, pairs_y),
                loss_orthogonality(W, xs),
            )

        W = torch.tensor(W0, requires_grad=True)
        total_map_loss(*terms(W), weights).backward()
        separate = []
        for term, weight in zip(range(3), (weights.adv, weights.sup, weights.orth)):
            Wi = torch.tensor(W0, requires_grad=True)
            (weight * terms(Wi)[term]).backward()
            separate.append(Wi.grad)
        torch.testing.assert_close(W.grad, sum(separate))

        assert torch.autograd.gradcheck(
            lambda w: total_map_loss(*terms(w), weights), (torch.tensor(W0, requires_grad=True),)
        )


class TestLossGradients:
    """Autograd against finite differences over random dimensions, in float64."""

    @staticmethod
    def _trials(n=100):
        for trial in range(n):
            rng = np.random.default_rng(1000 + trial)
            yield trial, int(rng.integers(2, 9)), rng

    @staticmethod
    def _mapping(rng, d):
        return torch.as_tensor(rng.standard_normal((d, d))).requires_grad_()

    @staticmethod
    def _disc(d, seed):
        torch.manual_seed(seed)
        return Discriminator(d, hidden=(6, 6), input_dropout=0.0).double().eval()

    def test_generator_adversarial(self):
        for trial, d, rng in self._trials():
            disc, batch = self._disc(d, trial), _rows(trial, 5, d)
            W = self._mapping(rng, d)
            assert torch.autograd.gradcheck(lambda w: loss_generator_adv(disc, w, batch), (W,)), trial

    def test_discriminator_in_mapping(self):
        for trial, d, rng in self._trials():
            disc, xs, ys = self._disc(d, trial), _rows(trial, 5, d), _rows(trial + 500, 5, d)
            W = self._mapping(rng, d)
            assert torch.autograd.gradcheck(
                lambda w: loss_discriminator(disc, w, xs, ys, smoothing=0.1), (W,)
            ), trial

    def test_discriminator_in_parameters(self):
        for trial, d, rng in self._trials():
            disc, xs, ys = self._disc(d, trial), _rows(trial, 5, d), _rows(trial + 500, 5, d)
            W = torch.as_tensor(rng.standard_normal((d, d)))
            names = [name for name, _ in disc.named_parameters()]
            params = tuple(p.detach().clone().requires_grad_() for p in disc.parameters())

            def loss(*values):
                def bound(x):
                    return torch.func.functional_call(disc, dict(zip(names, values)), (x,))

                return loss_discriminator(bound, W, xs, ys, smoothing=0.1)

            assert torch.autograd.gradcheck(loss, params), trial

    def test_supervised_cosine(self):
        for trial, d, rng in self._trials():
            xs, ys = _rows(trial, 6, d), _rows(trial + 500, 6, d)
            W = self._mapping(rng, d)
            assert torch.autograd.gradcheck(lambda w: loss_supervised(w, xs, ys), (W,)), trial

    def test_supervised_csls(self):
        pairs = np.array([[0, 0], [1, 2], [3, 5], [6, 7]])
        for trial, d, rng in self._trials():
            src, tgt = _rows(trial, 8, d), _rows(trial + 500, 8, d)
            W0 = torch.as_tensor(rng.standard_normal((d, d)))
            context = CSLSNeighborhoods.build(W0, src, tgt, pairs[:, 0], pairs[:, 1], k=2)

            def loss(w):
                return loss_supervised(w, src[pairs[:, 0]], tgt[pairs[:, 1]], "csls", context, pairs)

            assert torch.autograd.gradcheck(loss, (W0.clone().requires_grad_(),)), trial

    def test_orthogonality(self):
        for trial, d, rng in self._trials():
            batch = _rows(trial, 6, d)
            W = self._mapping(rng, d)
            assert torch.autograd.gradcheck(lambda w: loss_orthogonality(w, batch), (W,)), trial

    def test_total(self):
        weights = LossWeights(1.0, 0.5, 2.0)
        for trial, d, rng in self._trials():
            disc, xs, ys = self._disc(d, trial), _rows(trial, 5, d), _rows(trial + 500, 5, d)
            W = self._mapping(rng, d)

            def loss(w):
                adv = loss_generator_adv(disc, w, xs)
                return total_map_loss(adv, loss_supervised(w, xs, ys), loss_orthogonality(w, xs), weights)

            assert torch.autograd.gradcheck(loss, (W,)), trial


class TestBetaProjection:
    """W <- (1 + β) W - β (W Wᵀ) W."""

    def test_orthogonal_fixed_point(self, orthogonal):
        Q = orthogonal(4)
        np.testing.assert_allclose(beta_projection_step(Q, 0.01), Q, atol=1e-12)

    def test_one_step(self):
        np.testing.assert_allclose(beta_projection_step(2 * np.eye(2), 0.01), 1.94 * np.eye(2))

    def test_converges_to_orthogonal(self):
        W = 2 * np.eye(2)
        for _ in range(500):
            W = beta_projection_step(W, 0.01)
        assert np.linalg.norm(W.T @ W - np.eye(2)) < 1e-3

    def test_tensor_in_tensor_out(self):
        out = beta_projection_step(2 * torch.eye(2, dtype=torch.float64), 0.01)
        assert isinstance(out, torch.Tensor)
        torch.testing.assert_close(out, 1.94 * torch.eye(2, dtype=torch.float64))

    def test_beta_must_be_positive(self):
        with pytest.raises(ConfigError):
            beta_projection_step(np.eye(2), 0.0)


class TestMappingMatrix:
    """W and its file formats."""

    def test_text_round_trip(self, tmp_path):
        W = MappingMatrix(np.random.default_rng(0).standard_normal((4, 4)))
        W.save(tmp_path / "W.txt")
        lines = (tmp_path / "W.txt").read_text().splitlines()
        assert lines[0] == "4" and len(lines) == 5
        np.testing.assert_array_equal(MappingMatrix.load(tmp_path / "W.txt").weight, W.weight)

    def test_binary_round_trip(self, tmp_path):
        W = MappingMatrix(np.eye(3) * 0.5, {"mode": "semi", "seed": 3})
        W.save(tmp_path / "W.npz")
        loaded = MappingMatrix.load(tmp_path / "W.npz")
        np.testing.assert_array_equal(loaded.weight, W.weight)
        assert loaded.provenance == {"mode": "semi", "seed": "3"}

    def test_malformed_text(self, tmp_path):
        path = tmp_path / "W.txt"
        path.write_text("3\n1 0 0\n0 1 0\n")
        with pytest.raises(DataError):
            MappingMatrix.load(path)

    def test_rejects_bad_matrices(self):
        with pytest.raises(DataError):
            MappingMatrix(np.ones((2, 3)))
        with pytest.raises(DataError):
            MappingMatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_apply(self):
        W = MappingMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
        table = EmbeddingTable(("a",), np.array([[1.0, 2.0]]))
        np.testing.assert_array_equal(W.apply(table).vectors, [[2.0, 1.0]])
        with pytest.raises(DataError):
            W.apply(np.ones((1, 3)))


class TestUnsupervisedCriterion:
    """Mean cos(Wx, ŷ) over CSLS rank-1 translations."""

    def test_aligned_is_one(self, permuted_pair):
        value = unsupervised_criterion(permuted_pair.rotation, permuted_pair.src, permuted_pair.tgt)
        assert value == pytest.approx(1.0, abs=1e-6)

    def test_random_mapping_is_lower(self, permuted_pair, orthogonal):
        aligned = unsupervised_criterion(permuted_pair.rotation, permuted_pair.src, permuted_pair.tgt)
        random = unsupervised_criterion(orthogonal(32, seed=5), permuted_pair.src, permuted_pair.tgt)
        assert random < aligned

    def test_matches_brute_force(self, make_table):
        rng = np.random.default_rng(16)
        src = make_table(_unit(rng.standard_normal((50, 6))), "s", NormState.UNIT)
        tgt = make_table(_unit(rng.standard_normal((50, 6))), "t", NormState.UNIT)
        W = rng.standard_normal((6, 6))
        m_val, k = 20, 5

        mapped, targets = _unit(src.vectors @ W.T), tgt.vectors
        sims = mapped @ targets.T
        gamma_src = np.sort(sims, axis=1)[:, -k:].mean(axis=1)
        gamma_tgt = np.sort(sims.T, axis=1)[:, -k:].mean(axis=1)
        scores = 2 * sims[:m_val] - gamma_src[:m_val, None] - gamma_tgt[None, :]
        best = np.argmax(scores, axis=1)
        expected = np.mean(sims[np.arange(m_val), best])

        value = unsupervised_criterion(W, src, tgt, m_val=m_val, k=k)
        assert value == pytest.approx(expected, abs=1e-10)


class TestTrainConfig:
    """Parsing and validation."""

    def test_mode_aliases(self):
        assert TrainConfig(mode="unsup").mode == TrainMode.UNSUPERVISED
        assert TrainConfig(mode="sup").mode == TrainMode.SUPERVISED

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            TrainConfig(mode="bogus")

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({"rounds": 2, "nope": 1})

    @pytest.mark.parametrize("field,value", [
        ("label_smoothing", 0.5), ("lambda_adv", -1.0), ("f_a", "csls"), ("rounds", 0), ("sup_optimizer", "rmsprop"),
    ])
    def test_invalid_values(self, field, value):
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({field: value})

    def test_round_trip_and_hash(self):
        cfg = TrainConfig(mode="semi", f_s="csls", rounds=3)
        data = cfg.to_dict()
        assert data["mode"] == "semi" and data["f_s"] == "csls"
        assert TrainConfig.from_dict(data).config_hash() == cfg.config_hash()
        assert TrainConfig(rounds=4).config_hash() != cfg.config_hash()

    def test_mode_drops_terms(self):
        weights = LossWeights.from_config(TrainConfig(mode="sup", lambda_orth=0.0))
        assert weights.as_dict() == {"adv": 0.0, "sup": 1.0, "orth": 0.0}
        weights = LossWeights.from_config(TrainConfig(mode="unsup"))
        assert weights.sup == 0.0


class TestTrain:
    """End-to-end mapping training on small problems."""

    @pytest.fixture
    def rotated(self, make_table):
        rng = np.random.default_rng(17)
        R = _rotation_about_diagonal(np.pi / 3)
        vectors = _unit(rng.standard_normal((40, 3)))
        src = make_table(vectors, "s", NormState.UNIT)
        tgt = make_table(vectors @ R.T, "t", NormState.UNIT)
        lexicon = AlignedLexicon([(i, i) for i in range(40)])
        return src, tgt, lexicon, R

    def _tiny(self, **overrides):
        base = dict(
            hidden_dim=8, rounds=2, iters_per_round=20, log_interval=10,
            neighbor_refresh=10, criterion_vocab=40, dis_steps_per_map_step=1, seed=0,
        )
        base.update(overrides)
        return TrainConfig(**base)

    def test_supervised_recovers_planted_rotation(self, rotated):
        src, tgt, lexicon, R = rotated
        cfg = self._tiny(
            mode="sup", lambda_adv=0.0, lambda_orth=0.0, f_s="cosine",
            orthogonality="beta", beta=0.01, lr=0.2, rounds=3, iters_per_round=400, log_interval=100,
            dtype="float64",
        )
        result = train(src, tgt, lexicon, cfg)
        assert np.linalg.norm(result.mapping.weight - R) < 0.05
        assert result.best_criterion == pytest.approx(1.0, abs=1e-3)

    def test_dictionary_term_alone_recovers_rotation_up_to_scale(self, rotated):
        src, tgt, lexicon, R = rotated
        cfg = self._tiny(
            mode="sup", lambda_adv=0.0, lambda_orth=0.0, f_s="cosine",
            lr=0.2, rounds=3, iters_per_round=400, log_interval=100, dtype="float64",
        )
        assert not cfg.uses_adversarial and not cfg.uses_orthogonality_loss
        result = train(src, tgt, lexicon, cfg)
        W = result.mapping.weight
        scale = np.trace(R.T @ W) / 3
        assert scale > 0
        assert np.linalg.norm(W / scale - R) < 0.05
        assert result.best_criterion > 0.99

    def test_csls_supervised_runs(self, rotated):
        src, tgt, lexicon, _ = rotated
        result = train(src, tgt, lexicon, self._tiny(mode="sup", f_s="csls", csls_k=3))
        assert np.all(np.isfinite(result.mapping.weight))
        assert result.mapping.provenance["mode"] == "supervised"

    def test_reproducible(self, rotated):
        src, tgt, _, _ = rotated
        first = train(src, tgt, None, self._tiny(mode="unsup"))
        second = train(src, tgt, None, self._tiny(mode="unsup"))
        np.testing.assert_array_equal(first.mapping.weight, second.mapping.weight)
        assert [r.to_dict() for r in first.log] == [r.to_dict() for r in second.log]

    def test_log_shape(self, rotated, tmp_path):
        src, tgt, lexicon, _ = rotated
        result = train(src, tgt, lexicon, self._tiny(mode="semi"), eval_lexicon=lexicon)
        assert len(result.log) == 6
        rounds = result.log.round_records()
        assert [r.round for r in rounds] == [0, 1]
        assert all(0.0 <= r.precision_at_1 <= 1.0 for r in rounds)
        assert 0 <= result.best_round <= 1

        path = tmp_path / "log.jsonl"
        result.log.write_jsonl(path)
        reread = TrainingLog.read_jsonl(path)
        assert [r.to_dict() for r in reread] == [r.to_dict() for r in result.log]
        assert "L_W|D" in path.read_text().splitlines()[0]

    def test_checkpoint_events_track_best_round(self, rotated, tmp_path):
        src, tgt, _, _ = rotated
        path = tmp_path / "events.jsonl"
        result = train(src, tgt, None, self._tiny(mode="unsup", rounds=3), run_logger=FileLogger(str(path)))

        entries = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        checkpoints = [e["data"] for e in entries if e["event"] == "train.checkpoint"]
        assert checkpoints[0]["round"] == 0
        criteria = [c["criterion"] for c in checkpoints]
        assert criteria == sorted(criteria)
        assert checkpoints[-1]["round"] == result.best_round
        assert checkpoints[-1]["criterion"] == pytest.approx(result.best_criterion)

    def test_raw_tables_rejected(self, make_table):
        raw = make_table(np.eye(3))
        with pytest.raises(DataError):
            train(raw, raw, None, self._tiny(mode="unsup"))
        result = train(raw, raw, None, self._tiny(mode="unsup", require_normalized=False, rounds=1, csls_k=2))
        assert result.best_round == 0

    def test_supervised_needs_lexicon(self, rotated):
        src, tgt, _, _ = rotated
        with pytest.raises(DataError):
            train(src, tgt, None, self._tiny(mode="sup"))

    def test_no_active_term(self, rotated):
        src, tgt, lexicon, _ = rotated
        with pytest.raises(ConfigError):
            train(src, tgt, lexicon, self._tiny(mode="sup", lambda_sup=0.0, lambda_orth=0.0))

    def test_dimension_mismatch(self, make_table):
        a = make_table(np.eye(3), "a", NormState.UNIT)
        b = make_table(np.eye(2), "b", NormState.UNIT)
        with pytest.raises(DataError):
            train(a, b, None, self._tiny(mode="unsup"))
