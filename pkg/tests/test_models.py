import numpy as np
import pytest

from fencenet import tensor as T
from fencenet.errors import ConfigError, ShapeError
from fencenet.models import (
    BiFenceNet,
    FenceNet,
    ModelConfig,
    build_model,
    load_checkpoint,
    parameter_count,
    save_checkpoint,
)
from fencenet.nn import TcnBlockConfig
from fencenet.presets import list_presets, load_preset, preset_configs


def preset_model(name, seed=0):
    model_cfg, _, _ = preset_configs(load_preset(name))
    return build_model(model_cfg, np.random.default_rng(seed))


def mini_config(kind="fencenet", in_ch=6, length=28):
    widths = [8, 8, 12, 12, 16, 16] if kind != "bifencenet" and kind != "bifencenet_forward2" \
        else [8, 8, 16, 16]
    kernels = [7, 7, 5, 5, 3, 3][:len(widths)]
    dilations = [1, 1, 2, 2, 4, 4][:len(widths)] if len(widths) == 6 else [1, 2, 4, 8]
    chain = [in_ch] + widths
    blocks = [TcnBlockConfig(chain[i], chain[i + 1], kernels[i], dilations[i])
              for i in range(len(widths))]
    return ModelConfig(kind=kind, blocks=blocks, dense_hidden=16, input_channels=in_ch,
                       input_length=length, dropout_rate=0.1)


class TestConfigValidation:
    def test_wrong_block_count(self):
        cfg = mini_config()
        cfg.blocks = cfg.blocks[:5]
        with pytest.raises(ConfigError, match="blocks"):
            cfg.validate()

    def test_decreasing_width_rejected(self):
        cfg = mini_config()
        cfg.blocks[3] = TcnBlockConfig(12, 8, 5, 2)
        cfg.blocks[4] = TcnBlockConfig(8, 16, 3, 4)
        with pytest.raises(ConfigError, match="non-decreasing"):
            cfg.validate()

    def test_increasing_kernel_rejected(self):
        cfg = mini_config()
        cfg.blocks[5] = TcnBlockConfig(16, 16, 9, 4)
        with pytest.raises(ConfigError, match="non-increasing"):
            cfg.validate()

    def test_receptive_field_must_cover_window(self):
        blocks = [TcnBlockConfig(4, 8, 2, 1)] * 6
        blocks = [TcnBlockConfig(4 if i == 0 else 8, 8, 2, 1) for i in range(6)]
        cfg = ModelConfig(kind="fencenet", blocks=blocks, input_channels=4)
        with pytest.raises(ConfigError, match="receptive field"):
            cfg.validate()

    def test_broken_chain_rejected(self):
        cfg = mini_config()
        cfg.blocks[2] = TcnBlockConfig(99, 12, 5, 2)
        with pytest.raises(ConfigError, match="chain"):
            cfg.validate()

    def test_unknown_kind(self):
        cfg = mini_config()
        cfg.kind = "lstm"
        with pytest.raises(ConfigError, match="kind"):
            cfg.validate()


class TestParameterCounts:
    def test_default_fencenet_range(self):
        model = preset_model("fencenet")
        count = parameter_count(model)
        assert 2.0e6 <= count <= 3.2e6
        assert count == 2549030  # exact and stable

    def test_default_bifencenet_range(self):
        model = preset_model("bifencenet")
        count = parameter_count(model)
        assert 4.2e6 <= count <= 6.6e6
        assert count == 5614470

    def test_counts_stable_across_builds(self):
        for name in list_presets():
            a = parameter_count(preset_model(name, seed=1))
            b = parameter_count(preset_model(name, seed=2))
            assert a == b

    def test_bifencenet_is_two_stacks_plus_head(self):
        model = preset_model("bifencenet")
        per_stack = sum(p.size for n, p in model.parameters().items()
                        if n.startswith("forward."))
        rev_stack = sum(p.size for n, p in model.parameters().items()
                        if n.startswith("reverse."))
        head = sum(p.size for n, p in model.parameters().items() if n.startswith("head."))
        assert per_stack == rev_stack
        assert parameter_count(model) == 2 * per_stack + head

    def test_logits_length(self):
        model = build_model(mini_config(), np.random.default_rng(0))
        x = T.Tensor(np.random.default_rng(1).standard_normal((6, 28)).astype(np.float32))
        assert model.forward(x).shape == (6,)


class TestFenceNetForward:
    def test_eval_deterministic(self):
        model = build_model(mini_config(), np.random.default_rng(3))
        x = T.Tensor(np.random.default_rng(4).standard_normal((6, 28)).astype(np.float32))
        a = model.forward(x).data
        b = model.forward(x).data
        assert np.array_equal(a, b)

    def test_wrong_length_rejected(self):
        model = build_model(mini_config(), np.random.default_rng(5))
        with pytest.raises(ShapeError, match="28"):
            model.forward(T.Tensor(np.zeros((6, 27), dtype=np.float32)))

    def test_wrong_channels_rejected(self):
        model = build_model(mini_config(), np.random.default_rng(5))
        with pytest.raises(ShapeError, match="channels"):
            model.forward(T.Tensor(np.zeros((7, 28), dtype=np.float32)))

    def test_both_ends_of_window_reach_logits(self):
        model = build_model(mini_config(), np.random.default_rng(6))
        x = np.random.default_rng(7).standard_normal((6, 28)).astype(np.float32)
        base = model.forward(T.Tensor(x)).data
        bump_last = x.copy()
        bump_last[:, 27] += 1.0
        bump_first = x.copy()
        bump_first[:, 0] += 1.0
        assert not np.array_equal(model.forward(T.Tensor(bump_last)).data, base)
        assert not np.array_equal(model.forward(T.Tensor(bump_first)).data, base)

    def test_first_block_gets_gradient(self):
        model = build_model(mini_config(), np.random.default_rng(8))
        x = T.Tensor(np.random.default_rng(9).standard_normal((6, 28)).astype(np.float32))
        params = model.parameters()
        T.zero_grads(params.values())
        with T.Tape() as tape:
            loss = T.softmax_cross_entropy(model.forward(x, "train", np.random.default_rng(0)), 2)
        T.backward(loss, tape)
        assert np.any(params["blocks.0.conv1.v"].grad != 0)

    def test_feature_causality(self):
        model = build_model(mini_config(), np.random.default_rng(10))
        x = np.random.default_rng(11).standard_normal((6, 28)).astype(np.float32)
        base = model.features(T.Tensor(x)).data
        x2 = x.copy()
        x2[:, 20] += 5.0
        out = model.features(T.Tensor(x2)).data
        assert np.array_equal(out[:, :20], base[:, :20])


class TestBiFenceNet:
    def test_symmetry_swap_params_reverse_input_swap_halves(self):
        cfg = mini_config(kind="bifencenet")
        model = build_model(cfg, np.random.default_rng(12))
        x = T.Tensor(np.random.default_rng(13).standard_normal((6, 28)).astype(np.float32))
        z = model.feature_vector(x).data
        logits = model.forward(x).data
        # swap the two direction stacks
        model.forward_blocks, model.reverse_blocks = model.reverse_blocks, model.forward_blocks
        z_swapped = model.feature_vector(T.reverse_time(x)).data
        half = z.shape[-1] // 2
        np.testing.assert_array_equal(z_swapped[..., half:], z[..., :half])
        np.testing.assert_array_equal(z_swapped[..., :half], z[..., half:])
        reassembled = np.concatenate([z_swapped[..., half:], z_swapped[..., :half]], axis=-1)
        relogits = model.head(T.Tensor(reassembled)).data
        np.testing.assert_array_equal(relogits, logits)

    def test_forward2_with_copied_params_gives_equal_halves(self):
        cfg = mini_config(kind="bifencenet_forward2")
        model = build_model(cfg, np.random.default_rng(14))
        fwd = model.forward_blocks
        rev = model.reverse_blocks
        for bf, br in zip(fwd, rev):
            for (_, pf), (_, pr) in zip(bf.parameters().items(), br.parameters().items()):
                pr.data = pf.data.copy()
        x = T.Tensor(np.random.default_rng(15).standard_normal((6, 28)).astype(np.float32))
        z = model.feature_vector(x).data
        half = z.shape[-1] // 2
        np.testing.assert_array_equal(z[..., :half], z[..., half:])

    def test_palindrome_with_shared_params_gives_equal_halves(self):
        cfg = mini_config(kind="bifencenet")
        model = build_model(cfg, np.random.default_rng(16))
        for bf, br in zip(model.forward_blocks, model.reverse_blocks):
            for (_, pf), (_, pr) in zip(bf.parameters().items(), br.parameters().items()):
                pr.data = pf.data.copy()
        half_frames = np.random.default_rng(17).standard_normal((6, 14)).astype(np.float32)
        palindrome = np.concatenate([half_frames, half_frames[:, ::-1]], axis=1)
        z = model.feature_vector(T.Tensor(palindrome)).data
        half = z.shape[-1] // 2
        np.testing.assert_array_equal(z[..., :half], z[..., half:])


class TestAcausalFlatten:
    def test_dense_input_is_flattened_map(self):
        cfg = mini_config(kind="acausal_flatten")
        model = build_model(cfg, np.random.default_rng(18))
        assert model.head.w1.shape == (16, cfg.blocks[-1].out_channels * 28)

    def test_future_leaks_into_past_features(self):
        cfg = mini_config(kind="acausal_flatten")
        model = build_model(cfg, np.random.default_rng(19))
        x = np.random.default_rng(20).standard_normal((6, 28)).astype(np.float32)
        base = model.features(T.Tensor(x)).data
        x2 = x.copy()
        x2[:, 27] += 5.0
        out = model.features(T.Tensor(x2)).data
        # mid-sequence feature columns change: centered padding is acausal
        assert not np.array_equal(out[:, :27], base[:, :27])

    def test_zero_weights_logits_depend_only_on_biases(self):
        cfg = mini_config(kind="acausal_flatten")
        model = build_model(cfg, np.random.default_rng(21))
        for name, p in model.parameters().items():
            if name.endswith(".g") or ".adapter.w" in name or name.endswith("w1") or name.endswith("w2"):
                p.data[:] = 0.0
        rng = np.random.default_rng(22)
        a = model.forward(T.Tensor(rng.standard_normal((6, 28)).astype(np.float32))).data
        b = model.forward(T.Tensor(rng.standard_normal((6, 28)).astype(np.float32))).data
        np.testing.assert_array_equal(a, b)


class TestCheckpoint:
    def test_round_trip_bitwise_logits(self, tmp_path):
        model = build_model(mini_config(), np.random.default_rng(23))
        x = T.Tensor(np.random.default_rng(24).standard_normal((6, 28)).astype(np.float32))
        logits = model.forward(x).data
        save_checkpoint(tmp_path / "ckpt", model, extra={"data": {"keypoints": "default9"}})
        loaded, payload = load_checkpoint(tmp_path / "ckpt")
        assert payload["data"]["keypoints"] == "default9"
        np.testing.assert_array_equal(loaded.forward(x).data, logits)

    def test_mismatched_config_rejected(self, tmp_path):
        import json
        model = build_model(mini_config(), np.random.default_rng(25))
        save_checkpoint(tmp_path / "ckpt", model)
        cfg_path = tmp_path / "ckpt" / "model.json"
        payload = json.loads(cfg_path.read_text())
        payload["model"]["dense_hidden"] = 99
        cfg_path.write_text(json.dumps(payload))
        with pytest.raises(ShapeError):
            load_checkpoint(tmp_path / "ckpt")
