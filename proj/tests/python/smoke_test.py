"""Smoke tests for the tscast extension module."""

import math
import random
import sys

import tscast


def test_wavelet_round_trip():
    rng = random.Random(1)
    x = [rng.gauss(0.0, 1.0) for _ in range(300)]
    dec = tscast.dwt_decompose(x, levels=4, padding="periodic")
    back = tscast.dwt_reconstruct(dec)
    assert len(back) == len(x)
    assert max(abs(a - b) for a, b in zip(back, x)) < 1e-10


def test_wavelet_denoise_reduces_noise():
    rng = random.Random(2)
    clean = [math.sin(2 * math.pi * t / 64) for t in range(512)]
    noisy = [c + rng.gauss(0.0, 0.1) for c in clean]
    smooth = tscast.wavelet_denoise(noisy, levels=4)
    mse = lambda a, b: sum((u - v) ** 2 for u, v in zip(a, b)) / len(a)
    assert mse(smooth, clean) < mse(noisy, clean)


def test_ssa_shares_and_reconstruction():
    x = [math.sin(2 * math.pi * t / 20) for t in range(1000)]
    dec = tscast.ssa_decompose(x, m=10)
    assert abs(sum(dec.eigenvalue_shares) - 1.0) < 1e-10
    assert dec.eigenvalue_shares[0] + dec.eigenvalue_shares[1] > 0.999
    back = tscast.ssa_reconstruct(dec, list(range(1, 11)))
    assert max(abs(a - b) for a, b in zip(back, x)) < 1e-8
    assert tscast.ssa_select_components(dec, threshold=0.999) == [1, 2]


def test_pacf_recovers_ar1():
    rng = random.Random(3)
    x, v = [], 0.0
    for _ in range(8000):
        v = 0.8 * v + rng.gauss(0.0, 1.0)
        x.append(v)
    res = tscast.pacf(x, max_lag=10)
    assert res.values[0] == 1.0
    assert abs(res.values[1] - 0.8) < 0.06
    assert res.selected_lag == 1


def test_metrics_closed_forms():
    assert abs(tscast.rmse([1.0, 2.0], [2.0, 4.0]) - math.sqrt(2.5)) < 1e-12
    assert abs(tscast.mape([100.0], [99.0]) - 1.0) < 1e-12
    assert abs(tscast.sdape([100.0, 100.0], [99.0, 102.0]) - 0.005) < 1e-12
    rep = tscast.evaluate([100.0, 100.0], [99.0, 102.0])
    assert rep.n == 2
    assert rep.mae <= rep.rmse


def test_lstm_train_and_checkpoint(tmp_path=None):
    rng = random.Random(4)
    samples = []
    for _ in range(200):
        seq = [[rng.random()] for _ in range(3)]
        samples.append((seq, 0.9 * seq[-1][0]))
    net = tscast.LstmNetwork.create(1, [6, 4], dropout_rate=0.0, seed=11)
    cfg = tscast.TrainConfig()
    cfg.epochs = 5
    cfg.batch_size = 16
    cfg.learning_rate = 0.01
    cfg.seed = 12
    trace = tscast.train_lstm(net, samples, cfg)
    assert len(trace) == 5
    assert all(math.isfinite(v) for v in trace)

    p = "smoke_net.ckpt"
    net.save(p)
    loaded = tscast.LstmNetwork.load(p)
    probe = [[0.5], [0.25], [0.75]]
    assert loaded.predict(probe) == net.predict(probe)


def test_errors_are_typed():
    try:
        tscast.mape([0.0], [1.0])
    except tscast.TscastError:
        pass
    else:
        raise AssertionError("expected TscastError for a zero actual")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed (tscast {tscast.__version__})")


if __name__ == "__main__":
    sys.exit(main())
