#include "tscast/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tscast/errors.hpp"

namespace tscast::lstm {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// y += M x, M row-major rows x cols
void matvec_add(std::span<const double> m, std::span<const double> x, std::span<double> y,
                std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m.data() + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += M^T x
void matvec_t_add(std::span<const double> m, std::span<const double> x, std::span<double> y,
                  std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m.data() + r * cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

// M += a b^T
void outer_add(std::span<double> m, std::span<const double> a, std::span<const double> b,
               std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = m.data() + r * cols;
        const double ar = a[r];
        for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
    }
}

void check_batch(const Network& net, const std::vector<FeatureSequence>& batch) {
    if (net.layers.empty()) throw ShapeMismatch("network has no layers");
    if (batch.empty()) throw ShapeMismatch("empty batch");
    const std::size_t t_len = batch.front().size();
    if (t_len == 0) throw ShapeMismatch("empty input sequence");
    for (const auto& seq : batch) {
        if (seq.size() != t_len) {
            throw ShapeMismatch("sequences in a batch must share one length");
        }
        for (const auto& step : seq) {
            if (step.size() != net.input_dim()) {
                throw ShapeMismatch("feature dimension " + std::to_string(step.size()) +
                                    " does not match network input " +
                                    std::to_string(net.input_dim()));
            }
            for (double v : step) {
                if (!std::isfinite(v)) throw NonFiniteInput("non-finite feature value");
            }
        }
    }
}

LayerParams zero_layer(std::size_t input_dim, std::size_t hidden_dim) {
    LayerParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    for (std::size_t g = 0; g < 4; ++g) {
        p.w[g].assign(hidden_dim * input_dim, 0.0);
        p.u[g].assign(hidden_dim * hidden_dim, 0.0);
        p.b[g].assign(hidden_dim, 0.0);
    }
    return p;
}

}  // namespace

Network Network::create(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                        double dropout_rate, std::uint64_t seed) {
    if (input_dim == 0 || hidden_dims.empty()) {
        throw ShapeMismatch("network needs a positive input dimension and at least one layer");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw Error("dropout rate must lie in [0, 1)");
    }
    Network net;
    net.dropout_rate = dropout_rate;
    net.seed = seed;
    Rng rng(derive_seed(seed, 0));

    std::size_t in = input_dim;
    for (std::size_t hidden : hidden_dims) {
        LayerParams p = zero_layer(in, hidden);
        const double w_bound = 1.0 / std::sqrt(static_cast<double>(in));
        const double u_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (std::size_t g = 0; g < 4; ++g) {
            for (auto& v : p.w[g]) v = rng.uniform(-w_bound, w_bound);
        }
        for (std::size_t g = 0; g < 4; ++g) {
            for (auto& v : p.u[g]) v = rng.uniform(-u_bound, u_bound);
        }
        std::fill(p.b[kForget].begin(), p.b[kForget].end(), 1.0);
        net.layers.push_back(std::move(p));
        in = hidden;
    }
    const double d_bound = 1.0 / std::sqrt(static_cast<double>(in));
    net.dense_w.resize(in);
    for (auto& v : net.dense_w) v = rng.uniform(-d_bound, d_bound);
    net.dense_b = 0.0;
    return net;
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    g.layers.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        g.layers.push_back(zero_layer(layer.input_dim, layer.hidden_dim));
    }
    g.dense_w.assign(net.dense_w.size(), 0.0);
    g.dense_b = 0.0;
    return g;
}

std::vector<double> forward(const Network& net, const std::vector<FeatureSequence>& batch,
                            bool training, Rng* rng, ForwardCache* cache) {
    check_batch(net, batch);
    const bool use_dropout = training && net.dropout_rate > 0.0;
    if (use_dropout && rng == nullptr) {
        throw Error("training-mode forward with dropout needs an rng");
    }

    if (cache) {
        cache->samples.clear();
        cache->samples.resize(batch.size());
        cache->training = training;
        cache->net_version = net.version;
    }

    std::vector<double> predictions(batch.size(), 0.0);
    const std::size_t t_len = batch.front().size();

    for (std::size_t s = 0; s < batch.size(); ++s) {
        std::vector<std::vector<double>> layer_in = batch[s];
        SampleCache* sc = cache ? &cache->samples[s] : nullptr;
        if (sc) sc->layers.resize(net.layers.size());

        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const LayerParams& p = net.layers[l];
            const std::size_t H = p.hidden_dim;
            LayerCache* lc = sc ? &sc->layers[l] : nullptr;
            if (lc) {
                lc->inputs = layer_in;
                for (auto& g : lc->gates) g.assign(t_len, std::vector<double>(H));
                lc->cell.assign(t_len, std::vector<double>(H));
                lc->cell_tanh.assign(t_len, std::vector<double>(H));
                lc->hidden.assign(t_len, std::vector<double>(H));
            }

            std::vector<double> h(H, 0.0), c(H, 0.0);
            std::array<std::vector<double>, 4> pre;
            for (auto& v : pre) v.resize(H);
            std::vector<std::vector<double>> out(t_len);

            for (std::size_t t = 0; t < t_len; ++t) {
                for (std::size_t g = 0; g < 4; ++g) {
                    std::copy(p.b[g].begin(), p.b[g].end(), pre[g].begin());
                    matvec_add(p.w[g], layer_in[t], pre[g], H, p.input_dim);
                    matvec_add(p.u[g], h, pre[g], H, H);
                }
                for (std::size_t j = 0; j < H; ++j) {
                    const double ig = sigmoid(pre[kInput][j]);
                    const double fg = sigmoid(pre[kForget][j]);
                    const double gg = std::tanh(pre[kCell][j]);
                    const double og = sigmoid(pre[kOutput][j]);
                    c[j] = fg * c[j] + ig * gg;
                    const double ct = std::tanh(c[j]);
                    h[j] = og * ct;
                    if (lc) {
                        lc->gates[kInput][t][j] = ig;
                        lc->gates[kForget][t][j] = fg;
                        lc->gates[kCell][t][j] = gg;
                        lc->gates[kOutput][t][j] = og;
                        lc->cell[t][j] = c[j];
                        lc->cell_tanh[t][j] = ct;
                        lc->hidden[t][j] = h[j];
                    }
                }
                out[t] = h;
            }
            layer_in = std::move(out);
        }

        std::vector<double> head = layer_in.back();
        if (use_dropout) {
            const double keep = 1.0 - net.dropout_rate;
            std::vector<double> mask(head.size());
            for (std::size_t j = 0; j < head.size(); ++j) {
                mask[j] = rng->uniform() < net.dropout_rate ? 0.0 : 1.0 / keep;
                head[j] *= mask[j];
            }
            if (sc) sc->dropout_mask = std::move(mask);
        }

        double y = net.dense_b;
        for (std::size_t j = 0; j < head.size(); ++j) y += net.dense_w[j] * head[j];
        predictions[s] = y;
        if (sc) {
            sc->head_input = std::move(head);
            sc->prediction = y;
        }
    }
    return predictions;
}

std::vector<double> predict(const Network& net, const std::vector<FeatureSequence>& batch) {
    return forward(net, batch, /*training=*/false, nullptr, nullptr);
}

double predict_one(const Network& net, const FeatureSequence& sequence) {
    return predict(net, {sequence})[0];
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty()) {
        throw ShapeMismatch("predictions and targets must have equal nonzero length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        acc += e * e;
    }
    return acc / static_cast<double>(predictions.size());
}

Gradients backward(const Network& net, const ForwardCache& cache,
                   std::span<const double> targets) {
    if (cache.net_version != net.version) {
        throw StaleCache("cache was built for a different parameter version");
    }
    if (cache.samples.empty() || cache.samples.size() != targets.size()) {
        throw ShapeMismatch("cache holds " + std::to_string(cache.samples.size()) +
                            " samples, targets " + std::to_string(targets.size()));
    }

    Gradients grads = Gradients::zeros_like(net);
    const double inv_batch = 1.0 / static_cast<double>(cache.samples.size());
    const std::size_t n_layers = net.layers.size();

    for (std::size_t s = 0; s < cache.samples.size(); ++s) {
        const SampleCache& sc = cache.samples[s];
        if (sc.layers.size() != n_layers) throw StaleCache("cache layer count mismatch");
        const std::size_t t_len = sc.layers[0].hidden.size();

        const double dpred = 2.0 * (sc.prediction - targets[s]) * inv_batch;

        // dense head
        for (std::size_t j = 0; j < net.dense_w.size(); ++j) {
            grads.dense_w[j] += dpred * sc.head_input[j];
        }
        grads.dense_b += dpred;

        // gradient into the last layer's final hidden state, through the mask
        std::vector<std::vector<double>> dh_above(
            t_len, std::vector<double>(net.output_hidden_dim(), 0.0));
        for (std::size_t j = 0; j < net.dense_w.size(); ++j) {
            const double m = sc.dropout_mask.empty() ? 1.0 : sc.dropout_mask[j];
            dh_above[t_len - 1][j] = dpred * net.dense_w[j] * m;
        }

        for (std::size_t li = n_layers; li-- > 0;) {
            const LayerParams& p = net.layers[li];
            LayerParams& gp = grads.layers[li];
            const LayerCache& lc = sc.layers[li];
            const std::size_t H = p.hidden_dim;
            const std::size_t I = p.input_dim;

            std::vector<std::vector<double>> dx(t_len, std::vector<double>(I, 0.0));
            std::vector<double> dh_carry(H, 0.0), dc_carry(H, 0.0);
            std::array<std::vector<double>, 4> dpre;
            for (auto& v : dpre) v.resize(H);

            for (std::size_t t = t_len; t-- > 0;) {
                for (std::size_t j = 0; j < H; ++j) {
                    const double dh = dh_above[t][j] + dh_carry[j];
                    const double ig = lc.gates[kInput][t][j];
                    const double fg = lc.gates[kForget][t][j];
                    const double gg = lc.gates[kCell][t][j];
                    const double og = lc.gates[kOutput][t][j];
                    const double ct = lc.cell_tanh[t][j];
                    const double c_prev = t > 0 ? lc.cell[t - 1][j] : 0.0;

                    const double dc = dh * og * (1.0 - ct * ct) + dc_carry[j];
                    dpre[kOutput][j] = dh * ct * og * (1.0 - og);
                    dpre[kForget][j] = dc * c_prev * fg * (1.0 - fg);
                    dpre[kInput][j] = dc * gg * ig * (1.0 - ig);
                    dpre[kCell][j] = dc * ig * (1.0 - gg * gg);
                    dc_carry[j] = dc * fg;
                }
                std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
                const std::vector<double>& x_t = lc.inputs[t];
                const std::vector<double>* h_prev = t > 0 ? &lc.hidden[t - 1] : nullptr;
                for (std::size_t g = 0; g < 4; ++g) {
                    outer_add(gp.w[g], dpre[g], x_t, H, I);
                    if (h_prev) outer_add(gp.u[g], dpre[g], *h_prev, H, H);
                    for (std::size_t j = 0; j < H; ++j) gp.b[g][j] += dpre[g][j];
                    matvec_t_add(p.w[g], dpre[g], dx[t], H, I);
                    if (t > 0) matvec_t_add(p.u[g], dpre[g], dh_carry, H, H);
                }
            }
            dh_above = std::move(dx);
        }
    }
    return grads;
}

AdamState AdamState::create(const Network& net, double learning_rate, double beta1, double beta2,
                            double epsilon) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    s.first_moment = Gradients::zeros_like(net);
    s.second_moment = Gradients::zeros_like(net);
    return s;
}

void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t step, double lr, double beta1, double beta2,
                 double epsilon) {
    if (param.size() != grad.size() || param.size() != m.size() || param.size() != v.size()) {
        throw ShapeMismatch("adam tensors must share one shape");
    }
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + epsilon);
    }
}

void adam_step(Network& net, const Gradients& grads, AdamState& state) {
    if (grads.layers.size() != net.layers.size() ||
        grads.dense_w.size() != net.dense_w.size()) {
        throw ShapeMismatch("gradient shapes do not match the network");
    }
    state.step_count += 1;
    const std::uint64_t t = state.step_count;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        LayerParams& p = net.layers[l];
        const LayerParams& g = grads.layers[l];
        LayerParams& m = state.first_moment.layers[l];
        LayerParams& v = state.second_moment.layers[l];
        if (g.input_dim != p.input_dim || g.hidden_dim != p.hidden_dim) {
            throw ShapeMismatch("gradient layer dims do not match the network");
        }
        for (std::size_t gate = 0; gate < 4; ++gate) {
            adam_update(p.w[gate], g.w[gate], m.w[gate], v.w[gate], t, state.learning_rate,
                        state.beta1, state.beta2, state.epsilon);
            adam_update(p.u[gate], g.u[gate], m.u[gate], v.u[gate], t, state.learning_rate,
                        state.beta1, state.beta2, state.epsilon);
            adam_update(p.b[gate], g.b[gate], m.b[gate], v.b[gate], t, state.learning_rate,
                        state.beta1, state.beta2, state.epsilon);
        }
    }
    adam_update(net.dense_w, grads.dense_w, state.first_moment.dense_w,
                state.second_moment.dense_w, t, state.learning_rate, state.beta1, state.beta2,
                state.epsilon);
    std::span<double> pb(&net.dense_b, 1);
    std::span<const double> gb(&grads.dense_b, 1);
    adam_update(pb, gb, std::span<double>(&state.first_moment.dense_b, 1),
                std::span<double>(&state.second_moment.dense_b, 1), t, state.learning_rate,
                state.beta1, state.beta2, state.epsilon);
    net.version += 1;
}

TrainResult train(Network& net, const std::vector<Sample>& data, const TrainConfig& cfg) {
    if (data.empty()) throw EmptyDataset("training dataset is empty");
    if (cfg.epochs < 1) throw Error("epochs must be >= 1");
    if (cfg.batch_size < 1) throw Error("batch size must be >= 1");
    const std::size_t n_batches = data.size() / cfg.batch_size;
    if (n_batches == 0) {
        throw EmptyDataset("dataset of " + std::to_string(data.size()) +
                           " samples yields no complete batch of size " +
                           std::to_string(cfg.batch_size));
    }

    Rng shuffle_rng(derive_seed(cfg.seed, 1));
    Rng dropout_rng(derive_seed(cfg.seed, 2));
    AdamState adam = AdamState::create(net, cfg.learning_rate);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
    ForwardCache cache;
    std::vector<FeatureSequence> batch(cfg.batch_size);
    std::vector<double> targets(cfg.batch_size);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            for (std::size_t i = 0; i < cfg.batch_size; ++i) {
                const Sample& s = data[order[b * cfg.batch_size + i]];
                batch[i] = s.sequence;
                targets[i] = s.target;
            }
            const auto preds = forward(net, batch, /*training=*/true, &dropout_rng, &cache);
            const double loss = mse_loss(preds, targets);
            if (!std::isfinite(loss)) {
                throw DivergedLoss("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                   ", batch " + std::to_string(b + 1));
            }
            epoch_loss += loss;
            const Gradients grads = backward(net, cache, targets);
            adam_step(net, grads, adam);
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(n_batches));
    }
    return result;
}

namespace {

constexpr char kMagic[8] = {'T', 'S', 'C', 'A', 'S', 'T', 'C', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_tensor(std::ofstream& os, const std::vector<double>& t) {
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor(std::ifstream& is, std::vector<double>& t) {
    is.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open checkpoint file for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod(os, kFormatVersion);
    write_pod(os, static_cast<std::uint64_t>(net.layers.size()));
    for (const auto& l : net.layers) {
        write_pod(os, static_cast<std::uint64_t>(l.input_dim));
        write_pod(os, static_cast<std::uint64_t>(l.hidden_dim));
    }
    write_pod(os, net.dropout_rate);
    write_pod(os, net.seed);
    for (const auto& l : net.layers) {
        for (std::size_t g = 0; g < 4; ++g) write_tensor(os, l.w[g]);
        for (std::size_t g = 0; g < 4; ++g) write_tensor(os, l.u[g]);
        for (std::size_t g = 0; g < 4; ++g) write_tensor(os, l.b[g]);
    }
    write_tensor(os, net.dense_w);
    write_pod(os, net.dense_b);
    if (!os) throw Error("write failed for checkpoint: " + path);
}

Network load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open checkpoint file: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not a checkpoint file: " + path);
    }
    std::uint32_t version = 0;
    read_pod(is, version);
    if (version != kFormatVersion) {
        throw Error("unsupported checkpoint version " + std::to_string(version));
    }
    std::uint64_t n_layers = 0;
    read_pod(is, n_layers);
    if (n_layers == 0 || n_layers > 64) throw Error("corrupt checkpoint header");

    Network net;
    for (std::uint64_t i = 0; i < n_layers; ++i) {
        std::uint64_t in = 0, hidden = 0;
        read_pod(is, in);
        read_pod(is, hidden);
        net.layers.push_back(zero_layer(in, hidden));
    }
    read_pod(is, net.dropout_rate);
    read_pod(is, net.seed);
    for (auto& l : net.layers) {
        for (std::size_t g = 0; g < 4; ++g) read_tensor(is, l.w[g]);
        for (std::size_t g = 0; g < 4; ++g) read_tensor(is, l.u[g]);
        for (std::size_t g = 0; g < 4; ++g) read_tensor(is, l.b[g]);
    }
    net.dense_w.resize(net.layers.back().hidden_dim);
    read_tensor(is, net.dense_w);
    read_pod(is, net.dense_b);
    if (!is) throw Error("truncated checkpoint: " + path);
    return net;
}

}  // namespace tscast::lstm
