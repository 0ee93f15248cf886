#include "tscast/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tscast/errors.hpp"

namespace tscast::wavelet {

namespace {

// Half-sample symmetric reflection; valid for |overhang| <= n.
std::size_t reflect(long long t, std::size_t n) {
    const auto sn = static_cast<long long>(n);
    if (t < 0) t = -t - 1;
    if (t >= sn) t = 2 * sn - 1 - t;
    return static_cast<std::size_t>(t);
}

struct BandPair {
    std::vector<double> approx;
    std::vector<double> detail;
};

// One analysis step. Periodic mode pads odd-length input with a single
// zero so the circular filter bank stays orthonormal; symmetric mode uses
// half-sample reflection with even window starts from -(L-2).
BandPair analyze(std::span<const double> x, const Filter& f, Padding padding) {
    const std::size_t L = f.length();
    const auto& h = f.lowpass_rec;
    const auto& g = f.highpass_rec;
    BandPair out;
    if (padding == Padding::Periodic) {
        const std::size_t ne = x.size() + (x.size() & 1);
        const std::size_t K = ne / 2;
        out.approx.assign(K, 0.0);
        out.detail.assign(K, 0.0);
        for (std::size_t k = 0; k < K; ++k) {
            double a = 0.0, d = 0.0;
            for (std::size_t i = 0; i < L; ++i) {
                const std::size_t t = (2 * k + i) % ne;
                const double v = t < x.size() ? x[t] : 0.0;
                a += h[i] * v;
                d += g[i] * v;
            }
            out.approx[k] = a;
            out.detail[k] = d;
        }
    } else {
        const std::size_t n = x.size();
        const std::size_t K = (n + L - 1) / 2;
        out.approx.assign(K, 0.0);
        out.detail.assign(K, 0.0);
        for (std::size_t k = 0; k < K; ++k) {
            const long long start = 2 * static_cast<long long>(k) - static_cast<long long>(L - 2);
            double a = 0.0, d = 0.0;
            for (std::size_t i = 0; i < L; ++i) {
                const double v = x[reflect(start + static_cast<long long>(i), n)];
                a += h[i] * v;
                d += g[i] * v;
            }
            out.approx[k] = a;
            out.detail[k] = d;
        }
    }
    return out;
}

// One synthesis step, the adjoint of analyze restricted to [0, target_len).
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               std::size_t target_len, const Filter& f, Padding padding) {
    const std::size_t L = f.length();
    const auto& h = f.lowpass_rec;
    const auto& g = f.highpass_rec;
    if (padding == Padding::Periodic) {
        const std::size_t ne = target_len + (target_len & 1);
        std::vector<double> out(ne, 0.0);
        for (std::size_t k = 0; k < approx.size(); ++k) {
            for (std::size_t i = 0; i < L; ++i) {
                out[(2 * k + i) % ne] += approx[k] * h[i] + detail[k] * g[i];
            }
        }
        out.resize(target_len);
        return out;
    }
    std::vector<double> out(target_len, 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
        const long long start = 2 * static_cast<long long>(k) - static_cast<long long>(L - 2);
        for (std::size_t i = 0; i < L; ++i) {
            const long long m = start + static_cast<long long>(i);
            if (m >= 0 && m < static_cast<long long>(target_len)) {
                out[static_cast<std::size_t>(m)] += approx[k] * h[i] + detail[k] * g[i];
            }
        }
    }
    return out;
}

}  // namespace

const Filter& Filter::sym4() {
    static const Filter f = [] {
        Filter w;
        w.name = "sym4";
        w.lowpass_rec = {
            0.0322231006040427,    -0.012603967262037833, -0.09921954357684722,
            0.29785779560527736,   0.8037387518059161,    0.49761866763201545,
            -0.02963552764599851,  -0.07576571478927333,
        };
        const std::size_t L = w.lowpass_rec.size();
        w.highpass_rec.resize(L);
        for (std::size_t n = 0; n < L; ++n) {
            const double s = (n % 2 == 0) ? 1.0 : -1.0;
            w.highpass_rec[n] = s * w.lowpass_rec[L - 1 - n];
        }
        w.lowpass_dec.assign(w.lowpass_rec.rbegin(), w.lowpass_rec.rend());
        w.highpass_dec.assign(w.highpass_rec.rbegin(), w.highpass_rec.rend());
        return w;
    }();
    return f;
}

std::vector<std::size_t> band_lengths(std::size_t n, int levels, std::size_t filter_len,
                                      Padding padding) {
    std::vector<std::size_t> lens;
    lens.reserve(static_cast<std::size_t>(levels) + 1);
    lens.push_back(n);
    for (int l = 0; l < levels; ++l) {
        const std::size_t cur = lens.back();
        if (padding == Padding::Periodic) {
            lens.push_back((cur + 1) / 2);
        } else {
            lens.push_back((cur + filter_len - 1) / 2);
        }
    }
    return lens;
}

Decomposition decompose(std::span<const double> x, int levels, const Filter& filter,
                        Padding padding) {
    if (levels < 1) {
        throw InvalidLevels("levels must be >= 1, got " + std::to_string(levels));
    }
    if (levels > 62 || x.size() < (std::size_t{1} << levels)) {
        throw SeriesTooShort("series length " + std::to_string(x.size()) +
                             " < 2^levels = " + std::to_string(1LL << levels));
    }
    if (x.size() < filter.length()) {
        throw SeriesTooShort("series length " + std::to_string(x.size()) +
                             " < filter length " + std::to_string(filter.length()));
    }

    Decomposition d;
    d.levels = levels;
    d.original_length = x.size();
    d.padding = padding;
    d.details.reserve(static_cast<std::size_t>(levels));

    std::vector<double> cur(x.begin(), x.end());
    for (int l = 0; l < levels; ++l) {
        BandPair bp = analyze(cur, filter, padding);
        d.details.push_back(std::move(bp.detail));
        cur = std::move(bp.approx);
    }
    d.approximation = std::move(cur);
    return d;
}

std::vector<double> reconstruct(const Decomposition& d, const Filter& filter) {
    if (d.levels < 1 || d.details.size() != static_cast<std::size_t>(d.levels)) {
        throw ShapeMismatch("decomposition has " + std::to_string(d.details.size()) +
                            " detail bands for levels=" + std::to_string(d.levels));
    }
    const auto lens = band_lengths(d.original_length, d.levels, filter.length(), d.padding);
    if (d.approximation.size() != lens[static_cast<std::size_t>(d.levels)]) {
        throw ShapeMismatch("approximation band length " +
                            std::to_string(d.approximation.size()) + ", expected " +
                            std::to_string(lens[static_cast<std::size_t>(d.levels)]));
    }
    for (int l = 0; l < d.levels; ++l) {
        if (d.details[static_cast<std::size_t>(l)].size() != lens[static_cast<std::size_t>(l) + 1]) {
            throw ShapeMismatch("detail band " + std::to_string(l + 1) + " has length " +
                                std::to_string(d.details[static_cast<std::size_t>(l)].size()) +
                                ", expected " + std::to_string(lens[static_cast<std::size_t>(l) + 1]));
        }
    }

    std::vector<double> cur = d.approximation;
    for (int l = d.levels - 1; l >= 0; --l) {
        cur = synthesize(cur, d.details[static_cast<std::size_t>(l)],
                         lens[static_cast<std::size_t>(l)], filter, d.padding);
    }
    return cur;
}

std::vector<double> denoise(std::span<const double> x, int levels, const Filter& filter,
                            Padding padding) {
    Decomposition d = decompose(x, levels, filter, padding);
    for (auto& band : d.details) {
        std::fill(band.begin(), band.end(), 0.0);
    }
    return reconstruct(d, filter);
}

std::vector<double> band_energies(const Decomposition& d) {
    std::vector<double> e;
    e.reserve(d.details.size() + 1);
    auto energy = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    };
    e.push_back(energy(d.approximation));
    for (auto it = d.details.rbegin(); it != d.details.rend(); ++it) {
        e.push_back(energy(*it));
    }
    return e;
}

Padding padding_from_string(const std::string& s) {
    if (s == "symmetric") return Padding::Symmetric;
    if (s == "periodic") return Padding::Periodic;
    throw Error("unknown padding mode: " + s);
}

std::string to_string(Padding p) {
    return p == Padding::Symmetric ? "symmetric" : "periodic";
}

}  // namespace tscast::wavelet
