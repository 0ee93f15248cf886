#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tscast::wavelet {

enum class Padding { Symmetric, Periodic };

/// Orthogonal wavelet filter bank. The decomposition filters are the
/// time-reversed reconstruction filters; the highpass pair is the
/// quadrature mirror of the lowpass pair.
struct Filter {
    std::string name;
    std::vector<double> lowpass_dec;
    std::vector<double> highpass_dec;
    std::vector<double> lowpass_rec;
    std::vector<double> highpass_rec;

    std::size_t length() const { return lowpass_rec.size(); }

    /// Symlet-4 basis (8 taps, 4 vanishing moments), standard published
    /// coefficient table.
    static const Filter& sym4();
};

/// Multilevel decomposition. details[0] is the finest band (first split),
/// details[levels-1] the coarsest. Band lengths are fully determined by
/// original_length, levels and padding.
struct Decomposition {
    std::vector<double> approximation;
    std::vector<std::vector<double>> details;
    int levels = 0;
    std::size_t original_length = 0;
    Padding padding = Padding::Symmetric;
};

/// Expected band length per level for the given padding mode.
std::vector<std::size_t> band_lengths(std::size_t n, int levels, std::size_t filter_len,
                                      Padding padding);

/// Cascade analysis: filter + dyadic downsample, recursing on the lowpass
/// output only. Throws InvalidLevels or SeriesTooShort.
Decomposition decompose(std::span<const double> x, int levels,
                        const Filter& filter = Filter::sym4(),
                        Padding padding = Padding::Symmetric);

/// Inverse cascade (upsample, filter, sum), truncated to original_length.
/// Throws ShapeMismatch if the band lengths are inconsistent.
std::vector<double> reconstruct(const Decomposition& d, const Filter& filter = Filter::sym4());

/// Smooth by zeroing every detail band and reconstructing from the
/// approximation alone. Output has the input's length.
std::vector<double> denoise(std::span<const double> x, int levels = 4,
                            const Filter& filter = Filter::sym4(),
                            Padding padding = Padding::Symmetric);

/// Sum of squared coefficients per band: [approximation, D_l, ..., D_1].
std::vector<double> band_energies(const Decomposition& d);

Padding padding_from_string(const std::string& s);
std::string to_string(Padding p);

}  // namespace tscast::wavelet
