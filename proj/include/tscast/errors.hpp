#pragma once

#include <stdexcept>
#include <string>

namespace tscast {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// wavelet
struct SeriesTooShort : Error { using Error::Error; };
struct InvalidLevels : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// ssa
struct EmbeddingTooLarge : Error { using Error::Error; };
struct EmptySelection : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// lagstats
struct LagTooLarge : Error { using Error::Error; };
struct DegenerateSeries : Error { using Error::Error; };

// lstm
struct NonFiniteInput : Error { using Error::Error; };
struct StaleCache : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct DivergedLoss : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct ZeroActual : Error { using Error::Error; };

// pipeline
struct MissingColumn : Error { using Error::Error; };
struct UnparseableRow : Error { using Error::Error; };
struct NonMonotoneTimestamps : Error { using Error::Error; };
struct EmptyFile : Error { using Error::Error; };
struct SeriesTooShortForLag : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct MismatchedRuns : Error { using Error::Error; };

}  // namespace tscast
