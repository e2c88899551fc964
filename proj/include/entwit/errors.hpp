#pragma once

#include <stdexcept>

namespace entwit {

// Domain error vocabulary.  Each type corresponds to one contract violation;
// messages carry the offending values.

struct OutOfRangeIndex : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct ZeroNorm : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SpaceMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonHermitianInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingPhaseSetting : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InconsistentSpace : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParameterOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientCutoff : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace entwit
