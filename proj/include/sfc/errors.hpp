#pragma once

#include <stdexcept>
#include <string>

namespace sfc {

/// Base class for every data or model error raised by the library.
/// Usage errors (bad flags) are handled by the CLI layer and never reach here.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SFC_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                 \
    public:                                                     \
        explicit Name(const std::string& what) : Error(what) {} \
    }

// board / features
SFC_DEFINE_ERROR(IllegalMove);
SFC_DEFINE_ERROR(TerminalPosition);

// linalg
SFC_DEFINE_ERROR(NotPositiveDefinite);
SFC_DEFINE_ERROR(DimensionMismatch);

// estimators
SFC_DEFINE_ERROR(InsufficientData);
SFC_DEFINE_ERROR(FeatureVersionMismatch);
SFC_DEFINE_ERROR(RequiresPooled);
SFC_DEFINE_ERROR(DomainError);
SFC_DEFINE_ERROR(Diverged);
SFC_DEFINE_ERROR(RankDeficient);
SFC_DEFINE_ERROR(IoError);
SFC_DEFINE_ERROR(FormatError);

// corpus
SFC_DEFINE_ERROR(ParseError);
SFC_DEFINE_ERROR(IllegalGame);
SFC_DEFINE_ERROR(IncompleteGame);
SFC_DEFINE_ERROR(DifferentialMismatch);

// search / arena
SFC_DEFINE_ERROR(TooManyEmpties);
SFC_DEFINE_ERROR(InsufficientBalancedOpenings);

#undef SFC_DEFINE_ERROR

}  // namespace sfc
