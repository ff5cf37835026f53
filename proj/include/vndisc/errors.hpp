#pragma once

#include <stdexcept>
#include <string>

namespace vndisc {

// Base class for everything thrown by this library.  Callers that do not
// care about the precise failure can catch this one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define VNDISC_DEFINE_ERROR(NAME)                           \
    struct NAME : Error {                                   \
        explicit NAME(const std::string& what_arg)          \
            : Error(what_arg) {}                            \
    }

// Construction / validation failures.
VNDISC_DEFINE_ERROR(NotSquareError);
VNDISC_DEFINE_ERROR(NotUnitaryError);
VNDISC_DEFINE_ERROR(NotDensityError);
VNDISC_DEFINE_ERROR(NotProjectorError);
VNDISC_DEFINE_ERROR(NotPureError);
VNDISC_DEFINE_ERROR(UnknownFamilyError);
VNDISC_DEFINE_ERROR(BadParamsError);
VNDISC_DEFINE_ERROR(BadShotCountError);
VNDISC_DEFINE_ERROR(OutOfRangeError);
VNDISC_DEFINE_ERROR(DimensionMismatchError);
VNDISC_DEFINE_ERROR(DimensionTooLargeError);
VNDISC_DEFINE_ERROR(InsufficientSamplesError);

// Numerical routines.
VNDISC_DEFINE_ERROR(ConvergenceError);
VNDISC_DEFINE_ERROR(SaddleInfeasibleError);
VNDISC_DEFINE_ERROR(NoConvexCombinationError);
VNDISC_DEFINE_ERROR(SingularPencilError);

// I/O.
VNDISC_DEFINE_ERROR(ParseError);

#undef VNDISC_DEFINE_ERROR

}  // namespace vndisc
