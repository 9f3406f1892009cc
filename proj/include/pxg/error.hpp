#ifndef PXG_ERROR_HPP
#define PXG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pxg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: dimensions, ranges, malformed files, inconsistent flags.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Non-PD matrices, sampler non-convergence, underflow of Monte-Carlo weights.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Corrupt or version-mismatched trace files.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace pxg

#endif
