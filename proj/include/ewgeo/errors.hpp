#pragma once

#include <stdexcept>
#include <string>

namespace ewgeo {

// Error taxonomy shared by the whole library. The CLI maps these onto
// process exit codes: invalid input or config -> 2, failed convergence -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
public:
    using Error::Error;
};

// Raised when a tensor, volume element or weight is requested on the
// boundary of the state family, where the metric degenerates.
class BoundarySingularity : public Error {
public:
    using Error::Error;
};

// Eigenvalue pair sum fell below threshold in the direct metric formula.
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

class ConfigParse : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

// Construction-time invariant violation; indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace ewgeo
