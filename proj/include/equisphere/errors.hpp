#pragma once

#include <stdexcept>
#include <string>

namespace eqs {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad header, token, or count).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Mesh violates the closed genus-zero requirements.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// A face of the input mesh has (numerically) zero area.
class DegenerateFaceError : public Error {
public:
    using Error::Error;
};

/// A point too close to the projection pole was passed to the chart map.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Plane inversion requested at (numerically) zero modulus.
class OriginError : public Error {
public:
    using Error::Error;
};

/// An image triangle collapsed; stretch factors are undefined.
class DegenerateImageError : public Error {
public:
    using Error::Error;
};

/// Vector/matrix dimensions disagree with the region they claim to cover.
class RegionMismatchError : public Error {
public:
    using Error::Error;
};

/// Sparse factorization broke down.
class SingularSystemError : public Error {
public:
    explicit SingularSystemError(const std::string& msg, int pivot = -1)
        : Error(msg), pivot_index(pivot) {}
    int pivot_index;
};

/// An interior index set of the partition came out empty.
class EmptyInteriorError : public Error {
public:
    using Error::Error;
};

/// A boundary ring of the partition came out empty.
class EmptyBoundaryError : public Error {
public:
    using Error::Error;
};

/// The stretch energy became NaN/Inf during iteration.
class NonFiniteEnergyError : public Error {
public:
    using Error::Error;
};

/// Mismatched block sizes in the error-transfer assembly.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// A diagonal denominator of a Gamma scaling matrix vanished.
class SingularGammaError : public Error {
public:
    using Error::Error;
};

/// The dense eigensolver failed to converge.
class EigenFailureError : public Error {
public:
    using Error::Error;
};

}  // namespace eqs
