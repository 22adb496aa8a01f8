#pragma once

#include <stdexcept>
#include <string>

namespace inflacert {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction / parsing problems (bad u, malformed rational, ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// condition_q on a slice with a negative entry: F lies outside the
// feasibility polytope for this u.
struct NegativeConditional : Error {
    using Error::Error;
};

// The reference vertex is not contained in the polytope at this u.
struct VertexOutsidePolytope : Error {
    using Error::Error;
};

// Reference local model requested outside its validity range.
struct OutOfValidityRange : Error {
    using Error::Error;
};

struct EmptyPolytope : Error {
    using Error::Error;
};

// Float-mode solve terminated too close to zero to trust either verdict.
struct NumericallyAmbiguous : Error {
    using Error::Error;
};

// Certificate rows do not match the problem it is evaluated against.
struct LabelMismatch : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace inflacert
