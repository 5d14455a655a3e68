#pragma once

#include <stdexcept>
#include <string>

namespace nfv {

/// Malformed input: dimension mismatches, bad indices, wrong guess variants.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configured enumeration budget was exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 64-bit integer overflow in a coefficient, bound or objective.
class OverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An extended program uses an operation outside its domain.
class ValidityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Text or JSON that does not follow its schema.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A swap set that is not the inversion set of any order.
class AdmissibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Decoded assignment is inconsistent with the model layout.
class DecodingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace nfv
