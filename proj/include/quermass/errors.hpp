#pragma once

#include <stdexcept>
#include <string>

namespace quermass {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (e.g. curvature outside the cone).
class precondition_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A numerical computation produced an invalid intermediate value.
class computation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A flow step lost convexity or produced non-finite radii; retry with a smaller dt.
class step_rejected : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class insufficient_data : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace quermass
