#pragma once

#include <stdexcept>
#include <string>

namespace mergo {

// Raised for every contract violation: bad construction input, mismatched
// spaces, out-of-range indices, unmet theorem hypotheses.
class Error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace mergo
