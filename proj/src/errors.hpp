#pragma once

#include <stdexcept>

namespace stablab {

// A formula asked to operate outside its validity region (log of a value at
// or above one, contraction factor outside (0,1), and so on).
struct IllPosedError : std::domain_error {
  using std::domain_error::domain_error;
};

// The requested operation needs an oracle this problem kind does not offer.
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace stablab
