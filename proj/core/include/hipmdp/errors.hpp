#pragma once

#include <stdexcept>
#include <string>

namespace hipmdp {

// Thrown when linear algebra or an ODE integration loses finiteness or a
// factorization cannot be rescued. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hipmdp
