// SPDX-License-Identifier: Apache-2.0
#include "ptv/rng.hpp"

#include <cmath>
#include <sstream>

namespace ptv {

std::string Rng::serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::deserialize(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
}

}  // namespace ptv
