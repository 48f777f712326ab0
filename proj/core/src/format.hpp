#pragma once

#include <sstream>
#include <string>

namespace cmfg::detail {

// Short text for doubles in messages; std::to_string would print 1e-9 as 0.000000.
inline std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace cmfg::detail
