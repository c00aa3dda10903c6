#pragma once

#include <string>

namespace envelope {

// %.17g; all CSV/JSON numbers go through here so reruns are byte-identical.
std::string fmt17(double v);

}  // namespace envelope
