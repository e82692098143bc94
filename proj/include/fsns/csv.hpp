#pragma once

#include <string>
#include <vector>

namespace fsns {

/// Fixed-width scientific notation; "nan"/"inf" spelled out, "" for null.
std::string fmt_double(double v);

std::string csv_join(const std::vector<std::string>& cells);

}  // namespace fsns
