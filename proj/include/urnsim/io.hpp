#pragma once

#include <cstdint>
#include <string>

namespace urnsim {

// Shortest representation that round-trips to the same double; keeps CSV
// artifacts byte-stable across runs.
std::string format_double(double v);

std::string format_u64(std::uint64_t v);

} // namespace urnsim
