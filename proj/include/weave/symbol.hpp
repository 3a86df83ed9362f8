#pragma once

#include <cstdint>
#include <vector>

namespace weave {

/// One token of the alphabet. Equality is the only operation the algorithms use.
using Symbol = std::int64_t;

using Word = std::vector<Symbol>;

} // namespace weave
