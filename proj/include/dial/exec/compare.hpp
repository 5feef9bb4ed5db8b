#pragma once

#include "dial/core/outcome.hpp"

namespace dial {

// Result-set identity. Order-sensitive mode compares elementwise, otherwise
// multiset equality. Numeric cells match within 1e-6 relative tolerance,
// NULL equals NULL, text compares byte-exact after trailing-whitespace trim.
bool compare_result_sets(const RowTable &got, const RowTable &gold, bool order_sensitive);

bool cells_equal(const Cell &a, const Cell &b);

} // namespace dial
