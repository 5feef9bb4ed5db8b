#include "dial/exec/compare.hpp"

#include "dial/common/strings.hpp"

#include <cmath>
#include <vector>

namespace dial {

bool cells_equal(const Cell &a, const Cell &b) {
	if (a.is_null || b.is_null) {
		return a.is_null && b.is_null;
	}
	double da, db;
	if (parse_double(a.value, da) && parse_double(b.value, db)) {
		if (da == db) {
			return true;
		}
		double scale = std::max(std::fabs(da), std::fabs(db));
		return std::fabs(da - db) <= 1e-6 * scale;
	}
	return rtrim(a.value) == rtrim(b.value);
}

namespace {

bool rows_equal(const Row &a, const Row &b) {
	if (a.size() != b.size()) {
		return false;
	}
	for (size_t i = 0; i < a.size(); i++) {
		if (!cells_equal(a[i], b[i])) {
			return false;
		}
	}
	return true;
}

} // namespace

bool compare_result_sets(const RowTable &got, const RowTable &gold, bool order_sensitive) {
	if (got.size() != gold.size()) {
		return false;
	}
	if (order_sensitive) {
		for (size_t i = 0; i < got.size(); i++) {
			if (!rows_equal(got[i], gold[i])) {
				return false;
			}
		}
		return true;
	}
	// Multiset equality with tolerance-aware matching (greedy bipartite);
	// fine at benchmark scale.
	std::vector<bool> used(gold.size(), false);
	for (auto &row : got) {
		bool matched = false;
		for (size_t j = 0; j < gold.size(); j++) {
			if (!used[j] && rows_equal(row, gold[j])) {
				used[j] = true;
				matched = true;
				break;
			}
		}
		if (!matched) {
			return false;
		}
	}
	return true;
}

} // namespace dial
