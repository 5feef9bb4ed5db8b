#include "dial/core/dialect.hpp"

namespace dial {

static const std::array<std::string, DIALECT_COUNT> DIALECT_NAMES = {
    "sqlite", "mysql", "postgresql", "sqlserver", "duckdb", "oracle",
};

const std::string &dialect_name(DialectId id) {
	return DIALECT_NAMES[static_cast<size_t>(id)];
}

std::optional<DialectId> dialect_from_name(const std::string &name) {
	for (size_t i = 0; i < DIALECT_COUNT; i++) {
		if (DIALECT_NAMES[i] == name) {
			return static_cast<DialectId>(i);
		}
	}
	return std::nullopt;
}

} // namespace dial
