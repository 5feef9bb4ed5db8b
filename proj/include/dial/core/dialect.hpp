#pragma once

#include <array>
#include <optional>
#include <string>

namespace dial {

// The six engines the system targets. Serialized as lowercase ASCII names.
enum class DialectId : uint8_t {
	SQLITE = 0,
	MYSQL = 1,
	POSTGRESQL = 2,
	SQLSERVER = 3,
	DUCKDB = 4,
	ORACLE = 5,
};

constexpr size_t DIALECT_COUNT = 6;

constexpr std::array<DialectId, DIALECT_COUNT> ALL_DIALECTS = {
    DialectId::SQLITE,    DialectId::MYSQL,  DialectId::POSTGRESQL,
    DialectId::SQLSERVER, DialectId::DUCKDB, DialectId::ORACLE,
};

const std::string &dialect_name(DialectId id);
std::optional<DialectId> dialect_from_name(const std::string &name);

} // namespace dial
