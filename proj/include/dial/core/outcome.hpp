#pragma once

#include "dial/core/dialect.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dial {

struct SqlText {
	std::string text;
	DialectId dialect = DialectId::SQLITE;

	bool operator==(const SqlText &) const = default;
};

// A result cell is a literal string or NULL.
struct Cell {
	bool is_null = false;
	std::string value;

	bool operator==(const Cell &) const = default;

	static Cell null() {
		return Cell {true, ""};
	}
	static Cell of(std::string v) {
		return Cell {false, std::move(v)};
	}
};

using Row = std::vector<Cell>;
using RowTable = std::vector<Row>;

struct ErrorTrace {
	std::optional<std::string> vendor_code;
	std::string message;
	// Substring of the failing SQL plus its character span, when known.
	std::optional<std::string> failing_segment;
	size_t segment_begin = 0;
	size_t segment_end = 0;

	bool operator==(const ErrorTrace &) const = default;
};

// Exactly one of rows/trace is present.
struct ExecutionOutcome {
	bool success = false;
	std::optional<RowTable> rows;
	std::optional<ErrorTrace> trace;

	bool operator==(const ExecutionOutcome &) const = default;

	static ExecutionOutcome ok(RowTable r = {}) {
		ExecutionOutcome o;
		o.success = true;
		o.rows = std::move(r);
		return o;
	}
	static ExecutionOutcome error(ErrorTrace t) {
		ExecutionOutcome o;
		o.success = false;
		o.trace = std::move(t);
		return o;
	}
};

} // namespace dial
