#pragma once

#include "dial/core/dialect.hpp"
#include "dial/sql/ast.hpp"

#include <set>
#include <string>

namespace dial {

// One shared grammar; the per-dialect divergences in scope (pagination forms,
// identifier quoting) are expressed as profile switches.
struct DialectProfile {
	DialectId dialect = DialectId::SQLITE;
	bool allow_limit = true;       // LIMIT n [OFFSET m]
	bool allow_fetch = true;       // FETCH FIRST/NEXT n ROWS ONLY, OFFSET n ROWS
	bool allow_top = false;        // SELECT TOP n
	bool allow_backtick = false;   // `ident`
	bool allow_bracket = false;    // [ident]
};

const DialectProfile &profile_for(DialectId dialect);

// Parse a single SELECT statement (CTEs and set operations included) under
// the given profile. Throws ParseException with a character position.
StatementPtr parse_select(const std::string &sql, const DialectProfile &profile);

// Aggregate function names the analyzers treat as aggregates.
const std::set<std::string> &aggregate_function_names();

} // namespace dial
