#include "dial/exec/simulator.hpp"

#include "dial/common/errors.hpp"
#include "dial/sql/parser.hpp"

namespace dial {

namespace {

// Vendor-flavored syntax-error code for parse-level failures.
const char *parse_vendor_code(DialectId dialect) {
	switch (dialect) {
	case DialectId::ORACLE:
		return "ORA-00933";
	case DialectId::MYSQL:
		return "1064";
	case DialectId::POSTGRESQL:
		return "42601";
	case DialectId::SQLSERVER:
		return "102";
	case DialectId::SQLITE:
	case DialectId::DUCKDB:
		return nullptr;
	}
	return nullptr;
}

} // namespace

ExecutionOutcome DialectSimulator::simulate(const SqlText &sql) const {
	StatementPtr stmt;
	try {
		stmt = parse_select(sql.text, profile_for(sql.dialect));
	} catch (const ParseException &e) {
		ErrorTrace trace;
		trace.message = std::string("syntax error: ") + e.what();
		if (const char *code = parse_vendor_code(sql.dialect)) {
			trace.vendor_code = code;
		}
		size_t begin = std::min(e.position, sql.text.size());
		size_t end = std::min(begin + 16, sql.text.size());
		trace.failing_segment = sql.text.substr(begin, end - begin);
		trace.segment_begin = begin;
		trace.segment_end = end;
		return ExecutionOutcome::error(std::move(trace));
	}

	for (auto &rule : catalog) {
		if (!rule.dialects.count(sql.dialect)) {
			continue;
		}
		if (auto v = run_detector(rule, *stmt)) {
			return ExecutionOutcome::error(synthesize_trace(rule, *v, sql.text));
		}
	}
	return ExecutionOutcome::ok();
}

std::optional<RuleViolation> DialectSimulator::first_violation(const SqlText &sql) const {
	auto stmt = parse_select(sql.text, profile_for(sql.dialect));
	for (auto &rule : catalog) {
		if (!rule.dialects.count(sql.dialect)) {
			continue;
		}
		if (auto v = run_detector(rule, *stmt)) {
			return v;
		}
	}
	return std::nullopt;
}

} // namespace dial
