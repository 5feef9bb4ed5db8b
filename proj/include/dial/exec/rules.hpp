#pragma once

#include "dial/core/dialect.hpp"
#include "dial/core/outcome.hpp"
#include "dial/sql/ast.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dial {

// How a rule inspects the parsed query. PROFILE_PARSE marks divergences that
// the per-dialect grammar profile already rejects at parse time; those rules
// carry catalog metadata but run no detector.
enum class DetectorKind : uint8_t {
	FUNCTION_CALLED,
	CAST_TO_TYPE,
	FROM_ALIAS_WITH_AS,
	ORDER_BY_DIRECTION_CALL,
	DOUBLE_QUOTED_LITERAL_COMPARE,
	MISSING_FROM,
	DERIVED_TABLE_UNALIASED,
	DISTINCT_IN_WINDOW,
	NESTED_AGGREGATE,
	GROUPED_ORDER_BY_UNAGGREGATED,
	SCALAR_SUBQUERY_UNCONSTRAINED,
	ORM_BINDING,
	DISTINCT_ORDER_BY_PROJECTION,
	PROFILE_PARSE,
};

const std::string &detector_kind_name(DetectorKind kind);
std::optional<DetectorKind> detector_kind_from_name(const std::string &name);

struct DialectRule {
	std::string rule_id;
	std::set<DialectId> dialects;
	DetectorKind detector_kind = DetectorKind::PROFILE_PARSE;
	std::map<std::string, std::string> detector_args;
	// May carry {fn} {ident} {type} {segment} placeholders; a vendor-code
	// prefix (ORA-xxxxx:, ERROR n (state):, Msg n, ...) is recognized and
	// split into ErrorTrace.vendor_code when the trace is synthesized.
	std::string message_template;
	std::string gold_hint;
};

struct RuleViolation {
	std::string rule_id;
	// Short raw token to locate in the original SQL for the failing span.
	std::string needle;
	std::string segment; // rendered offending fragment
	std::map<std::string, std::string> substitutions;
};

// Pure. Returns the violation if the rule's detector fires on the statement.
std::optional<RuleViolation> run_detector(const DialectRule &rule, const SelectStatement &stmt);

// Synthesize the rule's ErrorTrace for a concrete violation, locating the
// failing segment in the original SQL text.
ErrorTrace synthesize_trace(const DialectRule &rule, const RuleViolation &violation,
                            const std::string &sql);

// The built-in catalog: the full dialect-violation set, ordered by rule_id.
const std::vector<DialectRule> &default_rule_catalog();

// rules.jsonl round trip, one rule per line.
std::vector<DialectRule> load_rule_catalog(const std::string &path);
void save_rule_catalog(const std::vector<DialectRule> &catalog, const std::string &path);

} // namespace dial
