#pragma once

#include "dial/audit/trace.hpp"
#include "dial/core/outcome.hpp"
#include "dial/llm/backend.hpp"
#include "dial/llm/templates.hpp"
#include "dial/planner/plan.hpp"

#include <map>
#include <optional>
#include <string>

namespace dial {

enum class AuditInvariant : uint8_t { TOPOLOGY, CONSTRAINTS, COMPUTATION, PROJECTION };

const std::string &invariant_name(AuditInvariant inv);

struct AuditVerdict {
	bool pass = true;
	std::string details; // the specific missing/extra element on failure

	bool operator==(const AuditVerdict &) const = default;
};

// The semantic deviation report R_sem.
struct AuditReport {
	std::map<AuditInvariant, AuditVerdict> verdicts;
	bool passed = false; // conjunction of the four verdicts

	bool operator==(const AuditReport &) const = default;

	std::string to_json() const;
	// Text form fed into the rectification prompt.
	std::string describe() const;
};

// Optional free-text adjudication fallback; disabled in deterministic mode.
struct AuditOptions {
	bool deterministic = true;
	ChatBackend *llm = nullptr;
	const TemplateStore *templates = nullptr;
};

// Structured intents the deterministic matcher extracts from plan operators.
struct PredicateIntent {
	std::string column;
	std::string comparator;
	std::string value;
};
std::optional<PredicateIntent> extract_predicate_intent(const MacroOperator &op);

struct AggregateIntent {
	std::string function; // canonical uppercase
	std::string column;   // bare lowercase
	std::vector<std::string> group_dims;
};
std::optional<AggregateIntent> extract_aggregate_intent(const MacroOperator &op);

struct ProjectionIntent {
	std::vector<std::string> columns;
	std::vector<std::string> aliases; // aliases the plan explicitly names
};
ProjectionIntent extract_projection_intent(const MacroOperator &op);

// Parse q_exec under its dialect profile. Exposed for reuse; throws
// ParseException with position.
StatementPtr parse_sql(const SqlText &sql);

// Audit q_exec against the four semantic invariants derived from the plan's
// macro-operators. Deterministic for fixed inputs.
AuditReport audit(const SqlText &q_exec, const DialectAwarePlan &plan, const AuditOptions &options = {});

} // namespace dial
