#pragma once

#include "dial/core/dialect.hpp"
#include "dial/core/schema.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dial {

// The six standardized macro-operators of the natural-language logical plan.
enum class MacroOperatorKind : uint8_t { SRC, FLT, CAL, AGG, ORG, AUX };

const std::string &operator_kind_name(MacroOperatorKind kind);
std::optional<MacroOperatorKind> operator_kind_from_name(const std::string &name);

struct SchemaRef {
	std::string table;
	std::string column;
	std::string physical_type;

	bool operator==(const SchemaRef &) const = default;

	std::string display() const {
		return table + "." + column + " (" + physical_type + ")";
	}
};

struct MacroOperator {
	MacroOperatorKind kind = MacroOperatorKind::AUX;
	std::string description; // plain language, no SQL tokens
	std::vector<SchemaRef> refs;
	bool sensitive = false;
	size_t order_index = 0;

	bool operator==(const MacroOperator &) const = default;
};

struct LogicalPlan {
	std::vector<MacroOperator> operators;

	bool operator==(const LogicalPlan &) const = default;

	// Ordering violations against relational execution order: src before flt,
	// flt before cal/agg, org last; aux unconstrained.
	std::vector<std::string> order_violations() const;

	// Stable canonical reorder satisfying the execution order, reassigning
	// order_index values.
	void canonicalize_order();

	// Prompt-facing text form, one "[k] KIND | description | refs" line each.
	std::string to_prompt_text() const;
};

struct StandardizedOperator {
	std::string category; // canonical category (or the AUX fallback)
	std::string standard_description;
	size_t source_index = 0; // index into base.operators

	bool operator==(const StandardizedOperator &) const = default;
};

struct DialectAwarePlan {
	LogicalPlan base;
	std::vector<StandardizedOperator> enriched; // one per sensitive operator
	DialectId dialect = DialectId::SQLITE;

	bool operator==(const DialectAwarePlan &) const = default;

	std::vector<std::string> validate() const;

	// Full serialized form (external interface + routing embed text).
	std::string to_json() const;
	static DialectAwarePlan from_json(const std::string &text);

	std::string to_prompt_text() const;
};

// SQL-token blacklist over operator descriptions: the 8 reserved words as
// standalone tokens plus "NAME(" call syntax on known dialect function names.
std::vector<std::string> blacklist_violations(const std::string &description);

} // namespace dial
