#pragma once

#include "dial/core/task.hpp"
#include "dial/kb/csr.hpp"
#include "dial/llm/backend.hpp"
#include "dial/llm/templates.hpp"
#include "dial/planner/label.hpp"
#include "dial/planner/plan.hpp"

namespace dial {

// LLM-backed plan construction. Stateless apart from the injected backend;
// safe to run concurrently for different tasks.
class Planner {
public:
	Planner(ChatBackend &llm, const TemplateStore &templates) : llm(llm), templates(templates) {
	}

	// Structured decomposition under the strict line format; two repair
	// retries, then PlanFormatException / BlacklistViolationException. The
	// returned plan is canonically ordered and schema-resolved.
	LogicalPlan build_logical_plan(const TranslationTask &task) const;

	// Type/sample conflict compensation: a CAL operator is inserted directly
	// before the consuming operator for each detected conflict; existing
	// operators are never removed or re-described.
	LogicalPlan mine_implicit_logic(const LogicalPlan &plan, const SchemaCatalog &schema) const;

	// Category mapping for sensitive operators; unknown labels retry twice,
	// then take the AUX fallback category.
	DialectAwarePlan map_functional_categories(const LogicalPlan &plan, const CanonicalReference &csr,
	                                           DialectId dialect) const;

private:
	ChatBackend &llm;
	const TemplateStore &templates;

	LogicalPlan parse_plan_reply(const std::string &reply, const TranslationTask &task,
	                             std::string &problem) const;
};

// Deterministic conflict detection used by implicit-logic mining: a numeric
// operation cue over a textually-typed referenced column.
struct TypeConflict {
	size_t operator_index;
	SchemaRef ref;
};
std::vector<TypeConflict> detect_type_conflicts(const LogicalPlan &plan, const SchemaCatalog &schema);

} // namespace dial
