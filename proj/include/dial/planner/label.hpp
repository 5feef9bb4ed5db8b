#pragma once

#include "dial/planner/plan.hpp"

#include <set>
#include <string>

namespace dial {

// Configuration for the rule-based cascaded labeling function. All three
// check inputs are config-overridable; defaults are curated supersets of the
// exemplars the method prescribes.
struct LabelConfig {
	std::set<std::string> lexicon;
	std::set<std::string> sensitive_types;
	// Words marking an org operator's sort/limit/pagination facet.
	std::set<std::string> org_facets;

	static LabelConfig defaults();
};

// The three cascade checks, exposed individually so the final label can be
// verified as the OR of independent evaluations.
bool check_operator_category(const MacroOperator &op, const LabelConfig &config);
bool check_lexicon_trigger(const MacroOperator &op, const LabelConfig &config);
bool check_type_dependency(const MacroOperator &op, const LabelConfig &config);

// Deterministic, LLM-free labeling: sensitive iff any check fires. Pure -
// identical inputs give identical labels.
LogicalPlan label_operators(const LogicalPlan &plan, const SchemaCatalog &schema,
                            const LabelConfig &config);

} // namespace dial
