#pragma once

#include "dial/core/dialect.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dial {

// Per-item per-dialect booleans feeding the aggregations.
struct ItemOutcome {
	bool exec = false;
	bool acc = false;
	std::optional<double> dfc; // nullopt = not applicable (no gold features)
};

struct DialectScores {
	double exec = 0.0;
	double acc = 0.0;
	double dfc = 0.0; // average over applicable items
	size_t items = 0;
	size_t dfc_applicable = 0;
};

struct MetricsReport {
	std::map<DialectId, DialectScores> per_dialect;
	double overall_exec = 0.0; // strict all-or-nothing across dialects
	double overall_acc = 0.0;
	size_t overall_items = 0;

	std::string to_json() const;
	std::string to_markdown() const; // Exec/Acc/DFC per dialect table
};

// Fraction of successful outcomes.
double score_exec(const std::vector<bool> &outcomes);

// Fraction correct; a non-executable item counts as incorrect by input shape
// (callers pass acc=false for those).
double score_acc(const std::vector<bool> &outcomes);

// DFC for one item: patterns matching gold define the feature set G; the
// score is the matched fraction of G in the generated SQL. No gold features
// means not-applicable (excluded from the average). Throws
// InvalidPatternException naming the offending pattern.
std::optional<double> score_dfc(const std::string &generated_sql, const std::string &gold_sql,
                                const std::vector<std::string> &patterns);

// Strict overall aggregation: an item counts 1 iff its flag holds on every
// evaluated dialect. Throws MissingDialectOutcomeException when an item lacks
// an outcome for an evaluated dialect.
struct OverallScores {
	double exec = 0.0;
	double acc = 0.0;
};
OverallScores aggregate_overall(const std::map<std::string, std::map<DialectId, ItemOutcome>> &outcomes,
                                const std::vector<DialectId> &evaluated);

// Assemble the full report from per-item outcomes.
MetricsReport build_report(const std::map<std::string, std::map<DialectId, ItemOutcome>> &outcomes,
                           const std::vector<DialectId> &evaluated);

} // namespace dial
