#pragma once

// Mechanical plan-to-SQL synthesis used as the audit soundness oracle: a
// query built directly from a plan's structured intents must pass its own
// audit. Kept in test support so the oracle stays independent of the audit
// implementation path.

#include "dial/audit/audit.hpp"
#include "dial/common/strings.hpp"
#include "dial/planner/plan.hpp"

#include <set>
#include <string>
#include <vector>

namespace dial::testsupport {

struct SynthOptions {
	bool drop_filter = false;
	bool swap_sum_avg = false;
	bool drop_join = false;
	bool mangle_alias = false;
};

inline std::string synthesize_query(const DialectAwarePlan &plan, SynthOptions opts = {}) {
	// join chain from src refs: consecutive tables link on a shared ref column
	std::vector<std::string> tables;
	std::vector<std::pair<std::string, std::string>> ref_list; // (table, column)
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::SRC) {
			continue;
		}
		for (auto &ref : op.refs) {
			if (std::find(tables.begin(), tables.end(), ref.table) == tables.end()) {
				tables.push_back(ref.table);
			}
			ref_list.emplace_back(ref.table, ref.column);
		}
	}
	if (opts.drop_join && tables.size() > 1) {
		tables.pop_back();
	}
	std::string from;
	std::set<std::string> joined;
	for (auto &table : tables) {
		if (from.empty()) {
			from = table;
			joined.insert(table);
			continue;
		}
		// find the shared key column with an already-joined table
		std::string partner, key;
		for (auto &[t1, c1] : ref_list) {
			if (t1 != table) {
				continue;
			}
			for (auto &[t2, c2] : ref_list) {
				if (t2 != table && joined.count(t2) && c2 == c1) {
					partner = t2;
					key = c1;
				}
			}
		}
		if (partner.empty()) {
			partner = *joined.begin();
			key = ref_list.empty() ? "id" : ref_list.front().second;
		}
		from += " JOIN " + table + " ON " + partner + "." + key + " = " + table + "." + key;
		joined.insert(table);
	}

	// filters
	std::vector<std::string> where;
	if (!opts.drop_filter) {
		for (auto &op : plan.base.operators) {
			if (op.kind != MacroOperatorKind::FLT) {
				continue;
			}
			if (auto intent = extract_predicate_intent(op)) {
				bool numeric = intent->value.find_first_not_of("0123456789.") == std::string::npos;
				std::string value = numeric ? intent->value : "'" + intent->value + "'";
				if (intent->comparator.rfind("year", 0) == 0) {
					where.push_back("EXTRACT(YEAR FROM " + intent->column + ") " +
					                intent->comparator.substr(4) + " " + value);
				} else {
					where.push_back(intent->column + " " + intent->comparator + " " + value);
				}
			}
		}
	}

	// aggregates and grouping
	std::vector<std::string> group_dims;
	std::vector<std::string> agg_exprs;
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::AGG) {
			continue;
		}
		if (auto intent = extract_aggregate_intent(op)) {
			std::string fn = intent->function;
			if (opts.swap_sum_avg && fn == "SUM") {
				fn = "AVG";
			}
			agg_exprs.push_back(fn + "(" + (intent->column == "*" ? "*" : intent->column) + ")");
			for (auto &dim : intent->group_dims) {
				if (std::find(group_dims.begin(), group_dims.end(), dim) == group_dims.end()) {
					group_dims.push_back(dim);
				}
			}
		}
	}

	// projection: org columns, then aggregates carrying the declared aliases
	std::vector<std::string> select_items;
	std::vector<std::string> aliases;
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::ORG) {
			continue;
		}
		auto intent = extract_projection_intent(op);
		for (auto &col : intent.columns) {
			if (std::find(select_items.begin(), select_items.end(), col) == select_items.end()) {
				select_items.push_back(col);
			}
		}
		for (auto &alias : intent.aliases) {
			aliases.push_back(alias);
		}
	}
	for (size_t i = 0; i < agg_exprs.size(); i++) {
		std::string item = agg_exprs[i];
		if (i < aliases.size()) {
			std::string alias = aliases[i];
			if (opts.mangle_alias) {
				alias += "_x";
			}
			item += " AS " + alias;
		}
		select_items.push_back(item);
	}
	if (select_items.empty()) {
		select_items.push_back("*");
	}

	std::string sql = "SELECT " + join(select_items, ", ");
	if (!from.empty()) {
		sql += " FROM " + from;
	}
	if (!where.empty()) {
		sql += " WHERE " + join(where, " AND ");
	}
	if (!group_dims.empty()) {
		sql += " GROUP BY " + join(group_dims, ", ");
	}
	return sql;
}

} // namespace dial::testsupport
