#include "dial/planner/label.hpp"

#include "dial/common/strings.hpp"

namespace dial {

LabelConfig LabelConfig::defaults() {
	LabelConfig config;
	config.lexicon = {
	    "extract", "regex",  "cast",      "convert",   "format", "concatenate",
	    "truncate", "substring", "pivot", "window",    "rank",   "percentile",
	    "json",    "split",  "pad",       "interval",  "timezone",
	};
	config.sensitive_types = {
	    "TIMESTAMP", "DATETIME", "DATE", "TIME", "JSON", "JSONB", "ARRAY", "BLOB", "INTERVAL", "UUID",
	};
	config.org_facets = {
	    "sort", "sorted", "sorting", "order",  "ordered", "descending", "ascending",
	    "top",  "first",  "last",    "limit",  "limited", "limiting",   "page",
	    "pages", "pagination", "cardinality",
	};
	return config;
}

bool check_operator_category(const MacroOperator &op, const LabelConfig &config) {
	if (op.kind == MacroOperatorKind::CAL) {
		return true;
	}
	if (op.kind == MacroOperatorKind::ORG) {
		// org is sensitive only with a sort/limit/pagination facet; plain
		// projection is ANSI-safe
		for (auto &facet : config.org_facets) {
			if (contains_word_ci(op.description, facet)) {
				return true;
			}
		}
	}
	return false;
}

bool check_lexicon_trigger(const MacroOperator &op, const LabelConfig &config) {
	for (auto &keyword : config.lexicon) {
		if (contains_word_ci(op.description, keyword)) {
			return true;
		}
	}
	return false;
}

bool check_type_dependency(const MacroOperator &op, const LabelConfig &config) {
	for (auto &ref : op.refs) {
		for (auto &token : word_tokens(ref.physical_type)) {
			if (config.sensitive_types.count(to_upper(token))) {
				return true;
			}
		}
	}
	return false;
}

LogicalPlan label_operators(const LogicalPlan &plan, const SchemaCatalog &schema,
                            const LabelConfig &config) {
	LogicalPlan labeled = plan;
	for (auto &op : labeled.operators) {
		// refs carry schema-resolved physical types; refresh from the catalog
		// when it knows the column
		for (auto &ref : op.refs) {
			if (const ColumnDef *col = schema.find_column(ref.table, ref.column)) {
				ref.physical_type = col->physical_type;
			}
		}
		op.sensitive = check_operator_category(op, config) || check_lexicon_trigger(op, config) ||
		              check_type_dependency(op, config);
	}
	return labeled;
}

} // namespace dial
