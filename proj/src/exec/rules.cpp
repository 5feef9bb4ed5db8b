#include "dial/exec/rules.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/exec/signature.hpp"
#include "dial/sql/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>

namespace dial {

using nlohmann::json;

namespace {

const std::map<std::string, DetectorKind> KIND_BY_NAME = {
    {"function_called", DetectorKind::FUNCTION_CALLED},
    {"cast_to_type", DetectorKind::CAST_TO_TYPE},
    {"from_alias_with_as", DetectorKind::FROM_ALIAS_WITH_AS},
    {"order_by_direction_call", DetectorKind::ORDER_BY_DIRECTION_CALL},
    {"double_quoted_literal_compare", DetectorKind::DOUBLE_QUOTED_LITERAL_COMPARE},
    {"missing_from", DetectorKind::MISSING_FROM},
    {"derived_table_unaliased", DetectorKind::DERIVED_TABLE_UNALIASED},
    {"distinct_in_window", DetectorKind::DISTINCT_IN_WINDOW},
    {"nested_aggregate", DetectorKind::NESTED_AGGREGATE},
    {"grouped_order_by_unaggregated", DetectorKind::GROUPED_ORDER_BY_UNAGGREGATED},
    {"scalar_subquery_unconstrained", DetectorKind::SCALAR_SUBQUERY_UNCONSTRAINED},
    {"orm_binding", DetectorKind::ORM_BINDING},
    {"distinct_order_by_projection", DetectorKind::DISTINCT_ORDER_BY_PROJECTION},
    {"profile_parse", DetectorKind::PROFILE_PARSE},
};

} // namespace

const std::string &detector_kind_name(DetectorKind kind) {
	for (auto &[name, k] : KIND_BY_NAME) {
		if (k == kind) {
			return name;
		}
	}
	static const std::string UNKNOWN = "unknown";
	return UNKNOWN;
}

std::optional<DetectorKind> detector_kind_from_name(const std::string &name) {
	auto it = KIND_BY_NAME.find(name);
	if (it == KIND_BY_NAME.end()) {
		return std::nullopt;
	}
	return it->second;
}

namespace {

bool is_aggregate_name(const std::string &upper_name) {
	return aggregate_function_names().count(upper_name) > 0;
}

// Aggregate calls within expr, not descending into subquery statements and
// not counting windowed (OVER) aggregates.
bool contains_plain_aggregate(const Expression &expr, bool include_self) {
	if (expr.kind == ExprKind::FUNCTION) {
		auto &f = static_cast<const FunctionExpr &>(expr);
		if (include_self && is_aggregate_name(f.name) && !f.over) {
			return true;
		}
		for (auto &a : f.args) {
			if (contains_plain_aggregate(*a, true)) {
				return true;
			}
		}
		return false;
	}
	switch (expr.kind) {
	case ExprKind::BINARY: {
		auto &b = static_cast<const BinaryExpr &>(expr);
		return contains_plain_aggregate(*b.left, true) || contains_plain_aggregate(*b.right, true);
	}
	case ExprKind::UNARY:
		return contains_plain_aggregate(*static_cast<const UnaryExpr &>(expr).operand, true);
	case ExprKind::CASE_WHEN: {
		auto &c = static_cast<const CaseExpr &>(expr);
		if (c.operand && contains_plain_aggregate(*c.operand, true)) {
			return true;
		}
		for (auto &cl : c.clauses) {
			if (contains_plain_aggregate(*cl.when, true) || contains_plain_aggregate(*cl.then, true)) {
				return true;
			}
		}
		return c.else_expr && contains_plain_aggregate(*c.else_expr, true);
	}
	case ExprKind::CAST:
		return contains_plain_aggregate(*static_cast<const CastExpr &>(expr).operand, true);
	case ExprKind::EXTRACT:
		return contains_plain_aggregate(*static_cast<const ExtractExpr &>(expr).source, true);
	case ExprKind::BETWEEN: {
		auto &bt = static_cast<const BetweenExpr &>(expr);
		return contains_plain_aggregate(*bt.operand, true) || contains_plain_aggregate(*bt.low, true) ||
		       contains_plain_aggregate(*bt.high, true);
	}
	case ExprKind::IS_NULL:
		return contains_plain_aggregate(*static_cast<const IsNullExpr &>(expr).operand, true);
	case ExprKind::IN_LIST: {
		auto &in = static_cast<const InExpr &>(expr);
		if (contains_plain_aggregate(*in.operand, true)) {
			return true;
		}
		for (auto &e : in.list) {
			if (contains_plain_aggregate(*e, true)) {
				return true;
			}
		}
		return false;
	}
	default:
		return false;
	}
}

void collect_table_refs(const TableRef &ref, std::vector<const TableRef *> &out) {
	out.push_back(&ref);
	if (ref.kind == TableRefKind::JOIN) {
		auto &j = static_cast<const JoinRef &>(ref);
		collect_table_refs(*j.left, out);
		collect_table_refs(*j.right, out);
	}
}

std::vector<const TableRef *> all_table_refs(const SelectStatement &stmt) {
	std::vector<const TableRef *> refs;
	walk_cores(stmt, [&](const SelectCore &core) {
		for (auto &r : core.from) {
			collect_table_refs(*r, refs);
		}
	});
	return refs;
}

bool is_comparison_op(const std::string &op) {
	return op == "=" || op == "<>" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=";
}

// Row cap present: LIMIT 1, FETCH FIRST 1, TOP 1, or a lone ungrouped aggregate.
bool subquery_row_capped(const SelectStatement &stmt) {
	if (stmt.limit.kind != LimitKind::NONE && stmt.limit.row_count &&
	    stmt.limit.row_count->to_string() == "1") {
		return true;
	}
	if (stmt.core->top && stmt.core->top->to_string() == "1") {
		return true;
	}
	if (stmt.core->group_by.empty() && stmt.core->items.size() == 1) {
		auto &expr = *stmt.core->items[0].expr;
		if (expr.kind == ExprKind::FUNCTION) {
			auto &f = static_cast<const FunctionExpr &>(expr);
			if (is_aggregate_name(f.name) && !f.over) {
				return true;
			}
		}
	}
	return false;
}

std::optional<RuleViolation> violation(const std::string &rule_id, const std::string &needle,
                                       const std::string &segment,
                                       std::map<std::string, std::string> subs = {}) {
	RuleViolation v;
	v.rule_id = rule_id;
	v.needle = needle;
	v.segment = segment;
	v.substitutions = std::move(subs);
	return v;
}

} // namespace

std::optional<RuleViolation> run_detector(const DialectRule &rule, const SelectStatement &stmt) {
	switch (rule.detector_kind) {
	case DetectorKind::PROFILE_PARSE:
		return std::nullopt;

	case DetectorKind::FUNCTION_CALLED: {
		std::string target = to_upper(rule.detector_args.at("name"));
		size_t min_args = 0;
		auto it = rule.detector_args.find("min_args");
		if (it != rule.detector_args.end()) {
			min_args = std::stoul(it->second);
		}
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::FUNCTION) {
				return;
			}
			auto &f = static_cast<const FunctionExpr &>(e);
			if (f.name == target && f.args.size() >= min_args) {
				hit = violation(rule.rule_id, f.name + "(", f.to_string(), {{"fn", f.name}});
			}
		});
		return hit;
	}

	case DetectorKind::CAST_TO_TYPE: {
		std::string target = to_upper(rule.detector_args.at("type"));
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::CAST) {
				return;
			}
			auto &c = static_cast<const CastExpr &>(e);
			std::string base = split(c.target_type, '(')[0];
			if (to_upper(trim(base)) == target) {
				hit = violation(rule.rule_id, c.target_type, c.to_string(), {{"type", c.target_type}});
			}
		});
		return hit;
	}

	case DetectorKind::FROM_ALIAS_WITH_AS: {
		for (auto *ref : all_table_refs(stmt)) {
			if (ref->kind == TableRefKind::BASE) {
				auto &b = static_cast<const BaseTableRef &>(*ref);
				if (!b.alias.empty() && b.alias_with_as) {
					return violation(rule.rule_id, " AS " + b.alias, b.to_string(),
					                 {{"ident", b.alias}});
				}
			}
			if (ref->kind == TableRefKind::DERIVED) {
				auto &d = static_cast<const DerivedTableRef &>(*ref);
				if (!d.alias.empty() && d.alias_with_as) {
					return violation(rule.rule_id, " AS " + d.alias, "(...) AS " + d.alias,
					                 {{"ident", d.alias}});
				}
			}
		}
		return std::nullopt;
	}

	case DetectorKind::ORDER_BY_DIRECTION_CALL: {
		for (auto &item : stmt.order_by) {
			if (item.expr->kind == ExprKind::FUNCTION) {
				auto &f = static_cast<const FunctionExpr &>(*item.expr);
				if (f.name == "ASC" || f.name == "DESC") {
					return violation(rule.rule_id, f.name + "(", f.to_string(), {{"fn", f.name}});
				}
			}
		}
		return std::nullopt;
	}

	case DetectorKind::DOUBLE_QUOTED_LITERAL_COMPARE: {
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::BINARY) {
				return;
			}
			auto &b = static_cast<const BinaryExpr &>(e);
			if (!is_comparison_op(b.op)) {
				return;
			}
			auto quoted_side = [](const Expression &side) -> const ColumnRefExpr * {
				if (side.kind != ExprKind::COLUMN_REF) {
					return nullptr;
				}
				auto &c = static_cast<const ColumnRefExpr &>(side);
				return (c.quote == QuoteStyle::DOUBLE && c.table.empty()) ? &c : nullptr;
			};
			auto plain_side = [](const Expression &side) {
				return side.kind == ExprKind::COLUMN_REF &&
				       static_cast<const ColumnRefExpr &>(side).quote == QuoteStyle::NONE;
			};
			const ColumnRefExpr *q = quoted_side(*b.right);
			if (q && plain_side(*b.left)) {
				hit = violation(rule.rule_id, "\"" + q->column + "\"", b.to_string(),
				                {{"ident", q->column}});
				return;
			}
			q = quoted_side(*b.left);
			if (q && plain_side(*b.right)) {
				hit = violation(rule.rule_id, "\"" + q->column + "\"", b.to_string(),
				                {{"ident", q->column}});
			}
		});
		return hit;
	}

	case DetectorKind::MISSING_FROM: {
		std::optional<RuleViolation> hit;
		walk_cores(stmt, [&](const SelectCore &core) {
			if (!hit && core.from.empty()) {
				hit = violation(rule.rule_id, "SELECT", "SELECT list without FROM", {});
			}
		});
		return hit;
	}

	case DetectorKind::DERIVED_TABLE_UNALIASED: {
		for (auto *ref : all_table_refs(stmt)) {
			if (ref->kind == TableRefKind::DERIVED) {
				auto &d = static_cast<const DerivedTableRef &>(*ref);
				if (d.alias.empty()) {
					return violation(rule.rule_id, "(SELECT", "(...) without alias", {});
				}
			}
		}
		return std::nullopt;
	}

	case DetectorKind::DISTINCT_IN_WINDOW: {
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::FUNCTION) {
				return;
			}
			auto &f = static_cast<const FunctionExpr &>(e);
			if (f.over && f.distinct_arg) {
				hit = violation(rule.rule_id, f.name + "(DISTINCT", f.to_string(), {{"fn", f.name}});
			}
		});
		return hit;
	}

	case DetectorKind::NESTED_AGGREGATE: {
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::FUNCTION) {
				return;
			}
			auto &f = static_cast<const FunctionExpr &>(e);
			if (!is_aggregate_name(f.name) || f.over) {
				return;
			}
			for (auto &arg : f.args) {
				if (contains_plain_aggregate(*arg, true)) {
					hit = violation(rule.rule_id, f.name + "(", f.to_string(), {{"fn", f.name}});
					return;
				}
			}
		});
		return hit;
	}

	case DetectorKind::GROUPED_ORDER_BY_UNAGGREGATED: {
		if (stmt.core->group_by.empty() || stmt.order_by.empty()) {
			return std::nullopt;
		}
		std::set<std::string> group_keys;
		for (auto &g : stmt.core->group_by) {
			group_keys.insert(to_lower(g->to_string()));
		}
		std::set<std::string> projected;
		for (auto &item : stmt.core->items) {
			projected.insert(to_lower(item.expr->to_string()));
			if (!item.alias.empty()) {
				projected.insert(to_lower(item.alias));
			}
		}
		for (auto &item : stmt.order_by) {
			if (item.expr->kind != ExprKind::COLUMN_REF) {
				continue;
			}
			std::string key = to_lower(item.expr->to_string());
			auto &col = static_cast<const ColumnRefExpr &>(*item.expr);
			if (!group_keys.count(key) && !projected.count(key) &&
			    !projected.count(to_lower(col.column))) {
				return violation(rule.rule_id, col.column, item.expr->to_string(),
				                 {{"ident", col.column}});
			}
		}
		return std::nullopt;
	}

	case DetectorKind::SCALAR_SUBQUERY_UNCONSTRAINED: {
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::BINARY) {
				return;
			}
			auto &b = static_cast<const BinaryExpr &>(e);
			if (!is_comparison_op(b.op)) {
				return;
			}
			for (const Expression *side : {b.left.get(), b.right.get()}) {
				if (side->kind == ExprKind::SUBQUERY) {
					auto &sub = static_cast<const SubqueryExpr &>(*side);
					if (!subquery_row_capped(*sub.statement)) {
						hit = violation(rule.rule_id, "(SELECT", side->to_string(), {});
						return;
					}
				}
			}
		});
		return hit;
	}

	case DetectorKind::ORM_BINDING: {
		std::optional<RuleViolation> hit;
		walk_expressions(stmt, [&](const Expression &e) {
			if (hit || e.kind != ExprKind::PARAM) {
				return;
			}
			auto &p = static_cast<const ParamExpr &>(e);
			if (p.style == ParamStyle::PYFORMAT) {
				hit = violation(rule.rule_id, "%(" + p.name + ")s", p.to_string(),
				                {{"ident", p.name}});
			}
		});
		return hit;
	}

	case DetectorKind::DISTINCT_ORDER_BY_PROJECTION: {
		if (!stmt.core->distinct || stmt.order_by.empty()) {
			return std::nullopt;
		}
		std::set<std::string> projected;
		bool has_star = false;
		for (auto &item : stmt.core->items) {
			if (item.expr->kind == ExprKind::STAR) {
				has_star = true;
			}
			projected.insert(to_lower(item.expr->to_string()));
			if (!item.alias.empty()) {
				projected.insert(to_lower(item.alias));
			}
		}
		if (has_star) {
			return std::nullopt;
		}
		for (auto &item : stmt.order_by) {
			if (item.expr->kind == ExprKind::CONSTANT) {
				continue; // positional or literal ordering
			}
			std::string key = to_lower(item.expr->to_string());
			bool found = projected.count(key) > 0;
			if (!found && item.expr->kind == ExprKind::COLUMN_REF) {
				auto &col = static_cast<const ColumnRefExpr &>(*item.expr);
				found = projected.count(to_lower(col.column)) > 0;
			}
			if (!found) {
				return violation(rule.rule_id, item.expr->to_string(), item.expr->to_string(), {});
			}
		}
		return std::nullopt;
	}
	}
	return std::nullopt;
}

ErrorTrace synthesize_trace(const DialectRule &rule, const RuleViolation &v, const std::string &sql) {
	std::string message = rule.message_template;
	auto substitute = [&](const std::string &name, const std::string &value) {
		std::string ph = "{" + name + "}";
		size_t pos;
		while ((pos = message.find(ph)) != std::string::npos) {
			message.replace(pos, ph.size(), value);
		}
	};
	for (auto &[name, value] : v.substitutions) {
		substitute(name, value);
	}
	substitute("segment", v.segment);

	ErrorTrace trace;
	trace.message = message;
	// vendor-code prefixes are recognized the same way signature
	// normalization does it
	{
		ErrorTrace probe;
		probe.message = message;
		auto sig = normalize_signature(probe, *rule.dialects.begin());
		trace.vendor_code = sig.vendor_code;
	}
	// locate the offending fragment in the raw SQL
	std::string lowered_sql = to_lower(sql);
	std::string lowered_needle = to_lower(v.needle);
	size_t pos = lowered_needle.empty() ? std::string::npos : lowered_sql.find(lowered_needle);
	if (pos != std::string::npos) {
		trace.failing_segment = sql.substr(pos, v.needle.size());
		trace.segment_begin = pos;
		trace.segment_end = pos + v.needle.size();
	} else {
		trace.failing_segment = v.segment;
		trace.segment_begin = 0;
		trace.segment_end = sql.size();
	}
	return trace;
}

const std::vector<DialectRule> &default_rule_catalog() {
	static const std::vector<DialectRule> CATALOG = [] {
		std::vector<DialectRule> rules;
		auto add = [&](std::string id, std::set<DialectId> dialects, DetectorKind kind,
		               std::map<std::string, std::string> args, std::string message,
		               std::string gold) {
			DialectRule r;
			r.rule_id = std::move(id);
			r.dialects = std::move(dialects);
			r.detector_kind = kind;
			r.detector_args = std::move(args);
			r.message_template = std::move(message);
			r.gold_hint = std::move(gold);
			rules.push_back(std::move(r));
		};

		// Figure-1 cases
		add("C1", {DialectId::ORACLE}, DetectorKind::PROFILE_PARSE, {},
		    "ORA-00933: SQL command not properly ended",
		    "FETCH FIRST n ROWS ONLY instead of LIMIT");
		add("C3", {DialectId::POSTGRESQL}, DetectorKind::DISTINCT_ORDER_BY_PROJECTION, {},
		    "for SELECT DISTINCT, ORDER BY expressions must appear in select list",
		    "order only by expressions present in the DISTINCT projection");

		// Implicit constraints
		add("I1", {DialectId::POSTGRESQL, DialectId::MYSQL}, DetectorKind::DISTINCT_IN_WINDOW, {},
		    "DISTINCT is not implemented for window functions",
		    "GROUP BY with a plain COUNT(DISTINCT ...) aggregate");
		add("I2", {DialectId::MYSQL}, DetectorKind::NESTED_AGGREGATE, {},
		    "ERROR 1111 (HY000): Invalid use of group function",
		    "COUNT(CASE WHEN ... THEN 1 END) instead of nesting aggregates");
		add("I3", {DialectId::SQLSERVER}, DetectorKind::GROUPED_ORDER_BY_UNAGGREGATED, {},
		    "Msg 8127, Level 16, State 1: Column \"{ident}\" is invalid in the ORDER BY clause "
		    "because it is not contained in either an aggregate function or the GROUP BY clause.",
		    "isolate the aggregation in a CTE and order in the outer query");
		add("I4", {DialectId::POSTGRESQL, DialectId::MYSQL},
		    DetectorKind::SCALAR_SUBQUERY_UNCONSTRAINED, {},
		    "ERROR 1242 (21000): Subquery returns more than 1 row",
		    "constrain the scalar subquery: = (SELECT ... LIMIT 1)");

		// Incorrect usage
		add("M1", {DialectId::ORACLE}, DetectorKind::FUNCTION_CALLED,
		    {{"name", "CONCAT"}, {"min_args", "3"}},
		    "ORA-00909: invalid number of arguments",
		    "two-argument CONCAT or the || concatenation chain");
		add("M2", {DialectId::ORACLE}, DetectorKind::FROM_ALIAS_WITH_AS, {},
		    "ORA-00933: SQL command not properly ended",
		    "FROM tablename aliasname (no AS keyword for table aliases)");
		add("M3", {DialectId::ORACLE}, DetectorKind::ORDER_BY_DIRECTION_CALL, {},
		    "ORA-00904: \"{fn}\": invalid identifier",
		    "ORDER BY expr ASC / DESC keywords, not asc()/desc() calls");
		add("M4", {DialectId::POSTGRESQL, DialectId::MYSQL},
		    DetectorKind::DOUBLE_QUOTED_LITERAL_COMPARE, {},
		    "column \"{ident}\" does not exist",
		    "single-quoted string literals in comparisons");
		add("M5", {DialectId::ORACLE}, DetectorKind::MISSING_FROM, {},
		    "ORA-00923: FROM keyword not found where expected",
		    "SELECT ... FROM DUAL for table-less selects");
		add("M6", {DialectId::POSTGRESQL, DialectId::MYSQL}, DetectorKind::DERIVED_TABLE_UNALIASED, {},
		    "subquery in FROM must have an alias",
		    "FROM (SELECT ...) AS alias");

		// Unsupported syntax
		add("U1", {DialectId::ORACLE}, DetectorKind::FUNCTION_CALLED, {{"name", "GROUP_CONCAT"}},
		    "ORA-00904: \"{fn}\": invalid identifier",
		    "LISTAGG(expr, sep) WITHIN GROUP (ORDER BY expr)");
		add("U2", {DialectId::MYSQL}, DetectorKind::CAST_TO_TYPE, {{"type", "TEXT"}},
		    "ERROR 1064 (42000): You have an error in your SQL syntax near '{type})'",
		    "CAST(expr AS CHAR)");
		add("U3", {DialectId::ORACLE}, DetectorKind::FUNCTION_CALLED, {{"name", "DATE"}},
		    "ORA-00904: \"{fn}\": invalid identifier",
		    "TO_DATE('yyyy-mm-dd', 'YYYY-MM-DD')");
		add("U4", {DialectId::DUCKDB}, DetectorKind::ORM_BINDING, {},
		    "Binder Error: referenced parameter '{ident}' was not provided",
		    "inline native numeric literals instead of ORM bindings");

		std::sort(rules.begin(), rules.end(),
		          [](const DialectRule &a, const DialectRule &b) { return a.rule_id < b.rule_id; });
		return rules;
	}();
	return CATALOG;
}

std::vector<DialectRule> load_rule_catalog(const std::string &path) {
	std::string content = read_file(path);
	std::vector<DialectRule> rules;
	size_t line_no = 0;
	for (auto &line : split(content, '\n')) {
		line_no++;
		if (trim(line).empty()) {
			continue;
		}
		json j;
		try {
			j = json::parse(line);
		} catch (const json::exception &e) {
			throw CorruptRecordException(path, line_no, e.what());
		}
		DialectRule r;
		try {
			r.rule_id = j.at("rule_id").get<std::string>();
			for (auto &d : j.at("dialects")) {
				auto id = dialect_from_name(d.get<std::string>());
				if (!id) {
					throw CorruptRecordException(path, line_no, "unknown dialect " + d.get<std::string>());
				}
				r.dialects.insert(*id);
			}
			auto kind = detector_kind_from_name(j.at("detector_kind").get<std::string>());
			if (!kind) {
				throw CorruptRecordException(path, line_no,
				                             "unknown detector_kind " +
				                                 j.at("detector_kind").get<std::string>());
			}
			r.detector_kind = *kind;
			if (j.contains("detector_args")) {
				r.detector_args = j.at("detector_args").get<std::map<std::string, std::string>>();
			}
			r.message_template = j.at("message_template").get<std::string>();
			r.gold_hint = j.at("gold_hint").get<std::string>();
		} catch (const json::exception &e) {
			throw CorruptRecordException(path, line_no, e.what());
		}
		rules.push_back(std::move(r));
	}
	std::sort(rules.begin(), rules.end(),
	          [](const DialectRule &a, const DialectRule &b) { return a.rule_id < b.rule_id; });
	return rules;
}

void save_rule_catalog(const std::vector<DialectRule> &catalog, const std::string &path) {
	std::string out;
	for (auto &r : catalog) {
		json dialects = json::array();
		for (auto d : r.dialects) {
			dialects.push_back(dialect_name(d));
		}
		json j = {
		    {"rule_id", r.rule_id},
		    {"dialects", dialects},
		    {"detector_kind", detector_kind_name(r.detector_kind)},
		    {"detector_args", r.detector_args},
		    {"message_template", r.message_template},
		    {"gold_hint", r.gold_hint},
		};
		out += j.dump() + "\n";
	}
	write_file(path, out);
}

} // namespace dial
