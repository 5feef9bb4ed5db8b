#include "dial/audit/trace.hpp"

#include "dial/common/strings.hpp"
#include "dial/sql/parser.hpp"

#include <cctype>
#include <map>

namespace dial {

namespace {

struct AliasMap {
	// alias (lowercased) -> base table (lowercased)
	std::map<std::string, std::string> aliases;

	std::string resolve(const std::string &name) const {
		auto it = aliases.find(to_lower(name));
		if (it != aliases.end()) {
			return it->second;
		}
		return to_lower(name);
	}
};

void collect_aliases(const TableRef &ref, AliasMap &map, std::set<std::string> &tables) {
	switch (ref.kind) {
	case TableRefKind::BASE: {
		auto &b = static_cast<const BaseTableRef &>(ref);
		std::string table = to_lower(b.table);
		tables.insert(table);
		map.aliases[table] = table;
		if (!b.alias.empty()) {
			map.aliases[to_lower(b.alias)] = table;
		}
		break;
	}
	case TableRefKind::DERIVED: {
		auto &d = static_cast<const DerivedTableRef &>(ref);
		if (!d.alias.empty()) {
			map.aliases[to_lower(d.alias)] = to_lower(d.alias);
		}
		break;
	}
	case TableRefKind::JOIN: {
		auto &j = static_cast<const JoinRef &>(ref);
		collect_aliases(*j.left, map, tables);
		collect_aliases(*j.right, map, tables);
		break;
	}
	}
}

bool is_comparison(const std::string &op) {
	return op == "=" || op == "<>" || op == "!=" || op == "<" || op == ">" || op == "<=" ||
	       op == ">=" || op == "LIKE" || op == "NOT LIKE";
}

std::string flip_comparator(const std::string &op) {
	if (op == "<") {
		return ">";
	}
	if (op == ">") {
		return "<";
	}
	if (op == "<=") {
		return ">=";
	}
	if (op == ">=") {
		return "<=";
	}
	return op; // =, <>, != are symmetric
}

std::string canonical_comparator(const std::string &op) {
	if (op == "!=") {
		return "<>";
	}
	return op;
}

// ISO-8601 passthrough plus TO_DATE('...','YYYY-MM-DD') unwrapping.
std::string canonical_literal(const Expression &expr) {
	if (expr.kind == ExprKind::CONSTANT) {
		auto &c = static_cast<const ConstantExpr &>(expr);
		if (c.ckind == ConstantKind::STRING) {
			return c.text; // unquoted body; dates already ISO stay as-is
		}
		if (c.ckind == ConstantKind::NUMBER) {
			return c.text;
		}
		return to_lower(c.text);
	}
	if (expr.kind == ExprKind::FUNCTION) {
		auto &f = static_cast<const FunctionExpr &>(expr);
		if (f.name == "TO_DATE" && !f.args.empty() && f.args[0]->kind == ExprKind::CONSTANT) {
			return static_cast<const ConstantExpr &>(*f.args[0]).text;
		}
		if (f.name == "DATE" && f.args.size() == 1 && f.args[0]->kind == ExprKind::CONSTANT) {
			return static_cast<const ConstantExpr &>(*f.args[0]).text;
		}
	}
	return to_lower(expr.to_string());
}

bool column_of(const Expression &expr, std::string &bare_out) {
	if (expr.kind != ExprKind::COLUMN_REF) {
		return false;
	}
	bare_out = to_lower(static_cast<const ColumnRefExpr &>(expr).column);
	return true;
}

// Year extraction realizations: EXTRACT(YEAR FROM col), YEAR(col),
// strftime('%Y', col), TO_CHAR(col, 'YYYY').
bool year_of_column(const Expression &expr, std::string &column_out) {
	if (expr.kind == ExprKind::EXTRACT) {
		auto &e = static_cast<const ExtractExpr &>(expr);
		return e.field == "YEAR" && column_of(*e.source, column_out);
	}
	if (expr.kind == ExprKind::FUNCTION) {
		auto &f = static_cast<const FunctionExpr &>(expr);
		if (f.name == "YEAR" && f.args.size() == 1) {
			return column_of(*f.args[0], column_out);
		}
		if (f.name == "STRFTIME" && f.args.size() == 2 &&
		    f.args[0]->kind == ExprKind::CONSTANT &&
		    static_cast<const ConstantExpr &>(*f.args[0]).text == "%Y") {
			return column_of(*f.args[1], column_out);
		}
		if (f.name == "TO_CHAR" && f.args.size() == 2 &&
		    f.args[1]->kind == ExprKind::CONSTANT &&
		    to_upper(static_cast<const ConstantExpr &>(*f.args[1]).text) == "YYYY") {
			return column_of(*f.args[0], column_out);
		}
	}
	return false;
}

// "YYYY-01-01".."YYYY-12-31" span detection for BETWEEN normalization.
bool full_year_span(const std::string &low, const std::string &high, std::string &year_out) {
	auto year_prefix = [](const std::string &s, const std::string &suffix) -> std::string {
		if (s.size() < 10) {
			return "";
		}
		std::string y = s.substr(0, 4);
		for (char c : y) {
			if (!std::isdigit(static_cast<unsigned char>(c))) {
				return "";
			}
		}
		if (s.substr(4, suffix.size()) == suffix) {
			return y;
		}
		return "";
	};
	std::string y1 = year_prefix(low, "-01-01");
	std::string y2 = year_prefix(high, "-12-31");
	if (!y1.empty() && y1 == y2) {
		year_out = y1;
		return true;
	}
	return false;
}

void collect_columns(const Expression &expr, std::set<std::string> &out) {
	walk_expressions(expr, [&](const Expression &e) {
		if (e.kind == ExprKind::COLUMN_REF) {
			out.insert(to_lower(static_cast<const ColumnRefExpr &>(e).column));
		}
	});
}

void flatten_conjuncts(const Expression &expr, std::vector<const Expression *> &out) {
	if (expr.kind == ExprKind::BINARY) {
		auto &b = static_cast<const BinaryExpr &>(expr);
		if (b.op == "AND") {
			flatten_conjuncts(*b.left, out);
			flatten_conjuncts(*b.right, out);
			return;
		}
	}
	out.push_back(&expr);
}

struct TraceBuilder {
	OperatorTrace trace;
	AliasMap aliases;

	void add_predicate(const Expression &conjunct, bool post_aggregation) {
		NormalizedPredicate p;
		p.post_aggregation = post_aggregation;

		if (conjunct.kind == ExprKind::BINARY) {
			auto &b = static_cast<const BinaryExpr &>(conjunct);
			if (is_comparison(b.op)) {
				std::string left_col, right_col, year_col;
				bool left_is_col = column_of(*b.left, left_col);
				bool right_is_col = column_of(*b.right, right_col);
				if (left_is_col && right_is_col) {
					// column-to-column equality: possible implicit join edge
					if (b.op == "=") {
						add_equijoin_edge(*b.left, *b.right);
						return;
					}
				}
				if (year_of_column(*b.left, year_col)) {
					p.column = year_col;
					p.comparator = "year" + canonical_comparator(b.op);
					p.value = canonical_literal(*b.right);
					trace.predicates.insert(p);
					return;
				}
				if (year_of_column(*b.right, year_col)) {
					p.column = year_col;
					p.comparator = "year" + canonical_comparator(flip_comparator(b.op));
					p.value = canonical_literal(*b.left);
					trace.predicates.insert(p);
					return;
				}
				if (left_is_col) {
					p.column = left_col;
					p.comparator = canonical_comparator(b.op);
					p.value = canonical_literal(*b.right);
					trace.predicates.insert(p);
					return;
				}
				if (right_is_col) {
					p.column = right_col;
					p.comparator = canonical_comparator(flip_comparator(b.op));
					p.value = canonical_literal(*b.left);
					trace.predicates.insert(p);
					return;
				}
			}
		}
		if (conjunct.kind == ExprKind::BETWEEN) {
			auto &bt = static_cast<const BetweenExpr &>(conjunct);
			std::string col;
			if (column_of(*bt.operand, col) && !bt.negated) {
				std::string year;
				if (full_year_span(canonical_literal(*bt.low), canonical_literal(*bt.high), year)) {
					p.column = col;
					p.comparator = "year=";
					p.value = year;
					trace.predicates.insert(p);
					return;
				}
				p.column = col;
				p.comparator = "between";
				p.value = canonical_literal(*bt.low) + ".." + canonical_literal(*bt.high);
				trace.predicates.insert(p);
				return;
			}
		}
		if (conjunct.kind == ExprKind::IN_LIST) {
			auto &in = static_cast<const InExpr &>(conjunct);
			std::string col;
			if (column_of(*in.operand, col)) {
				p.column = col;
				p.comparator = in.negated ? "not in" : "in";
				std::vector<std::string> values;
				for (auto &e : in.list) {
					values.push_back(canonical_literal(*e));
				}
				std::sort(values.begin(), values.end());
				p.value = in.subquery ? "(subquery)" : join(values, ",");
				trace.predicates.insert(p);
				return;
			}
		}
		if (conjunct.kind == ExprKind::IS_NULL) {
			auto &n = static_cast<const IsNullExpr &>(conjunct);
			std::string col;
			if (column_of(*n.operand, col)) {
				p.column = col;
				p.comparator = n.negated ? "is not null" : "is null";
				p.value = "";
				trace.predicates.insert(p);
				return;
			}
		}
		// unrecognized shape: pass through verbatim
		p.column = "";
		p.comparator = "expr";
		p.value = to_lower(conjunct.to_string());
		trace.predicates.insert(p);
	}

	void add_equijoin_edge(const Expression &left, const Expression &right) {
		auto &lc = static_cast<const ColumnRefExpr &>(left);
		auto &rc = static_cast<const ColumnRefExpr &>(right);
		std::string lt = lc.table.empty() ? "" : aliases.resolve(lc.table);
		std::string rt = rc.table.empty() ? "" : aliases.resolve(rc.table);
		if (lt.empty() || rt.empty() || lt == rt) {
			// unqualified or self-comparison: keep as a plain predicate
			NormalizedPredicate p;
			p.column = to_lower(lc.column);
			p.comparator = "=";
			p.value = to_lower(right.to_string());
			trace.predicates.insert(p);
			return;
		}
		JoinEdge edge;
		if (lt <= rt) {
			edge.left_table = lt;
			edge.right_table = rt;
			edge.key_pairs.emplace_back(to_lower(lc.column), to_lower(rc.column));
		} else {
			edge.left_table = rt;
			edge.right_table = lt;
			edge.key_pairs.emplace_back(to_lower(rc.column), to_lower(lc.column));
		}
		trace.joins.insert(edge);
	}

	static std::string rightmost_base_table(const TableRef &ref) {
		if (ref.kind == TableRefKind::BASE) {
			return to_lower(static_cast<const BaseTableRef &>(ref).table);
		}
		if (ref.kind == TableRefKind::JOIN) {
			auto &j = static_cast<const JoinRef &>(ref);
			std::string right = rightmost_base_table(*j.right);
			return right.empty() ? rightmost_base_table(*j.left) : right;
		}
		return ""; // derived tables have no base identity
	}

	void scan_join_condition(const Expression &cond) {
		std::vector<const Expression *> conjuncts;
		flatten_conjuncts(cond, conjuncts);
		for (auto *c : conjuncts) {
			if (c->kind == ExprKind::BINARY) {
				auto &b = static_cast<const BinaryExpr &>(*c);
				if (b.op == "=" && b.left->kind == ExprKind::COLUMN_REF &&
				    b.right->kind == ExprKind::COLUMN_REF) {
					add_equijoin_edge(*b.left, *b.right);
					continue;
				}
			}
			add_predicate(*c, false);
		}
	}

	void scan_table_ref(const TableRef &ref) {
		if (ref.kind == TableRefKind::JOIN) {
			auto &j = static_cast<const JoinRef &>(ref);
			scan_table_ref(*j.left);
			scan_table_ref(*j.right);
			if (j.condition) {
				scan_join_condition(*j.condition);
			}
			if (!j.using_cols.empty()) {
				// USING(col): link the most recently joined table on the left
				// (the rightmost leaf) with the newly joined right side
				std::string left_partner = rightmost_base_table(*j.left);
				std::string right_partner = rightmost_base_table(*j.right);
				if (!left_partner.empty() && !right_partner.empty()) {
					JoinEdge edge;
					edge.left_table = std::min(left_partner, right_partner);
					edge.right_table = std::max(left_partner, right_partner);
					for (auto &c : j.using_cols) {
						edge.key_pairs.emplace_back(to_lower(c), to_lower(c));
					}
					trace.joins.insert(edge);
				}
			}
		}
	}

	void add_aggregates_from(const Expression &expr) {
		walk_expressions(expr, [&](const Expression &e) {
			if (e.kind == ExprKind::CAST) {
				trace.uses_cast = true;
				collect_columns(*static_cast<const CastExpr &>(e).operand, trace.cast_columns);
			}
			if (e.kind != ExprKind::FUNCTION) {
				return;
			}
			auto &f = static_cast<const FunctionExpr &>(e);
			if (!aggregate_function_names().count(f.name) || f.over) {
				return;
			}
			AggregateUnit unit;
			unit.function = f.name;
			if (f.star_arg) {
				unit.primary_column = "*";
				unit.full_text = "*";
			} else if (!f.args.empty()) {
				std::set<std::string> cols;
				collect_columns(*f.args[0], cols);
				unit.primary_column = cols.empty() ? to_lower(f.args[0]->to_string()) : *cols.begin();
				unit.full_text = to_lower(f.args[0]->to_string());
				if (f.distinct_arg) {
					unit.full_text = "distinct " + unit.full_text;
				}
			}
			trace.aggregates.insert(std::move(unit));
		});
	}

	void build(const SelectStatement &stmt) {
		if (!stmt.set_ops.empty()) {
			trace.has_set_operation = true;
		}
		auto &core = *stmt.core;
		for (auto &ref : core.from) {
			collect_aliases(*ref, aliases, trace.tables);
		}
		for (auto &ref : core.from) {
			scan_table_ref(*ref);
		}
		if (core.where) {
			std::vector<const Expression *> conjuncts;
			flatten_conjuncts(*core.where, conjuncts);
			for (auto *c : conjuncts) {
				add_predicate(*c, false);
			}
		}
		if (core.having) {
			std::vector<const Expression *> conjuncts;
			flatten_conjuncts(*core.having, conjuncts);
			for (auto *c : conjuncts) {
				add_predicate(*c, true);
			}
		}
		for (auto &g : core.group_by) {
			std::string col;
			if (column_of(*g, col)) {
				trace.group_dims.insert(col);
			} else {
				trace.group_dims.insert(to_lower(g->to_string()));
			}
		}
		for (auto &item : core.items) {
			ProjectionItem p;
			p.rendered = to_lower(item.expr->to_string());
			collect_columns(*item.expr, p.columns);
			p.alias = item.alias;
			trace.projection.push_back(std::move(p));
			add_aggregates_from(*item.expr);
		}
		if (core.having) {
			add_aggregates_from(*core.having);
		}
		for (auto &o : stmt.order_by) {
			add_aggregates_from(*o.expr);
		}
	}
};

} // namespace

OperatorTrace derive_trace(const SelectStatement &stmt) {
	TraceBuilder builder;
	builder.build(stmt);
	return builder.trace;
}

} // namespace dial
