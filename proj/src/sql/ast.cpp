#include "dial/sql/ast.hpp"

namespace dial {

namespace {

void render_quoted(std::string &out, const std::string &name, QuoteStyle quote) {
	switch (quote) {
	case QuoteStyle::NONE:
		out += name;
		break;
	case QuoteStyle::DOUBLE:
		out += "\"" + name + "\"";
		break;
	case QuoteStyle::BACKTICK:
		out += "`" + name + "`";
		break;
	case QuoteStyle::BRACKET:
		out += "[" + name + "]";
		break;
	}
}

void render_order_items(std::string &out, const std::vector<OrderItem> &items) {
	for (size_t i = 0; i < items.size(); i++) {
		if (i > 0) {
			out += ", ";
		}
		items[i].expr->render(out);
		if (items[i].direction > 0) {
			out += " ASC";
		} else if (items[i].direction < 0) {
			out += " DESC";
		}
		if (items[i].nulls_order > 0) {
			out += " NULLS FIRST";
		} else if (items[i].nulls_order < 0) {
			out += " NULLS LAST";
		}
	}
}

} // namespace

void ConstantExpr::render(std::string &out) const {
	switch (ckind) {
	case ConstantKind::STRING: {
		out += "'";
		for (char c : text) {
			out += c;
			if (c == '\'') {
				out += '\''; // doubled quote escape
			}
		}
		out += "'";
		break;
	}
	case ConstantKind::NUMBER:
	case ConstantKind::BOOLEAN:
		out += text;
		break;
	case ConstantKind::NULL_VALUE:
		out += "NULL";
		break;
	}
}

void ColumnRefExpr::render(std::string &out) const {
	if (!table.empty()) {
		out += table + ".";
	}
	render_quoted(out, column, quote);
}

void StarExpr::render(std::string &out) const {
	if (!table.empty()) {
		out += table + ".";
	}
	out += "*";
}

void ParamExpr::render(std::string &out) const {
	switch (style) {
	case ParamStyle::QMARK:
		out += "?";
		break;
	case ParamStyle::NAMED:
		out += ":" + name;
		break;
	case ParamStyle::DOLLAR:
		out += "$" + name;
		break;
	case ParamStyle::PYFORMAT:
		out += "%(" + name + ")s";
		break;
	}
}

void FunctionExpr::render(std::string &out) const {
	out += name + "(";
	if (distinct_arg) {
		out += "DISTINCT ";
	}
	if (star_arg) {
		out += "*";
	}
	for (size_t i = 0; i < args.size(); i++) {
		if (i > 0) {
			out += ", ";
		}
		args[i]->render(out);
	}
	out += ")";
	if (!within_group.empty()) {
		out += " WITHIN GROUP (ORDER BY ";
		render_order_items(out, within_group);
		out += ")";
	}
	if (over) {
		out += " OVER (";
		bool need_space = false;
		if (!over->partition_by.empty()) {
			out += "PARTITION BY ";
			for (size_t i = 0; i < over->partition_by.size(); i++) {
				if (i > 0) {
					out += ", ";
				}
				over->partition_by[i]->render(out);
			}
			need_space = true;
		}
		if (!over->order_by.empty()) {
			if (need_space) {
				out += " ";
			}
			out += "ORDER BY ";
			render_order_items(out, over->order_by);
		}
		out += ")";
	}
}

void BinaryExpr::render(std::string &out) const {
	out += "(";
	left->render(out);
	out += " " + op + " ";
	right->render(out);
	out += ")";
}

void UnaryExpr::render(std::string &out) const {
	out += "(" + op + " ";
	operand->render(out);
	out += ")";
}

void CaseExpr::render(std::string &out) const {
	out += "CASE";
	if (operand) {
		out += " ";
		operand->render(out);
	}
	for (auto &clause : clauses) {
		out += " WHEN ";
		clause.when->render(out);
		out += " THEN ";
		clause.then->render(out);
	}
	if (else_expr) {
		out += " ELSE ";
		else_expr->render(out);
	}
	out += " END";
}

void CastExpr::render(std::string &out) const {
	out += "CAST(";
	operand->render(out);
	out += " AS " + target_type + ")";
}

void ExtractExpr::render(std::string &out) const {
	out += "EXTRACT(" + field + " FROM ";
	source->render(out);
	out += ")";
}

void SubqueryExpr::render(std::string &out) const {
	out += "(";
	statement->render(out);
	out += ")";
}

void ExistsExpr::render(std::string &out) const {
	if (negated) {
		out += "NOT ";
	}
	out += "EXISTS (";
	statement->render(out);
	out += ")";
}

void InExpr::render(std::string &out) const {
	out += "(";
	operand->render(out);
	out += negated ? " NOT IN (" : " IN (";
	if (subquery) {
		subquery->render(out);
	} else {
		for (size_t i = 0; i < list.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			list[i]->render(out);
		}
	}
	out += "))";
}

void BetweenExpr::render(std::string &out) const {
	out += "(";
	operand->render(out);
	out += negated ? " NOT BETWEEN " : " BETWEEN ";
	low->render(out);
	out += " AND ";
	high->render(out);
	out += ")";
}

void IsNullExpr::render(std::string &out) const {
	out += "(";
	operand->render(out);
	out += negated ? " IS NOT NULL" : " IS NULL";
	out += ")";
}

void BaseTableRef::render(std::string &out) const {
	render_quoted(out, table, quote);
	if (!alias.empty()) {
		out += alias_with_as ? " AS " : " ";
		out += alias;
	}
}

void DerivedTableRef::render(std::string &out) const {
	out += "(";
	statement->render(out);
	out += ")";
	if (!alias.empty()) {
		out += alias_with_as ? " AS " : " ";
		out += alias;
	}
}

void JoinRef::render(std::string &out) const {
	left->render(out);
	switch (join_type) {
	case JoinType::INNER:
		out += " JOIN ";
		break;
	case JoinType::LEFT:
		out += " LEFT JOIN ";
		break;
	case JoinType::RIGHT:
		out += " RIGHT JOIN ";
		break;
	case JoinType::FULL:
		out += " FULL JOIN ";
		break;
	case JoinType::CROSS:
		out += " CROSS JOIN ";
		break;
	}
	right->render(out);
	if (condition) {
		out += " ON ";
		condition->render(out);
	} else if (!using_cols.empty()) {
		out += " USING (";
		for (size_t i = 0; i < using_cols.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			out += using_cols[i];
		}
		out += ")";
	}
}

namespace {

void render_core(std::string &out, const SelectCore &core) {
	out += "SELECT ";
	if (core.distinct) {
		out += "DISTINCT ";
	}
	if (core.top) {
		out += "TOP ";
		core.top->render(out);
		out += " ";
	}
	for (size_t i = 0; i < core.items.size(); i++) {
		if (i > 0) {
			out += ", ";
		}
		core.items[i].expr->render(out);
		if (!core.items[i].alias.empty()) {
			out += core.items[i].alias_with_as ? " AS " : " ";
			out += core.items[i].alias;
		}
	}
	if (!core.from.empty()) {
		out += " FROM ";
		for (size_t i = 0; i < core.from.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			core.from[i]->render(out);
		}
	}
	if (core.where) {
		out += " WHERE ";
		core.where->render(out);
	}
	if (!core.group_by.empty()) {
		out += " GROUP BY ";
		for (size_t i = 0; i < core.group_by.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			core.group_by[i]->render(out);
		}
	}
	if (core.having) {
		out += " HAVING ";
		core.having->render(out);
	}
}

} // namespace

void SelectStatement::render(std::string &out) const {
	if (!ctes.empty()) {
		out += "WITH ";
		for (size_t i = 0; i < ctes.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			out += ctes[i].name;
			if (!ctes[i].columns.empty()) {
				out += "(";
				for (size_t k = 0; k < ctes[i].columns.size(); k++) {
					if (k > 0) {
						out += ", ";
					}
					out += ctes[i].columns[k];
				}
				out += ")";
			}
			out += " AS (";
			ctes[i].statement->render(out);
			out += ")";
		}
		out += " ";
	}
	render_core(out, *core);
	for (auto &so : set_ops) {
		switch (so.op) {
		case SetOpKind::UNION_DISTINCT:
			out += " UNION ";
			break;
		case SetOpKind::UNION_ALL:
			out += " UNION ALL ";
			break;
		case SetOpKind::INTERSECT:
			out += " INTERSECT ";
			break;
		case SetOpKind::EXCEPT:
			out += " EXCEPT ";
			break;
		}
		render_core(out, *so.core);
	}
	if (!order_by.empty()) {
		out += " ORDER BY ";
		render_order_items(out, order_by);
	}
	switch (limit.kind) {
	case LimitKind::NONE:
		break;
	case LimitKind::LIMIT:
		out += " LIMIT ";
		limit.row_count->render(out);
		if (limit.offset) {
			out += " OFFSET ";
			limit.offset->render(out);
		}
		break;
	case LimitKind::FETCH_FIRST:
		out += " FETCH FIRST ";
		limit.row_count->render(out);
		out += " ROWS ONLY";
		break;
	case LimitKind::OFFSET_FETCH:
		out += " OFFSET ";
		limit.offset->render(out);
		out += " ROWS";
		if (limit.row_count) {
			out += " FETCH NEXT ";
			limit.row_count->render(out);
			out += " ROWS ONLY";
		}
		break;
	}
}

// ---------------------------------------------------------------------------
// Walkers
// ---------------------------------------------------------------------------

namespace {

void walk_expr_impl(const Expression &expr, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn);

void walk_order_items(const std::vector<OrderItem> &items,
                      const std::function<void(const Expression &)> &fn,
                      const std::function<void(const SelectStatement &)> &stmt_fn) {
	for (auto &it : items) {
		walk_expr_impl(*it.expr, fn, stmt_fn);
	}
}

void walk_stmt_impl(const SelectStatement &stmt, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectCore &)> &core_fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn);

void walk_table_ref(const TableRef &ref, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectCore &)> &core_fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn) {
	switch (ref.kind) {
	case TableRefKind::BASE:
		break;
	case TableRefKind::DERIVED: {
		auto &d = static_cast<const DerivedTableRef &>(ref);
		walk_stmt_impl(*d.statement, fn, core_fn, stmt_fn);
		break;
	}
	case TableRefKind::JOIN: {
		auto &j = static_cast<const JoinRef &>(ref);
		walk_table_ref(*j.left, fn, core_fn, stmt_fn);
		walk_table_ref(*j.right, fn, core_fn, stmt_fn);
		if (j.condition) {
			walk_expr_impl(*j.condition, fn,
			               [&](const SelectStatement &s) { walk_stmt_impl(s, fn, core_fn, stmt_fn); });
		}
		break;
	}
	}
}

void walk_core_impl(const SelectCore &core, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectCore &)> &core_fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn) {
	if (core_fn) {
		core_fn(core);
	}
	auto recurse_stmt = [&](const SelectStatement &s) { walk_stmt_impl(s, fn, core_fn, stmt_fn); };
	if (core.top) {
		walk_expr_impl(*core.top, fn, recurse_stmt);
	}
	for (auto &item : core.items) {
		walk_expr_impl(*item.expr, fn, recurse_stmt);
	}
	for (auto &ref : core.from) {
		walk_table_ref(*ref, fn, core_fn, stmt_fn);
	}
	if (core.where) {
		walk_expr_impl(*core.where, fn, recurse_stmt);
	}
	for (auto &g : core.group_by) {
		walk_expr_impl(*g, fn, recurse_stmt);
	}
	if (core.having) {
		walk_expr_impl(*core.having, fn, recurse_stmt);
	}
}

void walk_stmt_impl(const SelectStatement &stmt, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectCore &)> &core_fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn) {
	if (stmt_fn) {
		stmt_fn(stmt);
	}
	for (auto &cte : stmt.ctes) {
		walk_stmt_impl(*cte.statement, fn, core_fn, stmt_fn);
	}
	walk_core_impl(*stmt.core, fn, core_fn, stmt_fn);
	for (auto &so : stmt.set_ops) {
		walk_core_impl(*so.core, fn, core_fn, stmt_fn);
	}
	auto recurse_stmt = [&](const SelectStatement &s) { walk_stmt_impl(s, fn, core_fn, stmt_fn); };
	walk_order_items(stmt.order_by, fn, recurse_stmt);
	if (stmt.limit.row_count) {
		walk_expr_impl(*stmt.limit.row_count, fn, recurse_stmt);
	}
	if (stmt.limit.offset) {
		walk_expr_impl(*stmt.limit.offset, fn, recurse_stmt);
	}
}

void walk_expr_impl(const Expression &expr, const std::function<void(const Expression &)> &fn,
                    const std::function<void(const SelectStatement &)> &stmt_fn) {
	if (fn) {
		fn(expr);
	}
	switch (expr.kind) {
	case ExprKind::CONSTANT:
	case ExprKind::COLUMN_REF:
	case ExprKind::STAR:
	case ExprKind::PARAM:
		break;
	case ExprKind::FUNCTION: {
		auto &f = static_cast<const FunctionExpr &>(expr);
		for (auto &a : f.args) {
			walk_expr_impl(*a, fn, stmt_fn);
		}
		if (f.over) {
			for (auto &p : f.over->partition_by) {
				walk_expr_impl(*p, fn, stmt_fn);
			}
			for (auto &o : f.over->order_by) {
				walk_expr_impl(*o.expr, fn, stmt_fn);
			}
		}
		for (auto &o : f.within_group) {
			walk_expr_impl(*o.expr, fn, stmt_fn);
		}
		break;
	}
	case ExprKind::BINARY: {
		auto &b = static_cast<const BinaryExpr &>(expr);
		walk_expr_impl(*b.left, fn, stmt_fn);
		walk_expr_impl(*b.right, fn, stmt_fn);
		break;
	}
	case ExprKind::UNARY:
		walk_expr_impl(*static_cast<const UnaryExpr &>(expr).operand, fn, stmt_fn);
		break;
	case ExprKind::CASE_WHEN: {
		auto &c = static_cast<const CaseExpr &>(expr);
		if (c.operand) {
			walk_expr_impl(*c.operand, fn, stmt_fn);
		}
		for (auto &cl : c.clauses) {
			walk_expr_impl(*cl.when, fn, stmt_fn);
			walk_expr_impl(*cl.then, fn, stmt_fn);
		}
		if (c.else_expr) {
			walk_expr_impl(*c.else_expr, fn, stmt_fn);
		}
		break;
	}
	case ExprKind::CAST:
		walk_expr_impl(*static_cast<const CastExpr &>(expr).operand, fn, stmt_fn);
		break;
	case ExprKind::EXTRACT:
		walk_expr_impl(*static_cast<const ExtractExpr &>(expr).source, fn, stmt_fn);
		break;
	case ExprKind::SUBQUERY:
		if (stmt_fn) {
			stmt_fn(*static_cast<const SubqueryExpr &>(expr).statement);
		}
		break;
	case ExprKind::EXISTS:
		if (stmt_fn) {
			stmt_fn(*static_cast<const ExistsExpr &>(expr).statement);
		}
		break;
	case ExprKind::IN_LIST: {
		auto &in = static_cast<const InExpr &>(expr);
		walk_expr_impl(*in.operand, fn, stmt_fn);
		for (auto &e : in.list) {
			walk_expr_impl(*e, fn, stmt_fn);
		}
		if (in.subquery && stmt_fn) {
			stmt_fn(*in.subquery);
		}
		break;
	}
	case ExprKind::BETWEEN: {
		auto &b = static_cast<const BetweenExpr &>(expr);
		walk_expr_impl(*b.operand, fn, stmt_fn);
		walk_expr_impl(*b.low, fn, stmt_fn);
		walk_expr_impl(*b.high, fn, stmt_fn);
		break;
	}
	case ExprKind::IS_NULL:
		walk_expr_impl(*static_cast<const IsNullExpr &>(expr).operand, fn, stmt_fn);
		break;
	}
}

} // namespace

void walk_expressions(const SelectStatement &stmt, const std::function<void(const Expression &)> &fn) {
	walk_stmt_impl(stmt, fn, nullptr, nullptr);
}

void walk_expressions(const Expression &expr, const std::function<void(const Expression &)> &fn) {
	walk_expr_impl(expr, fn, [&](const SelectStatement &s) { walk_expressions(s, fn); });
}

void walk_cores(const SelectStatement &stmt, const std::function<void(const SelectCore &)> &fn) {
	walk_stmt_impl(stmt, nullptr, fn, nullptr);
}

void walk_statements(const SelectStatement &stmt, const std::function<void(const SelectStatement &)> &fn) {
	walk_stmt_impl(stmt, nullptr, nullptr, fn);
}

bool structurally_equal(const SelectStatement &a, const SelectStatement &b) {
	return a.to_string() == b.to_string();
}

} // namespace dial
