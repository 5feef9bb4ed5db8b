#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dial {

// Quoting style an identifier carried in the source text.
enum class QuoteStyle : uint8_t { NONE, DOUBLE, BACKTICK, BRACKET };

enum class ExprKind : uint8_t {
	CONSTANT,
	COLUMN_REF,
	STAR,
	PARAM,
	FUNCTION,
	BINARY,
	UNARY,
	CASE_WHEN,
	CAST,
	EXTRACT,
	SUBQUERY,
	EXISTS,
	IN_LIST,
	BETWEEN,
	IS_NULL,
};

struct SelectStatement;

struct Expression {
	explicit Expression(ExprKind kind) : kind(kind) {
	}
	virtual ~Expression() = default;

	ExprKind kind;

	// Canonical text form; structural equality is render equality.
	virtual void render(std::string &out) const = 0;
	std::string to_string() const {
		std::string s;
		render(s);
		return s;
	}
};

using ExprPtr = std::unique_ptr<Expression>;

enum class ConstantKind : uint8_t { STRING, NUMBER, NULL_VALUE, BOOLEAN };

struct ConstantExpr : Expression {
	ConstantExpr(ConstantKind ckind, std::string text)
	    : Expression(ExprKind::CONSTANT), ckind(ckind), text(std::move(text)) {
	}
	ConstantKind ckind;
	std::string text; // literal body without quotes

	void render(std::string &out) const override;
};

struct ColumnRefExpr : Expression {
	ColumnRefExpr() : Expression(ExprKind::COLUMN_REF) {
	}
	std::string table; // empty when unqualified
	std::string column;
	QuoteStyle quote = QuoteStyle::NONE;

	void render(std::string &out) const override;
};

// "*" or "t.*" in a select list or COUNT(*).
struct StarExpr : Expression {
	StarExpr() : Expression(ExprKind::STAR) {
	}
	std::string table;

	void render(std::string &out) const override;
};

enum class ParamStyle : uint8_t { QMARK, NAMED, DOLLAR, PYFORMAT };

struct ParamExpr : Expression {
	ParamExpr(ParamStyle style, std::string name)
	    : Expression(ExprKind::PARAM), style(style), name(std::move(name)) {
	}
	ParamStyle style;
	std::string name;

	void render(std::string &out) const override;
};

struct OrderItem {
	ExprPtr expr;
	int direction = 0;   // 0 none, 1 asc, -1 desc
	int nulls_order = 0; // 0 none, 1 first, -1 last
};

struct WindowSpec {
	std::vector<ExprPtr> partition_by;
	std::vector<OrderItem> order_by;
};

struct FunctionExpr : Expression {
	FunctionExpr() : Expression(ExprKind::FUNCTION) {
	}
	std::string name; // uppercased
	bool distinct_arg = false;
	bool star_arg = false; // COUNT(*)
	std::vector<ExprPtr> args;
	std::unique_ptr<WindowSpec> over;
	std::vector<OrderItem> within_group; // LISTAGG(...) WITHIN GROUP (ORDER BY ...)

	void render(std::string &out) const override;
};

struct BinaryExpr : Expression {
	BinaryExpr(std::string op, ExprPtr left, ExprPtr right)
	    : Expression(ExprKind::BINARY), op(std::move(op)), left(std::move(left)), right(std::move(right)) {
	}
	std::string op; // uppercased word ops (AND, OR, LIKE) or symbol
	ExprPtr left;
	ExprPtr right;

	void render(std::string &out) const override;
};

struct UnaryExpr : Expression {
	UnaryExpr(std::string op, ExprPtr operand)
	    : Expression(ExprKind::UNARY), op(std::move(op)), operand(std::move(operand)) {
	}
	std::string op;
	ExprPtr operand;

	void render(std::string &out) const override;
};

struct CaseWhenClause {
	ExprPtr when;
	ExprPtr then;
};

struct CaseExpr : Expression {
	CaseExpr() : Expression(ExprKind::CASE_WHEN) {
	}
	ExprPtr operand; // optional simple-case operand
	std::vector<CaseWhenClause> clauses;
	ExprPtr else_expr;

	void render(std::string &out) const override;
};

struct CastExpr : Expression {
	CastExpr(ExprPtr operand, std::string target)
	    : Expression(ExprKind::CAST), operand(std::move(operand)), target_type(std::move(target)) {
	}
	ExprPtr operand;
	std::string target_type; // uppercased, args preserved e.g. DECIMAL(10,2)

	void render(std::string &out) const override;
};

struct ExtractExpr : Expression {
	ExtractExpr(std::string field, ExprPtr source)
	    : Expression(ExprKind::EXTRACT), field(std::move(field)), source(std::move(source)) {
	}
	std::string field; // YEAR, MONTH, ...
	ExprPtr source;

	void render(std::string &out) const override;
};

struct SubqueryExpr : Expression {
	SubqueryExpr() : Expression(ExprKind::SUBQUERY) {
	}
	std::unique_ptr<SelectStatement> statement;

	void render(std::string &out) const override;
};

struct ExistsExpr : Expression {
	ExistsExpr() : Expression(ExprKind::EXISTS) {
	}
	bool negated = false;
	std::unique_ptr<SelectStatement> statement;

	void render(std::string &out) const override;
};

struct InExpr : Expression {
	InExpr() : Expression(ExprKind::IN_LIST) {
	}
	ExprPtr operand;
	bool negated = false;
	std::vector<ExprPtr> list;                  // when list-form
	std::unique_ptr<SelectStatement> subquery;  // when subquery-form

	void render(std::string &out) const override;
};

struct BetweenExpr : Expression {
	BetweenExpr() : Expression(ExprKind::BETWEEN) {
	}
	ExprPtr operand;
	bool negated = false;
	ExprPtr low;
	ExprPtr high;

	void render(std::string &out) const override;
};

struct IsNullExpr : Expression {
	IsNullExpr() : Expression(ExprKind::IS_NULL) {
	}
	ExprPtr operand;
	bool negated = false;

	void render(std::string &out) const override;
};

// ---------------------------------------------------------------------------
// Table references
// ---------------------------------------------------------------------------

enum class TableRefKind : uint8_t { BASE, DERIVED, JOIN };

enum class JoinType : uint8_t { INNER, LEFT, RIGHT, FULL, CROSS };

struct TableRef {
	explicit TableRef(TableRefKind kind) : kind(kind) {
	}
	virtual ~TableRef() = default;

	TableRefKind kind;

	virtual void render(std::string &out) const = 0;
	std::string to_string() const {
		std::string s;
		render(s);
		return s;
	}
};

using TableRefPtr = std::unique_ptr<TableRef>;

struct BaseTableRef : TableRef {
	BaseTableRef() : TableRef(TableRefKind::BASE) {
	}
	std::string table;
	QuoteStyle quote = QuoteStyle::NONE;
	std::string alias;          // empty when none
	bool alias_with_as = false; // alias introduced via the AS keyword

	void render(std::string &out) const override;
};

struct DerivedTableRef : TableRef {
	DerivedTableRef() : TableRef(TableRefKind::DERIVED) {
	}
	std::unique_ptr<SelectStatement> statement;
	std::string alias; // empty = anonymous derived table
	bool alias_with_as = false;

	void render(std::string &out) const override;
};

struct JoinRef : TableRef {
	JoinRef() : TableRef(TableRefKind::JOIN) {
	}
	JoinType join_type = JoinType::INNER;
	TableRefPtr left;
	TableRefPtr right;
	ExprPtr condition;                   // ON expr (may be null for CROSS)
	std::vector<std::string> using_cols; // USING (a, b)

	void render(std::string &out) const override;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct SelectItem {
	ExprPtr expr;
	std::string alias;
	bool alias_with_as = false;
};

struct SelectCore {
	bool distinct = false;
	ExprPtr top; // SQL Server TOP n
	std::vector<SelectItem> items;
	std::vector<TableRefPtr> from;
	ExprPtr where;
	std::vector<ExprPtr> group_by;
	ExprPtr having;
};

enum class SetOpKind : uint8_t { UNION_DISTINCT, UNION_ALL, INTERSECT, EXCEPT };

struct SetOperation {
	SetOpKind op;
	std::unique_ptr<SelectCore> core;
};

struct CommonTableExpr {
	std::string name;
	std::vector<std::string> columns;
	std::unique_ptr<SelectStatement> statement;
};

enum class LimitKind : uint8_t { NONE, LIMIT, FETCH_FIRST, OFFSET_FETCH };

struct LimitClause {
	LimitKind kind = LimitKind::NONE;
	ExprPtr row_count; // may be null for bare OFFSET
	ExprPtr offset;
};

struct SelectStatement {
	std::vector<CommonTableExpr> ctes;
	std::unique_ptr<SelectCore> core;
	std::vector<SetOperation> set_ops;
	std::vector<OrderItem> order_by;
	LimitClause limit;

	void render(std::string &out) const;
	std::string to_string() const {
		std::string s;
		render(s);
		return s;
	}
};

using StatementPtr = std::unique_ptr<SelectStatement>;

// Depth-first traversal over every expression in the statement, including
// expressions nested in subqueries, CTEs and set-operation branches.
void walk_expressions(const SelectStatement &stmt, const std::function<void(const Expression &)> &fn);
void walk_expressions(const Expression &expr, const std::function<void(const Expression &)> &fn);

// Every select core in the statement (main, set-op branches, subqueries, CTEs).
void walk_cores(const SelectStatement &stmt, const std::function<void(const SelectCore &)> &fn);

// Every statement node (the statement itself plus nested subquery statements).
void walk_statements(const SelectStatement &stmt, const std::function<void(const SelectStatement &)> &fn);

bool structurally_equal(const SelectStatement &a, const SelectStatement &b);

} // namespace dial
