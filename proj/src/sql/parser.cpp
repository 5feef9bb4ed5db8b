#include "dial/sql/parser.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <array>
#include <cctype>

namespace dial {

const DialectProfile &profile_for(DialectId dialect) {
	static const std::array<DialectProfile, DIALECT_COUNT> PROFILES = {{
	    // sqlite: LIMIT only, tolerant quoting
	    {DialectId::SQLITE, true, false, false, true, true},
	    // mysql: LIMIT + backticks
	    {DialectId::MYSQL, true, false, false, true, false},
	    // postgresql: LIMIT and FETCH
	    {DialectId::POSTGRESQL, true, true, false, false, false},
	    // sqlserver: TOP and OFFSET/FETCH, bracket quoting
	    {DialectId::SQLSERVER, false, true, true, false, true},
	    // duckdb: LIMIT and FETCH
	    {DialectId::DUCKDB, true, true, false, false, false},
	    // oracle: FETCH FIRST only
	    {DialectId::ORACLE, false, true, false, false, false},
	}};
	return PROFILES[static_cast<size_t>(dialect)];
}

const std::set<std::string> &aggregate_function_names() {
	static const std::set<std::string> NAMES = {
	    "COUNT", "SUM", "AVG", "MIN", "MAX", "TOTAL", "GROUP_CONCAT", "LISTAGG", "STRING_AGG",
	};
	return NAMES;
}

namespace {

enum class TokenType : uint8_t { IDENT, QIDENT, STRING, NUMBER, OPERATOR, PARAM, END };

struct Token {
	TokenType type = TokenType::END;
	std::string text;
	QuoteStyle quote = QuoteStyle::NONE;
	ParamStyle pstyle = ParamStyle::QMARK;
	size_t pos = 0;
};

class Lexer {
public:
	Lexer(const std::string &sql, const DialectProfile &profile) : sql(sql), profile(profile) {
		tokenize();
	}

	std::vector<Token> tokens;

private:
	const std::string &sql;
	const DialectProfile &profile;
	size_t pos = 0;

	[[noreturn]] void fail(const std::string &msg) {
		throw ParseException(msg, pos);
	}

	void skip_space() {
		while (pos < sql.size()) {
			char c = sql[pos];
			if (std::isspace(static_cast<unsigned char>(c))) {
				pos++;
			} else if (c == '-' && pos + 1 < sql.size() && sql[pos + 1] == '-') {
				while (pos < sql.size() && sql[pos] != '\n') {
					pos++;
				}
			} else if (c == '/' && pos + 1 < sql.size() && sql[pos + 1] == '*') {
				pos += 2;
				while (pos + 1 < sql.size() && !(sql[pos] == '*' && sql[pos + 1] == '/')) {
					pos++;
				}
				if (pos + 1 >= sql.size()) {
					fail("unterminated block comment");
				}
				pos += 2;
			} else {
				break;
			}
		}
	}

	void push(TokenType type, std::string text, size_t at, QuoteStyle quote = QuoteStyle::NONE,
	          ParamStyle pstyle = ParamStyle::QMARK) {
		Token t;
		t.type = type;
		t.text = std::move(text);
		t.quote = quote;
		t.pstyle = pstyle;
		t.pos = at;
		tokens.push_back(std::move(t));
	}

	void tokenize() {
		while (true) {
			skip_space();
			if (pos >= sql.size()) {
				break;
			}
			size_t at = pos;
			char c = sql[pos];
			if (c == '\'') {
				pos++;
				std::string body;
				while (pos < sql.size()) {
					if (sql[pos] == '\'') {
						if (pos + 1 < sql.size() && sql[pos + 1] == '\'') {
							body += '\'';
							pos += 2;
							continue;
						}
						break;
					}
					body += sql[pos];
					pos++;
				}
				if (pos >= sql.size()) {
					fail("unterminated string literal");
				}
				pos++;
				push(TokenType::STRING, body, at);
				continue;
			}
			if (c == '"') {
				pos++;
				std::string body;
				while (pos < sql.size() && sql[pos] != '"') {
					body += sql[pos];
					pos++;
				}
				if (pos >= sql.size()) {
					fail("unterminated quoted identifier");
				}
				pos++;
				push(TokenType::QIDENT, body, at, QuoteStyle::DOUBLE);
				continue;
			}
			if (c == '`') {
				if (!profile.allow_backtick) {
					fail("backtick-quoted identifiers are not valid in " + dialect_name(profile.dialect));
				}
				pos++;
				std::string body;
				while (pos < sql.size() && sql[pos] != '`') {
					body += sql[pos];
					pos++;
				}
				if (pos >= sql.size()) {
					fail("unterminated backtick identifier");
				}
				pos++;
				push(TokenType::QIDENT, body, at, QuoteStyle::BACKTICK);
				continue;
			}
			if (c == '[') {
				if (!profile.allow_bracket) {
					fail("bracket-quoted identifiers are not valid in " + dialect_name(profile.dialect));
				}
				pos++;
				std::string body;
				while (pos < sql.size() && sql[pos] != ']') {
					body += sql[pos];
					pos++;
				}
				if (pos >= sql.size()) {
					fail("unterminated bracket identifier");
				}
				pos++;
				push(TokenType::QIDENT, body, at, QuoteStyle::BRACKET);
				continue;
			}
			if (std::isdigit(static_cast<unsigned char>(c)) ||
			    (c == '.' && pos + 1 < sql.size() && std::isdigit(static_cast<unsigned char>(sql[pos + 1])))) {
				std::string num;
				bool seen_dot = false;
				bool seen_exp = false;
				while (pos < sql.size()) {
					char d = sql[pos];
					if (std::isdigit(static_cast<unsigned char>(d))) {
						num += d;
						pos++;
					} else if (d == '.' && !seen_dot && !seen_exp) {
						seen_dot = true;
						num += d;
						pos++;
					} else if ((d == 'e' || d == 'E') && !seen_exp && pos + 1 < sql.size() &&
					           (std::isdigit(static_cast<unsigned char>(sql[pos + 1])) || sql[pos + 1] == '-' ||
					            sql[pos + 1] == '+')) {
						seen_exp = true;
						num += d;
						pos++;
						if (sql[pos] == '-' || sql[pos] == '+') {
							num += sql[pos];
							pos++;
						}
					} else {
						break;
					}
				}
				push(TokenType::NUMBER, num, at);
				continue;
			}
			if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
				std::string word;
				while (pos < sql.size() &&
				       (std::isalnum(static_cast<unsigned char>(sql[pos])) || sql[pos] == '_')) {
					word += sql[pos];
					pos++;
				}
				push(TokenType::IDENT, word, at);
				continue;
			}
			if (c == '%' && pos + 1 < sql.size() && sql[pos + 1] == '(') {
				// pyformat ORM binding %(name)s
				size_t p = pos + 2;
				std::string name;
				while (p < sql.size() && sql[p] != ')') {
					name += sql[p];
					p++;
				}
				if (p + 1 < sql.size() && sql[p] == ')' && sql[p + 1] == 's') {
					pos = p + 2;
					push(TokenType::PARAM, name, at, QuoteStyle::NONE, ParamStyle::PYFORMAT);
					continue;
				}
				pos++;
				push(TokenType::OPERATOR, "%", at);
				continue;
			}
			if (c == ':' && pos + 1 < sql.size() &&
			    (std::isalpha(static_cast<unsigned char>(sql[pos + 1])) || sql[pos + 1] == '_')) {
				pos++;
				std::string name;
				while (pos < sql.size() &&
				       (std::isalnum(static_cast<unsigned char>(sql[pos])) || sql[pos] == '_')) {
					name += sql[pos];
					pos++;
				}
				push(TokenType::PARAM, name, at, QuoteStyle::NONE, ParamStyle::NAMED);
				continue;
			}
			if (c == '$' && pos + 1 < sql.size() && std::isdigit(static_cast<unsigned char>(sql[pos + 1]))) {
				pos++;
				std::string name;
				while (pos < sql.size() && std::isdigit(static_cast<unsigned char>(sql[pos]))) {
					name += sql[pos];
					pos++;
				}
				push(TokenType::PARAM, name, at, QuoteStyle::NONE, ParamStyle::DOLLAR);
				continue;
			}
			if (c == '?') {
				pos++;
				push(TokenType::PARAM, "", at, QuoteStyle::NONE, ParamStyle::QMARK);
				continue;
			}
			// multi-char operators
			static const char *TWO_CHAR[] = {"<>", "!=", "<=", ">=", "||"};
			bool matched = false;
			for (auto *op : TWO_CHAR) {
				if (sql.compare(pos, 2, op) == 0) {
					push(TokenType::OPERATOR, op, at);
					pos += 2;
					matched = true;
					break;
				}
			}
			if (matched) {
				continue;
			}
			static const std::string ONE_CHAR = "()+-*/%=<>,.;";
			if (ONE_CHAR.find(c) != std::string::npos) {
				push(TokenType::OPERATOR, std::string(1, c), at);
				pos++;
				continue;
			}
			fail(std::string("unexpected character '") + c + "'");
		}
		push(TokenType::END, "", pos);
	}
};

const std::set<std::string> RESERVED_NO_ALIAS = {
    "FROM",  "WHERE",  "GROUP",     "ORDER",  "HAVING", "LIMIT", "UNION", "INTERSECT",
    "EXCEPT", "ON",    "JOIN",      "INNER",  "LEFT",   "RIGHT", "FULL",  "CROSS",
    "AS",    "AND",    "OR",        "NOT",    "FETCH",  "OFFSET", "WITHIN", "USING",
    "WHEN",  "THEN",   "ELSE",      "END",    "CASE",   "SELECT", "WITH",  "BY",
    "ASC",   "DESC",   "NULLS",     "IN",     "IS",     "BETWEEN", "LIKE", "EXISTS",
    "DISTINCT", "ALL", "TOP",
};

class Parser {
public:
	Parser(const std::string &sql, const DialectProfile &profile)
	    : profile(profile), lexer(sql, profile) {
	}

	StatementPtr parse() {
		auto stmt = parse_statement();
		if (is_op(";")) {
			advance();
		}
		if (peek().type != TokenType::END) {
			fail("unexpected trailing input near '" + peek().text + "'");
		}
		return stmt;
	}

private:
	const DialectProfile &profile;
	Lexer lexer;
	size_t idx = 0;
	size_t depth = 0;

	// nesting cap for expressions/statements; real engines enforce similar
	static constexpr size_t MAX_DEPTH = 200;

	struct DepthGuard {
		explicit DepthGuard(Parser &parser) : parser(parser) {
			if (++parser.depth > MAX_DEPTH) {
				throw ParseException("expression nesting exceeds the supported depth",
				                     parser.peek().pos);
			}
		}
		~DepthGuard() {
			parser.depth--;
		}
		Parser &parser;
	};

	const Token &peek(size_t ahead = 0) const {
		size_t i = idx + ahead;
		if (i >= lexer.tokens.size()) {
			return lexer.tokens.back();
		}
		return lexer.tokens[i];
	}

	const Token &advance() {
		const Token &t = peek();
		if (idx < lexer.tokens.size() - 1) {
			idx++;
		}
		return t;
	}

	[[noreturn]] void fail(const std::string &msg) const {
		throw ParseException(msg, peek().pos);
	}

	bool is_keyword(const std::string &kw, size_t ahead = 0) const {
		const Token &t = peek(ahead);
		return t.type == TokenType::IDENT && iequals(t.text, kw);
	}

	bool match_keyword(const std::string &kw) {
		if (is_keyword(kw)) {
			advance();
			return true;
		}
		return false;
	}

	void expect_keyword(const std::string &kw) {
		if (!match_keyword(kw)) {
			fail("expected " + kw + " near '" + peek().text + "'");
		}
	}

	bool is_op(const std::string &op, size_t ahead = 0) const {
		const Token &t = peek(ahead);
		return t.type == TokenType::OPERATOR && t.text == op;
	}

	bool match_op(const std::string &op) {
		if (is_op(op)) {
			advance();
			return true;
		}
		return false;
	}

	void expect_op(const std::string &op) {
		if (!match_op(op)) {
			fail("expected '" + op + "' near '" + peek().text + "'");
		}
	}

	// ----- statements -----

	StatementPtr parse_statement() {
		DepthGuard guard(*this);
		auto stmt = std::make_unique<SelectStatement>();
		if (match_keyword("WITH")) {
			while (true) {
				CommonTableExpr cte;
				cte.name = expect_identifier("CTE name");
				if (match_op("(")) {
					while (true) {
						cte.columns.push_back(expect_identifier("CTE column"));
						if (!match_op(",")) {
							break;
						}
					}
					expect_op(")");
				}
				expect_keyword("AS");
				expect_op("(");
				cte.statement = parse_statement();
				expect_op(")");
				stmt->ctes.push_back(std::move(cte));
				if (!match_op(",")) {
					break;
				}
			}
		}
		stmt->core = parse_core();
		while (true) {
			SetOpKind op;
			if (is_keyword("UNION")) {
				advance();
				op = match_keyword("ALL") ? SetOpKind::UNION_ALL : SetOpKind::UNION_DISTINCT;
			} else if (is_keyword("INTERSECT")) {
				advance();
				op = SetOpKind::INTERSECT;
			} else if (is_keyword("EXCEPT")) {
				advance();
				op = SetOpKind::EXCEPT;
			} else {
				break;
			}
			SetOperation so;
			so.op = op;
			so.core = parse_core();
			stmt->set_ops.push_back(std::move(so));
		}
		if (is_keyword("ORDER")) {
			advance();
			expect_keyword("BY");
			stmt->order_by = parse_order_items();
		}
		parse_limit_clause(*stmt);
		return stmt;
	}

	void parse_limit_clause(SelectStatement &stmt) {
		if (is_keyword("LIMIT")) {
			if (!profile.allow_limit) {
				fail("LIMIT clause is not valid in " + dialect_name(profile.dialect));
			}
			advance();
			stmt.limit.kind = LimitKind::LIMIT;
			stmt.limit.row_count = parse_expr();
			if (match_keyword("OFFSET")) {
				stmt.limit.offset = parse_expr();
			}
			return;
		}
		if (is_keyword("OFFSET")) {
			if (!profile.allow_fetch) {
				fail("OFFSET ... ROWS is not valid in " + dialect_name(profile.dialect));
			}
			advance();
			stmt.limit.kind = LimitKind::OFFSET_FETCH;
			stmt.limit.offset = parse_expr();
			if (!match_keyword("ROWS")) {
				match_keyword("ROW");
			}
			if (is_keyword("FETCH")) {
				advance();
				if (!match_keyword("NEXT")) {
					expect_keyword("FIRST");
				}
				stmt.limit.row_count = parse_expr();
				if (!match_keyword("ROWS")) {
					match_keyword("ROW");
				}
				expect_keyword("ONLY");
			}
			return;
		}
		if (is_keyword("FETCH")) {
			if (!profile.allow_fetch) {
				fail("FETCH FIRST is not valid in " + dialect_name(profile.dialect));
			}
			advance();
			if (!match_keyword("FIRST")) {
				expect_keyword("NEXT");
			}
			stmt.limit.kind = LimitKind::FETCH_FIRST;
			stmt.limit.row_count = parse_expr();
			if (!match_keyword("ROWS")) {
				match_keyword("ROW");
			}
			expect_keyword("ONLY");
			return;
		}
	}

	std::unique_ptr<SelectCore> parse_core() {
		expect_keyword("SELECT");
		auto core = std::make_unique<SelectCore>();
		if (match_keyword("DISTINCT")) {
			core->distinct = true;
		} else {
			match_keyword("ALL");
		}
		if (is_keyword("TOP")) {
			if (!profile.allow_top) {
				fail("TOP clause is not valid in " + dialect_name(profile.dialect));
			}
			advance();
			core->top = parse_primary();
		}
		while (true) {
			core->items.push_back(parse_select_item());
			if (!match_op(",")) {
				break;
			}
		}
		if (match_keyword("FROM")) {
			while (true) {
				core->from.push_back(parse_table_ref());
				if (!match_op(",")) {
					break;
				}
			}
		}
		if (match_keyword("WHERE")) {
			core->where = parse_expr();
		}
		if (is_keyword("GROUP")) {
			advance();
			expect_keyword("BY");
			while (true) {
				core->group_by.push_back(parse_expr());
				if (!match_op(",")) {
					break;
				}
			}
		}
		if (match_keyword("HAVING")) {
			core->having = parse_expr();
		}
		return core;
	}

	SelectItem parse_select_item() {
		SelectItem item;
		if (is_op("*")) {
			advance();
			item.expr = std::make_unique<StarExpr>();
			return item;
		}
		if (peek().type == TokenType::IDENT && is_op(".", 1) && is_op("*", 2)) {
			auto star = std::make_unique<StarExpr>();
			star->table = advance().text;
			advance();
			advance();
			item.expr = std::move(star);
			return item;
		}
		item.expr = parse_expr();
		if (match_keyword("AS")) {
			item.alias = expect_identifier("alias");
			item.alias_with_as = true;
		} else if (peek().type == TokenType::IDENT &&
		           !RESERVED_NO_ALIAS.count(to_upper(peek().text))) {
			item.alias = advance().text;
		} else if (peek().type == TokenType::QIDENT) {
			item.alias = advance().text;
		}
		return item;
	}

	std::string expect_identifier(const std::string &what) {
		const Token &t = peek();
		if (t.type == TokenType::IDENT || t.type == TokenType::QIDENT) {
			return advance().text;
		}
		fail("expected " + what + " near '" + t.text + "'");
	}

	TableRefPtr parse_table_ref() {
		TableRefPtr left = parse_table_primary();
		while (true) {
			JoinType jt;
			if (is_keyword("JOIN")) {
				jt = JoinType::INNER;
				advance();
			} else if (is_keyword("INNER") && is_keyword("JOIN", 1)) {
				jt = JoinType::INNER;
				advance();
				advance();
			} else if (is_keyword("LEFT")) {
				jt = JoinType::LEFT;
				advance();
				match_keyword("OUTER");
				expect_keyword("JOIN");
			} else if (is_keyword("RIGHT")) {
				jt = JoinType::RIGHT;
				advance();
				match_keyword("OUTER");
				expect_keyword("JOIN");
			} else if (is_keyword("FULL")) {
				jt = JoinType::FULL;
				advance();
				match_keyword("OUTER");
				expect_keyword("JOIN");
			} else if (is_keyword("CROSS") && is_keyword("JOIN", 1)) {
				jt = JoinType::CROSS;
				advance();
				advance();
			} else {
				break;
			}
			auto join = std::make_unique<JoinRef>();
			join->join_type = jt;
			join->left = std::move(left);
			join->right = parse_table_primary();
			if (jt != JoinType::CROSS) {
				if (match_keyword("ON")) {
					join->condition = parse_expr();
				} else if (match_keyword("USING")) {
					expect_op("(");
					while (true) {
						join->using_cols.push_back(expect_identifier("USING column"));
						if (!match_op(",")) {
							break;
						}
					}
					expect_op(")");
				}
			}
			left = std::move(join);
		}
		return left;
	}

	TableRefPtr parse_table_primary() {
		if (is_op("(")) {
			advance();
			auto derived = std::make_unique<DerivedTableRef>();
			derived->statement = parse_statement();
			expect_op(")");
			if (match_keyword("AS")) {
				derived->alias = expect_identifier("derived table alias");
				derived->alias_with_as = true;
			} else if ((peek().type == TokenType::IDENT &&
			            !RESERVED_NO_ALIAS.count(to_upper(peek().text))) ||
			           peek().type == TokenType::QIDENT) {
				derived->alias = advance().text;
			}
			return derived;
		}
		const Token &t = peek();
		if (t.type != TokenType::IDENT && t.type != TokenType::QIDENT) {
			fail("expected table reference near '" + t.text + "'");
		}
		auto base = std::make_unique<BaseTableRef>();
		base->quote = t.quote;
		base->table = advance().text;
		if (match_keyword("AS")) {
			base->alias = expect_identifier("table alias");
			base->alias_with_as = true;
		} else if ((peek().type == TokenType::IDENT &&
		            !RESERVED_NO_ALIAS.count(to_upper(peek().text))) ||
		           peek().type == TokenType::QIDENT) {
			base->alias = advance().text;
		}
		return base;
	}

	std::vector<OrderItem> parse_order_items() {
		std::vector<OrderItem> items;
		while (true) {
			OrderItem item;
			item.expr = parse_expr();
			if (match_keyword("ASC")) {
				item.direction = 1;
			} else if (match_keyword("DESC")) {
				item.direction = -1;
			}
			if (is_keyword("NULLS")) {
				advance();
				if (match_keyword("FIRST")) {
					item.nulls_order = 1;
				} else {
					expect_keyword("LAST");
					item.nulls_order = -1;
				}
			}
			items.push_back(std::move(item));
			if (!match_op(",")) {
				break;
			}
		}
		return items;
	}

	// ----- expressions -----

	ExprPtr parse_expr() {
		DepthGuard guard(*this);
		return parse_or();
	}

	ExprPtr parse_or() {
		auto left = parse_and();
		while (is_keyword("OR")) {
			advance();
			left = std::make_unique<BinaryExpr>("OR", std::move(left), parse_and());
		}
		return left;
	}

	ExprPtr parse_and() {
		auto left = parse_not();
		while (is_keyword("AND")) {
			advance();
			left = std::make_unique<BinaryExpr>("AND", std::move(left), parse_not());
		}
		return left;
	}

	ExprPtr parse_not() {
		if (is_keyword("NOT") && !is_keyword("EXISTS", 1)) {
			advance();
			return std::make_unique<UnaryExpr>("NOT", parse_not());
		}
		return parse_predicate();
	}

	ExprPtr parse_predicate() {
		auto left = parse_additive();
		// IS [NOT] NULL
		if (is_keyword("IS")) {
			advance();
			auto is_null = std::make_unique<IsNullExpr>();
			is_null->negated = match_keyword("NOT");
			expect_keyword("NULL");
			is_null->operand = std::move(left);
			return is_null;
		}
		bool negated = false;
		if (is_keyword("NOT") && (is_keyword("IN", 1) || is_keyword("BETWEEN", 1) || is_keyword("LIKE", 1))) {
			advance();
			negated = true;
		}
		if (is_keyword("IN")) {
			advance();
			auto in = std::make_unique<InExpr>();
			in->operand = std::move(left);
			in->negated = negated;
			expect_op("(");
			if (is_keyword("SELECT") || is_keyword("WITH")) {
				in->subquery = parse_statement();
			} else {
				while (true) {
					in->list.push_back(parse_expr());
					if (!match_op(",")) {
						break;
					}
				}
			}
			expect_op(")");
			return in;
		}
		if (is_keyword("BETWEEN")) {
			advance();
			auto between = std::make_unique<BetweenExpr>();
			between->operand = std::move(left);
			between->negated = negated;
			between->low = parse_additive();
			expect_keyword("AND");
			between->high = parse_additive();
			return between;
		}
		if (is_keyword("LIKE")) {
			advance();
			return std::make_unique<BinaryExpr>(negated ? "NOT LIKE" : "LIKE", std::move(left),
			                                    parse_additive());
		}
		static const char *COMPARISONS[] = {"=", "<>", "!=", "<=", ">=", "<", ">"};
		for (auto *op : COMPARISONS) {
			if (is_op(op)) {
				advance();
				return std::make_unique<BinaryExpr>(op, std::move(left), parse_additive());
			}
		}
		return left;
	}

	ExprPtr parse_additive() {
		auto left = parse_multiplicative();
		while (is_op("+") || is_op("-") || is_op("||")) {
			std::string op = advance().text;
			left = std::make_unique<BinaryExpr>(op, std::move(left), parse_multiplicative());
		}
		return left;
	}

	ExprPtr parse_multiplicative() {
		auto left = parse_unary();
		while (is_op("*") || is_op("/") || is_op("%")) {
			std::string op = advance().text;
			left = std::make_unique<BinaryExpr>(op, std::move(left), parse_unary());
		}
		return left;
	}

	ExprPtr parse_unary() {
		if (is_op("-") || is_op("+")) {
			std::string op = advance().text;
			return std::make_unique<UnaryExpr>(op, parse_unary());
		}
		return parse_primary();
	}

	ExprPtr parse_primary() {
		const Token &t = peek();
		switch (t.type) {
		case TokenType::NUMBER:
			advance();
			return std::make_unique<ConstantExpr>(ConstantKind::NUMBER, t.text);
		case TokenType::STRING:
			advance();
			return std::make_unique<ConstantExpr>(ConstantKind::STRING, t.text);
		case TokenType::PARAM: {
			advance();
			return std::make_unique<ParamExpr>(t.pstyle, t.text);
		}
		case TokenType::QIDENT:
			return parse_column_ref();
		case TokenType::IDENT:
			break;
		case TokenType::OPERATOR:
			if (t.text == "(") {
				advance();
				if (is_keyword("SELECT") || is_keyword("WITH")) {
					auto sub = std::make_unique<SubqueryExpr>();
					sub->statement = parse_statement();
					expect_op(")");
					return sub;
				}
				auto inner = parse_expr();
				expect_op(")");
				return inner;
			}
			if (t.text == "*") {
				advance();
				return std::make_unique<StarExpr>();
			}
			fail("unexpected token '" + t.text + "'");
		case TokenType::END:
			fail("unexpected end of input");
		}

		// keyword-led expression forms
		if (is_keyword("NULL")) {
			advance();
			return std::make_unique<ConstantExpr>(ConstantKind::NULL_VALUE, "NULL");
		}
		if (is_keyword("TRUE") || is_keyword("FALSE")) {
			std::string text = to_upper(advance().text);
			return std::make_unique<ConstantExpr>(ConstantKind::BOOLEAN, text);
		}
		if (is_keyword("CASE")) {
			return parse_case();
		}
		if (is_keyword("CAST") && is_op("(", 1)) {
			advance();
			advance();
			auto operand = parse_expr();
			expect_keyword("AS");
			std::string type = parse_type_name();
			expect_op(")");
			return std::make_unique<CastExpr>(std::move(operand), type);
		}
		if (is_keyword("EXTRACT") && is_op("(", 1)) {
			advance();
			advance();
			std::string field = to_upper(expect_identifier("EXTRACT field"));
			expect_keyword("FROM");
			auto source = parse_expr();
			expect_op(")");
			return std::make_unique<ExtractExpr>(field, std::move(source));
		}
		if (is_keyword("EXISTS") && is_op("(", 1)) {
			advance();
			advance();
			auto exists = std::make_unique<ExistsExpr>();
			exists->statement = parse_statement();
			expect_op(")");
			return exists;
		}
		if (is_keyword("NOT") && is_keyword("EXISTS", 1)) {
			advance();
			advance();
			expect_op("(");
			auto exists = std::make_unique<ExistsExpr>();
			exists->negated = true;
			exists->statement = parse_statement();
			expect_op(")");
			return exists;
		}
		if (is_op("(", 1)) {
			return parse_function_call();
		}
		return parse_column_ref();
	}

	ExprPtr parse_case() {
		expect_keyword("CASE");
		auto expr = std::make_unique<CaseExpr>();
		if (!is_keyword("WHEN")) {
			expr->operand = parse_expr();
		}
		while (is_keyword("WHEN")) {
			advance();
			CaseWhenClause clause;
			clause.when = parse_expr();
			expect_keyword("THEN");
			clause.then = parse_expr();
			expr->clauses.push_back(std::move(clause));
		}
		if (match_keyword("ELSE")) {
			expr->else_expr = parse_expr();
		}
		expect_keyword("END");
		if (expr->clauses.empty()) {
			fail("CASE expression without WHEN clause");
		}
		return expr;
	}

	std::string parse_type_name() {
		std::string type = to_upper(expect_identifier("type name"));
		// multi-word types (DOUBLE PRECISION, CHARACTER VARYING, ...)
		while (peek().type == TokenType::IDENT && !is_op("(", 1) &&
		       !RESERVED_NO_ALIAS.count(to_upper(peek().text))) {
			type += " " + to_upper(advance().text);
		}
		if (match_op("(")) {
			type += "(";
			bool first = true;
			while (!is_op(")")) {
				if (!first) {
					expect_op(",");
					type += ",";
				}
				type += advance().text;
				first = false;
			}
			expect_op(")");
			type += ")";
		}
		return type;
	}

	ExprPtr parse_function_call() {
		auto fn = std::make_unique<FunctionExpr>();
		fn->name = to_upper(expect_identifier("function name"));
		expect_op("(");
		if (match_keyword("DISTINCT")) {
			fn->distinct_arg = true;
		}
		if (is_op("*")) {
			advance();
			fn->star_arg = true;
		} else if (!is_op(")")) {
			while (true) {
				fn->args.push_back(parse_expr());
				if (!match_op(",")) {
					break;
				}
			}
		}
		expect_op(")");
		if (is_keyword("WITHIN")) {
			advance();
			expect_keyword("GROUP");
			expect_op("(");
			expect_keyword("ORDER");
			expect_keyword("BY");
			fn->within_group = parse_order_items();
			expect_op(")");
		}
		if (is_keyword("OVER") && is_op("(", 1)) {
			advance();
			advance();
			fn->over = std::make_unique<WindowSpec>();
			if (is_keyword("PARTITION")) {
				advance();
				expect_keyword("BY");
				while (true) {
					fn->over->partition_by.push_back(parse_expr());
					if (!match_op(",")) {
						break;
					}
				}
			}
			if (is_keyword("ORDER")) {
				advance();
				expect_keyword("BY");
				fn->over->order_by = parse_order_items();
			}
			expect_op(")");
		}
		return fn;
	}

	ExprPtr parse_column_ref() {
		const Token &t = peek();
		if (t.type != TokenType::IDENT && t.type != TokenType::QIDENT) {
			fail("expected expression near '" + t.text + "'");
		}
		auto col = std::make_unique<ColumnRefExpr>();
		std::string first = t.text;
		QuoteStyle first_quote = t.quote;
		advance();
		if (is_op(".")) {
			advance();
			const Token &second = peek();
			if (second.type != TokenType::IDENT && second.type != TokenType::QIDENT) {
				fail("expected column name after '.'");
			}
			col->table = first;
			col->column = second.text;
			col->quote = second.quote;
			advance();
		} else {
			col->column = first;
			col->quote = first_quote;
		}
		return col;
	}
};

} // namespace

StatementPtr parse_select(const std::string &sql, const DialectProfile &profile) {
	if (trim(sql).empty()) {
		throw ParseException("empty SQL text", 0);
	}
	Parser parser(sql, profile);
	return parser.parse();
}

} // namespace dial
