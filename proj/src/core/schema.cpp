#include "dial/core/schema.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <set>

namespace dial {

using nlohmann::json;

const TableDef *SchemaCatalog::find_table(const std::string &name) const {
	for (auto &t : tables) {
		if (iequals(t.name, name)) {
			return &t;
		}
	}
	return nullptr;
}

const ColumnDef *SchemaCatalog::find_column(const std::string &table, const std::string &column) const {
	auto *t = find_table(table);
	if (!t) {
		return nullptr;
	}
	for (auto &c : t->columns) {
		if (iequals(c.name, column)) {
			return &c;
		}
	}
	return nullptr;
}

bool SchemaCatalog::has_column(const std::string &table, const std::string &column) const {
	return find_column(table, column) != nullptr;
}

std::string SchemaCatalog::to_json() const {
	json tables_j = json::array();
	for (auto &t : tables) {
		json cols = json::array();
		for (auto &c : t.columns) {
			cols.push_back({{"name", c.name}, {"type", c.physical_type}, {"samples", c.samples}});
		}
		tables_j.push_back({{"name", t.name}, {"columns", cols}});
	}
	return json {{"tables", tables_j}}.dump(2) + "\n";
}

SchemaCatalog SchemaCatalog::from_json(const std::string &text) {
	SchemaCatalog out;
	json j;
	try {
		j = json::parse(text);
	} catch (const json::exception &e) {
		throw ParseException(std::string("schema json: ") + e.what());
	}
	for (auto &tj : j.at("tables")) {
		TableDef t;
		t.name = tj.at("name").get<std::string>();
		for (auto &cj : tj.at("columns")) {
			ColumnDef c;
			c.name = cj.at("name").get<std::string>();
			c.physical_type = cj.at("type").get<std::string>();
			if (cj.contains("samples")) {
				c.samples = cj.at("samples").get<std::vector<std::string>>();
			}
			t.columns.push_back(std::move(c));
		}
		out.tables.push_back(std::move(t));
	}
	return out;
}

SchemaCatalog SchemaCatalog::load_file(const std::string &path) {
	return from_json(read_file(path));
}

std::string SchemaCatalog::describe() const {
	std::string out;
	for (auto &t : tables) {
		out += t.name + "(";
		for (size_t i = 0; i < t.columns.size(); i++) {
			if (i > 0) {
				out += ", ";
			}
			out += t.columns[i].name + " " + t.columns[i].physical_type;
			if (!t.columns[i].samples.empty()) {
				out += " [e.g.";
				size_t n = std::min(t.columns[i].samples.size(), MAX_SAMPLES_PER_COLUMN);
				for (size_t k = 0; k < n; k++) {
					out += std::string(k ? ", " : " ") + "'" + t.columns[i].samples[k] + "'";
				}
				out += "]";
			}
		}
		out += ")\n";
	}
	return out;
}

namespace {

struct DdlCursor {
	const std::string &text;
	size_t pos = 0;

	void skip_ws() {
		while (pos < text.size()) {
			char c = text[pos];
			if (std::isspace(static_cast<unsigned char>(c))) {
				pos++;
			} else if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '-') {
				while (pos < text.size() && text[pos] != '\n') {
					pos++;
				}
			} else {
				break;
			}
		}
	}

	bool eof() {
		skip_ws();
		return pos >= text.size();
	}

	bool match_keyword(const std::string &kw) {
		skip_ws();
		size_t p = pos;
		std::string got;
		while (p < text.size() &&
		       (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_')) {
			got.push_back(text[p]);
			p++;
		}
		if (iequals(got, kw)) {
			pos = p;
			return true;
		}
		return false;
	}

	std::string identifier() {
		skip_ws();
		if (pos >= text.size()) {
			throw ParseException("unexpected end of DDL", pos);
		}
		std::string out;
		char c = text[pos];
		if (c == '"' || c == '`') {
			char quote = c;
			pos++;
			while (pos < text.size() && text[pos] != quote) {
				out.push_back(text[pos]);
				pos++;
			}
			if (pos >= text.size()) {
				throw ParseException("unterminated quoted identifier", pos);
			}
			pos++;
			return out;
		}
		if (c == '[') {
			pos++;
			while (pos < text.size() && text[pos] != ']') {
				out.push_back(text[pos]);
				pos++;
			}
			if (pos >= text.size()) {
				throw ParseException("unterminated bracketed identifier", pos);
			}
			pos++;
			return out;
		}
		while (pos < text.size() &&
		       (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
			out.push_back(text[pos]);
			pos++;
		}
		if (out.empty()) {
			throw ParseException("expected identifier", pos);
		}
		return out;
	}

	bool peek_char(char c) {
		skip_ws();
		return pos < text.size() && text[pos] == c;
	}

	void expect_char(char c) {
		skip_ws();
		if (pos >= text.size() || text[pos] != c) {
			throw ParseException(std::string("expected '") + c + "'", pos);
		}
		pos++;
	}
};

const std::set<std::string> TABLE_CONSTRAINT_STARTERS = {
    "primary", "foreign", "unique", "check", "constraint", "key", "index",
};

// Column type plus trailing column constraints, up to a top-level ',' or ')'.
// Returns the type portion only (constraint keywords after the type tokens
// are dropped; parenthesized type args like DECIMAL(10,2) are kept).
std::string read_column_type(DdlCursor &cur) {
	cur.skip_ws();
	std::string type;
	int depth = 0;
	const std::set<std::string> CONSTRAINT_WORDS = {
	    "primary", "not", "null", "unique", "default", "references", "check",
	    "autoincrement", "auto_increment", "collate", "generated",
	};
	while (cur.pos < cur.text.size()) {
		char c = cur.text[cur.pos];
		if (depth == 0 && (c == ',' || c == ')')) {
			break;
		}
		if (c == '(') {
			depth++;
			type.push_back(c);
			cur.pos++;
			continue;
		}
		if (c == ')') {
			depth--;
			type.push_back(c);
			cur.pos++;
			continue;
		}
		if (depth == 0 && (std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
			std::string word = cur.identifier();
			if (!type.empty() && CONSTRAINT_WORDS.count(to_lower(word))) {
				// Constraint tail; consume until the top-level ',' or ')'.
				while (cur.pos < cur.text.size()) {
					char d = cur.text[cur.pos];
					if (depth == 0 && (d == ',' || d == ')')) {
						break;
					}
					if (d == '(') {
						depth++;
					}
					if (d == ')') {
						depth--;
					}
					if (d == '\'') {
						cur.pos++;
						while (cur.pos < cur.text.size() && cur.text[cur.pos] != '\'') {
							cur.pos++;
						}
					}
					cur.pos++;
				}
				break;
			}
			if (!type.empty()) {
				type += " ";
			}
			type += word;
			continue;
		}
		type.push_back(c);
		cur.pos++;
	}
	return trim(type);
}

} // namespace

SchemaCatalog parse_schema_ddl(const std::string &ddl,
                               const std::map<std::string, std::vector<std::string>> &samples) {
	SchemaCatalog catalog;
	DdlCursor cur {ddl};
	bool saw_create = false;

	while (!cur.eof()) {
		if (cur.peek_char(';')) {
			cur.pos++;
			continue;
		}
		if (!cur.match_keyword("create")) {
			throw ParseException("expected CREATE TABLE statement", cur.pos);
		}
		if (!cur.match_keyword("table")) {
			throw ParseException("only CREATE TABLE is supported", cur.pos);
		}
		// Optional IF NOT EXISTS.
		{
			size_t save = cur.pos;
			if (cur.match_keyword("if")) {
				if (!(cur.match_keyword("not") && cur.match_keyword("exists"))) {
					cur.pos = save;
				}
			}
		}
		TableDef table;
		table.name = cur.identifier();
		if (catalog.find_table(table.name)) {
			throw DuplicateObjectException(table.name);
		}
		cur.expect_char('(');
		while (true) {
			cur.skip_ws();
			size_t save = cur.pos;
			std::string first = cur.identifier();
			if (TABLE_CONSTRAINT_STARTERS.count(to_lower(first))) {
				// Table-level constraint; skip to the matching top-level boundary.
				cur.pos = save;
				int depth = 0;
				while (cur.pos < cur.text.size()) {
					char c = cur.text[cur.pos];
					if (depth == 0 && (c == ',' || c == ')')) {
						break;
					}
					if (c == '(') {
						depth++;
					}
					if (c == ')') {
						depth--;
					}
					cur.pos++;
				}
			} else {
				ColumnDef col;
				col.name = first;
				col.physical_type = read_column_type(cur);
				if (col.physical_type.empty()) {
					throw ParseException("column '" + col.name + "' has no type", cur.pos);
				}
				for (auto &existing : table.columns) {
					if (iequals(existing.name, col.name)) {
						throw DuplicateObjectException(table.name + "." + col.name);
					}
				}
				auto it = samples.find(table.name + "." + col.name);
				if (it != samples.end()) {
					col.samples = it->second;
					if (col.samples.size() > MAX_SAMPLES_PER_COLUMN) {
						col.samples.resize(MAX_SAMPLES_PER_COLUMN);
					}
				}
				table.columns.push_back(std::move(col));
			}
			if (cur.peek_char(',')) {
				cur.pos++;
				continue;
			}
			cur.expect_char(')');
			break;
		}
		if (table.columns.empty()) {
			throw ParseException("table '" + table.name + "' has no columns", cur.pos);
		}
		catalog.tables.push_back(std::move(table));
		saw_create = true;
		if (cur.peek_char(';')) {
			cur.pos++;
		}
	}
	if (!saw_create) {
		throw ParseException("DDL contains no CREATE TABLE statement", 0);
	}
	return catalog;
}

} // namespace dial
