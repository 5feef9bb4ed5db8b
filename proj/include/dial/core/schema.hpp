#pragma once

#include <map>
#include <string>
#include <vector>

namespace dial {

struct ColumnDef {
	std::string name;
	// Dialect type string preserved verbatim from the DDL.
	std::string physical_type;
	// Raw literal samples, at most 5 per column. Type interpretation happens
	// at planning time, not here.
	std::vector<std::string> samples;

	bool operator==(const ColumnDef &) const = default;
};

struct TableDef {
	std::string name;
	std::vector<ColumnDef> columns;

	bool operator==(const TableDef &) const = default;
};

struct SchemaCatalog {
	std::vector<TableDef> tables;

	bool operator==(const SchemaCatalog &) const = default;

	const TableDef *find_table(const std::string &name) const;
	const ColumnDef *find_column(const std::string &table, const std::string &column) const;
	bool has_column(const std::string &table, const std::string &column) const;

	std::string to_json() const;
	static SchemaCatalog from_json(const std::string &text);
	static SchemaCatalog load_file(const std::string &path);

	// Rendered form used in prompts: "table(col TYPE [e.g. 'sample'], ...)".
	std::string describe() const;
};

constexpr size_t MAX_SAMPLES_PER_COLUMN = 5;

// Parse a generic ANSI DDL subset: one or more CREATE TABLE statements with
// "name type [constraints]" column entries. Table-level constraint clauses
// (PRIMARY KEY, FOREIGN KEY, UNIQUE, CHECK, CONSTRAINT) are skipped.
// `samples` is keyed "table.column"; entries beyond 5 per column are dropped.
// Throws ParseException / DuplicateObjectException.
SchemaCatalog parse_schema_ddl(const std::string &ddl,
                               const std::map<std::string, std::vector<std::string>> &samples = {});

} // namespace dial
