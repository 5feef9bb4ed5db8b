#include <doctest.h>

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/exec/compare.hpp"
#include "dial/exec/rules.hpp"
#include "dial/exec/signature.hpp"
#include "dial/exec/simulator.hpp"
#include "dial/exec/sqlite_executor.hpp"
#include "support/table5_fixtures.hpp"

#include <filesystem>

using namespace dial;
using dial::testsupport::rule_pairs;

namespace {

DialectSimulator &simulator() {
	static DialectSimulator sim;
	return sim;
}

std::string rule_of(const ExecutionOutcome &outcome, const SqlText &sql) {
	REQUIRE_FALSE(outcome.success);
	// recover the rule id by re-scanning; parse errors have none
	try {
		if (auto v = simulator().first_violation(sql)) {
			return v->rule_id;
		}
	} catch (const ParseException &) {
		return "parse";
	}
	return "";
}

} // namespace

TEST_CASE("every catalog anti-pattern fails and every gold pattern passes") {
	for (auto &pair : rule_pairs()) {
		CAPTURE(pair.rule_id);
		SqlText anti {pair.anti_sql, pair.dialect};
		auto outcome = simulator().simulate(anti);
		CHECK_FALSE(outcome.success);
		if (!pair.parse_level) {
			CHECK(rule_of(outcome, anti) == pair.rule_id);
			CHECK(outcome.trace->failing_segment.has_value());
		}
		SqlText gold {pair.gold_sql, pair.dialect};
		auto gold_outcome = simulator().simulate(gold);
		CAPTURE(gold_outcome.trace ? gold_outcome.trace->message : "");
		CHECK(gold_outcome.success);
	}
}

TEST_CASE("simulate is deterministic and pure") {
	SqlText sql {"SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city", DialectId::ORACLE};
	auto first = simulator().simulate(sql);
	auto second = simulator().simulate(sql);
	CHECK(first == second);
}

TEST_CASE("oracle LIMIT is a parse-level error; compliant LISTAGG succeeds") {
	auto limit = simulator().simulate({"SELECT a FROM t LIMIT 10", DialectId::ORACLE});
	REQUIRE_FALSE(limit.success);
	CHECK(limit.trace->vendor_code == "ORA-00933");
	CHECK(limit.trace->message.find("syntax error") != std::string::npos);

	auto ok = simulator().simulate(
	    {"SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city",
	     DialectId::ORACLE});
	CHECK(ok.success);
	CHECK(ok.rows.has_value());
	CHECK(ok.rows->empty()); // validation only, no evaluation
}

TEST_CASE("first violation wins in rule_id order") {
	// triggers both M1 (3-arg CONCAT) and U1 (GROUP_CONCAT); M1 sorts first
	SqlText sql {"SELECT CONCAT(a, b, c), GROUP_CONCAT(ip) FROM t GROUP BY a, b, c",
	             DialectId::ORACLE};
	auto v = simulator().first_violation(sql);
	REQUIRE(v.has_value());
	CHECK(v->rule_id == "M1");
}

TEST_CASE("rules scope to their dialects") {
	// GROUP_CONCAT is fine on mysql/sqlite
	CHECK(simulator().simulate({"SELECT GROUP_CONCAT(ip) FROM t", DialectId::MYSQL}).success);
	CHECK(simulator().simulate({"SELECT GROUP_CONCAT(ip) FROM t", DialectId::SQLITE}).success);
	// SELECT without FROM only fails on oracle
	CHECK(simulator().simulate({"SELECT 1", DialectId::SQLITE}).success);
	CHECK_FALSE(simulator().simulate({"SELECT 1", DialectId::ORACLE}).success);
}

TEST_CASE("nested aggregate detector ignores legal shapes") {
	// windowed aggregate over grouped aggregate is legal
	CHECK(simulator()
	          .simulate({"SELECT SUM(SUM(x)) OVER (PARTITION BY y) FROM t GROUP BY y",
	                     DialectId::MYSQL})
	          .success);
	// aggregate over scalar subquery result is legal
	CHECK(simulator()
	          .simulate({"SELECT MAX(z) FROM t WHERE z = (SELECT AVG(x) FROM s)", DialectId::MYSQL})
	          .success);
}

TEST_CASE("rule catalog jsonl round trip preserves the catalog") {
	auto dir = std::filesystem::temp_directory_path() / "dial_rules_test";
	std::filesystem::create_directories(dir);
	auto path = (dir / "rules.jsonl").string();
	save_rule_catalog(default_rule_catalog(), path);
	auto loaded = load_rule_catalog(path);
	REQUIRE(loaded.size() == default_rule_catalog().size());
	CHECK(loaded.size() >= 16);
	for (size_t i = 0; i < loaded.size(); i++) {
		CHECK(loaded[i].rule_id == default_rule_catalog()[i].rule_id);
		CHECK(loaded[i].dialects == default_rule_catalog()[i].dialects);
		CHECK(loaded[i].detector_kind == default_rule_catalog()[i].detector_kind);
		CHECK(loaded[i].message_template == default_rule_catalog()[i].message_template);
	}
	// a malformed line is reported with its line number
	write_file(path, "{\"rule_id\": \"X\"\nnot json\n");
	try {
		load_rule_catalog(path);
		FAIL("expected CorruptRecordException");
	} catch (const CorruptRecordException &e) {
		CHECK(e.line_number == 1);
	}
}

// ---------------------------------------------------------------------------
// signature normalization
// ---------------------------------------------------------------------------

TEST_CASE("normalize_signature replaces literals, identifiers and numbers") {
	ErrorTrace trace;
	trace.message = "Unknown column 'users.nme'";
	auto sig = normalize_signature(trace, DialectId::MYSQL);
	CHECK(sig.template_text == "Unknown column " + PLACEHOLDER_LIT);
	CHECK_FALSE(sig.vendor_code.has_value());
}

TEST_CASE("normalize_signature extracts vendor codes") {
	ErrorTrace ora;
	ora.message = "ORA-00904: \"YEAR\": invalid identifier";
	auto sig = normalize_signature(ora, DialectId::ORACLE);
	REQUIRE(sig.vendor_code.has_value());
	CHECK(*sig.vendor_code == "ORA-00904");
	CHECK(sig.template_text == PLACEHOLDER_ID + ": invalid identifier");

	ErrorTrace my;
	my.message = "ERROR 1241 (21000): Operand should contain 1 column(s)";
	auto sig2 = normalize_signature(my, DialectId::MYSQL);
	REQUIRE(sig2.vendor_code.has_value());
	CHECK(*sig2.vendor_code == "1241");
	CHECK(sig2.template_text == "Operand should contain " + PLACEHOLDER_NUM + " column(s)");
}

TEST_CASE("normalize_signature is idempotent") {
	ErrorTrace trace;
	trace.message = "ORA-00904: \"YEAR\": invalid identifier near 'x' at line 12";
	auto once = normalize_signature(trace, DialectId::ORACLE);
	ErrorTrace again;
	again.message = once.template_text;
	again.vendor_code = once.vendor_code;
	auto twice = normalize_signature(again, DialectId::ORACLE);
	CHECK(twice.template_text == once.template_text);
	CHECK(twice.vendor_code == once.vendor_code);
}

TEST_CASE("glob matching over signature keys") {
	CHECK(glob_match("*ora-00904*invalid identifier*",
	                 "[ORA-00904] " + PLACEHOLDER_ID + ": invalid identifier"));
	CHECK(glob_match("*1241*", "[1241] Operand should contain " + PLACEHOLDER_NUM + " column(s)"));
	CHECK_FALSE(glob_match("*1241*", "[1111] invalid use of group function"));
}

// ---------------------------------------------------------------------------
// embedded engine
// ---------------------------------------------------------------------------

TEST_CASE("embedded sqlite executes and maps errors") {
	SqliteExecutor executor;
	auto one = executor.execute({"SELECT 1", DialectId::SQLITE});
	REQUIRE(one.success);
	REQUIRE(one.rows.has_value());
	REQUIRE(one.rows->size() == 1);
	CHECK((*one.rows)[0][0].value == "1");

	auto bad = executor.execute({"SELEC nope", DialectId::SQLITE});
	REQUIRE_FALSE(bad.success);
	CHECK_FALSE(bad.trace->message.empty());
}

TEST_CASE("embedded sqlite returns seeded rows") {
	SqliteExecutor executor;
	executor.exec_script("CREATE TABLE t(a INT, b TEXT);"
	                     "INSERT INTO t VALUES (1,'x'), (2,'y'), (3, NULL);");
	auto rows = executor.execute({"SELECT a, b FROM t ORDER BY a", DialectId::SQLITE});
	REQUIRE(rows.success);
	REQUIRE(rows.rows->size() == 3);
	CHECK((*rows.rows)[2][1].is_null);
}

TEST_CASE("only sqlite has an embedded adapter") {
	CHECK_NOTHROW(make_embedded_executor(DialectId::SQLITE));
	CHECK_THROWS_AS(make_embedded_executor(DialectId::ORACLE), AdapterUnavailableException);
}

// ---------------------------------------------------------------------------
// result comparison
// ---------------------------------------------------------------------------

namespace {

RowTable rows_of(std::vector<std::vector<const char *>> values) {
	RowTable table;
	for (auto &row : values) {
		Row r;
		for (auto *v : row) {
			r.push_back(v ? Cell::of(v) : Cell::null());
		}
		table.push_back(std::move(r));
	}
	return table;
}

} // namespace

TEST_CASE("multiset vs ordered comparison") {
	auto a = rows_of({{"1"}, {"2"}});
	auto b = rows_of({{"2"}, {"1"}});
	CHECK(compare_result_sets(a, b, false));
	CHECK_FALSE(compare_result_sets(a, b, true));
}

TEST_CASE("numeric tolerance, nulls and trailing whitespace") {
	CHECK(compare_result_sets(rows_of({{"1.0000001"}}), rows_of({{"1.0"}}), true));
	CHECK_FALSE(compare_result_sets(rows_of({{"1.001"}}), rows_of({{"1.0"}}), true));
	CHECK(compare_result_sets(rows_of({{nullptr}}), rows_of({{nullptr}}), true));
	CHECK_FALSE(compare_result_sets(rows_of({{nullptr}}), rows_of({{"0"}}), true));
	CHECK(compare_result_sets(rows_of({{"abc  "}}), rows_of({{"abc"}}), true));
	CHECK_FALSE(compare_result_sets(rows_of({{"abc"}}), rows_of({{"abd"}}), true));
}

TEST_CASE("comparison is reflexive and symmetric in multiset mode") {
	auto a = rows_of({{"1", "x"}, {"2", "y"}, {"2", "y"}});
	auto b = rows_of({{"2", "y"}, {"1", "x"}, {"2", "y"}});
	CHECK(compare_result_sets(a, a, false));
	CHECK(compare_result_sets(a, b, false));
	CHECK(compare_result_sets(b, a, false));
	// duplicate multiplicity matters
	auto c = rows_of({{"1", "x"}, {"1", "x"}, {"2", "y"}});
	CHECK_FALSE(compare_result_sets(a, c, false));
}

TEST_CASE("the fixture battery covers every catalog rule") {
	std::set<std::string> covered;
	for (auto &pair : rule_pairs()) {
		covered.insert(pair.rule_id);
	}
	for (auto &rule : default_rule_catalog()) {
		CAPTURE(rule.rule_id);
		CHECK(covered.count(rule.rule_id) == 1);
	}
	CHECK(default_rule_catalog().size() == rule_pairs().size());
}
