#include <doctest.h>

#include "dial/audit/audit.hpp"
#include "dial/common/errors.hpp"
#include "support/audit_fixture_plans.hpp"
#include "support/plan_query_synth.hpp"

using namespace dial;
using dial::testsupport::audit_fixture_plan;
using dial::testsupport::synthesize_query;
using dial::testsupport::SynthOptions;

namespace {

OperatorTrace trace_of(const std::string &sql, DialectId d = DialectId::POSTGRESQL) {
	auto stmt = parse_sql({sql, d});
	return derive_trace(*stmt);
}

} // namespace

// ---------------------------------------------------------------------------
// trace derivation
// ---------------------------------------------------------------------------

TEST_CASE("year-filter realizations normalize to the same predicate") {
	auto extract_form = trace_of("SELECT a FROM t WHERE EXTRACT(YEAR FROM d) = 2017");
	auto between_form = trace_of("SELECT a FROM t WHERE d BETWEEN '2017-01-01' AND '2017-12-31'",
	                             DialectId::MYSQL);
	CHECK(extract_form.predicates == between_form.predicates);
	REQUIRE(extract_form.predicates.size() == 1);
	auto p = *extract_form.predicates.begin();
	CHECK(p.column == "d");
	CHECK(p.comparator == "year=");
	CHECK(p.value == "2017");

	// the YEAR() and strftime realizations collapse to the same unit too
	auto year_fn = trace_of("SELECT a FROM t WHERE YEAR(d) = 2017", DialectId::MYSQL);
	CHECK(year_fn.predicates == extract_form.predicates);
	auto strftime_form =
	    trace_of("SELECT a FROM t WHERE STRFTIME('%Y', d) = '2017'", DialectId::SQLITE);
	CHECK(strftime_form.predicates == extract_form.predicates);
}

TEST_CASE("no WHERE clause yields an empty predicate set") {
	CHECK(trace_of("SELECT a FROM t").predicates.empty());
}

TEST_CASE("predicates normalize comparator direction and literal side") {
	auto flipped = trace_of("SELECT a FROM t WHERE 100 < price");
	REQUIRE(flipped.predicates.size() == 1);
	auto p = *flipped.predicates.begin();
	CHECK(p.column == "price");
	CHECK(p.comparator == ">");
	CHECK(p.value == "100");
}

TEST_CASE("having predicates are post-aggregation") {
	auto t = trace_of("SELECT region, SUM(x) FROM t GROUP BY region HAVING COUNT(*) > 5");
	bool found_post = false;
	for (auto &p : t.predicates) {
		if (p.post_aggregation) {
			found_post = true;
		}
	}
	CHECK(found_post);
}

TEST_CASE("join graph resolves aliases to base tables") {
	auto t = trace_of("SELECT u.name FROM users u JOIN txns t2 ON u.id = t2.user_id "
	                  "JOIN logs l ON t2.txn_id = l.txn_id");
	CHECK(t.tables == std::set<std::string> {"users", "txns", "logs"});
	CHECK(t.joins.size() == 2);

	// comma-join with WHERE equality also forms an edge
	auto comma = trace_of("SELECT a.x FROM a, b WHERE a.id = b.a_id");
	CHECK(comma.joins.size() == 1);
}

TEST_CASE("aggregates capture function and primary column; casts are visible") {
	auto t = trace_of("SELECT region, SUM(CAST(amount AS REAL)) AS total FROM t GROUP BY region");
	REQUIRE(t.aggregates.size() == 1);
	CHECK(t.aggregates.begin()->function == "SUM");
	CHECK(t.aggregates.begin()->primary_column == "amount");
	CHECK(t.uses_cast);
	CHECK(t.cast_columns.count("amount") == 1);
	CHECK(t.group_dims == std::set<std::string> {"region"});
	REQUIRE(t.projection.size() == 2);
	CHECK(t.projection[1].alias == "total");
}

TEST_CASE("set operations are flagged as unmodeled constructs") {
	auto t = trace_of("SELECT a FROM t UNION SELECT b FROM s");
	CHECK(t.has_set_operation);
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

TEST_CASE("a query synthesized from its plan passes its own audit") {
	for (size_t i = 0; i < 3; i++) {
		auto plan = audit_fixture_plan(i);
		auto sql = synthesize_query(plan);
		CAPTURE(sql);
		auto report = audit({sql, plan.dialect}, plan);
		CAPTURE(report.describe());
		CHECK(report.passed);
	}
}

TEST_CASE("SUM silently replaced by AVG fails computation naming the swap") {
	auto plan = audit_fixture_plan(0);
	auto sql = synthesize_query(plan, {.swap_sum_avg = true});
	auto report = audit({sql, plan.dialect}, plan);
	CHECK_FALSE(report.passed);
	CHECK_FALSE(report.verdicts.at(AuditInvariant::COMPUTATION).pass);
	auto details = report.verdicts.at(AuditInvariant::COMPUTATION).details;
	CHECK(details.find("SUM") != std::string::npos);
	CHECK(details.find("AVG") != std::string::npos);
	CHECK(report.verdicts.at(AuditInvariant::TOPOLOGY).pass);
	CHECK(report.verdicts.at(AuditInvariant::CONSTRAINTS).pass);
	CHECK(report.verdicts.at(AuditInvariant::PROJECTION).pass);
}

TEST_CASE("a dropped filter flips constraints to fail, naming the predicate") {
	auto plan = audit_fixture_plan(1);
	auto sql = synthesize_query(plan, {.drop_filter = true});
	auto report = audit({sql, plan.dialect}, plan);
	CHECK_FALSE(report.passed);
	CHECK_FALSE(report.verdicts.at(AuditInvariant::CONSTRAINTS).pass);
	CHECK(report.verdicts.at(AuditInvariant::CONSTRAINTS).details.find("status") !=
	      std::string::npos);
	CHECK(report.verdicts.at(AuditInvariant::TOPOLOGY).pass);
	CHECK(report.verdicts.at(AuditInvariant::COMPUTATION).pass);
	CHECK(report.verdicts.at(AuditInvariant::PROJECTION).pass);
}

TEST_CASE("a removed join fails topology alone") {
	auto plan = audit_fixture_plan(2);
	auto sql = synthesize_query(plan, {.drop_join = true});
	auto report = audit({sql, plan.dialect}, plan);
	CHECK_FALSE(report.verdicts.at(AuditInvariant::TOPOLOGY).pass);
	CHECK(report.verdicts.at(AuditInvariant::CONSTRAINTS).pass);
	CHECK(report.verdicts.at(AuditInvariant::COMPUTATION).pass);
	CHECK(report.verdicts.at(AuditInvariant::PROJECTION).pass);
}

TEST_CASE("a changed alias fails projection alone") {
	auto plan = audit_fixture_plan(3);
	auto sql = synthesize_query(plan, {.mangle_alias = true});
	auto report = audit({sql, plan.dialect}, plan);
	CHECK_FALSE(report.verdicts.at(AuditInvariant::PROJECTION).pass);
	CHECK(report.verdicts.at(AuditInvariant::PROJECTION).details.find("total_price") !=
	      std::string::npos);
	CHECK(report.verdicts.at(AuditInvariant::TOPOLOGY).pass);
	CHECK(report.verdicts.at(AuditInvariant::CONSTRAINTS).pass);
	CHECK(report.verdicts.at(AuditInvariant::COMPUTATION).pass);
}

TEST_CASE("audit is deterministic") {
	auto plan = audit_fixture_plan(4);
	auto sql = synthesize_query(plan, {.drop_filter = true});
	auto a = audit({sql, plan.dialect}, plan);
	auto b = audit({sql, plan.dialect}, plan);
	CHECK(a == b);
	CHECK(a.to_json() == b.to_json());
}

TEST_CASE("set operations outside the plan vocabulary fail topology as unmodeled") {
	auto plan = audit_fixture_plan(5);
	std::string sql = synthesize_query(plan) + " UNION ALL SELECT region, 0 FROM orders_5";
	auto report = audit({sql, plan.dialect}, plan);
	CHECK_FALSE(report.verdicts.at(AuditInvariant::TOPOLOGY).pass);
	CHECK(report.verdicts.at(AuditInvariant::TOPOLOGY).details.find("unmodeled") !=
	      std::string::npos);
}

TEST_CASE("parse errors propagate from audit") {
	auto plan = audit_fixture_plan(6);
	CHECK_THROWS_AS(audit({"not sql at all", plan.dialect}, plan), ParseException);
}

TEST_CASE("audit report serialization carries verdicts and details") {
	auto plan = audit_fixture_plan(7);
	auto report = audit({synthesize_query(plan, {.drop_filter = true}), plan.dialect}, plan);
	auto json_text = report.to_json();
	CHECK(json_text.find("\"constraints\":\"fail\"") != std::string::npos);
	CHECK(json_text.find("\"topology\":\"pass\"") != std::string::npos);
	CHECK(json_text.find("\"details\"") != std::string::npos);
}

TEST_CASE("cal intents demand a visible type conversion") {
	DialectAwarePlan plan;
	plan.dialect = DialectId::POSTGRESQL;
	MacroOperator src;
	src.kind = MacroOperatorKind::SRC;
	src.description = "read the transactions";
	src.refs = {{"transactions", "amount", "TEXT"}};
	MacroOperator cal;
	cal.kind = MacroOperatorKind::CAL;
	cal.description = "strip symbols and cast amount to numeric";
	cal.refs = {{"transactions", "amount", "TEXT"}};
	MacroOperator agg;
	agg.kind = MacroOperatorKind::AGG;
	agg.description = "compute the sum of amount";
	agg.refs = {{"transactions", "amount", "TEXT"}};
	plan.base.operators = {src, cal, agg};

	auto with_cast = audit(
	    {"SELECT SUM(CAST(amount AS REAL)) FROM transactions", DialectId::POSTGRESQL}, plan);
	CHECK(with_cast.verdicts.at(AuditInvariant::COMPUTATION).pass);

	auto without_cast = audit({"SELECT SUM(amount) FROM transactions", DialectId::POSTGRESQL}, plan);
	CHECK_FALSE(without_cast.verdicts.at(AuditInvariant::COMPUTATION).pass);
}

TEST_CASE("the worked-example plan catches its dropped 'viewed' filter") {
	DialectAwarePlan plan;
	plan.dialect = DialectId::ORACLE;
	auto mk = [](MacroOperatorKind kind, std::string description, std::vector<SchemaRef> refs) {
		MacroOperator op;
		op.kind = kind;
		op.description = std::move(description);
		op.refs = std::move(refs);
		return op;
	};
	plan.base.operators = {
	    mk(MacroOperatorKind::SRC,
	       "combine transactions with transaction_logs and users on their shared keys",
	       {{"transactions", "transaction_id", "BIGINT"},
	        {"transaction_logs", "transaction_id", "BIGINT"},
	        {"transaction_logs", "user_id", "BIGINT"},
	        {"users", "user_id", "BIGINT"}}),
	    mk(MacroOperatorKind::FLT, "keep records whose action equals 'viewed'",
	       {{"transaction_logs", "action", "TEXT"}}),
	    mk(MacroOperatorKind::AGG, "compute the sum of amount for each username",
	       {{"transactions", "amount", "TEXT"}, {"users", "username", "TEXT"}}),
	    mk(MacroOperatorKind::ORG, "present username and the total aliased as total_transaction_amount",
	       {{"users", "username", "TEXT"}}),
	};

	std::string faithful =
	    "SELECT u.username, SUM(t.amount) AS total_transaction_amount "
	    "FROM transactions t JOIN transaction_logs tl ON t.transaction_id = tl.transaction_id "
	    "JOIN users u ON tl.user_id = u.user_id "
	    "WHERE tl.action = 'viewed' GROUP BY u.username";
	auto pass_report = audit({faithful, plan.dialect}, plan);
	CAPTURE(pass_report.describe());
	CHECK(pass_report.passed);

	std::string dropped =
	    "SELECT u.username, SUM(t.amount) AS total_transaction_amount "
	    "FROM transactions t JOIN transaction_logs tl ON t.transaction_id = tl.transaction_id "
	    "JOIN users u ON tl.user_id = u.user_id GROUP BY u.username";
	auto fail_report = audit({dropped, plan.dialect}, plan);
	CHECK_FALSE(fail_report.passed);
	CHECK_FALSE(fail_report.verdicts.at(AuditInvariant::CONSTRAINTS).pass);
	CHECK(fail_report.verdicts.at(AuditInvariant::CONSTRAINTS).details.find("action") !=
	      std::string::npos);
	CHECK(fail_report.verdicts.at(AuditInvariant::CONSTRAINTS).details.find("viewed") !=
	      std::string::npos);
}

TEST_CASE("USING joins link adjacent tables in chain order") {
	auto t = trace_of("SELECT a.x FROM aa JOIN bb USING (k1) JOIN cc USING (k2)");
	CHECK(t.tables == std::set<std::string> {"aa", "bb", "cc"});
	REQUIRE(t.joins.size() == 2);
	// edges: aa-bb on k1, bb-cc on k2 (not aa-cc)
	bool ab = false, bc = false;
	for (auto &edge : t.joins) {
		if (edge.left_table == "aa" && edge.right_table == "bb") {
			ab = true;
		}
		if (edge.left_table == "bb" && edge.right_table == "cc") {
			bc = true;
		}
	}
	CHECK(ab);
	CHECK(bc);
}
