#include <doctest.h>

#include "dial/aide/pipeline.hpp"
#include "dial/common/errors.hpp"
#include "dial/exec/simulator.hpp"

using namespace dial;

namespace {

std::shared_ptr<HashingEmbedder> embedder() {
	static auto e = std::make_shared<HashingEmbedder>();
	return e;
}

KnowledgeBase oracle_kb() {
	KnowledgeBase kb(embedder());
	FunctionEntry listagg;
	listagg.dialect = DialectId::ORACLE;
	listagg.category = "Aggregation & Grouping";
	listagg.scenarios = {"listing values from each group"};
	listagg.specification = "aggregate grouped string values into one delimited list";
	listagg.implementation = "LISTAGG(expr, ',') WITHIN GROUP (ORDER BY expr)";
	kb.add_function(listagg);
	FunctionEntry fetch;
	fetch.dialect = DialectId::ORACLE;
	fetch.category = "Pagination & Row Limiting";
	fetch.scenarios = {"returning only the first rows"};
	fetch.specification = "limit the number of returned rows";
	fetch.implementation = "FETCH FIRST n ROWS ONLY";
	kb.add_function(fetch);

	ConstraintEntry u1;
	u1.dialect = DialectId::ORACLE;
	u1.rule_spec = "grouped string concatenation must use the native listing aggregate";
	u1.signature_patterns = {"*ora-00904*invalid identifier*"};
	kb.add_constraint(u1);
	return kb;
}

DialectAwarePlan listagg_plan() {
	DialectAwarePlan plan;
	plan.dialect = DialectId::ORACLE;
	MacroOperator src;
	src.kind = MacroOperatorKind::SRC;
	src.description = "read the access log records";
	src.refs = {{"access_log", "city", "TEXT"}, {"access_log", "ip", "TEXT"}};
	MacroOperator agg;
	agg.kind = MacroOperatorKind::AGG;
	agg.description = "concatenate the ip values into one list for each city";
	agg.refs = {{"access_log", "ip", "TEXT"}, {"access_log", "city", "TEXT"}};
	agg.sensitive = true;
	MacroOperator org;
	org.kind = MacroOperatorKind::ORG;
	org.description = "present each city with its collected ip list";
	org.refs = {{"access_log", "city", "TEXT"}};
	plan.base.operators = {src, agg, org};
	for (size_t i = 0; i < plan.base.operators.size(); i++) {
		plan.base.operators[i].order_index = i;
	}
	plan.enriched = {{"Aggregation & Grouping", "aggregate grouped ip values into one delimited list", 1}};
	return plan;
}

SchemaCatalog access_log_schema() {
	return parse_schema_ddl("CREATE TABLE access_log(city TEXT, ip TEXT)");
}

} // namespace

TEST_CASE("generate_initial embeds every retrieved template verbatim in the prompt") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	llm.prime("generate_sql", "SELECT city FROM access_log");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory trajectory;
	auto plan = listagg_plan();
	pipeline.generate_initial(plan, access_log_schema(), trajectory);
	REQUIRE(trajectory.steps.size() == 1);
	CHECK(trajectory.steps[0].stage == StageKind::INIT);
	// all k retrieved entries appear verbatim
	size_t k = std::min(kb.config().retrieval_k, kb.function_count(DialectId::ORACLE));
	auto retrieved = kb.retrieve_functions(plan.enriched[0].category,
	                                       plan.enriched[0].standard_description,
	                                       DialectId::ORACLE, k);
	CHECK(retrieved.size() == k);
	for (auto &entry : retrieved) {
		CHECK(trajectory.steps[0].prompt.find(entry.prompt_block()) != std::string::npos);
	}
}

TEST_CASE("empty enrichment generates with zero templates") {
	KnowledgeBase kb(embedder()); // empty repository
	ScriptedBackend llm;
	llm.prime("generate_sql", "SELECT 1 FROM t");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::SQLITE);
	AidePipeline pipeline(llm, templates, kb, executor);
	RepairTrajectory trajectory;
	DialectAwarePlan plan;
	plan.dialect = DialectId::SQLITE;
	auto sql = pipeline.generate_initial(plan, SchemaCatalog {}, trajectory);
	CHECK(sql.text == "SELECT 1 FROM t");
	CHECK(trajectory.steps[0].prompt.find("(none)") != std::string::npos);
}

TEST_CASE("recovery applies a retrieved rule and re-executes") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	llm.prime("rule_fix",
	          "SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city", DialectId::ORACLE};
	trajectory.steps.push_back(init);

	auto q_exec = pipeline.syntactic_recovery(trajectory.steps[0].sql, listagg_plan(), trajectory);
	CHECK(q_exec.text.find("LISTAGG") != std::string::npos);
	REQUIRE(trajectory.steps.size() == 2);
	CHECK(trajectory.steps[1].stage == StageKind::RULE_FIX);
	REQUIRE(trajectory.steps[1].applied_rule.has_value());
	CHECK(trajectory.steps[1].execution->success);
	// the failing init step keeps its error outcome
	CHECK_FALSE(trajectory.steps[0].execution->success);
}

TEST_CASE("an already-executing query needs zero fix steps") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT city FROM access_log", DialectId::ORACLE};
	trajectory.steps.push_back(init);
	auto q = pipeline.syntactic_recovery(trajectory.steps[0].sql, listagg_plan(), trajectory);
	CHECK(q.text == "SELECT city FROM access_log");
	CHECK(trajectory.steps.size() == 1);
	CHECK(llm.calls_made() == 0);
}

TEST_CASE("an error with no matching rule escalates to deep diagnosis") {
	KnowledgeBase kb(embedder()); // no rules at all
	ScriptedBackend llm;
	llm.prime("deep_fix", "SELECT name FROM employees ORDER BY salary DESC FETCH FIRST 10 ROWS ONLY");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT name FROM employees ORDER BY salary DESC LIMIT 10", DialectId::ORACLE};
	trajectory.steps.push_back(init);
	DialectAwarePlan plan;
	plan.dialect = DialectId::ORACLE;
	auto q = pipeline.syntactic_recovery(trajectory.steps[0].sql, plan, trajectory);
	CHECK(q.text.find("FETCH FIRST") != std::string::npos);
	REQUIRE(trajectory.steps.size() == 2);
	CHECK(trajectory.steps[1].stage == StageKind::DEEP_FIX);
}

TEST_CASE("recovery budget exhaustion raises and preserves the trajectory") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	llm.set_default_handler([](const ChatRequest &req) {
		if (req.template_id == "deep_fix") {
			return std::string("SELECT broken FROM"); // never parses
		}
		throw BackendUnavailableException("unexpected template " + req.template_id);
	});
	TemplateStore templates;
	DebugConfig cfg;
	cfg.max_syntax_iters = 3;
	SimulatedExecutor executor(DialectId::MYSQL);
	AidePipeline pipeline(llm, templates, kb, executor, cfg);

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT COUNT(AVG(x)) FROM trades", DialectId::MYSQL};
	trajectory.steps.push_back(init);
	DialectAwarePlan plan;
	plan.dialect = DialectId::MYSQL;
	CHECK_THROWS_AS(pipeline.syntactic_recovery(trajectory.steps[0].sql, plan, trajectory),
	                RecoveryExhaustedException);
	// init + max_syntax_iters fix steps
	CHECK(trajectory.steps.size() == 1 + cfg.max_syntax_iters);
}

TEST_CASE("semantic drift is audited, repaired and re-verified") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	llm.prime("semantic_fix", "SELECT SUM(amount) FROM transactions WHERE status = 'done'");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::POSTGRESQL);
	AidePipeline pipeline(llm, templates, kb, executor);

	DialectAwarePlan plan;
	plan.dialect = DialectId::POSTGRESQL;
	MacroOperator src;
	src.kind = MacroOperatorKind::SRC;
	src.description = "read the transactions";
	src.refs = {{"transactions", "amount", "REAL"}};
	MacroOperator flt;
	flt.kind = MacroOperatorKind::FLT;
	flt.description = "keep records whose status equals 'done'";
	flt.refs = {{"transactions", "status", "TEXT"}};
	MacroOperator agg;
	agg.kind = MacroOperatorKind::AGG;
	agg.description = "compute the sum of amount values";
	agg.refs = {{"transactions", "amount", "REAL"}};
	plan.base.operators = {src, flt, agg};

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT AVG(amount) FROM transactions WHERE status = 'done'",
	            DialectId::POSTGRESQL};
	init.execution = executor.execute(init.sql);
	trajectory.steps.push_back(init);

	auto final_sql = pipeline.verify_semantics(trajectory.steps[0].sql, plan, trajectory);
	CHECK(final_sql.text.find("SUM(amount)") != std::string::npos);
	REQUIRE(trajectory.final.has_value());
	CHECK(trajectory.final->text == final_sql.text);
	REQUIRE(trajectory.steps.size() == 2);
	CHECK(trajectory.steps[1].stage == StageKind::SEMANTIC_FIX);
	// the drifted step carries its failing audit, the repair its passing one
	CHECK_FALSE(trajectory.steps[0].audit_report->passed);
	CHECK(trajectory.steps[1].audit_report->passed);
	CHECK(trajectory.validate().empty());
}

TEST_CASE("an already-faithful query verifies with zero iterations") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::POSTGRESQL);
	AidePipeline pipeline(llm, templates, kb, executor);

	DialectAwarePlan plan;
	plan.dialect = DialectId::POSTGRESQL;
	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT a FROM t", DialectId::POSTGRESQL};
	init.execution = executor.execute(init.sql);
	trajectory.steps.push_back(init);
	auto final_sql = pipeline.verify_semantics(trajectory.steps[0].sql, plan, trajectory);
	CHECK(final_sql.text == "SELECT a FROM t");
	CHECK(trajectory.steps.size() == 1);
	CHECK(llm.calls_made() == 0);
	CHECK(trajectory.validate().empty());
}

TEST_CASE("a rectification that breaks executability re-enters recovery within the budget") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	// first semantic repair is broken SQL, the in-iteration recovery fixes it
	llm.prime("semantic_fix", "SELECT SUM(amount FROM transactions WHERE status = 'done'");
	llm.prime("deep_fix", "SELECT SUM(amount) FROM transactions WHERE status = 'done'");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::POSTGRESQL);
	AidePipeline pipeline(llm, templates, kb, executor);

	DialectAwarePlan plan;
	plan.dialect = DialectId::POSTGRESQL;
	MacroOperator agg;
	agg.kind = MacroOperatorKind::AGG;
	agg.description = "compute the sum of amount values";
	agg.refs = {{"transactions", "amount", "REAL"}};
	plan.base.operators = {agg};

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT AVG(amount) FROM transactions WHERE status = 'done'",
	            DialectId::POSTGRESQL};
	init.execution = executor.execute(init.sql);
	trajectory.steps.push_back(init);

	auto final_sql = pipeline.verify_semantics(trajectory.steps[0].sql, plan, trajectory);
	CHECK(final_sql.text == "SELECT SUM(amount) FROM transactions WHERE status = 'done'");
	// init + broken semantic fix + recovery retry, both recorded as semantic stage
	REQUIRE(trajectory.steps.size() == 3);
	CHECK(trajectory.steps[1].stage == StageKind::SEMANTIC_FIX);
	CHECK_FALSE(trajectory.steps[1].execution->success);
	CHECK(trajectory.steps[2].stage == StageKind::SEMANTIC_FIX);
	CHECK(trajectory.steps[2].execution->success);
	CHECK(trajectory.validate().empty());
}

TEST_CASE("distillation preserves the final SQL byte-exact and templates identifiers") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	llm.prime("distill",
	          "P_INC: calling the grouped concat function on access_log rows\n"
	          "A_RTC: the engine only defines its native listing aggregate for the city grouping");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory trajectory;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city", DialectId::ORACLE};
	init.execution = executor.execute(init.sql);
	trajectory.steps.push_back(init);
	TrajectoryStep fix;
	fix.stage = StageKind::RULE_FIX;
	fix.sql = {"SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city",
	           DialectId::ORACLE};
	fix.execution = executor.execute(fix.sql);
	trajectory.steps.push_back(fix);
	trajectory.final = fix.sql;

	auto primitive = pipeline.distill_primitive(trajectory, access_log_schema(), DialectId::ORACLE);
	CHECK(primitive.corrective_exemplar == trajectory.final->text); // byte-equal
	// schema identifiers templated out of the pattern and root cause
	CHECK(primitive.incorrect_pattern.find("access_log") == std::string::npos);
	CHECK(primitive.incorrect_pattern.find("<table>") != std::string::npos);
	CHECK(primitive.root_cause.find("city") == std::string::npos);
	CHECK(primitive.root_cause.find("<column>") != std::string::npos);
	CHECK(primitive.validate().empty());
}

TEST_CASE("distillation preconditions: verified final and at least one fix") {
	KnowledgeBase kb(embedder());
	ScriptedBackend llm;
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	RepairTrajectory no_final;
	TrajectoryStep init;
	init.stage = StageKind::INIT;
	init.sql = {"SELECT 1 FROM t", DialectId::ORACLE};
	no_final.steps.push_back(init);
	CHECK_THROWS_AS(pipeline.distill_primitive(no_final, SchemaCatalog {}, DialectId::ORACLE),
	                DialException);

	RepairTrajectory no_fix = no_final;
	no_fix.final = init.sql;
	CHECK_THROWS_AS(pipeline.distill_primitive(no_fix, SchemaCatalog {}, DialectId::ORACLE),
	                DialException);
}

// ---------------------------------------------------------------------------
// run_pipeline
// ---------------------------------------------------------------------------

namespace {

TranslationTask access_log_task() {
	TranslationTask task;
	task.question = "list all IP addresses accessed by each city";
	task.schema = access_log_schema();
	task.dialect = DialectId::ORACLE;
	return task;
}

void prime_listagg_run(ScriptedBackend &llm) {
	llm.prime("plan_build",
	          "[1] SRC | read the access log records | access_log.city (TEXT), access_log.ip (TEXT)\n"
	          "[2] AGG | concatenate the ip values into one list for each city | access_log.ip (TEXT), access_log.city (TEXT)\n"
	          "[3] ORG | present each city with its collected ip list | access_log.city (TEXT)\n");
	llm.prime("categorize", "Aggregation & Grouping | Aggregate grouped ip values into one delimited list");
	llm.prime("generate_sql", "SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city");
	llm.prime("rule_fix",
	          "SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city");
	llm.prime("distill",
	          "P_INC: calling the grouped concat function to merge grouped strings\n"
	          "A_RTC: grouped string merging requires the native listing aggregate here");
}

} // namespace

TEST_CASE("end-to-end scripted run repairs a catalog violation and consolidates once") {
	auto kb = oracle_kb();
	size_t constraints_before = kb.constraint_count();
	ScriptedBackend llm;
	prime_listagg_run(llm);
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);

	auto result = pipeline.run_pipeline(access_log_task());
	CHECK(result.passed);
	CHECK(result.best.text.find("LISTAGG") != std::string::npos);
	REQUIRE(result.consolidations.size() == 1);
	// the simulator accepts the final query and the audit passed
	CHECK(DialectSimulator().simulate(result.best).success);
	REQUIRE(result.trajectory.final.has_value());
	CHECK(result.trajectory.validate().empty());
	// routing mutated the KB
	CHECK(kb.function_count() + kb.constraint_count() >
	      oracle_kb().function_count() + constraints_before);
	// stage sequence: init -> rule_fix
	REQUIRE(result.trajectory.steps.size() == 2);
	CHECK(result.trajectory.steps[0].stage == StageKind::INIT);
	CHECK(result.trajectory.steps[1].stage == StageKind::RULE_FIX);
	CHECK(result.trajectory.steps[1].applied_rule.has_value());
}

TEST_CASE("an immediately-perfect query yields a one-step trajectory, no consolidation") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	llm.prime("plan_build", "[1] SRC | read the access log records | access_log.city (TEXT)\n"
	                        "[2] ORG | present each city | access_log.city (TEXT)\n");
	llm.prime("generate_sql", "SELECT city FROM access_log");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);
	auto result = pipeline.run_pipeline(access_log_task());
	CHECK(result.passed);
	CHECK(result.trajectory.steps.size() == 1);
	CHECK(result.consolidations.empty());
	CHECK(result.trajectory.validate().empty());
}

TEST_CASE("budget exhaustion returns passed=false and never mutates the KB") {
	auto kb = oracle_kb();
	size_t f_before = kb.function_count();
	size_t r_before = kb.constraint_count();
	ScriptedBackend llm;
	llm.prime("plan_build", "[1] SRC | read the access log records | access_log.city (TEXT)\n"
	                        "[2] ORG | present each city | access_log.city (TEXT)\n");
	llm.prime("generate_sql", "SELECT city FROM access_log LIMIT"); // parse error
	llm.set_default_handler([](const ChatRequest &req) {
		if (req.template_id == "deep_fix" || req.template_id == "rule_fix") {
			return std::string("SELECT city FROM access_log LIMIT"); // stays broken
		}
		throw BackendUnavailableException("unexpected template " + req.template_id);
	});
	TemplateStore templates;
	DebugConfig cfg;
	cfg.max_syntax_iters = 2;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor, cfg);
	auto result = pipeline.run_pipeline(access_log_task());
	CHECK_FALSE(result.passed);
	CHECK_FALSE(result.failure_reason.empty());
	CHECK(kb.function_count() == f_before);
	CHECK(kb.constraint_count() == r_before);
	CHECK_FALSE(result.trajectory.final.has_value());
	// steps bounded by 1 + max_syntax_iters
	CHECK(result.trajectory.steps.size() <= 1 + cfg.max_syntax_iters);
}

TEST_CASE("trajectory step bound holds across both phases") {
	DebugConfig cfg;
	CHECK(cfg.max_syntax_iters == 5);
	CHECK(cfg.max_semantic_iters == 3);
	// structural bound: 1 + max_syntax + 2 * max_semantic
	CHECK(1 + cfg.max_syntax_iters + 2 * cfg.max_semantic_iters == 12);
}

TEST_CASE("ablation: disabled planning goes straight to direct generation") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	llm.prime("direct_generate", "SELECT city FROM access_log");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AblationFlags flags;
	flags.no_planning = true;
	AidePipeline pipeline(llm, templates, kb, executor, {}, flags);
	auto result = pipeline.run_pipeline(access_log_task());
	CHECK(result.passed);
	REQUIRE(result.plan.has_value());
	CHECK(result.plan->base.operators.empty());
	CHECK(result.trajectory.steps[0].prompt_template == "direct_generate");
}

TEST_CASE("ablation: disabled retrieval strips templates and rule lookups") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	prime_listagg_run(llm);
	// without rule retrieval the repair must come from deep diagnosis
	llm.prime("deep_fix",
	          "SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AblationFlags flags;
	flags.no_retrieval = true;
	AidePipeline pipeline(llm, templates, kb, executor, {}, flags);
	auto result = pipeline.run_pipeline(access_log_task());
	CHECK(result.passed);
	CHECK(result.trajectory.steps[0].prompt.find("(none)") != std::string::npos);
	for (auto &step : result.trajectory.steps) {
		CHECK(step.stage != StageKind::RULE_FIX);
	}
	// consolidation is part of the knowledge loop: disabled with it
	CHECK(result.consolidations.empty());
}

TEST_CASE("ablation: disabled correction returns the initial query unrepaired") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	llm.prime("plan_build", "[1] SRC | read the access log records | access_log.city (TEXT)\n"
	                        "[2] ORG | present each city | access_log.city (TEXT)\n");
	llm.prime("generate_sql", "SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city");
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AblationFlags flags;
	flags.no_correction = true;
	AidePipeline pipeline(llm, templates, kb, executor, {}, flags);
	auto result = pipeline.run_pipeline(access_log_task());
	CHECK_FALSE(result.passed); // the violation stays in place
	CHECK(result.trajectory.steps.size() == 1);
	CHECK(result.best.text.find("GROUP_CONCAT") != std::string::npos);
	for (auto &step : result.trajectory.steps) {
		CHECK(step.stage == StageKind::INIT);
		CHECK_FALSE(step.audit_report.has_value());
	}
	CHECK(result.consolidations.empty());
}

TEST_CASE("trajectory dump is canonical and redaction hashes prompt bodies") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	prime_listagg_run(llm);
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	AidePipeline pipeline(llm, templates, kb, executor);
	auto result = pipeline.run_pipeline(access_log_task());

	auto dump_a = result.to_json();
	auto dump_b = result.to_json();
	CHECK(dump_a == dump_b);
	CHECK(dump_a.find("\"prompt\"") != std::string::npos);
	auto redacted = result.to_json(true);
	CHECK(redacted.find("\"prompt\"") == std::string::npos);
	CHECK(redacted.find("\"prompt_hash\"") != std::string::npos);
	CHECK(redacted.find("\"applied_rule\"") != std::string::npos); // rule ids stay
}

TEST_CASE("debug budgets below one are rejected") {
	auto kb = oracle_kb();
	ScriptedBackend llm;
	TemplateStore templates;
	SimulatedExecutor executor(DialectId::ORACLE);
	DebugConfig zero;
	zero.max_syntax_iters = 0;
	CHECK_THROWS_AS(AidePipeline(llm, templates, kb, executor, zero), DialException);
}
