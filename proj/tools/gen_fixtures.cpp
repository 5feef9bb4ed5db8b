// Regenerates the repository's shipped artifacts: prompt template files, the
// exported rule catalog, the seeded knowledge base, the synthetic
// documentation corpus, the replay fixture store, the golden trajectory
// dumps, and the mini benchmark. Run from the repository root:
//
//   dial_gen_fixtures [repo_root]
//
// Replies come from a deterministic keyword-keyed script wrapped in a
// recording backend, so a later replay run reproduces every byte.

#include "dial/aide/pipeline.hpp"
#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/eval/benchmark.hpp"
#include "dial/exec/rules.hpp"
#include "dial/exec/simulator.hpp"
#include "dial/exec/sqlite_executor.hpp"
#include "dial/kb/builder.hpp"
#include "dial/kb/knowledge_base.hpp"
#include "dial/llm/backend.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

using namespace dial;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string root;

std::string path_of(const std::string &rel) {
	return (fs::path(root) / rel).string();
}

void write_rel(const std::string &rel, const std::string &content) {
	fs::create_directories(fs::path(path_of(rel)).parent_path());
	write_file(path_of(rel), content);
}

// ---------------------------------------------------------------------------
// Scripted replies, keyed on prompt content so ordering never matters.
// ---------------------------------------------------------------------------

std::string scripted_reply(const ChatRequest &req) {
	const std::string &p = req.rendered_prompt;
	auto has = [&](const char *needle) { return p.find(needle) != std::string::npos; };

	if (req.template_id == "plan_build") {
		if (has("list all usernames")) {
			return "[1] SRC | read the user records | users.username (TEXT)\n"
			       "[2] ORG | present each username | users.username (TEXT)\n";
		}
		if (has("IP addresses")) {
			return "[1] SRC | read the access log records | access_log.city (TEXT), access_log.ip (TEXT)\n"
			       "[2] AGG | concatenate the ip values into one list for each city | access_log.ip (TEXT), access_log.city (TEXT)\n"
			       "[3] ORG | present each city with its collected ip list | access_log.city (TEXT)\n";
		}
		if (has("ten employees with the highest salaries")) {
			return "[1] SRC | read the employee records | employees.name (TEXT), employees.salary (REAL)\n"
			       "[2] ORG | present the ten highest earners sorted by salary descending | employees.name (TEXT)\n";
		}
		if (has("completed transaction amounts")) {
			return "[1] SRC | read the transaction records | transactions.amount (REAL), transactions.status (TEXT)\n"
			       "[2] FLT | keep records whose status equals 'done' | transactions.status (TEXT)\n"
			       "[3] AGG | compute the sum of amount values | transactions.amount (REAL)\n"
			       "[4] ORG | present the summed amount | transactions.amount (REAL)\n";
		}
		if (has("days with trading volume above")) {
			return "[1] SRC | read the trade records | trades.volume (REAL), trades.avg_volume (REAL)\n"
			       "[2] AGG | count the records whose volume exceeds its running average | trades.volume (REAL), trades.avg_volume (REAL)\n"
			       "[3] ORG | present the count | trades.volume (REAL)\n";
		}
		if (has("how many users")) {
			return "[1] SRC | read the user records | users.username (TEXT)\n"
			       "[2] AGG | count the number of user records | users.username (TEXT)\n"
			       "[3] ORG | present the count |\n";
		}
		throw DialException("scripted plan_build has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "categorize") {
		if (has("concatenate the ip values")) {
			return "Aggregation & Grouping | Aggregate the grouped ip values into one delimited list";
		}
		if (has("ten highest earners")) {
			return "Pagination & Row Limiting | Return only the first 10 rows ordered by salary descending";
		}
		throw DialException("scripted categorize has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "generate_sql") {
		if (has("present each username")) {
			return "SELECT username FROM users";
		}
		if (has("access_log")) {
			// wrong on purpose: unsupported grouped concat on this engine
			return "SELECT city, GROUP_CONCAT(ip) FROM access_log GROUP BY city";
		}
		if (has("employees")) {
			// wrong on purpose: pagination clause the engine does not parse
			return "SELECT name FROM employees ORDER BY salary DESC LIMIT 10";
		}
		if (has("transactions")) {
			// executable but semantically drifted: average instead of sum
			return "SELECT AVG(amount) FROM transactions WHERE status = 'done'";
		}
		if (has("trades")) {
			// illegal nested aggregation, never repaired: budget exhaustion
			return "SELECT COUNT(AVG(volume)) FROM trades";
		}
		if (has("count the number of user records")) {
			return "SELECT COUNT(*) FROM users";
		}
		throw DialException("scripted generate_sql has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "rule_fix") {
		if (has("GROUP_CONCAT")) {
			return "SELECT city, LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log GROUP BY city";
		}
		throw DialException("scripted rule_fix has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "deep_fix") {
		if (has("employees")) {
			return "SELECT name FROM employees ORDER BY salary DESC FETCH FIRST 10 ROWS ONLY";
		}
		if (has("trades")) {
			return "SELECT COUNT(AVG(volume)) FROM trades"; // still broken, on purpose
		}
		throw DialException("scripted deep_fix has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "semantic_fix") {
		if (has("transactions")) {
			return "SELECT SUM(amount) FROM transactions WHERE status = 'done'";
		}
		throw DialException("scripted semantic_fix has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "distill") {
		if (has("LISTAGG")) {
			return "P_INC: calling the grouped concat function of other engines to merge grouped strings\n"
			       "A_RTC: this engine exposes grouped string merging only through its native listing aggregate with an ordering clause";
		}
		if (has("FETCH FIRST")) {
			return "P_INC: paginating with a trailing row-limit keyword clause\n"
			       "A_RTC: this engine paginates with a fetch-first clause and rejects the row-limit keyword";
		}
		if (has("SUM(amount)")) {
			return "P_INC: substituting an averaging aggregate where a summation was requested\n"
			       "A_RTC: repairs must not swap the aggregate family; the requested summation is part of the intent";
		}
		throw DialException("scripted distill has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "kb_func_entry") {
		if (has("LISTAGG")) {
			return "SCENARIOS: listing the values collected from each group; building one delimited list per group\n"
			       "SPEC: aggregate grouped string values into one delimited list\n"
			       "IMPL: LISTAGG(expr, ', ') WITHIN GROUP (ORDER BY expr)";
		}
		if (has("TO_DATE")) {
			return "SCENARIOS: parsing a textual date literal; turning formatted text into a date value\n"
			       "SPEC: parse text into a date value using a format pattern\n"
			       "IMPL: TO_DATE('2017-03-22', 'YYYY-MM-DD')";
		}
		if (has("SUBSTR")) {
			return "SCENARIOS: extracting part of a string; slicing text by position\n"
			       "SPEC: extract a substring by start position and length\n"
			       "IMPL: SUBSTR(source, start, length)";
		}
		if (has("NVL")) {
			return "SCENARIOS: replacing missing values with a default\n"
			       "SPEC: return the second argument when the first is null\n"
			       "IMPL: NVL(value, fallback)";
		}
		throw DialException("scripted kb_func_entry has no reply for prompt: " + p.substr(0, 120));
	}

	if (req.template_id == "kb_rule_entry") {
		if (has("CONCAT")) {
			return "RULE: the concat function accepts exactly two arguments; chain the || operator for additional parts";
		}
		if (has("alias")) {
			return "RULE: table aliases must not use the AS keyword; write the alias directly after the table name";
		}
		throw DialException("scripted kb_rule_entry has no reply for prompt: " + p.substr(0, 120));
	}

	throw DialException("scripted backend has no handler for template " + req.template_id);
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

void write_templates() {
	TemplateStore store;
	for (auto &id : store.ids()) {
		write_rel("templates/" + id + ".txt", store.get(id));
	}
	std::cout << "templates/ written\n";
}

void write_rule_catalog() {
	fs::create_directories(path_of("data"));
	save_rule_catalog(default_rule_catalog(), path_of("data/rules.jsonl"));
	std::cout << "data/rules.jsonl written\n";
}

void write_seed_kb() {
	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb(embedder);

	auto add_f = [&](DialectId d, const char *category, std::vector<std::string> scenarios,
	                 const char *spec, const char *impl) {
		FunctionEntry e;
		e.dialect = d;
		e.category = category;
		e.scenarios = std::move(scenarios);
		e.specification = spec;
		e.implementation = impl;
		e.origin = EntryOrigin::DISTILLED_FROM_DOCS;
		kb.add_function(std::move(e));
	};
	add_f(DialectId::ORACLE, "Aggregation & Grouping",
	      {"listing values from each group", "building a delimited list per group"},
	      "aggregate grouped string values into one delimited list",
	      "LISTAGG(expr, ',') WITHIN GROUP (ORDER BY expr)");
	add_f(DialectId::ORACLE, "Date & Time Operations", {"parsing a date literal"},
	      "parse text into a date using a format pattern", "TO_DATE('2017-03-22', 'YYYY-MM-DD')");
	add_f(DialectId::ORACLE, "Pagination & Row Limiting", {"returning only the first rows"},
	      "limit the number of returned rows", "FETCH FIRST n ROWS ONLY");
	add_f(DialectId::MYSQL, "Date & Time Operations",
	      {"calculating age in years", "interval between two dates in years"},
	      "difference between two dates in years", "TIMESTAMPDIFF(YEAR, start_date, end_date)");
	add_f(DialectId::POSTGRESQL, "Date & Time Operations", {"calculating age"},
	      "date difference in years", "AGE(end_ts, start_ts)");

	auto add_r = [&](DialectId d, const char *spec, std::vector<std::string> patterns) {
		ConstraintEntry e;
		e.dialect = d;
		e.rule_spec = spec;
		e.signature_patterns = std::move(patterns);
		e.origin = EntryOrigin::DISTILLED_FROM_DOCS;
		kb.add_constraint(std::move(e));
	};
	add_r(DialectId::ORACLE,
	      "grouped string concatenation must use the native listing aggregate with a WITHIN GROUP "
	      "ordering clause; the grouped concat function of other engines is not defined",
	      {"*ora-00904*invalid identifier*"});
	add_r(DialectId::MYSQL,
	      "a scalar comparison operand must contain exactly one column; scalar subqueries used as "
	      "operands must select a single column",
	      {"*1241*"});

	kb.persist(path_of("fixtures/kb"));
	std::cout << "fixtures/kb written (" << kb.function_count() << " F, " << kb.constraint_count()
	          << " R)\n";
}

void write_docs_corpus() {
	write_rel("fixtures/docs_corpus/01_string_aggregation.md",
	          "# LISTAGG string aggregation\n"
	          "LISTAGG aggregates string values from a group of rows into one delimited list.\n"
	          "Use LISTAGG(expr, ', ') WITHIN GROUP (ORDER BY expr) to aggregate grouped string\n"
	          "values into a single delimited list per group.\n");
	write_rel("fixtures/docs_corpus/02_date_parsing.html",
	          "<html><body><h2>TO_DATE date parsing</h2>\n"
	          "<p>TO_DATE parses a text value into a date value using a format pattern.\n"
	          "Example: TO_DATE('2017-03-22', 'YYYY-MM-DD') parses the text into a date.</p>\n"
	          "</body></html>\n");
	write_rel("fixtures/docs_corpus/03_substring.md",
	          "# SUBSTR substring extraction\n"
	          "SUBSTR extracts a substring from a string value by position and length.\n"
	          "SUBSTR(source, start, length) returns the requested portion of the string.\n");
	write_rel("fixtures/docs_corpus/04_null_handling.json",
	          json {{"title", "NVL null coalescing"},
	                {"content",
	                 "NVL returns the first non-null value from its arguments. Use NVL(value, "
	                 "fallback) to replace a null value with a default."}}
	              .dump(2) +
	              "\n");
	write_rel("fixtures/docs_corpus/05_concat_arity.md",
	          "# CONCAT argument count restriction\n"
	          "Unlike standard SQL, the CONCAT function accepts exactly two arguments; a call\n"
	          "with three or more arguments is a function argument count and signature\n"
	          "restriction violation. Chain the || operator to concatenate additional parts.\n");
	write_rel("fixtures/docs_corpus/06_table_alias.txt",
	          "Table alias syntax requirements: unlike standard SQL, a table alias must not be\n"
	          "introduced with the AS keyword. Write the alias directly after the table name,\n"
	          "as in FROM transactions t. The AS keyword in a table alias is a syntax error.\n");
	std::cout << "fixtures/docs_corpus written\n";
}

struct GoldenTask {
	std::string name;
	std::string question;
	std::string schema_json;
	std::string schema_rel;     // where the schema file lands
	DialectId dialect;
	int expected_exit;
};

std::vector<GoldenTask> golden_tasks() {
	std::vector<GoldenTask> tasks;
	tasks.push_back({"immediate_success", "list all usernames",
	                 json {{"tables",
	                        json::array({{{"name", "users"},
	                                      {"columns",
	                                       json::array({{{"name", "id"}, {"type", "INTEGER"}, {"samples", json::array()}},
	                                                    {{"name", "username"}, {"type", "TEXT"}, {"samples", {"alice", "bob"}}}})}}})}}
	                     .dump(2),
	                 "fixtures/tasks/users.schema.json", DialectId::SQLITE, 0});
	tasks.push_back({"rule_fix", "list all IP addresses accessed by each city",
	                 json {{"tables",
	                        json::array({{{"name", "access_log"},
	                                      {"columns",
	                                       json::array({{{"name", "city"}, {"type", "TEXT"}, {"samples", {"Lyon"}}},
	                                                    {{"name", "ip"}, {"type", "TEXT"}, {"samples", {"10.0.0.7"}}}})}}})}}
	                     .dump(2),
	                 "fixtures/tasks/access_log.schema.json", DialectId::ORACLE, 0});
	tasks.push_back({"deep_fix", "show the ten employees with the highest salaries",
	                 json {{"tables",
	                        json::array({{{"name", "employees"},
	                                      {"columns",
	                                       json::array({{{"name", "name"}, {"type", "TEXT"}, {"samples", json::array()}},
	                                                    {{"name", "salary"}, {"type", "REAL"}, {"samples", {"91000.5"}}}})}}})}}
	                     .dump(2),
	                 "fixtures/tasks/employees.schema.json", DialectId::ORACLE, 0});
	tasks.push_back({"semantic_fix", "what is the sum of completed transaction amounts",
	                 json {{"tables",
	                        json::array({{{"name", "transactions"},
	                                      {"columns",
	                                       json::array({{{"name", "amount"}, {"type", "REAL"}, {"samples", {"12.5"}}},
	                                                    {{"name", "status"}, {"type", "TEXT"}, {"samples", {"done", "open"}}}})}}})}}
	                     .dump(2),
	                 "fixtures/tasks/transactions.schema.json", DialectId::POSTGRESQL, 0});
	tasks.push_back({"budget_exhaustion", "count the days with trading volume above its average",
	                 json {{"tables",
	                        json::array({{{"name", "trades"},
	                                      {"columns",
	                                       json::array({{{"name", "volume"}, {"type", "REAL"}, {"samples", json::array()}},
	                                                    {{"name", "avg_volume"}, {"type", "REAL"}, {"samples", json::array()}}})}}})}}
	                     .dump(2),
	                 "fixtures/tasks/trades.schema.json", DialectId::MYSQL, 1});
	return tasks;
}

void write_golden_tasks() {
	auto scripted = std::make_shared<ScriptedBackend>();
	scripted->set_default_handler(scripted_reply);
	auto store = std::make_shared<FixtureStore>(path_of("fixtures/replay"));
	RecordingBackend backend(scripted, store);

	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = KnowledgeBase::load(path_of("fixtures/kb"), embedder);
	TemplateStore templates;

	json manifest = json::array();
	for (auto &task_def : golden_tasks()) {
		write_rel(task_def.schema_rel, task_def.schema_json);

		TranslationTask task;
		task.question = task_def.question;
		task.schema = SchemaCatalog::from_json(task_def.schema_json);
		task.dialect = task_def.dialect;

		SimulatedExecutor executor(task.dialect);
		AidePipeline pipeline(backend, templates, kb, executor);
		PipelineResult result = pipeline.run_pipeline(task);
		if (result.passed != (task_def.expected_exit == 0)) {
			throw DialException("golden task '" + task_def.name + "' landed on passed=" +
			                    (result.passed ? "true" : "false") + ", expected exit " +
			                    std::to_string(task_def.expected_exit));
		}
		std::string golden_path = write_trajectory(result, path_of("fixtures/golden"));
		std::cout << "golden task " << task_def.name << ": steps=" << result.trajectory.steps.size()
		          << " passed=" << result.passed
		          << " consolidations=" << result.consolidations.size() << "\n";

		manifest.push_back({
		    {"name", task_def.name},
		    {"question", task_def.question},
		    {"schema", task_def.schema_rel},
		    {"dialect", dialect_name(task_def.dialect)},
		    {"expected_exit", task_def.expected_exit},
		    {"hash", task.stable_hash()},
		    {"golden", "fixtures/golden/" + task.stable_hash() + ".json"},
		});
	}
	write_rel("fixtures/tasks/manifest.json", manifest.dump(2) + "\n");
	std::cout << "fixtures/replay + fixtures/golden + fixtures/tasks written\n";
}

void write_kb_build_replay() {
	// record the construction prompts over the docs corpus so `kb build`
	// replays offline
	std::vector<std::pair<std::string, std::string>> raw_docs;
	std::vector<fs::path> files;
	for (auto &entry : fs::directory_iterator(path_of("fixtures/docs_corpus"))) {
		files.push_back(entry.path());
	}
	std::sort(files.begin(), files.end());
	for (auto &path : files) {
		std::string ext = to_lower(path.extension().string()).substr(1);
		raw_docs.emplace_back(ext, read_file(path.string()));
	}
	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb(embedder);
	auto corpus = tag_documents(raw_docs, "oracle");
	auto mapping = map_syntax(corpus, kb.reference(), default_seed_rule_patterns(), *embedder,
	                          kb.config().tau_map);
	std::cout << "docs corpus: " << corpus.sections.size() << " sections, " << mapping.mapped.size()
	          << " mapped, " << mapping.dropped << " dropped\n";
	for (auto &m : mapping.mapped) {
		std::cout << "  section " << m.section_index << " ("
		          << corpus.sections[m.section_index].heading << ") -> "
		          << (m.track == KnowledgeTrack::FUNCTION ? "F:" + m.category + "/" + m.atomic_point
		                                                  : "R:" + m.rule_pattern)
		          << " score=" << m.score << "\n";
	}

	auto scripted = std::make_shared<ScriptedBackend>();
	scripted->set_default_handler(scripted_reply);
	auto store = std::make_shared<FixtureStore>(path_of("fixtures/replay"));
	RecordingBackend backend(scripted, store);
	TemplateStore templates;
	auto stats = generate_entries(corpus, mapping, DialectId::ORACLE, backend, templates, kb);
	std::cout << "kb-build recording: " << stats.functions_created << " F, "
	          << stats.constraints_created << " R, " << stats.skipped << " skipped\n";
}

void write_bench_mini() {
	// users schema shared with the golden tasks
	std::string users_schema =
	    json {{"tables",
	           json::array({{{"name", "users"},
	                         {"columns",
	                          json::array({{{"name", "id"}, {"type", "INTEGER"}, {"samples", json::array()}},
	                                       {{"name", "username"}, {"type", "TEXT"}, {"samples", {"alice", "bob"}}}})}}})}}
	        .dump(2);
	write_rel("fixtures/bench_mini/schemas/users.json", users_schema);
	write_rel("fixtures/bench_mini/seeds/q1.sql",
	          "CREATE TABLE users(id INTEGER, username TEXT);\n"
	          "INSERT INTO users VALUES (1, 'alice'), (2, 'bob'), (3, 'carol');\n");
	write_rel("fixtures/bench_mini/seeds/q2.sql",
	          "CREATE TABLE users(id INTEGER, username TEXT);\n"
	          "INSERT INTO users VALUES (1, 'alice'), (2, 'bob'), (3, 'carol');\n");

	json item1 = {
	    {"qid", "q1"},
	    {"question", "list all usernames"},
	    {"schema_ref", "schemas/users.json"},
	    {"gold",
	     {{"sqlite", {{"gold_sql", "SELECT username FROM users"}, {"feature_patterns", json::array()}}}}},
	    {"gold_elements", json::array({json::array({"users", "username"})})},
	};
	json item2 = {
	    {"qid", "q2"},
	    {"question", "how many users are there"},
	    {"schema_ref", "schemas/users.json"},
	    {"gold",
	     {{"sqlite",
	       {{"gold_sql", "SELECT COUNT(*) FROM users"},
	        {"feature_patterns", json::array({"\\bCOUNT\\s*\\("})}}}}},
	    {"gold_elements", json::array({json::array({"users", "username"})})},
	};
	write_rel("fixtures/bench_mini/items.jsonl", item1.dump() + "\n" + item2.dump() + "\n");

	// record the prompts the eval pipeline will issue
	auto scripted = std::make_shared<ScriptedBackend>();
	scripted->set_default_handler(scripted_reply);
	auto store = std::make_shared<FixtureStore>(path_of("fixtures/replay"));
	RecordingBackend backend(scripted, store);
	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = KnowledgeBase::load(path_of("fixtures/kb"), embedder);
	TemplateStore templates;

	for (auto &item : load_benchmark(path_of("fixtures/bench_mini"))) {
		TranslationTask task = task_for(item, path_of("fixtures/bench_mini"), DialectId::SQLITE);
		SqliteExecutor executor;
		executor.exec_script(
		    read_file(path_of("fixtures/bench_mini/seeds/" + item.qid + ".sql")));
		AidePipeline pipeline(backend, templates, kb, executor);
		PipelineResult result = pipeline.run_pipeline(task);
		std::cout << "bench item " << item.qid << ": passed=" << result.passed << "\n";
	}
	std::cout << "fixtures/bench_mini written\n";
}

} // namespace

int main(int argc, char **argv) {
	root = argc > 1 ? argv[1] : ".";
	try {
		write_templates();
		write_rule_catalog();
		write_seed_kb();
		write_docs_corpus();
		write_golden_tasks();
		write_kb_build_replay();
		write_bench_mini();
	} catch (const std::exception &e) {
		std::cerr << "fixture generation failed: " << e.what() << "\n";
		return 1;
	}
	std::cout << "all fixtures generated\n";
	return 0;
}
