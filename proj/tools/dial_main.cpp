#include <CLI11.hpp>

#include "dial/aide/pipeline.hpp"
#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/eval/benchmark.hpp"
#include "dial/eval/metrics.hpp"
#include "dial/exec/compare.hpp"
#include "dial/exec/simulator.hpp"
#include "dial/exec/sqlite_executor.hpp"
#include "dial/kb/builder.hpp"
#include "dial/kb/knowledge_base.hpp"
#include "dial/llm/backend.hpp"
#include "dial/sql/parser.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace dial;

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_DOMAIN_FAILURE = 1;
constexpr int EXIT_USAGE = 2;

// Optional ./dial.toml: flat key=value lines, '#' comments. Flags override
// file values; DIAL_* environment variables override both.
std::map<std::string, std::string> load_config_file(const std::string &path) {
	std::map<std::string, std::string> config;
	if (!fs::exists(path)) {
		return config;
	}
	for (auto &line : split(read_file(path), '\n')) {
		std::string t = trim(line);
		if (t.empty() || t[0] == '#') {
			continue;
		}
		size_t eq = t.find('=');
		if (eq == std::string::npos) {
			continue;
		}
		std::string key = trim(t.substr(0, eq));
		std::string value = trim(t.substr(eq + 1));
		// strip optional quotes
		if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
			value = value.substr(1, value.size() - 2);
		}
		config[key] = value;
	}
	return config;
}

struct CommonOptions {
	std::string kb_dir = "kb";
	std::string fixtures_dir = "fixtures/replay";
	std::string templates_dir;
	std::string out_dir = "out";
	double tau_map = 0.35;
	double tau_rule = 0.5;
	double routing_threshold = 0.75;
	size_t retrieval_k = 3;
	size_t max_syntax_iters = 5;
	size_t max_semantic_iters = 3;
};

void apply_config(CommonOptions &opts, const std::map<std::string, std::string> &config) {
	auto get = [&](const char *key, std::string &target) {
		auto it = config.find(key);
		if (it != config.end()) {
			target = it->second;
		}
	};
	get("kb_dir", opts.kb_dir);
	get("fixtures_dir", opts.fixtures_dir);
	get("templates_dir", opts.templates_dir);
	get("out_dir", opts.out_dir);
}

void apply_env(CommonOptions &opts) {
	auto get = [&](const char *name, std::string &target) {
		if (const char *v = std::getenv(name)) {
			target = v;
		}
	};
	get("DIAL_KB_DIR", opts.kb_dir);
	get("DIAL_FIXTURES_DIR", opts.fixtures_dir);
	get("DIAL_TEMPLATES_DIR", opts.templates_dir);
	get("DIAL_OUT_DIR", opts.out_dir);
}

KbConfig kb_config_of(const CommonOptions &opts) {
	KbConfig cfg;
	cfg.tau_map = opts.tau_map;
	cfg.tau_rule = opts.tau_rule;
	cfg.retrieval_k = opts.retrieval_k;
	cfg.routing_threshold = opts.routing_threshold;
	return cfg;
}

TemplateStore make_templates(const CommonOptions &opts) {
	TemplateStore store;
	if (!opts.templates_dir.empty()) {
		store.load_directory(opts.templates_dir);
	}
	return store;
}

std::string doc_format_of(const fs::path &path) {
	std::string ext = to_lower(path.extension().string());
	if (!ext.empty() && ext[0] == '.') {
		ext = ext.substr(1);
	}
	return ext;
}

int cmd_kb_build(const CommonOptions &opts, const std::string &docs_dir, const std::string &dialect_s) {
	auto dialect = dialect_from_name(dialect_s);
	if (!dialect) {
		std::cerr << "unknown dialect: " << dialect_s << "\n";
		return EXIT_USAGE;
	}
	std::vector<std::pair<std::string, std::string>> raw_docs;
	std::vector<fs::path> files;
	for (auto &entry : fs::directory_iterator(docs_dir)) {
		if (entry.is_regular_file()) {
			files.push_back(entry.path());
		}
	}
	std::sort(files.begin(), files.end());
	for (auto &path : files) {
		raw_docs.emplace_back(doc_format_of(path), read_file(path.string()));
	}

	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = fs::is_directory(opts.kb_dir) && fs::exists(fs::path(opts.kb_dir) / "csr.json")
	                       ? KnowledgeBase::load(opts.kb_dir, embedder, kb_config_of(opts))
	                       : KnowledgeBase(embedder, CanonicalReference::builtin(), kb_config_of(opts));

	auto corpus = tag_documents(raw_docs, dialect_name(*dialect));
	auto mapping = map_syntax(corpus, kb.reference(), default_seed_rule_patterns(), *embedder,
	                          kb.config().tau_map);
	TemplateStore templates = make_templates(opts);
	auto backend = backend_from_env(opts.fixtures_dir);
	auto stats = generate_entries(corpus, mapping, *dialect, *backend, templates, kb);
	kb.persist(opts.kb_dir);

	std::cout << "sections: " << corpus.sections.size() << " (" << mapping.dropped << " dropped)\n"
	          << "function entries created: " << stats.functions_created << "\n"
	          << "constraint entries created: " << stats.constraints_created << "\n"
	          << "sections skipped: " << stats.skipped << "\n"
	          << "kb written to " << opts.kb_dir << "\n";
	return EXIT_OK;
}

int cmd_kb_inspect(const CommonOptions &opts) {
	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = KnowledgeBase::load(opts.kb_dir, embedder, kb_config_of(opts));
	std::cout << "canonical categories: " << kb.reference().categories.size()
	          << " (atomic points: " << kb.reference().total_atomic_points() << ")\n";
	for (auto dialect : ALL_DIALECTS) {
		size_t f = kb.function_count(dialect);
		size_t r = kb.constraint_count(dialect);
		if (f + r > 0) {
			std::cout << dialect_name(dialect) << ": " << f << " function entries, " << r
			          << " constraint entries\n";
		}
	}
	std::cout << "total: " << kb.function_count() << " F + " << kb.constraint_count() << " R\n";
	return EXIT_OK;
}

int cmd_translate(const CommonOptions &opts, const std::string &question, const std::string &schema_path,
                  const std::string &dialect_s, const AblationFlags &flags, bool redact) {
	auto dialect = dialect_from_name(dialect_s);
	if (!dialect) {
		std::cerr << "unknown dialect: " << dialect_s << "\n";
		return EXIT_USAGE;
	}
	TranslationTask task;
	task.question = question;
	task.schema = SchemaCatalog::load_file(schema_path);
	task.dialect = *dialect;

	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = fs::is_directory(opts.kb_dir)
	                       ? KnowledgeBase::load(opts.kb_dir, embedder, kb_config_of(opts))
	                       : KnowledgeBase(embedder, CanonicalReference::builtin(), kb_config_of(opts));
	TemplateStore templates = make_templates(opts);
	auto backend = backend_from_env(opts.fixtures_dir);
	SimulatedExecutor executor(*dialect);

	DebugConfig cfg;
	cfg.max_syntax_iters = opts.max_syntax_iters;
	cfg.max_semantic_iters = opts.max_semantic_iters;
	AidePipeline pipeline(*backend, templates, kb, executor, cfg, flags);

	PipelineResult result = pipeline.run_pipeline(task);
	std::string path = write_trajectory(result, opts.out_dir, redact);
	std::cout << result.best.text << "\n";
	std::cerr << "trajectory: " << path << "\n";
	if (!result.passed) {
		std::cerr << "failed: " << result.failure_reason << "\n";
		return EXIT_DOMAIN_FAILURE;
	}
	return EXIT_OK;
}

int cmd_simulate_check(const std::string &dialect_s, const std::string &sql_file) {
	auto dialect = dialect_from_name(dialect_s);
	if (!dialect) {
		std::cerr << "unknown dialect: " << dialect_s << "\n";
		return EXIT_USAGE;
	}
	SqlText sql {read_file(sql_file), *dialect};
	DialectSimulator simulator;
	auto outcome = simulator.simulate(sql);
	if (outcome.success) {
		return EXIT_OK;
	}
	const ErrorTrace &trace = *outcome.trace;
	// identify the catalog rule by re-running detectors (parse errors carry none)
	std::string rule_id = "syntax";
	try {
		if (auto v = simulator.first_violation(sql)) {
			rule_id = v->rule_id;
		}
	} catch (const ParseException &) {
	}
	std::cout << rule_id << " [" << trace.segment_begin << "," << trace.segment_end << ") "
	          << trace.message << "\n";
	return EXIT_DOMAIN_FAILURE;
}

int cmd_eval(const CommonOptions &opts, const std::string &bench_dir, const std::string &dialects_csv,
             size_t jobs, const AblationFlags &flags) {
	auto items = load_benchmark(bench_dir);
	std::vector<DialectId> evaluated;
	if (dialects_csv.empty()) {
		// dialects present on every item
		std::set<DialectId> common;
		bool first = true;
		for (auto &item : items) {
			std::set<DialectId> here;
			for (auto &[d, g] : item.gold) {
				here.insert(d);
			}
			if (first) {
				common = here;
				first = false;
			} else {
				std::set<DialectId> inter;
				for (auto d : common) {
					if (here.count(d)) {
						inter.insert(d);
					}
				}
				common = inter;
			}
		}
		evaluated.assign(common.begin(), common.end());
	} else {
		for (auto &name : split(dialects_csv, ',')) {
			auto d = dialect_from_name(trim(name));
			if (!d) {
				std::cerr << "unknown dialect: " << name << "\n";
				return EXIT_USAGE;
			}
			evaluated.push_back(*d);
		}
	}
	if (evaluated.empty()) {
		std::cerr << "no common dialect across items; pass --dialects\n";
		return EXIT_USAGE;
	}

	auto embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb = fs::is_directory(opts.kb_dir)
	                       ? KnowledgeBase::load(opts.kb_dir, embedder, kb_config_of(opts))
	                       : KnowledgeBase(embedder, CanonicalReference::builtin(), kb_config_of(opts));
	TemplateStore templates = make_templates(opts);
	auto backend = backend_from_env(opts.fixtures_dir);

	struct WorkUnit {
		const BenchmarkItem *item;
		DialectId dialect;
	};
	std::vector<WorkUnit> units;
	for (auto &item : items) {
		for (auto d : evaluated) {
			if (item.gold.count(d)) {
				units.push_back({&item, d});
			}
		}
	}

	std::map<std::string, std::map<DialectId, ItemOutcome>> outcomes;
	std::mutex outcomes_lock;
	std::atomic<size_t> next {0};

	auto worker = [&]() {
		while (true) {
			size_t i = next.fetch_add(1);
			if (i >= units.size()) {
				return;
			}
			auto &unit = units[i];
			ItemOutcome out;
			try {
				TranslationTask task = task_for(*unit.item, bench_dir, unit.dialect);
				const DialectGold &gold = unit.item->gold.at(unit.dialect);

				// embedded engine (with optional seed script) when available,
				// simulator otherwise
				std::unique_ptr<Executor> executor;
				std::string seed_path =
				    (fs::path(bench_dir) / "seeds" / (unit.item->qid + ".sql")).string();
				if (unit.dialect == DialectId::SQLITE && fs::exists(seed_path)) {
					auto sqlite = std::make_unique<SqliteExecutor>();
					sqlite->exec_script(read_file(seed_path));
					executor = std::move(sqlite);
				} else {
					executor = std::make_unique<SimulatedExecutor>(unit.dialect);
				}

				DebugConfig cfg;
				cfg.max_syntax_iters = opts.max_syntax_iters;
				cfg.max_semantic_iters = opts.max_semantic_iters;
				AidePipeline pipeline(*backend, templates, kb, *executor, cfg, flags);
				PipelineResult result = pipeline.run_pipeline(task);

				SqlText got {result.best.text, unit.dialect};
				SqlText gold_sql {gold.gold_sql, unit.dialect};
				auto got_outcome = executor->execute(got);
				auto gold_outcome = executor->execute(gold_sql);
				out.exec = got_outcome.success;
				bool order_sensitive = false;
				try {
					auto gold_stmt = parse_select(gold.gold_sql, profile_for(unit.dialect));
					order_sensitive = !gold_stmt->order_by.empty();
				} catch (const ParseException &) {
				}
				out.acc = got_outcome.success && gold_outcome.success &&
				          compare_result_sets(got_outcome.rows.value_or(RowTable {}),
				                              gold_outcome.rows.value_or(RowTable {}),
				                              order_sensitive);
				out.dfc = score_dfc(result.best.text, gold.gold_sql, gold.feature_patterns);
				write_trajectory(result, (fs::path(opts.out_dir) / "trajectories").string());
			} catch (const std::exception &e) {
				out.exec = false;
				out.acc = false;
				std::lock_guard<std::mutex> guard(outcomes_lock);
				std::cerr << unit.item->qid << "/" << dialect_name(unit.dialect)
				          << " errored: " << e.what() << "\n";
			}
			std::lock_guard<std::mutex> guard(outcomes_lock);
			outcomes[unit.item->qid][unit.dialect] = out;
		}
	};

	size_t worker_count = std::max<size_t>(1, std::min(jobs, units.size()));
	std::vector<std::thread> pool;
	for (size_t i = 0; i < worker_count; i++) {
		pool.emplace_back(worker);
	}
	for (auto &t : pool) {
		t.join();
	}

	// items missing a dialect outcome cannot enter the strict overall set
	for (auto it = outcomes.begin(); it != outcomes.end();) {
		bool complete = true;
		for (auto d : evaluated) {
			complete = complete && it->second.count(d) > 0;
		}
		it = complete ? std::next(it) : outcomes.erase(it);
	}

	MetricsReport report = build_report(outcomes, evaluated);
	fs::create_directories(opts.out_dir);
	write_file((fs::path(opts.out_dir) / "report.json").string(), report.to_json());
	write_file((fs::path(opts.out_dir) / "report.md").string(), report.to_markdown());
	std::cout << report.to_markdown();
	return EXIT_OK;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app {"dial: dialect-specific NL2SQL engine"};
	app.require_subcommand(1);
	app.fallthrough(); // parent-level flags may follow the subcommand

	CommonOptions opts;
	apply_config(opts, load_config_file("dial.toml"));

	app.add_option("--kb", opts.kb_dir, "knowledge base directory");
	app.add_option("--fixtures", opts.fixtures_dir, "replay/record fixture store directory");
	app.add_option("--templates", opts.templates_dir, "prompt template directory override");
	app.add_option("--out", opts.out_dir, "output directory");
	app.add_option("--tau-map", opts.tau_map, "construction mapping threshold");
	app.add_option("--tau-rule", opts.tau_rule, "fuzzy rule retrieval threshold");
	app.add_option("--routing-threshold", opts.routing_threshold,
	               "consolidation routing boundary (0.75 is the method default; overriding deviates)");
	app.add_option("--retrieval-k", opts.retrieval_k, "function templates retrieved per operator");
	app.add_option("--max-syntax-iters", opts.max_syntax_iters, "syntactic recovery budget");
	app.add_option("--max-semantic-iters", opts.max_semantic_iters, "semantic verification budget");

	AblationFlags flags;
	app.add_flag("--no-planning", flags.no_planning, "disable logical query planning (direct generation)");
	app.add_flag("--no-kb-retrieval", flags.no_retrieval, "disable knowledge-base retrieval");
	app.add_flag("--no-correction", flags.no_correction, "disable the repair-and-verify loop");

	auto *kb_cmd = app.add_subcommand("kb", "knowledge base operations");
	kb_cmd->require_subcommand(1);
	auto *kb_build = kb_cmd->add_subcommand("build", "build the KB from a documentation directory");
	std::string docs_dir, dialect_s;
	kb_build->add_option("--docs", docs_dir, "documentation directory")->required();
	kb_build->add_option("--dialect", dialect_s, "target dialect")->required();
	auto *kb_inspect = kb_cmd->add_subcommand("inspect", "print KB statistics");

	auto *translate = app.add_subcommand("translate", "translate one question");
	std::string question, schema_path;
	bool redact = false;
	translate->add_option("--question", question, "natural-language question")->required();
	translate->add_option("--schema", schema_path, "schema catalog JSON file")->required();
	translate->add_option("--dialect", dialect_s, "target dialect")->required();
	translate->add_flag("--redact", redact, "redact prompts/replies in the trajectory dump");

	auto *eval = app.add_subcommand("eval", "run a benchmark evaluation");
	std::string bench_dir, dialects_csv;
	size_t jobs = std::max(1u, std::thread::hardware_concurrency());
	eval->add_option("--bench", bench_dir, "benchmark directory")->required();
	eval->add_option("--dialects", dialects_csv, "comma-separated dialect list");
	eval->add_option("--jobs", jobs, "worker pool size");

	auto *simulate_check = app.add_subcommand("simulate-check", "lint a SQL file against a dialect");
	std::string sql_file;
	simulate_check->add_option("--dialect", dialect_s, "target dialect")->required();
	simulate_check->add_option("file", sql_file, "SQL file")->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return EXIT_USAGE;
	}

	apply_env(opts);

	try {
		if (kb_build->parsed()) {
			return cmd_kb_build(opts, docs_dir, dialect_s);
		}
		if (kb_inspect->parsed()) {
			return cmd_kb_inspect(opts);
		}
		if (translate->parsed()) {
			return cmd_translate(opts, question, schema_path, dialect_s, flags, redact);
		}
		if (eval->parsed()) {
			return cmd_eval(opts, bench_dir, dialects_csv, jobs, flags);
		}
		if (simulate_check->parsed()) {
			return cmd_simulate_check(dialect_s, sql_file);
		}
	} catch (const DialException &e) {
		std::cerr << "error: " << e.what() << "\n";
		return EXIT_DOMAIN_FAILURE;
	} catch (const std::exception &e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return EXIT_DOMAIN_FAILURE;
	}
	return EXIT_USAGE;
}
