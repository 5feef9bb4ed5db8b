#include <doctest.h>

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/kb/builder.hpp"
#include "dial/kb/knowledge_base.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

using namespace dial;

namespace {

std::shared_ptr<HashingEmbedder> embedder() {
	static auto e = std::make_shared<HashingEmbedder>();
	return e;
}

FunctionEntry make_function(DialectId dialect, const std::string &category,
                            std::vector<std::string> scenarios, const std::string &spec,
                            const std::string &impl) {
	FunctionEntry e;
	e.dialect = dialect;
	e.category = category;
	e.scenarios = std::move(scenarios);
	e.specification = spec;
	e.implementation = impl;
	return e;
}

std::string temp_dir(const std::string &tag) {
	auto dir = std::filesystem::temp_directory_path() / ("dial_kb_" + tag);
	std::filesystem::remove_all(dir);
	std::filesystem::create_directories(dir);
	return dir.string();
}

} // namespace

TEST_CASE("builtin canonical reference satisfies its structural contract") {
	auto &csr = CanonicalReference::builtin();
	CHECK(csr.validate().empty());
	CHECK(csr.categories.size() == 11);
	CHECK(csr.total_atomic_points() >= 40);
	for (auto &c : csr.categories) {
		if (c.name == "Date & Time Operations") {
			CHECK(c.atomic_points.size() == 6);
		}
	}
	// json round trip
	auto round = CanonicalReference::from_json(csr.to_json());
	CHECK(round == csr);
}

TEST_CASE("function entry embeddings are unit-norm at insert") {
	KnowledgeBase kb(embedder());
	kb.add_function(make_function(DialectId::MYSQL, "Date & Time Operations",
	                              {"interval between two dates in years"},
	                              "difference between two dates in years",
	                              "TIMESTAMPDIFF(YEAR, a, b)"));
	auto entries = kb.functions_snapshot();
	REQUIRE(entries.size() == 1);
	CHECK(std::fabs(l2_norm(entries[0].embedding) - 1.0) <= 1e-6);
}

TEST_CASE("intent retrieval ranks the matching implementation first") {
	KnowledgeBase kb(embedder());
	kb.add_function(make_function(DialectId::MYSQL, "Date & Time Operations",
	                              {"calculating age in years", "interval between two dates in years"},
	                              "difference between two dates in years",
	                              "TIMESTAMPDIFF(YEAR, start_date, end_date)"));
	kb.add_function(make_function(DialectId::MYSQL, "String Manipulation",
	                              {"slicing text by position"}, "extract a substring",
	                              "SUBSTRING(s, start, len)"));
	kb.add_function(make_function(DialectId::POSTGRESQL, "Date & Time Operations",
	                              {"calculating age"}, "date difference in years", "AGE(a, b)"));

	auto hits = kb.retrieve_functions("Date & Time Operations",
	                                  "interval between two dates in years", DialectId::MYSQL, 3);
	REQUIRE_FALSE(hits.empty());
	CHECK(hits[0].implementation == "TIMESTAMPDIFF(YEAR, start_date, end_date)");
	// dialect filter: postgres entry never appears
	for (auto &h : hits) {
		CHECK(h.dialect == DialectId::MYSQL);
	}
}

TEST_CASE("self-retrieval scores cosine 1.0 and k caps the result") {
	KnowledgeBase kb(embedder());
	auto entry = make_function(DialectId::ORACLE, "String Manipulation", {"slice a string"},
	                           "substring extraction", "SUBSTR(s, i, n)");
	kb.add_function(entry);
	// query equal to the entry's own indexed text
	std::string description = join(entry.scenarios, "; ") + " | " + entry.specification;
	auto query_vec = embedder()->embed("String Manipulation | " + description);
	auto stored = kb.functions_snapshot()[0];
	CHECK(cosine_similarity(query_vec, stored.embedding) == doctest::Approx(1.0).epsilon(1e-9));

	auto hits = kb.retrieve_functions("String Manipulation", description, DialectId::ORACLE, 1);
	REQUIRE(hits.size() == 1);
	CHECK(hits[0].id == stored.id);

	// k larger than the repository returns everything, still sorted
	auto all = kb.retrieve_functions("String Manipulation", description, DialectId::ORACLE, 50);
	CHECK(all.size() == 1);
}

TEST_CASE("retrieval on an empty dialect repository throws") {
	KnowledgeBase kb(embedder());
	CHECK_THROWS_AS(kb.retrieve_functions("String Manipulation", "anything", DialectId::DUCKDB, 3),
	                EmptyRepositoryException);
}

TEST_CASE("storage is keyed by intent, not raw phrasing") {
	KnowledgeBase kb(embedder());
	kb.add_function(make_function(DialectId::MYSQL, "Date & Time Operations",
	                              {"interval between dates"}, "date difference in years",
	                              "TIMESTAMPDIFF(YEAR, a, b)"));
	kb.add_function(make_function(DialectId::MYSQL, "String Manipulation", {"text slicing"},
	                              "substring extraction", "SUBSTRING(s, i, n)"));
	// identical (category, standard_description) queries return identical results
	auto first = kb.retrieve_functions("Date & Time Operations", "years between two dates",
	                                   DialectId::MYSQL, 2);
	auto second = kb.retrieve_functions("Date & Time Operations", "years between two dates",
	                                    DialectId::MYSQL, 2);
	REQUIRE(first.size() == second.size());
	for (size_t i = 0; i < first.size(); i++) {
		CHECK(first[i].id == second[i].id);
	}
}

TEST_CASE("rule retrieval: exact signature pattern beats fuzzy, ties break by id") {
	KnowledgeBase kb(embedder());
	ConstraintEntry a;
	a.dialect = DialectId::MYSQL;
	a.rule_spec = "scalar subquery operands must contain exactly one column";
	a.signature_patterns = {"*1241*"};
	a.id = "r-mysql-bbb";
	kb.add_constraint(a);
	ConstraintEntry b;
	b.dialect = DialectId::MYSQL;
	b.rule_spec = "another rule that also matches the same code";
	b.signature_patterns = {"*1241*"};
	b.id = "r-mysql-aaa";
	kb.add_constraint(b);

	ErrorTrace trace;
	trace.message = "ERROR 1241 (21000): Operand should contain 1 column(s)";
	auto sig = normalize_signature(trace, DialectId::MYSQL);
	auto hit = kb.retrieve_rules(sig, "WHERE x = (SELECT a, b FROM t)", DialectId::MYSQL);
	REQUIRE(hit.has_value());
	CHECK(hit->id == "r-mysql-aaa"); // deterministic tie-break, lower id

	// no pattern and below-threshold fuzzy: none
	ErrorTrace other;
	other.message = "completely unrelated parser banter about widgets";
	auto sig2 = normalize_signature(other, DialectId::MYSQL);
	auto miss = kb.retrieve_rules(sig2, "", DialectId::MYSQL);
	CHECK_FALSE(miss.has_value());
}

TEST_CASE("fuzzy rule retrieval clears tau_rule on wording overlap") {
	KnowledgeBase kb(embedder());
	ConstraintEntry e;
	e.dialect = DialectId::POSTGRESQL;
	e.rule_spec = "derived tables in the FROM clause must carry an alias";
	kb.add_constraint(e);

	ErrorTrace trace;
	trace.message = "subquery in FROM must have an alias";
	auto sig = normalize_signature(trace, DialectId::POSTGRESQL);
	auto hit = kb.retrieve_rules(sig, "FROM (SELECT qty FROM orders) derived tables alias",
	                             DialectId::POSTGRESQL);
	REQUIRE(hit.has_value());
	CHECK(hit->rule_spec == e.rule_spec);
}

// ---------------------------------------------------------------------------
// routing
// ---------------------------------------------------------------------------

namespace {

// Engineered two-text embedder: returns fixed unit vectors so the routing
// similarity is exactly the configured value.
class PairEmbedder : public EmbeddingProvider {
public:
	PairEmbedder(std::string g_text, double target_cosine)
	    : g_text(std::move(g_text)), target(target_cosine) {
	}

	std::vector<double> embed(const std::string &text) const override {
		std::vector<double> v(4, 0.0);
		if (text == g_text) {
			v[0] = 1.0;
		} else {
			v[0] = target;
			v[1] = std::sqrt(std::max(0.0, 1.0 - target * target));
		}
		return v;
	}
	size_t dimension() const override {
		return 4;
	}

private:
	std::string g_text;
	double target;
};

KnowledgePrimitive sample_primitive(DialectId dialect = DialectId::ORACLE) {
	KnowledgePrimitive g;
	g.incorrect_pattern = "calling the grouped concat function on <table>";
	g.corrective_exemplar = "SELECT LISTAGG(ip, ',') WITHIN GROUP (ORDER BY ip) FROM access_log";
	g.root_cause = "the engine only supports its native listing aggregate";
	g.dialect = dialect;
	return g;
}

double route_at(double target_cosine, bool &to_function) {
	auto g = sample_primitive();
	std::string g_text = g.incorrect_pattern + "\n" + g.root_cause;
	auto pair_embedder = std::make_shared<PairEmbedder>(g_text, target_cosine);
	KnowledgeBase kb(pair_embedder);
	auto decision = kb.route_primitive(g, "serialized plan text", "Aggregation & Grouping");
	to_function = decision.to_function;
	return decision.similarity;
}

} // namespace

TEST_CASE("routing boundary is inclusive at the threshold") {
	bool to_function = false;
	CHECK(route_at(1.0, to_function) == doctest::Approx(1.0));
	CHECK(to_function);
	CHECK(route_at(0.75, to_function) >= 0.75);
	CHECK(to_function);
	CHECK(route_at(0.74, to_function) < 0.75);
	CHECK_FALSE(to_function);
	CHECK(route_at(0.0, to_function) == doctest::Approx(0.0));
	CHECK_FALSE(to_function);
}

TEST_CASE("routed entries materialize correctly on both sides") {
	auto g = sample_primitive();
	std::string g_text = g.incorrect_pattern + "\n" + g.root_cause;

	SUBCASE("high similarity lands in F_Func") {
		KnowledgeBase kb(std::make_shared<PairEmbedder>(g_text, 0.9));
		auto decision = kb.route_primitive(g, "plan", "Aggregation & Grouping");
		CHECK(decision.to_function);
		auto entries = kb.functions_snapshot();
		REQUIRE(entries.size() == 1);
		CHECK(entries[0].implementation == g.corrective_exemplar);
		CHECK(entries[0].origin == EntryOrigin::CONSOLIDATED);
		CHECK(entries[0].category == "Aggregation & Grouping");
	}
	SUBCASE("low similarity lands in R_Rule with the contrastive case") {
		KnowledgeBase kb(std::make_shared<PairEmbedder>(g_text, 0.2));
		auto decision = kb.route_primitive(g, "plan", "Aggregation & Grouping");
		CHECK_FALSE(decision.to_function);
		auto entries = kb.constraints_snapshot();
		REQUIRE(entries.size() == 1);
		CHECK(entries[0].rule_spec == g.incorrect_pattern);
		REQUIRE(entries[0].cases.size() == 1);
		CHECK(entries[0].cases[0].erroneous == g.incorrect_pattern);
		CHECK(entries[0].cases[0].correct == g.corrective_exemplar);
		CHECK(entries[0].origin == EntryOrigin::CONSOLIDATED);
	}
}

TEST_CASE("routing decision is invariant to prior consolidations") {
	auto g = sample_primitive();
	std::string g_text = g.incorrect_pattern + "\n" + g.root_cause;
	KnowledgeBase kb(std::make_shared<PairEmbedder>(g_text, 0.3));
	// unrelated consolidations first
	KnowledgePrimitive other;
	other.incorrect_pattern = "some other pattern";
	other.corrective_exemplar = "SELECT 1 FROM DUAL";
	other.root_cause = "padding entry";
	other.dialect = DialectId::ORACLE;
	kb.route_primitive(other, "plan", "AUX");
	auto decision = kb.route_primitive(g, "plan", "AUX");
	CHECK_FALSE(decision.to_function);
	CHECK(decision.similarity == doctest::Approx(0.3));
}

TEST_CASE("duplicate consolidated entries merge by appending cases only") {
	auto g = sample_primitive();
	std::string g_text = g.incorrect_pattern + "\n" + g.root_cause;
	KnowledgeBase kb(std::make_shared<PairEmbedder>(g_text, 0.1));
	auto first = kb.route_primitive(g, "plan", "AUX");
	// same rule_spec, different exemplar: merged, case appended
	auto g2 = g;
	g2.corrective_exemplar = "SELECT LISTAGG(host, ';') WITHIN GROUP (ORDER BY host) FROM machines";
	auto second = kb.route_primitive(g2, "plan", "AUX");
	CHECK(first.entry_id == second.entry_id);
	auto entries = kb.constraints_snapshot();
	REQUIRE(entries.size() == 1);
	CHECK(entries[0].cases.size() == 2);
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

TEST_CASE("empty KB round trip") {
	auto dir = temp_dir("empty");
	KnowledgeBase kb(embedder());
	kb.persist(dir);
	auto loaded = KnowledgeBase::load(dir, embedder());
	CHECK(loaded.function_count() == 0);
	CHECK(loaded.constraint_count() == 0);
	CHECK(loaded.reference() == kb.reference());
}

TEST_CASE("populated KB round trip is deep-equal") {
	auto dir = temp_dir("full");
	KnowledgeBase kb(embedder());
	kb.add_function(make_function(DialectId::ORACLE, "String Manipulation", {"s1"}, "spec1", "I1(x)"));
	kb.add_function(make_function(DialectId::MYSQL, "Date & Time Operations", {"s2"}, "spec2", "I2(x)"));
	kb.add_function(make_function(DialectId::DUCKDB, "Window Functions", {"s3"}, "spec3", "I3(x)"));
	ConstraintEntry r1;
	r1.dialect = DialectId::POSTGRESQL;
	r1.rule_spec = "rule one";
	r1.signature_patterns = {"*42*"};
	kb.add_constraint(r1);
	ConstraintEntry r2;
	r2.dialect = DialectId::ORACLE;
	r2.rule_spec = "rule two";
	r2.cases = {{"bad", "good"}};
	r2.origin = EntryOrigin::CONSOLIDATED;
	kb.add_constraint(r2);

	kb.persist(dir);
	auto loaded = KnowledgeBase::load(dir, embedder());
	// deep structural equality oracle over snapshots
	CHECK(loaded.functions_snapshot() == kb.functions_snapshot());
	CHECK(loaded.constraints_snapshot() == kb.constraints_snapshot());
}

TEST_CASE("a malformed jsonl line reports its line number") {
	auto dir = temp_dir("corrupt");
	KnowledgeBase kb(embedder());
	kb.add_function(make_function(DialectId::ORACLE, "String Manipulation", {"s"}, "spec", "IMPL(x)"));
	kb.persist(dir);
	// append garbage as line 2
	auto path = dir + "/f_func.jsonl";
	write_file(path, read_file(path) + "this is not json\n");
	try {
		KnowledgeBase::load(dir, embedder());
		FAIL("expected CorruptRecordException");
	} catch (const CorruptRecordException &e) {
		CHECK(e.line_number == 2);
	}
}

// ---------------------------------------------------------------------------
// construction pipeline
// ---------------------------------------------------------------------------

TEST_CASE("markdown tagging: one section per heading") {
	std::string md = "## First\nbody one\n## Second\nbody two\n## Third\nbody three\n";
	auto corpus = tag_documents({{"md", md}}, "oracle");
	REQUIRE(corpus.sections.size() == 3);
	CHECK(corpus.sections[0].heading == "First");
	CHECK(corpus.sections[2].body.find("body three") != std::string::npos);
	// merged doc wraps every section in dialect tags
	auto merged = corpus.merged();
	size_t opens = 0, pos = 0;
	while ((pos = merged.find("<oracle>", pos)) != std::string::npos) {
		opens++;
		pos++;
	}
	CHECK(opens == 3);
}

TEST_CASE("empty input yields an empty corpus") {
	auto corpus = tag_documents({}, "mysql");
	CHECK(corpus.sections.empty());
	CHECK(corpus.merged().empty());
}

TEST_CASE("html with nested sections flattens in document order") {
	std::string html =
	    "<html><body>"
	    "<section><h1>Outer</h1><p>outer text</p>"
	    "<section><h2>Inner</h2><p>inner text</p></section></section>"
	    "<h2>Tail</h2><p>tail text</p>"
	    "</body></html>";
	auto corpus = tag_documents({{"html", html}}, "oracle");
	// reference walk order: Outer, Inner, Tail (section shells without own
	// content drop out)
	std::vector<std::string> headings;
	for (auto &s : corpus.sections) {
		if (!s.heading.empty()) {
			headings.push_back(s.heading);
		}
	}
	REQUIRE(headings.size() == 3);
	CHECK(headings[0] == "Outer");
	CHECK(headings[1] == "Inner");
	CHECK(headings[2] == "Tail");
}

TEST_CASE("unsupported format is rejected") {
	CHECK_THROWS_AS(tag_documents({{"pdf", "binary"}}, "oracle"), UnsupportedFormatException);
}

TEST_CASE("dual-track mapping routes functions and constraints") {
	TaggedCorpus corpus;
	corpus.dialect_tag = "oracle";
	corpus.sections.push_back(
	    {"SUBSTR", "SUBSTR extracts a substring from a string value by position and length."});
	corpus.sections.push_back(
	    {"Identifier quoting",
	     "identifiers containing uppercase letters must be enclosed in double quotes; this is an "
	     "identifier quoting requirement for reserved keywords and mixed case names"});
	corpus.sections.push_back({"Noise", "zygote umbra flotsam quark entirely unrelated prose"});

	HashingEmbedder embed;
	auto result = map_syntax(corpus, CanonicalReference::builtin(), default_seed_rule_patterns(),
	                         embed, 0.35);
	REQUIRE(result.mapped.size() >= 2);
	bool substr_to_function = false, quoting_to_rule = false;
	for (auto &m : result.mapped) {
		if (m.section_index == 0 && m.track == KnowledgeTrack::FUNCTION &&
		    m.category == "String Manipulation") {
			substr_to_function = true;
		}
		if (m.section_index == 1 && m.track == KnowledgeTrack::RULE) {
			quoting_to_rule = true;
		}
	}
	CHECK(substr_to_function);
	CHECK(quoting_to_rule);
	// the unrelated section is dropped
	CHECK(result.dropped >= 1);
}

TEST_CASE("generate_entries populates both repositories and honors contrastive cues") {
	TaggedCorpus corpus;
	corpus.dialect_tag = "postgresql";
	corpus.sections.push_back(
	    {"AGE", "AGE computes the interval between two timestamps, used for calculating age."});
	corpus.sections.push_back(
	    {"Alias rule", "table aliases must use the AS keyword in this engine"});
	corpus.sections.push_back(
	    {"Quoting", "unlike standard SQL, string comparisons here must be quoted as single-quote "
	                "literals only"});

	MappingResult mapping;
	mapping.mapped.push_back({0, KnowledgeTrack::FUNCTION, "Date & Time Operations",
	                          "Interval Arithmetic", "", 0.9});
	mapping.mapped.push_back({1, KnowledgeTrack::RULE, "", "", "table alias syntax", 0.8});
	// mapped to F, but its contrastive phrasing must force the R track
	mapping.mapped.push_back({2, KnowledgeTrack::FUNCTION, "Identifier & Literal Quoting",
	                          "String Literal Quoting", "", 0.7});

	ScriptedBackend llm;
	llm.prime("kb_func_entry", "SCENARIOS: calculating age\nSPEC: date difference in years\nIMPL: AGE(a, b)");
	llm.prime("kb_rule_entry", "RULE: table aliases must use the AS keyword");
	llm.prime("kb_rule_entry", "RULE: string literals must use single quotes");

	auto kb_embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb(kb_embedder);
	TemplateStore templates;
	auto stats = generate_entries(corpus, mapping, DialectId::POSTGRESQL, llm, templates, kb);

	CHECK(stats.functions_created == 1);
	CHECK(stats.constraints_created == 2);
	CHECK(stats.skipped == 0);
	auto functions = kb.functions_snapshot();
	REQUIRE(functions.size() == 1);
	CHECK(functions[0].scenarios == std::vector<std::string> {"calculating age"});
	CHECK(functions[0].specification == "date difference in years");
	CHECK(functions[0].implementation == "AGE(a, b)");
	// construction-time constraints carry no cases
	for (auto &entry : kb.constraints_snapshot()) {
		CHECK(entry.cases.empty());
	}
}

TEST_CASE("malformed generation replies retry then skip the section") {
	TaggedCorpus corpus;
	corpus.dialect_tag = "oracle";
	corpus.sections.push_back({"Broken", "section text"});
	MappingResult mapping;
	mapping.mapped.push_back({0, KnowledgeTrack::FUNCTION, "String Manipulation",
	                          "Substring Extraction", "", 0.9});
	ScriptedBackend llm;
	llm.prime("kb_func_entry", "nonsense");
	llm.prime("kb_func_entry", "more nonsense");
	llm.prime("kb_func_entry", "still nonsense");
	auto kb_embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb(kb_embedder);
	TemplateStore templates;
	auto stats = generate_entries(corpus, mapping, DialectId::ORACLE, llm, templates, kb);
	CHECK(stats.functions_created == 0);
	CHECK(stats.skipped == 1);
	REQUIRE(stats.skipped_sections.size() == 1);
	CHECK(stats.skipped_sections[0] == "Broken");
}

TEST_CASE("ranking is totally ordered: identical scores break ties by id") {
	KnowledgeBase kb(embedder());
	// two entries with identical index text and therefore identical embeddings
	auto a = make_function(DialectId::ORACLE, "String Manipulation", {"same scenario"},
	                       "same specification", "IMPL_B(x)");
	a.id = "f-oracle-bbb";
	kb.add_function(a);
	auto b = make_function(DialectId::ORACLE, "String Manipulation", {"same scenario"},
	                       "same specification", "IMPL_A(x)");
	b.id = "f-oracle-aaa";
	kb.add_function(b);
	for (int round = 0; round < 3; round++) {
		auto hits = kb.retrieve_functions("String Manipulation", "same scenario | same specification",
		                                  DialectId::ORACLE, 2);
		REQUIRE(hits.size() == 2);
		CHECK(hits[0].id == "f-oracle-aaa");
		CHECK(hits[1].id == "f-oracle-bbb");
	}
}

TEST_CASE("concurrent reads with serialized consolidation commits") {
	auto kb_embedder = std::make_shared<HashingEmbedder>();
	KnowledgeBase kb(kb_embedder);
	kb.add_function(make_function(DialectId::ORACLE, "String Manipulation", {"slice a string"},
	                              "substring extraction", "SUBSTR(s, i, n)"));

	constexpr int THREADS = 8;
	constexpr int ROUNDS = 25;
	std::vector<std::thread> pool;
	std::atomic<int> retrieval_errors {0};
	for (int t = 0; t < THREADS; t++) {
		pool.emplace_back([&, t]() {
			for (int r = 0; r < ROUNDS; r++) {
				try {
					auto hits = kb.retrieve_functions("String Manipulation", "slice a string",
					                                  DialectId::ORACLE, 3);
					if (hits.empty()) {
						retrieval_errors++;
					}
				} catch (...) {
					retrieval_errors++;
				}
				if (r % 5 == 0) {
					KnowledgePrimitive g;
					g.incorrect_pattern = "pattern " + std::to_string(t) + "-" + std::to_string(r);
					g.corrective_exemplar = "SELECT fixed_" + std::to_string(t) + " FROM x";
					g.root_cause = "cause " + std::to_string(t);
					g.dialect = DialectId::ORACLE;
					kb.route_primitive(g, "some plan text", "AUX");
				}
			}
		});
	}
	for (auto &th : pool) {
		th.join();
	}
	CHECK(retrieval_errors.load() == 0);
	// every distinct primitive landed exactly once: 1 seeded entry plus one
	// consolidation per (thread, round % 5 == 0) combination
	size_t consolidations_per_thread = ROUNDS / 5;
	CHECK(kb.function_count() + kb.constraint_count() ==
	      1 + THREADS * consolidations_per_thread);
}

TEST_CASE("entry invariants are enforced at insert") {
	KnowledgeBase kb(embedder());
	FunctionEntry no_impl = make_function(DialectId::ORACLE, "String Manipulation", {"s"}, "spec", "");
	CHECK_THROWS_AS(kb.add_function(no_impl), DialException);
	FunctionEntry no_scenarios = make_function(DialectId::ORACLE, "String Manipulation", {}, "spec", "I(x)");
	CHECK_THROWS_AS(kb.add_function(no_scenarios), DialException);
	ConstraintEntry empty_rule;
	empty_rule.dialect = DialectId::MYSQL;
	CHECK_THROWS_AS(kb.add_constraint(empty_rule), DialException);
	ConstraintEntry half_case;
	half_case.dialect = DialectId::MYSQL;
	half_case.rule_spec = "a rule";
	half_case.cases = {{"bad", ""}};
	CHECK_THROWS_AS(kb.add_constraint(half_case), DialException);
}
