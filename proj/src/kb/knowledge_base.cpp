#include "dial/kb/knowledge_base.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>

namespace dial {

namespace fs = std::filesystem;

KnowledgeBase::KnowledgeBase(std::shared_ptr<EmbeddingProvider> embedder_p, CanonicalReference csr_p,
                             KbConfig config)
    : embedder(std::move(embedder_p)), csr(std::move(csr_p)), cfg(config) {
}

namespace {

std::string normalize_text_key(const std::string &s) {
	return join(word_tokens(s), " ");
}

} // namespace

std::string function_entry_id(DialectId dialect, const std::string &implementation) {
	return "f-" + dialect_name(dialect) + "-" + fnv1a_hex(normalize_text_key(implementation));
}

std::string constraint_entry_id(DialectId dialect, const std::string &rule_spec) {
	return "r-" + dialect_name(dialect) + "-" + fnv1a_hex(normalize_text_key(rule_spec));
}

std::vector<FunctionEntry> KnowledgeBase::retrieve_functions(const std::string &category,
                                                             const std::string &standard_description,
                                                             DialectId dialect, size_t k) const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	std::vector<const FunctionEntry *> candidates;
	for (auto &e : functions) {
		if (e.dialect == dialect) {
			candidates.push_back(&e);
		}
	}
	if (candidates.empty()) {
		throw EmptyRepositoryException("no function entries for dialect " + dialect_name(dialect));
	}
	auto query = embedder->embed(category + " | " + standard_description);
	std::vector<std::pair<double, const FunctionEntry *>> scored;
	scored.reserve(candidates.size());
	for (auto *e : candidates) {
		scored.emplace_back(cosine_similarity(query, e->embedding), e);
	}
	std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
		if (a.first != b.first) {
			return a.first > b.first;
		}
		return a.second->id < b.second->id;
	});
	std::vector<FunctionEntry> out;
	for (size_t i = 0; i < scored.size() && i < k; i++) {
		out.push_back(*scored[i].second);
	}
	return out;
}

std::optional<ConstraintEntry> KnowledgeBase::retrieve_rules(const ErrorSignature &signature,
                                                             const std::string &segment,
                                                             DialectId dialect) const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	std::string key = signature.key_text();

	// exact signature-pattern match wins, lowest id on ties
	const ConstraintEntry *exact = nullptr;
	for (auto &e : constraints) {
		if (e.dialect != dialect) {
			continue;
		}
		for (auto &pattern : e.signature_patterns) {
			if (glob_match(pattern, key)) {
				if (!exact || e.id < exact->id) {
					exact = &e;
				}
				break;
			}
		}
	}
	if (exact) {
		return *exact;
	}

	// fuzzy: signature key + failing segment vs. rule specs
	std::string query_text = key + " " + segment;
	if (trim(query_text).empty()) {
		return std::nullopt;
	}
	auto query = embedder->embed(query_text);
	const ConstraintEntry *best = nullptr;
	double best_score = 0.0;
	for (auto &e : constraints) {
		if (e.dialect != dialect) {
			continue;
		}
		double score = cosine_similarity(query, embedder->embed(e.rule_spec));
		if (score > best_score || (score == best_score && best && e.id < best->id)) {
			best = &e;
			best_score = score;
		}
	}
	if (best && best_score >= cfg.tau_rule) {
		return *best;
	}
	return std::nullopt;
}

RoutingDecision KnowledgeBase::route_primitive(const KnowledgePrimitive &primitive,
                                               const std::string &plan_text,
                                               const std::string &category_hint) {
	auto violations = primitive.validate();
	if (!violations.empty()) {
		throw DialException("invalid knowledge primitive: " + join(violations, "; "));
	}
	auto g_vec = embedder->embed(primitive.incorrect_pattern + "\n" + primitive.root_cause);
	auto plan_vec = embedder->embed(plan_text);
	double sim = cosine_similarity(g_vec, plan_vec);

	RoutingDecision decision;
	decision.similarity = sim;
	std::unique_lock<std::shared_mutex> guard(*lock);
	if (sim >= cfg.routing_threshold) {
		decision.to_function = true;
		FunctionEntry entry;
		entry.dialect = primitive.dialect;
		entry.category = category_hint.empty() ? FALLBACK_CATEGORY : category_hint;
		entry.scenarios = {primitive.root_cause};
		entry.specification = primitive.root_cause;
		entry.implementation = primitive.corrective_exemplar;
		entry.origin = EntryOrigin::CONSOLIDATED;
		entry.id = function_entry_id(entry.dialect, entry.implementation);
		entry.embedding = embedder->embed(entry.index_text());
		decision.entry_id = add_function_locked(std::move(entry));
	} else {
		decision.to_function = false;
		ConstraintEntry entry;
		entry.dialect = primitive.dialect;
		entry.rule_spec = primitive.incorrect_pattern;
		entry.cases.push_back({primitive.incorrect_pattern, primitive.corrective_exemplar});
		entry.origin = EntryOrigin::CONSOLIDATED;
		entry.id = constraint_entry_id(entry.dialect, entry.rule_spec);
		// vendor-code-looking tokens in the pattern become signature globs
		for (auto &tok : word_tokens(primitive.incorrect_pattern)) {
			bool numeric = !tok.empty() && std::all_of(tok.begin(), tok.end(), ::isdigit);
			if ((numeric && tok.size() >= 4) || tok.rfind("ora", 0) == 0) {
				entry.signature_patterns.push_back("*" + tok + "*");
			}
		}
		decision.entry_id = add_constraint_locked(std::move(entry));
	}
	return decision;
}

std::string KnowledgeBase::add_function(FunctionEntry entry) {
	std::unique_lock<std::shared_mutex> guard(*lock);
	return add_function_locked(std::move(entry));
}

std::string KnowledgeBase::add_function_locked(FunctionEntry entry) {
	if (entry.scenarios.empty() || trim(entry.implementation).empty()) {
		throw DialException("function entry requires scenarios and an implementation");
	}
	if (entry.embedding.empty()) {
		entry.embedding = embedder->embed(entry.index_text());
	}
	std::string key = normalize_text_key(entry.implementation);
	for (auto &existing : functions) {
		if (existing.dialect == entry.dialect && iequals(existing.category, entry.category) &&
		    normalize_text_key(existing.implementation) == key) {
			// merge: append unseen scenarios, never overwrite the original
			for (auto &s : entry.scenarios) {
				if (std::find(existing.scenarios.begin(), existing.scenarios.end(), s) ==
				    existing.scenarios.end()) {
					existing.scenarios.push_back(s);
				}
			}
			return existing.id;
		}
	}
	if (entry.id.empty()) {
		entry.id = function_entry_id(entry.dialect, entry.implementation);
	}
	functions.push_back(std::move(entry));
	return functions.back().id;
}

std::string KnowledgeBase::add_constraint(ConstraintEntry entry) {
	std::unique_lock<std::shared_mutex> guard(*lock);
	return add_constraint_locked(std::move(entry));
}

std::string KnowledgeBase::add_constraint_locked(ConstraintEntry entry) {
	if (trim(entry.rule_spec).empty()) {
		throw DialException("constraint entry requires a rule_spec");
	}
	for (auto &c : entry.cases) {
		if (trim(c.erroneous).empty() || trim(c.correct).empty()) {
			throw DialException("constraint cases need both erroneous and correct sides");
		}
	}
	std::string key = normalize_text_key(entry.rule_spec);
	for (auto &existing : constraints) {
		if (existing.dialect == entry.dialect && normalize_text_key(existing.rule_spec) == key) {
			for (auto &c : entry.cases) {
				if (std::find(existing.cases.begin(), existing.cases.end(), c) ==
				    existing.cases.end()) {
					existing.cases.push_back(c);
				}
			}
			for (auto &p : entry.signature_patterns) {
				if (std::find(existing.signature_patterns.begin(), existing.signature_patterns.end(),
				              p) == existing.signature_patterns.end()) {
					existing.signature_patterns.push_back(p);
				}
			}
			return existing.id;
		}
	}
	if (entry.id.empty()) {
		entry.id = constraint_entry_id(entry.dialect, entry.rule_spec);
	}
	constraints.push_back(std::move(entry));
	return constraints.back().id;
}

std::vector<FunctionEntry> KnowledgeBase::functions_snapshot() const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	return functions;
}

std::vector<ConstraintEntry> KnowledgeBase::constraints_snapshot() const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	return constraints;
}

size_t KnowledgeBase::function_count(std::optional<DialectId> dialect) const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	if (!dialect) {
		return functions.size();
	}
	size_t n = 0;
	for (auto &e : functions) {
		if (e.dialect == *dialect) {
			n++;
		}
	}
	return n;
}

size_t KnowledgeBase::constraint_count(std::optional<DialectId> dialect) const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	if (!dialect) {
		return constraints.size();
	}
	size_t n = 0;
	for (auto &e : constraints) {
		if (e.dialect == *dialect) {
			n++;
		}
	}
	return n;
}

void KnowledgeBase::persist(const std::string &dir) const {
	std::shared_lock<std::shared_mutex> guard(*lock);
	fs::create_directories(dir);
	write_file((fs::path(dir) / "csr.json").string(), csr.to_json());
	std::string f_lines;
	for (auto &e : functions) {
		f_lines += e.to_json_line() + "\n";
	}
	write_file((fs::path(dir) / "f_func.jsonl").string(), f_lines);
	std::string r_lines;
	for (auto &e : constraints) {
		r_lines += e.to_json_line() + "\n";
	}
	write_file((fs::path(dir) / "r_rule.jsonl").string(), r_lines);
}

KnowledgeBase KnowledgeBase::load(const std::string &dir, std::shared_ptr<EmbeddingProvider> embedder,
                                  KbConfig config) {
	fs::path base(dir);
	if (!fs::is_directory(base)) {
		throw IoException("knowledge base directory not found: " + dir);
	}
	CanonicalReference csr = CanonicalReference::builtin();
	if (fs::exists(base / "csr.json")) {
		csr = CanonicalReference::from_json(read_file((base / "csr.json").string()));
	}
	KnowledgeBase kb(std::move(embedder), std::move(csr), config);

	auto load_lines = [](const std::string &path, auto parse_line) {
		if (!fs::exists(path)) {
			return;
		}
		std::string content = read_file(path);
		size_t line_no = 0;
		for (auto &line : split(content, '\n')) {
			line_no++;
			if (trim(line).empty()) {
				continue;
			}
			try {
				parse_line(line);
			} catch (const std::exception &e) {
				throw CorruptRecordException(path, line_no, e.what());
			}
		}
	};
	load_lines((base / "f_func.jsonl").string(), [&](const std::string &line) {
		kb.functions.push_back(FunctionEntry::from_json_line(line));
	});
	load_lines((base / "r_rule.jsonl").string(), [&](const std::string &line) {
		kb.constraints.push_back(ConstraintEntry::from_json_line(line));
	});
	return kb;
}

} // namespace dial
