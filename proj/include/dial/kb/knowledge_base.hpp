#pragma once

#include "dial/exec/signature.hpp"
#include "dial/kb/csr.hpp"
#include "dial/kb/entries.hpp"
#include "dial/llm/embedding.hpp"

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace dial {

struct KbConfig {
	double tau_map = 0.35;           // construction mapping threshold
	double tau_rule = 0.5;           // fuzzy rule-retrieval threshold
	size_t retrieval_k = 3;          // default top-k for function retrieval
	double routing_threshold = 0.75; // consolidation routing boundary (inclusive)
};

struct RoutingDecision {
	bool to_function = false; // true -> F_Func, false -> R_Rule
	double similarity = 0.0;
	std::string entry_id; // id of the created or merged entry
};

// The hierarchical dialect knowledge base: canonical reference + the two
// repositories. Reads are concurrent; every mutation goes through one
// exclusive writer lock.
class KnowledgeBase {
public:
	explicit KnowledgeBase(std::shared_ptr<EmbeddingProvider> embedder,
	                       CanonicalReference csr = CanonicalReference::builtin(),
	                       KbConfig config = {});

	const CanonicalReference &reference() const {
		return csr;
	}
	const KbConfig &config() const {
		return cfg;
	}
	void set_config(const KbConfig &config) {
		cfg = config;
	}
	const EmbeddingProvider &embedding_provider() const {
		return *embedder;
	}

	// Intent-keyed retrieval: entries of the dialect ranked by cosine between
	// embed(category + " | " + standard_description) and entry embeddings;
	// ties break by id ascending. Throws EmptyRepositoryException when the
	// dialect has no entries.
	std::vector<FunctionEntry> retrieve_functions(const std::string &category,
	                                              const std::string &standard_description,
	                                              DialectId dialect, size_t k) const;

	// Diagnostics-keyed retrieval: exact signature-pattern glob match wins
	// (lowest id on ties); otherwise best fuzzy match of the signature key
	// plus failing segment against rule specs, above tau_rule.
	std::optional<ConstraintEntry> retrieve_rules(const ErrorSignature &signature,
	                                              const std::string &segment,
	                                              DialectId dialect) const;

	// Consolidation routing: cosine(embed(P_inc + A_rtc), embed(plan_text)).
	// At or above the threshold the fix is intent-driven and lands in F_Func
	// (category_hint supplies its category); below it becomes a constraint
	// seeded with the primitive's contrastive case.
	RoutingDecision route_primitive(const KnowledgePrimitive &primitive, const std::string &plan_text,
	                                const std::string &category_hint);

	// Dedup-aware inserts: an existing entry with the same identity key is
	// merged (cases/scenarios appended), never overwritten. Returns the id
	// of the stored entry.
	std::string add_function(FunctionEntry entry);
	std::string add_constraint(ConstraintEntry entry);

	std::vector<FunctionEntry> functions_snapshot() const;
	std::vector<ConstraintEntry> constraints_snapshot() const;
	size_t function_count(std::optional<DialectId> dialect = {}) const;
	size_t constraint_count(std::optional<DialectId> dialect = {}) const;

	// Directory layout: csr.json, f_func.jsonl, r_rule.jsonl.
	void persist(const std::string &dir) const;
	static KnowledgeBase load(const std::string &dir, std::shared_ptr<EmbeddingProvider> embedder,
	                          KbConfig config = {});

	KnowledgeBase(KnowledgeBase &&) = default;
	KnowledgeBase &operator=(KnowledgeBase &&) = default;

private:
	std::shared_ptr<EmbeddingProvider> embedder;
	CanonicalReference csr;
	KbConfig cfg;
	std::vector<FunctionEntry> functions;
	std::vector<ConstraintEntry> constraints;
	// behind a pointer so the base stays movable
	mutable std::unique_ptr<std::shared_mutex> lock = std::make_unique<std::shared_mutex>();

	std::string add_function_locked(FunctionEntry entry);
	std::string add_constraint_locked(ConstraintEntry entry);
};

// Deterministic entry ids derived from content.
std::string function_entry_id(DialectId dialect, const std::string &implementation);
std::string constraint_entry_id(DialectId dialect, const std::string &rule_spec);

} // namespace dial
