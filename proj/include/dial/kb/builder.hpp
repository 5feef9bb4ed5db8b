#pragma once

#include "dial/kb/knowledge_base.hpp"
#include "dial/llm/backend.hpp"
#include "dial/llm/templates.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dial {

struct DocSection {
	std::string heading;
	std::string body; // verbatim bytes from the source document
};

struct TaggedCorpus {
	std::string dialect_tag;
	std::vector<DocSection> sections;

	// Single merged document with every section wrapped in dialect tags.
	std::string merged() const;
};

// Supported raw formats: html, json, md, sgml, txt. Sections split on
// format-specific heading rules; content bytes preserved verbatim.
TaggedCorpus tag_documents(const std::vector<std::pair<std::string, std::string>> &raw_docs,
                           const std::string &dialect_tag);

enum class KnowledgeTrack : uint8_t { FUNCTION, RULE };

struct MappedSection {
	size_t section_index = 0;
	KnowledgeTrack track = KnowledgeTrack::FUNCTION;
	std::string category;     // F track: owning canonical category
	std::string atomic_point; // F track: matched atomic point name
	std::string rule_pattern; // R track: matched generic constraint pattern
	double score = 0.0;
};

struct MappingResult {
	std::vector<MappedSection> mapped;
	size_t dropped = 0; // sections below tau_map
};

// Generic constraint patterns used as R-track retrieval queries.
const std::vector<std::string> &default_seed_rule_patterns();

// Dual-track semantic alignment: F-track queries are the atomic-point ANSI
// sketches, R-track queries the seed rule patterns; each section goes to its
// best-scoring target at or above tau_map, otherwise it is dropped.
MappingResult map_syntax(const TaggedCorpus &corpus, const CanonicalReference &csr,
                         const std::vector<std::string> &seed_rules, const EmbeddingProvider &embedder,
                         double tau_map);

struct GenerationStats {
	size_t functions_created = 0;
	size_t constraints_created = 0;
	size_t skipped = 0;
	std::vector<std::string> skipped_sections;
};

// Template-based knowledge generation. F-track sections yield FunctionEntry
// records with all three metadata fields; R-track sections yield
// ConstraintEntry records with rule_spec only (cases stay empty for the
// execution-driven phase). Sections carrying contrastive-phrase cues
// ("unlike standard SQL", "must be quoted") are force-routed to the R track.
GenerationStats generate_entries(const TaggedCorpus &corpus, const MappingResult &mapping,
                                 DialectId dialect, ChatBackend &llm, const TemplateStore &templates,
                                 KnowledgeBase &kb);

bool has_contrastive_cue(const std::string &text);

} // namespace dial
