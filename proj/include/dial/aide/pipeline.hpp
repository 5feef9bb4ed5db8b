#pragma once

#include "dial/audit/audit.hpp"
#include "dial/common/errors.hpp"
#include "dial/core/task.hpp"
#include "dial/exec/executor.hpp"
#include "dial/kb/knowledge_base.hpp"
#include "dial/llm/backend.hpp"
#include "dial/llm/templates.hpp"
#include "dial/planner/planner.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dial {

struct DebugConfig {
	size_t max_syntax_iters = 5;
	size_t max_semantic_iters = 3;
	bool deterministic_mode = true;
};

enum class StageKind : uint8_t { INIT, RULE_FIX, DEEP_FIX, SEMANTIC_FIX };

const std::string &stage_name(StageKind stage);

struct TrajectoryStep {
	StageKind stage = StageKind::INIT;
	SqlText sql;
	// Most recent evaluation of this step's SQL: execution outcome, and the
	// audit report once the query reaches the verification phase.
	std::optional<ExecutionOutcome> execution;
	std::optional<AuditReport> audit_report;
	std::optional<std::string> applied_rule; // ConstraintEntry id
	std::string prompt_template;             // template that produced this SQL
	std::string prompt;
	std::string reply;
};

struct RepairTrajectory {
	std::vector<TrajectoryStep> steps;
	std::optional<SqlText> final; // present iff the last audit fully passed

	bool has_fix_step() const;
	std::vector<std::string> validate() const;
};

struct ConsolidationEvent {
	KnowledgePrimitive primitive;
	RoutingDecision decision;
	std::string distill_prompt;
	std::string distill_reply;
};

// Ablation switches mirroring the variant rows: planning off means direct
// generation, retrieval off strips both function templates and rule lookup,
// correction off skips recovery, verification and consolidation.
struct AblationFlags {
	bool no_planning = false;
	bool no_retrieval = false;
	bool no_correction = false;
};

struct PipelineResult {
	TranslationTask task;
	std::optional<DialectAwarePlan> plan;
	SqlText best;
	RepairTrajectory trajectory;
	std::vector<ConsolidationEvent> consolidations;
	bool passed = false;
	std::string failure_reason;

	// Canonical dump: every prompt, reply, outcome and rule id. With redact,
	// prompt/reply bodies are replaced by their content hashes.
	std::string to_json(bool redact = false) const;
};

class AidePipeline {
public:
	AidePipeline(ChatBackend &llm, const TemplateStore &templates, KnowledgeBase &kb,
	             Executor &executor, DebugConfig config = {}, AblationFlags flags = {})
	    : llm(llm), templates(templates), kb(kb), executor(executor), cfg(config), flags(flags) {
		if (cfg.max_syntax_iters < 1 || cfg.max_semantic_iters < 1) {
			throw DialException("debug budgets must be at least 1");
		}
	}

	// Knowledge-grounded generation: prompt carries the plan, the schema and
	// the top-k retrieved function templates per enriched operator.
	SqlText generate_initial(const DialectAwarePlan &plan, const SchemaCatalog &schema,
	                         RepairTrajectory &trajectory);

	// Execution-driven repair loop; returns an executing query or throws
	// RecoveryExhaustedException (the trajectory keeps every step).
	SqlText syntactic_recovery(const SqlText &q_init, const DialectAwarePlan &plan,
	                           RepairTrajectory &trajectory);

	// Audit-driven rectification loop; returns the verified query or throws
	// VerificationExhaustedException.
	SqlText verify_semantics(const SqlText &q_exec, const DialectAwarePlan &plan,
	                         RepairTrajectory &trajectory);

	// Distill the verified repair into a schema-agnostic primitive.
	// Precondition: trajectory.final present and at least one fix step.
	// prompt_out/reply_out capture the distillation exchange when non-null.
	KnowledgePrimitive distill_primitive(const RepairTrajectory &trajectory,
	                                     const SchemaCatalog &schema, DialectId dialect,
	                                     std::string *prompt_out = nullptr,
	                                     std::string *reply_out = nullptr);

	// planner -> retrieval -> generation -> recovery -> verification ->
	// distillation -> routing. Budget exhaustion returns passed=false with
	// the best candidate; the KB is mutated only on verified success.
	PipelineResult run_pipeline(const TranslationTask &task);

	const DebugConfig &config() const {
		return cfg;
	}

private:
	ChatBackend &llm;
	const TemplateStore &templates;
	KnowledgeBase &kb;
	Executor &executor;
	DebugConfig cfg;
	AblationFlags flags;

	SqlText generate_direct(const TranslationTask &task, RepairTrajectory &trajectory);
	std::string ask_sql(const std::string &template_id,
	                    const std::map<std::string, std::string> &bindings, std::string &prompt_out,
	                    std::string &reply_out);
};

// Identifier templating for schema-agnostic primitives: table and column
// names of the task schema are replaced by <table> / <column> placeholders.
std::string templatize_identifiers(const std::string &text, const SchemaCatalog &schema);

// Write the per-task dump under dir, named by the task hash. Returns the path.
std::string write_trajectory(const PipelineResult &result, const std::string &dir, bool redact = false);

} // namespace dial
