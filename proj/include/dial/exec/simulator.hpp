#pragma once

#include "dial/core/outcome.hpp"
#include "dial/exec/executor.hpp"
#include "dial/exec/rules.hpp"

#include <vector>

namespace dial {

// Validates SQL against a dialect: parse under the dialect's grammar profile,
// then run the violation catalog in rule_id order; first hit wins, mirroring
// real engines' single-error reporting. Success carries an empty placeholder
// row table: the simulator validates, it does not evaluate.
class DialectSimulator {
public:
	DialectSimulator() : catalog(default_rule_catalog()) {
	}
	explicit DialectSimulator(std::vector<DialectRule> catalog_p) : catalog(std::move(catalog_p)) {
	}

	ExecutionOutcome simulate(const SqlText &sql) const;

	// Violation scan only (no outcome wrapping); used by the lint command.
	std::optional<RuleViolation> first_violation(const SqlText &sql) const;

	const std::vector<DialectRule> &rules() const {
		return catalog;
	}

private:
	std::vector<DialectRule> catalog;
};

// Executor adapter over the simulator for one dialect.
class SimulatedExecutor : public Executor {
public:
	explicit SimulatedExecutor(DialectId dialect_p) : target(dialect_p) {
	}
	SimulatedExecutor(DialectId dialect_p, DialectSimulator sim)
	    : target(dialect_p), simulator(std::move(sim)) {
	}

	ExecutionOutcome execute(const SqlText &sql) override {
		return simulator.simulate(sql);
	}
	bool is_live() const override {
		return false;
	}
	DialectId dialect() const override {
		return target;
	}

private:
	DialectId target;
	DialectSimulator simulator;
};

} // namespace dial
