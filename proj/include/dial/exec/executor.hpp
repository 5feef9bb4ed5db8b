#pragma once

#include "dial/core/outcome.hpp"

#include <memory>
#include <string>

namespace dial {

// Execution surface used by the repair loop. Implementations must be
// side-effect-free on artifact state for SELECT-only workloads.
class Executor {
public:
	virtual ~Executor() = default;
	virtual ExecutionOutcome execute(const SqlText &sql) = 0;
	virtual bool is_live() const = 0; // live engine vs. simulated validation
	virtual DialectId dialect() const = 0;
};

} // namespace dial
