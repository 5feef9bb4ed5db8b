#pragma once

// Plan fixtures for the audit soundness/sensitivity battery: three joined
// tables, one filter, one aliased SUM aggregate, a projection: so every
// mutation kind has a target, and the third table is join-only so removing
// its join disturbs topology alone.

#include "dial/planner/plan.hpp"

#include <string>
#include <vector>

namespace dial::testsupport {

inline DialectAwarePlan audit_fixture_plan(size_t i) {
	std::string n = std::to_string(i);
	std::string orders = "orders_" + n;
	std::string shipments = "shipments_" + n;
	std::string carriers = "carriers_" + n;

	auto mk = [](MacroOperatorKind kind, std::string description,
	             std::vector<SchemaRef> refs) {
		MacroOperator op;
		op.kind = kind;
		op.description = std::move(description);
		op.refs = std::move(refs);
		return op;
	};

	DialectAwarePlan plan;
	plan.dialect = DialectId::POSTGRESQL;
	plan.base.operators.push_back(
	    mk(MacroOperatorKind::SRC,
	       "combine " + orders + " with " + shipments + " and " + carriers + " on their keys",
	       {{orders, "order_id", "BIGINT"},
	        {shipments, "order_id", "BIGINT"},
	        {shipments, "carrier_id", "BIGINT"},
	        {carriers, "carrier_id", "BIGINT"}}));
	plan.base.operators.push_back(mk(MacroOperatorKind::FLT,
	                                 "keep rows whose status equals 'active_" + n + "'",
	                                 {{orders, "status", "TEXT"}}));
	plan.base.operators.push_back(mk(MacroOperatorKind::AGG,
	                                 "compute the sum of price for each region",
	                                 {{orders, "price", "REAL"}, {orders, "region", "TEXT"}}));
	plan.base.operators.push_back(mk(MacroOperatorKind::ORG,
	                                 "present region and the total aliased as total_price",
	                                 {{orders, "region", "TEXT"}}));
	for (size_t k = 0; k < plan.base.operators.size(); k++) {
		plan.base.operators[k].order_index = k;
	}
	return plan;
}

} // namespace dial::testsupport
