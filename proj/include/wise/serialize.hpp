#pragma once

#include <json.hpp>

#include "wise/harness.hpp"
#include "wise/ise.hpp"
#include "wise/tail_bounds.hpp"
#include "wise/variance_oracle.hpp"
#include "wise/wavelet_basis.hpp"

namespace wise {

// Report serialization. NaN bounds (report-only rows) become null.
nlohmann::json to_json(const BasisReport& r);
nlohmann::json to_json(const KernelIdentityReport& r);
nlohmann::json to_json(const LemmaReport& r);
nlohmann::json to_json(const LemmaRateReport& r);
nlohmann::json to_json(const SpectrumReport& r, bool with_eigenvalues = true);
nlohmann::json to_json(const IjnReport& r);
nlohmann::json to_json(const IseBreakdown& r);
nlohmann::json to_json(const TailComparison& r);
nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const CltResult& r);
nlohmann::json to_json(const LilTrajectory& r);
nlohmann::json to_json(const LemmaSuiteReport& r);
nlohmann::json to_json(const ChaosComparison& r);
nlohmann::json to_json(const SnCheck& r);

}  // namespace wise
