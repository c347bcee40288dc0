#pragma once

#include <filesystem>

#include <json.hpp>

#include "mfplsim/fassmr.hpp"
#include "mfplsim/simlab.hpp"

namespace mfplsim {

using Json = nlohmann::json;

/// {order, interior_knots, domain: [a, b], coeffs}
Json direction_to_json(const Direction& d);
Direction direction_from_json(const Json& j);

Json tuning_to_json(const ChosenTuning& c);
Json stage_trace_to_json(const StageTrace& t);

/// Everything needed to predict from the fit, plus the support summary.
Json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json truth_to_json(const GroundTruth& t, const DesignSpec& spec);
Json dataset_metadata(const BiFunctionalDataset& d);

Json summary_to_json(const MetricsSummary& s);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// index,t,beta for every grid point.
void write_coefficients_csv(const std::filesystem::path& path, const FitResult& fit);

/// sample,projection,residual,link: the training projections on theta_hat,
/// the partial residuals and the smoothed link at each projection.
void write_link_csv(const std::filesystem::path& path, const FitResult& fit);

/// One row per method: mean_msep, sd_msep, mean_right, mean_wrong,
/// mean_seconds and the time ratio to the first method.
void write_summary_csv(const std::filesystem::path& path, const MetricsSummary& s);
void write_replicates_csv(const std::filesystem::path& path, const MetricsSummary& s);

}  // namespace mfplsim
