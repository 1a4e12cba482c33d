#pragma once

// JSON specs (rationals as "p/q" strings), CSV tables and binary PGM images.

#include "assouadlab/carpet.hpp"
#include "assouadlab/estimate.hpp"
#include "assouadlab/grid.hpp"
#include "assouadlab/percolation.hpp"
#include "assouadlab/selfsim.hpp"
#include "assouadlab/words.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace assouadlab {

using Json = nlohmann::ordered_json;

Json rational_json(const Rational& value);
/// Accepts "p/q", integer or decimal strings and JSON integers. `field` names the location in errors.
Rational rational_from(const Json& value, const std::string& field);

Json to_json(const SimilarityRIFS& rifs);
SimilarityRIFS selfsim_from(const Json& spec);

Json to_json(const CarpetRIFS& rifs);
CarpetRIFS carpet_from(const Json& spec);

Json to_json(const PercConfig& config);
PercConfig percolation_from(const Json& spec);

Json to_json(const ProbabilityVector& probs);
ProbabilityVector probs_from(const Json& value, const std::string& field);

/// {mode, seed, probs, pattern, splices, base}; fields irrelevant to the mode are omitted.
Json to_json(const RealizationStream& stream);
/// `default_probs` fills in an iid stream that omits its own probability vector.
RealizationStream realization_from(const Json& value, const std::string& field = "realization",
                                    const ProbabilityVector* default_probs = nullptr);

enum class ModelKind { selfsim, carpet, percolation };
std::string to_string(ModelKind kind);

/// A parsed experiment file: {kind, model fields..., realization?, depth?, seed?, rho?}.
struct ExperimentSpec {
    ModelKind kind = ModelKind::selfsim;
    std::optional<SimilarityRIFS> selfsim;
    std::optional<CarpetRIFS> carpet;
    std::optional<PercConfig> percolation;
    std::optional<RealizationStream> realization;
    std::optional<std::size_t> depth;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho;
};

/// Throws spec errors carrying the parser's line/column or the offending field path.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);
Json to_json(const ExperimentSpec& spec);

void write_boxes_csv(std::ostream& out, const BoxSet& boxes);
void write_grid_csv(std::ostream& out, const GridSet& grid);
void write_levels_csv(std::ostream& out, const PercLevels& levels);
void write_estimate_csv(std::ostream& out, const AssouadEstimate& est);

/// Binary P5 image, occupied pixels black on white, y axis pointing up. Each pixel is dark when
/// some occupied cell meets it. One-dimensional sets are drawn as a band of height width/16.
void write_pgm(std::ostream& out, const GridSet& grid, std::int64_t width, std::int64_t height);

/// Writes `contents` to `path` via a temporary sibling and a rename, so a failed run never
/// leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace assouadlab
