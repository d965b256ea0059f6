#pragma once

// Versioned JSON documents for fitted models and prior knowledge.
//
// Model:  {"format": "milda-projection-model", "version": 1, "w": [...],
//          "threshold": t, "orientation": 1|-1, "prior_kind": "...",
//          "transform": {"whiten"?: [[...]], "shift": [...], "alpha": a,
//                        "d_hat"?: [...]}}
// Prior:  {"kind": "class_mean", "mu_plus": [...]}
//         {"kind": "difference_direction", "d": [...]}
//         {"kind": "scaled_class_covariances", "s_plus": [[...]],
//          "s_minus": [[...]], "q": q}
//         {"kind": "shared_covariance_shape", "s": [[...]]}

#include <string>

#include "milda/model.hpp"

namespace milda {

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const ProjectionModel& m);
ProjectionModel model_from_json(const std::string& text);

std::string prior_to_json(const PriorKnowledge& p);
PriorKnowledge prior_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace milda
