#pragma once

#include <string>

#include <json.hpp>

#include "dmnls/analysis.hpp"
#include "dmnls/scattering.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// Column order of norms.csv.
inline constexpr const char* kNormsHeader = "t,mass,grad_l2,j_l2,sup,x_norm_partial,s_norm_partial";

std::string norms_csv(const NormSeries& series);
void write_norms_csv(const std::string& path, const NormSeries& series);
/// Reads the first five columns back into a series with the given delta.
NormSeries read_norms_csv(const std::string& path, double delta = 0.01);

/// Binary field snapshot, little-endian: 8-byte magic "DMNLS1\0\0", N (u64),
/// L (f64), t (f64), then N interleaved (re, im) f64 pairs.
void write_snapshot(const std::string& path, const Field& field);
Field read_snapshot(const std::string& path);

/// { "xi", "W0_re", "W0_im", "Phi", "W_re", "W_im", "meta" }
nlohmann::json profile_to_json(const ScatteringProfile& profile, const nlohmann::json& meta);
ScatteringProfile profile_from_json(const nlohmann::json& doc);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace dmnls
