#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "qexp/channel.hpp"

namespace qexp {

// {dim, kraus_count, hermitian, weights[], unitaries[s][row][col] = [re, im]}
// Doubles are written with round-trip precision, so reading back is lossless.
inline nlohmann::json channel_to_json(const Channel& channel) {
  nlohmann::json j;
  j["dim"] = channel.dim();
  j["kraus_count"] = channel.kraus_count();
  j["hermitian"] = channel.hermitian();
  j["weights"] = channel.weights();
  auto unitaries = nlohmann::json::array();
  for (const auto& u : channel.unitaries()) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      auto row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < u.cols(); ++c) row.push_back({u(r, c).real(), u(r, c).imag()});
      rows.push_back(std::move(row));
    }
    unitaries.push_back(std::move(rows));
  }
  j["unitaries"] = std::move(unitaries);
  if (channel.seed()) j["seed"] = *channel.seed();
  return j;
}

inline Channel channel_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("dim").get<Eigen::Index>();
    const auto d = j.at("kraus_count").get<std::size_t>();
    const bool hermitian = j.at("hermitian").get<bool>();
    auto weights = j.at("weights").get<std::vector<double>>();
    const auto& js = j.at("unitaries");
    detail::require(js.size() == d && weights.size() == d, "channel json: kraus_count disagrees with array lengths");
    std::vector<ComplexMatrix> us;
    us.reserve(d);
    for (const auto& ju : js) {
      detail::require(ju.size() == static_cast<std::size_t>(n), "channel json: unitary row count != dim");
      ComplexMatrix u(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = ju.at(r);
        detail::require(row.size() == static_cast<std::size_t>(n), "channel json: unitary column count != dim");
        for (Eigen::Index c = 0; c < n; ++c) u(r, c) = {row.at(c).at(0).get<double>(), row.at(c).at(1).get<double>()};
      }
      us.push_back(std::move(u));
    }
    Channel channel = build_weighted(std::move(us), std::move(weights), hermitian);
    if (j.contains("seed")) channel.set_seed(j["seed"].get<std::uint64_t>());
    return channel;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("channel json: ") + e.what());
  }
}

inline void write_channel(std::ostream& os, const Channel& channel) { os << channel_to_json(channel).dump() << '\n'; }

inline Channel read_channel(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("channel json: ") + e.what());
  }
  return channel_from_json(j);
}

}  // namespace qexp
