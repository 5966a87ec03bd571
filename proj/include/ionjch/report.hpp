#pragma once

// Dataset emission for the CLI: Mott-lobe CSV, sweep CSV/JSON and the
// single-point ground-state JSON report, plus the parse direction needed for
// round-trips. All numbers are written with 17 significant digits and a
// locale-independent decimal point, so identical inputs produce identical
// bytes.

#include <json.hpp>

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ionjch/errors.hpp"
#include "ionjch/format.hpp"
#include "ionjch/observables.hpp"
#include "ionjch/solver.hpp"
#include "ionjch/sweeps.hpp"

namespace ionjch {

// Columns: delta_over_g, mu_0..mu_n, dmu_0..dmu_{n-1}; one row per grid point.
inline void write_mott_csv(std::ostream& os, const std::vector<MottCurve>& curves) {
  if (curves.empty()) throw DomainError("write_mott_csv: no curves");
  const std::size_t points = curves.front().delta.size();
  for (const auto& c : curves)
    if (c.delta != curves.front().delta)
      throw ConsistencyError("write_mott_csv: curves sampled on different grids");

  os << "delta_over_g";
  for (const auto& c : curves) os << ",mu_" << c.n;
  for (std::size_t n = 0; n + 1 < curves.size(); ++n) os << ",dmu_" << curves[n].n;
  os << '\n';
  for (std::size_t i = 0; i < points; ++i) {
    os << format_double(curves.front().delta[i]);
    for (const auto& c : curves) os << ',' << format_double(c.mu[i]);
    for (std::size_t n = 0; n + 1 < curves.size(); ++n)
      os << ',' << format_double(curves[n].dmu[i]);
    os << '\n';
  }
}

inline nlohmann::json observables_to_json(const ObservableSet& obs) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : obs.sites)
    sites.push_back({{"mean_total", s.mean_total},
                     {"var_total", s.var_total},
                     {"mean_qubit", s.mean_qubit},
                     {"var_qubit", s.var_qubit},
                     {"mean_phonon", s.mean_phonon}});
  return {{"n_sites", obs.n_sites},
          {"total_excitations", obs.total_excitations},
          {"delta_over_g", obs.delta_over_g},
          {"t_over_g", obs.t_over_g},
          {"degenerate", obs.degenerate},
          {"sites", sites}};
}

inline ObservableSet observables_from_json(const nlohmann::json& j) {
  auto as_double = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  ObservableSet obs;
  obs.n_sites = j.at("n_sites").get<int>();
  obs.total_excitations = j.at("total_excitations").get<int>();
  obs.delta_over_g = as_double(j.at("delta_over_g"));
  obs.t_over_g = as_double(j.at("t_over_g"));
  obs.degenerate = j.at("degenerate").get<bool>();
  for (const auto& s : j.at("sites")) {
    SiteObservables site;
    site.mean_total = s.at("mean_total").get<double>();
    site.var_total = s.at("var_total").get<double>();
    site.mean_qubit = s.at("mean_qubit").get<double>();
    site.var_qubit = s.at("var_qubit").get<double>();
    site.mean_phonon = s.at("mean_phonon").get<double>();
    obs.sites.push_back(site);
  }
  if (static_cast<int>(obs.sites.size()) != obs.n_sites)
    throw ConsistencyError("observables_from_json: site count mismatch");
  return obs;
}

inline nlohmann::json provenance_to_json(const Provenance& p) {
  return {{"version", p.software_version},
          {"spec", p.spec_echo},
          {"basis_fingerprint", p.basis_fingerprint}};
}

inline nlohmann::json ground_report_json(const GroundStateResult& ground,
                                         const ObservableSet& obs,
                                         const Provenance& provenance) {
  return {{"energy", ground.energy},
          {"gap", ground.gap},
          {"degenerate", ground.degenerate},
          {"solver", {{"iterations", ground.info.iterations},
                      {"residual", ground.info.residual}}},
          {"observables", observables_to_json(obs)},
          {"provenance", provenance_to_json(provenance)}};
}

namespace detail {

// Status text lands in a comma-separated field.
inline std::string csv_safe(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace detail

// Columns: delta_over_g, energy, gap, degenerate, then per site k (1-based)
// meanN_k, varN_k, meanNa_k, varNa_k, meann_k, then phase_k when labels are
// given. A trailing status column appears only when some row failed, so
// all-green sweeps keep the plain 4 + 5N (+ N) schema. Provenance rides in
// leading '#' comment lines.
inline void write_sweep_csv(std::ostream& os, const SweepResult& result,
                            const std::vector<std::vector<PhaseLabel>>* labels = nullptr) {
  const int n = result.spec.n_ions;
  if (labels && labels->size() != result.rows.size())
    throw ConsistencyError("write_sweep_csv: one label row per sweep row required");
  const bool with_status = result.failed_rows() > 0;

  os << "# ionjch " << result.provenance.software_version << '\n';
  os << "# spec " << result.provenance.spec_echo << '\n';
  os << "# basis_fingerprint " << result.provenance.basis_fingerprint << '\n';
  os << "delta_over_g,energy,gap,degenerate";
  for (int k = 1; k <= n; ++k)
    os << ",meanN_" << k << ",varN_" << k << ",meanNa_" << k << ",varNa_" << k
       << ",meann_" << k;
  if (labels)
    for (int k = 1; k <= n; ++k) os << ",phase_" << k;
  if (with_status) os << ",status";
  os << '\n';

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    os << format_double(row.delta_over_g) << ',' << format_double(row.energy) << ','
       << format_double(row.gap) << ',' << (row.degenerate ? 1 : 0);
    for (int k = 0; k < n; ++k) {
      const bool have = row.ok && k < static_cast<int>(row.observables.sites.size());
      const SiteObservables s = have ? row.observables.sites[k] : SiteObservables{nan, nan, nan, nan, nan};
      os << ',' << format_double(s.mean_total) << ',' << format_double(s.var_total)
         << ',' << format_double(s.mean_qubit) << ',' << format_double(s.var_qubit)
         << ',' << format_double(s.mean_phonon);
    }
    if (labels) {
      const auto& row_labels = (*labels)[i];
      for (int k = 0; k < n; ++k)
        os << ',' << (k < static_cast<int>(row_labels.size()) ? to_string(row_labels[k]) : "");
    }
    if (with_status) os << ',' << detail::csv_safe(row.status);
    os << '\n';
  }
}

inline nlohmann::json sweep_report_json(
    const SweepResult& result,
    const std::vector<std::vector<PhaseLabel>>* labels = nullptr) {
  if (labels && labels->size() != result.rows.size())
    throw ConsistencyError("sweep_report_json: one label row per sweep row required");
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    nlohmann::json j = {{"delta_over_g", row.delta_over_g},
                        {"ok", row.ok},
                        {"status", row.status},
                        {"energy", row.energy},
                        {"gap", row.gap},
                        {"degenerate", row.degenerate},
                        {"observables", observables_to_json(row.observables)}};
    if (labels) {
      nlohmann::json phases = nlohmann::json::array();
      for (const auto label : (*labels)[i]) phases.push_back(to_string(label));
      j["phases"] = phases;
    }
    rows.push_back(std::move(j));
  }
  return {{"provenance", provenance_to_json(result.provenance)},
          {"spec", result.provenance.spec_echo},
          {"rows", rows}};
}

}  // namespace ionjch
