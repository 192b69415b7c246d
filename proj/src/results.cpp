#include "vvcm/results.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace vvcm {

using nlohmann::ordered_json;

const char* const kCsvHeader =
    "taut_set,k,x_o_m,y_o_m,z_o_m,x_vo_m,y_vo_m,energy_J,k1,pivot,stability,cluster,margins,tensions";

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double round9(double value) { return std::strtod(format_number(value).c_str(), nullptr); }

namespace {

ordered_json numbers(const double* data, std::size_t n) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(round9(data[i]));
  return a;
}

ordered_json numbers(const std::vector<double>& v) { return numbers(v.data(), v.size()); }

std::string stability_name(const Solution& s) {
  return s.stability ? to_string(*s.stability) : "";
}

std::vector<long> cluster_ids(std::size_t count, const ReportOptions& options) {
  std::vector<long> ids(count, -1);
  if (!options.clusters) return ids;
  for (std::size_t g = 0; g < options.clusters->size(); ++g) {
    for (auto i : (*options.clusters)[g]) ids[i] = static_cast<long>(g);
  }
  return ids;
}

}  // namespace

std::string results_json(const std::vector<Solution>& solutions, const StepStats& stats,
                         const ReportOptions& options) {
  ordered_json doc;
  ordered_json list = ordered_json::array();
  for (const auto& s : solutions) {
    ordered_json r;
    r["taut_set"] = s.taut_set.labels();
    r["v_o_m"] = numbers(s.v_o.data(), 2);
    r["p_o_m"] = numbers(s.p_o.data(), 3);
    r["energy_J"] = round9(s.energy);
    r["k1"] = s.k1;
    r["pivot"] = s.pivot + 1;
    r["stability"] = s.stability ? ordered_json(stability_name(s)) : ordered_json(nullptr);
    r["margins"] = numbers(s.slack_margins);
    r["tensions"] = numbers(s.tensions);
    list.push_back(std::move(r));
  }
  doc["solutions"] = std::move(list);

  ordered_json st;
  st["counts"] = stats.counts;
  ordered_json by_k = ordered_json::object();
  for (const auto& [k, c] : stats.by_k) by_k[std::to_string(k)] = c;
  st["by_k"] = std::move(by_k);
  st["schur_singular"] = stats.schur_singular;
  if (options.timing) st["wall_time_s"] = stats.wall_time;
  doc["stats"] = std::move(st);

  if (options.clusters) {
    ordered_json groups = ordered_json::array();
    for (const auto& g : *options.clusters) {
      ordered_json members = ordered_json::array();
      for (auto i : g) members.push_back(solutions[i].taut_set.labels());
      groups.push_back(std::move(members));
    }
    doc["clusters"] = std::move(groups);
  }
  if (options.oracle) {
    ordered_json eq = ordered_json::array();
    for (const auto& e : *options.oracle) {
      ordered_json r;
      r["v_o_m"] = numbers(e.v_o.data(), 2);
      r["r_o_m"] = numbers(e.r_o.data(), 2);
      r["z_min_m"] = round9(e.z_min);
      r["active_set"] = to_labels(e.active_set);
      r["ground_contact"] = e.ground_contact;
      eq.push_back(std::move(r));
    }
    doc["oracle"] = std::move(eq);
  }
  return doc.dump(2) + "\n";
}

std::string results_csv(const std::vector<Solution>& solutions, const ReportOptions& options) {
  auto joined = [](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
    return s;
  };
  const auto clusters = cluster_ids(solutions.size(), options);
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (size_t j = 0; j < solutions.size(); ++j) {
    const auto& s = solutions[j];
    std::string set;
    for (int label : s.taut_set.labels()) set += (set.empty() ? "" : " ") + std::to_string(label);
    out << set << ',' << s.taut_set.k() << ',' << format_number(s.p_o.x()) << ','
        << format_number(s.p_o.y()) << ',' << format_number(s.p_o.z()) << ',' << format_number(s.v_o.x())
        << ',' << format_number(s.v_o.y()) << ',' << format_number(s.energy) << ',' << s.k1 << ','
        << s.pivot + 1 << ',' << stability_name(s) << ','
        << (clusters[j] >= 0 ? std::to_string(clusters[j]) : "") << ',' << joined(s.slack_margins) << ','
        << joined(s.tensions) << "\n";
  }
  return out.str();
}

std::string stats_text(const StepStats& stats, bool timing) {
  static const char* const kSteps[] = {"taut sets", "form closure", "CQP feasible", "force closure"};
  std::ostringstream out;
  for (size_t s = 0; s < stats.counts.size(); ++s) {
    out << "step " << s + 1 << " (" << kSteps[s] << "): " << stats.counts[s] << "\n";
  }
  out << "accepted by k:";
  for (const auto& [k, c] : stats.by_k) out << " " << k << ":" << c;
  out << "\n";
  if (stats.schur_singular) out << "singular Schur complement: " << stats.schur_singular << "\n";
  if (timing) out << "wall time: " << stats.wall_time << " s\n";
  return out.str();
}

}  // namespace vvcm
