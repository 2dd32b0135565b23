#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlb/harness/config.hpp"
#include "advlb/harness/eval.hpp"
#include "advlb/physical.hpp"
#include "advlb/search.hpp"

namespace advlb {

inline Json to_json_value(const AttackOutcome& o) {
  Json trace = Json::array();
  for (const auto& t : o.trace) trace.push_back({t.query, t.restart, t.confidence});
  return Json{{"success", o.success},
              {"theta", to_json_value(o.theta)},
              {"queries", o.queries},
              {"clean_label", o.clean_label},
              {"adv_label", o.adv_label},
              {"clean_confidence", o.clean_confidence},
              {"best_confidence", o.best_confidence},
              {"restarts_used", o.restarts_used},
              {"trace", trace}};
}

inline Json to_json_value(const EvalReport& r, bool include_traces = true) {
  Json images = Json::array();
  for (const auto& img : r.images) {
    Json j{{"name", img.name}, {"true_label", img.true_label}, {"skipped", img.skipped}};
    j["clean_label"] = img.clean_label ? Json(*img.clean_label) : Json(nullptr);
    if (img.outcome) {
      Json o = to_json_value(*img.outcome);
      if (!include_traces) o.erase("trace");
      j["outcome"] = o;
    }
    if (!img.error.empty()) j["error"] = img.error;
    images.push_back(std::move(j));
  }
  return Json{{"total", r.total},
              {"skipped_misclassified", r.skipped_misclassified},
              {"attempted", r.attempted},
              {"successes", r.successes},
              {"errors", r.errors},
              {"success_rate", r.success_rate},
              {"mean_queries_success", r.mean_queries_success},
              {"mean_queries_all", r.mean_queries_all},
              {"no_op", r.no_op},
              {"images", images}};
}

inline Json to_json_value(const SweepTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"value", r.value},
                    {"success_rate", r.success_rate},
                    {"flips", r.flips},
                    {"evaluated", r.evaluated}});
  }
  return Json{{"dim", dim_name(t.dim)},
              {"total", t.total},
              {"skipped_misclassified", t.skipped_misclassified},
              {"errors", t.errors},
              {"rows", rows}};
}

inline Json to_json_value(const LayoutGrid& g) {
  Json cells = Json::array();
  for (const auto& c : g.cells) {
    cells.push_back({{"r", c.angle_deg},
                     {"b", c.intercept},
                     {"success_rate", c.success_rate},
                     {"flips", c.flips},
                     {"evaluated", c.evaluated}});
  }
  return Json{{"total", g.total},
              {"skipped_misclassified", g.skipped_misclassified},
              {"angles", g.angles},
              {"intercepts", g.intercepts},
              {"cells", cells}};
}

inline Json to_json_value(const std::vector<RestartRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"k", r.k},
                   {"success_rate", r.report.success_rate},
                   {"mean_queries_success", r.report.mean_queries_success},
                   {"mean_queries_all", r.report.mean_queries_all},
                   {"attempted", r.report.attempted},
                   {"successes", r.report.successes}});
  }
  return out;
}

inline Json to_json_value(const ShiftReport& r, const std::vector<std::string>& class_names = {}) {
  const auto label_name = [&](LabelId c) -> Json {
    return c < class_names.size() ? Json(class_names[c]) : Json(nullptr);
  };
  Json bands = Json::array();
  for (const auto& b : r.bands) {
    Json samples = Json::array();
    for (const auto& s : b.samples) {
      samples.push_back({{"image", s.image},
                         {"theta", to_json_value(s.theta)},
                         {"top1", s.top1},
                         {"topk", s.topk}});
    }
    bands.push_back({{"lambda_lo", b.lambda_lo},
                     {"lambda_hi", b.lambda_hi},
                     {"top1", {{"class", b.top1_class},
                               {"name", label_name(b.top1_class)},
                               {"before", b.top1_before},
                               {"after", b.top1_after}}},
                     {"topk", {{"class", b.topk_class},
                               {"name", label_name(b.topk_class)},
                               {"before", b.topk_before},
                               {"after", b.topk_after}}},
                     {"top1_share_after", b.top1_share_after},
                     {"topk_share_after", b.topk_share_after},
                     {"samples", samples}});
  }
  return Json{{"images", r.images},
              {"num_classes", r.num_classes},
              {"top1_share_before", r.top1_share_before},
              {"topk_share_before", r.topk_share_before},
              {"clean_top1", r.clean_top1},
              {"clean_topk", r.clean_topk},
              {"bands", bands}};
}

inline Json to_json_value(const RobustResult& r) {
  Json items = Json::array();
  for (const auto& it : r.items) {
    Json j{{"transform",
            {{"angle_deg", it.transform.angle_deg},
             {"shift_x", it.transform.shift_x},
             {"shift_y", it.transform.shift_y}}}};
    if (it.outcome) j["outcome"] = to_json_value(*it.outcome);
    if (!it.error.empty()) j["error"] = it.error;
    items.push_back(std::move(j));
  }
  Json range = nullptr;
  if (r.range) {
    range = Json{{"min", to_json_value(r.range->min)},
                 {"max", to_json_value(r.range->max)},
                 {"support", r.range->support}};
  }
  return Json{{"support", r.support()}, {"effective_range", range}, {"items", items}};
}

// Report envelope: command, backend description, resolved config, result.
inline Json make_report(const std::string& command, const Json& backend, const ToolConfig& config,
                        Json result) {
  return Json{{"command", command},
              {"backend", backend},
              {"config", to_json_value(config)},
              {"result", std::move(result)}};
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << text;
}

inline std::string sweep_csv(const SweepTable& t) {
  std::string out = std::string(dim_name(t.dim)) + ",success_rate,flips,evaluated\n";
  for (const auto& r : t.rows) {
    out += Json(r.value).dump() + "," + Json(r.success_rate).dump() + "," +
           std::to_string(r.flips) + "," + std::to_string(r.evaluated) + "\n";
  }
  return out;
}

inline std::string layout_csv(const LayoutGrid& g) {
  std::string out = "r,b,success_rate,flips,evaluated\n";
  for (const auto& c : g.cells) {
    out += Json(c.angle_deg).dump() + "," + Json(c.intercept).dump() + "," +
           Json(c.success_rate).dump() + "," + std::to_string(c.flips) + "," +
           std::to_string(c.evaluated) + "\n";
  }
  return out;
}

inline std::string restarts_csv(const std::vector<RestartRow>& rows) {
  std::string out = "k,success_rate,mean_queries_success,mean_queries_all\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + Json(r.report.success_rate).dump() + "," +
           Json(r.report.mean_queries_success).dump() + "," +
           Json(r.report.mean_queries_all).dump() + "\n";
  }
  return out;
}

inline std::string shift_csv(const ShiftReport& r, const std::vector<std::string>& names = {}) {
  const auto name = [&](LabelId c) {
    return c < names.size() ? names[c] : std::to_string(c);
  };
  std::string out = "lambda_lo,lambda_hi,top1_class,top1_before,top1_after,topk_class,topk_before,topk_after\n";
  for (const auto& b : r.bands) {
    out += Json(b.lambda_lo).dump() + "," + Json(b.lambda_hi).dump() + "," +
           Json(name(b.top1_class)).dump() + "," + Json(b.top1_before).dump() + "," +
           Json(b.top1_after).dump() + "," + Json(name(b.topk_class)).dump() + "," +
           Json(b.topk_before).dump() + "," + Json(b.topk_after).dump() + "\n";
  }
  return out;
}

}  // namespace advlb
